//! Linear interpolation of a complex spectrum row at a fractional bin index.

use num_complex::Complex;

use crate::scalar::Float;

/// Linearly interpolate `row` at the fractional bin `index`.
///
/// Real and imaginary components are blended independently. Indices outside
/// [0, N_f - 1] (including NaN) contribute nothing: pixels whose
/// hypothetical beat frequency falls outside the sampled swath must not
/// accumulate energy.
#[inline]
pub fn interp_linear<T: Float, S: Float>(row: &[Complex<S>], index: T) -> Complex<T> {
    let n = row.len();
    if n == 0 {
        return Complex::new(T::zero(), T::zero());
    }
    let max = T::of((n - 1) as f64);
    if !(index >= T::zero() && index <= max) {
        return Complex::new(T::zero(), T::zero());
    }
    let k = index.floor();
    let frac = index - k;
    let k = k.as_f64() as usize;
    let lo = row[k];
    let lo = Complex::new(T::of(lo.re.as_f64()), T::of(lo.im.as_f64()));
    if frac == T::zero() {
        return lo;
    }
    let hi = row[k + 1];
    let hi = Complex::new(T::of(hi.re.as_f64()), T::of(hi.im.as_f64()));
    let w = T::one() - frac;
    Complex::new(lo.re * w + hi.re * frac, lo.im * w + hi.im * frac)
}
