//! Aperture window functions for the slow-time (chirp) dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SarError};
use crate::grid::ImageGrid;
use crate::scalar::Float;
use crate::signal::Trajectory;

/// Window family evaluated on the normalized abscissa u in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum WindowFamily {
    Rectangular,
    Hann,
    Kaiser { beta: f64 },
}

impl WindowFamily {
    pub fn eval<T: Float>(&self, u: T) -> T {
        let two = T::of(2.0);
        match *self {
            WindowFamily::Rectangular => T::one(),
            WindowFamily::Hann => {
                T::of(0.5) * (T::one() - (two * T::PI() * u).cos())
            }
            WindowFamily::Kaiser { beta } => {
                let beta = T::of(beta);
                let arg = T::one() - (two * u - T::one()).powi(2);
                let arg = if arg < T::zero() { T::zero() } else { arg };
                bessel_i0(beta * arg.sqrt()) / bessel_i0(beta)
            }
        }
    }

    /// -3 dB main-lobe width of the windowed DFT response, in bins.
    ///
    /// Evaluated numerically from the continuous window transform
    /// W(x) = integral of w(u) * exp(-j 2 pi x (u - 1/2)) du, which is real
    /// for these symmetric families. Rectangular gives 0.886, Hann 1.44.
    pub fn mainlobe_width_3db_bins(&self) -> f64 {
        let n = 4096;
        let w: Vec<f64> = (0..n)
            .map(|i| self.eval((i as f64 + 0.5) / n as f64))
            .collect();
        let response = |x: f64| -> f64 {
            let mut acc = 0.0;
            for (i, &wi) in w.iter().enumerate() {
                let u = (i as f64 + 0.5) / n as f64 - 0.5;
                acc += wi * (2.0 * std::f64::consts::PI * x * u).cos();
            }
            acc / n as f64
        };
        let peak = response(0.0);
        let target = peak / 2f64.sqrt();
        // bisect the first crossing of |W| = peak / sqrt(2)
        let mut lo = 0.0;
        let mut hi = 0.05;
        while response(hi) > target {
            hi += 0.05;
            if hi > 16.0 {
                return f64::NAN;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if response(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo + hi // full width = 2 * half width
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0<T: Float>(x: T) -> T {
    let quarter_x2 = x * x * T::of(0.25);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..64 {
        let k_t = T::of(k as f64);
        term = term * quarter_x2 / (k_t * k_t);
        sum += term;
        if term < sum * T::of(1e-18) {
            break;
        }
    }
    sum
}

/// Storage form of the aperture window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowForm {
    /// One weight per pixel and chirp, the literal reading of the standard
    /// algorithm.
    FullMatrix,
    /// One weight per chirp, shared by all pixels.
    PerChirpVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub family: WindowFamily,
    pub form: WindowForm,
}

/// Materialized window weights, stored single precision.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowValues {
    Matrix { data: Vec<f32>, num_chirps: usize },
    Vector(Vec<f32>),
}

impl WindowValues {
    #[inline]
    pub fn value(&self, pixel: usize, m: usize) -> f32 {
        match self {
            WindowValues::Matrix { data, num_chirps } => data[pixel * num_chirps + m],
            WindowValues::Vector(v) => v[m],
        }
    }

    pub fn form(&self) -> WindowForm {
        match self {
            WindowValues::Matrix { .. } => WindowForm::FullMatrix,
            WindowValues::Vector(_) => WindowForm::PerChirpVector,
        }
    }

    pub fn num_chirps(&self) -> usize {
        match self {
            WindowValues::Matrix { num_chirps, .. } => *num_chirps,
            WindowValues::Vector(v) => v.len(),
        }
    }

    pub fn bytes(&self) -> u64 {
        match self {
            WindowValues::Matrix { data, .. } => data.len() as u64 * 4,
            WindowValues::Vector(v) => v.len() as u64 * 4,
        }
    }
}

/// Build the aperture window for a grid and trajectory.
///
/// The per-chirp vector samples the family at the equidistant abscissa
/// u = m / (N_m - 1). The full matrix samples it at the along-track
/// arc-length fraction of pose m, which is non-equidistant when the speed
/// varies and coincides with the equidistant abscissa (hence with the
/// vector, row for row) for constant-speed passes. N_m = 1 yields the
/// all-ones window.
pub fn make_window(spec: &WindowSpec, grid: &ImageGrid, traj: &Trajectory) -> Result<WindowValues> {
    let n_m = traj.len();
    if n_m == 0 {
        return Err(SarError::config("empty trajectory"));
    }
    match spec.form {
        WindowForm::PerChirpVector => {
            // equidistant abscissa u = m / (N_m - 1)
            let row: Vec<f32> = if n_m == 1 {
                vec![1.0]
            } else {
                (0..n_m)
                    .map(|m| spec.family.eval(m as f64 / (n_m as f64 - 1.0)) as f32)
                    .collect()
            };
            let sum: f64 = row.iter().map(|&w| w as f64).sum();
            if sum.is_nan() || sum <= 0.0 {
                return Err(SarError::config("window vector sums to zero"));
            }
            Ok(WindowValues::Vector(row))
        }
        WindowForm::FullMatrix => {
            let row: Vec<f32> = if n_m == 1 {
                vec![1.0]
            } else {
                arc_length_abscissa(traj)
                    .into_iter()
                    .map(|u| spec.family.eval(u) as f32)
                    .collect()
            };
            let pixels = grid.len();
            let total = pixels
                .checked_mul(n_m)
                .ok_or_else(|| SarError::config("window matrix size overflows"))?;
            let mut data = Vec::with_capacity(total);
            for _ in 0..pixels {
                data.extend_from_slice(&row);
            }
            Ok(WindowValues::Matrix {
                data,
                num_chirps: n_m,
            })
        }
    }
}

/// Along-track arc-length fraction per chirp. Equidistant steps collapse to
/// the exact m / (N_m - 1) grid so that constant-speed matrices reproduce
/// the per-chirp vector bit for bit.
fn arc_length_abscissa(traj: &Trajectory) -> Vec<f64> {
    let n = traj.len();
    let mut steps = Vec::with_capacity(n - 1);
    for m in 1..n {
        steps.push(traj.poses[m].distance(traj.poses[m - 1]));
    }
    let min = steps.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = steps.iter().cloned().fold(0.0, f64::max);
    let equidistant = max == 0.0 || (max - min) <= 1e-12 * max;
    if equidistant {
        return (0..n).map(|m| m as f64 / (n as f64 - 1.0)).collect();
    }
    let total: f64 = steps.iter().sum();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    for s in steps {
        acc += s;
        out.push(acc / total);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::cartesian_grid;
    use crate::signal::RadarParams;
    use crate::Point;

    fn small_grid() -> ImageGrid {
        cartesian_grid(1.0, 1.0, 0.5, Point::zero())
    }

    fn traj_n(n: usize, speed: f64) -> Trajectory {
        let p = RadarParams {
            num_chirps: n,
            ..RadarParams::desk_scale()
        };
        Trajectory::straight(&p, Point::zero(), Point::new(1.0, 0.0), speed)
    }

    #[test]
    fn hann_endpoints_n3() {
        let spec = WindowSpec {
            family: WindowFamily::Hann,
            form: WindowForm::PerChirpVector,
        };
        let w = make_window(&spec, &small_grid(), &traj_n(3, 10.0)).unwrap();
        match w {
            WindowValues::Vector(v) => {
                assert!(v[0].abs() < 1e-7);
                assert!((v[1] - 1.0).abs() < 1e-7);
                assert!(v[2].abs() < 1e-7);
            }
            _ => panic!("expected vector"),
        }
    }

    #[test]
    fn single_chirp_window_is_one() {
        let spec = WindowSpec {
            family: WindowFamily::Hann,
            form: WindowForm::PerChirpVector,
        };
        let w = make_window(&spec, &small_grid(), &traj_n(1, 10.0)).unwrap();
        assert_eq!(w, WindowValues::Vector(vec![1.0]));
    }

    #[test]
    fn kaiser_beta_zero_is_rectangular() {
        for &u in &[0.0, 0.3, 0.5, 0.9, 1.0] {
            let k = WindowFamily::Kaiser { beta: 0.0 }.eval::<f64>(u);
            assert!((k - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn kaiser_is_symmetric_and_tapers() {
        let f = WindowFamily::Kaiser { beta: 6.0 };
        assert!((f.eval::<f64>(0.2) - f.eval::<f64>(0.8)).abs() < 1e-12);
        assert!(f.eval::<f64>(0.0) < f.eval::<f64>(0.25));
        assert!(f.eval::<f64>(0.25) < f.eval::<f64>(0.5));
        // f32 instantiation agrees with f64
        assert!((f.eval::<f32>(0.3) as f64 - f.eval::<f64>(0.3)).abs() < 1e-6);
    }

    #[test]
    fn matrix_rows_equal_vector_for_constant_speed() {
        let spec_m = WindowSpec {
            family: WindowFamily::Hann,
            form: WindowForm::FullMatrix,
        };
        let spec_v = WindowSpec {
            family: WindowFamily::Hann,
            form: WindowForm::PerChirpVector,
        };
        let grid = small_grid();
        let traj = traj_n(16, 10.0);
        let m = make_window(&spec_m, &grid, &traj).unwrap();
        let v = make_window(&spec_v, &grid, &traj).unwrap();
        let vec = match &v {
            WindowValues::Vector(v) => v.clone(),
            _ => unreachable!(),
        };
        for p in 0..grid.len() {
            for (i, &w) in vec.iter().enumerate() {
                assert_eq!(m.value(p, i), w, "pixel {p} chirp {i}");
            }
        }
    }

    #[test]
    fn matrix_differs_from_vector_under_acceleration() {
        let p = RadarParams {
            num_chirps: 16,
            ..RadarParams::desk_scale()
        };
        let traj = Trajectory::accelerating(&p, Point::zero(), Point::new(1.0, 0.0), 5.0, 15.0);
        let grid = small_grid();
        let m = make_window(
            &WindowSpec {
                family: WindowFamily::Hann,
                form: WindowForm::FullMatrix,
            },
            &grid,
            &traj,
        )
        .unwrap();
        let v = make_window(
            &WindowSpec {
                family: WindowFamily::Hann,
                form: WindowForm::PerChirpVector,
            },
            &grid,
            &traj,
        )
        .unwrap();
        let differs = (0..16).any(|i| m.value(0, i) != v.value(0, i));
        assert!(differs);
    }

    #[test]
    fn window_byte_sizes() {
        let grid = cartesian_grid(2.0, 1.0, 0.5, Point::zero()); // 5 x 3 = 15 px
        let traj = traj_n(8, 10.0);
        let m = make_window(
            &WindowSpec {
                family: WindowFamily::Rectangular,
                form: WindowForm::FullMatrix,
            },
            &grid,
            &traj,
        )
        .unwrap();
        assert_eq!(m.bytes(), 15 * 8 * 4);
        let v = make_window(
            &WindowSpec {
                family: WindowFamily::Rectangular,
                form: WindowForm::PerChirpVector,
            },
            &grid,
            &traj,
        )
        .unwrap();
        assert_eq!(v.bytes(), 8 * 4);
    }

    #[test]
    fn mainlobe_widths_match_literature() {
        let rect = WindowFamily::Rectangular.mainlobe_width_3db_bins();
        assert!((rect - 0.886).abs() < 0.01, "rect width {rect}");
        let hann = WindowFamily::Hann.mainlobe_width_3db_bins();
        assert!((hann - 1.44).abs() < 0.02, "hann width {hann}");
        let k6 = WindowFamily::Kaiser { beta: 6.0 }.mainlobe_width_3db_bins();
        let k9 = WindowFamily::Kaiser { beta: 9.0 }.mainlobe_width_3db_bins();
        assert!(k6 > rect && k6 < 1.5, "kaiser(6) width {k6}");
        assert!(k9 > k6, "width must grow with beta: {k9} vs {k6}");
    }
}
