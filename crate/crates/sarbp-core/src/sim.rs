//! Synthetic FMCW scene simulator.
//!
//! Generates the range-compressed beat spectra that measured drive data
//! would otherwise provide, from point-scatterer scenes along a trajectory.
//! The signal model mirrors the imaging kernels exactly (stop-and-go delay
//! per chirp plus a linear Doppler phase ramp), so the matched filter is
//! exact and equivalence tests can be tight.

use num_complex::Complex;
use rayon::prelude::*;

use crate::bp::window::WindowFamily;
use crate::error::{Result, SarError};
use crate::scalar::Float;
use crate::signal::{antenna_positions, ArrayGeometry, RadarParams, Trajectory, SPEED_OF_LIGHT};
use crate::{Point, C32};

/// Ideal point scatterer with complex reflectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointScatterer {
    pub position: Point,
    pub amplitude: num_complex::Complex64,
}

impl PointScatterer {
    pub fn unit(position: Point) -> Self {
        Self {
            position,
            amplitude: num_complex::Complex64::new(1.0, 0.0),
        }
    }
}

/// Range-compressed complex data cube on an equidistant beat-frequency axis.
///
/// Layout is `[chirp m][rx n][frequency bin k]`, m-major; bin `k` sits at
/// `f_start_hz + k * f_step_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatSpectrum {
    pub data: Vec<C32>,
    pub num_chirps: usize,
    pub num_rx: usize,
    pub num_bins: usize,
    pub f_start_hz: f64,
    pub f_step_hz: f64,
}

impl BeatSpectrum {
    pub fn validate(&self) -> Result<()> {
        if self.data.len() != self.num_chirps * self.num_rx * self.num_bins {
            return Err(SarError::data(format!(
                "spectrum data length {} inconsistent with dims {}x{}x{}",
                self.data.len(),
                self.num_chirps,
                self.num_rx,
                self.num_bins
            )));
        }
        if self.f_step_hz.is_nan() || self.f_step_hz <= 0.0 {
            return Err(SarError::data("spectrum needs f_step_hz > 0"));
        }
        Ok(())
    }

    #[inline]
    pub fn row(&self, m: usize, n: usize) -> &[C32] {
        let start = (m * self.num_rx + n) * self.num_bins;
        &self.data[start..start + self.num_bins]
    }

    /// Payload size of the data cube in bytes (complex float32 = 8 B).
    pub fn bytes(&self) -> u64 {
        self.data.len() as u64 * 8
    }
}

/// Distance below which a scatterer counts as coincident with an antenna.
const SINGULAR_DISTANCE_M: f64 = 1e-9;

/// Synthesize time-domain beat samples for a point-scatterer scene.
///
/// The sample at fast time `t_i = i / f_s` of chirp `m`, antenna `n` is
/// `sum_k a_k * exp(j 2 pi ((mu tau_k + f0 v_k / c) t_i + f0 tau_k))` with
/// `tau_k` the two-way delay at the chirp's pose and `v_k` the TX + RX
/// radial closing speeds, both evaluated exactly as the imaging kernels do.
/// Output layout is `[m][n][t]`, length N_m * N_rx * N_s.
pub fn simulate_beat_time<T: Float>(
    params: &RadarParams,
    traj: &Trajectory,
    geom: &ArrayGeometry,
    scene: &[PointScatterer],
) -> Result<Vec<Complex<T>>> {
    params.validate()?;
    traj.validate(params)?;
    geom.validate(params)?;
    if scene.is_empty() {
        return Err(SarError::config("scene has no scatterers"));
    }
    for (i, s) in scene.iter().enumerate() {
        let amp = s.amplitude.norm();
        if amp.is_nan() || amp <= 0.0 {
            return Err(SarError::config(format!("scatterer {i} has zero amplitude")));
        }
    }
    // reject singular geometry up front
    for m in 0..params.num_chirps {
        for n in 0..params.num_rx {
            let (q_tx, q_rx) = antenna_positions(traj, geom, m, n)?;
            for (i, s) in scene.iter().enumerate() {
                if s.position.distance(q_tx) < SINGULAR_DISTANCE_M
                    || s.position.distance(q_rx) < SINGULAR_DISTANCE_M
                {
                    return Err(SarError::config(format!(
                        "scatterer {i} coincides with an antenna at chirp {m}"
                    )));
                }
            }
        }
    }

    let n_m = params.num_chirps;
    let n_rx = params.num_rx;
    let n_s = params.num_samples;
    let mu = params.chirp_rate();
    let f0 = params.f0_hz;
    let dt = 1.0 / params.sample_rate_hz;
    let tau_pi = 2.0 * std::f64::consts::PI;

    let mut out = vec![Complex::new(T::zero(), T::zero()); n_m * n_rx * n_s];
    out.par_chunks_mut(n_rx * n_s)
        .enumerate()
        .for_each(|(m, chunk)| {
            let velocity = traj.velocities[m];
            for n in 0..n_rx {
                let (q_tx, q_rx) = antenna_positions(traj, geom, m, n).expect("validated");
                let row = &mut chunk[n * n_s..(n + 1) * n_s];
                for s in scene {
                    let to_tx = s.position - q_tx;
                    let to_rx = s.position - q_rx;
                    let d_tx = to_tx.norm();
                    let d_rx = to_rx.norm();
                    let v_radial = to_tx.dot(velocity) / d_tx + to_rx.dot(velocity) / d_rx;
                    let tau = (d_tx + d_rx) / SPEED_OF_LIGHT;
                    let f_beat = mu * tau + f0 * v_radial / SPEED_OF_LIGHT;
                    let carrier_phase = tau_pi * f0 * tau;
                    for (i, sample) in row.iter_mut().enumerate() {
                        let phase = tau_pi * f_beat * (i as f64 * dt) + carrier_phase;
                        let (sin, cos) = phase.sin_cos();
                        let re = s.amplitude.re * cos - s.amplitude.im * sin;
                        let im = s.amplitude.re * sin + s.amplitude.im * cos;
                        sample.re += T::of(re);
                        sample.im += T::of(im);
                    }
                }
            }
        });
    Ok(out)
}

/// Range-compress time-domain samples into an equidistant beat spectrum.
///
/// Per (chirp, rx) row: apply the fast-time window, take the forward DFT
/// scaled by 1/N so a unit tone at an exact bin compresses to unit
/// magnitude, and re-reference the per-bin phase to the chirp center
/// (multiply bin k by exp(j pi k (N-1)/N)). The re-referencing gives the
/// compressed peak a flat phase across its main lobe, which complex linear
/// interpolation between bins requires; without it adjacent bins are nearly
/// anti-phased and half-bin targets would cancel.
pub fn range_compress<T: Float + rustfft::FftNum>(
    params: &RadarParams,
    time_samples: &[Complex<T>],
    fast_time_window: WindowFamily,
) -> Result<BeatSpectrum> {
    let n_s = params.num_samples;
    let rows = params.num_chirps * params.num_rx;
    if time_samples.len() != rows * n_s {
        return Err(SarError::data(format!(
            "expected {} time samples, got {}",
            rows * n_s,
            time_samples.len()
        )));
    }
    let mut planner = rustfft::FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(n_s);

    let window: Vec<T> = (0..n_s)
        .map(|i| fast_time_window.eval(T::of(i as f64 / (n_s as f64 - 1.0))))
        .collect();
    let scale = T::of(1.0 / n_s as f64);
    let centering: Vec<Complex<T>> = (0..n_s)
        .map(|k| {
            let phase = std::f64::consts::PI * k as f64 * (n_s as f64 - 1.0) / n_s as f64;
            Complex::new(T::of(phase.cos()), T::of(phase.sin()))
        })
        .collect();

    let mut data = vec![C32::new(0.0, 0.0); rows * n_s];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n_s];
    for r in 0..rows {
        let src = &time_samples[r * n_s..(r + 1) * n_s];
        for i in 0..n_s {
            buf[i] = src[i] * window[i];
        }
        fft.process(&mut buf);
        for k in 0..n_s {
            let v = buf[k] * centering[k] * scale;
            data[r * n_s + k] = C32::new(v.re.as_f64() as f32, v.im.as_f64() as f32);
        }
    }

    Ok(BeatSpectrum {
        data,
        num_chirps: params.num_chirps,
        num_rx: params.num_rx,
        num_bins: n_s,
        f_start_hz: 0.0,
        f_step_hz: params.sample_rate_hz / n_s as f64,
    })
}

/// Simulate and range-compress in one step.
pub fn simulate_spectrum(
    params: &RadarParams,
    traj: &Trajectory,
    geom: &ArrayGeometry,
    scene: &[PointScatterer],
    fast_time_window: WindowFamily,
) -> Result<BeatSpectrum> {
    let time = simulate_beat_time::<f64>(params, traj, geom, scene)?;
    range_compress(params, &time, fast_time_window)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_uniform(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard complex Gaussian deviate for cell (seed, m, n, k).
fn complex_gaussian(seed: u64, m: usize, n: usize, k: usize) -> (f64, f64) {
    let mut x = splitmix64(seed);
    x = splitmix64(x ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    x = splitmix64(x ^ (n as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F));
    x = splitmix64(x ^ (k as u64).wrapping_mul(0x1656_67B1_9E37_79F9));
    let u1 = unit_uniform(x);
    let u2 = unit_uniform(splitmix64(x));
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let (sin, cos) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    (r * cos, r * sin)
}

/// Add i.i.d. circular complex Gaussian noise with per-component standard
/// deviation `sigma`. The generator is counter-based and keyed by
/// (seed, m, n, k), so the result does not depend on evaluation order.
pub fn add_noise(spectrum: &BeatSpectrum, sigma: f64, seed: u64) -> Result<BeatSpectrum> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(SarError::config("noise sigma must be >= 0"));
    }
    let mut out = spectrum.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let (n_rx, n_f) = (spectrum.num_rx, spectrum.num_bins);
    out.data
        .par_iter_mut()
        .enumerate()
        .for_each(|(idx, v)| {
            let m = idx / (n_rx * n_f);
            let n = (idx / n_f) % n_rx;
            let k = idx % n_f;
            let (g_re, g_im) = complex_gaussian(seed, m, n, k);
            v.re += (sigma * g_re) as f32;
            v.im += (sigma * g_im) as f32;
        });
    Ok(out)
}
