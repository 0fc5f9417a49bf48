//! The back-projection kernels.
//!
//! Both kernels correlate each pixel's hypothetical echo with the measured
//! beat spectrum and sum coherently over chirps and RX antennas. The
//! reference kernel evaluates the Doppler geometry per (pixel, chirp,
//! antenna) with scalar products; the optimized kernel works in index space
//! with hoisted constants and a precomputed per-pixel Doppler table.
//!
//! The pixel loop is data-parallel with no shared mutable state, and the
//! per-pixel reduction order is fixed (chirps outer, antennas inner), so
//! results are bit-identical for any number of worker threads.

use rayon::prelude::*;

use crate::bp::interp::interp_linear;
use crate::bp::window::{WindowForm, WindowValues};
use crate::bp::DopplerTable;
use crate::error::{Result, SarError};
use crate::grid::{ImageGrid, SarImage};
use crate::scalar::Float;
use crate::signal::{ArrayGeometry, RadarParams, Trajectory, SPEED_OF_LIGHT};
use crate::sim::BeatSpectrum;
use crate::C32;

/// How the per-contribution Doppler shift is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DopplerMode {
    /// Scalar products against the per-chirp velocity, per (p, m, n).
    PerChirp,
    /// Precomputed per-pixel table from the average velocity.
    Precomputed,
    /// No Doppler correction at all (for ablation tests).
    Disabled,
}

/// Kernel variant switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelOptions {
    pub doppler: DopplerMode,
    /// Work directly in fractional-bin index space with precomputed
    /// constants instead of forming the hypothetical beat frequency in Hz.
    pub index_space: bool,
}

impl KernelOptions {
    pub fn reference() -> Self {
        Self {
            doppler: DopplerMode::PerChirp,
            index_space: false,
        }
    }

    pub fn optimized() -> Self {
        Self {
            doppler: DopplerMode::Precomputed,
            index_space: true,
        }
    }
}

/// Instrumentation counters from one kernel run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KernelStats {
    /// Scalar-product evaluations against the velocity vector.
    pub scalar_products: u64,
    /// Accumulated (pixel, chirp, antenna) contributions.
    pub contributions: u64,
    /// Pixels coincident with an antenna position, forced to zero.
    pub flagged_pixels: Vec<usize>,
}

/// Trajectory staged in the kernel's single-precision working layout.
#[derive(Debug, Clone)]
pub struct StagedTrajectory {
    pub poses: Vec<[f32; 2]>,
    pub velocities: Vec<[f32; 2]>,
    pub headings: Vec<[f32; 2]>,
}

impl StagedTrajectory {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        Self {
            poses: traj.poses.iter().map(|p| p.to_f32_pair()).collect(),
            velocities: traj.velocities.iter().map(|p| p.to_f32_pair()).collect(),
            headings: traj.headings.iter().map(|p| p.to_f32_pair()).collect(),
        }
    }

    pub fn bytes(&self) -> u64 {
        (self.poses.len() + self.velocities.len() + self.headings.len()) as u64 * 8
    }
}

/// Borrowed view of everything a kernel run needs, already staged.
pub struct KernelData<'a> {
    pub spectrum: &'a BeatSpectrum,
    pub window: &'a WindowValues,
    pub doppler: Option<&'a DopplerTable>,
    pub positions: &'a [[f32; 2]],
    pub traj: &'a StagedTrajectory,
    pub tx_offset: [f32; 2],
    pub rx_offsets: &'a [[f32; 2]],
}

const SINGULAR_DISTANCE_M: f64 = 1e-9;

fn validate(data: &KernelData<'_>, grid: &ImageGrid, opts: KernelOptions) -> Result<()> {
    data.spectrum.validate()?;
    let n_m = data.spectrum.num_chirps;
    if data.traj.poses.len() != n_m {
        return Err(SarError::data(format!(
            "trajectory has {} poses for {} chirps",
            data.traj.poses.len(),
            n_m
        )));
    }
    if data.rx_offsets.len() != data.spectrum.num_rx {
        return Err(SarError::data(format!(
            "{} rx offsets for {} rx channels",
            data.rx_offsets.len(),
            data.spectrum.num_rx
        )));
    }
    if data.positions.len() != grid.len() {
        return Err(SarError::data("pixel positions do not match the grid"));
    }
    match data.window {
        WindowValues::Vector(v) if v.len() != n_m => {
            return Err(SarError::data("window vector length != num chirps"));
        }
        WindowValues::Matrix { data: w, num_chirps }
            if *num_chirps != n_m || w.len() != grid.len() * n_m =>
        {
            return Err(SarError::data("window matrix does not match grid x chirps"));
        }
        _ => {}
    }
    if opts.doppler == DopplerMode::Precomputed {
        match data.doppler {
            Some(t) if t.bins.len() == grid.len() => {}
            Some(_) => return Err(SarError::data("doppler table does not match the grid")),
            None => return Err(SarError::data("doppler table required but missing")),
        }
    }
    Ok(())
}

/// Run a back-projection kernel over staged inputs.
///
/// Generic over the compute scalar `T`; distances, phases, and
/// interpolation run in `T`, per-pixel accumulation always in f64 (twice
/// the single-precision storage width), stored back as single precision.
pub fn run_kernel<T: Float>(
    data: &KernelData<'_>,
    grid: &ImageGrid,
    params: &RadarParams,
    opts: KernelOptions,
) -> Result<(SarImage, KernelStats)> {
    validate(data, grid, opts)?;

    let n_m = data.spectrum.num_chirps;
    let n_rx = data.spectrum.num_rx;
    let f_step = data.spectrum.f_step_hz;
    let f_start = data.spectrum.f_start_hz;
    let mu = params.chirp_rate();
    let f0 = params.f0_hz;

    // hoisted constants
    let c_t = T::of(SPEED_OF_LIGHT);
    let mu_t = T::of(mu);
    let f0_t = T::of(f0);
    let f_step_t = T::of(f_step);
    let inv_f_step = T::of(1.0 / f_step);
    let f_start_t = T::of(f_start);
    let a1 = T::of(mu / (SPEED_OF_LIGHT * f_step));
    let a2_im = T::of(-2.0 * std::f64::consts::PI * f0 / SPEED_OF_LIGHT);
    let index_offset = T::of(-f_start / f_step);
    let dopp_to_bins = T::of(f0 / (SPEED_OF_LIGHT * f_step));
    let minus_two_pi = T::of(-2.0 * std::f64::consts::PI);
    let singular = T::of(SINGULAR_DISTANCE_M);

    let per_pixel: Vec<(C32, u64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let pos = data.positions[p];
            let px = T::of(pos[0] as f64);
            let py = T::of(pos[1] as f64);
            let mut acc_re = 0.0f64;
            let mut acc_im = 0.0f64;
            let mut scalar_products = 0u64;
            for m in 0..n_m {
                let pose = data.traj.poses[m];
                let heading = data.traj.headings[m];
                let (hx, hy) = (T::of(heading[0] as f64), T::of(heading[1] as f64));
                let (ox, oy) = (
                    T::of(data.tx_offset[0] as f64),
                    T::of(data.tx_offset[1] as f64),
                );
                let q_tx_x = T::of(pose[0] as f64) + hx * ox - hy * oy;
                let q_tx_y = T::of(pose[1] as f64) + hy * ox + hx * oy;
                let dxt = px - q_tx_x;
                let dyt = py - q_tx_y;
                let d_tx = (dxt * dxt + dyt * dyt).sqrt();
                if d_tx < singular {
                    return (C32::new(0.0, 0.0), scalar_products, true);
                }
                let velocity = data.traj.velocities[m];
                let (vx, vy) = (T::of(velocity[0] as f64), T::of(velocity[1] as f64));
                let v_tx = if opts.doppler == DopplerMode::PerChirp {
                    scalar_products += 1;
                    (dxt * vx + dyt * vy) / d_tx
                } else {
                    T::zero()
                };
                for n in 0..n_rx {
                    let off = data.rx_offsets[n];
                    let (ox, oy) = (T::of(off[0] as f64), T::of(off[1] as f64));
                    let q_rx_x = T::of(pose[0] as f64) + hx * ox - hy * oy;
                    let q_rx_y = T::of(pose[1] as f64) + hy * ox + hx * oy;
                    let dxr = px - q_rx_x;
                    let dyr = py - q_rx_y;
                    let d_rx = (dxr * dxr + dyr * dyr).sqrt();
                    if d_rx < singular {
                        return (C32::new(0.0, 0.0), scalar_products, true);
                    }
                    let d_hyp = d_tx + d_rx;

                    // Doppler offset in fractional bins
                    let dopp_bins = match opts.doppler {
                        DopplerMode::PerChirp => {
                            scalar_products += 1;
                            let v_rx = (dxr * vx + dyr * vy) / d_rx;
                            let v = v_tx + v_rx;
                            if opts.index_space {
                                dopp_to_bins * v
                            } else {
                                f0_t * v / c_t * inv_f_step
                            }
                        }
                        DopplerMode::Precomputed => {
                            let t = data.doppler.expect("validated");
                            T::of(t.bins[p] as f64)
                        }
                        DopplerMode::Disabled => T::zero(),
                    };

                    let (index, phase) = if opts.index_space {
                        (a1 * d_hyp + dopp_bins + index_offset, a2_im * d_hyp)
                    } else {
                        let tau = d_hyp / c_t;
                        let f_hyp = mu_t * tau + dopp_bins * f_step_t;
                        ((f_hyp - f_start_t) * inv_f_step, minus_two_pi * f0_t * tau)
                    };

                    let (sin, cos) = phase.sin_cos();
                    let sample = interp_linear::<T, f32>(data.spectrum.row(m, n), index);
                    let w = T::of(data.window.value(p, m) as f64);
                    let re = (cos * sample.re - sin * sample.im) * w;
                    let im = (cos * sample.im + sin * sample.re) * w;
                    acc_re += re.as_f64();
                    acc_im += im.as_f64();
                }
            }
            (C32::new(acc_re as f32, acc_im as f32), scalar_products, false)
        })
        .collect();

    let mut values = Vec::with_capacity(per_pixel.len());
    let mut stats = KernelStats {
        contributions: (grid.len() as u64) * (n_m as u64) * (n_rx as u64),
        ..KernelStats::default()
    };
    for (p, (v, sp, flagged)) in per_pixel.into_iter().enumerate() {
        values.push(v);
        stats.scalar_products += sp;
        if flagged {
            stats.flagged_pixels.push(p);
        }
    }
    Ok((SarImage::new(values, grid.clone())?, stats))
}

/// Stage unstaged inputs and run a kernel; the entry point behind the two
/// public algorithm variants.
#[allow(clippy::too_many_arguments)]
pub fn backproject_with<T: Float>(
    spectrum: &BeatSpectrum,
    traj: &Trajectory,
    geom: &ArrayGeometry,
    grid: &ImageGrid,
    window: &WindowValues,
    doppler: Option<&DopplerTable>,
    params: &RadarParams,
    opts: KernelOptions,
) -> Result<(SarImage, KernelStats)> {
    let staged_traj = StagedTrajectory::from_trajectory(traj);
    let positions = grid.positions_f32();
    let rx_offsets: Vec<[f32; 2]> = geom.rx_offsets.iter().map(|o| o.to_f32_pair()).collect();
    let data = KernelData {
        spectrum,
        window,
        doppler,
        positions: &positions,
        traj: &staged_traj,
        tx_offset: geom.tx_offset.to_f32_pair(),
        rx_offsets: &rx_offsets,
    };
    run_kernel::<T>(&data, grid, params, opts)
}

/// Standard back-projection: full per-pixel window matrix and per-chirp
/// Doppler geometry evaluated with scalar products.
pub fn backproject_reference(
    spectrum: &BeatSpectrum,
    traj: &Trajectory,
    geom: &ArrayGeometry,
    grid: &ImageGrid,
    window: &WindowValues,
    params: &RadarParams,
) -> Result<SarImage> {
    if window.form() != WindowForm::FullMatrix {
        return Err(SarError::config(
            "reference kernel requires the full window matrix",
        ));
    }
    backproject_with::<crate::Real>(
        spectrum,
        traj,
        geom,
        grid,
        window,
        None,
        params,
        KernelOptions::reference(),
    )
    .map(|(image, _)| image)
}

/// Optimized back-projection: per-chirp window vector, precomputed Doppler
/// table, and index-space interpolation with hoisted constants.
#[allow(clippy::too_many_arguments)]
pub fn backproject_optimized(
    spectrum: &BeatSpectrum,
    traj: &Trajectory,
    geom: &ArrayGeometry,
    grid: &ImageGrid,
    window: &WindowValues,
    doppler: &DopplerTable,
    params: &RadarParams,
) -> Result<SarImage> {
    if window.form() != WindowForm::PerChirpVector {
        return Err(SarError::config(
            "optimized kernel requires the per-chirp window vector",
        ));
    }
    backproject_with::<crate::Real>(
        spectrum,
        traj,
        geom,
        grid,
        window,
        Some(doppler),
        params,
        KernelOptions::optimized(),
    )
    .map(|(image, _)| image)
}
