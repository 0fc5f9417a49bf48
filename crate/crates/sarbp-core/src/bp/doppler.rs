//! Per-pixel Doppler precomputation for the optimized kernel.

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::ImageGrid;
use crate::signal::{ArrayGeometry, RadarParams, Trajectory, SPEED_OF_LIGHT};
use crate::Point;

/// Per-pixel Doppler index offsets in fractional bins, precomputed from the
/// average platform velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerTable {
    /// Doppler offset per pixel, in fractional bins of the beat spectrum.
    pub bins: Vec<f32>,
    /// Average velocity vector the table was built from.
    pub v_avg: Point,
    /// Pixels coincident with the aperture-center antenna; their entries are 0.
    pub flagged: Vec<usize>,
}

impl DopplerTable {
    pub fn bytes(&self) -> u64 {
        self.bins.len() as u64 * 4
    }

    /// All-zero table (platform at rest or Doppler disabled).
    pub fn zeros(pixels: usize) -> Self {
        Self {
            bins: vec![0.0; pixels],
            v_avg: Point::zero(),
            flagged: Vec::new(),
        }
    }
}

/// Distance below which a pixel counts as coincident with the reference
/// antenna position.
const SINGULAR_DISTANCE_M: f64 = 1e-9;

/// Precompute the per-pixel Doppler index table.
///
/// For pixel p the radial closing speed is approximated with TX and RX
/// co-located at the aperture-center antenna position q̄ (mean of the
/// per-chirp TX positions), using the average velocity:
/// `v_r(p) = 2 <p - q̄, v_avg> / |p - q̄|`. The stored entry is
/// `f0 * v_r(p) / c` expressed in fractional bins of the spectrum axis
/// (bin spacing `sample_rate_hz / num_samples`).
pub fn precompute_doppler_index(
    grid: &ImageGrid,
    traj: &Trajectory,
    geom: &ArrayGeometry,
    params: &RadarParams,
) -> Result<DopplerTable> {
    traj.validate(params)?;
    let v_avg = traj.mean_velocity();
    let f_step = params.derived_waveform().bin_spacing_hz;
    let hz_to_bins = params.f0_hz / (SPEED_OF_LIGHT * f_step);

    // mean TX antenna position over the aperture
    let mut q_bar = Point::zero();
    for m in 0..traj.len() {
        q_bar = q_bar + traj.poses[m] + geom.tx_offset.rotated_by(traj.headings[m]);
    }
    let q_bar = q_bar.scale(1.0 / traj.len() as f64);

    let entries: Vec<(f32, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let d = grid.position(p) - q_bar;
            let dist = d.norm();
            if dist < SINGULAR_DISTANCE_M {
                return (0.0, true);
            }
            let v_r = 2.0 * d.dot(v_avg) / dist;
            ((v_r * hz_to_bins) as f32, false)
        })
        .collect();

    let mut bins = Vec::with_capacity(entries.len());
    let mut flagged = Vec::new();
    for (p, (b, flag)) in entries.into_iter().enumerate() {
        bins.push(b);
        if flag {
            flagged.push(p);
        }
    }
    Ok(DopplerTable {
        bins,
        v_avg,
        flagged,
    })
}
