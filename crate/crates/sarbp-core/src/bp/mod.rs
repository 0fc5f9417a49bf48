//! Back-projection: windows, Doppler precomputation, interpolation,
//! antenna reduction, and the imaging kernels.

pub mod doppler;
pub mod interp;
pub mod kernel;
pub mod window;

pub use doppler::{precompute_doppler_index, DopplerTable};
pub use interp::interp_linear;
pub use kernel::{
    backproject_optimized, backproject_reference, backproject_with, run_kernel, DopplerMode,
    KernelData, KernelOptions, KernelStats, StagedTrajectory,
};
pub use window::{make_window, WindowFamily, WindowForm, WindowSpec, WindowValues};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SarError};
use crate::sim::BeatSpectrum;

/// On/off switches for the individual optimization measures. The execution
/// backend (data-parallel pixel loop) is always on; it is a contract, not a
/// flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizationConfig {
    /// Per-chirp window vector instead of the full per-pixel matrix.
    pub window_vector: bool,
    /// Index-space interpolation with hoisted constants.
    pub math_opt: bool,
    /// Per-pixel Doppler table from the average velocity.
    pub doppler_precompute: bool,
    /// PSF-driven polar reconstruction grid.
    pub polar_grid: bool,
    /// Restrict imaging to these RX antennas (strictly increasing indices).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_subset: Option<Vec<usize>>,
}

impl OptimizationConfig {
    /// Everything off: the reference configuration.
    pub fn reference() -> Self {
        Self::default()
    }

    /// All measures on; antennas reduced to every other one.
    pub fn combined(num_rx: usize) -> Self {
        Self {
            window_vector: true,
            math_opt: true,
            doppler_precompute: true,
            polar_grid: true,
            rx_subset: Some((0..num_rx).step_by(2).collect()),
        }
    }

    pub fn validate(&self, num_rx: usize) -> Result<()> {
        if let Some(subset) = &self.rx_subset {
            if subset.is_empty() {
                return Err(SarError::config("rx_subset must not be empty"));
            }
            if !subset.windows(2).all(|w| w[0] < w[1]) {
                return Err(SarError::config("rx_subset must be strictly increasing"));
            }
            if *subset.last().unwrap() >= num_rx {
                return Err(SarError::config(format!(
                    "rx_subset index {} >= num_rx {num_rx}",
                    subset.last().unwrap()
                )));
            }
        }
        Ok(())
    }
}

/// Restrict a beat spectrum to the listed RX antennas.
///
/// The data cube shrinks by exactly `|subset| / N_rx`; chirp and bin axes
/// are untouched.
pub fn select_rx_subset(spectrum: &BeatSpectrum, subset: &[usize]) -> Result<BeatSpectrum> {
    if subset.is_empty() {
        return Err(SarError::config("rx subset must not be empty"));
    }
    if !subset.windows(2).all(|w| w[0] < w[1]) {
        return Err(SarError::config("rx subset must be strictly increasing"));
    }
    if *subset.last().unwrap() >= spectrum.num_rx {
        return Err(SarError::bounds(format!(
            "rx index {} >= {}",
            subset.last().unwrap(),
            spectrum.num_rx
        )));
    }
    let n_f = spectrum.num_bins;
    let mut data = Vec::with_capacity(spectrum.num_chirps * subset.len() * n_f);
    for m in 0..spectrum.num_chirps {
        for &n in subset {
            data.extend_from_slice(spectrum.row(m, n));
        }
    }
    Ok(BeatSpectrum {
        data,
        num_chirps: spectrum.num_chirps,
        num_rx: subset.len(),
        num_bins: n_f,
        f_start_hz: spectrum.f_start_hz,
        f_step_hz: spectrum.f_step_hz,
    })
}
