//! FMCW synthetic-aperture-radar image formation by back-projection.
//!
//! The crate provides two time-domain back-projection kernels — a reference
//! implementation that evaluates the full per-pixel Doppler geometry, and an
//! optimized one that works in index space with a precomputed per-pixel
//! Doppler table and a per-chirp window vector — together with everything
//! needed to exercise them without measured data:
//!
//! * [`signal`]: radar waveform constants, platform trajectory and antenna
//!   geometry, and derived quantities (chirp rate, wavelength, resolutions).
//! * [`sim`]: a point-scatterer FMCW scene simulator producing
//!   range-compressed beat spectra, the ground-truth oracle for the imagers.
//! * [`grid`]: Cartesian and PSF-driven polar reconstruction grids, plus
//!   polar-to-Cartesian resampling for comparisons.
//! * [`bp`]: window generation, Doppler precomputation, spectrum
//!   interpolation, antenna-subset reduction, and the two kernels.
//! * [`metrics`]: region SNR, image differences in dB, memory-footprint
//!   accounting, and a repeatable benchmark harness.
//! * [`io`]: the `SARBP1` beat-spectrum and `SARIM1` image binary formats
//!   and PGM export.
//! * [`config`] / [`pipeline`]: file-based pipeline configuration and the
//!   staged execution used by the CLI and the benchmark harness.
//!
//! Geometry is 2-D throughout. Numeric helpers and the kernels are generic
//! over the scalar type via [`scalar::Float`]; the crate-level aliases below
//! fix the default compute precision, while bulk data (spectra, images,
//! staged kernel inputs) is stored in single precision as the file formats
//! require.

pub mod bp;
pub mod config;
pub mod error;
pub mod geom;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod signal;
pub mod sim;

/// Default compute precision for geometry and kernel arithmetic.
pub type Real = f64;
/// 2-D point or vector at the default precision.
pub type Point = geom::Vec2<Real>;
/// Complex sample as stored in spectra and images.
pub type C32 = num_complex::Complex32;
/// Complex value at accumulation precision.
pub type C64 = num_complex::Complex64;

pub use error::{Result, SarError};
