//! Staged pipeline execution: apply the optimization measures in order
//! (antenna subset, grid choice, window/Doppler precomputation, kernel) with
//! a clean load/compute split for benchmarking.

use std::borrow::Cow;
use std::time::Instant;

use crate::bp::{
    make_window, precompute_doppler_index, run_kernel, select_rx_subset, DopplerMode,
    DopplerTable, KernelData, KernelOptions, KernelStats, OptimizationConfig, StagedTrajectory,
    WindowFamily, WindowForm, WindowSpec, WindowValues,
};
use crate::config::{AlgoKind, GridSpec, PipelineConfig};
use crate::error::{Result, SarError};
use crate::grid::{cartesian_grid, polar_grid_covering, ImageGrid, SarImage};
use crate::scalar::Float;
use crate::signal::{ArrayGeometry, RadarParams, Trajectory};
use crate::sim::{add_noise, simulate_spectrum, BeatSpectrum};
use crate::{Point, Real};

/// A fully assembled imaging task: data, geometry, grid, and measures.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub label: String,
    pub params: RadarParams,
    pub traj: Trajectory,
    pub geom: ArrayGeometry,
    pub spectrum: BeatSpectrum,
    pub grid: ImageGrid,
    pub sar_window: WindowFamily,
    pub algo: AlgoKind,
    pub measures: OptimizationConfig,
}

/// Inputs staged into the kernel's working representation.
pub struct Staged<'a> {
    pub spectrum: Cow<'a, BeatSpectrum>,
    pub window: WindowValues,
    pub doppler: Option<DopplerTable>,
    pub positions: Vec<[f32; 2]>,
    pub traj: StagedTrajectory,
    pub tx_offset: [f32; 2],
    pub rx_offsets: Vec<[f32; 2]>,
    pub options: KernelOptions,
    pub bytes_prepared: u64,
}

/// One timed pipeline execution.
pub struct PipelineRun {
    pub image: SarImage,
    pub stats: KernelStats,
    pub load_s: f64,
    pub bp_s: f64,
    pub bytes_prepared: u64,
}

impl Pipeline {
    /// Kernel switches implied by the algorithm choice and measures.
    pub fn kernel_options(&self) -> KernelOptions {
        match self.algo {
            AlgoKind::Optimized => KernelOptions::optimized(),
            AlgoKind::Reference => KernelOptions {
                doppler: if self.measures.doppler_precompute {
                    DopplerMode::Precomputed
                } else {
                    DopplerMode::PerChirp
                },
                index_space: self.measures.math_opt,
            },
        }
    }

    fn window_form(&self) -> WindowForm {
        if self.measures.window_vector || self.algo == AlgoKind::Optimized {
            WindowForm::PerChirpVector
        } else {
            WindowForm::FullMatrix
        }
    }

    /// Stage all kernel inputs: antenna subset, window, Doppler table,
    /// pixel positions, trajectory buffers. This is the benchmark's "load"
    /// phase.
    pub fn stage(&self) -> Result<Staged<'_>> {
        self.measures.validate(self.params.num_rx)?;
        let (spectrum, geom): (Cow<'_, BeatSpectrum>, ArrayGeometry) =
            match &self.measures.rx_subset {
                Some(subset) => (
                    Cow::Owned(select_rx_subset(&self.spectrum, subset)?),
                    self.geom.subset(subset)?,
                ),
                None => (Cow::Borrowed(&self.spectrum), self.geom.clone()),
            };
        let window = make_window(
            &WindowSpec {
                family: self.sar_window,
                form: self.window_form(),
            },
            &self.grid,
            &self.traj,
        )?;
        let options = self.kernel_options();
        let doppler = if options.doppler == DopplerMode::Precomputed {
            Some(precompute_doppler_index(
                &self.grid,
                &self.traj,
                &geom,
                &self.params,
            )?)
        } else {
            None
        };
        let positions = self.grid.positions_f32();
        let traj = StagedTrajectory::from_trajectory(&self.traj);
        let rx_offsets: Vec<[f32; 2]> = geom.rx_offsets.iter().map(|o| o.to_f32_pair()).collect();
        let tx_offset = geom.tx_offset.to_f32_pair();

        let bytes_prepared = spectrum.bytes()
            + window.bytes()
            + doppler.as_ref().map_or(0, |d| d.bytes())
            + positions.len() as u64 * 8
            + traj.bytes()
            + (rx_offsets.len() as u64 + 1) * 8;

        Ok(Staged {
            spectrum,
            window,
            doppler,
            positions,
            traj,
            tx_offset,
            rx_offsets,
            options,
            bytes_prepared,
        })
    }

    /// Run the kernel over staged inputs (the benchmark's "BP" phase).
    pub fn execute<T: Float>(&self, staged: &Staged<'_>) -> Result<(SarImage, KernelStats)> {
        let data = KernelData {
            spectrum: staged.spectrum.as_ref(),
            window: &staged.window,
            doppler: staged.doppler.as_ref(),
            positions: &staged.positions,
            traj: &staged.traj,
            tx_offset: staged.tx_offset,
            rx_offsets: &staged.rx_offsets,
        };
        run_kernel::<T>(&data, &self.grid, &self.params, staged.options)
    }

    /// Stage and execute with wall-clock timings per phase.
    pub fn run(&self) -> Result<PipelineRun> {
        let t0 = Instant::now();
        let staged = self.stage()?;
        let load_s = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let (image, stats) = self.execute::<Real>(&staged)?;
        let bp_s = t1.elapsed().as_secs_f64();
        Ok(PipelineRun {
            image,
            stats,
            load_s,
            bp_s,
            bytes_prepared: staged.bytes_prepared,
        })
    }
}

/// Build the reconstruction grid a config asks for: the polar measure (or an
/// explicitly polar grid spec) replaces the Cartesian grid by a polar one
/// covering the same scene rectangle.
pub fn build_grid(cfg: &PipelineConfig, traj: &Trajectory) -> Result<ImageGrid> {
    let polar = cfg.measures.polar_grid || matches!(cfg.grid, GridSpec::Polar { .. });
    if polar {
        polar_grid_covering(
            &cfg.radar,
            traj.aperture_length(),
            traj.aperture_center(),
            cfg.grid.scene_rect(),
            cfg.grid.oversample_factor(),
        )
    } else {
        match cfg.grid {
            GridSpec::Cartesian {
                center,
                extent_x_m,
                extent_y_m,
                resolution_m,
                ..
            } => Ok(cartesian_grid(
                extent_x_m,
                extent_y_m,
                resolution_m,
                Point::new(center[0] - extent_x_m / 2.0, center[1] - extent_y_m / 2.0),
            )),
            GridSpec::Polar { .. } => unreachable!("polar handled above"),
        }
    }
}

/// Simulate the beat spectrum a config describes (scene, trajectory, noise).
pub fn simulate_from_config(cfg: &PipelineConfig) -> Result<BeatSpectrum> {
    cfg.validate()?;
    let traj = cfg.build_trajectory()?;
    let geom = cfg.build_array()?;
    let scene = cfg.build_scene();
    if scene.is_empty() {
        return Err(SarError::config("scene has no scatterers"));
    }
    let spectrum = simulate_spectrum(
        &cfg.radar,
        &traj,
        &geom,
        &scene,
        cfg.image.fast_time_window,
    )?;
    add_noise(&spectrum, cfg.scene.noise_sigma, cfg.seed)
}

/// Assemble a pipeline from a config and an already-available spectrum.
pub fn assemble(cfg: &PipelineConfig, spectrum: BeatSpectrum, label: &str) -> Result<Pipeline> {
    cfg.validate()?;
    if spectrum.num_chirps != cfg.radar.num_chirps || spectrum.num_rx != cfg.radar.num_rx {
        return Err(SarError::data(format!(
            "spectrum dims {}x{} do not match config num_chirps={} num_rx={}",
            spectrum.num_chirps, spectrum.num_rx, cfg.radar.num_chirps, cfg.radar.num_rx
        )));
    }
    let traj = cfg.build_trajectory()?;
    let geom = cfg.build_array()?;
    let grid = build_grid(cfg, &traj)?;
    Ok(Pipeline {
        label: label.to_string(),
        params: cfg.radar.clone(),
        traj,
        geom,
        spectrum,
        grid,
        sar_window: cfg.image.sar_window,
        algo: cfg.algo.kind,
        measures: cfg.measures.clone(),
    })
}

/// The benchmark matrix: one row per measure, reference first, combination
/// last.
pub fn bench_variants(cfg: &PipelineConfig) -> Vec<PipelineConfig> {
    let num_rx = cfg.radar.num_rx;
    let base = PipelineConfig {
        measures: OptimizationConfig::reference(),
        ..cfg.clone()
    };
    let with = |label: &str, algo: AlgoKind, measures: OptimizationConfig| {
        let mut v = base.clone();
        v.algo.kind = algo;
        v.measures = measures;
        v.output.image = Some(label.to_string());
        v
    };
    let half_rx: Vec<usize> = (0..num_rx).step_by(2).collect();
    vec![
        with("ref", AlgoKind::Reference, OptimizationConfig::reference()),
        with(
            "w_sar",
            AlgoKind::Reference,
            OptimizationConfig {
                window_vector: true,
                ..Default::default()
            },
        ),
        with(
            "opt",
            AlgoKind::Reference,
            OptimizationConfig {
                math_opt: true,
                ..Default::default()
            },
        ),
        with(
            "doppler",
            AlgoKind::Reference,
            OptimizationConfig {
                doppler_precompute: true,
                ..Default::default()
            },
        ),
        with(
            "polar",
            AlgoKind::Reference,
            OptimizationConfig {
                polar_grid: true,
                ..Default::default()
            },
        ),
        with(
            "rx",
            AlgoKind::Reference,
            OptimizationConfig {
                rx_subset: Some(half_rx),
                ..Default::default()
            },
        ),
        with(
            "comb",
            AlgoKind::Optimized,
            OptimizationConfig::combined(num_rx),
        ),
    ]
}

/// Label of a bench variant (stored in its output.image field).
pub fn variant_label(cfg: &PipelineConfig) -> &str {
    cfg.output.image.as_deref().unwrap_or("unnamed")
}
