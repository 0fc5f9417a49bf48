//! Quality and performance metrics: region SNR, image differences in dB,
//! memory-footprint accounting, and the benchmark harness.

use std::time::Instant;

use crate::bp::{OptimizationConfig, WindowForm};
use crate::error::{Result, SarError};
use crate::geom::Rect;
use crate::grid::{ImageGrid, SarImage};
use crate::pipeline::Pipeline;
use crate::signal::RadarParams;

/// Named axis-aligned rectangle in scene coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    pub name: String,
    pub rect: Rect,
}

impl RegionSpec {
    pub fn new(name: impl Into<String>, rect: Rect) -> Self {
        Self {
            name: name.into(),
            rect,
        }
    }
}

fn region_mean_power(image: &SarImage, region: &RegionSpec) -> Result<f64> {
    if region.rect.is_degenerate() {
        return Err(SarError::config(format!(
            "region '{}' is degenerate",
            region.name
        )));
    }
    let mut acc = 0.0f64;
    let mut count = 0usize;
    for (p, v) in image.values.iter().enumerate() {
        if region.rect.contains(image.grid.position(p)) {
            acc += v.norm_sqr() as f64;
            count += 1;
        }
    }
    if count == 0 {
        return Err(SarError::config(format!(
            "region '{}' contains no grid pixels",
            region.name
        )));
    }
    Ok(acc / count as f64)
}

/// SNR per signal region: 10 log10 of the mean-power ratio against the
/// noise region.
pub fn region_snr(
    image: &SarImage,
    signal_regions: &[RegionSpec],
    noise_region: &RegionSpec,
) -> Result<Vec<(String, f64)>> {
    let noise = region_mean_power(image, noise_region)?;
    if noise <= 0.0 {
        return Err(SarError::data("noise region has zero power"));
    }
    signal_regions
        .iter()
        .map(|r| {
            let s = region_mean_power(image, r)?;
            Ok((r.name.clone(), 10.0 * (s / noise).log10()))
        })
        .collect()
}

/// Summary statistics of a per-pixel dB difference map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffStats {
    pub median_db: f64,
    pub p5_db: f64,
    pub p95_db: f64,
}

/// Default magnitude floor relative to the reference image's peak.
pub const DIFF_FLOOR_REL: f64 = 1e-12;

/// Per-pixel amplitude difference 20 log10(|a| / |b|) with a floor on both
/// magnitudes at `floor_rel` times the reference peak, plus median and
/// 5th/95th percentiles. The grids must match; resample first if they do
/// not.
pub fn image_diff_db(a: &SarImage, b: &SarImage, floor_rel: f64) -> Result<(Vec<f64>, DiffStats)> {
    if a.grid != b.grid {
        return Err(SarError::data("image grids differ; resample first"));
    }
    let floor = (b.peak_magnitude() as f64 * floor_rel).max(f64::MIN_POSITIVE);
    let map: Vec<f64> = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(va, vb)| {
            let ma = (va.norm() as f64).max(floor);
            let mb = (vb.norm() as f64).max(floor);
            20.0 * (ma / mb).log10()
        })
        .collect();
    let mut sorted = map.clone();
    sorted.sort_by(f64::total_cmp);
    let pick = |q: f64| sorted[((sorted.len() - 1) as f64 * q).round() as usize];
    let stats = DiffStats {
        median_db: pick(0.5),
        p5_db: pick(0.05),
        p95_db: pick(0.95),
    };
    Ok((map, stats))
}

/// Itemized input bytes staged for a kernel run, closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FootprintBreakdown {
    pub spectrum_bytes: u64,
    pub window_bytes: u64,
    pub doppler_bytes: u64,
    pub positions_bytes: u64,
    pub trajectory_bytes: u64,
}

impl FootprintBreakdown {
    pub fn total(&self) -> u64 {
        self.spectrum_bytes
            + self.window_bytes
            + self.doppler_bytes
            + self.positions_bytes
            + self.trajectory_bytes
    }
}

/// Exact byte accounting for the kernel inputs a configuration implies:
/// complex float32 samples are 8 B, float32 weights 4 B, 2-D float32
/// points 8 B. Matches `Pipeline::stage`'s `bytes_prepared` exactly.
pub fn memory_footprint(
    params: &RadarParams,
    grid: &ImageGrid,
    config: &OptimizationConfig,
) -> FootprintBreakdown {
    let window_form = if config.window_vector {
        WindowForm::PerChirpVector
    } else {
        WindowForm::FullMatrix
    };
    memory_footprint_with(params, grid.len() as u64, window_form, config)
}

/// Footprint from a raw pixel count, for grids too large to materialize.
pub fn memory_footprint_with(
    params: &RadarParams,
    pixels: u64,
    window_form: WindowForm,
    config: &OptimizationConfig,
) -> FootprintBreakdown {
    let n_m = params.num_chirps as u64;
    let n_rx = config
        .rx_subset
        .as_ref()
        .map_or(params.num_rx as u64, |s| s.len() as u64);
    let n_f = params.num_samples as u64;
    FootprintBreakdown {
        spectrum_bytes: n_m * n_rx * n_f * 8,
        window_bytes: match window_form {
            WindowForm::FullMatrix => pixels * n_m * 4,
            WindowForm::PerChirpVector => n_m * 4,
        },
        doppler_bytes: if config.doppler_precompute { pixels * 4 } else { 0 },
        positions_bytes: pixels * 8,
        trajectory_bytes: n_m * 3 * 8 + (n_rx + 1) * 8,
    }
}

/// Mean/min/max of one timed phase, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseStats {
    pub mean_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

impl PhaseStats {
    fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len().max(1) as f64;
        Self {
            mean_s: samples.iter().sum::<f64>() / n,
            min_s: samples.iter().cloned().fold(f64::INFINITY, f64::min),
            max_s: samples.iter().cloned().fold(0.0, f64::max),
        }
    }
}

/// Raw timings of a single benchmark repetition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRun {
    pub load_s: f64,
    pub bp_s: f64,
    pub total_s: f64,
}

/// Timing report over repeated executions of one pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub label: String,
    pub repetitions: usize,
    pub runs: Vec<BenchRun>,
    pub load: PhaseStats,
    pub bp: PhaseStats,
    pub total: PhaseStats,
    pub bytes_prepared: u64,
    pub pixels: usize,
}

/// Execute a pipeline `repetitions` times, timing the load (staging) and BP
/// (kernel) phases with a monotonic clock. Outputs are hash-checked for
/// bitwise repeatability across repetitions; when more than three
/// repetitions are requested the first is treated as warm-up and excluded
/// from the statistics (but kept in `runs`).
pub fn run_benchmark(pipeline: &Pipeline, repetitions: usize) -> Result<BenchReport> {
    if repetitions < 1 {
        return Err(SarError::config("repetitions must be >= 1"));
    }
    let mut runs = Vec::with_capacity(repetitions);
    let mut bytes_prepared = 0u64;
    let mut pixels = 0usize;
    let mut hash: Option<u64> = None;
    for _ in 0..repetitions {
        let t0 = Instant::now();
        let staged = pipeline.stage()?;
        let load_s = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let (image, _) = pipeline.execute::<crate::Real>(&staged)?;
        let bp_s = t1.elapsed().as_secs_f64();
        runs.push(BenchRun {
            load_s,
            bp_s,
            total_s: load_s + bp_s,
        });
        bytes_prepared = staged.bytes_prepared;
        pixels = image.values.len();
        let h = image_hash(&image);
        match hash {
            None => hash = Some(h),
            Some(prev) if prev != h => {
                return Err(SarError::data(
                    "pipeline output changed between benchmark repetitions",
                ))
            }
            _ => {}
        }
    }
    let measured: Vec<BenchRun> = if repetitions > 3 {
        runs[1..].to_vec()
    } else {
        runs.clone()
    };
    let load = PhaseStats::from_samples(&measured.iter().map(|r| r.load_s).collect::<Vec<_>>());
    let bp = PhaseStats::from_samples(&measured.iter().map(|r| r.bp_s).collect::<Vec<_>>());
    let total = PhaseStats::from_samples(&measured.iter().map(|r| r.total_s).collect::<Vec<_>>());
    Ok(BenchReport {
        label: pipeline.label.clone(),
        repetitions,
        runs,
        load,
        bp,
        total,
        bytes_prepared,
        pixels,
    })
}

/// FNV-1a over the raw image bits.
pub fn image_hash(image: &SarImage) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for v in &image.values {
        for b in v.re.to_le_bytes().into_iter().chain(v.im.to_le_bytes()) {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    }
    h
}

/// CSV rows for a set of reports: one line per repetition.
pub fn bench_csv(reports: &[BenchReport]) -> String {
    let mut out = String::from("label,rep,load_s,bp_s,total_s,bytes_prepared\n");
    for r in reports {
        for (i, run) in r.runs.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.9},{:.9},{:.9},{}\n",
                r.label,
                i + 1,
                run.load_s,
                run.bp_s,
                run.total_s,
                r.bytes_prepared
            ));
        }
    }
    out
}

/// Structured per-label summary (TOML) of a set of reports.
pub fn bench_summary(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "[{}]\nrepetitions = {}\npixels = {}\nbytes_prepared = {}\n\
             load_mean_s = {:.9}\nload_min_s = {:.9}\nload_max_s = {:.9}\n\
             bp_mean_s = {:.9}\nbp_min_s = {:.9}\nbp_max_s = {:.9}\n\
             total_mean_s = {:.9}\ntotal_min_s = {:.9}\ntotal_max_s = {:.9}\n\n",
            r.label,
            r.repetitions,
            r.pixels,
            r.bytes_prepared,
            r.load.mean_s,
            r.load.min_s,
            r.load.max_s,
            r.bp.mean_s,
            r.bp.min_s,
            r.bp.max_s,
            r.total.mean_s,
            r.total.min_s,
            r.total.max_s,
        ));
    }
    out
}
