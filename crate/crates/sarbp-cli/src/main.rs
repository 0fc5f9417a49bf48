//! `sarbp`: FMCW SAR back-projection pipelines from the command line.
//!
//! Subcommands: `simulate` a point-scatterer scene into a SARBP1 beat
//! spectrum, `reconstruct` an image from it (SARIM1 + PGM + metrics
//! sidecar), `compare` two images, and `bench` the optimization-measure
//! matrix into a CSV.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sarbp_core::config::PipelineConfig;
use sarbp_core::grid::{resample_to_cartesian, ImageGrid, SarImage};
use sarbp_core::metrics::{
    bench_csv, bench_summary, image_diff_db, region_snr, run_benchmark, DiffStats, RegionSpec,
    DIFF_FLOOR_REL,
};
use sarbp_core::pipeline::{assemble, bench_variants, simulate_from_config, variant_label};
use sarbp_core::{geom::Rect, io, Point, Result, SarError};

#[derive(Parser)]
#[command(name = "sarbp", version, about = "FMCW SAR back-projection pipelines")]
struct Cli {
    /// Worker threads for the pixel-parallel kernels (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured scene into a SARBP1 beat-spectrum file.
    Simulate(SimulateArgs),
    /// Form a SAR image from a SARBP1 file.
    Reconstruct(ReconstructArgs),
    /// Amplitude-difference map and region SNR deltas between two images.
    Compare(CompareArgs),
    /// Run the measure matrix and write per-repetition timings as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output SARBP1 path; defaults to the config's output.spectrum.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's noise seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Input SARBP1 beat spectrum.
    #[arg(long)]
    data: PathBuf,
    /// Output SARIM1 path; defaults to the config's output.image.
    #[arg(long)]
    out: Option<PathBuf>,
    /// PGM dynamic range in dB (overrides the config).
    #[arg(long)]
    dynamic_range_db: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Image under test (SARIM1).
    image_a: PathBuf,
    /// Reference image (SARIM1). Polar images are resampled onto the
    /// reference grid first.
    image_b: PathBuf,
    /// Output prefix: writes PREFIX.pgm and PREFIX.toml.
    #[arg(long)]
    out: PathBuf,
    /// Optional config providing metric regions for SNR deltas.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dynamic range of the difference PGM in dB.
    #[arg(long, default_value_t = 12.0)]
    dynamic_range_db: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario configuration (TOML); the measure matrix is derived from it.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; a .summary.toml is written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Repetitions per configuration.
    #[arg(long, default_value_t = 20)]
    reps: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("sarbp: failed to configure {} threads: {e}", cli.threads);
            return ExitCode::from(4);
        }
    }
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sarbp: {e}");
            ExitCode::from(match e {
                SarError::Config(_) => 2,
                SarError::Data(_) | SarError::Bounds(_) | SarError::Io(_) => 3,
            })
        }
    }
}

fn require_out(flag: Option<PathBuf>, from_config: &Option<String>, what: &str) -> Result<PathBuf> {
    flag.or_else(|| from_config.as_ref().map(PathBuf::from))
        .ok_or_else(|| SarError::config(format!("no output path: pass --out or set output.{what}")))
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = PipelineConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = require_out(args.out, &cfg.output.spectrum, "spectrum")?;
    let spectrum = simulate_from_config(&cfg)?;
    io::write_spectrum(&out, &spectrum)?;
    println!(
        "wrote {} ({} chirps x {} rx x {} bins, {} data bytes + {} header)",
        out.display(),
        spectrum.num_chirps,
        spectrum.num_rx,
        spectrum.num_bins,
        spectrum.bytes(),
        io::SPECTRUM_HEADER_BYTES,
    );
    Ok(())
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<()> {
    let cfg = PipelineConfig::load(&args.config)?;
    let out = require_out(args.out, &cfg.output.image, "image")?;
    let spectrum = io::read_spectrum(&args.data)?;
    let pipeline = assemble(&cfg, spectrum, "reconstruct")?;
    let run = pipeline.run()?;
    io::write_image(&out, &run.image)?;
    let dynamic_range = args.dynamic_range_db.unwrap_or(cfg.image.dynamic_range_db);
    let pgm = match &cfg.output.pgm {
        Some(p) => PathBuf::from(p),
        None => out.with_extension("pgm"),
    };
    io::write_pgm(&pgm, &run.image, dynamic_range)?;
    let sidecar = sidecar_path(&out);
    std::fs::write(
        &sidecar,
        format!(
            "pixel_count = {}\nbytes_prepared = {}\nload_s = {:.9}\nbp_s = {:.9}\ntotal_s = {:.9}\n\
             scalar_products = {}\ncontributions = {}\nflagged_pixels = {}\n",
            run.image.values.len(),
            run.bytes_prepared,
            run.load_s,
            run.bp_s,
            run.load_s + run.bp_s,
            run.stats.scalar_products,
            run.stats.contributions,
            run.stats.flagged_pixels.len(),
        ),
    )?;
    println!(
        "wrote {} ({} pixels), {} and {}",
        out.display(),
        run.image.values.len(),
        pgm.display(),
        sidecar.display()
    );
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".metrics.toml");
    PathBuf::from(s)
}

/// Put both images on a common grid: identical grids pass through; a polar
/// image is resampled onto the other's Cartesian grid (magnitudes).
fn common_grid(a: SarImage, b: SarImage) -> Result<(SarImage, SarImage, Option<Vec<bool>>)> {
    if a.grid == b.grid {
        return Ok((a, b, None));
    }
    match (&a.grid, &b.grid) {
        (ImageGrid::Polar { .. }, ImageGrid::Cartesian { .. }) => {
            let r = resample_to_cartesian(&a, &b.grid)?;
            if r.mask.iter().all(|&m| !m) {
                return Err(SarError::data(
                    "images do not overlap: polar coverage misses the target grid",
                ));
            }
            Ok((r.image, b, Some(r.mask)))
        }
        (ImageGrid::Cartesian { .. }, ImageGrid::Polar { .. }) => {
            let (b2, a2, mask) = common_grid(b, a)?;
            Ok((a2, b2, mask))
        }
        _ => Err(SarError::data(
            "images have different grids; reconstruct onto a common grid first",
        )),
    }
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let a = io::read_image(&args.image_a)?;
    let b = io::read_image(&args.image_b)?;
    let (a, b, mask) = common_grid(a, b)?;
    let (map, stats) = match &mask {
        None => image_diff_db(&a, &b, DIFF_FLOOR_REL)?,
        Some(mask) => {
            let (map, _) = image_diff_db(&a, &b, DIFF_FLOOR_REL)?;
            let covered: Vec<f64> = map
                .iter()
                .zip(mask)
                .filter_map(|(&d, &m)| m.then_some(d))
                .collect();
            if covered.is_empty() {
                return Err(SarError::data("no overlapping pixels to compare"));
            }
            let mut sorted = covered;
            sorted.sort_by(f64::total_cmp);
            let pick = |q: f64| sorted[((sorted.len() - 1) as f64 * q).round() as usize];
            (
                map,
                DiffStats {
                    median_db: pick(0.5),
                    p5_db: pick(0.05),
                    p95_db: pick(0.95),
                },
            )
        }
    };

    let pgm = args.out.with_extension("pgm");
    io::write_diff_pgm(&pgm, &map, &a.grid, mask.as_deref(), args.dynamic_range_db)?;

    let mut report = format!(
        "median_db = {:.6}\np5_db = {:.6}\np95_db = {:.6}\n",
        stats.median_db, stats.p5_db, stats.p95_db
    );
    if let Some(config) = &args.config {
        let cfg = PipelineConfig::load(config)?;
        if let Some(noise_name) = &cfg.metrics.noise_region {
            let regions: Vec<RegionSpec> = cfg
                .metrics
                .regions
                .iter()
                .map(|r| {
                    RegionSpec::new(
                        r.name.clone(),
                        Rect::new(
                            Point::new(r.rect[0], r.rect[1]),
                            Point::new(r.rect[2], r.rect[3]),
                        ),
                    )
                })
                .collect();
            let noise = regions
                .iter()
                .find(|r| &r.name == noise_name)
                .cloned()
                .ok_or_else(|| SarError::config(format!("noise region '{noise_name}' missing")))?;
            let signal: Vec<RegionSpec> = regions
                .iter()
                .filter(|r| &r.name != noise_name)
                .cloned()
                .collect();
            let snr_a = region_snr(&a, &signal, &noise)?;
            let snr_b = region_snr(&b, &signal, &noise)?;
            report.push_str("\n[region_snr_delta_db]\n");
            for ((name, sa), (_, sb)) in snr_a.iter().zip(&snr_b) {
                report.push_str(&format!("{name} = {:.6}\n", sa - sb));
            }
        }
    }
    let toml_path = args.out.with_extension("toml");
    std::fs::write(&toml_path, &report)?;
    println!(
        "median {:.3} dB, p5 {:.3} dB, p95 {:.3} dB; wrote {} and {}",
        stats.median_db,
        stats.p5_db,
        stats.p95_db,
        pgm.display(),
        toml_path.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let cfg = PipelineConfig::load(&args.config)?;
    if args.reps < 1 {
        return Err(SarError::config("need at least one repetition"));
    }
    let spectrum = simulate_from_config(&cfg)?;
    let variants = bench_variants(&cfg);
    let mut reports = Vec::new();
    for variant in &variants {
        let label = variant_label(variant).to_string();
        let pipeline = assemble(variant, spectrum.clone(), &label).and_then(|p| {
            run_benchmark(&p, args.reps)
        });
        match pipeline {
            Ok(report) => {
                println!(
                    "{label:>8}: load {:.6} s, bp {:.6} s, total {:.6} s, {} bytes, {} px",
                    report.load.mean_s,
                    report.bp.mean_s,
                    report.total.mean_s,
                    report.bytes_prepared,
                    report.pixels
                );
                reports.push(report);
            }
            Err(e) => {
                // flag the partial CSV before aborting
                let mut csv = bench_csv(&reports);
                csv.push_str(&format!("# aborted at variant '{label}': {e}\n"));
                std::fs::write(&args.out, csv)?;
                return Err(e);
            }
        }
    }
    std::fs::write(&args.out, bench_csv(&reports))?;
    let summary = args.out.with_extension("summary.toml");
    std::fs::write(&summary, bench_summary(&reports))?;
    println!("wrote {} and {}", args.out.display(), summary.display());
    Ok(())
}
