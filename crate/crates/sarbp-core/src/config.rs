//! Pipeline configuration files (TOML).
//!
//! One file describes a full scenario: radar parameters, trajectory, array,
//! scene, reconstruction grid, algorithm, and optimization measures. The
//! same schema drives `simulate`, `reconstruct`, and `bench`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bp::{OptimizationConfig, WindowFamily};
use crate::error::{Result, SarError};
use crate::geom::Rect;
use crate::signal::{ArrayGeometry, RadarParams, Trajectory};
use crate::sim::PointScatterer;
use crate::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectorySpec {
    /// Constant speed along `heading`, aperture midpoint at `center`.
    Straight {
        #[serde(default)]
        center: [f64; 2],
        #[serde(default = "default_heading")]
        heading: [f64; 2],
        speed_mps: f64,
    },
    /// Speed ramps linearly from `v0_mps` to `v1_mps`.
    Accelerating {
        #[serde(default)]
        center: [f64; 2],
        #[serde(default = "default_heading")]
        heading: [f64; 2],
        v0_mps: f64,
        v1_mps: f64,
    },
    /// Constant speed on a left-turning circle of the given radius.
    Arc {
        #[serde(default)]
        center: [f64; 2],
        #[serde(default = "default_heading")]
        heading: [f64; 2],
        radius_m: f64,
        speed_mps: f64,
    },
    /// Per-chirp poses from a CSV file: `x,y,vx,vy[,hx,hy]` per line.
    File { path: String },
}

fn default_heading() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySpec {
    pub tx_offset: [f64; 2],
    /// Uniform linear array spacing; ignored when `rx_offsets` is given.
    pub rx_spacing_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_offsets: Option<Vec<[f64; 2]>>,
}

impl Default for ArraySpec {
    fn default() -> Self {
        Self {
            tx_offset: [0.0, 0.0],
            // lambda/2 at 76.6 GHz
            rx_spacing_m: crate::signal::SPEED_OF_LIGHT / 76.6e9 / 2.0,
            rx_offsets: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSpec {
    pub position: [f64; 2],
    #[serde(default = "default_amplitude")]
    pub amplitude: [f64; 2],
}

fn default_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSpec {
    pub scatterers: Vec<ScattererSpec>,
    /// Per-component standard deviation of complex noise added after range
    /// compression.
    pub noise_sigma: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            scatterers: Vec::new(),
            noise_sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Cartesian grid centered on `center`.
    Cartesian {
        center: [f64; 2],
        extent_x_m: f64,
        extent_y_m: f64,
        resolution_m: f64,
        /// Oversampling factor used if the polar-grid measure replaces
        /// this grid.
        #[serde(default = "default_oversample")]
        oversample_factor: f64,
    },
    /// Polar grid covering the given scene rectangle (xmin, ymin, xmax,
    /// ymax) as seen from the aperture center.
    Polar {
        scene: [f64; 4],
        #[serde(default = "default_oversample")]
        oversample_factor: f64,
    },
}

fn default_oversample() -> f64 {
    2.5
}

impl GridSpec {
    /// The Cartesian rectangle this reconstruction is about.
    pub fn scene_rect(&self) -> Rect {
        match *self {
            GridSpec::Cartesian {
                center,
                extent_x_m,
                extent_y_m,
                ..
            } => Rect::new(
                Point::new(center[0] - extent_x_m / 2.0, center[1] - extent_y_m / 2.0),
                Point::new(center[0] + extent_x_m / 2.0, center[1] + extent_y_m / 2.0),
            ),
            GridSpec::Polar { scene, .. } => Rect::new(
                Point::new(scene[0], scene[1]),
                Point::new(scene[2], scene[3]),
            ),
        }
    }

    pub fn oversample_factor(&self) -> f64 {
        match *self {
            GridSpec::Cartesian {
                oversample_factor, ..
            }
            | GridSpec::Polar {
                oversample_factor, ..
            } => oversample_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageSpec {
    /// Slow-time (aperture) window family.
    pub sar_window: WindowFamily,
    /// Fast-time window applied during range compression.
    pub fast_time_window: WindowFamily,
    pub dynamic_range_db: f64,
}

impl Default for ImageSpec {
    fn default() -> Self {
        Self {
            sar_window: WindowFamily::Hann,
            fast_time_window: WindowFamily::Hann,
            dynamic_range_db: 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgoKind {
    Reference,
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoSpec {
    pub kind: AlgoKind,
}

impl Default for AlgoSpec {
    fn default() -> Self {
        Self {
            kind: AlgoKind::Reference,
        }
    }
}

/// Named rectangle for SNR metrics: `rect = [xmin, ymin, xmax, ymax]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub name: String,
    pub rect: [f64; 4],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSpec {
    pub regions: Vec<RegionConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_region: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pgm: Option<String>,
}

/// Complete scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub radar: RadarParams,
    pub trajectory: TrajectorySpec,
    #[serde(default)]
    pub array: ArraySpec,
    #[serde(default)]
    pub scene: SceneSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub image: ImageSpec,
    #[serde(default)]
    pub algo: AlgoSpec,
    #[serde(default)]
    pub measures: OptimizationConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub metrics: MetricsSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| SarError::config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SarError::config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| SarError::config(format!("serialize: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        self.measures.validate(self.radar.num_rx)?;
        if self.algo.kind == AlgoKind::Optimized && !self.measures.window_vector {
            return Err(SarError::config(
                "algo = optimized requires measures.window_vector = true (per-chirp window)",
            ));
        }
        if let TrajectorySpec::File { path } = &self.trajectory {
            if !Path::new(path).exists() {
                return Err(SarError::config(format!("pose file {path} does not exist")));
            }
        }
        if let Some(offsets) = &self.array.rx_offsets {
            if offsets.len() != self.radar.num_rx {
                return Err(SarError::config(format!(
                    "array.rx_offsets has {} entries for num_rx = {}",
                    offsets.len(),
                    self.radar.num_rx
                )));
            }
        }
        if self.grid.scene_rect().is_degenerate() {
            return Err(SarError::config("grid scene rectangle is degenerate"));
        }
        if let Some(noise) = &self.metrics.noise_region {
            if !self.metrics.regions.iter().any(|r| &r.name == noise) {
                return Err(SarError::config(format!(
                    "noise_region '{noise}' is not among the defined regions"
                )));
            }
        }
        Ok(())
    }

    pub fn build_trajectory(&self) -> Result<Trajectory> {
        let traj = match &self.trajectory {
            TrajectorySpec::Straight {
                center,
                heading,
                speed_mps,
            } => Trajectory::straight(
                &self.radar,
                Point::new(center[0], center[1]),
                Point::new(heading[0], heading[1]),
                *speed_mps,
            ),
            TrajectorySpec::Accelerating {
                center,
                heading,
                v0_mps,
                v1_mps,
            } => Trajectory::accelerating(
                &self.radar,
                Point::new(center[0], center[1]),
                Point::new(heading[0], heading[1]),
                *v0_mps,
                *v1_mps,
            ),
            TrajectorySpec::Arc {
                center,
                heading,
                radius_m,
                speed_mps,
            } => Trajectory::arc(
                &self.radar,
                Point::new(center[0], center[1]),
                Point::new(heading[0], heading[1]),
                *radius_m,
                *speed_mps,
            ),
            TrajectorySpec::File { path } => parse_pose_file(Path::new(path))?,
        };
        traj.validate(&self.radar)?;
        Ok(traj)
    }

    pub fn build_array(&self) -> Result<ArrayGeometry> {
        let geom = match &self.array.rx_offsets {
            Some(offsets) => ArrayGeometry {
                tx_offset: Point::new(self.array.tx_offset[0], self.array.tx_offset[1]),
                rx_offsets: offsets.iter().map(|o| Point::new(o[0], o[1])).collect(),
            },
            None => {
                let mut geom =
                    ArrayGeometry::uniform_linear(self.radar.num_rx, self.array.rx_spacing_m);
                geom.tx_offset = Point::new(self.array.tx_offset[0], self.array.tx_offset[1]);
                geom
            }
        };
        geom.validate(&self.radar)?;
        Ok(geom)
    }

    pub fn build_scene(&self) -> Vec<PointScatterer> {
        self.scene
            .scatterers
            .iter()
            .map(|s| PointScatterer {
                position: Point::new(s.position[0], s.position[1]),
                amplitude: num_complex::Complex64::new(s.amplitude[0], s.amplitude[1]),
            })
            .collect()
    }
}

/// Parse a per-chirp pose file: one `x,y,vx,vy[,hx,hy]` line per chirp;
/// `#` starts a comment. Headings default to the normalized velocity.
pub fn parse_pose_file(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SarError::config(format!("{}: {e}", path.display())))?;
    let mut poses = Vec::new();
    let mut velocities = Vec::new();
    let mut headings = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| SarError::config(format!("pose line {}: {e}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if fields.len() != 4 && fields.len() != 6 {
            return Err(SarError::config(format!(
                "pose line {}: expected 4 or 6 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let v = Point::new(fields[2], fields[3]);
        let h = if fields.len() == 6 {
            Point::new(fields[4], fields[5])
        } else {
            v.normalized().ok_or_else(|| {
                SarError::config(format!(
                    "pose line {}: zero velocity needs an explicit heading",
                    lineno + 1
                ))
            })?
        };
        poses.push(Point::new(fields[0], fields[1]));
        velocities.push(v);
        headings.push(h);
    }
    Trajectory::new(poses, velocities, headings)
}
