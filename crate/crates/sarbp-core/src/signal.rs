//! Radar waveform constants, platform trajectory, and antenna geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SarError};
use crate::geom::Vec2;
use crate::Point;

/// Speed of light in m/s, exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// FMCW waveform constants and sampling.
///
/// Field names double as the configuration-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarParams {
    /// Carrier frequency f0 in Hz.
    pub f0_hz: f64,
    /// RF bandwidth B in Hz.
    pub bandwidth_hz: f64,
    /// Chirp duration T_P in s.
    pub chirp_duration_s: f64,
    /// Pulse repetition interval T_P0 in s.
    pub pri_s: f64,
    /// Number of chirps N_m per measurement.
    pub num_chirps: usize,
    /// Number of RX antennas N_rx.
    pub num_rx: usize,
    /// Fast-time samples N_s per chirp.
    pub num_samples: usize,
    /// ADC sample rate f_s in Hz.
    pub sample_rate_hz: f64,
}

/// Quantities derived from the waveform constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedWaveform {
    /// Carrier wavelength in m.
    pub wavelength_m: f64,
    /// Beat-spectrum bin spacing f_s / N_s in Hz.
    pub bin_spacing_hz: f64,
    /// Range resolution c / (2 B) in m.
    pub range_resolution_m: f64,
}

impl RadarParams {
    /// 77-GHz automotive parameter set used throughout: f0 = 76.6 GHz,
    /// B = 931 MHz, T_P = 102.4 us, T_P0 = 106.7 us, 1024 chirps, 16 RX.
    ///
    /// The waveform constants leave sampling open; the defaults here use
    /// N_s = 1024 and f_s = N_s / T_P = 10 MHz, which makes the bin
    /// spacing exactly 1 / T_P.
    pub fn full_scale() -> Self {
        Self {
            f0_hz: 76.6e9,
            bandwidth_hz: 931.0e6,
            chirp_duration_s: 102.4e-6,
            pri_s: 106.7e-6,
            num_chirps: 1024,
            num_rx: 16,
            num_samples: 1024,
            sample_rate_hz: 10.0e6,
        }
    }

    /// Small configuration for tests and CI: same waveform, 64 chirps,
    /// 4 RX, 128 samples.
    pub fn desk_scale() -> Self {
        Self {
            num_chirps: 64,
            num_rx: 4,
            num_samples: 128,
            sample_rate_hz: 128.0 / 102.4e-6,
            ..Self::full_scale()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0_hz > 0.0 && self.bandwidth_hz > 0.0) {
            return Err(SarError::config("f0_hz and bandwidth_hz must be positive"));
        }
        if !(self.chirp_duration_s > 0.0 && self.chirp_duration_s <= self.pri_s) {
            return Err(SarError::config(
                "need 0 < chirp_duration_s <= pri_s",
            ));
        }
        if self.num_chirps < 1 || self.num_rx < 1 || self.num_samples < 2 {
            return Err(SarError::config(
                "need num_chirps >= 1, num_rx >= 1, num_samples >= 2",
            ));
        }
        let expected = (self.sample_rate_hz * self.chirp_duration_s).round() as usize;
        if expected != self.num_samples {
            return Err(SarError::config(format!(
                "num_samples = {} inconsistent with round(sample_rate_hz * chirp_duration_s) = {}",
                self.num_samples, expected
            )));
        }
        Ok(())
    }

    /// Chirp rate mu = B / T_P in Hz/s.
    pub fn chirp_rate(&self) -> f64 {
        self.bandwidth_hz / self.chirp_duration_s
    }

    /// Duration of one measurement, N_m * T_P0, in s.
    pub fn measurement_time(&self) -> f64 {
        self.num_chirps as f64 * self.pri_s
    }

    pub fn derived_waveform(&self) -> DerivedWaveform {
        DerivedWaveform {
            wavelength_m: SPEED_OF_LIGHT / self.f0_hz,
            bin_spacing_hz: self.sample_rate_hz / self.num_samples as f64,
            range_resolution_m: SPEED_OF_LIGHT / (2.0 * self.bandwidth_hz),
        }
    }
}

/// Per-chirp platform poses, velocity vectors, and unit headings.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub poses: Vec<Point>,
    pub velocities: Vec<Point>,
    pub headings: Vec<Point>,
}

impl Trajectory {
    pub fn new(poses: Vec<Point>, velocities: Vec<Point>, headings: Vec<Point>) -> Result<Self> {
        let t = Self {
            poses,
            velocities,
            headings,
        };
        t.validate_lengths()?;
        Ok(t)
    }

    fn validate_lengths(&self) -> Result<()> {
        if self.poses.len() != self.velocities.len() || self.poses.len() != self.headings.len() {
            return Err(SarError::config(
                "trajectory pose/velocity/heading sequences differ in length",
            ));
        }
        for (m, h) in self.headings.iter().enumerate() {
            if (h.norm() - 1.0).abs() > 1e-9 {
                return Err(SarError::config(format!(
                    "heading {m} is not a unit vector"
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self, params: &RadarParams) -> Result<()> {
        self.validate_lengths()?;
        if self.poses.len() != params.num_chirps {
            return Err(SarError::config(format!(
                "trajectory has {} poses but num_chirps = {}",
                self.poses.len(),
                params.num_chirps
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// Straight constant-velocity pass whose midpoint is `center`.
    pub fn straight(params: &RadarParams, center: Point, heading: Point, speed: f64) -> Self {
        let n = params.num_chirps;
        let h = heading.normalized().expect("heading must be nonzero");
        let mid = (n as f64 - 1.0) / 2.0;
        let poses = (0..n)
            .map(|m| center + h.scale((m as f64 - mid) * speed * params.pri_s))
            .collect();
        Self {
            poses,
            velocities: vec![h.scale(speed); n],
            headings: vec![h; n],
        }
    }

    /// Straight pass with speed ramping linearly from `v0` to `v1`; the mean
    /// pose is shifted onto `center`.
    pub fn accelerating(
        params: &RadarParams,
        center: Point,
        heading: Point,
        v0: f64,
        v1: f64,
    ) -> Self {
        let n = params.num_chirps;
        let h = heading.normalized().expect("heading must be nonzero");
        let speed = |m: usize| {
            if n == 1 {
                v0
            } else {
                v0 + (v1 - v0) * m as f64 / (n as f64 - 1.0)
            }
        };
        let mut along = Vec::with_capacity(n);
        let mut s = 0.0;
        for m in 0..n {
            along.push(s);
            s += speed(m) * params.pri_s;
        }
        let mean = along.iter().sum::<f64>() / n as f64;
        let poses = along
            .iter()
            .map(|&a| center + h.scale(a - mean))
            .collect();
        let velocities = (0..n).map(|m| h.scale(speed(m))).collect();
        Self {
            poses,
            velocities,
            headings: vec![h; n],
        }
    }

    /// Constant-speed pass along a circular arc, turning left with the given
    /// radius; at the middle chirp the platform is at `center` with heading
    /// `heading`.
    pub fn arc(
        params: &RadarParams,
        center: Point,
        heading: Point,
        radius: f64,
        speed: f64,
    ) -> Self {
        assert!(radius > 0.0, "arc radius must be positive");
        let n = params.num_chirps;
        let h = heading.normalized().expect("heading must be nonzero");
        let circle_center = center + h.left_normal().scale(radius);
        let mid = (n as f64 - 1.0) / 2.0;
        let mut poses = Vec::with_capacity(n);
        let mut velocities = Vec::with_capacity(n);
        let mut headings = Vec::with_capacity(n);
        for m in 0..n {
            let phi = (m as f64 - mid) * speed * params.pri_s / radius;
            let rot = Vec2::new(phi.cos(), phi.sin());
            let hm = h.rotated_by(rot);
            poses.push(circle_center - hm.left_normal().scale(radius));
            velocities.push(hm.scale(speed));
            headings.push(hm);
        }
        Self {
            poses,
            velocities,
            headings,
        }
    }

    /// Mean platform pose over the chirp sequence; origin of polar grids.
    pub fn aperture_center(&self) -> Point {
        let mut acc = Point::zero();
        for p in &self.poses {
            acc = acc + *p;
        }
        acc.scale(1.0 / self.poses.len() as f64)
    }

    /// Euclidean distance between the first and last pose.
    pub fn aperture_length(&self) -> f64 {
        match (self.poses.first(), self.poses.last()) {
            (Some(a), Some(b)) => a.distance(*b),
            _ => 0.0,
        }
    }

    /// Mean velocity vector over the chirp sequence.
    pub fn mean_velocity(&self) -> Point {
        let mut acc = Point::zero();
        for v in &self.velocities {
            acc = acc + *v;
        }
        acc.scale(1.0 / self.velocities.len() as f64)
    }
}

/// TX and RX antenna offsets in the platform frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub tx_offset: Point,
    pub rx_offsets: Vec<Point>,
}

impl ArrayGeometry {
    /// Uniform linear RX array along the platform +x axis, centered on the
    /// platform reference point; TX at the reference point.
    pub fn uniform_linear(num_rx: usize, spacing_m: f64) -> Self {
        let mid = (num_rx as f64 - 1.0) / 2.0;
        let rx_offsets = (0..num_rx)
            .map(|n| Point::new((n as f64 - mid) * spacing_m, 0.0))
            .collect();
        Self {
            tx_offset: Point::zero(),
            rx_offsets,
        }
    }

    pub fn validate(&self, params: &RadarParams) -> Result<()> {
        if self.rx_offsets.len() != params.num_rx {
            return Err(SarError::config(format!(
                "array has {} RX offsets but num_rx = {}",
                self.rx_offsets.len(),
                params.num_rx
            )));
        }
        Ok(())
    }

    /// Restrict the array to the listed antennas (paired with
    /// [`crate::bp::select_rx_subset`]).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut rx_offsets = Vec::with_capacity(indices.len());
        for &i in indices {
            let off = self.rx_offsets.get(i).ok_or_else(|| {
                SarError::bounds(format!("rx index {i} >= {}", self.rx_offsets.len()))
            })?;
            rx_offsets.push(*off);
        }
        Ok(Self {
            tx_offset: self.tx_offset,
            rx_offsets,
        })
    }
}

/// World positions of the TX antenna and one RX antenna for chirp `m`.
///
/// World position = pose(m) + rotation(heading(m)) * offset.
pub fn antenna_positions(
    traj: &Trajectory,
    geom: &ArrayGeometry,
    m: usize,
    n_rx: usize,
) -> Result<(Point, Point)> {
    if m >= traj.len() {
        return Err(SarError::bounds(format!(
            "chirp index {m} >= {}",
            traj.len()
        )));
    }
    if n_rx >= geom.rx_offsets.len() {
        return Err(SarError::bounds(format!(
            "rx index {n_rx} >= {}",
            geom.rx_offsets.len()
        )));
    }
    let pose = traj.poses[m];
    let heading = traj.headings[m];
    let q_tx = pose + geom.tx_offset.rotated_by(heading);
    let q_rx = pose + geom.rx_offsets[n_rx].rotated_by(heading);
    Ok((q_tx, q_rx))
}
