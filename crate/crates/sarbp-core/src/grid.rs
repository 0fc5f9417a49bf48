//! Reconstruction grids: the reference Cartesian grid, the PSF-driven polar
//! grid, and polar-to-Cartesian resampling.

use crate::error::{Result, SarError};
use crate::geom::Rect;
use crate::signal::RadarParams;
use crate::{Point, C32};

/// Pixel lattice of an image. Pixel index order is documented per kind:
/// Cartesian enumerates rows of constant y with x fastest
/// (`p = iy * nx + ix`); polar enumerates rings of constant r with theta
/// fastest (`p = ir * n_theta + it`).
#[derive(Debug, Clone, PartialEq)]
pub enum ImageGrid {
    Cartesian {
        origin: Point,
        dx: f64,
        dy: f64,
        nx: usize,
        ny: usize,
    },
    Polar {
        center: Point,
        r_min: f64,
        dr: f64,
        n_r: usize,
        theta_min: f64,
        dtheta: f64,
        n_theta: usize,
    },
}

impl ImageGrid {
    pub fn len(&self) -> usize {
        match self {
            ImageGrid::Cartesian { nx, ny, .. } => nx * ny,
            ImageGrid::Polar { n_r, n_theta, .. } => n_r * n_theta,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// World position of pixel `p`.
    pub fn position(&self, p: usize) -> Point {
        match *self {
            ImageGrid::Cartesian {
                origin, dx, dy, nx, ..
            } => {
                let ix = p % nx;
                let iy = p / nx;
                Point::new(origin.x + ix as f64 * dx, origin.y + iy as f64 * dy)
            }
            ImageGrid::Polar {
                center,
                r_min,
                dr,
                theta_min,
                dtheta,
                n_theta,
                ..
            } => {
                let ir = p / n_theta;
                let it = p % n_theta;
                let r = r_min + ir as f64 * dr;
                let theta = theta_min + it as f64 * dtheta;
                Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
            }
        }
    }

    /// All pixel positions as single-precision pairs, the staged kernel input.
    pub fn positions_f32(&self) -> Vec<[f32; 2]> {
        (0..self.len())
            .map(|p| self.position(p).to_f32_pair())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ImageGrid::Cartesian { dx, dy, nx, ny, .. } => {
                if !(dx > 0.0 && dy > 0.0) || nx < 1 || ny < 1 {
                    return Err(SarError::config("cartesian grid needs positive spacings and counts"));
                }
            }
            ImageGrid::Polar {
                r_min,
                dr,
                n_r,
                dtheta,
                n_theta,
                ..
            } => {
                if !(dr > 0.0 && dtheta > 0.0) || n_r < 1 || n_theta < 1 {
                    return Err(SarError::config("polar grid needs positive spacings and counts"));
                }
                if r_min.is_nan() || r_min <= 0.0 {
                    return Err(SarError::config("polar grid needs r_min > 0"));
                }
            }
        }
        Ok(())
    }

    /// Bounding box of the pixel positions.
    pub fn bounds(&self) -> Rect {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in 0..self.len() {
            let pos = self.position(p);
            min.x = min.x.min(pos.x);
            min.y = min.y.min(pos.y);
            max.x = max.x.max(pos.x);
            max.y = max.y.max(pos.y);
        }
        Rect::new(min, max)
    }
}

/// Complex reconstruction on a grid, single-precision components.
#[derive(Debug, Clone, PartialEq)]
pub struct SarImage {
    pub values: Vec<C32>,
    pub grid: ImageGrid,
}

impl SarImage {
    pub fn new(values: Vec<C32>, grid: ImageGrid) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SarError::data(format!(
                "image has {} values for a {}-pixel grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { values, grid })
    }

    pub fn zeros(grid: ImageGrid) -> Self {
        Self {
            values: vec![C32::new(0.0, 0.0); grid.len()],
            grid,
        }
    }

    pub fn magnitude(&self) -> Vec<f32> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn peak_magnitude(&self) -> f32 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f32::max)
    }

    /// Index and position of the pixel with the largest magnitude.
    pub fn argmax(&self) -> (usize, Point) {
        let mut best = 0usize;
        let mut best_mag = -1.0f32;
        for (p, v) in self.values.iter().enumerate() {
            let m = v.norm();
            if m > best_mag {
                best_mag = m;
                best = p;
            }
        }
        (best, self.grid.position(best))
    }
}

/// Regular Cartesian grid covering `extent_x x extent_y` from `origin`,
/// `floor(extent / resolution) + 1` pixels per axis.
pub fn cartesian_grid(extent_x_m: f64, extent_y_m: f64, resolution_m: f64, origin: Point) -> ImageGrid {
    assert!(extent_x_m > 0.0 && extent_y_m > 0.0 && resolution_m > 0.0);
    ImageGrid::Cartesian {
        origin,
        dx: resolution_m,
        dy: resolution_m,
        nx: (extent_x_m / resolution_m).floor() as usize + 1,
        ny: (extent_y_m / resolution_m).floor() as usize + 1,
    }
}

/// Point-spread-function resolutions of the radar at a given range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfResolutions {
    /// Range resolution c / (2 B) in m.
    pub delta_r_m: f64,
    /// Azimuth resolution lambda R / (2 L) in m.
    pub delta_az_m: f64,
}

pub fn psf_resolutions(params: &RadarParams, aperture_length_m: f64, range_m: f64) -> PsfResolutions {
    assert!(aperture_length_m > 0.0 && range_m > 0.0);
    let d = params.derived_waveform();
    PsfResolutions {
        delta_r_m: d.range_resolution_m,
        delta_az_m: d.wavelength_m * range_m / (2.0 * aperture_length_m),
    }
}

/// Polar grid whose spacings are the PSF resolutions divided by
/// `oversample_factor`: dr = delta_r / factor, and the arc spacing at r_max
/// equals delta_az(r_max) / factor, which makes dtheta = lambda / (2 L f),
/// uniform over range. The grid originates at `center` (the aperture
/// center) and spans `[r_min, r_max] x [theta_min, theta_max]` at that
/// resolution, ring count `floor((r_max - r_min)/dr) + 1`.
#[allow(clippy::too_many_arguments)]
pub fn polar_grid(
    params: &RadarParams,
    aperture_length_m: f64,
    center: Point,
    r_min_m: f64,
    r_max_m: f64,
    theta_min_rad: f64,
    theta_max_rad: f64,
    oversample_factor: f64,
) -> Result<ImageGrid> {
    if oversample_factor < 2.0 {
        return Err(SarError::config(format!(
            "oversample_factor {oversample_factor} < 2 cannot depict point targets correctly"
        )));
    }
    if !(r_min_m > 0.0 && r_max_m >= r_min_m) {
        return Err(SarError::config("need 0 < r_min <= r_max"));
    }
    if theta_max_rad < theta_min_rad {
        return Err(SarError::config("need theta_min <= theta_max"));
    }
    let psf = psf_resolutions(params, aperture_length_m, r_max_m);
    let dr = psf.delta_r_m / oversample_factor;
    let dtheta = psf.delta_az_m / oversample_factor / r_max_m;
    let grid = ImageGrid::Polar {
        center,
        r_min: r_min_m,
        dr,
        n_r: ((r_max_m - r_min_m) / dr).floor() as usize + 1,
        theta_min: theta_min_rad,
        dtheta,
        n_theta: ((theta_max_rad - theta_min_rad) / dtheta).floor() as usize + 1,
    };
    grid.validate()?;
    Ok(grid)
}

/// Polar grid covering a Cartesian scene rectangle as seen from `center`,
/// with one cell of margin on every side.
pub fn polar_grid_covering(
    params: &RadarParams,
    aperture_length_m: f64,
    center: Point,
    scene: Rect,
    oversample_factor: f64,
) -> Result<ImageGrid> {
    if scene.is_degenerate() {
        return Err(SarError::config("degenerate scene rectangle"));
    }
    let corners = [
        Point::new(scene.min.x, scene.min.y),
        Point::new(scene.max.x, scene.min.y),
        Point::new(scene.min.x, scene.max.y),
        Point::new(scene.max.x, scene.max.y),
    ];
    let mut r_min = f64::INFINITY;
    let mut r_max = 0.0f64;
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    for c in corners {
        let d = c - center;
        r_max = r_max.max(d.norm());
        t_min = t_min.min(d.y.atan2(d.x));
        t_max = t_max.max(d.y.atan2(d.x));
    }
    // nearest point of the rectangle, not necessarily a corner
    let nearest = Point::new(
        center.x.clamp(scene.min.x, scene.max.x),
        center.y.clamp(scene.min.y, scene.max.y),
    );
    r_min = r_min.min((nearest - center).norm());
    if r_min.is_nan() || r_min <= 0.0 {
        return Err(SarError::config(
            "scene rectangle contains the aperture center; polar grids need r_min > 0",
        ));
    }
    let psf = psf_resolutions(params, aperture_length_m, r_max);
    let dr = psf.delta_r_m / oversample_factor;
    let dtheta = psf.delta_az_m / oversample_factor / r_max;
    polar_grid(
        params,
        aperture_length_m,
        center,
        (r_min - dr).max(dr * 1e-3),
        r_max + dr,
        t_min - dtheta,
        t_max + dtheta,
        oversample_factor,
    )
}

/// Polar image resampled onto a Cartesian grid.
#[derive(Debug, Clone)]
pub struct ResampledImage {
    /// Bilinear interpolation of the complex values.
    pub image: SarImage,
    /// Bilinear interpolation of the magnitudes, used for amplitude metrics.
    pub magnitude: Vec<f32>,
    /// True where the target pixel lies inside the polar coverage.
    pub mask: Vec<bool>,
}

/// Resample a polar-grid image onto a Cartesian target grid by bilinear
/// interpolation in (r, theta). Complex values and magnitudes are
/// interpolated separately; target pixels outside the polar coverage are
/// zero with `mask = false`.
pub fn resample_to_cartesian(image: &SarImage, target: &ImageGrid) -> Result<ResampledImage> {
    let (center, r_min, dr, n_r, theta_min, dtheta, n_theta) = match image.grid {
        ImageGrid::Polar {
            center,
            r_min,
            dr,
            n_r,
            theta_min,
            dtheta,
            n_theta,
        } => (center, r_min, dr, n_r, theta_min, dtheta, n_theta),
        _ => return Err(SarError::data("resample source must be a polar-grid image")),
    };
    if !matches!(target, ImageGrid::Cartesian { .. }) {
        return Err(SarError::data("resample target must be a cartesian grid"));
    }
    if image.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(SarError::data("polar image contains non-finite values"));
    }

    let tau = 2.0 * std::f64::consts::PI;
    let len = target.len();
    let mut values = vec![C32::new(0.0, 0.0); len];
    let mut magnitude = vec![0.0f32; len];
    let mut mask = vec![false; len];

    for p in 0..len {
        let pos = target.position(p);
        let d = pos - center;
        let r = d.norm();
        let mut theta = d.y.atan2(d.x);
        // bring theta into [theta_min, theta_min + 2 pi)
        theta -= ((theta - theta_min) / tau).floor() * tau;
        let fr = (r - r_min) / dr;
        let ft = (theta - theta_min) / dtheta;
        if fr < 0.0 || fr > (n_r - 1) as f64 || ft < 0.0 || ft > (n_theta - 1) as f64 {
            continue;
        }
        let ir = (fr.floor() as usize).min(n_r - 1);
        let it = (ft.floor() as usize).min(n_theta - 1);
        let ir1 = (ir + 1).min(n_r - 1);
        let it1 = (it + 1).min(n_theta - 1);
        let wr = fr - ir as f64;
        let wt = ft - it as f64;
        let sample = |jr: usize, jt: usize| image.values[jr * n_theta + jt];
        let v00 = sample(ir, it);
        let v01 = sample(ir, it1);
        let v10 = sample(ir1, it);
        let v11 = sample(ir1, it1);
        let blend = |a: f64, b: f64, c: f64, d4: f64| {
            a * (1.0 - wr) * (1.0 - wt) + b * (1.0 - wr) * wt + c * wr * (1.0 - wt) + d4 * wr * wt
        };
        let re = blend(v00.re as f64, v01.re as f64, v10.re as f64, v11.re as f64);
        let im = blend(v00.im as f64, v01.im as f64, v10.im as f64, v11.im as f64);
        let mag = blend(
            v00.norm() as f64,
            v01.norm() as f64,
            v10.norm() as f64,
            v11.norm() as f64,
        );
        values[p] = C32::new(re as f32, im as f32);
        magnitude[p] = mag as f32;
        mask[p] = true;
    }

    Ok(ResampledImage {
        image: SarImage::new(values, target.clone())?,
        magnitude,
        mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_counts() {
        let g = cartesian_grid(30.0, 30.0, 0.025, Point::zero());
        match g {
            ImageGrid::Cartesian { nx, ny, .. } => {
                assert_eq!((nx, ny), (1201, 1201));
            }
            _ => unreachable!(),
        }
        assert_eq!(g.len(), 1_442_401);

        let g = cartesian_grid(1.0, 1.0, 1.0, Point::zero());
        assert_eq!(g.len(), 4); // 2 x 2

        let g = cartesian_grid(30.0, 12.0, 0.025, Point::zero());
        match g {
            ImageGrid::Cartesian { nx, ny, .. } => assert_eq!((nx, ny), (1201, 481)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn cartesian_positions_row_major() {
        let g = cartesian_grid(1.0, 1.0, 0.5, Point::new(1.0, 2.0));
        // 3 x 3; p = iy * nx + ix
        assert_eq!(g.position(0), Point::new(1.0, 2.0));
        assert_eq!(g.position(1), Point::new(1.5, 2.0));
        assert_eq!(g.position(3), Point::new(1.0, 2.5));
        assert_eq!(g.position(8), Point::new(2.0, 3.0));
    }

    #[test]
    fn psf_resolution_values() {
        let p = RadarParams::full_scale();
        let r = psf_resolutions(&p, 1.0, 10.0);
        assert!((r.delta_r_m - 0.1610056).abs() < 1e-5);
        // L = lambda / 2 gives delta_az = R
        let d = p.derived_waveform();
        let r2 = psf_resolutions(&p, d.wavelength_m / 2.0, 7.5);
        assert!((r2.delta_az_m - 7.5).abs() < 1e-12);
        // L = 2 m, R = 10 m
        let r3 = psf_resolutions(&p, 2.0, 10.0);
        assert!((r3.delta_az_m - 9.784e-3).abs() < 1e-5);
        // linear in range
        let r4 = psf_resolutions(&p, 2.0, 20.0);
        assert!((r4.delta_az_m - 2.0 * r3.delta_az_m).abs() < 1e-12);
    }

    #[test]
    fn polar_grid_rejects_small_factor() {
        let p = RadarParams::full_scale();
        let err = polar_grid(&p, 1.0, Point::zero(), 1.0, 30.0, 0.1, 3.0, 1.5);
        assert!(err.is_err());
        assert!(polar_grid(&p, 1.0, Point::zero(), 1.0, 30.0, 0.1, 3.0, 2.0).is_ok());
    }

    #[test]
    fn polar_grid_degenerate_extent_is_single_ring() {
        let p = RadarParams::full_scale();
        let g = polar_grid(&p, 1.0, Point::zero(), 10.0, 10.0, 0.5, 0.6, 2.5).unwrap();
        match g {
            ImageGrid::Polar { n_r, .. } => assert_eq!(n_r, 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn polar_pixel_count_scales_with_factor_squared() {
        let p = RadarParams::full_scale();
        let l = 1023.0 * p.pri_s * 9.0;
        let center = Point::zero();
        let scene = Rect::new(Point::new(-15.0, 110.0), Point::new(15.0, 140.0));
        let c2 = polar_grid_covering(&p, l, center, scene, 2.0).unwrap().len() as f64;
        let c4 = polar_grid_covering(&p, l, center, scene, 4.0).unwrap().len() as f64;
        let ratio = c4 / c2;
        assert!((ratio - 4.0).abs() / 4.0 < 0.02, "ratio {ratio}");
    }

    #[test]
    fn polar_ratio_monotone_in_factor() {
        let p = RadarParams::full_scale();
        let l = 1023.0 * p.pri_s * 9.0;
        let scene = Rect::new(Point::new(-15.0, 110.0), Point::new(15.0, 140.0));
        let mut prev = 0usize;
        for f in [2.0, 2.5, 3.0, 4.0] {
            let n = polar_grid_covering(&p, l, Point::zero(), scene, f).unwrap().len();
            assert!(n > prev, "factor {f}: {n} <= {prev}");
            prev = n;
        }
    }

    #[test]
    fn polar_positions_within_sector() {
        let p = RadarParams::full_scale();
        let center = Point::new(1.0, -2.0);
        let g = polar_grid(&p, 1.0, center, 5.0, 8.0, 0.2, 1.2, 2.5).unwrap();
        let (r_min, dr, n_r, t_min, dt, n_t) = match g {
            ImageGrid::Polar {
                r_min,
                dr,
                n_r,
                theta_min,
                dtheta,
                n_theta,
                ..
            } => (r_min, dr, n_r, theta_min, dtheta, n_theta),
            _ => unreachable!(),
        };
        assert!(r_min + (n_r - 1) as f64 * dr <= 8.0 + 1e-12);
        assert!(t_min + (n_t - 1) as f64 * dt <= 1.2 + 1e-12);
        for p_idx in 0..g.len() {
            let pos = g.position(p_idx);
            let d = pos - center;
            let r = d.norm();
            let th = d.y.atan2(d.x);
            assert!((5.0 - 1e-9..=8.0 + 1e-9).contains(&r));
            assert!((0.2 - 1e-9..=1.2 + 1e-9).contains(&th));
        }
    }

    fn polar_test_image<F: Fn(f64, f64) -> C32>(f: F) -> SarImage {
        let g = ImageGrid::Polar {
            center: Point::zero(),
            r_min: 5.0,
            dr: 0.1,
            n_r: 40,
            theta_min: 0.4,
            dtheta: 0.02,
            n_theta: 50,
        };
        let values = (0..g.len())
            .map(|p| {
                let ir = p / 50;
                let it = p % 50;
                f(5.0 + ir as f64 * 0.1, 0.4 + it as f64 * 0.02)
            })
            .collect();
        SarImage::new(values, g).unwrap()
    }

    #[test]
    fn resample_reproduces_constants() {
        let img = polar_test_image(|_, _| C32::new(3.0, -1.0));
        // target well inside the sector
        let target = cartesian_grid(1.0, 1.0, 0.05, Point::new(4.0, 4.0));
        let out = resample_to_cartesian(&img, &target).unwrap();
        let mut covered = 0;
        for (p, &m) in out.mask.iter().enumerate() {
            if m {
                covered += 1;
                let v = out.image.values[p];
                assert!((v.re - 3.0).abs() < 1e-5 && (v.im + 1.0).abs() < 1e-5);
                let mag = (10.0f32).sqrt();
                assert!((out.magnitude[p] - mag).abs() / mag < 1e-6);
            }
        }
        assert!(covered > 0, "target should intersect the sector");
    }

    #[test]
    fn resample_exact_for_linear_fields() {
        // f(r, theta) = 2 + 3 r - theta is reproduced exactly by bilinear
        let img = polar_test_image(|r, t| C32::new((2.0 + 3.0 * r - t) as f32, 0.0));
        let target = cartesian_grid(0.8, 0.8, 0.04, Point::new(4.2, 4.2));
        let out = resample_to_cartesian(&img, &target).unwrap();
        let mut checked = 0;
        for p in 0..target.len() {
            if !out.mask[p] {
                continue;
            }
            let pos = target.position(p);
            let r = pos.norm();
            let t = pos.y.atan2(pos.x);
            let expected = 2.0 + 3.0 * r - t;
            assert!(
                (out.image.values[p].re as f64 - expected).abs() < 1e-5 * expected.abs(),
                "pixel {p}"
            );
            checked += 1;
        }
        assert!(checked > 10);
    }

    #[test]
    fn resample_single_bright_pixel_lands_nearby() {
        let g_ir = 20;
        let g_it = 25;
        let img = polar_test_image(|r, t| {
            let ir = ((r - 5.0) / 0.1).round() as usize;
            let it = ((t - 0.4) / 0.02).round() as usize;
            if ir == g_ir && it == g_it {
                C32::new(100.0, 0.0)
            } else {
                C32::new(0.0, 0.0)
            }
        });
        let r = 5.0 + g_ir as f64 * 0.1;
        let t = 0.4 + g_it as f64 * 0.02;
        let true_pos = Point::new(r * t.cos(), r * t.sin());
        let target = cartesian_grid(2.0, 2.0, 0.02, Point::new(true_pos.x - 1.0, true_pos.y - 1.0));
        let out = resample_to_cartesian(&img, &target).unwrap();
        let (pk, pos) = out.image.argmax();
        assert!(out.mask[pk]);
        // within one polar cell (dr = 0.1, arc ~ 7 * 0.02 = 0.14)
        assert!(pos.distance(true_pos) <= 0.15, "off by {}", pos.distance(true_pos));
    }

    #[test]
    fn resample_outside_coverage_is_empty() {
        let img = polar_test_image(|_, _| C32::new(1.0, 0.0));
        let target = cartesian_grid(1.0, 1.0, 0.1, Point::new(100.0, 100.0));
        let out = resample_to_cartesian(&img, &target).unwrap();
        assert!(out.mask.iter().all(|&m| !m));
        assert!(out.image.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn resample_rejects_nonfinite() {
        let mut img = polar_test_image(|_, _| C32::new(1.0, 0.0));
        img.values[3] = C32::new(f32::NAN, 0.0);
        let target = cartesian_grid(1.0, 1.0, 0.1, Point::new(4.0, 4.0));
        assert!(resample_to_cartesian(&img, &target).is_err());
    }
}
