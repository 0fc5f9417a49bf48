//! Binary file formats and PGM export.
//!
//! `SARBP1` beat-spectrum file, little endian:
//! magic `"SARBP1\0\0"` (8 B), u32 N_m, u32 N_rx, u32 N_f, f64 f_start_hz,
//! f64 f_step_hz, then N_m * N_rx * N_f complex samples as interleaved
//! float32 (re, im), chirp-major, then rx, then bin. Header is 36 bytes.
//!
//! `SARIM1` image file, little endian: magic `"SARIM1\0\0"`, u32 kind tag
//! (0 = cartesian, 1 = polar), the grid parameters as f64 fields in
//! declaration order (cartesian: origin x, origin y, dx, dy, nx, ny;
//! polar: center x, center y, r_min, dr, n_r, theta_min, dtheta, n_theta;
//! counts are stored as f64 and are exact below 2^53), u64 pixel count,
//! then complex float32 values in pixel order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, SarError};
use crate::grid::{ImageGrid, SarImage};
use crate::sim::BeatSpectrum;
use crate::{Point, C32};

pub const SPECTRUM_MAGIC: &[u8; 8] = b"SARBP1\0\0";
pub const IMAGE_MAGIC: &[u8; 8] = b"SARIM1\0\0";
/// SARBP1 header size in bytes.
pub const SPECTRUM_HEADER_BYTES: u64 = 36;

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_c32<W: Write>(w: &mut W, v: C32) -> Result<()> {
    w.write_all(&v.re.to_le_bytes())?;
    w.write_all(&v.im.to_le_bytes())?;
    Ok(())
}

fn read_exact<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_exact::<R, 4>(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_exact::<R, 8>(r)?))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact::<R, 8>(r)?))
}

fn read_c32<R: Read>(r: &mut R) -> Result<C32> {
    let re = f32::from_le_bytes(read_exact::<R, 4>(r)?);
    let im = f32::from_le_bytes(read_exact::<R, 4>(r)?);
    Ok(C32::new(re, im))
}

pub fn write_spectrum(path: &Path, spectrum: &BeatSpectrum) -> Result<()> {
    spectrum.validate()?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SPECTRUM_MAGIC)?;
    write_u32(&mut w, spectrum.num_chirps as u32)?;
    write_u32(&mut w, spectrum.num_rx as u32)?;
    write_u32(&mut w, spectrum.num_bins as u32)?;
    write_f64(&mut w, spectrum.f_start_hz)?;
    write_f64(&mut w, spectrum.f_step_hz)?;
    for v in &spectrum.data {
        write_c32(&mut w, *v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum(path: &Path) -> Result<BeatSpectrum> {
    let mut r = BufReader::new(File::open(path)?);
    let magic = read_exact::<_, 8>(&mut r)?;
    if &magic != SPECTRUM_MAGIC {
        return Err(SarError::data(format!(
            "{}: not a SARBP1 file",
            path.display()
        )));
    }
    let num_chirps = read_u32(&mut r)? as usize;
    let num_rx = read_u32(&mut r)? as usize;
    let num_bins = read_u32(&mut r)? as usize;
    let f_start_hz = read_f64(&mut r)?;
    let f_step_hz = read_f64(&mut r)?;
    let n = num_chirps
        .checked_mul(num_rx)
        .and_then(|x| x.checked_mul(num_bins))
        .ok_or_else(|| SarError::data("spectrum dimensions overflow"))?;
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push(read_c32(&mut r)?);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(SarError::data(format!(
            "{}: trailing bytes after spectrum payload",
            path.display()
        )));
    }
    let spectrum = BeatSpectrum {
        data,
        num_chirps,
        num_rx,
        num_bins,
        f_start_hz,
        f_step_hz,
    };
    spectrum.validate()?;
    Ok(spectrum)
}

pub fn write_image(path: &Path, image: &SarImage) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(IMAGE_MAGIC)?;
    match image.grid {
        ImageGrid::Cartesian {
            origin,
            dx,
            dy,
            nx,
            ny,
        } => {
            write_u32(&mut w, 0)?;
            for v in [origin.x, origin.y, dx, dy, nx as f64, ny as f64] {
                write_f64(&mut w, v)?;
            }
        }
        ImageGrid::Polar {
            center,
            r_min,
            dr,
            n_r,
            theta_min,
            dtheta,
            n_theta,
        } => {
            write_u32(&mut w, 1)?;
            for v in [
                center.x,
                center.y,
                r_min,
                dr,
                n_r as f64,
                theta_min,
                dtheta,
                n_theta as f64,
            ] {
                write_f64(&mut w, v)?;
            }
        }
    }
    write_u64(&mut w, image.values.len() as u64)?;
    for v in &image.values {
        write_c32(&mut w, *v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_image(path: &Path) -> Result<SarImage> {
    let mut r = BufReader::new(File::open(path)?);
    let magic = read_exact::<_, 8>(&mut r)?;
    if &magic != IMAGE_MAGIC {
        return Err(SarError::data(format!(
            "{}: not a SARIM1 file",
            path.display()
        )));
    }
    let kind = read_u32(&mut r)?;
    let grid = match kind {
        0 => {
            let ox = read_f64(&mut r)?;
            let oy = read_f64(&mut r)?;
            let dx = read_f64(&mut r)?;
            let dy = read_f64(&mut r)?;
            let nx = read_f64(&mut r)? as usize;
            let ny = read_f64(&mut r)? as usize;
            ImageGrid::Cartesian {
                origin: Point::new(ox, oy),
                dx,
                dy,
                nx,
                ny,
            }
        }
        1 => {
            let cx = read_f64(&mut r)?;
            let cy = read_f64(&mut r)?;
            let r_min = read_f64(&mut r)?;
            let dr = read_f64(&mut r)?;
            let n_r = read_f64(&mut r)? as usize;
            let theta_min = read_f64(&mut r)?;
            let dtheta = read_f64(&mut r)?;
            let n_theta = read_f64(&mut r)? as usize;
            ImageGrid::Polar {
                center: Point::new(cx, cy),
                r_min,
                dr,
                n_r,
                theta_min,
                dtheta,
                n_theta,
            }
        }
        k => {
            return Err(SarError::data(format!(
                "{}: unknown grid kind tag {k}",
                path.display()
            )))
        }
    };
    grid.validate()?;
    let count = read_u64(&mut r)? as usize;
    if count != grid.len() {
        return Err(SarError::data(format!(
            "{}: pixel count {count} does not match grid ({})",
            path.display(),
            grid.len()
        )));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(read_c32(&mut r)?);
    }
    SarImage::new(values, grid)
}

/// Export the magnitude image as an 8-bit binary PGM.
///
/// Values are 20 log10(|P| / max |P|), clipped to [-dynamic_range_db, 0]
/// and mapped linearly to 0..255 (0 dB = 255). Cartesian rasters are
/// written with the top row at maximum y; polar rasters with the top row at
/// maximum range, theta increasing left to right.
pub fn write_pgm(path: &Path, image: &SarImage, dynamic_range_db: f64) -> Result<()> {
    if dynamic_range_db.is_nan() || dynamic_range_db <= 0.0 {
        return Err(SarError::config("dynamic range must be positive"));
    }
    let (cols, rows) = match image.grid {
        ImageGrid::Cartesian { nx, ny, .. } => (nx, ny),
        ImageGrid::Polar { n_theta, n_r, .. } => (n_theta, n_r),
    };
    let peak = image.peak_magnitude().max(f32::MIN_POSITIVE);
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{cols} {rows}\n255\n")?;
    let mut raster = Vec::with_capacity(cols * rows);
    for row in (0..rows).rev() {
        for col in 0..cols {
            let v = image.values[row * cols + col].norm();
            let db = 20.0 * (v / peak).max(f32::MIN_POSITIVE).log10() as f64;
            let t = ((db + dynamic_range_db) / dynamic_range_db).clamp(0.0, 1.0);
            raster.push((t * 255.0).round() as u8);
        }
    }
    w.write_all(&raster)?;
    w.flush()?;
    Ok(())
}

/// Export a signed per-pixel dB map (an amplitude-difference image) as an
/// 8-bit PGM. Values are clipped to [-range_db, +range_db] and mapped
/// linearly to 0..255 (0 dB = 128). Pixels with `mask = false` are black.
/// Row order matches [`write_pgm`].
pub fn write_diff_pgm(
    path: &Path,
    map: &[f64],
    grid: &ImageGrid,
    mask: Option<&[bool]>,
    range_db: f64,
) -> Result<()> {
    if map.len() != grid.len() {
        return Err(SarError::data("diff map does not match the grid"));
    }
    if range_db.is_nan() || range_db <= 0.0 {
        return Err(SarError::config("dynamic range must be positive"));
    }
    let (cols, rows) = match grid {
        ImageGrid::Cartesian { nx, ny, .. } => (*nx, *ny),
        ImageGrid::Polar { n_theta, n_r, .. } => (*n_theta, *n_r),
    };
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{cols} {rows}\n255\n")?;
    let mut raster = Vec::with_capacity(cols * rows);
    for row in (0..rows).rev() {
        for col in 0..cols {
            let p = row * cols + col;
            if mask.is_some_and(|m| !m[p]) {
                raster.push(0u8);
                continue;
            }
            let t = ((map[p] + range_db) / (2.0 * range_db)).clamp(0.0, 1.0);
            raster.push((t * 255.0).round() as u8);
        }
    }
    w.write_all(&raster)?;
    w.flush()?;
    Ok(())
}
