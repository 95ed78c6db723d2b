//! Per-pixel depth supply for the fog model.
//!
//! Depth comes from one of two places: externally computed maps ingested
//! from 16-bit grayscale PNG or PFM files, or a synthetic flat-road
//! ground-plane model for images without depth data. Transmittance expects
//! depth normalized to `[0, 1]`; `normalize_depth` establishes that
//! convention (divide by the maximum), so extinction coefficients are
//! relative to the deepest point in each map.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// H×W scalar depth field. `normalized` records that all values are already
/// in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: u32,
    height: u32,
    values: Vec<f32>,
    normalized: bool,
}

impl DepthMap {
    pub fn new(width: u32, height: u32, values: Vec<f32>, normalized: bool) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "depth dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if values.len() != width as usize * height as usize {
            return Err(Error::Parameter(format!(
                "expected {} depth samples for {width}x{height}, got {}",
                width as usize * height as usize,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Parameter(
                "depth samples must be finite and non-negative".into(),
            ));
        }
        if normalized && values.iter().any(|v| *v > 1.0) {
            return Err(Error::Parameter(
                "normalized depth samples must not exceed 1".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            values,
            normalized,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn value(&self, x: u32, y: u32) -> f32 {
        debug_assert!(x < self.width && y < self.height);
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
}

/// Flat-road depth model: depth falls off as `scale / (y - horizon_row)`
/// below the horizon and saturates at `d_max` above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPlaneModel {
    pub horizon_row: f32,
    pub scale: f32,
    pub d_min: f32,
    pub d_max: f32,
}

impl GroundPlaneModel {
    pub fn new(horizon_row: f32, scale: f32, d_min: f32, d_max: f32) -> Result<Self> {
        let m = Self {
            horizon_row,
            scale,
            d_min,
            d_max,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.horizon_row.is_finite() || self.horizon_row < 0.0 {
            return Err(Error::Parameter(format!(
                "horizon row must be finite and non-negative, got {}",
                self.horizon_row
            )));
        }
        if self.scale.is_nan() || self.scale <= 0.0 {
            return Err(Error::Parameter(format!(
                "ground-plane scale must be positive, got {}",
                self.scale
            )));
        }
        if !(self.d_min > 0.0 && self.d_min < self.d_max) {
            return Err(Error::Parameter(format!(
                "require 0 < d_min < d_max, got d_min={} d_max={}",
                self.d_min, self.d_max
            )));
        }
        Ok(())
    }
}

/// Loads a depth map from a 16-bit grayscale PNG (`value / 65535`, marked
/// normalized) or a grayscale PFM (raw floats, not normalized).
pub fn load_depth(path: &Path) -> Result<DepthMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"Pf") {
        return parse_pfm(path, &bytes);
    }
    if bytes.starts_with(b"PF") {
        return Err(Error::DepthIngest {
            path: path.into(),
            message: "color PFM is unsupported; provide grayscale 'Pf'".into(),
        });
    }
    let img = ::image::load_from_memory(&bytes).map_err(|e| Error::image(path, e))?;
    match img {
        ::image::DynamicImage::ImageLuma16(gray) => {
            let (w, h) = (gray.width(), gray.height());
            let values = gray
                .into_raw()
                .iter()
                .map(|&v| v as f32 / 65535.0)
                .collect();
            DepthMap::new(w, h, values, true)
        }
        other => Err(Error::DepthIngest {
            path: path.into(),
            message: format!(
                "expected 16-bit grayscale PNG or PFM, got {:?}",
                other.color()
            ),
        }),
    }
}

/// Grayscale PFM: "Pf", width, height, scale (sign selects endianness),
/// then rows of f32 samples stored bottom-to-top.
fn parse_pfm(path: &Path, bytes: &[u8]) -> Result<DepthMap> {
    let ingest = |message: String| Error::DepthIngest {
        path: path.into(),
        message,
    };
    let mut pos = 2usize;
    let token = |pos: &mut usize| -> Result<String> {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(ingest("truncated PFM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let width: u32 = token(&mut pos)?
        .parse()
        .map_err(|_| ingest("bad PFM width".into()))?;
    let height: u32 = token(&mut pos)?
        .parse()
        .map_err(|_| ingest("bad PFM height".into()))?;
    let scale: f32 = token(&mut pos)?
        .parse()
        .map_err(|_| ingest("bad PFM scale".into()))?;
    // Exactly one whitespace byte separates the header from the samples.
    pos += 1;
    let n = width as usize * height as usize;
    if bytes.len() < pos + n * 4 {
        return Err(ingest("PFM sample data truncated".into()));
    }
    let little_endian = scale < 0.0;
    let mut values = vec![0.0f32; n];
    for (i, chunk) in bytes[pos..pos + n * 4].chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        // PFM rows run bottom-to-top.
        let row = height as usize - 1 - i / width as usize;
        values[row * width as usize + i % width as usize] = v;
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(ingest("PFM contains negative or non-finite depth".into()));
    }
    DepthMap::new(width, height, values, false)
}

/// Rescales so the maximum depth becomes 1. Constant-zero maps pass through
/// unchanged (they encode "no fog gradient" and stay valid). Idempotent.
pub fn normalize_depth(depth: &DepthMap) -> DepthMap {
    let max = depth.values.iter().cloned().fold(0.0f32, f32::max);
    let values = if max > 0.0 {
        depth.values.iter().map(|v| v / max).collect()
    } else {
        depth.values.clone()
    };
    DepthMap {
        width: depth.width,
        height: depth.height,
        values,
        normalized: true,
    }
}

/// Synthesizes pinhole flat-road depth: rows at or above the horizon are far
/// field (`d_max`); below it depth is `scale / (y - horizon_row)` clamped to
/// `[d_min, d_max]`. The result is normalized by `d_max` and constant along
/// each row.
pub fn synth_ground_plane_depth(
    width: u32,
    height: u32,
    model: &GroundPlaneModel,
) -> Result<DepthMap> {
    model.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::Parameter(
            "image dimensions must be at least 1x1".into(),
        ));
    }
    if model.horizon_row >= height as f32 {
        return Err(Error::Parameter(format!(
            "horizon row {} is outside a {height}-row image",
            model.horizon_row
        )));
    }
    let mut values = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        let d_raw = if y as f32 > model.horizon_row {
            (model.scale / (y as f32 - model.horizon_row)).clamp(model.d_min, model.d_max)
        } else {
            model.d_max
        };
        let d = d_raw / model.d_max;
        values.extend(std::iter::repeat_n(d, width as usize));
    }
    DepthMap::new(width, height, values, true)
}

/// Writes a normalized depth map as 16-bit grayscale PNG.
pub fn save_depth_png16(depth: &DepthMap, path: &Path) -> Result<()> {
    if !depth.is_normalized() {
        return Err(Error::Parameter(
            "only normalized depth maps can be written as 16-bit PNG".into(),
        ));
    }
    let raw: Vec<u16> = depth
        .values
        .iter()
        .map(|v| (v * 65535.0).round() as u16)
        .collect();
    let img: ::image::ImageBuffer<::image::Luma<u16>, Vec<u16>> =
        ::image::ImageBuffer::from_raw(depth.width, depth.height, raw)
            .expect("buffer length matches dimensions");
    img.save(path).map_err(|e| Error::image(path, e))
}
