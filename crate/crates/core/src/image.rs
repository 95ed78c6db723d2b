//! Linear-light RGB image storage shared by the fog and edge pipelines.

use std::path::Path;

use crate::error::{Error, Result};

/// RGB raster with channel values in `[0, 1]`, row-major interleaved.
///
/// 8-bit sources map linearly (`v / 255`); the toolkit applies no gamma
/// transform anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    width: u32,
    height: u32,
    data: Vec<f32>,
}

impl FloatImage {
    /// Wraps raw interleaved RGB data, validating the `[0, 1]` range.
    pub fn from_raw(width: u32, height: u32, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(Error::Parameter(format!(
                "expected {expected} samples for {width}x{height} RGB, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Parameter(
                "image samples must be finite and within [0, 1]".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant-color image.
    pub fn filled(width: u32, height: u32, rgb: [f32; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..width as usize * height as usize {
            data.extend_from_slice(&rgb);
        }
        Self::from_raw(width, height, data)
    }

    pub fn from_rgb8(img: &::image::RgbImage) -> Self {
        let data = img.as_raw().iter().map(|&v| v as f32 / 255.0).collect();
        Self {
            width: img.width(),
            height: img.height(),
            data,
        }
    }

    /// Re-quantizes to 8 bits with round-to-nearest.
    pub fn to_rgb8(&self) -> ::image::RgbImage {
        let raw: Vec<u8> = self
            .data
            .iter()
            .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        ::image::RgbImage::from_raw(self.width, self.height, raw)
            .expect("buffer length matches dimensions")
    }

    /// Decodes a PNG or JPEG file.
    pub fn open(path: &Path) -> Result<Self> {
        let img = ::image::open(path).map_err(|e| Error::image(path, e))?;
        Ok(Self::from_rgb8(&img.to_rgb8()))
    }

    /// Encodes to the format implied by the file extension (PNG or JPEG).
    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_rgb8().save(path).map_err(|e| Error::image(path, e))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Interleaved RGB samples, row-major.
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [f32; 3] {
        debug_assert!(x < self.width && y < self.height);
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Per-pixel minimum over the three channels.
    pub fn channel_min(&self) -> Vec<f32> {
        self.data
            .chunks_exact(3)
            .map(|p| p[0].min(p[1]).min(p[2]))
            .collect()
    }

    /// Rec. 601 luma on the 8-bit scale (`[0, 255]`), as used by gradient
    /// thresholds in the edge pipeline.
    pub fn luma255(&self) -> Vec<f32> {
        self.data
            .chunks_exact(3)
            .map(|p| (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) * 255.0)
            .collect()
    }
}
