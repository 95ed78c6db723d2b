//! Binary rasters used for edge maps and rasterized lanes.

use std::path::Path;

use crate::error::{Error, Result};

/// Packed binary H×W raster. Rows are padded to a 64-bit word boundary;
/// padding bits are always zero, so whole-word AND/OR population counts are
/// valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMask {
    width: u32,
    height: u32,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMask {
    pub fn new(width: u32, height: u32) -> Self {
        let words_per_row = (width as usize).div_ceil(64);
        Self {
            width,
            height,
            words_per_row,
            words: vec![0; words_per_row * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        debug_assert!(x < self.width && y < self.height);
        let w = y as usize * self.words_per_row + (x as usize >> 6);
        self.words[w] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32) {
        debug_assert!(x < self.width && y < self.height);
        let w = y as usize * self.words_per_row + (x as usize >> 6);
        self.words[w] |= 1u64 << (x & 63);
    }

    /// Sets columns `x0..=x1` of row `y`.
    pub fn fill_row_span(&mut self, y: u32, x0: u32, x1: u32) {
        debug_assert!(y < self.height && x0 <= x1 && x1 < self.width);
        let base = y as usize * self.words_per_row;
        let (w0, w1) = (x0 as usize >> 6, x1 as usize >> 6);
        let lo = !0u64 << (x0 & 63);
        let hi = !0u64 >> (63 - (x1 & 63));
        if w0 == w1 {
            self.words[base + w0] |= lo & hi;
        } else {
            self.words[base + w0] |= lo;
            for w in w0 + 1..w1 {
                self.words[base + w] = !0;
            }
            self.words[base + w1] |= hi;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn intersection_count(&self, other: &Self) -> u64 {
        debug_assert!(self.same_shape(other));
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    pub fn union_count(&self, other: &Self) -> u64 {
        debug_assert!(self.same_shape(other));
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as u64)
            .sum()
    }

    /// Pixelwise logical OR. Shapes must match.
    pub fn or(&self, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::UnmatchedShape(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            words_per_row: self.words_per_row,
            words,
        })
    }

    /// Set pixels in row-major order, for tests and sparse consumers.
    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.height)
            .flat_map(move |y| (0..self.width).map(move |x| (x, y)))
            .filter(move |&(x, y)| self.get(x, y))
    }

    /// Renders as an 8-bit grayscale image, set pixels white (255).
    pub fn to_gray_image(&self) -> ::image::GrayImage {
        let mut img = ::image::GrayImage::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    img.put_pixel(x, y, ::image::Luma([255]));
                }
            }
        }
        img
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        self.to_gray_image()
            .save(path)
            .map_err(|e| Error::image(path, e))
    }
}
