//! Edge-supervision label generation: Canny edges of the input merged with
//! rasterized lane-label strokes, optionally block-max downsampled to the
//! supervision resolution.

use crate::annot::LaneSet;
use crate::error::{Error, Result};
use crate::image::FloatImage;
use crate::mask::BitMask;
use crate::raster::stroke_polyline;

/// Canny detector settings. Thresholds apply to Sobel gradient magnitudes on
/// the 8-bit luma scale.
#[derive(Debug, Clone, PartialEq)]
pub struct CannyParams {
    pub gaussian_sigma: f32,
    pub low_threshold: f32,
    pub high_threshold: f32,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            gaussian_sigma: 1.4,
            low_threshold: 50.0,
            high_threshold: 150.0,
        }
    }
}

impl CannyParams {
    pub fn validate(&self) -> Result<()> {
        if self.gaussian_sigma.is_nan() || self.gaussian_sigma <= 0.0 {
            return Err(Error::Parameter(format!(
                "gaussian sigma must be positive, got {}",
                self.gaussian_sigma
            )));
        }
        if !(self.low_threshold >= 0.0 && self.low_threshold < self.high_threshold) {
            return Err(Error::Parameter(format!(
                "require 0 <= low < high, got low={} high={}",
                self.low_threshold, self.high_threshold
            )));
        }
        Ok(())
    }
}

/// Classical Canny pipeline: Rec. 601 grayscale, Gaussian blur (kernel
/// radius `ceil(3 * sigma)`, replicated borders), 3x3 Sobel gradients,
/// four-direction non-maximum suppression, double-threshold hysteresis
/// (weak edges survive only when 8-connected to a strong edge).
pub fn canny(img: &FloatImage, params: &CannyParams) -> Result<BitMask> {
    params.validate()?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let luma = img.luma255();
    let blurred = gaussian_blur(&luma, w, h, params.gaussian_sigma);
    let (gx, gy) = sobel(&blurred, w, h);
    let magnitude: Vec<f32> = gx.iter().zip(&gy).map(|(x, y)| x.hypot(*y)).collect();
    let thinned = suppress_non_maxima(&magnitude, &gx, &gy, w, h);
    Ok(hysteresis(
        &thinned,
        w,
        h,
        params.low_threshold,
        params.high_threshold,
    ))
}

fn gaussian_kernel(sigma: f32) -> Vec<f32> {
    let radius = (3.0 * sigma).ceil() as usize;
    let mut kernel = vec![0.0f32; 2 * radius + 1];
    for j in 0..=radius {
        let v = (-((j * j) as f32) / (2.0 * sigma * sigma)).exp();
        // Mirror so the kernel is bitwise symmetric.
        kernel[radius + j] = v;
        kernel[radius - j] = v;
    }
    let sum: f32 = kernel.iter().sum();
    for v in &mut kernel {
        *v /= sum;
    }
    kernel
}

/// Separable blur with replicated (clamped) borders.
fn gaussian_blur(src: &[f32], w: usize, h: usize, sigma: f32) -> Vec<f32> {
    let kernel = gaussian_kernel(sigma);
    let r = kernel.len() / 2;
    let mut rows = vec![0.0f32; w * h];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0f32;
            for (j, k) in kernel.iter().enumerate() {
                let xx = (x + j).saturating_sub(r).min(w - 1);
                acc += k * line[xx];
            }
            rows[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f32;
            for (j, k) in kernel.iter().enumerate() {
                let yy = (y + j).saturating_sub(r).min(h - 1);
                acc += k * rows[yy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// 3x3 Sobel gradients on interior pixels; borders stay zero.
fn sobel(src: &[f32], w: usize, h: usize) -> (Vec<f32>, Vec<f32>) {
    let mut gx = vec![0.0f32; w * h];
    let mut gy = vec![0.0f32; w * h];
    if w < 3 || h < 3 {
        return (gx, gy);
    }
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let i = y * w + x;
            let (a, b, c) = (src[i - w - 1], src[i - w], src[i - w + 1]);
            let (d, f) = (src[i - 1], src[i + 1]);
            let (g, hh, k) = (src[i + w - 1], src[i + w], src[i + w + 1]);
            gx[i] = (c + 2.0 * f + k) - (a + 2.0 * d + g);
            gy[i] = (g + 2.0 * hh + k) - (a + 2.0 * b + c);
        }
    }
    (gx, gy)
}

/// Non-maximum suppression with the gradient direction quantized to 0, 45,
/// 90, or 135 degrees. Ties along the direction keep the pixel nearer the
/// lower coordinate: a pixel survives when strictly greater than its
/// backward neighbor and at least equal to its forward neighbor.
fn suppress_non_maxima(magnitude: &[f32], gx: &[f32], gy: &[f32], w: usize, h: usize) -> Vec<f32> {
    let mut out = vec![0.0f32; w * h];
    if w < 3 || h < 3 {
        return out;
    }
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let i = y * w + x;
            let m = magnitude[i];
            if m == 0.0 {
                continue;
            }
            let mut angle = gy[i].atan2(gx[i]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            // backward = neighbor on the lower-coordinate side.
            let (backward, forward) = if !(22.5..157.5).contains(&angle) {
                (i - 1, i + 1) // 0 deg
            } else if angle < 67.5 {
                (i - w - 1, i + w + 1) // 45 deg
            } else if angle < 112.5 {
                (i - w, i + w) // 90 deg
            } else {
                (i - w + 1, i + w - 1) // 135 deg
            };
            if m > magnitude[backward] && m >= magnitude[forward] {
                out[i] = m;
            }
        }
    }
    out
}

/// Double-threshold hysteresis: strong pixels (`>= high`) seed a flood fill
/// through weak pixels (`>= low`) over 8-connectivity.
fn hysteresis(thinned: &[f32], w: usize, h: usize, low: f32, high: f32) -> BitMask {
    let mut mask = BitMask::new(w as u32, h as u32);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if thinned[y * w + x] < high || mask.get(x as u32, y as u32) {
                continue;
            }
            mask.set(x as u32, y as u32);
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = cx as i64 + dx;
                        let ny = cy as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if thinned[ny * w + nx] >= low && !mask.get(nx as u32, ny as u32) {
                            mask.set(nx as u32, ny as u32);
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }
    mask
}

/// Draws every lane of `set` as a binary stroke of the given width with
/// round caps and joins, clipped to the image.
pub fn render_lane_strokes(set: &LaneSet, stroke_width: u32) -> Result<BitMask> {
    if stroke_width == 0 {
        return Err(Error::Parameter("stroke width must be at least 1".into()));
    }
    let mut mask = BitMask::new(set.image_width(), set.image_height());
    for lane in set.lanes() {
        stroke_polyline(&mut mask, lane.points(), stroke_width as f64);
    }
    Ok(mask)
}

/// Pixelwise OR of the detector edges and the lane strokes.
pub fn merge_edge_label(canny_map: &BitMask, lane_map: &BitMask) -> Result<BitMask> {
    canny_map.or(lane_map)
}

/// Block-max pooling by an integer factor: an output pixel is set when any
/// source pixel in its block is set. Trailing rows/columns that do not fill
/// a block are cropped.
pub fn downsample_label(map: &BitMask, factor: u32) -> Result<BitMask> {
    if factor < 1 {
        return Err(Error::Parameter("downsample factor must be >= 1".into()));
    }
    if factor == 1 {
        return Ok(map.clone());
    }
    let out_w = map.width() / factor;
    let out_h = map.height() / factor;
    let mut out = BitMask::new(out_w, out_h);
    for (x, y) in map.iter_set() {
        let (bx, by) = (x / factor, y / factor);
        if bx < out_w && by < out_h {
            out.set(bx, by);
        }
    }
    Ok(out)
}
