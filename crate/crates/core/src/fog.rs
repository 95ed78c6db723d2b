//! Atmospheric scattering fog synthesis.
//!
//! A clear image `J` becomes a foggy image `I` through
//! `I(x) = J(x) * t(x) + A * (1 - t(x))` with transmittance
//! `t(x) = exp(-beta * d(x))`. The atmospheric light `A` is estimated from
//! the dark channel: the brightest 0.1% of dark-channel pixels vote with
//! their maximum RGB value.
//!
//! All operations are pure; [`fog_batch`] fans images out across threads and
//! merges per-image results in input order.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{self, DepthMap, GroundPlaneModel};
use crate::error::{Error, Result};
use crate::image::FloatImage;

/// Fog rendering parameters.
///
/// `beta` is the extinction coefficient; against depth normalized to
/// `[0, 1]`, values of 2, 4, and 8 give light, medium, and heavy fog.
#[derive(Debug, Clone, PartialEq)]
pub struct FogParams {
    pub beta: f32,
    /// Fixed atmospheric light; estimated per image when absent.
    pub atmospheric_light: Option<f32>,
    /// Dark-channel window side length (odd).
    pub dc_window: u32,
    /// Fraction of brightest dark-channel pixels voting for `A`.
    pub bright_percentile: f64,
}

impl Default for FogParams {
    fn default() -> Self {
        Self {
            beta: 4.0,
            atmospheric_light: None,
            dc_window: 15,
            bright_percentile: 0.001,
        }
    }
}

impl FogParams {
    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::Parameter(format!(
                "extinction coefficient must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if self.dc_window == 0 || self.dc_window.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "dark-channel window must be odd and >= 1, got {}",
                self.dc_window
            )));
        }
        if !(self.bright_percentile > 0.0 && self.bright_percentile <= 1.0) {
            return Err(Error::Parameter(format!(
                "bright percentile must lie in (0, 1], got {}",
                self.bright_percentile
            )));
        }
        if let Some(a) = self.atmospheric_light {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Parameter(format!(
                    "atmospheric light must lie in [0, 1], got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-pixel minimum over channels and a local window.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkChannelMap {
    width: u32,
    height: u32,
    window: u32,
    values: Vec<f32>,
}

impl DarkChannelMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn value(&self, x: u32, y: u32) -> f32 {
        self.values[y as usize * self.width as usize + x as usize]
    }
}

/// Per-pixel transmittance in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmittanceMap {
    width: u32,
    height: u32,
    values: Vec<f32>,
}

impl TransmittanceMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }
}

/// Minimum over sliding windows `[i-r, i+r]`, clipped to the array bounds
/// (the window shrinks at the ends instead of padding).
fn sliding_min(src: &[f32], r: usize, dst: &mut [f32]) {
    debug_assert_eq!(src.len(), dst.len());
    let n = src.len();
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next = 0usize;
    for (i, out) in dst.iter_mut().enumerate() {
        let hi = (i + r).min(n - 1);
        while next <= hi {
            while deque.back().is_some_and(|&b| src[b] >= src[next]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(r);
        while deque.front().is_some_and(|&f| f < lo) {
            deque.pop_front();
        }
        *out = src[*deque.front().expect("window is never empty")];
    }
}

/// Computes the dark channel: minimum over channels, then over a square
/// window of odd side `window` centered on each pixel. The window shrinks at
/// image borders; nothing is padded.
pub fn dark_channel(img: &FloatImage, window: u32) -> Result<DarkChannelMap> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "dark-channel window must be odd and >= 1, got {window}"
        )));
    }
    let (w, h) = (img.width() as usize, img.height() as usize);
    let r = (window / 2) as usize;
    let chan_min = img.channel_min();

    // Separable min filter: rows, then columns.
    let mut rows = vec![0.0f32; w * h];
    for y in 0..h {
        sliding_min(
            &chan_min[y * w..(y + 1) * w],
            r,
            &mut rows[y * w..(y + 1) * w],
        );
    }
    let mut values = vec![0.0f32; w * h];
    let mut col_src = vec![0.0f32; h];
    let mut col_dst = vec![0.0f32; h];
    for x in 0..w {
        for y in 0..h {
            col_src[y] = rows[y * w + x];
        }
        sliding_min(&col_src, r, &mut col_dst);
        for y in 0..h {
            values[y * w + x] = col_dst[y];
        }
    }
    Ok(DarkChannelMap {
        width: img.width(),
        height: img.height(),
        window,
        values,
    })
}

/// Estimates the atmospheric light `A`: takes the `max(1, floor(percentile
/// x N))` brightest dark-channel pixels (ties broken by row-major index)
/// and returns the maximum channel value among them.
pub fn estimate_atmospheric_light(
    img: &FloatImage,
    dark: &DarkChannelMap,
    percentile: f64,
) -> Result<f32> {
    if !(percentile > 0.0 && percentile <= 1.0) {
        return Err(Error::Parameter(format!(
            "bright percentile must lie in (0, 1], got {percentile}"
        )));
    }
    if img.width() != dark.width || img.height() != dark.height {
        return Err(Error::UnmatchedShape(format!(
            "image {}x{} vs dark channel {}x{}",
            img.width(),
            img.height(),
            dark.width,
            dark.height
        )));
    }
    let n = dark.values.len();
    let k = ((percentile * n as f64).floor() as usize).clamp(1, n);
    let mut idx: Vec<u32> = (0..n as u32).collect();
    // Total order: larger dark value first, then smaller row-major index.
    let by_brightness = |a: &u32, b: &u32| {
        dark.values[*b as usize]
            .partial_cmp(&dark.values[*a as usize])
            .expect("dark channel values are finite")
            .then_with(|| a.cmp(b))
    };
    if k < n {
        idx.select_nth_unstable_by(k - 1, by_brightness);
    }
    let data = img.data();
    let a = idx[..k]
        .iter()
        .flat_map(|&i| data[i as usize * 3..i as usize * 3 + 3].iter().copied())
        .fold(0.0f32, f32::max);
    Ok(a)
}

/// Elementwise `t = exp(-beta * d)`. Depth must be normalized to `[0, 1]`.
pub fn transmittance(depth: &DepthMap, beta: f32) -> Result<TransmittanceMap> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Parameter(format!(
            "extinction coefficient must be finite and >= 0, got {beta}"
        )));
    }
    if !depth.is_normalized() {
        return Err(Error::Parameter(
            "transmittance requires depth normalized to [0, 1]".into(),
        ));
    }
    let values = depth.values().iter().map(|d| (-beta * d).exp()).collect();
    Ok(TransmittanceMap {
        width: depth.width(),
        height: depth.height(),
        values,
    })
}

/// Blends scene radiance with airlight: `I = J * t + A * (1 - t)` per
/// channel, clamped to `[0, 1]` to absorb float rounding.
pub fn compose_fog(
    clear: &FloatImage,
    t: &TransmittanceMap,
    atmospheric_light: f32,
) -> Result<FloatImage> {
    if !(0.0..=1.0).contains(&atmospheric_light) {
        return Err(Error::Parameter(format!(
            "atmospheric light must lie in [0, 1], got {atmospheric_light}"
        )));
    }
    if clear.width() != t.width || clear.height() != t.height {
        return Err(Error::UnmatchedShape(format!(
            "image {}x{} vs transmittance {}x{}",
            clear.width(),
            clear.height(),
            t.width,
            t.height
        )));
    }
    let mut data = Vec::with_capacity(clear.data().len());
    for (pixel, &ti) in clear.data().chunks_exact(3).zip(&t.values) {
        let airlight = atmospheric_light * (1.0 - ti);
        for &c in pixel {
            data.push((c * ti + airlight).clamp(0.0, 1.0));
        }
    }
    Ok(FloatImage::from_raw(clear.width(), clear.height(), data)
        .expect("composed samples are clamped"))
}

/// One fogged image plus the atmospheric light used to render it.
#[derive(Debug, Clone)]
pub struct FogRender {
    pub image: FloatImage,
    pub atmospheric_light: f32,
}

/// Full single-image pipeline: normalize depth if needed, estimate `A`
/// unless overridden, compute transmittance, compose.
pub fn synthesize(clear: &FloatImage, depth: &DepthMap, params: &FogParams) -> Result<FogRender> {
    params.validate()?;
    if clear.width() != depth.width() || clear.height() != depth.height() {
        return Err(Error::UnmatchedShape(format!(
            "image {}x{} vs depth {}x{}",
            clear.width(),
            clear.height(),
            depth.width(),
            depth.height()
        )));
    }
    let normalized;
    let depth = if depth.is_normalized() {
        depth
    } else {
        normalized = depth::normalize_depth(depth);
        &normalized
    };
    let a = match params.atmospheric_light {
        Some(a) => a,
        None => {
            let dark = dark_channel(clear, params.dc_window)?;
            estimate_atmospheric_light(clear, &dark, params.bright_percentile)?
        }
    };
    let t = transmittance(depth, params.beta)?;
    Ok(FogRender {
        image: compose_fog(clear, &t, a)?,
        atmospheric_light: a,
    })
}

/// Where per-image depth comes from during a batch run.
#[derive(Debug, Clone)]
pub enum DepthSource {
    /// Depth files sharing the image stem in a parallel tree
    /// (`<root>/<rel>/<stem>.png` or `.pfm`), with an optional synthetic
    /// fallback for images lacking a file.
    Files {
        root: PathBuf,
        fallback: Option<GroundPlaneModel>,
    },
    /// Ground-plane depth synthesized for every image.
    Synthetic(GroundPlaneModel),
}

impl DepthSource {
    fn resolve(&self, rel: &Path, width: u32, height: u32) -> Result<DepthMap> {
        match self {
            DepthSource::Synthetic(model) => depth::synth_ground_plane_depth(width, height, model),
            DepthSource::Files { root, fallback } => {
                for ext in ["png", "pfm"] {
                    let candidate = root.join(rel).with_extension(ext);
                    if candidate.is_file() {
                        let map = depth::load_depth(&candidate)?;
                        if map.width() != width || map.height() != height {
                            return Err(Error::DepthIngest {
                                path: candidate,
                                message: format!(
                                    "depth is {}x{} but image is {width}x{height}",
                                    map.width(),
                                    map.height()
                                ),
                            });
                        }
                        return Ok(map);
                    }
                }
                match fallback {
                    Some(model) => depth::synth_ground_plane_depth(width, height, model),
                    None => Err(Error::DepthIngest {
                        path: root.join(rel),
                        message: "no depth file found and no synthetic fallback enabled".into(),
                    }),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchStatus {
    Ok,
    Failed,
}

/// One line of the batch report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FogRecord {
    pub path: String,
    pub status: BatchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atmospheric_light: Option<f32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FogBatchSummary {
    /// Per-image records in input (sorted path) order.
    pub records: Vec<FogRecord>,
    pub succeeded: usize,
    pub failed: usize,
}

/// Lists the images under `root` (PNG/JPEG), sorted by relative path.
pub fn list_images(root: &Path) -> Result<Vec<PathBuf>> {
    let mut rels = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e
                .path()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| root.into());
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let is_image = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"));
        if is_image {
            rels.push(
                entry
                    .path()
                    .strip_prefix(root)
                    .expect("walkdir yields paths under root")
                    .to_path_buf(),
            );
        }
    }
    rels.sort();
    Ok(rels)
}

/// Fogs every image under `input_dir`, writing one output per input at the
/// same relative path and filename. Unreadable images or unresolvable depth
/// are recorded as per-file failures; the batch continues.
pub fn fog_batch(
    input_dir: &Path,
    out_dir: &Path,
    params: &FogParams,
    depth_source: &DepthSource,
) -> Result<FogBatchSummary> {
    params.validate()?;
    let rels = list_images(input_dir)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for rel in &rels {
        if let Some(parent) = rel.parent() {
            let dir = out_dir.join(parent);
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    let records: Vec<FogRecord> = rels
        .par_iter()
        .map(|rel| {
            let rel_str = rel.to_string_lossy().replace('\\', "/");
            match fog_one(input_dir, out_dir, rel, params, depth_source) {
                Ok(a) => FogRecord {
                    path: rel_str,
                    status: BatchStatus::Ok,
                    atmospheric_light: Some(a),
                    error: None,
                },
                Err(e) => FogRecord {
                    path: rel_str,
                    status: BatchStatus::Failed,
                    atmospheric_light: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let failed = records
        .iter()
        .filter(|r| r.status == BatchStatus::Failed)
        .count();
    Ok(FogBatchSummary {
        succeeded: records.len() - failed,
        failed,
        records,
    })
}

fn fog_one(
    input_dir: &Path,
    out_dir: &Path,
    rel: &Path,
    params: &FogParams,
    depth_source: &DepthSource,
) -> Result<f32> {
    let clear = FloatImage::open(&input_dir.join(rel))?;
    let depth = depth_source.resolve(rel, clear.width(), clear.height())?;
    let render = synthesize(&clear, &depth, params)?;
    render.image.save(&out_dir.join(rel))?;
    Ok(render.atmospheric_light)
}
