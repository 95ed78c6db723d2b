//! Lane annotations and the two wire formats they travel in.
//!
//! Lanes are stored y-ascending internally regardless of the file order;
//! serializers own their own ordering conventions. Sub-pixel coordinates are
//! kept as `f64` throughout.

mod culane;
mod tusimple;

pub use culane::{parse_culane, write_culane, CulaneParse};
pub use tusimple::{
    lane_set_from_record, parse_tusimple, read_tusimple_file, record_from_lane_set, write_tusimple,
    TusimpleParse, TusimpleRecord,
};

use crate::error::{Error, Result};

/// Sentinel marking "no point at this row" in row-sampled lane encodings.
pub const NO_POINT: f64 = -2.0;

/// Ordered lane polyline with strictly increasing y.
#[derive(Debug, Clone, PartialEq)]
pub struct Lane {
    points: Vec<(f64, f64)>,
}

impl Lane {
    /// Validates at least two points and strict y-monotonicity.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Parameter(format!(
                "a lane needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Parameter("lane coordinates must be finite".into()));
        }
        if points.windows(2).any(|w| w[0].1 >= w[1].1) {
            return Err(Error::Parameter(
                "lane points must have strictly increasing y".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Inclusive y extent.
    pub fn y_span(&self) -> (f64, f64) {
        (self.points[0].1, self.points[self.points.len() - 1].1)
    }

    /// Linear interpolation of x at the given row; `None` outside the lane's
    /// y-span (no extrapolation).
    pub fn x_at(&self, y: f64) -> Option<f64> {
        let pts = &self.points;
        let (y_min, y_max) = self.y_span();
        if y < y_min || y > y_max {
            return None;
        }
        let c = pts.partition_point(|p| p.1 <= y);
        if c == pts.len() {
            return Some(pts[c - 1].0);
        }
        let (x0, y0) = pts[c - 1];
        let (x1, y1) = pts[c];
        Some(x0 + (y - y0) / (y1 - y0) * (x1 - x0))
    }
}

/// Per-image annotation: image dimensions plus up to 8 lanes.
#[derive(Debug, Clone, PartialEq)]
pub struct LaneSet {
    image_width: u32,
    image_height: u32,
    lanes: Vec<Lane>,
}

impl LaneSet {
    pub const MAX_LANES: usize = 8;

    /// Validates the lane count and that x stays within
    /// `[-width, 2 * width]` (slight out-of-frame extrapolation is fine).
    pub fn new(image_width: u32, image_height: u32, lanes: Vec<Lane>) -> Result<Self> {
        if image_width == 0 || image_height == 0 {
            return Err(Error::Parameter(
                "annotation image dimensions must be at least 1x1".into(),
            ));
        }
        if lanes.len() > Self::MAX_LANES {
            return Err(Error::Parameter(format!(
                "at most {} lanes per image, got {}",
                Self::MAX_LANES,
                lanes.len()
            )));
        }
        let (lo, hi) = (-(image_width as f64), 2.0 * image_width as f64);
        for (i, lane) in lanes.iter().enumerate() {
            if lane.points.iter().any(|&(x, _)| x < lo || x > hi) {
                return Err(Error::Parameter(format!(
                    "lane {i} has x outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            image_width,
            image_height,
            lanes,
        })
    }

    pub fn image_width(&self) -> u32 {
        self.image_width
    }

    pub fn image_height(&self) -> u32 {
        self.image_height
    }

    pub fn lanes(&self) -> &[Lane] {
        &self.lanes
    }

    pub fn is_empty(&self) -> bool {
        self.lanes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.lanes.len()
    }
}

/// Samples a lane at the requested rows by linear interpolation. Rows
/// outside the lane's y-span yield [`NO_POINT`].
pub fn resample_at_rows(lane: &Lane, rows: &[u32]) -> Vec<f64> {
    debug_assert!(rows.windows(2).all(|w| w[0] < w[1]), "rows must ascend");
    rows.iter()
        .map(|&row| lane.x_at(row as f64).unwrap_or(NO_POINT))
        .collect()
}

/// Rescales annotations to a new resolution with independent x and y
/// factors (anisotropic, matching aspect-changing dataset resizes).
pub fn rescale(set: &LaneSet, new_width: u32, new_height: u32) -> Result<LaneSet> {
    if new_width == 0 || new_height == 0 {
        return Err(Error::Parameter(
            "target dimensions must be at least 1x1".into(),
        ));
    }
    let fx = new_width as f64 / set.image_width as f64;
    let fy = new_height as f64 / set.image_height as f64;
    let lanes = set
        .lanes
        .iter()
        .map(|lane| Lane::new(lane.points.iter().map(|&(x, y)| (x * fx, y * fy)).collect()))
        .collect::<Result<Vec<_>>>()?;
    LaneSet::new(new_width, new_height, lanes)
}

/// Serialization target for [`convert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneFormat {
    Culane,
    Tusimple,
}

/// Serializes a lane set into the target format. The Tusimple target
/// resamples lanes onto `h_samples` and requires both the row grid and the
/// record's image path.
pub fn convert(
    set: &LaneSet,
    target: LaneFormat,
    h_samples: Option<&[u32]>,
    raw_file: &str,
) -> Result<String> {
    match target {
        LaneFormat::Culane => Ok(write_culane(set)),
        LaneFormat::Tusimple => {
            let rows = h_samples.ok_or_else(|| {
                Error::Parameter("converting to tusimple requires h_samples".into())
            })?;
            let record = record_from_lane_set(set, rows, raw_file)?;
            Ok(write_tusimple(&record))
        }
    }
}
