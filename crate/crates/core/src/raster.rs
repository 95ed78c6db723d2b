//! Polyline stroke rasterization with round caps and joins.
//!
//! A stroked polyline is the union of capsules (segment dilated by a disk of
//! radius `width / 2`). Each capsule is convex, so its intersection with a
//! pixel row is a single interval; rows are filled from the exact interval
//! bounds instead of per-pixel distance tests.
//!
//! Pixels are sampled at integer coordinates. A row interval `[xl, xr]` fills
//! the half-open pixel range `xl <= x < xr`, so strokes whose boundaries abut
//! tile without overlap and a stroke of width `w` over a vertical line covers
//! exactly `w` columns. No anti-aliasing.

use crate::mask::BitMask;

/// Strokes `points` onto `mask` with the given width in pixels.
///
/// Coordinates are continuous image coordinates; geometry outside the mask is
/// clipped. Width below 1 draws nothing useful but is accepted; callers
/// validate their own minimums.
pub fn stroke_polyline(mask: &mut BitMask, points: &[(f64, f64)], width: f64) {
    let r = width / 2.0;
    if points.is_empty() || r.is_nan() || r <= 0.0 {
        return;
    }
    if points.len() == 1 {
        stroke_capsule(mask, points[0], points[0], r);
        return;
    }
    for seg in points.windows(2) {
        stroke_capsule(mask, seg[0], seg[1], r);
    }
}

/// Fills the capsule around segment `p0..p1` with radius `r`.
fn stroke_capsule(mask: &mut BitMask, p0: (f64, f64), p1: (f64, f64), r: f64) {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let y_lo = ((p0.1.min(p1.1) - r).ceil() as i64).max(0);
    let y_hi = ((p0.1.max(p1.1) + r).floor() as i64).min(h - 1);

    let dx = p1.0 - p0.0;
    let dy = p1.1 - p0.1;
    let len_sq = dx * dx + dy * dy;
    let len = len_sq.sqrt();

    for y in y_lo..=y_hi {
        let yc = y as f64;
        let mut xl = f64::INFINITY;
        let mut xr = f64::NEG_INFINITY;

        // End-cap disks.
        for &(cx, cy) in &[p0, p1] {
            let dyc = yc - cy;
            if dyc.abs() <= r {
                let s = (r * r - dyc * dyc).sqrt();
                xl = xl.min(cx - s);
                xr = xr.max(cx + s);
            }
        }

        // Segment body: perpendicular band intersected with the projection
        // range t in [0, 1].
        if len_sq > 0.0 {
            let band = if dy != 0.0 {
                let base = p0.0 + (yc - p0.1) * dx / dy;
                let half = (r * len / dy).abs();
                Some((base - half, base + half))
            } else if (yc - p0.1).abs() <= r {
                Some((f64::NEG_INFINITY, f64::INFINITY))
            } else {
                None
            };
            let proj = if dx != 0.0 {
                let a = p0.0 - (yc - p0.1) * dy / dx;
                let b = a + len_sq / dx;
                Some((a.min(b), a.max(b)))
            } else {
                let t = (yc - p0.1) * dy / len_sq;
                if (0.0..=1.0).contains(&t) {
                    Some((f64::NEG_INFINITY, f64::INFINITY))
                } else {
                    None
                }
            };
            if let (Some((b0, b1)), Some((q0, q1))) = (band, proj) {
                let lo = b0.max(q0);
                let hi = b1.min(q1);
                if lo <= hi {
                    xl = xl.min(lo);
                    xr = xr.max(hi);
                }
            }
        }

        if xl > xr {
            continue;
        }
        // Half-open fill: xl <= x < xr.
        let first = (xl.ceil() as i64).max(0);
        let last = ((xr.ceil() - 1.0) as i64).min(w - 1);
        if first <= last {
            mask.fill_row_span(y as u32, first as u32, last as u32);
        }
    }
}
