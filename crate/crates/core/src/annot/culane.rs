//! CULane-style sidecar text: one lane per line, whitespace-separated
//! `x y` pairs, bottom of the image first.

use crate::error::{Error, Result};

use super::{Lane, LaneSet};

/// Parse result: the lane set plus how many degenerate lanes (fewer than two
/// usable points) were dropped.
#[derive(Debug, Clone)]
pub struct CulaneParse {
    pub set: LaneSet,
    pub dropped_lanes: usize,
}

/// Parses sidecar text. Points are re-sorted y-ascending; duplicate-y points
/// keep the first occurrence; lanes left with fewer than two points are
/// dropped and counted rather than failing the file.
pub fn parse_culane(text: &str, image_width: u32, image_height: u32) -> Result<CulaneParse> {
    let mut lanes = Vec::new();
    let mut dropped = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !tokens.len().is_multiple_of(2) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("odd coordinate count ({})", tokens.len()),
            });
        }
        let mut points = Vec::with_capacity(tokens.len() / 2);
        for pair in tokens.chunks_exact(2) {
            let x: f64 = parse_number(pair[0], line_no)?;
            let y: f64 = parse_number(pair[1], line_no)?;
            points.push((x, y));
        }
        points.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite coordinates"));
        points.dedup_by(|a, b| a.1 == b.1);
        if points.len() < 2 {
            dropped += 1;
            continue;
        }
        lanes.push(Lane::new(points).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?);
    }
    let set = LaneSet::new(image_width, image_height, lanes)?;
    Ok(CulaneParse {
        set,
        dropped_lanes: dropped,
    })
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("non-numeric token {token:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite coordinate {token:?}"),
        });
    }
    Ok(v)
}

/// Serializes one lane per line, y-descending (bottom of image first), with
/// up to five decimal places per coordinate.
pub fn write_culane(set: &LaneSet) -> String {
    let mut out = String::new();
    for lane in set.lanes() {
        let mut first = true;
        for &(x, y) in lane.points().iter().rev() {
            if !first {
                out.push(' ');
            }
            out.push_str(&format_coord(x));
            out.push(' ');
            out.push_str(&format_coord(y));
            first = false;
        }
        out.push('\n');
    }
    out
}

fn format_coord(v: f64) -> String {
    let s = format!("{v:.5}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() || trimmed == "-" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_native_order_and_sorts_ascending() {
        let parsed = parse_culane("100.5 590 120.3 580\n", 1640, 590).unwrap();
        assert_eq!(parsed.set.len(), 1);
        assert_eq!(
            parsed.set.lanes()[0].points(),
            &[(120.3, 580.0), (100.5, 590.0)]
        );
        assert_eq!(parsed.dropped_lanes, 0);
    }

    #[test]
    fn empty_input_yields_empty_set() {
        let parsed = parse_culane("", 1640, 590).unwrap();
        assert!(parsed.set.is_empty());
        let parsed = parse_culane("\n  \n", 1640, 590).unwrap();
        assert!(parsed.set.is_empty());
    }

    #[test]
    fn odd_token_count_names_the_line() {
        let err = parse_culane("10 20 30 40\n100 590 120\n", 1640, 590).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_token_names_the_line() {
        let err = parse_culane("10 twenty 30 40\n", 1640, 590).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_point_lanes_are_dropped_with_a_count() {
        let parsed = parse_culane("10 20\n30 40 50 60\n", 1640, 590).unwrap();
        assert_eq!(parsed.set.len(), 1);
        assert_eq!(parsed.dropped_lanes, 1);
    }

    #[test]
    fn writes_bottom_first_with_trimmed_decimals() {
        let set = LaneSet::new(
            1640,
            590,
            vec![Lane::new(vec![(120.3, 580.0), (100.5, 590.0)]).unwrap()],
        )
        .unwrap();
        assert_eq!(write_culane(&set), "100.5 590 120.3 580\n");
    }

    #[test]
    fn empty_set_writes_empty_output() {
        let set = LaneSet::new(1640, 590, vec![]).unwrap();
        assert_eq!(write_culane(&set), "");
    }

    #[test]
    fn two_point_lane_writes_four_numerals() {
        let set = LaneSet::new(
            1640,
            590,
            vec![Lane::new(vec![(1.0, 2.0), (3.0, 4.0)]).unwrap()],
        )
        .unwrap();
        let out = write_culane(&set);
        assert_eq!(out.lines().count(), 1);
        assert_eq!(out.split_whitespace().count(), 4);
    }

    prop_compose! {
        fn arb_lane(width: u32, height: u32)(
            n in 2usize..12,
            x0 in -0.2f64..1.1,
            slope in -0.3f64..0.3,
            y_start in 0.0f64..0.4,
        ) -> Lane {
            let w = width as f64;
            let h = height as f64;
            let points: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    let y = (y_start + t * (1.0 - y_start)) * h;
                    let x = ((x0 + slope * t) * w).clamp(-w, 2.0 * w);
                    (x, y)
                })
                .collect();
            Lane::new(points).expect("generated lanes are monotone")
        }
    }

    prop_compose! {
        fn arb_lane_set()(
            lanes in proptest::collection::vec(arb_lane(1640, 590), 0..=8),
        ) -> LaneSet {
            LaneSet::new(1640, 590, lanes).expect("generated sets are valid")
        }
    }

    proptest! {
        /// write/parse are inverse within the serializer's 5-decimal
        /// precision.
        #[test]
        fn round_trip_within_tolerance(set in arb_lane_set()) {
            let text = write_culane(&set);
            let parsed = parse_culane(&text, 1640, 590).unwrap();
            prop_assert_eq!(parsed.dropped_lanes, 0);
            prop_assert_eq!(parsed.set.len(), set.len());
            for (a, b) in parsed.set.lanes().iter().zip(set.lanes()) {
                prop_assert_eq!(a.points().len(), b.points().len());
                for (p, q) in a.points().iter().zip(b.points()) {
                    prop_assert!((p.0 - q.0).abs() <= 1e-4, "{} vs {}", p.0, q.0);
                    prop_assert!((p.1 - q.1).abs() <= 1e-4, "{} vs {}", p.1, q.1);
                }
            }
        }
    }
}
