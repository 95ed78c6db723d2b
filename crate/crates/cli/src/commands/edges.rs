use std::path::Path;

use rayon::prelude::*;
use serde_json::json;

use lanefog_core::annot::parse_culane;
use lanefog_core::edges::{
    canny, downsample_label, merge_edge_label, render_lane_strokes, CannyParams,
};
use lanefog_core::fog::list_images;
use lanefog_core::image::FloatImage;
use lanefog_core::{LaneSet, Result as CoreResult};

use crate::util::{require_dir, validate, write_jsonl_report, CliResult};
use crate::EdgesArgs;

pub fn run(args: &EdgesArgs) -> CliResult<u8> {
    require_dir(&args.input, "--input")?;
    require_dir(&args.labels, "--labels")?;
    let params = CannyParams {
        gaussian_sigma: args.sigma,
        low_threshold: args.low,
        high_threshold: args.high,
    };
    validate(params.validate())?;
    if args.stroke == 0 || args.downsample == 0 {
        return Err(crate::util::usage("--stroke and --downsample must be >= 1"));
    }

    let rels = list_images(&args.input)?;
    std::fs::create_dir_all(&args.out)?;
    for rel in &rels {
        if let Some(parent) = rel.parent() {
            std::fs::create_dir_all(args.out.join(parent))?;
        }
    }

    let records: Vec<serde_json::Value> = rels
        .par_iter()
        .map(|rel| {
            let rel_str = rel.to_string_lossy().replace('\\', "/");
            match label_one(args, &params, rel) {
                Ok(labels_found) => json!({
                    "path": rel_str,
                    "status": "ok",
                    "labels_found": labels_found,
                }),
                Err(e) => json!({
                    "path": rel_str,
                    "status": "failed",
                    "error": e.to_string(),
                }),
            }
        })
        .collect();

    let failed = records.iter().filter(|r| r["status"] == "failed").count();
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out.join("edges_report.jsonl"));
    write_jsonl_report(&report_path, &records)?;
    eprintln!(
        "labeled {} image(s), {} failure(s); report at {}",
        records.len() - failed,
        failed,
        report_path.display()
    );
    Ok(if failed > 0 { 1 } else { 0 })
}

/// Returns whether a lane-label sidecar was found.
fn label_one(args: &EdgesArgs, params: &CannyParams, rel: &Path) -> CoreResult<bool> {
    let img = FloatImage::open(&args.input.join(rel))?;
    let detector = canny(&img, params)?;

    let mut sidecar = args.labels.join(rel);
    sidecar.set_extension("lines.txt");
    let (strokes, labels_found) = match std::fs::read_to_string(&sidecar) {
        Ok(text) => {
            let set = parse_culane(&text, img.width(), img.height())?.set;
            (render_lane_strokes(&set, args.stroke)?, true)
        }
        Err(_) => {
            let empty = LaneSet::new(img.width(), img.height(), vec![])?;
            (render_lane_strokes(&empty, args.stroke)?, false)
        }
    };

    let merged = merge_edge_label(&detector, &strokes)?;
    let label = downsample_label(&merged, args.downsample)?;
    let mut out_path = args.out.join(rel);
    out_path.set_extension("png");
    label.save_png(&out_path)?;
    Ok(labels_found)
}
