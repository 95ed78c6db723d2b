use serde_json::json;

use lanefog_core::annot::read_tusimple_file;
use lanefog_core::dataset::Manifest;
use lanefog_core::metrics::{culane_f1, tusimple_eval, CulaneConfig, TusimpleConfig};

use crate::util::{
    parse_grid, parse_size, parse_thresholds, require_dir, require_file, validate,
    write_jsonl_report, CliResult,
};
use crate::{EvalCulaneArgs, EvalTusimpleArgs};

pub fn run_culane(args: &EvalCulaneArgs) -> CliResult<u8> {
    require_dir(&args.pred, "--pred")?;
    require_dir(&args.gt, "--gt")?;
    require_file(&args.list, "--list")?;
    let (image_width, image_height) = parse_size(&args.image_size)?;
    let cfg = CulaneConfig {
        image_width,
        image_height,
        line_width: args.width,
        thresholds: parse_thresholds(&args.thresholds)?,
        mf1_grid: parse_grid(&args.mf1_grid)?,
    };
    validate(cfg.validate())?;
    let scenes = match &args.scene_manifest {
        Some(path) => {
            require_file(path, "--scene-manifest")?;
            Some(Manifest::read_file(path)?.scene_index())
        }
        None => None,
    };

    let eval = culane_f1(&args.pred, &args.gt, &args.list, &cfg, scenes.as_ref())?;

    println!(
        "{:>6}  {:>9}  {:>9}  {:>9}",
        "tau", "precision", "recall", "f1"
    );
    for s in &eval.report.thresholds {
        println!(
            "{:>6.2}  {:>9.4}  {:>9.4}  {:>9.4}",
            s.tau, s.precision, s.recall, s.f1
        );
    }
    println!(
        "{:>6}  {:>9}  {:>9}  {:>9.4}",
        "mF1", "", "", eval.report.mf1
    );
    if !eval.per_scene.is_empty() {
        println!();
        println!("{:>10}  {:>9}  {:>9}", "scene", "F1", "mF1");
        for (scene, report) in &eval.per_scene {
            println!(
                "{:>10}  {:>9.4}  {:>9.4}",
                scene.name(),
                report.thresholds[0].f1,
                report.mf1
            );
        }
    }
    if eval.missing_predictions > 0 {
        eprintln!(
            "warning: {} image(s) had no readable prediction (scored as zero lanes)",
            eval.missing_predictions
        );
    }

    let mut lines: Vec<serde_json::Value> = eval
        .report
        .thresholds
        .iter()
        .map(|s| {
            let mut v = serde_json::to_value(s).expect("score serializes");
            v["type"] = "threshold".into();
            v
        })
        .collect();
    lines.push(json!({
        "type": "summary",
        "mf1": eval.report.mf1,
        "images": eval.images,
        "missing_predictions": eval.missing_predictions,
    }));
    for (scene, report) in &eval.per_scene {
        lines.push(json!({
            "type": "scene",
            "scene": scene.name(),
            "f1": report.thresholds[0].f1,
            "mf1": report.mf1,
        }));
    }
    write_jsonl_report(&args.report, &lines)?;
    Ok(0)
}

pub fn run_tusimple(args: &EvalTusimpleArgs) -> CliResult<u8> {
    require_file(&args.pred, "--pred")?;
    require_file(&args.gt, "--gt")?;
    let cfg = TusimpleConfig {
        pixel_tolerance: args.tol,
        match_ratio: args.ratio,
    };
    validate(cfg.validate())?;

    let pred = read_tusimple_file(&args.pred)?;
    let gt = read_tusimple_file(&args.gt)?;
    let report = tusimple_eval(&pred, &gt, &cfg)?;

    println!(
        "{:>9}  {:>9}  {:>9}  {:>9}",
        "accuracy", "fp_rate", "fn_rate", "f1"
    );
    println!(
        "{:>9.4}  {:>9.4}  {:>9.4}  {:>9.4}",
        report.accuracy, report.fp_rate, report.fn_rate, report.f1
    );

    let line = serde_json::to_value(&report).expect("report serializes");
    write_jsonl_report(&args.report, &[line])?;
    Ok(0)
}
