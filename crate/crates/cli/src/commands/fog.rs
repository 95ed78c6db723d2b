use lanefog_core::depth::GroundPlaneModel;
use lanefog_core::fog::{fog_batch, BatchStatus, DepthSource, FogParams};

use crate::util::{require_dir, usage, validate, write_jsonl_report, CliResult};
use crate::FogArgs;

pub fn run(args: &FogArgs) -> CliResult<u8> {
    require_dir(&args.input, "--input")?;
    let params = FogParams {
        beta: args.beta,
        atmospheric_light: args.atmospheric_light,
        dc_window: args.dc_window,
        bright_percentile: args.bright_percentile,
    };
    validate(params.validate())?;

    let ground_plane = if args.synthetic_depth {
        let horizon = args
            .horizon
            .ok_or_else(|| usage("--synthetic-depth requires --horizon"))?;
        Some(validate(GroundPlaneModel::new(
            horizon,
            args.gp_scale,
            args.gp_dmin,
            args.gp_dmax,
        ))?)
    } else {
        None
    };
    let depth_source = match (&args.depth_dir, ground_plane) {
        (Some(root), fallback) => {
            require_dir(root, "--depth-dir")?;
            DepthSource::Files {
                root: root.clone(),
                fallback,
            }
        }
        (None, Some(model)) => DepthSource::Synthetic(model),
        (None, None) => {
            return Err(usage(
                "choose a depth source: --depth-dir and/or --synthetic-depth",
            ))
        }
    };

    let summary = fog_batch(&args.input, &args.out, &params, &depth_source)?;

    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out.join("fog_report.jsonl"));
    let lines: Vec<serde_json::Value> = summary
        .records
        .iter()
        .map(|r| serde_json::to_value(r).expect("record serializes"))
        .collect();
    write_jsonl_report(&report_path, &lines)?;

    eprintln!(
        "fogged {} image(s), {} failure(s); report at {}",
        summary.succeeded,
        summary.failed,
        report_path.display()
    );
    for record in summary
        .records
        .iter()
        .filter(|r| r.status == BatchStatus::Failed)
    {
        eprintln!(
            "  failed: {} ({})",
            record.path,
            record.error.as_deref().unwrap_or("?")
        );
    }
    Ok(if summary.failed > 0 { 1 } else { 0 })
}
