use lanefog_core::dataset::{
    build_manifest, resize_dataset, sample_frames, split_dataset, Manifest, SceneMap,
};
use lanefog_core::fog::{list_images, BatchStatus};

use crate::util::{
    parse_ratio, parse_size, require_dir, require_file, usage, validate, write_jsonl_report,
    CliResult,
};
use crate::{ManifestArgs, ResizeArgs, SampleArgs, SplitArgs};

pub fn run_sample(args: &SampleArgs) -> CliResult<u8> {
    if args.interval < 1 {
        return Err(usage("--interval must be at least 1"));
    }
    let frames: Vec<String> = if args.input.is_dir() {
        list_images(&args.input)?
            .into_iter()
            .map(|rel| rel.to_string_lossy().replace('\\', "/"))
            .collect()
    } else if args.input.is_file() {
        std::fs::read_to_string(&args.input)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect()
    } else {
        return Err(usage(format!(
            "--input {} is neither a directory nor a list file",
            args.input.display()
        )));
    };
    let selected = validate(sample_frames(&frames, args.interval))?;
    eprintln!("kept {} of {} frame(s)", selected.len(), frames.len());
    let mut text = selected.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

pub fn run_resize(args: &ResizeArgs) -> CliResult<u8> {
    require_dir(&args.input, "--input")?;
    let (w, h) = parse_size(&args.to)?;
    let summary = resize_dataset(&args.input, &args.out, w, h, args.with_annotations)?;

    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out.join("resize_report.jsonl"));
    let lines: Vec<serde_json::Value> = summary
        .records
        .iter()
        .map(|r| serde_json::to_value(r).expect("record serializes"))
        .collect();
    write_jsonl_report(&report_path, &lines)?;

    eprintln!(
        "resized {} image(s) to {w}x{h}, {} failure(s); report at {}",
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

pub fn run_split(args: &SplitArgs) -> CliResult<u8> {
    require_file(&args.manifest, "--manifest")?;
    let (ratio_train, ratio_test) = parse_ratio(&args.ratio)?;
    let manifest = Manifest::read_file(&args.manifest)?;
    let (train, test) = validate(split_dataset(&manifest, ratio_train, ratio_test, args.seed))?;
    std::fs::create_dir_all(&args.out_dir)?;
    train.write_file(&args.out_dir.join("train.txt"))?;
    test.write_file(&args.out_dir.join("test.txt"))?;
    eprintln!(
        "split {} entries into {} train / {} test (ratio {ratio_train}:{ratio_test}, seed {})",
        manifest.len(),
        train.len(),
        test.len(),
        args.seed
    );
    Ok(0)
}

pub fn run_manifest(args: &ManifestArgs) -> CliResult<u8> {
    require_dir(&args.root, "--root")?;
    let scene_map = match &args.scene_map {
        Some(path) => {
            require_file(path, "--scene-map")?;
            let map = SceneMap::read_file(path)?;
            if map.duplicates > 0 {
                eprintln!(
                    "warning: {} duplicate path(s) in the scene map; last assignment wins",
                    map.duplicates
                );
            }
            Some(map)
        }
        None => None,
    };
    let manifest = build_manifest(&args.root, scene_map.as_ref())?;
    if let Some(parent) = args.out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    manifest.write_file(&args.out)?;
    eprintln!(
        "wrote {} entr{} to {}",
        manifest.len(),
        if manifest.len() == 1 { "y" } else { "ies" },
        args.out.display()
    );
    Ok(0)
}
