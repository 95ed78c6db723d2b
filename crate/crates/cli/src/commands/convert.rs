use std::path::{Path, PathBuf};

use lanefog_core::annot::{
    lane_set_from_record, parse_culane, read_tusimple_file, record_from_lane_set, write_culane,
    write_tusimple,
};

use crate::util::{parse_rows, parse_size, require_dir, require_file, usage, CliResult};
use crate::{ConvertArgs, FormatArg};

pub fn run(args: &ConvertArgs) -> CliResult<u8> {
    let (width, height) = parse_size(&args.image_size)?;
    let rows = match &args.h_samples {
        Some(grid) => Some(parse_rows(grid)?),
        None => None,
    };
    if args.to == FormatArg::Tusimple && rows.is_none() {
        return Err(usage("converting to tusimple requires --h-samples"));
    }
    match (args.from, args.to) {
        (FormatArg::Culane, _) => {
            require_dir(&args.input, "--input")?;
            let list = args
                .list
                .as_ref()
                .ok_or_else(|| usage("a culane source requires --list"))?;
            require_file(list, "--list")?;
            convert_from_culane(args, width, height, rows.as_deref(), list)
        }
        (FormatArg::Tusimple, _) => {
            require_file(&args.input, "--input")?;
            convert_from_tusimple(args, width, height, rows.as_deref())
        }
    }
}

fn sidecar(root: &Path, rel: &str) -> PathBuf {
    let mut path = root.join(rel.trim_start_matches('/'));
    if !rel.ends_with(".lines.txt") {
        path.set_extension("lines.txt");
    }
    path
}

fn convert_from_culane(
    args: &ConvertArgs,
    width: u32,
    height: u32,
    rows: Option<&[u32]>,
    list: &Path,
) -> CliResult<u8> {
    let entries = std::fs::read_to_string(list)?;
    let mut out_lines = String::new();
    let mut converted = 0usize;
    let mut dropped = 0usize;
    for rel in entries.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let rel = rel.trim_start_matches('/');
        let path = sidecar(&args.input, rel);
        let text = std::fs::read_to_string(&path)?;
        let parsed = parse_culane(&text, width, height)?;
        dropped += parsed.dropped_lanes;
        match args.to {
            FormatArg::Tusimple => {
                let record =
                    record_from_lane_set(&parsed.set, rows.expect("checked by caller"), rel)?;
                out_lines.push_str(&write_tusimple(&record));
                out_lines.push('\n');
            }
            FormatArg::Culane => {
                let out_path = sidecar(&args.out, rel);
                std::fs::create_dir_all(out_path.parent().expect("sidecar has a parent"))?;
                std::fs::write(out_path, write_culane(&parsed.set))?;
            }
        }
        converted += 1;
    }
    if args.to == FormatArg::Tusimple {
        if let Some(parent) = args.out.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&args.out, out_lines)?;
    }
    finish(converted, dropped);
    Ok(0)
}

fn convert_from_tusimple(
    args: &ConvertArgs,
    width: u32,
    height: u32,
    rows: Option<&[u32]>,
) -> CliResult<u8> {
    let records = read_tusimple_file(&args.input)?;
    let mut out_lines = String::new();
    let mut converted = 0usize;
    let mut dropped = 0usize;
    for record in &records {
        let (set, skipped) = lane_set_from_record(record, width, height)?;
        dropped += skipped;
        match args.to {
            FormatArg::Culane => {
                let out_path = sidecar(&args.out, &record.raw_file);
                std::fs::create_dir_all(out_path.parent().expect("sidecar has a parent"))?;
                std::fs::write(out_path, write_culane(&set))?;
            }
            FormatArg::Tusimple => {
                let rerecord =
                    record_from_lane_set(&set, rows.expect("checked by caller"), &record.raw_file)?;
                out_lines.push_str(&write_tusimple(&rerecord));
                out_lines.push('\n');
            }
        }
        converted += 1;
    }
    if args.to == FormatArg::Tusimple {
        if let Some(parent) = args.out.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&args.out, out_lines)?;
    }
    finish(converted, dropped);
    Ok(0)
}

fn finish(converted: usize, dropped: usize) {
    if dropped > 0 {
        eprintln!("converted {converted} annotation set(s); dropped {dropped} degenerate lane(s)");
    } else {
        eprintln!("converted {converted} annotation set(s)");
    }
}
