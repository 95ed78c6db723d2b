//! Shared CLI plumbing: error classification, flag parsing, report output.

use std::fmt::Display;
use std::path::Path;

/// Failures split by exit code: usage errors (2) vs runtime errors (1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<lanefog_core::Error> for CliError {
    fn from(e: lanefog_core::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(message: impl Display) -> CliError {
    CliError::Usage(message.to_string())
}

/// Maps validation-phase core errors to usage errors; paths and parameters
/// are checked before any work begins.
pub fn validate<T>(r: Result<T, lanefog_core::Error>) -> CliResult<T> {
    r.map_err(usage)
}

pub fn require_dir(path: &Path, what: &str) -> CliResult<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(usage(format!(
            "{what} {} is not a directory",
            path.display()
        )))
    }
}

pub fn require_file(path: &Path, what: &str) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{what} {} is not a file", path.display())))
    }
}

/// Parses `WIDTHxHEIGHT`.
pub fn parse_size(s: &str) -> CliResult<(u32, u32)> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("expected WIDTHxHEIGHT, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<u32>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| usage(format!("bad dimension {v:?} in {s:?}")))
    };
    Ok((parse(w)?, parse(h)?))
}

/// Parses a comma-separated list of thresholds.
pub fn parse_thresholds(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|t| *t > 0.0 && *t <= 1.0)
                .ok_or_else(|| usage(format!("bad threshold {v:?}; expected values in (0, 1]")))
        })
        .collect()
}

/// Parses `start:end:step` into an inclusive grid.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(usage(format!("expected start:end:step, got {s:?}")));
    };
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("bad number {v:?} in grid {s:?}")))
    };
    let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
    if step <= 0.0 || end < start {
        return Err(usage(format!("degenerate grid {s:?}")));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let v = start + step * i as f64;
        if v > end + step * 1e-9 {
            break;
        }
        grid.push(v);
        i += 1;
    }
    Ok(grid)
}

/// Parses `TRAIN:TEST` ratio shorthand.
pub fn parse_ratio(s: &str) -> CliResult<(u32, u32)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("expected TRAIN:TEST, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<u32>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| usage(format!("bad ratio component {v:?}")))
    };
    Ok((parse(a)?, parse(b)?))
}

/// Parses `start:end:step` into integer rows.
pub fn parse_rows(s: &str) -> CliResult<Vec<u32>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(usage(format!("expected start:end:step, got {s:?}")));
    };
    let parse = |v: &str| {
        v.trim()
            .parse::<u32>()
            .map_err(|_| usage(format!("bad row {v:?} in {s:?}")))
    };
    let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
    if step == 0 || end < start {
        return Err(usage(format!("degenerate row grid {s:?}")));
    }
    Ok((start..=end).step_by(step as usize).collect())
}

/// Writes one JSON value per line. Reports carry no timestamps, so
/// identical runs produce identical bytes.
pub fn write_jsonl_report(path: &Path, lines: &[serde_json::Value]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = String::new();
    for line in lines {
        out.push_str(&serde_json::to_string(line).expect("report lines serialize"));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
