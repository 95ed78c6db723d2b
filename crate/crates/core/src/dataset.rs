//! Dataset construction: frame sampling, uniform resizing, scene tagging,
//! and scene-balanced splitting.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annot::{parse_culane, rescale, write_culane};
use crate::error::{Error, Result};
use crate::fog::{list_images, BatchStatus};

/// Closed set of road-scene categories used for balanced splits and
/// per-scene reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SceneTag {
    Normal,
    Arrow,
    Crowd,
    Curve,
    Night,
    Crossroad,
}

impl SceneTag {
    pub const ALL: [SceneTag; 6] = [
        SceneTag::Normal,
        SceneTag::Arrow,
        SceneTag::Crowd,
        SceneTag::Curve,
        SceneTag::Night,
        SceneTag::Crossroad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SceneTag::Normal => "Normal",
            SceneTag::Arrow => "Arrow",
            SceneTag::Crowd => "Crowd",
            SceneTag::Curve => "Curve",
            SceneTag::Night => "Night",
            SceneTag::Crossroad => "Crossroad",
        }
    }
}

impl fmt::Display for SceneTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|tag| tag.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Parameter(format!(
                    "unknown scene {s:?}; expected one of Normal, Arrow, Crowd, Curve, Night, Crossroad"
                ))
            })
    }
}

/// Which side of a split a manifest describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitKind {
    #[default]
    All,
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Relative image path with forward slashes.
    pub path: String,
    pub scene: SceneTag,
}

/// Ordered list of dataset entries. The text form is one entry per line:
/// `<relative-path><TAB><scene>`; a line without a scene column defaults to
/// Normal so plain list files load as manifests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub split: SplitKind,
}

impl Manifest {
    pub fn new(entries: Vec<ManifestEntry>, split: SplitKind) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for entry in &entries {
            if !seen.insert(entry.path.as_str()) {
                return Err(Error::Parameter(format!(
                    "duplicate manifest path {:?}",
                    entry.path
                )));
            }
        }
        Ok(Self { entries, split })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let (path, scene) = match line.split_once('\t') {
                Some((path, scene)) => {
                    let scene = scene.trim().parse().map_err(|e: Error| Error::Parse {
                        line: idx + 1,
                        message: e.to_string(),
                    })?;
                    (path, scene)
                }
                None => (line, SceneTag::Normal),
            };
            entries.push(ManifestEntry {
                path: path.trim().trim_start_matches('/').to_string(),
                scene,
            });
        }
        Self::new(entries, SplitKind::All)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&entry.path);
            out.push('\t');
            out.push_str(entry.scene.name());
            out.push('\n');
        }
        out
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries grouped by scene, keyed for per-scene reporting.
    pub fn scene_index(&self) -> BTreeMap<String, SceneTag> {
        self.entries
            .iter()
            .map(|e| (e.path.clone(), e.scene))
            .collect()
    }
}

/// Keeps frames `0, interval, 2*interval, ...` of an ordered sequence.
pub fn sample_frames<T: Clone>(frames: &[T], interval: usize) -> Result<Vec<T>> {
    if interval < 1 {
        return Err(Error::Parameter(format!(
            "sampling interval must be >= 1, got {interval}"
        )));
    }
    Ok(frames.iter().step_by(interval).cloned().collect())
}

/// Optional path -> scene assignment; duplicate paths keep the last
/// assignment and are counted.
#[derive(Debug, Clone, Default)]
pub struct SceneMap {
    pub map: BTreeMap<String, SceneTag>,
    pub duplicates: usize,
}

impl SceneMap {
    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut map = BTreeMap::new();
        let mut duplicates = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let (path_col, scene_col) = line.split_once('\t').ok_or(Error::Parse {
                line: idx + 1,
                message: "expected <path><TAB><scene>".into(),
            })?;
            let scene: SceneTag = scene_col.trim().parse().map_err(|e: Error| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
            let key = path_col.trim().trim_start_matches('/').to_string();
            if map.insert(key, scene).is_some() {
                duplicates += 1;
            }
        }
        Ok(Self { map, duplicates })
    }
}

/// Enumerates images under `root` (sorted lexicographically by relative
/// path) and tags them from `scene_map`, defaulting to Normal.
pub fn build_manifest(root: &Path, scene_map: Option<&SceneMap>) -> Result<Manifest> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "dataset root is not a directory",
            ),
        ));
    }
    let mut paths: Vec<String> = list_images(root)?
        .into_iter()
        .map(|rel| rel.to_string_lossy().replace('\\', "/"))
        .collect();
    paths.sort();
    let entries = paths
        .into_iter()
        .map(|path| {
            let scene = scene_map
                .and_then(|m| m.map.get(&path).copied())
                .unwrap_or(SceneTag::Normal);
            ManifestEntry { path, scene }
        })
        .collect();
    Manifest::new(entries, SplitKind::All)
}

/// Scene-balanced deterministic split. Within each scene the entries are
/// shuffled by the seed and allocated with largest-remainder rounding, so
/// every scene's train:test ratio deviates from the requested ratio by at
/// most one item. Outputs preserve the input's relative order.
pub fn split_dataset(
    manifest: &Manifest,
    ratio_train: u32,
    ratio_test: u32,
    seed: u64,
) -> Result<(Manifest, Manifest)> {
    if ratio_train < 1 || ratio_test < 1 {
        return Err(Error::Parameter(format!(
            "split ratios must be >= 1, got {ratio_train}:{ratio_test}"
        )));
    }
    let mut by_scene: BTreeMap<SceneTag, Vec<usize>> = BTreeMap::new();
    for (idx, entry) in manifest.entries.iter().enumerate() {
        by_scene.entry(entry.scene).or_default().push(idx);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; manifest.entries.len()];
    for scene in SceneTag::ALL {
        let Some(mut indices) = by_scene.remove(&scene) else {
            continue;
        };
        indices.shuffle(&mut rng);
        let n = indices.len();
        let denom = (ratio_train + ratio_test) as f64;
        let exact_train = n as f64 * ratio_train as f64 / denom;
        let exact_test = n as f64 * ratio_test as f64 / denom;
        let mut train_count = exact_train.floor() as usize;
        let leftover = n - train_count - exact_test.floor() as usize;
        if leftover > 0 {
            // Largest remainder takes the spare item; ties favor train.
            let frac_train = exact_train - exact_train.floor();
            let frac_test = exact_test - exact_test.floor();
            if frac_train >= frac_test {
                train_count += 1;
            }
        }
        for &idx in &indices[..train_count] {
            in_train[idx] = true;
        }
    }

    let pick = |keep_train: bool, split: SplitKind| -> Manifest {
        Manifest {
            entries: manifest
                .entries
                .iter()
                .enumerate()
                .filter(|(i, _)| in_train[*i] == keep_train)
                .map(|(_, e)| e.clone())
                .collect(),
            split,
        }
    };
    Ok((pick(true, SplitKind::Train), pick(false, SplitKind::Test)))
}

/// One line of the resize report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResizeRecord {
    pub path: String,
    pub status: BatchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_size: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ResizeSummary {
    pub records: Vec<ResizeRecord>,
    pub succeeded: usize,
    pub failed: usize,
}

/// Bilinearly resizes every image under `in_root` to the target resolution,
/// mirroring relative paths under `out_root`. With `with_annotations`,
/// sidecar `.lines.txt` files are rescaled with the same factors. Per-file
/// decode failures are recorded and the batch continues.
pub fn resize_dataset(
    in_root: &Path,
    out_root: &Path,
    target_w: u32,
    target_h: u32,
    with_annotations: bool,
) -> Result<ResizeSummary> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::Parameter(
            "target dimensions must be positive".into(),
        ));
    }
    let rels = list_images(in_root)?;
    std::fs::create_dir_all(out_root).map_err(|e| Error::io(out_root, e))?;
    for rel in &rels {
        if let Some(parent) = rel.parent() {
            let dir = out_root.join(parent);
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    let records: Vec<ResizeRecord> = rels
        .par_iter()
        .map(|rel| {
            let path = rel.to_string_lossy().replace('\\', "/");
            match resize_one(in_root, out_root, rel, target_w, target_h, with_annotations) {
                Ok(source_size) => ResizeRecord {
                    path,
                    status: BatchStatus::Ok,
                    source_size: Some(source_size),
                    error: None,
                },
                Err(e) => ResizeRecord {
                    path,
                    status: BatchStatus::Failed,
                    source_size: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let failed = records
        .iter()
        .filter(|r| r.status == BatchStatus::Failed)
        .count();
    Ok(ResizeSummary {
        succeeded: records.len() - failed,
        failed,
        records,
    })
}

fn resize_one(
    in_root: &Path,
    out_root: &Path,
    rel: &Path,
    target_w: u32,
    target_h: u32,
    with_annotations: bool,
) -> Result<String> {
    let src_path = in_root.join(rel);
    let img = ::image::open(&src_path).map_err(|e| Error::image(&src_path, e))?;
    let (w, h) = (img.width(), img.height());
    let resized = ::image::imageops::resize(
        &img.to_rgb8(),
        target_w,
        target_h,
        ::image::imageops::FilterType::Triangle,
    );
    let dst_path = out_root.join(rel);
    resized
        .save(&dst_path)
        .map_err(|e| Error::image(&dst_path, e))?;

    if with_annotations {
        let sidecar = in_root.join(rel).with_extension("lines.txt");
        if sidecar.is_file() {
            let text = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
            let parsed = parse_culane(&text, w, h)?;
            let scaled = rescale(&parsed.set, target_w, target_h)?;
            let out_sidecar = out_root.join(rel).with_extension("lines.txt");
            std::fs::write(&out_sidecar, write_culane(&scaled))
                .map_err(|e| Error::io(&out_sidecar, e))?;
        }
    }
    Ok(format!("{w}x{h}"))
}
