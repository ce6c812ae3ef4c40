use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// One light field to process, with whatever labels the input provided.
#[derive(Debug, Clone)]
pub struct InputItem {
    pub id: String,
    pub scene: String,
    pub distortion: String,
    pub level: Option<u32>,
    pub score: Option<f64>,
    pub dir: PathBuf,
}

impl InputItem {
    fn bare(dir: PathBuf) -> Self {
        let id = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        InputItem {
            scene: id.clone(),
            id,
            distortion: String::new(),
            level: None,
            score: None,
            dir,
        }
    }
}

/// Resolve `--input`: a manifest CSV, a directory whose subdirectories are
/// light fields, or a single light-field directory.
pub fn discover(input: &Path) -> Result<Vec<InputItem>> {
    if input.is_file() {
        return read_manifest(input);
    }
    if !input.is_dir() {
        bail!("input {} does not exist", input.display());
    }
    let mut subdirs = Vec::new();
    for entry in std::fs::read_dir(input).with_context(|| format!("listing {}", input.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            subdirs.push(path);
        }
    }
    if subdirs.is_empty() {
        return Ok(vec![InputItem::bare(input.to_path_buf())]);
    }
    subdirs.sort();
    Ok(subdirs.into_iter().map(InputItem::bare).collect())
}

fn read_manifest(path: &Path) -> Result<Vec<InputItem>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening manifest {}", path.display()))?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (Some(id_col), Some(path_col)) = (col("id"), col("path")) else {
        bail!("manifest {} needs `id` and `path` columns", path.display());
    };
    let score_col = col("mos").or_else(|| col("score"));
    let mut items = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("manifest row {}", line + 2))?;
        let get = |c: Option<usize>| c.and_then(|c| rec.get(c)).unwrap_or("").trim().to_string();
        let id = get(Some(id_col));
        let level = match get(col("level")).as_str() {
            "" => None,
            s => Some(s.parse().with_context(|| format!("item {id}: bad level {s:?}"))?),
        };
        let score = match get(score_col).as_str() {
            "" => None,
            s => Some(s.parse().with_context(|| format!("item {id}: bad score {s:?}"))?),
        };
        let scene = get(col("scene"));
        items.push(InputItem {
            scene: if scene.is_empty() { id.clone() } else { scene },
            distortion: get(col("distortion")),
            level,
            score,
            dir: base.join(get(Some(path_col))),
            id,
        });
    }
    Ok(items)
}
