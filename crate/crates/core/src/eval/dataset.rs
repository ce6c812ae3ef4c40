use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Direction in which subjective scores improve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// MOS-like: larger is better.
    #[default]
    HigherBetter,
    /// DMOS/JOD-like: smaller is better.
    LowerBetter,
}

impl Polarity {
    /// Map a score onto the internal larger-is-better scale (an involution).
    pub fn orient(self, score: f64) -> f64 {
        match self {
            Polarity::HigherBetter => score,
            Polarity::LowerBetter => -score,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub id: String,
    pub scene: String,
    pub distortion: String,
    pub level: u32,
    pub features: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub layout: Vec<String>,
    pub rows: Vec<LabeledRow>,
    pub polarity: Polarity,
}

impl LabeledDataset {
    pub fn new(
        layout: Vec<String>,
        rows: Vec<LabeledRow>,
        polarity: Polarity,
    ) -> Result<Self, EvalError> {
        let mut seen = HashSet::new();
        for r in &rows {
            if !seen.insert(r.id.as_str()) {
                return Err(EvalError::DuplicateId(r.id.clone()));
            }
            if r.features.len() != layout.len() {
                return Err(EvalError::LayoutMismatch(format!(
                    "item {} has {} features, layout has {}",
                    r.id,
                    r.features.len(),
                    layout.len()
                )));
            }
            if !r.score.is_finite() || r.features.iter().any(|v| !v.is_finite()) {
                return Err(EvalError::DegenerateInput(format!(
                    "item {} has a non-finite value",
                    r.id
                )));
            }
        }
        Ok(LabeledDataset {
            layout,
            rows,
            polarity,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn features(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.features.clone()).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.score).collect()
    }

    /// Keep only rows whose distortion tag is listed.
    pub fn filter_distortions(&self, keep: &[String]) -> LabeledDataset {
        LabeledDataset {
            layout: self.layout.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| keep.contains(&r.distortion))
                .cloned()
                .collect(),
            polarity: self.polarity,
        }
    }
}

pub(crate) const FEATURE_PREFIXES: [&str; 3] = ["lcn.", "gdd.", "wlbp."];

pub fn is_feature_column(name: &str) -> bool {
    FEATURE_PREFIXES.iter().any(|p| name.starts_with(p))
}

/// One row of a features CSV: metadata plus the named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub scene: String,
    pub distortion: String,
    pub level: Option<u32>,
    /// Every non-feature numeric-or-empty column beyond the fixed metadata,
    /// including `score`, keyed by header name.
    pub extra: Vec<(String, Option<f64>)>,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub layout: Vec<String>,
    pub records: Vec<FeatureRecord>,
}

const META: [&str; 4] = ["id", "scene", "distortion", "level"];

impl FeatureTable {
    /// Write with columns `id, scene, distortion, level, score, <features>`.
    /// Missing scores or levels are written as empty cells.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), EvalError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = META.iter().map(|s| s.to_string()).collect();
        let extra_names: Vec<String> = self
            .records
            .first()
            .map(|r| r.extra.iter().map(|(n, _)| n.clone()).collect())
            .unwrap_or_else(|| vec!["score".into()]);
        header.extend(extra_names.iter().cloned());
        header.extend(self.layout.iter().cloned());
        out.write_record(&header)?;
        for r in &self.records {
            let mut rec = vec![
                r.id.clone(),
                r.scene.clone(),
                r.distortion.clone(),
                r.level.map(|l| l.to_string()).unwrap_or_default(),
            ];
            for name in &extra_names {
                let v = r.extra.iter().find(|(n, _)| n == name).and_then(|(_, v)| *v);
                rec.push(v.map(|v| v.to_string()).unwrap_or_default());
            }
            rec.extend(r.features.iter().map(|v| v.to_string()));
            out.write_record(&rec)?;
        }
        out.flush().map_err(|e| EvalError::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, EvalError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let col = |name: &str| header.iter().position(|h| h == name);
        let id_col = col("id").ok_or_else(|| EvalError::Csv("missing `id` column".into()))?;
        let (scene_col, dist_col, level_col) = (col("scene"), col("distortion"), col("level"));
        let feature_cols: Vec<usize> = (0..header.len())
            .filter(|&i| is_feature_column(&header[i]))
            .collect();
        let extra_cols: Vec<usize> = (0..header.len())
            .filter(|&i| !is_feature_column(&header[i]) && !META.contains(&header[i].as_str()))
            .collect();
        let layout = feature_cols.iter().map(|&i| header[i].clone()).collect();
        let mut records = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("").trim();
            let num = |i: usize| -> Result<Option<f64>, EvalError> {
                let s = field(i);
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse::<f64>().map(Some).map_err(|_| {
                    EvalError::Csv(format!(
                        "row {}: column `{}` is not a number: {s:?}",
                        line + 2,
                        header[i]
                    ))
                })
            };
            let mut features = Vec::with_capacity(feature_cols.len());
            for &i in &feature_cols {
                features.push(num(i)?.ok_or_else(|| {
                    EvalError::Csv(format!("row {}: empty feature `{}`", line + 2, header[i]))
                })?);
            }
            let level = match level_col.map(field) {
                None | Some("") => None,
                Some(s) => Some(s.parse::<u32>().map_err(|_| {
                    EvalError::Csv(format!("row {}: bad level {s:?}", line + 2))
                })?),
            };
            let mut extra = Vec::with_capacity(extra_cols.len());
            for &i in &extra_cols {
                // Non-numeric extra columns are carried as missing values.
                extra.push((header[i].clone(), num(i).ok().flatten()));
            }
            records.push(FeatureRecord {
                id: field(id_col).to_string(),
                scene: scene_col.map(|c| field(c).to_string()).unwrap_or_default(),
                distortion: dist_col.map(|c| field(c).to_string()).unwrap_or_default(),
                level,
                extra,
                features,
            });
        }
        Ok(FeatureTable { layout, records })
    }

    /// Target values from the named column; every row must have one.
    pub fn scores(&self, column: &str) -> Result<Vec<f64>, EvalError> {
        self.records
            .iter()
            .map(|r| {
                r.extra
                    .iter()
                    .find(|(n, _)| n == column)
                    .ok_or_else(|| EvalError::Csv(format!("no score column `{column}`")))?
                    .1
                    .ok_or_else(|| EvalError::Csv(format!("item {} has no `{column}` value", r.id)))
            })
            .collect()
    }

    pub fn into_dataset(self, column: &str, polarity: Polarity) -> Result<LabeledDataset, EvalError> {
        let scores = self.scores(column)?;
        let rows = self
            .records
            .into_iter()
            .zip(scores)
            .map(|(r, score)| LabeledRow {
                scene: if r.scene.is_empty() { r.id.clone() } else { r.scene },
                id: r.id,
                distortion: r.distortion,
                level: r.level.unwrap_or(0),
                features: r.features,
                score,
            })
            .collect();
        LabeledDataset::new(self.layout, rows, polarity)
    }
}
