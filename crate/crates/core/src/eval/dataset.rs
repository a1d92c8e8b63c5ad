use std::collections::HashSet;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub content_id: String,
    pub objective: f64,
    pub subjective: f64,
}

/// Objective and subjective scores keyed by a unique content id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    rows: Vec<LabeledRow>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<LabeledRow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &rows {
            if !seen.insert(r.content_id.as_str()) {
                return Err(Error::Dataset(format!("duplicate content id {:?}", r.content_id)));
            }
            if !r.objective.is_finite() || !r.subjective.is_finite() {
                return Err(Error::Dataset(format!("non-finite score for {:?}", r.content_id)));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[LabeledRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn objective(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.objective).collect()
    }

    pub fn subjective(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.subjective).collect()
    }

    /// `(min, max)` of the subjective scores.
    pub fn subjective_range(&self) -> Option<(f64, f64)> {
        let s = self.subjective();
        if s.is_empty() {
            return None;
        }
        let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    /// Subjective scores shifted and scaled onto `[0, 1]`.
    pub fn normalized(&self) -> Result<Self> {
        let (lo, hi) = self
            .subjective_range()
            .ok_or_else(|| Error::Dataset("empty dataset".into()))?;
        if hi == lo {
            return Err(Error::DegenerateData("all subjective scores are equal".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| LabeledRow {
                subjective: (r.subjective - lo) / (hi - lo),
                ..r.clone()
            })
            .collect();
        Ok(Self { rows })
    }
}

/// One line of a dataset manifest. Paths are relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub ref_path: PathBuf,
    pub dist_path: PathBuf,
    pub subjective_score: f64,
    #[serde(default)]
    pub width: Option<usize>,
    #[serde(default)]
    pub height: Option<usize>,
    #[serde(default)]
    pub bit_depth: Option<u8>,
}

/// CSV manifest: `ref_path,dist_path,subjective_score[,width,height,bit_depth]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn from_reader<R: Read>(reader: R, base: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<ManifestRow>().enumerate() {
            let mut row = rec.map_err(|e| Error::Dataset(format!("manifest line {}: {e}", i + 2)))?;
            row.ref_path = base.join(&row.ref_path);
            row.dist_path = base.join(&row.dist_path);
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_reader(file, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, o: f64, s: f64) -> LabeledRow {
        LabeledRow {
            content_id: id.into(),
            objective: o,
            subjective: s,
        }
    }

    #[test]
    fn duplicates_rejected() {
        assert!(LabeledDataset::new(vec![row("a", 0.1, 1.0), row("a", 0.2, 2.0)]).is_err());
    }

    #[test]
    fn normalization() {
        let d = LabeledDataset::new(vec![row("a", 0.1, 20.0), row("b", 0.2, 60.0), row("c", 0.3, 100.0)]).unwrap();
        assert_eq!(d.normalized().unwrap().subjective(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn manifest_parsing() {
        let text = "ref_path,dist_path,subjective_score,width,height,bit_depth\n\
                    a.yuv,b.yuv,55.5,64,48,8\n\
                    c.pgm,d.pgm,12,,,\n";
        let m = Manifest::from_reader(text.as_bytes(), Path::new("/data")).unwrap();
        assert_eq!(m.rows.len(), 2);
        assert_eq!(m.rows[0].ref_path, PathBuf::from("/data/a.yuv"));
        assert_eq!(m.rows[0].width, Some(64));
        assert_eq!(m.rows[1].width, None);
        assert_eq!(m.rows[1].subjective_score, 12.0);
        let short = "ref_path,dist_path,subjective_score\nx.pgm,y.pgm,3\n";
        assert_eq!(Manifest::from_reader(short.as_bytes(), Path::new("")).unwrap().rows[0].bit_depth, None);
    }
}
