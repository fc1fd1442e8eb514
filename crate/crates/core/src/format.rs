//! The `pairnet-instance-v1` JSON layout and the coloring file layout.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instance::{validate_instance, DistanceMatrix, MetricKind, MetricSpace, PairInstance, Violation};

pub const INSTANCE_FORMAT: &str = "pairnet-instance-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub metric: MetricFile,
    pub pairs: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub kind: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Points>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pseudometric: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    Plane(Vec<[f64; 2]>),
    Line(Vec<f64>),
}

impl InstanceFile {
    pub fn from_instance(inst: &PairInstance) -> Self {
        let metric = match inst.metric() {
            MetricSpace::Euclidean2d(pts) => MetricFile {
                kind: MetricKind::Euclidean2d,
                points: Some(Points::Plane(pts.clone())),
                matrix: None,
                pseudometric: None,
            },
            MetricSpace::Line1d(xs) => MetricFile {
                kind: MetricKind::Line1d,
                points: Some(Points::Line(xs.clone())),
                matrix: None,
                pseudometric: None,
            },
            MetricSpace::Matrix { matrix, pseudometric } => MetricFile {
                kind: MetricKind::Matrix,
                points: None,
                matrix: Some(matrix.rows()),
                pseudometric: pseudometric.then_some(true),
            },
        };
        InstanceFile {
            format: INSTANCE_FORMAT.to_string(),
            metric,
            pairs: inst.pairs().iter().map(|&(p, q)| [p.0, q.0]).collect(),
        }
    }

    /// Decodes the metric without judging it; structural mistakes in the
    /// file itself (missing fields, wrong format tag) are usage errors.
    pub fn metric_space(&self) -> Result<MetricSpace> {
        if self.format != INSTANCE_FORMAT {
            return Err(Error::usage(format!(
                "unsupported format tag {:?}, expected {INSTANCE_FORMAT:?}",
                self.format
            )));
        }
        let m = &self.metric;
        match m.kind {
            MetricKind::Euclidean2d => match &m.points {
                Some(Points::Plane(pts)) => Ok(MetricSpace::Euclidean2d(pts.clone())),
                Some(Points::Line(xs)) if xs.is_empty() => Ok(MetricSpace::Euclidean2d(Vec::new())),
                _ => Err(Error::usage("euclidean2d metric needs `points` as [x, y] arrays")),
            },
            MetricKind::Line1d => match &m.points {
                Some(Points::Line(xs)) => Ok(MetricSpace::Line1d(xs.clone())),
                Some(Points::Plane(pts)) if pts.is_empty() => Ok(MetricSpace::Line1d(Vec::new())),
                _ => Err(Error::usage("line1d metric needs `points` as a number array")),
            },
            MetricKind::Matrix => {
                let rows = m.matrix.as_ref().ok_or_else(|| Error::usage("matrix metric needs `matrix`"))?;
                Ok(MetricSpace::Matrix {
                    matrix: DistanceMatrix::from_rows(rows)?,
                    pseudometric: m.pseudometric.unwrap_or(false),
                })
            }
        }
    }

    fn pair_tuples(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|&[a, b]| (a, b)).collect()
    }

    pub fn violations(&self) -> Result<Vec<Violation>> {
        Ok(validate_instance(&self.metric_space()?, &self.pair_tuples()))
    }

    pub fn into_instance(self) -> Result<PairInstance> {
        let metric = self.metric_space()?;
        PairInstance::new(metric, self.pair_tuples())
    }
}

pub fn parse_instance(text: &str) -> Result<PairInstance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.into_instance()
}

/// Pretty JSON with a trailing newline; byte-stable for a given instance.
pub fn instance_to_json(inst: &PairInstance) -> String {
    let mut s =
        serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serialization cannot fail");
    s.push('\n');
    s
}

/// SHA-256 over the compact canonical encoding, hex encoded.
pub fn instance_digest(inst: &PairInstance) -> String {
    let compact = serde_json::to_vec(&InstanceFile::from_instance(inst)).expect("serializable");
    hex::encode(Sha256::digest(&compact))
}
