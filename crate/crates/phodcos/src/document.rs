//! Persistence of a fitted parameterization.
//!
//! A path is fully determined by its parameter range and, per segment,
//! the nine preimage control quaternions plus the start point; everything
//! else (hodograph, frames, speeds, geometry) is recomputed on load. JSON
//! numbers are written with shortest-round-trip formatting, which decodes
//! to the identical `f64` bits, so a reloaded document reproduces the
//! in-memory path exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phcurve::PHSegment;
use crate::pipeline::PHPath;
use crate::quat::{Quaternion, Vector3};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("unsupported schema_version {found:?} (expected {SCHEMA_VERSION:?})")]
    SchemaVersionMismatch { found: String },
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One segment: preimage control points as `[w, x, y, z]` rows plus the
/// segment start point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub preimage: Vec<[f64; 4]>,
    pub p0: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocumentMetadata {
    /// Human-readable source description (e.g. `builtin:exemplary`).
    pub source: String,
    pub epsilon: f64,
    pub n_segments: usize,
    pub max_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParameterizationDocument {
    pub schema_version: String,
    pub xi0: f64,
    pub xif: f64,
    pub h: f64,
    pub segments: Vec<SegmentRecord>,
    pub metadata: DocumentMetadata,
}

impl ParameterizationDocument {
    pub fn from_path(path: &PHPath, metadata: DocumentMetadata) -> Self {
        let (xi0, xif) = path.domain();
        let segments = path
            .segments()
            .iter()
            .map(|seg| SegmentRecord {
                preimage: seg.preimage().iter().map(|q| q.to_array()).collect(),
                p0: seg.start_point().to_array(),
            })
            .collect();
        ParameterizationDocument {
            schema_version: SCHEMA_VERSION.into(),
            xi0,
            xif,
            h: path.h(),
            segments,
            metadata,
        }
    }

    pub fn to_ph_path(&self) -> Result<PHPath, DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::SchemaVersionMismatch {
                found: self.schema_version.clone(),
            });
        }
        if self.segments.is_empty() {
            return Err(DocumentError::Malformed("no segments".into()));
        }
        if !(self.xif > self.xi0) {
            return Err(DocumentError::Malformed(
                "parameter range must satisfy xif > xi0".into(),
            ));
        }
        let mut segments = Vec::with_capacity(self.segments.len());
        for (k, rec) in self.segments.iter().enumerate() {
            if rec.preimage.len() != 9 {
                return Err(DocumentError::Malformed(format!(
                    "segment {k}: expected 9 preimage control points, got {}",
                    rec.preimage.len()
                )));
            }
            let pre: [Quaternion; 9] = std::array::from_fn(|i| {
                let [w, x, y, z] = rec.preimage[i];
                Quaternion::new(w, x, y, z)
            });
            let [x, y, z] = rec.p0;
            segments.push(PHSegment::new(pre, Vector3::new(x, y, z)));
        }
        Ok(PHPath::from_parts(segments, self.xi0, self.xif))
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path)?;
        let doc: ParameterizationDocument = serde_json::from_str(&text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::SchemaVersionMismatch {
                found: doc.schema_version,
            });
        }
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ExemplaryCurve;
    use crate::pipeline::{interpolate_path, phodcos, PipelineConfig};

    fn metadata() -> DocumentMetadata {
        DocumentMetadata {
            source: "test".into(),
            epsilon: 1e-4,
            n_segments: 0,
            max_error: 0.0,
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let src = ExemplaryCurve::new();
        let (path, rows) = phodcos(&src, &PipelineConfig::new(1e-4)).unwrap();
        let mut md = metadata();
        md.n_segments = path.segments().len();
        md.max_error = rows.last().unwrap().max_error;
        let doc = ParameterizationDocument::from_path(&path, md);

        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("fit.json");
        doc.save(&file).unwrap();
        let reloaded = ParameterizationDocument::load(&file).unwrap();
        let path2 = reloaded.to_ph_path().unwrap();

        assert_eq!(path.segments().len(), path2.segments().len());
        for k in 0..=500 {
            let xi = k as f64 / 500.0;
            let a = path.position(xi).to_array();
            let b = path2.position(xi).to_array();
            assert_eq!(a, b, "xi = {xi}");
            let fa = path.frame(xi).unwrap();
            let fb = path2.frame(xi).unwrap();
            assert_eq!(fa.rotation.to_row_major(), fb.rotation.to_row_major());
            assert_eq!(fa.omega.to_array(), fb.omega.to_array());
            assert_eq!(fa.sigma, fb.sigma);
        }
    }

    #[test]
    fn schema_version_is_checked() {
        let src = ExemplaryCurve::new();
        let path = interpolate_path(&src, 2).unwrap();
        let mut doc = ParameterizationDocument::from_path(&path, metadata());
        doc.schema_version = "0".into();
        assert!(matches!(
            doc.to_ph_path(),
            Err(DocumentError::SchemaVersionMismatch { .. })
        ));
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("old.json");
        std::fs::write(
            &file,
            serde_json::to_string(&doc).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            ParameterizationDocument::load(&file),
            Err(DocumentError::SchemaVersionMismatch { .. })
        ));
    }

    #[test]
    fn malformed_segments_rejected() {
        let src = ExemplaryCurve::new();
        let path = interpolate_path(&src, 2).unwrap();
        let mut doc = ParameterizationDocument::from_path(&path, metadata());
        doc.segments[1].preimage.pop();
        assert!(matches!(doc.to_ph_path(), Err(DocumentError::Malformed(_))));
        doc.segments.clear();
        assert!(matches!(doc.to_ph_path(), Err(DocumentError::Malformed(_))));
    }
}
