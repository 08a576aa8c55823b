//! JSON interchange for channels: the `ChannelDocument` schema.
//!
//! Matrices are stored row-major as four `[re, im]` pairs:
//! `[e00, e01, e10, e11]`. `format_version` is `"1"`; unknown versions are
//! rejected. PIO mixtures carry both the flattened Kraus list (so every
//! document re-ingests as a channel) and the `(weight, family, phases)`
//! triples.

use crate::channels::{KrausSet, PioFamily};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::synthesis::{PioMixture, PioMixtureComponent};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: &str = "1";

/// `[re, im]`.
pub type EntryRepr = [f64; 2];
/// Row-major 2x2 matrix: `[e00, e01, e10, e11]`.
pub type MatrixRepr = [EntryRepr; 4];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MixtureEntry {
    pub weight: f64,
    pub family: PioFamily,
    pub phases: [f64; 2],
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct DocumentMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Source state `[z, r, theta]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<[f64; 3]>,
    /// Target state `[z, r, theta]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<[f64; 3]>,
    /// Synthesis or conversion parameters, schema depending on the command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChannelDocument {
    pub format_version: String,
    pub kraus: Vec<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<Vec<MixtureEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<DocumentMetadata>,
}

fn matrix_repr(m: &Mat2) -> MatrixRepr {
    [
        [m.e[0][0].re, m.e[0][0].im],
        [m.e[0][1].re, m.e[0][1].im],
        [m.e[1][0].re, m.e[1][0].im],
        [m.e[1][1].re, m.e[1][1].im],
    ]
}

fn matrix_from_repr(r: &MatrixRepr) -> Mat2 {
    Mat2::new(
        Complex64::new(r[0][0], r[0][1]),
        Complex64::new(r[1][0], r[1][1]),
        Complex64::new(r[2][0], r[2][1]),
        Complex64::new(r[3][0], r[3][1]),
    )
}

impl ChannelDocument {
    pub fn from_kraus_set(set: &KrausSet) -> Self {
        ChannelDocument {
            format_version: FORMAT_VERSION.into(),
            kraus: set.matrices().iter().map(matrix_repr).collect(),
            mixture: None,
            metadata: None,
        }
    }

    /// Document for a PIO mixture: flattened sqrt-weight Kraus list plus
    /// the mixture triples.
    pub fn from_mixture(mix: &PioMixture) -> Result<Self> {
        let set = mix.to_kraus_set()?;
        Ok(ChannelDocument {
            format_version: FORMAT_VERSION.into(),
            kraus: set.matrices().iter().map(matrix_repr).collect(),
            mixture: Some(
                mix.components()
                    .iter()
                    .map(|c| MixtureEntry {
                        weight: c.weight,
                        family: c.family,
                        phases: c.phases,
                    })
                    .collect(),
            ),
            metadata: None,
        })
    }

    pub fn with_metadata(mut self, metadata: DocumentMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    /// Raw matrices, without the completeness check.
    pub fn matrices(&self) -> Vec<Mat2> {
        self.kraus.iter().map(matrix_from_repr).collect()
    }

    /// Validates the version and rebuilds the channel.
    pub fn to_kraus_set(&self) -> Result<KrausSet> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedDocument(format!(
                "unknown format_version {:?}",
                self.format_version
            )));
        }
        if self.kraus.is_empty() {
            return Err(Error::UnsupportedDocument("empty kraus list".into()));
        }
        KrausSet::from_matrices(self.matrices())
    }

    /// Mixture triples, when present, as typed components.
    pub fn mixture_components(&self) -> Option<Vec<PioMixtureComponent>> {
        self.mixture.as_ref().map(|entries| {
            entries
                .iter()
                .map(|e| PioMixtureComponent {
                    weight: e.weight,
                    family: e.family,
                    phases: e.phases,
                })
                .collect()
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::UnsupportedDocument(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::synth_pio;
    use crate::BlochState;
    use proptest::prelude::*;

    #[test]
    fn round_trip_is_lossless() {
        let set = KrausSet::from_matrices(vec![
            Mat2::from_real(0.6, 0.0, 0.0, 0.8),
            Mat2::from_real(0.0, 0.6, 0.8, 0.0),
        ])
        .unwrap();
        let doc = ChannelDocument::from_kraus_set(&set);
        let json = doc.to_json_pretty();
        let back = ChannelDocument::from_json_str(&json).unwrap();
        assert_eq!(doc, back);
        let set2 = back.to_kraus_set().unwrap();
        for (a, b) in set.matrices().iter().zip(set2.matrices().iter()) {
            assert_eq!(a.max_abs_diff(b), 0.0);
        }
    }

    #[test]
    fn unknown_version_rejected() {
        let json = r#"{"format_version":"2","kraus":[[[1,0],[0,0],[0,0],[1,0]]]}"#;
        let doc = ChannelDocument::from_json_str(json).unwrap();
        assert!(matches!(
            doc.to_kraus_set(),
            Err(Error::UnsupportedDocument(_))
        ));
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(ChannelDocument::from_json_str("{not json").is_err());
    }

    #[test]
    fn mixture_document_flattens_and_reingests() {
        let from = BlochState::real(0.5, 0.6).unwrap();
        let to = BlochState::real(0.0, 0.3).unwrap();
        let mix = synth_pio(&from, &to).unwrap();
        let doc = ChannelDocument::from_mixture(&mix).unwrap();
        let set = doc.to_kraus_set().unwrap();
        assert!(set.completeness_residual() < 1e-9);
        assert_eq!(
            doc.mixture_components().unwrap().len(),
            mix.components().len()
        );
    }

    proptest! {
        // f64 JSON round trips exactly through serde_json, so documents
        // re-ingest losslessly.
        #[test]
        fn entry_values_round_trip(re in -1.0f64..1.0, im in -1.0f64..1.0) {
            let doc = ChannelDocument {
                format_version: FORMAT_VERSION.into(),
                kraus: vec![[[re, im], [0.0, 0.0], [0.0, 0.0], [re, -im]]],
                mixture: None,
                metadata: None,
            };
            let json = serde_json::to_string(&doc).unwrap();
            let back = ChannelDocument::from_json_str(&json).unwrap();
            prop_assert_eq!(doc.kraus[0], back.kraus[0]);
        }
    }
}
