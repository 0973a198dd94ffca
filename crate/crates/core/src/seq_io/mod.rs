//! Sequence input: FASTA records, label manifests and fragment sampling.

mod fasta;
mod fragments;
mod labels;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use fasta::{parse_fasta, parse_fasta_bytes, read_fasta, read_fasta_allow_empty, write_fasta};
pub use fragments::{sample_fragments, sample_fragments_from, Fragment, FragmentSample};
pub use labels::{load_labels, parse_manifest, LabelWarning, ManifestOptions};

/// A named nucleotide sequence. Residues are stored upper-cased and may
/// contain IUPAC ambiguity codes; those are skipped at featurization. Any
/// printable ASCII byte other than `>` is accepted as a residue, so every
/// sequence survives a FASTA write and re-read unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    id: String,
    residues: Vec<u8>,
}

impl Sequence {
    pub fn new(id: impl Into<String>, residues: impl Into<Vec<u8>>) -> Result<Self> {
        let id = id.into();
        let mut residues = residues.into();
        if id.is_empty() {
            return Err(Error::EmptyIdentifier { line: 0 });
        }
        if id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidIdentifier(id));
        }
        if residues.is_empty() {
            return Err(Error::EmptySequence { id });
        }
        if let Some(position) = residues.iter().position(|&b| !b.is_ascii_graphic() || b == b'>') {
            let byte = residues[position];
            return Err(Error::InvalidResidue { id, position, byte });
        }
        residues.make_ascii_uppercase();
        Ok(Sequence { id, residues })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn residues(&self) -> &[u8] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    /// Always false: construction rejects empty sequences.
    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// Sequences paired with class labels. Labels are stored as indices into
/// `classes`, which keeps first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    sequences: Vec<Sequence>,
    labels: Vec<usize>,
    classes: Vec<String>,
}

impl LabeledDataset {
    /// Builds a dataset from parallel sequence and label lists; classes are
    /// collected in first-appearance order.
    pub fn new<S: AsRef<str>>(sequences: Vec<Sequence>, labels: &[S]) -> Result<Self> {
        let mut classes: Vec<String> = Vec::new();
        for l in labels {
            if !classes.iter().any(|c| c == l.as_ref()) {
                classes.push(l.as_ref().to_string());
            }
        }
        Self::with_classes(sequences, labels, classes)
    }

    /// Builds a dataset with an explicit class order. Every class must have
    /// at least one member.
    pub fn with_classes<S: AsRef<str>>(
        sequences: Vec<Sequence>,
        labels: &[S],
        classes: Vec<String>,
    ) -> Result<Self> {
        if sequences.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} sequences but {} labels",
                sequences.len(),
                labels.len()
            )));
        }
        let mut seen = HashSet::with_capacity(sequences.len());
        for s in &sequences {
            if !seen.insert(s.id()) {
                return Err(Error::DuplicateId(s.id().to_string()));
            }
        }
        let mut indices = Vec::with_capacity(labels.len());
        for l in labels {
            let idx = classes
                .iter()
                .position(|c| c == l.as_ref())
                .ok_or_else(|| Error::UnknownClass(l.as_ref().to_string()))?;
            indices.push(idx);
        }
        let mut sizes = vec![0usize; classes.len()];
        for &i in &indices {
            sizes[i] += 1;
        }
        if let Some(c) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::EmptyClass(classes[c].clone()));
        }
        if classes.len() < 2 {
            return Err(Error::TooFewClasses(classes.len()));
        }
        Ok(LabeledDataset {
            sequences,
            labels: indices,
            classes,
        })
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    /// Class index of each sequence.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.classes.len()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn min_length(&self) -> usize {
        self.sequences.iter().map(Sequence::len).min().unwrap_or(0)
    }

    /// SHA-256 over ids, residues and labels, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (s, &l) in self.sequences.iter().zip(&self.labels) {
            h.update(s.id().as_bytes());
            h.update([0u8]);
            h.update(s.residues());
            h.update([0u8]);
            h.update(self.classes[l].as_bytes());
            h.update(b"\n");
        }
        h.finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
