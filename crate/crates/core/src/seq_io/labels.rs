use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::{LabeledDataset, Sequence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ManifestOptions {
    pub delimiter: u8,
    pub has_header: bool,
    /// When false, manifest ids without a matching sequence only produce a warning.
    pub strict: bool,
}

impl Default for ManifestOptions {
    fn default() -> Self {
        ManifestOptions {
            delimiter: b'\t',
            has_header: false,
            strict: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelWarning {
    UnmatchedManifestId { id: String, label: String },
}

impl std::fmt::Display for LabelWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelWarning::UnmatchedManifestId { id, label } => {
                write!(f, "manifest id {id:?} (class {label:?}) has no matching sequence")
            }
        }
    }
}

/// Parses manifest text into `(id, label)` pairs. Blank lines are skipped.
pub fn parse_manifest(text: &str, opts: &ManifestOptions) -> Result<Vec<(String, String)>> {
    let delim = opts.delimiter as char;
    let mut entries = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut lines = text.lines().enumerate();
    if opts.has_header {
        lines.next();
    }
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(delim).map(str::trim).collect();
        if cols.len() != 2 {
            return Err(Error::Manifest {
                line: line_no,
                message: format!("expected 2 columns, found {}", cols.len()),
            });
        }
        let (id, label) = (cols[0], cols[1]);
        if id.is_empty() || label.is_empty() {
            return Err(Error::Manifest {
                line: line_no,
                message: "empty id or label".into(),
            });
        }
        if let Some(prev) = seen.insert(id.to_string(), line_no) {
            return Err(Error::Manifest {
                line: line_no,
                message: format!("id {id:?} already listed on line {prev}"),
            });
        }
        entries.push((id.to_string(), label.to_string()));
    }
    Ok(entries)
}

/// Attaches manifest labels to parsed sequences.
pub fn load_labels(
    path: impl AsRef<Path>,
    sequences: Vec<Sequence>,
    opts: &ManifestOptions,
) -> Result<(LabeledDataset, Vec<LabelWarning>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    label_sequences(&parse_manifest(&text, opts)?, sequences, opts)
}

pub(crate) fn label_sequences(
    entries: &[(String, String)],
    sequences: Vec<Sequence>,
    opts: &ManifestOptions,
) -> Result<(LabeledDataset, Vec<LabelWarning>)> {
    let by_id: HashMap<&str, &str> = entries
        .iter()
        .map(|(i, l)| (i.as_str(), l.as_str()))
        .collect();
    let mut labels = Vec::with_capacity(sequences.len());
    for s in &sequences {
        match by_id.get(s.id()) {
            Some(l) => labels.push(*l),
            None => return Err(Error::MissingLabel(s.id().to_string())),
        }
    }
    let present: std::collections::HashSet<&str> = sequences.iter().map(Sequence::id).collect();
    let mut warnings = Vec::new();
    let mut classes: Vec<String> = Vec::new();
    for (id, label) in entries {
        if !present.contains(id.as_str()) {
            if opts.strict {
                return Err(Error::UnknownManifestId(id.clone()));
            }
            warnings.push(LabelWarning::UnmatchedManifestId {
                id: id.clone(),
                label: label.clone(),
            });
            continue;
        }
        if !classes.contains(label) {
            classes.push(label.clone());
        }
    }
    let labels: Vec<String> = labels.into_iter().map(str::to_string).collect();
    let ds = LabeledDataset::with_classes(sequences, &labels, classes)?;
    Ok((ds, warnings))
}
