use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Cursor, Write};
use std::path::Path;

use super::Sequence;
use crate::error::{Error, Result};

/// Reads every record of a FASTA file. An empty file is an error.
pub fn parse_fasta(path: impl AsRef<Path>) -> Result<Vec<Sequence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_fasta(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn parse_fasta_bytes(data: &[u8]) -> Result<Vec<Sequence>> {
    read_fasta(Cursor::new(data))
}

pub fn read_fasta<R: BufRead>(reader: R) -> Result<Vec<Sequence>> {
    let records = read_fasta_allow_empty(reader)?;
    if records.is_empty() {
        return Err(Error::EmptyFasta);
    }
    Ok(records)
}

/// Like [`read_fasta`] but zero records is a valid result.
pub fn read_fasta_allow_empty<R: BufRead>(mut reader: R) -> Result<Vec<Sequence>> {
    let mut records = Vec::new();
    let mut ids: HashSet<String> = HashSet::new();
    let mut current: Option<(String, Vec<u8>)> = None;
    let mut line = Vec::new();
    let mut line_no = 0usize;

    let mut finish = |rec: (String, Vec<u8>), records: &mut Vec<Sequence>| -> Result<()> {
        let (id, residues) = rec;
        if residues.is_empty() {
            return Err(Error::EmptySequence { id });
        }
        if !ids.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        records.push(Sequence::new(id, residues)?);
        Ok(())
    };

    loop {
        line.clear();
        let n = reader
            .read_until(b'\n', &mut line)
            .map_err(|e| Error::io("<fasta>", e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        while matches!(line.last(), Some(b'\n' | b'\r')) {
            line.pop();
        }
        if let Some(header) = line.strip_prefix(b">") {
            if let Some(rec) = current.take() {
                finish(rec, &mut records)?;
            }
            let text = String::from_utf8_lossy(header);
            let id = text.split_whitespace().next().unwrap_or("");
            if id.is_empty() {
                return Err(Error::EmptyIdentifier { line: line_no });
            }
            current = Some((id.to_string(), Vec::new()));
        } else {
            let body = line.iter().copied().filter(|b| !b.is_ascii_whitespace());
            match current.as_mut() {
                Some((_, residues)) => residues.extend(body.map(|b| b.to_ascii_uppercase())),
                None => {
                    if body.count() > 0 {
                        return Err(Error::OrphanSequence { line: line_no });
                    }
                }
            }
        }
    }
    if let Some(rec) = current.take() {
        finish(rec, &mut records)?;
    }
    Ok(records)
}

/// Writes records wrapped at `line_width` residues (0 disables wrapping).
pub fn write_fasta<W: Write>(mut out: W, sequences: &[Sequence], line_width: usize) -> std::io::Result<()> {
    for s in sequences {
        writeln!(out, ">{}", s.id())?;
        if line_width == 0 {
            out.write_all(s.residues())?;
            out.write_all(b"\n")?;
        } else {
            for chunk in s.residues().chunks(line_width) {
                out.write_all(chunk)?;
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_record() {
        let seqs = parse_fasta_bytes(b">s1\nACGT\n").unwrap();
        assert_eq!(seqs.len(), 1);
        assert_eq!(seqs[0].id(), "s1");
        assert_eq!(seqs[0].residues(), b"ACGT");
        assert_eq!(seqs[0].len(), 4);
    }

    #[test]
    fn wrapped_lines_and_crlf() {
        let seqs = parse_fasta_bytes(b">s1 some description\r\nAC\r\ngt\r\n>s2\nTTTT\n").unwrap();
        assert_eq!(seqs.len(), 2);
        assert_eq!(seqs[0].id(), "s1");
        assert_eq!(seqs[0].residues(), b"ACGT");
        assert_eq!(seqs[1].len(), 4);
    }

    #[test]
    fn empty_record_is_error() {
        assert!(matches!(
            parse_fasta_bytes(b">s1\n\n"),
            Err(Error::EmptySequence { id }) if id == "s1"
        ));
    }

    #[test]
    fn empty_file_is_error() {
        assert!(matches!(parse_fasta_bytes(b""), Err(Error::EmptyFasta)));
        assert!(read_fasta_allow_empty(Cursor::new(b"\n\n")).unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_is_error() {
        assert!(matches!(
            parse_fasta_bytes(b">a\nAC\n>a\nGT\n"),
            Err(Error::DuplicateId(id)) if id == "a"
        ));
    }

    #[test]
    fn data_before_header_is_error() {
        assert!(matches!(
            parse_fasta_bytes(b"ACGT\n>a\nAC\n"),
            Err(Error::OrphanSequence { line: 1 })
        ));
    }

    #[test]
    fn missing_file_names_path() {
        let err = parse_fasta("/nonexistent/x.fa").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.fa"));
    }

    fn arb_sequences() -> impl Strategy<Value = Vec<Sequence>> {
        prop::collection::vec("[ACGTNRY]{1,200}", 1..8).prop_map(|bodies| {
            bodies
                .into_iter()
                .enumerate()
                .map(|(i, b)| Sequence::new(format!("seq{i}"), b.into_bytes()).unwrap())
                .collect()
        })
    }

    proptest! {
        #[test]
        fn write_then_parse_round_trips(seqs in arb_sequences(), width in 0usize..80) {
            let mut buf = Vec::new();
            write_fasta(&mut buf, &seqs, width).unwrap();
            prop_assert_eq!(parse_fasta_bytes(&buf).unwrap(), seqs);
        }
    }
}
