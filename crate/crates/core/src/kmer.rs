//! K-mer count profiles.
//!
//! Words are packed two bits per base (A=0, C=1, G=2, T=3), most significant
//! base first, so a k-mer index lies in `[0, 4^k)`. Profiles store only the
//! non-zero counts, sorted by index. Any window that touches a byte outside
//! `ACGT` is skipped and tallied separately.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq_io::{Fragment, LabeledDataset};

pub const MAX_K: usize = 31;
/// Largest k accumulated into a dense `4^k` array.
pub const DENSE_MAX_K: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct KmerSpec {
    k: usize,
}

impl KmerSpec {
    pub fn new(k: usize) -> Result<Self> {
        if !(1..=MAX_K).contains(&k) {
            return Err(Error::InvalidK(k));
        }
        Ok(KmerSpec { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `m = 4^k`.
    pub fn vocabulary_size(&self) -> u64 {
        1u64 << (2 * self.k)
    }

    /// The (k-1) spec used for the lower half of a paired profile.
    pub fn lower(&self) -> Result<Self> {
        KmerSpec::new(self.k - 1)
    }

    fn mask(&self) -> u64 {
        self.vocabulary_size() - 1
    }
}

impl TryFrom<usize> for KmerSpec {
    type Error = Error;
    fn try_from(k: usize) -> Result<Self> {
        KmerSpec::new(k)
    }
}

impl From<KmerSpec> for usize {
    fn from(s: KmerSpec) -> usize {
        s.k
    }
}

#[inline]
pub fn base_code(b: u8) -> Option<u64> {
    match b {
        b'A' | b'a' => Some(0),
        b'C' | b'c' => Some(1),
        b'G' | b'g' => Some(2),
        b'T' | b't' => Some(3),
        _ => None,
    }
}

/// Packed index of an ACGT word; `None` if the word holds any other byte.
pub fn kmer_index(word: &[u8]) -> Option<u64> {
    if word.is_empty() || word.len() > MAX_K {
        return None;
    }
    word.iter()
        .try_fold(0u64, |acc, &b| base_code(b).map(|c| (acc << 2) | c))
}

/// Inverse of [`kmer_index`].
pub fn kmer_word(index: u64, k: usize) -> Vec<u8> {
    (0..k)
        .rev()
        .map(|i| b"ACGT"[((index >> (2 * i)) & 3) as usize])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Accumulator {
    /// Dense array for k ≤ [`DENSE_MAX_K`], sorted sparse otherwise.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KmerProfile {
    spec: KmerSpec,
    counts: Vec<(u64, u32)>,
    total: u64,
    skipped: u64,
}

impl KmerProfile {
    /// Builds a profile from explicit `(index, count)` entries. Zero counts are
    /// dropped; duplicate indices are summed.
    pub fn from_counts(spec: KmerSpec, entries: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut counts: Vec<(u64, u32)> = entries.into_iter().filter(|e| e.1 > 0).collect();
        counts.sort_unstable_by_key(|e| e.0);
        counts.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        if let Some(&(last, _)) = counts.last() {
            if last >= spec.vocabulary_size() {
                return Err(Error::InvalidParameter(format!(
                    "k-mer index {last} outside vocabulary of k = {}",
                    spec.k()
                )));
            }
        }
        let total = counts.iter().map(|e| e.1 as u64).sum();
        Ok(KmerProfile {
            spec,
            counts,
            total,
            skipped: 0,
        })
    }

    pub fn spec(&self) -> KmerSpec {
        self.spec
    }

    /// Non-zero counts in ascending index order.
    pub fn counts(&self) -> &[(u64, u32)] {
        &self.counts
    }

    pub fn get(&self, index: u64) -> u32 {
        self.counts
            .binary_search_by_key(&index, |e| e.0)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// Number of counted windows.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Windows dropped because they contained a non-ACGT byte.
    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn to_dense(&self) -> Vec<u32> {
        let mut v = vec![0u32; self.spec.vocabulary_size() as usize];
        for &(i, c) in &self.counts {
            v[i as usize] = c;
        }
        v
    }
}

/// Profile of the k-mers and (k-1)-mers of the same residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedProfile {
    pub upper: KmerProfile,
    pub lower: KmerProfile,
}

pub fn build_profile(residues: &[u8], spec: KmerSpec) -> Result<KmerProfile> {
    build_profile_with(residues, spec, Accumulator::Auto)
}

pub fn build_profile_with(residues: &[u8], spec: KmerSpec, acc: Accumulator) -> Result<KmerProfile> {
    let k = spec.k();
    if residues.len() < k {
        return Err(Error::SequenceTooShort {
            len: residues.len(),
            k,
        });
    }
    let windows = (residues.len() - k + 1) as u64;
    let dense = match acc {
        Accumulator::Auto => k <= DENSE_MAX_K,
        Accumulator::Dense => true,
        Accumulator::Sparse => false,
    };
    let counts = if dense {
        let mut table = vec![0u32; spec.vocabulary_size() as usize];
        for_each_kmer(residues, spec, |idx| table[idx as usize] += 1);
        table
            .into_iter()
            .enumerate()
            .filter(|e| e.1 > 0)
            .map(|(i, c)| (i as u64, c))
            .collect()
    } else {
        let mut codes = Vec::with_capacity(windows as usize);
        for_each_kmer(residues, spec, |idx| codes.push(idx));
        codes.sort_unstable();
        let mut counts: Vec<(u64, u32)> = Vec::new();
        for c in codes {
            match counts.last_mut() {
                Some(last) if last.0 == c => last.1 += 1,
                _ => counts.push((c, 1)),
            }
        }
        counts
    };
    let total: u64 = counts.iter().map(|e: &(u64, u32)| e.1 as u64).sum();
    Ok(KmerProfile {
        spec,
        counts,
        total,
        skipped: windows - total,
    })
}

/// Calls `f` with the index of every ACGT-only window, left to right.
fn for_each_kmer(residues: &[u8], spec: KmerSpec, mut f: impl FnMut(u64)) {
    let k = spec.k();
    let mask = spec.mask();
    let mut code = 0u64;
    let mut run = 0usize;
    for &b in residues {
        match base_code(b) {
            Some(c) => {
                code = ((code << 2) | c) & mask;
                run += 1;
                if run >= k {
                    f(code);
                }
            }
            None => {
                run = 0;
                code = 0;
            }
        }
    }
}

pub fn build_paired_profile(residues: &[u8], spec: KmerSpec) -> Result<PairedProfile> {
    if spec.k() < 2 {
        return Err(Error::InvalidParameter(
            "paired profiles need k ≥ 2".into(),
        ));
    }
    Ok(PairedProfile {
        upper: build_profile(residues, spec)?,
        lower: build_profile(residues, spec.lower()?)?,
    })
}

/// One profile per input item, in input order. `lower` holds the paired
/// (k-1)-mer profiles when the matrix was built for Markov models.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileMatrix {
    spec: KmerSpec,
    ids: Vec<String>,
    labels: Vec<usize>,
    classes: Vec<String>,
    rows: Vec<KmerProfile>,
    lower: Option<Vec<KmerProfile>>,
}

impl ProfileMatrix {
    /// Assembles a matrix from prebuilt rows.
    pub fn from_rows(
        spec: KmerSpec,
        ids: Vec<String>,
        labels: Vec<usize>,
        classes: Vec<String>,
        rows: Vec<KmerProfile>,
        lower: Option<Vec<KmerProfile>>,
    ) -> Result<Self> {
        let n = rows.len();
        if ids.len() != n || labels.len() != n || lower.as_ref().is_some_and(|l| l.len() != n) {
            return Err(Error::InvalidParameter("matrix row counts disagree".into()));
        }
        if rows.iter().any(|r| r.spec() != spec) {
            return Err(Error::InvalidParameter("rows built with different k".into()));
        }
        if let Some(lower) = &lower {
            let lspec = spec.lower()?;
            if lower.iter().any(|r| r.spec() != lspec) {
                return Err(Error::InvalidParameter("lower rows must use k - 1".into()));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes.len()) {
            return Err(Error::UnknownClass(bad.to_string()));
        }
        Ok(ProfileMatrix {
            spec,
            ids,
            labels,
            classes,
            rows,
            lower,
        })
    }

    pub fn spec(&self) -> KmerSpec {
        self.spec
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn rows(&self) -> &[KmerProfile] {
        &self.rows
    }

    pub fn lower_rows(&self) -> Option<&[KmerProfile]> {
        self.lower.as_deref()
    }

    pub fn is_paired(&self) -> bool {
        self.lower.is_some()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> ProfileMatrix {
        ProfileMatrix {
            spec: self.spec,
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            lower: self
                .lower
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Writes the text dump, one line per row.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (id, row) in self.ids.iter().zip(&self.rows) {
            out.write_all(format_dump_line(id, row).as_bytes())?;
        }
        Ok(())
    }
}

fn build_rows<'a>(
    items: &[(&'a str, &'a [u8])],
    spec: KmerSpec,
    paired: bool,
) -> Result<(Vec<KmerProfile>, Option<Vec<KmerProfile>>)> {
    if items.is_empty() {
        return Err(Error::EmptyInput("no sequences to featurize"));
    }
    let built: Vec<Result<(KmerProfile, Option<KmerProfile>)>> = items
        .par_iter()
        .map(|(id, residues)| {
            let out = if paired {
                build_paired_profile(residues, spec).map(|p| (p.upper, Some(p.lower)))
            } else {
                build_profile(residues, spec).map(|p| (p, None))
            };
            out.map_err(|e| e.for_item(id))
        })
        .collect();
    let mut rows = Vec::with_capacity(built.len());
    let mut lower = Vec::new();
    for r in built {
        let (u, l) = r?;
        rows.push(u);
        lower.extend(l);
    }
    Ok((rows, paired.then_some(lower)))
}

/// Featurizes every sequence of a dataset, preserving order.
pub fn build_matrix(dataset: &LabeledDataset, spec: KmerSpec, paired: bool) -> Result<ProfileMatrix> {
    let items: Vec<(&str, &[u8])> = dataset
        .sequences()
        .iter()
        .map(|s| (s.id(), s.residues()))
        .collect();
    let (rows, lower) = build_rows(&items, spec, paired)?;
    Ok(ProfileMatrix {
        spec,
        ids: dataset.sequences().iter().map(|s| s.id().to_string()).collect(),
        labels: dataset.labels().to_vec(),
        classes: dataset.classes().to_vec(),
        rows,
        lower,
    })
}

/// Featurizes sampled fragments. Row ids are `parent:offset`.
pub fn build_fragment_matrix(
    fragments: &[Fragment],
    classes: &[String],
    spec: KmerSpec,
    paired: bool,
) -> Result<ProfileMatrix> {
    let ids: Vec<String> = fragments
        .iter()
        .map(|f| format!("{}:{}", f.parent_id, f.offset))
        .collect();
    let items: Vec<(&str, &[u8])> = ids
        .iter()
        .zip(fragments)
        .map(|(id, f)| (id.as_str(), f.residues.as_slice()))
        .collect();
    let (rows, lower) = build_rows(&items, spec, paired)?;
    ProfileMatrix::from_rows(
        spec,
        ids,
        fragments.iter().map(|f| f.label).collect(),
        classes.to_vec(),
        rows,
        lower,
    )
}

/// `id<TAB>k<TAB>index:count,...` with ascending indices and a trailing newline.
pub fn format_dump_line(id: &str, profile: &KmerProfile) -> String {
    let mut line = format!("{id}\t{}\t", profile.spec().k());
    for (n, (i, c)) in profile.counts().iter().enumerate() {
        if n > 0 {
            line.push(',');
        }
        let _ = write!(line, "{i}:{c}");
    }
    line.push('\n');
    line
}

/// Parses the profile dump format. Indices must be strictly ascending and
/// inside the vocabulary; counts must be positive.
pub fn parse_profile_dump(text: &str) -> Result<Vec<(String, KmerProfile)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::ProfileDump {
            line: line_no,
            message,
        };
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(id), Some(k), Some(body), None) = (cols.next(), cols.next(), cols.next(), cols.next())
        else {
            return Err(err("expected 3 tab-separated columns".into()));
        };
        if id.is_empty() {
            return Err(err("empty id".into()));
        }
        let k: usize = k.parse().map_err(|_| err(format!("bad k {k:?}")))?;
        let spec = KmerSpec::new(k).map_err(|e| err(e.to_string()))?;
        let mut counts = Vec::new();
        let mut prev: Option<u64> = None;
        for entry in body.split(',').filter(|e| !e.is_empty()) {
            let (idx, c) = entry
                .split_once(':')
                .ok_or_else(|| err(format!("bad entry {entry:?}")))?;
            let idx: u64 = idx.parse().map_err(|_| err(format!("bad index {idx:?}")))?;
            let c: u32 = c.parse().map_err(|_| err(format!("bad count {c:?}")))?;
            if c == 0 {
                return Err(err("zero count".into()));
            }
            if idx >= spec.vocabulary_size() {
                return Err(err(format!("index {idx} outside 4^{k}")));
            }
            if prev.is_some_and(|p| p >= idx) {
                return Err(err("indices not strictly ascending".into()));
            }
            prev = Some(idx);
            counts.push((idx, c));
        }
        out.push((id.to_string(), KmerProfile::from_counts(spec, counts)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq_io::Sequence;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn spec(k: usize) -> KmerSpec {
        KmerSpec::new(k).unwrap()
    }

    /// Straightforward oracle: slide over every window, skip any holding a
    /// non-ACGT byte.
    fn window_scan(s: &[u8], k: usize) -> BTreeMap<Vec<u8>, u32> {
        let mut m = BTreeMap::new();
        for w in s.windows(k) {
            if w.iter().all(|b| b"ACGT".contains(b)) {
                *m.entry(w.to_vec()).or_insert(0) += 1;
            }
        }
        m
    }

    fn as_words(p: &KmerProfile) -> BTreeMap<Vec<u8>, u32> {
        p.counts()
            .iter()
            .map(|&(i, c)| (kmer_word(i, p.spec().k()), c))
            .collect()
    }

    #[test]
    fn index_examples() {
        assert_eq!(kmer_index(b"AA"), Some(0));
        assert_eq!(kmer_index(b"TT"), Some(15));
        assert_eq!(kmer_index(b"CGT"), Some(27));
        assert_eq!(kmer_index(b"CNT"), None);
        assert_eq!(kmer_word(27, 3), b"CGT");
    }

    #[test]
    fn spec_range() {
        assert!(KmerSpec::new(0).is_err());
        assert!(KmerSpec::new(32).is_err());
        assert_eq!(spec(31).vocabulary_size(), 1 << 62);
        assert_eq!(spec(4).vocabulary_size(), 256);
    }

    #[test]
    fn profile_examples() {
        let p = build_profile(b"ACGTA", spec(2)).unwrap();
        assert_eq!(p.total(), 4);
        assert_eq!(p.counts(), &[(1, 1), (6, 1), (11, 1), (12, 1)]);

        let p = build_profile(b"AAAA", spec(2)).unwrap();
        assert_eq!(p.counts(), &[(0, 3)]);
        assert_eq!(p.total(), 3);

        let p = build_profile(b"ACNGT", spec(2)).unwrap();
        assert_eq!(as_words(&p), window_scan(b"ACNGT", 2));
        assert_eq!(p.total(), 2);
        assert_eq!(p.skipped(), 2);
    }

    #[test]
    fn too_short_is_distinct_from_empty() {
        assert!(matches!(
            build_profile(b"AC", spec(3)),
            Err(Error::SequenceTooShort { len: 2, k: 3 })
        ));
        let p = build_profile(b"NNN", spec(3)).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.skipped(), 1);
    }

    #[test]
    fn paired_examples() {
        let p = build_paired_profile(b"ACGT", spec(2)).unwrap();
        assert_eq!(p.upper.counts(), &[(1, 1), (6, 1), (11, 1)]);
        assert_eq!(p.lower.counts(), &[(0, 1), (1, 1), (2, 1), (3, 1)]);

        let p = build_paired_profile(b"AAA", spec(2)).unwrap();
        assert_eq!(p.upper.counts(), &[(0, 2)]);
        assert_eq!(p.lower.counts(), &[(0, 3)]);

        let p = build_paired_profile(b"ACGTACGT", spec(3)).unwrap();
        assert_eq!(as_words(&p.upper), window_scan(b"ACGTACGT", 3));
        assert_eq!(as_words(&p.lower), window_scan(b"ACGTACGT", 2));

        assert!(build_paired_profile(b"ACGT", spec(1)).is_err());
    }

    fn toy_dataset(n: usize) -> LabeledDataset {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(5, 0);
        let seqs: Vec<Sequence> = (0..n)
            .map(|i| {
                let len = rng.random_range(20..200);
                let r: Vec<u8> = (0..len).map(|_| b"ACGTN"[rng.random_range(0..5)]).collect();
                Sequence::new(format!("s{i}"), r).unwrap()
            })
            .collect();
        let labels: Vec<String> = (0..n).map(|i| format!("c{}", i % 3)).collect();
        LabeledDataset::new(seqs, &labels).unwrap()
    }

    #[test]
    fn matrix_rows_match_single_profiles() {
        let ds = toy_dataset(10);
        let m = build_matrix(&ds, spec(5), true).unwrap();
        assert_eq!(m.len(), 10);
        assert_eq!(m.labels(), ds.labels());
        for (i, s) in ds.sequences().iter().enumerate() {
            assert_eq!(m.rows()[i], build_profile(s.residues(), spec(5)).unwrap());
            assert_eq!(m.lower_rows().unwrap()[i], build_profile(s.residues(), spec(4)).unwrap());
        }
    }

    #[test]
    fn matrix_errors_name_item() {
        let ds = LabeledDataset::new(
            vec![
                Sequence::new("ok", b"ACGTACGT".to_vec()).unwrap(),
                Sequence::new("tiny", b"AC".to_vec()).unwrap(),
            ],
            &["a", "b"],
        )
        .unwrap();
        let err = build_matrix(&ds, spec(4), false).unwrap_err();
        assert!(err.to_string().contains("tiny"));
    }

    #[test]
    fn matrix_select_and_order_equivariance() {
        let ds = toy_dataset(9);
        let m = build_matrix(&ds, spec(3), false).unwrap();
        let perm = [8, 2, 5, 0, 1, 7, 3, 6, 4];
        let seqs: Vec<Sequence> = perm.iter().map(|&i| ds.sequences()[i].clone()).collect();
        let labels: Vec<String> = perm.iter().map(|&i| ds.classes()[ds.labels()[i]].clone()).collect();
        let permuted = LabeledDataset::with_classes(seqs, &labels, ds.classes().to_vec()).unwrap();
        let pm = build_matrix(&permuted, spec(3), false).unwrap();
        assert_eq!(pm, m.select(&perm));
    }

    #[test]
    fn dump_round_trip_and_rejects() {
        let p = build_profile(b"ACGTTGCA", spec(2)).unwrap();
        let line = format_dump_line("x", &p);
        assert_eq!(line, "x\t2\t1:1,4:1,6:1,9:1,11:1,14:1,15:1\n");
        let parsed = parse_profile_dump(&line).unwrap();
        assert_eq!(parsed[0].0, "x");
        assert_eq!(parsed[0].1.counts(), p.counts());

        assert!(parse_profile_dump("x\t2\t3:1,1:1\n").is_err());
        assert!(parse_profile_dump("x\t2\t16:1\n").is_err());
        assert!(parse_profile_dump("x\t2\t1:0\n").is_err());
        assert!(parse_profile_dump("x\t40\t\n").is_err());
        assert_eq!(parse_profile_dump("x\t3\t\n").unwrap()[0].1.total(), 0);
    }

    proptest! {
        #[test]
        fn matches_window_scan(s in "[ACGTN]{0,300}", k in 1usize..=10) {
            let s = s.into_bytes();
            prop_assume!(s.len() >= k);
            let p = build_profile(&s, spec(k)).unwrap();
            prop_assert_eq!(as_words(&p), window_scan(&s, k));
            prop_assert_eq!(p.total() + p.skipped(), (s.len() - k + 1) as u64);
        }

        #[test]
        fn dense_equals_sparse(s in "[ACGTNR]{1,400}", k in 1usize..=8) {
            let s = s.into_bytes();
            prop_assume!(s.len() >= k);
            let d = build_profile_with(&s, spec(k), Accumulator::Dense).unwrap();
            let sp = build_profile_with(&s, spec(k), Accumulator::Sparse).unwrap();
            prop_assert_eq!(d, sp);
        }

        #[test]
        fn locality_of_prefix(a in "[ACGT]{5,100}", b in "[ACGTN]{0,100}", k in 1usize..=5) {
            let joined = [a.as_bytes(), b.as_bytes()].concat();
            let pa = build_profile(a.as_bytes(), spec(k)).unwrap();
            let full = build_profile(&joined, spec(k)).unwrap();
            // every word counted inside the prefix is also counted in the whole
            for &(i, c) in pa.counts() {
                prop_assert!(full.get(i) >= c);
            }
            let inside = build_profile(&joined[..a.len()], spec(k)).unwrap();
            prop_assert_eq!(inside, pa);
        }

        #[test]
        fn dump_round_trips(s in "[ACGT]{12,200}", k in 1usize..=12) {
            let p = build_profile(s.as_bytes(), spec(k)).unwrap();
            let parsed = parse_profile_dump(&format_dump_line("r", &p)).unwrap();
            prop_assert_eq!(parsed[0].1.counts(), p.counts());
        }
    }
}
