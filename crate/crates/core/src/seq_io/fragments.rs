use rand::seq::index;

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// A fixed-length window cut from a parent sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub parent_id: String,
    /// Index of the parent in the source dataset.
    pub parent_index: usize,
    pub offset: usize,
    pub residues: Vec<u8>,
    pub label: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FragmentSample {
    pub fragments: Vec<Fragment>,
    /// Classes for which no sequence was long enough to yield a fragment.
    pub empty_classes: Vec<usize>,
}

/// Samples up to `max_per_class` fragments per class from every sequence of
/// the dataset. See [`sample_fragments_from`].
pub fn sample_fragments(
    dataset: &LabeledDataset,
    fragment_length: usize,
    max_per_class: usize,
    seed: u64,
) -> Result<FragmentSample> {
    let all: Vec<usize> = (0..dataset.len()).collect();
    sample_fragments_from(dataset, &all, fragment_length, max_per_class, seed)
}

/// Samples fragments from the sequences at `indices` only.
///
/// Per class, the valid start offsets of all member sequences are pooled and
/// `min(max_per_class, pool size)` distinct offsets are drawn uniformly
/// without replacement, so each sequence receives fragments in proportion to
/// its number of valid offsets. Each class draws from its own random stream,
/// and the output is ordered by class, then parent position, then offset.
pub fn sample_fragments_from(
    dataset: &LabeledDataset,
    indices: &[usize],
    fragment_length: usize,
    max_per_class: usize,
    seed: u64,
) -> Result<FragmentSample> {
    if fragment_length < 1 {
        return Err(Error::InvalidParameter("fragment length must be ≥ 1".into()));
    }
    if max_per_class < 1 {
        return Err(Error::InvalidParameter("max fragments per class must be ≥ 1".into()));
    }
    if indices.is_empty() {
        return Err(Error::EmptyInput("no sequences to fragment"));
    }
    let seqs = dataset.sequences();
    let labels = dataset.labels();
    let mut out = FragmentSample::default();

    for class in 0..dataset.classes().len() {
        // (dataset index, cumulative offset count before it)
        let mut pool: Vec<(usize, usize)> = Vec::new();
        let mut total = 0usize;
        let mut has_member = false;
        for &i in indices.iter().filter(|&&i| labels[i] == class) {
            has_member = true;
            let len = seqs[i].len();
            if len >= fragment_length {
                pool.push((i, total));
                total += len - fragment_length + 1;
            }
        }
        if !has_member {
            continue;
        }
        if total == 0 {
            out.empty_classes.push(class);
            continue;
        }
        let count = max_per_class.min(total);
        let mut rng = stream_rng(seed, class as u64);
        let mut picks = index::sample(&mut rng, total, count).into_vec();
        picks.sort_unstable();

        let mut slot = 0;
        for p in picks {
            while slot + 1 < pool.len() && pool[slot + 1].1 <= p {
                slot += 1;
            }
            let (parent, base) = pool[slot];
            let offset = p - base;
            let s = &seqs[parent];
            out.fragments.push(Fragment {
                parent_id: s.id().to_string(),
                parent_index: parent,
                offset,
                residues: s.residues()[offset..offset + fragment_length].to_vec(),
                label: class,
            });
        }
    }
    Ok(out)
}
