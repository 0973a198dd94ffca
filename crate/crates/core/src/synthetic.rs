//! Seeded synthetic datasets: each class has an ancestor drawn from its own
//! random Markov chain, and members are point-mutated copies of it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::stream_rng;
use crate::seq_io::{LabeledDataset, Sequence};

const BASES: [u8; 4] = *b"ACGT";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_classes: usize,
    pub per_class: usize,
    pub length: usize,
    /// Context length of the class generators.
    pub order: usize,
    /// Per-base substitution probability applied to each member.
    pub substitution_rate: f64,
    /// Exponent applied to uniform transition weights; larger is peakier.
    pub skew: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_classes: 4,
            per_class: 10,
            length: 3000,
            order: 2,
            substitution_rate: 0.1,
            skew: 2.0,
            seed: 1,
        }
    }
}

fn pick<R: Rng>(rng: &mut R, weights: &[f64; 4]) -> usize {
    let mut u = rng.random::<f64>() * weights.iter().sum::<f64>();
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    3
}

/// Random sequence from an order-`order` chain with transition table
/// `table[context]`.
fn walk<R: Rng>(rng: &mut R, table: &[[f64; 4]], order: usize, length: usize) -> Vec<u8> {
    let mask = (1usize << (2 * order)) - 1;
    let mut ctx = 0usize;
    let mut out = Vec::with_capacity(length);
    for i in 0..length {
        let b = if i < order {
            rng.random_range(0..4)
        } else {
            pick(rng, &table[ctx])
        };
        ctx = ((ctx << 2) | b) & mask;
        out.push(BASES[b]);
    }
    out
}

/// Class `c` is named `C{c+1}`; members are `C{c+1}_{j+1}`. Deterministic
/// given the configuration.
pub fn generate(cfg: &SyntheticConfig) -> Result<LabeledDataset> {
    let mut seqs = Vec::new();
    let mut labels = Vec::new();
    for c in 0..cfg.n_classes {
        let mut rng = stream_rng(cfg.seed, c as u64);
        let table: Vec<[f64; 4]> = (0..1usize << (2 * cfg.order))
            .map(|_| std::array::from_fn(|_| rng.random::<f64>().powf(cfg.skew) + 1e-3))
            .collect();
        let ancestor = walk(&mut rng, &table, cfg.order, cfg.length);
        for j in 0..cfg.per_class {
            let mut s = ancestor.clone();
            for b in s.iter_mut() {
                if rng.random::<f64>() < cfg.substitution_rate {
                    // substitute with one of the three other bases
                    let cur = BASES.iter().position(|x| x == b).unwrap();
                    *b = BASES[(cur + rng.random_range(1..4)) % 4];
                }
            }
            let name = format!("C{}", c + 1);
            seqs.push(Sequence::new(format!("{name}_{}", j + 1), s)?);
            labels.push(name);
        }
    }
    LabeledDataset::new(seqs, &labels)
}
