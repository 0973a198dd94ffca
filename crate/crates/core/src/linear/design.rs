use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmer::KmerProfile;

/// Sorted list of the k-mer indices that own a weight column.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureIndex {
    kmers: Vec<u64>,
}

impl FeatureIndex {
    /// Union of the words seen in `rows`.
    pub fn from_profiles(rows: &[KmerProfile]) -> Self {
        let mut kmers: Vec<u64> = rows
            .iter()
            .flat_map(|r| r.counts().iter().map(|e| e.0))
            .collect();
        kmers.sort_unstable();
        kmers.dedup();
        FeatureIndex { kmers }
    }

    pub fn len(&self) -> usize {
        self.kmers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kmers.is_empty()
    }

    pub fn kmers(&self) -> &[u64] {
        &self.kmers
    }

    pub fn column(&self, kmer: u64) -> Option<usize> {
        self.kmers.binary_search(&kmer).ok()
    }

    /// Sparse `(column, value)` form of a profile; words outside the index
    /// are dropped.
    pub fn map_profile(&self, profile: &KmerProfile) -> Vec<(u32, f64)> {
        // both sides are sorted, so a merge walk suffices
        let mut out = Vec::with_capacity(profile.distinct().min(self.kmers.len()));
        let mut j = 0usize;
        for &(kmer, count) in profile.counts() {
            while j < self.kmers.len() && self.kmers[j] < kmer {
                j += 1;
            }
            if j == self.kmers.len() {
                break;
            }
            if self.kmers[j] == kmer {
                out.push((j as u32, count as f64));
            }
        }
        out
    }
}

/// Row-compressed design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl Design {
    pub fn from_profiles(rows: &[KmerProfile], features: &FeatureIndex) -> Self {
        let mut d = Design {
            n_cols: features.len(),
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        };
        for r in rows {
            for (c, v) in features.map_profile(r) {
                d.indices.push(c);
                d.values.push(v);
            }
            d.indptr.push(d.indices.len());
        }
        d
    }

    /// Dense rows; exact zeros are not stored.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut d = Design {
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        };
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::InvalidParameter("ragged dense rows".into()));
            }
            for (j, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i });
                }
                if v != 0.0 {
                    d.indices.push(j as u32);
                    d.values.push(v);
                }
            }
            d.indptr.push(d.indices.len());
        }
        Ok(d)
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b]
            .iter()
            .zip(&self.values[a..b])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        self.row(i).map(|(c, v)| v * w[c]).sum()
    }

    /// `out = Xᵀ r`.
    pub fn transpose_mul(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for (c, v) in self.row(i) {
                out[c] += v * ri;
            }
        }
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n_cols];
        for (&c, &v) in self.indices.iter().zip(&self.values) {
            m[c as usize] += v;
        }
        let n = self.n_rows().max(1) as f64;
        m.iter_mut().for_each(|x| *x /= n);
        m
    }

    pub fn check_finite(&self) -> Result<()> {
        for i in 0..self.n_rows() {
            if self.row(i).any(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { row: i });
            }
        }
        Ok(())
    }
}
