use crate::gf::PrimeFieldCtx;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: matrix is {matrix}, vector has {vector}")]
    Dimension { matrix: usize, vector: usize },
    #[error("Berlekamp–Massey: power-series inverse does not exist (singular case)")]
    Singular,
    #[error("Wiedemann gave up after {0} auxiliary primes")]
    Exhausted(usize),
    #[error("characteristic polynomial completion failed")]
    Incomplete,
}

/// Square matrix with small signed integer entries, stored by rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSignedMatrix {
    n: usize,
    rows: Vec<Vec<(usize, i64)>>,
}

impl SparseSignedMatrix {
    /// Rows are sorted by column and zero entries dropped.
    pub fn new(n: usize, mut rows: Vec<Vec<(usize, i64)>>) -> Self {
        assert_eq!(rows.len(), n, "row count");
        for r in rows.iter_mut() {
            r.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(r.len());
            for &(c, v) in r.iter() {
                assert!(c < n, "column {c} out of range");
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *r = merged;
        }
        Self { n, rows }
    }

    pub fn from_dense(m: &[Vec<i64>]) -> Self {
        let rows = m
            .iter()
            .map(|r| r.iter().enumerate().filter(|e| *e.1 != 0).map(|(c, &v)| (c, v)).collect())
            .collect();
        Self::new(m.len(), rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| vec![(i, 1)]).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i].binary_search_by_key(&j, |e| e.0).map_or(0, |k| self.rows[i][k].1)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.n]; self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                m[i][c] = v;
            }
        }
        m
    }

    pub fn to_dense_mod(&self, f: &PrimeFieldCtx) -> Vec<Vec<u64>> {
        self.to_dense().iter().map(|r| r.iter().map(|&x| f.reduce_i64(x)).collect()).collect()
    }

    /// M v over F_ν.
    pub fn matvec(&self, f: &PrimeFieldCtx, v: &[u64]) -> Result<Vec<u64>, LinalgError> {
        if v.len() != self.n {
            return Err(LinalgError::Dimension { matrix: self.n, vector: v.len() });
        }
        Ok(self.matvec_unchecked(f, v))
    }

    pub(crate) fn matvec_unchecked(&self, f: &PrimeFieldCtx, v: &[u64]) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| {
                let acc: i128 = r.iter().map(|&(c, x)| x as i128 * v[c] as i128).sum();
                f.reduce_i128(acc)
            })
            .collect()
    }

    /// M v over Z.
    pub fn matvec_int(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.n {
            return Err(LinalgError::Dimension { matrix: self.n, vector: v.len() });
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().fold(BigInt::zero(), |acc, &(c, x)| acc + &v[c] * x))
            .collect())
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// tr(M²) = Σ_{i,j} M_ij M_ji, without forming M².
    pub fn trace_of_square(&self) -> i128 {
        let mut s = 0i128;
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, x) in r {
                s += x as i128 * self.get(j, i) as i128;
            }
        }
        s
    }

    /// M + kI
    pub fn shifted(&self, k: i64) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                r.push((i, k));
                r
            })
            .collect();
        Self::new(self.n, rows)
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                rows[c].push((i, v));
            }
        }
        Self::new(self.n, rows)
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.rows.iter().flatten().map(|e| e.1.abs()).max().unwrap_or(0)
    }
}
