//! Vandermonde MDS code over GF(256).

use super::gf256::{mul_add_slice, Gf256};
use crate::error::{Error, Result};

/// Codes longer than this are rejected by the simulator.
pub const MAX_LENGTH: usize = 64;

/// Constructor-time MDS verification is exhaustive up to this many column
/// subsets and a deterministic sample beyond it.
const EXHAUSTIVE_SUBSETS: u128 = 4096;
const SAMPLED_SUBSETS: usize = 256;

pub type Matrix = Vec<Vec<Gf256>>;

/// Length-`v`, dimension-`m` code. Column `c` of the `m × v` generator is
/// `(1, c, c^2, …, c^{m-1})`; distinct evaluation points make every `m × m`
/// column submatrix invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsCode {
    length: usize,
    dimension: usize,
    generator: Matrix,
}

impl MdsCode {
    pub fn new(length: usize, dimension: usize) -> Result<Self> {
        if dimension == 0 || dimension > length {
            return Err(Error::Argument(format!(
                "MDS dimension {dimension} must be in 1..={length}"
            )));
        }
        if length > MAX_LENGTH {
            return Err(Error::Argument(format!(
                "MDS length {length} exceeds {MAX_LENGTH}"
            )));
        }
        let generator = (0..dimension)
            .map(|r| (0..length).map(|c| Gf256(c as u8).pow(r)).collect())
            .collect();
        let code = MdsCode {
            length,
            dimension,
            generator,
        };
        code.verify_at_construction()?;
        Ok(code)
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// Square submatrix formed by the given generator columns.
    pub fn submatrix(&self, columns: &[usize]) -> Matrix {
        self.generator
            .iter()
            .map(|row| columns.iter().map(|&c| row[c]).collect())
            .collect()
    }

    fn verify_at_construction(&self) -> Result<()> {
        let (v, m) = (self.length, self.dimension);
        let check = |cols: &[usize]| -> Result<()> {
            if invert(&self.submatrix(cols)).is_none() {
                return Err(Error::Internal(format!("generator columns {cols:?} are singular")));
            }
            Ok(())
        };
        if binomial(v, m) <= EXHAUSTIVE_SUBSETS {
            for_each_subset(v, m, |cols| check(cols))
        } else {
            // Deterministic xorshift sample.
            let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ ((v as u64) << 8 | m as u64);
            for _ in 0..SAMPLED_SUBSETS {
                let mut pool: Vec<usize> = (0..v).collect();
                for i in 0..m {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    let j = i + (state % (v - i) as u64) as usize;
                    pool.swap(i, j);
                }
                let mut cols = pool[..m].to_vec();
                cols.sort_unstable();
                check(&cols)?;
            }
            Ok(())
        }
    }

    /// `m` source packets of equal length into `v` coded packets.
    pub fn encode(&self, source: &[Vec<u8>]) -> Vec<Vec<u8>> {
        assert_eq!(source.len(), self.dimension, "wrong number of source packets");
        let len = source.first().map_or(0, Vec::len);
        (0..self.length)
            .map(|c| {
                let mut out = vec![0u8; len];
                for (r, src) in source.iter().enumerate() {
                    mul_add_slice(&mut out, src, self.generator[r][c]);
                }
                out
            })
            .collect()
    }

    /// Recovers the source packets from exactly `m` distinct coded packets.
    pub fn decode(&self, packets: &[(usize, &[u8])]) -> Result<Vec<Vec<u8>>> {
        if packets.len() != self.dimension {
            return Err(Error::Argument(format!(
                "decoding needs exactly {} packets, got {}",
                self.dimension,
                packets.len()
            )));
        }
        let cols: Vec<usize> = packets.iter().map(|&(c, _)| c).collect();
        // coded_i = Σ_r G[r][c_i] · src_r, so src = (Gᵀ restricted)^{-1} · coded.
        let sub = self.submatrix(&cols);
        let transposed: Matrix = (0..self.dimension)
            .map(|i| (0..self.dimension).map(|r| sub[r][i]).collect())
            .collect();
        let inv = invert(&transposed)
            .ok_or_else(|| Error::Internal(format!("generator columns {cols:?} are singular")))?;
        let len = packets[0].1.len();
        Ok(inv
            .iter()
            .map(|row| {
                let mut out = vec![0u8; len];
                for (coef, &(_, data)) in row.iter().zip(packets) {
                    mul_add_slice(&mut out, data, *coef);
                }
                out
            })
            .collect())
    }
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Gf256::ONE } else { Gf256::ZERO }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != Gf256::ZERO)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col].inv()?;
        for j in 0..n {
            a[col][j] *= scale;
            inv[col][j] *= scale;
        }
        for r in 0..n {
            if r == col || a[r][col] == Gf256::ZERO {
                continue;
            }
            let f = a[r][col];
            for j in 0..n {
                let (x, y) = (a[col][j], inv[col][j]);
                a[r][j] += f * x;
                inv[r][j] += f * y;
            }
        }
    }
    Some(inv)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset<E>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> std::result::Result<(), E>,
) -> std::result::Result<(), E> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return Ok(());
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}
