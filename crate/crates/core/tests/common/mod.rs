#![allow(dead_code)]

use frcode::{FrCode, IncidenceStructure};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Random `(n, α, v, ρ)` code with `n, v ≤ max`: start from a circulant
/// layout with the right row and column sums, then scramble it with random
/// 2×2 switches, which preserve both degree sequences.
pub fn random_fr_code(rng: &mut impl Rng, max: usize) -> FrCode {
    loop {
        let n = rng.random_range(2..=max);
        let v = rng.random_range(2..=max);
        let alphas: Vec<usize> = (1..=v).filter(|a| (n * a) % v == 0).collect();
        // Prefer non-trivial block sizes when there is a choice.
        let nontrivial: Vec<usize> = alphas.iter().copied().filter(|&a| a < v).collect();
        let pool = if nontrivial.is_empty() { &alphas } else { &nontrivial };
        let Some(&alpha) = pool.choose(rng) else { continue };
        let rho = n * alpha / v;
        if rho > n {
            continue;
        }
        let mut m: Vec<Vec<u8>> = (0..n)
            .map(|i| {
                let mut row = vec![0u8; v];
                for j in 0..alpha {
                    row[(i * alpha + j) % v] = 1;
                }
                row
            })
            .collect();
        for _ in 0..20 * n * v {
            let (r1, r2) = (rng.random_range(0..n), rng.random_range(0..n));
            let (c1, c2) = (rng.random_range(0..v), rng.random_range(0..v));
            if m[r1][c1] == 1 && m[r2][c2] == 1 && m[r1][c2] == 0 && m[r2][c1] == 0 {
                m[r1][c1] = 0;
                m[r2][c2] = 0;
                m[r1][c2] = 1;
                m[r2][c1] = 1;
            }
        }
        let s = IncidenceStructure::from_matrix(&m).unwrap();
        let code = frcode::validate_fr(&s).expect("switches preserve regularity");
        assert_eq!((code.alpha(), code.rho()), (alpha, rho));
        return code;
    }
}

/// Arbitrary zero-one matrix; rows and columns may be empty.
pub fn random_structure(rng: &mut impl Rng, max: usize) -> IncidenceStructure {
    let n = rng.random_range(1..=max);
    let v = rng.random_range(1..=max);
    let density: f64 = rng.random_range(0.1..0.9);
    let m: Vec<Vec<u8>> = (0..n)
        .map(|_| (0..v).map(|_| rng.random_bool(density) as u8).collect())
        .collect();
    IncidenceStructure::from_matrix(&m).unwrap()
}

/// `N_k` for `k = 0..=n` by exhaustive search for all-zero submatrices:
/// for every column set `S`, count the rows avoiding all of `S`; `N_k` is
/// the largest `|S|` avoided by at least `k` rows.
pub fn zero_submatrix_n(s: &IncidenceStructure) -> Vec<usize> {
    let (n, v) = (s.num_blocks(), s.num_points());
    assert!(v <= 16, "exhaustive over 2^v column sets");
    let m = s.to_matrix();
    let mut widest = vec![0usize; n + 1];
    for mask in 0u32..(1 << v) {
        let width = mask.count_ones() as usize;
        let rows = m
            .iter()
            .filter(|row| (0..v).all(|j| mask & (1 << j) == 0 || row[j] == 0))
            .count();
        for k in 0..=rows {
            widest[k] = widest[k].max(width);
        }
    }
    widest
}

/// `M_k = v − N_k` from the zero-submatrix oracle, with `M_0 = 0`.
pub fn oracle_hierarchy(s: &IncidenceStructure) -> Vec<usize> {
    zero_submatrix_n(s)
        .into_iter()
        .map(|w| s.num_points() - w)
        .collect()
}
