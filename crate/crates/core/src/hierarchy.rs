//! Supported file sizes `M_k`, their complements `N_k = v - M_k`, and the
//! staircase relating a structure to its transpose.
//!
//! `M_k` is the minimum number of distinct points covered by any `k` blocks.
//! Computing it is a min-k-union problem, so the search here is exact and
//! exponential in the worst case; it runs under a work budget and fails with
//! [`Error::BudgetExceeded`] rather than returning an approximation.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use serde::Serialize;

use crate::bitset::PointSet;
use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Limits for the exact subset search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of partial subsets visited per `M_k` evaluation.
    pub budget: u64,
    /// Worker threads; partitions the search by its first block.
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            workers: 1,
        }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: u64) -> Self {
        SearchConfig {
            budget,
            ..Self::default()
        }
    }
}

/// Result of one exact min-k-union search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    pub value: usize,
    /// Partial subsets visited. Deterministic when `workers == 1`.
    pub visited: u64,
}

fn check_k(s: &IncidenceStructure, k: usize) -> Result<()> {
    let n = s.num_blocks();
    if k == 0 || k > n {
        return Err(Error::Argument(format!("k = {k} is outside 1..={n}")));
    }
    Ok(())
}

/// `M_k`: the fewest distinct points covered by any `k` blocks.
pub fn supported_file_size(s: &IncidenceStructure, k: usize, cfg: &SearchConfig) -> Result<usize> {
    min_k_union(s, k, cfg).map(|o| o.value)
}

/// Branch and bound over block subsets.
///
/// Blocks are visited in ascending order of size (ties by index). A branch is
/// cut as soon as its partial union is at least the best complete union seen,
/// since adding blocks never shrinks a union. The incumbent starts from a
/// greedy completion.
pub fn min_k_union(s: &IncidenceStructure, k: usize, cfg: &SearchConfig) -> Result<SearchOutcome> {
    check_k(s, k)?;
    let mut order: Vec<usize> = (0..s.num_blocks()).collect();
    order.sort_by_key(|&i| (s.block(i).len(), i));
    let blocks: Vec<&PointSet> = order.iter().map(|&i| s.block(i)).collect();

    let search = Search {
        blocks,
        k,
        universe: s.num_points(),
        budget: cfg.budget,
        visited: AtomicU64::new(0),
        best: AtomicUsize::new(greedy_union(s, &order, k)),
        abort: AtomicBool::new(false),
    };

    let roots = search.blocks.len() - k + 1;
    let workers = cfg.workers.clamp(1, roots);
    if workers == 1 {
        search.run_roots(0, 1)?;
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let search = &search;
                    scope.spawn(move || search.run_roots(w, workers))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect::<Result<Vec<()>>>()
        })?;
    }
    Ok(SearchOutcome {
        value: search.best.into_inner(),
        visited: search.visited.into_inner(),
    })
}

/// Union size of a greedy choice: start from the smallest block, then keep
/// adding the block that grows the union least.
fn greedy_union(s: &IncidenceStructure, order: &[usize], k: usize) -> usize {
    let mut used = vec![false; s.num_blocks()];
    let mut union = s.block(order[0]).clone();
    used[order[0]] = true;
    for _ in 1..k {
        let (_, pick) = order
            .iter()
            .filter(|&&i| !used[i])
            .map(|&i| (union.union_len(s.block(i)), i))
            .min_by_key(|&(len, _)| len)
            .expect("k <= n leaves a block to add");
        used[pick] = true;
        union.union_with(s.block(pick));
    }
    union.len()
}

struct Search<'a> {
    blocks: Vec<&'a PointSet>,
    k: usize,
    universe: usize,
    budget: u64,
    visited: AtomicU64,
    best: AtomicUsize,
    abort: AtomicBool,
}

impl Search<'_> {
    fn run_roots(&self, first: usize, stride: usize) -> Result<()> {
        let mut scratch = vec![PointSet::empty(self.universe); self.k];
        let roots = self.blocks.len() - self.k + 1;
        for root in (first..roots).step_by(stride) {
            self.visit()?;
            if self.blocks[root].len() >= self.best.load(Ordering::Relaxed) {
                // Blocks are sorted by size, so later roots cannot do better.
                break;
            }
            if self.k == 1 {
                self.best.fetch_min(self.blocks[root].len(), Ordering::Relaxed);
                continue;
            }
            scratch[0] = self.blocks[root].clone();
            self.descend(root + 1, 1, &mut scratch)?;
        }
        Ok(())
    }

    fn visit(&self) -> Result<()> {
        if self.abort.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.abort.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// `scratch[depth - 1]` holds the union of the `depth` blocks chosen so far.
    fn descend(&self, start: usize, depth: usize, scratch: &mut [PointSet]) -> Result<()> {
        let remaining = self.k - depth;
        let last = self.blocks.len() - remaining;
        for i in start..=last {
            self.visit()?;
            let (done, rest) = scratch.split_at_mut(depth);
            let union = &done[depth - 1];
            let len = union.union_len(self.blocks[i]);
            if len >= self.best.load(Ordering::Relaxed) {
                continue;
            }
            if remaining == 1 {
                self.best.fetch_min(len, Ordering::Relaxed);
                continue;
            }
            rest[0].assign_union(union, self.blocks[i]);
            self.descend(i + 1, depth + 1, scratch)?;
        }
        Ok(())
    }
}

/// `C(n, k)` saturating at `u128::MAX`.
fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `M_k` by visiting every `k`-subset with no pruning. Refuses when
/// `C(n, k)` exceeds `cap`.
pub fn supported_file_size_bruteforce(s: &IncidenceStructure, k: usize, cap: u64) -> Result<usize> {
    check_k(s, k)?;
    let n = s.num_blocks();
    let count = binomial_u128(n, k);
    if count > cap as u128 {
        return Err(Error::EnumerationCap {
            subsets: if count == u128::MAX {
                format!("C({n},{k})")
            } else {
                count.to_string()
            },
            cap,
        });
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = usize::MAX;
    let mut union = PointSet::empty(s.num_points());
    loop {
        union.clone_from(s.block(idx[0]));
        for &b in &idx[1..] {
            union.union_with(s.block(b));
        }
        best = best.min(union.len());

        // Next combination in lexicographic order.
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            break;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
    Ok(best)
}

/// `M_0 ..= M_n` for one structure, with `M_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileSizeHierarchy {
    num_points: usize,
    m: Vec<usize>,
}

impl FileSizeHierarchy {
    pub fn from_values(num_points: usize, m: Vec<usize>) -> Self {
        debug_assert_eq!(m.first(), Some(&0));
        FileSizeHierarchy { num_points, m }
    }

    pub fn num_blocks(&self) -> usize {
        self.m.len() - 1
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// `m[k] = M_k`, with `m[0] = 0`.
    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn supported(&self, k: usize) -> usize {
        self.m[k]
    }

    /// `N_k = v - M_k` for `k = 0..=n`.
    pub fn n_vals(&self) -> Vec<usize> {
        self.m.iter().map(|&m| self.num_points - m).collect()
    }

    /// Line-oriented `k M_k N_k` table over `ks`.
    pub fn to_table(&self, ks: impl IntoIterator<Item = usize>) -> String {
        let mut out = String::from("k M_k N_k\n");
        for k in ks {
            out.push_str(&format!("{} {} {}\n", k, self.m[k], self.num_points - self.m[k]));
        }
        out
    }
}

/// `M_k` for every `k`, computed directly.
pub fn full_hierarchy(s: &IncidenceStructure, cfg: &SearchConfig) -> Result<FileSizeHierarchy> {
    let mut m = Vec::with_capacity(s.num_blocks() + 1);
    m.push(0);
    for k in 1..=s.num_blocks() {
        m.push(supported_file_size(s, k, cfg)?);
    }
    Ok(FileSizeHierarchy::from_values(s.num_points(), m))
}

/// `N_k`: the widest all-zero `k`-row submatrix. `N_0 = v`.
pub fn n_value(s: &IncidenceStructure, k: usize, cfg: &SearchConfig) -> Result<usize> {
    if k == 0 {
        return Ok(s.num_points());
    }
    Ok(s.num_points() - supported_file_size(s, k, cfg)?)
}

/// `M_k(C) = #{ i in 1..=v : N_i(C^t) < k }`, computed from the transpose.
pub fn hierarchy_via_dual(s: &IncidenceStructure, cfg: &SearchConfig) -> Result<FileSizeHierarchy> {
    let dual = s.dual();
    let dual_n: Vec<usize> = (1..=s.num_points())
        .map(|i| n_value(&dual, i, cfg))
        .collect::<Result<_>>()?;
    Ok(hierarchy_from_dual_n(s.num_points(), s.num_blocks(), &dual_n))
}

/// Applies the indicator identity to precomputed `N_1(C^t) ..= N_v(C^t)`.
pub fn hierarchy_from_dual_n(num_points: usize, num_blocks: usize, dual_n: &[usize]) -> FileSizeHierarchy {
    let m = (0..=num_blocks)
        .map(|k| dual_n.iter().filter(|&&ni| k > ni).count())
        .collect();
    FileSizeHierarchy::from_values(num_points, m)
}

/// A vertex `(k0, l0)` shared by the staircases `(k, N_k(C))` and
/// `(N_l(C^t), l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParetoPoint {
    pub k0: usize,
    pub l0: usize,
    /// The vertex lies on an axis (`k0 = 0` or `l0 = 0`), where the
    /// strict-decrease conditions hold vacuously on one side.
    pub boundary: bool,
}

/// Pareto points from `N` sequences of a structure (`0..=n`) and its
/// transpose (`0..=v`).
pub fn pareto_from_n(n_primal: &[usize], n_dual: &[usize]) -> Vec<ParetoPoint> {
    let mut out = Vec::new();
    for (k0, &l0) in n_primal.iter().enumerate() {
        if n_dual.get(l0) != Some(&k0) {
            continue;
        }
        let primal_drops = n_primal[k0 + 1..].iter().all(|&x| x < l0);
        let dual_drops = n_dual[l0 + 1..].iter().all(|&x| x < k0);
        if primal_drops && dual_drops {
            out.push(ParetoPoint {
                k0,
                l0,
                boundary: k0 == 0 || l0 == 0,
            });
        }
    }
    out
}

/// All Pareto points, ordered by increasing `k0`.
pub fn pareto_points(s: &IncidenceStructure, cfg: &SearchConfig) -> Result<Vec<ParetoPoint>> {
    let primal = full_hierarchy(s, cfg)?;
    let dual = full_hierarchy(&s.dual(), cfg)?;
    Ok(pareto_from_n(&primal.n_vals(), &dual.n_vals()))
}

/// The lexicographically smallest set of `k` block indices whose union has
/// at most `target` points, or `None` if there is none.
pub fn min_union_witness(
    s: &IncidenceStructure,
    k: usize,
    target: usize,
    cfg: &SearchConfig,
) -> Result<Option<Vec<usize>>> {
    check_k(s, k)?;
    let mut visited = 0u64;
    let mut chosen = Vec::with_capacity(k);
    let empty = PointSet::empty(s.num_points());

    #[allow(clippy::too_many_arguments)]
    fn go(
        s: &IncidenceStructure,
        k: usize,
        target: usize,
        budget: u64,
        start: usize,
        union: &PointSet,
        chosen: &mut Vec<usize>,
        visited: &mut u64,
    ) -> Result<bool> {
        if chosen.len() == k {
            return Ok(true);
        }
        let remaining = k - chosen.len();
        for i in start..=s.num_blocks() - remaining {
            *visited += 1;
            if *visited > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            if union.union_len(s.block(i)) > target {
                continue;
            }
            let mut next = union.clone();
            next.union_with(s.block(i));
            chosen.push(i);
            if go(s, k, target, budget, i + 1, &next, chosen, visited)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    let found = go(s, k, target, cfg.budget, 0, &empty, &mut chosen, &mut visited)?;
    Ok(found.then_some(chosen))
}
