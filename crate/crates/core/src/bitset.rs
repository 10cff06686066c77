//! Fixed-width point sets backed by `u64` words.

use std::fmt;

const WORD: usize = 64;

/// A set of point indices in `[0, universe)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(universe: usize) -> Self {
        PointSet {
            words: vec![0; universe.div_ceil(WORD)],
        }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / WORD)
            .is_some_and(|w| w & (1 << (i % WORD)) != 0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn union_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// Overwrites `self` with `a ∪ b`. All three must share a universe.
    #[inline]
    pub fn assign_union(&mut self, a: &PointSet, b: &PointSet) {
        for ((o, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *o = x | y;
        }
    }

    /// `|self ∪ other|` without allocating.
    #[inline]
    pub fn union_len(&self, other: &PointSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Ascending iterator over members.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * WORD + tz)
            })
        })
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
