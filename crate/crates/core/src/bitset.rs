//! Dense bitsets over the point indices of a space.
//!
//! All set operations stay within a fixed domain `0..len`, so complement is
//! well defined and union/intersection/difference are word-parallel.

use std::fmt;

const WORD_BITS: usize = u64::BITS as usize;

/// A subset of the points of a space, stored as a dense bitset over the
/// points' integer indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn location(bit: usize) -> (usize, u64) {
    (bit / WORD_BITS, 1u64 << (bit % WORD_BITS))
}

impl PointSet {
    /// The empty subset of a domain with `len` points.
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0u64; len.div_ceil(WORD_BITS)],
        }
    }

    /// The full domain of `len` points.
    pub fn full(len: usize) -> Self {
        let mut set = Self::empty(len);
        for (i, w) in set.words.iter_mut().enumerate() {
            *w = !0u64;
            let base = i * WORD_BITS;
            if base + WORD_BITS > len {
                *w = if len > base { (1u64 << (len - base)) - 1 } else { 0 };
            }
        }
        set
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Size of the domain, not of the subset.
    pub fn domain_len(&self) -> usize {
        self.len
    }

    pub fn contains(&self, bit: usize) -> bool {
        assert!(bit < self.len, "point index {bit} outside domain {}", self.len);
        let (i, mask) = location(bit);
        self.words[i] & mask != 0
    }

    pub fn insert(&mut self, bit: usize) -> bool {
        assert!(bit < self.len, "point index {bit} outside domain {}", self.len);
        let (i, mask) = location(bit);
        let old = self.words[i];
        self.words[i] = old | mask;
        old & mask == 0
    }

    pub fn remove(&mut self, bit: usize) {
        assert!(bit < self.len, "point index {bit} outside domain {}", self.len);
        let (i, mask) = location(bit);
        self.words[i] &= !mask;
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of members.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a & b)
    }

    /// Set difference `self \ other`.
    pub fn difference(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a & !b)
    }

    /// Complement with respect to the whole domain.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    pub fn union_with(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "point sets from different spaces");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "point sets from different spaces");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "point sets from different spaces");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Iterate member indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(move |(i, &w)| {
            let base = i * WORD_BITS;
            BitIter { word: w, base }
        })
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "point sets from different spaces");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut out = Self { len: self.len, words };
        out.clear_tail();
        out
    }

    // Bits beyond `len` in the last word must stay zero or complement breaks.
    fn clear_tail(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_and_full() {
        let e = PointSet::empty(70);
        assert!(e.is_empty());
        assert_eq!(e.count(), 0);
        let x = PointSet::full(70);
        assert_eq!(x.count(), 70);
        assert!(x.contains(69));
        assert_eq!(x.complement(), e);
    }

    #[test]
    fn insert_iter_roundtrip() {
        let mut s = PointSet::empty(130);
        for i in [0, 1, 63, 64, 65, 128, 129] {
            s.insert(i);
        }
        let back: Vec<usize> = s.iter().collect();
        assert_eq!(back, vec![0, 1, 63, 64, 65, 128, 129]);
    }

    #[test]
    fn zero_domain() {
        let s = PointSet::empty(0);
        assert!(s.is_empty());
        assert_eq!(s.complement().count(), 0);
    }

    fn arb_set(len: usize) -> impl Strategy<Value = PointSet> {
        proptest::collection::vec(any::<bool>(), len).prop_map(move |bits| {
            PointSet::from_indices(len, bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
        })
    }

    proptest! {
        #[test]
        fn set_algebra_laws((a, b) in (1usize..200).prop_flat_map(|n| (arb_set(n), arb_set(n)))) {
            let x = PointSet::full(a.domain_len());
            // complement involution and de Morgan against the fixed domain
            prop_assert_eq!(a.complement().complement(), a.clone());
            prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
            prop_assert_eq!(a.difference(&b), a.intersect(&b.complement()));
            prop_assert!(a.is_subset(&x));
            prop_assert_eq!(a.union(&a.complement()), x);
            prop_assert!(!a.intersect(&a.complement()).iter().next().is_some());
        }
    }
}
