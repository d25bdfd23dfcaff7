//! Fixed-length bitsets over instance indices.
//!
//! Every feature column, the label column and every solver subproblem is one
//! of these. Bits past `len` in the last word are kept at zero so that
//! popcounts and equality never see garbage.

use std::fmt;

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl Bitset {
    pub fn zeros(len: usize) -> Self {
        Bitset {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut set = Bitset {
            words: vec![u64::MAX; word_count(len)],
            len,
        };
        set.clear_tail();
        set
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut set = Bitset::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                set.insert(i);
            }
        }
        set
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Bitset::zeros(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.insert(i)
        } else {
            self.remove(i)
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|self ∧ other|` without materializing the intersection.
    #[inline]
    pub fn intersection_count(&self, other: &Bitset) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn and(&self, other: &Bitset) -> Bitset {
        debug_assert_eq!(self.len, other.len);
        Bitset {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            len: self.len,
        }
    }

    /// `self ∧ ¬other`.
    pub fn and_not(&self, other: &Bitset) -> Bitset {
        debug_assert_eq!(self.len, other.len);
        Bitset {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
            len: self.len,
        }
    }

    pub fn complement(&self) -> Bitset {
        let mut set = Bitset {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        set.clear_tail();
        set
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + bit)
                }
            })
        })
    }

    /// Keeps only the bits at `indices`, renumbered `0..indices.len()`.
    pub fn select(&self, indices: &[usize]) -> Bitset {
        let mut out = Bitset::zeros(indices.len());
        for (new, &old) in indices.iter().enumerate() {
            if self.contains(old) {
                out.insert(new);
            }
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.contains(i)).collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for Bitset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = (0..self.len)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect();
        write!(f, "Bitset({bits})")
    }
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_clears_tail() {
        let s = Bitset::ones(70);
        assert_eq!(s.count_ones(), 70);
        assert_eq!(s.complement().count_ones(), 0);
    }

    #[test]
    fn set_algebra() {
        let a = Bitset::from_indices(10, [0, 2, 4, 6]);
        let b = Bitset::from_indices(10, [2, 3, 4]);
        assert_eq!(a.and(&b).iter_ones().collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(a.and_not(&b).iter_ones().collect::<Vec<_>>(), vec![0, 6]);
        assert_eq!(a.intersection_count(&b), 2);
        assert_eq!(a.complement().count_ones(), 6);
    }

    #[test]
    fn select_renumbers() {
        let a = Bitset::from_indices(6, [1, 4, 5]);
        let s = a.select(&[5, 0, 1]);
        assert_eq!(s.to_bools(), vec![true, false, true]);
    }

    #[test]
    fn iter_ones_crosses_words() {
        let idx = [0, 63, 64, 127, 128, 199];
        let a = Bitset::from_indices(200, idx);
        assert_eq!(a.iter_ones().collect::<Vec<_>>(), idx.to_vec());
    }
}
