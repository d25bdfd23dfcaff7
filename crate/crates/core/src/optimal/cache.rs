//! Memo storage for the subset dynamic program.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::bitset::Bitset;

// The map keys are already well-mixed fingerprints.
#[derive(Default)]
struct PassThrough(u64);

impl Hasher for PassThrough {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 << 8) | u64::from(b);
        }
    }

    fn write_u128(&mut self, v: u128) {
        self.0 = v as u64 ^ (v >> 64) as u64;
    }
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 128-bit fingerprint of a subset. Equal fingerprints are still verified
/// word by word before a cache entry is used.
pub(crate) fn fingerprint(words: &[u64]) -> u128 {
    let mut h1: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut h2: u64 = 0x6a09_e667_f3bc_c909;
    for (i, &w) in words.iter().enumerate() {
        h1 = mix(h1 ^ w).rotate_left(17).wrapping_add(i as u64);
        h2 = mix(h2.wrapping_add(w).wrapping_mul(0xff51_afd7_ed55_8ccd)) ^ (i as u64).rotate_left(32);
    }
    (u128::from(mix(h1)) << 64) | u128::from(mix(h2))
}

// Entries sharing a fingerprint, keyed by the subset words.
type Bucket<V> = Vec<(Box<[u64]>, V)>;

/// Map from instance subsets to solver state.
pub(crate) struct SubsetCache<V> {
    map: HashMap<u128, Bucket<V>, BuildHasherDefault<PassThrough>>,
}

impl<V> Default for SubsetCache<V> {
    fn default() -> Self {
        SubsetCache {
            map: HashMap::default(),
        }
    }
}

impl<V> SubsetCache<V> {
    pub(crate) fn get(&self, subset: &Bitset) -> Option<&V> {
        let words = subset.words();
        self.map
            .get(&fingerprint(words))?
            .iter()
            .find(|(w, _)| &w[..] == words)
            .map(|(_, v)| v)
    }

    pub(crate) fn get_or_insert_with(&mut self, subset: &Bitset, init: impl FnOnce() -> V) -> &mut V {
        let words = subset.words();
        let bucket = self.map.entry(fingerprint(words)).or_default();
        let idx = match bucket.iter().position(|(w, _)| &w[..] == words) {
            Some(i) => i,
            None => {
                bucket.push((words.into(), init()));
                bucket.len() - 1
            }
        };
        &mut bucket[idx].1
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.map.values().map(Vec::len).sum()
    }
}

// Rows are allocated lazily; beyond this size values are recomputed.
const LEAF_TABLE_MAX_N: usize = 4096;

/// Lazily filled table of leaf costs indexed by `(n, e)`.
pub(crate) struct LeafCostTable {
    rows: Vec<Option<Box<[f64]>>>,
}

impl LeafCostTable {
    pub(crate) fn new(instance_count: usize) -> Self {
        LeafCostTable {
            rows: vec![None; instance_count.min(LEAF_TABLE_MAX_N) + 1],
        }
    }

    #[inline]
    pub(crate) fn get(&mut self, n: usize, e: usize, compute: impl FnOnce(usize, usize) -> f64) -> f64 {
        let Some(slot) = self.rows.get_mut(n) else {
            return compute(n, e);
        };
        let row = slot.get_or_insert_with(|| vec![f64::NAN; n / 2 + 1].into_boxed_slice());
        let v = row[e];
        if v.is_nan() {
            let v = compute(n, e);
            row[e] = v;
            v
        } else {
            v
        }
    }
}
