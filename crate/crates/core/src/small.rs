//! Word-level representation of families over universes of at most six
//! elements: bit `s` of a `u64` is set iff the set with mask `s` is a member.

use std::sync::OnceLock;

use crate::family::{Family, SetWord};

/// Largest universe handled by the single-word family representation.
pub const SMALL_LIMIT: usize = 6;

/// `CONTAINS[i]` has bit `s` set iff set `s` contains element `i`.
const CONTAINS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

pub fn to_bits(f: &Family) -> u64 {
    debug_assert!(f.universe() <= SMALL_LIMIT);
    f.iter().fold(0, |acc, s| acc | 1 << s.bits())
}

pub fn from_bits(n: usize, bits: u64) -> Family {
    Family::from_unsorted(n, iter_bits(bits).map(|s| SetWord::from_bits(s as u64)).collect())
}

pub fn iter_bits(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let s = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(s)
        }
    })
}

/// `F ⊎ {h}`.
#[inline]
pub fn union_each(mut bits: u64, h: usize) -> u64 {
    let mut rest = h;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        bits = (bits & CONTAINS[i]) | ((bits & !CONTAINS[i]) << (1u32 << i));
    }
    bits
}

/// `F1 ⊎ F2`.
pub fn sum_bits(f1: u64, f2: u64) -> u64 {
    iter_bits(f2).fold(0, |acc, s| acc | union_each(f1, s))
}

pub fn closure_bits(bits: u64) -> u64 {
    let mut cl = 0u64;
    for s in iter_bits(bits) {
        cl |= (1 << s) | union_each(cl, s);
    }
    cl
}

/// `F ∪ {h} ∪ (F ⊎ {h}) ∪ (Fc ⊎ {h})`.
#[inline]
pub fn insert_close_bits(fc: u64, h: usize, f: u64) -> u64 {
    f | 1 << h | union_each(f, h) | union_each(fc, h)
}

pub fn union_closed_for_bits(fc: u64, f: u64) -> bool {
    iter_bits(f).all(|s| union_each(f, s) & !f == 0)
        && iter_bits(fc).all(|c| union_each(f, c) & !f == 0)
}

/// Union of all member sets.
pub fn union_all_bits(bits: u64) -> usize {
    iter_bits(bits).fold(0, |acc, s| acc | s)
}

/// Position of each of the 64 subsets of `{0..5}` in the canonical set order.
fn ranks() -> &'static ([u8; 64], [u8; 64]) {
    static RANKS: OnceLock<([u8; 64], [u8; 64])> = OnceLock::new();
    RANKS.get_or_init(|| {
        let mut order: Vec<u64> = (0..64).collect();
        order.sort_by_key(|&s| SetWord::from_bits(s));
        let mut rank = [0u8; 64];
        let mut unrank = [0u8; 64];
        for (r, &s) in order.iter().enumerate() {
            rank[s as usize] = r as u8;
            unrank[r] = s as u8;
        }
        (rank, unrank)
    })
}

/// All permutations of `{0..n-1}` with their induced actions on sets.
pub struct PermTable {
    pub n: usize,
    /// Element images, one vector per permutation, identity first.
    pub perms: Vec<Vec<usize>>,
    /// `set_map[p][s]` is the image of set `s` under permutation `p`.
    pub set_map: Vec<[u8; 64]>,
    /// `key_bit[p][s]` is the order key bit of the image of `s`: smaller sets
    /// get higher bits, so among equal-size families the largest key belongs
    /// to the smallest family.
    pub key_bit: Vec<[u64; 64]>,
}

impl PermTable {
    fn build(n: usize) -> Self {
        let perms = all_permutations(n);
        let (rank, _) = ranks();
        let mut set_map = Vec::with_capacity(perms.len());
        let mut key_bit = Vec::with_capacity(perms.len());
        for p in &perms {
            let mut sm = [0u8; 64];
            let mut kb = [0u64; 64];
            for s in 0..(1usize << n) {
                let img = (0..n)
                    .filter(|&e| s >> e & 1 == 1)
                    .fold(0usize, |acc, e| acc | 1 << p[e]);
                sm[s] = img as u8;
                kb[s] = 1u64 << (63 - rank[img] as u32);
            }
            set_map.push(sm);
            key_bit.push(kb);
        }
        PermTable {
            n,
            perms,
            set_map,
            key_bit,
        }
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn apply(&self, p: usize, bits: u64) -> u64 {
        let map = &self.set_map[p];
        iter_bits(bits).fold(0, |acc, s| acc | 1 << map[s])
    }

    fn key(&self, p: usize, bits: u64) -> u64 {
        let kb = &self.key_bit[p];
        iter_bits(bits).fold(0, |acc, s| acc | kb[s])
    }

    /// Canonical image and the index of a permutation producing it.
    pub fn canonical(&self, bits: u64) -> (u64, usize) {
        let members: Vec<usize> = iter_bits(bits).collect();
        let mut best = 0u64;
        let mut best_p = 0;
        for (p, kb) in self.key_bit.iter().enumerate() {
            let key = members.iter().fold(0u64, |acc, &s| acc | kb[s]);
            if key > best {
                best = key;
                best_p = p;
            }
        }
        debug_assert_eq!(best, self.key(best_p, bits));
        (key_to_bits(best), best_p)
    }

    /// Distinct images of a family under all permutations.
    pub fn orbit(&self, bits: u64) -> Vec<u64> {
        let mut out: Vec<u64> = (0..self.len()).map(|p| self.apply(p, bits)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn key_to_bits(mut key: u64) -> u64 {
    let (_, unrank) = ranks();
    let mut bits = 0u64;
    while key != 0 {
        let b = key.trailing_zeros();
        key &= key - 1;
        bits |= 1 << unrank[63 - b as usize];
    }
    bits
}

/// Permutation tables for universes of size `0..=6`, built on first use.
pub fn perm_table(n: usize) -> &'static PermTable {
    static TABLES: OnceLock<Vec<OnceLock<PermTable>>> = OnceLock::new();
    assert!(n <= SMALL_LIMIT, "word-level permutation tables cover n <= 6");
    let tables = TABLES.get_or_init(|| (0..=SMALL_LIMIT).map(|_| OnceLock::new()).collect());
    tables[n].get_or_init(|| PermTable::build(n))
}

/// All permutations of `{0..n-1}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{closure, sum_fam};

    #[test]
    fn word_ops_match_family_ops() {
        let f = Family::of(4, &[&[0, 1], &[1, 2], &[3]]);
        let g = Family::of(4, &[&[2], &[0, 3]]);
        let (fb, gb) = (to_bits(&f), to_bits(&g));
        assert_eq!(from_bits(4, closure_bits(fb)), closure(&f));
        assert_eq!(from_bits(4, sum_bits(fb, gb)), sum_fam(&f, &g).unwrap());
        assert!(union_closed_for_bits(0, closure_bits(fb)));
        assert!(!union_closed_for_bits(0, fb));
    }

    #[test]
    fn permutation_counts() {
        for n in 0..=6usize {
            let expected: usize = (1..=n).product();
            assert_eq!(perm_table(n).len(), expected.max(1));
        }
        assert_eq!(all_permutations(3)[1], vec![0, 2, 1]);
    }

    #[test]
    fn canonical_key_agrees_with_sorted_minimum() {
        let t = perm_table(4);
        let f = Family::of(4, &[&[3], &[1, 3], &[0, 1, 2]]);
        let bits = to_bits(&f);
        let mut best: Option<Family> = None;
        for p in 0..t.len() {
            let img = from_bits(4, t.apply(p, bits));
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
        assert_eq!(from_bits(4, t.canonical(bits).0), best.unwrap());
    }
}
