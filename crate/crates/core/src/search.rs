//! Search for a union-closed extension with negative share.
//!
//! The search runs over `pow(⋃Fc)` after relabelling `⋃Fc` to `{0..k-1}`;
//! candidate families are bitmaps over the `2^k` sets.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::family::{closure, union_closed_for_unchecked, Family, SetWord, POWERSET_LIMIT};
use crate::small;
use crate::weights::{build_share_table, WeightFn};

/// True iff `F ⊆ pow(⋃Fc)` and `F` is union-closed for `Fc`.
pub fn uce_contains(fc: &Family, f: &Family) -> Result<bool> {
    fc.check_same_universe(f)?;
    let x = fc.union_all();
    Ok(f.iter().all(|a| a.is_subset(x)) && union_closed_for_unchecked(fc.members(), f))
}

/// Subsets of `⋃Fc` with negative share, most negative first, ties in
/// canonical set order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegSetList {
    pub entries: Vec<(SetWord, i64)>,
    pub total: i64,
}

fn check_weights(fc: &Family, w: &WeightFn) -> Result<()> {
    if w.len() != fc.universe() {
        return Err(Error::UniverseMismatch {
            left: fc.universe(),
            right: w.len(),
        });
    }
    if !w.is_weight_fn_on(fc.union_all()) {
        return Err(Error::NotWeightFunction);
    }
    let k = fc.union_all().len();
    if k > POWERSET_LIMIT {
        return Err(Error::UniverseTooLarge {
            n: k,
            max: POWERSET_LIMIT,
        });
    }
    Ok(())
}

pub fn neg_set_list(fc: &Family, w: &WeightFn) -> Result<NegSetList> {
    check_weights(fc, w)?;
    let x = fc.union_all();
    let table = build_share_table(w, x)?;
    let mut entries: Vec<(SetWord, i64)> = x
        .subsets()
        .map(|a| (a, table.get(a)))
        .filter(|&(_, s)| s < 0)
        .collect();
    entries.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let total = entries
        .iter()
        .try_fold(0i64, |acc, e| acc.checked_add(e.1))
        .ok_or(Error::Overflow("negative share sum"))?;
    Ok(NegSetList { entries, total })
}

/// True iff some `F ∈ uce(Fc)` has negative family share under `w`.
pub fn ssn(fc: &Family, w: &WeightFn) -> Result<bool> {
    Ok(find_negative_extension(fc, w)?.is_some())
}

/// The first candidate family with negative share met by the search, if any.
pub fn find_negative_extension(fc: &Family, w: &WeightFn) -> Result<Option<Family>> {
    let list = neg_set_list(fc, w)?;
    let x = fc.union_all();
    let k = x.len();
    let elems: Vec<usize> = x.elements().collect();
    let compress = |a: SetWord| -> usize {
        elems
            .iter()
            .enumerate()
            .filter(|(_, &e)| a.contains(e))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    };
    let decompress = |s: usize| -> SetWord {
        SetWord::from_bits(
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| s >> i & 1 == 1)
                .fold(0u64, |acc, (_, &e)| acc | 1 << e),
        )
    };

    let mut local_w = vec![0u64; k];
    for (i, &e) in elems.iter().enumerate() {
        local_w[i] = w.get(e);
    }
    let table = build_share_table(&WeightFn::new(local_w), SetWord::full(k))?;
    let shares: Vec<i64> = (0..1usize << k)
        .map(|s| table.get(SetWord::from_bits(s as u64)))
        .collect();

    let items: Vec<(usize, i64)> = list
        .entries
        .iter()
        .map(|&(a, s)| (compress(a), s))
        .collect();
    let mut suffix = vec![0i64; items.len() + 1];
    for i in (0..items.len()).rev() {
        suffix[i] = suffix[i + 1] + items[i].1;
    }
    let fc_sets: Vec<usize> = closure(fc).iter().map(compress).collect();

    let found: Option<Vec<usize>> = if k <= small::SMALL_LIMIT {
        let fcb = fc_sets.iter().fold(0u64, |acc, &s| acc | 1 << s);
        run::<u64>(&fcb, k, &items, &suffix, &shares).map(|b| b.members())
    } else {
        let fcb = Wide::from_members(k, &fc_sets);
        run::<Wide>(&fcb, k, &items, &suffix, &shares).map(|b| b.members())
    };
    Ok(found.map(|m| {
        Family::from_unsorted(fc.universe(), m.into_iter().map(decompress).collect())
    }))
}

trait Bits: Clone {
    fn empty(k: usize) -> Self;
    fn contains(&self, s: usize) -> bool;
    /// `F ∪ {h} ∪ (F ⊎ {h}) ∪ (Fc ⊎ {h})` and the summed share of the sets it adds.
    fn insert_close(&self, fc: &Self, h: usize, shares: &[i64]) -> (Self, i64);
    fn members(&self) -> Vec<usize>;
    #[cfg_attr(not(debug_assertions), allow(dead_code))]
    fn is_union_closed_for(&self, fc: &Self) -> bool;
}

impl Bits for u64 {
    fn empty(_: usize) -> Self {
        0
    }

    fn contains(&self, s: usize) -> bool {
        self >> s & 1 == 1
    }

    fn insert_close(&self, fc: &Self, h: usize, shares: &[i64]) -> (Self, i64) {
        let next = small::insert_close_bits(*fc, h, *self);
        let delta = small::iter_bits(next & !self).map(|a| shares[a]).sum();
        (next, delta)
    }

    fn members(&self) -> Vec<usize> {
        small::iter_bits(*self).collect()
    }

    fn is_union_closed_for(&self, fc: &Self) -> bool {
        small::union_closed_for_bits(*fc, *self)
    }
}

/// Bitmap over the `2^k` subsets of `{0..k-1}` for `7 <= k <= 16`.
#[derive(Clone, Debug)]
struct Wide {
    k: usize,
    words: Rc<Vec<u64>>,
}

const ELEMENT_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl Wide {
    fn from_members(k: usize, sets: &[usize]) -> Self {
        let mut words = vec![0u64; (1usize << k).div_ceil(64)];
        for &s in sets {
            words[s / 64] |= 1 << (s % 64);
        }
        Wide {
            k,
            words: Rc::new(words),
        }
    }

    fn union_each(words: &[u64], h: usize) -> Vec<u64> {
        let mut out = words.to_vec();
        let mut rest = h;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if i < 6 {
                for w in out.iter_mut() {
                    *w = (*w & ELEMENT_MASKS[i]) | ((*w & !ELEMENT_MASKS[i]) << (1u32 << i));
                }
            } else {
                let step = 1usize << (i - 6);
                for t in 0..out.len() {
                    if t & step == 0 {
                        out[t + step] |= out[t];
                        out[t] = 0;
                    }
                }
            }
        }
        out
    }
}

impl Bits for Wide {
    fn empty(k: usize) -> Self {
        Wide::from_members(k, &[])
    }

    fn contains(&self, s: usize) -> bool {
        self.words[s / 64] >> (s % 64) & 1 == 1
    }

    fn insert_close(&self, fc: &Self, h: usize, shares: &[i64]) -> (Self, i64) {
        let a = Wide::union_each(&self.words, h);
        let b = Wide::union_each(&fc.words, h);
        let mut next: Vec<u64> = self
            .words
            .iter()
            .zip(a.iter().zip(b.iter()))
            .map(|(f, (x, y))| f | x | y)
            .collect();
        next[h / 64] |= 1 << (h % 64);
        let mut delta = 0i64;
        for (t, (n, o)) in next.iter().zip(self.words.iter()).enumerate() {
            let mut d = n & !o;
            while d != 0 {
                delta += shares[t * 64 + d.trailing_zeros() as usize];
                d &= d - 1;
            }
        }
        (
            Wide {
                k: self.k,
                words: Rc::new(next),
            },
            delta,
        )
    }

    fn members(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (t, &w) in self.words.iter().enumerate() {
            let mut d = w;
            while d != 0 {
                out.push(t * 64 + d.trailing_zeros() as usize);
                d &= d - 1;
            }
        }
        out
    }

    fn is_union_closed_for(&self, fc: &Self) -> bool {
        let inside = |v: &[u64]| v.iter().zip(self.words.iter()).all(|(a, f)| a & !f == 0);
        self.members()
            .into_iter()
            .all(|s| inside(&Wide::union_each(&self.words, s)))
            && fc
                .members()
                .into_iter()
                .all(|c| inside(&Wide::union_each(&self.words, c)))
    }
}

enum Frame<B> {
    Visit(usize, B, i64),
    Include(usize, B, i64),
}

/// Depth-first evaluation of the pruned recursion, skip branch first.
fn run<B: Bits>(fc: &B, k: usize, items: &[(usize, i64)], suffix: &[i64], shares: &[i64]) -> Option<B> {
    let mut stack = vec![Frame::Visit(0, B::empty(k), 0i64)];
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Visit(i, f, s) => {
                if i == items.len() {
                    if s < 0 {
                        return Some(f);
                    }
                } else if s + suffix[i] < 0 {
                    stack.push(Frame::Include(i, f.clone(), s));
                    stack.push(Frame::Visit(i + 1, f, s));
                }
            }
            Frame::Include(i, f, s) => {
                let h = items[i].0;
                if f.contains(h) {
                    continue;
                }
                let (next, delta) = f.insert_close(fc, h, shares);
                let s_next = s + delta;
                #[cfg(debug_assertions)]
                {
                    let fresh: i64 = next.members().iter().map(|&a| shares[a]).sum();
                    debug_assert_eq!(s_next, fresh, "running share diverged");
                    debug_assert!(next.is_union_closed_for(fc), "candidate left uce");
                }
                stack.push(Frame::Visit(i + 1, next, s_next));
            }
        }
    }
    None
}
