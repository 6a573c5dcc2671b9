//! Enumeration of families by their cardinality profile.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{fc_covered_by_any, CoverIndex};
use crate::error::{Error, Result};
use crate::family::{Collection, Family, SetWord, MAX_UNIVERSE};
use crate::iso::canonical;
use crate::irreducible::{is_dependent, is_irreducible};

/// `[l_0, .., l_m]`: the family has `l_i` members of cardinality `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartitionList(pub Vec<usize>);

impl PartitionList {
    pub fn zeros(len: usize) -> Self {
        PartitionList(vec![0; len])
    }

    /// `[C(n,0), .., C(n,n)]`, the profile of the full powerset.
    pub fn full(n: usize) -> Self {
        PartitionList((0..=n).map(|i| binomial(n, i) as usize).collect())
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn last_nonzero(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }

    pub fn incremented(&self, i: usize) -> PartitionList {
        let mut v = self.0.clone();
        v[i] += 1;
        PartitionList(v)
    }

    /// Some `L`-partitioned family over `[n]` exists.
    pub fn is_feasible(&self, n: usize) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, &l)| if i <= n { l as u128 <= binomial(n, i) } else { l == 0 })
    }
}

impl fmt::Display for PartitionList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for PartitionList {
    type Err = Error;

    /// Accepts `[1,2,3]` or `1,2,3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('[').unwrap_or(t);
        let t = t.strip_suffix(']').unwrap_or(t);
        if t.trim().is_empty() {
            return Ok(PartitionList::default());
        }
        t.split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad partition entry {x:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(PartitionList)
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Member counts by cardinality `0..=m`.
pub fn partition_signature(f: &Family, m: usize) -> Result<PartitionList> {
    let mut counts = vec![0; m + 1];
    for a in f.iter() {
        if a.len() > m {
            return Err(Error::usage(format!("{a} has more than {m} elements")));
        }
        counts[a.len()] += 1;
    }
    Ok(PartitionList(counts))
}

/// `L1 ⪯ L2` componentwise.
pub fn pointwise_leq(l1: &PartitionList, l2: &PartitionList) -> Result<bool> {
    if l1.len() != l2.len() {
        return Err(Error::usage(format!("lists {l1} and {l2} differ in length")));
    }
    Ok(leq(l1, l2))
}

pub(crate) fn leq(l1: &PartitionList, l2: &PartitionList) -> bool {
    l1.0.iter().zip(&l2.0).all(|(a, b)| a <= b)
}

/// All `m`-subsets of `[n]` in canonical order; empty when `m > n`.
pub fn subsets_of_size(n: usize, m: usize) -> Vec<SetWord> {
    if m > n || n > MAX_UNIVERSE {
        return Vec::new();
    }
    if m == 0 {
        return vec![SetWord::EMPTY];
    }
    let limit: u128 = 1u128 << n;
    let mut out = Vec::new();
    let mut x: u128 = (1u128 << m) - 1;
    while x < limit {
        out.push(SetWord::from_bits(x as u64));
        // Gosper's hack: next integer with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// A family property `P` with an incremental check `Pinc`: for `A ∉ F` at
/// least as large as every member, `P(F ∪ {A}) ⟺ P(F) ∧ Pinc(F, A)`.
pub trait IncPredicate: Sync {
    fn holds(&self, f: &Family) -> Result<bool>;
    fn holds_inc(&self, f: &Family, a: SetWord) -> Result<bool>;
    /// `Pinc` is preserved by injective relabelling.
    fn injective_invariant(&self) -> bool {
        true
    }
}

/// `P ≡ ⊤`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Always;

impl IncPredicate for Always {
    fn holds(&self, _: &Family) -> Result<bool> {
        Ok(true)
    }

    fn holds_inc(&self, _: &Family, _: SetWord) -> Result<bool> {
        Ok(true)
    }
}

/// Irreducibility, checked incrementally as "the new set is not a union of
/// existing members".
#[derive(Clone, Copy, Debug, Default)]
pub struct Irreducible;

impl IncPredicate for Irreducible {
    fn holds(&self, f: &Family) -> Result<bool> {
        Ok(is_irreducible(f))
    }

    fn holds_inc(&self, f: &Family, a: SetWord) -> Result<bool> {
        Ok(!is_dependent(a, f))
    }
}

/// Not FC-covered by a collection.
#[derive(Clone, Copy, Debug)]
pub struct NotFcCovered<'a>(pub &'a Collection);

impl IncPredicate for NotFcCovered<'_> {
    fn holds(&self, f: &Family) -> Result<bool> {
        Ok(!fc_covered_by_any(f, self.0)?)
    }

    fn holds_inc(&self, f: &Family, a: SetWord) -> Result<bool> {
        Ok(!fc_covered_by_any(&f.with(a)?, self.0)?)
    }
}

/// Not FC-covered by the FC entries of an index.
#[derive(Clone, Copy, Debug)]
pub struct NotFcCoveredIndexed<'a>(pub &'a CoverIndex);

impl IncPredicate for NotFcCoveredIndexed<'_> {
    fn holds(&self, f: &Family) -> Result<bool> {
        Ok(!self.0.fc_covered(f))
    }

    fn holds_inc(&self, f: &Family, a: SetWord) -> Result<bool> {
        Ok(!self.0.fc_covered(&f.with(a)?))
    }
}

/// Conjunction; the left check runs first.
#[derive(Clone, Copy, Debug)]
pub struct And<A, B>(pub A, pub B);

impl<A: IncPredicate, B: IncPredicate> IncPredicate for And<A, B> {
    fn holds(&self, f: &Family) -> Result<bool> {
        Ok(self.0.holds(f)? && self.1.holds(f)?)
    }

    fn holds_inc(&self, f: &Family, a: SetWord) -> Result<bool> {
        Ok(self.0.holds_inc(f, a)? && self.1.holds_inc(f, a)?)
    }

    fn injective_invariant(&self) -> bool {
        self.0.injective_invariant() && self.1.injective_invariant()
    }
}

/// `{F ∪ {A} : F ∈ C, A ∈ sets, A ∉ F, Pinc(F, A)}`.
pub fn filtered_product(c: &Collection, sets: &[SetWord], q: &dyn IncPredicate) -> Result<Collection> {
    let pairs: Vec<(&Family, SetWord)> = c
        .iter()
        .flat_map(|f| sets.iter().map(move |&a| (f, a)))
        .filter(|(f, a)| !f.contains(*a))
        .collect();
    let out: Vec<Option<Family>> = pairs
        .par_iter()
        .map(|&(f, a)| -> Result<Option<Family>> {
            if q.holds_inc(f, a)? {
                Ok(Some(f.with(a)?))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    Ok(Collection::new(out.into_iter().flatten()))
}

/// Canonical representatives of the distinct members, an iso-base of `C`.
pub fn canonical_iso_base(c: Collection) -> Collection {
    let forms: Vec<Family> = c.families().par_iter().map(canonical).collect();
    Collection::new(forms)
}

/// The update step `upd(C, m) = iso-base(C ×_Pinc subsets_of_size(n, m))`.
pub fn iso_step(n: usize, c: &Collection, m: usize, q: &dyn IncPredicate) -> Result<Collection> {
    Ok(canonical_iso_base(filtered_product(c, &subsets_of_size(n, m), q)?))
}

/// Empty list gives `v0`; a trailing zero is dropped; otherwise the last
/// entry is decremented and `upd` rebuilds the value for `L`.
pub fn enum_rec<V>(
    l: &PartitionList,
    v0: V,
    upd: &mut dyn FnMut(V, &PartitionList) -> Result<V>,
) -> Result<V> {
    enum_rec_inner(l, v0, upd, &mut |_| ())
}

/// The arguments of the recursive calls made while evaluating `enum_rec(L)`.
pub fn enum_rec_trace(l: &PartitionList) -> Vec<PartitionList> {
    let mut calls = Vec::new();
    let mut record = |x: &PartitionList| calls.push(x.clone());
    enum_rec_inner(l, (), &mut |_, _| Ok(()), &mut record).expect("trivial update");
    calls.remove(0);
    calls
}

fn enum_rec_inner<V>(
    l: &PartitionList,
    v0: V,
    upd: &mut dyn FnMut(V, &PartitionList) -> Result<V>,
    visit: &mut dyn FnMut(&PartitionList),
) -> Result<V> {
    visit(l);
    match l.0.last() {
        None => Ok(v0),
        Some(0) => {
            let shorter = PartitionList(l.0[..l.len() - 1].to_vec());
            enum_rec_inner(&shorter, v0, upd, visit)
        }
        Some(_) => {
            let mut dec = l.0.clone();
            *dec.last_mut().expect("nonempty") -= 1;
            let prev = enum_rec_inner(&PartitionList(dec), v0, upd, visit)?;
            upd(prev, l)
        }
    }
}

/// Iso-base of the `L`-partitioned families over `[n]` satisfying `P`.
pub fn enum_iso_base(n: usize, l: &PartitionList, q: &dyn IncPredicate) -> Result<Collection> {
    enum_rec(l, Collection::unit(n), &mut |c, l| iso_step(n, &c, l.len() - 1, q))
}

/// Traverses every `L ⪯ Lmax` not dominating a stopped list, each reached
/// once from its predecessor by incrementing an entry at or after the last
/// nonzero position. Returns `(L, value)` pairs sorted by `L`.
pub fn enum_dp<V>(
    v0: V,
    upd: &mut dyn FnMut(&V, usize) -> Result<V>,
    stop: &dyn Fn(&PartitionList) -> bool,
    lmax: &PartitionList,
) -> Result<Vec<(PartitionList, V)>> {
    let mut res = Vec::new();
    dp_aux(PartitionList::zeros(lmax.len()), 0, v0, upd, stop, lmax, &mut res)?;
    res.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(res)
}

fn dp_aux<V>(
    l: PartitionList,
    m: usize,
    v: V,
    upd: &mut dyn FnMut(&V, usize) -> Result<V>,
    stop: &dyn Fn(&PartitionList) -> bool,
    lmax: &PartitionList,
    res: &mut Vec<(PartitionList, V)>,
) -> Result<()> {
    for m2 in m..l.len() {
        let next = l.incremented(m2);
        if stop(&next) || !leq(&next, lmax) {
            continue;
        }
        let v2 = upd(&v, m2)?;
        dp_aux(next, m2, v2, upd, stop, lmax, res)?;
    }
    res.push((l, v));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(v: &[usize]) -> PartitionList {
        PartitionList(v.to_vec())
    }

    #[test]
    fn signature_examples() {
        let f = Family::of(
            6,
            &[
                &[],
                &[0, 1, 2],
                &[0, 1, 2, 3],
                &[0, 1, 2, 4, 5],
                &[0, 1, 3, 4],
                &[0, 1, 3, 5],
                &[0, 2, 3, 4, 5],
                &[0, 3, 4, 5],
            ],
        );
        assert_eq!(partition_signature(&f, 5).unwrap(), pl(&[1, 0, 0, 1, 4, 2]));
        assert_eq!(partition_signature(&Family::empty(3), 2).unwrap(), pl(&[0, 0, 0]));
        assert_eq!(partition_signature(&Family::of(2, &[&[0], &[1]]), 1).unwrap(), pl(&[0, 2]));
        assert!(partition_signature(&Family::of(2, &[&[0, 1]]), 1).is_err());
    }

    #[test]
    fn leq_examples() {
        assert!(pointwise_leq(&pl(&[0, 1]), &pl(&[1, 1])).unwrap());
        assert!(!pointwise_leq(&pl(&[2, 0]), &pl(&[1, 1])).unwrap());
        assert!(pointwise_leq(&pl(&[3, 4]), &pl(&[3, 4])).unwrap());
        assert!(pointwise_leq(&pl(&[1]), &pl(&[1, 1])).is_err());
    }

    #[test]
    fn subsets_examples() {
        assert_eq!(subsets_of_size(4, 3).len(), 4);
        assert_eq!(subsets_of_size(6, 2).len(), 15);
        assert_eq!(subsets_of_size(5, 0), vec![SetWord::EMPTY]);
        assert!(subsets_of_size(2, 3).is_empty());
        let s = subsets_of_size(5, 2);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsets_of_size(64, 64).len(), 1);
    }

    #[test]
    fn filtered_product_examples() {
        let unit = Collection::unit(3);
        let s0 = [SetWord::from_bits(1)];
        assert_eq!(
            filtered_product(&unit, &s0, &Always).unwrap().families(),
            &[Family::of(3, &[&[0]])]
        );
        let one = Collection::new([Family::of(3, &[&[0]])]);
        assert!(filtered_product(&one, &s0, &Always).unwrap().is_empty());
        let fcs = Collection::new([Family::of(3, &[&[0]])]);
        let q = NotFcCovered(&fcs);
        assert!(filtered_product(&unit, &subsets_of_size(3, 1), &q).unwrap().is_empty());
    }

    #[test]
    fn enum_rec_examples() {
        assert_eq!(
            enum_rec_trace(&pl(&[1, 2, 2])),
            vec![
                pl(&[1, 2, 1]),
                pl(&[1, 2, 0]),
                pl(&[1, 2]),
                pl(&[1, 1]),
                pl(&[1, 0]),
                pl(&[1]),
                pl(&[0]),
                pl(&[]),
            ]
        );
        let v = enum_rec(&pl(&[]), 7, &mut |v, _| Ok(v + 1)).unwrap();
        assert_eq!(v, 7);
        let base = enum_iso_base(2, &pl(&[0, 2]), &Always).unwrap();
        assert_eq!(base.families(), &[Family::of(2, &[&[0], &[1]])]);
    }

    #[test]
    fn enum_dp_examples() {
        let zero = pl(&[0, 0, 0]);
        let out = enum_dp(0u32, &mut |v, _| Ok(v + 1), &|_| false, &zero).unwrap();
        assert_eq!(out, vec![(zero.clone(), 0)]);
        let out = enum_dp(0u32, &mut |v, _| Ok(v + 1), &|l| l.total() > 0, &pl(&[2, 2, 2])).unwrap();
        assert_eq!(out.len(), 1);

        let lmax = pl(&[1, 2, 1]);
        let out = enum_dp(0usize, &mut |v, _| Ok(v + 1), &|_| false, &lmax).unwrap();
        assert_eq!(out.len(), 2 * 3 * 2);
        assert!(out.iter().all(|(l, v)| l.total() == *v));
        assert!(out.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn successor_fan_out() {
        let l = pl(&[3, 0, 1, 0, 0]);
        let m = l.last_nonzero().unwrap();
        let next: Vec<PartitionList> = (m..l.len()).map(|i| l.incremented(i)).collect();
        assert_eq!(next, vec![pl(&[3, 0, 2, 0, 0]), pl(&[3, 0, 1, 1, 0]), pl(&[3, 0, 1, 0, 1])]);
    }
}
