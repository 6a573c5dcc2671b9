//! Weight functions, set and family shares, and hypercube decompositions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Family, SetWord, POWERSET_LIMIT};

/// Natural weight per element; index `i` is the weight of element `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightFn(Vec<u64>);

impl WeightFn {
    pub fn new(weights: Vec<u64>) -> Self {
        WeightFn(weights)
    }

    pub fn uniform(n: usize) -> Self {
        WeightFn(vec![1; n])
    }

    pub fn weights(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: usize) -> u64 {
        self.0.get(e).copied().unwrap_or(0)
    }

    /// Some element of `a` carries positive weight.
    pub fn is_weight_fn_on(&self, a: SetWord) -> bool {
        a.elements().any(|e| self.get(e) > 0)
    }
}

impl From<Vec<u64>> for WeightFn {
    fn from(v: Vec<u64>) -> Self {
        WeightFn(v)
    }
}

/// `Σ_{a∈A} w(a)`.
pub fn set_weight(w: &WeightFn, a: SetWord) -> Result<u64> {
    a.elements().try_fold(0u64, |acc, e| {
        acc.checked_add(w.get(e)).ok_or(Error::Overflow("set weight"))
    })
}

pub fn family_weight(w: &WeightFn, f: &Family) -> Result<u64> {
    f.iter().try_fold(0u64, |acc, a| {
        acc.checked_add(set_weight(w, a)?)
            .ok_or(Error::Overflow("family weight"))
    })
}

/// `2·w(A) − w(X)`; `A` must be a subset of `X`.
pub fn set_share(w: &WeightFn, a: SetWord, x: SetWord) -> Result<i64> {
    if !a.is_subset(x) {
        return Err(Error::usage(format!("{a} is not a subset of {x}")));
    }
    share_unchecked(w, a, x)
}

fn share_unchecked(w: &WeightFn, a: SetWord, x: SetWord) -> Result<i64> {
    let wa = i64::try_from(set_weight(w, a)?).map_err(|_| Error::Overflow("share"))?;
    let wx = i64::try_from(set_weight(w, x)?).map_err(|_| Error::Overflow("share"))?;
    wa.checked_mul(2)
        .and_then(|v| v.checked_sub(wx))
        .ok_or(Error::Overflow("share"))
}

/// `Σ_{A∈F} share(A, w, X)`; every member must be a subset of `X`.
pub fn family_share(w: &WeightFn, f: &Family, x: SetWord) -> Result<i64> {
    f.iter().try_fold(0i64, |acc, a| {
        acc.checked_add(set_share(w, a, x)?)
            .ok_or(Error::Overflow("family share"))
    })
}

/// Shares of every subset of a domain `X`, indexed by set bits.
#[derive(Clone, Debug)]
pub struct ShareTable {
    domain: SetWord,
    shares: Vec<i64>,
}

impl ShareTable {
    pub fn domain(&self) -> SetWord {
        self.domain
    }

    /// Share of `a ∩ X`.
    pub fn get(&self, a: SetWord) -> i64 {
        self.shares[a.intersection(self.domain).bits() as usize]
    }
}

/// Tabulates `share(A ∩ X)` for all sets `A` over the span of `X`.
pub fn build_share_table(w: &WeightFn, x: SetWord) -> Result<ShareTable> {
    let span = x.span();
    if span > POWERSET_LIMIT {
        return Err(Error::UniverseTooLarge {
            n: span,
            max: POWERSET_LIMIT,
        });
    }
    let mut shares = vec![0i64; 1 << span];
    for a in x.subsets() {
        shares[a.bits() as usize] = share_unchecked(w, a, x)?;
    }
    for (i, slot) in shares.iter_mut().enumerate() {
        let a = SetWord::from_bits(i as u64);
        if !a.is_subset(x) {
            *slot = share_unchecked(w, a.intersection(x), x)?;
        }
    }
    Ok(ShareTable { domain: x, shares })
}

fn check_disjoint(k: SetWord, s: SetWord) -> Result<()> {
    if k.is_disjoint(s) {
        Ok(())
    } else {
        Err(Error::usage(format!("hypercube base {k} overlaps directions {s}")))
    }
}

/// `hc(K, S) = {A : K ⊆ A ⊆ K ∪ S}`.
pub fn hypercube(k: SetWord, s: SetWord) -> Result<Vec<SetWord>> {
    check_disjoint(k, s)?;
    Ok(s.subsets().map(|a| a.union(k)).collect())
}

fn in_hypercube(a: SetWord, k: SetWord, s: SetWord) -> bool {
    k.is_subset(a) && a.is_subset(k.union(s))
}

/// Sum of shares of the members of `F` lying in `hc(K, S)`.
pub fn hyper_share(k: SetWord, s: SetWord, f: &Family, w: &WeightFn, x: SetWord) -> Result<i64> {
    check_disjoint(k, s)?;
    f.iter()
        .filter(|a| in_hypercube(*a, k, s))
        .try_fold(0i64, |acc, a| {
            acc.checked_add(set_share(w, a, x)?)
                .ok_or(Error::Overflow("hyper-share"))
        })
}

/// `{A − K : A ∈ hc(K, S) ∩ F}`.
pub fn project(k: SetWord, s: SetWord, f: &Family) -> Result<Family> {
    check_disjoint(k, s)?;
    Family::new(
        f.universe(),
        f.iter()
            .filter(|a| in_hypercube(*a, k, s))
            .map(|a| a.difference(k)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(e: &[usize]) -> SetWord {
        SetWord::from_elements(e.iter().copied()).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w = WeightFn::new(vec![1, 2, 0]);
        assert_eq!(set_weight(&w, set(&[0, 1, 2])).unwrap(), 3);
        assert_eq!(set_weight(&w, SetWord::EMPTY).unwrap(), 0);
        let f = Family::of(3, &[&[0, 1], &[1, 2], &[1]]);
        assert_eq!(family_weight(&w, &f).unwrap(), 7);
        let x = set(&[0, 1, 2]);
        assert_eq!(set_share(&w, set(&[1, 2]), x).unwrap(), 1);
        assert_eq!(family_share(&w, &f, x).unwrap(), 5);
        assert_eq!(set_share(&w, x, x).unwrap(), 3);
        assert!(set_share(&w, set(&[3]), x).is_err());
    }

    #[test]
    fn share_table_examples() {
        let x = set(&[0, 1, 2]);
        let t = build_share_table(&WeightFn::uniform(3), x).unwrap();
        assert_eq!(t.get(SetWord::EMPTY), -3);
        assert_eq!(t.get(set(&[0])), -1);
        assert_eq!(t.get(set(&[0, 1])), 1);
        assert_eq!(t.get(x), 3);
        let t = build_share_table(&WeightFn::new(vec![1, 2, 0]), x).unwrap();
        assert_eq!(t.get(set(&[1, 2])), 1);
        let t = build_share_table(&WeightFn::new(vec![0; 3]), x).unwrap();
        assert!(x.subsets().all(|a| t.get(a) == 0));
    }

    // Elements: s0 = 0, s1 = 1, k0 = 2, k1 = 3.
    #[test]
    fn hypercube_examples() {
        let s = set(&[0, 1]);
        let x = set(&[0, 1, 2, 3]);
        let f = Family::of(4, &[&[0], &[1], &[0, 2], &[0, 1, 2, 3]]);
        let w = WeightFn::uniform(4);
        assert_eq!(hyper_share(SetWord::EMPTY, s, &f, &w, x).unwrap(), -4);
        assert_eq!(hyper_share(set(&[2]), s, &f, &w, x).unwrap(), 0);
        assert_eq!(hyper_share(set(&[3]), s, &f, &w, x).unwrap(), 0);
        assert_eq!(hyper_share(set(&[2, 3]), s, &f, &w, x).unwrap(), 4);

        assert_eq!(project(SetWord::EMPTY, s, &f).unwrap(), Family::of(4, &[&[0], &[1]]));
        assert_eq!(project(set(&[2]), s, &f).unwrap(), Family::of(4, &[&[0]]));
        assert_eq!(project(set(&[3]), s, &f).unwrap(), Family::empty(4));
        assert_eq!(project(set(&[2, 3]), s, &f).unwrap(), Family::of(4, &[&[0, 1]]));
        assert!(project(SetWord::EMPTY, s, &Family::empty(4)).unwrap().is_empty());
        assert!(hyper_share(s, s, &f, &w, x).is_err());
        assert_eq!(hypercube(set(&[2]), s).unwrap().len(), 4);
    }
}
