//! Isomorphism of families under relabelling of the universe.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::family::{Collection, Family, SetWord};
use crate::small::{self, SMALL_LIMIT};

/// A permutation of `{0..n-1}`; `map[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm {
    map: Vec<usize>,
}

impl Perm {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || std::mem::replace(&mut seen[m], true) {
                return Err(Error::usage(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Perm { map })
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply_set(&self, a: SetWord) -> SetWord {
        SetWord::from_bits(a.elements().fold(0u64, |acc, e| acc | 1 << self.map[e]))
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        Perm { map: inv }
    }
}

/// All `n!` permutations of `{0..n-1}`, identity first.
pub fn all_perms(n: usize) -> Vec<Perm> {
    if n <= SMALL_LIMIT {
        small::perm_table(n)
            .perms
            .iter()
            .map(|m| Perm { map: m.clone() })
            .collect()
    } else {
        small::all_permutations(n)
            .into_iter()
            .map(|map| Perm { map })
            .collect()
    }
}

/// `{p[A] : A ∈ F}`.
pub fn apply_perm(p: &Perm, f: &Family) -> Result<Family> {
    if p.len() != f.universe() {
        return Err(Error::UniverseMismatch {
            left: f.universe(),
            right: p.len(),
        });
    }
    Ok(Family::from_unsorted(
        f.universe(),
        f.iter().map(|a| p.apply_set(a)).collect(),
    ))
}

/// The least image of `F` under all permutations, with a permutation that
/// produces it.
pub fn canonical_with_perm(f: &Family) -> (Family, Perm) {
    let n = f.universe();
    if n <= SMALL_LIMIT {
        let t = small::perm_table(n);
        let (bits, p) = t.canonical(small::to_bits(f));
        (
            small::from_bits(n, bits),
            Perm {
                map: t.perms[p].clone(),
            },
        )
    } else {
        let mut best: Option<(Family, Perm)> = None;
        for p in small::all_permutations(n) {
            let p = Perm { map: p };
            let img = apply_perm(&p, f).expect("sizes agree");
            if best.as_ref().is_none_or(|(b, _)| img < *b) {
                best = Some((img, p));
            }
        }
        best.expect("at least the identity")
    }
}

pub fn canonical(f: &Family) -> Family {
    canonical_with_perm(f).0
}

pub fn is_isomorphic(f: &Family, g: &Family) -> bool {
    f.universe() == g.universe() && f.len() == g.len() && canonical(f) == canonical(g)
}

/// Sieve: take the least remaining family, drop all its images under `P`,
/// repeat. The result iso-represents `C` under `P`.
pub fn iso_base(c: &Collection, perms: &[Perm]) -> Result<Collection> {
    let mut removed: HashSet<Family> = HashSet::new();
    let mut out = Vec::new();
    for f in c.iter() {
        if removed.contains(f) {
            continue;
        }
        for p in perms {
            removed.insert(apply_perm(p, f)?);
        }
        out.push(f.clone());
    }
    Ok(Collection::new(out))
}

/// Distinct canonical forms of the members of `C`.
pub fn canonical_base(c: &Collection) -> Collection {
    c.iter().map(canonical).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_examples() {
        let p = Perm::new(vec![2, 0, 1]).unwrap();
        let f = Family::of(3, &[&[0], &[0, 1, 2], &[0, 2]]);
        assert_eq!(
            apply_perm(&p, &f).unwrap(),
            Family::of(3, &[&[2], &[0, 1, 2], &[1, 2]])
        );
        assert_eq!(apply_perm(&Perm::identity(3), &f).unwrap(), f);
        assert!(apply_perm(&p, &Family::empty(3)).unwrap().is_empty());
        assert!(Perm::new(vec![0, 0]).is_err());
        assert!(apply_perm(&p, &Family::empty(4)).is_err());
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical(&Family::of(3, &[&[2]])), Family::of(3, &[&[0]]));
        assert_eq!(
            canonical(&Family::of(3, &[&[0, 1, 2], &[1, 2], &[2]])),
            canonical(&Family::of(3, &[&[0], &[0, 1, 2], &[0, 2]]))
        );
        assert_eq!(canonical(&Family::empty(3)), Family::empty(3));
        let (c, p) = canonical_with_perm(&Family::of(3, &[&[1, 2], &[2]]));
        assert_eq!(apply_perm(&p, &Family::of(3, &[&[1, 2], &[2]])).unwrap(), c);
    }

    #[test]
    fn canonical_beyond_word_tables() {
        let f = Family::of(7, &[&[6], &[5, 6]]);
        assert_eq!(canonical(&f), Family::of(7, &[&[0], &[0, 1]]));
    }

    #[test]
    fn iso_base_examples() {
        let perms = all_perms(3);
        let c = Collection::new((0..3).map(|i| Family::of(3, &[&[i]])));
        assert_eq!(iso_base(&c, &perms).unwrap().families(), &[Family::of(3, &[&[0]])]);
        let c = Collection::new([[0, 1], [0, 2], [1, 2]].iter().map(|s| Family::of(3, &[s])));
        assert_eq!(iso_base(&c, &perms).unwrap().families(), &[Family::of(3, &[&[0, 1]])]);
        let distinct = Collection::new([Family::of(3, &[&[0]]), Family::of(3, &[&[0, 1]])]);
        assert_eq!(iso_base(&distinct, &perms).unwrap(), distinct);
    }
}
