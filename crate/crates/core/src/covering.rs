//! FC-covering, nonFC-covering and the extremality predicates.

use crate::error::{Error, Result};
use crate::family::{closure, is_union_closed, Collection, Family, SetWord};
use crate::iso::{all_perms, apply_perm};
use crate::irreducible::is_irreducible;
use crate::small::{self, SMALL_LIMIT};

fn check(f: &Family, g: &Family) -> Result<()> {
    f.check_same_universe(g)
}

/// Some isomorph of `Fc` is contained in `closure(F)`.
pub fn fc_covered(f: &Family, fc: &Family) -> Result<bool> {
    check(f, fc)?;
    let n = f.universe();
    if n <= SMALL_LIMIT {
        let cl = small::closure_bits(small::to_bits(f));
        let t = small::perm_table(n);
        let base = small::to_bits(fc);
        return Ok((0..t.len()).any(|p| t.apply(p, base) & !cl == 0));
    }
    let cl = closure(f);
    for p in all_perms(n) {
        if apply_perm(&p, fc)?.is_subfamily_of(&cl) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `closure(F) ⊆ closure(Nc') ∪ {∅}` for some isomorph `Nc'` of `Nc`.
pub fn nonfc_covered(f: &Family, nc: &Family) -> Result<bool> {
    check(f, nc)?;
    let n = f.universe();
    if n <= SMALL_LIMIT {
        let cl = small::closure_bits(small::to_bits(f));
        let t = small::perm_table(n);
        let base = small::closure_bits(small::to_bits(nc)) | 1;
        return Ok((0..t.len()).any(|p| cl & !t.apply(p, base) == 0));
    }
    let cl = closure(f);
    let target = closure(nc).with(SetWord::EMPTY)?;
    for p in all_perms(n) {
        if cl.is_subfamily_of(&apply_perm(&p, &target)?) {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn fc_covered_by_any(f: &Family, fcs: &Collection) -> Result<bool> {
    for fc in fcs.iter() {
        if fc_covered(f, fc)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn nonfc_covered_by_any(f: &Family, ncs: &Collection) -> Result<bool> {
    for nc in ncs.iter() {
        if nonfc_covered(f, nc)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Every member of `C` is FC-covered by `fcs`.
pub fn all_fc_covered(c: &Collection, fcs: &Collection) -> Result<bool> {
    for f in c.iter() {
        if !fc_covered_by_any(f, fcs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every member of `C` is nonFC-covered by `ncs`.
pub fn all_nonfc_covered(c: &Collection, ncs: &Collection) -> Result<bool> {
    for f in c.iter() {
        if !nonfc_covered_by_any(f, ncs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn covered(f: &Family, fcs: &Collection, ncs: &Collection) -> Result<bool> {
    Ok(fc_covered_by_any(f, fcs)? || nonfc_covered_by_any(f, ncs)?)
}

/// Irreducible, FC, and every one-set removal is nonFC. `is_fc` decides FC
/// status.
pub fn is_minimal_fc(f: &Family, is_fc: &mut dyn FnMut(&Family) -> Result<bool>) -> Result<bool> {
    if !is_irreducible(f) || !is_fc(f)? {
        return Ok(false);
    }
    for a in f.iter() {
        if is_fc(&f.without(a))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Union-closed, nonFC, and adding any nonempty subset of `⋃F` not already
/// present gives an FC-family.
pub fn is_maximal_nonfc(
    f: &Family,
    is_fc: &mut dyn FnMut(&Family) -> Result<bool>,
) -> Result<bool> {
    if !is_union_closed(f) || is_fc(f)? {
        return Ok(false);
    }
    for a in f.union_all().subsets() {
        if a.is_empty() || f.contains(a) {
            continue;
        }
        if !is_fc(&f.with(a)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Precomputed permuted images of characteristic families over a universe of
/// at most six elements, for fast repeated covering queries.
#[derive(Clone, Debug)]
pub struct CoverIndex {
    n: usize,
    /// FC images keyed by their smallest member: an image can only lie in a
    /// closure that contains its key.
    fc_buckets: Vec<Vec<(u64, usize)>>,
    fc_trivial: Option<usize>,
    fc_count: usize,
    /// `closure(Nc') ∪ {∅}` for every isomorph `Nc'`.
    nonfc_images: Vec<(u64, usize)>,
    nonfc_count: usize,
}

impl CoverIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n > SMALL_LIMIT {
            return Err(Error::UniverseTooLarge {
                n,
                max: SMALL_LIMIT,
            });
        }
        Ok(CoverIndex {
            n,
            fc_buckets: vec![Vec::new(); 64],
            fc_trivial: None,
            fc_count: 0,
            nonfc_images: Vec::new(),
            nonfc_count: 0,
        })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    /// Registers an FC-family; returns its index among FC entries.
    pub fn add_fc(&mut self, fc: &Family) -> Result<usize> {
        if fc.universe() != self.n {
            return Err(Error::UniverseMismatch {
                left: self.n,
                right: fc.universe(),
            });
        }
        let id = self.fc_count;
        self.fc_count += 1;
        let t = small::perm_table(self.n);
        for img in t.orbit(small::to_bits(fc)) {
            match small::iter_bits(img).min_by_key(|&s| SetWord::from_bits(s as u64)) {
                Some(key) => self.fc_buckets[key].push((img, id)),
                None => {
                    self.fc_trivial.get_or_insert(id);
                }
            }
        }
        Ok(id)
    }

    pub fn add_nonfc(&mut self, nc: &Family) -> Result<usize> {
        if nc.universe() != self.n {
            return Err(Error::UniverseMismatch {
                left: self.n,
                right: nc.universe(),
            });
        }
        let id = self.nonfc_count;
        self.nonfc_count += 1;
        let t = small::perm_table(self.n);
        let base = small::closure_bits(small::to_bits(nc)) | 1;
        for img in t.orbit(base) {
            self.nonfc_images.push((img, id));
        }
        Ok(id)
    }

    /// Index of an FC entry covering the family whose closure is `cl`.
    pub fn fc_cover_of_closure(&self, cl: u64) -> Option<usize> {
        if let Some(id) = self.fc_trivial {
            return Some(id);
        }
        for s in small::iter_bits(cl) {
            if let Some(&(_, id)) = self.fc_buckets[s].iter().find(|(img, _)| img & !cl == 0) {
                return Some(id);
            }
        }
        None
    }

    pub fn nonfc_cover_of_closure(&self, cl: u64) -> Option<usize> {
        self.nonfc_images
            .iter()
            .find(|(img, _)| cl & !img == 0)
            .map(|&(_, id)| id)
    }

    /// Like [`Self::nonfc_cover_of_closure`], ignoring the entry `except`.
    pub fn nonfc_covered_except(&self, cl: u64, except: usize) -> bool {
        self.nonfc_images
            .iter()
            .any(|&(img, id)| id != except && cl & !img == 0)
    }

    pub fn fc_count(&self) -> usize {
        self.fc_count
    }

    pub fn nonfc_count(&self) -> usize {
        self.nonfc_count
    }

    pub fn fc_covered(&self, f: &Family) -> bool {
        self.fc_cover_of_closure(small::closure_bits(small::to_bits(f)))
            .is_some()
    }

    pub fn nonfc_covered(&self, f: &Family) -> bool {
        self.nonfc_cover_of_closure(small::closure_bits(small::to_bits(f)))
            .is_some()
    }

    pub fn covered(&self, f: &Family) -> bool {
        let cl = small::closure_bits(small::to_bits(f));
        self.fc_cover_of_closure(cl).is_some() || self.nonfc_cover_of_closure(cl).is_some()
    }
}
