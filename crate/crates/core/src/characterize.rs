//! Discovery of the minimal FC and maximal nonFC characteristic families of
//! a small universe, semi-uniform lists, and the total coverage check.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::classify::{classify, FcCertificate, FcStatus, NonFcCertificate};
use crate::covering::CoverIndex;
use crate::enumeration::{
    binomial, enum_dp, enum_iso_base, iso_step, leq, partition_signature, Always, And, Irreducible,
    NotFcCoveredIndexed, PartitionList,
};
use crate::error::{Error, Result};
use crate::family::{closure, Collection, Family, SetWord};
use crate::irreducible::is_irreducible;
use crate::iso::{apply_perm, canonical_with_perm};
use crate::small::{self, SMALL_LIMIT};

/// Published minimal lists whose families over `[6]` are all FC.
pub const REFERENCE_LF_6: [[usize; 7]; 10] = [
    [0, 0, 0, 0, 5, 6, 0],
    [0, 0, 0, 0, 7, 0, 0],
    [0, 0, 0, 1, 6, 5, 0],
    [0, 0, 0, 2, 0, 6, 0],
    [0, 0, 0, 3, 0, 4, 0],
    [0, 0, 0, 3, 2, 3, 0],
    [0, 0, 0, 3, 3, 0, 0],
    [0, 0, 0, 4, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
];

/// Published maximal lists whose families over `[6]` are all nonFC.
pub const REFERENCE_LN_6: [[usize; 7]; 5] = [
    [0, 0, 0, 0, 3, 6, 1],
    [0, 0, 0, 0, 4, 1, 1],
    [0, 0, 0, 1, 1, 6, 1],
    [0, 0, 0, 1, 2, 1, 1],
    [0, 0, 0, 2, 0, 1, 1],
];

pub fn lists_of<const N: usize>(rows: &[[usize; N]]) -> Vec<PartitionList> {
    rows.iter().map(|r| PartitionList(r.to_vec())).collect()
}

/// Counters gathered during discovery.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiscoveryStats {
    pub lists_visited: usize,
    pub candidates: usize,
    /// `|𝓝c'|`: canonical irreducible nonFC families examined.
    pub nonfc_examined: usize,
    /// FC candidates FC-covered by an FC candidate of the same list.
    pub fc_same_list_covered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characterization {
    pub n: usize,
    /// Canonical minimal FC families in discovery order.
    pub minimal_fc: Vec<FcCertificate>,
    /// Canonical union-closed maximal nonFC families, sorted.
    pub maximal_nonfc: Vec<NonFcCertificate>,
    pub lf_lists: Vec<PartitionList>,
    pub ln_lists: Vec<PartitionList>,
    /// False when a resource cap stopped discovery early.
    pub complete: bool,
    pub stats: DiscoveryStats,
}

impl Characterization {
    pub fn minimal_fc_families(&self) -> Collection {
        self.minimal_fc.iter().map(|c| c.family.clone()).collect()
    }

    pub fn maximal_nonfc_families(&self) -> Collection {
        self.maximal_nonfc.iter().map(|c| c.family.clone()).collect()
    }

    /// Cover index over both characteristic collections.
    pub fn cover_index(&self) -> Result<CoverIndex> {
        let mut idx = CoverIndex::new(self.n)?;
        for c in &self.minimal_fc {
            idx.add_fc(&c.family)?;
        }
        for c in &self.maximal_nonfc {
            idx.add_nonfc(&c.family)?;
        }
        Ok(idx)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CharacterizeOptions {
    /// Stop once this many candidate families have been generated.
    pub candidate_cap: Option<usize>,
}

/// `[0, C(n,1), .., C(n,n)]`: every list without the empty set.
pub fn nonempty_bound(n: usize) -> PartitionList {
    let mut l = PartitionList::full(n);
    l.0[0] = 0;
    l
}

pub fn find_characteristic(n: usize) -> Result<Characterization> {
    find_characteristic_with(n, &CharacterizeOptions::default())
}

/// Lists are processed in lexicographic order, so every list below `L`
/// componentwise is done before `L`; each list's candidates extend the
/// still-uncovered families of its predecessor.
pub fn find_characteristic_with(n: usize, opts: &CharacterizeOptions) -> Result<Characterization> {
    if n == 0 || n > SMALL_LIMIT {
        return Err(Error::UniverseTooLarge { n, max: SMALL_LIMIT });
    }
    let lmax = nonempty_bound(n);
    let mut idx = CoverIndex::new(n)?;
    let mut fcs: Vec<FcCertificate> = Vec::new();
    let mut ncs: Vec<NonFcCertificate> = Vec::new();
    let mut stats = DiscoveryStats::default();
    let mut complete = true;

    let mut frontier: BTreeMap<PartitionList, Option<(Arc<Collection>, usize)>> = BTreeMap::new();
    frontier.insert(PartitionList::zeros(n + 1), None);
    while let Some((l, parent)) = frontier.pop_first() {
        stats.lists_visited += 1;
        let candidates = match parent {
            None => Collection::unit(n),
            Some((value, m)) => {
                let q = And(Irreducible, NotFcCoveredIndexed(&idx));
                iso_step(n, &value, m, &q)?
            }
        };
        stats.candidates += candidates.len();
        if opts.candidate_cap.is_some_and(|cap| stats.candidates > cap) {
            complete = false;
            break;
        }
        let statuses: Vec<FcStatus> = candidates
            .families()
            .par_iter()
            .map(classify)
            .collect::<Result<_>>()?;
        let mut uncovered = Vec::new();
        for st in statuses {
            match st {
                FcStatus::Fc(cert) => {
                    if idx.fc_covered(&cert.family) {
                        stats.fc_same_list_covered += 1;
                    } else {
                        idx.add_fc(&cert.family)?;
                        fcs.push(cert);
                    }
                }
                FcStatus::NonFc(cert) => {
                    uncovered.push(cert.family.clone());
                    ncs.push(cert);
                }
            }
        }
        if uncovered.is_empty() {
            continue;
        }
        let value = Arc::new(Collection::new(uncovered));
        for m in l.last_nonzero().unwrap_or(0)..l.len() {
            let next = l.incremented(m);
            if leq(&next, &lmax) {
                frontier.insert(next, Some((Arc::clone(&value), m)));
            }
        }
    }
    stats.nonfc_examined = ncs.len();

    let maximal = maximal_nonfc(n, &ncs)?;
    let closures: Vec<Family> = maximal.iter().map(|c| c.family.clone()).collect();
    let lf_lists = derive_lf_lists(n, &closures)?;
    let mut nidx = CoverIndex::new(n)?;
    for f in &closures {
        nidx.add_nonfc(f)?;
    }
    let ln_lists = derive_ln_lists(n, &nidx)?;
    Ok(Characterization {
        n,
        minimal_fc: fcs,
        maximal_nonfc: maximal,
        lf_lists,
        ln_lists,
        complete,
        stats,
    })
}

/// Drops members nonFC-covered by another member, then takes canonical
/// union-closures; certificates follow the relabelling.
fn maximal_nonfc(n: usize, ncs: &[NonFcCertificate]) -> Result<Vec<NonFcCertificate>> {
    let mut idx = CoverIndex::new(n)?;
    for c in ncs {
        idx.add_nonfc(&c.family)?;
    }
    let keep: Vec<bool> = ncs
        .par_iter()
        .enumerate()
        .map(|(i, c)| !idx.nonfc_covered_except(small::closure_bits(small::to_bits(&c.family)), i))
        .collect();
    let mut out = Vec::new();
    for (c, _) in ncs.iter().zip(keep).filter(|(_, k)| *k) {
        let (canon, p) = canonical_with_perm(&closure(&c.family));
        let witnesses = c
            .witnesses
            .iter()
            .map(|(f, k)| Ok((apply_perm(&p, f)?, *k)))
            .collect::<Result<_>>()?;
        out.push(NonFcCertificate {
            family: canon,
            witnesses,
        });
    }
    out.sort_by(|a, b| a.family.cmp(&b.family));
    Ok(out)
}

/// Mixed-radix walk over all lists `L ⪯ bound`.
fn all_lists(bound: &PartitionList) -> Vec<PartitionList> {
    let mut out = Vec::new();
    let mut cur = PartitionList::zeros(bound.len());
    loop {
        out.push(cur.clone());
        let mut i = bound.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur.0[i] < bound.0[i] {
                cur.0[i] += 1;
                break;
            }
            cur.0[i] = 0;
        }
    }
}

/// Minimal lists without `∅` none of whose families is nonFC: those not below
/// the signature of `N ∪ {∅}` for any union-closed nonFC `N`.
pub fn derive_lf_lists(n: usize, maximal_nonfc: &[Family]) -> Result<Vec<PartitionList>> {
    let sigs: Vec<PartitionList> = maximal_nonfc
        .iter()
        .map(|f| partition_signature(&f.with(SetWord::EMPTY)?, n))
        .collect::<Result<_>>()?;
    let all_fc = |l: &PartitionList| !sigs.iter().any(|s| leq(l, s));
    let lists = all_lists(&nonempty_bound(n));
    let set: HashSet<&PartitionList> = lists.iter().filter(|l| all_fc(l)).collect();
    let mut out: Vec<PartitionList> = lists
        .iter()
        .filter(|l| set.contains(l))
        .filter(|l| {
            (0..l.len()).all(|i| {
                if l.0[i] == 0 {
                    return true;
                }
                let mut lower = (*l).clone();
                lower.0[i] -= 1;
                !set.contains(&lower)
            })
        })
        .cloned()
        .collect();
    out.sort();
    Ok(out)
}

/// Maximal lists without `∅` all of whose families are nonFC-covered by the
/// index. Such lists form a down-set, so the walk only extends lists in it.
pub fn derive_ln_lists(n: usize, nonfc: &CoverIndex) -> Result<Vec<PartitionList>> {
    let lmax = nonempty_bound(n);
    let mut inside: HashSet<PartitionList> = HashSet::new();
    let mut stack = vec![(PartitionList::zeros(n + 1), Collection::unit(n))];
    while let Some((l, value)) = stack.pop() {
        inside.insert(l.clone());
        for m in l.last_nonzero().unwrap_or(0)..l.len() {
            let next = l.incremented(m);
            if !leq(&next, &lmax) {
                continue;
            }
            let v = iso_step(n, &value, m, &Always)?;
            if v.iter().all(|f| nonfc.nonfc_covered(f)) {
                stack.push((next, v));
            }
        }
    }
    let mut out: Vec<PartitionList> = inside
        .iter()
        .filter(|l| {
            (0..l.len()).all(|i| {
                let up = l.incremented(i);
                !leq(&up, &lmax) || !inside.contains(&up)
            })
        })
        .cloned()
        .collect();
    out.sort();
    Ok(out)
}

/// Every `L ∈ lf`: no `L`-partitioned family escapes FC-covering. Every
/// `L ∈ ln`: every `L`-partitioned family is nonFC-covered.
pub fn verify_semi_uniform_lists(
    n: usize,
    idx: &CoverIndex,
    lf: &[PartitionList],
    ln: &[PartitionList],
) -> Result<bool> {
    for l in lf {
        if !enum_iso_base(n, l, &NotFcCoveredIndexed(idx))?.is_empty() {
            return Ok(false);
        }
    }
    for l in ln {
        if !enum_iso_base(n, l, &Always)?.iter().all(|f| idx.nonfc_covered(f)) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn verify_semi_uniform(chars: &Characterization) -> Result<bool> {
    verify_semi_uniform_lists(chars.n, &chars.cover_index()?, &chars.lf_lists, &chars.ln_lists)
}

/// Outcome of the total coverage run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    /// Lists traversed: those without `∅` dominating no `lf` list.
    pub region_lists: usize,
    /// Irreducible families not FC-covered, up to isomorphism.
    pub emitted: usize,
    /// Emitted families not nonFC-covered either.
    pub uncovered: Vec<Family>,
}

impl CoverageReport {
    pub fn holds(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Every irreducible family below the `lf` lists that is not FC-covered is
/// nonFC-covered.
pub fn coverage_report(n: usize, idx: &CoverIndex, lf: &[PartitionList]) -> Result<CoverageReport> {
    let q = And(Irreducible, NotFcCoveredIndexed(idx));
    let stop = |l: &PartitionList| lf.iter().any(|s| leq(s, l));
    let out = enum_dp(
        Collection::unit(n),
        &mut |v, m| iso_step(n, v, m, &q),
        &stop,
        &nonempty_bound(n),
    )?;
    let mut emitted = 0;
    let mut uncovered = Vec::new();
    for (_, v) in &out {
        emitted += v.len();
        uncovered.extend(v.iter().filter(|f| !idx.nonfc_covered(f)).cloned());
    }
    Ok(CoverageReport {
        region_lists: out.len(),
        emitted,
        uncovered,
    })
}

pub fn verify_total_coverage(chars: &Characterization) -> Result<bool> {
    Ok(coverage_report(chars.n, &chars.cover_index()?, &chars.lf_lists)?.holds())
}

/// Lists with `l_0 = l_1 = l_2 = 0` bounded by `C(n, i)` that dominate no
/// list of `lf`; the second value counts all lists with that prefix.
pub fn region_count(n: usize, lf: &[PartitionList]) -> (usize, usize) {
    let mut bound = PartitionList::full(n);
    for v in bound.0.iter_mut().take(3) {
        *v = 0;
    }
    let lists = all_lists(&bound);
    let inside = lists
        .iter()
        .filter(|l| !lf.iter().any(|s| leq(s, l)))
        .count();
    (inside, lists.len())
}

/// One statistics row; all-family counts are absent when not computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatsRow {
    pub list: PartitionList,
    pub count_fc: Option<usize>,
    pub count_nonfc: Option<usize>,
    pub count_fc_irred: usize,
    pub count_nonfc_irred: usize,
    pub count_min_fc: usize,
    pub count_max_nonfc: usize,
}

/// Universes up to this size get counts over all families and all lists.
pub const FULL_STATS_LIMIT: usize = 4;

/// Per-list counts of non-isomorphic FC and nonFC families, classified by
/// coverage. Up to [`FULL_STATS_LIMIT`] every list `⪯ [C(n,0), .., C(n,n)]`
/// and every family is counted; beyond it only irreducible families without
/// `∅` on lists dominating no `lf` list.
pub fn stats(chars: &Characterization) -> Result<Vec<StatsRow>> {
    let n = chars.n;
    let idx = chars.cover_index()?;
    let is_fc = |f: &Family| -> Result<bool> {
        if idx.fc_covered(f) {
            Ok(true)
        } else if idx.nonfc_covered(f) {
            Ok(false)
        } else {
            Err(Error::Internal(format!("{f} is neither FC- nor nonFC-covered")))
        }
    };
    let sig_counts = |fams: &[&Family]| -> Result<BTreeMap<PartitionList, usize>> {
        let mut m = BTreeMap::new();
        for f in fams {
            let mut s = partition_signature(&f.without(SetWord::EMPTY), n)?;
            s.0[0] = 0;
            *m.entry(s).or_insert(0) += 1;
        }
        Ok(m)
    };
    let min_fc = sig_counts(&chars.minimal_fc.iter().map(|c| &c.family).collect::<Vec<_>>())?;
    let max_nonfc = sig_counts(&chars.maximal_nonfc.iter().map(|c| &c.family).collect::<Vec<_>>())?;

    let full = n <= FULL_STATS_LIMIT;
    let values = if full {
        enum_dp(
            Collection::unit(n),
            &mut |v, m| iso_step(n, v, m, &Always),
            &|_| false,
            &PartitionList::full(n),
        )?
    } else {
        let lf = &chars.lf_lists;
        enum_dp(
            Collection::unit(n),
            &mut |v, m| iso_step(n, v, m, &Irreducible),
            &|l| lf.iter().any(|s| leq(s, l)),
            &nonempty_bound(n),
        )?
    };
    let mut rows = Vec::with_capacity(values.len());
    for (l, v) in values {
        let (mut fc, mut nonfc, mut fc_irred, mut nonfc_irred) = (0, 0, 0, 0);
        for f in v.iter() {
            let status = is_fc(f)?;
            let irred = is_irreducible(f);
            match status {
                true => fc += 1,
                false => nonfc += 1,
            }
            if irred {
                match status {
                    true => fc_irred += 1,
                    false => nonfc_irred += 1,
                }
            }
        }
        let key = if l.0[0] == 0 { Some(&l) } else { None };
        rows.push(StatsRow {
            count_fc: full.then_some(fc),
            count_nonfc: full.then_some(nonfc),
            count_fc_irred: fc_irred,
            count_nonfc_irred: nonfc_irred,
            count_min_fc: key.and_then(|k| min_fc.get(k)).copied().unwrap_or(0),
            count_max_nonfc: key.and_then(|k| max_nonfc.get(k)).copied().unwrap_or(0),
            list: l,
        });
    }
    Ok(rows)
}

/// Number of `L`-partitioned families over `[n]`.
pub fn family_count(n: usize, l: &PartitionList) -> u128 {
    l.0.iter()
        .enumerate()
        .map(|(i, &c)| binomial(binomial(n, i) as usize, c))
        .product()
}
