//! Deciding FC status with certificates for both outcomes.
//!
//! Phase 1 looks for weights under which every collected extension has
//! nonnegative share; phase 2 looks for an extension with negative share
//! under those weights. Infeasibility in phase 1 yields a nonFC certificate,
//! failure in phase 2 an FC certificate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{closure, is_union_closed, Family, SetWord, MAX_UNIVERSE};
use crate::linarith::{find_dual_coefficients, scale_to_naturals, MinWeightLp, to_u64};
use crate::search::{find_negative_extension, ssn, uce_contains};
use crate::weights::WeightFn;

pub const DEFAULT_ITERATION_CAP: usize = 10_000;

/// `weight` has no union-closed extension of `family` with negative share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcCertificate {
    pub family: Family,
    pub weight: WeightFn,
}

/// Extensions `F_i` with coefficients `c_i` whose weighted shares are
/// negative for every element of the union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonFcCertificate {
    pub family: Family,
    pub witnesses: Vec<(Family, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FcStatus {
    Fc(FcCertificate),
    NonFc(NonFcCertificate),
}

impl FcStatus {
    pub fn is_fc(&self) -> bool {
        matches!(self, FcStatus::Fc(_))
    }

    pub fn family(&self) -> &Family {
        match self {
            FcStatus::Fc(c) => &c.family,
            FcStatus::NonFc(c) => &c.family,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub iteration_cap: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            iteration_cap: DEFAULT_ITERATION_CAP,
        }
    }
}

/// The family actually certified: `closure(F ∖ {∅})`.
pub fn normalize(f: &Family) -> Family {
    closure(&f.without(SetWord::EMPTY))
}

pub fn classify(f: &Family) -> Result<FcStatus> {
    classify_with(f, &ClassifyOptions::default()).map(|(s, _)| s)
}

/// Also returns the number of phase-1 rounds.
pub fn classify_with(f: &Family, opts: &ClassifyOptions) -> Result<(FcStatus, usize)> {
    let g = normalize(f);
    let x = g.union_all();
    if x.is_empty() {
        let witness = (Family::empty(f.universe()), 1);
        return Ok((
            FcStatus::NonFc(NonFcCertificate {
                family: f.clone(),
                witnesses: vec![witness],
            }),
            0,
        ));
    }
    let elems: Vec<usize> = x.elements().collect();
    let mut collected: Vec<Family> = Vec::new();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut lp = MinWeightLp::new(elems.len())?;
    for round in 1..=opts.iteration_cap {
        let Some(w) = phase_one(&mut lp, &elems, f.universe())? else {
            let coeffs = find_dual_coefficients(&rows)?
                .ok_or_else(|| Error::Internal("phase 1 and its dual are both infeasible".into()))?;
            let witnesses = collected
                .into_iter()
                .zip(coeffs)
                .filter(|&(_, c)| c > 0)
                .collect();
            return Ok((
                FcStatus::NonFc(NonFcCertificate {
                    family: f.clone(),
                    witnesses,
                }),
                round,
            ));
        };
        match find_negative_extension(&g, &w)? {
            None => {
                return Ok((
                    FcStatus::Fc(FcCertificate {
                        family: f.clone(),
                        weight: w,
                    }),
                    round,
                ))
            }
            Some(ext) => {
                let row = share_row(&ext, &elems);
                lp.add_row(&row)?;
                rows.push(row);
                collected.push(ext);
            }
        }
    }
    Err(Error::IterationCap(opts.iteration_cap))
}

/// `2·cnt(a, F) − |F|` for each `a` in `elems`.
fn share_row(f: &Family, elems: &[usize]) -> Vec<i64> {
    elems
        .iter()
        .map(|&a| 2 * f.count_containing(a) as i64 - f.len() as i64)
        .collect()
}

/// Least-total natural weights on `elems` with nonnegative share for every
/// row, scaled to the universe.
fn phase_one(lp: &mut MinWeightLp, elems: &[usize], n: usize) -> Result<Option<WeightFn>> {
    let Some(sol) = lp.solve()? else {
        return Ok(None);
    };
    let local = to_u64(&scale_to_naturals(&sol)?, "weights")?;
    let mut w = vec![0u64; n];
    for (&e, v) in elems.iter().zip(local) {
        w[e] = v;
    }
    Ok(Some(WeightFn::new(w)))
}

/// Classifies independent families in parallel; results keep input order.
pub fn classify_all(fs: &[Family]) -> Vec<Result<FcStatus>> {
    fs.par_iter().map(classify).collect()
}

pub fn verify_fc(cert: &FcCertificate) -> bool {
    let g = normalize(&cert.family);
    let x = g.union_all();
    if x.is_empty() || cert.weight.len() != g.universe() || !cert.weight.is_weight_fn_on(x) {
        return false;
    }
    matches!(ssn(&g, &cert.weight), Ok(false))
}

/// Checks the three witness conditions against `closure(F ∖ {∅})`.
pub fn verify_nonfc(cert: &NonFcCertificate) -> bool {
    let g = normalize(&cert.family);
    if !is_union_closed(&g) {
        return false;
    }
    if !cert.witnesses.iter().any(|&(_, c)| c > 0) {
        return false;
    }
    for (fi, _) in &cert.witnesses {
        if !matches!(uce_contains(&g, fi), Ok(true)) {
            return false;
        }
    }
    g.union_all().elements().all(|a| {
        let mut sum: i128 = 0;
        for (fi, c) in &cert.witnesses {
            let f = 2 * fi.count_containing(a) as i128 - fi.len() as i128;
            sum += *c as i128 * f;
        }
        sum < 0
    })
}

pub fn verify(status: &FcStatus) -> bool {
    match status {
        FcStatus::Fc(c) => verify_fc(c),
        FcStatus::NonFc(c) => verify_nonfc(c),
    }
}

/// `F^d`: the normalized family, the punctured blocks `H^d_s` built from the
/// witnesses repeated `c_i·d` times, and the top block `H^d`, over a universe
/// extended by `c·d + 1` fresh elements. `∅` is kept if the original family
/// has it.
pub fn expand_counterexample(cert: &NonFcCertificate, d: u64) -> Result<Family> {
    if d == 0 {
        return Err(Error::usage("d must be at least 1"));
    }
    let g = normalize(&cert.family);
    let n = g.universe();
    let c: u64 = cert
        .witnesses
        .iter()
        .try_fold(0u64, |acc, &(_, c)| acc.checked_add(c))
        .ok_or(Error::Overflow("coefficient sum"))?;
    if c == 0 {
        return Err(Error::usage("all coefficients are zero"));
    }
    let cd = c.checked_mul(d).ok_or(Error::Overflow("c·d"))?;
    let fresh = cd + 1;
    let m = (n as u64)
        .checked_add(fresh)
        .filter(|&m| m <= MAX_UNIVERSE as u64)
        .ok_or_else(|| {
            Error::ResourceCap(format!(
                "counterexample needs {n} + {fresh} elements, more than {MAX_UNIVERSE}; try smaller coefficients or d"
            ))
        })? as usize;
    let b_all: u64 = ((1u64 << fresh) - 1) << n;

    let mut sets: Vec<SetWord> = g.members().to_vec();
    if cert.family.contains(SetWord::EMPTY) {
        sets.push(SetWord::EMPTY);
    }
    let mut s = 0usize;
    for (fi, ci) in &cert.witnesses {
        for _ in 0..ci * d {
            let bs = b_all & !(1u64 << (n + s));
            sets.extend(fi.iter().map(|a| SetWord::from_bits(a.bits() | bs)));
            s += 1;
        }
    }
    sets.extend(g.union_all().subsets().map(|a| SetWord::from_bits(a.bits() | b_all)));
    Family::new(m, sets)
}

/// `Fd` is union-closed, contains `Fc`, and no element of `⋃Fc` lies in at
/// least half of its members.
pub fn check_counterexample(fc: &Family, fd: &Family) -> bool {
    if fc.universe() > fd.universe() || !is_union_closed(fd) {
        return false;
    }
    if !fc.iter().all(|a| fd.contains(a)) {
        return false;
    }
    fc.union_all()
        .elements()
        .all(|a| 2 * fd.count_containing(a) < fd.len())
}

/// Least `d ≥ 1` whose expansion passes [`check_counterexample`].
pub fn find_sufficient_d(cert: &NonFcCertificate) -> Result<(u64, Family)> {
    let mut d = 1;
    loop {
        let fd = expand_counterexample(cert, d)?;
        if check_counterexample(&cert.family, &fd) {
            return Ok((d, fd));
        }
        d += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, s: &[&[usize]]) -> Family {
        Family::of(n, s)
    }

    #[test]
    fn classify_examples() {
        let st = classify(&fam(1, &[&[0]])).unwrap();
        assert!(st.is_fc() && verify(&st));
        let st = classify(&fam(3, &[&[0, 1, 2]])).unwrap();
        assert!(!st.is_fc() && verify(&st));
        let st = classify(&fam(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3]])).unwrap();
        assert!(st.is_fc() && verify(&st));
    }

    #[test]
    fn degenerate_families_are_nonfc() {
        for f in [Family::empty(2), fam(2, &[&[]])] {
            let st = classify(&f).unwrap();
            assert!(!st.is_fc() && verify(&st), "{f}");
        }
    }

    #[test]
    fn verify_fc_examples() {
        let one = fam(1, &[&[0]]);
        assert!(verify_fc(&FcCertificate { family: one.clone(), weight: WeightFn::new(vec![1]) }));
        assert!(!verify_fc(&FcCertificate { family: one, weight: WeightFn::new(vec![0]) }));
        assert!(!verify_fc(&FcCertificate {
            family: fam(3, &[&[0, 1, 2]]),
            weight: WeightFn::uniform(3),
        }));
    }

    #[test]
    fn verify_nonfc_rejects_tampering() {
        let FcStatus::NonFc(cert) = classify(&fam(3, &[&[0, 1, 2]])).unwrap() else {
            panic!("expected nonFC");
        };
        let mut zero = cert.clone();
        zero.witnesses.iter_mut().for_each(|w| w.1 = 0);
        assert!(!verify_nonfc(&zero));
        let mut outside = cert.clone();
        outside.witnesses[0].0 = fam(3, &[&[0], &[1]]);
        assert!(!verify_nonfc(&outside));
    }

    #[test]
    fn expansion_of_three_set() {
        let f = fam(3, &[&[0, 1, 2]]);
        let FcStatus::NonFc(cert) = classify(&f).unwrap() else {
            panic!("expected nonFC");
        };
        let (d, fd) = find_sufficient_d(&cert).unwrap();
        assert!(d >= 1 && check_counterexample(&f, &fd));

        let g = normalize(&f);
        let c: u64 = cert.witnesses.iter().map(|w| w.1).sum();
        let blocks: usize = cert.witnesses.iter().map(|(fi, ci)| fi.len() * (*ci * d) as usize).sum();
        let top = 1usize << g.union_all().len();
        assert_eq!(fd.len(), g.len() + blocks + top);
        assert_eq!(fd.universe(), 3 + (c * d) as usize + 1);

        let b_all = SetWord::full(fd.universe()).difference(SetWord::full(3));
        let h: Vec<SetWord> = fd.iter().filter(|a| b_all.is_subset(*a)).collect();
        for a in g.union_all().elements() {
            let cnt = h.iter().filter(|s| s.contains(a)).count();
            assert_eq!(2 * cnt, h.len());
        }
    }
}
