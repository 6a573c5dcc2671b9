//! Algebraic laws of closure, shares, reduction, covering and enumeration,
//! each checked against a direct oracle.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use fcfam::classify::classify;
use fcfam::covering::{covered, fc_covered, fc_covered_by_any, nonfc_covered, nonfc_covered_by_any};
use fcfam::enumeration::{
    enum_iso_base, partition_signature, And, IncPredicate, Irreducible, NotFcCovered, PartitionList,
};
use fcfam::irreducible::{is_dependent, is_irreducible, reduce};
use fcfam::iso::{all_perms, apply_perm, canonical};
use fcfam::linarith::{int, solve, LinearSystem, Relation};
use fcfam::search::ssn;
use fcfam::small;
use fcfam::weights::{build_share_table, family_share, hyper_share, hypercube, project, set_share};
use fcfam::{closure, is_frankl, is_union_closed, is_union_closed_for, parse_family, Collection, Family, SetWord, WeightFn};

use common::{all_families, has_small_counterexample, is_uce, lists_below};

fn family(n: usize, max: usize) -> impl Strategy<Value = Family> {
    prop::collection::vec(0..1u64 << n, 0..max)
        .prop_map(move |v| Family::new(n, v.into_iter().map(SetWord::from_bits)).unwrap())
}

#[test]
fn closure_is_least_union_closed_superfamily() {
    let closed: Vec<Family> = all_families(3).filter(is_union_closed).collect();
    for f in all_families(3) {
        let c = closure(&f);
        for g in closed.iter().filter(|g| f.is_subfamily_of(g)) {
            assert!(c.is_subfamily_of(g), "{f} ⊆ {g}");
        }
        let unions: BTreeSet<SetWord> = (1u64..1 << f.len())
            .map(|pick| {
                f.iter()
                    .enumerate()
                    .filter(|(i, _)| pick >> i & 1 == 1)
                    .fold(SetWord::EMPTY, |acc, (_, a)| acc.union(a))
            })
            .collect();
        assert_eq!(c.members(), unions.into_iter().collect::<Vec<_>>().as_slice());
    }
}

#[test]
fn closed_for_family_is_closed_for_its_closure() {
    for fc in all_families(3) {
        let x = fc.union_all();
        let cl = closure(&fc);
        for f in all_families(3).filter(|f| f.iter().all(|a| a.is_subset(x))) {
            if is_union_closed_for(&fc, &f).unwrap() {
                assert!(is_union_closed_for(&cl, &f).unwrap(), "{fc} {f}");
            }
        }
    }
}

/// Frankl's condition holds iff some weight function on a bounded grid has
/// nonnegative share.
#[test]
fn frankl_iff_some_weight_has_nonnegative_share() {
    for f in all_families(3).filter(|f| !f.is_empty()) {
        let x = f.union_all();
        let bound = f.len() as u64 + 1;
        let witness = (0..bound.pow(3)).any(|i| {
            let w = WeightFn::new(vec![i % bound, i / bound % bound, i / bound / bound]);
            w.is_weight_fn_on(x) && family_share(&w, &f, x).unwrap() >= 0
        });
        assert_eq!(is_frankl(&f), witness, "{f}");
    }
}

#[test]
fn hypercubes_partition_the_powerset() {
    for bits in 0u64..32 {
        let all = SetWord::from_bits(bits);
        for s in all.subsets() {
            let k = all.difference(s);
            let mut seen = Vec::new();
            for kk in k.subsets() {
                seen.extend(hypercube(kk, s).unwrap());
            }
            seen.sort();
            let mut expect: Vec<SetWord> = all.subsets().collect();
            expect.sort();
            assert_eq!(seen, expect, "K = {k}, S = {s}");
        }
    }
}

#[test]
fn share_table_matches_set_share() {
    for n in 1..=6 {
        let x = SetWord::full(n);
        for seed in 0..4u64 {
            let w = WeightFn::new((0..n as u64).map(|e| (e * 5 + seed * 3) % 7).collect());
            if !w.is_weight_fn_on(x) {
                continue;
            }
            let t = build_share_table(&w, x).unwrap();
            for a in x.subsets() {
                assert_eq!(t.get(a), set_share(&w, a, x).unwrap());
            }
        }
    }
}

proptest! {
    #[test]
    fn projection_share_when_base_weight_is_zero(f in family(5, 14), w in prop::collection::vec(0u64..5, 5), k in 0u64..32) {
        let x = SetWord::full(5);
        let k = SetWord::from_bits(k);
        let mut w = w;
        for e in k.elements() {
            w[e] = 0;
        }
        prop_assume!(w.iter().any(|&v| v > 0));
        let w = WeightFn::new(w);
        let s = x.difference(k);
        prop_assert_eq!(
            hyper_share(k, s, &f, &w, x).unwrap(),
            family_share(&w, &project(k, s, &f).unwrap(), x).unwrap()
        );
    }

    #[test]
    fn canonical_is_idempotent(f in family(6, 12)) {
        let c = canonical(&f);
        prop_assert_eq!(canonical(&c), c);
    }

    #[test]
    fn parse_print_round_trip(f in family(6, 12)) {
        let text = f.to_string();
        prop_assert_eq!(parse_family(&text, 6).unwrap(), f.clone());
        prop_assert_eq!(parse_family(&text, 6).unwrap().to_string(), text);
    }

    #[test]
    fn dependence_matches_subfamily_unions(f in family(5, 10), a in 0u64..32) {
        let a = SetWord::from_bits(a);
        let m = f.members();
        let brute = (1u64..1 << m.len()).any(|pick| {
            m.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1)
                .fold(SetWord::EMPTY, |acc, (_, b)| acc.union(*b)) == a
        });
        prop_assert_eq!(is_dependent(a, &f), brute);
    }

    #[test]
    fn reduce_ignores_removal_order(f in family(5, 10), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut cur = f.clone();
        loop {
            let mut order: Vec<SetWord> = cur.members().to_vec();
            order.shuffle(&mut rng);
            let redundant = order.into_iter().find(|&a| {
                let rest = cur.without(a);
                is_dependent(a, &rest)
            });
            match redundant {
                Some(a) => cur = cur.without(a),
                None => break,
            }
        }
        prop_assert!(is_irreducible(&cur));
        prop_assert_eq!(cur, reduce(&f));
    }

    #[test]
    fn covering_is_monotone_and_invariant(
        f in family(4, 6), extra in family(4, 4), fc in family(4, 3), nc in family(4, 4), p in 0usize..24,
    ) {
        let bigger = Family::new(4, f.iter().chain(extra.iter())).unwrap();
        if fc_covered(&f, &fc).unwrap() {
            prop_assert!(fc_covered(&bigger, &fc).unwrap());
        }
        if nonfc_covered(&bigger, &nc).unwrap() {
            prop_assert!(nonfc_covered(&f, &nc).unwrap());
        }
        let g = apply_perm(&all_perms(4)[p], &f).unwrap();
        prop_assert_eq!(fc_covered(&f, &fc).unwrap(), fc_covered(&g, &fc).unwrap());
        prop_assert_eq!(nonfc_covered(&f, &nc).unwrap(), nonfc_covered(&g, &nc).unwrap());

        let fcs = Collection::new([fc]);
        let ncs = Collection::new([nc]);
        if covered(&f.without(SetWord::EMPTY), &fcs, &ncs).unwrap() {
            prop_assert!(covered(&f, &fcs, &ncs).unwrap());
        }
        let cl = closure(&f);
        prop_assert_eq!(covered(&f, &fcs, &ncs).unwrap(), covered(&cl, &fcs, &ncs).unwrap());
    }

    #[test]
    fn incremental_predicates_agree(f in family(4, 6), a in 0u64..16, fcs in prop::collection::vec(family(4, 3), 1..3)) {
        let a = SetWord::from_bits(a);
        prop_assume!(!f.contains(a) && f.iter().all(|b| b < a));
        let fcs = Collection::new(fcs);
        let g = f.with(a).unwrap();
        let preds: [&dyn IncPredicate; 3] = [&Irreducible, &NotFcCovered(&fcs), &And(Irreducible, NotFcCovered(&fcs))];
        for q in preds {
            prop_assert_eq!(q.holds(&g).unwrap(), q.holds(&f).unwrap() && q.holds_inc(&f, a).unwrap());
        }
    }
}

#[test]
fn ssn_is_sound_over_four_elements() {
    let x = SetWord::full(4);
    let mut rng = StdRng::seed_from_u64(11);
    let mut corpus: Vec<Family> = (0..40)
        .map(|_| common::random_family(&mut rng, 4))
        .filter(|f| f.union_all() == x)
        .collect();
    corpus.truncate(12);
    let weights = [vec![1, 1, 1, 1], vec![2, 1, 1, 0], vec![3, 1, 2, 1]];
    let mut refuted = 0;
    for fc in &corpus {
        let base = small::to_bits(fc);
        for w in &weights {
            let w = WeightFn::new(w.clone());
            if ssn(fc, &w).unwrap() {
                continue;
            }
            refuted += 1;
            for bits in 0u64..1 << 16 {
                if !small::union_closed_for_bits(base, bits) {
                    continue;
                }
                let f = small::from_bits(4, bits);
                assert!(is_uce(fc, &f));
                assert!(family_share(&w, &f, x).unwrap() >= 0, "{fc} {w:?} {f}");
            }
        }
    }
    assert!(corpus.len() >= 8 && refuted > 0, "{} families, {refuted} checked", corpus.len());
}

#[test]
fn fc_covering_is_sound_over_three_elements() {
    let fcs: Vec<Family> = all_families(3)
        .filter(|f| f.len() <= 3 && classify(f).unwrap().is_fc())
        .collect();
    for f in all_families(3) {
        for fc in &fcs {
            if fc_covered(&f, fc).unwrap() {
                assert!(!has_small_counterexample(&f), "{f} covered by {fc}");
                break;
            }
        }
    }
}

/// Every irreducible `L`-partitioned family over `[4]` is isomorphic to
/// exactly one enumerated family.
#[test]
fn irreducible_enumeration_is_an_iso_base_at_four() {
    let mut by_list: BTreeMap<PartitionList, BTreeSet<Family>> = BTreeMap::new();
    for f in all_families(4).filter(is_irreducible) {
        by_list
            .entry(partition_signature(&f, 4).unwrap())
            .or_default()
            .insert(canonical(&f));
    }
    for l in lists_below(&PartitionList::full(4)) {
        let got = enum_iso_base(4, &l, &Irreducible).unwrap();
        let set: BTreeSet<Family> = got.iter().map(canonical).collect();
        assert_eq!(set.len(), got.len(), "{l}");
        assert_eq!(set, by_list.remove(&l).unwrap_or_default(), "{l}");
    }
    assert!(by_list.is_empty());
}

#[test]
fn fc_covered_by_any_matches_single_queries() {
    let fcs = Collection::new([Family::of(3, &[&[0]]), Family::of(3, &[&[0, 1], &[1, 2]])]);
    let ncs = Collection::new([Family::of(3, &[&[0, 1, 2]])]);
    for f in all_families(3) {
        let any = fcs.iter().any(|g| fc_covered(&f, g).unwrap());
        assert_eq!(fc_covered_by_any(&f, &fcs).unwrap(), any);
        let any = ncs.iter().any(|g| nonfc_covered(&f, g).unwrap());
        assert_eq!(nonfc_covered_by_any(&f, &ncs).unwrap(), any);
    }
}

/// Solves the square system picked by `rows`, if it is nonsingular.
fn vertex(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.iter().zip(b).map(|(r, v)| {
        let mut r = r.clone();
        r.push(v.clone());
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x = &*x - &factor * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn system() -> impl Strategy<Value = (usize, Vec<(Vec<i64>, u8, i64)>)> {
    (1usize..=3).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec((prop::collection::vec(-3i64..4, k), 0u8..3, -4i64..5), 1..5),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Inside the box `0 ≤ x ≤ 4`, a system is feasible iff some vertex of
    /// the constraint arrangement satisfies it.
    #[test]
    fn solve_agrees_with_vertex_enumeration((k, rows) in system()) {
        let mut sys = LinearSystem::new(k);
        for (c, rel, rhs) in &rows {
            let rel = [Relation::Le, Relation::Ge, Relation::Eq][*rel as usize];
            sys.row(c, rel, *rhs);
        }
        sys.nonnegative();
        for j in 0..k {
            let mut c = vec![0; k];
            c[j] = 1;
            sys.row(&c, Relation::Le, 4);
        }
        let got = solve(&sys).unwrap();
        if let Some(x) = &got {
            prop_assert!(sys.satisfied_by(x));
        }
        let a: Vec<Vec<BigRational>> = sys.rows.iter().map(|r| r.coeffs.clone()).collect();
        let b: Vec<BigRational> = sys.rows.iter().map(|r| r.rhs.clone()).collect();
        let brute = combinations(a.len(), k).into_iter().any(|pick| {
            let sa: Vec<_> = pick.iter().map(|&i| a[i].clone()).collect();
            let sb: Vec<_> = pick.iter().map(|&i| b[i].clone()).collect();
            vertex(&sa, &sb).is_some_and(|x| {
                sys.satisfied_by(&fcfam::linarith::RationalVec(x))
            })
        });
        let grid = (0..5i64.pow(k as u32)).any(|i| {
            let x: Vec<BigRational> = (0..k).map(|j| int(i / 5i64.pow(j as u32) % 5)).collect();
            sys.satisfied_by(&fcfam::linarith::RationalVec(x))
        });
        prop_assert_eq!(got.is_some(), brute);
        if grid {
            prop_assert!(got.is_some());
        }
    }
}
