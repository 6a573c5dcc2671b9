//! Brute-force helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::Rng;

use fcfam::enumeration::{partition_signature, IncPredicate, PartitionList};
use fcfam::iso::canonical;
use fcfam::small;
use fcfam::{Family, SetWord};

pub fn random_family(rng: &mut StdRng, n: usize) -> Family {
    let size = rng.gen_range(1..=8);
    Family::new(n, (0..size).map(|_| SetWord::from_bits(rng.gen_range(0..1u64 << n)))).unwrap()
}

/// Every family over `[n]`, `n ≤ 4`.
pub fn all_families(n: usize) -> impl Iterator<Item = Family> {
    (0u64..1 << (1 << n)).map(move |b| small::from_bits(n, b))
}

/// `F ⊆ pow(⋃Fc)`, union-closed, and closed under unions with `Fc`.
pub fn is_uce(fc: &Family, f: &Family) -> bool {
    let x = fc.union_all();
    f.iter().all(|a| a.is_subset(x))
        && f.iter().all(|a| {
            f.iter().all(|b| f.contains(a.union(b))) && fc.iter().all(|c| f.contains(a.union(c)))
        })
}

/// Some union-closed `F ⊇ Fc` over the same universe has no abundant element
/// inside `⋃Fc`.
pub fn has_small_counterexample(fc: &Family) -> bool {
    let x = fc.union_all();
    all_families(fc.universe()).any(|f| {
        fc.is_subfamily_of(&f)
            && fcfam::is_union_closed(&f)
            && !x.elements().any(|a| 2 * f.count_containing(a) >= f.len())
    })
}

pub fn lists_below(full: &PartitionList) -> Vec<PartitionList> {
    let mut out = vec![PartitionList::zeros(full.len())];
    for i in 0..full.len() {
        out = out
            .into_iter()
            .flat_map(|l| {
                (0..=full.counts()[i]).map(move |v| {
                    let mut c = l.counts().to_vec();
                    c[i] = v;
                    PartitionList(c)
                })
            })
            .collect();
    }
    out
}

pub fn brute_iso_base(n: usize, l: &PartitionList, q: &dyn IncPredicate) -> BTreeSet<Family> {
    all_families(n)
        .filter(|f| partition_signature(f, n).unwrap() == *l && q.holds(f).unwrap())
        .map(|f| canonical(&f))
        .collect()
}
