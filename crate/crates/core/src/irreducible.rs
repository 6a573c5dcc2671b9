//! Dependence of a set on a family and reduction to the irreducible basis.

use crate::family::{Family, SetWord};

/// `A` is the union of some nonempty subfamily of `F`. Only members inside
/// `A` can take part, and taking all of them maximizes the union.
pub fn is_dependent(a: SetWord, f: &Family) -> bool {
    let mut any = false;
    let mut union = SetWord::EMPTY;
    for b in f.iter().filter(|b| b.is_subset(a)) {
        any = true;
        union = union.union(b);
    }
    any && union == a
}

/// No member is a union of other members.
pub fn is_irreducible(f: &Family) -> bool {
    f.iter().all(|a| !is_dependent_without(a, f))
}

fn is_dependent_without(a: SetWord, f: &Family) -> bool {
    let mut any = false;
    let mut union = SetWord::EMPTY;
    for b in f.iter().filter(|&b| b != a && b.is_subset(a)) {
        any = true;
        union = union.union(b);
    }
    any && union == a
}

/// The unique irreducible subfamily with the same closure. Larger sets are
/// examined first.
pub fn reduce(f: &Family) -> Family {
    let mut cur = f.clone();
    for &a in f.members().iter().rev() {
        if is_dependent_without(a, &cur) {
            cur = cur.without(a);
        }
    }
    cur
}
