//! Sets as bitmasks, families as canonically sorted set lists, and the
//! union-closure operations everything else is built from.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest universe a [`SetWord`] can address.
pub const MAX_UNIVERSE: usize = 64;

/// Largest universe for operations that enumerate a whole powerset.
pub const POWERSET_LIMIT: usize = 16;

/// A subset of `{0, .., n-1}`; element `i` is present iff bit `i` is set.
///
/// Sets are ordered by cardinality first and by bitmask value second.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SetWord(u64);

impl SetWord {
    pub const EMPTY: SetWord = SetWord(0);

    pub const fn from_bits(bits: u64) -> Self {
        SetWord(bits)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elems: I) -> Result<Self> {
        let mut bits = 0u64;
        for e in elems {
            if e >= MAX_UNIVERSE {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    n: MAX_UNIVERSE,
                });
            }
            bits |= 1 << e;
        }
        Ok(SetWord(bits))
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SetWord(u64::MAX)
        } else {
            SetWord((1u64 << n) - 1)
        }
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, e: usize) -> bool {
        e < 64 && (self.0 >> e) & 1 == 1
    }

    pub const fn union(self, other: SetWord) -> SetWord {
        SetWord(self.0 | other.0)
    }

    pub const fn intersection(self, other: SetWord) -> SetWord {
        SetWord(self.0 & other.0)
    }

    pub const fn difference(self, other: SetWord) -> SetWord {
        SetWord(self.0 & !other.0)
    }

    pub const fn is_subset(self, other: SetWord) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: SetWord) -> bool {
        self.0 & other.0 == 0
    }

    /// True when every element is below `n`.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset(SetWord::full(n))
    }

    /// Smallest `n` such that the set fits in `{0, .., n-1}`.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let e = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(e)
            }
        })
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = SetWord> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(SetWord(cur))
        })
    }
}

impl Ord for SetWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .count_ones()
            .cmp(&other.0.count_ones())
            .then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for SetWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// A duplicate-free family of subsets of `{0, .., n-1}`, kept sorted in the
/// canonical set order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: usize,
    members: Vec<SetWord>,
}

impl Family {
    pub fn empty(n: usize) -> Self {
        Family {
            n,
            members: Vec::new(),
        }
    }

    /// Builds a family, sorting and deduplicating the sets. Every set must fit
    /// in the universe.
    pub fn new<I: IntoIterator<Item = SetWord>>(n: usize, sets: I) -> Result<Self> {
        if n > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge {
                n,
                max: MAX_UNIVERSE,
            });
        }
        let mut members: Vec<SetWord> = sets.into_iter().collect();
        for s in &members {
            if !s.fits(n) {
                return Err(Error::ElementOutOfRange {
                    element: s.span() - 1,
                    n,
                });
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { n, members })
    }

    /// Convenience constructor from element lists; panics on bad input, so it
    /// is meant for literals in code and tests.
    pub fn of(n: usize, sets: &[&[usize]]) -> Self {
        let sets = sets
            .iter()
            .map(|s| SetWord::from_elements(s.iter().copied()).expect("element in range"));
        Family::new(n, sets).expect("valid family literal")
    }

    /// Caller guarantees the sets fit in `n`; they are sorted and deduplicated here.
    pub(crate) fn from_unsorted(n: usize, mut members: Vec<SetWord>) -> Self {
        members.sort_unstable();
        members.dedup();
        debug_assert!(members.iter().all(|s| s.fits(n)));
        Family { n, members }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[SetWord] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = SetWord> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: SetWord) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    /// `⋃F`; the union of the empty family is the empty set.
    pub fn union_all(&self) -> SetWord {
        self.members
            .iter()
            .fold(SetWord::EMPTY, |acc, s| acc.union(*s))
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.members.iter().all(|s| other.contains(*s))
    }

    pub fn with(&self, a: SetWord) -> Result<Family> {
        self.check_set(a)?;
        let mut members = self.members.clone();
        if let Err(pos) = members.binary_search(&a) {
            members.insert(pos, a);
        }
        Ok(Family { n: self.n, members })
    }

    pub fn without(&self, a: SetWord) -> Family {
        Family {
            n: self.n,
            members: self.members.iter().copied().filter(|s| *s != a).collect(),
        }
    }

    /// Same sets viewed over a different universe size.
    pub fn with_universe(&self, n: usize) -> Result<Family> {
        Family::new(n, self.members.iter().copied())
    }

    /// Number of members containing element `a` (`cnt(a, F)`).
    pub fn count_containing(&self, a: usize) -> usize {
        self.members.iter().filter(|s| s.contains(a)).count()
    }

    pub(crate) fn check_set(&self, a: SetWord) -> Result<()> {
        if a.fits(self.n) {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                element: a.span() - 1,
                n: self.n,
            })
        }
    }

    pub(crate) fn check_same_universe(&self, other: &Family) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    /// Element lists in canonical order, the JSON form of a family.
    pub fn to_sets(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(|s| s.elements().collect()).collect()
    }

    pub fn from_sets(n: usize, sets: &[Vec<usize>]) -> Result<Family> {
        let mut words = Vec::with_capacity(sets.len());
        for s in sets {
            for &e in s {
                if e >= n {
                    return Err(Error::ElementOutOfRange { element: e, n });
                }
            }
            words.push(SetWord::from_elements(s.iter().copied())?);
        }
        Family::new(n, words)
    }
}

impl Ord for Family {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members
            .cmp(&other.members)
            .then(self.n.cmp(&other.n))
    }
}

impl PartialOrd for Family {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}@{}", self.n)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// Parses the textual grammar `{{0,1},{2}}`. The universe is the smallest one
/// containing every element; use [`parse_family`] to fix it explicitly.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let sets = parse_sets(s)?;
        let span = sets.iter().map(|w| w.span()).max().unwrap_or(0);
        Family::new(span, sets)
    }
}

/// Parses a family over an explicit universe of size `n`.
pub fn parse_family(s: &str, n: usize) -> Result<Family> {
    let sets = parse_sets(s)?;
    Family::new(n, sets)
}

fn parse_sets(s: &str) -> Result<Vec<SetWord>> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let expect = |pos: &mut usize, c: char| -> Result<()> {
        if chars.get(*pos) == Some(&c) {
            *pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected '{c}' at position {}, found {:?}",
                *pos,
                chars.get(*pos)
            )))
        }
    };
    let mut sets = Vec::new();
    expect(&mut pos, '{')?;
    if chars.get(pos) == Some(&'}') {
        pos += 1;
    } else {
        loop {
            expect(&mut pos, '{')?;
            let mut elems = Vec::new();
            if chars.get(pos) == Some(&'}') {
                pos += 1;
            } else {
                loop {
                    let start = pos;
                    while chars.get(pos).is_some_and(|c| c.is_ascii_digit()) {
                        pos += 1;
                    }
                    if start == pos {
                        return Err(Error::Parse(format!("expected a number at position {pos}")));
                    }
                    let num: String = chars[start..pos].iter().collect();
                    let e: usize = num
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad number {num}")))?;
                    if e >= MAX_UNIVERSE {
                        return Err(Error::ElementOutOfRange {
                            element: e,
                            n: MAX_UNIVERSE,
                        });
                    }
                    elems.push(e);
                    match chars.get(pos) {
                        Some(',') => pos += 1,
                        Some('}') => {
                            pos += 1;
                            break;
                        }
                        other => {
                            return Err(Error::Parse(format!(
                                "expected ',' or '}}' at position {pos}, found {other:?}"
                            )))
                        }
                    }
                }
            }
            sets.push(SetWord::from_elements(elems)?);
            match chars.get(pos) {
                Some(',') => pos += 1,
                Some('}') => {
                    pos += 1;
                    break;
                }
                other => {
                    return Err(Error::Parse(format!(
                        "expected ',' or '}}' at position {pos}, found {other:?}"
                    )))
                }
            }
        }
    }
    if pos != chars.len() {
        return Err(Error::Parse(format!("trailing input at position {pos}")));
    }
    Ok(sets)
}

/// A duplicate-free, sorted collection of families.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Collection {
    families: Vec<Family>,
}

impl Collection {
    pub fn new<I: IntoIterator<Item = Family>>(families: I) -> Self {
        let mut families: Vec<Family> = families.into_iter().collect();
        families.sort_unstable();
        families.dedup();
        Collection { families }
    }

    /// The collection `{∅-family}` holding only the empty family.
    pub fn unit(n: usize) -> Self {
        Collection {
            families: vec![Family::empty(n)],
        }
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn iter(&self) -> impl Iterator<Item = &Family> {
        self.families.iter()
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn contains(&self, f: &Family) -> bool {
        self.families.binary_search(f).is_ok()
    }

    pub fn into_vec(self) -> Vec<Family> {
        self.families
    }
}

impl FromIterator<Family> for Collection {
    fn from_iter<I: IntoIterator<Item = Family>>(iter: I) -> Self {
        Collection::new(iter)
    }
}

impl IntoIterator for Collection {
    type Item = Family;
    type IntoIter = std::vec::IntoIter<Family>;

    fn into_iter(self) -> Self::IntoIter {
        self.families.into_iter()
    }
}

/// `F1 ⊎ F2 = {A ∪ B : A ∈ F1, B ∈ F2}`.
pub fn sum_fam(f1: &Family, f2: &Family) -> Result<Family> {
    f1.check_same_universe(f2)?;
    let mut out = Vec::with_capacity(f1.len() * f2.len());
    for a in f1.iter() {
        for b in f2.iter() {
            out.push(a.union(b));
        }
    }
    Ok(Family::from_unsorted(f1.n, out))
}

/// The smallest union-closed family containing `f`.
pub fn closure(f: &Family) -> Family {
    let mut seen: HashSet<SetWord> = HashSet::with_capacity(f.len() * 2);
    let mut out: Vec<SetWord> = Vec::with_capacity(f.len() * 2);
    for a in f.iter() {
        // ic(A, F): F ∪ {A} ∪ (F ⊎ {A}); F is closed at this point.
        let before = out.len();
        if seen.insert(a) {
            out.push(a);
        }
        for i in 0..before {
            let u = out[i].union(a);
            if seen.insert(u) {
                out.push(u);
            }
        }
    }
    Family::from_unsorted(f.n, out)
}

/// `F ∪ {A} ∪ (F ⊎ {A}) ∪ (Fc ⊎ {A})`.
pub fn insert_close_for(fc: &Family, a: SetWord, f: &Family) -> Result<Family> {
    fc.check_same_universe(f)?;
    f.check_set(a)?;
    let mut out: Vec<SetWord> = Vec::with_capacity(f.len() * 2 + fc.len() + 1);
    out.extend(f.iter());
    out.push(a);
    out.extend(f.iter().map(|b| b.union(a)));
    out.extend(fc.iter().map(|c| c.union(a)));
    Ok(Family::from_unsorted(f.n, out))
}

/// `ic(A, F)`: [`insert_close_for`] with an empty `Fc`.
pub fn insert_close(a: SetWord, f: &Family) -> Result<Family> {
    insert_close_for(&Family::empty(f.n), a, f)
}

/// `F ⊎ F ⊆ F` and `F ⊎ Fc ⊆ F`.
pub fn is_union_closed_for(fc: &Family, f: &Family) -> Result<bool> {
    fc.check_same_universe(f)?;
    Ok(union_closed_for_unchecked(fc.members(), f))
}

pub(crate) fn union_closed_for_unchecked(fc: &[SetWord], f: &Family) -> bool {
    let m = f.members();
    for (i, a) in m.iter().enumerate() {
        for b in &m[i + 1..] {
            if !f.contains(a.union(*b)) {
                return false;
            }
        }
        for c in fc {
            if !f.contains(a.union(*c)) {
                return false;
            }
        }
    }
    true
}

pub fn is_union_closed(f: &Family) -> bool {
    union_closed_for_unchecked(&[], f)
}

/// Some element of `⋃F` occurs in at least half of the members.
pub fn is_frankl(f: &Family) -> bool {
    let total = f.len();
    f.union_all()
        .elements()
        .any(|a| 2 * f.count_containing(a) >= total)
}
