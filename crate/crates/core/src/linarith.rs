//! Exact rational linear programming (two-phase simplex, Bland's rule),
//! integer scaling, dual coefficient extraction and LP-file export.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::family::{Family, SetWord, POWERSET_LIMIT};
use crate::weights::{build_share_table, WeightFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

/// Rows over `num_vars` unrestricted variables, with an optional objective to
/// minimize. Rows of the form `x_j ≥ 0` act as sign constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub rows: Vec<Row>,
    pub objective: Option<Vec<BigRational>>,
}

/// Exact solution vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVec(pub Vec<BigRational>);

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
            objective: None,
        }
    }

    pub fn row(&mut self, coeffs: &[i64], relation: Relation, rhs: i64) -> &mut Self {
        self.rows.push(Row {
            coeffs: coeffs.iter().map(|&c| int(c)).collect(),
            relation,
            rhs: int(rhs),
        });
        self
    }

    /// `x_j ≥ 0` for every variable.
    pub fn nonnegative(&mut self) -> &mut Self {
        for j in 0..self.num_vars {
            let mut c = vec![0; self.num_vars];
            c[j] = 1;
            self.row(&c, Relation::Ge, 0);
        }
        self
    }

    pub fn minimize(&mut self, coeffs: &[i64]) -> &mut Self {
        self.objective = Some(coeffs.iter().map(|&c| int(c)).collect());
        self
    }

    /// Every row holds exactly at `x`.
    pub fn satisfied_by(&self, x: &RationalVec) -> bool {
        x.0.len() == self.num_vars
            && self.rows.iter().all(|r| {
                let lhs: BigRational = r.coeffs.iter().zip(&x.0).map(|(a, b)| a * b).sum();
                match r.relation {
                    Relation::Le => lhs <= r.rhs,
                    Relation::Ge => lhs >= r.rhs,
                    Relation::Eq => lhs == r.rhs,
                }
            })
    }
}

/// Column bookkeeping for a variable of the original system.
enum VarCols {
    NonNeg(usize),
    Free(usize, usize),
}

/// Dense tableau; the last column holds the right-hand side and the last row
/// the reduced costs with the negated objective value in its corner.
struct Tableau {
    t: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn set_costs(&mut self, cost: &[BigRational]) {
        let m = self.rows();
        let mut obj = vec![BigRational::zero(); self.cols + 1];
        obj[..cost.len()].clone_from_slice(cost);
        for i in 0..m {
            let cb = cost.get(self.basis[i]).cloned().unwrap_or_else(BigRational::zero);
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.t[i]) {
                *o = &*o - &cb * v;
            }
        }
        self.t[m] = obj;
    }

    /// Minimizes the installed costs over columns `< allowed`; Bland's rule.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let m = self.rows();
        loop {
            let Some(c) = (0..allowed).find(|&j| self.t[m][j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..m {
                if self.t[i][c].is_positive() {
                    let ratio = &self.t[i][self.cols] / &self.t[i][c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// A feasible point, optimal for the objective if one is given; `None` when
/// the system is infeasible.
pub fn solve(sys: &LinearSystem) -> Result<Option<RationalVec>> {
    if sys.num_vars == 0 {
        return Err(Error::usage("linear system needs at least one variable"));
    }
    if sys.rows.iter().any(|r| r.coeffs.len() != sys.num_vars)
        || sys.objective.as_ref().is_some_and(|o| o.len() != sys.num_vars)
    {
        return Err(Error::usage("coefficient vector length differs from variable count"));
    }

    let mut nonneg = vec![false; sys.num_vars];
    let mut rows: Vec<&Row> = Vec::new();
    for r in &sys.rows {
        let nz: Vec<usize> = (0..sys.num_vars).filter(|&j| !r.coeffs[j].is_zero()).collect();
        let sign_row = nz.len() == 1
            && r.rhs.is_zero()
            && match r.relation {
                Relation::Ge => r.coeffs[nz[0]].is_positive(),
                Relation::Le => r.coeffs[nz[0]].is_negative(),
                Relation::Eq => false,
            };
        if sign_row {
            nonneg[nz[0]] = true;
        } else {
            rows.push(r);
        }
    }

    let mut layout = Vec::with_capacity(sys.num_vars);
    let mut ncols = 0;
    for &nn in &nonneg {
        if nn {
            layout.push(VarCols::NonNeg(ncols));
            ncols += 1;
        } else {
            layout.push(VarCols::Free(ncols, ncols + 1));
            ncols += 2;
        }
    }
    let structural = ncols;
    let slack_count = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let m = rows.len();
    let art_start = structural + slack_count;
    let cols = art_start + m;

    let mut t = vec![vec![BigRational::zero(); cols + 1]; m + 1];
    let mut slack = structural;
    for (i, r) in rows.iter().enumerate() {
        for (j, lay) in layout.iter().enumerate() {
            match *lay {
                VarCols::NonNeg(c) => t[i][c] = r.coeffs[j].clone(),
                VarCols::Free(p, q) => {
                    t[i][p] = r.coeffs[j].clone();
                    t[i][q] = -r.coeffs[j].clone();
                }
            }
        }
        match r.relation {
            Relation::Le => {
                t[i][slack] = BigRational::one();
                slack += 1;
            }
            Relation::Ge => {
                t[i][slack] = -BigRational::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        t[i][cols] = r.rhs.clone();
        if r.rhs.is_negative() {
            for v in t[i].iter_mut() {
                *v = -v.clone();
            }
        }
        t[i][art_start + i] = BigRational::one();
    }
    let mut tab = Tableau {
        t,
        basis: (art_start..cols).collect(),
        cols,
    };

    let mut phase1 = vec![BigRational::zero(); cols];
    for c in phase1.iter_mut().skip(art_start) {
        *c = BigRational::one();
    }
    tab.set_costs(&phase1);
    tab.optimize(cols)?;
    if !tab.t[m][cols].is_zero() {
        return Ok(None);
    }

    // Drive remaining artificials out of the basis; rows where that fails are
    // redundant and dropped.
    let mut i = 0;
    while i < tab.rows() {
        if tab.basis[i] >= art_start {
            if let Some(c) = (0..art_start).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, c);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    if let Some(obj) = &sys.objective {
        let mut cost = vec![BigRational::zero(); cols];
        for (j, lay) in layout.iter().enumerate() {
            match *lay {
                VarCols::NonNeg(c) => cost[c] = obj[j].clone(),
                VarCols::Free(p, q) => {
                    cost[p] = obj[j].clone();
                    cost[q] = -obj[j].clone();
                }
            }
        }
        tab.set_costs(&cost);
        tab.optimize(art_start)?;
    }

    let mut values = vec![BigRational::zero(); cols];
    for (i, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.t[i][cols].clone();
    }
    let x = layout
        .iter()
        .map(|lay| match *lay {
            VarCols::NonNeg(c) => values[c].clone(),
            VarCols::Free(p, q) => &values[p] - &values[q],
        })
        .collect();
    Ok(Some(RationalVec(x)))
}

/// Minimizes `Σw` over `{w ≥ 0, Σw ≥ 1, D·w ≥ 0}` for `w` of length `k`;
/// `None` when infeasible.
pub fn min_total_weight(d: &[Vec<i64>], k: usize) -> Result<Option<RationalVec>> {
    let mut lp = MinWeightLp::new(k)?;
    for r in d {
        lp.add_row(r)?;
    }
    lp.solve()
}

/// Incremental form of [`min_total_weight`] for row-by-row growth of `D`.
///
/// Works on the dual `max y_0` over `{y ≥ 0, y_0·1 + Dᵀy ≤ 1}`: its tableau
/// has `k` rows and starts feasible at the slack basis, and a new row of `D`
/// is a new dual column, so the previous basis stays feasible. The optimal
/// `w` is read off the slack reduced costs; an unbounded dual means the
/// primal is infeasible.
///
/// The tableau is kept fraction-free in `i128`; on overflow it is rebuilt
/// with exact rationals.
pub struct MinWeightLp {
    k: usize,
    rows: Vec<Vec<i64>>,
    tab: DualTab,
    unbounded: bool,
}

enum DualTab {
    Int(IntTableau),
    Big(Tableau),
}

impl MinWeightLp {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::usage("linear system needs at least one variable"));
        }
        Ok(MinWeightLp {
            k,
            rows: Vec::new(),
            tab: DualTab::Int(IntTableau::new(k)),
            unbounded: false,
        })
    }

    pub fn add_row(&mut self, r: &[i64]) -> Result<()> {
        if r.len() != self.k {
            return Err(Error::usage("coefficient vector length differs from variable count"));
        }
        self.rows.push(r.to_vec());
        let ok = match &mut self.tab {
            DualTab::Int(t) => t.add_column(r).is_some(),
            DualTab::Big(t) => {
                big_add_column(t, self.k, r);
                true
            }
        };
        if !ok {
            self.rebuild_exact();
        }
        Ok(())
    }

    fn rebuild_exact(&mut self) {
        let mut t = big_dual_tableau(self.k);
        for r in &self.rows {
            big_add_column(&mut t, self.k, r);
        }
        self.tab = DualTab::Big(t);
    }

    pub fn solve(&mut self) -> Result<Option<RationalVec>> {
        if self.unbounded {
            return Ok(None);
        }
        let k = self.k;
        let outcome = match &mut self.tab {
            DualTab::Int(t) => match t.optimize() {
                Some(o) => o,
                None => {
                    self.rebuild_exact();
                    return self.solve();
                }
            },
            DualTab::Big(t) => match t.optimize(t.cols) {
                Err(Error::Unbounded) => false,
                r => r.map(|_| true)?,
            },
        };
        if !outcome {
            self.unbounded = true;
            return Ok(None);
        }
        let w = match &self.tab {
            DualTab::Int(t) => RationalVec(
                t.t[k][1..=k]
                    .iter()
                    .map(|&v| BigRational::new(BigInt::from(v), BigInt::from(t.denom)))
                    .collect(),
            ),
            DualTab::Big(t) => RationalVec(t.t[k][1..=k].to_vec()),
        };
        debug_assert!({
            let mut sys = LinearSystem::new(k);
            sys.nonnegative().row(&vec![1; k], Relation::Ge, 1);
            for r in &self.rows {
                sys.row(r, Relation::Ge, 0);
            }
            sys.satisfied_by(&w)
        });
        Ok(Some(w))
    }
}

/// Column 0 is `y_0`, columns `1..=k` the slacks, the rest the `y_i`.
fn big_dual_tableau(k: usize) -> Tableau {
    let cols = 1 + k;
    let mut t = vec![vec![BigRational::zero(); cols + 1]; k + 1];
    for (a, row) in t.iter_mut().take(k).enumerate() {
        row[0] = BigRational::one();
        row[1 + a] = BigRational::one();
        row[cols] = BigRational::one();
    }
    t[k][0] = -BigRational::one();
    Tableau {
        t,
        basis: (1..=k).collect(),
        cols,
    }
}

fn big_add_column(tab: &mut Tableau, k: usize, r: &[i64]) {
    let a: Vec<BigRational> = r.iter().map(|&v| int(v)).collect();
    for row in tab.t.iter_mut() {
        // The slack block holds B⁻¹, and −c_B·B⁻¹ in the cost row.
        let v = (0..k)
            .filter(|&j| !a[j].is_zero())
            .fold(BigRational::zero(), |acc, j| acc + &row[1 + j] * &a[j]);
        row.insert(tab.cols, v);
    }
    tab.cols += 1;
}

/// Fraction-free tableau: real entries are `t / denom`. Layout as in
/// [`big_dual_tableau`]. Every method returns `None` on `i128` overflow.
struct IntTableau {
    t: Vec<Vec<i128>>,
    basis: Vec<usize>,
    cols: usize,
    denom: i128,
}

impl IntTableau {
    fn new(k: usize) -> Self {
        let cols = 1 + k;
        let mut t = vec![vec![0i128; cols + 1]; k + 1];
        for (a, row) in t.iter_mut().take(k).enumerate() {
            row[0] = 1;
            row[1 + a] = 1;
            row[cols] = 1;
        }
        t[k][0] = -1;
        IntTableau {
            t,
            basis: (1..=k).collect(),
            cols,
            denom: 1,
        }
    }

    fn add_column(&mut self, r: &[i64]) -> Option<()> {
        let k = r.len();
        let cols = self.cols;
        for row in self.t.iter_mut() {
            let mut v: i128 = 0;
            for (j, &a) in r.iter().enumerate().take(k) {
                v = v.checked_add(row[1 + j].checked_mul(a as i128)?)?;
            }
            row.insert(cols, v);
        }
        self.cols += 1;
        Some(())
    }

    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let p = self.t[r][c];
        let d = self.denom;
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                let num = v.checked_mul(p)?.checked_sub(f.checked_mul(pv)?)?;
                debug_assert_eq!(num % d, 0);
                *v = num / d;
            }
        }
        self.denom = p;
        self.basis[r] = c;
        Some(())
    }

    /// `Some(true)` at an optimum, `Some(false)` if unbounded. Dantzig's rule,
    /// switching to Bland's while pivots are degenerate.
    fn optimize(&mut self) -> Option<bool> {
        let m = self.basis.len();
        let rhs = self.cols;
        let mut degenerate_run = 0usize;
        loop {
            let costs = &self.t[m][..self.cols];
            let entering = if degenerate_run > m {
                costs.iter().position(|&v| v < 0)
            } else {
                costs
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v < 0)
                    .min_by_key(|&(j, &v)| (v, j))
                    .map(|(j, _)| j)
            };
            let Some(c) = entering else {
                return Some(true);
            };
            let mut best: Option<usize> = None;
            for i in 0..m {
                if self.t[i][c] <= 0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        let lhs = self.t[i][rhs].checked_mul(self.t[b][c])?;
                        let rhs_b = self.t[b][rhs].checked_mul(self.t[i][c])?;
                        lhs < rhs_b || (lhs == rhs_b && self.basis[i] < self.basis[b])
                    }
                };
                if better {
                    best = Some(i);
                }
            }
            let Some(r) = best else {
                return Some(false);
            };
            if self.t[r][rhs] == 0 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c)?;
        }
    }
}

/// Smallest natural vector proportional to a nonnegative rational vector.
pub fn scale_to_naturals(v: &RationalVec) -> Result<Vec<BigUint>> {
    if v.0.iter().any(|q| q.is_negative()) {
        return Err(Error::usage("cannot scale a vector with negative entries"));
    }
    let lcm = v
        .0
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = v.0.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    Ok(scaled
        .into_iter()
        .map(|x| {
            let x = if gcd.is_zero() { x } else { x / &gcd };
            x.to_biguint().expect("nonnegative")
        })
        .collect())
}

pub(crate) fn to_u64(v: &[BigUint], what: &'static str) -> Result<Vec<u64>> {
    v.iter()
        .map(|x| x.to_u64().ok_or(Error::Overflow(what)))
        .collect()
}

/// Naturals `c`, not all zero, with `Σ_i c_i·D[i][a] < 0` for every column
/// `a`, or `None` if no such vector exists.
pub fn find_dual_coefficients(d: &[Vec<i64>]) -> Result<Option<Vec<u64>>> {
    if d.is_empty() {
        return Err(Error::usage("dual system needs at least one row"));
    }
    let cols = d[0].len();
    if d.iter().any(|r| r.len() != cols) {
        return Err(Error::usage("ragged coefficient matrix"));
    }
    let k = d.len();
    if cols == 0 {
        let mut c = vec![0; k];
        c[0] = 1;
        return Ok(Some(c));
    }
    let mut sys = LinearSystem::new(k);
    sys.nonnegative();
    for a in 0..cols {
        let coeffs: Vec<i64> = d.iter().map(|r| r[a]).collect();
        sys.row(&coeffs, Relation::Le, -1);
    }
    sys.minimize(&vec![1; k]);
    match solve(&sys)? {
        None => Ok(None),
        Some(x) => Ok(Some(to_u64(&scale_to_naturals(&x)?, "dual coefficients")?)),
    }
}

fn var(a: usize) -> String {
    format!("x_{a}")
}

fn push_terms(out: &mut String, terms: &[(i64, usize)]) {
    let mut first = true;
    for &(c, a) in terms {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if first { "" } else { "+" };
        let mag = c.unsigned_abs();
        if !first || c < 0 {
            out.push_str(sign);
            out.push(' ');
        }
        if mag != 1 {
            let _ = write!(out, "{mag} ");
        }
        out.push_str(&var(a));
        out.push(' ');
        first = false;
    }
    if first {
        out.push_str("0 x_0 ");
    }
}

fn combine(terms: &[(i64, usize)]) -> Vec<(i64, usize)> {
    let mut out: Vec<(i64, usize)> = Vec::new();
    for &(c, a) in terms {
        match out.iter_mut().find(|t| t.1 == a) {
            Some(t) => t.0 += c,
            None => out.push((c, a)),
        }
    }
    out.retain(|t| t.0 != 0);
    out
}

/// The 0-1 program "some `F ∈ uce(Fc)` has negative share" in CPLEX LP
/// syntax. `⋃Fc` must be the whole universe.
pub fn export_lp_string(fc: &Family, w: &WeightFn) -> Result<String> {
    let n = fc.universe();
    if n > POWERSET_LIMIT {
        return Err(Error::UniverseTooLarge {
            n,
            max: POWERSET_LIMIT,
        });
    }
    let full = SetWord::full(n);
    if fc.union_all() != full {
        return Err(Error::usage("the family must cover the whole universe"));
    }
    if w.len() != n {
        return Err(Error::UniverseMismatch {
            left: n,
            right: w.len(),
        });
    }
    let table = build_share_table(w, full)?;
    let size = 1usize << n;
    let share_terms: Vec<(i64, usize)> = (0..size)
        .map(|a| (table.get(SetWord::from_bits(a as u64)), a))
        .collect();

    let mut out = String::new();
    out.push_str("\\ union-closed extension with negative share\nMinimize\n obj: ");
    push_terms(&mut out, &share_terms);
    out.push_str("\nSubject To\n");
    let mut id = 0;
    for a in 0..size {
        for b in a + 1..size {
            let terms = combine(&[(1, a), (1, b), (-1, a | b)]);
            let _ = write!(out, " u{id}: ");
            push_terms(&mut out, &terms);
            out.push_str("<= 1\n");
            id += 1;
        }
    }
    let mut id = 0;
    for c in fc.iter() {
        for b in 0..size {
            let u = b | c.bits() as usize;
            if u == b {
                continue;
            }
            let _ = write!(out, " c{id}: ");
            push_terms(&mut out, &[(1, b), (-1, u)]);
            out.push_str("<= 0\n");
            id += 1;
        }
    }
    out.push_str(" share: ");
    push_terms(&mut out, &share_terms);
    out.push_str("<= -1\nBinary\n");
    for a in 0..size {
        let _ = writeln!(out, " {}", var(a));
    }
    out.push_str("End\n");
    Ok(out)
}

pub fn export_lp(fc: &Family, w: &WeightFn, path: &Path) -> Result<()> {
    let text = export_lp_string(fc, w)?;
    std::fs::write(path, text)?;
    Ok(())
}
