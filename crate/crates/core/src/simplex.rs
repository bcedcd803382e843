//! Exact rational linear programming.
//!
//! [`minimize`] accepts `min c·x` subject to `≥`, `≤` and `=` rows over
//! nonnegative variables. Equality rows are eliminated by substitution, the
//! remaining inequality system is dualized, and the dual is solved by a dense
//! two-phase tableau simplex using Bland's least-index rule, which cannot
//! cycle. The primal optimum is read back from the dual's reduced costs and
//! checked exactly against every original row before it is returned.
//!
//! The problems built by `bound` have a few hundred variables and a few
//! thousand rows. Their duals have one row per surviving primal variable,
//! which keeps the tableau small.

use std::collections::{BTreeMap, HashSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

/// `Σ coeffs · x  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: BTreeMap<usize, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: BTreeMap<usize, Rational>, relation: Relation, rhs: Rational) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(&j, a)| a * &x[j]).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Minimize `objective · x` over `x ≥ 0` subject to `constraints`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: BTreeMap<usize, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub point: Vec<Rational>,
    pub pivots: usize,
}

pub fn minimize(lp: &LinearProgram) -> Result<Optimum> {
    let reduced = eliminate_equalities(lp)?;

    // dual: max Σ b_i y_i  s.t.  Σ_i a_ij y_i ≤ c_j  for each kept variable j,  y ≥ 0
    let kept = &reduced.kept;
    let col_of: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let m = kept.len();
    let cols = reduced.rows.len();
    let mut a = vec![vec![Rational::zero(); cols]; m];
    for (i, row) in reduced.rows.iter().enumerate() {
        for (j, v) in &row.coeffs {
            a[col_of[j]][i] = v.clone();
        }
    }
    let b: Vec<Rational> = kept
        .iter()
        .map(|j| reduced.objective.get(j).cloned().unwrap_or_else(Rational::zero))
        .collect();
    let c: Vec<Rational> = reduced.rows.iter().map(|r| r.rhs.clone()).collect();

    let (value, prices, pivots) = match maximize(&a, &b, &c) {
        Ok(Standard { value, prices, pivots, .. }) => (value, prices, pivots),
        Err(Error::Unbounded) => return Err(Error::Infeasible),
        Err(Error::Infeasible) => {
            // the dual is infeasible, so the primal is either unbounded or
            // infeasible; decide with the zero-objective problem
            let zero = vec![Rational::zero(); m];
            return match maximize(&a, &zero, &c) {
                Err(Error::Unbounded) => Err(Error::Infeasible),
                _ => Err(Error::Unbounded),
            };
        }
        Err(e) => return Err(e),
    };

    let mut x = vec![Rational::zero(); lp.num_vars];
    for (k, &j) in kept.iter().enumerate() {
        x[j] = prices[k].clone();
    }
    for (j, expr) in reduced.substitutions.iter().rev() {
        let v = expr.constant.clone() + expr.terms.iter().map(|(&t, a)| a * &x[t]).sum::<Rational>();
        x[*j] = v;
    }

    let value = value + &reduced.objective_constant;
    assert!(
        lp.constraints.iter().all(|c| c.holds(&x)),
        "recovered primal point violates a constraint"
    );
    assert!(x.iter().all(|v| !v.is_negative()), "recovered point is not nonnegative");
    let attained: Rational = lp.objective.iter().map(|(&j, c)| c * &x[j]).sum();
    assert_eq!(attained, value, "recovered point does not attain the optimum");
    Ok(Optimum {
        value,
        point: x,
        pivots,
    })
}

/// `x_j = constant + Σ terms`.
#[derive(Debug, Clone)]
struct Affine {
    constant: Rational,
    terms: BTreeMap<usize, Rational>,
}

/// Inequality-only problem left after substituting out the equalities.
struct Reduced {
    /// `≥` rows only.
    rows: Vec<Constraint>,
    objective: BTreeMap<usize, Rational>,
    objective_constant: Rational,
    kept: Vec<usize>,
    substitutions: Vec<(usize, Affine)>,
}

fn substitute(coeffs: &mut BTreeMap<usize, Rational>, rhs_shift: &mut Rational, var: usize, expr: &Affine) {
    let Some(a) = coeffs.remove(&var) else { return };
    // a·x_var = a·const + Σ a·t
    *rhs_shift += &a * &expr.constant;
    for (&t, v) in &expr.terms {
        let e = coeffs.entry(t).or_insert_with(Rational::zero);
        *e += &a * v;
        if e.is_zero() {
            coeffs.remove(&t);
        }
    }
}

fn eliminate_equalities(lp: &LinearProgram) -> Result<Reduced> {
    let mut eqs: Vec<Constraint> = Vec::new();
    let mut ineqs: Vec<Constraint> = Vec::new();
    for c in &lp.constraints {
        if let Some(&j) = c.coeffs.keys().find(|&&j| j >= lp.num_vars) {
            return Err(Error::InvalidParameter(format!("variable {j} out of range")));
        }
        match c.relation {
            Relation::Eq => eqs.push(c.clone()),
            Relation::Ge => ineqs.push(c.clone()),
            Relation::Le => ineqs.push(Constraint {
                coeffs: c.coeffs.iter().map(|(&j, v)| (j, -v)).collect(),
                relation: Relation::Ge,
                rhs: -&c.rhs,
            }),
        }
    }

    let mut objective = lp.objective.clone();
    let mut objective_constant = Rational::zero();
    let mut substitutions: Vec<(usize, Affine)> = Vec::new();
    let mut eliminated = vec![false; lp.num_vars];

    for k in 0..eqs.len() {
        let Some((&var, pivot)) = eqs[k].coeffs.iter().next_back() else {
            if eqs[k].rhs.is_zero() {
                continue;
            }
            return Err(Error::Infeasible);
        };
        let pivot = pivot.clone();
        let expr = Affine {
            constant: &eqs[k].rhs / &pivot,
            terms: eqs[k]
                .coeffs
                .iter()
                .filter(|(&j, _)| j != var)
                .map(|(&j, v)| (j, -(v / &pivot)))
                .collect(),
        };
        for e in eqs.iter_mut().skip(k + 1) {
            let mut shift = Rational::zero();
            substitute(&mut e.coeffs, &mut shift, var, &expr);
            e.rhs -= shift;
        }
        for c in ineqs.iter_mut() {
            let mut shift = Rational::zero();
            substitute(&mut c.coeffs, &mut shift, var, &expr);
            c.rhs -= shift;
        }
        for (_, s) in substitutions.iter_mut() {
            let mut shift = Rational::zero();
            substitute(&mut s.terms, &mut shift, var, &expr);
            s.constant += shift;
        }
        let mut shift = Rational::zero();
        substitute(&mut objective, &mut shift, var, &expr);
        objective_constant += shift;
        eliminated[var] = true;
        substitutions.push((var, expr));
    }

    // the eliminated variables are still nonnegative
    for (_, expr) in &substitutions {
        ineqs.push(Constraint::new(
            expr.terms.clone(),
            Relation::Ge,
            -expr.constant.clone(),
        ));
    }

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for c in ineqs {
        if c.coeffs.is_empty() {
            if c.rhs.is_positive() {
                return Err(Error::Infeasible);
            }
            continue;
        }
        let key: Vec<(usize, Rational)> = c
            .coeffs
            .iter()
            .map(|(&j, v)| (j, v.clone()))
            .chain(std::iter::once((usize::MAX, c.rhs.clone())))
            .collect();
        if seen.insert(key) {
            rows.push(c);
        }
    }
    let kept = (0..lp.num_vars).filter(|&j| !eliminated[j]).collect();
    Ok(Reduced {
        rows,
        objective,
        objective_constant,
        kept,
        substitutions,
    })
}

/// Result of [`maximize`].
#[derive(Debug, Clone)]
pub struct Standard {
    pub value: Rational,
    pub point: Vec<Rational>,
    /// Optimal dual prices, one per row.
    pub prices: Vec<Rational>,
    pub pivots: usize,
}

/// `max c·x` subject to `A x ≤ b`, `x ≥ 0`, with `b` of any sign.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<Standard> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    assert!(a.iter().all(|r| r.len() == n));

    // columns: x (n), slacks (m), artificials (one per row with b < 0)
    let needs_art: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let art_start = n + m;
    let total = art_start + needs_art.len();
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        obj: vec![Rational::zero(); total + 1],
        basis: vec![0; m],
        pivots: 0,
    };
    for i in 0..m {
        let mut row = vec![Rational::zero(); total + 1];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = Rational::from_integer(1.into());
        row[total] = b[i].clone();
        if b[i].is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
            let k = needs_art.iter().position(|&r| r == i).unwrap();
            row[art_start + k] = Rational::from_integer(1.into());
            t.basis[i] = art_start + k;
        } else {
            t.basis[i] = n + i;
        }
        t.rows.push(row);
    }

    if !needs_art.is_empty() {
        // phase 1: maximize -Σ artificials
        for &i in &needs_art {
            for j in 0..=total {
                if j < art_start || j == total {
                    let v = t.rows[i][j].clone();
                    t.obj[j] -= v;
                }
            }
        }
        t.run(total)?;
        if t.obj[total].is_negative() {
            return Err(Error::Infeasible);
        }
        // drive remaining (zero-valued) artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for row in t.rows.iter_mut() {
            row.drain(art_start..total);
        }
    }
    let width = art_start;
    t.obj = vec![Rational::zero(); width + 1];
    for j in 0..n {
        t.obj[j] = -&c[j];
    }
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n && !c[bv].is_zero() {
            for j in 0..=width {
                let v = &c[bv] * &t.rows[i][j];
                t.obj[j] += v;
            }
        }
    }
    t.run(width)?;

    let mut point = vec![Rational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            point[bv] = t.rows[i][width].clone();
        }
    }
    let prices = (0..m).map(|i| t.obj[n + i].clone()).collect();
    Ok(Standard {
        value: t.obj[width].clone(),
        point,
        prices,
        pivots: t.pivots,
    })
}

struct Tableau {
    /// Each row holds the column coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs `c_B B⁻¹ A_j − c_j`, then the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    /// Bland's rule over the first `width` columns until optimal.
    fn run(&mut self, width: usize) -> Result<()> {
        loop {
            let Some(enter) = (0..width).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[width_rhs(row)] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, enter),
                None => return Err(Error::Unbounded),
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let support: Vec<usize> = (0..self.rows[r].len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &support {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &support {
                self.obj[j] -= &f * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }
}

fn width_rhs(row: &[Rational]) -> usize {
    row.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        ratio(n, 1)
    }

    fn row(pairs: &[(usize, i64)], rel: Relation, rhs: i64) -> Constraint {
        Constraint::new(pairs.iter().map(|&(j, v)| (j, r(v))).collect(), rel, r(rhs))
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  ->  36 at (2, 6)
        let a = vec![vec![r(1), r(0)], vec![r(0), r(2)], vec![r(3), r(2)]];
        let s = maximize(&a, &[r(4), r(12), r(18)], &[r(3), r(5)]).unwrap();
        assert_eq!(s.value, r(36));
        assert_eq!(s.point, [r(2), r(6)]);
        // dual prices certify the value: b·y = 36
        let dual: Rational = [r(4), r(12), r(18)].iter().zip(&s.prices).map(|(b, y)| b * y).sum();
        assert_eq!(dual, r(36));
    }

    #[test]
    fn phase_one_and_statuses() {
        // x + y ≥ 2 written as -x - y ≤ -2; max -x - 2y  ->  -2 at (2, 0)
        let a = vec![vec![r(-1), r(-1)]];
        let s = maximize(&a, &[r(-2)], &[r(-1), r(-2)]).unwrap();
        assert_eq!(s.value, r(-2));
        // x ≤ -1 has no nonnegative solution
        assert_eq!(maximize(&[vec![r(1)]], &[r(-1)], &[r(1)]).unwrap_err(), Error::Infeasible);
        // max x with only -x ≤ 0
        assert_eq!(maximize(&[vec![r(-1)]], &[r(0)], &[r(1)]).unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn minimize_with_equalities() {
        // min t  s.t.  t ≥ x, t ≥ y, x + y = 3  ->  3/2
        let lp = LinearProgram {
            num_vars: 3,
            constraints: vec![
                row(&[(2, 1), (0, -1)], Relation::Ge, 0),
                row(&[(2, 1), (1, -1)], Relation::Ge, 0),
                row(&[(0, 1), (1, 1)], Relation::Eq, 3),
            ],
            objective: [(2, r(1))].into(),
        };
        let opt = minimize(&lp).unwrap();
        assert_eq!(opt.value, ratio(3, 2));
        assert!(lp.constraints.iter().all(|c| c.holds(&opt.point)));
    }

    #[test]
    fn minimize_statuses() {
        let infeasible = LinearProgram {
            num_vars: 1,
            constraints: vec![row(&[(0, 1)], Relation::Le, -1)],
            objective: [(0, r(1))].into(),
        };
        assert_eq!(minimize(&infeasible).unwrap_err(), Error::Infeasible);
        let contradictory = LinearProgram {
            num_vars: 2,
            constraints: vec![
                row(&[(0, 1), (1, 1)], Relation::Eq, 1),
                row(&[(0, 2), (1, 2)], Relation::Eq, 3),
            ],
            objective: BTreeMap::new(),
        };
        assert_eq!(minimize(&contradictory).unwrap_err(), Error::Infeasible);
        let unbounded = LinearProgram {
            num_vars: 2,
            constraints: vec![row(&[(0, 1), (1, -1)], Relation::Ge, 0)],
            objective: [(1, r(-1))].into(),
        };
        assert_eq!(minimize(&unbounded).unwrap_err(), Error::Unbounded);
        let negative_eq = LinearProgram {
            num_vars: 1,
            constraints: vec![row(&[(0, 1)], Relation::Eq, -2)],
            objective: [(0, r(1))].into(),
        };
        assert_eq!(minimize(&negative_eq).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's classic cycling example for Dantzig's rule; Bland must finish.
        let a = vec![
            vec![ratio(1, 4), r(-60), ratio(-1, 25), r(9)],
            vec![ratio(1, 2), r(-90), ratio(-1, 50), r(3)],
            vec![r(0), r(0), r(1), r(0)],
        ];
        let s = maximize(&a, &[r(0), r(0), r(1)], &[ratio(3, 4), r(-150), ratio(1, 50), r(-6)]).unwrap();
        assert_eq!(s.value, ratio(1, 20));
    }

    /// Oracle: the best vertex among all basic solutions of a tiny system,
    /// found by solving every square subsystem exactly.
    fn brute_force_min(lp: &LinearProgram) -> Option<Rational> {
        let n = lp.num_vars;
        // rows as equalities-when-tight: constraints plus x_j ≥ 0
        let mut rows: Vec<(Vec<Rational>, Rational)> = lp
            .constraints
            .iter()
            .map(|c| ((0..n).map(|j| c.coeffs.get(&j).cloned().unwrap_or_else(Rational::zero)).collect(), c.rhs.clone()))
            .collect();
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = r(1);
            rows.push((e, Rational::zero()));
        }
        let mut best: Option<Rational> = None;
        let k = rows.len();
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let chosen: Vec<_> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| rows[i].clone()).collect();
            if let Some(x) = solve_square(chosen) {
                let feasible = x.iter().all(|v| !v.is_negative()) && lp.constraints.iter().all(|c| c.holds(&x));
                if feasible {
                    let v: Rational = lp.objective.iter().map(|(&j, c)| c * &x[j]).sum();
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
        best
    }

    fn solve_square(mut m: Vec<(Vec<Rational>, Rational)>) -> Option<Vec<Rational>> {
        let n = m.len();
        for col in 0..n {
            let p = (col..n).find(|&i| !m[i].0[col].is_zero())?;
            m.swap(col, p);
            let pv = m[col].0[col].clone();
            let (prow, prhs) = (m[col].0.iter().map(|v| v / &pv).collect::<Vec<_>>(), &m[col].1 / &pv);
            m[col] = (prow.clone(), prhs.clone());
            for i in 0..n {
                if i != col && !m[i].0[col].is_zero() {
                    let f = m[i].0[col].clone();
                    for j in 0..n {
                        let d = &f * &prow[j];
                        m[i].0[j] -= d;
                    }
                    m[i].1 -= &f * &prhs;
                }
            }
        }
        Some(m.into_iter().map(|(_, b)| b).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn matches_vertex_enumeration(
            rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 3), -4i64..=6, 0u8..3), 1..5),
            cost in prop::collection::vec(0i64..=4, 3),
        ) {
            // box the variables so the optimum is attained at a vertex
            let mut constraints: Vec<Constraint> = rows.iter().map(|(a, b, rel)| {
                let rel = [Relation::Ge, Relation::Le, Relation::Eq][*rel as usize];
                Constraint::new(a.iter().enumerate().map(|(j, &v)| (j, r(v))).collect(), rel, r(*b))
            }).collect();
            for j in 0..3 {
                constraints.push(row(&[(j, 1)], Relation::Le, 5));
            }
            let lp = LinearProgram {
                num_vars: 3,
                constraints,
                objective: cost.iter().enumerate().map(|(j, &c)| (j, r(c))).collect(),
            };
            let expected = brute_force_min(&lp);
            match (minimize(&lp), expected) {
                (Ok(opt), Some(best)) => prop_assert_eq!(opt.value, best),
                (Err(Error::Infeasible), None) => {}
                (got, want) => prop_assert!(false, "solver {:?} vs oracle {:?}", got, want),
            }
        }
    }
}
