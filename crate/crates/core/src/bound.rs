//! Lower bounds on normalized share size from Shannon-type inequalities.
//!
//! The normalized entropy `h(X) = H(X)/H(S)` of any perfect scheme is defined
//! on subsets of `P ∪ {S}` and obeys
//!
//! * `h(∅) = 0` and `h(S) = 1`,
//! * `h(X ∪ S) = h(X)` for qualified `X ⊆ P` and `h(X ∪ S) = h(X) + 1` otherwise,
//! * monotonicity and submodularity.
//!
//! Minimizing the largest `h({p})` over that polytope gives `κ(Γ)`, and every
//! scheme for `Γ` has information rate at most `1/κ(Γ)`.
//!
//! Certificates are nonnegative combinations of axiom instances whose sum is
//! a target inequality. They are kept as provenance-tagged instances and only
//! expanded to sparse coefficient vectors when checked, so certificates for
//! `Γ_10` never touch the `2^12`-dimensional space.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::access::{low_bits, make_gamma, AccessStructure, Participant, ParticipantSet};
use crate::error::{invalid, Error, Result};
use crate::simplex::{minimize, Constraint, LinearProgram, Relation};
use crate::{format_ratio, Rational};

/// Default cap on `|P ∪ {S}|` for [`build_lp`].
pub const DEFAULT_ELEMENT_CAP: usize = 8;

/// A subset of `P ∪ {S}`: participants occupy bits `0..m` in structure order
/// and the secret is bit `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetVar(pub u64);

impl SubsetVar {
    pub fn secret(m: usize) -> SubsetVar {
        SubsetVar(1 << m)
    }

    pub fn from_participants(set: ParticipantSet) -> SubsetVar {
        SubsetVar(set.0)
    }

    pub fn participants(self, m: usize) -> ParticipantSet {
        ParticipantSet(self.0 & low_bits(m))
    }

    pub fn has_secret(self, m: usize) -> bool {
        self.0 >> m & 1 == 1
    }

    pub fn union(self, other: SubsetVar) -> SubsetVar {
        SubsetVar(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetVar) -> SubsetVar {
        SubsetVar(self.0 & other.0)
    }

    pub fn is_subset(self, other: SubsetVar) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn names(self, structure: &AccessStructure) -> Vec<String> {
        let m = structure.len();
        let mut out: Vec<String> = structure
            .members(self.participants(m))
            .iter()
            .map(|p| p.to_string())
            .collect();
        if self.has_secret(m) {
            out.push("S".into());
        }
        out
    }
}

/// An axiom instance; its expansion is the inequality it asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomInstance {
    /// `h(sup) - h(sub) ≥ 0` for `sub ⊆ sup`.
    Monotone { sub: SubsetVar, sup: SubsetVar },
    /// `h(X) + h(Y) - h(X∩Y) - h(X∪Y) ≥ 0`.
    Submodular { x: SubsetVar, y: SubsetVar },
    /// `h(X) + h(Y) - h(X∩Y) - h(X∪Y) ≥ 1` for qualified `X, Y ⊆ P` with
    /// unqualified intersection.
    PlusSubmodular { x: SubsetVar, y: SubsetVar },
    /// `h(X∪S) - h(X) = [X ∉ Γ]` for `X ⊆ P`, used as `≥` or, reversed, as `≤`.
    SecretEquality { set: SubsetVar, reversed: bool },
    /// `h(S) = 1`, used as `≥` or, reversed, as `≤`.
    Normalization { reversed: bool },
}

impl AxiomInstance {
    pub fn tag(&self) -> &'static str {
        match self {
            AxiomInstance::Monotone { .. } => "monotone",
            AxiomInstance::Submodular { .. } => "submodular",
            AxiomInstance::PlusSubmodular { .. } => "plus_submodular",
            AxiomInstance::SecretEquality { reversed: false, .. } => "secret_equality",
            AxiomInstance::SecretEquality { reversed: true, .. } => "secret_equality_reversed",
            AxiomInstance::Normalization { reversed: false } => "normalization",
            AxiomInstance::Normalization { reversed: true } => "normalization_reversed",
        }
    }

    /// Checks the instance is legitimate for `structure` and returns its
    /// inequality. `h(∅)` terms are dropped since `h(∅) = 0`.
    pub fn expand(&self, structure: &AccessStructure) -> Result<LinearInequality> {
        let m = structure.len();
        let ground = low_bits(m + 1);
        let in_ground = |v: SubsetVar| v.0 & !ground == 0;
        let only_participants = |v: SubsetVar| v.0 & !low_bits(m) == 0;
        let mut ineq = LinearInequality::new(Some(*self));
        match *self {
            AxiomInstance::Monotone { sub, sup } => {
                if !(in_ground(sup) && sub.is_subset(sup)) {
                    return Err(invalid("monotonicity needs sub ⊆ sup ⊆ P ∪ {S}"));
                }
                ineq.add(sup, 1);
                ineq.add(sub, -1);
            }
            AxiomInstance::Submodular { x, y } | AxiomInstance::PlusSubmodular { x, y } => {
                if !(in_ground(x) && in_ground(y)) {
                    return Err(invalid("submodularity on sets outside P ∪ {S}"));
                }
                if let AxiomInstance::PlusSubmodular { .. } = self {
                    let q = |v: SubsetVar| structure.qualifies(v.participants(m));
                    if !(only_participants(x) && only_participants(y)) {
                        return Err(invalid("+-submodularity is stated on participant sets"));
                    }
                    if !(q(x) && q(y) && !q(x.intersection(y))) {
                        return Err(invalid(
                            "+-submodularity needs qualified X, Y with unqualified X ∩ Y",
                        ));
                    }
                    ineq.constant = Rational::one();
                }
                ineq.add(x, 1);
                ineq.add(y, 1);
                ineq.add(x.intersection(y), -1);
                ineq.add(x.union(y), -1);
            }
            AxiomInstance::SecretEquality { set, reversed } => {
                if !only_participants(set) {
                    return Err(invalid("secret equality is stated on participant sets"));
                }
                let gap = if structure.qualifies(set.participants(m)) { 0 } else { 1 };
                let sign = if reversed { -1 } else { 1 };
                ineq.add(set.union(SubsetVar::secret(m)), sign);
                ineq.add(set, -sign);
                ineq.constant = Rational::from_integer((sign * gap).into());
            }
            AxiomInstance::Normalization { reversed } => {
                let sign = if reversed { -1 } else { 1 };
                ineq.add(SubsetVar::secret(m), sign);
                ineq.constant = Rational::from_integer(sign.into());
            }
        }
        Ok(ineq)
    }

    fn sets(&self) -> (Option<SubsetVar>, Option<SubsetVar>) {
        match *self {
            AxiomInstance::Monotone { sub, sup } => (Some(sub), Some(sup)),
            AxiomInstance::Submodular { x, y } | AxiomInstance::PlusSubmodular { x, y } => {
                (Some(x), Some(y))
            }
            AxiomInstance::SecretEquality { set, .. } => (Some(set), None),
            AxiomInstance::Normalization { .. } => (None, None),
        }
    }
}

/// `Σ coeffs·h ≥ constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearInequality {
    pub coeffs: BTreeMap<SubsetVar, Rational>,
    pub constant: Rational,
    pub provenance: Option<AxiomInstance>,
}

impl LinearInequality {
    pub fn new(provenance: Option<AxiomInstance>) -> Self {
        LinearInequality {
            coeffs: BTreeMap::new(),
            constant: Rational::zero(),
            provenance,
        }
    }

    /// Adds `c·h(set)`, keeping the map free of zeros and of `h(∅)`.
    pub fn add(&mut self, set: SubsetVar, c: i64) {
        self.add_scaled(set, &Rational::from_integer(c.into()));
    }

    fn add_scaled(&mut self, set: SubsetVar, c: &Rational) {
        if set.is_empty() || c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(set).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&set);
        }
    }

    pub fn display(&self, structure: &AccessStructure) -> String {
        let mut out = String::new();
        for (i, (set, c)) in self.coeffs.iter().enumerate() {
            let term = format!("h({})", set.names(structure).join(","));
            let mag = c.abs();
            let lead = if mag.is_one() { String::new() } else { format!("{} ", fmt_plain(&mag)) };
            match (i, c.is_negative()) {
                (0, false) => out.push_str(&format!("{lead}{term}")),
                (0, true) => out.push_str(&format!("-{lead}{term}")),
                (_, false) => out.push_str(&format!(" + {lead}{term}")),
                (_, true) => out.push_str(&format!(" - {lead}{term}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} >= {}", fmt_plain(&self.constant))
    }
}

fn fmt_plain(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_ratio(r)
    }
}

/// A nonnegative combination of axiom instances claimed to yield `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub structure: AccessStructure,
    pub items: Vec<(AxiomInstance, Rational)>,
    pub target: LinearInequality,
}

impl Certificate {
    /// Sum of `multiplier · instance`, or `None` if an instance is not a valid
    /// axiom for the structure or a multiplier is negative.
    pub fn combined(&self) -> Option<LinearInequality> {
        let mut sum = LinearInequality::new(None);
        for (instance, mult) in &self.items {
            if mult.is_negative() {
                return None;
            }
            let ineq = instance.expand(&self.structure).ok()?;
            for (set, c) in &ineq.coeffs {
                sum.add_scaled(*set, &(c * mult));
            }
            sum.constant += &ineq.constant * mult;
        }
        Some(sum)
    }

    /// For a verified target of the form `Σ a_p h({p}) ≥ c` with `a_p ≥ 0`,
    /// some participant has `h({p}) ≥ c / Σ a_p`; returns that bound.
    pub fn implied_share_bound(&self) -> Option<Rational> {
        let m = self.structure.len();
        let mut weight = Rational::zero();
        for (set, c) in &self.target.coeffs {
            if set.has_secret(m) || set.0.count_ones() != 1 || c.is_negative() {
                return None;
            }
            weight += c;
        }
        if weight.is_zero() {
            return None;
        }
        Some(&self.target.constant / weight)
    }
}

pub fn verify_certificate(c: &Certificate) -> bool {
    match c.combined() {
        Some(sum) => sum.coeffs == c.target.coeffs && sum.constant >= c.target.constant,
        None => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    /// `h(k p_1..p_{n-1}) - h(p_1) ≥ n - 1`.
    Down,
    /// `h(k p_1) + Σ_{i=2}^{n-1} h(p_i) - h(k p_1..p_{n-1}) ≥ n - 2`.
    Up,
    /// `h(k) + Σ_{i=2}^{n-1} h(p_i) ≥ 2n - 3`.
    Combined,
}

impl std::str::FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "down" => Ok(Lemma::Down),
            "up" => Ok(Lemma::Up),
            "combined" => Ok(Lemma::Combined),
            _ => Err(invalid(format!("unknown lemma {s:?}"))),
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::Down => "down",
            Lemma::Up => "up",
            Lemma::Combined => "combined",
        })
    }
}

/// Subsets of `Γ_n`'s ground set by participant name.
struct GammaSets {
    n: u32,
}

impl GammaSets {
    // structure order is k, p1, ..., pn
    fn king(&self) -> SubsetVar {
        SubsetVar(1)
    }

    fn pawn(&self, i: u32) -> SubsetVar {
        SubsetVar(1 << i)
    }

    /// `{p_lo, ..., p_hi}`, empty when `lo > hi`.
    fn pawns(&self, lo: u32, hi: u32) -> SubsetVar {
        (lo..=hi).fold(SubsetVar(0), |acc, i| acc.union(self.pawn(i)))
    }

    fn all_pawns(&self) -> SubsetVar {
        self.pawns(1, self.n)
    }

    fn all_pawns_but(&self, i: u32) -> SubsetVar {
        SubsetVar(self.all_pawns().0 & !self.pawn(i).0)
    }

    fn with_king(&self, v: SubsetVar) -> SubsetVar {
        v.union(self.king())
    }
}

fn down_items(g: &GammaSets) -> Vec<AxiomInstance> {
    let n = g.n;
    let mut items = Vec::new();
    for i in 2..=n {
        items.push(AxiomInstance::PlusSubmodular {
            x: g.all_pawns(),
            y: g.with_king(g.all_pawns_but(i)),
        });
        items.push(AxiomInstance::Submodular {
            x: g.pawns(1, i),
            y: g.all_pawns_but(i),
        });
    }
    let everyone = g.with_king(g.all_pawns());
    for i in 2..n {
        items.push(AxiomInstance::Monotone {
            sub: g.with_king(g.all_pawns_but(i)),
            sup: everyone,
        });
    }
    items.push(AxiomInstance::Monotone {
        sub: g.all_pawns(),
        sup: everyone,
    });
    items
}

fn up_items(g: &GammaSets) -> Vec<AxiomInstance> {
    let mut items = Vec::new();
    for i in 2..g.n {
        items.push(AxiomInstance::PlusSubmodular {
            x: g.with_king(g.pawn(1)),
            y: g.with_king(g.pawn(i)),
        });
        items.push(AxiomInstance::Submodular {
            x: g.king(),
            y: g.pawn(i),
        });
        items.push(AxiomInstance::Submodular {
            x: g.with_king(g.pawns(1, i - 1)),
            y: g.with_king(g.pawn(1).union(g.pawn(i))),
        });
    }
    items
}

/// The certificate behind each lemma on `Γ_n`, every instance with
/// multiplier one.
pub fn lemma_certificate(which: Lemma, n: u32) -> Result<Certificate> {
    let structure = make_gamma(n)?;
    let g = GammaSets { n };
    let n = n as i64;
    let (items, target) = match which {
        Lemma::Down => {
            let mut t = LinearInequality::new(None);
            t.add(g.with_king(g.pawns(1, g.n - 1)), 1);
            t.add(g.pawn(1), -1);
            t.constant = Rational::from_integer((n - 1).into());
            (down_items(&g), t)
        }
        Lemma::Up => {
            let mut t = LinearInequality::new(None);
            t.add(g.with_king(g.pawn(1)), 1);
            for i in 2..g.n {
                t.add(g.pawn(i), 1);
            }
            t.add(g.with_king(g.pawns(1, g.n - 1)), -1);
            t.constant = Rational::from_integer((n - 2).into());
            (up_items(&g), t)
        }
        Lemma::Combined => {
            let mut items = down_items(&g);
            items.extend(up_items(&g));
            items.push(AxiomInstance::Submodular {
                x: g.pawn(1),
                y: g.king(),
            });
            let mut t = LinearInequality::new(None);
            t.add(g.king(), 1);
            for i in 2..g.n {
                t.add(g.pawn(i), 1);
            }
            t.constant = Rational::from_integer((2 * n - 3).into());
            (items, t)
        }
    };
    Ok(Certificate {
        structure,
        items: items.into_iter().map(|a| (a, Rational::one())).collect(),
        target,
    })
}

/// One serialized certificate line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateItem {
    pub provenance: String,
    #[serde(rename = "X")]
    pub x: Option<Vec<String>>,
    #[serde(rename = "Y")]
    pub y: Option<Vec<String>>,
    pub multiplier: String,
}

impl Certificate {
    pub fn to_items(&self) -> Vec<CertificateItem> {
        self.items
            .iter()
            .map(|(a, mult)| {
                let (x, y) = a.sets();
                CertificateItem {
                    provenance: a.tag().to_string(),
                    x: x.map(|v| v.names(&self.structure)),
                    y: y.map(|v| v.names(&self.structure)),
                    multiplier: format_ratio(mult),
                }
            })
            .collect()
    }
}

/// What an LP row stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `h(∅) = 0`.
    EmptySet,
    Axiom(AxiomInstance),
    /// `t ≥ h({p})`.
    ShareBound(Participant),
}

/// The κ(Γ) program: one variable per subset of `P ∪ {S}` (index = mask),
/// then `t` at index `2^(m+1)`; minimize `t`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub structure: AccessStructure,
    pub program: LinearProgram,
    pub kinds: Vec<RowKind>,
}

impl LpProblem {
    pub fn num_subset_vars(&self) -> usize {
        1 << (self.structure.len() + 1)
    }

    pub fn t_index(&self) -> usize {
        self.num_subset_vars()
    }

    pub fn count(&self, pred: impl Fn(&RowKind) -> bool) -> usize {
        self.kinds.iter().filter(|k| pred(k)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub optimum: Rational,
    /// `h(X)` indexed by subset mask, followed by `t`.
    pub point: Vec<Rational>,
    pub pivots: usize,
}

pub fn build_lp(structure: &AccessStructure) -> Result<LpProblem> {
    build_lp_with_cap(structure, DEFAULT_ELEMENT_CAP)
}

pub fn build_lp_with_cap(structure: &AccessStructure, cap: usize) -> Result<LpProblem> {
    let m = structure.len();
    let elements = m + 1;
    if elements > cap || elements > 20 {
        return Err(Error::ProblemTooLarge { elements, cap });
    }
    let vars = 1usize << elements;
    let t = vars;
    let mut constraints = Vec::new();
    let mut kinds = Vec::new();
    let mut push = |ineq: LinearInequality, relation: Relation, kind: RowKind| {
        let coeffs = ineq.coeffs.iter().map(|(s, c)| (s.0 as usize, c.clone())).collect();
        constraints.push(Constraint::new(coeffs, relation, ineq.constant));
        kinds.push(kind);
    };

    // h(∅) is an explicit variable here, unlike in certificates
    let mut empty = LinearInequality::new(None);
    empty.coeffs.insert(SubsetVar(0), Rational::one());
    push(empty, Relation::Eq, RowKind::EmptySet);

    let norm = AxiomInstance::Normalization { reversed: false };
    push(norm.expand(structure)?, Relation::Eq, RowKind::Axiom(norm));
    for x in 0..1u64 << m {
        let a = AxiomInstance::SecretEquality {
            set: SubsetVar(x),
            reversed: false,
        };
        let mut row = with_empty_term(a.expand(structure)?, SubsetVar(x), -1);
        row.provenance = Some(a);
        push(row, Relation::Eq, RowKind::Axiom(a));
    }

    let full = low_bits(elements);
    for y in 0..=full {
        for i in (0..elements).filter(|&i| y >> i & 1 == 0) {
            let a = AxiomInstance::Monotone {
                sub: SubsetVar(y),
                sup: SubsetVar(y | 1 << i),
            };
            let row = with_empty_term(a.expand(structure)?, SubsetVar(y), -1);
            push(row, Relation::Ge, RowKind::Axiom(a));
        }
    }
    for i in 0..elements {
        for j in (i + 1)..elements {
            let rest = full & !(1 << i) & !(1 << j);
            // every subset y of `rest`
            let mut y = 0u64;
            loop {
                let a = AxiomInstance::Submodular {
                    x: SubsetVar(y | 1 << i),
                    y: SubsetVar(y | 1 << j),
                };
                let row = with_empty_term(a.expand(structure)?, SubsetVar(y), -1);
                push(row, Relation::Ge, RowKind::Axiom(a));
                if y == rest {
                    break;
                }
                y = (y.wrapping_sub(rest)) & rest;
            }
        }
    }
    for (i, &p) in structure.participants().iter().enumerate() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(t, Rational::one());
        coeffs.insert(1usize << i, -Rational::one());
        constraints.push(Constraint::new(coeffs, Relation::Ge, Rational::zero()));
        kinds.push(RowKind::ShareBound(p));
    }

    let mut objective = BTreeMap::new();
    objective.insert(t, Rational::one());
    Ok(LpProblem {
        structure: structure.clone(),
        program: LinearProgram {
            num_vars: vars + 1,
            constraints,
            objective,
        },
        kinds,
    })
}

/// Puts back the `h(∅)` term that expansion drops, when `set` is empty.
fn with_empty_term(mut ineq: LinearInequality, set: SubsetVar, c: i64) -> LinearInequality {
    if set.is_empty() {
        // SubsetVar(0) is skipped by `add`, so insert directly
        let e = ineq.coeffs.entry(SubsetVar(0)).or_insert_with(Rational::zero);
        *e += Rational::from_integer(c.into());
        if e.is_zero() {
            ineq.coeffs.remove(&SubsetVar(0));
        }
    }
    ineq
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    let opt = minimize(&problem.program)?;
    Ok(LpSolution {
        optimum: opt.value,
        point: opt.point,
        pivots: opt.pivots,
    })
}

/// The LP optimum: the best lower bound on the largest normalized share.
pub fn kappa(structure: &AccessStructure) -> Result<Rational> {
    Ok(solve_lp(&build_lp(structure)?)?.optimum)
}

/// `1/κ`, an upper bound on the information rate of any scheme.
pub fn rate_upper_bound(structure: &AccessStructure) -> Result<Rational> {
    Ok(kappa(structure)?.recip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{make_named, structure_by_name};
    use crate::ratio;

    #[test]
    fn lp_sizes_for_gamma3() {
        let lp = build_lp(&make_gamma(3).unwrap()).unwrap();
        assert_eq!(lp.num_subset_vars(), 32);
        assert_eq!(lp.program.num_vars, 33);
        let submod = lp.count(|k| matches!(k, RowKind::Axiom(AxiomInstance::Submodular { .. })));
        assert_eq!(submod, 10 * 8);
        let mono = lp.count(|k| matches!(k, RowKind::Axiom(AxiomInstance::Monotone { .. })));
        assert_eq!(mono, 5 * 16);
        let eqs = lp.count(|k| {
            matches!(
                k,
                RowKind::EmptySet
                    | RowKind::Axiom(AxiomInstance::SecretEquality { .. } | AxiomInstance::Normalization { .. })
            )
        });
        assert_eq!(eqs, 2 + 16);
        assert_eq!(lp.count(|k| matches!(k, RowKind::ShareBound(_))), 4);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            build_lp(&make_gamma(7).unwrap()),
            Err(Error::ProblemTooLarge { elements: 9, cap: 8 })
        ));
        assert!(build_lp_with_cap(&make_gamma(3).unwrap(), 4).is_err());
    }

    #[test]
    fn kappa_small_structures() {
        assert_eq!(kappa(&make_gamma(2).unwrap()).unwrap(), ratio(1, 1));
        assert_eq!(kappa(&make_gamma(3).unwrap()).unwrap(), ratio(3, 2));
        assert_eq!(rate_upper_bound(&make_gamma(2).unwrap()).unwrap(), ratio(1, 1));
        assert_eq!(kappa(&make_named("path4").unwrap()).unwrap(), ratio(3, 2));
        // a threshold structure is ideal
        let two_of_three = structure_by_name("gamma_2").unwrap();
        assert_eq!(rate_upper_bound(&two_of_three).unwrap(), ratio(1, 1));
    }

    #[test]
    fn optimal_point_is_exactly_feasible() {
        let lp = build_lp(&make_gamma(3).unwrap()).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!(lp.program.constraints.iter().all(|c| c.holds(&sol.point)));
        assert_eq!(sol.point[lp.t_index()], sol.optimum);
        assert_eq!(sol.point[0], ratio(0, 1));
        assert_eq!(sol.point[1 << 4], ratio(1, 1));
    }

    #[test]
    fn down_n3() {
        let c = lemma_certificate(Lemma::Down, 3).unwrap();
        assert_eq!(c.target.display(&c.structure), "-h(p1) + h(k,p1,p2) >= 2");
        assert!(verify_certificate(&c));
    }

    #[test]
    fn up_n4_and_combined_n5() {
        let up = lemma_certificate(Lemma::Up, 4).unwrap();
        assert_eq!(
            up.target.display(&up.structure),
            "h(k,p1) + h(p2) + h(p3) - h(k,p1,p2,p3) >= 2"
        );
        assert!(verify_certificate(&up));
        let comb = lemma_certificate(Lemma::Combined, 5).unwrap();
        assert_eq!(comb.target.display(&comb.structure), "h(k) + h(p2) + h(p3) + h(p4) >= 7");
        assert!(verify_certificate(&comb));
        assert_eq!(comb.implied_share_bound(), Some(ratio(7, 4)));
    }

    #[test]
    fn degenerate_n2() {
        for which in [Lemma::Down, Lemma::Up, Lemma::Combined] {
            assert!(verify_certificate(&lemma_certificate(which, 2).unwrap()), "{which}");
        }
        assert!(lemma_certificate(Lemma::Up, 2).unwrap().items.is_empty());
        assert!(lemma_certificate(Lemma::Down, 1).is_err());
    }

    #[test]
    fn empty_certificate_is_vacuous() {
        let c = Certificate {
            structure: make_gamma(2).unwrap(),
            items: vec![],
            target: LinearInequality::new(None),
        };
        assert!(verify_certificate(&c));
        let mut too_strong = c.clone();
        too_strong.target.constant = ratio(1, 1);
        assert!(!verify_certificate(&too_strong));
    }

    #[test]
    fn removing_a_monotonicity_breaks_down_n3() {
        let c = lemma_certificate(Lemma::Down, 3).unwrap();
        let monos: Vec<usize> = c
            .items
            .iter()
            .enumerate()
            .filter(|(_, (a, _))| matches!(a, AxiomInstance::Monotone { .. }))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(monos.len(), 2);
        for i in monos {
            let mut broken = c.clone();
            broken.items.remove(i);
            assert!(!verify_certificate(&broken));
        }
    }

    #[test]
    fn invalid_instances_fail_verification() {
        let g = make_gamma(3).unwrap();
        // {k} ∩ {k,p1} = {k} but {k} is not qualified
        let bad_plus = AxiomInstance::PlusSubmodular {
            x: SubsetVar(0b0001),
            y: SubsetVar(0b0011),
        };
        assert!(bad_plus.expand(&g).is_err());
        let bad_mono = AxiomInstance::Monotone {
            sub: SubsetVar(0b0011),
            sup: SubsetVar(0b0001),
        };
        assert!(bad_mono.expand(&g).is_err());
        let mut c = lemma_certificate(Lemma::Down, 3).unwrap();
        c.items.push((bad_mono, Rational::one()));
        assert!(!verify_certificate(&c));
        let mut neg = lemma_certificate(Lemma::Down, 3).unwrap();
        neg.items[0].1 = -Rational::one();
        assert!(!verify_certificate(&neg));
    }

    #[test]
    fn plus_submodularity_follows_from_secret_equalities() {
        // For X, Y ∈ Γ with X ∩ Y ∉ Γ: submodularity on (X∪S, Y∪S) plus the
        // secret equalities gives h(X) + h(Y) ≥ h(X∩Y) + h(X∪Y) + 1.
        for g in [make_gamma(2).unwrap(), make_gamma(3).unwrap(), make_named("fan").unwrap()] {
            let m = g.len();
            let s = SubsetVar::secret(m);
            let mut checked = 0;
            for x in 0..1u64 << m {
                for y in 0..1u64 << m {
                    let (x, y) = (SubsetVar(x), SubsetVar(y));
                    let plus = AxiomInstance::PlusSubmodular { x, y };
                    let Ok(target) = plus.expand(&g) else { continue };
                    let eq = |set, reversed| AxiomInstance::SecretEquality { set, reversed };
                    let cert = Certificate {
                        structure: g.clone(),
                        items: vec![
                            (AxiomInstance::Submodular { x: x.union(s), y: y.union(s) }, Rational::one()),
                            (eq(x, true), Rational::one()),
                            (eq(y, true), Rational::one()),
                            (eq(x.intersection(y), false), Rational::one()),
                            (eq(x.union(y), false), Rational::one()),
                        ],
                        target: LinearInequality { provenance: None, ..target },
                    };
                    assert!(verify_certificate(&cert));
                    checked += 1;
                }
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn certificate_items_serialize() {
        let c = lemma_certificate(Lemma::Up, 3).unwrap();
        let items = c.to_items();
        assert_eq!(items.len(), 3);
        let json = serde_json::to_string(&items[0]).unwrap();
        assert_eq!(
            json,
            r#"{"provenance":"plus_submodular","X":["k","p1"],"Y":["k","p2"],"multiplier":"1/1"}"#
        );
    }
}
