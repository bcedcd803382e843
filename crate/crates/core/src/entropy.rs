//! Exhaustive oracle over every (secret, randomness) pair of a scheme.
//!
//! With a uniform secret and uniform independent randomness, every pair is
//! equally likely. [`enumerate_joint`] deals each one and counts the resulting
//! outcomes `(secret, shares)`. Security claims are then decided by integer
//! counting alone. Floating entropies come second, as a cross-check and to
//! test the Shannon inequalities on real distributions.
//!
//! Outcome elements are numbered like [`SubsetVar`] bits: participants
//! `0..m` in canonical order (king, then pawns) and the secret at `m`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::access::{AccessStructure, Participant, ParticipantSet};
use crate::bound::SubsetVar;
use crate::error::{invalid, Error, Result};
use crate::field::Residue;
use crate::schemes::{deal_into, SchemeSpec};
use crate::{format_ratio, ratio, Rational};

/// Default cap on `#secrets × #transcripts`.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Reads the `KPN_BUDGET` override, falling back to [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> Result<u128> {
    match std::env::var("KPN_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("KPN_BUDGET={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// Counted outcomes of a scheme. Each row is the secret followed by every
/// participant's share, as residues.
#[derive(Debug, Clone)]
pub struct CountTable {
    spec: SchemeSpec,
    participants: Vec<Participant>,
    /// Symbol range of each element: participants, then the secret.
    ranges: Vec<std::ops::Range<usize>>,
    stride: usize,
    symbols: Vec<u32>,
    counts: Vec<u64>,
}

impl CountTable {
    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    pub fn participants(&self) -> &[Participant] {
        &self.participants
    }

    pub fn num_outcomes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn secret_element(&self) -> usize {
        self.participants.len()
    }

    fn row(&self, i: usize) -> &[u32] {
        &self.symbols[i * self.stride..(i + 1) * self.stride]
    }

    fn positions(&self, set: SubsetVar) -> Vec<usize> {
        (0..self.ranges.len())
            .filter(|&e| set.0 >> e & 1 == 1)
            .flat_map(|e| self.ranges[e].clone())
            .collect()
    }

    fn key(&self, row: &[u32], positions: &[usize]) -> u128 {
        let q = self.spec.q().get() as u128;
        positions.iter().fold(0u128, |acc, &p| acc * q + row[p] as u128)
    }

    /// Marginal counts of the elements in `set`, keyed by their encoded values.
    pub fn marginal(&self, set: SubsetVar) -> HashMap<u128, u64> {
        let pos = self.positions(set);
        let mut out: HashMap<u128, u64> = HashMap::new();
        for i in 0..self.counts.len() {
            *out.entry(self.key(self.row(i), &pos)).or_default() += self.counts[i];
        }
        out
    }

    /// Shannon entropy in bits of the elements in `set`.
    pub fn entropy(&self, set: SubsetVar) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        entropy_of_counts(self.marginal(set).values().copied())
    }

    /// `H(X)` for every subset of participants plus secret, indexed by mask.
    pub fn entropy_vector(&self) -> Vec<f64> {
        let elements = self.ranges.len();
        (0..1u64 << elements)
            .into_par_iter()
            .map(|mask| self.entropy(SubsetVar(mask)))
            .collect()
    }

    /// How the secret relates to the shares of `set`, by exact counting.
    pub fn secret_dependence(&self, set: ParticipantSet) -> SecretDependence {
        let x_pos = self.positions(SubsetVar(set.0));
        let s_pos = self.positions(SubsetVar(1 << self.secret_element()));
        let secrets = (self.spec.q().get() as u128).pow(self.spec.secret_len() as u32);
        let mut per_assignment: HashMap<u128, HashMap<u128, u64>> = HashMap::new();
        for i in 0..self.counts.len() {
            let row = self.row(i);
            *per_assignment
                .entry(self.key(row, &x_pos))
                .or_default()
                .entry(self.key(row, &s_pos))
                .or_default() += self.counts[i];
        }
        let determined = per_assignment.values().all(|by_secret| by_secret.len() == 1);
        let independent = per_assignment.values().all(|by_secret| {
            by_secret.len() as u128 == secrets && {
                let mut it = by_secret.values();
                let first = it.next();
                it.all(|c| Some(c) == first)
            }
        });
        match (determined, independent) {
            // only possible with a single secret value
            (true, true) => SecretDependence::Determined,
            (true, false) => SecretDependence::Determined,
            (false, true) => SecretDependence::Independent,
            (false, false) => SecretDependence::Partial,
        }
    }

    fn assignment_names(&self, set: ParticipantSet) -> Vec<String> {
        set.indices()
            .map(|i| self.participants[i].to_string())
            .collect()
    }
}

/// `log2 N − (1/N) Σ c log2 c` for counts summing to `N`.
pub fn entropy_of_counts<I: IntoIterator<Item = u64>>(counts: I) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let weighted: f64 = counts.iter().map(|&c| c as f64 * (c as f64).log2()).sum();
    (n.log2() - weighted / n).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SecretDependence {
    /// Every share assignment with positive count fixes the secret.
    Determined,
    /// Every share assignment occurs equally often with every secret.
    Independent,
    Partial,
}

pub fn enumerate_joint(spec: &SchemeSpec) -> Result<CountTable> {
    enumerate_joint_with_budget(spec, DEFAULT_BUDGET)
}

/// Deals every `(secret, transcript)` pair once and counts outcomes. Work is
/// split by secret value across threads and merged by summation.
pub fn enumerate_joint_with_budget(spec: &SchemeSpec, budget: u128) -> Result<CountTable> {
    let q = spec.q().get();
    let secret_len = spec.secret_len();
    let transcript_len = spec.transcript_len();
    let size = (q as u128)
        .checked_pow((secret_len + transcript_len) as u32)
        .unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::EnumerationTooLarge { size, budget });
    }

    let participants = spec.participants();
    let mut ranges = Vec::new();
    let mut offset = secret_len;
    for &p in &participants {
        let len = spec.share_len(p);
        ranges.push(offset..offset + len);
        offset += len;
    }
    ranges.push(0..secret_len);
    let stride = offset;
    if (q as f64).log2() * stride as f64 >= 127.0 {
        return Err(invalid("outcome encoding exceeds 128 bits"));
    }

    let num_secrets = q.pow(secret_len as u32);
    let num_transcripts = q.pow(transcript_len as u32);
    let merged: HashMap<u128, u64> = (0..num_secrets)
        .into_par_iter()
        .map(|secret_idx| {
            let secret = digits(secret_idx, q, secret_len);
            let mut shares = vec![Vec::new(); participants.len()];
            let mut local: HashMap<u128, u64> = HashMap::new();
            let mut randomness = vec![0; transcript_len];
            for t in 0..num_transcripts {
                fill_digits(t, q, &mut randomness);
                deal_into(spec, &secret, &randomness, &mut shares);
                let key = secret
                    .iter()
                    .chain(shares.iter().flatten())
                    .fold(0u128, |acc, &v| acc * q as u128 + v as u128);
                *local.entry(key).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let mut keys: Vec<(u128, u64)> = merged.into_iter().collect();
    keys.sort_unstable();
    let mut symbols = Vec::with_capacity(keys.len() * stride);
    let mut counts = Vec::with_capacity(keys.len());
    let mut row = vec![0u32; stride];
    for (mut key, count) in keys {
        for slot in row.iter_mut().rev() {
            *slot = (key % q as u128) as u32;
            key /= q as u128;
        }
        symbols.extend_from_slice(&row);
        counts.push(count);
    }
    Ok(CountTable {
        spec: *spec,
        participants,
        ranges,
        stride,
        symbols,
        counts,
    })
}

fn digits(mut idx: u64, q: u64, len: usize) -> Vec<Residue> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = idx % q;
        idx /= q;
    }
    out
}

fn fill_digits(mut idx: u64, q: u64, out: &mut [Residue]) {
    for slot in out.iter_mut() {
        *slot = idx % q;
        idx /= q;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub set: Vec<String>,
    pub expected: SecretDependence,
    pub found: SecretDependence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerfectnessReport {
    pub perfect: bool,
    pub qualified_checked: usize,
    pub unqualified_checked: usize,
    pub violations: Vec<Violation>,
}

/// Minimal qualified sets must determine the secret and maximal unqualified
/// sets must be independent of it; monotonicity covers every other set.
pub fn check_perfect(table: &CountTable, structure: &AccessStructure) -> Result<PerfectnessReport> {
    if structure.participants() != table.participants() {
        return Err(invalid("table and access structure have different participants"));
    }
    let mut violations = Vec::new();
    let mut check = |set: ParticipantSet, expected: SecretDependence| {
        let found = table.secret_dependence(set);
        if found != expected {
            violations.push(Violation {
                set: table.assignment_names(set),
                expected,
                found,
            });
        }
    };
    let minimal = structure.minimal_qualified();
    let maximal = structure.maximal_unqualified();
    for &x in minimal {
        check(x, SecretDependence::Determined);
    }
    for &x in &maximal {
        check(x, SecretDependence::Independent);
    }
    Ok(PerfectnessReport {
        perfect: violations.is_empty(),
        qualified_checked: minimal.len(),
        unqualified_checked: maximal.len(),
        violations,
    })
}

/// For each participant: is every possible share vector equally frequent?
pub fn check_uniform_shares(table: &CountTable) -> BTreeMap<Participant, bool> {
    let q = table.spec.q().get() as u128;
    table
        .participants
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let marginal = table.marginal(SubsetVar(1 << i));
            let domain = q.pow(table.ranges[i].len() as u32);
            let mut counts = marginal.values();
            let first = counts.next().copied();
            let uniform = marginal.len() as u128 == domain && counts.all(|&c| Some(c) == first);
            (p, uniform)
        })
        .collect()
}

/// A rate, exact when the shares are known to be uniform.
#[derive(Debug, Clone, PartialEq)]
pub enum Rate {
    Exact(Rational),
    Approx(f64),
}

impl Rate {
    pub fn as_f64(&self) -> f64 {
        match self {
            Rate::Exact(r) => {
                use num_traits::ToPrimitive;
                r.to_f64().unwrap_or(f64::NAN)
            }
            Rate::Approx(v) => *v,
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Exact(r) => s.serialize_str(&format_ratio(r)),
            Rate::Approx(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EntropyReport {
    /// `H(X)` in bits for each requested subset.
    pub entropies: BTreeMap<SubsetVar, f64>,
    /// `h(X) = H(X)/H(S)`.
    pub normalized: BTreeMap<SubsetVar, f64>,
    pub rates: BTreeMap<Participant, Rate>,
    pub min_rate: Rate,
}

/// Entropies of `subsets` and the rate `H(S)/H(x)` of every participant.
pub fn entropy_report(table: &CountTable, subsets: &[SubsetVar]) -> EntropyReport {
    let secret = SubsetVar(1 << table.secret_element());
    let h_secret = table.entropy(secret);
    let entropies: BTreeMap<SubsetVar, f64> = subsets.iter().map(|&x| (x, table.entropy(x))).collect();
    let normalized = entropies.iter().map(|(&x, &h)| (x, h / h_secret)).collect();

    let uniform = check_uniform_shares(table);
    let secret_len = table.spec.secret_len() as i64;
    let rates: BTreeMap<Participant, Rate> = table
        .participants
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let rate = if uniform[&p] {
                Rate::Exact(ratio(secret_len, table.ranges[i].len() as i64))
            } else {
                Rate::Approx(h_secret / table.entropy(SubsetVar(1 << i)))
            };
            (p, rate)
        })
        .collect();
    let min_rate = if rates.values().all(|r| matches!(r, Rate::Exact(_))) {
        let min = rates
            .values()
            .filter_map(|r| match r {
                Rate::Exact(v) => Some(v.clone()),
                Rate::Approx(_) => None,
            })
            .min()
            .expect("at least one participant");
        Rate::Exact(min)
    } else {
        Rate::Approx(rates.values().map(Rate::as_f64).fold(f64::INFINITY, f64::min))
    };
    EntropyReport {
        entropies,
        normalized,
        rates,
        min_rate,
    }
}

/// Counts of Shannon-inequality violations found on an entropy vector.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub monotone_checked: usize,
    pub monotone_violations: usize,
    pub submodular_checked: usize,
    pub submodular_violations: usize,
    pub plus_submodular_checked: usize,
    pub plus_submodular_violations: usize,
}

impl AxiomCheck {
    pub fn holds(&self) -> bool {
        self.monotone_violations == 0
            && self.submodular_violations == 0
            && self.plus_submodular_violations == 0
    }
}

/// Checks monotonicity and submodularity on all pairs of subsets of
/// `P ∪ {S}`, and +-submodularity (with `H(S)` as the unit) on qualified
/// pairs with unqualified intersection, each within `tol` bits.
pub fn check_axioms(h: &[f64], structure: &AccessStructure, tol: f64) -> AxiomCheck {
    let m = structure.len();
    let n = 1u64 << (m + 1);
    assert_eq!(h.len() as u64, n);
    let h_secret = h[1 << m];
    let mut out = AxiomCheck::default();
    for x in 0..n {
        // every superset y of x
        let free = (n - 1) & !x;
        let mut extra = free;
        loop {
            let y = x | extra;
            out.monotone_checked += 1;
            if h[x as usize] > h[y as usize] + tol {
                out.monotone_violations += 1;
            }
            if extra == 0 {
                break;
            }
            extra = (extra - 1) & free;
        }
        for y in x + 1..n {
            out.submodular_checked += 1;
            let lhs = h[x as usize] + h[y as usize];
            let rhs = h[(x & y) as usize] + h[(x | y) as usize];
            if lhs + tol < rhs {
                out.submodular_violations += 1;
            }
        }
    }
    for x in 0..1u64 << m {
        for y in x + 1..1u64 << m {
            let q = |v: u64| structure.qualifies(ParticipantSet(v));
            if q(x) && q(y) && !q(x & y) {
                out.plus_submodular_checked += 1;
                let lhs = h[x as usize] + h[y as usize];
                let rhs = h[(x & y) as usize] + h[(x | y) as usize] + h_secret;
                if lhs + tol < rhs {
                    out.plus_submodular_violations += 1;
                }
            }
        }
    }
    out
}
