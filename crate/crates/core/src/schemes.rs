//! Dealers and reconstructors for the three schemes on `Γ_n`.
//!
//! * `Sigma1` shares one symbol with a random polynomial `f` of degree at most
//!   `n-1`, `f(0) = s`. The king holds `f(1), ..., f(n-1)` and pawn `i` holds
//!   `f(n-1+i)`.
//! * `Sigma2` runs a (2,2) scheme for every `{k, p_i}` and an (n,n) scheme for
//!   the pawns: king `r`; pawn `i < n` holds `(r+s, r_i)`; pawn `n` holds
//!   `(r+s, s + r_1 + ... + r_{n-1})`.
//! * `Composite` shares `n-1` symbols: the first with one `Sigma1` instance and
//!   each of the rest with its own `Sigma2` instance, all with independent
//!   randomness. Every participant ends up with `2n-3` field elements.
//!
//! A participant's composite share lists the `Sigma1` values first and then the
//! `Sigma2` copies in secret-symbol order. The transcript is laid out the same
//! way.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::access::{make_gamma, AccessStructure, Participant};
use crate::error::{invalid, Error, Result};
use crate::field::{interpolate_at_zero, sample_uniform, seeded_rng, Prime, Residue};
use crate::{ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Sigma1,
    Sigma2,
    Composite,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Sigma1, SchemeKind::Sigma2, SchemeKind::Composite];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Sigma1 => "sigma1",
            SchemeKind::Sigma2 => "sigma2",
            SchemeKind::Composite => "composite",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown scheme {s:?}")))
    }
}

/// Which of the two building blocks an instance is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    Shamir,
    Decomposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeSpec {
    kind: SchemeKind,
    n: u32,
    q: Prime,
}

impl SchemeSpec {
    pub fn new(kind: SchemeKind, n: u32, q: Prime) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("n must be at least 2, got {n}")));
        }
        if n > 63 {
            return Err(invalid("at most 63 pawns are supported"));
        }
        if kind != SchemeKind::Sigma2 && q.get() < 2 * n as u64 {
            return Err(invalid(format!(
                "{kind} with n = {n} needs a prime above {}, got {q}",
                2 * n - 1
            )));
        }
        Ok(SchemeSpec { kind, n, q })
    }

    /// Uses the smallest prime above `2n - 1`.
    pub fn with_default_q(kind: SchemeKind, n: u32) -> Result<Self> {
        SchemeSpec::new(kind, n, default_modulus(n))
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> Prime {
        self.q
    }

    pub fn structure(&self) -> AccessStructure {
        make_gamma(self.n).expect("n validated at construction")
    }

    /// Participants in canonical order: king, then pawns.
    pub fn participants(&self) -> Vec<Participant> {
        std::iter::once(Participant::King)
            .chain((1..=self.n).map(Participant::Pawn))
            .collect()
    }

    pub fn secret_len(&self) -> usize {
        match self.kind {
            SchemeKind::Composite => self.n as usize - 1,
            _ => 1,
        }
    }

    pub fn transcript_len(&self) -> usize {
        self.components()
            .iter()
            .map(|&c| component_randomness(c, self.n))
            .sum()
    }

    /// Number of field elements held by `p`.
    pub fn share_len(&self, p: Participant) -> usize {
        let king = p == Participant::King;
        self.components()
            .iter()
            .map(|&c| component_share_len(c, self.n, king))
            .sum()
    }

    fn components(&self) -> Vec<Component> {
        match self.kind {
            SchemeKind::Sigma1 => vec![Component::Shamir],
            SchemeKind::Sigma2 => vec![Component::Decomposition],
            SchemeKind::Composite => std::iter::once(Component::Shamir)
                .chain(std::iter::repeat_n(Component::Decomposition, self.n as usize - 2))
                .collect(),
        }
    }
}

pub fn default_modulus(n: u32) -> Prime {
    Prime::smallest_above(2 * n as u64 - 1)
}

fn component_randomness(c: Component, n: u32) -> usize {
    match c {
        Component::Shamir => n as usize - 1,
        Component::Decomposition => n as usize,
    }
}

fn component_share_len(c: Component, n: u32, king: bool) -> usize {
    match (c, king) {
        (Component::Shamir, true) => n as usize - 1,
        (Component::Shamir, false) => 1,
        (Component::Decomposition, true) => 1,
        (Component::Decomposition, false) => 2,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SecretVector(pub Vec<Residue>);

/// The dealer's random choices, in consumption order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DealTranscript(pub Vec<Residue>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareBundle {
    pub spec: SchemeSpec,
    pub shares: BTreeMap<Participant, Vec<Residue>>,
}

impl ShareBundle {
    /// The bundle restricted to the given participants.
    pub fn restrict(&self, members: &[Participant]) -> ShareBundle {
        ShareBundle {
            spec: self.spec,
            shares: self
                .shares
                .iter()
                .filter(|(p, _)| members.contains(p))
                .map(|(p, v)| (*p, v.clone()))
                .collect(),
        }
    }

    /// Checks every present participant's share has the expected length.
    pub fn check_shape(&self) -> Result<()> {
        for (p, v) in &self.shares {
            let n = self.spec.n;
            let known = match p {
                Participant::King => true,
                Participant::Pawn(i) => (1..=n).contains(i),
                Participant::Label(_) => false,
            };
            if !known {
                return Err(invalid(format!("participant {p} not in Γ_{n}")));
            }
            if v.len() != self.spec.share_len(*p) {
                return Err(invalid(format!(
                    "{p} holds {} values, expected {}",
                    v.len(),
                    self.spec.share_len(*p)
                )));
            }
            if v.iter().any(|&x| x >= self.spec.q.get()) {
                return Err(invalid(format!("{p} holds an unreduced value")));
            }
        }
        Ok(())
    }
}

/// Deals into `out`, one buffer per participant in canonical order. Buffers
/// are cleared first. Lengths are assumed valid.
pub(crate) fn deal_into(
    spec: &SchemeSpec,
    secret: &[Residue],
    randomness: &[Residue],
    out: &mut [Vec<Residue>],
) {
    for buf in out.iter_mut() {
        buf.clear();
    }
    let mut offset = 0;
    for (symbol, c) in spec.components().into_iter().enumerate() {
        let len = component_randomness(c, spec.n);
        let r = &randomness[offset..offset + len];
        offset += len;
        let s = secret[symbol];
        match c {
            Component::Shamir => deal_shamir(spec.q, spec.n, s, r, out),
            Component::Decomposition => deal_decomposition(spec.q, spec.n, s, r, out),
        }
    }
}

fn deal_shamir(q: Prime, n: u32, s: Residue, free: &[Residue], out: &mut [Vec<Residue>]) {
    // coefficients lowest first: f(0) = s, then the free coefficients
    let eval = |x: u64| {
        let x = q.reduce(x);
        let high = free.iter().rev().fold(0, |acc, &c| q.add(q.mul(acc, x), c));
        q.add(q.mul(high, x), s)
    };
    let n = n as u64;
    for x in 1..n {
        out[0].push(eval(x));
    }
    for i in 1..=n {
        out[i as usize].push(eval(n - 1 + i));
    }
}

fn deal_decomposition(q: Prime, n: u32, s: Residue, rand: &[Residue], out: &mut [Vec<Residue>]) {
    let (r, pawn_r) = (rand[0], &rand[1..]);
    let masked = q.add(r, s);
    out[0].push(r);
    for (i, &ri) in pawn_r.iter().enumerate() {
        out[i + 1].push(masked);
        out[i + 1].push(ri);
    }
    out[n as usize].push(masked);
    out[n as usize].push(q.add(s, q.sum(pawn_r.iter().copied())));
}

fn check_lengths(spec: &SchemeSpec, secret: &SecretVector, transcript: &DealTranscript) -> Result<()> {
    if secret.0.len() != spec.secret_len() {
        return Err(invalid(format!(
            "{} needs a secret of {} symbols, got {}",
            spec.kind,
            spec.secret_len(),
            secret.0.len()
        )));
    }
    if transcript.0.len() != spec.transcript_len() {
        return Err(invalid(format!(
            "{} needs {} random values, got {}",
            spec.kind,
            spec.transcript_len(),
            transcript.0.len()
        )));
    }
    let q = spec.q.get();
    if secret.0.iter().chain(&transcript.0).any(|&x| x >= q) {
        return Err(invalid(format!("values must be reduced mod {q}")));
    }
    Ok(())
}

pub fn deal_with_randomness(
    spec: &SchemeSpec,
    secret: &SecretVector,
    transcript: &DealTranscript,
) -> Result<ShareBundle> {
    check_lengths(spec, secret, transcript)?;
    let participants = spec.participants();
    let mut out = vec![Vec::new(); participants.len()];
    deal_into(spec, &secret.0, &transcript.0, &mut out);
    Ok(ShareBundle {
        spec: *spec,
        shares: participants.into_iter().zip(out).collect(),
    })
}

/// Draws the transcript from ChaCha20 seeded with `seed` and deals.
pub fn deal(spec: &SchemeSpec, secret: &SecretVector, seed: u64) -> Result<(ShareBundle, DealTranscript)> {
    let mut rng = seeded_rng(seed);
    let transcript = DealTranscript(
        (0..spec.transcript_len())
            .map(|_| sample_uniform(&mut rng, spec.q))
            .collect(),
    );
    let bundle = deal_with_randomness(spec, secret, &transcript)?;
    Ok((bundle, transcript))
}

/// Recovers the secret from the shares of `members`.
///
/// When `members` contains several minimal qualified sets, the
/// lexicographically first one (king before pawns, pawns by index) is used.
pub fn reconstruct(spec: &SchemeSpec, partial: &ShareBundle, members: &[Participant]) -> Result<SecretVector> {
    if partial.spec != *spec {
        return Err(invalid("share bundle belongs to a different scheme"));
    }
    partial.check_shape()?;
    let gamma = spec.structure();
    let set = gamma.set_of(members)?;
    let minimal = gamma
        .first_minimal_within(set)
        .ok_or_else(|| Error::NotQualified(gamma.format_set(set)))?;
    let used = gamma.members(minimal);
    for p in &used {
        if !partial.shares.contains_key(p) {
            return Err(invalid(format!("missing share for {p}")));
        }
    }

    let n = spec.n as usize;
    let with_king = used.contains(&Participant::King);
    let mut offsets: BTreeMap<Participant, usize> = used.iter().map(|&p| (p, 0)).collect();
    let mut secret = Vec::with_capacity(spec.secret_len());
    for c in spec.components() {
        // slice this component's values out of each used participant's share
        let mut part: BTreeMap<Participant, &[Residue]> = BTreeMap::new();
        for &p in &used {
            let len = component_share_len(c, spec.n, p == Participant::King);
            let off = offsets[&p];
            part.insert(p, &partial.shares[&p][off..off + len]);
            *offsets.get_mut(&p).unwrap() += len;
        }
        let q = spec.q;
        let s = match c {
            Component::Shamir => {
                let mut points = Vec::with_capacity(n);
                for (&p, vals) in &part {
                    match p {
                        Participant::King => {
                            points.extend(vals.iter().enumerate().map(|(j, &y)| (j as u64 + 1, y)))
                        }
                        Participant::Pawn(i) => points.push((n as u64 - 1 + i as u64, vals[0])),
                        Participant::Label(_) => unreachable!(),
                    }
                }
                interpolate_at_zero(&points, q)?
            }
            Component::Decomposition if with_king => {
                let king = part[&Participant::King][0];
                let (_, pawn) = part.iter().find(|(p, _)| **p != Participant::King).unwrap();
                q.sub(pawn[0], king)
            }
            Component::Decomposition => {
                let masked_sum = part[&Participant::Pawn(spec.n)][1];
                let others = q.sum(
                    part.iter()
                        .filter(|(p, _)| **p != Participant::Pawn(spec.n))
                        .map(|(_, v)| v[1]),
                );
                q.sub(masked_sum, others)
            }
        };
        secret.push(s);
    }
    Ok(SecretVector(secret))
}

/// Size `q^m` of each participant's share domain.
pub fn share_domains(spec: &SchemeSpec) -> BTreeMap<Participant, BigUint> {
    spec.participants()
        .into_iter()
        .map(|p| (p, BigUint::from(spec.q.get()).pow(spec.share_len(p) as u32)))
        .collect()
}

/// Secret symbols over the largest share, in symbols. This is the true
/// information rate only once the shares are known to be uniform.
pub fn nominal_rate(spec: &SchemeSpec) -> Rational {
    let max_share = spec
        .participants()
        .into_iter()
        .map(|p| spec.share_len(p))
        .max()
        .unwrap_or(1);
    ratio(spec.secret_len() as i64, max_share as i64)
}

/// On-disk form of a dealt bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareFile {
    pub scheme: SchemeKind,
    pub n: u32,
    pub q: u64,
    pub secret_len: usize,
    pub shares: BTreeMap<Participant, Vec<Residue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<DealTranscript>,
}

impl ShareFile {
    pub fn new(bundle: &ShareBundle, transcript: Option<DealTranscript>) -> Self {
        ShareFile {
            scheme: bundle.spec.kind,
            n: bundle.spec.n,
            q: bundle.spec.q.get(),
            secret_len: bundle.spec.secret_len(),
            shares: bundle.shares.clone(),
            transcript,
        }
    }

    pub fn into_bundle(self) -> Result<ShareBundle> {
        let spec = SchemeSpec::new(self.scheme, self.n, Prime::new(self.q)?)?;
        if self.secret_len != spec.secret_len() {
            return Err(invalid(format!(
                "secret_len {} does not match {}",
                self.secret_len, spec.kind
            )));
        }
        let bundle = ShareBundle {
            spec,
            shares: self.shares,
        };
        bundle.check_shape()?;
        Ok(bundle)
    }
}
