//! Arithmetic in the prime field `Z_q`.
//!
//! Residues are plain `u64` values kept in canonical form `[0, q)`. Every
//! operation reduces eagerly, so two residues are equal exactly when their
//! integers are equal.

use std::fmt;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A residue modulo some [`Prime`], always in `[0, q)`.
pub type Residue = u64;

/// The generator behind every seeded deal: ChaCha20 keyed by
/// `ChaCha20Rng::seed_from_u64(seed)`.
pub type DealRng = ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> DealRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(q: u64) -> Result<Self> {
        if is_prime(q) {
            Ok(Prime(q))
        } else {
            Err(invalid(format!("{q} is not prime")))
        }
    }

    /// The smallest prime strictly greater than `bound`.
    pub fn smallest_above(bound: u64) -> Self {
        let mut q = bound + 1;
        while !is_prime(q) {
            q += 1;
        }
        Prime(q)
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn reduce(self, x: u64) -> Residue {
        x % self.0
    }

    pub fn add(self, a: Residue, b: Residue) -> Residue {
        ((a as u128 + b as u128) % self.0 as u128) as u64
    }

    pub fn sub(self, a: Residue, b: Residue) -> Residue {
        self.add(a, self.neg(b))
    }

    pub fn neg(self, a: Residue) -> Residue {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn mul(self, a: Residue, b: Residue) -> Residue {
        mul_mod(a, b, self.0)
    }

    pub fn pow(self, base: Residue, exp: u64) -> Residue {
        pow_mod(base, exp, self.0)
    }

    /// Multiplicative inverse by Fermat's little theorem. `a` must be nonzero.
    pub fn inv(self, a: Residue) -> Residue {
        debug_assert!(!a.is_multiple_of(self.0));
        self.pow(a, self.0 - 2)
    }

    pub fn sum<I: IntoIterator<Item = Residue>>(self, values: I) -> Residue {
        values.into_iter().fold(0, |acc, v| self.add(acc, v))
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = u64::deserialize(d)?;
        Prime::new(q).map_err(serde::de::Error::custom)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A polynomial over `Z_q` stored lowest-degree first. The length is the
/// degree bound plus one; trailing zeros are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Residue>,
    modulus: Prime,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Residue>, modulus: Prime) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("polynomial needs at least one coefficient"));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= modulus.get()) {
            return Err(invalid(format!("coefficient {c} not reduced mod {modulus}")));
        }
        Ok(Polynomial { coeffs, modulus })
    }

    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Residue) -> Residue {
        let q = self.modulus;
        let x = q.reduce(x);
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| q.add(q.mul(acc, x), c))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

pub fn poly_eval(f: &Polynomial, x: Residue) -> Residue {
    f.eval(x)
}

/// Value at zero of the unique polynomial of degree at most `points.len() - 1`
/// passing through `points`, by the Lagrange weights
/// `f(0) = sum_i y_i * prod_{j != i} x_j / (x_j - x_i)`.
pub fn interpolate_at_zero(points: &[(Residue, Residue)], modulus: Prime) -> Result<Residue> {
    let q = modulus;
    if points.is_empty() {
        return Err(invalid("interpolation needs at least one point"));
    }
    let xs: Vec<Residue> = points.iter().map(|&(x, _)| q.reduce(x)).collect();
    for (i, &x) in xs.iter().enumerate() {
        if x == 0 || xs[..i].contains(&x) {
            return Err(Error::DegenerateInterpolation(x));
        }
    }

    let mut acc = 0;
    for (i, &(_, y)) in points.iter().enumerate() {
        let mut num = 1;
        let mut den = 1;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                num = q.mul(num, xj);
                den = q.mul(den, q.sub(xj, xs[i]));
            }
        }
        let weight = q.mul(num, q.inv(den));
        acc = q.add(acc, q.mul(weight, q.reduce(y)));
    }
    Ok(acc)
}

/// Uniform residue in `[0, q)` by rejection sampling on 64-bit words, so
/// there is no modulo bias.
pub fn sample_uniform<R: RngCore + ?Sized>(rng: &mut R, modulus: Prime) -> Residue {
    let q = modulus.get();
    let zone = u64::MAX - (u64::MAX % q + 1) % q;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: u64) -> Prime {
        Prime::new(q).unwrap()
    }

    fn poly(coeffs: &[u64], q: u64) -> Polynomial {
        Polynomial::new(coeffs.to_vec(), p(q)).unwrap()
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            small,
            [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(1).is_err());
    }

    #[test]
    fn default_modulus() {
        // smallest prime > 2n - 1 for n = 2..5
        let got: Vec<u64> = (2..=5).map(|n| Prime::smallest_above(2 * n - 1).get()).collect();
        assert_eq!(got, [5, 7, 11, 11]);
    }

    #[test]
    fn eval_examples() {
        let f = poly(&[3, 2], 5);
        assert_eq!(poly_eval(&f, 1), 0);
        assert_eq!(poly_eval(&f, 2), 2);
        let c = poly(&[4], 7);
        for x in 0..7 {
            assert_eq!(poly_eval(&c, x), 4);
        }
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(interpolate_at_zero(&[(1, 0), (2, 2)], p(5)).unwrap(), 3);
        assert_eq!(interpolate_at_zero(&[(2, 2), (3, 4)], p(5)).unwrap(), 3);
        assert_eq!(interpolate_at_zero(&[(1, 6)], p(7)).unwrap(), 6);
    }

    #[test]
    fn interpolation_rejects_degenerate_points() {
        assert_eq!(
            interpolate_at_zero(&[(1, 0), (1, 2)], p(5)),
            Err(Error::DegenerateInterpolation(1))
        );
        // 6 = 1 mod 5
        assert!(interpolate_at_zero(&[(1, 0), (6, 2)], p(5)).is_err());
        assert!(interpolate_at_zero(&[(0, 3)], p(5)).is_err());
        assert!(interpolate_at_zero(&[], p(5)).is_err());
    }

    #[test]
    fn polynomial_rejects_unreduced() {
        assert!(Polynomial::new(vec![5], p(5)).is_err());
        assert!(Polynomial::new(vec![], p(5)).is_err());
    }

    fn all_coeff_vectors(q: u64, len: usize) -> impl Iterator<Item = Vec<u64>> {
        let total = q.pow(len as u32);
        (0..total).map(move |mut idx| {
            (0..len)
                .map(|_| {
                    let c = idx % q;
                    idx /= q;
                    c
                })
                .collect()
        })
    }

    fn subsets_of_size(items: &[u64], k: usize) -> Vec<Vec<u64>> {
        if k == 0 {
            return vec![vec![]];
        }
        if items.len() < k {
            return vec![];
        }
        let mut with: Vec<Vec<u64>> = subsets_of_size(&items[1..], k - 1)
            .into_iter()
            .map(|mut s| {
                s.insert(0, items[0]);
                s
            })
            .collect();
        with.extend(subsets_of_size(&items[1..], k));
        with
    }

    #[test]
    fn interpolation_round_trip_exhaustive() {
        for q in [5u64, 7] {
            let nonzero: Vec<u64> = (1..q).collect();
            for d in 0..=3 {
                let point_sets = subsets_of_size(&nonzero, d + 1);
                for coeffs in all_coeff_vectors(q, d + 1) {
                    let f = poly(&coeffs, q);
                    for xs in &point_sets {
                        let pts: Vec<_> = xs.iter().map(|&x| (x, f.eval(x))).collect();
                        assert_eq!(interpolate_at_zero(&pts, p(q)).unwrap(), coeffs[0]);
                    }
                }
            }
        }
    }

    #[test]
    fn horner_matches_power_sum() {
        for q in [2u64, 3, 5, 7, 11] {
            for d in 0..=4 {
                for coeffs in all_coeff_vectors(q, d + 1) {
                    let f = poly(&coeffs, q);
                    for x in 0..q {
                        let naive = coeffs
                            .iter()
                            .enumerate()
                            .map(|(i, &c)| c * x.pow(i as u32) % q)
                            .sum::<u64>()
                            % q;
                        assert_eq!(f.eval(x), naive);
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_fair_bits() {
        let mut rng = seeded_rng(7);
        let draws = 100_000;
        let ones: u64 = (0..draws).map(|_| sample_uniform(&mut rng, p(2))).sum();
        let freq = ones as f64 / draws as f64;
        let sigma = (0.25 / draws as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * sigma, "frequency {freq}");
    }

    #[test]
    fn sampling_covers_all_residues() {
        let mut rng = seeded_rng(11);
        let mut seen = [0u32; 5];
        for _ in 0..10_000 {
            seen[sample_uniform(&mut rng, p(5)) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 0), "{seen:?}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            (0..64).map(|_| sample_uniform(&mut rng, p(11))).collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn rejection_zone_is_a_multiple_of_q() {
        for q in [2u64, 3, 5, 7, 11, 65_537, 18_446_744_073_709_551_557] {
            let zone = u64::MAX - (u64::MAX % q + 1) % q;
            assert_eq!((zone as u128 + 1) % q as u128, 0, "q = {q}");
        }
    }

    #[test]
    fn field_ops() {
        let q = p(7);
        assert_eq!(q.sub(2, 5), 4);
        assert_eq!(q.neg(0), 0);
        for a in 1..7 {
            assert_eq!(q.mul(a, q.inv(a)), 1);
        }
        assert_eq!(q.sum([3, 4, 5]), 5);
    }
}
