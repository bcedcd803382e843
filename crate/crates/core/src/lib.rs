//! Secret sharing for the king-and-n-pawns access structures.
//!
//! * [`field`]: prime-field arithmetic, Lagrange interpolation at zero and
//!   bias-free sampling.
//! * [`access`]: access structures, including `Γ_n` and three four-participant
//!   siblings.
//! * [`schemes`]: dealers and reconstructors for the Shamir-style scheme, the
//!   decomposition scheme, and their composite of rate `(n-1)/(2n-3)`.
//! * [`entropy`]: an exhaustive oracle over every (secret, randomness) pair
//!   that checks perfectness by exact counting and reports entropies and rates.
//! * [`bound`]: the Shannon-inequality linear program over subsets of
//!   participants plus the secret, solved with an exact rational simplex, and a
//!   checker for summation certificates of the lower bound on share size.

pub mod access;
pub mod bound;
pub mod entropy;
pub mod error;
pub mod field;
pub mod schemes;
pub mod simplex;

pub use error::{Error, Result};

use num_bigint::BigInt;

/// Exact rational used by rates, bounds and the simplex.
pub type Rational = num_rational::BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `a/b` in lowest terms, with an explicit denominator even for integers.
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Inverse of [`format_ratio`]; also accepts bare integers.
pub fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}
