//! Exact counts `E_d(H)` (monic) and `F_d(H)` (general) by Möbius
//! inclusion-exclusion over square-free moduli.
//!
//! For square-free `s`, the polynomials satisfying the Eisenstein conditions
//! simultaneously at every prime of `s` are exactly those with `s | a_i` for
//! `i < d`, `gcd(a_0/s, s) = 1` and (general case) `gcd(a_d, s) = 1`. Their
//! number factors coefficient by coefficient, so each term of
//!
//! ```text
//! count = - Σ_{s=2}^{H} μ(s) · #{polynomials certified by every prime of s}
//! ```
//!
//! is a closed-form product. Terms with `s > H` vanish, so the sum is finite
//! and the result is exact.

use std::fmt;
use std::thread;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{phi_bounded_from_primes, ArithSieve};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `a_d = 1`, height bound on `a_0..a_{d-1}`.
    Monic,
    /// Height bound on all of `a_0..a_d`.
    General,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Monic => "monic",
            Variant::General => "general",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monic" => Ok(Variant::Monic),
            "general" => Ok(Variant::General),
            _ => Err(Error::Parse(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Brute,
    InclusionExclusion,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::Brute => "brute",
            CountMethod::InclusionExclusion => "inclusion_exclusion",
        })
    }
}

/// An exact count together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCount {
    pub value: BigUint,
    pub degree: u32,
    pub height: u64,
    pub variant: Variant,
    pub method: CountMethod,
}

fn check_degree(d: u32) -> Result<()> {
    if d < 2 {
        Err(Error::invalid(format!(
            "degree must be at least 2, got {d}"
        )))
    } else {
        Ok(())
    }
}

fn check_height(h: u64, sieve: &ArithSieve) -> Result<()> {
    if h < 1 {
        return Err(Error::invalid("height must be at least 1"));
    }
    if h > sieve.limit() {
        return Err(Error::Resource(format!(
            "height {h} exceeds the sieve limit {}",
            sieve.limit()
        )));
    }
    Ok(())
}

/// Number of monic polynomials of height `<= h` with `s | a_i` for `i < d`
/// and `gcd(a_0/s, s) = 1`.
pub fn count_monic_s(d: u32, s: u64, h: u64, sieve: &ArithSieve) -> Result<BigUint> {
    check_degree(d)?;
    let q = h / s.max(1);
    let a0 = sieve.phi_bounded(s, q)?;
    Ok(BigUint::from(2 * q + 1).pow(d - 1) * a0)
}

/// As [`count_monic_s`] over all `a_0..a_d`, additionally requiring
/// `gcd(a_d, s) = 1`.
pub fn count_general_s(d: u32, s: u64, h: u64, sieve: &ArithSieve) -> Result<BigUint> {
    check_degree(d)?;
    let q = h / s.max(1);
    let a0 = sieve.phi_bounded(s, q)?;
    let ad = sieve.phi_bounded(s, h)?;
    Ok(BigUint::from(2 * q + 1).pow(d - 1) * a0 * ad)
}

/// `E_d(H)`, the number of monic Eisenstein polynomials of height `<= H`.
pub fn count_monic_eisenstein(d: u32, h: u64, sieve: &ArithSieve) -> Result<ExactCount> {
    count_eisenstein(Variant::Monic, d, h, sieve, 1)
}

/// `F_d(H)`, the number of Eisenstein polynomials of height `<= H`.
pub fn count_general_eisenstein(d: u32, h: u64, sieve: &ArithSieve) -> Result<ExactCount> {
    count_eisenstein(Variant::General, d, h, sieve, 1)
}

/// Inclusion-exclusion count split over `threads` contiguous blocks of `s`.
///
/// Block sums are exact integers combined in a fixed order, so the value is
/// identical for every thread count.
pub fn count_eisenstein(
    variant: Variant,
    d: u32,
    h: u64,
    sieve: &ArithSieve,
    threads: usize,
) -> Result<ExactCount> {
    check_degree(d)?;
    check_height(h, sieve)?;
    let total = if h < 2 {
        BigInt::zero()
    } else {
        let span = h - 1;
        let workers = (threads.max(1) as u64).min(span);
        let block = span.div_ceil(workers);
        let ranges: Vec<(u64, u64)> = (0..workers)
            .map(|w| (2 + w * block, (2 + (w + 1) * block - 1).min(h)))
            .filter(|(lo, up)| lo <= up)
            .collect();
        if ranges.len() == 1 {
            signed_block_sum(variant, d, h, ranges[0], sieve)
        } else {
            thread::scope(|scope| {
                let handles: Vec<_> = ranges
                    .iter()
                    .map(|&r| scope.spawn(move || signed_block_sum(variant, d, h, r, sieve)))
                    .collect();
                handles
                    .into_iter()
                    .map(|j| j.join().expect("counting worker panicked"))
                    .fold(BigInt::zero(), |acc, x| acc + x)
            })
        }
    };
    // E = -Σ μ(s)·#G(s); the block sums carry Σ μ(s)·#G(s).
    let value = (-total).to_biguint().ok_or_else(|| {
        Error::invalid("inclusion-exclusion produced a negative count".to_string())
    })?;
    Ok(ExactCount {
        value,
        degree: d,
        height: h,
        variant,
        method: CountMethod::InclusionExclusion,
    })
}

/// `Σ μ(s)·#(set for s)` over `s` in `lo..=up`, skipping non-square-free `s`.
fn signed_block_sum(
    variant: Variant,
    d: u32,
    h: u64,
    (lo, up): (u64, u64),
    sieve: &ArithSieve,
) -> BigInt {
    let mut big = BigInt::zero();
    let mut small: i128 = 0;
    for s in lo..=up {
        let primes = match sieve.squarefree_primes(s).expect("s within sieve range") {
            Some(p) => p,
            None => continue,
        };
        let q = h / s;
        let ps = primes.as_slice();
        let a0 = phi_bounded_from_primes(ps, q);
        if a0 == 0 {
            continue;
        }
        let ad = match variant {
            Variant::Monic => 1,
            Variant::General => u128::from(phi_bounded_from_primes(ps, h)),
        };
        let factors = [u128::from(a0), ad];
        let negative = ps.len() % 2 == 1;
        match term_u128(2 * q + 1, d - 1, &factors) {
            Some(t) if t <= i128::MAX as u128 => {
                let t = t as i128;
                let t = if negative { -t } else { t };
                match small.checked_add(t) {
                    Some(v) => small = v,
                    None => {
                        big += BigInt::from(small);
                        small = t;
                    }
                }
            }
            _ => {
                let mut t = BigUint::from(2 * q + 1).pow(d - 1);
                for f in factors {
                    t *= f;
                }
                let sign = if negative { Sign::Minus } else { Sign::Plus };
                big += BigInt::from_biguint(sign, t);
            }
        }
    }
    big + BigInt::from(small)
}

fn term_u128(base: u64, exp: u32, factors: &[u128]) -> Option<u128> {
    let mut t = u128::from(base).checked_pow(exp)?;
    for &f in factors {
        t = t.checked_mul(f)?;
    }
    Some(t)
}

/// Leading-order approximation `2^d H^d φ(s) / s^{d+1}` of [`count_monic_s`].
pub fn approx_count_monic_s<T: Scalar>(d: u32, s: u64, h: u64, sieve: &ArithSieve) -> Result<T> {
    check_degree(d)?;
    let phi = T::from_uint(sieve.euler_phi(s)?);
    let two_h_over_s = T::from_uint(2 * h) / T::from_uint(s);
    Ok(two_h_over_s.powu(d) * phi / T::from_uint(s))
}

/// Leading-order approximation `2^{d+1} H^{d+1} φ(s)^2 / s^{d+2}` of
/// [`count_general_s`].
pub fn approx_count_general_s<T: Scalar>(d: u32, s: u64, h: u64, sieve: &ArithSieve) -> Result<T> {
    check_degree(d)?;
    let phi_over_s = T::from_uint(sieve.euler_phi(s)?) / T::from_uint(s);
    let two_h_over_s = T::from_uint(2 * h) / T::from_uint(s);
    Ok(two_h_over_s.powu(d) * T::from_uint(2 * h) * phi_over_s.clone() * phi_over_s)
}
