//! Brute-force ground truth: the Eisenstein criterion applied polynomial by
//! polynomial, and exhaustive counts over small boxes of coefficients.

use std::thread;

use num_bigint::BigUint;

use crate::counting::{CountMethod, ExactCount, Variant};
use crate::error::{Error, Result};

/// Integer polynomial `a_0 + a_1 X + ... + a_d X^d`, stored low degree first.
///
/// The degree is formal: `a_d` may be zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coefficients: Vec<i64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<i64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid(
                "a polynomial needs at least one coefficient",
            ));
        }
        Ok(Polynomial { coefficients })
    }

    /// Monic polynomial with the given lower coefficients `a_0..a_{d-1}`.
    pub fn monic(lower: &[i64]) -> Self {
        let mut coefficients = lower.to_vec();
        coefficients.push(1);
        Polynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> i64 {
        self.coefficients[self.degree()]
    }

    /// Largest absolute value among all coefficients.
    pub fn height(&self) -> u64 {
        self.coefficients
            .iter()
            .map(|a| a.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

/// Distinct prime divisors of `n > 0` by trial division.
fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primes `p` with `p | a_0` and `p^2 ∤ a_0`: the only possible witnesses.
fn constant_term_candidates(a0: i64) -> Vec<u64> {
    if a0 == 0 {
        return Vec::new();
    }
    let n = a0.unsigned_abs();
    prime_divisors(n)
        .into_iter()
        .filter(|&p| p.checked_mul(p).is_none_or(|sq| !n.is_multiple_of(sq)))
        .collect()
}

#[inline]
fn divides(p: u64, a: i64) -> bool {
    a.unsigned_abs().is_multiple_of(p)
}

#[inline]
fn certifies(p: u64, coefficients: &[i64]) -> bool {
    let d = coefficients.len() - 1;
    coefficients[1..d].iter().all(|&a| divides(p, a)) && !divides(p, coefficients[d])
}

/// Every prime that makes `f` an Eisenstein polynomial, ascending.
///
/// Empty when `a_0 = 0`, since then `p^2 | a_0` for every `p`.
pub fn eisenstein_witnesses(f: &Polynomial) -> Result<Vec<u64>> {
    if f.degree() == 0 {
        return Err(Error::invalid(
            "the Eisenstein criterion needs degree at least 1",
        ));
    }
    let c = f.coefficients();
    Ok(constant_term_candidates(c[0])
        .into_iter()
        .filter(|&p| certifies(p, c))
        .collect())
}

pub fn is_eisenstein(f: &Polynomial) -> Result<bool> {
    Ok(!eisenstein_witnesses(f)?.is_empty())
}

/// Cap on the number of polynomials a brute-force count may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget(pub u64);

impl EnumerationBudget {
    pub const DEFAULT: EnumerationBudget = EnumerationBudget(100_000_000);
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Number of polynomials a brute-force count of `variant` would visit, or
/// `None` if it does not fit in `u128`.
pub fn enumeration_size(variant: Variant, d: u32, h: u64) -> Option<u128> {
    let side = u128::from(h).checked_mul(2)?.checked_add(1)?;
    let free = match variant {
        Variant::Monic => d,
        Variant::General => d.checked_add(1)?,
    };
    side.checked_pow(free)
}

/// Checks `(d, h)` against the counting preconditions and `budget`.
pub fn check_enumeration(
    variant: Variant,
    d: u32,
    h: u64,
    budget: EnumerationBudget,
) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid(format!(
            "degree must be at least 2, got {d}"
        )));
    }
    if h < 1 {
        return Err(Error::invalid("height must be at least 1"));
    }
    if h > i64::MAX as u64 / 4 {
        return Err(Error::invalid(format!(
            "height {h} is too large to enumerate"
        )));
    }
    match enumeration_size(variant, d, h) {
        Some(n) if n <= u128::from(budget.0) => Ok(()),
        size => Err(Error::Resource(format!(
            "brute-force {variant} count for d={d}, H={h} visits {} polynomials, budget is {}",
            size.map_or_else(|| "more than 2^128".to_string(), |n| n.to_string()),
            budget.0
        ))),
    }
}

pub fn brute_count_monic(d: u32, h: u64, budget: EnumerationBudget) -> Result<ExactCount> {
    brute_count(Variant::Monic, d, h, budget, 1)
}

pub fn brute_count_general(d: u32, h: u64, budget: EnumerationBudget) -> Result<ExactCount> {
    brute_count(Variant::General, d, h, budget, 1)
}

/// Exhaustive count, optionally split across `threads` workers.
///
/// The box is partitioned by contiguous blocks of one coefficient (`a_d` for
/// the general family, `a_{d-1}` for monic); partial counts are summed, so
/// the result does not depend on `threads`.
pub fn brute_count(
    variant: Variant,
    d: u32,
    h: u64,
    budget: EnumerationBudget,
    threads: usize,
) -> Result<ExactCount> {
    check_enumeration(variant, d, h, budget)?;
    let hi = h as i64;
    let candidates: Vec<Vec<u64>> = (-hi..=hi).map(constant_term_candidates).collect();
    let d = d as usize;
    let split_index = match variant {
        Variant::Monic => d - 1,
        Variant::General => d,
    };

    let width = 2 * hi + 1;
    let workers = threads.clamp(1, width as usize) as i64;
    let block = (width + workers - 1) / workers;
    let blocks: Vec<(i64, i64)> = (0..workers)
        .map(|w| (-hi + w * block, (-hi + (w + 1) * block - 1).min(hi)))
        .filter(|(lo, up)| lo <= up)
        .collect();

    let count_block = |(lo, up): (i64, i64)| -> u64 {
        let mut coefficients = vec![0i64; d + 1];
        if variant == Variant::Monic {
            coefficients[d] = 1;
        }
        let free: Vec<usize> = (0..split_index).collect();
        let mut total = 0u64;
        for lead in lo..=up {
            coefficients[split_index] = lead;
            total += count_box(&mut coefficients, &free, hi, &candidates);
        }
        total
    };

    let total: u64 = if blocks.len() == 1 {
        count_block(blocks[0])
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = blocks
                .iter()
                .map(|&b| scope.spawn(move || count_block(b)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("enumeration worker panicked"))
                .sum()
        })
    };

    Ok(ExactCount {
        value: BigUint::from(total),
        degree: d as u32,
        height: h,
        variant,
        method: CountMethod::Brute,
    })
}

/// Odometer over the `free` coefficient slots, each in `[-h, h]`.
fn count_box(coefficients: &mut [i64], free: &[usize], h: i64, candidates: &[Vec<u64>]) -> u64 {
    for &i in free {
        coefficients[i] = -h;
    }
    let mut total = 0u64;
    loop {
        let a0 = coefficients[0];
        let cands = &candidates[(a0 + h) as usize];
        if cands.iter().any(|&p| certifies(p, coefficients)) {
            total += 1;
        }
        // advance; slot 0 turns fastest
        let mut k = 0;
        loop {
            if k == free.len() {
                return total;
            }
            let slot = free[k];
            if coefficients[slot] < h {
                coefficients[slot] += 1;
                break;
            }
            coefficients[slot] = -h;
            k += 1;
        }
    }
}
