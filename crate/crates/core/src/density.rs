//! The density constants
//!
//! ```text
//! θ_d = 1 - Π_p (1 - (p-1)/p^{d+1})   = -Σ_{s>=2} μ(s) φ(s)  / s^{d+1}
//! ρ_d = 1 - Π_p (1 - (p-1)^2/p^{d+2}) = -Σ_{s>=2} μ(s) φ(s)^2 / s^{d+2}
//! ```
//!
//! evaluated two independent ways (truncated Euler product, truncated Möbius
//! series), each returning a two-sided bracket that contains the infinite
//! value.
//!
//! Product tail: every omitted factor is `1 - x_p` with `0 <= x_p < p^-d <= 1/4`,
//! and `-log(1 - x) <= 2x` there, so the omitted part of the product lies in
//! `[exp(-T), 1]` with `T = Σ_{n>P} 2/n^d <= 2/((d-1) P^{d-1})`. The lower end
//! uses `1 - T + T²/2 - T³/6 <= exp(-T)`, which keeps the arithmetic rational.
//!
//! Series tail: `|μ(s) φ(s)^k / s^{d+k}| <= 1/s^d`, so the omitted terms sum to
//! at most `1/((d-1) S^{d-1})` in absolute value.
//!
//! Both brackets are further widened by a rounding budget derived from
//! [`Scalar::unit_roundoff`]; for exact rationals that budget is zero.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::ArithSieve;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// First 10,000 primes, the truncation used for the published table.
pub const DEFAULT_PRIME_COUNT: usize = 10_000;

pub const DEFAULT_SERIES_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    /// Monic family, local factor `1 - (p-1)/p^{d+1}`.
    Theta,
    /// General family, local factor `1 - (p-1)^2/p^{d+2}`.
    Rho,
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityKind::Theta => "theta",
            DensityKind::Rho => "rho",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    EulerProduct,
    MobiusSeries,
}

impl fmt::Display for DensityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityMethod::EulerProduct => "euler_product",
            DensityMethod::MobiusSeries => "mobius_series",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Product over the first `k` primes.
    PrimeCount(usize),
    /// Product over the primes `<= P`.
    PrimeLimit(u64),
    /// Series over `2 <= s <= S`.
    SeriesLimit(u64),
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::PrimeCount(k) => write!(f, "first {k} primes"),
            Truncation::PrimeLimit(p) => write!(f, "primes <= {p}"),
            Truncation::SeriesLimit(s) => write!(f, "s <= {s}"),
        }
    }
}

/// A truncated evaluation of `θ_d` or `ρ_d` and a bracket containing the
/// exact constant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate<T> {
    pub kind: DensityKind,
    pub degree: u32,
    /// The truncated product or partial sum itself.
    pub value: T,
    pub lower: T,
    pub upper: T,
    pub truncation: Truncation,
    pub method: DensityMethod,
}

impl<T: Scalar> DensityEstimate<T> {
    pub fn width(&self) -> T {
        self.upper.clone() - self.lower.clone()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.lower <= *x && *x <= self.upper
    }

    pub fn overlaps(&self, other: &DensityEstimate<T>) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

fn check_degree(d: u32) -> Result<()> {
    if d < 2 {
        Err(Error::invalid(format!(
            "density constants need degree >= 2, got {d}"
        )))
    } else {
        Ok(())
    }
}

/// `x_p`, the amount by which the local factor at `p` falls short of one.
fn local_deficit<T: Scalar>(kind: DensityKind, d: u32, p: u64) -> T {
    let ratio = T::from_ratio(p - 1, p);
    let scale = T::from_ratio(1, p).powu(d);
    match kind {
        DensityKind::Theta => ratio * scale,
        DensityKind::Rho => ratio.clone() * ratio * scale,
    }
}

/// Primes used by a product truncation, and the bound `P` beyond which all
/// omitted primes lie.
fn truncated_primes(truncation: Truncation, sieve: &ArithSieve) -> Result<(&[u64], u64)> {
    let primes = sieve.primes();
    match truncation {
        Truncation::PrimeCount(k) => {
            if k == 0 {
                return Err(Error::invalid("prime count must be positive"));
            }
            if k > primes.len() {
                return Err(Error::Resource(format!(
                    "sieve up to {} holds only {} primes, {k} requested",
                    sieve.limit(),
                    primes.len()
                )));
            }
            Ok((&primes[..k], primes[k - 1]))
        }
        Truncation::PrimeLimit(limit) => {
            if limit < 2 {
                return Err(Error::invalid("prime limit must be at least 2"));
            }
            if limit > sieve.limit() {
                return Err(Error::OutOfRange {
                    value: limit,
                    limit: sieve.limit(),
                });
            }
            let n = primes.partition_point(|&p| p <= limit);
            Ok((&primes[..n], limit))
        }
        Truncation::SeriesLimit(_) => Err(Error::invalid(
            "a series limit does not truncate an Euler product",
        )),
    }
}

pub fn theta_product<T: Scalar>(
    d: u32,
    truncation: Truncation,
    sieve: &ArithSieve,
) -> Result<DensityEstimate<T>> {
    euler_product(DensityKind::Theta, d, truncation, sieve)
}

pub fn rho_product<T: Scalar>(
    d: u32,
    truncation: Truncation,
    sieve: &ArithSieve,
) -> Result<DensityEstimate<T>> {
    euler_product(DensityKind::Rho, d, truncation, sieve)
}

/// `1 - Π_{p in truncation} (1 - x_p)` with a rigorous bracket.
pub fn euler_product<T: Scalar>(
    kind: DensityKind,
    d: u32,
    truncation: Truncation,
    sieve: &ArithSieve,
) -> Result<DensityEstimate<T>> {
    check_degree(d)?;
    let (primes, bound) = truncated_primes(truncation, sieve)?;
    let u = T::unit_roundoff();

    // Each computed factor has relative error <= 2(d+4)u (at most d+4
    // roundings on x_p <= 1/4, the factor itself >= 3/4); each product step
    // adds u. With n factors and n(2d+9)u <= 1/2 the product's relative
    // error stays below 2n(2d+9)u.
    let n = primes.len() as u64;
    let per_factor = u64::from(2 * d + 9);
    let rel = T::from_uint(n * per_factor) * u.clone();
    if rel.clone() + rel.clone() > T::one() {
        return Err(Error::Resource(format!(
            "{n} factors exceed the precision of the chosen scalar type"
        )));
    }
    let rounding = rel.clone() + rel;

    let mut product = T::one();
    for &p in primes {
        product = product * (T::one() - local_deficit::<T>(kind, d, p));
    }

    let tail = T::from_ratio(2, u64::from(d - 1)) * T::from_ratio(1, bound).powu(d - 1);
    let tail_factor = lower_exp_neg(&tail);

    // Tail bound and bracket arithmetic: a handful more roundings, each of
    // size at most u on quantities bounded by 1.
    let slack = rounding + T::from_uint(u64::from(d) + 24) * u;

    let value = T::one() - product.clone();
    let lower = value.clone() - slack.clone();
    let upper = T::one() - product * tail_factor + slack;
    Ok(DensityEstimate {
        kind,
        degree: d,
        value,
        lower,
        upper,
        truncation,
        method: DensityMethod::EulerProduct,
    })
}

/// `1 - t + t²/2 - t³/6`, a lower bound for `exp(-t)` on `[0, 1]`.
fn lower_exp_neg<T: Scalar>(t: &T) -> T {
    let t2 = t.clone() * t.clone();
    let t3 = t2.clone() * t.clone();
    T::one() - t.clone() + t2 / T::from_uint(2) - t3 / T::from_uint(6)
}

pub fn theta_series<T: Scalar>(
    d: u32,
    series_limit: u64,
    sieve: &ArithSieve,
) -> Result<DensityEstimate<T>> {
    mobius_series(DensityKind::Theta, d, series_limit, sieve)
}

pub fn rho_series<T: Scalar>(
    d: u32,
    series_limit: u64,
    sieve: &ArithSieve,
) -> Result<DensityEstimate<T>> {
    mobius_series(DensityKind::Rho, d, series_limit, sieve)
}

/// `-Σ_{s=2}^{S} μ(s) φ(s)^k / s^{d+k}` (`k = 1` for θ, `2` for ρ), summed in
/// ascending `s`, with the bracket `± 1/((d-1) S^{d-1})` plus rounding.
///
/// For very small `S` the bracket can extend outside `(0, 1)`; it is the raw
/// tail bound and is not clipped.
pub fn mobius_series<T: Scalar>(
    kind: DensityKind,
    d: u32,
    series_limit: u64,
    sieve: &ArithSieve,
) -> Result<DensityEstimate<T>> {
    check_degree(d)?;
    if series_limit < 1 {
        return Err(Error::invalid("series limit must be at least 1"));
    }
    if series_limit > sieve.limit() {
        return Err(Error::OutOfRange {
            value: series_limit,
            limit: sieve.limit(),
        });
    }
    let u = T::unit_roundoff();
    let mut sum = T::zero();
    for s in 2..=series_limit {
        let primes = match sieve.squarefree_primes(s)? {
            Some(p) => p,
            None => continue,
        };
        let phi: u64 = primes.as_slice().iter().map(|p| p - 1).product();
        let ratio = T::from_ratio(phi, s);
        let scale = T::from_ratio(1, s).powu(d);
        let term = match kind {
            DensityKind::Theta => ratio * scale,
            DensityKind::Rho => ratio.clone() * ratio * scale,
        };
        if primes.len() % 2 == 1 {
            sum = sum - term;
        } else {
            sum = sum + term;
        }
    }
    // Terms carry relative error <= 2(d+4)u and sum to at most 1 in absolute
    // value; each of the S-1 additions adds u times a partial sum below 1.
    let slack = T::from_uint(2 * u64::from(d) + series_limit + 32) * u;
    let tail = T::from_ratio(1, u64::from(d - 1)) * T::from_ratio(1, series_limit).powu(d - 1);
    let value = -sum;
    let lower = value.clone() - tail.clone() - slack.clone();
    let upper = value.clone() + tail + slack;
    Ok(DensityEstimate {
        kind,
        degree: d,
        value,
        lower,
        upper,
        truncation: Truncation::SeriesLimit(series_limit),
        method: DensityMethod::MobiusSeries,
    })
}

/// Leading asymptotic term: `1/2^{d+1}` for θ, `1/2^{d+2}` for ρ.
pub fn asymptotic_main<T: Scalar>(kind: DensityKind, d: u32) -> Result<T> {
    check_degree(d)?;
    let exp = match kind {
        DensityKind::Theta => d + 1,
        DensityKind::Rho => d + 2,
    };
    Ok(T::one() / T::from_uint(2).powu(exp))
}

/// Two-term approximation `1/2^{d+1} + 2/3^{d+1}` of `θ_d`: the `s = 2` and
/// `s = 3` terms of the Möbius series.
pub fn refined_asymptotic_theta<T: Scalar>(d: u32) -> Result<T> {
    check_degree(d)?;
    Ok(T::one() / T::from_uint(2).powu(d + 1) + T::from_uint(2) / T::from_uint(3).powu(d + 1))
}

/// An upper bound for the `k`-th prime, usable to size a sieve.
pub fn nth_prime_upper_bound(k: usize) -> u64 {
    if k < 6 {
        return 13;
    }
    // p_k < k (ln k + ln ln k) for k >= 6
    let k = k as f64;
    (k * (k.ln() + k.ln().ln())).ceil() as u64 + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Real};
    use num_traits::{One, Zero};

    fn sieve() -> ArithSieve {
        ArithSieve::new(200_000).unwrap()
    }

    fn q(n: u64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn single_factor_products() {
        let sv = sieve();
        let theta: DensityEstimate<Rational> =
            theta_product(2, Truncation::PrimeLimit(2), &sv).unwrap();
        assert_eq!(theta.value, q(1, 8));
        let rho: DensityEstimate<Rational> =
            rho_product(2, Truncation::PrimeLimit(2), &sv).unwrap();
        assert_eq!(rho.value, q(1, 16));
        // T = 2/((d-1) 2^{d-1}) = 1 at d = 2: lower exp factor 1 - 1 + 1/2 - 1/6 = 1/3
        assert_eq!(theta.lower, q(1, 8));
        assert_eq!(theta.upper, Rational::one() - q(7, 8) * q(1, 3));
        assert!(theta.contains(&q(1, 4)));
        let f: DensityEstimate<f64> = theta_product(2, Truncation::PrimeLimit(2), &sv).unwrap();
        assert!((f.value - 0.125).abs() < 1e-15);
        assert!(f.lower <= 0.125 && 0.125 <= f.upper);
    }

    #[test]
    fn empty_series() {
        let sv = sieve();
        for d in 2..=6u32 {
            let e: DensityEstimate<Rational> = theta_series(d, 1, &sv).unwrap();
            assert!(e.value.is_zero());
            assert_eq!(e.upper, q(1, u64::from(d - 1)));
            assert_eq!(e.lower, -q(1, u64::from(d - 1)));
            let r: DensityEstimate<Rational> = rho_series(d, 1, &sv).unwrap();
            assert!(r.value.is_zero());
        }
    }

    #[test]
    fn series_matches_hand_sum() {
        let sv = sieve();
        // -Σ_{s<=6} μ(s)φ(s)/s^3 = 1/8 + 2/27 + 4/125 - 2/216
        let e: DensityEstimate<Rational> = theta_series(2, 6, &sv).unwrap();
        assert_eq!(e.value, q(1, 8) + q(2, 27) + q(4, 125) - q(2, 216));
        let r: DensityEstimate<Rational> = rho_series(2, 6, &sv).unwrap();
        assert_eq!(r.value, q(1, 16) + q(4, 81) + q(16, 625) - q(4, 1296));
    }

    /// Every floating bracket must enclose the exact bracket for the same
    /// truncation, which checks the rounding budget.
    fn encloses<T: Scalar>(float: &DensityEstimate<T>, exact: &DensityEstimate<Rational>) {
        let lo = float.lower.to_rational().unwrap();
        let up = float.upper.to_rational().unwrap();
        assert!(lo <= exact.lower, "{float:?} vs {exact:?}");
        assert!(up >= exact.upper, "{float:?} vs {exact:?}");
        let v = float.value.to_rational().unwrap();
        let slack = v.clone() - lo.clone();
        assert!(v - exact.value.clone() <= slack.clone() + (up - lo));
    }

    #[test]
    fn float_brackets_enclose_exact_evaluation() {
        let sv = sieve();
        for d in [2u32, 3, 7] {
            for kind in [DensityKind::Theta, DensityKind::Rho] {
                let t = Truncation::PrimeCount(25);
                let exact: DensityEstimate<Rational> = euler_product(kind, d, t, &sv).unwrap();
                encloses(&euler_product::<f32>(kind, d, t, &sv).unwrap(), &exact);
                encloses(&euler_product::<f64>(kind, d, t, &sv).unwrap(), &exact);
                encloses(&euler_product::<Real>(kind, d, t, &sv).unwrap(), &exact);

                let exact: DensityEstimate<Rational> = mobius_series(kind, d, 60, &sv).unwrap();
                encloses(&mobius_series::<f32>(kind, d, 60, &sv).unwrap(), &exact);
                encloses(&mobius_series::<f64>(kind, d, 60, &sv).unwrap(), &exact);
                encloses(&mobius_series::<Real>(kind, d, 60, &sv).unwrap(), &exact);
            }
        }
    }

    #[test]
    fn double_double_agrees_with_rationals_to_high_precision() {
        let sv = sieve();
        let t = Truncation::PrimeLimit(60);
        let exact: DensityEstimate<Rational> = theta_product(3, t, &sv).unwrap();
        let dd: DensityEstimate<Real> = theta_product(3, t, &sv).unwrap();
        let exact_hi = exact.value.approx_f64();
        let diff = (dd.value - Real::from(exact_hi)).approx_f64();
        // double-double carries ~30 digits; f64 reference limits us to ~1e-17
        assert!(diff.abs() < 1e-17, "diff = {diff}");
        assert!(dd.width().approx_f64() < 1e-3);
    }

    #[test]
    fn published_table_values() {
        let sv = sieve();
        let table = [
            (2, 0.2515, 0.1677),
            (3, 0.0953, 0.0556),
            (4, 0.0409, 0.0224),
            (5, 0.0186, 0.0099),
            (6, 0.0088, 0.0046),
            (7, 0.0042, 0.0022),
            (8, 0.0021, 0.0010),
            (9, 0.0010, 0.0005),
            (10, 0.0005, 0.0003),
        ];
        let t = Truncation::PrimeCount(DEFAULT_PRIME_COUNT);
        for (d, theta, rho) in table {
            let th: DensityEstimate<Real> = theta_product(d, t, &sv).unwrap();
            let rh: DensityEstimate<Real> = rho_product(d, t, &sv).unwrap();
            assert!(
                (th.value.approx_f64() - theta).abs() <= 1e-4 + 1e-12,
                "theta_{d}"
            );
            assert!(
                (rh.value.approx_f64() - rho).abs() <= 1e-4 + 1e-12,
                "rho_{d}"
            );
        }
    }

    #[test]
    fn bracket_invariants_at_default_truncation() {
        let sv = ArithSieve::new(DEFAULT_SERIES_LIMIT).unwrap();
        for d in 2..=12 {
            for kind in [DensityKind::Theta, DensityKind::Rho] {
                let p: DensityEstimate<Real> =
                    euler_product(kind, d, Truncation::PrimeCount(DEFAULT_PRIME_COUNT), &sv)
                        .unwrap();
                let s: DensityEstimate<Real> =
                    mobius_series(kind, d, DEFAULT_SERIES_LIMIT, &sv).unwrap();
                for e in [&p, &s] {
                    assert!(e.lower <= e.value && e.value <= e.upper);
                    assert!(e.lower > Real::zero() && e.upper < Real::one());
                }
                assert!(p.overlaps(&s), "{kind} d={d}");
            }
        }
    }

    #[test]
    fn more_primes_raise_the_value() {
        let sv = sieve();
        for d in 2..=6 {
            for kind in [DensityKind::Theta, DensityKind::Rho] {
                let a: DensityEstimate<Real> =
                    euler_product(kind, d, Truncation::PrimeCount(1000), &sv).unwrap();
                let b: DensityEstimate<Real> =
                    euler_product(kind, d, Truncation::PrimeCount(10_000), &sv).unwrap();
                assert!(b.value > a.value);
                assert!(b.width() < a.width());
            }
        }
    }

    #[test]
    fn ordering_across_degrees_and_kinds() {
        let sv = sieve();
        let t = Truncation::PrimeCount(DEFAULT_PRIME_COUNT);
        let mut prev: Option<(Real, Real)> = None;
        for d in 2..=12 {
            let th = theta_product::<Real>(d, t, &sv).unwrap().value;
            let rh = rho_product::<Real>(d, t, &sv).unwrap().value;
            assert!(rh < th);
            if let Some((pt, pr)) = prev {
                assert!(th < pt && rh < pr);
            }
            prev = Some((th, rh));
        }
    }

    #[test]
    fn asymptotic_closed_forms() {
        assert_eq!(
            asymptotic_main::<Rational>(DensityKind::Theta, 10).unwrap(),
            q(1, 2048)
        );
        assert_eq!(
            asymptotic_main::<Rational>(DensityKind::Rho, 2).unwrap(),
            q(1, 16)
        );
        assert_eq!(
            asymptotic_main::<Rational>(DensityKind::Theta, 2).unwrap(),
            q(1, 8)
        );
        assert_eq!(
            refined_asymptotic_theta::<Rational>(2).unwrap(),
            q(1, 8) + q(2, 27)
        );
        assert_eq!(
            refined_asymptotic_theta::<Rational>(4).unwrap(),
            q(1, 32) + q(2, 243)
        );
        assert_eq!(
            refined_asymptotic_theta::<Rational>(10).unwrap(),
            q(1, 2048) + q(2, 177_147)
        );
        assert!(asymptotic_main::<f64>(DensityKind::Theta, 1).is_err());
        assert!(refined_asymptotic_theta::<f64>(1).is_err());
    }

    #[test]
    fn refined_form_is_the_first_two_series_terms() {
        let sv = sieve();
        for d in 2..=12 {
            let partial: DensityEstimate<Rational> = theta_series(d, 3, &sv).unwrap();
            assert_eq!(
                partial.value,
                refined_asymptotic_theta::<Rational>(d).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let sv = ArithSieve::new(1000).unwrap();
        assert!(matches!(
            theta_product::<f64>(1, Truncation::PrimeCount(5), &sv),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            theta_product::<f64>(2, Truncation::SeriesLimit(5), &sv),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            theta_product::<f64>(2, Truncation::PrimeCount(0), &sv),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            theta_product::<f64>(2, Truncation::PrimeCount(10_000), &sv),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            theta_product::<f64>(2, Truncation::PrimeLimit(1001), &sv),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            theta_series::<f64>(2, 1001, &sv),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            theta_series::<f64>(2, 0, &sv),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn prime_bound_covers_the_tenthousandth_prime() {
        let sv = sieve();
        for k in [1, 5, 6, 100, 10_000, 17_000] {
            assert!(nth_prime_upper_bound(k) >= sv.primes()[k - 1], "k = {k}");
        }
    }
}
