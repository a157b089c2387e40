//! Smallest-prime-factor sieve and the multiplicative functions built on it.

use crate::error::{Error, Result};

/// Largest limit [`ArithSieve::new`] accepts (4 bytes per entry).
pub const DEFAULT_SIEVE_BUDGET: u64 = 100_000_000;

/// Default sieve size used by the command-line tool.
pub const DEFAULT_SIEVE_LIMIT: u64 = 10_000_000;

/// Smallest-prime-factor table for `2..=limit` plus the primes it contains.
///
/// Immutable once built, so a single sieve can be shared across threads.
#[derive(Debug, Clone)]
pub struct ArithSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u64>,
}

/// Prime factorization as `(prime, exponent)` pairs with increasing primes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.pairs.iter().all(|&(_, e)| e == 1)
    }

    /// Product of `p^e` over all pairs.
    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn omega(&self) -> u32 {
        self.pairs.len() as u32
    }

    pub fn mobius(&self) -> i8 {
        if !self.is_squarefree() {
            0
        } else if self.pairs.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.pairs
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// Number of divisors.
    pub fn tau(&self) -> u64 {
        self.pairs.iter().map(|&(_, e)| u64::from(e) + 1).product()
    }
}

impl ArithSieve {
    /// Builds a sieve for `2..=limit`, refusing limits above
    /// [`DEFAULT_SIEVE_BUDGET`].
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, DEFAULT_SIEVE_BUDGET)
    }

    pub fn with_budget(limit: u64, max_limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        if limit > max_limit || limit > u64::from(u32::MAX) {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds the memory budget of {max_limit} entries"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        // Linear sieve: every composite is struck exactly once, by its
        // smallest prime factor.
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i] as u64;
            for &p in &primes {
                if p > si || (i as u64) * p > limit {
                    break;
                }
                spf[i * p as usize] = p as u32;
            }
        }
        Ok(ArithSieve { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes `<= limit`, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Smallest prime factor of `n` for `2 <= n <= limit`.
    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(Error::OutOfRange {
                value: n,
                limit: self.limit,
            });
        }
        Ok(u64::from(self.spf[n as usize]))
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n == 1 {
            return Ok(false);
        }
        Ok(self.smallest_prime_factor(n)? == n)
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            Err(Error::OutOfRange {
                value: n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        self.check(n)?;
        let mut pairs: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            pairs.push((p as u64, e));
        }
        Ok(Factorization { pairs })
    }

    pub fn mobius(&self, n: u64) -> Result<i8> {
        Ok(self.factorize(n)?.mobius())
    }

    pub fn euler_phi(&self, n: u64) -> Result<u64> {
        Ok(self.factorize(n)?.euler_phi())
    }

    pub fn omega(&self, n: u64) -> Result<u32> {
        Ok(self.factorize(n)?.omega())
    }

    pub fn radical(&self, n: u64) -> Result<u64> {
        Ok(self.factorize(n)?.radical())
    }

    pub fn tau(&self, n: u64) -> Result<u64> {
        Ok(self.factorize(n)?.tau())
    }

    /// The distinct primes of a square-free `n`, or `None` when some prime
    /// square divides `n`. Allocation-free; used in the hot counting loops.
    pub(crate) fn squarefree_primes(&self, n: u64) -> Result<Option<PrimeSet>> {
        self.check(n)?;
        let mut set = PrimeSet::default();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            m /= p;
            if m.is_multiple_of(p) {
                return Ok(None);
            }
            set.push(p as u64);
        }
        Ok(Some(set))
    }

    /// Distinct primes of `n`, i.e. the factorization of `rad(n)`.
    pub(crate) fn distinct_primes(&self, n: u64) -> Result<PrimeSet> {
        self.check(n)?;
        let mut set = PrimeSet::default();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            while m.is_multiple_of(p) {
                m /= p;
            }
            set.push(p as u64);
        }
        Ok(set)
    }

    /// Number of integers `a` with `|a| <= h` and `gcd(a, s) = 1`.
    ///
    /// Exact: sums `mu(e) * (2*floor(h/e) + 1)` over the divisors `e` of
    /// `rad(s)`. Since `gcd(0, s) = s`, zero is counted only for `s = 1`.
    pub fn phi_bounded(&self, s: u64, h: u64) -> Result<u64> {
        let primes = self.distinct_primes(s)?;
        Ok(phi_bounded_from_primes(primes.as_slice(), h))
    }
}

pub(crate) fn phi_bounded_from_primes(primes: &[u64], h: u64) -> u64 {
    // Sum_{e | rad(s)} mu(e) * (2*floor(h/e) + 1)
    //   = [s = 1] + 2 * Sum_{e | rad(s), e <= h} mu(e) * floor(h/e),
    // because the mu(e) sum to zero over the divisors of rad(s) > 1. Primes are
    // ascending, so a branch can stop at the first prime pushing e past h.
    let sum = signed_quotient_sum(primes, 1, h);
    let total = 2 * sum + i128::from(primes.is_empty());
    debug_assert!(total >= 0);
    total as u64
}

/// `Sum mu(m) * floor(h / (e*m))` over square-free `m` built from `primes`
/// with `e*m <= h`.
fn signed_quotient_sum(primes: &[u64], e: u64, h: u64) -> i128 {
    let mut sum = i128::from(h / e);
    for (i, &p) in primes.iter().enumerate() {
        match e.checked_mul(p) {
            Some(next) if next <= h => sum -= signed_quotient_sum(&primes[i + 1..], next, h),
            _ => break,
        }
    }
    sum
}

/// Stack-allocated list of the distinct primes of an integer below 2^64.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PrimeSet {
    len: usize,
    items: [u64; 16],
}

impl PrimeSet {
    fn push(&mut self, p: u64) {
        self.items[self.len] = p;
        self.len += 1;
    }

    pub(crate) fn as_slice(&self) -> &[u64] {
        &self.items[..self.len]
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn sieve(limit: u64) -> ArithSieve {
        ArithSieve::new(limit).unwrap()
    }

    fn naive_phi_bounded(s: u64, h: u64) -> u64 {
        let h = h as i64;
        (-h..=h).filter(|a| a.unsigned_abs().gcd(&s) == 1).count() as u64
    }

    #[test]
    fn spf_table_for_ten() {
        let sv = sieve(10);
        let spf: Vec<u64> = (2..=10)
            .map(|n| sv.smallest_prime_factor(n).unwrap())
            .collect();
        assert_eq!(spf, vec![2, 3, 2, 5, 2, 7, 2, 3, 2]);
        assert_eq!(sv.primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve(2).primes(), &[2]);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(matches!(ArithSieve::new(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(ArithSieve::new(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            ArithSieve::with_budget(1001, 1000),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            ArithSieve::new(DEFAULT_SIEVE_BUDGET + 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn prime_count_to_a_million() {
        // independent Eratosthenes over a bool table
        let n = 1_000_000usize;
        let mut composite = vec![false; n + 1];
        let mut count = 0;
        for i in 2..=n {
            if !composite[i] {
                count += 1;
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        assert_eq!(count, 78498);
        assert_eq!(sieve(n as u64).primes().len(), 78498);
    }

    #[test]
    fn sieve_invariants_against_trial_division() {
        let sv = sieve(20_000);
        for n in 2..=20_000u64 {
            let p = sv.smallest_prime_factor(n).unwrap();
            let trial = (2..=n).find(|d| n % d == 0).unwrap();
            assert_eq!(p, trial, "spf({n})");
            assert_eq!(sv.is_prime(n).unwrap(), p == n);
        }
        assert!(sv.primes().windows(2).all(|w| w[0] < w[1]));
        let from_spf: Vec<u64> = (2..=20_000)
            .filter(|&n| sv.smallest_prime_factor(n).unwrap() == n)
            .collect();
        assert_eq!(from_spf, sv.primes());
    }

    #[test]
    fn factorize_examples() {
        let sv = sieve(100);
        assert!(sv.factorize(1).unwrap().pairs().is_empty());
        assert_eq!(sv.factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert_eq!(sv.factorize(97).unwrap().pairs(), &[(97, 1)]);
        assert_eq!(
            sv.factorize(0),
            Err(Error::OutOfRange {
                value: 0,
                limit: 100
            })
        );
        assert_eq!(
            sv.factorize(101),
            Err(Error::OutOfRange {
                value: 101,
                limit: 100
            })
        );
        for n in 1..=100 {
            let f = sv.factorize(n).unwrap();
            assert_eq!(f.value(), n);
            assert!(f.pairs().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn multiplicative_function_examples() {
        let sv = sieve(100);
        assert_eq!(sv.mobius(1).unwrap(), 1);
        assert_eq!(sv.mobius(12).unwrap(), 0);
        assert_eq!(sv.mobius(6).unwrap(), 1);
        assert_eq!(sv.mobius(2).unwrap(), -1);
        assert_eq!(sv.euler_phi(1).unwrap(), 1);
        assert_eq!(sv.euler_phi(7).unwrap(), 6);
        assert_eq!(sv.euler_phi(12).unwrap(), 4);
        assert_eq!(sv.omega(1).unwrap(), 0);
        assert_eq!(sv.omega(12).unwrap(), 2);
        assert_eq!(sv.omega(30).unwrap(), 3);
        assert_eq!(sv.radical(1).unwrap(), 1);
        assert_eq!(sv.radical(12).unwrap(), 6);
        assert_eq!(sv.radical(8).unwrap(), 2);
        assert_eq!(sv.tau(12).unwrap(), 6);
        assert!(sv.mobius(101).is_err());
        assert!(sv.euler_phi(0).is_err());
    }

    #[test]
    fn euler_phi_matches_gcd_count() {
        let sv = sieve(500);
        for n in 1..=500u64 {
            let direct = (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64;
            assert_eq!(sv.euler_phi(n).unwrap(), direct, "phi({n})");
        }
    }

    #[test]
    fn phi_bounded_examples() {
        let sv = sieve(100);
        assert_eq!(sv.phi_bounded(1, 5).unwrap(), 11);
        assert_eq!(sv.phi_bounded(6, 10).unwrap(), 6);
        assert_eq!(sv.phi_bounded(2, 0).unwrap(), 0);
        assert_eq!(sv.phi_bounded(2, 5).unwrap(), 6);
        assert_eq!(sv.phi_bounded(1, 0).unwrap(), 1);
        assert!(sv.phi_bounded(101, 5).is_err());
    }

    #[test]
    fn phi_bounded_matches_enumeration() {
        let sv = sieve(200);
        for s in 1..=200 {
            for h in 0..=200 {
                let got = sv.phi_bounded(s, h).unwrap();
                assert_eq!(got, naive_phi_bounded(s, h), "phi({s}, {h})");
                if s >= 2 {
                    assert_eq!(got % 2, 0, "phi({s}, {h}) odd");
                }
            }
        }
    }

    #[test]
    fn phi_bounded_many_prime_factors() {
        // 2*3*5*7*11*13*17 = 510510, omega = 7
        let sv = sieve(600_000);
        for h in [0, 1, 16, 17, 100, 1000, 510510, 10_000_000] {
            let fast = sv.phi_bounded(510510, h).unwrap();
            // direct inclusion-exclusion over all 128 divisors
            let primes = [2u64, 3, 5, 7, 11, 13, 17];
            let mut slow: i128 = 0;
            for mask in 0u32..128 {
                let e: u64 = (0..7)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| primes[i])
                    .product();
                let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
                slow += sign * (2 * i128::from(h / e) + 1);
            }
            assert_eq!(i128::from(fast), slow, "h = {h}");
        }
    }

    #[test]
    fn mobius_omega_tau_identities() {
        let sv = sieve(10_000);
        for n in 1..=10_000u64 {
            let f = sv.factorize(n).unwrap();
            let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            let abs_mu: u64 = divisors
                .iter()
                .map(|&d| sv.mobius(d).unwrap().unsigned_abs() as u64)
                .sum();
            assert_eq!(abs_mu, 1 << f.omega());
            assert_eq!(divisors.len() as u64, f.tau());
            if n > 1 {
                let mu_sum: i64 = divisors
                    .iter()
                    .map(|&d| i64::from(sv.mobius(d).unwrap()))
                    .sum();
                assert_eq!(mu_sum, 0);
            }
        }
    }

    proptest! {
        #[test]
        fn multiplicative_on_coprime_pairs(m in 1u64..=1000, n in 1u64..=1000) {
            prop_assume!(m.gcd(&n) == 1);
            let sv = sieve(1_000_000);
            prop_assert_eq!(sv.euler_phi(m * n).unwrap(), sv.euler_phi(m).unwrap() * sv.euler_phi(n).unwrap());
            prop_assert_eq!(sv.mobius(m * n).unwrap(), sv.mobius(m).unwrap() * sv.mobius(n).unwrap());
            prop_assert_eq!(sv.radical(m * n).unwrap(), sv.radical(m).unwrap() * sv.radical(n).unwrap());
        }

        #[test]
        fn squarefree_primes_agrees_with_mobius(n in 1u64..=100_000) {
            let sv = sieve(100_000);
            let sq = sv.squarefree_primes(n).unwrap();
            prop_assert_eq!(sq.is_some(), sv.mobius(n).unwrap() != 0);
            if let Some(ps) = sq {
                prop_assert_eq!(ps.len() as u32, sv.omega(n).unwrap());
            }
        }
    }
}
