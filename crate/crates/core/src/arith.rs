//! Exact integer arithmetic on the 64-bit range.
//!
//! Everything here is deterministic: primality is a fixed-base Miller–Rabin
//! battery that is exact for all `u64`, and factorization combines trial
//! division with Brent's cycle-finding rho using a fixed parameter sequence.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("argument must be a positive integer")]
    ZeroOperand,
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
}

/// A positive integer together with its full prime factorization,
/// `n = ∏ pᵢ^eᵢ` with the `pᵢ` strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn value(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs with primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn prime_divisors(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// p-adic valuation ν_p(n).
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

/// Overflow-safe `(a * b) mod m` for 64-bit operands.
#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Overflow-safe `base^exp mod m`; `m ≥ 1`.
pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
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

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Deterministic Miller–Rabin, exact on the whole `u64` range
/// (the 12-prime base set covers n < 3.3·10²⁴).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut sieve = vec![true; 1024];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..32 {
            if sieve[i] {
                for j in (i * i..1024).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        (0..1024).filter(|&i| sieve[i]).map(|i| i as u64).collect()
    })
}

/// Brent's variant of Pollard rho; `n` must be odd, composite and not a prime
/// power of a trial prime. The parameter `c` walks 1, 2, 3, … so the result is
/// deterministic.
fn brent_rho(n: u64) -> u64 {
    for c in 1..64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut cycle = 2u64;
        let mut len = 1u64;
        let mut saved = x;
        let mut product = 1u64;
        let mut since_check = 0;
        loop {
            x = f(x);
            len += 1;
            let diff = x.abs_diff(cycle);
            if diff == 0 {
                break; // cycle closed without a factor; try next c
            }
            product = mul_mod(product, diff, n);
            since_check += 1;
            if since_check == 64 {
                let g = gcd(product, n);
                if g > 1 && g < n {
                    return g;
                }
                if g == n {
                    // overshoot: rewind and test one step at a time
                    let mut y = saved;
                    loop {
                        y = f(y);
                        let g = gcd(y.abs_diff(cycle), n);
                        if g > 1 {
                            if g < n {
                                return g;
                            }
                            break;
                        }
                    }
                    break;
                }
                saved = x;
                since_check = 0;
            }
            if len.is_power_of_two() {
                cycle = x;
                let g = gcd(product, n);
                if g > 1 && g < n {
                    return g;
                }
                product = 1;
                saved = x;
                since_check = 0;
            }
        }
    }
    unreachable!("rho exhausted parameters on {n}")
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = brent_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Full prime factorization of `n ≥ 1`. `factorize(1)` has an empty factor list.
pub fn factorize(n: u64) -> Result<FactoredInteger, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroOperand);
    }
    let mut rest = n;
    let mut primes = Vec::new();
    for &p in trial_primes() {
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
    }
    factor_into(rest, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    debug_assert_eq!(
        factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product::<u64>(),
        n
    );
    Ok(FactoredInteger { n, factors })
}

/// Euler's totient φ(m) = m·∏_{p|m}(1 − 1/p).
pub fn euler_totient(m: u64) -> Result<u64, ArithError> {
    let f = factorize(m)?;
    Ok(f.factors()
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product())
}

/// True iff no square > 1 divides `n`.
pub fn is_squarefree(n: u64) -> Result<bool, ArithError> {
    Ok(factorize(n)?.is_squarefree())
}

/// Legendre symbol (a|p) ∈ {−1, 0, +1} for an odd prime p, by Euler's
/// criterion `a^((p−1)/2) mod p`.
pub fn legendre(a: i64, p: u64) -> Result<i8, ArithError> {
    if p < 3 || !is_prime(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    let a_mod = a.rem_euclid(p as i64) as u64;
    if a_mod == 0 {
        return Ok(0);
    }
    let r = pow_mod(a_mod, (p - 1) / 2, p);
    if r == 1 {
        Ok(1)
    } else if r == p - 1 {
        Ok(-1)
    } else {
        unreachable!("Euler criterion returned {r} for prime {p}")
    }
}

/// Brute-force check that `x ↦ x^k` permutes `Z/nZ`.
///
/// Since the domain is finite, surjectivity and injectivity coincide, so the
/// map is a bijection iff the k-th powers hit all `n` residues. The scan exits
/// early on the first collision, which makes rejections cheap even for large
/// prime powers. Memory is one bit per residue; intended for `n` up to ~10⁸.
pub fn power_map_is_bijection(n: u64, k: u32) -> Result<bool, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroOperand);
    }
    if k == 0 {
        return Err(ArithError::ZeroExponent);
    }
    if n == 1 || k == 1 {
        return Ok(true);
    }
    // products of two residues stay below 2^64 whenever n < 2^32
    let power: fn(u64, u32, u64) -> u64 = if n < (1 << 32) {
        |x, k, n| {
            let mut acc = 1u64;
            let mut base = x;
            let mut k = k;
            while k > 0 {
                if k & 1 == 1 {
                    acc = acc * base % n;
                }
                base = base * base % n;
                k >>= 1;
            }
            acc
        }
    } else {
        |x, k, n| pow_mod(x, k as u64, n)
    };
    let mut seen = vec![0u64; (n as usize + 63) / 64];
    for x in 0..n {
        let y = power(x, k, n);
        let (w, b) = ((y / 64) as usize, y % 64);
        if seen[w] >> b & 1 == 1 {
            return Ok(false);
        }
        seen[w] |= 1 << b;
    }
    Ok(true)
}

/// Defines the set `I_m(A)` of positive integers none of whose prime factors
/// lies in a forbidden residue class `a mod m` for `a ∈ A`, optionally
/// intersected with the square-free integers.
///
/// Residues are stored reduced to `{1, …, m}`: inputs are taken mod `m` and a
/// residue of 0 is recorded as `m`. `1` belongs to every such set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceSelector {
    modulus: u64,
    forbidden: BTreeSet<u64>,
    squarefree_only: bool,
}

impl CongruenceSelector {
    pub fn new(
        modulus: u64,
        forbidden: impl IntoIterator<Item = u64>,
        squarefree_only: bool,
    ) -> Result<Self, ArithError> {
        if modulus == 0 {
            return Err(ArithError::ZeroModulus);
        }
        let forbidden = forbidden
            .into_iter()
            .map(|r| {
                let r = r % modulus;
                if r == 0 {
                    modulus
                } else {
                    r
                }
            })
            .collect();
        Ok(CongruenceSelector {
            modulus,
            forbidden,
            squarefree_only,
        })
    }

    /// The set W: square-free, no prime factor ≡ 1 (mod 3). These are exactly
    /// the `n` for which `x ↦ x³` permutes `Z/nZ` (OEIS A074243).
    pub fn w() -> Self {
        Self::new(3, [1], true).unwrap()
    }

    /// The set V: no prime factor ≡ 1 (mod 3), square factors allowed.
    pub fn v() -> Self {
        Self::new(3, [1], false).unwrap()
    }

    /// The set Q of square-free integers.
    pub fn q() -> Self {
        Self::new(1, [], true).unwrap()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn forbidden(&self) -> &BTreeSet<u64> {
        &self.forbidden
    }

    pub fn squarefree_only(&self) -> bool {
        self.squarefree_only
    }

    /// ℓ = number of forbidden residues coprime to the modulus.
    pub fn ell(&self) -> u64 {
        self.forbidden
            .iter()
            .filter(|&&a| gcd(a, self.modulus) == 1)
            .count() as u64
    }

    pub fn totient(&self) -> u64 {
        euler_totient(self.modulus).expect("modulus ≥ 1")
    }

    /// The degenerate regime ℓ = φ(m): every coprime class is forbidden and
    /// the members are exactly the products of a fixed finite prime set.
    pub fn is_degenerate(&self) -> bool {
        self.ell() == self.totient()
    }

    /// In the degenerate regime, the primes that may still divide a member:
    /// the prime divisors of `m` whose class is not forbidden.
    pub fn degenerate_primes(&self) -> Vec<u64> {
        factorize(self.modulus)
            .expect("modulus ≥ 1")
            .prime_divisors()
            .filter(|&p| !self.forbids_prime(p))
            .collect()
    }

    /// Whether a prime in this residue class may not divide a member.
    pub fn forbids_prime(&self, p: u64) -> bool {
        let r = p % self.modulus;
        let r = if r == 0 { self.modulus } else { r };
        self.forbidden.contains(&r)
    }
}

/// Membership predicate for `I_m(A)` (∩ square-free when the selector says so).
pub fn is_member(n: u64, sel: &CongruenceSelector) -> Result<bool, ArithError> {
    let f = factorize(n)?;
    if sel.squarefree_only() && !f.is_squarefree() {
        return Ok(false);
    }
    let ok = f.prime_divisors().all(|p| !sel.forbids_prime(p));
    Ok(ok)
}

/// Exhaustively compares the brute-force cube-bijection test against the
/// square-free/no-factor-≡1(3) predicate for all `n ≤ limit`, returning the
/// first mismatch if any.
pub fn first_cube_mismatch(limit: u64) -> Result<Option<u64>, ArithError> {
    let w = CongruenceSelector::w();
    for n in 1..=limit {
        if power_map_is_bijection(n, 3)? != is_member(n, &w)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorize_known_values() {
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(10).unwrap().factors(), &[(2, 1), (5, 1)]);
        assert_eq!(factorize(0).unwrap_err(), ArithError::ZeroOperand);
    }

    #[test]
    fn factorize_large_semiprime() {
        // both factors well above the trial-division bound
        let p = 2_147_483_647u64; // 2^31 - 1
        let q = 2_147_483_629u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors(), &[(q, 1), (p, 1)]);
    }

    #[test]
    fn valuation_reads_exponents() {
        let f = factorize(360).unwrap();
        assert_eq!(f.valuation(2), 3);
        assert_eq!(f.valuation(5), 1);
        assert_eq!(f.valuation(7), 0);
    }

    #[test]
    fn totient_known_values() {
        assert_eq!(euler_totient(1).unwrap(), 1);
        assert_eq!(euler_totient(3).unwrap(), 2);
        assert_eq!(euler_totient(12).unwrap(), 4);
    }

    #[test]
    fn squarefree_known_values() {
        assert!(is_squarefree(1).unwrap());
        assert!(!is_squarefree(12).unwrap());
        assert!(is_squarefree(30).unwrap());
    }

    #[test]
    fn legendre_known_values() {
        assert_eq!(legendre(3, 3).unwrap(), 0);
        assert_eq!(legendre(-3, 7).unwrap(), 1);
        assert_eq!(legendre(-3, 5).unwrap(), -1);
        assert!(legendre(1, 2).is_err());
        assert!(legendre(1, 9).is_err());
    }

    #[test]
    fn legendre_minus_three_detects_class_mod_3() {
        // (−3|p) = −1  ⟺  p ≡ 2 (mod 3), for odd primes p ≠ 3
        for p in (5..10_000u64).filter(|&p| is_prime(p)) {
            if p == 3 {
                continue;
            }
            let symbol = legendre(-3, p).unwrap();
            assert_eq!(symbol == -1, p % 3 == 2, "p = {p}");
        }
    }

    #[test]
    fn bijection_known_values() {
        assert!(!power_map_is_bijection(7, 3).unwrap());
        assert!(power_map_is_bijection(10, 3).unwrap());
        for n in 1..50 {
            assert!(power_map_is_bijection(n, 1).unwrap());
        }
        assert!(power_map_is_bijection(1, 3).unwrap());
    }

    #[test]
    fn bijection_fails_on_prime_powers() {
        for p in (2..=100u64).filter(|&p| is_prime(p)) {
            for alpha in 2..=4u32 {
                let n = p.pow(alpha);
                assert!(
                    !power_map_is_bijection(n, 3).unwrap(),
                    "x³ should not permute Z/{p}^{alpha}Z"
                );
            }
        }
    }

    #[test]
    fn member_known_values() {
        let w = CongruenceSelector::w();
        let v = CongruenceSelector::v();
        assert!(is_member(22, &w).unwrap());
        assert!(!is_member(7, &w).unwrap());
        assert!(!is_member(49, &v).unwrap());
        let no_two_class = CongruenceSelector::new(3, [2], false).unwrap();
        assert!(is_member(49, &no_two_class).unwrap()); // 7 ≡ 1, not forbidden
        assert!(!is_member(35, &no_two_class).unwrap()); // 5 ≡ 2, forbidden
        let none = CongruenceSelector::new(3, [], false).unwrap();
        assert!(is_member(49, &none).unwrap());
        assert!(is_member(1, &w).unwrap());
    }

    #[test]
    fn selector_normalizes_residues() {
        let a = CongruenceSelector::new(3, [1], true).unwrap();
        let b = CongruenceSelector::new(3, [4], true).unwrap();
        assert_eq!(a, b);
        let zero = CongruenceSelector::new(3, [0], false).unwrap();
        assert_eq!(zero.forbidden().iter().copied().collect::<Vec<_>>(), [3]);
        assert!(zero.forbids_prime(3));
        assert!(!zero.forbids_prime(7));
    }

    #[test]
    fn selector_degeneracy() {
        let w = CongruenceSelector::w();
        assert_eq!(w.ell(), 1);
        assert_eq!(w.totient(), 2);
        assert!(!w.is_degenerate());

        let pow2 = CongruenceSelector::new(2, [1], false).unwrap();
        assert!(pow2.is_degenerate());
        assert_eq!(pow2.degenerate_primes(), [2]);

        let threes = CongruenceSelector::new(3, [1, 2], true).unwrap();
        assert!(threes.is_degenerate());
        assert_eq!(threes.degenerate_primes(), [3]);

        let trivial = CongruenceSelector::new(1, [1], false).unwrap();
        assert!(trivial.is_degenerate());
        assert!(trivial.degenerate_primes().is_empty());
    }

    #[test]
    fn cube_equivalence_small_range() {
        // the full desk-scale run lives in the acceptance suite
        assert_eq!(first_cube_mismatch(10_000).unwrap(), None);
    }

    #[test]
    fn membership_is_multiplicative_on_coprime_pairs() {
        let selectors = [
            CongruenceSelector::w(),
            CongruenceSelector::v(),
            CongruenceSelector::q(),
            CongruenceSelector::new(4, [1], true).unwrap(),
        ];
        for a in 1..100u64 {
            for b in 1..100u64 {
                if gcd(a, b) != 1 || a * b > 10_000 {
                    continue;
                }
                for sel in &selectors {
                    assert_eq!(
                        is_member(a * b, sel).unwrap(),
                        is_member(a, sel).unwrap() && is_member(b, sel).unwrap(),
                        "a = {a}, b = {b}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn factorize_round_trips(n in 1u64..(1u64 << 63)) {
            let f = factorize(n).unwrap();
            let product: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(product, n);
            for &(p, _) in f.factors() {
                prop_assert!(is_prime(p));
            }
            for w in f.factors().windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }

        #[test]
        fn pow_mod_matches_u128(b in 0u64..1000, e in 0u64..1000, m in 1u64..1000) {
            let expected = (0..e).fold(1u128, |acc, _| acc * b as u128 % m as u128) as u64;
            prop_assert_eq!(pow_mod(b, e, m), expected);
        }
    }
}
