//! Sampling from the Zeta distribution `P(K = k) = k^(−s)/ζ(s)` and
//! statistical verification of its divisibility structure: `P(d | K) = d^(−s)`,
//! the p-adic valuations are independent shifted geometrics, and membership
//! probabilities for congruence-restricted sets match their Euler products.
//!
//! The generator is pinned to ChaCha8 seeded from a `u64`, so sample streams
//! are identical across platforms and runs.

use rand::distributions::OpenClosed01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{self, AnalyticError};
use crate::arith::{self, CongruenceSelector};

#[derive(Debug, Error)]
pub enum ZetaDistError {
    #[error("s must be greater than 1, got {0}")]
    STooSmall(f64),
    #[error("need at least {floor} samples, got {got}")]
    TooFewSamples { got: u64, floor: u64 },
    #[error("divisor must be positive")]
    ZeroDivisor,
    #[error("valuation targets must name distinct primes")]
    DuplicatePrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
}

/// Seeded sampler for the Zeta distribution with parameter `s > 1`.
///
/// Rejection sampling from the continuous Pareto envelope (Devroye's scheme):
/// the acceptance rate stays bounded away from zero for `s ≥ 1.1`, and the
/// unbounded support is handled exactly.
pub struct ZetaSampler {
    s: f64,
    s_minus_1: f64,
    b: f64,
    rng: ChaCha8Rng,
}

impl ZetaSampler {
    pub fn new(s: f64, seed: u64) -> Result<Self, ZetaDistError> {
        if !(s > 1.0) {
            return Err(ZetaDistError::STooSmall(s));
        }
        Ok(ZetaSampler {
            s,
            s_minus_1: s - 1.0,
            b: 2f64.powf(s - 1.0),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// One draw: a positive integer K with `P(K = k) = k^(−s)/ζ(s)`.
    pub fn sample(&mut self) -> u64 {
        loop {
            let u: f64 = self.rng.sample(OpenClosed01);
            let x = u.powf(-1.0 / self.s_minus_1).floor();
            if x < 1.5 {
                return 1; // envelope mass at 1 is accepted with probability 1
            }
            if !(x <= 9.2e18) {
                continue; // beyond u64; astronomically rare for s > 1.05
            }
            let t = (1.0 + 1.0 / x).powf(self.s_minus_1);
            let v: f64 = self.rng.gen();
            if v * x * (t - 1.0) * self.b <= t * (self.b - 1.0) {
                return x as u64;
            }
        }
    }
}

/// Observed vs expected frequency of one event, with the binomial z-score.
#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub name: String,
    pub sample_count: u64,
    pub observed: f64,
    pub expected: f64,
    pub z_score: f64,
}

impl SampleReport {
    fn from_hits(name: String, hits: u64, samples: u64, expected: f64) -> Self {
        let observed = hits as f64 / samples as f64;
        let variance = expected * (1.0 - expected) / samples as f64;
        let z_score = if variance > 0.0 {
            (observed - expected) / variance.sqrt()
        } else {
            0.0
        };
        SampleReport {
            name,
            sample_count: samples,
            observed,
            expected,
            z_score,
        }
    }
}

/// Frequency of `d | K` against the exact probability `d^(−s)`.
pub fn divisibility_test(
    sampler: &mut ZetaSampler,
    d: u64,
    n_samples: u64,
) -> Result<SampleReport, ZetaDistError> {
    if d == 0 {
        return Err(ZetaDistError::ZeroDivisor);
    }
    if n_samples < 10_000 {
        return Err(ZetaDistError::TooFewSamples {
            got: n_samples,
            floor: 10_000,
        });
    }
    let mut hits = 0u64;
    for _ in 0..n_samples {
        if sampler.sample() % d == 0 {
            hits += 1;
        }
    }
    let expected = (d as f64).powf(-sampler.s);
    Ok(SampleReport::from_hits(
        format!("divisibility[{d}]"),
        hits,
        n_samples,
        expected,
    ))
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Joint and marginal checks of the valuation structure.
///
/// `targets` lists `(p, a_p)` pairs with distinct primes. The first report
/// compares the joint event `∩ {ν_p(K) ≥ a_p}` against `∏ p^(−s·a_p)`
/// (independence of the valuations); one report per prime then checks the
/// shifted-geometric marginal `P(ν_p = a_p) = (1 − p^(−s))·p^(−s·a_p)`.
pub fn valuation_independence_test(
    sampler: &mut ZetaSampler,
    targets: &[(u64, u32)],
    n_samples: u64,
) -> Result<Vec<SampleReport>, ZetaDistError> {
    if n_samples < 10_000 {
        return Err(ZetaDistError::TooFewSamples {
            got: n_samples,
            floor: 10_000,
        });
    }
    for (i, &(p, _)) in targets.iter().enumerate() {
        if !arith::is_prime(p) {
            return Err(ZetaDistError::NotPrime(p));
        }
        if targets[..i].iter().any(|&(q, _)| q == p) {
            return Err(ZetaDistError::DuplicatePrime(p));
        }
    }
    let s = sampler.s;
    let mut joint_hits = 0u64;
    let mut marginal_hits = vec![0u64; targets.len()];
    for _ in 0..n_samples {
        let k = sampler.sample();
        let mut joint = true;
        for (i, &(p, a)) in targets.iter().enumerate() {
            let v = valuation(k, p);
            if v < a {
                joint = false;
            }
            if v == a {
                marginal_hits[i] += 1;
            }
        }
        if joint {
            joint_hits += 1;
        }
    }
    let joint_expected: f64 = targets
        .iter()
        .map(|&(p, a)| (p as f64).powf(-s * a as f64))
        .product();
    let mut reports = vec![SampleReport::from_hits(
        format!(
            "joint[{}]",
            targets
                .iter()
                .map(|(p, a)| format!("v{p}>={a}"))
                .collect::<Vec<_>>()
                .join(",")
        ),
        joint_hits,
        n_samples,
        joint_expected,
    )];
    for (i, &(p, a)) in targets.iter().enumerate() {
        let expected = (1.0 - (p as f64).powf(-s)) * (p as f64).powf(-s * a as f64);
        reports.push(SampleReport::from_hits(
            format!("marginal[v{p}={a}]"),
            marginal_hits[i],
            n_samples,
            expected,
        ));
    }
    Ok(reports)
}

/// Expected membership probability of a selector under the Zeta distribution:
/// `μ_s = ∏_{p forbidden} (1 − p^(−s))`, times `∏_{p allowed} (1 − p^(−2s))`
/// in square-free mode (computed through `ζ(2s)^(−1)` over the complement).
pub fn membership_probability(sel: &CongruenceSelector, s: f64) -> Result<f64, ZetaDistError> {
    const PRIME_LIMIT: u64 = 1_000_000;
    let m = sel.modulus();
    let mut probability = 1.0;
    for &a in sel.forbidden() {
        probability *= analytic::progression_euler_product(m, a, s, 1, PRIME_LIMIT)?.value;
    }
    if sel.squarefree_only() {
        let mut forbidden_sq = 1.0;
        for &a in sel.forbidden() {
            forbidden_sq *= analytic::progression_euler_product(m, a, s, 2, PRIME_LIMIT)?.value;
        }
        probability /= analytic::zeta_real(2.0 * s)? * forbidden_sq;
    }
    Ok(probability)
}

/// Frequency of `K ∈ I_m(A)` (∩ square-free) against the Euler-product value.
pub fn membership_frequency_test(
    sampler: &mut ZetaSampler,
    sel: &CongruenceSelector,
    n_samples: u64,
) -> Result<SampleReport, ZetaDistError> {
    if n_samples < 100_000 {
        return Err(ZetaDistError::TooFewSamples {
            got: n_samples,
            floor: 100_000,
        });
    }
    let expected = membership_probability(sel, sampler.s)?;
    let mut hits = 0u64;
    for _ in 0..n_samples {
        if arith::is_member(sampler.sample(), sel)? {
            hits += 1;
        }
    }
    Ok(SampleReport::from_hits(
        format!(
            "membership[m={},A={:?},squarefree={}]",
            sel.modulus(),
            sel.forbidden(),
            sel.squarefree_only()
        ),
        hits,
        n_samples,
        expected,
    ))
}

/// Frequency of `K = k` against the point mass `k^(−s)/ζ(s)`, for k ≤ k_max.
pub fn point_mass_test(
    sampler: &mut ZetaSampler,
    k_max: u64,
    n_samples: u64,
) -> Result<Vec<SampleReport>, ZetaDistError> {
    if n_samples < 10_000 {
        return Err(ZetaDistError::TooFewSamples {
            got: n_samples,
            floor: 10_000,
        });
    }
    let zeta = analytic::zeta_real(sampler.s)?;
    let mut hits = vec![0u64; k_max as usize];
    for _ in 0..n_samples {
        let k = sampler.sample();
        if k <= k_max {
            hits[(k - 1) as usize] += 1;
        }
    }
    Ok((1..=k_max)
        .map(|k| {
            let expected = (k as f64).powf(-sampler.s) / zeta;
            SampleReport::from_hits(
                format!("pmf[{k}]"),
                hits[(k - 1) as usize],
                n_samples,
                expected,
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u64 = 1_000_000;

    #[test]
    fn construction_domain() {
        assert!(matches!(
            ZetaSampler::new(1.0, 7),
            Err(ZetaDistError::STooSmall(_))
        ));
        assert!(ZetaSampler::new(1.01, 7).is_ok());
    }

    #[test]
    fn identical_seeds_give_identical_streams() {
        let mut a = ZetaSampler::new(2.0, 42).unwrap();
        let mut b = ZetaSampler::new(2.0, 42).unwrap();
        let xs: Vec<u64> = (0..10_000).map(|_| a.sample()).collect();
        let ys: Vec<u64> = (0..10_000).map(|_| b.sample()).collect();
        assert_eq!(xs, ys);
        let mut c = ZetaSampler::new(2.0, 43).unwrap();
        let zs: Vec<u64> = (0..10_000).map(|_| c.sample()).collect();
        assert_ne!(xs, zs);
    }

    #[test]
    fn point_masses_within_four_sigma_at_s2() {
        let mut sampler = ZetaSampler::new(2.0, 1).unwrap();
        for report in point_mass_test(&mut sampler, 10, N).unwrap() {
            assert!(
                report.z_score.abs() <= 4.0,
                "{}: z = {}",
                report.name,
                report.z_score
            );
        }
    }

    #[test]
    fn divisibility_probabilities() {
        let mut sampler = ZetaSampler::new(2.0, 2).unwrap();
        let by_one = divisibility_test(&mut sampler, 1, N / 10).unwrap();
        assert_eq!(by_one.observed, 1.0);
        assert_eq!(by_one.z_score, 0.0);

        let by_two = divisibility_test(&mut sampler, 2, N).unwrap();
        assert!((by_two.expected - 0.25).abs() < 1e-15);
        assert!(by_two.z_score.abs() <= 4.0, "z = {}", by_two.z_score);

        let mut cubic = ZetaSampler::new(3.0, 3).unwrap();
        let by_six = divisibility_test(&mut cubic, 6, N).unwrap();
        assert!((by_six.expected - 1.0 / 216.0).abs() < 1e-15);
        assert!(by_six.z_score.abs() <= 4.0, "z = {}", by_six.z_score);
    }

    #[test]
    fn valuation_joint_and_marginals() {
        let mut sampler = ZetaSampler::new(2.0, 4).unwrap();
        let reports = valuation_independence_test(&mut sampler, &[(2, 1), (3, 1)], N).unwrap();
        assert!((reports[0].expected - 1.0 / 36.0).abs() < 1e-15);
        for r in &reports {
            assert!(r.z_score.abs() <= 4.0, "{}: z = {}", r.name, r.z_score);
        }

        // threshold 0 is the trivial event
        let trivial = valuation_independence_test(&mut sampler, &[(2, 0)], N / 10).unwrap();
        assert_eq!(trivial[0].observed, 1.0);
        assert_eq!(trivial[0].z_score, 0.0);

        // marginal at (p, k) = (5, 1): (1 − 1/25)/25 = 0.0384
        let five = valuation_independence_test(&mut sampler, &[(5, 1)], N).unwrap();
        assert!((five[1].expected - 0.0384).abs() < 1e-12);
        assert!(five[1].z_score.abs() <= 4.0);

        assert!(matches!(
            valuation_independence_test(&mut sampler, &[(4, 1)], N / 10),
            Err(ZetaDistError::NotPrime(4))
        ));
        assert!(matches!(
            valuation_independence_test(&mut sampler, &[(2, 1), (2, 2)], N / 10),
            Err(ZetaDistError::DuplicatePrime(2))
        ));
    }

    #[test]
    fn membership_frequencies_match_euler_products() {
        let mut sampler = ZetaSampler::new(2.0, 5).unwrap();

        let v = membership_frequency_test(&mut sampler, &CongruenceSelector::v(), N).unwrap();
        assert!((v.expected - 0.9668).abs() < 1e-3, "expected {}", v.expected);
        assert!(v.z_score.abs() <= 4.0, "z = {}", v.z_score);

        // square-free with nothing forbidden: ∏(1 − p^(−4)) = 1/ζ(4)
        let q = membership_frequency_test(&mut sampler, &CongruenceSelector::q(), N).unwrap();
        let inv_zeta4 = 1.0 / analytic::zeta_real(4.0).unwrap();
        assert!((q.expected - inv_zeta4).abs() < 1e-6);
        assert!((q.expected - 0.9239).abs() < 1e-4);
        assert!(q.z_score.abs() <= 4.0, "z = {}", q.z_score);

        // nothing forbidden at all
        let all = CongruenceSelector::new(1, [], false).unwrap();
        let trivial = membership_frequency_test(&mut sampler, &all, N / 10).unwrap();
        assert_eq!(trivial.observed, 1.0);
        assert_eq!(trivial.expected, 1.0);
        assert_eq!(trivial.z_score, 0.0);
    }

    #[test]
    fn sample_mean_of_k1_tends_to_one_as_s_grows() {
        let mut sampler = ZetaSampler::new(12.0, 6).unwrap();
        let ones = (0..10_000).filter(|_| sampler.sample() == 1).count();
        assert!(ones >= 9_970, "P(K=1) should approach 1, got {ones}/10000");
    }
}
