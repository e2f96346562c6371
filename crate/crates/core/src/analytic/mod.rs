//! Real-axis analytic machinery: ζ, Dirichlet characters and L-functions,
//! Euler products over progressions, and the density constants and
//! Delange-type predictions attached to exact counts.
//!
//! Everything is evaluated at real s only; double precision throughout.

mod characters;
mod euler;
mod lfunction;
mod special;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithError, CongruenceSelector};

pub use characters::{characters_mod, DirichletCharacter, RationalAngle};
pub use euler::{c_a_estimate, constant_c, landau_ramanujan_b, p2, progression_euler_product};
pub use lfunction::{dirichlet_l, l_chi1_exact};

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("s must be greater than 1, got {0}")]
    SBelowOne(f64),
    #[error("divergent product: s = {s}, exponent power = {k}")]
    DivergentProduct { s: f64, k: u32 },
    #[error("tolerance {got} below the supported floor {floor}")]
    ToleranceTooTight { got: f64, floor: f64 },
    #[error("argument must exceed {floor}, got {got}")]
    ArgumentTooSmall { got: f64, floor: f64 },
    #[error("invalid asymptotic law: {0}")]
    InvalidLaw(&'static str),
    #[error("selector is degenerate (ℓ = φ(m)); use the lattice-point asymptotic")]
    DegenerateSelector,
    #[error("extrapolation did not converge: best value {value}, error estimate {error_estimate}")]
    EstimationFailed { value: f64, error_estimate: f64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductMethod {
    Truncated,
    Accelerated,
    ClosedForm,
    Extrapolated,
}

/// Numeric value of a truncated or accelerated Euler product together with
/// how it was obtained and an estimate of the absolute truncation error.
#[derive(Debug, Clone, Serialize)]
pub struct EulerProductResult {
    pub value: f64,
    pub method: ProductMethod,
    pub prime_limit: Option<u64>,
    pub tolerance: Option<f64>,
    pub tail_bound: f64,
}

/// ζ(s) for real s > 1, absolute error ≤ 1e−12.
pub fn zeta_real(s: f64) -> Result<f64, AnalyticError> {
    if !(s > 1.0) {
        return Err(AnalyticError::SBelowOne(s));
    }
    Ok(special::zeta_unchecked(s))
}

/// A counting law `count(x) ≈ a₁/Γ(ρ) · x·(log x)^(ρ−1)`, the shape produced
/// by Delange's Tauberian theorem from a `(s−1)^(−ρ)` singularity.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticLaw {
    rho: f64,
    a1: f64,
    description: String,
}

impl AsymptoticLaw {
    pub fn new(rho: f64, a1: f64, description: impl Into<String>) -> Result<Self, AnalyticError> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(AnalyticError::InvalidLaw("rho must be a positive real"));
        }
        if !(a1 > 0.0) || !a1.is_finite() {
            return Err(AnalyticError::InvalidLaw("a1 must be positive"));
        }
        Ok(AsymptoticLaw {
            rho,
            a1,
            description: description.into(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

/// Leading term `a₁/Γ(ρ) · x·(log x)^(ρ−1)` of the law at `x > 1`.
pub fn delange_leading_term(law: &AsymptoticLaw, x: f64) -> Result<f64, AnalyticError> {
    if !(x > 1.0) {
        return Err(AnalyticError::ArgumentTooSmall { got: x, floor: 1.0 });
    }
    Ok(law.a1 / special::gamma(law.rho) * x * x.ln().powf(law.rho - 1.0))
}

/// The constant and log-exponent of a selector's predicted counting law
/// `predicted(n) = coefficient · n / (log n)^(ℓ/φ(m))`, so the (expensive)
/// constants are computed once per selector rather than once per checkpoint.
#[derive(Debug, Clone)]
pub struct PredictionModel {
    coefficient: f64,
    log_exponent: f64,
}

impl PredictionModel {
    /// Assembles the Delange coefficient `∏_{a∈A} c_a / Γ(1 − ℓ/φ(m))` and,
    /// for square-free selectors, the extra factor `∏_{p ∉ A+mZ}(1 − p^(−2))`,
    /// computed as `ζ(2)^(−1)` divided by the product over the forbidden
    /// classes.
    ///
    /// The `1/Γ(ρ)` normalization comes from the Tauberian step: the counting
    /// function of a set whose Dirichlet series has a `(s−1)^(−ρ)` singularity
    /// with leading coefficient `a(1) = ∏ c_a` grows like
    /// `a(1)/Γ(ρ)·n(log n)^(ρ−1)`. For the cube-permuting set this reproduces
    /// the closed-form constant `C` of [`constant_c`] (the two routes are
    /// compared in the tests), and for ℓ = 0 it degenerates to Γ(1) = 1.
    pub fn for_selector(sel: &CongruenceSelector) -> Result<Self, AnalyticError> {
        if sel.is_degenerate() {
            return Err(AnalyticError::DegenerateSelector);
        }
        let m = sel.modulus();
        let mut coefficient = 1.0;
        for &a in sel.forbidden() {
            coefficient *= c_a_estimate(m, a, 1e-4)?.value;
        }
        if sel.squarefree_only() {
            let mut forbidden_classes = 1.0;
            for &a in sel.forbidden() {
                forbidden_classes *= progression_euler_product(m, a, 1.0, 2, 1_000_000)?.value;
            }
            coefficient /= special::zeta_unchecked(2.0) * forbidden_classes;
        }
        let ell = sel.ell();
        if ell > 0 {
            let rho = 1.0 - ell as f64 / sel.totient() as f64;
            coefficient /= special::gamma(rho);
        }
        Ok(PredictionModel {
            coefficient,
            log_exponent: sel.ell() as f64 / sel.totient() as f64,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn log_exponent(&self) -> f64 {
        self.log_exponent
    }

    pub fn predict(&self, n: f64) -> Result<f64, AnalyticError> {
        if !(n > std::f64::consts::E) {
            return Err(AnalyticError::ArgumentTooSmall {
                got: n,
                floor: std::f64::consts::E,
            });
        }
        Ok(self.coefficient * n / n.ln().powf(self.log_exponent))
    }
}

/// Predicted `|members ≤ n|` for a non-degenerate selector; see
/// [`PredictionModel`] for the constants involved.
pub fn predicted_count(sel: &CongruenceSelector, n: f64) -> Result<f64, AnalyticError> {
    PredictionModel::for_selector(sel)?.predict(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;
    use num_complex::Complex64;
    use std::f64::consts::{E, PI};

    #[test]
    fn zeta_real_domain_and_values() {
        assert!(zeta_real(1.0).is_err());
        assert!(zeta_real(0.3).is_err());
        assert!((zeta_real(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta_real(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonality_of_characters_up_to_50() {
        // (1/φ(m))·Σ_χ χ̄(a)·χ(x) = [x ≡ a], exactly (tolerance 1e−12)
        for m in 1..=50u64 {
            let chars = characters_mod(m);
            let phi = chars.len() as f64;
            for a in 1..=m {
                if gcd(a, m) != 1 {
                    continue;
                }
                for x in 1..=m {
                    if gcd(x, m) != 1 {
                        continue;
                    }
                    let mut sum = Complex64::new(0.0, 0.0);
                    for chi in &chars {
                        sum += chi.eval_conj(a) * chi.eval(x);
                    }
                    sum /= phi;
                    let expected = if a == x { 1.0 } else { 0.0 };
                    assert!(
                        (sum.re - expected).abs() < 1e-12 && sum.im.abs() < 1e-12,
                        "m={m} a={a} x={x}: got {sum}"
                    );
                }
            }
        }
    }

    #[test]
    fn euler_factorization_of_zeta_mod_3() {
        // ζ(s)·(1−3^(−s))·∏_{p≡1}(1−p^(−s))·∏_{p≡2}(1−p^(−s)) → 1
        for s in [2.0, 3.0, 4.0] {
            let x = 1_000_000;
            let c1 = progression_euler_product(3, 1, s, 1, x).unwrap();
            let c2 = progression_euler_product(3, 2, s, 1, x).unwrap();
            let value = zeta_real(s).unwrap() * (1.0 - 3f64.powf(-s)) * c1.value * c2.value;
            let budget = c1.tail_bound + c2.tail_bound + 1e-10;
            assert!((value - 1.0).abs() <= budget, "s={s}: {value}");
        }
    }

    #[test]
    fn delange_term_reference_points() {
        let law = AsymptoticLaw::new(1.0, 1.0, "linear").unwrap();
        assert!((delange_leading_term(&law, E).unwrap() - E).abs() < 1e-12);
        let law = AsymptoticLaw::new(0.5, PI.sqrt(), "sqrt-log").unwrap();
        assert!((delange_leading_term(&law, E).unwrap() - E).abs() < 1e-10);
        assert!(delange_leading_term(&law, 1.0).is_err());
        assert!(AsymptoticLaw::new(0.0, 1.0, "bad").is_err());
        assert!(AsymptoticLaw::new(0.5, 0.0, "bad").is_err());
    }

    #[test]
    fn prediction_for_cube_permuting_set_matches_constant_c() {
        let w = CongruenceSelector::w();
        let model = PredictionModel::for_selector(&w).unwrap();
        let c = constant_c().unwrap();
        assert!((model.log_exponent() - 0.5).abs() < 1e-15);
        assert!(
            (model.coefficient() - c.value).abs() < 2e-3,
            "assembled {} vs closed form {}",
            model.coefficient(),
            c.value
        );
        let n = 1e8;
        let predicted = model.predict(n).unwrap();
        let direct = c.value * n / n.ln().sqrt();
        assert!((predicted / direct - 1.0).abs() < 3e-3);
        assert!((predicted - 1.548e7).abs() < 0.01e7);
    }

    #[test]
    fn v_to_w_prediction_ratio_is_squarefree_factor() {
        let v = PredictionModel::for_selector(&CongruenceSelector::v()).unwrap();
        let w = PredictionModel::for_selector(&CongruenceSelector::w()).unwrap();
        for n in [1e6, 1e12] {
            let ratio = v.predict(n).unwrap() / w.predict(n).unwrap();
            assert!((ratio - 1.0 / 0.6285).abs() < 2e-3, "ratio {ratio}");
        }
    }

    #[test]
    fn squarefree_prediction_is_density_times_n() {
        let q = PredictionModel::for_selector(&CongruenceSelector::q()).unwrap();
        assert!((q.log_exponent() - 0.0).abs() < 1e-15);
        let predicted = q.predict(1e6).unwrap();
        assert!((predicted / 1e6 - 6.0 / (PI * PI)).abs() < 1e-4);
    }

    #[test]
    fn degenerate_selector_has_no_prediction() {
        let pow2 = CongruenceSelector::new(2, [1], false).unwrap();
        assert!(matches!(
            PredictionModel::for_selector(&pow2),
            Err(AnalyticError::DegenerateSelector)
        ));
    }

    #[test]
    fn odd_numbers_prediction() {
        // m = 2, A = {2}: forbidden class contains only the prime 2, so the
        // members are the odd numbers plus 1; c₂ = 1 − 1/2 and no log factor.
        let odds = CongruenceSelector::new(2, [2], false).unwrap();
        let model = PredictionModel::for_selector(&odds).unwrap();
        assert!((model.coefficient() - 0.5).abs() < 1e-12);
        assert!((model.predict(1e6).unwrap() - 5e5).abs() < 1.0);
    }
}
