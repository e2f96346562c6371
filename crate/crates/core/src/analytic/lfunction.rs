//! Numerical Dirichlet L-functions on the real axis s > 1.

use num_complex::Complex64;

use super::characters::DirichletCharacter;
use super::special::{hurwitz_zeta, zeta_unchecked};
use super::AnalyticError;
use crate::arith::factorize;

/// L(χ, s) = Σ χ(n)/nˢ for real s > 1, to absolute error ≤ 1e−12.
///
/// The principal character reduces to ζ(s)·∏_{p|m}(1 − p^(−s)). Otherwise the
/// series is summed residue class by residue class, each class tail handled
/// by the Euler–Maclaurin Hurwitz evaluation: L(χ, s) = m^(−s)·Σ_r χ(r)·ζ(s, r/m).
/// For large s the direct series is used instead (a handful of terms suffice,
/// and it avoids the cancellation of huge ζ(s, r/m) values).
pub fn dirichlet_l(chi: &DirichletCharacter, s: f64) -> Result<Complex64, AnalyticError> {
    if !(s > 1.0) {
        return Err(AnalyticError::SBelowOne(s));
    }
    let m = chi.modulus();
    if chi.is_principal() {
        let omitted: f64 = factorize(m)
            .expect("modulus ≥ 1")
            .prime_divisors()
            .map(|p| 1.0 - (p as f64).powf(-s))
            .product();
        return Ok(Complex64::new(zeta_unchecked(s) * omitted, 0.0));
    }
    if s > 30.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut n = 1u64;
        loop {
            let t = (n as f64).powf(-s);
            if t < 1e-19 {
                break;
            }
            acc += chi.eval(n) * t;
            n += 1;
        }
        return Ok(acc);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 1..=m {
        if let Some(angle) = chi.angle(r) {
            acc += angle.to_complex() * hurwitz_zeta(s, r as f64 / m as f64);
        }
    }
    Ok(acc * (m as f64).powf(-s))
}

/// Closed form for the quadratic character mod 3 at s = 1:
/// Σ (1/(3n+1) − 1/(3n+2)) = π/(3√3).
pub fn l_chi1_exact() -> f64 {
    std::f64::consts::PI / (3.0 * 3f64.sqrt())
}
