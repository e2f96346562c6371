//! Dirichlet characters mod m as exact value tables.
//!
//! Values are stored as rational angles (`e^{2πi·k/d}` kept as the reduced
//! fraction `k/d`), so multiplicativity and orthogonality hold exactly; the
//! conversion to floating complex happens only on demand.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::arith::{euler_totient, factorize, pow_mod};

/// An exact point on the unit circle, `e^{2πi·num/den}` with `0 ≤ num < den`
/// and `gcd(num, den) = 1` (den = 1 for the value 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    num: u64,
    den: u64,
}

impl RationalAngle {
    pub const ZERO: RationalAngle = RationalAngle { num: 0, den: 1 };

    fn new(num: u128, den: u128) -> Self {
        debug_assert!(den > 0);
        let num = num % den;
        let g = gcd_u128(num, den);
        RationalAngle {
            num: (num / g) as u64,
            den: (den / g) as u64,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// Angle addition = multiplication of the underlying roots of unity.
    pub fn add(self, other: Self) -> Self {
        let den = self.den as u128 * other.den as u128;
        let num = self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128;
        RationalAngle::new(num, den)
    }

    /// Complex conjugate.
    pub fn negate(self) -> Self {
        if self.num == 0 {
            self
        } else {
            RationalAngle {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (num, den) => {
                let theta = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
                Complex64::new(theta.cos(), theta.sin())
            }
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.max(1)
}

/// A Dirichlet character mod m: a value table on the residues `1..=m`,
/// zero off the units, multiplicative on the units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    /// index r−1 holds the angle of residue r, `None` when gcd(r, m) > 1
    angles: Vec<Option<RationalAngle>>,
    principal: bool,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// Exact angle of the class of `n`, or `None` when gcd(n, m) > 1.
    pub fn angle(&self, n: u64) -> Option<RationalAngle> {
        let r = n % self.modulus;
        let r = if r == 0 { self.modulus } else { r };
        self.angles[(r - 1) as usize]
    }

    /// χ(n) as a complex number (0 off the units).
    pub fn eval(&self, n: u64) -> Complex64 {
        self.angle(n)
            .map_or(Complex64::new(0.0, 0.0), RationalAngle::to_complex)
    }

    /// χ̄(n).
    pub fn eval_conj(&self, n: u64) -> Complex64 {
        self.angle(n)
            .map_or(Complex64::new(0.0, 0.0), |a| a.negate().to_complex())
    }

    /// True when every value is real (a quadratic or principal character).
    pub fn is_real(&self) -> bool {
        self.angles
            .iter()
            .flatten()
            .all(|a| a.den == 1 || a.den == 2)
    }
}

/// One cyclic factor of `(Z/mZ)ˣ`: residues of the component `p^e` mapped to
/// discrete logs along a fixed generator.
struct Axis {
    component: u64,
    order: u64,
    dlog: HashMap<u64, u64>,
}

fn primitive_root_mod_prime_power(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let prime_factors: Vec<u64> = factorize(phi_p)
        .expect("p ≥ 3")
        .prime_divisors()
        .collect();
    let mut g = 0;
    for candidate in 2..p {
        if prime_factors
            .iter()
            .all(|&q| pow_mod(candidate, phi_p / q, p) != 1)
        {
            g = candidate;
            break;
        }
    }
    assert!(g > 0, "no primitive root mod {p}");
    if e == 1 {
        return g;
    }
    // lift to p^e: g works unless g^(p−1) ≡ 1 (mod p²), in which case g+p does
    let p_sq = p * p;
    if pow_mod(g, p - 1, p_sq) == 1 {
        g + p
    } else {
        g
    }
}

fn axes_for(m: u64) -> Vec<Axis> {
    let mut axes = Vec::new();
    for &(p, e) in factorize(m).expect("m ≥ 1").factors() {
        let q = p.pow(e);
        if p == 2 {
            match e {
                1 => {}
                2 => {
                    let dlog = HashMap::from([(1, 0), (3, 1)]);
                    axes.push(Axis {
                        component: 4,
                        order: 2,
                        dlog,
                    });
                }
                _ => {
                    // (Z/2^e)ˣ = ⟨−1⟩ × ⟨3⟩
                    let half_order = q / 4;
                    let mut sign_dlog = HashMap::new();
                    let mut three_dlog = HashMap::new();
                    for sign in 0..2u64 {
                        let mut r = if sign == 0 { 1 } else { q - 1 };
                        for t in 0..half_order {
                            sign_dlog.insert(r, sign);
                            three_dlog.insert(r, t);
                            r = r * 3 % q;
                        }
                    }
                    axes.push(Axis {
                        component: q,
                        order: 2,
                        dlog: sign_dlog,
                    });
                    axes.push(Axis {
                        component: q,
                        order: half_order,
                        dlog: three_dlog,
                    });
                }
            }
        } else {
            let g = primitive_root_mod_prime_power(p, e);
            let order = p.pow(e - 1) * (p - 1);
            let mut dlog = HashMap::with_capacity(order as usize);
            let mut r = 1u64;
            for t in 0..order {
                dlog.insert(r, t);
                r = arith_mul_mod(r, g, q);
            }
            axes.push(Axis {
                component: q,
                order,
                dlog,
            });
        }
    }
    axes
}

fn arith_mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// All φ(m) Dirichlet characters mod m, the principal character first.
///
/// Built from a generator decomposition of `(Z/mZ)ˣ`; the value table is
/// O(m) per character, so this is intended for small moduli.
pub fn characters_mod(m: u64) -> Vec<DirichletCharacter> {
    assert!(m >= 1, "modulus must be positive");
    let axes = axes_for(m);
    let phi = euler_totient(m).expect("m ≥ 1");

    // discrete logs of every unit along each axis
    let m_primes: Vec<u64> = factorize(m).expect("m ≥ 1").prime_divisors().collect();
    let units: Vec<(u64, Vec<u64>)> = (1..=m)
        .filter(|&r| m_primes.iter().all(|&p| r % p != 0))
        .map(|r| {
            let logs = axes
                .iter()
                .map(|axis| axis.dlog[&(r % axis.component)])
                .collect();
            (r, logs)
        })
        .collect();
    debug_assert_eq!(units.len() as u64, phi);

    let mut characters = Vec::with_capacity(phi as usize);
    let mut ks: Vec<u64> = vec![0; axes.len()];
    loop {
        let mut angles: Vec<Option<RationalAngle>> = vec![None; m as usize];
        for (r, logs) in &units {
            let mut angle = RationalAngle::ZERO;
            for ((&k, axis), &t) in ks.iter().zip(&axes).zip(logs) {
                angle = angle.add(RationalAngle::new(
                    k as u128 * t as u128,
                    axis.order as u128,
                ));
            }
            angles[(*r - 1) as usize] = Some(angle);
        }
        characters.push(DirichletCharacter {
            modulus: m,
            principal: ks.iter().all(|&k| k == 0),
            angles,
        });
        // next k-vector, last axis fastest
        let mut i = axes.len();
        loop {
            if i == 0 {
                return characters;
            }
            i -= 1;
            ks[i] += 1;
            if ks[i] < axes[i].order {
                break;
            }
            ks[i] = 0;
        }
    }
}

/// The quadratic (real, non-principal) character mod 3 or mod 4.
pub(crate) fn quadratic_character(m: u64) -> DirichletCharacter {
    characters_mod(m)
        .into_iter()
        .find(|c| !c.is_principal())
        .expect("modulus with φ(m) ≥ 2")
}
