//! Exact counting and analytic constants for integers with congruence-restricted
//! prime factors.
//!
//! The flagship set is the integers `n` for which `x ↦ x³` is a bijection of
//! `Z/nZ` (OEIS [A074243](https://oeis.org/A074243)): exactly the square-free
//! integers with no prime factor congruent to 1 mod 3. Their counting function
//! grows like `C·n/√(log n)`, in analogy with the Landau–Ramanujan law for sums
//! of two squares. This crate provides
//!
//! - [`arith`] — exact 64-bit integer arithmetic: factorization, totient,
//!   Legendre symbol, the brute-force power-map bijection test, and fast
//!   membership predicates for sets of the form `I_m(A)` (no prime factor in
//!   the residue classes `A` mod `m`), optionally intersected with the
//!   square-free integers;
//! - [`sieve`] — segmented sieving for exact member counts and ascending
//!   enumeration up to 10⁹, plus lattice-point counting for the degenerate
//!   case where the surviving integers are products of a fixed prime set;
//! - [`analytic`] — ζ, Dirichlet characters and L-functions, Euler products
//!   over primes in arithmetic progressions, and the density constants
//!   (Mertens-type progression constants, the accelerated `p₂` product, the
//!   leading constant `C ≈ 0.664`, and the Landau–Ramanujan cross-check);
//! - [`zetadist`] — a seeded sampler for the Zeta distribution
//!   `P(K = k) = k^(−s)/ζ(s)` with statistical tests of its divisibility and
//!   valuation structure against the Euler-product predictions.

pub mod analytic;
pub mod arith;
pub mod sieve;
pub mod zetadist;

pub use arith::{CongruenceSelector, FactoredInteger};
pub use sieve::{CountTable, PrimeSet};

