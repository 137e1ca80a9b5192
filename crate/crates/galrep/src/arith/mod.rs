//! Exact arithmetic foundations.
//!
//! Contents:
//!
//! * [`Rational`] — arbitrary-precision rationals (reduced, positive
//!   denominator), plus the [`rat`]/[`rat_int`] construction helpers.
//! * [`FieldDescriptor`], [`FieldElement`], [`ext_field_make`] — finite fields
//!   `F_l` and `F_{l^k}` with a deterministic modulus polynomial.
//! * [`Embedding`], [`embedding_make`] — the deterministic choice of a root of
//!   unity in a residue field, i.e. a reduction map `Z[zeta_m] -> F_{l^k}`.
//! * [`CycloElement`], [`cyclo_reduce`] — elements of `Q(zeta_m)` in the power
//!   basis, and their reduction through an embedding.
//! * [`bernoulli_number`], [`bernoulli_generalized`],
//!   [`lvalue_at_nonpositive`] — Bernoulli numbers, their character-twisted
//!   generalization, and L-values at non-positive integers.
//! * [`primes`] — primality testing, factorisation, prime enumeration.

mod bernoulli;
mod cyclo;
mod embedding;
mod field;
pub mod primes;

pub use bernoulli::{bernoulli_generalized, bernoulli_number, lvalue_at_nonpositive};
pub use cyclo::{cyclo_reduce, cyclo_reduce_rational, CycloElement, MAX_ORDER};
pub use embedding::{embedding_make, first_generator, Embedding};
pub use field::{ext_field_make, FieldDescriptor, FieldElement, MAX_DEGREE};

use num_bigint::BigInt;

/// Arbitrary-precision rational number. Always stored reduced with a positive
/// denominator; integers have denominator 1.
pub type Rational = num_rational::BigRational;

/// `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}
