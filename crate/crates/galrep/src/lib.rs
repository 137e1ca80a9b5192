//! Exact arithmetic for deciding whether two semisimple two-dimensional odd
//! mod-l Galois representations, presented through modular form data, are
//! isomorphic.
//!
//! The decision procedure is effective: a representation of conductor dividing
//! `N` is determined by the characteristic polynomials of Frobenius at the
//! primes up to an explicit bound `kappa(N, l)`, so two presentations can be
//! compared by exact computation at finitely many primes. Everything here is
//! exact: no floating point enters any verdict.
//!
//! Module map:
//!
//! * [`arith`] — finite fields `F_{l^k}` with deterministic moduli, cyclotomic
//!   integers, reduction maps to residue fields, generalized Bernoulli numbers.
//! * [`characters`] — Dirichlet characters stored by generator images, with
//!   conductor, primitive part, products, and enumeration.
//! * [`qexp`] — q-expansions over exact coefficient domains and the operators
//!   U, V, pi_p, pi, theta.
//! * [`eisenstein`] — twisted divisor sums, Eisenstein series, the level-t
//!   variants, delta, and the reduced form attached to a sum of two characters.
//! * [`bounds`] — index formulas for congruence subgroups, Sturm and Kohnen
//!   coefficient bounds, the kappa bound and its index-identity cross-check,
//!   and the one-dimensional (character) bounds.
//! * [`repr`] — representation sources (eigenform data or a pair of characters)
//!   and Frobenius characteristic polynomials.
//! * [`distinguisher`] — the comparison drivers and verdicts.
//! * [`format`] — the text file formats and character serialization used by the
//!   CLI and by external tools.

pub mod arith;
pub mod bounds;
pub mod characters;
pub mod distinguisher;
pub mod eisenstein;
pub mod error;
pub mod format;
pub mod qexp;
pub mod repr;

pub use error::{Error, Result};
