//! Bernoulli numbers, their character twists, and L-values at non-positive
//! integers.
//!
//! The twisted numbers are computed from Bernoulli polynomials:
//! `B_{k,chi} = f^{k-1} * sum_{a=1}^{f} chi(a) B_k(a/f)` for a character of
//! modulus `f`. With the trivial character of modulus 1 this yields the
//! classical numbers except at `k = 1`, where it gives `+1/2` (the value the
//! constant terms of level-1 weight-1 Eisenstein data require).

use num_bigint::BigInt;
use num_traits::One;

use super::cyclo::CycloElement;
use super::{rat_int, Rational};
use crate::error::{Error, Result};

/// `B_0, ..., B_n` with the convention `B_1 = -1/2`, by the defining
/// recurrence `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
fn bernoulli_numbers_up_to(n: u64) -> Vec<Rational> {
    let n = n as usize;
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 1..=n {
        // Binomial row C(m+1, j) for j = 0..m, built incrementally.
        let mut binom = BigInt::one();
        let mut acc = Rational::from_integer(BigInt::from(0));
        for (j, bj) in b.iter().enumerate() {
            acc += bj * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(acc / rat_int(-((m as i64) + 1)));
    }
    b
}

/// The classical Bernoulli number `B_n` (`B_1 = -1/2`).
pub fn bernoulli_number(n: u64) -> Rational {
    bernoulli_numbers_up_to(n).pop().expect("nonempty prefix")
}

/// `B_k(x) = sum_j C(k, j) B_j x^{k-j}`, given the prefix `b = B_0..B_k`.
fn bernoulli_polynomial_at(k: u64, x: &Rational, b: &[Rational]) -> Rational {
    let k = k as usize;
    let mut binom = BigInt::one();
    let mut xpow = Rational::one();
    // Accumulate terms j = k, k-1, ..., 0 so the running power of x grows.
    let mut acc = Rational::from_integer(BigInt::from(0));
    for j in (0..=k).rev() {
        acc += &b[j] * Rational::from_integer(binom.clone()) * &xpow;
        if j > 0 {
            binom = binom * BigInt::from(j) / BigInt::from(k - j + 1);
            xpow *= x;
        }
    }
    acc
}

/// The twisted Bernoulli number `B_{k,chi}` for a character given as a value
/// map on `1..=modulus` (zero off the units). Values are cyclotomic, so the
/// result is.
pub fn bernoulli_generalized<F>(k: u64, modulus: u64, mut chi: F) -> Result<CycloElement>
where
    F: FnMut(u64) -> Result<CycloElement>,
{
    if k == 0 {
        return Err(Error::NotPositive("bernoulli index"));
    }
    if modulus == 0 {
        return Err(Error::NotPositive("character modulus"));
    }
    let b = bernoulli_numbers_up_to(k);
    let f_rat = rat_int(modulus as i64);
    let mut acc = CycloElement::zero();
    for a in 1..=modulus {
        let v = chi(a)?;
        if v.is_zero() {
            continue;
        }
        let x = rat_int(a as i64) / &f_rat;
        acc = acc.add(&v.scale(&bernoulli_polynomial_at(k, &x, &b)))?;
    }
    let scale = Rational::from_integer(BigInt::from(modulus).pow(k as u32 - 1));
    Ok(acc.scale(&scale))
}

/// `L(1 - k, chi) = -B_{k,chi} / k` for `k >= 1`: the L-value at the
/// non-positive integer `1 - k`.
pub fn lvalue_at_nonpositive<F>(k: u64, modulus: u64, chi: F) -> Result<CycloElement>
where
    F: FnMut(u64) -> Result<CycloElement>,
{
    let b = bernoulli_generalized(k, modulus, chi)?;
    Ok(b.scale(&Rational::new(BigInt::from(-1), BigInt::from(k))))
}
