//! Index and bound computations: indices of congruence subgroups, the
//! Sturm and Kohnen coefficient bounds, the prime bound kappa governing
//! the two-dimensional comparison, and the one-dimensional estimates.
//!
//! Every bound is reported exactly: a rational value straight from its
//! formula together with its floor. Consumers compare primes `p` against
//! the floor inclusively. The closed index formulas are used throughout;
//! the matrix-enumeration cross-checks live in the test suite, where the
//! small moduli keep them affordable.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::primes;
use crate::arith::{rat, Rational};
use crate::error::{Error, Result};

/// Which formula produced a [`BoundReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundFormula {
    Sturm,
    Kohnen,
    Kappa,
}

/// An exact bound: the rational value of the defining formula, its floor,
/// and the inputs it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub formula: BoundFormula,
    /// Floor of `exact_value`; primes are compared against this, inclusive.
    pub kappa: BigUint,
    pub exact_value: Rational,
    pub ell: Option<u64>,
    pub level: u64,
    /// Product of the primes dividing the level exactly once, when the
    /// formula uses it.
    pub multiplicity_one_part: Option<u64>,
    /// The weight pair; the single-weight bound stores its weight twice.
    pub weights: Option<(u64, u64)>,
}

impl BoundReport {
    fn from_exact(
        formula: BoundFormula,
        exact_value: Rational,
        ell: Option<u64>,
        level: u64,
        multiplicity_one_part: Option<u64>,
        weights: Option<(u64, u64)>,
    ) -> BoundReport {
        let floor = exact_value.floor().to_integer();
        let kappa = floor
            .to_biguint()
            .expect("bound formulas produce nonnegative values");
        BoundReport {
            formula,
            kappa,
            exact_value,
            ell,
            level,
            multiplicity_one_part,
            weights,
        }
    }
}

/// Product of the primes dividing `n` exactly once.
pub fn multiplicity_one_part(n: u64) -> u64 {
    primes::factor(n)
        .iter()
        .filter(|&&(_, e)| e == 1)
        .map(|&(p, _)| p)
        .product()
}

/// Index of the upper-triangular-mod-N subgroup in the full modular group:
/// `N` times the product of `1 + 1/p` over primes dividing `N`. Computed as
/// the integer product of `p^(e-1) (p + 1)` over the factorisation.
pub fn index_gamma0(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::NotPositive("level"));
    }
    let mut acc = BigUint::one();
    for (p, e) in primes::factor(n) {
        acc *= BigUint::from(p).pow(e - 1) * BigUint::from(p + 1);
    }
    Ok(acc)
}

/// Index of the intersection of the level-`a` upper-triangular subgroup
/// with the level-`b` unipotent-ish subgroup (entries congruent to `1` on
/// the diagonal mod `b`, lower-left entry divisible by `b`). With
/// `L = lcm(a, b)` the index is `phi(b) L prod_{p|L}(1 + 1/p)`; the second
/// half is exactly [`index_gamma0`] of `L`.
pub fn index_gamma0_gamma1(a: u64, b: u64) -> Result<BigUint> {
    if a == 0 || b == 0 {
        return Err(Error::NotPositive("level"));
    }
    let l = (a / a.gcd(&b)) as u128 * b as u128;
    let l = u64::try_from(l).map_err(|_| Error::Unsupported("level overflow".into()))?;
    Ok(BigUint::from(primes::euler_phi(b)) * index_gamma0(l)?)
}

/// The single-form coefficient bound: a form of weight `k` and level `N`
/// vanishing past `k/12 [SL2(Z) : Gamma0(N)]` vanishes identically.
pub fn sturm_bound(k: u64, n: u64) -> Result<BoundReport> {
    if k == 0 {
        return Err(Error::NotPositive("weight"));
    }
    let index = index_gamma0(n)?;
    let exact = Rational::new(BigInt::from(k) * BigInt::from(index), BigInt::from(12));
    Ok(BoundReport::from_exact(
        BoundFormula::Sturm,
        exact,
        None,
        n,
        None,
        Some((k, k)),
    ))
}

/// The two-weight congruence bound for reductions mod l: uses the larger
/// weight and the index of `Gamma0(N) cap Gamma1(l)`, with `Gamma1(4)`
/// standing in when `l = 2`.
pub fn kohnen_bound(k1: u64, k2: u64, n: u64, ell: u64) -> Result<BoundReport> {
    for k in [k1, k2] {
        if k < 2 {
            return Err(Error::WeightTooSmall { k, min: 2 });
        }
    }
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let b = if ell == 2 { 4 } else { ell };
    let index = index_gamma0_gamma1(n, b)?;
    let k = k1.max(k2);
    let exact = Rational::new(BigInt::from(k) * BigInt::from(index), BigInt::from(12));
    Ok(BoundReport::from_exact(
        BoundFormula::Kohnen,
        exact,
        Some(ell),
        n,
        None,
        Some((k1, k2)),
    ))
}

/// The prime bound for comparing two semisimple two-dimensional mod-l
/// representations of conductor dividing `N`:
/// `l (l^2-1)^2 / 12 * N N' prod_{p|N}(1 + 1/p)` for odd `l`, and
/// `4 N N' prod_{p|N}(1 + 1/p)` for `l = 2`, where `N'` is the product of
/// the primes dividing `N` exactly once.
pub fn kappa(n: u64, ell: u64) -> Result<BoundReport> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if n == 0 {
        return Err(Error::NotPositive("level"));
    }
    if n % ell == 0 {
        return Err(Error::EllDividesLevel { ell, level: n });
    }
    let n_prime = multiplicity_one_part(n);
    // N prod (1 + 1/p) is the level-N index.
    let index = BigInt::from(index_gamma0(n)?);
    let exact = if ell > 2 {
        let l = BigInt::from(ell);
        let sq = &l * &l - 1;
        Rational::new(l * &sq * &sq * index * BigInt::from(n_prime), BigInt::from(12))
    } else {
        Rational::from_integer(BigInt::from(4u32) * index * BigInt::from(n_prime))
    };
    Ok(BoundReport::from_exact(
        BoundFormula::Kappa,
        exact,
        Some(ell),
        n,
        Some(n_prime),
        None,
    ))
}

/// Confirm that the closed kappa formula agrees with its congruence-index
/// form: `(l^2-1)/12` times the index for `(l^2 N N', l)` when `l` is odd,
/// and `4/12` times the index for `(4 N N', 4)` when `l = 2`.
pub fn kappa_index_identity_check(n: u64, ell: u64) -> Result<bool> {
    let direct = kappa(n, ell)?;
    let n_prime = direct
        .multiplicity_one_part
        .expect("kappa reports always carry the multiplicity-one part");
    let scaled_level = |f: u64| -> Result<u64> {
        f.checked_mul(n)
            .and_then(|x| x.checked_mul(n_prime))
            .ok_or_else(|| Error::Unsupported("level overflow".into()))
    };
    let via_index = if ell > 2 {
        let index = index_gamma0_gamma1(scaled_level(ell * ell)?, ell)?;
        Rational::new(
            BigInt::from(ell * ell - 1) * BigInt::from(index),
            BigInt::from(12),
        )
    } else {
        let index = index_gamma0_gamma1(scaled_level(4)?, 4)?;
        Rational::new(BigInt::from(4u32) * BigInt::from(index), BigInt::from(12))
    };
    Ok(via_index == direct.exact_value)
}

/// The one-dimensional comparison bounds, from weakest to strongest
/// hypothesis: the complete elementary bound `l N`, the exponent of the
/// character-sum estimate, and the square-log shape valid under the
/// generalised Riemann hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDimBounds {
    /// `l N`: complete, no hidden constant.
    pub trivial: BigUint,
    /// Exponent `(r+1)/(4r) + r eps` in the bound `(l N)^exponent`, valid
    /// up to the constant named in `burgess_constant`.
    pub burgess_exponent: Rational,
    /// The unspecified constant the exponent bound carries: the paper-level
    /// estimate is `kappa <= c(r, eps)^r (l N)^exponent + 1`.
    pub burgess_constant: &'static str,
    /// Rational enclosure of `(ln(l N))^2`; the conditional bound is this
    /// shape times the absolute constant in `ankeny_constant`.
    pub ankeny_square_log: (Rational, Rational),
    pub ankeny_constant: &'static str,
}

/// Number of series terms used for the logarithm enclosures. With the
/// reduced argument below 1/3 the tail after this many terms is under
/// 3^-25, far tighter than any use of the interval.
const LOG_SERIES_TERMS: u32 = 12;

/// Enclosure of `atanh(z)` for rational `0 <= z < 1` by the odd power
/// series; the tail after T terms is below `z^(2T+1) / ((2T+1)(1-z^2))`.
fn atanh_interval(z: &Rational) -> (Rational, Rational) {
    let z2 = z * z;
    let mut term = z.clone();
    let mut sum = Rational::zero();
    for j in 0..LOG_SERIES_TERMS {
        sum += &term / Rational::from_integer(BigInt::from(2 * j + 1));
        term *= &z2;
    }
    let tail = &term
        / (Rational::from_integer(BigInt::from(2 * LOG_SERIES_TERMS + 1))
            * (Rational::one() - z2));
    (sum.clone(), sum + tail)
}

/// Rational enclosure of `ln(x)` for an integer `x >= 1`, by splitting off
/// the largest power of two and expanding `ln` of the remaining factor in
/// `[1, 2)` through `atanh`.
fn ln_interval(x: u64) -> (Rational, Rational) {
    debug_assert!(x >= 1);
    let e = 63 - x.leading_zeros() as u64;
    let m = Rational::new(BigInt::from(x), BigInt::one() << e);
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let (frac_lo, frac_hi) = atanh_interval(&z);
    // ln 2 = 2 atanh(1/3).
    let (ln2_lo, ln2_hi) = atanh_interval(&rat(1, 3));
    let e = Rational::from_integer(BigInt::from(2 * e));
    let two = Rational::from_integer(BigInt::from(2));
    (&e * ln2_lo + &two * frac_lo, &e * ln2_hi + two * frac_hi)
}

/// Compute all three one-dimensional bounds for characters mod `l N`.
/// `r` is the parameter of the character-sum estimate; `epsilon` any
/// nonnegative rational (the estimate holds for every positive value, and
/// zero reports the bare exponent).
pub fn onedim_bounds(n: u64, ell: u64, r: u64, epsilon: &Rational) -> Result<OneDimBounds> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if n == 0 {
        return Err(Error::NotPositive("level"));
    }
    if r == 0 {
        return Err(Error::NotPositive("r"));
    }
    if epsilon.is_negative() {
        return Err(Error::NotPositive("epsilon"));
    }
    let ln_arg = ell
        .checked_mul(n)
        .ok_or_else(|| Error::Unsupported("level overflow".into()))?;
    let burgess_exponent = Rational::new(BigInt::from(r + 1), BigInt::from(4 * r))
        + Rational::from_integer(BigInt::from(r)) * epsilon;
    let (lo, hi) = ln_interval(ln_arg);
    let ankeny_square_log = (&lo * &lo, &hi * &hi);
    Ok(OneDimBounds {
        trivial: BigUint::from(ell) * BigUint::from(n),
        burgess_exponent,
        burgess_constant: "c(r, eps)^r",
        ankeny_square_log,
        ankeny_constant: "absolute constant under GRH",
    })
}

/// The weight window that suffices for the two-dimensional comparison:
/// every relevant form reduction appears in weight at most `l^2 - 1` for
/// odd `l`, and in weight 2 or 4 for `l = 2`.
pub fn weight_range(ell: u64) -> Result<(u64, u64)> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == 2 {
        return Ok((2, 4));
    }
    let top = ell
        .checked_mul(ell)
        .ok_or_else(|| Error::Unsupported("weight overflow".into()))?
        - 1;
    Ok((2, top))
}
