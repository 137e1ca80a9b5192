//! Exact arithmetic in cyclotomic fields.
//!
//! A value is a rational linear combination of powers of a primitive m-th
//! root of unity, stored reduced modulo the m-th cyclotomic polynomial, so
//! the representation at a fixed order is unique. Operations on values of
//! different orders first raise both to the least common multiple.
//!
//! Character values and Eisenstein coefficients live here; reduction to a
//! finite field goes through [`cyclo_reduce`] with a chosen [`Embedding`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::embedding::Embedding;
use super::field::FieldElement;
use super::primes;
use super::Rational;
use crate::error::{Error, Result};

/// Largest root-of-unity order constructible in memory. File parsers apply
/// a much smaller cap of their own.
pub const MAX_ORDER: u64 = 1 << 20;

fn moebius(n: u64) -> i8 {
    let f = primes::factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Multiply ascending-coefficient `p` by `x^d - 1`.
fn mul_binomial(p: &[BigInt], d: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + d];
    for (i, c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

/// Exact division of `p` by `x^d - 1`; panics if not divisible.
fn div_binomial(p: &[BigInt], d: usize) -> Vec<BigInt> {
    let n = p.len() - 1;
    assert!(n >= d);
    let mut q = vec![BigInt::zero(); n - d + 1];
    for i in (0..=n - d).rev() {
        let upper = if i + d <= n - d {
            q[i + d].clone()
        } else {
            BigInt::zero()
        };
        q[i] = &p[i + d] + upper;
    }
    for i in 0..d {
        // Low-order identity p_i = -q_i, with q_i = 0 above the quotient
        // degree (the quotient can be shorter than the divisor).
        let qi = q.get(i).cloned().unwrap_or_default();
        assert!(p[i] == -qi, "division by x^{d} - 1 not exact");
    }
    q
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The m-th cyclotomic polynomial, ascending coefficients, monic, degree
/// `phi(m)`. Computed as the product of `(x^d - 1)^{mu(m/d)}` over `d | m`
/// and cached globally.
pub(crate) fn cyclotomic_polynomial(m: u64) -> Result<Arc<Vec<BigInt>>> {
    if m == 0 {
        return Err(Error::NotPositive("cyclotomic order"));
    }
    if m > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: m,
            max: MAX_ORDER,
        });
    }
    if let Some(hit) = cyclotomic_cache().lock().unwrap().get(&m) {
        return Ok(hit.clone());
    }
    let mut poly = vec![BigInt::one()];
    let divs = primes::divisors(m);
    // All multiplications first: every binomial below divides the running
    // product that remains at the time it is divided out.
    for &d in &divs {
        if moebius(m / d) == 1 {
            poly = mul_binomial(&poly, d as usize);
        }
    }
    for &d in &divs {
        if moebius(m / d) == -1 {
            poly = div_binomial(&poly, d as usize);
        }
    }
    let arc = Arc::new(poly);
    cyclotomic_cache()
        .lock()
        .unwrap()
        .entry(m)
        .or_insert_with(|| arc.clone());
    Ok(arc)
}

/// Reduce an ascending rational polynomial modulo the monic `phi`, returning
/// exactly `deg(phi)` coefficients.
fn reduce_mod_phi(mut v: Vec<Rational>, phi: &[BigInt]) -> Vec<Rational> {
    let d = phi.len() - 1;
    let phi_rat: Vec<Rational> = phi
        .iter()
        .take(d)
        .map(|c| Rational::from_integer(c.clone()))
        .collect();
    for i in (d..v.len()).rev() {
        let c = std::mem::replace(&mut v[i], Rational::zero());
        if !c.is_zero() {
            for (j, pc) in phi_rat.iter().enumerate() {
                if !pc.is_zero() {
                    let t = &c * pc;
                    v[i - d + j] -= t;
                }
            }
        }
    }
    v.truncate(d);
    v.resize(d, Rational::zero());
    v
}

/// An element of the m-th cyclotomic field, reduced modulo the m-th
/// cyclotomic polynomial.
///
/// Equality compares values, not representations: elements stored at
/// different orders are raised to the least common multiple first.
#[derive(Clone)]
pub struct CycloElement {
    order: u64,
    /// Length `phi(order)`; coefficient `i` multiplies the i-th power of the
    /// chosen primitive root.
    coeffs: Vec<Rational>,
}

impl CycloElement {
    pub fn rational(r: Rational) -> CycloElement {
        CycloElement {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_integer(n: i64) -> CycloElement {
        Self::rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> CycloElement {
        Self::from_integer(0)
    }

    pub fn one() -> CycloElement {
        Self::from_integer(1)
    }

    /// The `e`-th power of the primitive `m`-th root of unity.
    pub fn root_of_unity(m: u64, e: u64) -> Result<CycloElement> {
        if m == 0 {
            return Err(Error::NotPositive("root-of-unity order"));
        }
        let phi = cyclotomic_polynomial(m)?;
        let e = (e % m) as usize;
        let mut v = vec![Rational::zero(); e + 1];
        v[e] = Rational::one();
        Ok(CycloElement {
            order: m,
            coeffs: reduce_mod_phi(v, &phi),
        })
    }

    /// Build from explicit coefficients at a given order. The vector is
    /// reduced, then padded or truncated to length `phi(order)`.
    pub fn from_coeffs(order: u64, coeffs: Vec<Rational>) -> Result<CycloElement> {
        let phi = cyclotomic_polynomial(order)?;
        Ok(CycloElement {
            order,
            coeffs: reduce_mod_phi(coeffs, &phi),
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value, when the element lies in the prime field. The
    /// powers of the root form a basis, so this is just coefficient zero
    /// with the rest vanishing.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-express at order `m` (a multiple of the current order), sending
    /// the current root to the `(m / order)`-th power of the new one.
    pub fn raise_order(&self, m: u64) -> Result<CycloElement> {
        if m == self.order {
            return Ok(self.clone());
        }
        if m == 0 || m % self.order != 0 {
            return Err(Error::IncompatibleOrder {
                order: self.order,
                embedding_order: m,
            });
        }
        let phi = cyclotomic_polynomial(m)?;
        let step = (m / self.order) as usize;
        let mut v = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[i * step] = c.clone();
            }
        }
        Ok(CycloElement {
            order: m,
            coeffs: reduce_mod_phi(v, &phi),
        })
    }

    fn joint_order(&self, other: &CycloElement) -> Result<u64> {
        let l = (self.order / self.order.gcd(&other.order)) as u128 * other.order as u128;
        if l > MAX_ORDER as u128 {
            return Err(Error::OrderTooLarge {
                order: l.min(u64::MAX as u128) as u64,
                max: MAX_ORDER,
            });
        }
        Ok(l as u64)
    }

    pub fn add(&self, other: &CycloElement) -> Result<CycloElement> {
        let m = self.joint_order(other)?;
        let a = self.raise_order(m)?;
        let b = other.raise_order(m)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x + y)
            .collect();
        Ok(CycloElement { order: m, coeffs })
    }

    pub fn sub(&self, other: &CycloElement) -> Result<CycloElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycloElement {
        CycloElement {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> CycloElement {
        CycloElement {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn mul(&self, other: &CycloElement) -> Result<CycloElement> {
        let m = self.joint_order(other)?;
        let a = self.raise_order(m)?;
        let b = other.raise_order(m)?;
        let phi = cyclotomic_polynomial(m)?;
        let mut prod = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    let t = x * y;
                    prod[i + j] += t;
                }
            }
        }
        Ok(CycloElement {
            order: m,
            coeffs: reduce_mod_phi(prod, &phi),
        })
    }

    pub fn pow(&self, e: u64) -> Result<CycloElement> {
        let mut acc = CycloElement::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &CycloElement) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let m = self
            .joint_order(other)
            .expect("comparison across orders beyond the order cap");
        let a = self.raise_order(m).expect("joint order is a multiple");
        let b = other.raise_order(m).expect("joint order is a multiple");
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloElement {}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]@{}", self.order)
    }
}

/// Reduce a rational with l-integral denominator to a residue mod `ell`.
pub fn cyclo_reduce_rational(r: &Rational, ell: u64) -> Result<u64> {
    let ell_big = BigInt::from(ell);
    let den = r.denom().mod_floor(&ell_big).to_u64().expect("residue fits");
    if den == 0 {
        return Err(Error::NotEllIntegral { ell, index: None });
    }
    let num = r.numer().mod_floor(&ell_big).to_u64().expect("residue fits");
    if ell == 2 {
        // pow_mod with exponent ell - 2 = 0 would return 1 for den = 1
        // anyway; keep the arithmetic uniform for the general case below.
        return Ok(num);
    }
    let den_inv = primes::pow_mod(den, ell - 2, ell);
    Ok(primes::mul_mod(num, den_inv, ell))
}

/// Push a cyclotomic value into a finite field along an embedding whose
/// order is a multiple of the value's order. Fails if any coefficient has
/// denominator divisible by the characteristic.
pub fn cyclo_reduce(x: &CycloElement, emb: &Embedding) -> Result<FieldElement> {
    if emb.order() % x.order != 0 {
        return Err(Error::IncompatibleOrder {
            order: x.order,
            embedding_order: emb.order(),
        });
    }
    let desc = emb.field().clone();
    let zeta = emb.root().pow(emb.order() / x.order);
    let mut acc = desc.zero();
    let mut pw = desc.one();
    for (i, c) in x.coeffs.iter().enumerate() {
        if i > 0 {
            pw = pw.checked_mul(&zeta)?;
        }
        if !c.is_zero() {
            let r = cyclo_reduce_rational(c, desc.ell())?;
            let term = desc.from_u64(r).checked_mul(&pw)?;
            acc = acc.checked_add(&term)?;
        }
    }
    Ok(acc)
}
