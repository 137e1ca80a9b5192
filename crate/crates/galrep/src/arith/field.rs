//! Finite fields `F_l` and `F_{l^k}` with deterministic moduli.
//!
//! An extension field is presented as `F_l[x] / (f)` where `f` is the first
//! monic irreducible polynomial of degree `k` in the lexicographic order of
//! its coefficient tuple `(c_{k-1}, ..., c_1, c_0)`. That choice is a scan
//! plus an irreducibility test, reproducible from scratch by anyone; elements
//! are coordinate vectors in the power basis `1, x, ..., x^{k-1}`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use super::primes;
use crate::error::{Error, Result};

/// Largest supported extension degree. Orders of realistic character values
/// need degrees well below this; the cap keeps adversarial file headers from
/// demanding enormous irreducibility checks.
pub const MAX_DEGREE: u64 = 64;

#[derive(PartialEq, Eq, Hash)]
struct DescInner {
    ell: u64,
    degree: usize,
    /// Ascending coefficients of the monic modulus, length `degree + 1`.
    /// Empty for degree 1 (the prime field needs none).
    modulus: Vec<u64>,
}

/// A finite field `F_{l^k}`: the characteristic, the degree, and (for k >= 2)
/// the monic irreducible modulus polynomial.
///
/// Cheap to clone; equality compares characteristic, degree, and modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    inner: Arc<DescInner>,
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl FieldDescriptor {
    /// The prime field `F_l`.
    pub fn prime_field(ell: u64) -> Result<FieldDescriptor> {
        if !primes::is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        Ok(FieldDescriptor {
            inner: Arc::new(DescInner {
                ell,
                degree: 1,
                modulus: Vec::new(),
            }),
        })
    }

    /// Build a descriptor from an explicit monic modulus (ascending
    /// coefficients including the leading 1). Validates primality of `ell`,
    /// the degree cap, coefficient ranges, monicity, and irreducibility.
    pub fn with_modulus(ell: u64, modulus: &[u64]) -> Result<FieldDescriptor> {
        if !primes::is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        if modulus.len() < 3 {
            return Err(Error::BadModulus(
                "need degree >= 2; degree-1 fields carry no modulus".into(),
            ));
        }
        let degree = (modulus.len() - 1) as u64;
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge {
                degree,
                max: MAX_DEGREE,
            });
        }
        if modulus[modulus.len() - 1] != 1 {
            return Err(Error::BadModulus("not monic".into()));
        }
        if modulus.iter().any(|&c| c >= ell) {
            return Err(Error::BadModulus(format!("coefficient out of range mod {ell}")));
        }
        if !poly_is_irreducible(modulus, ell) {
            return Err(Error::BadModulus("reducible over F_l".into()));
        }
        Ok(FieldDescriptor {
            inner: Arc::new(DescInner {
                ell,
                degree: degree as usize,
                modulus: modulus.to_vec(),
            }),
        })
    }

    pub fn ell(&self) -> u64 {
        self.inner.ell
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    /// The monic modulus polynomial, ascending; `None` for the prime field.
    pub fn modulus(&self) -> Option<&[u64]> {
        if self.inner.degree == 1 {
            None
        } else {
            Some(&self.inner.modulus)
        }
    }

    /// Number of field elements, `l^degree`.
    pub fn size(&self) -> BigUint {
        BigUint::from(self.inner.ell).pow(self.inner.degree as u32)
    }

    /// Short human-readable form, e.g. `F_25 = F_5[x]/(x^2 + 2)`.
    pub fn describe(&self) -> String {
        if self.inner.degree == 1 {
            format!("F_{}", self.inner.ell)
        } else {
            format!(
                "F_{}^{} (modulus {:?})",
                self.inner.ell, self.inner.degree, self.inner.modulus
            )
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            desc: self.clone(),
            coords: vec![0; self.inner.degree],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_u64(1)
    }

    /// The image of the integer `n` under `Z -> F_{l^k}`.
    pub fn from_u64(&self, n: u64) -> FieldElement {
        let mut coords = vec![0; self.inner.degree];
        coords[0] = n % self.inner.ell;
        FieldElement {
            desc: self.clone(),
            coords,
        }
    }

    /// The image of `-1`.
    pub fn minus_one(&self) -> FieldElement {
        self.from_u64(self.inner.ell - 1)
    }

    /// Element with the given power-basis coordinates (each `< l`, length
    /// `degree`).
    pub fn element(&self, coords: Vec<u64>) -> Result<FieldElement> {
        if coords.len() != self.inner.degree {
            return Err(Error::BadModulus(format!(
                "coordinate vector length {} != degree {}",
                coords.len(),
                self.inner.degree
            )));
        }
        if coords.iter().any(|&c| c >= self.inner.ell) {
            return Err(Error::BadModulus(format!("coordinate out of range mod {}", self.inner.ell)));
        }
        Ok(FieldElement {
            desc: self.clone(),
            coords,
        })
    }

    /// The `m`-th element in the deterministic element ordering: coordinate
    /// tuples compared lexicographically with the constant coordinate last,
    /// i.e. `m` written base `l` as `(c_{k-1}, ..., c_1, c_0)`.
    pub(crate) fn element_at(&self, mut m: u128) -> FieldElement {
        let mut coords = vec![0u64; self.inner.degree];
        for c in coords.iter_mut() {
            *c = (m % self.inner.ell as u128) as u64;
            m /= self.inner.ell as u128;
        }
        FieldElement {
            desc: self.clone(),
            coords,
        }
    }
}

/// Construct `F_{l^k}` with the deterministic modulus: the first monic
/// irreducible of degree `k` in lexicographic order of `(c_{k-1}, ..., c_0)`.
///
/// `k = 1` yields the prime field. Small checks: `ext_field_make(2, 2)` picks
/// `x^2 + x + 1`, and `ext_field_make(5, 2)` picks `x^2 + 2`.
pub fn ext_field_make(ell: u64, k: u64) -> Result<FieldDescriptor> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if k == 0 {
        return Err(Error::NotPositive("extension degree"));
    }
    if k > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: k,
            max: MAX_DEGREE,
        });
    }
    if k == 1 {
        return FieldDescriptor::prime_field(ell);
    }
    let k = k as usize;
    // Counter m encodes the tail coefficients with c_0 as the least
    // significant base-l digit, so ascending m is exactly the required
    // lexicographic order on (c_{k-1}, ..., c_0).
    let mut m: u128 = 0;
    loop {
        let mut poly = vec![0u64; k + 1];
        let mut t = m;
        for c in poly.iter_mut().take(k) {
            *c = (t % ell as u128) as u64;
            t /= ell as u128;
        }
        if t > 0 {
            // Exhausted all monic polynomials of degree k without finding an
            // irreducible one; impossible over a finite field.
            unreachable!("no irreducible polynomial of degree {k} over F_{ell}");
        }
        poly[k] = 1;
        if poly_is_irreducible(&poly, ell) {
            return Ok(FieldDescriptor {
                inner: Arc::new(DescInner {
                    ell,
                    degree: k,
                    modulus: poly,
                }),
            });
        }
        m += 1;
    }
}

/// An element of a [`FieldDescriptor`]'s field, as power-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    desc: FieldDescriptor,
    coords: Vec<u64>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.desc.describe())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FieldElement {
    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    /// Power-basis coordinates, length `degree`, constant term first.
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0] == 1 && self.coords[1..].iter().all(|&c| c == 0)
    }

    fn check_same_field(&self, other: &FieldElement) -> Result<()> {
        if self.desc != other.desc {
            return Err(Error::DescriptorMismatch {
                left: self.desc.describe(),
                right: other.desc.describe(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same_field(other)?;
        let ell = self.desc.ell();
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % ell)
            .collect();
        Ok(FieldElement {
            desc: self.desc.clone(),
            coords,
        })
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same_field(other)?;
        let ell = self.desc.ell();
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + ell - b) % ell)
            .collect();
        Ok(FieldElement {
            desc: self.desc.clone(),
            coords,
        })
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same_field(other)?;
        let ell = self.desc.ell();
        let k = self.desc.degree();
        if k == 1 {
            return Ok(FieldElement {
                desc: self.desc.clone(),
                coords: vec![primes::mul_mod(self.coords[0], other.coords[0], ell)],
            });
        }
        let prod = poly_mul(&self.coords, &other.coords, ell);
        let red = poly_rem(&prod, &self.desc.inner.modulus, ell);
        let mut coords = vec![0u64; k];
        coords[..red.len()].copy_from_slice(&red);
        Ok(FieldElement {
            desc: self.desc.clone(),
            coords,
        })
    }

    pub fn neg(&self) -> FieldElement {
        let ell = self.desc.ell();
        FieldElement {
            desc: self.desc.clone(),
            coords: self.coords.iter().map(|&c| (ell - c) % ell).collect(),
        }
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ell = self.desc.ell();
        if self.desc.degree() == 1 {
            return Ok(FieldElement {
                desc: self.desc.clone(),
                coords: vec![inv_mod(self.coords[0], ell)],
            });
        }
        let inv = poly_inverse(&self.coords, &self.desc.inner.modulus, ell);
        let mut coords = vec![0u64; self.desc.degree()];
        coords[..inv.len()].copy_from_slice(&inv);
        Ok(FieldElement {
            desc: self.desc.clone(),
            coords,
        })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.pow_big(&BigUint::from(e))
    }

    pub fn pow_big(&self, e: &BigUint) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.desc.one();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.checked_mul(&base).expect("same field");
            }
            if i + 1 < bits {
                base = base.checked_mul(&base).expect("same field");
            }
        }
        acc
    }

    /// Reinterpret a prime-field element as the corresponding constant in a
    /// larger field of the same characteristic. Errors for a source of degree
    /// >= 2 (general subfield embeddings are out of scope).
    pub fn lift_into(&self, target: &FieldDescriptor) -> Result<FieldElement> {
        if self.desc == *target {
            return Ok(self.clone());
        }
        if self.desc.ell() != target.ell() || self.desc.degree() != 1 {
            return Err(Error::DescriptorMismatch {
                left: self.desc.describe(),
                right: target.describe(),
            });
        }
        Ok(target.from_u64(self.coords[0]))
    }

    /// True when the element generates the multiplicative group, given the
    /// factorisation of the group order `l^degree - 1`.
    pub(crate) fn is_generator(&self, group_order: &BigUint, prime_factors: &[BigUint]) -> bool {
        if self.is_zero() {
            return false;
        }
        prime_factors
            .iter()
            .all(|q| !self.pow_big(&(group_order / q)).is_one())
    }
}

fn inv_mod(a: u64, ell: u64) -> u64 {
    // Fermat; ell is prime and a != 0 mod ell.
    primes::pow_mod(a, ell - 2, ell)
}

// ---- Polynomial arithmetic over F_l (ascending coefficient vectors) ----

fn poly_trim(v: &mut Vec<u64>) {
    while let Some(&0) = v.last() {
        v.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], ell: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let cell = &mut out[i + j];
            *cell = (*cell + x as u128 * y as u128) % ell as u128;
        }
    }
    let mut out: Vec<u64> = out.into_iter().map(|c| c as u64).collect();
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo monic `f`.
fn poly_rem(a: &[u64], f: &[u64], ell: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let d = f.len() - 1;
    // r is trimmed on entry to each pass, so its leading coefficient is
    // nonzero; one subtraction of lead * x^shift * f clears it.
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        for (i, &fc) in f.iter().enumerate() {
            let sub = primes::mul_mod(lead, fc, ell);
            r[i + shift] = (r[i + shift] + ell - sub) % ell;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_scale(a: &[u64], s: u64, ell: u64) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().map(|&c| primes::mul_mod(c, s, ell)).collect();
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &[u64], b: &[u64], ell: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + ell - y) % ell;
    }
    poly_trim(&mut out);
    out
}

/// Monic gcd of `a` and `b`.
fn poly_gcd(a: &[u64], b: &[u64], ell: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let lead = *b.last().unwrap();
        let monic_b = poly_scale(&b, inv_mod(lead, ell), ell);
        let r = poly_rem(&a, &monic_b, ell);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        if lead != 1 {
            a = poly_scale(&a, inv_mod(lead, ell), ell);
        }
    }
    a
}

/// Inverse of `a` modulo monic irreducible `f` (extended Euclid).
fn poly_inverse(a: &[u64], f: &[u64], ell: u64) -> Vec<u64> {
    // Invariants: r0 = s0 * a (mod f), r1 = s1 * a (mod f).
    let mut r0 = f.to_vec();
    let mut r1 = a.to_vec();
    poly_trim(&mut r1);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while r1.len() > 1 {
        let (q, r) = poly_divmod(&r0, &r1, ell);
        let s = poly_sub(&s0, &poly_mul(&q, &s1, ell), ell);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    assert!(!r1.is_empty(), "inverse of zero divisor; modulus not irreducible?");
    let c = inv_mod(r1[0], ell);
    let mut out = poly_scale(&s1, c, ell);
    out = poly_rem(&out, f, ell);
    out
}

/// Quotient and remainder of `a` by nonzero `b`.
fn poly_divmod(a: &[u64], b: &[u64], ell: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = inv_mod(*b.last().unwrap(), ell);
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    // Each pass clears r's (nonzero, trimmed) leading coefficient, so the
    // shift strictly decreases and every q slot is written at most once.
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = primes::mul_mod(*r.last().unwrap(), lead_inv, ell);
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            let sub = primes::mul_mod(c, bc, ell);
            r[i + shift] = (r[i + shift] + ell - sub) % ell;
        }
        poly_trim(&mut r);
    }
    poly_trim(&mut q);
    (q, r)
}

/// `x^(l^reps) mod f` starting from `base`, by repeated `l`-th powering.
fn frobenius_iterate(base: &[u64], reps: u64, f: &[u64], ell: u64) -> Vec<u64> {
    let mut cur = base.to_vec();
    for _ in 0..reps {
        cur = poly_powmod(&cur, ell, f, ell);
    }
    cur
}

/// `g^e mod f` over F_l.
fn poly_powmod(g: &[u64], e: u64, f: &[u64], ell: u64) -> Vec<u64> {
    let mut base = poly_rem(g, f, ell);
    let mut acc = vec![1u64];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &base, ell), f, ell);
        }
        base = poly_rem(&poly_mul(&base, &base, ell), f, ell);
        e >>= 1;
    }
    acc
}

/// Rabin irreducibility test for monic `f` of degree >= 1 over `F_l`:
/// `x^(l^k) = x (mod f)`, and for every prime `r | k`,
/// `gcd(x^(l^(k/r)) - x, f) = 1`.
pub(crate) fn poly_is_irreducible(f: &[u64], ell: u64) -> bool {
    let k = (f.len() - 1) as u64;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    if f[0] == 0 {
        return false; // divisible by x
    }
    let x = vec![0u64, 1];
    for r in primes::prime_divisors(k) {
        let h = frobenius_iterate(&x, k / r, f, ell);
        let diff = poly_sub(&h, &x, ell);
        let g = poly_gcd(&diff, f, ell);
        if g.len() != 1 {
            return false;
        }
    }
    let h = frobenius_iterate(&x, k, f, ell);
    poly_sub(&h, &x, ell).is_empty()
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch in +")
    }
}

impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("field mismatch in -")
    }
}

impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("field mismatch in *")
    }
}
