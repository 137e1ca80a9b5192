//! q-expansions over exact coefficient domains, and the operators acting on
//! them.
//!
//! A series carries its coefficients (rational, cyclotomic at a fixed
//! ambient order, or finite-field), a weight, a level, a character, and a
//! precision: coefficients `a_0 .. a_{B-1}` are stored, everything beyond is
//! unknown, not zero. Operators track three kinds of bookkeeping:
//!
//! * precision: `U` divides it, the filters and `theta` preserve it;
//! * level: `V(d)` and `U(p)` multiply by their argument, `pi_p` multiplies
//!   by `p` only when `p^2` does not already divide the level, `pi`
//!   multiplies by the product of the primes dividing the level exactly
//!   once;
//! * weight: sums under multiplication, jumps by `l + 1` under `theta`.
//!
//! Sums of series of different weights are meaningful only after reduction
//! mod l; [`QExpansion::add_mixed`] performs them and marks the result, and
//! the congruence drivers refuse marked inputs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::primes;
use crate::arith::{
    cyclo_reduce, cyclo_reduce_rational, CycloElement, Embedding, FieldDescriptor, FieldElement,
    Rational, MAX_ORDER,
};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

/// Coefficient storage for one series.
///
/// Cyclotomic coefficients may be stored at any order dividing the ambient
/// `order`; consumers that need a uniform representation raise them when
/// reading. Finite-field coefficients all live in the one descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Rational(Vec<Rational>),
    Cyclo {
        order: u64,
        coeffs: Vec<CycloElement>,
    },
    Field {
        desc: FieldDescriptor,
        coeffs: Vec<FieldElement>,
    },
}

/// Minimal ring interface the generic series algorithms run over. All
/// operations stay inside one unified domain, where the underlying checked
/// operations cannot fail.
trait Ring: Clone {
    fn radd(&self, other: &Self) -> Self;
    fn rmul(&self, other: &Self) -> Self;
    fn rneg(&self) -> Self;
    /// Zero of the same domain (descriptor- and order-compatible).
    fn rzero(&self) -> Self;
    fn ris_zero(&self) -> bool;
}

impl Ring for Rational {
    fn radd(&self, other: &Self) -> Self {
        self + other
    }
    fn rmul(&self, other: &Self) -> Self {
        self * other
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn rzero(&self) -> Self {
        Rational::zero()
    }
    fn ris_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for CycloElement {
    fn radd(&self, other: &Self) -> Self {
        // Both operands sit at orders dividing one ambient order, so the
        // joint order stays within the already-constructed cap.
        self.add(other).expect("orders divide a common ambient")
    }
    fn rmul(&self, other: &Self) -> Self {
        self.mul(other).expect("orders divide a common ambient")
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn rzero(&self) -> Self {
        CycloElement::zero()
    }
    fn ris_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for FieldElement {
    fn radd(&self, other: &Self) -> Self {
        self.checked_add(other).expect("same field")
    }
    fn rmul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("same field")
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn rzero(&self) -> Self {
        self.descriptor().zero()
    }
    fn ris_zero(&self) -> bool {
        self.is_zero()
    }
}

fn zip_add<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.radd(y)).collect()
}

fn convolve<T: Ring>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let zero = a[0].rzero();
    (0..len)
        .map(|k| {
            let mut acc = zero.clone();
            for i in 0..=k {
                if i < a.len() && k - i < b.len() {
                    let (x, y) = (&a[i], &b[k - i]);
                    if !x.ris_zero() && !y.ris_zero() {
                        acc = acc.radd(&x.rmul(y));
                    }
                }
            }
            acc
        })
        .collect()
}

impl Coefficients {
    pub fn len(&self) -> usize {
        match self {
            Coefficients::Rational(v) => v.len(),
            Coefficients::Cyclo { coeffs, .. } => coeffs.len(),
            Coefficients::Field { coeffs, .. } => coeffs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn domain_name(&self) -> &'static str {
        match self {
            Coefficients::Rational(_) => "rational",
            Coefficients::Cyclo { .. } => "cyclotomic",
            Coefficients::Field { .. } => "finite-field",
        }
    }

    /// Render coefficient `i` in the same syntax the file format uses.
    pub fn render(&self, i: usize) -> Option<String> {
        match self {
            Coefficients::Rational(v) => v.get(i).map(render_rational),
            Coefficients::Cyclo { order, coeffs } => coeffs.get(i).map(|c| {
                let raised = c.raise_order(*order).expect("divides ambient");
                render_cyclo(&raised)
            }),
            Coefficients::Field { coeffs, .. } => coeffs.get(i).map(|c| c.to_string()),
        }
    }

    /// Rebuild with `new_len` entries where entry `j` copies entry `src(j)`
    /// of the original, or zero when `src(j)` is `None`.
    fn remap(&self, new_len: usize, src: impl Fn(usize) -> Option<usize>) -> Coefficients {
        match self {
            Coefficients::Rational(v) => Coefficients::Rational(
                (0..new_len)
                    .map(|j| src(j).map_or_else(Rational::zero, |i| v[i].clone()))
                    .collect(),
            ),
            Coefficients::Cyclo { order, coeffs } => Coefficients::Cyclo {
                order: *order,
                coeffs: (0..new_len)
                    .map(|j| src(j).map_or_else(CycloElement::zero, |i| coeffs[i].clone()))
                    .collect(),
            },
            Coefficients::Field { desc, coeffs } => Coefficients::Field {
                desc: desc.clone(),
                coeffs: (0..new_len)
                    .map(|j| src(j).map_or_else(|| desc.zero(), |i| coeffs[i].clone()))
                    .collect(),
            },
        }
    }

    /// Bring two coefficient sets into one domain: rationals promote to
    /// cyclotomic when paired with it; finite-field domains must match
    /// exactly and never mix with characteristic zero.
    fn unify(a: &Coefficients, b: &Coefficients) -> Result<(Coefficients, Coefficients)> {
        use Coefficients::*;
        match (a, b) {
            (Rational(_), Rational(_)) => Ok((a.clone(), b.clone())),
            (Rational(v), Cyclo { order, .. }) => Ok((promote_rational(v, *order), b.clone())),
            (Cyclo { order, .. }, Rational(v)) => Ok((a.clone(), promote_rational(v, *order))),
            (
                Cyclo {
                    order: o1,
                    coeffs: c1,
                },
                Cyclo {
                    order: o2,
                    coeffs: c2,
                },
            ) => {
                let joint = (*o1 / o1.gcd(o2)) as u128 * *o2 as u128;
                if joint > MAX_ORDER as u128 {
                    return Err(Error::OrderTooLarge {
                        order: joint.min(u64::MAX as u128) as u64,
                        max: MAX_ORDER,
                    });
                }
                let joint = joint as u64;
                Ok((
                    Cyclo {
                        order: joint,
                        coeffs: c1.clone(),
                    },
                    Cyclo {
                        order: joint,
                        coeffs: c2.clone(),
                    },
                ))
            }
            (Field { desc: d1, .. }, Field { desc: d2, .. }) => {
                if d1 != d2 {
                    return Err(Error::DescriptorMismatch {
                        left: d1.describe(),
                        right: d2.describe(),
                    });
                }
                Ok((a.clone(), b.clone()))
            }
            _ => Err(Error::DomainMismatch {
                left: a.domain_name(),
                right: b.domain_name(),
            }),
        }
    }
}

fn promote_rational(v: &[Rational], order: u64) -> Coefficients {
    Coefficients::Cyclo {
        order,
        coeffs: v.iter().map(|r| CycloElement::rational(r.clone())).collect(),
    }
}

fn render_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn render_cyclo(c: &CycloElement) -> String {
    let parts: Vec<String> = c.coeffs().iter().map(render_rational).collect();
    format!("[{}]@{}", parts.join(","), c.order())
}

/// A q-expansion with its arithmetic bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    coeffs: Coefficients,
    weight: u64,
    level: u64,
    character: DirichletCharacter,
    mixed_weight: bool,
}

impl QExpansion {
    pub fn new(
        coeffs: Coefficients,
        weight: u64,
        level: u64,
        character: DirichletCharacter,
    ) -> Result<QExpansion> {
        if level == 0 {
            return Err(Error::NotPositive("level"));
        }
        if coeffs.is_empty() {
            return Err(Error::NotPositive("precision"));
        }
        if let Coefficients::Cyclo { order, coeffs } = &coeffs {
            for c in coeffs {
                if order % c.order() != 0 {
                    return Err(Error::IncompatibleOrder {
                        order: c.order(),
                        embedding_order: *order,
                    });
                }
            }
        }
        Ok(QExpansion {
            coeffs,
            weight,
            level,
            character,
            mixed_weight: false,
        })
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    /// Number of known coefficients: indices `0 .. precision - 1`.
    pub fn precision(&self) -> u64 {
        self.coeffs.len() as u64
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    /// True when the series is a sum of reductions of forms of different
    /// weights; `weight()` is then only an upper marker.
    pub fn is_mixed_weight(&self) -> bool {
        self.mixed_weight
    }

    pub(crate) fn set_mixed_weight(&mut self, flag: bool) {
        self.mixed_weight = flag;
    }

    fn with_parts(&self, coeffs: Coefficients, weight: u64, level: u64) -> QExpansion {
        QExpansion {
            coeffs,
            weight,
            level,
            character: self.character.clone(),
            mixed_weight: self.mixed_weight,
        }
    }

    fn scaled_level(&self, factor: u64) -> Result<u64> {
        self.level
            .checked_mul(factor)
            .ok_or_else(|| Error::Unsupported("level overflow".into()))
    }

    /// Keep only the first `precision` coefficients.
    pub fn truncate(&self, precision: u64) -> Result<QExpansion> {
        if precision == 0 {
            return Err(Error::NotPositive("precision"));
        }
        if precision > self.precision() {
            return Err(Error::PrecisionTooSmall {
                required: precision,
                actual: self.precision(),
            });
        }
        let b = precision as usize;
        let coeffs = self.coeffs.remap(b, Some);
        Ok(self.with_parts(coeffs, self.weight, self.level))
    }

    /// `V(d)`: sends `a_n` to the coefficient of `q^{dn}`. Precision is
    /// kept, the level gains a factor `d`, weight and character are
    /// untouched.
    pub fn op_v(&self, d: u64) -> Result<QExpansion> {
        if d == 0 {
            return Err(Error::NotPositive("operator argument"));
        }
        let level = self.scaled_level(d)?;
        let d = d as usize;
        let coeffs = self
            .coeffs
            .remap(self.coeffs.len(), |j| (j % d == 0).then(|| j / d));
        Ok(self.with_parts(coeffs, self.weight, level))
    }

    /// `U(p)`: sends `a_{pn}` to the coefficient of `q^n`. Precision drops
    /// to `floor((B - 1)/p) + 1`; the level conservatively gains a factor
    /// `p`.
    pub fn op_u(&self, p: u64) -> Result<QExpansion> {
        if p == 0 {
            return Err(Error::NotPositive("operator argument"));
        }
        let level = self.scaled_level(p)?;
        let p = p as usize;
        let new_len = (self.coeffs.len() - 1) / p + 1;
        let coeffs = self.coeffs.remap(new_len, |j| Some(j * p));
        Ok(self.with_parts(coeffs, self.weight, level))
    }

    /// `pi_p`: zeroes every coefficient whose index is divisible by `p`.
    /// Defined for primes dividing the level; the level gains a factor `p`
    /// unless `p^2` already divides it.
    pub fn op_pi_p(&self, p: u64) -> Result<QExpansion> {
        if !primes::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if self.level % p != 0 {
            return Err(Error::PrimeNotInLevel {
                p,
                level: self.level,
            });
        }
        let level = if self.level % (p * p) == 0 {
            self.level
        } else {
            self.scaled_level(p)?
        };
        let p = p as usize;
        let coeffs = self
            .coeffs
            .remap(self.coeffs.len(), |j| (j % p != 0).then_some(j));
        Ok(self.with_parts(coeffs, self.weight, level))
    }

    /// `pi`: zeroes the constant term and every coefficient sharing a prime
    /// with the level. The level gains the product of its primes of
    /// multiplicity one.
    pub fn op_pi(&self) -> Result<QExpansion> {
        let n = self.level;
        let n_prime: u64 = primes::factor(n)
            .iter()
            .filter(|&&(_, e)| e == 1)
            .map(|&(p, _)| p)
            .product();
        let level = self.scaled_level(n_prime)?;
        let coeffs = self.coeffs.remap(self.coeffs.len(), |j| {
            (j != 0 && (j as u64).gcd(&n) == 1).then_some(j)
        });
        Ok(self.with_parts(coeffs, self.weight, level))
    }

    /// `theta = q d/dq` on finite-field coefficients: multiplies `a_n` by
    /// `n` and raises the weight by `l + 1`. Level, character, and precision
    /// are unchanged.
    pub fn op_theta(&self) -> Result<QExpansion> {
        let (desc, coeffs) = match &self.coeffs {
            Coefficients::Field { desc, coeffs } => (desc, coeffs),
            _ => return Err(Error::ThetaNeedsFiniteField),
        };
        let ell = desc.ell();
        let new: Vec<FieldElement> = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| desc.from_u64(n as u64 % ell).checked_mul(c))
            .collect::<Result<_>>()?;
        let out = Coefficients::Field {
            desc: desc.clone(),
            coeffs: new,
        };
        Ok(self.with_parts(out, self.weight + ell + 1, self.level))
    }

    fn check_addable(&self, other: &QExpansion) -> Result<()> {
        if self.character != other.character {
            return Err(Error::CharacterMismatch);
        }
        Ok(())
    }

    fn binary_parts(&self, other: &QExpansion) -> Result<(Coefficients, Coefficients, u64)> {
        let (a, b) = Coefficients::unify(&self.coeffs, &other.coeffs)?;
        let level = self.level.lcm(&other.level);
        Ok((a, b, level))
    }

    /// Sum of two series of equal weight and character. Precision is the
    /// minimum, the level the lcm.
    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        if self.weight != other.weight || self.mixed_weight != other.mixed_weight {
            return Err(Error::WeightMismatch {
                left: self.weight,
                right: other.weight,
            });
        }
        self.check_addable(other)?;
        let (a, b, level) = self.binary_parts(other)?;
        let len = a.len().min(b.len());
        let coeffs = add_coefficients(&a, &b, len);
        Ok(QExpansion {
            coeffs,
            weight: self.weight,
            level,
            character: self.character.clone(),
            mixed_weight: self.mixed_weight,
        })
    }

    /// Sum of series of possibly different weights, as reductions mod l.
    /// The result is marked mixed-weight and records the larger weight.
    pub fn add_mixed(&self, other: &QExpansion) -> Result<QExpansion> {
        self.check_addable(other)?;
        let (a, b, level) = self.binary_parts(other)?;
        let len = a.len().min(b.len());
        let coeffs = add_coefficients(&a, &b, len);
        let mixed = self.mixed_weight || other.mixed_weight || self.weight != other.weight;
        Ok(QExpansion {
            coeffs,
            weight: self.weight.max(other.weight),
            level,
            character: self.character.clone(),
            mixed_weight: mixed,
        })
    }

    pub fn neg(&self) -> QExpansion {
        let coeffs = match &self.coeffs {
            Coefficients::Rational(v) => Coefficients::Rational(v.iter().map(|c| -c).collect()),
            Coefficients::Cyclo { order, coeffs } => Coefficients::Cyclo {
                order: *order,
                coeffs: coeffs.iter().map(|c| c.neg()).collect(),
            },
            Coefficients::Field { desc, coeffs } => Coefficients::Field {
                desc: desc.clone(),
                coeffs: coeffs.iter().map(|c| c.neg()).collect(),
            },
        };
        self.with_parts(coeffs, self.weight, self.level)
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.add(&other.neg())
    }

    /// Product of two series: weights add, characters multiply, the level is
    /// the lcm, precision the minimum.
    pub fn mul(&self, other: &QExpansion) -> Result<QExpansion> {
        let (a, b, level) = self.binary_parts(other)?;
        let len = a.len().min(b.len());
        let coeffs = mul_coefficients(&a, &b, len);
        Ok(QExpansion {
            coeffs,
            weight: self.weight + other.weight,
            level,
            character: self.character.product(&other.character)?,
            mixed_weight: self.mixed_weight || other.mixed_weight,
        })
    }

    /// Multiply every coefficient by a rational. In a finite-field domain
    /// the scalar reduces mod l first (its denominator must be a unit).
    pub fn scale_rational(&self, r: &Rational) -> Result<QExpansion> {
        let coeffs = match &self.coeffs {
            Coefficients::Rational(v) => {
                Coefficients::Rational(v.iter().map(|c| c * r).collect())
            }
            Coefficients::Cyclo { order, coeffs } => Coefficients::Cyclo {
                order: *order,
                coeffs: coeffs.iter().map(|c| c.scale(r)).collect(),
            },
            Coefficients::Field { desc, coeffs } => {
                let s = desc.from_u64(cyclo_reduce_rational(r, desc.ell())?);
                Coefficients::Field {
                    desc: desc.clone(),
                    coeffs: coeffs
                        .iter()
                        .map(|c| c.checked_mul(&s))
                        .collect::<Result<_>>()?,
                }
            }
        };
        Ok(self.with_parts(coeffs, self.weight, self.level))
    }

    /// Reduce a characteristic-zero series into the residue field of the
    /// embedding. Cyclotomic coefficient orders must divide the embedding
    /// order; denominators must be prime to l. A series already in the
    /// embedding's exact field passes through unchanged.
    pub fn reduce_mod_lambda(&self, emb: &Embedding) -> Result<QExpansion> {
        let desc = emb.field().clone();
        let tag_index = |e: Error, n: usize| match e {
            Error::NotEllIntegral { ell, index: None } => Error::NotEllIntegral {
                ell,
                index: Some(n as u64),
            },
            other => other,
        };
        let coeffs = match &self.coeffs {
            Coefficients::Rational(v) => {
                let mut out = Vec::with_capacity(v.len());
                for (n, c) in v.iter().enumerate() {
                    let r = cyclo_reduce_rational(c, desc.ell()).map_err(|e| tag_index(e, n))?;
                    out.push(desc.from_u64(r));
                }
                Coefficients::Field { desc, coeffs: out }
            }
            Coefficients::Cyclo { coeffs, .. } => {
                let mut out = Vec::with_capacity(coeffs.len());
                for (n, c) in coeffs.iter().enumerate() {
                    out.push(cyclo_reduce(c, emb).map_err(|e| tag_index(e, n))?);
                }
                Coefficients::Field { desc, coeffs: out }
            }
            Coefficients::Field { desc: have, .. } => {
                if *have != desc {
                    return Err(Error::DescriptorMismatch {
                        left: have.describe(),
                        right: desc.describe(),
                    });
                }
                self.coeffs.clone()
            }
        };
        Ok(self.with_parts(coeffs, self.weight, self.level))
    }
}

fn add_coefficients(a: &Coefficients, b: &Coefficients, len: usize) -> Coefficients {
    match (a, b) {
        (Coefficients::Rational(x), Coefficients::Rational(y)) => {
            Coefficients::Rational(zip_add(&x[..len], &y[..len]))
        }
        (
            Coefficients::Cyclo { order, coeffs: x },
            Coefficients::Cyclo { coeffs: y, .. },
        ) => Coefficients::Cyclo {
            order: *order,
            coeffs: zip_add(&x[..len], &y[..len]),
        },
        (
            Coefficients::Field { desc, coeffs: x },
            Coefficients::Field { coeffs: y, .. },
        ) => Coefficients::Field {
            desc: desc.clone(),
            coeffs: zip_add(&x[..len], &y[..len]),
        },
        _ => unreachable!("inputs were unified"),
    }
}

fn mul_coefficients(a: &Coefficients, b: &Coefficients, len: usize) -> Coefficients {
    match (a, b) {
        (Coefficients::Rational(x), Coefficients::Rational(y)) => {
            Coefficients::Rational(convolve(x, y, len))
        }
        (
            Coefficients::Cyclo { order, coeffs: x },
            Coefficients::Cyclo { coeffs: y, .. },
        ) => Coefficients::Cyclo {
            order: *order,
            coeffs: convolve(x, y, len),
        },
        (
            Coefficients::Field { desc, coeffs: x },
            Coefficients::Field { coeffs: y, .. },
        ) => Coefficients::Field {
            desc: desc.clone(),
            coeffs: convolve(x, y, len),
        },
        _ => unreachable!("inputs were unified"),
    }
}

/// Hecke eigenvalues at primes, in one of the three coefficient domains.
#[derive(Clone, Debug)]
pub enum ApTable {
    Rational(BTreeMap<u64, Rational>),
    Cyclo {
        order: u64,
        map: BTreeMap<u64, CycloElement>,
    },
    Field {
        desc: FieldDescriptor,
        map: BTreeMap<u64, FieldElement>,
    },
}

/// Smallest-prime-factor sieve for `0 .. limit`.
fn spf_sieve(limit: usize) -> Vec<usize> {
    let mut spf: Vec<usize> = (0..limit).collect();
    let mut i = 2;
    while i * i < limit {
        if spf[i] == i {
            let mut j = i * i;
            while j < limit {
                if spf[j] == j {
                    spf[j] = i;
                }
                j += i;
            }
        }
        i += 1;
    }
    spf
}

/// Multiplicative expansion from prime eigenvalues: `a_1 = 1`, prime powers
/// by `a_{p^r} = a_p a_{p^{r-1}} - eps(p) p^{k-1} a_{p^{r-2}}`, coprime
/// indices by multiplication. `a_0` is 0.
fn hecke_expand<T: Ring>(
    b: usize,
    one: T,
    ap: &mut dyn FnMut(u64) -> Result<T>,
    eps_term: &mut dyn FnMut(u64) -> Result<T>,
) -> Result<Vec<T>> {
    let mut a: Vec<T> = Vec::with_capacity(b);
    a.push(one.rzero());
    if b == 1 {
        return Ok(a);
    }
    a.push(one);
    let spf = spf_sieve(b);
    for n in 2..b {
        let p = spf[n];
        // Split off the full power of p.
        let mut q = n;
        let mut m = 1;
        while q % p == 0 {
            q /= p;
            m *= p;
        }
        let value = if q == 1 {
            // n = p^r. For r = 1 the second term has no index to point at
            // and the formula degenerates to a_p * a_1.
            let t1 = ap(p as u64)?.rmul(&a[n / p]);
            if n >= p * p {
                let t2 = eps_term(p as u64)?.rmul(&a[n / (p * p)]);
                t1.radd(&t2.rneg())
            } else {
                t1
            }
        } else {
            a[m].rmul(&a[q])
        };
        a.push(value);
    }
    Ok(a)
}

/// Expand a full q-expansion to the requested precision from a table of
/// prime eigenvalues, a weight, and a nebentypus. Every prime below the
/// precision must be present. The series level is the character modulus,
/// and the constant term is 0 (the expansion is the normalised one).
///
/// The coefficient domain follows the table, with one promotion: a rational
/// table under a character of order above 2 yields cyclotomic coefficients.
/// A finite-field table requires the character's values to exist in that
/// field.
pub fn expand_from_eigenvalues(
    table: &ApTable,
    weight: u64,
    eps: &DirichletCharacter,
    precision: u64,
) -> Result<QExpansion> {
    if precision == 0 {
        return Err(Error::NotPositive("precision"));
    }
    if weight == 0 {
        return Err(Error::NotPositive("weight"));
    }
    let k_minus_1 = u32::try_from(weight - 1)
        .map_err(|_| Error::Unsupported(format!("weight {weight} out of range")))?;
    let b = precision as usize;
    let level = eps.modulus();
    let coeffs = match table {
        ApTable::Rational(map) if eps.value_order() <= 2 => {
            let mut ap = |p: u64| {
                map.get(&p)
                    .cloned()
                    .ok_or(Error::MissingEigenvalue(p))
            };
            let mut eps_term = |p: u64| {
                let pk = Rational::from_integer(BigInt::from(p).pow(k_minus_1));
                Ok(match eps.eval_exponent(p) {
                    None => Rational::zero(),
                    Some(0) => pk,
                    Some(_) => -pk,
                })
            };
            Coefficients::Rational(hecke_expand(b, Rational::one(), &mut ap, &mut eps_term)?)
        }
        ApTable::Rational(map) => {
            // Character values leave the rationals; promote the series.
            let order = eps.value_order();
            let mut ap = |p: u64| {
                map.get(&p)
                    .map(|r| CycloElement::rational(r.clone()))
                    .ok_or(Error::MissingEigenvalue(p))
            };
            let mut eps_term = |p: u64| {
                let pk = Rational::from_integer(BigInt::from(p).pow(k_minus_1));
                Ok(eps.value(p)?.scale(&pk))
            };
            Coefficients::Cyclo {
                order,
                coeffs: hecke_expand(b, CycloElement::one(), &mut ap, &mut eps_term)?,
            }
        }
        ApTable::Cyclo { order, map } => {
            let order = order.lcm(&eps.value_order());
            let mut ap = |p: u64| {
                map.get(&p)
                    .cloned()
                    .ok_or(Error::MissingEigenvalue(p))
            };
            let mut eps_term = |p: u64| {
                let pk = Rational::from_integer(BigInt::from(p).pow(k_minus_1));
                Ok(eps.value(p)?.scale(&pk))
            };
            Coefficients::Cyclo {
                order,
                coeffs: hecke_expand(b, CycloElement::one(), &mut ap, &mut eps_term)?,
            }
        }
        ApTable::Field { desc, map } => {
            let emb = Embedding::into_field(eps.value_order(), desc)?;
            let ell = desc.ell();
            let mut ap = |p: u64| {
                map.get(&p)
                    .cloned()
                    .ok_or(Error::MissingEigenvalue(p))
            };
            let mut eps_term = |p: u64| {
                let pk = desc.from_u64(primes::pow_mod(p % ell, weight - 1, ell));
                Ok(match eps.eval_exponent(p) {
                    None => desc.zero(),
                    Some(j) => emb.apply_exponent(j).checked_mul(&pk)?,
                })
            };
            Coefficients::Field {
                desc: desc.clone(),
                coeffs: hecke_expand(b, desc.one(), &mut ap, &mut eps_term)?,
            }
        }
    };
    QExpansion::new(coeffs, weight, level, eps.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{embedding_make, rat, rat_int};
    use crate::characters::char_make;

    fn rational_series(vals: &[i64], weight: u64, level: u64) -> QExpansion {
        let coeffs = Coefficients::Rational(vals.iter().map(|&v| rat_int(v)).collect());
        QExpansion::new(coeffs, weight, level, DirichletCharacter::trivial(1).unwrap()).unwrap()
    }

    fn rationals(series: &QExpansion) -> Vec<Rational> {
        match series.coefficients() {
            Coefficients::Rational(v) => v.clone(),
            other => panic!("expected rational coefficients, got {}", other.domain_name()),
        }
    }

    #[test]
    fn v_inserts_gaps() {
        let f = rational_series(&[7, 1, 2, 3, 4, 5], 2, 3);
        let g = f.op_v(2).unwrap();
        assert_eq!(g.precision(), 6);
        assert_eq!(g.level(), 6);
        assert_eq!(g.weight(), 2);
        let want: Vec<Rational> = [7, 0, 1, 0, 2, 0].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&g), want);
    }

    #[test]
    fn u_samples_multiples() {
        let f = rational_series(&[7, 1, 2, 3, 4, 5, 6], 2, 3);
        let g = f.op_u(2).unwrap();
        // Indices 0, 2, 4, 6 survive: floor(6/2) + 1 = 4 coefficients.
        assert_eq!(g.precision(), 4);
        assert_eq!(g.level(), 6);
        let want: Vec<Rational> = [7, 2, 4, 6].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&g), want);
    }

    #[test]
    fn u_after_v_is_identity_up_to_precision() {
        let f = rational_series(&[3, 1, 4, 1, 5, 9, 2, 6], 2, 5);
        let g = f.op_v(3).unwrap().op_u(3).unwrap();
        // V keeps precision 8, the composite U drops it to floor(7/3)+1 = 3.
        assert_eq!(g.precision(), 3);
        assert_eq!(rationals(&g), rationals(&f.truncate(3).unwrap()));
        assert_eq!(g.level(), 45);
    }

    #[test]
    fn pi_p_zeroes_one_prime() {
        let f = rational_series(&[9, 1, 2, 3, 4, 5, 6], 2, 12);
        let g = f.op_pi_p(2).unwrap();
        let want: Vec<Rational> = [0, 1, 0, 3, 0, 5, 0].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&g), want);
        // 4 divides 12 so the level does not move.
        assert_eq!(g.level(), 12);
        let h = f.op_pi_p(3).unwrap();
        assert_eq!(h.level(), 36);
        let want: Vec<Rational> = [0, 1, 2, 0, 4, 5, 0].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&h), want);
        assert!(matches!(
            f.op_pi_p(5),
            Err(Error::PrimeNotInLevel { p: 5, level: 12 })
        ));
        assert!(matches!(f.op_pi_p(4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn pi_filters_by_level_gcd() {
        let f = rational_series(&[9, 1, 2, 3, 4, 5, 6, 7], 2, 12);
        let g = f.op_pi().unwrap();
        // Only n coprime to 12 survive: 1, 5, 7.
        let want: Vec<Rational> = [0, 1, 0, 0, 0, 5, 0, 7].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&g), want);
        // 12 = 2^2 * 3: only 3 has multiplicity one.
        assert_eq!(g.level(), 36);
    }

    #[test]
    fn pi_is_composite_of_pi_p() {
        let f = rational_series(&[9, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11], 4, 6);
        let via_pi = f.op_pi().unwrap();
        let via_steps = f.op_pi_p(2).unwrap().op_pi_p(3).unwrap();
        assert_eq!(rationals(&via_pi), rationals(&via_steps));
        assert_eq!(via_pi.level(), via_steps.level());
    }

    #[test]
    fn theta_multiplies_by_index() {
        let emb = embedding_make(4, 5).unwrap();
        let f = rational_series(&[2, 1, 7, 3, 9], 2, 1)
            .reduce_mod_lambda(&emb)
            .unwrap();
        let g = f.op_theta().unwrap();
        assert_eq!(g.weight(), 2 + 5 + 1);
        assert_eq!(g.level(), 1);
        match g.coefficients() {
            Coefficients::Field { coeffs, .. } => {
                let vals: Vec<u64> = coeffs.iter().map(|c| c.coords()[0]).collect();
                // n * a_n mod 5: 0, 1, 14=4, 9=4, 36=1.
                assert_eq!(vals, vec![0, 1, 4, 4, 1]);
            }
            _ => panic!("theta output must be finite-field"),
        }
        let rational = rational_series(&[1, 2], 2, 1);
        assert!(matches!(
            rational.op_theta(),
            Err(Error::ThetaNeedsFiniteField)
        ));
    }

    #[test]
    fn add_checks_weight_and_character() {
        let f = rational_series(&[1, 2, 3], 2, 1);
        let g = rational_series(&[1, 1, 1], 4, 1);
        assert!(matches!(
            f.add(&g),
            Err(Error::WeightMismatch { left: 2, right: 4 })
        ));
        let chi = char_make(4, &[(2, 1)]).unwrap();
        let h = QExpansion::new(
            Coefficients::Rational(vec![rat_int(1), rat_int(1), rat_int(1)]),
            2,
            4,
            chi,
        )
        .unwrap();
        assert!(matches!(f.add(&h), Err(Error::CharacterMismatch)));
        let sum = f.add(&rational_series(&[10, 20, 30, 40], 2, 3)).unwrap();
        assert_eq!(sum.precision(), 3);
        assert_eq!(sum.level(), 3);
        let want: Vec<Rational> = [11, 22, 33].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&sum), want);
    }

    #[test]
    fn mixed_sum_is_marked() {
        let f = rational_series(&[1, 2, 3], 2, 1);
        let g = rational_series(&[1, 1, 1], 4, 1);
        let s = f.add_mixed(&g).unwrap();
        assert!(s.is_mixed_weight());
        assert_eq!(s.weight(), 4);
        // A marked series refuses plain addition against an unmarked one.
        assert!(f.add(&s).is_err());
        // Equal weights leave the sum unmarked.
        assert!(!f.add_mixed(&rational_series(&[1, 1, 1], 2, 1)).unwrap().is_mixed_weight());
    }

    #[test]
    fn squaring_a_binomial() {
        let f = rational_series(&[1, 1], 2, 1);
        let g = rational_series(&[1, 1, 0, 0], 3, 1);
        let sq = f.mul(&g).unwrap();
        assert_eq!(sq.weight(), 5);
        assert_eq!(sq.precision(), 2);
        let want: Vec<Rational> = [1, 2].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&sq), want);
    }

    #[test]
    fn rational_promotes_against_cyclotomic() {
        let f = rational_series(&[1, 2, 3], 2, 1);
        let i = CycloElement::root_of_unity(4, 1).unwrap();
        let g = QExpansion::new(
            Coefficients::Cyclo {
                order: 4,
                coeffs: vec![CycloElement::zero(), i.clone(), CycloElement::one()],
            },
            2,
            1,
            DirichletCharacter::trivial(1).unwrap(),
        )
        .unwrap();
        let s = f.add(&g).unwrap();
        match s.coefficients() {
            Coefficients::Cyclo { order, coeffs } => {
                assert_eq!(*order, 4);
                assert_eq!(coeffs[0], CycloElement::one());
                assert_eq!(coeffs[1], CycloElement::from_integer(2).add(&i).unwrap());
            }
            other => panic!("expected cyclotomic sum, got {}", other.domain_name()),
        }
        let ff = embedding_make(4, 5).unwrap();
        let h = f.reduce_mod_lambda(&ff).unwrap();
        assert!(matches!(
            h.add(&f),
            Err(Error::DomainMismatch {
                left: "finite-field",
                right: "rational",
            })
        ));
    }

    #[test]
    fn scaling_in_each_domain() {
        let f = rational_series(&[2, 4, 6], 2, 1);
        let half = f.scale_rational(&rat(1, 2)).unwrap();
        let want: Vec<Rational> = [1, 2, 3].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(rationals(&half), want);
        let emb = embedding_make(4, 5).unwrap();
        let reduced = f.reduce_mod_lambda(&emb).unwrap();
        let scaled = reduced.scale_rational(&rat(1, 2)).unwrap();
        match scaled.coefficients() {
            // 1/2 = 3 mod 5, so 2, 4, 6 scale to 1, 2, 3.
            Coefficients::Field { coeffs, .. } => {
                let vals: Vec<u64> = coeffs.iter().map(|c| c.coords()[0]).collect();
                assert_eq!(vals, vec![1, 2, 3]);
            }
            _ => panic!("scaling must not change the domain"),
        }
        assert!(matches!(
            reduced.scale_rational(&rat(1, 5)),
            Err(Error::NotEllIntegral { ell: 5, .. })
        ));
    }

    #[test]
    fn reduction_reports_the_failing_index() {
        let coeffs = Coefficients::Rational(vec![rat_int(1), rat_int(2), rat_int(3), rat(1, 5)]);
        let f = QExpansion::new(coeffs, 2, 1, DirichletCharacter::trivial(1).unwrap()).unwrap();
        let emb = embedding_make(4, 5).unwrap();
        match f.reduce_mod_lambda(&emb) {
            Err(Error::NotEllIntegral { ell: 5, index: Some(3) }) => {}
            other => panic!("expected failure at index 3, got {other:?}"),
        }
    }

    #[test]
    fn reduction_is_identity_on_matching_field() {
        let emb = embedding_make(4, 5).unwrap();
        let f = rational_series(&[1, 2, 3], 2, 1).reduce_mod_lambda(&emb).unwrap();
        assert_eq!(f.reduce_mod_lambda(&emb).unwrap(), f);
        let other = embedding_make(8, 3).unwrap();
        assert!(matches!(
            f.reduce_mod_lambda(&other),
            Err(Error::DescriptorMismatch { .. })
        ));
    }

    #[test]
    fn hecke_expansion_of_a_rational_table() {
        // a_2 = -24, a_3 = 252, a_5 = 4830 with weight 12 and trivial
        // character: the recursion gives a_4 = 576 - 2048 = -1472 and
        // a_6 = -24 * 252 = -6048.
        let mut map = BTreeMap::new();
        map.insert(2, rat_int(-24));
        map.insert(3, rat_int(252));
        map.insert(5, rat_int(4830));
        map.insert(7, rat_int(-16744));
        let table = ApTable::Rational(map);
        let f = expand_from_eigenvalues(&table, 12, &DirichletCharacter::trivial(1).unwrap(), 9).unwrap();
        let want: Vec<Rational> = [0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480]
            .iter()
            .map(|&v| rat_int(v))
            .collect();
        assert_eq!(rationals(&f), want);
        assert_eq!(f.level(), 1);
        assert_eq!(f.weight(), 12);
    }

    #[test]
    fn hecke_expansion_requires_all_primes() {
        let mut map = BTreeMap::new();
        map.insert(2, rat_int(-24));
        let table = ApTable::Rational(map);
        assert!(matches!(
            expand_from_eigenvalues(&table, 12, &DirichletCharacter::trivial(1).unwrap(), 4),
            Err(Error::MissingEigenvalue(3))
        ));
        // Precision 3 never asks for a_3.
        assert!(
            expand_from_eigenvalues(&table, 12, &DirichletCharacter::trivial(1).unwrap(), 3).is_ok()
        );
    }

    #[test]
    fn hecke_expansion_with_quadratic_character() {
        // Level 4 weight 3 with the odd quadratic character mod 4. At the
        // level prime eps(2) = 0, so a_4 = a_2^2.
        let chi = char_make(4, &[(2, 1)]).unwrap();
        let mut map = BTreeMap::new();
        map.insert(2, rat_int(-2));
        map.insert(3, rat_int(0));
        map.insert(5, rat_int(2));
        map.insert(7, rat_int(-6));
        let table = ApTable::Rational(map);
        let f = expand_from_eigenvalues(&table, 3, &chi, 10).unwrap();
        assert_eq!(f.level(), 4);
        // a_9 = a_3^2 - eps(3) * 3^2 * a_1 = 0 - (-1) * 9 = 9.
        let got = rationals(&f);
        assert_eq!(got[4], rat_int(4));
        assert_eq!(got[9], rat_int(9));
        assert_eq!(got[6], rat_int(0));
    }

    #[test]
    fn hecke_expansion_promotes_under_quartic_character() {
        let chi = char_make(5, &[(4, 1)]).unwrap();
        let mut map = BTreeMap::new();
        for p in [2u64, 3, 5, 7] {
            map.insert(p, rat_int(1));
        }
        let table = ApTable::Rational(map);
        let f = expand_from_eigenvalues(&table, 2, &chi, 8).unwrap();
        match f.coefficients() {
            Coefficients::Cyclo { order, coeffs } => {
                assert_eq!(*order, 4);
                // a_4 = a_2^2 - eps(2) * 2 = 1 - 2i.
                let i = CycloElement::root_of_unity(4, 1).unwrap();
                let want = CycloElement::one().sub(&i.scale(&rat_int(2))).unwrap();
                assert_eq!(coeffs[4], want);
            }
            other => panic!("expected promotion to cyclotomic, got {}", other.domain_name()),
        }
    }

    #[test]
    fn hecke_expansion_in_a_finite_field() {
        // The same eigenvalues reduced mod 5 must reproduce the rational
        // expansion reduced mod 5.
        let emb = embedding_make(4, 5).unwrap();
        let desc = emb.field().clone();
        let mut rmap = BTreeMap::new();
        rmap.insert(2, rat_int(-24));
        rmap.insert(3, rat_int(252));
        rmap.insert(5, rat_int(4830));
        rmap.insert(7, rat_int(-16744));
        let rational = expand_from_eigenvalues(
            &ApTable::Rational(rmap.clone()),
            12,
            &DirichletCharacter::trivial(1).unwrap(),
            9,
        )
        .unwrap();
        let mut fmap = BTreeMap::new();
        for (p, v) in &rmap {
            fmap.insert(*p, desc.from_u64(cyclo_reduce_rational(v, 5).unwrap()));
        }
        let field = expand_from_eigenvalues(
            &ApTable::Field { desc, map: fmap },
            12,
            &DirichletCharacter::trivial(1).unwrap(),
            9,
        )
        .unwrap();
        assert_eq!(rational.reduce_mod_lambda(&emb).unwrap(), field);
    }

    #[test]
    fn truncation_bounds() {
        let f = rational_series(&[1, 2, 3], 2, 1);
        assert_eq!(f.truncate(2).unwrap().precision(), 2);
        assert!(matches!(
            f.truncate(5),
            Err(Error::PrecisionTooSmall { required: 5, actual: 3 })
        ));
        assert!(f.truncate(0).is_err());
    }

    #[test]
    fn rendering_matches_file_syntax() {
        let f = rational_series(&[1, 2], 2, 1);
        assert_eq!(f.coefficients().render(0).unwrap(), "1/1");
        let i = CycloElement::root_of_unity(4, 1).unwrap();
        let g = QExpansion::new(
            Coefficients::Cyclo {
                order: 4,
                // A low-order element renders raised to the ambient order.
                coeffs: vec![CycloElement::from_integer(3), i],
            },
            2,
            1,
            DirichletCharacter::trivial(1).unwrap(),
        )
        .unwrap();
        assert_eq!(g.coefficients().render(0).unwrap(), "[3/1,0/1]@4");
        assert_eq!(g.coefficients().render(1).unwrap(), "[0/1,1/1]@4");
        assert!(g.coefficients().render(2).is_none());
    }
}
