//! Reduction maps from roots of unity to finite fields.
//!
//! Comparing characteristic polynomials mod l requires a fixed place above l:
//! a choice of where the abstract primitive m-th root of unity lands in
//! characteristic l. The choice here is canonical and reproducible: work in
//! `F_{l^k}` for `k = ord(l mod m)`, take the first multiplicative generator
//! `g` in the deterministic element order, and send the m-th root to
//! `g^((l^k - 1)/m)`.
//!
//! Two embeddings are compatible exactly when they live in the same field
//! (powers of one generator); embeddings built independently at different
//! orders generally are not. Callers that mix orders must build one
//! embedding at the least common multiple and derive the rest from it.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::field::{ext_field_make, FieldDescriptor, FieldElement, MAX_DEGREE};
use super::primes;
use crate::error::{Error, Result};

/// A fixed image of the primitive `order`-th root of unity in a finite field
/// of characteristic coprime to `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    order: u64,
    root: FieldElement,
}

/// Construct the canonical embedding of the `m`-th roots of unity in
/// characteristic `ell`: the target field is `F_{l^k}` with
/// `k = ord(ell mod m)`, built with the deterministic modulus.
///
/// Requires `gcd(m, ell) = 1`. Frozen small cases: `m = 4, ell = 5` sends
/// the root to `2` in `F_5`; `m = 3, ell = 2` sends it to `t` in
/// `F_4 = F_2[t]/(t^2 + t + 1)`.
pub fn embedding_make(m: u64, ell: u64) -> Result<Embedding> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if m == 0 {
        return Err(Error::NotPositive("root-of-unity order"));
    }
    if m > 1 && m.gcd(&ell) != 1 {
        return Err(Error::EllDividesOrder { m, ell });
    }
    // Orders 1 and 2 land in the prime field with no generator search: the
    // only square roots of 1 are 1 and -1, so the general formula would
    // produce the same images.
    if m <= 2 {
        let desc = FieldDescriptor::prime_field(ell)?;
        let root = if m == 1 { desc.one() } else { desc.minus_one() };
        return Ok(Embedding { order: m, root });
    }
    let k = primes::multiplicative_order(ell % m, m);
    if k > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: k,
            max: MAX_DEGREE,
        });
    }
    let desc = ext_field_make(ell, k)?;
    Embedding::into_field(m, &desc)
}

/// First multiplicative generator of the field in the deterministic element
/// order.
pub fn first_generator(desc: &FieldDescriptor) -> Result<FieldElement> {
    let group_order = desc.size() - BigUint::one();
    let prime_factors: Vec<BigUint> = primes::factor_big(&group_order)?
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let mut counter: u128 = 1;
    loop {
        let candidate = desc.element_at(counter);
        if candidate.is_generator(&group_order, &prime_factors) {
            return Ok(candidate);
        }
        counter += 1;
    }
}

impl Embedding {
    /// Embed the `m`-th roots of unity into an already-chosen field, using
    /// that field's first generator. Embeddings built this way into the same
    /// field are mutually compatible: for `m1 | m2` the `m1`-image is the
    /// `(m2/m1)`-th power of the `m2`-image.
    pub fn into_field(m: u64, desc: &FieldDescriptor) -> Result<Embedding> {
        if m == 0 {
            return Err(Error::NotPositive("root-of-unity order"));
        }
        let group_order = desc.size() - BigUint::one();
        if !(&group_order % m).is_zero() {
            return Err(Error::NoRootOfUnity {
                m,
                q: desc.describe(),
            });
        }
        if m == 1 {
            return Ok(Embedding {
                order: 1,
                root: desc.one(),
            });
        }
        if m == 2 {
            return Ok(Embedding {
                order: 2,
                root: desc.minus_one(),
            });
        }
        let g = first_generator(desc)?;
        let root = g.pow_big(&(&group_order / m));
        Ok(Embedding { order: m, root })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn root(&self) -> &FieldElement {
        &self.root
    }

    pub fn field(&self) -> &FieldDescriptor {
        self.root.descriptor()
    }

    /// Image of the `e`-th power of the root.
    pub fn apply_exponent(&self, e: u64) -> FieldElement {
        self.root.pow(e % self.order.max(1))
    }

    /// The compatible embedding of the `m`-th roots for `m | order`, realised
    /// inside the same field.
    pub fn restrict(&self, m: u64) -> Result<Embedding> {
        if m == 0 || self.order % m != 0 {
            return Err(Error::IncompatibleOrder {
                order: m,
                embedding_order: self.order,
            });
        }
        Ok(Embedding {
            order: m,
            root: self.root.pow(self.order / m),
        })
    }
}
