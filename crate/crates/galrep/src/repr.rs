//! Sources of two-dimensional mod-l representations and the extraction of
//! Frobenius characteristic-polynomial data from them.
//!
//! A source is either an eigenform (level, weight, nebentypus, and a table
//! of prime eigenvalues, given exactly or already reduced) or a reducible
//! sum of two character twists of powers of the cyclotomic character. Both
//! produce, at each allowed prime, the trace and determinant of Frobenius
//! in the residue field of a caller-chosen embedding; comparisons are only
//! meaningful when both sides go through the same embedding.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::arith::primes;
use crate::arith::{cyclo_reduce, CycloElement, Embedding, FieldDescriptor, FieldElement};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

/// Prime eigenvalue table of an eigenform.
///
/// The variants are the two ingestion paths: values already reduced into
/// one finite field, or exact cyclotomic values reduced at comparison time
/// through the comparison's embedding. `min_order` lets exact data pin a
/// lower bound on that embedding's order, so a dataset reduces the same
/// way regardless of which subset of it is loaded.
#[derive(Clone, Debug)]
pub enum EigenTable {
    Reduced {
        desc: FieldDescriptor,
        map: BTreeMap<u64, FieldElement>,
    },
    Exact {
        min_order: u64,
        map: BTreeMap<u64, CycloElement>,
    },
}

/// An eigenform source: level, weight, nebentypus, and prime eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenformData {
    level: u64,
    weight: u64,
    character: DirichletCharacter,
    ap: EigenTable,
}

impl EigenformData {
    /// Validate and assemble. The character modulus must divide the level;
    /// table keys must be prime; reduced values must all carry the table's
    /// descriptor; an exact table must pin a positive order.
    pub fn new(
        level: u64,
        weight: u64,
        character: DirichletCharacter,
        ap: EigenTable,
    ) -> Result<EigenformData> {
        if level == 0 {
            return Err(Error::NotPositive("level"));
        }
        if weight == 0 {
            return Err(Error::NotPositive("weight"));
        }
        if level % character.modulus() != 0 {
            return Err(Error::BadCharacter {
                modulus: character.modulus(),
                detail: format!("character modulus must divide the level {level}"),
            });
        }
        match &ap {
            EigenTable::Reduced { desc, map } => {
                for (&p, v) in map {
                    if !primes::is_prime(p) {
                        return Err(Error::NotPrime(p));
                    }
                    if v.descriptor() != desc {
                        return Err(Error::DescriptorMismatch {
                            left: desc.describe(),
                            right: v.descriptor().describe(),
                        });
                    }
                }
            }
            EigenTable::Exact { min_order, map } => {
                if *min_order == 0 {
                    return Err(Error::NotPositive("embedding order"));
                }
                for &p in map.keys() {
                    if !primes::is_prime(p) {
                        return Err(Error::NotPrime(p));
                    }
                }
            }
        }
        Ok(EigenformData {
            level,
            weight,
            character,
            ap,
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn table(&self) -> &EigenTable {
        &self.ap
    }
}

/// A reducible source: the direct sum of `psi` times the `a`-th power of
/// the cyclotomic character and `phi` times the `b`-th power.
#[derive(Clone, Debug)]
pub struct ReducibleData {
    psi: DirichletCharacter,
    phi: DirichletCharacter,
    a: u64,
    b: u64,
    ell: u64,
}

impl ReducibleData {
    /// Validate and assemble. The characters must be tame at `ell`: their
    /// moduli may contain at most one factor of `ell` and their value
    /// orders must be coprime to it. The exponents are normalised into
    /// `[0, ell - 2]`.
    pub fn new(
        psi: DirichletCharacter,
        phi: DirichletCharacter,
        a: u64,
        b: u64,
        ell: u64,
    ) -> Result<ReducibleData> {
        if !primes::is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        for chi in [&psi, &phi] {
            let m = chi.modulus();
            if let Some(sq) = ell.checked_mul(ell) {
                if m % sq == 0 {
                    return Err(Error::WildCharacter { modulus: m, ell });
                }
            }
            let order = chi.value_order();
            if order % ell == 0 {
                return Err(Error::ValueOrderDivisibleByEll { order, ell });
            }
        }
        let span = ell - 1;
        let (a, b) = if span == 0 {
            (0, 0)
        } else {
            (a % span, b % span)
        };
        Ok(ReducibleData {
            psi,
            phi,
            a,
            b,
            ell,
        })
    }

    pub fn psi(&self) -> &DirichletCharacter {
        &self.psi
    }

    pub fn phi(&self) -> &DirichletCharacter {
        &self.phi
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }
}

/// One source of a two-dimensional mod-l representation.
#[derive(Clone, Debug)]
pub enum ReprSource {
    Eigenform(EigenformData),
    Reducible(ReducibleData),
}

/// Trace and determinant of Frobenius at one prime, in the residue field
/// of the embedding the extraction ran through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPolyData {
    pub p: u64,
    pub trace: FieldElement,
    pub det: FieldElement,
}

fn prime_to_ell_part(mut n: u64, ell: u64) -> u64 {
    while n % ell == 0 {
        n /= ell;
    }
    n
}

impl ReprSource {
    /// Smallest root-of-unity order an embedding must support to reduce
    /// every value this source can produce.
    pub fn required_embedding_order(&self) -> u64 {
        match self {
            ReprSource::Eigenform(data) => {
                let mut order = data.character.value_order();
                if let EigenTable::Exact { min_order, map } = &data.ap {
                    order = order.lcm(min_order);
                    for v in map.values() {
                        order = order.lcm(&v.order());
                    }
                }
                order
            }
            ReprSource::Reducible(data) => {
                data.psi.value_order().lcm(&data.phi.value_order())
            }
        }
    }

    /// Primes this source cannot evaluate: divisors of `ell` times the
    /// level (eigenform) or of `ell` times both character moduli
    /// (reducible).
    fn excluded_modulus(&self, ell: u64) -> Result<u64> {
        let base = match self {
            ReprSource::Eigenform(data) => data.level,
            ReprSource::Reducible(data) => data
                .psi
                .modulus()
                .checked_mul(data.phi.modulus())
                .ok_or_else(|| Error::Unsupported("level overflow".into()))?,
        };
        ell.checked_mul(base)
            .ok_or_else(|| Error::Unsupported("level overflow".into()))
    }
}

/// Reject primes the source cannot evaluate through this embedding.
fn check_frob_prime(src: &ReprSource, p: u64, emb: &Embedding) -> Result<()> {
    if !primes::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let ell = emb.field().ell();
    let excluded = src.excluded_modulus(ell)?;
    if excluded % p == 0 {
        return Err(Error::BadPrime { p, excluded });
    }
    let source_ell = match src {
        ReprSource::Reducible(data) => Some(data.ell),
        ReprSource::Eigenform(data) => match &data.ap {
            EigenTable::Reduced { desc, .. } => Some(desc.ell()),
            EigenTable::Exact { .. } => None,
        },
    };
    if let Some(expected) = source_ell {
        if expected != ell {
            return Err(Error::EllMismatch {
                expected,
                found: ell,
            });
        }
    }
    Ok(())
}

/// Determinant of Frobenius at `p` alone, reduced through `emb`.
///
/// Unlike the trace, the determinant needs no eigenvalue table: it is
/// `eps(p) p^(k-1)` for an eigenform and `(psi phi)(p) p^(a+b)` for a
/// reducible source, so it stays computable where `a_p` data is missing.
pub fn frob_det(src: &ReprSource, p: u64, emb: &Embedding) -> Result<FieldElement> {
    check_frob_prime(src, p, emb)?;
    let desc = emb.field();
    let ell = desc.ell();
    let pbar = desc.from_u64(p % ell);
    match src {
        ReprSource::Reducible(data) => {
            let psi_p = data.psi.value_in_field(p, emb)?;
            let phi_p = data.phi.value_in_field(p, emb)?;
            let chars = psi_p.checked_mul(&phi_p)?;
            chars.checked_mul(&pbar.pow(data.a + data.b))
        }
        ReprSource::Eigenform(data) => {
            let eps_p = data.character.value_in_field(p, emb)?;
            eps_p.checked_mul(&pbar.pow(data.weight - 1))
        }
    }
}

/// Trace and determinant of Frobenius at `p`, reduced through `emb`.
///
/// For an eigenform the pair is `(a_p, eps(p) p^(k-1))`; for a reducible
/// source `(psi(p) p^a + phi(p) p^b, (psi phi)(p) p^(a+b))`, the
/// cyclotomic character evaluating to `p` itself. The prime must avoid
/// `ell` and the ramified primes of the source.
pub fn frob_charpoly(src: &ReprSource, p: u64, emb: &Embedding) -> Result<CharPolyData> {
    check_frob_prime(src, p, emb)?;
    let desc = emb.field();
    let ell = desc.ell();
    match src {
        ReprSource::Reducible(data) => {
            let pbar = desc.from_u64(p % ell);
            let psi_p = data.psi.value_in_field(p, emb)?;
            let phi_p = data.phi.value_in_field(p, emb)?;
            let left = psi_p.checked_mul(&pbar.pow(data.a))?;
            let right = phi_p.checked_mul(&pbar.pow(data.b))?;
            Ok(CharPolyData {
                p,
                trace: left.checked_add(&right)?,
                det: left.checked_mul(&right)?,
            })
        }
        ReprSource::Eigenform(data) => {
            let trace = match &data.ap {
                EigenTable::Reduced { desc: have, map } => {
                    let value = map.get(&p).ok_or(Error::MissingEigenvalue(p))?;
                    if have == desc {
                        value.clone()
                    } else if have.degree() == 1 {
                        value.lift_into(desc)?
                    } else {
                        return Err(Error::DescriptorMismatch {
                            left: have.describe(),
                            right: desc.describe(),
                        });
                    }
                }
                EigenTable::Exact { map, .. } => {
                    let value = map.get(&p).ok_or(Error::MissingEigenvalue(p))?;
                    cyclo_reduce(value, emb)?
                }
            };
            let pbar = desc.from_u64(p % ell);
            let eps_p = data.character.value_in_field(p, emb)?;
            let det = eps_p.checked_mul(&pbar.pow(data.weight - 1))?;
            Ok(CharPolyData { p, trace, det })
        }
    }
}

/// Whether the source is odd, meaning complex conjugation has determinant
/// -1. For a reducible source this reads `(psi phi)(-1) (-1)^(a+b) = -1`;
/// in characteristic 2 the condition is vacuous and every source counts as
/// odd. For an eigenform the sign is `eps(-1) (-1)^(k-1)`, a parity
/// statement not involving `ell`; the characteristic-2 exemption for
/// eigenforms is applied by the comparison driver, which knows `ell`.
pub fn oddness_check(src: &ReprSource) -> Result<bool> {
    match src {
        ReprSource::Reducible(data) => {
            if data.ell == 2 {
                return Ok(true);
            }
            let char_odd = data.psi.product(&data.phi)?.is_odd();
            let power_odd = (data.a + data.b) % 2 == 1;
            Ok(char_odd != power_odd)
        }
        ReprSource::Eigenform(data) => {
            Ok(data.character.is_odd() == (data.weight % 2 == 1))
        }
    }
}

/// Artin conductor of a reducible source: the prime-to-`ell` part of the
/// product of the two character conductors.
pub fn artin_conductor_reducible(data: &ReducibleData) -> Result<u64> {
    let product = data
        .psi
        .conductor()
        .checked_mul(data.phi.conductor())
        .ok_or_else(|| Error::Unsupported("conductor overflow".into()))?;
    Ok(prime_to_ell_part(product, data.ell))
}

/// Whether the source fits under the claimed conductor bound `N` for a
/// comparison at `ell`: the reducible Artin conductor must divide `N`, and
/// an eigenform's level must divide it after discarding factors of `ell`.
pub fn repr_validate(src: &ReprSource, n: u64, ell: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::NotPositive("conductor bound"));
    }
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    match src {
        ReprSource::Reducible(data) => {
            if data.ell != ell {
                return Err(Error::EllMismatch {
                    expected: ell,
                    found: data.ell,
                });
            }
            Ok(n % artin_conductor_reducible(data)? == 0)
        }
        ReprSource::Eigenform(data) => Ok(n % prime_to_ell_part(data.level, ell) == 0),
    }
}
