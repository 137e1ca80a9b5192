//! Dirichlet characters presented by generator images.
//!
//! The unit group mod `N` is a product of cyclic groups with a canonical
//! generating set: for each odd prime power `p^e || N` the smallest primitive
//! root mod `p^e`, and for the 2-part either nothing (2), the class of 3 (4),
//! or the pair `-1, 5` (8 and above), every generator lifted to a residue
//! mod `N` that is 1 at the other prime powers, primes in ascending order. A
//! character is stored as its modulus plus one root of unity `zeta_m^e` per
//! generator, each pair reduced to lowest terms, so two characters are equal
//! exactly when their stored data agree.
//!
//! Values are exponents of `zeta_L`, with `L` the least common multiple of
//! the image orders; [`DirichletCharacter::value`] materialises them as
//! cyclotomic numbers. Evaluation uses a table filled by walking all
//! generator exponent tuples once, so no discrete logarithm is ever taken.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;

use crate::arith::primes;
use crate::arith::{CycloElement, Embedding, FieldElement};
use crate::error::{Error, Result};

/// Largest supported character modulus. The evaluation table is a vector
/// indexed by residues, so the modulus bounds both memory and table build
/// time.
pub const MAX_CHARACTER_MODULUS: u64 = 1 << 20;

/// One canonical generator of the unit group: a residue and its
/// multiplicative order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharGenerator {
    pub residue: u64,
    pub order: u64,
}

/// Combine congruences `x = r_i mod m_i` over pairwise coprime moduli.
fn crt(parts: &[(u64, u64)]) -> u64 {
    let mut x: u64 = 0;
    let mut modulus: u64 = 1;
    for &(r, m) in parts {
        let inv = primes::inv_mod(modulus % m, m).expect("moduli pairwise coprime");
        let diff = (r as u128 + m as u128 - x as u128 % m as u128) % m as u128;
        let t = (diff * inv as u128) % m as u128;
        x += (modulus as u128 * t) as u64;
        modulus *= m;
    }
    x
}

fn smallest_primitive_root(pe: u64, phi: u64) -> u64 {
    let mut a = 2;
    loop {
        if a.gcd(&pe) == 1 && primes::multiplicative_order(a, pe) == phi {
            return a;
        }
        a += 1;
    }
}

/// The canonical generators of the units mod `modulus`, ascending by prime.
pub fn generator_data(modulus: u64) -> Result<Vec<CharGenerator>> {
    if modulus == 0 {
        return Err(Error::NotPositive("character modulus"));
    }
    if modulus > MAX_CHARACTER_MODULUS {
        return Err(Error::BadCharacter {
            modulus,
            detail: format!("modulus above the table cap {MAX_CHARACTER_MODULUS}"),
        });
    }
    let factorisation = primes::factor(modulus);
    let mut out = Vec::new();
    for &(p, e) in &factorisation {
        let pe = p.pow(e);
        // Local generators of the units mod p^e.
        let locals: Vec<(u64, u64)> = if p == 2 {
            match e {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(pe - 1, 2), (5, 1 << (e - 2))],
            }
        } else {
            let phi = (p - 1) * p.pow(e - 1);
            vec![(smallest_primitive_root(pe, phi), phi)]
        };
        for (g, order) in locals {
            let parts: Vec<(u64, u64)> = factorisation
                .iter()
                .map(|&(q, f)| if q == p { (g, pe) } else { (1, q.pow(f)) })
                .collect();
            out.push(CharGenerator {
                residue: crt(&parts),
                order,
            });
        }
    }
    Ok(out)
}

/// Reduce an exponent of `zeta_L` to a root of unity in lowest terms.
fn canonical_pair(j: u64, l: u64) -> (u64, u64) {
    let j = j % l;
    if j == 0 {
        (1, 0)
    } else {
        let g = j.gcd(&l);
        (l / g, j / g)
    }
}

struct CharInner {
    modulus: u64,
    generators: Vec<CharGenerator>,
    /// Canonical image pairs `(m, e)`: the i-th generator maps to
    /// `zeta_m^e` with `gcd(e, m) = 1`, or `(1, 0)` for image 1.
    images: Vec<(u64, u64)>,
    /// lcm of the image orders.
    value_order: u64,
    /// Residue -> exponent of `zeta_{value_order}`; `u64::MAX` marks
    /// non-units. Filled on first evaluation.
    table: OnceLock<Vec<u64>>,
}

/// A Dirichlet character, cheap to clone. Equality compares modulus and
/// generator images.
#[derive(Clone)]
pub struct DirichletCharacter {
    inner: Arc<CharInner>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.inner.modulus == other.inner.modulus && self.inner.images == other.inner.images
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "character mod {} with images {:?}",
            self.inner.modulus, self.inner.images
        )
    }
}

/// Build a character from one image per canonical generator, as exponent
/// pairs: `images[i] = (m, e)` sends generator i to `zeta_m^e`. Pairs are
/// reduced; each reduced order must divide the generator's order.
pub fn char_make(modulus: u64, images: &[(u64, u64)]) -> Result<DirichletCharacter> {
    let generators = generator_data(modulus)?;
    if images.len() != generators.len() {
        return Err(Error::BadCharacter {
            modulus,
            detail: format!(
                "expected {} generator images, got {}",
                generators.len(),
                images.len()
            ),
        });
    }
    let mut canonical = Vec::with_capacity(images.len());
    for (&(m, e), gen) in images.iter().zip(&generators) {
        if m == 0 {
            return Err(Error::BadCharacter {
                modulus,
                detail: "image order 0".into(),
            });
        }
        let pair = canonical_pair(e % m, m);
        if gen.order % pair.0 != 0 {
            return Err(Error::BadCharacter {
                modulus,
                detail: format!(
                    "image of order {} at a generator of order {}",
                    pair.0, gen.order
                ),
            });
        }
        canonical.push(pair);
    }
    let value_order = canonical.iter().fold(1u64, |acc, &(m, _)| acc.lcm(&m));
    Ok(DirichletCharacter {
        inner: Arc::new(CharInner {
            modulus,
            generators,
            images: canonical,
            value_order,
            table: OnceLock::new(),
        }),
    })
}

impl DirichletCharacter {
    /// The trivial character of the given modulus.
    pub fn trivial(modulus: u64) -> Result<DirichletCharacter> {
        let generators = generator_data(modulus)?;
        let images = vec![(1, 0); generators.len()];
        char_make(modulus, &images)
    }

    pub fn modulus(&self) -> u64 {
        self.inner.modulus
    }

    /// Order of the cyclotomic field the values generate: the lcm of the
    /// image orders.
    pub fn value_order(&self) -> u64 {
        self.inner.value_order
    }

    pub fn generators(&self) -> &[CharGenerator] {
        &self.inner.generators
    }

    /// Canonical image pairs, one per generator.
    pub fn images(&self) -> &[(u64, u64)] {
        &self.inner.images
    }

    pub fn is_trivial(&self) -> bool {
        self.inner.value_order == 1
    }

    fn table(&self) -> &[u64] {
        self.inner.table.get_or_init(|| {
            let n = self.inner.modulus;
            let l = self.inner.value_order;
            let mut table = vec![u64::MAX; n as usize];
            // Walk every generator exponent tuple, carrying the residue and
            // the accumulated value exponent.
            let mut classes: Vec<(u64, u64)> = vec![(1 % n, 0)];
            for (gen, &(m, e)) in self.inner.generators.iter().zip(&self.inner.images) {
                let step = if m == 1 { 0 } else { e * (l / m) % l };
                let mut next = Vec::with_capacity(classes.len() * gen.order as usize);
                let mut gpow: u64 = 1 % n;
                let mut contrib: u64 = 0;
                for _ in 0..gen.order {
                    for &(res, ex) in &classes {
                        next.push((primes::mul_mod(res, gpow, n), (ex + contrib) % l));
                    }
                    gpow = primes::mul_mod(gpow, gen.residue, n);
                    contrib = (contrib + step) % l;
                }
                classes = next;
            }
            for (res, ex) in classes {
                debug_assert_eq!(table[res as usize], u64::MAX, "unit hit twice");
                table[res as usize] = ex;
            }
            table
        })
    }

    /// The value at `n` as an exponent of `zeta_{value_order}`; `None` off
    /// the units (where the value is 0).
    pub fn eval_exponent(&self, n: u64) -> Option<u64> {
        let v = self.table()[(n % self.inner.modulus) as usize];
        (v != u64::MAX).then_some(v)
    }

    /// The value at `n` as a cyclotomic number (0 off the units).
    pub fn value(&self, n: u64) -> Result<CycloElement> {
        match self.eval_exponent(n) {
            None => Ok(CycloElement::zero()),
            Some(j) => CycloElement::root_of_unity(self.inner.value_order, j),
        }
    }

    /// The value at `n` reduced into the residue field of an embedding
    /// whose order the value order must divide.
    pub fn value_in_field(&self, n: u64, emb: &Embedding) -> Result<FieldElement> {
        match self.eval_exponent(n) {
            None => Ok(emb.field().zero()),
            Some(j) => Ok(emb.restrict(self.inner.value_order)?.apply_exponent(j)),
        }
    }

    /// Sign at -1: odd characters take the value -1 there.
    pub fn is_odd(&self) -> bool {
        let n = self.inner.modulus;
        if n <= 2 {
            return false;
        }
        // The value at -1 squares to 1, so its exponent is 0 or L/2.
        self.eval_exponent(n - 1).expect("-1 is a unit") != 0
    }

    /// Smallest modulus the character factors through.
    pub fn conductor(&self) -> u64 {
        let n = self.inner.modulus;
        'candidates: for f in primes::divisors(n) {
            // Factors through mod f iff the value is 1 on every unit that is
            // 1 mod f.
            for a in (1..n).step_by(f as usize) {
                if a.gcd(&n) == 1 && self.eval_exponent(a) != Some(0) {
                    continue 'candidates;
                }
            }
            return f;
        }
        n
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.inner.modulus
    }

    /// The primitive character of conductor `f` inducing this one.
    pub fn primitive_part(&self) -> Result<DirichletCharacter> {
        let f = self.conductor();
        if f == self.inner.modulus {
            return Ok(self.clone());
        }
        let factorisation = primes::factor(self.inner.modulus);
        let gens = generator_data(f)?;
        let mut images = Vec::with_capacity(gens.len());
        for gen in &gens {
            // A unit mod N congruent to the generator mod f: agree at the
            // prime powers dividing f, be 1 at the rest.
            let parts: Vec<(u64, u64)> = factorisation
                .iter()
                .map(|&(q, e)| {
                    let qe = q.pow(e);
                    if f % q == 0 {
                        (gen.residue % qe, qe)
                    } else {
                        (1, qe)
                    }
                })
                .collect();
            let lift = crt(&parts);
            let j = self.eval_exponent(lift).expect("unit by construction");
            images.push(canonical_pair(j, self.inner.value_order));
        }
        char_make(f, &images)
    }

    /// Pointwise product, defined on the lcm of the moduli.
    pub fn product(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        let n = self.inner.modulus.lcm(&other.inner.modulus);
        let gens = generator_data(n)?;
        let l1 = self.inner.value_order;
        let l2 = other.inner.value_order;
        let l = l1.lcm(&l2);
        let mut images = Vec::with_capacity(gens.len());
        for gen in &gens {
            let j1 = self
                .eval_exponent(gen.residue)
                .expect("unit mod lcm is a unit mod each factor");
            let j2 = other.eval_exponent(gen.residue).expect("unit");
            let j = (j1 * (l / l1) + j2 * (l / l2)) % l;
            images.push(canonical_pair(j, l));
        }
        char_make(n, &images)
    }
}

/// All characters of the given modulus, in the deterministic order that
/// steps the last generator's image exponent fastest.
pub fn enumerate(modulus: u64) -> Result<Vec<DirichletCharacter>> {
    let gens = generator_data(modulus)?;
    let mut out = Vec::new();
    let r = gens.len();
    let mut exps = vec![0u64; r];
    loop {
        let images: Vec<(u64, u64)> = gens
            .iter()
            .zip(&exps)
            .map(|(g, &e)| canonical_pair(e, g.order))
            .collect();
        out.push(char_make(modulus, &images)?);
        // Odometer, last position fastest.
        let mut i = r;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < gens[i].order {
                break;
            }
            exps[i] = 0;
        }
    }
}
