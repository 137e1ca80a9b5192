//! Eisenstein q-expansions attached to a pair of Dirichlet characters, the
//! dilated variants used to raise the level, the reduced twists realising
//! reducible two-dimensional representations, and the discriminant cusp
//! form kept as an exact cross-check series.
//!
//! The series for weight `k` and characters `psi` mod `u`, `phi` mod `v`
//! has constant term `delta(psi) L(1-k, phi)` (where `delta` is 1 exactly
//! when `psi` is primitive, the trivial character mod 1 included) and
//! `n`-th coefficient twice the twisted divisor sum [`sigma_twisted`]. The
//! weight-2 series for two trivial characters is not a modular form by
//! itself and is only ever exposed inside the dilated combination
//! `E_2 - t V(t) E_2`.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;

use crate::arith::primes;
use crate::arith::{
    embedding_make, lvalue_at_nonpositive, rat, rat_int, CycloElement, Rational,
};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::qexp::{Coefficients, QExpansion};

/// Validated inputs for one Eisenstein series: weight, character pair,
/// dilation factor, and the ambient level the result is to live in.
#[derive(Clone, Debug)]
pub struct EisensteinSpec {
    k: u64,
    psi: DirichletCharacter,
    phi: DirichletCharacter,
    t: u64,
    ambient: u64,
}

impl EisensteinSpec {
    /// Check weight, parity, primitivity of `phi`, and divisibility of the
    /// ambient level by `t * u * v`. `ambient = None` takes the minimal
    /// level `t * u * v` itself.
    pub fn new(
        k: u64,
        psi: DirichletCharacter,
        phi: DirichletCharacter,
        t: u64,
        ambient: Option<u64>,
    ) -> Result<EisensteinSpec> {
        if k < 2 {
            return Err(Error::WeightTooSmall { k, min: 2 });
        }
        if t == 0 {
            return Err(Error::NotPositive("t"));
        }
        if !phi.is_primitive() {
            return Err(Error::PhiNotPrimitive {
                modulus: phi.modulus(),
                conductor: phi.conductor(),
            });
        }
        if psi.product(&phi)?.is_odd() != (k % 2 == 1) {
            return Err(Error::ParityViolation { k });
        }
        let tuv = t
            .checked_mul(psi.modulus())
            .and_then(|x| x.checked_mul(phi.modulus()))
            .ok_or_else(|| Error::Unsupported("level overflow".into()))?;
        let ambient = ambient.unwrap_or(tuv);
        if ambient % tuv != 0 {
            return Err(Error::LevelNotDivisible { tuv, ambient });
        }
        Ok(EisensteinSpec {
            k,
            psi,
            phi,
            t,
            ambient,
        })
    }

    pub fn weight(&self) -> u64 {
        self.k
    }

    pub fn psi(&self) -> &DirichletCharacter {
        &self.psi
    }

    pub fn phi(&self) -> &DirichletCharacter {
        &self.phi
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn ambient(&self) -> u64 {
        self.ambient
    }

    /// The one case where the undilated series fails to be holomorphic.
    fn is_exceptional(&self) -> bool {
        self.k == 2 && self.psi.modulus() == 1 && self.phi.modulus() == 1
    }
}

/// Twisted divisor sum: the sum of `psi(n/d) phi(d) d^{k-1}` over the
/// positive divisors `d` of `n`.
pub fn sigma_twisted(
    n: u64,
    k: u64,
    psi: &DirichletCharacter,
    phi: &DirichletCharacter,
) -> Result<CycloElement> {
    if n == 0 {
        return Err(Error::NotPositive("n"));
    }
    if k == 0 {
        return Err(Error::NotPositive("weight"));
    }
    let e = u32::try_from(k - 1)
        .map_err(|_| Error::Unsupported(format!("weight {k} out of range")))?;
    let mut acc = CycloElement::zero();
    for d in primes::divisors(n) {
        let term = psi.value(n / d)?.mul(&phi.value(d)?)?;
        if term.is_zero() {
            continue;
        }
        let dk = Rational::from_integer(BigInt::from(d).pow(e));
        acc = acc.add(&term.scale(&dk))?;
    }
    Ok(acc)
}

/// The undilated series, over the rationals when the character values are,
/// cyclotomic otherwise. Level `u * v`, nebentypus `psi * phi` presented at
/// that modulus.
fn raw_series(
    k: u64,
    psi: &DirichletCharacter,
    phi: &DirichletCharacter,
    b: u64,
) -> Result<QExpansion> {
    if b == 0 {
        return Err(Error::NotPositive("precision"));
    }
    let value_order = psi.value_order().lcm(&phi.value_order());
    let a0 = if psi.is_primitive() {
        lvalue_at_nonpositive(k, phi.modulus(), |x| phi.value(x))?
    } else {
        CycloElement::zero()
    };
    let two = rat_int(2);
    let mut coeffs = Vec::with_capacity(b as usize);
    coeffs.push(a0);
    let tail: Vec<CycloElement> = (1..b)
        .into_par_iter()
        .map(|n| Ok(sigma_twisted(n, k, psi, phi)?.scale(&two)))
        .collect::<Result<Vec<_>>>()?;
    coeffs.extend(tail);
    let level = psi
        .modulus()
        .checked_mul(phi.modulus())
        .ok_or_else(|| Error::Unsupported("level overflow".into()))?;
    let eps = psi
        .product(phi)?
        .product(&DirichletCharacter::trivial(level)?)?;
    let coeffs = if value_order <= 2 {
        Coefficients::Rational(
            coeffs
                .into_iter()
                .map(|c| c.as_rational().expect("values of order at most 2 are rational"))
                .collect(),
        )
    } else {
        Coefficients::Cyclo {
            order: value_order,
            coeffs,
        }
    };
    QExpansion::new(coeffs, k, level, eps)
}

/// The series itself, for a spec with `t = 1`. The weight-2 double-trivial
/// case is rejected: it is not a modular form without the dilation.
pub fn eisenstein_qexp(spec: &EisensteinSpec, b: u64) -> Result<QExpansion> {
    if spec.t != 1 {
        return Err(Error::Unsupported(
            "this entry point computes the undilated series; use eisenstein_qexp_t".into(),
        ));
    }
    if spec.is_exceptional() {
        return Err(Error::NonHolomorphicEisenstein);
    }
    raw_series(spec.k, &spec.psi, &spec.phi, b)
}

/// The dilated series: `V(t)` applied to the series in the generic case,
/// and the combination `E_2 - t V(t) E_2` in the weight-2 double-trivial
/// case, which is holomorphic although the two terms separately are not.
/// That combination needs `t > 1`; at `t = 1` it vanishes identically and
/// only the non-form `E_2` remains, so the call is rejected.
pub fn eisenstein_qexp_t(spec: &EisensteinSpec, b: u64) -> Result<QExpansion> {
    if spec.is_exceptional() {
        if spec.t == 1 {
            return Err(Error::NonHolomorphicEisenstein);
        }
        let e2 = raw_series(spec.k, &spec.psi, &spec.phi, b)?;
        let t = Rational::from_integer(BigInt::from(spec.t));
        return e2.sub(&e2.op_v(spec.t)?.scale_rational(&t)?);
    }
    raw_series(spec.k, &spec.psi, &spec.phi, b)?.op_v(spec.t)
}

/// The reduced eigenform attached to a reducible representation: reduce the
/// dilated series mod l, halve it, and twist `a` times by theta. The weight
/// must lie in `[2, l + 1]`; picking the representative of the right
/// congruence class mod `l - 1` is the caller's job. Reduction fails when
/// the constant term is not l-integral; the caller then retries with the
/// other admissible weight of the same class.
pub fn reducible_attached_form(
    psi: &DirichletCharacter,
    phi: &DirichletCharacter,
    a: u64,
    k: u64,
    t: u64,
    ell: u64,
    b: u64,
) -> Result<QExpansion> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == 2 {
        return Err(Error::EllTwoHalving);
    }
    if k < 2 || k > ell + 1 {
        return Err(Error::WeightOutOfRange {
            k,
            min: 2,
            max: ell + 1,
        });
    }
    let spec = EisensteinSpec::new(k, psi.clone(), phi.clone(), t, None)?;
    let series = eisenstein_qexp_t(&spec, b)?;
    let order = psi.value_order().lcm(&phi.value_order());
    let emb = embedding_make(order, ell)?;
    let mut out = series.reduce_mod_lambda(&emb)?.scale_rational(&rat(1, 2))?;
    for _ in 0..a {
        out = out.op_theta()?;
    }
    Ok(out)
}

/// The discriminant form as an exact rational series, built from the
/// constant-term-1 normalisations of the weight 4 and 6 series:
/// `(E4^3 - E6^2) / 1728`.
pub fn delta_qexp(b: u64) -> Result<QExpansion> {
    if b < 2 {
        return Err(Error::PrecisionTooSmall {
            required: 2,
            actual: b,
        });
    }
    let triv = DirichletCharacter::trivial(1)?;
    let spec4 = EisensteinSpec::new(4, triv.clone(), triv.clone(), 1, None)?;
    let spec6 = EisensteinSpec::new(6, triv.clone(), triv, 1, None)?;
    let e4 = eisenstein_qexp(&spec4, b)?.scale_rational(&rat_int(120))?;
    let e6 = eisenstein_qexp(&spec6, b)?.scale_rational(&rat_int(-252))?;
    let cube = e4.mul(&e4)?.mul(&e4)?;
    let square = e6.mul(&e6)?;
    cube.sub(&square)?.scale_rational(&rat(1, 1728))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::char_make;

    fn triv() -> DirichletCharacter {
        DirichletCharacter::trivial(1).unwrap()
    }

    fn chi4() -> DirichletCharacter {
        char_make(4, &[(2, 1)]).unwrap()
    }

    fn rationals(f: &QExpansion) -> Vec<Rational> {
        match f.coefficients() {
            Coefficients::Rational(v) => v.clone(),
            other => panic!("expected rational coefficients, got {}", other.domain_name()),
        }
    }

    fn rat_vec(vals: &[(i64, i64)]) -> Vec<Rational> {
        vals.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn twisted_divisor_sums() {
        let one = CycloElement::one();
        assert_eq!(sigma_twisted(1, 4, &triv(), &triv()).unwrap(), one);
        assert_eq!(sigma_twisted(1, 3, &triv(), &chi4()).unwrap(), one);
        assert_eq!(
            sigma_twisted(6, 4, &triv(), &triv()).unwrap(),
            CycloElement::from_integer(252)
        );
        // 1 + chi(3) * 9 with chi(3) = -1.
        assert_eq!(
            sigma_twisted(3, 3, &triv(), &chi4()).unwrap(),
            CycloElement::from_integer(-8)
        );
        assert!(matches!(
            sigma_twisted(0, 4, &triv(), &triv()),
            Err(Error::NotPositive("n"))
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            EisensteinSpec::new(3, triv(), triv(), 1, None),
            Err(Error::ParityViolation { k: 3 })
        ));
        let trivial_mod_4 = DirichletCharacter::trivial(4).unwrap();
        assert!(matches!(
            EisensteinSpec::new(2, triv(), trivial_mod_4, 1, None),
            Err(Error::PhiNotPrimitive {
                modulus: 4,
                conductor: 1,
            })
        ));
        assert!(matches!(
            EisensteinSpec::new(4, triv(), triv(), 0, None),
            Err(Error::NotPositive("t"))
        ));
        assert!(matches!(
            EisensteinSpec::new(3, triv(), chi4(), 2, Some(12)),
            Err(Error::LevelNotDivisible {
                tuv: 8,
                ambient: 12,
            })
        ));
        let ok = EisensteinSpec::new(3, triv(), chi4(), 2, Some(16)).unwrap();
        assert_eq!(ok.ambient(), 16);
        assert_eq!(
            EisensteinSpec::new(3, triv(), chi4(), 2, None).unwrap().ambient(),
            8
        );
        assert!(EisensteinSpec::new(1, triv(), triv(), 1, None).is_err());
    }

    #[test]
    fn level_one_weight_four() {
        let spec = EisensteinSpec::new(4, triv(), triv(), 1, None).unwrap();
        let f = eisenstein_qexp(&spec, 8).unwrap();
        assert_eq!(f.weight(), 4);
        assert_eq!(f.level(), 1);
        let want = rat_vec(&[
            (1, 120),
            (2, 1),
            (18, 1),
            (56, 1),
            (146, 1),
            (252, 1),
            (504, 1),
            (688, 1),
        ]);
        assert_eq!(rationals(&f), want);
    }

    #[test]
    fn nonprimitive_psi_kills_constant_term() {
        let psi = DirichletCharacter::trivial(4).unwrap();
        let spec = EisensteinSpec::new(2, psi, triv(), 1, None).unwrap();
        let f = eisenstein_qexp(&spec, 5).unwrap();
        assert_eq!(f.level(), 4);
        // a_n sums d over divisors with odd cofactor.
        let want = rat_vec(&[(0, 1), (2, 1), (4, 1), (8, 1), (8, 1)]);
        assert_eq!(rationals(&f), want);
    }

    #[test]
    fn plain_weight_two_is_rejected() {
        let spec = EisensteinSpec::new(2, triv(), triv(), 1, None).unwrap();
        assert!(matches!(
            eisenstein_qexp(&spec, 10),
            Err(Error::NonHolomorphicEisenstein)
        ));
        assert!(matches!(
            eisenstein_qexp_t(&spec, 10),
            Err(Error::NonHolomorphicEisenstein)
        ));
    }

    #[test]
    fn dilated_weight_two_combination() {
        let spec = EisensteinSpec::new(2, triv(), triv(), 2, None).unwrap();
        let f = eisenstein_qexp_t(&spec, 6).unwrap();
        assert_eq!(f.level(), 2);
        assert_eq!(f.weight(), 2);
        let want = rat_vec(&[(1, 12), (2, 1), (2, 1), (8, 1), (2, 1), (12, 1)]);
        assert_eq!(rationals(&f), want);
    }

    #[test]
    fn dilation_moves_support() {
        let spec = EisensteinSpec::new(4, triv(), triv(), 3, None).unwrap();
        let f = eisenstein_qexp_t(&spec, 7).unwrap();
        assert_eq!(f.level(), 3);
        let want = rat_vec(&[(1, 120), (0, 1), (0, 1), (2, 1), (0, 1), (0, 1), (18, 1)]);
        assert_eq!(rationals(&f), want);
    }

    #[test]
    fn quadratic_twist_stays_rational() {
        let spec = EisensteinSpec::new(3, triv(), chi4(), 1, None).unwrap();
        let f = eisenstein_qexp(&spec, 6).unwrap();
        assert_eq!(f.level(), 4);
        assert_eq!(f.character(), &chi4());
        let want = rat_vec(&[(-1, 2), (2, 1), (2, 1), (-16, 1), (2, 1), (52, 1)]);
        assert_eq!(rationals(&f), want);
    }

    #[test]
    fn quartic_twist_is_cyclotomic() {
        let chi5 = char_make(5, &[(4, 1)]).unwrap();
        let spec = EisensteinSpec::new(3, triv(), chi5, 1, None).unwrap();
        let f = eisenstein_qexp(&spec, 3).unwrap();
        match f.coefficients() {
            Coefficients::Cyclo { order, coeffs } => {
                assert_eq!(*order, 4);
                assert_eq!(coeffs[1], CycloElement::from_integer(2));
                // 2 (1 + 4 chi(2)) = 2 + 8i.
                let i = CycloElement::root_of_unity(4, 1).unwrap();
                let want = CycloElement::from_integer(2)
                    .add(&i.scale(&rat_int(8)))
                    .unwrap();
                assert_eq!(coeffs[2], want);
            }
            other => panic!("expected cyclotomic series, got {}", other.domain_name()),
        }
    }

    #[test]
    fn attached_form_weight_four_mod_seven() {
        let f = reducible_attached_form(&triv(), &triv(), 0, 4, 1, 7, 8).unwrap();
        assert_eq!(f.weight(), 4);
        assert_eq!(f.level(), 1);
        match f.coefficients() {
            Coefficients::Field { desc, coeffs } => {
                assert_eq!(desc.ell(), 7);
                let vals: Vec<u64> = coeffs.iter().map(|c| c.coords()[0]).collect();
                // (1/2)(1/120) = 1/240 = 4 mod 7, then sigma_3(n) mod 7.
                assert_eq!(vals, vec![4, 1, 2, 0, 3, 0, 0, 1]);
            }
            other => panic!("expected a reduced series, got {}", other.domain_name()),
        }
    }

    #[test]
    fn attached_form_theta_twist() {
        let f = reducible_attached_form(&triv(), &triv(), 1, 4, 1, 7, 8).unwrap();
        assert_eq!(f.weight(), 4 + 8);
        match f.coefficients() {
            Coefficients::Field { coeffs, .. } => {
                let vals: Vec<u64> = coeffs.iter().map(|c| c.coords()[0]).collect();
                // n * sigma_3(n) mod 7.
                assert_eq!(vals, vec![0, 1, 4, 0, 5, 0, 0, 0]);
            }
            other => panic!("expected a reduced series, got {}", other.domain_name()),
        }
    }

    #[test]
    fn attached_form_rejections() {
        assert!(matches!(
            reducible_attached_form(&triv(), &triv(), 0, 4, 1, 2, 8),
            Err(Error::EllTwoHalving)
        ));
        assert!(matches!(
            reducible_attached_form(&triv(), &triv(), 0, 4, 1, 9, 8),
            Err(Error::NotPrime(9))
        ));
        assert!(matches!(
            reducible_attached_form(&triv(), &triv(), 0, 10, 1, 7, 8),
            Err(Error::WeightOutOfRange {
                k: 10,
                min: 2,
                max: 8,
            })
        ));
        // 5 divides 240, so the halved constant term is not 5-integral.
        assert!(matches!(
            reducible_attached_form(&triv(), &triv(), 0, 4, 1, 5, 8),
            Err(Error::NotEllIntegral {
                ell: 5,
                index: Some(0),
            })
        ));
    }

    #[test]
    fn discriminant_series() {
        let f = delta_qexp(8).unwrap();
        assert_eq!(f.weight(), 12);
        assert_eq!(f.level(), 1);
        let want = rat_vec(&[
            (0, 1),
            (1, 1),
            (-24, 1),
            (252, 1),
            (-1472, 1),
            (4830, 1),
            (-6048, 1),
            (-16744, 1),
        ]);
        assert_eq!(rationals(&f), want);
        assert!(matches!(
            delta_qexp(1),
            Err(Error::PrecisionTooSmall {
                required: 2,
                actual: 1,
            })
        ));
    }
}
