//! Decision procedures for comparing representations and series.
//!
//! The central routine is [`compare_2dim`]: two sources of semisimple
//! two-dimensional odd mod-l representations of conductor dividing `N` are
//! isomorphic exactly when their Frobenius characteristic polynomials
//! agree at every prime `p <= kappa(N, l)` with `p` coprime to `l N`, so
//! the comparison is a finite loop with an unconditional verdict. The
//! one-dimensional analogue [`compare_1dim`] needs only the primes up to
//! `l N`. [`sturm_compare`] certifies congruence of two reduced
//! q-expansions directly from coefficient bounds, and the
//! least-distinguishing-prime searches are brute-force companions used by
//! tests and the CLI.
//!
//! Verdicts are values and carry their own evidence: a distinguishing
//! prime comes with both characteristic polynomials, and an isomorphism
//! verdict records the bound used and the number of primes checked. When
//! the data cannot support either conclusion (a missing eigenvalue below
//! the bound, or a presentation that cannot evaluate a required prime) the
//! verdict is [`Verdict::Indeterminate`], never a silent pass.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive as _;
use rayon::prelude::*;

use crate::arith::primes::{self, MAX_SIEVE};
use crate::arith::{embedding_make, Embedding, FieldElement};
use crate::bounds::{kappa, kohnen_bound, sturm_bound};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::qexp::{Coefficients, QExpansion};
use crate::repr::{
    artin_conductor_reducible, frob_charpoly, frob_det, oddness_check, repr_validate,
    CharPolyData, ReprSource,
};

/// Outcome of a representation comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Characteristic polynomials agreed at every checked prime, which is
    /// all of them up to the bound; the sources are isomorphic.
    Isomorphic {
        kappa_used: BigUint,
        primes_checked: usize,
    },
    /// First prime (smallest) at which the characteristic polynomials
    /// differ, with both sides' data as the witness.
    DistinguishedAt {
        p: u64,
        left: CharPolyData,
        right: CharPolyData,
    },
    /// Neither conclusion is supported: the hypotheses fail or the data
    /// has gaps below the bound.
    Indeterminate { reason: String },
}

/// Outcome of a direct coefficientwise congruence check on series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CongruenceVerdict {
    /// All coefficients up to the bound agree, so all of them do.
    Congruent {
        bound: BigUint,
        coefficients_checked: usize,
    },
    /// First index at which the reduced coefficients differ.
    MismatchAt {
        index: u64,
        left: FieldElement,
        right: FieldElement,
    },
}

/// Map a validation refusal to the error naming the offending quantity.
fn require_valid(src: &ReprSource, n: u64, ell: u64) -> Result<()> {
    if repr_validate(src, n, ell)? {
        return Ok(());
    }
    Err(match src {
        ReprSource::Reducible(data) => Error::ConductorNotDividing {
            conductor: artin_conductor_reducible(data)?,
            bound: n,
        },
        ReprSource::Eigenform(data) => {
            let mut level = data.level();
            while level % ell == 0 {
                level /= ell;
            }
            Error::LevelNotDividing {
                level_prime_to_ell: level,
                bound: n,
            }
        }
    })
}

fn sieve_bound_checked(bound: u64) -> Result<Vec<u64>> {
    if bound > MAX_SIEVE {
        return Err(Error::BoundTooLarge(bound.to_string()));
    }
    Ok(primes::primes_up_to(bound))
}

/// Everything the main comparison loop needs, or an early verdict.
enum Prepared {
    Early(Verdict),
    Go {
        emb: Embedding,
        kappa_used: BigUint,
        bound: u64,
        excluded: u64,
        det_divergence: Option<u64>,
    },
}

/// Shared front half of the two-dimensional comparison: validation, the
/// oddness gate, the joint embedding, the bound, and the determinant
/// pre-pass below `l N` that stands in for "the other side is odd too".
fn prepare_2dim(left: &ReprSource, right: &ReprSource, n: u64, ell: u64) -> Result<Prepared> {
    require_valid(left, n, ell)?;
    require_valid(right, n, ell)?;
    // In characteristic 2 oddness carries no information, so the gate
    // only runs for odd l.
    if ell != 2 && !oddness_check(left)? {
        return Ok(Prepared::Early(Verdict::Indeterminate {
            reason: "left-hand source is not odd; the criterion applies to odd \
                     representations only"
                .into(),
        }));
    }
    let report = kappa(n, ell)?;
    let bound = report
        .kappa
        .to_u64()
        .ok_or_else(|| Error::BoundTooLarge(report.kappa.to_string()))?;
    let order = left
        .required_embedding_order()
        .lcm(&right.required_embedding_order());
    let emb = embedding_make(order, ell)?;
    let excluded = ell
        .checked_mul(n)
        .ok_or_else(|| Error::BoundTooLarge(format!("{ell} * {n}")))?;
    // Determinant pre-pass below l N. Clean agreement here transfers
    // oddness to the right-hand side; a divergence is remembered so that
    // a later data gap can still report it. A prime that cannot be
    // evaluated at all leaves the transfer unestablished, and the verdict
    // honestly stops at Indeterminate instead of extrapolating.
    let mut det_divergence = None;
    for p in sieve_bound_checked(excluded.saturating_sub(1))? {
        if excluded % p == 0 {
            continue;
        }
        let pair = frob_det(left, p, &emb).and_then(|l| Ok((l, frob_det(right, p, &emb)?)));
        match pair {
            Ok((l, r)) => {
                if l != r {
                    det_divergence = Some(p);
                    break;
                }
            }
            Err(Error::BadPrime { p, .. }) => {
                return Ok(Prepared::Early(Verdict::Indeterminate {
                    reason: format!(
                        "prime {p} below l*N = {excluded} cannot be evaluated in this \
                         presentation, so determinant agreement cannot be verified; \
                         present the characters at their conductors"
                    ),
                }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Prepared::Go {
        emb,
        kappa_used: report.kappa,
        bound,
        excluded,
        det_divergence,
    })
}

/// Per-prime outcome inside the main loop.
enum PrimeOutcome {
    Mismatch(CharPolyData, CharPolyData),
    Undecidable(String),
    Fail(Error),
}

fn examine_prime(
    left: &ReprSource,
    right: &ReprSource,
    p: u64,
    emb: &Embedding,
    det_divergence: Option<u64>,
) -> Option<PrimeOutcome> {
    let pair = frob_charpoly(left, p, emb).and_then(|l| Ok((l, frob_charpoly(right, p, emb)?)));
    match pair {
        Ok((l, r)) => {
            // Determinants first, then traces; either way the witness
            // carries both sides in full.
            if l.det != r.det || l.trace != r.trace {
                Some(PrimeOutcome::Mismatch(l, r))
            } else {
                None
            }
        }
        Err(Error::MissingEigenvalue(q)) => {
            let mut reason =
                format!("missing eigenvalue at prime {q}, which lies below the bound");
            if let Some(d) = det_divergence {
                reason.push_str(&format!(
                    "; note the determinants already differ at prime {d}"
                ));
            }
            Some(PrimeOutcome::Undecidable(reason))
        }
        Err(Error::BadPrime { p, .. }) => Some(PrimeOutcome::Undecidable(format!(
            "prime {p} divides a presentation modulus but not l*N; present the \
             characters at their conductors"
        ))),
        Err(e) => Some(PrimeOutcome::Fail(e)),
    }
}

fn finish(
    first: Option<(u64, PrimeOutcome)>,
    kappa_used: BigUint,
    primes_checked: usize,
) -> Result<Verdict> {
    match first {
        None => Ok(Verdict::Isomorphic {
            kappa_used,
            primes_checked,
        }),
        Some((p, PrimeOutcome::Mismatch(left, right))) => {
            Ok(Verdict::DistinguishedAt { p, left, right })
        }
        Some((_, PrimeOutcome::Undecidable(reason))) => Ok(Verdict::Indeterminate { reason }),
        Some((_, PrimeOutcome::Fail(e))) => Err(e),
    }
}

/// Decide whether two sources give isomorphic semisimple two-dimensional
/// mod-l representations of conductor dividing `n`, by comparing trace
/// and determinant of Frobenius at every prime up to `kappa(n, ell)`
/// coprime to `ell * n`.
///
/// The left-hand source must be odd (for odd `ell`); the right-hand
/// side's oddness is inferred from determinant agreement below
/// `ell * n`. A mismatch is reported at the smallest distinguishing
/// prime with both characteristic polynomials as evidence. Missing
/// eigenvalue data below the bound yields `Indeterminate`, never
/// `Isomorphic`.
pub fn compare_2dim(left: &ReprSource, right: &ReprSource, n: u64, ell: u64) -> Result<Verdict> {
    let (emb, kappa_used, bound, excluded, det_divergence) =
        match prepare_2dim(left, right, n, ell)? {
            Prepared::Early(v) => return Ok(v),
            Prepared::Go {
                emb,
                kappa_used,
                bound,
                excluded,
                det_divergence,
            } => (emb, kappa_used, bound, excluded, det_divergence),
        };
    let mut checked = 0usize;
    for p in sieve_bound_checked(bound)? {
        if excluded % p == 0 {
            continue;
        }
        checked += 1;
        if let Some(outcome) = examine_prime(left, right, p, &emb, det_divergence) {
            return finish(Some((p, outcome)), kappa_used, checked);
        }
    }
    finish(None, kappa_used, checked)
}

/// [`compare_2dim`] with the prime loop spread across the rayon pool.
///
/// The verdict is identical to the sequential one: primes are examined
/// speculatively in parallel but the reported outcome is the one at the
/// smallest prime, so partitioning cannot change the witness.
pub fn compare_2dim_parallel(
    left: &ReprSource,
    right: &ReprSource,
    n: u64,
    ell: u64,
) -> Result<Verdict> {
    let (emb, kappa_used, bound, excluded, det_divergence) =
        match prepare_2dim(left, right, n, ell)? {
            Prepared::Early(v) => return Ok(v),
            Prepared::Go {
                emb,
                kappa_used,
                bound,
                excluded,
                det_divergence,
            } => (emb, kappa_used, bound, excluded, det_divergence),
        };
    let primes: Vec<u64> = sieve_bound_checked(bound)?
        .into_iter()
        .filter(|p| excluded % p != 0)
        .collect();
    let total = primes.len();
    let first = primes
        .par_iter()
        .position_first(|&p| examine_prime(left, right, p, &emb, det_divergence).is_some());
    match first {
        None => finish(None, kappa_used, total),
        Some(i) => {
            let p = primes[i];
            let outcome = examine_prime(left, right, p, &emb, det_divergence)
                .expect("outcome reproduces: inputs unchanged");
            finish(Some((p, outcome)), kappa_used, i + 1)
        }
    }
}

/// Decide whether two mod-l reductions of Dirichlet characters agree, by
/// comparing values at every prime `p <= ell * n` coprime to `ell * n`.
///
/// Both characters must be presented at moduli dividing `ell * n` and
/// have value orders coprime to `ell`. The one-dimensional bound is
/// `ell * n` itself; the verdict reuses [`Verdict`] with trace and
/// determinant both equal to the character value (the characteristic
/// polynomial of a 1 x 1 matrix).
pub fn compare_1dim(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    n: u64,
    ell: u64,
) -> Result<Verdict> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if n == 0 {
        return Err(Error::NotPositive("conductor bound"));
    }
    let bound = ell
        .checked_mul(n)
        .ok_or_else(|| Error::BoundTooLarge(format!("{ell} * {n}")))?;
    let mut order = 1u64;
    for chi in [chi1, chi2] {
        if bound % chi.modulus() != 0 {
            return Err(Error::ModulusNotDividing {
                modulus: chi.modulus(),
                bound,
            });
        }
        let chi_order = chi.value_order();
        if chi_order % ell == 0 {
            return Err(Error::ValueOrderDivisibleByEll {
                order: chi_order,
                ell,
            });
        }
        order = order.lcm(&chi_order);
    }
    let emb = embedding_make(order, ell)?;
    let mut checked = 0usize;
    for p in sieve_bound_checked(bound)? {
        if bound % p == 0 {
            continue;
        }
        checked += 1;
        let l = chi1.value_in_field(p, &emb)?;
        let r = chi2.value_in_field(p, &emb)?;
        if l != r {
            return Ok(Verdict::DistinguishedAt {
                p,
                left: CharPolyData {
                    p,
                    trace: l.clone(),
                    det: l,
                },
                right: CharPolyData {
                    p,
                    trace: r.clone(),
                    det: r,
                },
            });
        }
    }
    Ok(Verdict::Isomorphic {
        kappa_used: BigUint::from(bound),
        primes_checked: checked,
    })
}

/// Certify or refute a coefficientwise congruence of two reduced series.
///
/// Both series must live over the same residue field at the same level
/// with the same character, carry a definite weight of at least 2, and be
/// long enough to cover the bound: the Sturm bound when the weights are
/// equal, the two-weight Kohnen bound otherwise. Agreement up to the
/// bound implies agreement everywhere, which is the point.
pub fn sturm_compare(f: &QExpansion, g: &QExpansion) -> Result<CongruenceVerdict> {
    let (fd, fc) = match f.coefficients() {
        Coefficients::Field { desc, coeffs } => (desc, coeffs),
        _ => return Err(Error::SeriesNotReduced),
    };
    let (gd, gc) = match g.coefficients() {
        Coefficients::Field { desc, coeffs } => (desc, coeffs),
        _ => return Err(Error::SeriesNotReduced),
    };
    if fd != gd {
        return Err(Error::DescriptorMismatch {
            left: fd.describe(),
            right: gd.describe(),
        });
    }
    if f.level() != g.level() {
        return Err(Error::LevelMismatch {
            left: f.level(),
            right: g.level(),
        });
    }
    if f.character() != g.character() {
        return Err(Error::CharacterMismatch);
    }
    if f.is_mixed_weight() || g.is_mixed_weight() {
        return Err(Error::MixedWeightInput);
    }
    for k in [f.weight(), g.weight()] {
        if k < 2 {
            return Err(Error::WeightTooSmall { k, min: 2 });
        }
    }
    let report = if f.weight() == g.weight() {
        sturm_bound(f.weight(), f.level())?
    } else {
        kohnen_bound(f.weight(), g.weight(), f.level(), fd.ell())?
    };
    let floor = report
        .kappa
        .to_u64()
        .ok_or_else(|| Error::BoundTooLarge(report.kappa.to_string()))?;
    let required = floor + 1;
    for series in [f, g] {
        if series.precision() < required {
            return Err(Error::PrecisionTooSmall {
                required,
                actual: series.precision(),
            });
        }
    }
    for i in 0..required as usize {
        if fc[i] != gc[i] {
            return Ok(CongruenceVerdict::MismatchAt {
                index: i as u64,
                left: fc[i].clone(),
                right: gc[i].clone(),
            });
        }
    }
    Ok(CongruenceVerdict::Congruent {
        bound: report.kappa,
        coefficients_checked: required as usize,
    })
}

/// Smallest prime `p <= cap` coprime to `ell * n` at which the two
/// sources produce different characteristic polynomials, if any.
///
/// A brute-force search companion: primes the sources cannot evaluate
/// (missing eigenvalues, presentation obstructions) are skipped rather
/// than reported, so absence of a witness is not a proof of isomorphism.
pub fn least_distinguishing_prime(
    left: &ReprSource,
    right: &ReprSource,
    n: u64,
    ell: u64,
    cap: u64,
) -> Result<Option<u64>> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if n == 0 {
        return Err(Error::NotPositive("conductor bound"));
    }
    let excluded = ell
        .checked_mul(n)
        .ok_or_else(|| Error::BoundTooLarge(format!("{ell} * {n}")))?;
    let order = left
        .required_embedding_order()
        .lcm(&right.required_embedding_order());
    let emb = embedding_make(order, ell)?;
    for p in sieve_bound_checked(cap)? {
        if excluded % p == 0 {
            continue;
        }
        let pair =
            frob_charpoly(left, p, &emb).and_then(|l| Ok((l, frob_charpoly(right, p, &emb)?)));
        match pair {
            Ok((l, r)) => {
                if l.det != r.det || l.trace != r.trace {
                    return Ok(Some(p));
                }
            }
            Err(Error::MissingEigenvalue(_)) | Err(Error::BadPrime { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Smallest prime `p <= cap` with `p` coprime to `excluded` at which two
/// characters have different mod-l reductions, if any.
pub fn least_distinguishing_prime_char(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    excluded: u64,
    ell: u64,
    cap: u64,
) -> Result<Option<u64>> {
    if !primes::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let order = chi1.value_order().lcm(&chi2.value_order());
    let emb = embedding_make(order, ell)?;
    for p in sieve_bound_checked(cap)? {
        if excluded != 0 && excluded % p == 0 {
            continue;
        }
        if chi1.value_in_field(p, &emb)? != chi2.value_in_field(p, &emb)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int, CycloElement, FieldDescriptor};
    use crate::characters::char_make;
    use crate::eisenstein::{delta_qexp, eisenstein_qexp, EisensteinSpec};
    use crate::repr::{EigenTable, EigenformData, ReducibleData};
    use std::collections::BTreeMap;

    fn triv() -> DirichletCharacter {
        DirichletCharacter::trivial(1).unwrap()
    }

    fn reducible(a: u64, b: u64, ell: u64) -> ReprSource {
        ReprSource::Reducible(ReducibleData::new(triv(), triv(), a, b, ell).unwrap())
    }

    #[test]
    fn a_source_is_isomorphic_to_itself() {
        let src = reducible(0, 3, 5);
        let verdict = compare_2dim(&src, &src, 1, 5).unwrap();
        assert_eq!(
            verdict,
            Verdict::Isomorphic {
                kappa_used: BigUint::from(240u32),
                primes_checked: 51,
            }
        );
    }

    #[test]
    fn cyclotomic_powers_distinguished_at_two() {
        let left = reducible(0, 1, 5);
        let right = reducible(0, 2, 5);
        match compare_2dim(&left, &right, 1, 5).unwrap() {
            Verdict::DistinguishedAt { p, left, right } => {
                assert_eq!(p, 2);
                let f5 = FieldDescriptor::prime_field(5).unwrap();
                // Traces 1 + 2 = 3 and 1 + 4 = 0; determinants 2 and 4.
                assert_eq!(left.trace, f5.from_u64(3));
                assert_eq!(right.trace, f5.from_u64(0));
                assert_eq!(left.det, f5.from_u64(2));
                assert_eq!(right.det, f5.from_u64(4));
            }
            other => panic!("expected a distinguishing prime, got {other:?}"),
        }
    }

    #[test]
    fn eigenform_matches_its_reducible_counterpart() {
        // a_p = 1 + p^3 mod 5 with trivial character and weight 4 carries
        // the same Frobenius data as 1 (+) chi^3.
        let f5 = FieldDescriptor::prime_field(5).unwrap();
        let mut map = BTreeMap::new();
        for p in primes::primes_up_to(240) {
            if p != 5 {
                let v = (1 + primes::pow_mod(p % 5, 3, 5)) % 5;
                map.insert(p, f5.from_u64(v));
            }
        }
        let table = EigenTable::Reduced { desc: f5, map };
        let form = ReprSource::Eigenform(EigenformData::new(1, 4, triv(), table).unwrap());
        let sum = reducible(0, 3, 5);
        let verdict = compare_2dim(&form, &sum, 1, 5).unwrap();
        assert_eq!(
            verdict,
            Verdict::Isomorphic {
                kappa_used: BigUint::from(240u32),
                primes_checked: 51,
            }
        );
    }

    #[test]
    fn even_sources_are_rejected_by_the_gate() {
        let even = reducible(0, 2, 5);
        match compare_2dim(&even, &even, 1, 5).unwrap() {
            Verdict::Indeterminate { reason } => assert!(reason.contains("not odd")),
            other => panic!("expected indeterminate, got {other:?}"),
        }
    }

    #[test]
    fn characteristic_two_skips_the_oddness_gate() {
        let src = reducible(0, 0, 2);
        // kappa(1, 2) = 4; the only prime up to 4 coprime to 2 is 3.
        assert_eq!(
            compare_2dim(&src, &src, 1, 2).unwrap(),
            Verdict::Isomorphic {
                kappa_used: BigUint::from(4u32),
                primes_checked: 1,
            }
        );
    }

    #[test]
    fn missing_data_never_passes() {
        let table = EigenTable::Exact {
            min_order: 1,
            map: BTreeMap::new(),
        };
        let empty = ReprSource::Eigenform(EigenformData::new(1, 4, triv(), table).unwrap());
        let sum = reducible(0, 3, 5);
        match compare_2dim(&empty, &sum, 1, 5).unwrap() {
            Verdict::Indeterminate { reason } => assert!(reason.contains("prime 2")),
            other => panic!("expected indeterminate, got {other:?}"),
        }
    }

    #[test]
    fn data_gaps_report_known_determinant_divergence() {
        // Weight 2 against chi^3: determinants p vs p^3 differ at p = 2,
        // but the empty eigenvalue table blocks the trace there.
        let table = EigenTable::Exact {
            min_order: 1,
            map: BTreeMap::new(),
        };
        let empty = ReprSource::Eigenform(EigenformData::new(1, 2, triv(), table).unwrap());
        let sum = reducible(0, 3, 5);
        match compare_2dim(&empty, &sum, 1, 5).unwrap() {
            Verdict::Indeterminate { reason } => {
                assert!(reason.contains("determinants already differ at prime 2"));
            }
            other => panic!("expected indeterminate, got {other:?}"),
        }
    }

    #[test]
    fn inflated_presentations_are_indeterminate() {
        // psi is trivial but presented at modulus 4, so p = 2 cannot be
        // evaluated even though 2 does not divide l*N = 5.
        let inflated = DirichletCharacter::trivial(4).unwrap();
        let left =
            ReprSource::Reducible(ReducibleData::new(inflated, triv(), 0, 1, 5).unwrap());
        let right = reducible(0, 1, 5);
        match compare_2dim(&left, &right, 1, 5).unwrap() {
            Verdict::Indeterminate { reason } => {
                assert!(reason.contains("determinant agreement cannot be verified"));
            }
            other => panic!("expected indeterminate, got {other:?}"),
        }
    }

    #[test]
    fn conductor_bound_violations_are_errors() {
        let chi4 = char_make(4, &[(2, 1)]).unwrap();
        let twisted = ReprSource::Reducible(ReducibleData::new(chi4, triv(), 0, 1, 5).unwrap());
        let plain = reducible(0, 1, 5);
        assert!(matches!(
            compare_2dim(&twisted, &plain, 1, 5),
            Err(Error::ConductorNotDividing {
                conductor: 4,
                bound: 1,
            })
        ));
    }

    #[test]
    fn parallel_and_sequential_verdicts_agree() {
        let cases = [
            (reducible(0, 3, 5), reducible(0, 3, 5), 5),
            (reducible(0, 1, 5), reducible(0, 2, 5), 5),
            (reducible(1, 2, 7), reducible(2, 1, 7), 7),
            (reducible(1, 2, 7), reducible(2, 3, 7), 7),
        ];
        for (l, r, ell) in &cases {
            assert_eq!(
                compare_2dim(l, r, 1, *ell).unwrap(),
                compare_2dim_parallel(l, r, 1, *ell).unwrap()
            );
        }
    }

    #[test]
    fn one_dimensional_comparison_frozen_cases() {
        let chi4 = char_make(4, &[(2, 1)]).unwrap();
        let tr = triv();
        // l = 3, N = 4: values agree at 5 and 11 but not at 7.
        match compare_1dim(&chi4, &tr, 4, 3).unwrap() {
            Verdict::DistinguishedAt { p, left, right } => {
                assert_eq!(p, 7);
                let f3 = FieldDescriptor::prime_field(3).unwrap();
                assert_eq!(left.trace, f3.from_u64(2));
                assert_eq!(right.trace, f3.from_u64(1));
            }
            other => panic!("expected a distinguishing prime, got {other:?}"),
        }
        // A character against itself: primes up to 12 coprime to 12 are
        // 5, 7, 11.
        assert_eq!(
            compare_1dim(&chi4, &chi4, 4, 3).unwrap(),
            Verdict::Isomorphic {
                kappa_used: BigUint::from(12u32),
                primes_checked: 3,
            }
        );
        // The two order-4 characters mod 5 reduce to images 2 and 3 at
        // p = 2.
        let quartic = char_make(5, &[(4, 1)]).unwrap();
        let cube = char_make(5, &[(4, 3)]).unwrap();
        match compare_1dim(&quartic, &cube, 1, 5).unwrap() {
            Verdict::DistinguishedAt { p, left, right } => {
                assert_eq!(p, 2);
                let f5 = FieldDescriptor::prime_field(5).unwrap();
                assert_eq!(left.trace, f5.from_u64(2));
                assert_eq!(right.trace, f5.from_u64(3));
            }
            other => panic!("expected a distinguishing prime, got {other:?}"),
        }
    }

    #[test]
    fn one_dimensional_preconditions() {
        let chi4 = char_make(4, &[(2, 1)]).unwrap();
        // Modulus 4 does not divide l*N = 15.
        assert!(matches!(
            compare_1dim(&chi4, &triv(), 5, 3),
            Err(Error::ModulusNotDividing {
                modulus: 4,
                bound: 15,
            })
        ));
        // Value order 3 collapses in characteristic 3.
        let cubic = char_make(7, &[(3, 1)]).unwrap();
        assert!(matches!(
            compare_1dim(&cubic, &triv(), 7, 3),
            Err(Error::ValueOrderDivisibleByEll { order: 3, ell: 3 })
        ));
    }

    #[test]
    fn discriminant_congruent_to_halved_weight_twelve_series() {
        let emb = embedding_make(1, 691).unwrap();
        let delta = delta_qexp(4).unwrap().reduce_mod_lambda(&emb).unwrap();
        let spec = EisensteinSpec::new(12, triv(), triv(), 1, None).unwrap();
        let half = eisenstein_qexp(&spec, 4)
            .unwrap()
            .scale_rational(&rat(1, 2))
            .unwrap()
            .reduce_mod_lambda(&emb)
            .unwrap();
        assert_eq!(
            sturm_compare(&delta, &half).unwrap(),
            CongruenceVerdict::Congruent {
                bound: BigUint::from(1u32),
                coefficients_checked: 2,
            }
        );
    }

    #[test]
    fn a_doctored_coefficient_is_caught() {
        let emb = embedding_make(1, 5).unwrap();
        let delta = delta_qexp(4).unwrap().reduce_mod_lambda(&emb).unwrap();
        let doubled = delta.scale_rational(&rat_int(2)).unwrap();
        match sturm_compare(&delta, &doubled).unwrap() {
            CongruenceVerdict::MismatchAt { index, left, right } => {
                assert_eq!(index, 1);
                let f5 = FieldDescriptor::prime_field(5).unwrap();
                assert_eq!(left, f5.from_u64(1));
                assert_eq!(right, f5.from_u64(2));
            }
            other => panic!("expected a mismatch, got {other:?}"),
        }
    }

    #[test]
    fn weights_four_and_ten_are_congruent_mod_seven() {
        // The classical congruence E_4 = E_10 mod 7 through the Kohnen
        // bound: max(4, 10)/12 * [G0(1) cap G1(7)] = 40.
        let emb = embedding_make(1, 7).unwrap();
        let e4 = eisenstein_qexp(&EisensteinSpec::new(4, triv(), triv(), 1, None).unwrap(), 41)
            .unwrap()
            .reduce_mod_lambda(&emb)
            .unwrap();
        let e10 =
            eisenstein_qexp(&EisensteinSpec::new(10, triv(), triv(), 1, None).unwrap(), 41)
                .unwrap()
                .reduce_mod_lambda(&emb)
                .unwrap();
        assert_eq!(
            sturm_compare(&e4, &e10).unwrap(),
            CongruenceVerdict::Congruent {
                bound: BigUint::from(40u32),
                coefficients_checked: 41,
            }
        );
    }

    #[test]
    fn sturm_preconditions() {
        let emb = embedding_make(1, 691).unwrap();
        let delta = delta_qexp(4).unwrap();
        let reduced = delta.reduce_mod_lambda(&emb).unwrap();
        // Unreduced input.
        assert!(matches!(
            sturm_compare(&delta, &reduced),
            Err(Error::SeriesNotReduced)
        ));
        // Too short: the Sturm bound needs indices 0 and 1.
        let short = reduced.truncate(1).unwrap();
        assert!(matches!(
            sturm_compare(&short, &reduced),
            Err(Error::PrecisionTooSmall {
                required: 2,
                actual: 1,
            })
        ));
    }

    #[test]
    fn brute_force_searches() {
        let left = reducible(0, 1, 5);
        let right = reducible(0, 2, 5);
        assert_eq!(
            least_distinguishing_prime(&left, &left, 1, 5, 100).unwrap(),
            None
        );
        assert_eq!(
            least_distinguishing_prime(&left, &right, 1, 5, 100).unwrap(),
            Some(2)
        );
        // A cap below the witness finds nothing.
        assert_eq!(
            least_distinguishing_prime(&left, &right, 1, 5, 1).unwrap(),
            None
        );
        let chi4 = char_make(4, &[(2, 1)]).unwrap();
        assert_eq!(
            least_distinguishing_prime_char(&chi4, &triv(), 12, 3, 100).unwrap(),
            Some(7)
        );
        assert_eq!(
            least_distinguishing_prime_char(&chi4, &chi4, 12, 3, 100).unwrap(),
            None
        );
    }

    #[test]
    fn search_skips_primes_it_cannot_evaluate() {
        // The eigenvalue table knows only p = 3, and the sources differ
        // there; p = 2 is silently skipped.
        let f5 = FieldDescriptor::prime_field(5).unwrap();
        let mut map = BTreeMap::new();
        map.insert(3, f5.from_u64(0));
        let table = EigenTable::Reduced { desc: f5, map };
        let form = ReprSource::Eigenform(EigenformData::new(1, 4, triv(), table).unwrap());
        let sum = reducible(0, 3, 5);
        assert_eq!(
            least_distinguishing_prime(&form, &sum, 1, 5, 10).unwrap(),
            Some(3)
        );
    }

    #[test]
    fn exact_tables_go_through_the_same_loop() {
        // The weight-12 level-one cusp form against itself, with exact
        // integer eigenvalues, at l = 691.
        let mut map = BTreeMap::new();
        for (p, ap) in [(2i64, -24i64), (3, 252), (5, 4830), (7, -16744)] {
            map.insert(p as u64, CycloElement::rational(rat_int(ap)));
        }
        let table = EigenTable::Exact { min_order: 1, map };
        let delta = ReprSource::Eigenform(EigenformData::new(1, 12, triv(), table).unwrap());
        assert_eq!(
            least_distinguishing_prime(&delta, &delta, 1, 691, 7).unwrap(),
            None
        );
    }
}
