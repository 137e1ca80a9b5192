//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
///
/// Variants carry enough data for callers to react programmatically; messages
/// are written for CLI display.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: u64, max: u64 },

    #[error("cyclotomic order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: u64, max: u64 },

    #[error("modulus polynomial is invalid: {0}")]
    BadModulus(String),

    #[error("field descriptors differ: {left} vs {right}")]
    DescriptorMismatch { left: String, right: String },

    #[error("inverse of zero")]
    DivisionByZero,

    #[error("root-of-unity order {m} is divisible by the characteristic {ell}")]
    EllDividesOrder { m: u64, ell: u64 },

    #[error("no root of unity of order {m} in a field of {q} elements")]
    NoRootOfUnity { m: u64, q: String },

    #[error("could not factor the multiplicative group order within budget")]
    FactorBudgetExhausted,

    #[error("value of order {order} cannot pass through an embedding of order {embedding_order}")]
    IncompatibleOrder { order: u64, embedding_order: u64 },

    #[error("denominator divisible by {ell}{}", match index { Some(n) => format!(" at index {n}"), None => String::new() })]
    NotEllIntegral { ell: u64, index: Option<u64> },

    #[error("invalid character data for modulus {modulus}: {detail}")]
    BadCharacter { modulus: u64, detail: String },

    #[error("character modulus {modulus} does not divide {bound}")]
    ModulusNotDividing { modulus: u64, bound: u64 },

    #[error("series weights differ ({left} vs {right}) and mixed-weight addition was not requested")]
    WeightMismatch { left: u64, right: u64 },

    #[error("series characters differ")]
    CharacterMismatch,

    #[error("series levels differ ({left} vs {right})")]
    LevelMismatch { left: u64, right: u64 },

    #[error("coefficient domains differ ({left} vs {right})")]
    DomainMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("operation rejects series carrying the mixed-weight marker")]
    MixedWeightInput,

    #[error("{p} does not divide the level {level}")]
    PrimeNotInLevel { p: u64, level: u64 },

    #[error("theta acts on finite-field coefficients only")]
    ThetaNeedsFiniteField,

    #[error("series must be reduced to a finite field first")]
    SeriesNotReduced,

    #[error("character parity does not match weight {k}")]
    ParityViolation { k: u64 },

    #[error("phi (modulus {modulus}) must be primitive, its conductor is {conductor}")]
    PhiNotPrimitive { modulus: u64, conductor: u64 },

    #[error("the weight-2 series for two trivial characters is not a holomorphic form on its own")]
    NonHolomorphicEisenstein,

    #[error("ambient level {ambient} is not a multiple of t*u*v = {tuv}")]
    LevelNotDivisible { tuv: u64, ambient: u64 },

    #[error("l = 2 is rejected here: 2 has no inverse in characteristic 2")]
    EllTwoHalving,

    #[error("weight {k} is outside the allowed range {min}..={max}")]
    WeightOutOfRange { k: u64, min: u64, max: u64 },

    #[error("weight {k} is too small, need at least {min}")]
    WeightTooSmall { k: u64, min: u64 },

    #[error("character modulus {modulus} is wildly ramified at {ell} (l^2 divides it)")]
    WildCharacter { modulus: u64, ell: u64 },

    #[error("character value order {order} is divisible by l = {ell}, so it has no faithful mod-l reduction")]
    ValueOrderDivisibleByEll { order: u64, ell: u64 },

    #[error("prime-to-l Artin conductor {conductor} does not divide N = {bound}")]
    ConductorNotDividing { conductor: u64, bound: u64 },

    #[error("prime-to-l part {level_prime_to_ell} of the level does not divide N = {bound}")]
    LevelNotDividing { level_prime_to_ell: u64, bound: u64 },

    #[error("source characteristic {found} does not match the requested l = {expected}")]
    EllMismatch { expected: u64, found: u64 },

    #[error("l = {ell} divides the level N = {level}")]
    EllDividesLevel { ell: u64, level: u64 },

    #[error("eigenvalue table has no entry for prime {0}")]
    MissingEigenvalue(u64),

    #[error("prime {p} is excluded here (it divides {excluded})")]
    BadPrime { p: u64, excluded: u64 },

    #[error("precision {actual} is too small, need at least {required}")]
    PrecisionTooSmall { required: u64, actual: u64 },

    #[error("bound {0} is too large to enumerate primes for")]
    BoundTooLarge(String),

    #[error("{0} must be positive")]
    NotPositive(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
