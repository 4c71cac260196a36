use thiserror::Error;

use crate::state::{BasisLabel, FactorSet};

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} violates {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("duplicate basis label {0}")]
    DuplicateLabel(BasisLabel),

    #[error("label {label} does not match the factor set {expected}")]
    FactorMismatch {
        label: BasisLabel,
        expected: FactorSet,
    },

    #[error("states share tensor factors {0}")]
    OverlappingFactors(FactorSet),

    #[error("state factors {left} and {right} differ")]
    StructureMismatch { left: FactorSet, right: FactorSet },

    #[error("map does not cover input label {0}")]
    UncoveredLabel(BasisLabel),

    #[error("state has no {0} factor")]
    MissingFactor(&'static str),

    #[error("a state needs at least one basis entry")]
    EmptyState,

    #[error("non-finite amplitude produced for {0}")]
    NonFinite(BasisLabel),

    #[error("photon has no propagation direction; it is not inside the cavity stage")]
    UndefinedDirection,

    #[error("degenerate cavity parameters: {0}")]
    DegenerateCavity(&'static str),

    #[error("clone photon already present")]
    CloneAlreadyPresent,

    #[error("input ensemble is empty")]
    EmptyEnsemble,

    #[error("input amplitudes are not normalized: {0}")]
    NotNormalized(&'static str),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("unknown target `{given}`; valid targets: {valid}")]
    UnknownTarget { given: String, valid: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by reading or writing files.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    constraint: &'static str,
) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint,
        })
    }
}
