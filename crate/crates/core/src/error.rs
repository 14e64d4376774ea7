use thiserror::Error;

use crate::formula::Var;

/// Errors raised while reading inputs or configuring a solve.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("variable {0} occurs in both parts but is missing from the explicit interface")]
    InterfaceMissingShared(Var),

    #[error("interface variable {0} does not occur in either part")]
    InterfaceUnknownVar(Var),

    #[error("variable {var} exceeds the declared variable count {n_vars}")]
    VarOutOfRange { var: Var, n_vars: usize },

    #[error("guidance refers to unknown variable {0}")]
    UnknownGuidanceVar(Var),

    #[error("invalid guidance profile: {0}")]
    GuidanceProfile(String),

    #[error("proof step {step}: {reason}")]
    InvalidProof { step: usize, reason: String },

    #[error("proof contains deletion steps; trim it before interpolating")]
    ProofHasDeletions,

    #[error("oracle size cap exceeded: {vars} variables (limit {limit})")]
    OracleTooLarge { vars: usize, limit: usize },

    #[error("generator parameter: {0}")]
    Generator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
