use thiserror::Error;

use crate::model::Charge;

#[derive(Debug, Error)]
pub enum Error {
    /// A tree shape is malformed or does not admit the requested operation.
    #[error("shape error: {0}")]
    Shape(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A state or operator would couple different global-charge sectors.
    #[error("charge superselection violated: {0}")]
    Cssr(String),

    /// The requested fusion channel is not an allowed outcome.
    #[error("fusion error: {0}")]
    Fusion(String),

    #[error("operator is not a density operator: {0}")]
    NotDensity(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn unknown_charge(c: Charge) -> Self {
        Error::Domain(format!("charge index {} is not declared by the model", c.0))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
