use std::path::PathBuf;

use crate::model::VarId;

#[derive(Debug, thiserror::Error)]
pub enum MilpError {
    #[error("invalid bounds for variable `{name}`: lower {lower} > upper {upper}")]
    Bounds { name: String, lower: f64, upper: f64 },

    #[error("binary variable `{name}` must have bounds inside [0, 1], got [{lower}, {upper}]")]
    BinaryBounds { name: String, lower: f64, upper: f64 },

    #[error("variable {0:?} does not exist in the model")]
    UnknownVariable(VarId),

    #[error("variable `{name}` ({id:?}) is not binary")]
    NotBinary { id: VarId, name: String },

    #[error("cannot fix binary `{name}` to {value}: only 0 and 1 are allowed")]
    NotBooleanValue { name: String, value: f64 },

    #[error("variable {var:?} appears more than once in constraint `{constraint}`")]
    DuplicateTerm { constraint: String, var: VarId },

    #[error("non-finite coefficient in `{context}`")]
    NonFinite { context: String },

    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),

    #[error("name `{0}` cannot be written in LP format")]
    InvalidName(String),

    #[error("failed to write `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = MilpError> = std::result::Result<T, E>;
