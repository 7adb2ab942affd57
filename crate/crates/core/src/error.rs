//! Crate-wide error type.

use thiserror::Error;

use crate::complex::Diagnostics;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(Diagnostics),

    #[error("invalid complex: {0}")]
    InvalidComplex(Diagnostics),

    #[error("scale factor must be a positive finite real, got {0}")]
    NonpositiveScale(f64),

    #[error("graph input: {0}")]
    GraphInput(String),

    #[error("interior block is singular: an interior component has no path to the boundary")]
    SingularInterior,

    #[error("requested {k} eigenvalues but the network has only {boundary} boundary vertices")]
    TooManyEigenvalues { k: usize, boundary: usize },

    #[error("boundary restriction is identically zero: Rayleigh quotient undefined")]
    ZeroBoundaryDenominator,

    #[error("network has {n} vertices, above the dense pencil oracle cap of {cap}")]
    PencilTooLarge { n: usize, cap: usize },

    #[error("the full pencil has fewer than two finite eigenvalues")]
    PencilDeficient,

    #[error("complex has {cells} cells, above the enumeration cap of {cap}; use sweep_cuts or local_search_improve")]
    EnumerationTooLarge { cells: usize, cap: usize },

    #[error("local search seed violates the {variant} constraint")]
    InadmissibleSeed { variant: &'static str },

    #[error("mesh line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("mesh generator: {0}")]
    MeshGenerator(String),

    #[error("certificate: neither sign of the field gives an admissible positivity set ({reason})")]
    NoAdmissibleSign { reason: String },

    #[error("certificate: the positive part of the field vanishes on every cell")]
    EmptyThresholdTable,

    #[error("certificate: {0}")]
    Certificate(String),

    #[error("study: {0}")]
    Study(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
