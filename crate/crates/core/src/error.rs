use thiserror::Error;

/// Errors raised by the geometry, lattice and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NilError {
    #[error("zero-length curve: the point coincides with the curve origin")]
    ZeroLengthCurve,

    #[error("bisector undefined: the two points coincide")]
    BisectorUndefined,

    #[error("degenerate vertex triple: {0}")]
    DegenerateTriple(String),

    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),

    #[error("no equilateral completion found")]
    NoEquilateralCompletion,

    #[error("degenerate tetrahedron: {0}")]
    DegenerateTetrahedron(String),

    #[error("circumsphere solve did not converge (best residual {best_residual:.3e})")]
    CircumsphereNoConvergence { best_residual: f64 },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("decomposition defined for k=1 (got k={0})")]
    DecompositionRequiresK1(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("all objective evaluations were infeasible")]
    AllInfeasible,
}

pub type Result<T> = std::result::Result<T, NilError>;
