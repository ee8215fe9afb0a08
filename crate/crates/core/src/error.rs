use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {cell} is degenerate (measure {measure:e})")]
    DegenerateCell { cell: usize, measure: f64 },
    #[error("cell {cell} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange { cell: usize, index: usize, count: usize },
    #[error("cell {cell} repeats vertex {vertex}")]
    RepeatedVertex { cell: usize, vertex: usize },
    #[error("facet {facet:?} is shared by {count} cells")]
    NonManifold { facet: Vec<usize>, count: usize },
    #[error("vertex {0} is not used by any cell")]
    OrphanVertex(usize),
    #[error("supplied boundary nodes differ from the mesh boundary (first mismatch at vertex {0})")]
    BoundaryMismatch(usize),
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field has {found} values but the mesh has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("no quadrature rule of degree {degree} for dimension {dim}")]
    NoQuadratureRule { dim: usize, degree: usize },
    #[error("quadrature degree {degree} is below 4 for non-constant coefficients")]
    QuadratureDegreeTooLow { degree: usize },
    #[error("boundary node {0} has no prescribed value")]
    MissingBoundaryValue(usize),
    #[error("linear solve stalled at relative residual {residual:e} after {iterations} iterations")]
    LinearSolveDiverged { residual: f64, iterations: usize },
    #[error("Picard iteration did not converge in {iterations} iterations (last update {update:e})")]
    PicardDiverged { iterations: usize, update: f64 },
    #[error("the cut threshold is undefined for coefficients with c of general sign")]
    UnsupportedCMode,
    #[error("refusing to certify an unconverged solution")]
    NotConverged,
    #[error("De Giorgi hypothesis violated between levels {k:e} and {s:e}")]
    HypothesisViolated { k: f64, s: f64 },
    #[error("coefficient check failed: {0}")]
    CoefficientViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
