use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants are grouped by the stage that raises them; [`Error::class`] maps
/// them onto the coarse failure classes used for process exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // numerical kernel
    #[error("matrix is not hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },
    #[error("eigen-solver did not converge")]
    NoConvergence,
    #[error("matrix is near singular (smallest singular value / |det| = {value:.3e}); refine the mesh")]
    NearSingular { value: f64 },
    #[error("eigenphase {phase:.4} lies within the branch-cut margin of ±π; refine the mesh")]
    BranchCut { phase: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite matrix entry")]
    NonFinite,

    // base spaces
    #[error("unsupported base space: {0}")]
    UnsupportedSpace(String),
    #[error("cycle degree {degree} out of range for a {dim}-dimensional base")]
    DegreeOutOfRange { degree: usize, dim: usize },

    // bundle data
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("grids differ")]
    GridMismatch,
    #[error("frames differ by {residual:.3e} at point {point}")]
    FrameMismatch { point: usize, residual: f64 },
    #[error("grid map target {target} out of range (grid has {len} points)")]
    TargetOutOfRange { target: usize, len: usize },
    #[error("gradation is not symmetric: n+ = {plus}, n- = {minus} at point {point}")]
    AsymmetricGradation { point: usize, plus: usize, minus: usize },
    #[error("invalid bundle data: {0}")]
    InvalidBundle(String),

    // spectral pipeline
    #[error("contour passes within {distance:.3e} of eigenvalue {eigenvalue:.6} at point {point}")]
    ContourTouchesSpectrum { point: usize, eigenvalue: f64, distance: f64 },
    #[error("projector rank drifts: {expected} at the first point, {found} at point {point}")]
    RankDrift { point: usize, expected: usize, found: usize },
    #[error("spectral gap violated at point {point}: eigenvalue {eigenvalue:.3e}")]
    GapViolation { point: usize, eigenvalue: f64 },
    #[error("chiral symmetry violated at point {point}: residual {residual:.3e}")]
    ChiralityViolation { point: usize, residual: f64 },
    #[error("selected band family is not chirally symmetric: tr Γ = {trace:.3} at point {point}")]
    AsymmetricFamily { point: usize, trace: f64 },

    // invariants
    #[error("link {from} -> {to} not admissible: overlap {overlap:.3e} below threshold")]
    Admissibility { from: usize, to: usize, overlap: f64 },
    #[error("plaquette flux {flux:.4} too close to ±π; refine the mesh")]
    BranchMarginal { flux: f64 },
    #[error("phase step {step:.4} too close to ±π; refine the mesh")]
    StepMarginal { step: f64 },
    #[error("no global frame over the cycle: {0}")]
    NotFramable(String),
    #[error("line holonomy eigenphase {phase:.3} at the branch cut; the holonomy cannot be spread")]
    HolonomyAtCut { phase: f64 },
    #[error("raw value {raw:.6} is {residual:.3e} away from the nearest integer (tolerance {tol})")]
    Unresolved { raw: f64, residual: f64, tol: f64 },
    #[error("extension differs from the boundary map by {residual:.3e}")]
    BoundaryMismatch { residual: f64 },

    // classification
    #[error("homotopy group outside the tabulated range: {0}")]
    OutsideTabulatedRange(String),
    #[error("classification outside the proved range: {0}")]
    OutsideProvedRange(String),
    #[error("report is missing generators: {}", .missing.join(", "))]
    IncompleteReport { missing: Vec<String> },

    // model zoo, configuration, I/O
    #[error("bad model parameters: {0}")]
    BadParams(String),
    #[error("unknown model `{name}`; available: {}", .available.join(", "))]
    UnknownModel { name: String, available: Vec<String> },
    #[error("bad policy override: {0}")]
    BadPolicy(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse failure classes, one per process exit code of the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    Usage,
    Range,
    Params,
    Validation,
    Unresolved,
    Boundary,
}

impl Error {
    pub fn class(&self) -> FailureClass {
        use Error::*;
        match self {
            OutsideTabulatedRange(_) | OutsideProvedRange(_) => FailureClass::Range,
            BadParams(_) | UnknownModel { .. } => FailureClass::Params,
            BadPolicy(_) | Format(_) | Io(_) | DegreeOutOfRange { .. } => FailureClass::Usage,
            Unresolved { .. }
            | BranchCut { .. }
            | BranchMarginal { .. }
            | StepMarginal { .. }
            | NotFramable(_)
            | HolonomyAtCut { .. }
            | IncompleteReport { .. } => FailureClass::Unresolved,
            BoundaryMismatch { .. } => FailureClass::Boundary,
            _ => FailureClass::Validation,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
