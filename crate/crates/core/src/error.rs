use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("strong convexity violated: mu = {mu}, n*lambda + 2*mu = {cone}")]
    StrongConvexityViolated { mu: f64, cone: f64 },
    #[error("invalid frequency {0}; omega must be positive")]
    InvalidFrequency(f64),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("normal vector is not unit length (|nu| = {0})")]
    NonUnitNormal(f64),
    #[error("grid too coarse: {ppw:.3} points per wavelength, need at least {required}")]
    GridTooCoarse { ppw: f64, required: f64 },
    #[error("Hölder exponent {0} outside the admissible range")]
    InvalidExponent(f64),
    #[error("at least two samples are needed, got {0}")]
    InsufficientSamples(usize),
    #[error("field has {field} samples but the mesh has {mesh} nodes")]
    MeshMismatch { field: usize, mesh: usize },
    #[error("field contains non-finite values")]
    NonFiniteField,
    #[error("chart invalid: {0}")]
    ChartInvalid(String),
    #[error("mesh too coarse: h = {h}, minimum feature size = {feature}")]
    MeshTooCoarse { h: f64, feature: f64 },
    #[error("domain has a single component")]
    SingleComponent,
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("coincident source and target points")]
    CoincidentPoints,
    #[error("argument must be positive, got {0}")]
    NonpositiveArgument(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bump does not vanish on the boundary: max |u| = {value:e}, max |grad u| = {gradient:e}")]
    BumpNotVanishing { value: f64, gradient: f64 },
    #[error("Neumann series diverges: contraction factor {0:.4}")]
    SeriesDiverges(f64),
    #[error("singular collocation system")]
    SingularSystem,
    #[error("invalid direction: {0}")]
    InvalidDirection(String),
    #[error("contrast out of regime: eps*|V| = {product} >= s = {s}")]
    OutOfRegime { product: f64, s: f64 },
    #[error("tau = {tau} must exceed kappa_s = {kappa_s}")]
    TauTooSmall { tau: f64, kappa_s: f64 },
    #[error("direction pair is not orthonormal")]
    NonOrthonormalPair,
    #[error("integrand does not decay: Re(xi_n) = {0} >= 0")]
    NonDecaying(f64),
    #[error("invalid curvatures K- = {k_minus}, K+ = {k_plus}")]
    InvalidCurvatures { k_minus: f64, k_plus: f64 },
    #[error("boundary condition violated on the graph part: {0}")]
    BoundaryConditionViolated(String),
    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudgetExceeded(String),
    #[error("K = {0} is below e")]
    KTooSmall(f64),
    #[error("degenerate moduli: determinant {0:e}")]
    DegenerateModuli(f64),
    #[error("exponent out of range: {0}")]
    ExponentOutOfRange(String),
    #[error("degenerate contrast: inf |V| on the boundary is zero")]
    DegenerateContrast,
    #[error("no root in the bracket: target {target} exceeds {max}")]
    NoRoot { target: f64, max: f64 },
    #[error("incomplete inputs: missing {0}")]
    IncompleteInputs(String),
    #[error("empty sweep")]
    EmptySweep,
    #[error("export failed: {0}")]
    Export(String),
}

pub type Result<T> = std::result::Result<T, Error>;
