use crate::numerics::Cx;
use thiserror::Error;

/// Errors raised across the analysis pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("polynomial degree {degree} exceeds the supported maximum of {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("indeterminate value 0/0 at {at}")]
    Indeterminate { at: Cx },
    #[error("point {at} is not isolated from the singular set")]
    NotIsolated { at: Cx },
    #[error("evaluation at a singularity {at}")]
    AtSingularity { at: Cx },
    #[error("analytic derivative of the mapping vanishes identically")]
    DegenerateAnalyticPart,
    #[error("indeterminate Poincare index: leading coefficients tie ({detail})")]
    IndeterminateIndex { detail: String },
    #[error("dilatation is a unimodular constant; the critical set is not a curve family")]
    DegenerateDilatation,
    #[error("tracing hit a branch point near {at}")]
    HitBranchPoint { at: Cx },
    #[error("tracing exceeded {steps} steps")]
    MaxSteps { steps: usize },
    #[error("arc graph vertex {vertex} has in-degree {inn} and out-degree {out}")]
    UnbalancedVertex { vertex: usize, inn: usize, out: usize },
    #[error("sample coincides with a singularity at {at}")]
    SingularSample { at: Cx },
    #[error("no tile representative farther than {margin} from the caustics")]
    TooClose { margin: f64 },
    #[error("segment touches the caustic tangentially")]
    TangentialCrossing,
    #[error("segment crosses the caustic {count} times")]
    MultipleCrossings { count: usize },
    #[error("point lies on the curve (distance {distance:e})")]
    OnCurve { distance: f64 },
    #[error("winding sum {value} is not close to an integer")]
    NonInteger { value: f64 },
    #[error("eta lies within {distance:e} of a caustic (margin {margin:e})")]
    EtaOnCaustic { distance: f64, margin: f64 },
    #[error("eta lies on the image of a region boundary (distance {distance:e})")]
    EtaOnBoundaryImage { distance: f64 },
    #[error("mapping is degenerate: {0}")]
    DegenerateMap(String),
    #[error("|eta| must exceed {threshold}")]
    EtaTooSmall { threshold: f64 },
    #[error("Jacobian vanishes at {at}")]
    SingularJacobian { at: Cx },
    #[error("solver found {found} pre-images, counting formula gives {expected}")]
    CountMismatch { found: usize, expected: i64 },
    #[error("point is not a fold of the caustic")]
    NotAFold,
    #[error("analytic derivative vanishes at the critical point")]
    DegenerateA1,
    #[error("point is not a cusp of the caustic")]
    NotACusp,
    #[error("cusp direction coefficient vanishes")]
    DegenerateCtilde,
    #[error("interpolation nodes coincide")]
    CoincidentPoints,
    #[error("path blocked by caustic features after {attempts} detours")]
    PathBlocked { attempts: usize },
    #[error("|eta2 - eta1| must stay below {radius} for relative counting")]
    OutsideRelativeDisk { radius: f64 },
    #[error("radius {eps} does not isolate the poles and infinity in single-sense regions")]
    LocalizationRadius { eps: f64 },
    #[error("brute-force oracle exceeded its budget of {cells} cells")]
    OracleBudget { cells: usize },
    #[error("invalid mapping spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
