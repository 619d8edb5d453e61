use thiserror::Error;

/// Crate-wide error type.
///
/// Solver outcomes that are legitimate answers (infeasible LPs, `+inf`
/// function values) are encoded in result types, not here; this enum is for
/// violated preconditions, detected assumption failures and numeric
/// breakdowns.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("brute-force guard exceeded: {0}")]
    GuardViolation(String),

    #[error("constraint system is infeasible")]
    InfeasibleRegion,

    #[error("projection produced no points on the image hyperplane")]
    EmptyProjection,

    #[error("polyhedron contains a line and therefore has no vertices")]
    NotPointed,

    #[error("epigraph has no vertex; the vertex-enumeration algorithm does not apply")]
    NoEpigraphVertex,

    #[error("function representation is improper (empty domain)")]
    ImproperFunction,

    #[error("representation is unbounded below at a point; not a function value")]
    UnboundedValue,

    #[error("objective is unbounded along extreme direction {direction} from vertex {vertex} (step {beta})")]
    UnboundedProblem {
        vertex: usize,
        direction: usize,
        beta: f64,
    },

    #[error("convex oracle is not closed; the dual algorithm requires a closed function")]
    NonClosedOracle,

    #[error("shifted minimization returned no solution at the selected dual vertex")]
    ArgminUnavailable,

    #[error("objective is +inf at every enumerated primal vertex")]
    PrimalInfeasible,

    #[error("conjugate oracle is +inf at every enumerated dual vertex")]
    DualInfeasible,

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
