use crate::euler::ConservedState;

/// Errors produced by the solver stack.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid gas model: gamma = {0} (must be > 1)")]
    InvalidGamma(f64),

    #[error("pressure undefined: zero density in state {0:?}")]
    ZeroDensity(ConservedState),

    #[error("inadmissible state in {context}: {state:?}")]
    InadmissibleState {
        context: &'static str,
        state: ConservedState,
    },

    #[error("inadmissible state at quadrature node {node} of cell {cell}, element {element}: {state:?}")]
    InadmissibleNode {
        cell: usize,
        element: usize,
        node: usize,
        state: ConservedState,
    },

    #[error("inadmissible cell mean in cell {cell}, element {element}: {state:?}")]
    InadmissibleMean {
        cell: usize,
        element: usize,
        state: ConservedState,
    },

    #[error("vacuum generated in Riemann problem (left {left:?}, right {right:?})")]
    RiemannVacuum { left: [f64; 3], right: [f64; 3] },

    #[error("star-pressure Newton iteration failed to converge after {iterations} iterations (residual {residual:e})")]
    RiemannNoConvergence { iterations: usize, residual: f64 },

    #[error("initial data returned a non-finite value at (x, y) = ({x}, {y}), xi = {xi:?}")]
    NonFiniteInitialData { x: f64, y: f64, xi: Vec<f64> },

    #[error("quadrature rule needs at least {min} points, got {got}")]
    TooFewQuadraturePoints { min: usize, got: usize },

    #[error("index out of range: {what} = {got} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("element count mismatch: expected {expected}, got {got}")]
    ElementCountMismatch { expected: usize, got: usize },

    #[error("periodic boundary on {side} is not paired with the opposite side")]
    UnmatchedPeriodicBoundary { side: &'static str },

    #[error("wave speeds vanish; CFL time step undefined")]
    ZeroWaveSpeeds,

    #[error("non-positive time step dt = {0}")]
    NonPositiveDt(f64),

    #[error("run aborted after reaching the maximum step count {0}")]
    MaxStepsExceeded(usize),

    #[error("invalid Runge-Kutta tableau: {0}")]
    InvalidTableau(String),

    #[error("collocation node {node} failed: {source}")]
    CollocationNode {
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("scenario invalid: {0}")]
    Scenario(String),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("eoc input invalid: {0}")]
    EocInput(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
