use thiserror::Error;

/// Errors shared across the solver stack.
#[derive(Debug, Error)]
pub enum AxiError {
    /// Field dimensions do not match the grid they claim to live on.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input that makes the requested operation meaningless (e.g. a zero
    /// field passed to the constraint projection).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A parameter outside the supported domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Newton iteration stalled before reaching tolerance.
    #[error("Newton did not converge after {iters} iterations (last residual {residual:.3e})")]
    NonConvergence { iters: usize, residual: f64 },

    /// Gradient flow hit the step cap before reaching the residual tolerance.
    /// `history` holds (step, max residual norm) snapshots of the tail of the run.
    #[error("gradient flow did not converge after {steps} steps (last residual {residual:.3e})")]
    FlowNonConvergence {
        steps: usize,
        residual: f64,
        history: Vec<(usize, f64)>,
    },

    /// The line search could not find a non-increasing step.
    #[error("step-size failure at flow step {step}: line search exhausted at tau={tau:.3e}")]
    StepSizeFailure { step: usize, tau: f64 },

    /// Bisection bracket does not contain a sign change.
    #[error("no sign change of G0-G1 over b in [{lo}, {hi}] at rho={rho}")]
    Bracketing { lo: f64, hi: f64, rho: f64 },

    /// The state is not in the single-nodal-line topological class.
    #[error("phase winding {found} is incompatible with a single nodal line")]
    Topology { found: i64 },

    /// Winding is undefined because |psi| vanishes on the boundary ring.
    #[error("phase winding undefined: |psi| has a zero on the boundary ring")]
    UndefinedWinding,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AxiError>;
