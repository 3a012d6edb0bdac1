use thiserror::Error;

pub type Result<T> = core::result::Result<T, FfaError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FfaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("{what} = {value} outside the admissible domain")]
    Domain { what: &'static str, value: f64 },
    #[error("energy {0} sits on a band edge where the density of states diverges")]
    BandEdge(f64),
    #[error("z = {re} + {im}i lies on the branch cut of the self-energy")]
    BranchCut { re: f64, im: f64 },
    #[error("quadrature did not converge: estimated error {error:e} after {evaluations} evaluations")]
    Quadrature { error: f64, evaluations: usize },
    #[error("operation requires a non-Hermitian impurity (Im(Ea) != 0)")]
    HermitianInput,
    #[error("operation requires a Hermitian impurity (Im(Ea) = 0)")]
    NonHermitianInput,
    #[error("operation requires a purely real spectrum (no bound states)")]
    ComplexSpectrum,
    #[error("resolvent denominator {0:e} is numerically zero (pole at z)")]
    PoleProximity(f64),
    #[error("reflection coefficient diverges at k = {0}")]
    DivergentReflection(f64),
    #[error("contour passes through a zero; retry with a shifted rectangle")]
    ContourThroughZero,
    #[error("time step {dt} exceeds the RK4 stability bound {limit}")]
    StepRejected { dt: f64, limit: f64 },
    #[error("lattice too short: norm {norm:e} reached the far wall at t = {t}")]
    InsufficientLattice { norm: f64, t: f64 },
    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,
}
