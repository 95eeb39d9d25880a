use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    // algebra
    #[error("line is a component of the curve")]
    DegenerateLine,
    #[error("point is not a root of the form (relative residual {residual:.3e})")]
    NotARoot { residual: f64 },
    #[error("non-real point without a conjugate partner (distance {distance:.3e})")]
    UnpairedPoint { distance: f64 },

    // topology
    #[error("curve is singular near a traced vertex (gradient norm {gradient:.3e})")]
    SingularCurve { gradient: f64 },
    #[error("component seeding failed: {0}")]
    SeedMiss(String),
    #[error("point is off the real locus (distance {distance:.3e})")]
    OffCurve { distance: f64 },
    #[error("ray casting stayed ambiguous after all retries")]
    Ambiguous,
    #[error("point is not inside the oval")]
    NotInterior,
    #[error("covering degree {0} is not +2 or -2")]
    CoveringDegree(i64),

    // family
    #[error("base point is not on the curve (residual {residual:.3e})")]
    NotOnCurve { residual: f64 },
    #[error("pencil end forms are proportional")]
    ProportionalForms,
    #[error("sampled loop does not close (distance {distance:.3e})")]
    NotClosed { distance: f64 },
    #[error("consecutive samples {index} and {next} are too far apart ({distance:.3e})", next = .index + 1)]
    TooCoarse { index: usize, distance: f64 },

    // tracking
    #[error("start divisor is not simple: {0}")]
    NonSimpleStart(String),
    #[error("loop meets the discriminant near t = {t:.6}")]
    DiscriminantHit { t: f64 },
    #[error("corrector diverged at t = {t:.6} for point {point}")]
    CorrectorDiverged { t: f64, point: usize },
    #[error("ambiguous step-to-step matching at t = {t:.6}")]
    MatchAmbiguity { t: f64 },
    #[error("curve is not a cubic")]
    NotCubic,

    // choreography
    #[error("winding sum {value:.6} on component {component} is not an integer")]
    NonIntegerWinding { component: usize, value: f64 },
    #[error("end divisor does not match the start divisor")]
    MatchFailure,
    #[error("component {component} carries no point but its winding is nonzero")]
    UnoccupiedNonzero { component: usize },
    #[error("paths do not share an endpoint divisor")]
    EndpointMismatch,
}

impl Error {
    /// True for the errors that mean the loop left the space of simple divisors.
    pub fn is_discriminant(&self) -> bool {
        matches!(self, Error::DiscriminantHit { .. })
    }
}
