use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed configuration: {0}")]
    Config(String),

    #[error("quadrature did not converge: partial value {partial} (error estimate {error:e})")]
    Quadrature { partial: f64, error: f64 },

    #[error("Lambert W0 is undefined below -1/e (got {0})")]
    LambertDomain(f64),

    #[error("Δ = {delta} is below the attraction constant A_φ = {a_phi}")]
    DeltaBelowAttraction { delta: f64, a_phi: f64 },

    #[error("Δ = {delta} exceeds the temperedness constant C_φ = {c_phi}")]
    DeltaAboveTemperedness { delta: f64, c_phi: f64 },

    #[error("operation requires dimension {expected}, potential has dimension {found}")]
    Dimension { expected: usize, found: usize },

    #[error("depth {depth} is outside the supported range {min}..={max}")]
    Depth { depth: usize, min: usize, max: usize },

    #[error("invalid activity field: {0}")]
    InvalidActivity(String),

    #[error("region admits up to {n_max} particles, above the cap of {cap}; shrink the region")]
    ParticleCap { n_max: usize, cap: usize },

    #[error("partition function nearly vanishes (|Z| = {modulus:e}) at {location}")]
    ZeroFreeness { location: String, modulus: f64 },

    #[error("non-finite Monte Carlo weight: {0}")]
    NonFiniteWeight(String),

    #[error("boundary condition exceeded its declared bound {bound} (|τ| = {value})")]
    BoundaryBound { bound: f64, value: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}
