use thiserror::Error;

/// Violations of a parameter, state, or map domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("sigma must be positive and finite (got {0})")]
    Sigma(f64),
    #[error("b must be positive and finite (got {0})")]
    B(f64),
    #[error("rayleigh must be finite (got {0})")]
    RayleighNotFinite(f64),
    #[error("normalization requires rayleigh > 1 (got {0})")]
    RayleighNotAboveOne(f64),
    #[error("mu must be positive and finite (got {0})")]
    Mu(f64),
    #[error("beta must be positive and finite (got {0})")]
    Beta(f64),
    #[error("gamma must be finite (got {0})")]
    GammaNotFinite(f64),
    #[error("no standard-form preimage: requires 0 < gamma < 1 (got {0})")]
    GammaOutOfRange(f64),
    #[error("no standard-form preimage: requires 2*mu*(1-gamma) > beta (mu={mu}, beta={beta}, gamma={gamma})")]
    NoStandardPreimage { mu: f64, beta: f64, gamma: f64 },
    #[error("fold count n must be >= 1 (got {0})")]
    FoldCount(u32),
    #[error("point ({x}, {y}, {z}) lies on the z-axis where the quotient map is undefined")]
    OnAxis { x: f64, y: f64, z: f64 },
    #[error("radius {radius} is below the minimum {min} at ({x}, {y}, {z})")]
    NearAxis { radius: f64, min: f64, x: f64, y: f64, z: f64 },
    #[error("color {color} is not below n={n}")]
    ColorOutOfRange { color: u32, n: u32 },
    #[error("state is not finite")]
    NotFinite,
}
