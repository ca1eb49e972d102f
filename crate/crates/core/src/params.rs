//! Parameter triples of the standard and normalized Lorenz forms and the
//! change of variables and time relating them.

use crate::error::DomainError;
use crate::math;
use crate::state::CartesianState;

/// `(sigma, rayleigh, b)` of the standard Lorenz system.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StandardParams {
    pub sigma: f64,
    pub rayleigh: f64,
    pub b: f64,
}

impl Default for StandardParams {
    fn default() -> Self {
        Self::CANONICAL
    }
}

impl StandardParams {
    /// `(10, 28, 8/3)`.
    pub const CANONICAL: Self = Self { sigma: 10.0, rayleigh: 28.0, b: 8.0 / 3.0 };

    pub fn new(sigma: f64, rayleigh: f64, b: f64) -> Result<Self, DomainError> {
        let p = Self { sigma, rayleigh, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(DomainError::Sigma(self.sigma));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(DomainError::B(self.b));
        }
        if !self.rayleigh.is_finite() {
            return Err(DomainError::RayleighNotFinite(self.rayleigh));
        }
        Ok(())
    }

    fn check_normalizable(&self) -> Result<(), DomainError> {
        self.validate()?;
        if self.rayleigh <= 1.0 {
            return Err(DomainError::RayleighNotAboveOne(self.rayleigh));
        }
        Ok(())
    }

    /// `sqrt((rayleigh - 1) * sigma)`: normalized time per unit of standard time.
    pub fn time_scale(&self) -> Result<f64, DomainError> {
        self.check_normalizable()?;
        Ok(math::sqrt((self.rayleigh - 1.0) * self.sigma))
    }

    pub fn normalize(&self) -> Result<NormalizedParams, DomainError> {
        let s = self.time_scale()?;
        Ok(NormalizedParams { mu: (1.0 + self.sigma) / s, beta: self.b / s, gamma: 1.0 - self.b / (2.0 * self.sigma) })
    }

    /// The two nontrivial equilibria `(±sqrt(b(r-1)), ±sqrt(b(r-1)), r-1)`.
    ///
    /// Only real for `rayleigh > 1`.
    pub fn nontrivial_equilibria(&self) -> Result<[CartesianState; 2], DomainError> {
        self.check_normalizable()?;
        let q = math::sqrt(self.b * (self.rayleigh - 1.0));
        let z = self.rayleigh - 1.0;
        Ok([CartesianState::new(q, q, z), CartesianState::new(-q, -q, z)])
    }

    /// Standard-form state and time to normalized form.
    pub fn state_normalize(&self, s: CartesianState, t_standard: f64) -> Result<(CartesianState, f64), DomainError> {
        let ts = self.time_scale()?;
        let rm1 = self.rayleigh - 1.0;
        let x = s.x / math::sqrt(rm1 * self.b);
        let y = (s.y - s.x) * math::sqrt(self.sigma / self.b) / rm1;
        let z = (s.z - s.x * s.x / (2.0 * self.sigma)) / rm1;
        Ok((CartesianState::new(x, y, z), ts * t_standard))
    }

    /// Inverse of [`state_normalize`](Self::state_normalize).
    pub fn state_denormalize(&self, s: CartesianState, t: f64) -> Result<(CartesianState, f64), DomainError> {
        let ts = self.time_scale()?;
        let rm1 = self.rayleigh - 1.0;
        let x = math::sqrt(rm1 * self.b) * s.x;
        let y = x + rm1 * math::sqrt(self.b / self.sigma) * s.y;
        let z = rm1 * s.z + x * x / (2.0 * self.sigma);
        Ok((CartesianState::new(x, y, z), t / ts))
    }
}

/// `(mu, beta, gamma)` of the normalized form.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizedParams {
    pub mu: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for NormalizedParams {
    fn default() -> Self {
        Self::canonical()
    }
}

impl NormalizedParams {
    pub fn new(mu: f64, beta: f64, gamma: f64) -> Result<Self, DomainError> {
        let p = Self { mu, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    /// Image of [`StandardParams::CANONICAL`].
    pub fn canonical() -> Self {
        StandardParams::CANONICAL.normalize().expect("canonical parameters are normalizable")
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(DomainError::Mu(self.mu));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(DomainError::Beta(self.beta));
        }
        if !self.gamma.is_finite() {
            return Err(DomainError::GammaNotFinite(self.gamma));
        }
        Ok(())
    }

    /// Algebraic inverse of [`StandardParams::normalize`].
    pub fn denormalize(&self) -> Result<StandardParams, DomainError> {
        self.validate()?;
        let NormalizedParams { mu, beta, gamma } = *self;
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(DomainError::GammaOutOfRange(gamma));
        }
        let denom = 2.0 * mu * (1.0 - gamma) - beta;
        if denom <= 0.0 {
            return Err(DomainError::NoStandardPreimage { mu, beta, gamma });
        }
        let sigma = beta / denom;
        let b = 2.0 * sigma * (1.0 - gamma);
        let rayleigh = 1.0 + (1.0 + sigma) * (1.0 + sigma) / (mu * mu * sigma);
        Ok(StandardParams { sigma, rayleigh, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 50-digit mpmath evaluation.
    const MU: f64 = 0.669_438_681_395_203;
    const BETA: f64 = 0.162_288_165_186_715_88;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn canonical_normalization() {
        let n = StandardParams::CANONICAL.normalize().unwrap();
        assert!(rel(n.mu, MU) < 1e-14, "{}", n.mu);
        assert!(rel(n.beta, BETA) < 1e-14, "{}", n.beta);
        assert!(rel(n.gamma, 13.0 / 15.0) < 1e-15);
    }

    #[test]
    fn gamma_vanishes_when_sigma_is_half_b() {
        let n = StandardParams::new(2.0, 5.0, 4.0).unwrap().normalize().unwrap();
        assert_eq!(n.gamma, 0.0);
    }

    #[test]
    fn normalization_rejects_subcritical_rayleigh() {
        for r in [1.0, 0.5, -3.0] {
            let p = StandardParams::new(10.0, r, 8.0 / 3.0).unwrap();
            assert_eq!(p.normalize(), Err(DomainError::RayleighNotAboveOne(r)));
            assert!(p.state_normalize(CartesianState::ORIGIN, 0.0).is_err());
        }
    }

    #[test]
    fn denormalize_round_trip() {
        let p = StandardParams::CANONICAL;
        let q = p.normalize().unwrap().denormalize().unwrap();
        assert!(rel(q.sigma, p.sigma) < 1e-12);
        assert!(rel(q.rayleigh, p.rayleigh) < 1e-12);
        assert!(rel(q.b, p.b) < 1e-12);
    }

    #[test]
    fn denormalize_preconditions() {
        // mu = k * beta with 2k(1 - gamma) <= 1
        let gamma = 0.5;
        let beta = 0.3;
        let k = 1.0;
        assert!(matches!(
            NormalizedParams::new(k * beta, beta, gamma).unwrap().denormalize(),
            Err(DomainError::NoStandardPreimage { .. })
        ));
        for g in [1.0, 1.5, 0.0, -0.2] {
            assert_eq!(NormalizedParams::new(1.0, 0.1, g).unwrap().denormalize(), Err(DomainError::GammaOutOfRange(g)));
        }
    }

    #[test]
    fn equilibria_map_to_normalized_equilibria() {
        let p = StandardParams::CANONICAL;
        let g = p.normalize().unwrap().gamma;
        let [cp, cm] = p.nontrivial_equilibria().unwrap();
        assert!((cp.x - 72f64.sqrt()).abs() < 1e-14);
        let (a, _) = p.state_normalize(cp, 0.0).unwrap();
        let (b, _) = p.state_normalize(cm, 0.0).unwrap();
        assert!(a.max_abs_diff(&CartesianState::new(1.0, 0.0, g)) < 1e-14);
        assert!(b.max_abs_diff(&CartesianState::new(-1.0, 0.0, g)) < 1e-14);
        let (back, _) = p.state_denormalize(CartesianState::new(1.0, 0.0, g), 0.0).unwrap();
        assert!(back.max_abs_diff(&cp) < 1e-12);
        let (o, t) = p.state_normalize(CartesianState::ORIGIN, 0.0).unwrap();
        assert_eq!((o, t), (CartesianState::ORIGIN, 0.0));
    }

    #[test]
    fn state_round_trip() {
        let p = StandardParams::new(7.5, 19.0, 1.3).unwrap();
        let s = CartesianState::new(-4.2, 3.3, 21.0);
        let (n, t) = p.state_normalize(s, 1.75).unwrap();
        let (back, tl) = p.state_denormalize(n, t).unwrap();
        assert!(rel(back.x, s.x) < 1e-12 && rel(back.y, s.y) < 1e-12 && rel(back.z, s.z) < 1e-12);
        assert!(rel(tl, 1.75) < 1e-12);
    }
}
