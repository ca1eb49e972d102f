//! Largest Lyapunov exponent by two-trajectory renormalization, and a
//! comparison table across members of the Lorenz class.
//!
//! A companion trajectory starts `delta0` away from the principal one in a
//! seeded random direction. Both are advanced together for `tau`, the
//! separation `d` is measured in the Cartesian embedding, `ln(d / delta0)`
//! is accumulated, and the companion is pulled back to distance `delta0`
//! along the current separation direction.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::dynamics::SystemSpec;
use crate::error::DomainError;
use crate::integrate::{self, IntegrationError, IntegratorConfig, VectorField};
use crate::math;
use crate::state::{CartesianState, CoordinateKind, PolarState};

/// Number of blocks the growth series is split into for the standard error.
pub const STDERR_BLOCKS: usize = 10;
/// Shortest accepted accumulation time.
pub const MIN_TOTAL_TIME: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LyapunovConfig {
    /// Accumulation time after the transient.
    pub total_time: f64,
    /// Renormalization interval.
    pub tau: f64,
    pub delta0: f64,
    /// Discarded before accumulation starts.
    pub transient: f64,
    pub seed: u64,
    pub integrator: IntegratorConfig,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            total_time: 2000.0,
            tau: 0.5,
            delta0: 1e-8,
            transient: 50.0,
            seed: 0,
            integrator: IntegratorConfig::adaptive(1e-10, 1e-12),
        }
    }
}

impl LyapunovConfig {
    pub fn validate(&self) -> Result<(), LyapunovError> {
        let bad = |key, value| Err(LyapunovError::Config { key, value });
        if !(self.total_time.is_finite() && self.total_time >= MIN_TOTAL_TIME) {
            return bad("total_time", self.total_time);
        }
        if !(self.tau.is_finite() && self.tau > 0.0 && self.tau <= self.total_time / STDERR_BLOCKS as f64) {
            return bad("tau", self.tau);
        }
        if !(self.delta0.is_finite() && self.delta0 > 0.0) {
            return bad("delta0", self.delta0);
        }
        if !(self.transient.is_finite() && self.transient >= 0.0) {
            return bad("transient", self.transient);
        }
        self.integrator.validate().map_err(|e| LyapunovError::Integration { source: e.into(), partial: Vec::new() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub lambda1: f64,
    /// Block standard error of `lambda1`.
    pub stderr: f64,
    /// `(time since transient, running estimate)` after every renormalization.
    pub convergence: Vec<(f64, f64)>,
    pub settings: LyapunovConfig,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LyapunovError {
    #[error("invalid lyapunov setting {key} = {value}")]
    Config { key: &'static str, value: f64 },
    #[error("invalid initial state: {0}")]
    Domain(#[from] DomainError),
    #[error("trajectory failed after {} renormalizations: {source}", partial.len())]
    Integration { source: IntegrationError, partial: Vec<(f64, f64)> },
    #[error("separation collapsed to zero at t={t}")]
    Collapsed { t: f64, partial: Vec<(f64, f64)> },
}

impl LyapunovError {
    /// Convergence data gathered before the failure.
    pub fn partial(&self) -> &[(f64, f64)] {
        match self {
            LyapunovError::Integration { partial, .. } | LyapunovError::Collapsed { partial, .. } => partial,
            _ => &[],
        }
    }
}

/// Principal and companion advanced in lockstep.
struct Tandem<'a, F>(&'a F);

impl<F: VectorField<3>> VectorField<6> for Tandem<'_, F> {
    fn eval(&self, y: &[f64; 6]) -> Result<[f64; 6], DomainError> {
        let a = self.0.eval(&[y[0], y[1], y[2]])?;
        let b = self.0.eval(&[y[3], y[4], y[5]])?;
        Ok([a[0], a[1], a[2], b[0], b[1], b[2]])
    }

    fn admissible(&self, y: &[f64; 6]) -> Result<(), DomainError> {
        self.0.admissible(&[y[0], y[1], y[2]])?;
        self.0.admissible(&[y[3], y[4], y[5]])
    }
}

fn embed(kind: CoordinateKind, y: [f64; 3]) -> [f64; 3] {
    match kind {
        CoordinateKind::Cartesian => y,
        CoordinateKind::Polar => PolarState::from_array(y).to_cartesian().to_array(),
    }
}

fn unembed(kind: CoordinateKind, c: [f64; 3], reference: [f64; 3]) -> [f64; 3] {
    match kind {
        CoordinateKind::Cartesian => c,
        CoordinateKind::Polar => CartesianState::from_array(c).to_polar_near(reference[1]).to_array(),
    }
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniformly distributed direction on the unit sphere.
pub fn random_direction(seed: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v = [2.0 * unit_f64(&mut rng) - 1.0, 2.0 * unit_f64(&mut rng) - 1.0, 2.0 * unit_f64(&mut rng) - 1.0];
        let r = math::norm3(v);
        if r > 1e-3 && r <= 1.0 {
            return [v[0] / r, v[1] / r, v[2] / r];
        }
    }
}

fn block_stderr(growth: &[f64], tau: f64) -> f64 {
    let m = growth.len();
    let b = STDERR_BLOCKS.min(m);
    if b < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..b)
        .map(|k| {
            let block = &growth[k * m / b..(k + 1) * m / b];
            block.iter().sum::<f64>() / (block.len() as f64 * tau)
        })
        .collect();
    let mean = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (b as f64 - 1.0);
    math::sqrt(var / b as f64)
}

/// Largest exponent of a field given its coordinate kind and a native-chart
/// starting point.
pub fn lyapunov_max_field<F: VectorField<3>>(
    field: &F,
    kind: CoordinateKind,
    y0: [f64; 3],
    cfg: &LyapunovConfig,
) -> Result<LyapunovEstimate, LyapunovError> {
    cfg.validate()?;
    field.admissible(&y0)?;
    let fail = |source, partial: &Vec<(f64, f64)>| LyapunovError::Integration { source, partial: partial.clone() };
    let mut convergence = Vec::new();

    let mut y = if cfg.transient > 0.0 {
        integrate::flow(field, y0, cfg.transient, &cfg.integrator).map_err(|e| fail(e, &convergence))?
    } else {
        y0
    };

    let dir = random_direction(cfg.seed);
    let start = embed(kind, y);
    let mut p = unembed(
        kind,
        [start[0] + cfg.delta0 * dir[0], start[1] + cfg.delta0 * dir[1], start[2] + cfg.delta0 * dir[2]],
        y,
    );

    let steps = math::round(cfg.total_time / cfg.tau) as usize;
    let mut growth = Vec::with_capacity(steps);
    convergence.reserve(steps);
    let tandem = Tandem(field);
    let mut sum = 0.0;
    for i in 1..=steps {
        let joint = [y[0], y[1], y[2], p[0], p[1], p[2]];
        let out = integrate::flow(&tandem, joint, cfg.tau, &cfg.integrator).map_err(|e| fail(e, &convergence))?;
        y = [out[0], out[1], out[2]];
        p = [out[3], out[4], out[5]];
        let (a, b) = (embed(kind, y), embed(kind, p));
        let diff = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let d = math::norm3(diff);
        let t = i as f64 * cfg.tau;
        if !(d > 0.0 && d.is_finite()) {
            return Err(LyapunovError::Collapsed { t, partial: convergence });
        }
        let g = math::ln(d / cfg.delta0);
        growth.push(g);
        sum += g;
        convergence.push((t, sum / t));
        let k = cfg.delta0 / d;
        p = unembed(kind, [a[0] + k * diff[0], a[1] + k * diff[1], a[2] + k * diff[2]], y);
    }

    let lambda1 = convergence.last().map(|c| c.1).unwrap_or(f64::NAN);
    Ok(LyapunovEstimate { lambda1, stderr: block_stderr(&growth, cfg.tau), convergence, settings: *cfg })
}

/// Largest Lyapunov exponent of a class member started at a Cartesian point.
pub fn lyapunov_max(
    spec: &SystemSpec,
    s0: CartesianState,
    cfg: &LyapunovConfig,
) -> Result<LyapunovEstimate, LyapunovError> {
    let field = spec.field()?;
    let y0 = spec.to_native(s0)?;
    lyapunov_max_field(&field, spec.coordinates(), y0, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosRow {
    pub spec: SystemSpec,
    pub outcome: Result<LyapunovEstimate, LyapunovError>,
}

impl ChaosRow {
    pub fn system(&self) -> &'static str {
        self.spec.name()
    }

    pub fn n(&self) -> Option<u32> {
        self.spec.fold()
    }

    pub fn lambda1(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|e| e.lambda1)
    }

    pub fn stderr(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|e| e.stderr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChaosError {
    #[error("chaos table needs at least one system")]
    NoSystems,
}

/// One row per system, started from its default initial state.
pub fn chaos_row(spec: &SystemSpec, cfg: &LyapunovConfig) -> ChaosRow {
    ChaosRow { spec: *spec, outcome: lyapunov_max(spec, spec.default_initial_state(), cfg) }
}

/// Sequential table; rows are independent and appear in input order.
pub fn chaos_table(specs: &[SystemSpec], cfg: &LyapunovConfig) -> Result<Vec<ChaosRow>, ChaosError> {
    if specs.is_empty() {
        return Err(ChaosError::NoSystems);
    }
    Ok(specs.iter().map(|s| chaos_row(s, cfg)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::FnField;

    fn quick() -> LyapunovConfig {
        LyapunovConfig { total_time: 100.0, transient: 0.0, ..LyapunovConfig::default() }
    }

    #[test]
    fn linear_contraction_has_exponent_minus_one() {
        let f = FnField(|y: &[f64; 3]| [-y[0], -y[1], -y[2]]);
        let est = lyapunov_max_field(&f, CoordinateKind::Cartesian, [1.0, 0.5, -0.2], &quick()).unwrap();
        assert!((est.lambda1 + 1.0).abs() < 0.01, "{}", est.lambda1);
        assert_eq!(est.convergence.len(), 200);
        assert_eq!(est.lambda1, est.convergence.last().unwrap().1);
    }

    #[test]
    fn directions_are_unit_and_seeded() {
        let a = random_direction(7);
        assert!((math::norm3(a) - 1.0).abs() < 1e-15);
        assert_eq!(a, random_direction(7));
        assert_ne!(a, random_direction(8));
    }

    #[test]
    fn config_validation() {
        let c = LyapunovConfig { total_time: 50.0, ..LyapunovConfig::default() };
        assert!(matches!(c.validate(), Err(LyapunovError::Config { key: "total_time", .. })));
        let c = LyapunovConfig { delta0: 0.0, ..LyapunovConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn empty_table_is_an_error() {
        assert_eq!(chaos_table(&[], &quick()), Err(ChaosError::NoSystems));
    }

    #[test]
    fn axis_start_fails_in_row() {
        let row = ChaosRow {
            spec: SystemSpec::l1(),
            outcome: lyapunov_max(&SystemSpec::l1(), CartesianState::new(0.0, 0.0, 1.0), &quick()),
        };
        assert!(row.lambda1().is_none());
        assert!(matches!(row.outcome, Err(LyapunovError::Domain(_))));
    }
}
