//! Time-stamped state sequences and the simulation entry point.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::covering::ColorConvention;
use crate::dynamics::SystemSpec;
use crate::integrate::{self, IntegrationError, IntegratorConfig};
use crate::state::{cartesian_view, CartesianState, CoordinateKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("{times} time stamps but {states} states")]
    LengthMismatch { times: usize, states: usize },
    #[error("{colors} colors for {states} states")]
    ColorLengthMismatch { colors: usize, states: usize },
    #[error("time stamps must be strictly increasing (sample {index}: {prev} then {next})")]
    NotIncreasing { index: usize, prev: f64, next: f64 },
    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },
}

/// Provenance carried alongside the samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryMeta {
    pub system: Option<SystemSpec>,
    pub integrator: Option<IntegratorConfig>,
    pub coloring: Option<ColorConvention>,
    /// Free-form `key: value` annotations, kept in insertion order.
    pub notes: Vec<(String, String)>,
}

impl TrajectoryMeta {
    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.notes.push((key.into(), value.into()));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<[f64; 3]>,
    kind: CoordinateKind,
    colors: Option<Vec<u32>>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<[f64; 3]>, kind: CoordinateKind) -> Result<Self, TrajectoryError> {
        if times.len() != states.len() {
            return Err(TrajectoryError::LengthMismatch { times: times.len(), states: states.len() });
        }
        for (i, (t, s)) in times.iter().zip(&states).enumerate() {
            if !t.is_finite() || s.iter().any(|v| !v.is_finite()) {
                return Err(TrajectoryError::NonFinite { index: i });
            }
        }
        for (i, w) in times.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(TrajectoryError::NotIncreasing { index: i + 1, prev: w[0], next: w[1] });
            }
        }
        Ok(Self { times, states, kind, colors: None, meta: TrajectoryMeta::default() })
    }

    pub fn with_colors(mut self, colors: Vec<u32>) -> Result<Self, TrajectoryError> {
        if colors.len() != self.states.len() {
            return Err(TrajectoryError::ColorLengthMismatch { colors: colors.len(), states: self.states.len() });
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn without_colors(mut self) -> Self {
        self.colors = None;
        self.meta.coloring = None;
        self
    }

    pub fn with_meta(mut self, meta: TrajectoryMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[[f64; 3]] {
        &self.states
    }

    pub fn kind(&self) -> CoordinateKind {
        self.kind
    }

    pub fn colors(&self) -> Option<&[u32]> {
        self.colors.as_deref()
    }

    /// Sample `i` in Cartesian coordinates.
    pub fn cartesian(&self, i: usize) -> CartesianState {
        cartesian_view(self.kind, self.states[i])
    }

    pub fn cartesian_points(&self) -> impl Iterator<Item = CartesianState> + '_ {
        self.states.iter().map(move |s| cartesian_view(self.kind, *s))
    }

    /// Same samples re-expressed in Cartesian coordinates.
    pub fn cartesian_view(&self) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            states: self.cartesian_points().map(CartesianState::to_array).collect(),
            kind: CoordinateKind::Cartesian,
            colors: self.colors.clone(),
            meta: self.meta.clone(),
        }
    }

    /// Samples with `t >= t_start`.
    pub fn since(&self, t_start: f64) -> Trajectory {
        let k = self.times.partition_point(|&t| t < t_start);
        Trajectory {
            times: self.times[k..].to_vec(),
            states: self.states[k..].to_vec(),
            kind: self.kind,
            colors: self.colors.as_ref().map(|c| c[k..].to_vec()),
            meta: self.meta.clone(),
        }
    }

    /// Applies `f` to every sample, keeping times.
    pub fn map_states(
        &self,
        kind: CoordinateKind,
        mut f: impl FnMut(f64, [f64; 3]) -> [f64; 3],
    ) -> Result<Trajectory, TrajectoryError> {
        let states = self.times.iter().zip(&self.states).map(|(t, s)| f(*t, *s)).collect();
        let mut out = Trajectory::new(self.times.clone(), states, kind)?;
        out.colors = self.colors.clone();
        out.meta = self.meta.clone();
        Ok(out)
    }

    /// Applies `f` to every `(time, state)` pair.
    pub fn map_samples(
        &self,
        mut f: impl FnMut(f64, [f64; 3]) -> (f64, [f64; 3]),
    ) -> Result<Trajectory, TrajectoryError> {
        let (times, states) = self.times.iter().zip(&self.states).map(|(t, s)| f(*t, *s)).unzip();
        let mut out = Trajectory::new(times, states, self.kind)?;
        out.colors = self.colors.clone();
        out.meta = self.meta.clone();
        Ok(out)
    }
}

/// Integrates a class member from a Cartesian starting point.
///
/// Standard and L2 are integrated in Cartesian coordinates, L1 and Ln in
/// polar coordinates with an unwrapped angle.
pub fn simulate(
    spec: &SystemSpec,
    s0: CartesianState,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    let at_start = |source| IntegrationError::Domain { t: t0, state: s0.to_array().to_vec(), source };
    spec.validate().map_err(at_start)?;
    let y0 = spec.to_native(s0).map_err(at_start)?;
    simulate_native(spec, y0, t0, t1, cfg)
}

/// As [`simulate`], with the initial state given in native coordinates.
pub fn simulate_native(
    spec: &SystemSpec,
    y0: [f64; 3],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    let field = spec.field().map_err(|source| IntegrationError::Domain { t: t0, state: y0.to_vec(), source })?;
    let sol = integrate::solve(&field, y0, t0, t1, cfg)?;
    let traj = Trajectory::new(sol.times, sol.states, field.coordinates())
        .expect("integrator output satisfies trajectory invariants");
    Ok(traj.with_meta(TrajectoryMeta { system: Some(*spec), integrator: Some(*cfg), ..TrajectoryMeta::default() }))
}
