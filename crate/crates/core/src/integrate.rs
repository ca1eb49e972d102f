//! Explicit Runge-Kutta integration: fixed-step classical RK4 and the
//! Dormand-Prince 5(4) pair with PI step control and 4th-order dense output.
//!
//! Output is sampled on the fixed cadence `t0 + k * sample_interval` plus
//! the endpoint, independent of the internal step sequence.

use alloc::vec::Vec;

use thiserror::Error;

use crate::error::DomainError;
use crate::math;

/// Autonomous vector field on `R^N`.
pub trait VectorField<const N: usize> {
    fn eval(&self, y: &[f64; N]) -> Result<[f64; N], DomainError>;

    /// Checked on the initial state and after every accepted step.
    fn admissible(&self, _y: &[f64; N]) -> Result<(), DomainError> {
        Ok(())
    }
}

impl<F: VectorField<N> + ?Sized, const N: usize> VectorField<N> for &F {
    fn eval(&self, y: &[f64; N]) -> Result<[f64; N], DomainError> {
        (**self).eval(y)
    }

    fn admissible(&self, y: &[f64; N]) -> Result<(), DomainError> {
        (**self).admissible(y)
    }
}

/// Adapts a plain closure to [`VectorField`].
#[derive(Debug, Clone, Copy)]
pub struct FnField<F>(pub F);

impl<F, const N: usize> VectorField<N> for FnField<F>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    fn eval(&self, y: &[f64; N]) -> Result<[f64; N], DomainError> {
        Ok((self.0)(y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegratorConfig {
    pub mode: Mode,
    /// Step length in fixed mode.
    pub step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Adaptive steps below this length abort the integration.
    pub min_step: f64,
    /// Output cadence.
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Adaptive,
            step: 1e-3,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: 0.1,
            min_step: 1e-12,
            sample_interval: 0.01,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn fixed(step: f64) -> Self {
        Self { mode: Mode::Fixed, step, ..Self::default() }
    }

    pub fn with_sample_interval(mut self, sample_interval: f64) -> Self {
        self.sample_interval = sample_interval;
        self
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(v: f64, key: &'static str) -> Result<(), ConfigError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::NotPositive { key, value: v })
            }
        }
        match self.mode {
            Mode::Fixed => positive(self.step, "step")?,
            Mode::Adaptive => {
                positive(self.rel_tol, "rel_tol")?;
                positive(self.abs_tol, "abs_tol")?;
                positive(self.max_step, "max_step")?;
                positive(self.min_step, "min_step")?;
                if self.min_step >= self.max_step {
                    return Err(ConfigError::StepBounds { min_step: self.min_step, max_step: self.max_step });
                }
            }
        }
        positive(self.sample_interval, "sample_interval")?;
        if self.mode == Mode::Adaptive && self.sample_interval < self.min_step {
            return Err(ConfigError::SampleInterval { sample_interval: self.sample_interval, min_step: self.min_step });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{key} must be positive and finite (got {value})")]
    NotPositive { key: &'static str, value: f64 },
    #[error("min_step ({min_step}) must be smaller than max_step ({max_step})")]
    StepBounds { min_step: f64, max_step: f64 },
    #[error("sample_interval ({sample_interval}) must be at least min_step ({min_step})")]
    SampleInterval { sample_interval: f64, min_step: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("invalid integrator configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("time span must satisfy t1 > t0 (got t0={t0}, t1={t1})")]
    Span { t0: f64, t1: f64 },
    #[error("step size underflow at t={t}: step {step:e} is below min_step, state {state:?}")]
    StepUnderflow { t: f64, step: f64, state: Vec<f64> },
    #[error("at t={t}, state {state:?}: {source}")]
    Domain { t: f64, state: Vec<f64>, source: DomainError },
    #[error("state became non-finite at t={t}, last finite state {state:?}")]
    NonFinite { t: f64, state: Vec<f64> },
}

impl IntegrationError {
    /// Time at which a numerical failure occurred, if any.
    pub fn time(&self) -> Option<f64> {
        match self {
            IntegrationError::StepUnderflow { t, .. }
            | IntegrationError::Domain { t, .. }
            | IntegrationError::NonFinite { t, .. } => Some(*t),
            _ => None,
        }
    }
}

/// One accepted adaptive step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub h: f64,
    /// Error estimate in units of the tolerance; accepted steps have `<= 1`.
    pub error: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub max_accepted_error: f64,
    pub log: Option<Vec<StepRecord>>,
}

/// Sampled solution of an `N`-dimensional problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stats: StepStats,
}

impl<const N: usize> Solution<N> {
    pub fn last(&self) -> [f64; N] {
        *self.states.last().expect("solutions hold at least the initial state")
    }
}

fn domain<const N: usize>(t: f64, y: &[f64; N], source: DomainError) -> IntegrationError {
    IntegrationError::Domain { t, state: y.to_vec(), source }
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Sample clock `t0 + k * sample_interval`, stopping short of the endpoint.
struct Sampler {
    t0: f64,
    t1: f64,
    interval: f64,
    next: u64,
}

impl Sampler {
    fn new(t0: f64, t1: f64, interval: f64) -> Self {
        Self { t0, t1, interval, next: 1 }
    }

    /// Next interior sample time, if one remains before the endpoint.
    fn peek(&self) -> Option<f64> {
        let t = self.t0 + self.next as f64 * self.interval;
        (t < self.t1 - 1e-9 * self.interval).then_some(t)
    }

    fn advance(&mut self) {
        self.next += 1;
    }
}

/// Integrates `field` from `y0` over `[t0, t1]`.
pub fn solve<F, const N: usize>(
    field: &F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Solution<N>, IntegrationError>
where
    F: VectorField<N> + ?Sized,
{
    run(field, y0, t0, t1, cfg, false)
}

/// As [`solve`], additionally recording every accepted adaptive step.
pub fn solve_with_log<F, const N: usize>(
    field: &F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Solution<N>, IntegrationError>
where
    F: VectorField<N> + ?Sized,
{
    run(field, y0, t0, t1, cfg, true)
}

/// Flow map: the state reached from `y0` after time `dt >= 0`.
pub fn flow<F, const N: usize>(
    field: &F,
    y0: [f64; N],
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<[f64; N], IntegrationError>
where
    F: VectorField<N> + ?Sized,
{
    cfg.validate()?;
    if dt == 0.0 {
        field.admissible(&y0).map_err(|e| domain(0.0, &y0, e))?;
        return Ok(y0);
    }
    // Sampling is irrelevant here; one interior sample at most.
    let cfg = IntegratorConfig { sample_interval: dt.abs().max(cfg.min_step), ..*cfg };
    Ok(run(field, y0, 0.0, dt, &cfg, false)?.last())
}

fn run<F, const N: usize>(
    field: &F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    log: bool,
) -> Result<Solution<N>, IntegrationError>
where
    F: VectorField<N> + ?Sized,
{
    cfg.validate()?;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(IntegrationError::Span { t0, t1 });
    }
    if !all_finite(&y0) {
        return Err(IntegrationError::NonFinite { t: t0, state: y0.to_vec() });
    }
    field.admissible(&y0).map_err(|e| domain(t0, &y0, e))?;
    match cfg.mode {
        Mode::Fixed => run_rk4(field, y0, t0, t1, cfg),
        Mode::Adaptive => run_dopri(field, y0, t0, t1, cfg, log),
    }
}

/// One classical RK4 step.
pub fn rk4_step<F, const N: usize>(field: &F, y: &[f64; N], h: f64) -> Result<[f64; N], DomainError>
where
    F: VectorField<N> + ?Sized,
{
    let k1 = field.eval(y)?;
    let k2 = field.eval(&axpy(y, h, &[(0.5, &k1)]))?;
    let k3 = field.eval(&axpy(y, h, &[(0.5, &k2)]))?;
    let k4 = field.eval(&axpy(y, h, &[(1.0, &k3)]))?;
    Ok(axpy(y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]))
}

fn run_rk4<F, const N: usize>(
    field: &F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Solution<N>, IntegrationError>
where
    F: VectorField<N> + ?Sized,
{
    let mut sampler = Sampler::new(t0, t1, cfg.sample_interval);
    let mut times = alloc::vec![t0];
    let mut states = alloc::vec![y0];
    let mut stats = StepStats::default();
    let (mut t, mut y) = (t0, y0);
    loop {
        let (target, is_end) = match sampler.peek() {
            Some(ts) => (ts, false),
            None => (t1, true),
        };
        // Land exactly on the target instead of leaving a sliver step.
        let remaining = target - t;
        let (h, lands) = if remaining <= cfg.step * (1.0 + 1e-9) { (remaining, true) } else { (cfg.step, false) };
        let next = rk4_step(field, &y, h).map_err(|e| domain(t, &y, e))?;
        stats.evaluations += 4;
        stats.accepted += 1;
        if !all_finite(&next) {
            return Err(IntegrationError::NonFinite { t, state: y.to_vec() });
        }
        t = if lands { target } else { t + h };
        y = next;
        field.admissible(&y).map_err(|e| domain(t, &y, e))?;
        if lands {
            times.push(t);
            states.push(y);
            if is_end {
                break;
            }
            sampler.advance();
        }
    }
    Ok(Solution { times, states, stats })
}

// Dormand-Prince 5(4) tableau. The fields are autonomous, so the nodes are
// not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// 5th minus 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const GROW_MAX: f64 = 5.0;
const SHRINK_MIN: f64 = 0.2;
// PI controller exponents for a 5th-order error-per-step estimate.
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;

struct Dense<const N: usize> {
    r: [[f64; N]; 5],
}

impl<const N: usize> Dense<N> {
    fn eval(&self, theta: f64) -> [f64; N] {
        let th1 = 1.0 - theta;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.r;
            *o = r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], cfg: &IntegratorConfig) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        let e = (err[i] / sc).abs();
        if e.is_nan() {
            return f64::INFINITY;
        }
        worst = worst.max(e);
    }
    worst
}

fn initial_step<F, const N: usize>(field: &F, y0: &[f64; N], f0: &[f64; N], cfg: &IntegratorConfig) -> f64
where
    F: VectorField<N> + ?Sized,
{
    let rms = |v: &dyn Fn(usize) -> f64| -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
            let q = v(i) / sc;
            s += q * q;
        }
        math::sqrt(s / N as f64)
    };
    let d0 = rms(&|i| y0[i]);
    let d1 = rms(&|i| f0[i]);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(cfg.max_step);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let Ok(f1) = field.eval(&y1) else {
        return h0.max(cfg.min_step);
    };
    let d2 = rms(&|i| f1[i] - f0[i]) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { math::powf(0.01 / dm, 0.2) };
    (100.0 * h0).min(h1).min(cfg.max_step).max(cfg.min_step)
}

fn run_dopri<F, const N: usize>(
    field: &F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    log: bool,
) -> Result<Solution<N>, IntegrationError>
where
    F: VectorField<N> + ?Sized,
{
    let mut sampler = Sampler::new(t0, t1, cfg.sample_interval);
    let mut times = alloc::vec![t0];
    let mut states = alloc::vec![y0];
    let mut stats = StepStats { log: log.then(Vec::new), ..StepStats::default() };

    let (mut t, mut y) = (t0, y0);
    let mut k1 = field.eval(&y).map_err(|e| domain(t, &y, e))?;
    stats.evaluations += 1;
    let mut h = initial_step(field, &y, &k1, cfg);
    let mut prev_err: f64 = 1e-4;
    let mut just_rejected = false;

    while t < t1 {
        let remaining = t1 - t;
        let mut last = false;
        let mut hs = h.min(cfg.max_step);
        if hs >= remaining * (1.0 - 1e-12) {
            hs = remaining;
            last = true;
        }

        let stage = |yy: [f64; N]| field.eval(&yy).map_err(|e| domain(t, &y, e));
        let k2 = stage(axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = stage(axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = stage(axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = stage(axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = stage(axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = if all_finite(&y_new) { stage(y_new)? } else { [f64::NAN; N] };
        stats.evaluations += 6;

        let mut err_vec = [0.0; N];
        for i in 0..N {
            err_vec[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err =
            if all_finite(&y_new) && all_finite(&k7) { error_norm(&y, &y_new, &err_vec, cfg) } else { f64::INFINITY };

        if err <= 1.0 {
            let t_new = if last { t1 } else { t + hs };
            field.admissible(&y_new).map_err(|e| domain(t_new, &y_new, e))?;

            if sampler.peek().is_some_and(|ts| ts <= t_new) {
                let mut r = [[0.0; N]; 5];
                for i in 0..N {
                    let dy = y_new[i] - y[i];
                    let bspl = hs * k1[i] - dy;
                    r[0][i] = y[i];
                    r[1][i] = dy;
                    r[2][i] = bspl;
                    r[3][i] = dy - hs * k7[i] - bspl;
                    r[4][i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let dense = Dense { r };
                while let Some(ts) = sampler.peek() {
                    if ts > t_new {
                        break;
                    }
                    times.push(ts);
                    states.push(dense.eval((ts - t) / hs));
                    sampler.advance();
                }
            }

            stats.accepted += 1;
            stats.max_accepted_error = stats.max_accepted_error.max(err);
            if let Some(l) = stats.log.as_mut() {
                l.push(StepRecord { t, h: hs, error: err });
            }

            let e = err.max(1e-10);
            let mut fac = SAFETY * math::powf(e, -ALPHA) * math::powf(prev_err, BETA);
            fac = fac.clamp(SHRINK_MIN, GROW_MAX);
            if just_rejected {
                fac = fac.min(1.0);
            }
            prev_err = err.max(1e-4);
            just_rejected = false;
            h = hs * fac;

            t = t_new;
            y = y_new;
            k1 = k7;
        } else {
            stats.rejected += 1;
            let fac = if err.is_finite() { (SAFETY * math::powf(err, -0.2)).max(SHRINK_MIN) } else { SHRINK_MIN };
            h = hs * fac;
            just_rejected = true;
            if h < cfg.min_step {
                return Err(if err.is_finite() {
                    IntegrationError::StepUnderflow { t, step: h, state: y.to_vec() }
                } else {
                    IntegrationError::NonFinite { t, state: y.to_vec() }
                });
            }
        }
    }

    times.push(t1);
    states.push(y);
    Ok(Solution { times, states, stats })
}
