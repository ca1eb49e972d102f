//! The n-fold covering `(radius, phi) -> (radius, n phi)` of the punctured
//! plane (identity on z), its sheets ("colors") and path lifting.
//!
//! Colors follow a fixed convention: a point with angle `phi` reduced to
//! `[0, 2π)` has color `floor(n phi / 2π)`, i.e. sector 0 starts on the
//! positive x-axis and sectors run counterclockwise.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dynamics::SystemSpec;
use crate::error::DomainError;
use crate::math;
use crate::state::{CartesianState, CoordinateKind, PolarState};
use crate::trajectory::{Trajectory, TrajectoryMeta};

/// Fold count of a covering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoveringSpec {
    n: u32,
}

impl CoveringSpec {
    pub fn new(n: u32) -> Result<Self, DomainError> {
        if n == 0 {
            return Err(DomainError::FoldCount(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// Color convention recorded in trajectory metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColorConvention {
    pub n: u32,
}

impl ColorConvention {
    pub const RULE: &'static str = "color=floor(n*phi/(2*pi)), phi in [0,2*pi), counterclockwise from +x";

    pub fn describe(&self) -> String {
        format!("{}; n={}", Self::RULE, self.n)
    }
}

/// Quotient-space point together with the sheet its preimage lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColoredPoint {
    pub base: CartesianState,
    pub color: u32,
}

impl ColoredPoint {
    /// The unique preimage on sheet `color`.
    pub fn preimage(&self, n: u32) -> Result<CartesianState, DomainError> {
        check_fold(n)?;
        if self.color >= n {
            return Err(DomainError::ColorOutOfRange { color: self.color, n });
        }
        let q = polar_off_axis(self.base)?;
        Ok(sheet_point(q, n, self.color))
    }
}

fn check_fold(n: u32) -> Result<(), DomainError> {
    CoveringSpec::new(n).map(|_| ())
}

fn polar_off_axis(s: CartesianState) -> Result<PolarState, DomainError> {
    if !s.is_finite() {
        return Err(DomainError::NotFinite);
    }
    if s.radius() <= 0.0 {
        return Err(DomainError::OnAxis { x: s.x, y: s.y, z: s.z });
    }
    Ok(s.to_polar())
}

fn sheet_point(q: PolarState, n: u32, color: u32) -> CartesianState {
    let nf = f64::from(n);
    let angle = (math::reduce_angle(q.angle) + math::TAU * f64::from(color)) / nf;
    PolarState::new(q.radius, angle, q.z).to_cartesian()
}

/// Covering map in Cartesian form: `radius * u^n` with `u` the unit vector
/// of `(x, y)` taken as a complex number. For `n = 2` this is
/// `((x^2 - y^2) / r, 2 x y / r)`.
pub fn cover_point(s: CartesianState, n: u32) -> Result<CartesianState, DomainError> {
    check_fold(n)?;
    if !s.is_finite() {
        return Err(DomainError::NotFinite);
    }
    let r = s.radius();
    if r <= 0.0 {
        return Err(DomainError::OnAxis { x: s.x, y: s.y, z: s.z });
    }
    if n == 1 {
        return Ok(s);
    }
    let (ux, uy) = (s.x / r, s.y / r);
    if n == 2 {
        return Ok(CartesianState::new((s.x * s.x - s.y * s.y) / r, 2.0 * s.x * s.y / r, s.z));
    }
    // binary exponentiation of (ux + i uy)
    let (mut re, mut im) = (1.0, 0.0);
    let (mut br, mut bi) = (ux, uy);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            (re, im) = (re * br - im * bi, re * bi + im * br);
        }
        (br, bi) = (br * br - bi * bi, 2.0 * br * bi);
        e >>= 1;
    }
    Ok(CartesianState::new(r * re, r * im, s.z))
}

/// Covering map in polar form; the angle stays unwrapped.
pub fn cover_polar(s: PolarState, n: u32) -> Result<PolarState, DomainError> {
    check_fold(n)?;
    if !s.is_finite() {
        return Err(DomainError::NotFinite);
    }
    if s.radius <= 0.0 {
        let c = s.to_cartesian();
        return Err(DomainError::OnAxis { x: c.x, y: c.y, z: c.z });
    }
    Ok(PolarState::new(s.radius, f64::from(n) * s.angle, s.z))
}

/// Sheet index of an angle.
///
/// Sector positions within `1e-12` below a boundary are snapped onto it so
/// that preimages computed at exact boundary angles keep their sheet.
pub fn color_of_angle(angle: f64, n: u32) -> u32 {
    let pos = f64::from(n) * math::reduce_angle(angle) / math::TAU;
    let mut c = math::floor(pos);
    if pos - c > 1.0 - 1e-12 {
        c += 1.0;
    }
    (c as u32) % n.max(1)
}

pub fn color_of(s: CartesianState, n: u32) -> Result<u32, DomainError> {
    check_fold(n)?;
    let p = polar_off_axis(s)?;
    Ok(color_of_angle(p.angle, n))
}

/// Image point plus the color of `s`; inverted by [`ColoredPoint::preimage`].
pub fn color_point(s: CartesianState, n: u32) -> Result<ColoredPoint, DomainError> {
    Ok(ColoredPoint { base: cover_point(s, n)?, color: color_of(s, n)? })
}

/// All `n` preimages of `q`; entry `k` lies on sheet `k`, at angle
/// `(phi_q + 2πk) / n` with `phi_q` reduced to `[0, 2π)`.
pub fn branch_preimages(q: CartesianState, n: u32) -> Result<Vec<ColoredPoint>, DomainError> {
    check_fold(n)?;
    let p = polar_off_axis(q)?;
    Ok((0..n).map(|k| ColoredPoint { base: sheet_point(p, n, k), color: k }).collect())
}

/// Rotation by `2πk/n` about the z-axis; leaves covering images unchanged.
pub fn deck(s: CartesianState, n: u32, k: u32) -> CartesianState {
    s.rotate(math::TAU * f64::from(k) / f64::from(n))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("sample {index}: {source}")]
    Sample { index: usize, source: DomainError },
    #[error("fold count n must be >= 1 (got {0})")]
    FoldCount(u32),
    #[error("initial color {color} is not below n={n}")]
    InitialColor { color: u32, n: u32 },
    #[error("ambiguous lift at sample {index}: angular step {step:.6} rad is not below pi/n = {bound:.6}; resample the path more densely")]
    AmbiguousStep { index: usize, step: f64, bound: f64 },
}

fn quotient_system(spec: Option<SystemSpec>, n: u32) -> Option<SystemSpec> {
    let spec = spec?;
    let params = spec.normalized_params()?;
    let fold = spec.fold()?;
    if fold % n != 0 {
        return None;
    }
    Some(match fold / n {
        1 => SystemSpec::L1 { params },
        2 => SystemSpec::L2 { params },
        m => SystemSpec::Ln { params, n: m },
    })
}

fn extended_system(spec: Option<SystemSpec>, n: u32) -> Option<SystemSpec> {
    let spec = spec?;
    let params = spec.normalized_params()?;
    let fold = spec.fold()?.checked_mul(n)?;
    Some(match fold {
        1 => SystemSpec::L1 { params },
        2 => SystemSpec::L2 { params },
        m => SystemSpec::Ln { params, n: m },
    })
}

/// Maps every sample through the covering and records its color.
///
/// Polar trajectories stay polar with the angle multiplied by `n`.
pub fn cover_trajectory(traj: &Trajectory, n: u32) -> Result<Trajectory, CoverError> {
    if n == 0 {
        return Err(CoverError::FoldCount(n));
    }
    let kind = traj.kind();
    let mut states = Vec::with_capacity(traj.len());
    let mut colors = Vec::with_capacity(traj.len());
    for (index, s) in traj.states().iter().enumerate() {
        let wrap = |source| CoverError::Sample { index, source };
        match kind {
            CoordinateKind::Cartesian => {
                let c = CartesianState::from_array(*s);
                states.push(cover_point(c, n).map_err(wrap)?.to_array());
                colors.push(color_of(c, n).map_err(wrap)?);
            }
            CoordinateKind::Polar => {
                let p = PolarState::from_array(*s);
                states.push(cover_polar(p, n).map_err(wrap)?.to_array());
                colors.push(color_of_angle(p.angle, n));
            }
        }
    }
    let meta = TrajectoryMeta {
        system: quotient_system(traj.meta.system, n),
        coloring: Some(ColorConvention { n }),
        ..traj.meta.clone()
    };
    Ok(Trajectory::new(traj.times().to_vec(), states, kind)
        .and_then(|t| t.with_colors(colors))
        .expect("covering preserves trajectory invariants")
        .with_meta(meta))
}

/// Continuous lift of a quotient-space path through the n-fold covering,
/// starting on sheet `initial_color`.
///
/// Every downstairs angular step must be below `π/n`; Cartesian inputs have
/// their steps measured modulo `2π`.
pub fn lift_trajectory(traj: &Trajectory, n: u32, initial_color: u32) -> Result<Trajectory, CoverError> {
    if n == 0 {
        return Err(CoverError::FoldCount(n));
    }
    if initial_color >= n {
        return Err(CoverError::InitialColor { color: initial_color, n });
    }
    let kind = traj.kind();
    let nf = f64::from(n);
    let bound = math::PI / nf;
    let mut states = Vec::with_capacity(traj.len());
    let mut colors = Vec::with_capacity(traj.len());
    let mut prev: Option<(f64, f64)> = None; // (downstairs angle, lifted angle)
    for (index, s) in traj.states().iter().enumerate() {
        let q = match kind {
            CoordinateKind::Cartesian => {
                polar_off_axis(CartesianState::from_array(*s)).map_err(|source| CoverError::Sample { index, source })?
            }
            CoordinateKind::Polar => {
                let p = PolarState::from_array(*s);
                if !(p.radius > 0.0) {
                    let c = p.to_cartesian();
                    return Err(CoverError::Sample { index, source: DomainError::OnAxis { x: c.x, y: c.y, z: c.z } });
                }
                p
            }
        };
        let lifted = match prev {
            None => (math::reduce_angle(q.angle) + math::TAU * f64::from(initial_color)) / nf,
            Some((psi_prev, phi_prev)) => {
                let step = match kind {
                    CoordinateKind::Cartesian => math::wrap_pi(q.angle - psi_prev),
                    CoordinateKind::Polar => q.angle - psi_prev,
                };
                if !(step.abs() < bound) {
                    return Err(CoverError::AmbiguousStep { index, step, bound });
                }
                phi_prev + step / nf
            }
        };
        prev = Some((q.angle, lifted));
        let up = PolarState::new(q.radius, lifted, q.z);
        colors.push(color_of_angle(lifted, n));
        states.push(match kind {
            CoordinateKind::Cartesian => up.to_cartesian().to_array(),
            CoordinateKind::Polar => up.to_array(),
        });
    }
    let meta = TrajectoryMeta {
        system: extended_system(traj.meta.system, n),
        coloring: Some(ColorConvention { n }),
        ..traj.meta.clone()
    };
    Ok(Trajectory::new(traj.times().to_vec(), states, kind)
        .and_then(|t| t.with_colors(colors))
        .expect("lifting preserves trajectory invariants")
        .with_meta(meta))
}
