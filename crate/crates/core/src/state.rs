//! Phase-space points in Cartesian and polar (cylindrical) coordinates.

use core::ops::{Add, Mul, Sub};

use crate::math;

/// Which coordinate chart a sequence of `[f64; 3]` samples is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CoordinateKind {
    /// `(x, y, z)`.
    Cartesian,
    /// `(radius, angle, z)` with the angle kept unwrapped.
    Polar,
}

impl CoordinateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CoordinateKind::Cartesian => "cartesian",
            CoordinateKind::Polar => "polar",
        }
    }
}

/// A point `(x, y, z)`. Also used for time derivatives of Cartesian fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianState {
    pub const ORIGIN: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Distance from the z-axis.
    pub fn radius(&self) -> f64 {
        math::hypot(self.x, self.y)
    }

    /// Polar angle in `(-π, π]`. Zero on the axis.
    pub fn angle(&self) -> f64 {
        math::atan2(self.y, self.x)
    }

    pub fn norm(&self) -> f64 {
        math::norm3(self.to_array())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_polar(self) -> PolarState {
        PolarState::new(self.radius(), self.angle(), self.z)
    }

    /// Polar form whose angle is the representative nearest `reference`.
    pub fn to_polar_near(self, reference: f64) -> PolarState {
        let a = self.angle();
        PolarState::new(self.radius(), reference + math::wrap_pi(a - reference), self.z)
    }

    /// Rotation about the z-axis.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = (math::sin(angle), math::cos(angle));
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs()).max((self.z - other.z).abs())
    }
}

impl From<[f64; 3]> for CartesianState {
    fn from(a: [f64; 3]) -> Self {
        Self::from_array(a)
    }
}

impl From<CartesianState> for [f64; 3] {
    fn from(s: CartesianState) -> Self {
        s.to_array()
    }
}

impl Add for CartesianState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for CartesianState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for CartesianState {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

/// A point `(radius, angle, z)`; the angle is never reduced.
///
/// Also used for time derivatives `(dradius, dangle, dz)` of polar fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolarState {
    pub radius: f64,
    pub angle: f64,
    pub z: f64,
}

impl PolarState {
    pub const fn new(radius: f64, angle: f64, z: f64) -> Self {
        Self { radius, angle, z }
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.radius, self.angle, self.z]
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_cartesian(self) -> CartesianState {
        CartesianState::new(self.radius * math::cos(self.angle), self.radius * math::sin(self.angle), self.z)
    }

    /// Same point with the angle reduced to `[0, 2π)`.
    pub fn reduced(self) -> Self {
        Self::new(self.radius, math::reduce_angle(self.angle), self.z)
    }

    pub fn is_finite(&self) -> bool {
        self.radius.is_finite() && self.angle.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for PolarState {
    fn from(a: [f64; 3]) -> Self {
        Self::from_array(a)
    }
}

/// Converts a raw sample of the given kind to Cartesian coordinates.
pub fn cartesian_view(kind: CoordinateKind, s: [f64; 3]) -> CartesianState {
    match kind {
        CoordinateKind::Cartesian => CartesianState::from_array(s),
        CoordinateKind::Polar => PolarState::from_array(s).to_cartesian(),
    }
}
