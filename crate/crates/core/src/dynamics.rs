//! Vector fields of the Lorenz class: the standard form, the normalized
//! form L2, its quotient L1 by the Z2 symmetry, and the Zn-extensions Ln.
//!
//! L2 is the image of the standard form under the normalizing change of
//! variables and time:
//!
//! ```text
//! dx/dt = y
//! dy/dt = (1 - z - (1-g) x^2) x - mu y
//! dz/dt = beta (g x^2 - z)
//! ```
//!
//! L1 and Ln are written in polar coordinates `(radius, angle, z)`. The
//! quotient field is the pushforward of L2 through `(r, phi) -> (r, 2 phi)`;
//! with `C = cos psi`, `S = sin psi` and `x^2 = rho^2 (1 + C) / 2`:
//!
//! ```text
//! drho/dt = rho * [ (S/2) * (2 - z - (1-g) rho^2 (1+C)/2) - mu (1-C)/2 ]
//! dpsi/dt = (1+C) * (1 - z - (1-g) rho^2 (1+C)/2) - mu S - (1-C)
//! dz/dt   = beta * (g rho^2 (1+C)/2 - z)
//! ```
//!
//! Ln is the pullback through `(r, phi) -> (r, n phi)`: evaluate L1 at the
//! n-fold angle and divide the angular rate by n.

use alloc::vec::Vec;

use crate::error::DomainError;
use crate::integrate::VectorField;
use crate::math;
use crate::params::{NormalizedParams, StandardParams};
use crate::state::{CartesianState, CoordinateKind, PolarState};

/// Polar and Cartesian quotient fields refuse states closer than this to the
/// z-axis.
pub const RADIUS_MIN: f64 = 1e-9;

/// `(sigma (Y - X), (r - Z) X - Y, -b Z + X Y)`.
pub fn standard_field(s: CartesianState, p: &StandardParams) -> CartesianState {
    CartesianState::new(p.sigma * (s.y - s.x), (p.rayleigh - s.z) * s.x - s.y, -p.b * s.z + s.x * s.y)
}

/// `(y, (1 - z - (1 - g) x^2) x - mu y, beta (g x^2 - z))`.
pub fn l2_field(s: CartesianState, p: &NormalizedParams) -> CartesianState {
    let x2 = s.x * s.x;
    CartesianState::new(s.y, (1.0 - s.z - (1.0 - p.gamma) * x2) * s.x - p.mu * s.y, p.beta * (p.gamma * x2 - s.z))
}

fn check_fold(n: u32) -> Result<(), DomainError> {
    if n == 0 {
        Err(DomainError::FoldCount(n))
    } else {
        Ok(())
    }
}

fn check_off_axis(s: PolarState) -> Result<(), DomainError> {
    if !s.is_finite() {
        return Err(DomainError::NotFinite);
    }
    if s.radius <= 0.0 {
        let c = s.to_cartesian();
        return Err(DomainError::OnAxis { x: c.x, y: c.y, z: c.z });
    }
    Ok(())
}

/// Quotient field L1. The angle argument is the quotient-space angle psi.
pub fn l1_polar_field(s: PolarState, p: &NormalizedParams) -> Result<PolarState, DomainError> {
    check_off_axis(s)?;
    let rho = s.radius;
    let (sn, cs) = (math::sin(s.angle), math::cos(s.angle));
    // x^2 of either preimage
    let x2 = rho * rho * (1.0 + cs) / 2.0;
    // restoring term of L2, (1 - z - (1-g) x^2)
    let restore = 1.0 - s.z - (1.0 - p.gamma) * x2;
    Ok(PolarState::new(
        rho * ((sn / 2.0) * (1.0 + restore) - p.mu * (1.0 - cs) / 2.0),
        (1.0 + cs) * restore - p.mu * sn - (1.0 - cs),
        p.beta * (p.gamma * x2 - s.z),
    ))
}

/// Zn-extension Ln in polar form; `n = 1` is L1 and `n = 2` is L2.
pub fn ln_polar_field(s: PolarState, p: &NormalizedParams, n: u32) -> Result<PolarState, DomainError> {
    check_fold(n)?;
    let nf = f64::from(n);
    let d = l1_polar_field(PolarState::new(s.radius, nf * s.angle, s.z), p)?;
    Ok(PolarState::new(d.radius, d.angle / nf, d.z))
}

/// Chain-rule Cartesian view of [`ln_polar_field`].
pub fn ln_cartesian_field(s: CartesianState, p: &NormalizedParams, n: u32) -> Result<CartesianState, DomainError> {
    check_fold(n)?;
    if !s.is_finite() {
        return Err(DomainError::NotFinite);
    }
    let radius = s.radius();
    if radius < RADIUS_MIN {
        return Err(DomainError::NearAxis { radius, min: RADIUS_MIN, x: s.x, y: s.y, z: s.z });
    }
    let polar = s.to_polar();
    let d = ln_polar_field(polar, p, n)?;
    let (c, sn) = (s.x / radius, s.y / radius);
    Ok(CartesianState::new(d.radius * c - radius * sn * d.angle, d.radius * sn + radius * c * d.angle, d.z))
}

/// Standard Lorenz form as an integrable field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardLorenz(pub StandardParams);

impl VectorField<3> for StandardLorenz {
    fn eval(&self, y: &[f64; 3]) -> Result<[f64; 3], DomainError> {
        Ok(standard_field(CartesianState::from_array(*y), &self.0).to_array())
    }
}

/// Normalized form L2 in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedLorenz(pub NormalizedParams);

impl VectorField<3> for NormalizedLorenz {
    fn eval(&self, y: &[f64; 3]) -> Result<[f64; 3], DomainError> {
        Ok(l2_field(CartesianState::from_array(*y), &self.0).to_array())
    }
}

/// Ln on `(radius, angle, z)` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarExtension {
    pub params: NormalizedParams,
    pub n: u32,
}

impl VectorField<3> for PolarExtension {
    fn eval(&self, y: &[f64; 3]) -> Result<[f64; 3], DomainError> {
        ln_polar_field(PolarState::from_array(*y), &self.params, self.n).map(PolarState::to_array)
    }

    fn admissible(&self, y: &[f64; 3]) -> Result<(), DomainError> {
        let s = PolarState::from_array(*y);
        if !s.is_finite() {
            return Err(DomainError::NotFinite);
        }
        if s.radius < RADIUS_MIN {
            let c = s.to_cartesian();
            return Err(DomainError::NearAxis { radius: s.radius, min: RADIUS_MIN, x: c.x, y: c.y, z: c.z });
        }
        Ok(())
    }
}

/// Ln on `(x, y, z)` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianExtension {
    pub params: NormalizedParams,
    pub n: u32,
}

impl VectorField<3> for CartesianExtension {
    fn eval(&self, y: &[f64; 3]) -> Result<[f64; 3], DomainError> {
        ln_cartesian_field(CartesianState::from_array(*y), &self.params, self.n).map(CartesianState::to_array)
    }
}

/// Member of the Lorenz class together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "lowercase"))]
pub enum SystemSpec {
    Standard { params: StandardParams },
    L2 { params: NormalizedParams },
    L1 { params: NormalizedParams },
    Ln { params: NormalizedParams, n: u32 },
}

impl SystemSpec {
    pub fn standard() -> Self {
        SystemSpec::Standard { params: StandardParams::CANONICAL }
    }

    pub fn l2() -> Self {
        SystemSpec::L2 { params: NormalizedParams::canonical() }
    }

    pub fn l1() -> Self {
        SystemSpec::L1 { params: NormalizedParams::canonical() }
    }

    pub fn ln(n: u32) -> Self {
        SystemSpec::Ln { params: NormalizedParams::canonical(), n }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        match self {
            SystemSpec::Standard { params } => params.validate(),
            SystemSpec::L2 { params } | SystemSpec::L1 { params } => params.validate(),
            SystemSpec::Ln { params, n } => {
                check_fold(*n)?;
                params.validate()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::Standard { .. } => "standard",
            SystemSpec::L2 { .. } => "l2",
            SystemSpec::L1 { .. } => "l1",
            SystemSpec::Ln { .. } => "ln",
        }
    }

    /// Symmetry order of the member: 2 for L2, 1 for L1, n for Ln.
    pub fn fold(&self) -> Option<u32> {
        match self {
            SystemSpec::Standard { .. } => None,
            SystemSpec::L2 { .. } => Some(2),
            SystemSpec::L1 { .. } => Some(1),
            SystemSpec::Ln { n, .. } => Some(*n),
        }
    }

    pub fn normalized_params(&self) -> Option<NormalizedParams> {
        match self {
            SystemSpec::Standard { .. } => None,
            SystemSpec::L2 { params } | SystemSpec::L1 { params } | SystemSpec::Ln { params, .. } => Some(*params),
        }
    }

    /// Coordinates this member is integrated in.
    pub fn coordinates(&self) -> CoordinateKind {
        match self {
            SystemSpec::Standard { .. } | SystemSpec::L2 { .. } => CoordinateKind::Cartesian,
            SystemSpec::L1 { .. } | SystemSpec::Ln { .. } => CoordinateKind::Polar,
        }
    }

    pub fn field(&self) -> Result<SystemField, DomainError> {
        self.validate()?;
        Ok(match *self {
            SystemSpec::Standard { params } => SystemField::Standard(StandardLorenz(params)),
            SystemSpec::L2 { params } => SystemField::L2(NormalizedLorenz(params)),
            SystemSpec::L1 { params } => SystemField::Polar(PolarExtension { params, n: 1 }),
            SystemSpec::Ln { params, n } => SystemField::Polar(PolarExtension { params, n }),
        })
    }

    /// A generic off-axis starting point in the attractor's basin.
    pub fn default_initial_state(&self) -> CartesianState {
        match self {
            SystemSpec::Standard { .. } => CartesianState::new(1.0, 1.0, 1.0),
            _ => CartesianState::new(0.5, 0.1, 0.5),
        }
    }

    /// Converts a Cartesian point to this member's integration coordinates.
    pub fn to_native(&self, s: CartesianState) -> Result<[f64; 3], DomainError> {
        if !s.is_finite() {
            return Err(DomainError::NotFinite);
        }
        match self.coordinates() {
            CoordinateKind::Cartesian => Ok(s.to_array()),
            CoordinateKind::Polar => {
                let radius = s.radius();
                if radius < RADIUS_MIN {
                    return Err(DomainError::NearAxis { radius, min: RADIUS_MIN, x: s.x, y: s.y, z: s.z });
                }
                Ok(s.to_polar().to_array())
            }
        }
    }
}

/// Dispatching field for any [`SystemSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemField {
    Standard(StandardLorenz),
    L2(NormalizedLorenz),
    Polar(PolarExtension),
}

impl SystemField {
    pub fn coordinates(&self) -> CoordinateKind {
        match self {
            SystemField::Polar(_) => CoordinateKind::Polar,
            _ => CoordinateKind::Cartesian,
        }
    }
}

impl VectorField<3> for SystemField {
    fn eval(&self, y: &[f64; 3]) -> Result<[f64; 3], DomainError> {
        match self {
            SystemField::Standard(f) => f.eval(y),
            SystemField::L2(f) => f.eval(y),
            SystemField::Polar(f) => f.eval(y),
        }
    }

    fn admissible(&self, y: &[f64; 3]) -> Result<(), DomainError> {
        match self {
            SystemField::Standard(f) => f.admissible(y),
            SystemField::L2(f) => f.admissible(y),
            SystemField::Polar(f) => f.admissible(y),
        }
    }
}

/// An equilibrium expressed in its member's coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equilibrium {
    Cartesian(CartesianState),
    Polar(PolarState),
}

impl Equilibrium {
    pub fn cartesian(&self) -> CartesianState {
        match *self {
            Equilibrium::Cartesian(c) => c,
            Equilibrium::Polar(p) => p.to_cartesian(),
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        match *self {
            Equilibrium::Cartesian(c) => c.to_array(),
            Equilibrium::Polar(p) => p.to_array(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoints {
    /// Equilibria where the field is defined.
    pub regular: Vec<Equilibrium>,
    /// Equilibria on the z-axis, where the polar quotient field is singular.
    pub degenerate: Vec<Equilibrium>,
}

/// Closed-form equilibria of a class member.
pub fn fixed_points(spec: &SystemSpec) -> Result<FixedPoints, DomainError> {
    spec.validate()?;
    let mut regular = Vec::new();
    let mut degenerate = Vec::new();
    match *spec {
        SystemSpec::Standard { params } => {
            regular.push(Equilibrium::Cartesian(CartesianState::ORIGIN));
            // C± only exist for rayleigh > 1
            if let Ok(pair) = params.nontrivial_equilibria() {
                regular.extend(pair.into_iter().map(Equilibrium::Cartesian));
            }
        }
        SystemSpec::L2 { params } => {
            regular.push(Equilibrium::Cartesian(CartesianState::ORIGIN));
            regular.push(Equilibrium::Cartesian(CartesianState::new(1.0, 0.0, params.gamma)));
            regular.push(Equilibrium::Cartesian(CartesianState::new(-1.0, 0.0, params.gamma)));
        }
        SystemSpec::L1 { params } => {
            regular.push(Equilibrium::Polar(PolarState::new(1.0, 0.0, params.gamma)));
            degenerate.push(Equilibrium::Polar(PolarState::new(0.0, 0.0, 0.0)));
        }
        SystemSpec::Ln { params, n } => {
            let step = math::TAU / f64::from(n);
            regular.extend((0..n).map(|k| Equilibrium::Polar(PolarState::new(1.0, step * f64::from(k), params.gamma))));
            degenerate.push(Equilibrium::Polar(PolarState::new(0.0, 0.0, 0.0)));
        }
    }
    Ok(FixedPoints { regular, degenerate })
}

/// Field value at `s` for any member, as a raw array in native coordinates.
pub fn evaluate(spec: &SystemSpec, s: [f64; 3]) -> Result<[f64; 3], DomainError> {
    spec.field()?.eval(&s)
}
