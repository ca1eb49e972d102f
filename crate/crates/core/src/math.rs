//! Float helpers routed through `libm` so the core builds without `std`.

pub(crate) use core::f64::consts::{PI, TAU};

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn powf(x: f64, e: f64) -> f64 {
    libm::pow(x, e)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub(crate) fn reduce_angle(a: f64) -> f64 {
    let r = a - TAU * floor(a / TAU);
    if !(0.0..TAU).contains(&r) {
        0.0
    } else {
        r
    }
}

/// Wraps an angle difference to `(-π, π]`.
#[inline]
pub(crate) fn wrap_pi(a: f64) -> f64 {
    let r = reduce_angle(a + PI) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

#[inline]
pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}
