//! Elementwise p-shrinkage and the `[0, 1]` box projection.

use crate::error::{invalid, Result};
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkParams {
    /// Quasinorm exponent in `(0, 1]`.
    pub p: f64,
    /// Inverse threshold scale; the solver uses `λ₂ / μ`.
    pub beta: f64,
}

impl ShrinkParams {
    pub fn new(p: f64, beta: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid("p", format!("must lie in (0, 1], got {p}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta", format!("must be positive, got {beta}")));
        }
        Ok(Self { p, beta })
    }
}

/// Classical soft threshold `sign(x) · max(|x| - t, 0)`.
#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    let mag = x.abs() - t;
    if mag > 0.0 {
        mag.copysign(x)
    } else {
        0.0
    }
}

/// `sign(ξ) · max(|ξ| - β^(p-2) |ξ|^(p-1), 0)`, with `ξ = 0 ↦ 0`.
#[inline]
pub fn shrink_p_scalar(xi: f64, prm: &ShrinkParams) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    if prm.p == 1.0 {
        return soft_threshold(xi, 1.0 / prm.beta);
    }
    let mag = xi.abs();
    let thresh = prm.beta.powf(prm.p - 2.0) * mag.powf(prm.p - 1.0);
    let out = mag - thresh;
    if out > 0.0 {
        out.copysign(xi)
    } else {
        0.0
    }
}

pub fn shrink_p(xi: &Image, prm: &ShrinkParams) -> Image {
    xi.map(|x| shrink_p_scalar(x, prm))
}

/// Clamp every pixel to `[0, 1]`.
pub fn project_box(f: &Image) -> Image {
    f.map(|x| x.clamp(0.0, 1.0))
}
