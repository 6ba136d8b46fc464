//! Image quality measures on the 8-bit scale.

use std::fmt;

use crate::error::{invalid, Result};
use crate::image::{check_dims, Image};

const PEAK: f64 = 255.0;

pub const DEFAULT_K1: f64 = 0.01;
pub const DEFAULT_K2: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    /// `+∞` when the images are identical.
    pub psnr_db: f64,
    pub ssim: f64,
    pub re: f64,
}

impl QualityReport {
    pub fn compute(reference: &Image, test: &Image) -> Result<Self> {
        Ok(Self {
            psnr_db: psnr(reference, test)?,
            ssim: ssim_global(reference, test, DEFAULT_K1, DEFAULT_K2)?,
            re: relative_error(reference, test)?,
        })
    }
}

impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "psnr={}", format_sig6(self.psnr_db))?;
        writeln!(f, "ssim={}", format_sig6(self.ssim))?;
        write!(f, "re={}", format_sig6(self.re))
    }
}

/// Six significant digits in fixed notation; `inf` for infinities.
pub fn format_sig6(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("exponent");
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `10 log₁₀(255² / MSE)` with pixels rescaled from `[0, 1]` to `[0, 255]`.
pub fn psnr(x: &Image, y: &Image) -> Result<f64> {
    check_dims(x.dims(), y.dims())?;
    let mse = x.dist_sq(y) * PEAK * PEAK / x.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / mse).log10())
}

/// Single-window SSIM from whole-image statistics on the 8-bit scale.
///
/// Variances and covariance use the population (`1/N`) normalization.
pub fn ssim_global(x: &Image, y: &Image, k1: f64, k2: f64) -> Result<f64> {
    check_dims(x.dims(), y.dims())?;
    let n = x.len() as f64;
    let mx = x.sum() * PEAK / n;
    let my = y.sum() * PEAK / n;
    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.pixels().zip(y.pixels()) {
        let (da, db) = (a * PEAK - mx, b * PEAK - my);
        vx += da * da;
        vy += db * db;
        cxy += da * db;
    }
    let (vx, vy, cxy) = (vx / n, vy / n, cxy / n);
    let c1 = (PEAK * k1).powi(2);
    let c2 = (PEAK * k2).powi(2);
    Ok((2.0 * mx * my + c1) * (2.0 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
}

/// `‖y - x‖ / ‖x‖` in the Frobenius norm.
pub fn relative_error(reference: &Image, y: &Image) -> Result<f64> {
    check_dims(reference.dims(), y.dims())?;
    let denom = reference.norm();
    if denom == 0.0 {
        return Err(invalid("reference", "relative error needs a non-zero reference"));
    }
    Ok(y.dist_sq(reference).sqrt() / denom)
}
