//! Overlapping group sparsity penalty and its proximal map by majorization-minimization.
//!
//! A group at `(i, j)` is the `K × K` window spanning rows `i - K_l ..= i + K_r` and columns
//! `j - K_l ..= j + K_r`, with `K_l = ⌊(K - 1) / 2⌋`, `K_r = ⌊K / 2⌋`. All indices wrap
//! periodically, so every pixel sits in exactly `K²` groups.

use ndarray::Array2;

use crate::error::{invalid, Result};
use crate::image::{wrap, Image};
use crate::shrink::soft_threshold;

pub const DEFAULT_EPS_GROUP: f64 = 1e-10;

/// Group geometry and the smoothing constant added to every group energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupConfig {
    size: usize,
    pub eps_group: f64,
}

impl GroupConfig {
    pub fn new(size: usize) -> Result<Self> {
        Self::with_eps(size, DEFAULT_EPS_GROUP)
    }

    pub fn with_eps(size: usize, eps_group: f64) -> Result<Self> {
        if size == 0 {
            return Err(invalid("group size", "K must be at least 1"));
        }
        if !(eps_group > 0.0 && eps_group.is_finite()) {
            return Err(invalid("eps_group", format!("must be positive, got {eps_group}")));
        }
        Ok(Self { size, eps_group })
    }

    /// Group edge length `K`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Rows/columns before the center, `⌊(K - 1) / 2⌋`.
    pub fn left(&self) -> usize {
        (self.size - 1) / 2
    }

    /// Rows/columns after the center, `⌊K / 2⌋`.
    pub fn right(&self) -> usize {
        self.size / 2
    }
}

impl Default for GroupConfig {
    fn default() -> Self {
        Self {
            size: 3,
            eps_group: DEFAULT_EPS_GROUP,
        }
    }
}

/// Inner MM loop settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMConfig {
    /// Weight on the group penalty in `½‖V - V₀‖² + γ φ(V)`.
    pub gamma_prox: f64,
    /// Relative-change stopping threshold.
    pub tol: f64,
    pub max_iter: usize,
}

impl MMConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_prox > 0.0 && self.gamma_prox.is_finite()) {
            return Err(invalid("gamma_prox", "must be positive and finite"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(invalid("mm tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(invalid("mm max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

impl Default for MMConfig {
    fn default() -> Self {
        Self {
            gamma_prox: 1.0,
            tol: 1e-3,
            max_iter: 5,
        }
    }
}

/// Periodic box sum over offsets `lo ..= hi` in both directions.
fn box_sum(src: &Array2<f64>, lo: isize, hi: isize) -> Array2<f64> {
    let (rows, cols) = src.dim();
    let mut horiz = Array2::<f64>::zeros((rows, cols));
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = 0.0;
            for b in lo..=hi {
                acc += src[[r, wrap(c as isize + b, cols)]];
            }
            horiz[[r, c]] = acc;
        }
    }
    let mut out = Array2::<f64>::zeros((rows, cols));
    for r in 0..rows {
        for a in lo..=hi {
            let sr = wrap(r as isize + a, rows);
            for c in 0..cols {
                out[[r, c]] += horiz[[sr, c]];
            }
        }
    }
    out
}

/// `Σ‖v²‖` over the group centered at each pixel (no smoothing).
fn group_energy(v: &Image, cfg: &GroupConfig) -> Array2<f64> {
    let sq = v.as_array().mapv(|x| x * x);
    box_sum(&sq, -(cfg.left() as isize), cfg.right() as isize)
}

/// `φ(v) = Σ_{i,j} ‖group(v, i, j)‖₂`.
pub fn ogs_value(v: &Image, cfg: &GroupConfig) -> f64 {
    group_energy(v, cfg).iter().map(|e| e.sqrt()).sum()
}

/// `Σ_{i,j} sqrt(eps_group + ‖group(v, i, j)‖²)`, the penalty the MM iteration actually descends.
pub fn ogs_value_smoothed(v: &Image, cfg: &GroupConfig) -> f64 {
    group_energy(v, cfg)
        .iter()
        .map(|e| (e + cfg.eps_group).sqrt())
        .sum()
}

/// Diagonal of the MM weight matrix `D²(v)`: for each pixel, the sum of inverse group norms
/// over all groups containing it.
pub fn mm_weights(v: &Image, cfg: &GroupConfig) -> Image {
    let inv = group_energy(v, cfg).mapv(|e| (e + cfg.eps_group).sqrt().recip());
    // Pixel m lies in the groups centered at m - a for a in -K_l..=K_r.
    Image::from_raw(box_sum(&inv, -(cfg.right() as isize), cfg.left() as isize))
}

/// `½‖v - v0‖² + γ φ(v)` with the unsmoothed penalty.
pub fn prox_objective(v: &Image, v0: &Image, gamma: f64, cfg: &GroupConfig) -> f64 {
    0.5 * v.dist_sq(v0) + gamma * ogs_value(v, cfg)
}

/// `½‖v - v0‖² + γ φ_ε(v)` with the smoothed penalty.
pub fn prox_objective_smoothed(v: &Image, v0: &Image, gamma: f64, cfg: &GroupConfig) -> f64 {
    0.5 * v.dist_sq(v0) + gamma * ogs_value_smoothed(v, cfg)
}

/// Proximal map `argmin ½‖V - v0‖² + γ φ(V)`.
///
/// For `K = 1` the groups are single pixels and the map is the exact soft threshold at `γ`;
/// otherwise the MM iteration of [`mm_prox`] is used.
pub fn ogs_prox(v0: &Image, mm: &MMConfig, cfg: &GroupConfig) -> Image {
    if cfg.size() == 1 {
        return v0.map(|x| soft_threshold(x, mm.gamma_prox));
    }
    mm_prox(v0, mm, cfg).0
}

/// MM iteration `V ← v0 / (1 + γ d(V))` started from `v0`.
///
/// Returns the final iterate and the number of updates performed.
pub fn mm_prox(v0: &Image, mm: &MMConfig, cfg: &GroupConfig) -> (Image, usize) {
    mm_prox_with(v0, mm, cfg, |_, _| {})
}

/// [`mm_prox`] reporting every iterate (including the starting point as iteration 0).
pub fn mm_prox_with(
    v0: &Image,
    mm: &MMConfig,
    cfg: &GroupConfig,
    mut on_iterate: impl FnMut(usize, &Image),
) -> (Image, usize) {
    let mut v = v0.clone();
    on_iterate(0, &v);
    let mut k = 0;
    while k < mm.max_iter {
        let d = mm_weights(&v, cfg);
        let mut next = v0.clone();
        next.array_mut()
            .zip_mut_with(d.as_array(), |x, &w| *x /= 1.0 + mm.gamma_prox * w);
        k += 1;
        on_iterate(k, &next);
        let change = next.dist_sq(&v).sqrt();
        let base = v.norm();
        v = next;
        if change <= mm.tol * base {
            break;
        }
    }
    (v, k)
}
