//! ADMM and restarted fast ADMM for the group-sparse TV model with an Lp fidelity term:
//!
//! ```text
//! min_F  φ(K_h * F) + φ(K_v * F) + μ ‖H * F - G‖_p^p,   0 ≤ F ≤ 1
//! ```
//!
//! split as `Z₁ = K_h * F`, `Z₂ = K_v * F`, `W = H * F - G`, `T = F` with multipliers
//! `V₁..V₄` and penalties `λ₁` (both gradient constraints), `λ₂` (fidelity) and `λ₃` (box).
//! Each sweep solves Z (group prox), W (p-shrinkage), T (box projection), then F exactly in the
//! Fourier domain, then takes relaxed dual steps of size `γ`.
//!
//! The accelerated variant extrapolates the Z, W, T and V sequences with Nesterov weights and
//! restarts each constraint block independently when its combined residual stops shrinking by
//! the factor `η`.

use std::time::Instant;

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fft::{Fft2, FreqImage};
use crate::image::{check_dims, conv_circular, Image, Kernel};
use crate::ogs::{ogs_prox, GroupConfig, MMConfig};
use crate::shrink::{project_box, shrink_p, ShrinkParams};

/// Noise levels with tuned `(μ, p)` values.
const SCHEDULE: [(f64, f64, f64); 4] = [
    (0.3, 90.0, 0.5),
    (0.4, 80.0, 0.6),
    (0.5, 80.0, 0.6),
    (0.6, 70.0, 0.6),
];

/// Default `(μ, p)` for a salt-and-pepper noise level.
///
/// Exact at 0.3, 0.4, 0.5 and 0.6. In between, `μ` is interpolated linearly and `p` is taken from
/// the nearest tabulated level (the lower one on ties). Outside `[0.3, 0.6]` both are clamped to
/// the end values.
pub fn default_params(noise_level: f64) -> Result<(f64, f64)> {
    if !(noise_level > 0.0 && noise_level < 1.0) {
        return Err(invalid("noise level", format!("{noise_level} is outside (0, 1)")));
    }
    if let Some(&(_, mu, p)) = SCHEDULE.iter().find(|(l, _, _)| (l - noise_level).abs() < 1e-12) {
        return Ok((mu, p));
    }
    let (first, last) = (SCHEDULE[0], SCHEDULE[SCHEDULE.len() - 1]);
    if noise_level <= first.0 {
        return Ok((first.1, first.2));
    }
    if noise_level >= last.0 {
        return Ok((last.1, last.2));
    }
    let seg = SCHEDULE
        .windows(2)
        .find(|w| noise_level >= w[0].0 && noise_level <= w[1].0)
        .expect("level inside the table range");
    let (lo, hi) = (seg[0], seg[1]);
    let t = (noise_level - lo.0) / (hi.0 - lo.0);
    let mu = lo.1 + t * (hi.1 - lo.1);
    let p = if noise_level - lo.0 <= hi.0 - noise_level {
        lo.2
    } else {
        hi.2
    };
    Ok((mu, p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Fidelity quasinorm exponent in `(0, 1]`.
    pub p: f64,
    /// Fidelity weight.
    pub mu: f64,
    /// Penalty on the gradient constraints.
    pub lambda1: f64,
    /// Penalty on the fidelity constraint.
    pub lambda2: f64,
    /// Penalty on the box constraint.
    pub lambda3: f64,
    /// Dual step relaxation in `(0, 2)`.
    pub gamma: f64,
    /// Restart factor in `[0, 1)`; 0 restarts on every iteration.
    pub eta: f64,
    pub group: GroupConfig,
    /// Inner MM settings. `gamma_prox` is ignored: the solver always uses `1 / λ₁`.
    pub mm: MMConfig,
    /// Stop once `‖F⁺ - F‖ / ‖F‖` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub accelerate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            p: 0.6,
            mu: 80.0,
            lambda1: 1.0,
            lambda2: 500.0,
            lambda3: 1.0,
            gamma: 1.618,
            eta: 0.999,
            group: GroupConfig::default(),
            mm: MMConfig::default(),
            tol: 1e-5,
            max_iter: 500,
            accelerate: false,
        }
    }
}

impl SolverConfig {
    /// Defaults with `(μ, p)` taken from [`default_params`].
    pub fn for_noise_level(noise_level: f64) -> Result<Self> {
        let (mu, p) = default_params(noise_level)?;
        Ok(Self {
            mu,
            p,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(invalid("p", format!("must lie in (0, 1], got {}", self.p)));
        }
        positive("mu", self.mu)?;
        positive("lambda1", self.lambda1)?;
        positive("lambda2", self.lambda2)?;
        positive("lambda3", self.lambda3)?;
        positive("tol", self.tol)?;
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            return Err(invalid(
                "gamma",
                format!("must lie in (0, 2), got {}", self.gamma),
            ));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(invalid("eta", format!("must lie in [0, 1), got {}", self.eta)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        self.prox_config().validate()
    }

    fn prox_config(&self) -> MMConfig {
        MMConfig {
            gamma_prox: 1.0 / self.lambda1,
            ..self.mm
        }
    }

    fn shrink_params(&self) -> ShrinkParams {
        ShrinkParams {
            p: self.p,
            beta: self.lambda2 / self.mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Successive-iterate relative change of F, one entry per iteration.
    pub re_history: Vec<f64>,
    pub converged: bool,
    /// Seconds.
    pub wall_time: f64,
    /// Number of block restarts (accelerated runs only).
    pub restarts: usize,
}

/// `λ₁ (|𝓕K_h|² + |𝓕K_v|²) + λ₂ |𝓕H|² + λ₃`, the diagonal of the F-subproblem's normal
/// operator in the Fourier basis.
pub fn precompute_lhs(h: &Kernel, rows: usize, cols: usize, cfg: &SolverConfig) -> Result<FreqImage> {
    let fft = Fft2::new(rows, cols);
    let ops = Operators::new(fft, h, cfg)?;
    Ok(FreqImage::from_array(ops.lhs.mapv(|v| Complex64::new(v, 0.0))))
}

/// Fixed operators of one problem: transforms, transfer functions and the F-update denominator.
#[derive(Debug, Clone)]
pub struct Operators {
    pub fft: Fft2,
    pub h: Kernel,
    pub kh: Kernel,
    pub kv: Kernel,
    pub otf_h: FreqImage,
    pub otf_kh: FreqImage,
    pub otf_kv: FreqImage,
    pub lhs: Array2<f64>,
}

impl Operators {
    pub fn new(fft: Fft2, h: &Kernel, cfg: &SolverConfig) -> Result<Self> {
        let kh = Kernel::diff_horizontal();
        let kv = Kernel::diff_vertical();
        let otf_h = fft.otf(h)?;
        let otf_kh = fft.otf(&kh)?;
        let otf_kv = fft.otf(&kv)?;
        let mut lhs = otf_kh.power() + otf_kv.power();
        Zip::from(&mut lhs)
            .and(&otf_h.power())
            .for_each(|l, &hp| *l = cfg.lambda1 * *l + cfg.lambda2 * hp + cfg.lambda3);
        Ok(Self {
            fft,
            h: h.clone(),
            kh,
            kv,
            otf_h,
            otf_kh,
            otf_kv,
            lhs,
        })
    }
}

/// Full iterate set of one solve.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub f: Image,
    pub t: Image,
    pub w: Image,
    pub z: [Image; 2],
    /// Multipliers for `Z₁`, `Z₂`, `W`, `T` in that order.
    pub v: [Image; 4],
    /// Extrapolated primal blocks `Z̃₁, Z̃₂, W̃, T̃`.
    pub primal_hat: [Image; 4],
    /// Extrapolated multipliers; equal to `v` for plain ADMM.
    pub v_hat: [Image; 4],
    pub alpha: [f64; 4],
    /// Restart energies.
    pub energy: [f64; 4],
    pub k: usize,
    pub ops: Operators,
    /// `K_h * F`, `K_v * F`, `H * F` for the current F.
    conv_f: [Image; 3],
}

impl SolverState {
    /// `F⁰ = T⁰ = Z₁⁰ = Z₂⁰ = G`, `W⁰ = 0`, all multipliers zero, `α = 1`, energies `+∞`.
    pub fn init(g: &Image, h: &Kernel, cfg: &SolverConfig) -> Result<Self> {
        let (rows, cols) = g.dims();
        let ops = Operators::new(Fft2::new(rows, cols), h, cfg)?;
        let zero = Image::zeros(rows, cols);
        let z = [g.clone(), g.clone()];
        let w = zero.clone();
        let t = g.clone();
        let v = [zero.clone(), zero.clone(), zero.clone(), zero];
        let conv_f = conv_all(&ops, g)?;
        Ok(Self {
            f: g.clone(),
            primal_hat: [z[0].clone(), z[1].clone(), w.clone(), t.clone()],
            v_hat: v.clone(),
            t,
            w,
            z,
            v,
            alpha: [1.0; 4],
            energy: [f64::INFINITY; 4],
            k: 0,
            ops,
            conv_f,
        })
    }

    fn primal(&self, i: usize) -> &Image {
        match i {
            0 | 1 => &self.z[i],
            2 => &self.w,
            _ => &self.t,
        }
    }

    /// Frobenius constraint residuals per pixel: `Z₁ - K_h*F`, `Z₂ - K_v*F`, `W - (H*F - G)`,
    /// `T - F`, each divided by the pixel count.
    pub fn constraint_residuals(&self, g: &Image) -> [f64; 4] {
        let n = self.f.len() as f64;
        let hf_minus_g = sub(&self.conv_f[2], g);
        [
            self.z[0].dist_sq(&self.conv_f[0]).sqrt() / n,
            self.z[1].dist_sq(&self.conv_f[1]).sqrt() / n,
            self.w.dist_sq(&hf_minus_g).sqrt() / n,
            self.t.dist_sq(&self.f).sqrt() / n,
        ]
    }
}

fn conv_all(ops: &Operators, f: &Image) -> Result<[Image; 3]> {
    Ok([
        conv_circular(f, &ops.kh)?,
        conv_circular(f, &ops.kv)?,
        conv_circular(f, &ops.h)?,
    ])
}

fn sub(a: &Image, b: &Image) -> Image {
    let mut out = a.clone();
    out.array_mut().zip_mut_with(b.as_array(), |x, &y| *x -= y);
    out
}

/// `a + s * b`
fn axpy(a: &Image, s: f64, b: &Image) -> Image {
    let mut out = a.clone();
    out.array_mut().zip_mut_with(b.as_array(), |x, &y| *x += s * y);
    out
}

fn ensure_finite(img: Image, stage: &'static str) -> Result<Image> {
    if img.is_finite() {
        Ok(img)
    } else {
        Err(Error::NonFinite(stage))
    }
}

/// Exact minimizer of the F-subproblem given the current Z, W, T and the multipliers in
/// `state.v_hat`:
///
/// ```text
/// F = 𝓕⁻¹( [λ₁ Σ conj(𝓕Kᵢ)·𝓕(Zᵢ - Vᵢ/λ₁) + λ₂ conj(𝓕H)·𝓕(G + W - V₃/λ₂) + λ₃ 𝓕(T - V₄/λ₃)] / lhs )
/// ```
pub fn update_f(state: &SolverState, cfg: &SolverConfig, g: &Image) -> Result<Image> {
    check_dims(state.f.dims(), g.dims())?;
    let ops = &state.ops;
    let vh = &state.v_hat;
    let a1 = axpy(&state.z[0], -1.0 / cfg.lambda1, &vh[0]);
    let a2 = axpy(&state.z[1], -1.0 / cfg.lambda1, &vh[1]);
    let a3 = axpy(&axpy(g, 1.0, &state.w), -1.0 / cfg.lambda2, &vh[2]);
    let a4 = axpy(&state.t, -1.0 / cfg.lambda3, &vh[3]);
    let s1 = ops.fft.forward(&a1)?;
    let s2 = ops.fft.forward(&a2)?;
    let s3 = ops.fft.forward(&a3)?;
    let s4 = ops.fft.forward(&a4)?;
    let mut rhs = FreqImage::zeros(g.rows(), g.cols());
    Zip::from(rhs.array_mut())
        .and(s1.as_array())
        .and(s2.as_array())
        .and(ops.otf_kh.as_array())
        .and(ops.otf_kv.as_array())
        .for_each(|r, &b1, &b2, &kh, &kv| *r = cfg.lambda1 * (kh.conj() * b1 + kv.conj() * b2));
    Zip::from(rhs.array_mut())
        .and(s3.as_array())
        .and(s4.as_array())
        .and(ops.otf_h.as_array())
        .and(&ops.lhs)
        .for_each(|r, &b3, &b4, &h, &l| {
            *r = (*r + cfg.lambda2 * h.conj() * b3 + cfg.lambda3 * b4) / l;
        });
    let f = ops.fft.inverse(&rhs)?;
    ensure_finite(f, "F")
}

/// Restarted Nesterov weight update `α⁺ = (1 + sqrt(1 + 4α²)) / 2`.
fn next_alpha(alpha: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt()) / 2.0
}

/// Iteration driver shared by both variants.
#[derive(Debug, Clone)]
pub struct Solver {
    cfg: SolverConfig,
    g: Image,
    state: SolverState,
    restarts: usize,
}

impl Solver {
    pub fn new(g: &Image, h: &Kernel, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if !g.is_finite() {
            return Err(invalid("observation", "contains non-finite values"));
        }
        Ok(Self {
            cfg: cfg.clone(),
            g: g.clone(),
            state: SolverState::init(g, h, cfg)?,
            restarts: 0,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// One full sweep; returns `‖F⁺ - F‖ / ‖F‖`.
    pub fn step(&mut self) -> Result<f64> {
        let cfg = &self.cfg;
        let g = &self.g;
        let st = &mut self.state;
        let prox = cfg.prox_config();

        // Z-subproblems: group prox of K_i*F + V_i/λ₁ with weight 1/λ₁.
        let mut z_new = Vec::with_capacity(2);
        for i in 0..2 {
            let arg = axpy(&st.conv_f[i], 1.0 / cfg.lambda1, &st.v_hat[i]);
            z_new.push(ensure_finite(ogs_prox(&arg, &prox, &cfg.group), "Z")?);
        }
        let z_new: [Image; 2] = z_new.try_into().expect("two blocks");

        // W-subproblem: p-shrinkage of H*F - G + V₃/λ₂ with β = λ₂/μ.
        let w_arg = axpy(&sub(&st.conv_f[2], g), 1.0 / cfg.lambda2, &st.v_hat[2]);
        let w_new = ensure_finite(shrink_p(&w_arg, &cfg.shrink_params()), "W")?;

        // T-subproblem: projection of F + V₄/λ₃ onto [0, 1].
        let t_new = ensure_finite(project_box(&axpy(&st.f, 1.0 / cfg.lambda3, &st.v_hat[3])), "T")?;

        let z_old = std::mem::replace(&mut st.z, z_new);
        let w_old = std::mem::replace(&mut st.w, w_new);
        let t_old = std::mem::replace(&mut st.t, t_new);

        let f_new = update_f(st, cfg, g)?;
        let conv_new = conv_all(&st.ops, &f_new)?;

        // Relaxed dual steps from the (possibly extrapolated) multipliers.
        let hf_minus_g = sub(&conv_new[2], g);
        let residuals = [
            sub(&st.z[0], &conv_new[0]),
            sub(&st.z[1], &conv_new[1]),
            sub(&st.w, &hf_minus_g),
            sub(&st.t, &f_new),
        ];
        let penalties = [cfg.lambda1, cfg.lambda1, cfg.lambda2, cfg.lambda3];
        let mut v_new = Vec::with_capacity(4);
        for i in 0..4 {
            let v = axpy(&st.v_hat[i], -cfg.gamma * penalties[i], &residuals[i]);
            v_new.push(ensure_finite(v, "multiplier")?);
        }
        let v_new: [Image; 4] = v_new.try_into().expect("four blocks");
        let v_old = std::mem::replace(&mut st.v, v_new);

        let change = f_new.dist_sq(&st.f).sqrt();
        let base = st.f.norm();
        let re = if base > 0.0 {
            change / base
        } else if change == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        st.f = f_new;
        st.conv_f = conv_new;

        if cfg.accelerate {
            let prev_primal = [&z_old[0], &z_old[1], &w_old, &t_old];
            for i in 0..4 {
                let tau = cfg.gamma * penalties[i];
                let energy =
                    st.v[i].dist_sq(&st.v_hat[i]) / tau + tau * st.primal(i).dist_sq(&st.primal_hat[i]);
                if energy < cfg.eta * st.energy[i] {
                    let alpha_next = next_alpha(st.alpha[i]);
                    let weight = (st.alpha[i] - 1.0) / alpha_next;
                    let cur = st.primal(i).clone();
                    st.primal_hat[i] = axpy(&cur, weight, &sub(&cur, prev_primal[i]));
                    st.v_hat[i] = axpy(&st.v[i], weight, &sub(&st.v[i], &v_old[i]));
                    st.alpha[i] = alpha_next;
                    st.energy[i] = energy;
                } else {
                    st.alpha[i] = 1.0;
                    st.primal_hat[i] = st.primal(i).clone();
                    st.v_hat[i] = st.v[i].clone();
                    st.energy[i] /= cfg.eta;
                    self.restarts += 1;
                }
            }
        } else {
            st.v_hat = st.v.clone();
        }
        st.k += 1;
        Ok(re)
    }

    /// Iterates until the relative change drops below `tol` or `max_iter` sweeps have run.
    pub fn run(&mut self) -> Result<SolveReport> {
        let start = Instant::now();
        let mut re_history = Vec::new();
        let mut converged = false;
        while self.state.k < self.cfg.max_iter {
            let re = self.step()?;
            re_history.push(re);
            if re < self.cfg.tol {
                converged = true;
                break;
            }
        }
        Ok(SolveReport {
            iterations: re_history.len(),
            re_history,
            converged,
            wall_time: start.elapsed().as_secs_f64(),
            restarts: self.restarts,
        })
    }

    /// Current estimate projected onto `[0, 1]`.
    pub fn estimate(&self) -> Image {
        project_box(&self.state.f)
    }
}

/// Runs the variant selected by `cfg.accelerate`.
pub fn solve(g: &Image, h: &Kernel, cfg: &SolverConfig) -> Result<(Image, SolveReport)> {
    let mut solver = Solver::new(g, h, cfg)?;
    let report = solver.run()?;
    Ok((solver.estimate(), report))
}

/// Plain ADMM, regardless of `cfg.accelerate`.
pub fn admm_solve(g: &Image, h: &Kernel, cfg: &SolverConfig) -> Result<(Image, SolveReport)> {
    solve(
        g,
        h,
        &SolverConfig {
            accelerate: false,
            ..cfg.clone()
        },
    )
}

/// Fast ADMM with restart, regardless of `cfg.accelerate`.
pub fn fast_admm_solve(g: &Image, h: &Kernel, cfg: &SolverConfig) -> Result<(Image, SolveReport)> {
    solve(
        g,
        h,
        &SolverConfig {
            accelerate: true,
            ..cfg.clone()
        },
    )
}
