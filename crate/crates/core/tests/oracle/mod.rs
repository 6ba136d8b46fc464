//! Independent reference implementations used by the integration and acceptance suites.
//!
//! Nothing here calls into the solver, the FFT layer or the crate's stencil code: convolutions
//! are written out from their index definition, linear systems are solved densely or by
//! conjugate gradients, and the group prox is minimized through its dual.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ogstv::{Image, Kernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_image(rows: usize, cols: usize, seed: u64, lo: f64, hi: f64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// `out(i, j) = Σ k(a, b) x(i - (a - a_r), j - (b - a_c))`, periodic, on a row-major buffer.
pub fn conv(x: &[f64], rows: usize, cols: usize, k: &Kernel) -> Vec<f64> {
    let (ar, ac) = k.anchor();
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = 0.0;
            for a in 0..k.rows() {
                for b in 0..k.cols() {
                    let r = wrap(i as isize - (a as isize - ar as isize), rows);
                    let c = wrap(j as isize - (b as isize - ac as isize), cols);
                    acc += k.tap(a, b) * x[r * cols + c];
                }
            }
            out[i * cols + j] = acc;
        }
    }
    out
}

/// Transpose of [`conv`].
pub fn conv_t(y: &[f64], rows: usize, cols: usize, k: &Kernel) -> Vec<f64> {
    let (ar, ac) = k.anchor();
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            for a in 0..k.rows() {
                for b in 0..k.cols() {
                    let r = wrap(i as isize - (a as isize - ar as isize), rows);
                    let c = wrap(j as isize - (b as isize - ac as isize), cols);
                    out[r * cols + c] += k.tap(a, b) * y[i * cols + j];
                }
            }
        }
    }
    out
}

/// Dense circulant matrix of periodic convolution with `k`.
pub fn conv_matrix(k: &Kernel, rows: usize, cols: usize) -> DMatrix<f64> {
    let n = rows * cols;
    let mut m = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        for (row, v) in conv(&e, rows, cols, k).into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    m
}

pub fn vec_of(img: &Image) -> DVector<f64> {
    DVector::from_vec(img.to_vec())
}

pub fn image_of(v: &DVector<f64>, rows: usize, cols: usize) -> Image {
    Image::new(rows, cols, v.iter().copied().collect()).unwrap()
}

pub struct FInputs<'a> {
    pub g: &'a Image,
    pub z1: &'a Image,
    pub z2: &'a Image,
    pub w: &'a Image,
    pub t: &'a Image,
    pub v: [&'a Image; 4],
    pub lambda: [f64; 3],
}

/// Normal equations of the F-subproblem assembled from dense circulant blocks.
pub fn f_normal_equations(h: &Kernel, inp: &FInputs) -> (DMatrix<f64>, DVector<f64>) {
    let (rows, cols) = inp.g.dims();
    let n = rows * cols;
    let [l1, l2, l3] = inp.lambda;
    let kh = conv_matrix(&Kernel::diff_horizontal(), rows, cols);
    let kv = conv_matrix(&Kernel::diff_vertical(), rows, cols);
    let hm = conv_matrix(h, rows, cols);
    let a = (kh.transpose() * &kh + kv.transpose() * &kv) * l1
        + hm.transpose() * &hm * l2
        + DMatrix::identity(n, n) * l3;
    let b = kh.transpose() * (vec_of(inp.z1) * l1 - vec_of(inp.v[0]))
        + kv.transpose() * (vec_of(inp.z2) * l1 - vec_of(inp.v[1]))
        + hm.transpose() * ((vec_of(inp.g) + vec_of(inp.w)) * l2 - vec_of(inp.v[2]))
        + vec_of(inp.t) * l3
        - vec_of(inp.v[3]);
    (a, b)
}

/// Dense solve of the F-subproblem.
pub fn dense_f_update(h: &Kernel, inp: &FInputs) -> Image {
    let (rows, cols) = inp.g.dims();
    let (a, b) = f_normal_equations(h, inp);
    let x = a.lu().solve(&b).expect("normal operator is positive definite");
    image_of(&x, rows, cols)
}

/// Primal and dual values bracketing `min ½‖v - v0‖² + γ Σ_groups ‖v_group‖₂`.
pub struct ProxBracket {
    pub primal: f64,
    pub dual: f64,
    pub minimizer: Image,
}

/// Group prox minimized by FISTA on the dual (one unit ball per periodic `k × k` group).
///
/// Stops once the duality gap drops below `gap_tol`, so the true minimum lies in
/// `[dual, primal]`.
pub fn group_prox_dual(v0: &Image, gamma: f64, k: usize, gap_tol: f64) -> ProxBracket {
    let (rows, cols) = v0.dims();
    let n = rows * cols;
    let (kl, kr) = (((k - 1) / 2) as isize, (k / 2) as isize);
    // Member pixels of the group centered at each pixel.
    let groups: Vec<Vec<usize>> = (0..n)
        .map(|g| {
            let (gi, gj) = ((g / cols) as isize, (g % cols) as isize);
            let mut m = Vec::new();
            for a in -kl..=kr {
                for b in -kl..=kr {
                    m.push(wrap(gi + a, rows) * cols + wrap(gj + b, cols));
                }
            }
            m
        })
        .collect();
    let x0 = v0.to_vec();
    let at = |u: &[Vec<f64>]| {
        let mut out = vec![0.0; n];
        for (g, members) in groups.iter().enumerate() {
            for (slot, &p) in members.iter().enumerate() {
                out[p] += u[g][slot];
            }
        }
        out
    };
    let primal_at = |u: &[Vec<f64>]| {
        let atu = at(u);
        let v: Vec<f64> = x0.iter().zip(&atu).map(|(x, a)| x - gamma * a).collect();
        let fid: f64 = v.iter().zip(&x0).map(|(a, b)| 0.5 * (a - b) * (a - b)).sum();
        let pen: f64 = groups
            .iter()
            .map(|m| m.iter().map(|&p| v[p] * v[p]).sum::<f64>().sqrt())
            .sum();
        let x0sq: f64 = x0.iter().map(|x| x * x).sum();
        let resid: f64 = v.iter().map(|x| x * x).sum();
        (fid + gamma * pen, 0.5 * x0sq - 0.5 * resid, v)
    };
    let step = 1.0 / (gamma * gamma * (k * k) as f64);
    let zero = vec![vec![0.0; k * k]; n];
    let (mut u, mut y, mut t) = (zero.clone(), zero, 1.0f64);
    let mut best = primal_at(&u);
    for it in 0..2_000_000 {
        let v = {
            let aty = at(&y);
            x0.iter()
                .zip(&aty)
                .map(|(x, a)| x - gamma * a)
                .collect::<Vec<_>>()
        };
        // Gradient of ½‖v0 - γAᵀu‖² in u is -γ A v.
        let mut next = y.clone();
        for (g, members) in groups.iter().enumerate() {
            for (slot, &p) in members.iter().enumerate() {
                next[g][slot] += step * gamma * v[p];
            }
            let norm = next[g].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1.0 {
                next[g].iter_mut().for_each(|x| *x /= norm);
            }
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let w = (t - 1.0) / t_next;
        y = next
            .iter()
            .zip(&u)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + w * (x - y)).collect())
            .collect();
        u = next;
        t = t_next;
        if it % 50 == 0 {
            let cand = primal_at(&u);
            if cand.0 < best.0 {
                best.0 = cand.0;
                best.2 = cand.2;
            }
            best.1 = best.1.max(cand.1);
            if best.0 - best.1 < gap_tol {
                break;
            }
        }
    }
    ProxBracket {
        primal: best.0,
        dual: best.1,
        minimizer: Image::new(rows, cols, best.2).unwrap(),
    }
}

pub struct AtvParams {
    pub mu: f64,
    pub lambda: [f64; 3],
    pub gamma: f64,
    pub tol: f64,
    pub max_iter: usize,
}

fn soft(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Anisotropic TV with an L1 fidelity term, solved by plain ADMM with the splitting
/// `Z₁ = K_h F`, `Z₂ = K_v F`, `W = H F - G`, `T = F`, scalar soft thresholds and a
/// conjugate-gradient F-solve on direct convolutions.
///
/// Returns the box-projected estimate and the number of sweeps.
pub fn atv_l1(g: &Image, h: &Kernel, prm: &AtvParams) -> (Image, usize) {
    let (rows, cols) = g.dims();
    let n = rows * cols;
    let [l1, l2, l3] = prm.lambda;
    let kh = Kernel::diff_horizontal();
    let kv = Kernel::diff_vertical();
    let gv = g.to_vec();
    let mut f = gv.clone();
    let (mut z1, mut z2, mut t) = (gv.clone(), gv.clone(), gv.clone());
    let mut w = vec![0.0; n];
    let mut v: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);

    let apply = |x: &[f64]| -> Vec<f64> {
        let a = conv_t(&conv(x, rows, cols, &kh), rows, cols, &kh);
        let b = conv_t(&conv(x, rows, cols, &kv), rows, cols, &kv);
        let c = conv_t(&conv(x, rows, cols, h), rows, cols, h);
        (0..n)
            .map(|i| l1 * (a[i] + b[i]) + l2 * c[i] + l3 * x[i])
            .collect()
    };

    let mut sweeps = 0;
    while sweeps < prm.max_iter {
        let khf = conv(&f, rows, cols, &kh);
        let kvf = conv(&f, rows, cols, &kv);
        let hf = conv(&f, rows, cols, h);
        for i in 0..n {
            z1[i] = soft(khf[i] + v[0][i] / l1, 1.0 / l1);
            z2[i] = soft(kvf[i] + v[1][i] / l1, 1.0 / l1);
            w[i] = soft(hf[i] - gv[i] + v[2][i] / l2, prm.mu / l2);
            t[i] = (f[i] + v[3][i] / l3).clamp(0.0, 1.0);
        }
        let r1: Vec<f64> = (0..n).map(|i| l1 * z1[i] - v[0][i]).collect();
        let r2: Vec<f64> = (0..n).map(|i| l1 * z2[i] - v[1][i]).collect();
        let r3: Vec<f64> = (0..n).map(|i| l2 * (gv[i] + w[i]) - v[2][i]).collect();
        let a1 = conv_t(&r1, rows, cols, &kh);
        let a2 = conv_t(&r2, rows, cols, &kv);
        let a3 = conv_t(&r3, rows, cols, h);
        let b: Vec<f64> = (0..n)
            .map(|i| a1[i] + a2[i] + a3[i] + l3 * t[i] - v[3][i])
            .collect();

        let f_new = conjugate_gradient(&apply, &b, &f, 1e-13);

        let khf = conv(&f_new, rows, cols, &kh);
        let kvf = conv(&f_new, rows, cols, &kv);
        let hf = conv(&f_new, rows, cols, h);
        for i in 0..n {
            v[0][i] -= prm.gamma * l1 * (z1[i] - khf[i]);
            v[1][i] -= prm.gamma * l1 * (z2[i] - kvf[i]);
            v[2][i] -= prm.gamma * l2 * (w[i] - (hf[i] - gv[i]));
            v[3][i] -= prm.gamma * l3 * (t[i] - f_new[i]);
        }
        let change: f64 = f_new
            .iter()
            .zip(&f)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let base = dot(&f, &f).sqrt();
        f = f_new;
        sweeps += 1;
        if change < prm.tol * base {
            break;
        }
    }
    let out = f.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    (Image::new(rows, cols, out).unwrap(), sweeps)
}

/// Solves `A x = b` for symmetric positive definite `A`, starting from `x0`.
pub fn conjugate_gradient(
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: &[f64],
    rel_tol: f64,
) -> Vec<f64> {
    let mut x = x0.to_vec();
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let stop = rel_tol * rel_tol * dot(b, b).max(f64::MIN_POSITIVE);
    for _ in 0..4 * b.len() {
        if rr <= stop {
            break;
        }
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    x
}
