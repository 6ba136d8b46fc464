//! Deblurring of images corrupted by salt-and-pepper noise with an overlapping group sparse
//! total variation regularizer and an Lp quasinorm fidelity term.
//!
//! The pipeline is:
//!
//! * [`degrade`]: build a blur kernel, blur periodically, add salt-and-pepper noise.
//! * [`solver`]: restore with ADMM ([`admm_solve`]) or restarted fast ADMM ([`fast_admm_solve`]).
//! * [`metrics`]: PSNR, global SSIM and relative error against a reference.
//!
//! Images are real grids with intensities in `[0, 1]`; boundaries are periodic everywhere.

pub mod degrade;
pub mod error;
pub mod fft;
pub mod image;
pub mod metrics;
pub mod ogs;
pub mod pgm;
pub mod shrink;
pub mod solver;
pub mod synthetic;

pub use degrade::{
    add_salt_pepper, add_salt_pepper_counted, blur, gaussian_kernel, mean_kernel, ImpulseCounts, KernelSpec,
    NoiseSpec,
};
pub use error::{Error, Result};
pub use fft::{fft2, ifft2, otf_from_psf, Fft2, FreqImage};
pub use image::{conv_circular, correlate_circular, Image, Kernel};
pub use metrics::{psnr, relative_error, ssim_global, QualityReport};
pub use ogs::{mm_prox, mm_weights, ogs_prox, ogs_value, GroupConfig, MMConfig};
pub use shrink::{project_box, shrink_p, soft_threshold, ShrinkParams};
pub use solver::{
    admm_solve, default_params, fast_admm_solve, precompute_lhs, solve, update_f, SolveReport, Solver,
    SolverConfig, SolverState,
};
