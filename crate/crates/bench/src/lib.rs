//! Shared inputs for the benchmarks.

use ogstv::synthetic::piecewise_constant;
use ogstv::{add_salt_pepper, blur, gaussian_kernel, Image, Kernel, NoiseSpec};

/// Blurred and corrupted synthetic scene with its blur kernel.
pub fn observation(size: usize, level: f64) -> (Image, Kernel) {
    let h = gaussian_kernel(7, 5.0).expect("valid kernel");
    let blurred = blur(&piecewise_constant(size, size), &h).expect("kernel fits");
    let g = add_salt_pepper(&blurred, &NoiseSpec::new(level, 1).expect("valid level")).expect("valid noise");
    (g, h)
}

/// Deterministic signed test field.
pub fn field(rows: usize, cols: usize) -> Image {
    Image::from_fn(rows, cols, |r, c| ((r * 31 + c * 17) % 23) as f64 / 11.0 - 1.0)
}
