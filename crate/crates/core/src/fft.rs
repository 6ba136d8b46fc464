//! 2-D discrete Fourier transform and PSF-to-OTF conversion.
//!
//! Forward transforms are unnormalized; the inverse carries the `1 / (rows * cols)` factor,
//! so bin `(0, 0)` of a forward transform is the pixel sum.

use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::image::{check_dims, wrap, Image, Kernel};

/// Imaginary residue above which an inverse transform is reported as a failure.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-6;

/// Complex spectrum with the same dimensions as the spatial grid it transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqImage {
    bins: Array2<Complex64>,
}

impl FreqImage {
    pub fn from_array(bins: Array2<Complex64>) -> Self {
        Self { bins }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            bins: Array2::from_elem((rows, cols), Complex64::new(0.0, 0.0)),
        }
    }

    pub fn rows(&self) -> usize {
        self.bins.nrows()
    }

    pub fn cols(&self) -> usize {
        self.bins.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.bins.dim()
    }

    pub fn bin(&self, row: usize, col: usize) -> Complex64 {
        self.bins[[row, col]]
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.bins
    }

    pub(crate) fn array_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.bins
    }

    /// Elementwise product.
    pub fn mul(&self, other: &FreqImage) -> Result<FreqImage> {
        check_dims(self.dims(), other.dims())?;
        let mut out = self.bins.clone();
        Zip::from(&mut out).and(&other.bins).for_each(|a, &b| *a *= b);
        Ok(Self { bins: out })
    }

    /// Elementwise `|bin|²`.
    pub fn power(&self) -> Array2<f64> {
        self.bins.mapv(|z| z.norm_sqr())
    }
}

/// Planned forward/inverse transforms for a fixed grid size.
#[derive(Clone)]
pub struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "transform dimensions must be positive");
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn forward(&self, img: &Image) -> Result<FreqImage> {
        check_dims((self.rows, self.cols), img.dims())?;
        let mut bins = img.as_array().mapv(|v| Complex64::new(v, 0.0));
        self.transform(&mut bins, &*self.row_fwd, &*self.col_fwd);
        Ok(FreqImage { bins })
    }

    /// Inverse transform keeping the real part.
    ///
    /// Fails with [`Error::ImaginaryResidue`] when the discarded imaginary part exceeds
    /// [`IMAG_RESIDUE_LIMIT`], which means the spectrum was not Hermitian.
    pub fn inverse(&self, spec: &FreqImage) -> Result<Image> {
        let bins = self.inverse_complex(spec)?;
        let residue = bins.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        if residue > IMAG_RESIDUE_LIMIT {
            return Err(Error::ImaginaryResidue(residue));
        }
        let real = bins.mapv(|z| z.re);
        if real.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("inverse transform"));
        }
        Ok(Image::from_raw(real))
    }

    /// Normalized inverse transform without discarding the imaginary part.
    pub fn inverse_complex(&self, spec: &FreqImage) -> Result<Array2<Complex64>> {
        check_dims((self.rows, self.cols), spec.dims())?;
        let mut bins = spec.bins.clone();
        self.transform(&mut bins, &*self.row_inv, &*self.col_inv);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        bins.mapv_inplace(|z| z * scale);
        Ok(bins)
    }

    fn transform(&self, bins: &mut Array2<Complex64>, row: &dyn Fft<f64>, col: &dyn Fft<f64>) {
        for mut r in bins.rows_mut() {
            match r.as_slice_mut() {
                Some(s) => row.process(s),
                None => unreachable!("rows of a standard-layout array are contiguous"),
            }
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); self.rows];
        for mut c in bins.columns_mut() {
            buf.iter_mut().zip(c.iter()).for_each(|(b, &v)| *b = v);
            col.process(&mut buf);
            c.iter_mut().zip(buf.iter()).for_each(|(v, &b)| *v = b);
        }
    }

    /// Transfer function of `k` on this grid; see [`otf_from_psf`].
    pub fn otf(&self, k: &Kernel) -> Result<FreqImage> {
        k.check_fits(self.rows, self.cols)?;
        let mut padded = Array2::<f64>::zeros((self.rows, self.cols));
        let (ar, ac) = k.anchor();
        for ((r, c), &w) in k.taps().indexed_iter() {
            let pr = wrap(r as isize - ar as isize, self.rows);
            let pc = wrap(c as isize - ac as isize, self.cols);
            padded[[pr, pc]] = w;
        }
        self.forward(&Image::from_raw(padded))
    }
}

/// Unnormalized forward 2-D transform.
pub fn fft2(img: &Image) -> FreqImage {
    Fft2::new(img.rows(), img.cols())
        .forward(img)
        .expect("planner built for these dimensions")
}

/// Normalized inverse 2-D transform, real part only.
pub fn ifft2(spec: &FreqImage) -> Result<Image> {
    Fft2::new(spec.rows(), spec.cols()).inverse(spec)
}

/// Zero-pads `k` to `rows × cols`, rolls its anchor to `(0, 0)` and transforms it, so that
/// `conv_circular(x, k) == ifft2(fft2(x) ∘ otf_from_psf(k, ..))`.
pub fn otf_from_psf(k: &Kernel, rows: usize, cols: usize) -> Result<FreqImage> {
    if rows == 0 || cols == 0 {
        return Err(crate::error::invalid("dims", "grid must be non-empty"));
    }
    Fft2::new(rows, cols).otf(k)
}
