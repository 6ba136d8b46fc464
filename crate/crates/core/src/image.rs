//! Image and kernel containers plus periodic-boundary convolution.

use ndarray::{Array2, Zip};

use crate::error::{invalid, Error, Result};

/// Real-valued 2-D pixel grid, canonical intensity range `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    data: Array2<f64>,
}

impl Image {
    /// Builds an image from row-major pixels.
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("dims", "image must have at least one row and column"));
        }
        if pixels.len() != rows * cols {
            return Err(invalid(
                "pixels",
                format!("expected {} values, got {}", rows * cols, pixels.len()),
            ));
        }
        let data = Array2::from_shape_vec((rows, cols), pixels).expect("length checked");
        Self::from_array(data)
    }

    pub fn from_array(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(invalid("dims", "image must have at least one row and column"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("pixels", "image contains non-finite values"));
        }
        Ok(Self { data })
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    /// # Panics
    /// If either dimension is zero or `value` is not finite.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "image dimensions must be positive");
        assert!(value.is_finite(), "fill value must be finite");
        Self {
            data: Array2::from_elem((rows, cols), value),
        }
    }

    /// # Panics
    /// If either dimension is zero or `f` returns a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "image dimensions must be positive");
        let data = Array2::from_shape_fn((rows, cols), |(r, c)| f(r, c));
        assert!(data.iter().all(|v| v.is_finite()), "pixel values must be finite");
        Self { data }
    }

    /// Wraps an array produced by internal arithmetic; finiteness is the caller's job.
    pub(crate) fn from_raw(data: Array2<f64>) -> Self {
        debug_assert!(data.nrows() > 0 && data.ncols() > 0);
        Self { data }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.data.dim()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[[row, col]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub(crate) fn array_mut(&mut self) -> &mut Array2<f64> {
        &mut self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    /// Row-major pixel values.
    pub fn pixels(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.data.iter().copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.data.mapv(f))
    }

    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dims(self.dims(), other.dims())?;
        let mut out = self.data.clone();
        Zip::from(&mut out)
            .and(&other.data)
            .for_each(|a, &b| *a = f(*a, b));
        Ok(Self::from_raw(out))
    }

    pub fn sum(&self) -> f64 {
        self.data.sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    pub fn dot(&self, other: &Image) -> f64 {
        debug_assert_eq!(self.dims(), other.dims());
        Zip::from(&self.data)
            .and(&other.data)
            .fold(0.0, |acc, &a, &b| acc + a * b)
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        debug_assert_eq!(self.dims(), other.dims());
        Zip::from(&self.data)
            .and(&other.data)
            .fold(0.0, |m: f64, &a, &b| m.max((a - b).abs()))
    }

    /// Squared Frobenius distance.
    pub fn dist_sq(&self, other: &Image) -> f64 {
        debug_assert_eq!(self.dims(), other.dims());
        Zip::from(&self.data)
            .and(&other.data)
            .fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b))
    }

    /// Periodic shift: `out(r, c) = self(r - dr, c - dc)`.
    pub fn circshift(&self, dr: isize, dc: isize) -> Self {
        let (rows, cols) = self.dims();
        Self::from_raw(Array2::from_shape_fn((rows, cols), |(r, c)| {
            self.data[[wrap(r as isize - dr, rows), wrap(c as isize - dc, cols)]]
        }))
    }
}

/// Small real-valued stencil with an anchor marking its center.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    taps: Array2<f64>,
    anchor: (usize, usize),
}

impl Kernel {
    /// Builds a kernel from row-major taps; the anchor is `(rows / 2, cols / 2)`.
    pub fn new(rows: usize, cols: usize, taps: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("kernel", "kernel must have at least one tap"));
        }
        if taps.len() != rows * cols {
            return Err(invalid(
                "kernel",
                format!("expected {} taps, got {}", rows * cols, taps.len()),
            ));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(invalid("kernel", "taps must be finite"));
        }
        let taps = Array2::from_shape_vec((rows, cols), taps).expect("length checked");
        Ok(Self {
            taps,
            anchor: (rows / 2, cols / 2),
        })
    }

    pub fn identity() -> Self {
        Self::new(1, 1, vec![1.0]).expect("valid")
    }

    /// Horizontal forward difference `[-1, 1]`.
    pub fn diff_horizontal() -> Self {
        Self::new(1, 2, vec![-1.0, 1.0]).expect("valid")
    }

    /// Vertical forward difference `[-1; 1]`.
    pub fn diff_vertical() -> Self {
        Self::new(2, 1, vec![-1.0, 1.0]).expect("valid")
    }

    pub fn rows(&self) -> usize {
        self.taps.nrows()
    }

    pub fn cols(&self) -> usize {
        self.taps.ncols()
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    pub fn tap(&self, row: usize, col: usize) -> f64 {
        self.taps[[row, col]]
    }

    pub fn taps(&self) -> &Array2<f64> {
        &self.taps
    }

    pub fn sum(&self) -> f64 {
        self.taps.sum()
    }

    /// Tap offsets relative to the anchor, paired with their weights.
    pub(crate) fn offsets(&self) -> impl Iterator<Item = (isize, isize, f64)> + '_ {
        let (ar, ac) = self.anchor;
        self.taps.indexed_iter().filter_map(move |((r, c), &w)| {
            (w != 0.0).then_some((r as isize - ar as isize, c as isize - ac as isize, w))
        })
    }

    pub(crate) fn check_fits(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows() > rows || self.cols() > cols {
            return Err(Error::KernelTooLarge {
                kernel: (self.rows(), self.cols()),
                image: (rows, cols),
            });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

pub(crate) fn check_dims(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Circular convolution (kernel flipped) with periodic wrap-around.
///
/// `out(i, j) = Σ k(a, b) · img(i - (a - anchor_r), j - (b - anchor_c))`
pub fn conv_circular(img: &Image, k: &Kernel) -> Result<Image> {
    k.check_fits(img.rows(), img.cols())?;
    Ok(apply_stencil(img, k, -1))
}

/// Adjoint of [`conv_circular`]: correlation with the same kernel.
///
/// Satisfies `<conv_circular(x, k), y> = <x, correlate_circular(y, k)>`.
pub fn correlate_circular(img: &Image, k: &Kernel) -> Result<Image> {
    k.check_fits(img.rows(), img.cols())?;
    Ok(apply_stencil(img, k, 1))
}

fn apply_stencil(img: &Image, k: &Kernel, sign: isize) -> Image {
    let (rows, cols) = img.dims();
    let src = img.as_array();
    let mut out = Array2::<f64>::zeros((rows, cols));
    for (dr, dc, w) in k.offsets() {
        let (dr, dc) = (sign * dr, sign * dc);
        for r in 0..rows {
            let sr = wrap(r as isize + dr, rows);
            let src_row = src.row(sr);
            let mut out_row = out.row_mut(r);
            for c in 0..cols {
                out_row[c] += w * src_row[wrap(c as isize + dc, cols)];
            }
        }
    }
    Image::from_raw(out)
}
