//! Synthetic observations: blur kernels, periodic blurring and salt-and-pepper corruption.
//!
//! Noise is drawn from `ChaCha8Rng::seed_from_u64(seed)`, one `f64` uniform per pixel in
//! row-major order. A draw `u < level / 2` sets the pixel to 0 (pepper), `level / 2 <= u < level`
//! sets it to 1 (salt), anything else leaves it untouched. This layout is part of the public
//! contract: changing it would invalidate recorded test vectors.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::image::{conv_circular, Image, Kernel};

/// Salt-and-pepper corruption settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Fraction of corrupted pixels in `[0, 1]`.
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(level: f64, seed: u64) -> Result<Self> {
        let spec = Self { level, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.level) {
            return Err(invalid(
                "noise level",
                format!("{} is outside [0, 1]", self.level),
            ));
        }
        Ok(())
    }
}

/// Counts of pixels forced to each extreme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImpulseCounts {
    pub salt: usize,
    pub pepper: usize,
    pub total: usize,
}

impl ImpulseCounts {
    pub fn corrupted(&self) -> usize {
        self.salt + self.pepper
    }

    pub fn fraction(&self) -> f64 {
        self.corrupted() as f64 / self.total as f64
    }
}

/// Normalized `size × size` Gaussian, `exp(-(x² + y²) / 2σ²)` over integer offsets.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Kernel> {
    if size == 0 || size.is_multiple_of(2) {
        return Err(invalid(
            "size",
            format!("Gaussian size must be odd and positive, got {size}"),
        ));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    let half = (size / 2) as f64;
    let denom = 2.0 * sigma * sigma;
    let raw: Vec<f64> = (0..size * size)
        .map(|i| {
            let y = (i / size) as f64 - half;
            let x = (i % size) as f64 - half;
            (-(x * x + y * y) / denom).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    Kernel::new(size, size, raw.into_iter().map(|v| v / total).collect())
}

/// Uniform `size × size` averaging kernel.
pub fn mean_kernel(size: usize) -> Result<Kernel> {
    if size == 0 {
        return Err(invalid("size", "mean kernel size must be positive"));
    }
    let tap = 1.0 / (size * size) as f64;
    Kernel::new(size, size, vec![tap; size * size])
}

/// Periodic blur; same as [`conv_circular`].
pub fn blur(img: &Image, k: &Kernel) -> Result<Image> {
    conv_circular(img, k)
}

pub fn add_salt_pepper(img: &Image, spec: &NoiseSpec) -> Result<Image> {
    add_salt_pepper_counted(img, spec).map(|(out, _)| out)
}

/// Like [`add_salt_pepper`], also reporting how many pixels were hit.
pub fn add_salt_pepper_counted(img: &Image, spec: &NoiseSpec) -> Result<(Image, ImpulseCounts)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let half = spec.level / 2.0;
    let mut counts = ImpulseCounts {
        total: img.len(),
        ..Default::default()
    };
    let mut out = img.clone();
    for v in out.array_mut().iter_mut() {
        let u: f64 = rng.random();
        if u < half {
            *v = 0.0;
            counts.pepper += 1;
        } else if u < spec.level {
            *v = 1.0;
            counts.salt += 1;
        }
    }
    Ok((out, counts))
}

/// Blur-kernel description used on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Gaussian { size: usize, sigma: f64 },
    Mean { size: usize },
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        match *self {
            KernelSpec::Gaussian { size, sigma } => gaussian_kernel(size, sigma),
            KernelSpec::Mean { size } => mean_kernel(size),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::KernelSpec(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let spec = match parts.as_slice() {
            ["gaussian", size, sigma] => KernelSpec::Gaussian {
                size: size.parse().map_err(|_| bad())?,
                sigma: sigma.parse().map_err(|_| bad())?,
            },
            ["mean", size] => KernelSpec::Mean {
                size: size.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        // Surface size/sigma problems at parse time.
        spec.build()?;
        Ok(spec)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Gaussian { size, sigma } => write!(f, "gaussian:{size}:{sigma}"),
            KernelSpec::Mean { size } => write!(f, "mean:{size}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(rows: usize, cols: usize) -> Image {
        Image::from_fn(rows, cols, |r, c| ((r * 31 + c * 17) % 97) as f64 / 96.0)
    }

    #[test]
    fn single_tap_gaussian() {
        let k = gaussian_kernel(1, 0.3).unwrap();
        assert_eq!(k.tap(0, 0), 1.0);
    }

    #[test]
    fn flat_gaussian_limit() {
        let k = gaussian_kernel(3, 1e6).unwrap();
        for t in k.taps() {
            assert!((t - 1.0 / 9.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_7_5_center_tap() {
        // Independent scalar evaluation of the normalized formula.
        let mut total = 0.0;
        for y in -3i32..=3 {
            for x in -3i32..=3 {
                total += (-((x * x + y * y) as f64) / 50.0).exp();
            }
        }
        let center = 1.0 / total;
        let k = gaussian_kernel(7, 5.0).unwrap();
        assert!((k.tap(3, 3) - center).abs() < 1e-15);
        assert!((k.sum() - 1.0).abs() < 1e-12);
        let corner = (-18.0f64 / 50.0).exp() / total;
        assert!((k.tap(0, 6) - corner).abs() < 1e-15);
    }

    #[test]
    fn even_or_degenerate_gaussian_rejected() {
        assert!(gaussian_kernel(4, 1.0).is_err());
        assert!(gaussian_kernel(0, 1.0).is_err());
        assert!(gaussian_kernel(3, 0.0).is_err());
    }

    #[test]
    fn mean_kernel_taps() {
        assert_eq!(mean_kernel(1).unwrap().tap(0, 0), 1.0);
        let k = mean_kernel(7).unwrap();
        assert!(k.taps().iter().all(|&t| t == 1.0 / 49.0));
        let flat = Image::filled(9, 9, 0.4);
        let out = blur(&flat, &k).unwrap();
        assert!(out.max_abs_diff(&flat) < 1e-15);
    }

    #[test]
    fn zero_level_is_identity() {
        let x = ramp(16, 16);
        let (y, counts) = add_salt_pepper_counted(&x, &NoiseSpec::new(0.0, 9).unwrap()).unwrap();
        assert_eq!(y, x);
        assert_eq!(counts.corrupted(), 0);
    }

    #[test]
    fn full_level_hits_everything() {
        let x = ramp(16, 16);
        let y = add_salt_pepper(&x, &NoiseSpec::new(1.0, 9).unwrap()).unwrap();
        assert!(y.pixels().all(|v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn level_out_of_range_rejected() {
        assert!(NoiseSpec::new(1.2, 0).is_err());
        let bad = NoiseSpec { level: -0.1, seed: 0 };
        assert!(add_salt_pepper(&Image::zeros(2, 2), &bad).is_err());
    }

    #[test]
    fn empirical_fraction_at_forty_percent() {
        let x = Image::filled(256, 256, 0.5);
        let (y, counts) = add_salt_pepper_counted(&x, &NoiseSpec::new(0.4, 42).unwrap()).unwrap();
        // Count directly from the output: the clean value 0.5 is never an impulse.
        let salt = y.pixels().filter(|&v| v == 1.0).count();
        let pepper = y.pixels().filter(|&v| v == 0.0).count();
        assert_eq!((salt, pepper), (counts.salt, counts.pepper));
        let frac = (salt + pepper) as f64 / y.len() as f64;
        assert!((frac - 0.4).abs() < 0.01, "fraction {frac}");
        let salt_share = salt as f64 / (salt + pepper) as f64;
        assert!((salt_share - 0.5).abs() < 0.02, "salt share {salt_share}");
    }

    #[test]
    fn mean_fraction_over_many_seeds() {
        let x = Image::filled(128, 128, 0.5);
        let level = 0.3;
        let mean: f64 = (0..100)
            .map(|seed| {
                let (_, c) = add_salt_pepper_counted(&x, &NoiseSpec::new(level, seed).unwrap()).unwrap();
                c.fraction()
            })
            .sum::<f64>()
            / 100.0;
        assert!((mean - level).abs() < 0.005, "mean fraction {mean}");
    }

    #[test]
    fn corruption_is_deterministic() {
        let x = ramp(32, 24);
        let spec = NoiseSpec::new(0.5, 1234).unwrap();
        let a = add_salt_pepper(&x, &spec).unwrap();
        let b = add_salt_pepper(&x, &spec).unwrap();
        assert!(a
            .pixels()
            .zip(b.pixels())
            .all(|(p, q)| p.to_bits() == q.to_bits()));
        let c = add_salt_pepper(&x, &NoiseSpec::new(0.5, 1235).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn blur_preserves_mean() {
        let x = ramp(20, 20);
        let y = blur(&x, &gaussian_kernel(7, 5.0).unwrap()).unwrap();
        assert!((x.mean() - y.mean()).abs() < 1e-10);
    }

    #[test]
    fn kernel_spec_parsing() {
        assert_eq!(
            "gaussian:7:5".parse::<KernelSpec>().unwrap(),
            KernelSpec::Gaussian { size: 7, sigma: 5.0 }
        );
        assert_eq!(
            "mean:7".parse::<KernelSpec>().unwrap(),
            KernelSpec::Mean { size: 7 }
        );
        for bad in ["gaussian:7", "gaussian:6:2", "mean:x", "box:3", "", "mean:0"] {
            assert!(bad.parse::<KernelSpec>().is_err(), "{bad}");
        }
        let spec = KernelSpec::Gaussian { size: 15, sigma: 5.0 };
        assert_eq!(spec.to_string().parse::<KernelSpec>().unwrap(), spec);
    }
}
