//! Synthetic additive noise and single-image noise-level estimation.
//!
//! Noise is drawn from ChaCha8 streams: every image row `r` uses the generator
//! seeded with `seed` on stream `r`, consuming one 64-bit word per uniform
//! draw. Output is therefore independent of how rows are scheduled.
//! Gaussian samples use the Box-Muller cosine branch (two uniforms per pixel);
//! Laplacian samples use the inverse CDF (one uniform per pixel).

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conv::convolve;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::Kernel;

/// Median-absolute-deviation divisor for Gaussian noise.
pub const GAUSSIAN_MAD_DIVISOR: f64 = 0.6745;
/// Median-absolute-deviation divisor for Laplacian noise.
pub const LAPLACIAN_MAD_DIVISOR: f64 = 0.4901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseDistribution {
    Gaussian,
    Laplacian,
}

impl NoiseDistribution {
    pub fn mad_divisor(self) -> f64 {
        match self {
            NoiseDistribution::Gaussian => GAUSSIAN_MAD_DIVISOR,
            NoiseDistribution::Laplacian => LAPLACIAN_MAD_DIVISOR,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseDistribution::Gaussian => "gaussian",
            NoiseDistribution::Laplacian => "laplacian",
        }
    }
}

impl fmt::Display for NoiseDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseDistribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(NoiseDistribution::Gaussian),
            "laplacian" => Ok(NoiseDistribution::Laplacian),
            other => Err(format!(
                "unknown noise distribution {other:?} (expected gaussian or laplacian)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub distribution: NoiseDistribution,
    /// Standard deviation in gray levels.
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(distribution: NoiseDistribution, sigma: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            distribution,
            sigma,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidSigma(self.sigma));
        }
        Ok(())
    }
}

/// Uniform in `(0, 1)`: the 53 high bits of one word, offset by half an ulp.
#[inline]
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn fill_row(spec: &NoiseSpec, row: usize, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(row as u64);
    match spec.distribution {
        NoiseDistribution::Gaussian => {
            for v in out {
                let u1 = open_unit(&mut rng);
                let u2 = open_unit(&mut rng);
                *v = spec.sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
            }
        }
        NoiseDistribution::Laplacian => {
            // scale b = sigma / sqrt(2) gives variance 2 b^2 = sigma^2
            let b = spec.sigma / SQRT_2;
            for v in out {
                let u = open_unit(&mut rng) - 0.5;
                *v = -b * u.signum() * (1.0 - 2.0 * u.abs()).ln();
            }
        }
    }
}

/// Noise field alone, `w`, with the dimensions of a `width` x `height` image.
pub fn noise_field(width: usize, height: usize, spec: &NoiseSpec) -> Result<Image> {
    spec.validate()?;
    let mut samples = vec![0.0; width * height];
    if width > 0 {
        samples
            .par_chunks_mut(width)
            .enumerate()
            .for_each(|(row, out)| fill_row(spec, row, out));
    }
    Image::new(width, height, samples)
}

/// `y = x + w`, unclamped.
pub fn corrupt(img: &Image, spec: &NoiseSpec) -> Result<Image> {
    let w = noise_field(img.width(), img.height(), spec)?;
    let samples = img.samples().iter().zip(w.samples()).map(|(x, n)| x + n).collect();
    Image::new(img.width(), img.height(), samples)
}

/// The 3x3 highpass mask `(1/9) [[-1,-1,-1],[-1,8,-1],[-1,-1,-1]]`.
pub fn highpass_mask() -> Kernel {
    let mut taps = vec![-1.0 / 9.0; 9];
    taps[4] = 8.0 / 9.0;
    Kernel::from_taps(3, taps).expect("3x3 mask")
}

/// Median of a slice, reordering it in place. Even lengths average the two
/// central order statistics. Returns NaN for an empty slice.
pub fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    let mid = n / 2;
    let (lower, upper_mid, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper_mid = *upper_mid;
    if n % 2 == 1 {
        upper_mid
    } else {
        let lower_mid = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower_mid + upper_mid)
    }
}

/// `median(|h * y|) / c` with the 3x3 highpass mask, mirror boundary, and
/// every pixel (borders included) contributing to the median.
pub fn estimate_sigma(img: &Image, distribution: NoiseDistribution) -> Result<f64> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            min: 3,
        });
    }
    let hp = convolve(img, &highpass_mask())?;
    let mut mags: Vec<f64> = hp.samples().iter().map(|v| v.abs()).collect();
    Ok(median_in_place(&mut mags) / distribution.mad_divisor())
}

/// Noise standard deviation whose nominal input PSNR is `target_psnr` dB.
pub fn sigma_for_psnr(target_psnr: f64) -> f64 {
    255.0 / 10f64.powf(target_psnr / 20.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(v: &[f64]) -> (f64, f64, f64) {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let m2 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (mean, m2.sqrt(), m4 / (m2 * m2) - 3.0)
    }

    #[test]
    fn parses_distribution_names() {
        assert_eq!(
            "Gaussian".parse::<NoiseDistribution>().unwrap(),
            NoiseDistribution::Gaussian
        );
        assert_eq!(
            "laplacian".parse::<NoiseDistribution>().unwrap(),
            NoiseDistribution::Laplacian
        );
        assert!("poisson".parse::<NoiseDistribution>().is_err());
    }

    #[test]
    fn invalid_sigma_rejected() {
        assert!(NoiseSpec::new(NoiseDistribution::Gaussian, 0.0, 1).is_err());
        assert!(NoiseSpec::new(NoiseDistribution::Gaussian, f64::INFINITY, 1).is_err());
        assert!(NoiseSpec::new(NoiseDistribution::Laplacian, -1.0, 1).is_err());
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let img = Image::from_fn(33, 17, |x, y| (x + y) as f64).unwrap();
        let spec = NoiseSpec::new(NoiseDistribution::Laplacian, 7.0, 42).unwrap();
        assert_eq!(corrupt(&img, &spec).unwrap(), corrupt(&img, &spec).unwrap());
        let other = NoiseSpec { seed: 43, ..spec };
        assert_ne!(corrupt(&img, &spec).unwrap(), corrupt(&img, &other).unwrap());
    }

    #[test]
    fn rows_draw_independent_streams() {
        let spec = NoiseSpec::new(NoiseDistribution::Gaussian, 1.0, 0).unwrap();
        let w = noise_field(8, 2, &spec).unwrap();
        assert_ne!(w.row(0), w.row(1));
        // a narrower image shares the row prefix
        let narrow = noise_field(4, 2, &spec).unwrap();
        assert_eq!(&w.row(1)[..4], narrow.row(1));
    }

    #[test]
    fn gaussian_moments() {
        let zero = Image::filled(512, 512, 0.0).unwrap();
        let y = corrupt(&zero, &NoiseSpec::new(NoiseDistribution::Gaussian, 20.0, 1).unwrap()).unwrap();
        let (mean, std, kurt) = moments(y.samples());
        assert!((-0.3..=0.3).contains(&mean), "mean {mean}");
        assert!((19.8..=20.2).contains(&std), "std {std}");
        assert!(kurt.abs() < 0.1, "excess kurtosis {kurt}");
    }

    #[test]
    fn laplacian_moments() {
        let zero = Image::filled(512, 512, 0.0).unwrap();
        let y = corrupt(&zero, &NoiseSpec::new(NoiseDistribution::Laplacian, 20.0, 1).unwrap()).unwrap();
        let (mean, std, kurt) = moments(y.samples());
        assert!((-0.3..=0.3).contains(&mean), "mean {mean}");
        assert!((19.8..=20.2).contains(&std), "std {std}");
        assert!((2.7..=3.3).contains(&kurt), "excess kurtosis {kurt}");
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median_in_place(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median_in_place(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median_in_place(&mut [5.0]), 5.0);
        assert!(median_in_place(&mut []).is_nan());
    }

    #[test]
    fn highpass_mask_sums_to_zero() {
        assert!(highpass_mask().sum().abs() < 1e-15);
    }

    #[test]
    fn estimate_requires_three_by_three() {
        let img = Image::filled(2, 5, 1.0).unwrap();
        assert!(matches!(
            estimate_sigma(&img, NoiseDistribution::Gaussian),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn estimate_invariant_to_offset() {
        let base = Image::from_fn(64, 48, |x, y| ((x * 7 + y * 3) % 50) as f64).unwrap();
        let spec = NoiseSpec::new(NoiseDistribution::Gaussian, 10.0, 5).unwrap();
        let y = corrupt(&base, &spec).unwrap();
        let shifted = Image::from_fn(64, 48, |x, yy| y.get(x, yy) + 37.0).unwrap();
        let a = estimate_sigma(&y, NoiseDistribution::Gaussian).unwrap();
        let b = estimate_sigma(&shifted, NoiseDistribution::Gaussian).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn estimate_scales_with_sigma() {
        let zero = Image::filled(256, 256, 0.0).unwrap();
        for dist in [NoiseDistribution::Gaussian, NoiseDistribution::Laplacian] {
            let est = |s: f64| {
                let y = corrupt(&zero, &NoiseSpec::new(dist, s, 11).unwrap()).unwrap();
                estimate_sigma(&y, dist).unwrap()
            };
            let ratio = est(30.0) / est(10.0);
            assert!((ratio - 3.0).abs() < 0.1, "{dist}: ratio {ratio}");
        }
    }

    #[test]
    fn psnr_inversion() {
        assert!((sigma_for_psnr(20.0 * (255.0f64 / 20.0).log10()) - 20.0).abs() < 1e-12);
        assert!((sigma_for_psnr(22.11) - 20.0).abs() < 0.01);
        // 255 / 10^(28.13 / 20) = 9.999
        assert!((sigma_for_psnr(28.13) - 10.0).abs() < 0.01);
        assert_eq!(sigma_for_psnr(0.0), 255.0);
    }
}
