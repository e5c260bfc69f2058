//! Unbiased squared-error estimation for linear shift-invariant filters
//! under additive white noise of known variance and arbitrary distribution.
//!
//! For `x_hat = H y` with `y = x + w`, `w` zero-mean with uncorrelated entries of
//! variance `sigma^2`,
//!
//! ```text
//! C_hat = ||H y - y||^2 + 2 sigma^2 tr(H) - N sigma^2
//! ```
//!
//! satisfies `E[C_hat] = E[||x - H y||^2]`. Restricted to a region `R`, every
//! norm and the trace are summed over the pixels of `R` only. For a filter that
//! is shift-invariant on the whole grid, `tr(H)` restricted to `R` is `|R| h0`.
//! With mirror boundary extension a tap can reflect back onto the pixel being
//! filtered within `side / 4` pixels of an edge, and those pixels carry the
//! reflected tap weight on the diagonal as well; [`filter_trace`] accounts for it.

use crate::conv::{check_kernel_fits, convolve, convolve_padded, extract_padded, mirror_index, Boundary};
use crate::error::{Error, Result};
use crate::image::{Image, Region};
use crate::kernel::Kernel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    /// `||H y - y||^2` over the region.
    pub residual_energy: f64,
    /// `2 sigma^2 tr_R(H)`.
    pub penalty: f64,
    /// `-|R| sigma^2`.
    pub offset: f64,
    /// `residual_energy + penalty + offset`; may be negative.
    pub value: f64,
    pub n_pixels: usize,
}

impl RiskEstimate {
    fn from_terms(residual_energy: f64, trace: f64, sigma: f64, n_pixels: usize) -> Self {
        let var = sigma * sigma;
        let penalty = 2.0 * var * trace;
        let offset = -(n_pixels as f64) * var;
        Self {
            residual_energy,
            penalty,
            offset,
            value: residual_energy + penalty + offset,
            n_pixels,
        }
    }
}

/// Divergence of an LSI filter map on `n_pixels` pixels: `n_pixels * h0`.
pub fn lsi_divergence(kernel: &Kernel, n_pixels: usize) -> f64 {
    n_pixels as f64 * kernel.center_tap()
}

/// Per-offset count of pixels in `start..start + len` (of an axis of length
/// `n`) that a mirror-extended tap at that offset maps back onto themselves.
fn self_hits(start: usize, len: usize, n: usize, half: usize) -> Vec<f64> {
    (-(half as isize)..=half as isize)
        .map(|d| {
            (start..start + len)
                .filter(|&p| mirror_index(p as isize - d, n) == p)
                .count() as f64
        })
        .collect()
}

/// Sum over `region` of the diagonal entries of the mirror-boundary
/// convolution operator, i.e. `sum_{p in R} d x_hat_p / d y_p`.
pub fn filter_trace(kernel: &Kernel, region: Region, width: usize, height: usize) -> f64 {
    let half = kernel.half();
    let cx = self_hits(region.x0, region.w, width, half);
    let cy = self_hits(region.y0, region.h, height, half);
    trace_from_hits(kernel, &cx, &cy)
}

fn trace_from_hits(kernel: &Kernel, hits_x: &[f64], hits_y: &[f64]) -> f64 {
    let side = kernel.side();
    let mut trace = 0.0;
    for (ky, &ny) in hits_y.iter().enumerate() {
        if ny == 0.0 {
            continue;
        }
        for (kx, &nx) in hits_x.iter().enumerate() {
            trace += kernel.taps()[ky * side + kx] * nx * ny;
        }
    }
    trace
}

/// A region of a noisy image prepared for repeated risk evaluation under
/// different kernels of one fixed side.
#[derive(Debug, Clone)]
pub struct RegionFilter {
    region: Region,
    side: usize,
    padded: Vec<f64>,
    stride: usize,
    noisy: Vec<f64>,
    hits_x: Vec<f64>,
    hits_y: Vec<f64>,
}

impl RegionFilter {
    pub fn new(noisy: &Image, region: Region, side: usize) -> Result<Self> {
        if side % 2 == 0 {
            return Err(Error::EvenKernel(side));
        }
        if side > noisy.width().min(noisy.height()) {
            return Err(Error::KernelTooLarge {
                side,
                width: noisy.width(),
                height: noisy.height(),
            });
        }
        region.validate(noisy.width(), noisy.height())?;
        let half = side / 2;
        let padded = extract_padded(noisy, region, half, Boundary::Mirror);
        let stride = region.w + 2 * half;
        let noisy_vals = (0..region.h)
            .flat_map(|j| padded[(j + half) * stride + half..][..region.w].iter().copied())
            .collect();
        Ok(Self {
            region,
            side,
            padded,
            stride,
            noisy: noisy_vals,
            hits_x: self_hits(region.x0, region.w, noisy.width(), half),
            hits_y: self_hits(region.y0, region.h, noisy.height(), half),
        })
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Filtered values `H y` on the region, row-major.
    pub fn filtered(&self, kernel: &Kernel) -> Vec<f64> {
        assert_eq!(kernel.side(), self.side, "kernel side differs from the prepared side");
        let mut out = vec![0.0; self.region.len()];
        convolve_padded(
            &self.padded,
            self.stride,
            kernel,
            self.region.w,
            self.region.h,
            &mut out,
        );
        out
    }

    pub fn trace(&self, kernel: &Kernel) -> f64 {
        trace_from_hits(kernel, &self.hits_x, &self.hits_y)
    }

    pub fn risk(&self, kernel: &Kernel, sigma: f64) -> RiskEstimate {
        let filtered = self.filtered(kernel);
        let residual: f64 = filtered.iter().zip(&self.noisy).map(|(f, y)| (f - y) * (f - y)).sum();
        RiskEstimate::from_terms(residual, self.trace(kernel), sigma, self.region.len())
    }
}

/// Estimated squared error of filtering `noisy` with `kernel`, summed over `region`.
///
/// The filter reads the whole image (mirror-extended at its borders), so
/// pixels outside `region` contribute to the filtered values.
pub fn stein_free_risk(noisy: &Image, region: Region, kernel: &Kernel, sigma: f64) -> Result<RiskEstimate> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidSigma(sigma));
    }
    Ok(RegionFilter::new(noisy, region, kernel.side())?.risk(kernel, sigma))
}

/// Realized squared error `sum_{p in R} (x_p - (H y)_p)^2` using the clean image.
pub fn oracle_mse(clean: &Image, noisy: &Image, kernel: &Kernel, region: Region) -> Result<f64> {
    clean.ensure_same_dims(noisy)?;
    region.validate(clean.width(), clean.height())?;
    check_kernel_fits(noisy, kernel)?;
    let filtered = convolve(noisy, kernel)?;
    let mut total = 0.0;
    for y in region.y0..region.y0 + region.h {
        for x in region.x0..region.x0 + region.w {
            let d = clean.get(x, y) - filtered.get(x, y);
            total += d * d;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{make_kernel, KernelParams};
    use crate::noise::{corrupt, NoiseDistribution, NoiseSpec};

    fn scene(w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |x, y| {
            if (x / 5 + y / 7) % 2 == 0 {
                60.0 + (x % 3) as f64
            } else {
                180.0
            }
        })
        .unwrap()
    }

    fn noisy(w: usize, h: usize, sigma: f64, seed: u64) -> (Image, Image) {
        let x = scene(w, h);
        let y = corrupt(&x, &NoiseSpec::new(NoiseDistribution::Gaussian, sigma, seed).unwrap()).unwrap();
        (x, y)
    }

    /// Finite-difference divergence `sum_k d f_k / d y_k` through full-image convolution.
    fn fd_divergence(y: &Image, kernel: &Kernel, region: Region, boundary: Boundary) -> f64 {
        let eps = 1e-4;
        let base = crate::conv::convolve_with(y, kernel, boundary).unwrap();
        let mut total = 0.0;
        for py in region.y0..region.y0 + region.h {
            for px in region.x0..region.x0 + region.w {
                let mut s = y.samples().to_vec();
                s[py * y.width() + px] += eps;
                let bumped = Image::new(y.width(), y.height(), s).unwrap();
                let out = crate::conv::convolve_with(&bumped, kernel, boundary).unwrap();
                total += (out.get(px, py) - base.get(px, py)) / eps;
            }
        }
        total
    }

    #[test]
    fn identity_filter_estimates_noise_energy() {
        let (_, y) = noisy(20, 20, 9.0, 1);
        let r = stein_free_risk(&y, y.full_region(), &Kernel::delta(9).unwrap(), 9.0).unwrap();
        assert_eq!(r.residual_energy, 0.0);
        assert!((r.value - 400.0 * 81.0).abs() < 1e-9);
    }

    #[test]
    fn zero_filter_estimates_signal_energy() {
        let (_, y) = noisy(20, 20, 9.0, 2);
        let zero = Kernel::from_taps(5, vec![0.0; 25]).unwrap();
        let r = stein_free_risk(&y, y.full_region(), &zero, 9.0).unwrap();
        let energy: f64 = y.samples().iter().map(|v| v * v).sum();
        assert!((r.value - (energy - 400.0 * 81.0)).abs() < 1e-6);
        assert_eq!(r.penalty, 0.0);
    }

    #[test]
    fn components_add_up() {
        let (_, y) = noisy(24, 24, 15.0, 3);
        let k = make_kernel(KernelParams::new(1.2, 2.3, 0.6), 9).unwrap();
        let r = stein_free_risk(&y, Region::new(3, 5, 10, 12), &k, 15.0).unwrap();
        assert_eq!(r.value, r.residual_energy + r.penalty + r.offset);
        assert!(r.residual_energy >= 0.0);
        assert_eq!(r.n_pixels, 120);
    }

    #[test]
    fn region_residual_matches_full_convolution() {
        let (_, y) = noisy(30, 26, 12.0, 4);
        let k = make_kernel(KernelParams::new(2.0, 0.8, -0.4), 9).unwrap();
        let region = Region::new(0, 19, 13, 7);
        let full = convolve(&y, &k).unwrap();
        let mut direct = 0.0;
        for py in region.y0..region.y0 + region.h {
            for px in region.x0..region.x0 + region.w {
                direct += (full.get(px, py) - y.get(px, py)).powi(2);
            }
        }
        let r = stein_free_risk(&y, region, &k, 12.0).unwrap();
        assert!((r.residual_energy - direct).abs() < 1e-8 * direct);
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(lsi_divergence(&Kernel::delta(9).unwrap(), 4096), 4096.0);
        assert!((lsi_divergence(&Kernel::uniform(3).unwrap(), 900) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn trace_equals_lsi_divergence_away_from_borders() {
        let k = make_kernel(KernelParams::new(1.5, 2.5, 0.2), 9).unwrap();
        // pixels more than side/4 from every edge never see their own reflection
        let inner = Region::new(3, 3, 10, 10);
        assert!((filter_trace(&k, inner, 16, 16) - lsi_divergence(&k, 100)).abs() < 1e-12);
        // 3x3 masks never self-reflect under mirror extension
        let u = Kernel::uniform(3).unwrap();
        assert!((filter_trace(&u, Region::new(0, 0, 16, 16), 16, 16) - lsi_divergence(&u, 256)).abs() < 1e-12);
        // wider masks pick up reflected taps at the border
        let full = Region::new(0, 0, 16, 16);
        assert!(filter_trace(&k, full, 16, 16) > lsi_divergence(&k, 256));
    }

    #[test]
    fn trace_matches_finite_differences_with_mirror_boundary() {
        let (_, y) = noisy(16, 16, 5.0, 5);
        let k = make_kernel(KernelParams::new(1.1, 3.0, 0.9), 9).unwrap();
        for region in [Region::new(0, 0, 16, 16), Region::new(0, 9, 7, 7)] {
            let fd = fd_divergence(&y, &k, region, Boundary::Mirror);
            let exact = filter_trace(&k, region, 16, 16);
            assert!((fd - exact).abs() < 1e-6 * exact, "fd {fd} vs {exact}");
        }
    }

    #[test]
    fn sure_with_numeric_divergence_agrees() {
        // SURE route: residual + 2 sigma^2 * (numerical divergence) - N sigma^2
        let sigma = 11.0;
        let (_, y) = noisy(16, 16, sigma, 6);
        let k = make_kernel(KernelParams::new(0.9, 1.7, -1.2), 7).unwrap();
        let region = Region::new(2, 1, 12, 9);
        let fd = fd_divergence(&y, &k, region, Boundary::Mirror);
        let full = convolve(&y, &k).unwrap();
        let mut residual = 0.0;
        for py in region.y0..region.y0 + region.h {
            for px in region.x0..region.x0 + region.w {
                residual += (full.get(px, py) - y.get(px, py)).powi(2);
            }
        }
        let sure = residual + 2.0 * sigma * sigma * fd - region.len() as f64 * sigma * sigma;
        let r = stein_free_risk(&y, region, &k, sigma).unwrap();
        assert!((sure - r.value).abs() < 1e-6 * r.value.abs().max(1.0));
    }

    #[test]
    fn sigma_rescaling_shifts_value_affinely() {
        let (_, y) = noisy(20, 18, 10.0, 7);
        let k = make_kernel(KernelParams::isotropic(1.4), 5).unwrap();
        let region = Region::new(4, 4, 10, 10); // trace = |R| h0 here
        let (s, f) = (10.0, 1.7);
        let a = stein_free_risk(&y, region, &k, s).unwrap();
        let b = stein_free_risk(&y, region, &k, f * s).unwrap();
        let expected = (2.0 * k.center_tap() - 1.0) * 100.0 * (f * f - 1.0) * s * s;
        assert!((b.value - a.value - expected).abs() < 1e-9 * expected.abs());
    }

    #[test]
    fn oracle_examples() {
        let (x, y) = noisy(18, 18, 6.0, 8);
        let delta = Kernel::delta(3).unwrap();
        let all = x.full_region();
        assert_eq!(oracle_mse(&x, &x, &delta, all).unwrap(), 0.0);
        let noise_energy: f64 = x.samples().iter().zip(y.samples()).map(|(a, b)| (a - b).powi(2)).sum();
        assert!((oracle_mse(&x, &y, &delta, all).unwrap() - noise_energy).abs() < 1e-9);
        let zero = Kernel::from_taps(3, vec![0.0; 9]).unwrap();
        let sub = Region::new(2, 3, 5, 4);
        let signal: f64 = (3..7)
            .flat_map(|py| (2..7).map(move |px| (px, py)))
            .map(|(px, py)| x.get(px, py).powi(2))
            .sum();
        assert!((oracle_mse(&x, &y, &zero, sub).unwrap() - signal).abs() < 1e-9);
        let small = Image::filled(17, 18, 0.0).unwrap();
        assert!(matches!(
            oracle_mse(&small, &y, &delta, all),
            Err(Error::DimensionMismatch(..))
        ));
    }

    #[test]
    fn invalid_inputs() {
        let (_, y) = noisy(16, 16, 5.0, 9);
        let k = Kernel::uniform(3).unwrap();
        assert!(matches!(
            stein_free_risk(&y, Region::new(10, 10, 8, 8), &k, 5.0),
            Err(Error::InvalidRegion { .. })
        ));
        assert!(matches!(
            stein_free_risk(&y, y.full_region(), &k, f64::NAN),
            Err(Error::InvalidSigma(_))
        ));
    }
}
