//! Truncated oriented Gaussian kernels.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Lower bound on either spread parameter.
pub const SIGMA_MIN: f64 = 0.3;

/// Upper bound on either spread parameter for a kernel of side `side`.
#[inline]
pub fn sigma_max(side: usize) -> f64 {
    side as f64 / 2.0
}

/// Square, odd-sided filter mask. Taps are row-major with the origin at the
/// central index; offset `(dx, dy)` lives at `(dy + half) * side + dx + half`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    side: usize,
    taps: Vec<f64>,
}

impl Kernel {
    pub fn from_taps(side: usize, taps: Vec<f64>) -> Result<Self> {
        if side % 2 == 0 {
            return Err(Error::EvenKernel(side));
        }
        if taps.len() != side * side || taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidKernelParams(format!(
                "expected {} finite taps, got {}",
                side * side,
                taps.len()
            )));
        }
        Ok(Self { side, taps })
    }

    /// Identity filter: 1 at the origin, 0 elsewhere.
    pub fn delta(side: usize) -> Result<Self> {
        let mut taps = vec![0.0; side * side];
        if let Some(c) = taps.get_mut(side * side / 2) {
            *c = 1.0;
        }
        Self::from_taps(side, taps)
    }

    /// Constant mask with every tap equal to `1 / side^2`.
    pub fn uniform(side: usize) -> Result<Self> {
        Self::from_taps(side, vec![1.0 / (side * side) as f64; side * side])
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn half(&self) -> usize {
        self.side / 2
    }

    #[inline]
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Tap at signed offset `(dx, dy)` from the origin.
    #[inline]
    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        let h = self.half() as isize;
        self.taps[((dy + h) as usize) * self.side + (dx + h) as usize]
    }

    /// The tap at the spatial origin (`h0`).
    #[inline]
    pub fn center_tap(&self) -> f64 {
        self.taps[self.taps.len() / 2]
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }
}

/// Spread and orientation of an oriented Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Spread along the rotated x axis, in pixels.
    pub sigma_x: f64,
    /// Spread along the rotated y axis, in pixels.
    pub sigma_y: f64,
    /// Orientation in radians, in `[-pi/2, pi/2)`.
    pub theta: f64,
}

impl KernelParams {
    pub fn new(sigma_x: f64, sigma_y: f64, theta: f64) -> Self {
        Self {
            sigma_x,
            sigma_y,
            theta: wrap_half_turn(theta),
        }
    }

    pub fn isotropic(sigma: f64) -> Self {
        Self::new(sigma, sigma, 0.0)
    }

    pub fn validate(&self, side: usize) -> Result<()> {
        let hi = sigma_max(side);
        // tolerate rounding at the box faces produced by exp(ln(bound))
        let eps = 1e-9;
        let ok = |s: f64| s.is_finite() && s >= SIGMA_MIN - eps && s <= hi + eps;
        if !ok(self.sigma_x) || !ok(self.sigma_y) || !self.theta.is_finite() {
            return Err(Error::InvalidKernelParams(format!(
                "sigma_x={}, sigma_y={}, theta={} outside [{SIGMA_MIN}, {hi}]",
                self.sigma_x, self.sigma_y, self.theta
            )));
        }
        Ok(())
    }
}

/// Maps an angle onto `[-pi/2, pi/2)`; orientations are defined modulo pi.
pub fn wrap_half_turn(theta: f64) -> f64 {
    let w = (theta + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if w >= FRAC_PI_2 {
        w - PI
    } else {
        w
    }
}

/// Builds the normalized truncated Gaussian
/// `exp(-(x_t^2 / sx^2 + y_t^2 / sy^2) / 2)` on the integer grid
/// `[-side/2, side/2]^2`, where `(x_t, y_t)` are the offsets rotated by `theta`.
pub fn make_kernel(params: KernelParams, side: usize) -> Result<Kernel> {
    if side % 2 == 0 {
        return Err(Error::EvenKernel(side));
    }
    params.validate(side)?;
    Ok(gaussian_taps(params.sigma_x, params.sigma_y, params.theta, side))
}

pub(crate) fn gaussian_taps(sigma_x: f64, sigma_y: f64, theta: f64, side: usize) -> Kernel {
    let half = (side / 2) as isize;
    let (sin, cos) = theta.sin_cos();
    let ax = 0.5 / (sigma_x * sigma_x);
    let ay = 0.5 / (sigma_y * sigma_y);
    let mut taps = Vec::with_capacity(side * side);
    for dy in -half..=half {
        for dx in -half..=half {
            let (x, y) = (dx as f64, dy as f64);
            let xt = x * cos + y * sin;
            let yt = -x * sin + y * cos;
            taps.push((-(ax * xt * xt + ay * yt * yt)).exp());
        }
    }
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    Kernel { side, taps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs_diff(a: &Kernel, b: &Kernel) -> f64 {
        a.taps()
            .iter()
            .zip(b.taps())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn delta_and_uniform() {
        let d = Kernel::delta(5).unwrap();
        assert_eq!(d.center_tap(), 1.0);
        assert_eq!(d.sum(), 1.0);
        let u = Kernel::uniform(3).unwrap();
        assert!((u.center_tap() - 1.0 / 9.0).abs() < 1e-15);
        assert!(matches!(Kernel::delta(4), Err(Error::EvenKernel(4))));
    }

    #[test]
    fn rejects_out_of_bounds_params() {
        assert!(make_kernel(KernelParams::isotropic(0.1), 9).is_err());
        assert!(make_kernel(KernelParams::isotropic(4.6), 9).is_err());
        assert!(make_kernel(KernelParams::new(1.0, f64::NAN, 0.0), 9).is_err());
        assert!(make_kernel(KernelParams::isotropic(1.0), 8).is_err());
        assert!(make_kernel(KernelParams::isotropic(4.5), 9).is_ok());
    }

    #[test]
    fn wraps_orientation() {
        assert!((wrap_half_turn(FRAC_PI_2) + FRAC_PI_2).abs() < 1e-15);
        assert!((wrap_half_turn(3.0 * PI / 4.0) + PI / 4.0).abs() < 1e-12);
        assert_eq!(wrap_half_turn(0.25), 0.25);
        assert!((wrap_half_turn(-FRAC_PI_2) + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn elongated_along_theta() {
        // sigma_x > sigma_y with theta = 0 spreads mass along the column offset axis
        let k = make_kernel(KernelParams::new(3.0, 0.5, 0.0), 9).unwrap();
        assert!(k.at(2, 0) > k.at(0, 2));
        let r = make_kernel(KernelParams::new(3.0, 0.5, FRAC_PI_2 - 1e-12), 9).unwrap();
        assert!(r.at(0, 2) > r.at(2, 0));
    }

    proptest! {
        #[test]
        fn isotropic_ignores_theta(s in 0.3f64..4.5, theta in -1.5f64..1.5) {
            let a = make_kernel(KernelParams::new(s, s, theta), 9).unwrap();
            let b = make_kernel(KernelParams::new(s, s, 0.0), 9).unwrap();
            prop_assert!(max_abs_diff(&a, &b) < 1e-12);
        }

        #[test]
        fn quarter_turn_swaps_axes(sx in 0.3f64..4.5, sy in 0.3f64..4.5, theta in -1.5f64..1.5) {
            let a = make_kernel(KernelParams::new(sx, sy, theta), 9).unwrap();
            let b = make_kernel(KernelParams::new(sy, sx, theta + FRAC_PI_2), 9).unwrap();
            prop_assert!(max_abs_diff(&a, &b) < 1e-12);
        }

        #[test]
        fn normalized_positive_point_symmetric(
            sx in 0.3f64..4.5, sy in 0.3f64..4.5, theta in -1.57f64..1.57, half in 1usize..6
        ) {
            let side = 2 * half + 1;
            let k = gaussian_taps(sx, sy, theta, side);
            prop_assert!((k.sum() - 1.0).abs() < 1e-12);
            prop_assert!(k.taps().iter().all(|&t| t > 0.0));
            let h = half as isize;
            for dy in -h..=h {
                for dx in -h..=h {
                    prop_assert_eq!(k.at(dx, dy), k.at(-dx, -dy));
                }
            }
            prop_assert_eq!(k.center_tap(), k.at(0, 0));
        }
    }
}
