//! Risk curves for isotropic Gaussian smoothing: the estimated risk next to
//! the realized error over a range of filter widths.

use std::io;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::{make_kernel, KernelParams};
use crate::risk::{oracle_mse, stein_free_risk};

/// Inclusive arithmetic range written `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && lo <= hi) {
            return Err(Error::InvalidConfig(format!("malformed range {lo}:{hi}:{step}")));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl FromStr for SweepRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidConfig(format!("malformed range {s:?}, expected lo:hi:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(nums[0], nums[1], nums[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma_f: f64,
    pub estimated_risk: f64,
    /// `full_oracle_cost - ||x||^2`.
    pub oracle_cost_minus_norm_x: f64,
    /// `||x - H y||^2`.
    pub full_oracle_cost: f64,
}

/// Evaluates both costs for isotropic kernels of every width in `range`.
pub fn risk_curve(clean: &Image, noisy: &Image, sigma: f64, range: SweepRange, side: usize) -> Result<Vec<SweepRow>> {
    clean.ensure_same_dims(noisy)?;
    let norm_x: f64 = clean.samples().iter().map(|v| v * v).sum();
    let region = noisy.full_region();
    range
        .values()
        .into_par_iter()
        .map(|sigma_f| {
            let kernel = make_kernel(KernelParams::isotropic(sigma_f), side)?;
            let est = stein_free_risk(noisy, region, &kernel, sigma)?;
            let full = oracle_mse(clean, noisy, &kernel, region)?;
            Ok(SweepRow {
                sigma_f,
                estimated_risk: est.value,
                oracle_cost_minus_norm_x: full - norm_x,
                full_oracle_cost: full,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: io::Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for r in rows {
        csv.serialize(r)?;
    }
    csv.flush()?;
    Ok(())
}

/// Width minimizing `cost`; the first one on ties.
pub fn argmin_by(rows: &[SweepRow], cost: impl Fn(&SweepRow) -> f64) -> Option<f64> {
    rows.iter()
        .fold(None::<(f64, f64)>, |best, r| match best {
            Some((_, v)) if v <= cost(r) => best,
            _ => Some((r.sigma_f, cost(r))),
        })
        .map(|(s, _)| s)
}
