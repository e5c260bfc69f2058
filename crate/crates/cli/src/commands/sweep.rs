use std::fs::File;
use std::path::PathBuf;

use anyhow::{Context, Result};
use svgs_core::sweep::{argmin_by, write_sweep_csv};
use svgs_core::{risk_curve, SweepRange};

use super::read_image;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    pub clean: PathBuf,
    #[arg(long)]
    pub noisy: PathBuf,
    /// Noise standard deviation used by the estimator
    #[arg(long)]
    pub sigma: f64,
    /// Isotropic widths as lo:hi:step
    #[arg(long)]
    pub range: SweepRange,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 9)]
    pub kernel: usize,
}

pub fn run(args: Args) -> Result<()> {
    let clean = read_image(&args.clean)?;
    let noisy = read_image(&args.noisy)?;
    let rows = risk_curve(&clean, &noisy, args.sigma, args.range, args.kernel)?;
    let file = File::create(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    write_sweep_csv(&rows, file)?;
    if let (Some(est), Some(act)) = (
        argmin_by(&rows, |r| r.estimated_risk),
        argmin_by(&rows, |r| r.full_oracle_cost),
    ) {
        println!("argmin estimated: {est:.4}");
        println!("argmin actual:    {act:.4}");
    }
    Ok(())
}
