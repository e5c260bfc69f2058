use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::ArgGroup;
use svgs_core::{denoise, psnr, DenoiseConfig, NoiseDistribution};

use super::{default_threads, read_image, write_image};

#[derive(clap::Args, Debug)]
#[command(group(ArgGroup::new("noise").required(true).args(["sigma", "dist"])))]
pub struct Args {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Known noise standard deviation
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Estimate the noise level assuming this distribution
    #[arg(long)]
    pub dist: Option<NoiseDistribution>,
    #[arg(long, default_value_t = 8)]
    pub block: usize,
    #[arg(long, default_value_t = 4)]
    pub apron: usize,
    /// Odd kernel side
    #[arg(long, default_value_t = 9)]
    pub kernel: usize,
    /// Worker threads (defaults to available parallelism)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the per-block parameters as CSV
    #[arg(long)]
    pub params_out: Option<PathBuf>,
    /// Clean reference; prints the output PSNR
    #[arg(long)]
    pub clean: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let noisy = read_image(&args.input)?;
    let cfg = DenoiseConfig {
        kernel_side: args.kernel,
        block: args.block,
        apron: args.apron,
        sigma: args.sigma,
        noise_dist: args.dist.unwrap_or(NoiseDistribution::Gaussian),
        workers: args.threads.unwrap_or_else(default_threads),
        ..DenoiseConfig::default()
    };
    let start = Instant::now();
    let out = denoise(&noisy, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    write_image(&out.image, &args.out)?;
    if args.sigma.is_none() {
        println!("estimated sigma: {:.4}", out.sigma);
    }
    println!("time: {elapsed:.3} s");
    if let Some(path) = &args.params_out {
        out.blocks
            .save_csv(path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.clean {
        let clean = read_image(path)?;
        println!("output PSNR: {:.2} dB", psnr(&clean, &out.image)?);
    }
    Ok(())
}
