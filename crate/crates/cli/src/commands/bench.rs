use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use svgs_core::{corrupt, denoise, estimate_sigma, psnr, DenoiseConfig, Image, NoiseDistribution, NoiseSpec};

use super::{default_threads, read_image};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Directory of clean .pgm images
    #[arg(long)]
    pub clean_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "10,20,50,80")]
    pub sigmas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "gaussian,laplacian")]
    pub dists: Vec<NoiseDistribution>,
    /// Noise realizations per setting; seeds run from 0 to k - 1
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub block: usize,
    #[arg(long, default_value_t = 4)]
    pub apron: usize,
    #[arg(long, default_value_t = 9)]
    pub kernel: usize,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Denoise with the estimated noise level instead of the true one
    #[arg(long)]
    pub estimate_sigma: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub image: String,
    pub distribution: NoiseDistribution,
    pub sigma: f64,
    pub sigma_hat: f64,
    pub seed: u64,
    pub input_psnr: f64,
    pub output_psnr: f64,
    pub seconds: f64,
    pub block: usize,
    pub apron: usize,
    pub kernel: usize,
}

fn clean_images(dir: &Path) -> Result<Vec<(String, Image)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .pgm images in {}", dir.display());
    }
    paths
        .into_iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            Ok((name, read_image(&p)?))
        })
        .collect()
}

pub fn run(args: Args) -> Result<()> {
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let images = clean_images(&args.clean_dir)?;
    let base = DenoiseConfig {
        kernel_side: args.kernel,
        block: args.block,
        apron: args.apron,
        workers: args.threads.unwrap_or_else(default_threads),
        ..DenoiseConfig::default()
    };
    base.validate()?;

    let mut writer = csv::Writer::from_path(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    let mut records = Vec::new();
    for (name, clean) in &images {
        for &dist in &args.dists {
            for &sigma in &args.sigmas {
                for seed in 0..args.seeds {
                    let noisy = corrupt(clean, &NoiseSpec::new(dist, sigma, seed)?)?;
                    let start = Instant::now();
                    let sigma_hat = estimate_sigma(&noisy, dist)?;
                    let cfg = DenoiseConfig {
                        sigma: Some(if args.estimate_sigma { sigma_hat } else { sigma }),
                        noise_dist: dist,
                        ..base.clone()
                    };
                    let out = denoise(&noisy, &cfg)?;
                    let seconds = start.elapsed().as_secs_f64();
                    let record = BenchRecord {
                        image: name.clone(),
                        distribution: dist,
                        sigma,
                        sigma_hat,
                        seed,
                        input_psnr: psnr(clean, &noisy)?,
                        output_psnr: psnr(clean, &out.image)?,
                        seconds,
                        block: args.block,
                        apron: args.apron,
                        kernel: args.kernel,
                    };
                    writer.serialize(&record)?;
                    records.push(record);
                }
            }
        }
    }
    writer.flush()?;
    print_summary(&records);
    Ok(())
}

fn print_summary(records: &[BenchRecord]) {
    let mut groups: BTreeMap<(String, &'static str, u64), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.image.clone(), r.distribution.name(), r.sigma.to_bits()))
            .or_default()
            .push(r);
    }
    println!(
        "{:<16} {:<10} {:>7} {:>9} {:>10} {:>11} {:>9}",
        "image", "dist", "sigma", "sigma_hat", "input dB", "output dB", "time s"
    );
    for ((image, dist, _), rs) in groups {
        let n = rs.len() as f64;
        let mean = |f: fn(&BenchRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
        println!(
            "{:<16} {:<10} {:>7.2} {:>9.2} {:>10.2} {:>11.2} {:>9.2}",
            image,
            dist,
            rs[0].sigma,
            mean(|r| r.sigma_hat),
            mean(|r| r.input_psnr),
            mean(|r| r.output_psnr),
            mean(|r| r.seconds),
        );
    }
}
