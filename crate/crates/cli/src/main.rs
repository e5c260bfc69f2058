//! `svgs`: noise synthesis, noise estimation, risk-driven denoising, risk
//! curves and benchmark tables for 8-bit grayscale PGM images.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "svgs", version, about = "Risk-driven spatially-varying Gaussian denoising")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Add seeded Gaussian or Laplacian noise to a clean image
    AddNoise(commands::add_noise::Args),
    /// Estimate the noise standard deviation of a noisy image
    EstimateNoise(commands::estimate_noise::Args),
    /// Denoise an image with per-block risk-optimized Gaussian kernels
    Denoise(commands::denoise::Args),
    /// Tabulate estimated and actual cost for isotropic Gaussian widths
    Sweep(commands::sweep::Args),
    /// Run the denoiser over a directory of clean images and noise settings
    Bench(commands::bench::Args),
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    let result = match cli.command {
        Command::AddNoise(args) => commands::add_noise::run(args),
        Command::EstimateNoise(args) => commands::estimate_noise::run(args),
        Command::Denoise(args) => commands::denoise::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Bench(args) => commands::bench::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
