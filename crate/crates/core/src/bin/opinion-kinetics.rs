use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opinion_kinetics::experiment::{
    cmd_compare, cmd_meanfield, cmd_simulate, cmd_sweep, cmd_verify, DensityOptions, SigmaScaling,
    SweepParam, DEFAULT_THRESHOLD,
};

#[derive(Parser)]
#[command(version, about = "Opinion dynamics with stubborn agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run: timeseries.csv, density_NNNN.csv, manifest.txt.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Density snapshot every N records (0 disables).
        #[arg(long, default_value_t = 10)]
        density_every: usize,
    },
    /// Mean-field solution: meanfield.csv, quantiles.csv, limit.txt.
    Meanfield {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo against mean field for shrinking gamma: grazing.csv.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value = "zero")]
        sigma_scaling: SigmaScaling,
    },
    /// Convergence time and decay rate across one parameter: sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Exact identity checks for a scenario.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            out,
            density_every,
        } => cmd_simulate(
            &config,
            &out,
            DensityOptions {
                every: density_every,
                ..DensityOptions::default()
            },
        )
        .map(|_| true),
        Command::Meanfield { config, out } => cmd_meanfield(&config, &out).map(|_| true),
        Command::Compare {
            config,
            out,
            gammas,
            seeds,
            sigma_scaling,
        } => cmd_compare(&config, &gammas, seeds, sigma_scaling, &out).map(|_| true),
        Command::Sweep {
            config,
            out,
            param,
            values,
            seeds,
            threshold,
        } => cmd_sweep(&config, param, &values, seeds, threshold, &out).map(|_| true),
        Command::Verify { config } => cmd_verify(&config).map(|report| {
            print!("{}", report.render());
            report.passed()
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
