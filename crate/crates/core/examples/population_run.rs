//! Monte Carlo run of the built-in reference scenario.
//!
//! Prints the flexible-population mean, its distance to the limit and the
//! guaranteed bound every 25 time units, then writes the usual result files.
//!
//! ```text
//! cargo run --release --example population_run -- [tau_end] [out_dir]
//! ```

use std::path::PathBuf;

use opinion_kinetics::experiment::{simulate, DensityOptions};
use opinion_kinetics::limit_distribution;
use opinion_kinetics::metrics::weighted_mean_opinion;
use opinion_kinetics::scenarios::reference_scenario;
use opinion_kinetics::Subset;

fn main() -> opinion_kinetics::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = reference_scenario();
    if let Some(t) = args.next() {
        cfg.tau_end = t.parse().expect("tau_end must be a number");
    }
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("population_run"));

    let limit = limit_distribution(&cfg)?;
    let report = simulate(&cfg, &out, DensityOptions::default())?;

    println!(
        "{:>8} {:>10} {:>12} {:>12}",
        "tau", "m_t", "w1_to_limit", "bound"
    );
    for row in report.series.rows.iter().step_by(25) {
        println!(
            "{:>8.1} {:>10.5} {:>12.5} {:>12.5}",
            row.tau,
            row.m_t,
            row.w1_to_limit,
            limit.bound(row.tau)
        );
    }
    let flexible_mean = weighted_mean_opinion(report.final_state.agents(), Subset::Flexible)?;
    println!();
    println!(
        "flexible weighted mean at tau = {}: {flexible_mean:.5}",
        cfg.tau_end
    );
    println!(
        "limit opinion m00:               {:.5}",
        limit.flexible_opinion
    );
    println!(
        "{} events in {:.1} s; results in {}",
        report.final_state.n_events(),
        report.manifest.wall_clock_seconds,
        out.display()
    );
    Ok(())
}
