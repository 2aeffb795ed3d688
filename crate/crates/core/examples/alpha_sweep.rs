//! Convergence time and fitted decay rate as the stubborn fraction grows.
//!
//! ```text
//! cargo run --release --example alpha_sweep -- [seeds] [out_dir]
//! ```

use std::path::PathBuf;

use opinion_kinetics::experiment::{sweep, SweepParam, DEFAULT_THRESHOLD};
use opinion_kinetics::scenarios::reference_scenario;

fn main() -> opinion_kinetics::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds = args.next().map(|s| s.parse().expect("seeds")).unwrap_or(2);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("alpha_sweep"));
    let cfg = reference_scenario();
    let rows = sweep(
        &cfg,
        SweepParam::Alpha0,
        &[0.2, 0.4, 0.6, 0.8],
        seeds,
        DEFAULT_THRESHOLD,
        &out,
    )?;

    println!(
        "{:>7} {:>10} {:>9} {:>12} {:>12}",
        "alpha0", "seed", "tau*", "fitted", "guaranteed"
    );
    for r in rows {
        println!(
            "{:>7} {:>10} {:>9} {:>12.4} {:>12.4}",
            r.value, r.seed, r.tau_star, r.fitted_rate, r.guaranteed_rate
        );
    }
    println!("results in {}", out.display());
    Ok(())
}
