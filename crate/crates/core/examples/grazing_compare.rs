//! Monte Carlo against the mean-field limit as the interaction strength
//! shrinks, on a smaller copy of the reference scenario.
//!
//! ```text
//! cargo run --release --example grazing_compare -- [n_agents] [out_dir]
//! ```

use std::path::PathBuf;

use opinion_kinetics::experiment::{compare, SigmaScaling};
use opinion_kinetics::scenarios::reference_scenario;

fn main() -> opinion_kinetics::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = reference_scenario();
    cfg.n_agents = args
        .next()
        .map(|s| s.parse().expect("n_agents"))
        .unwrap_or(20_000);
    cfg.tau_end = 20.0;
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("grazing_compare"));

    for scaling in [SigmaScaling::Zero, SigmaScaling::Gamma15] {
        let rows = compare(
            &cfg,
            &[0.1, 0.05, 0.02, 0.01],
            1,
            scaling,
            &out.join(format!("{scaling:?}")),
        )?;
        println!("{scaling:?} noise");
        for r in rows {
            println!(
                "  gamma {:<5} sigma {:.4}: sup W1 = {:.5}",
                r.gamma, r.sigma, r.sup_w1
            );
        }
    }
    println!("results in {}", out.display());
    Ok(())
}
