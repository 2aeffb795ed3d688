//! Deterministic small-interaction limit of the reference scenario: group
//! means, quantile transport and the guaranteed decay bound.
//!
//! ```text
//! cargo run --release --example meanfield_limit -- [out_dir]
//! ```

use std::path::PathBuf;

use opinion_kinetics::experiment::meanfield;
use opinion_kinetics::scenarios::reference_scenario;

fn main() -> opinion_kinetics::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("meanfield_limit"));
    let cfg = reference_scenario();
    let report = meanfield(&cfg, &out)?;
    let sys = &report.system;

    println!("{} flexible groups, m00 = {:.6}", sys.n_groups(), sys.m00);
    println!(
        "guaranteed rate eps0 alpha0 <p>_0 = {:.4}",
        sys.guaranteed_rate().unwrap_or(0.0)
    );
    println!();
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "t", "m_t", "M_first", "M_last", "bound"
    );
    let n = sys.n_groups();
    for k in (0..report.times.len()).step_by(25) {
        println!(
            "{:>6.0} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            report.times[k],
            report.m_t[k],
            report.means[k][0],
            report.means[k][n - 1],
            report.bound[k]
        );
    }
    println!();
    for (i, p) in report.final_profiles.iter().enumerate().step_by(5) {
        println!(
            "group {:>2} (q = {:.3}): quantile diameter {:.2e} at t = {}",
            i + 1,
            sys.q[i],
            p.diameter(),
            cfg.tau_end
        );
    }
    println!("results in {}", out.display());
    Ok(())
}
