//! Exact identity checks on a scenario file, and what a corrupted matrix
//! looks like to the checker.
//!
//! ```text
//! cargo run --example verify_identities -- [scenario.cfg]
//! ```

use opinion_kinetics::experiment::{load_config, verify, verify_system};
use opinion_kinetics::meanfield::assemble;
use opinion_kinetics::scenarios::reference_scenario;

fn main() -> opinion_kinetics::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => reference_scenario(),
    };
    let report = verify(&cfg);
    print!("{}", report.render());

    let mut sys = assemble(&cfg)?;
    if sys.n_groups() > 1 {
        sys.a[1] += 1e-6;
        println!("\nafter perturbing A[0][1] by 1e-6:");
        print!("{}", verify_system(&sys).render());
    }
    Ok(())
}
