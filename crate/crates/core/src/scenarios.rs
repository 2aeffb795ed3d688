//! Built-in scenarios.

use crate::model::{GroupSpec, NoiseKind, OpinionDist, Persuasion, ScenarioConfig};

/// The shipped `scenarios/reference.cfg`, as text.
pub const REFERENCE_CFG: &str = include_str!("../scenarios/reference.cfg");

/// Ten thousand agents, 60% stubborn.
///
/// Stubborn: one third with `p = 0.6` and opinions uniform on `[-0.8,-0.6]`,
/// the rest with `p = 0.2` and opinions uniform on `[0.4,0.8]`. Flexible:
/// opinions uniform on `[0.3,1]`, zealotry uniform on `[0.2,1]` split into
/// 16 equal-mass bins, persuasion `p = 1 - q`. Interaction strength 0.01,
/// no noise.
pub fn reference_scenario() -> ScenarioConfig {
    let bins = 16;
    ScenarioConfig {
        stubborn_groups: vec![
            GroupSpec::stubborn(1.0 / 3.0, 0.6, OpinionDist::Uniform(-0.8, -0.6)),
            GroupSpec::stubborn(2.0 / 3.0, 0.2, OpinionDist::Uniform(0.4, 0.8)),
        ],
        flexible_groups: GroupSpec::q_binned(
            1.0,
            0.2,
            1.0,
            Persuasion::ComplementOfQ,
            OpinionDist::Uniform(0.3, 1.0),
            bins,
        ),
        alpha0: 0.6,
        gamma: 0.01,
        sigma: 0.0,
        noise: NoiseKind::Quadratic,
        n_agents: 10_000,
        tau_end: 300.0,
        record_every: 1.0,
        seed: 20240901,
        quantile_points: 1024,
        dt_meanfield: 0.01,
        flexible_q_bins: bins,
        eps0: Some(0.2),
    }
}
