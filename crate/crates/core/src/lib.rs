//! Kinetic opinion dynamics with stubborn agents.
//!
//! Agents carry an opinion `w` in `[-1, 1]`, a persuasion `p` and a
//! zealotry `q`; agents with `q = 0` never move. Pairs meet at random and
//! move toward each other's opinion in proportion to the partner's
//! persuasion. The crate provides:
//!
//! * [`collision_sim`]: the Monte Carlo particle engine,
//! * [`meanfield`]: the deterministic small-interaction limit (group means
//!   and quantile transport) and the long-time limit,
//! * [`metrics`]: one-dimensional Wasserstein distances and decay fits,
//! * [`experiment`]: scenario files, result files and the experiment drivers.

pub mod collision_sim;
pub mod error;
pub mod experiment;
pub mod meanfield;
pub mod metrics;
pub mod model;
pub mod scenarios;

pub use collision_sim::{run, PopulationState, SimRng, Subset};
pub use error::{Error, Result};
pub use meanfield::{assemble, limit_distribution, MeanFieldSystem};
pub use metrics::{w1, WeightedSample1D};
pub use model::{interact, Agent, GroupSpec, NoiseKind, OpinionDist, ScenarioConfig};
