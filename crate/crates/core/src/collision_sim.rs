//! Kinetic Monte Carlo engine for the binary-collision dynamics.
//!
//! Every event picks one unordered pair of distinct agents uniformly at random
//! and applies [`interact`] to it. The kinetic clock advances by `2/N` per
//! event, so each agent takes part in one collision per unit of `t` on
//! average, and the rescaled clock is `tau = gamma * t`.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metrics::{observe, TimeSeries};
use crate::model::{interact, scenario_stats, Agent, NoiseKind, ScenarioConfig};

pub type SimRng = ChaCha8Rng;

/// Attempts at drawing an admissible noise pair before falling back to zero noise.
pub const MAX_NOISE_ATTEMPTS: usize = 100;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Stubborn,
    Flexible,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Stubborn => "stubborn",
            GroupKind::Flexible => "flexible",
        }
    }
}

/// Contiguous block of agents sampled from one [`crate::model::GroupSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupLayout {
    pub kind: GroupKind,
    /// Index within the stubborn or flexible group list.
    pub index: usize,
    pub start: usize,
    pub len: usize,
}

impl GroupLayout {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

/// Which agents a measurement looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    All,
    Flexible,
    Stubborn,
}

impl Subset {
    #[inline]
    pub fn contains(self, agent: &Agent) -> bool {
        match self {
            Subset::All => true,
            Subset::Flexible => !agent.is_stubborn(),
            Subset::Stubborn => agent.is_stubborn(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Subset::All => "all",
            Subset::Flexible => "flexible",
            Subset::Stubborn => "stubborn",
        }
    }
}

/// Interaction parameters shared by every event of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub gamma: f64,
    pub sigma: f64,
    pub noise: NoiseKind,
}

impl Dynamics {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Dynamics {
            gamma: cfg.gamma,
            sigma: cfg.sigma,
            noise: cfg.noise,
        }
    }
}

/// Evolving empirical measure of the population.
#[derive(Debug, Clone)]
pub struct PopulationState {
    agents: Vec<Agent>,
    groups: Vec<GroupLayout>,
    dynamics: Dynamics,
    rng: SimRng,
    n_events: u64,
    noise_resamples: u64,
    noise_fallbacks: u64,
}

impl PopulationState {
    pub fn with_layout(
        agents: Vec<Agent>,
        groups: Vec<GroupLayout>,
        dynamics: Dynamics,
        rng: SimRng,
    ) -> Self {
        assert!(agents.len() >= 2, "a population needs at least two agents");
        debug_assert_eq!(groups.iter().map(|g| g.len).sum::<usize>(), agents.len());
        PopulationState {
            agents,
            groups,
            dynamics,
            rng,
            n_events: 0,
            noise_resamples: 0,
            noise_fallbacks: 0,
        }
    }

    /// Builds a state from explicit agents. Consecutive agents with equal
    /// `(p, q)` form one group.
    pub fn from_agents(agents: Vec<Agent>, dynamics: Dynamics, seed: u64) -> Self {
        let mut groups: Vec<GroupLayout> = Vec::new();
        let (mut n_stubborn, mut n_flexible) = (0, 0);
        for (i, a) in agents.iter().enumerate() {
            let same = i > 0 && {
                let prev = &agents[i - 1];
                prev.p == a.p && prev.q == a.q
            };
            if same {
                groups.last_mut().unwrap().len += 1;
                continue;
            }
            let kind = if a.is_stubborn() {
                GroupKind::Stubborn
            } else {
                GroupKind::Flexible
            };
            let counter = match kind {
                GroupKind::Stubborn => &mut n_stubborn,
                GroupKind::Flexible => &mut n_flexible,
            };
            groups.push(GroupLayout {
                kind,
                index: *counter,
                start: i,
                len: 1,
            });
            *counter += 1;
        }
        Self::with_layout(agents, groups, dynamics, SimRng::seed_from_u64(seed))
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn groups(&self) -> &[GroupLayout] {
        &self.groups
    }

    pub fn flexible_groups(&self) -> impl Iterator<Item = &GroupLayout> {
        self.groups.iter().filter(|g| g.kind == GroupKind::Flexible)
    }

    pub fn group_agents(&self, group: &GroupLayout) -> &[Agent] {
        &self.agents[group.range()]
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    pub fn n_events(&self) -> u64 {
        self.n_events
    }

    /// Noise pairs redrawn because a tentative opinion left `[-1,1]`.
    pub fn noise_resamples(&self) -> u64 {
        self.noise_resamples
    }

    /// Events that exhausted [`MAX_NOISE_ATTEMPTS`] and ran noise-free.
    pub fn noise_fallbacks(&self) -> u64 {
        self.noise_fallbacks
    }

    /// Kinetic time increment per event.
    pub fn dt_per_event(&self) -> f64 {
        2.0 / self.agents.len() as f64
    }

    /// Kinetic time.
    pub fn t(&self) -> f64 {
        self.n_events as f64 * self.dt_per_event()
    }

    /// Rescaled time `gamma * t`.
    pub fn tau(&self) -> f64 {
        self.dynamics.gamma * self.t()
    }

    /// Executes one random binary collision.
    pub fn step_event(&mut self) {
        let n = self.agents.len();
        let i = self.rng.random_range(0..n);
        let mut j = self.rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (self.agents[i], self.agents[j]);
        let Dynamics {
            gamma,
            sigma,
            noise,
        } = self.dynamics;

        let (wa, wb) = if sigma == 0.0 {
            interact(&a, &b, gamma, 0.0, 0.0, noise)
        } else {
            self.noisy_update(&a, &b)
        };
        debug_assert!((-1.0..=1.0).contains(&wa) && (-1.0..=1.0).contains(&wb));
        self.agents[i].w = wa;
        self.agents[j].w = wb;
        self.n_events += 1;
    }

    fn noisy_update(&mut self, a: &Agent, b: &Agent) -> (f64, f64) {
        let Dynamics {
            gamma,
            sigma,
            noise,
        } = self.dynamics;
        for _ in 0..MAX_NOISE_ATTEMPTS {
            let eta_a = sigma * self.draw_unit_noise();
            let eta_b = sigma * self.draw_unit_noise();
            let (wa, wb) = interact(a, b, gamma, eta_a, eta_b, noise);
            if wa.abs() <= 1.0 && wb.abs() <= 1.0 {
                return (wa, wb);
            }
            self.noise_resamples += 1;
        }
        self.noise_fallbacks += 1;
        let (wa, wb) = interact(a, b, gamma, 0.0, 0.0, noise);
        (wa.clamp(-1.0, 1.0), wb.clamp(-1.0, 1.0))
    }

    /// `Y ~ Uniform[-sqrt 3, sqrt 3]`: symmetric, unit variance, bounded.
    #[inline]
    fn draw_unit_noise(&mut self) -> f64 {
        (2.0 * self.rng.random::<f64>() - 1.0) * SQRT_3
    }

    /// Runs events until `tau() >= tau_end`.
    pub fn advance_to(&mut self, tau_end: f64) {
        while self.tau() < tau_end {
            self.step_event();
        }
    }

    /// Sorted multiset of `(p, q)` bit patterns; invariant under the dynamics.
    pub fn parameter_fingerprint(&self) -> Vec<(u64, u64)> {
        let mut v: Vec<_> = self
            .agents
            .iter()
            .map(|a| (a.p.to_bits(), a.q.to_bits()))
            .collect();
        v.sort_unstable();
        v
    }
}

/// Runs the event loop to `cfg.tau_end`, recording observables every
/// `cfg.record_every` units of `tau` (first record at `tau = 0`).
///
/// `recorder` sees each recorded snapshot after its row is appended.
pub fn run<F>(
    mut state: PopulationState,
    cfg: &ScenarioConfig,
    mut recorder: F,
) -> (PopulationState, TimeSeries)
where
    F: FnMut(&PopulationState),
{
    let m00 = scenario_stats(cfg).m00;
    let every = cfg.record_every;
    let slack = 1e-9 * every;
    let last_k = ((cfg.tau_end + slack) / every).floor() as u64;
    let n_flexible = state.flexible_groups().count();
    let mut series = TimeSeries::new(n_flexible);
    let mut next_k: u64 = 0;

    loop {
        let tau = state.tau();
        if next_k <= last_k && tau >= next_k as f64 * every - slack {
            series.push(observe(&state, m00));
            recorder(&state);
            while next_k <= last_k && next_k as f64 * every - slack <= tau {
                next_k += 1;
            }
        }
        if tau >= cfg.tau_end && next_k > last_k {
            break;
        }
        state.step_event();
    }
    (state, series)
}

/// Mass histogram over `[-1,1] x [0,1]` in the `(w, q)` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub n_w: usize,
    pub n_q: usize,
    pub subset: Subset,
    /// Row-major, `mass[iw * n_q + iq]`.
    pub mass: Vec<f64>,
}

impl DensityGrid {
    pub fn at(&self, iw: usize, iq: usize) -> f64 {
        self.mass[iw * self.n_q + iq]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass per opinion bin, summed over `q`.
    pub fn w_marginal(&self) -> Vec<f64> {
        self.mass
            .chunks(self.n_q)
            .map(|row| row.iter().sum())
            .collect()
    }
}

#[inline]
fn bin_index(x: f64, lo: f64, hi: f64, n: usize) -> usize {
    let k = ((x - lo) / (hi - lo) * n as f64).floor();
    (k.max(0.0) as usize).min(n - 1)
}

/// Bins are left-closed except the last, which also takes the right edge.
/// Each agent adds `1/N`, so the grid sums to the subset's population share.
pub fn density_grid(
    state: &PopulationState,
    n_w: usize,
    n_q: usize,
    subset: Subset,
) -> DensityGrid {
    assert!(n_w >= 1 && n_q >= 1, "grid needs at least one bin per axis");
    let mut mass = vec![0.0; n_w * n_q];
    let unit = 1.0 / state.agents.len() as f64;
    for a in state.agents.iter().filter(|a| subset.contains(a)) {
        let iw = bin_index(a.w, -1.0, 1.0, n_w);
        let iq = bin_index(a.q, 0.0, 1.0, n_q);
        mass[iw * n_q + iq] += unit;
    }
    DensityGrid {
        n_w,
        n_q,
        subset,
        mass,
    }
}
