//! Domain types, scenario description and the binary interaction rule.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};

use crate::collision_sim::{Dynamics, GroupKind, GroupLayout, PopulationState, SimRng};
use crate::error::{Error, Result};

/// Tolerance for "weights sum to one".
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// One member of the population: opinion `w`, persuasion `p`, zealotry `q`.
///
/// Only `w` changes during interactions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub w: f64,
    pub p: f64,
    pub q: f64,
}

impl Agent {
    pub fn new(w: f64, p: f64, q: f64) -> Self {
        debug_assert!((-1.0..=1.0).contains(&w), "opinion {w} outside [-1,1]");
        debug_assert!((0.0..=1.0).contains(&p), "persuasion {p} outside [0,1]");
        debug_assert!((0.0..=1.0).contains(&q), "zealotry {q} outside [0,1]");
        Agent { w, p, q }
    }

    #[inline]
    pub fn is_stubborn(&self) -> bool {
        self.q == 0.0
    }
}

/// Shape of the noise amplitude `D(|w|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    /// `1 - w^2`
    #[default]
    Quadratic,
    /// `1 - |w|`
    Linear,
    /// `sqrt(1 - w^2)`
    SqrtQuad,
}

impl NoiseKind {
    #[inline]
    pub fn amplitude(self, w: f64) -> f64 {
        match self {
            NoiseKind::Quadratic => 1.0 - w * w,
            NoiseKind::Linear => 1.0 - w.abs(),
            NoiseKind::SqrtQuad => (1.0 - w * w).max(0.0).sqrt(),
        }
    }

    /// Largest `|eta|` for which no update can leave `[-1,1]`, if the kind has one.
    pub fn noise_support_bound(self, gamma: f64) -> Option<f64> {
        match self {
            NoiseKind::Linear => Some(1.0 - gamma),
            NoiseKind::Quadratic => Some((1.0 - gamma) / 2.0),
            NoiseKind::SqrtQuad => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Quadratic => "quadratic",
            NoiseKind::Linear => "linear",
            NoiseKind::SqrtQuad => "sqrtquad",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quadratic" => Ok(NoiseKind::Quadratic),
            "linear" => Ok(NoiseKind::Linear),
            "sqrtquad" => Ok(NoiseKind::SqrtQuad),
            other => Err(format!(
                "unknown noise kind '{other}' (expected quadratic|linear|sqrtquad)"
            )),
        }
    }
}

/// Initial opinion law of a group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpinionDist {
    Point(f64),
    Uniform(f64, f64),
}

impl OpinionDist {
    pub fn mean(&self) -> f64 {
        match *self {
            OpinionDist::Point(a) => a,
            OpinionDist::Uniform(a, b) => 0.5 * (a + b),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            OpinionDist::Point(a) => a,
            OpinionDist::Uniform(a, b) => a + (b - a) * rng.random::<f64>(),
        }
    }

    /// Generalized inverse CDF at `r` in `(0, 1]`.
    pub fn quantile(&self, r: f64) -> f64 {
        match *self {
            OpinionDist::Point(a) => a,
            OpinionDist::Uniform(a, b) => a + r * (b - a),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let (a, b) = match *self {
            OpinionDist::Point(a) => (a, a),
            OpinionDist::Uniform(a, b) => (a, b),
        };
        if !(a.is_finite() && b.is_finite()) || a < -1.0 || b > 1.0 || a > b {
            return Err(format!("opinion law {self} must satisfy -1 <= a <= b <= 1"));
        }
        Ok(())
    }
}

impl fmt::Display for OpinionDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OpinionDist::Point(a) => write!(f, "point({a:?})"),
            OpinionDist::Uniform(a, b) => write!(f, "uniform({a:?},{b:?})"),
        }
    }
}

impl FromStr for OpinionDist {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| format!("malformed opinion law '{s}'"))?;
        if !s.ends_with(')') {
            return Err(format!("malformed opinion law '{s}'"));
        }
        let head = s[..open].trim().to_ascii_lowercase();
        let args: Vec<f64> = s[open + 1..s.len() - 1]
            .split(',')
            .map(parse_number)
            .collect::<std::result::Result<_, _>>()?;
        let dist = match (head.as_str(), args.as_slice()) {
            ("point", [a]) => OpinionDist::Point(*a),
            ("uniform", [a, b]) => OpinionDist::Uniform(*a, *b),
            _ => return Err(format!("malformed opinion law '{s}'")),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Parses a decimal number or a simple fraction such as `1/3`.
pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad number '{s}'"))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad number '{s}'"))?;
            num / den
        }
        None => s.parse().map_err(|_| format!("bad number '{s}'"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("bad number '{s}'"))
    }
}

/// A homogeneous subpopulation sharing `(p, q)` and an initial opinion law.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub weight: f64,
    pub p: f64,
    pub q: f64,
    pub w0: OpinionDist,
}

impl GroupSpec {
    pub fn new(weight: f64, p: f64, q: f64, w0: OpinionDist) -> Self {
        GroupSpec { weight, p, q, w0 }
    }

    pub fn stubborn(weight: f64, p: f64, w0: OpinionDist) -> Self {
        GroupSpec::new(weight, p, 0.0, w0)
    }

    /// Discretizes a flexible block whose zealotry is uniform on `[q_lo, q_hi]`
    /// into `bins` equal-mass groups placed at the bin midpoints.
    pub fn q_binned(
        weight: f64,
        q_lo: f64,
        q_hi: f64,
        persuasion: Persuasion,
        w0: OpinionDist,
        bins: usize,
    ) -> Vec<GroupSpec> {
        let width = (q_hi - q_lo) / bins as f64;
        (0..bins)
            .map(|k| {
                let q = q_lo + (k as f64 + 0.5) * width;
                GroupSpec::new(weight / bins as f64, persuasion.value(q), q, w0)
            })
            .collect()
    }
}

/// How a binned flexible block assigns persuasion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Persuasion {
    Fixed(f64),
    /// `p = 1 - q`
    ComplementOfQ,
}

impl Persuasion {
    pub fn value(self, q: f64) -> f64 {
        match self {
            Persuasion::Fixed(p) => p,
            Persuasion::ComplementOfQ => 1.0 - q,
        }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub stubborn_groups: Vec<GroupSpec>,
    pub flexible_groups: Vec<GroupSpec>,
    pub alpha0: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub noise: NoiseKind,
    pub n_agents: usize,
    pub tau_end: f64,
    pub record_every: f64,
    pub seed: u64,
    pub quantile_points: usize,
    pub dt_meanfield: f64,
    /// Number of equal-mass bins used when a flexible section declares a
    /// continuous zealotry range. Groups stored here are already binned.
    pub flexible_q_bins: usize,
    /// Optional declared lower bound on flexible zealotry.
    pub eps0: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            stubborn_groups: Vec::new(),
            flexible_groups: Vec::new(),
            alpha0: 0.0,
            gamma: 0.01,
            sigma: 0.0,
            noise: NoiseKind::Quadratic,
            n_agents: 2,
            tau_end: 0.0,
            record_every: 1.0,
            seed: 0,
            quantile_points: 1024,
            dt_meanfield: 0.01,
            flexible_q_bins: 16,
            eps0: None,
        }
    }
}

fn check_weights(groups: &[GroupSpec], kind: &str) -> std::result::Result<(), String> {
    let total: f64 = groups.iter().map(|g| g.weight).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(format!("{kind} group weights sum to {total}, expected 1"));
    }
    Ok(())
}

fn check_group(g: &GroupSpec, kind: &str, index: usize) -> std::result::Result<(), String> {
    if !(g.weight > 0.0 && g.weight <= 1.0) {
        return Err(format!(
            "{kind} group {index}: weight {} out of (0,1]",
            g.weight
        ));
    }
    if !(0.0..=1.0).contains(&g.p) {
        return Err(format!("{kind} group {index}: p {} out of [0,1]", g.p));
    }
    if !(0.0..=1.0).contains(&g.q) {
        return Err(format!("{kind} group {index}: q {} out of [0,1]", g.q));
    }
    g.w0.validate()
        .map_err(|e| format!("{kind} group {index}: {e}"))
}

impl ScenarioConfig {
    /// Checks every cross-field invariant. Messages are plain text; the
    /// config parser attaches line numbers where it can.
    pub fn check(&self) -> std::result::Result<(), String> {
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return Err("gamma out of (0,0.5)".into());
        }
        if !(0.0..=1.0).contains(&self.alpha0) {
            return Err(format!("alpha0 {} out of [0,1]", self.alpha0));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(format!("sigma {} must be >= 0", self.sigma));
        }
        if self.n_agents < 2 {
            return Err(format!("n_agents {} must be >= 2", self.n_agents));
        }
        if !(self.tau_end >= 0.0 && self.tau_end.is_finite()) {
            return Err(format!("tau_end {} must be >= 0", self.tau_end));
        }
        if !(self.record_every > 0.0 && self.record_every.is_finite()) {
            return Err(format!("record_every {} must be > 0", self.record_every));
        }
        if self.quantile_points < 2 {
            return Err(format!(
                "quantile_points {} must be >= 2",
                self.quantile_points
            ));
        }
        if !(self.dt_meanfield > 0.0 && self.dt_meanfield.is_finite()) {
            return Err(format!("dt_meanfield {} must be > 0", self.dt_meanfield));
        }
        if self.flexible_q_bins < 1 {
            return Err("flexible_q_bins must be >= 1".into());
        }
        for (i, g) in self.stubborn_groups.iter().enumerate() {
            check_group(g, "stubborn", i + 1)?;
            if g.q != 0.0 {
                return Err(format!(
                    "stubborn group {}: q must be 0, got {}",
                    i + 1,
                    g.q
                ));
            }
        }
        for (i, g) in self.flexible_groups.iter().enumerate() {
            check_group(g, "flexible", i + 1)?;
            if g.q <= 0.0 {
                return Err(format!("flexible group {}: q must be > 0", i + 1));
            }
            if let Some(eps0) = self.eps0 {
                if g.q < eps0 {
                    return Err(format!(
                        "flexible group {}: q {} below declared eps0 {}",
                        i + 1,
                        g.q,
                        eps0
                    ));
                }
            }
        }
        if self.alpha0 > 0.0 {
            if self.stubborn_groups.is_empty() {
                return Err("alpha0 > 0 but no [stubborn] groups".into());
            }
            check_weights(&self.stubborn_groups, "stubborn")?;
        }
        if self.alpha0 < 1.0 {
            if self.flexible_groups.is_empty() {
                return Err("alpha0 < 1 but no [flexible] groups".into());
            }
            check_weights(&self.flexible_groups, "flexible")?;
        }
        if self.sigma > 0.0 {
            if let Some(bound) = self.noise.noise_support_bound(self.gamma) {
                let support = self.sigma * 3f64.sqrt();
                if support > bound + 1e-12 {
                    return Err(format!(
                        "sigma {} not admissible for {} noise: sigma*sqrt(3) = {} exceeds {}",
                        self.sigma, self.noise, support, bound
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(Error::InvalidConfig)
    }

    /// Minimum zealotry among flexible groups.
    pub fn eps0(&self) -> Option<f64> {
        self.flexible_groups
            .iter()
            .map(|g| g.q)
            .min_by(|a, b| a.total_cmp(b))
    }
}

/// One binary encounter. Returns the post-interaction opinions of `a` and `b`.
///
/// No clamping: keeping the result inside `[-1,1]` is the caller's job.
#[inline]
pub fn interact(
    a: &Agent,
    b: &Agent,
    gamma: f64,
    eta_a: f64,
    eta_b: f64,
    noise: NoiseKind,
) -> (f64, f64) {
    let wa = a.w + gamma * a.q * b.p * (b.w - a.w) + eta_a * a.q * noise.amplitude(a.w);
    let wb = b.w + gamma * b.q * a.p * (a.w - b.w) + eta_b * b.q * noise.amplitude(b.w);
    (wa, wb)
}

/// Splits `total` items across `weights` by largest-remainder rounding.
/// Ties are broken by index.
pub fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    if weights.is_empty() {
        return Vec::new();
    }
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = exact[i] - exact[i].floor();
        let rj = exact[j] - exact[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Samples the initial population described by `cfg`.
///
/// Agents are laid out contiguously: stubborn groups first, then flexible
/// groups, each in declaration order.
pub fn build_population(cfg: &ScenarioConfig, mut rng: SimRng) -> Result<PopulationState> {
    cfg.validate()?;
    let n = cfg.n_agents;
    let n_stubborn = ((cfg.alpha0 * n as f64).round() as usize).min(n);
    let n_flexible = n - n_stubborn;

    let mut agents = Vec::with_capacity(n);
    let mut groups = Vec::new();
    let plan = [
        (
            GroupKind::Stubborn,
            &cfg.stubborn_groups,
            n_stubborn,
            cfg.alpha0,
        ),
        (
            GroupKind::Flexible,
            &cfg.flexible_groups,
            n_flexible,
            1.0 - cfg.alpha0,
        ),
    ];
    for (kind, specs, count, mass) in plan {
        if mass <= 0.0 {
            continue;
        }
        let weights: Vec<f64> = specs.iter().map(|g| g.weight).collect();
        let counts = apportion(count, &weights);
        for (index, (spec, &k)) in specs.iter().zip(&counts).enumerate() {
            if k == 0 {
                return Err(Error::GroupStarved {
                    kind: kind.name(),
                    index: index + 1,
                    weight: spec.weight,
                    n_agents: n,
                });
            }
            let start = agents.len();
            agents.extend((0..k).map(|_| Agent::new(spec.w0.sample(&mut rng), spec.p, spec.q)));
            groups.push(GroupLayout {
                kind,
                index,
                start,
                len: k,
            });
        }
    }
    Ok(PopulationState::with_layout(
        agents,
        groups,
        Dynamics::from_config(cfg),
        rng,
    ))
}

/// Seeds a generator from `cfg.seed` and samples the population.
pub fn build_population_seeded(cfg: &ScenarioConfig) -> Result<PopulationState> {
    build_population(cfg, SimRng::seed_from_u64(cfg.seed))
}

/// Closed-form moments of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioStats {
    /// Population-wide mean persuasion.
    pub mean_p: f64,
    pub mean_p_stubborn: f64,
    pub mean_p_flexible: f64,
    pub eps0: Option<f64>,
    /// Persuasion-weighted mean opinion of the stubborn population.
    pub m00: Option<f64>,
}

impl ScenarioStats {
    pub fn require_m00(&self) -> Result<f64> {
        self.m00.ok_or(Error::NoStubbornMass)
    }
}

pub fn scenario_stats(cfg: &ScenarioConfig) -> ScenarioStats {
    let mean_p_stubborn: f64 = cfg.stubborn_groups.iter().map(|g| g.weight * g.p).sum();
    let mean_p_flexible: f64 = cfg.flexible_groups.iter().map(|g| g.weight * g.p).sum();
    let a0 = cfg.alpha0;
    let mean_p = a0 * mean_p_stubborn + (1.0 - a0) * mean_p_flexible;
    let m00 = if a0 > 0.0 && mean_p_stubborn > 0.0 {
        let pw: f64 = cfg
            .stubborn_groups
            .iter()
            .map(|g| g.weight * g.p * g.w0.mean())
            .sum();
        Some(pw / mean_p_stubborn)
    } else {
        None
    };
    ScenarioStats {
        mean_p,
        mean_p_stubborn,
        mean_p_flexible,
        eps0: cfg.eps0(),
        m00,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::reference_scenario;

    const ANY: NoiseKind = NoiseKind::Quadratic;

    #[test]
    fn identical_opinions_fixed_point() {
        let a = Agent::new(0.5, 0.3, 0.8);
        let b = Agent::new(0.5, 0.9, 0.1);
        assert_eq!(interact(&a, &b, 0.3, 0.0, 0.0, ANY), (0.5, 0.5));
    }

    #[test]
    fn stubborn_never_moves() {
        let a = Agent::new(0.3, 0.7, 0.0);
        let b = Agent::new(-0.9, 0.2, 1.0);
        let (wa, _) = interact(&a, &b, 0.1, 0.5, 0.0, NoiseKind::Linear);
        assert_eq!(wa, 0.3);
    }

    #[test]
    fn compromise_arithmetic() {
        let a = Agent::new(0.0, 0.5, 1.0);
        let b = Agent::new(1.0, 0.5, 0.0);
        for noise in [NoiseKind::Quadratic, NoiseKind::Linear, NoiseKind::SqrtQuad] {
            let (wa, wb) = interact(&a, &b, 0.1, 0.0, 0.0, noise);
            assert!((wa - 0.05).abs() < 1e-15);
            assert_eq!(wb, 1.0);
        }
    }

    #[test]
    fn noise_term_arithmetic() {
        let a = Agent::new(0.5, 0.5, 1.0);
        let (wa, _) = interact(&a, &a, 0.2, 0.1, 0.0, NoiseKind::Quadratic);
        assert!((wa - 0.575).abs() < 1e-15);
    }

    #[test]
    fn noise_amplitudes() {
        for kind in [NoiseKind::Quadratic, NoiseKind::Linear] {
            assert_eq!(kind.amplitude(1.0), 0.0);
            assert_eq!(kind.amplitude(-1.0), 0.0);
        }
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let w = k as f64 / 100.0;
            for kind in [NoiseKind::Quadratic, NoiseKind::Linear, NoiseKind::SqrtQuad] {
                let d = kind.amplitude(w);
                assert!((0.0..=1.0).contains(&d));
                assert_eq!(d, kind.amplitude(-w));
            }
            let d = NoiseKind::SqrtQuad.amplitude(w);
            assert!(d <= prev);
            prev = d;
        }
    }

    #[test]
    fn opinion_dist_mean_and_support() {
        assert_eq!(OpinionDist::Point(-0.3).mean(), -0.3);
        assert_eq!(OpinionDist::Uniform(0.4, 0.8).mean(), 0.6000000000000001);
        let mut rng = SimRng::seed_from_u64(5);
        let d = OpinionDist::Uniform(-0.8, -0.6);
        for _ in 0..1000 {
            let w = d.sample(&mut rng);
            assert!((-0.8..=-0.6).contains(&w));
        }
        assert!("uniform(0.5,0.2)".parse::<OpinionDist>().is_err());
        assert!("point(1.5)".parse::<OpinionDist>().is_err());
        assert_eq!(
            "uniform(1/2, 1)".parse::<OpinionDist>(),
            Ok(OpinionDist::Uniform(0.5, 1.0))
        );
    }

    #[test]
    fn apportion_largest_remainder() {
        assert_eq!(apportion(10, &[0.5, 0.5]), vec![5, 5]);
        assert_eq!(apportion(6000, &[1.0 / 3.0, 2.0 / 3.0]), vec![2000, 4000]);
        assert_eq!(
            apportion(7, &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
            vec![3, 2, 2]
        );
        assert_eq!(apportion(0, &[1.0]), vec![0]);
    }

    #[test]
    fn reference_population_composition() {
        let cfg = reference_scenario();
        let state = build_population_seeded(&cfg).unwrap();
        assert_eq!(state.agents().len(), 10_000);
        let stubborn: Vec<_> = state.agents().iter().filter(|a| a.is_stubborn()).collect();
        assert_eq!(stubborn.len(), 6000);
        assert_eq!(stubborn.iter().filter(|a| a.p == 0.6).count(), 2000);
        assert_eq!(stubborn.iter().filter(|a| a.p == 0.2).count(), 4000);
        for a in &stubborn {
            if a.p == 0.6 {
                assert!((-0.8..=-0.6).contains(&a.w));
            } else {
                assert!((0.4..=0.8).contains(&a.w));
            }
        }
        let flexible = state.agents().iter().filter(|a| !a.is_stubborn());
        for a in flexible {
            assert!((0.3..=1.0).contains(&a.w));
            assert!((0.2..=1.0).contains(&a.q));
            assert!((a.p + a.q - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_stubborn_population() {
        let cfg = ScenarioConfig {
            stubborn_groups: vec![GroupSpec::stubborn(
                1.0,
                0.5,
                OpinionDist::Uniform(-1.0, 1.0),
            )],
            alpha0: 1.0,
            n_agents: 50,
            ..ScenarioConfig::default()
        };
        let state = build_population_seeded(&cfg).unwrap();
        assert!(state.agents().iter().all(|a| a.q == 0.0));
    }

    #[test]
    fn exact_flexible_split() {
        let cfg = ScenarioConfig {
            flexible_groups: vec![
                GroupSpec::new(0.5, 0.5, 0.5, OpinionDist::Point(0.1)),
                GroupSpec::new(0.5, 0.5, 0.9, OpinionDist::Point(0.2)),
            ],
            alpha0: 0.0,
            n_agents: 10,
            ..ScenarioConfig::default()
        };
        let state = build_population_seeded(&cfg).unwrap();
        let layout = state.groups();
        assert_eq!(layout.len(), 2);
        assert!(layout.iter().all(|g| g.len == 5));
    }

    #[test]
    fn starved_group_rejected() {
        let cfg = ScenarioConfig {
            flexible_groups: vec![
                GroupSpec::new(0.9, 0.5, 0.5, OpinionDist::Point(0.1)),
                GroupSpec::new(0.1, 0.5, 0.9, OpinionDist::Point(0.2)),
            ],
            alpha0: 0.0,
            n_agents: 4,
            ..ScenarioConfig::default()
        };
        assert!(matches!(
            build_population_seeded(&cfg),
            Err(Error::GroupStarved { index: 2, .. })
        ));
    }

    #[test]
    fn same_seed_same_agents() {
        let cfg = reference_scenario();
        let a = build_population_seeded(&cfg).unwrap();
        let b = build_population_seeded(&cfg).unwrap();
        let bits = |s: &PopulationState| -> Vec<u64> {
            s.agents()
                .iter()
                .flat_map(|a| [a.w.to_bits(), a.p.to_bits(), a.q.to_bits()])
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn reference_closed_form_stats() {
        let stats = scenario_stats(&reference_scenario());
        assert!((stats.mean_p_stubborn - 1.0 / 3.0).abs() < 1e-15);
        assert!((stats.mean_p - 0.36).abs() < 1e-14);
        assert!((stats.m00.unwrap() + 0.18).abs() < 1e-15);
    }

    #[test]
    fn single_and_symmetric_stubborn_means() {
        let one = ScenarioConfig {
            stubborn_groups: vec![GroupSpec::stubborn(1.0, 1.0, OpinionDist::Point(0.5))],
            alpha0: 1.0,
            ..ScenarioConfig::default()
        };
        assert_eq!(scenario_stats(&one).m00, Some(0.5));
        let sym = ScenarioConfig {
            stubborn_groups: vec![
                GroupSpec::stubborn(0.5, 0.4, OpinionDist::Point(-1.0)),
                GroupSpec::stubborn(0.5, 0.4, OpinionDist::Point(1.0)),
            ],
            alpha0: 1.0,
            ..ScenarioConfig::default()
        };
        assert_eq!(scenario_stats(&sym).m00, Some(0.0));
    }

    #[test]
    fn no_stubborn_mass() {
        let cfg = ScenarioConfig {
            flexible_groups: vec![GroupSpec::new(1.0, 0.5, 0.5, OpinionDist::Point(0.1))],
            ..ScenarioConfig::default()
        };
        assert!(matches!(
            scenario_stats(&cfg).require_m00(),
            Err(Error::NoStubbornMass)
        ));
    }

    #[test]
    fn gamma_range_checked() {
        let mut cfg = reference_scenario();
        cfg.gamma = 0.7;
        assert_eq!(cfg.check().unwrap_err(), "gamma out of (0,0.5)");
    }

    #[test]
    fn sigma_admissibility() {
        let mut cfg = reference_scenario();
        cfg.sigma = 0.99 / 2.0 / 3f64.sqrt();
        assert!(cfg.check().is_ok());
        cfg.sigma = 0.3;
        assert!(cfg.check().is_err());
        cfg.noise = NoiseKind::Linear;
        assert!(cfg.check().is_ok());
        cfg.noise = NoiseKind::SqrtQuad;
        cfg.sigma = 0.45;
        assert!(cfg.check().is_ok());
    }
}
