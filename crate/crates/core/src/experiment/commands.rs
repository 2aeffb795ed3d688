//! Experiment drivers behind the command-line subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};

use super::config::{emit_config, parse_config};
use super::output::{density_csv, fmt_num, timeseries_csv, write_atomic, RunManifest};
use crate::collision_sim::{density_grid, run, GroupLayout, PopulationState, SimRng, Subset};
use crate::error::{Error, Result};
use crate::meanfield::{
    assemble, assemble_unchecked, flow_quantiles_with, limit_distribution, solve_means,
    MeanFieldSystem, QuantileProfile,
};
use crate::metrics::{
    fit_decay_rate, noise_floor, persuasion_weighted_mean, w1, TimeSeries, WeightedSample1D,
};
use crate::model::{build_population_seeded, scenario_stats, ScenarioConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default `w1_to_limit` level that counts as converged in sweeps.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    parse_config(&fs::read_to_string(path)?)
}

fn manifest(
    command: &str,
    cfg: &ScenarioConfig,
    start: Instant,
    events: u64,
    resamples: u64,
    fallbacks: u64,
) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        version: VERSION.to_string(),
        seed: cfg.seed,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        events,
        noise_resamples: resamples,
        noise_fallbacks: fallbacks,
        config: emit_config(cfg),
    }
}

/// Density snapshot settings for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    /// Write a grid every this many records (0 disables).
    pub every: usize,
    pub n_w: usize,
    pub n_q: usize,
    pub subset: Subset,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            every: 10,
            n_w: 64,
            n_q: 32,
            subset: Subset::Flexible,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub series: TimeSeries,
    pub final_state: PopulationState,
    pub manifest: RunManifest,
}

/// Runs the Monte Carlo engine and writes `timeseries.csv`,
/// `density_NNNN.csv` and `manifest.txt` into `out`.
pub fn simulate(
    cfg: &ScenarioConfig,
    out: &Path,
    density: DensityOptions,
) -> Result<SimulateReport> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let state = build_population_seeded(cfg)?;
    let mut grids = Vec::new();
    let mut k = 0usize;
    let (final_state, series) = run(state, cfg, |s| {
        if density.every > 0 && k.is_multiple_of(density.every) {
            grids.push((
                k,
                s.tau(),
                density_grid(s, density.n_w, density.n_q, density.subset),
            ));
        }
        k += 1;
    });
    write_atomic(&out.join("timeseries.csv"), &timeseries_csv(&series))?;
    for (k, tau, grid) in &grids {
        write_atomic(
            &out.join(format!("density_{k:04}.csv")),
            &density_csv(grid, *tau),
        )?;
    }
    let manifest = manifest(
        "simulate",
        cfg,
        start,
        final_state.n_events(),
        final_state.noise_resamples(),
        final_state.noise_fallbacks(),
    );
    write_atomic(&out.join("manifest.txt"), &manifest.render())?;
    Ok(SimulateReport {
        series,
        final_state,
        manifest,
    })
}

pub fn cmd_simulate(config: &Path, out: &Path, density: DensityOptions) -> Result<SimulateReport> {
    simulate(&load_config(config)?, out, density)
}

#[derive(Debug, Clone)]
pub struct MeanFieldReport {
    pub system: MeanFieldSystem,
    pub times: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub m_t: Vec<f64>,
    pub bound: Vec<f64>,
    pub final_profiles: Vec<QuantileProfile>,
}

/// Solves the mean system and quantile flow to `tau_end`; writes
/// `meanfield.csv` (one row per `record_every`), `quantiles.csv` (final
/// profiles), `limit.txt` and `manifest.txt`.
pub fn meanfield(cfg: &ScenarioConfig, out: &Path) -> Result<MeanFieldReport> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let sys = assemble(cfg)?;
    let limit = limit_distribution(cfg)?;
    let dt = cfg.dt_meanfield;
    let traj = solve_means(&sys, &sys.initial_means(), cfg.tau_end, dt)?;
    let profiles = sys.initial_profiles(cfg.quantile_points);
    let final_profiles = flow_quantiles_with(&sys, &profiles, &traj, cfg.tau_end, dt, |_, _| {})?;

    let stride = ((cfg.record_every / dt).round() as usize).max(1);
    let last = traj.times.len() - 1;
    let keep: Vec<usize> = (0..=last)
        .filter(|k| k % stride == 0 || *k == last)
        .collect();

    let n = sys.n_groups();
    let mut csv = String::from("t,m_t,bound");
    for i in 1..=n {
        let _ = write!(csv, ",M_g{i}");
    }
    csv.push('\n');
    let mut report = MeanFieldReport {
        system: sys.clone(),
        times: Vec::new(),
        means: Vec::new(),
        m_t: Vec::new(),
        bound: Vec::new(),
        final_profiles: final_profiles.clone(),
    };
    for &k in &keep {
        let t = traj.times[k];
        let bound = limit.bound(t);
        let mut fields = vec![fmt_num(t), fmt_num(traj.m_t[k]), fmt_num(bound)];
        fields.extend(traj.means[k].iter().map(|&x| fmt_num(x)));
        csv.push_str(&fields.join(","));
        csv.push('\n');
        report.times.push(t);
        report.means.push(traj.means[k].clone());
        report.m_t.push(traj.m_t[k]);
        report.bound.push(bound);
    }
    write_atomic(&out.join("meanfield.csv"), &csv)?;

    let r = cfg.quantile_points;
    let mut q_csv = String::from("r");
    for i in 1..=n {
        let _ = write!(q_csv, ",X_g{i}");
    }
    q_csv.push('\n');
    for j in 0..=r {
        let rj = if j < r {
            (j as f64 + 0.5) / r as f64
        } else {
            1.0
        };
        let mut fields = vec![fmt_num(rj)];
        fields.extend(final_profiles.iter().map(|p| fmt_num(p.values[j])));
        q_csv.push_str(&fields.join(","));
        q_csv.push('\n');
    }
    write_atomic(&out.join("quantiles.csv"), &q_csv)?;

    let mut lim = String::new();
    let _ = writeln!(lim, "m00 = {}", fmt_num(sys.m00));
    let _ = writeln!(
        lim,
        "rate_exponent = {}",
        fmt_num(limit.rate_exponent.unwrap_or(f64::NAN))
    );
    let _ = writeln!(lim, "prefactor = {}", fmt_num(limit.prefactor));
    let _ = writeln!(lim, "eps0 = {}", fmt_num(sys.eps0().unwrap_or(f64::NAN)));
    let _ = writeln!(lim, "mean_p = {}", fmt_num(sys.mean_p));
    let _ = writeln!(lim, "mean_p_stubborn = {}", fmt_num(sys.mean_p_stubborn));
    write_atomic(&out.join("limit.txt"), &lim)?;
    write_atomic(
        &out.join("manifest.txt"),
        &manifest("meanfield", cfg, start, 0, 0, 0).render(),
    )?;
    Ok(report)
}

pub fn cmd_meanfield(config: &Path, out: &Path) -> Result<MeanFieldReport> {
    meanfield(&load_config(config)?, out)
}

/// Noise level used by [`compare`] for each interaction strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaScaling {
    /// `sigma = 0`: pure transport.
    #[default]
    Zero,
    /// `sigma^2 = gamma^1.5`.
    Gamma15,
}

impl SigmaScaling {
    pub fn sigma(self, gamma: f64) -> f64 {
        match self {
            SigmaScaling::Zero => 0.0,
            SigmaScaling::Gamma15 => gamma.powf(0.75),
        }
    }
}

impl std::str::FromStr for SigmaScaling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "zero" => Ok(SigmaScaling::Zero),
            "gamma15" => Ok(SigmaScaling::Gamma15),
            other => Err(format!(
                "unknown sigma scaling '{other}' (expected zero|gamma15)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrazingRow {
    pub gamma: f64,
    pub sigma: f64,
    pub n_agents: usize,
    pub seed: u64,
    /// Largest mixture W1 between the simulated flexible groups and the
    /// mean-field quantile profiles over the recorded times.
    pub sup_w1: f64,
}

/// Mean-field quantile profiles at `k * record_every`, `k = 0..=last`.
fn profile_snapshots(
    cfg: &ScenarioConfig,
    sys: &MeanFieldSystem,
) -> Result<Vec<Vec<QuantileProfile>>> {
    let dt = cfg.dt_meanfield;
    let traj = solve_means(sys, &sys.initial_means(), cfg.tau_end, dt)?;
    let every = cfg.record_every;
    let last_k = ((cfg.tau_end + 1e-9 * every) / every).floor() as usize;
    let mut snaps = Vec::with_capacity(last_k + 1);
    flow_quantiles_with(
        sys,
        &sys.initial_profiles(cfg.quantile_points),
        &traj,
        cfg.tau_end,
        dt,
        |t, profiles| {
            while snaps.len() <= last_k && t >= snaps.len() as f64 * every - 1e-6 * dt {
                snaps.push(profiles.to_vec());
            }
        },
    )?;
    while snaps.len() <= last_k {
        let last = snaps.last().cloned().expect("at least the t = 0 snapshot");
        snaps.push(last);
    }
    Ok(snaps)
}

/// Row of the mean-field system that models simulated group `g`.
fn system_row(cfg: &ScenarioConfig, sys: &MeanFieldSystem, g: &GroupLayout) -> usize {
    let spec = &cfg.flexible_groups[g.index];
    (0..sys.n_groups())
        .find(|&j| sys.p[j] == spec.p && sys.q[j] == spec.q && sys.initial_laws[j] == spec.w0)
        .expect("every flexible group has a mean-field row")
}

/// Mixture W1 between the simulated flexible groups and the profiles.
pub fn mixture_w1(
    state: &PopulationState,
    cfg: &ScenarioConfig,
    sys: &MeanFieldSystem,
    profiles: &[QuantileProfile],
) -> f64 {
    let n_flexible: usize = state.flexible_groups().map(|g| g.len).sum();
    if n_flexible == 0 {
        return 0.0;
    }
    state
        .flexible_groups()
        .map(|g| {
            let opinions: Vec<f64> = state.group_agents(g).iter().map(|a| a.w).collect();
            let empirical = WeightedSample1D::uniform(&opinions).expect("non-empty group");
            let profile = &profiles[system_row(cfg, sys, g)];
            let limit = WeightedSample1D::uniform(profile.midpoints()).expect("non-empty profile");
            g.len as f64 / n_flexible as f64 * w1(&empirical, &limit)
        })
        .sum()
}

/// Grazing-limit comparison: for each `gamma` and seed, the sup over
/// recorded times of the mixture W1 between Monte Carlo and mean field.
pub fn compare(
    cfg: &ScenarioConfig,
    gammas: &[f64],
    seeds: usize,
    scaling: SigmaScaling,
    out: &Path,
) -> Result<Vec<GrazingRow>> {
    if gammas.len() < 2 {
        return Err(Error::InvalidConfig(
            "compare needs at least two gammas".into(),
        ));
    }
    if gammas.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidConfig(
            "gammas must be listed in descending order".into(),
        ));
    }
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let sys = assemble(cfg)?;
    let snaps = profile_snapshots(cfg, &sys)?;
    let every = cfg.record_every;
    let mut rows = Vec::new();
    let (mut events, mut resamples, mut fallbacks) = (0, 0, 0);
    for &gamma in gammas {
        for s in 0..seeds.max(1) {
            let mut run_cfg = cfg.clone();
            run_cfg.gamma = gamma;
            run_cfg.sigma = scaling.sigma(gamma);
            run_cfg.seed = cfg.seed.wrapping_add(s as u64);
            run_cfg.validate()?;
            let state = build_population_seeded(&run_cfg)?;
            let mut sup: f64 = 0.0;
            let (end, _) = run(state, &run_cfg, |st| {
                let k = ((st.tau() + 1e-9 * every) / every).floor() as usize;
                let k = k.min(snaps.len() - 1);
                sup = sup.max(mixture_w1(st, &run_cfg, &sys, &snaps[k]));
            });
            events += end.n_events();
            resamples += end.noise_resamples();
            fallbacks += end.noise_fallbacks();
            rows.push(GrazingRow {
                gamma,
                sigma: run_cfg.sigma,
                n_agents: run_cfg.n_agents,
                seed: run_cfg.seed,
                sup_w1: sup,
            });
        }
    }
    let mut csv = String::from("gamma,sigma,n_agents,seed,sup_w1\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_num(r.gamma),
            fmt_num(r.sigma),
            r.n_agents,
            r.seed,
            fmt_num(r.sup_w1)
        );
    }
    write_atomic(&out.join("grazing.csv"), &csv)?;
    write_atomic(
        &out.join("manifest.txt"),
        &manifest("compare", cfg, start, events, resamples, fallbacks).render(),
    )?;
    Ok(rows)
}

pub fn cmd_compare(
    config: &Path,
    gammas: &[f64],
    seeds: usize,
    scaling: SigmaScaling,
    out: &Path,
) -> Result<Vec<GrazingRow>> {
    compare(&load_config(config)?, gammas, seeds, scaling, out)
}

/// Scenario parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha0,
    Gamma,
    Sigma,
    NAgents,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Alpha0 => "alpha0",
            SweepParam::Gamma => "gamma",
            SweepParam::Sigma => "sigma",
            SweepParam::NAgents => "n_agents",
        }
    }

    pub fn apply(self, cfg: &mut ScenarioConfig, value: f64) -> Result<()> {
        match self {
            SweepParam::Alpha0 => cfg.alpha0 = value,
            SweepParam::Gamma => cfg.gamma = value,
            SweepParam::Sigma => cfg.sigma = value,
            SweepParam::NAgents => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "n_agents must be an integer, got {value}"
                    )));
                }
                cfg.n_agents = value as usize;
            }
        }
        cfg.validate()
    }
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "alpha0" => Ok(SweepParam::Alpha0),
            "gamma" => Ok(SweepParam::Gamma),
            "sigma" => Ok(SweepParam::Sigma),
            "n_agents" => Ok(SweepParam::NAgents),
            other => Err(format!(
                "unknown sweep parameter '{other}' (expected alpha0|gamma|sigma|n_agents)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub seed: u64,
    /// First recorded `tau` with `w1_to_limit < threshold`; infinite if the
    /// run never got there.
    pub tau_star: f64,
    /// Fitted exponential decay rate of `w1_to_limit` (NaN if the fit failed).
    pub fitted_rate: f64,
    /// Exponent `eps0 alpha0 <p>_stubborn`.
    pub guaranteed_rate: f64,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.tau_star.is_finite()
    }
}

/// First `tau` at which `w1_to_limit` drops below `threshold`.
pub fn convergence_time(series: &TimeSeries, threshold: f64) -> Option<f64> {
    series
        .rows
        .iter()
        .find(|r| r.w1_to_limit < threshold)
        .map(|r| r.tau)
}

pub fn sweep(
    cfg: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
    seeds: usize,
    threshold: f64,
    out: &Path,
) -> Result<Vec<SweepRow>> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    let (mut events, mut resamples, mut fallbacks) = (0, 0, 0);
    for &value in values {
        let mut base = cfg.clone();
        param.apply(&mut base, value)?;
        let guaranteed = limit_distribution(&base)?.rate_exponent.unwrap_or(f64::NAN);
        for s in 0..seeds.max(1) {
            let mut run_cfg = base.clone();
            run_cfg.seed = cfg.seed.wrapping_add(s as u64);
            let state = build_population_seeded(&run_cfg)?;
            let (end, series) = run(state, &run_cfg, |_| {});
            events += end.n_events();
            resamples += end.noise_resamples();
            fallbacks += end.noise_fallbacks();
            let smallest_group = end.flexible_groups().map(|g| g.len).min().unwrap_or(1);
            let fitted = fit_decay_rate(&series.w1_curve(), noise_floor(smallest_group))
                .map(|f| f.rate)
                .unwrap_or(f64::NAN);
            rows.push(SweepRow {
                param,
                value,
                seed: run_cfg.seed,
                tau_star: convergence_time(&series, threshold).unwrap_or(f64::INFINITY),
                fitted_rate: fitted,
                guaranteed_rate: guaranteed,
            });
        }
    }
    let mut csv = String::from("param,value,seed,tau_star,fitted_rate,guaranteed_rate\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.param.name(),
            fmt_num(r.value),
            r.seed,
            fmt_num(r.tau_star),
            fmt_num(r.fitted_rate),
            fmt_num(r.guaranteed_rate)
        );
    }
    write_atomic(&out.join("sweep.csv"), &csv)?;
    write_atomic(
        &out.join("manifest.txt"),
        &manifest("sweep", cfg, start, events, resamples, fallbacks).render(),
    )?;
    Ok(rows)
}

pub fn cmd_sweep(
    config: &Path,
    param: SweepParam,
    values: &[f64],
    seeds: usize,
    threshold: f64,
    out: &Path,
) -> Result<Vec<SweepRow>> {
    sweep(&load_config(config)?, param, values, seeds, threshold, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn add(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        match self.first_failure() {
            Some(c) => {
                let _ = writeln!(out, "FAILED: {}", c.name);
            }
            None => {
                let _ = writeln!(out, "all {} checks passed", self.checks.len());
            }
        }
        out
    }
}

/// Exact identities and the Gerschgorin bound of an assembled system.
pub fn verify_system(sys: &MeanFieldSystem) -> VerifyReport {
    let mut report = VerifyReport::default();
    for check in sys.identity_checks() {
        report.add(
            check.name,
            check.passed(),
            format!("max residual {:e}", check.residual),
        );
    }
    let bound = sys.guaranteed_rate().map(|r| -r).unwrap_or(0.0);
    let worst = sys
        .gershgorin_row_sums()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = sys.n_groups() == 0 || worst <= bound + 1e-12;
    report.add(
        "Gerschgorin bound",
        ok,
        format!("max row sum {worst:e} vs -eps0 alpha0 <p>_0 = {bound:e}"),
    );
    report
}

/// Metric axioms and the Dirac closed form on seeded random instances.
fn verify_w1(seed: u64) -> (bool, String) {
    let mut rng = SimRng::seed_from_u64(seed);
    let random_sample = |rng: &mut SimRng| {
        let n = rng.random_range(1..=6);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        weights[0] += 1.0 - weights.iter().sum::<f64>();
        WeightedSample1D::new(&values, &weights).expect("valid random sample")
    };
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (a, b, c) = (
            random_sample(&mut rng),
            random_sample(&mut rng),
            random_sample(&mut rng),
        );
        let sym = (w1(&a, &b) - w1(&b, &a)).abs();
        let tri = (w1(&a, &c) - w1(&a, &b) - w1(&b, &c)).max(0.0);
        let target = rng.random_range(-1.0..=1.0);
        let closed: f64 = a.atoms().iter().map(|(v, w)| w * (v - target).abs()).sum();
        let dirac = (w1(&a, &WeightedSample1D::dirac(target)) - closed).abs();
        worst = worst.max(sym).max(tri).max(dirac);
    }
    (
        worst <= 1e-10,
        format!("max violation {worst:e} over 200 random triples"),
    )
}

/// Runs the exact-identity suite for a scenario.
pub fn verify(cfg: &ScenarioConfig) -> VerifyReport {
    let mut report = VerifyReport::default();
    if cfg.alpha0 <= 0.0 {
        report.add("alpha0 zero", false, "the limit needs stubborn mass".into());
        return report;
    }
    let stats = scenario_stats(cfg);
    match (
        stats.m00,
        persuasion_weighted_mean(
            cfg.stubborn_groups
                .iter()
                .map(|g| (g.w0.mean(), g.weight * g.p)),
        ),
    ) {
        (Some(closed), Ok(direct)) => report.add(
            "m00 arithmetic",
            (closed - direct).abs() <= 1e-14,
            format!("closed form {closed:.17} vs weighted mean {direct:.17}"),
        ),
        _ => report.add(
            "m00 arithmetic",
            false,
            "stubborn persuasion is zero".into(),
        ),
    }
    match assemble_unchecked(cfg) {
        Ok(sys) => report.checks.extend(verify_system(&sys).checks),
        Err(e) => report.add("assemble", false, e.to_string()),
    }
    let (ok, detail) = verify_w1(cfg.seed);
    report.add("W1 metric properties", ok, detail);
    report
}

pub fn cmd_verify(config: &Path) -> Result<VerifyReport> {
    Ok(verify(&load_config(config)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::ONES_IDENTITY;
    use crate::scenarios::reference_scenario;

    #[test]
    fn reference_verifies() {
        let report = verify(&reference_scenario());
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn corrupted_matrix_fails_ones_identity() {
        let mut sys = assemble(&reference_scenario()).unwrap();
        sys.a[1] += 1e-3;
        let report = verify_system(&sys);
        assert_eq!(report.first_failure().unwrap().name, ONES_IDENTITY);
    }

    #[test]
    fn alpha0_zero_fails() {
        let mut cfg = reference_scenario();
        cfg.alpha0 = 0.0;
        let report = verify(&cfg);
        assert_eq!(report.first_failure().unwrap().name, "alpha0 zero");
    }

    fn small() -> ScenarioConfig {
        let mut cfg = reference_scenario();
        cfg.n_agents = 2000;
        cfg.tau_end = 5.0;
        cfg.flexible_q_bins = 4;
        cfg.flexible_groups = crate::model::GroupSpec::q_binned(
            1.0,
            0.2,
            1.0,
            crate::model::Persuasion::ComplementOfQ,
            crate::model::OpinionDist::Uniform(0.3, 1.0),
            4,
        );
        cfg
    }

    #[test]
    fn repeated_gamma_gives_identical_rows() {
        let dir = tempfile::tempdir().unwrap();
        let rows = compare(&small(), &[0.05, 0.05], 1, SigmaScaling::Zero, dir.path()).unwrap();
        assert_eq!(rows[0], rows[1]);
    }

    #[test]
    fn dirac_start_stays_at_sampling_floor() {
        let mut cfg = small();
        cfg.stubborn_groups = vec![crate::model::GroupSpec::stubborn(
            1.0,
            0.5,
            crate::model::OpinionDist::Point(0.2),
        )];
        cfg.flexible_groups = vec![crate::model::GroupSpec::new(
            1.0,
            0.5,
            0.6,
            crate::model::OpinionDist::Point(0.2),
        )];
        let dir = tempfile::tempdir().unwrap();
        let rows = compare(&cfg, &[0.1, 0.05, 0.01], 1, SigmaScaling::Zero, dir.path()).unwrap();
        let floor = noise_floor(cfg.n_agents);
        assert!(rows.iter().all(|r| r.sup_w1 <= floor), "{rows:?}");
    }

    #[test]
    fn sweep_single_value_and_trivial_threshold() {
        let dir = tempfile::tempdir().unwrap();
        let rows = sweep(&small(), SweepParam::Alpha0, &[0.5], 1, 2.0, dir.path()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].tau_star, 0.0);
        let rows = sweep(&small(), SweepParam::Alpha0, &[0.5], 1, 1e-9, dir.path()).unwrap();
        assert!(!rows[0].converged());
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert!(
            text.lines().nth(1).unwrap().split(',').nth(3) == Some("inf"),
            "{text}"
        );
    }

    #[test]
    fn sigma_scaling() {
        assert_eq!(SigmaScaling::Zero.sigma(0.1), 0.0);
        let s = SigmaScaling::Gamma15.sigma(0.04);
        assert!((s * s - 0.04f64.powf(1.5)).abs() < 1e-15);
    }
}
