//! Deterministic solver for the grazing-limit transport dynamics.
//!
//! With flexible groups `i = 1..N` of mass `alpha_i`, persuasion `p_i` and
//! zealotry `q_i`, the group mean opinions obey the linear system
//! `M' = A M + B` with
//!
//! ```text
//! A_ii = q_i ((1 - alpha0) alpha_i p_i - <p>)
//! A_ij = q_i (1 - alpha0) alpha_j p_j          (j != i)
//! B_i  = alpha0 <p>_stubborn m00 q_i
//! ```
//!
//! and every quantile of group `i` follows `X' = (m_t - X) q_i <p>`, where
//! `m_t` is the persuasion-weighted mean opinion of the whole population.

use crate::error::{Error, Result};
use crate::model::{scenario_stats, GroupSpec, OpinionDist, ScenarioConfig};

/// Tolerance for the exact matrix identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Data of the linear mean-opinion system.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSystem {
    pub weights: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub initial_laws: Vec<OpinionDist>,
    pub alpha0: f64,
    pub mean_p: f64,
    pub mean_p_stubborn: f64,
    pub m00: f64,
    /// Row-major `n x n`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Outcome of one exact-identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.residual <= IDENTITY_TOL
    }
}

pub const ONES_IDENTITY: &str = "A·1 identity";
pub const EQUILIBRIUM_IDENTITY: &str = "A⁻¹B identity";
pub const GERSHGORIN_ROWS: &str = "Gerschgorin row sums";

/// Groups with identical `(p, q, w0)` are merged by adding their weights.
fn merge_duplicates(groups: &[GroupSpec]) -> Vec<GroupSpec> {
    let mut merged: Vec<GroupSpec> = Vec::with_capacity(groups.len());
    for g in groups {
        match merged
            .iter_mut()
            .find(|m| m.p == g.p && m.q == g.q && m.w0 == g.w0)
        {
            Some(m) => m.weight += g.weight,
            None => merged.push(g.clone()),
        }
    }
    merged
}

/// Builds `A` and `B` for the flexible groups of `cfg` and checks the exact
/// identities.
pub fn assemble(cfg: &ScenarioConfig) -> Result<MeanFieldSystem> {
    let sys = assemble_unchecked(cfg)?;
    for check in sys.identity_checks() {
        if !check.passed() {
            return Err(Error::IdentityViolation {
                name: check.name,
                residual: check.residual,
            });
        }
    }
    Ok(sys)
}

/// [`assemble`] without the identity checks.
pub fn assemble_unchecked(cfg: &ScenarioConfig) -> Result<MeanFieldSystem> {
    if cfg.alpha0 <= 0.0 {
        return Err(Error::Alpha0Zero);
    }
    let stats = scenario_stats(cfg);
    if stats.mean_p_stubborn <= 0.0 {
        return Err(Error::ZeroPersuasion);
    }
    let m00 = stats.require_m00()?;
    let groups = if cfg.alpha0 < 1.0 {
        merge_duplicates(&cfg.flexible_groups)
    } else {
        Vec::new()
    };
    Ok(MeanFieldSystem::from_parts(
        groups.iter().map(|g| g.weight).collect(),
        groups.iter().map(|g| g.p).collect(),
        groups.iter().map(|g| g.q).collect(),
        groups.iter().map(|g| g.w0).collect(),
        cfg.alpha0,
        stats.mean_p_stubborn,
        m00,
    ))
}

impl MeanFieldSystem {
    /// Assembles `A` and `B` from raw group data without validation.
    pub fn from_parts(
        weights: Vec<f64>,
        p: Vec<f64>,
        q: Vec<f64>,
        initial_laws: Vec<OpinionDist>,
        alpha0: f64,
        mean_p_stubborn: f64,
        m00: f64,
    ) -> Self {
        let n = weights.len();
        let flex_p: f64 = weights.iter().zip(&p).map(|(w, p)| w * p).sum();
        let mean_p = alpha0 * mean_p_stubborn + (1.0 - alpha0) * flex_p;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = if i == j {
                    q[i] * ((1.0 - alpha0) * weights[i] * p[i] - mean_p)
                } else {
                    q[i] * (1.0 - alpha0) * weights[j] * p[j]
                };
            }
        }
        let b = q
            .iter()
            .map(|qi| alpha0 * mean_p_stubborn * m00 * qi)
            .collect();
        MeanFieldSystem {
            weights,
            p,
            q,
            initial_laws,
            alpha0,
            mean_p,
            mean_p_stubborn,
            m00,
            a,
            b,
        }
    }

    pub fn n_groups(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n_groups() + j]
    }

    pub fn eps0(&self) -> Option<f64> {
        self.q.iter().copied().min_by(|a, b| a.total_cmp(b))
    }

    /// Exponent `eps0 * alpha0 * <p>_stubborn` of the guaranteed decay.
    pub fn guaranteed_rate(&self) -> Option<f64> {
        self.eps0().map(|e| e * self.alpha0 * self.mean_p_stubborn)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n_groups();
        (0..n)
            .map(|i| (0..n).map(|j| self.a(i, j) * x[j]).sum())
            .collect()
    }

    /// Residuals of `A 1 = -alpha0 <p>_0 q`, `A (-m00 1) = B` and of the
    /// Gerschgorin row sums `A_ii + sum_k |A_ik| = -q_i <p>_0 alpha0`.
    pub fn identity_checks(&self) -> Vec<IdentityCheck> {
        let n = self.n_groups();
        let k = self.alpha0 * self.mean_p_stubborn;
        let ones = self.apply(&vec![1.0; n]);
        let r1 = ones
            .iter()
            .zip(&self.q)
            .map(|(x, q)| (x + k * q).abs())
            .fold(0.0, f64::max);
        let shifted = self.apply(&vec![-self.m00; n]);
        let r2 = shifted
            .iter()
            .zip(&self.b)
            .map(|(x, b)| (x - b).abs())
            .fold(0.0, f64::max);
        let r3 = (0..n)
            .map(|i| {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| self.a(i, j).abs()).sum();
                (self.a(i, i) + off + self.q[i] * k).abs()
            })
            .fold(0.0, f64::max);
        vec![
            IdentityCheck {
                name: ONES_IDENTITY,
                residual: r1,
            },
            IdentityCheck {
                name: EQUILIBRIUM_IDENTITY,
                residual: r2,
            },
            IdentityCheck {
                name: GERSHGORIN_ROWS,
                residual: r3,
            },
        ]
    }

    /// Gerschgorin upper bound `A_ii + sum_k |A_ik|` per row.
    pub fn gershgorin_row_sums(&self) -> Vec<f64> {
        let n = self.n_groups();
        (0..n)
            .map(|i| {
                self.a(i, i)
                    + (0..n)
                        .filter(|&j| j != i)
                        .map(|j| self.a(i, j).abs())
                        .sum::<f64>()
            })
            .collect()
    }

    pub fn inf_norm(&self) -> f64 {
        let n = self.n_groups();
        (0..n)
            .map(|i| (0..n).map(|j| self.a(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `min(0.01, 0.25 / ||A||_inf)`.
    pub fn default_dt(&self) -> f64 {
        let norm = self.inf_norm();
        if norm > 0.0 {
            (0.25 / norm).min(0.01)
        } else {
            0.01
        }
    }

    pub fn initial_means(&self) -> Vec<f64> {
        self.initial_laws.iter().map(|d| d.mean()).collect()
    }

    pub fn initial_profiles(&self, r: usize) -> Vec<QuantileProfile> {
        self.initial_laws
            .iter()
            .map(|d| QuantileProfile::from_dist(d, r))
            .collect()
    }

    /// Persuasion-weighted mean opinion implied by group means `m`.
    pub fn weighted_mean(&self, m: &[f64]) -> f64 {
        let flex: f64 = self
            .weights
            .iter()
            .zip(&self.p)
            .zip(m)
            .map(|((w, p), x)| w * p * x)
            .sum();
        (self.alpha0 * self.mean_p_stubborn * self.m00 + (1.0 - self.alpha0) * flex) / self.mean_p
    }

    fn rhs(&self, m: &[f64], out: &mut [f64]) {
        let n = self.n_groups();
        if n == 0 {
            return;
        }
        for ((o, row), b) in out.iter_mut().zip(self.a.chunks_exact(n)).zip(&self.b) {
            *o = row.iter().zip(m).map(|(a, x)| a * x).sum::<f64>() + b;
        }
    }
}

/// Dense solution of the mean system on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeansTrajectory {
    pub times: Vec<f64>,
    /// `means[k][i]` is `M_i(times[k])`.
    pub means: Vec<Vec<f64>>,
    /// Persuasion-weighted mean opinion at each grid time.
    pub m_t: Vec<f64>,
}

impl MeansTrajectory {
    /// Linear interpolation of `m_t`; clamps outside the grid.
    pub fn m_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.m_t[0];
        }
        if k >= self.times.len() {
            return *self.m_t.last().unwrap();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (m0, m1) = (self.m_t[k - 1], self.m_t[k]);
        m0 + (m1 - m0) * (t - t0) / (t1 - t0)
    }

    /// `max_i |M_i - m00|` at each grid time.
    pub fn max_deviation(&self, m00: f64) -> Vec<f64> {
        self.means
            .iter()
            .map(|m| m.iter().map(|x| (x - m00).abs()).fold(0.0, f64::max))
            .collect()
    }
}

/// Grid `0, dt, 2 dt, ...` ending exactly at `t_end` (the last step may be short).
fn time_grid(t_end: f64, dt: f64) -> Vec<f64> {
    let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut grid: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    if grid.last().is_none_or(|&last| last < t_end) {
        grid.push(t_end);
    }
    grid
}

/// Classical RK4 on `M' = A M + B`.
pub fn solve_means(
    sys: &MeanFieldSystem,
    m0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<MeansTrajectory> {
    assert!(dt > 0.0, "dt must be positive");
    assert_eq!(m0.len(), sys.n_groups(), "one initial mean per group");
    let n = sys.n_groups();
    let times = time_grid(t_end, dt);
    let mut m = m0.to_vec();
    let mut means = Vec::with_capacity(times.len());
    let mut m_t = Vec::with_capacity(times.len());
    means.push(m.clone());
    m_t.push(sys.weighted_mean(&m));

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for w in times.windows(2) {
        let h = w[1] - w[0];
        sys.rhs(&m, &mut k1);
        for i in 0..n {
            tmp[i] = m[i] + 0.5 * h * k1[i];
        }
        sys.rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = m[i] + 0.5 * h * k2[i];
        }
        sys.rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = m[i] + h * k3[i];
        }
        sys.rhs(&tmp, &mut k4);
        for i in 0..n {
            m[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if let Some(x) = m.iter().find(|x| x.abs() > 1.0 + 1e-6 || !x.is_finite()) {
            return Err(Error::UnstableStep { t: w[1], value: *x });
        }
        means.push(m.clone());
        m_t.push(sys.weighted_mean(&m));
    }
    Ok(MeansTrajectory { times, means, m_t })
}

/// Quantile function of one group sampled at `r_j = (j - 1/2)/R`, plus `r = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileProfile {
    /// `R` midpoint values followed by the value at `r = 1`.
    pub values: Vec<f64>,
}

impl QuantileProfile {
    pub fn from_dist(dist: &OpinionDist, r: usize) -> Self {
        assert!(r >= 1);
        let mut values: Vec<f64> = (1..=r)
            .map(|j| dist.quantile((j as f64 - 0.5) / r as f64))
            .collect();
        values.push(dist.quantile(1.0));
        QuantileProfile { values }
    }

    pub fn resolution(&self) -> usize {
        self.values.len() - 1
    }

    pub fn midpoints(&self) -> &[f64] {
        &self.values[..self.resolution()]
    }

    pub fn top(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Midpoint-rule mean of the quantile function.
    pub fn mean(&self) -> f64 {
        self.midpoints().iter().sum::<f64>() / self.resolution() as f64
    }

    /// `X(1) - X(r_1)`.
    pub fn diameter(&self) -> f64 {
        self.top() - self.values[0]
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

/// Evolves the quantile profiles to `t_end` with RK4 steps of `dt`,
/// using `m_t` linearly interpolated from `traj`.
pub fn flow_quantiles(
    sys: &MeanFieldSystem,
    profiles: &[QuantileProfile],
    traj: &MeansTrajectory,
    t_end: f64,
    dt: f64,
) -> Result<Vec<QuantileProfile>> {
    flow_quantiles_with(sys, profiles, traj, t_end, dt, |_, _| {})
}

/// Like [`flow_quantiles`], calling `observer(t, profiles)` at `t = 0` and
/// after every step.
pub fn flow_quantiles_with<F>(
    sys: &MeanFieldSystem,
    profiles: &[QuantileProfile],
    traj: &MeansTrajectory,
    t_end: f64,
    dt: f64,
    mut observer: F,
) -> Result<Vec<QuantileProfile>>
where
    F: FnMut(f64, &[QuantileProfile]),
{
    assert!(dt > 0.0, "dt must be positive");
    assert_eq!(profiles.len(), sys.n_groups(), "one profile per group");
    let times = time_grid(t_end, dt);
    let mut current = profiles.to_vec();
    let speeds: Vec<f64> = sys.q.iter().map(|q| q * sys.mean_p).collect();
    observer(0.0, &current);
    for w in times.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let m1 = traj.m_at(t);
        let m2 = traj.m_at(t + 0.5 * h);
        let m4 = traj.m_at(t + h);
        for (g, (profile, &c)) in current.iter_mut().zip(&speeds).enumerate() {
            for x in profile.values.iter_mut() {
                let k1 = (m1 - *x) * c;
                let k2 = (m2 - (*x + 0.5 * h * k1)) * c;
                let k3 = (m2 - (*x + 0.5 * h * k2)) * c;
                let k4 = (m4 - (*x + h * k3)) * c;
                *x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            if !profile.is_monotone(1e-12) {
                return Err(Error::MonotonicityViolated { group: g, t: w[1] });
            }
        }
        observer(w[1], &current);
    }
    Ok(current)
}

/// Limit `f_inf`: stubborn part unchanged, flexible part concentrated at `m00`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitDistribution {
    pub stubborn_mass: f64,
    pub stubborn_groups: Vec<GroupSpec>,
    pub flexible_mass: f64,
    /// Opinion carried by every flexible agent in the limit.
    pub flexible_opinion: f64,
    /// `(weight, p, q)` marginal of the flexible population, unchanged.
    pub flexible_marginal: Vec<(f64, f64, f64)>,
    /// Exponent `eps0 alpha0 <p>_stubborn`; `None` without flexible agents.
    pub rate_exponent: Option<f64>,
    pub prefactor: f64,
}

impl LimitDistribution {
    /// `prefactor * exp(-rate * t)`, or 0 with no flexible mass.
    pub fn bound(&self, t: f64) -> f64 {
        match self.rate_exponent {
            Some(rate) => self.prefactor * (-rate * t).exp(),
            None => 0.0,
        }
    }
}

pub fn limit_distribution(cfg: &ScenarioConfig) -> Result<LimitDistribution> {
    let stats = scenario_stats(cfg);
    if cfg.alpha0 <= 0.0 {
        return Err(Error::NoStubbornMass);
    }
    let m00 = stats.require_m00()?;
    let flexible: Vec<(f64, f64, f64)> = if cfg.alpha0 < 1.0 {
        cfg.flexible_groups
            .iter()
            .map(|g| (g.weight, g.p, g.q))
            .collect()
    } else {
        Vec::new()
    };
    let eps0 = flexible.iter().map(|g| g.2).min_by(|a, b| a.total_cmp(b));
    Ok(LimitDistribution {
        stubborn_mass: cfg.alpha0,
        stubborn_groups: cfg.stubborn_groups.clone(),
        flexible_mass: 1.0 - cfg.alpha0,
        flexible_opinion: m00,
        flexible_marginal: flexible,
        rate_exponent: eps0.map(|e| e * cfg.alpha0 * stats.mean_p_stubborn),
        prefactor: 4.0,
    })
}
