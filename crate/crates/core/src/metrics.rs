//! Distances, moments and rate fits over simulation output.

use crate::collision_sim::{PopulationState, Subset};
use crate::error::{Error, Result};
use crate::model::Agent;

/// Tolerance on the total mass of a [`WeightedSample1D`].
pub const MASS_TOL: f64 = 1e-12;

/// Discrete probability measure on the real line, kept sorted by value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample1D {
    atoms: Vec<(f64, f64)>,
}

impl WeightedSample1D {
    pub fn new(values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidSample(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidSample("empty sample".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value {v}")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidSample(format!("invalid weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidSample(format!(
                "total mass {total}, expected 1"
            )));
        }
        let mut atoms: Vec<(f64, f64)> = values
            .iter()
            .copied()
            .zip(weights.iter().copied())
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(WeightedSample1D { atoms })
    }

    /// Equal weights `1/n` on each value.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("empty sample".into()));
        }
        let w = 1.0 / values.len() as f64;
        let mut atoms: Vec<(f64, f64)> = values.iter().map(|&v| (v, w)).collect();
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value {v}")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(WeightedSample1D { atoms })
    }

    pub fn dirac(c: f64) -> Self {
        WeightedSample1D {
            atoms: vec![(c, 1.0)],
        }
    }

    /// `(value, weight)` pairs in ascending value order.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(v, w)| v * w).sum()
    }
}

/// Wasserstein-1 distance between two discrete measures on the line,
/// computed as `integral |F_mu - F_nu| dx` over the merged breakpoints.
pub fn w1(mu: &WeightedSample1D, nu: &WeightedSample1D) -> f64 {
    let (a, b) = (&mu.atoms, &nu.atoms);
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        if let Some(px) = prev {
            total += (fa - fb).abs() * (x - px);
        }
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        prev = Some(x);
    }
    total
}

/// `sum p_i w_i / sum p_i` over the agents in `subset`.
pub fn weighted_mean_opinion(agents: &[Agent], subset: Subset) -> Result<f64> {
    persuasion_weighted_mean(
        agents
            .iter()
            .filter(|a| subset.contains(a))
            .map(|a| (a.w, a.p)),
    )
}

/// `sum p w / sum p` over `(w, p)` pairs.
pub fn persuasion_weighted_mean<I>(pairs: I) -> Result<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (pw, p) = pairs
        .into_iter()
        .fold((0.0, 0.0), |(pw, p), (wi, pi)| (pw + pi * wi, p + pi));
    if p > 0.0 {
        Ok(pw / p)
    } else {
        Err(Error::ZeroPersuasion)
    }
}

/// Mass-weighted sum over flexible groups of `W1(group opinions, delta_m00)`.
///
/// Group masses are the empirical shares of the flexible population. This
/// bounds the product-space distance to the limit because the `(p, q)`
/// marginals of the two measures coincide.
pub fn w1_to_limit(state: &PopulationState, m00: f64) -> f64 {
    let n_flexible: usize = state.flexible_groups().map(|g| g.len).sum();
    if n_flexible == 0 {
        return 0.0;
    }
    state
        .flexible_groups()
        .map(|g| {
            let spread: f64 = state
                .group_agents(g)
                .iter()
                .map(|a| (a.w - m00).abs())
                .sum();
            spread / n_flexible as f64
        })
        .sum()
}

/// Result of a log-linear fit `d(t) ~ prefactor * exp(-rate * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least-squares line through `(t, ln d)` for the points with `d > floor`.
pub fn fit_decay_rate(series: &[(f64, f64)], floor: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, d)| d.is_finite() && *d > floor)
        .map(|&(t, d)| (t, d.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints { found: pts.len() });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints { found: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mt;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit {
        rate: (-slope).max(0.0),
        prefactor: intercept.exp(),
        r_squared,
        n_points: pts.len(),
    })
}

/// Default rate-fit floor for groups of `n_group` agents.
pub fn noise_floor(n_group: usize) -> f64 {
    2.0 / (n_group as f64).sqrt()
}

/// One recorded snapshot of the observables.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRow {
    pub tau: f64,
    /// Persuasion-weighted mean opinion of the whole population.
    pub m_t: f64,
    /// `max_i |mean_i - m00|` over flexible groups.
    pub max_abs_mean_error: f64,
    pub w1_to_limit: f64,
    pub min_w: f64,
    pub max_w: f64,
    pub group_means: Vec<f64>,
    /// `max w - min w` per flexible group.
    pub group_diameters: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub n_groups: usize,
    pub rows: Vec<TimeSeriesRow>,
}

impl TimeSeries {
    pub fn new(n_groups: usize) -> Self {
        TimeSeries {
            n_groups,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: TimeSeriesRow) {
        debug_assert_eq!(row.group_means.len(), self.n_groups);
        debug_assert!(self.rows.last().is_none_or(|r| r.tau < row.tau));
        self.rows.push(row);
    }

    /// `(tau, w1_to_limit)` pairs, the input of [`fit_decay_rate`].
    pub fn w1_curve(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.tau, r.w1_to_limit)).collect()
    }
}

/// Measures every [`TimeSeriesRow`] column on a snapshot. Limit-dependent
/// columns are `NaN` without stubborn mass.
pub fn observe(state: &PopulationState, m00: Option<f64>) -> TimeSeriesRow {
    let agents = state.agents();
    let m_t = weighted_mean_opinion(agents, Subset::All).unwrap_or(f64::NAN);
    let (min_w, max_w) = agents
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
            (lo.min(a.w), hi.max(a.w))
        });
    let mut group_means = Vec::new();
    let mut group_diameters = Vec::new();
    for g in state.flexible_groups() {
        let members = state.group_agents(g);
        let mut sum = 0.0;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for a in members {
            sum += a.w;
            lo = lo.min(a.w);
            hi = hi.max(a.w);
        }
        group_means.push(sum / members.len() as f64);
        group_diameters.push(hi - lo);
    }
    let (w1_limit, max_err) = match m00 {
        Some(m) => (
            w1_to_limit(state, m),
            group_means
                .iter()
                .map(|x| (x - m).abs())
                .fold(0.0, f64::max),
        ),
        None => (f64::NAN, f64::NAN),
    };
    TimeSeriesRow {
        tau: state.tau(),
        m_t,
        max_abs_mean_error: max_err,
        w1_to_limit: w1_limit,
        min_w,
        max_w,
        group_means,
        group_diameters,
    }
}
