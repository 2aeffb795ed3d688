//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! n_agents = 10000
//! alpha0 = 0.6
//! gamma = 0.01
//! ...
//! [stubborn]
//! weight = 1/3
//! p = 0.6
//! w_dist = uniform(-0.8, -0.6)
//!
//! [flexible]
//! weight = 1
//! q = uniform(0.2, 1)     # binned into flexible_q_bins groups
//! p = 1-q
//! w_dist = uniform(0.3, 1)
//! ```
//!
//! Top-level keys must come before the first section. Numbers accept
//! simple fractions (`1/3`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    parse_number, GroupSpec, NoiseKind, OpinionDist, Persuasion, ScenarioConfig, WEIGHT_SUM_TOL,
};

const TOP_LEVEL_KEYS: &[&str] = &[
    "n_agents",
    "alpha0",
    "gamma",
    "sigma",
    "noise",
    "tau_end",
    "record_every",
    "seed",
    "quantile_points",
    "dt_meanfield",
    "flexible_q_bins",
    "eps0",
];

const REQUIRED_KEYS: &[&str] = &["n_agents", "alpha0", "gamma", "tau_end", "seed"];

const SECTION_KEYS: &[&str] = &["weight", "p", "q", "w_dist"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SectionKind {
    Stubborn,
    Flexible,
}

#[derive(Debug)]
struct Section {
    kind: SectionKind,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    fn require(&self, key: &str) -> Result<(&str, usize)> {
        self.get(key).ok_or_else(|| Error::Config {
            line: self.line,
            message: format!("section is missing key '{key}'"),
        })
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn number(value: &str, line: usize) -> Result<f64> {
    parse_number(value).map_err(|e| err(line, e))
}

fn integer<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.trim().parse().map_err(|_| {
        err(
            line,
            format!("{key} must be a non-negative integer, got '{value}'"),
        )
    })
}

fn unit_interval(value: &str, line: usize, key: &str) -> Result<f64> {
    let x = number(value, line)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(err(line, format!("{key} {x} out of [0,1]")));
    }
    Ok(x)
}

/// Parses and fully validates a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut top: Vec<(String, String, usize)> = Vec::new();
    let mut sections: Vec<Section> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            let kind = match content {
                "[stubborn]" => SectionKind::Stubborn,
                "[flexible]" => SectionKind::Flexible,
                other => return Err(err(line, format!("unknown section {other}"))),
            };
            sections.push(Section {
                kind,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        match sections.last_mut() {
            Some(section) => {
                if !SECTION_KEYS.contains(&key.as_str()) {
                    return Err(err(line, format!("unknown key '{key}' in section")));
                }
                if section.get(&key).is_some() {
                    return Err(err(line, format!("duplicate key '{key}'")));
                }
                section.entries.push((key, value, line));
            }
            None => {
                if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
                    return Err(err(line, format!("unknown key '{key}'")));
                }
                if top.iter().any(|(k, _, _)| *k == key) {
                    return Err(err(line, format!("duplicate key '{key}'")));
                }
                top.push((key, value, line));
            }
        }
    }

    for key in REQUIRED_KEYS {
        if !top.iter().any(|(k, _, _)| k == key) {
            return Err(Error::MissingKey(key));
        }
    }

    let mut cfg = ScenarioConfig::default();
    let line_of = |key: &str| top.iter().find(|(k, _, _)| k == key).map(|e| e.2);
    let mut sigma_line = 0;
    for (key, value, line) in &top {
        let (value, line) = (value.as_str(), *line);
        match key.as_str() {
            "n_agents" => {
                cfg.n_agents = integer(value, line, key)?;
                if cfg.n_agents < 2 {
                    return Err(err(line, "n_agents must be >= 2"));
                }
            }
            "alpha0" => cfg.alpha0 = unit_interval(value, line, key)?,
            "gamma" => {
                cfg.gamma = number(value, line)?;
                if !(cfg.gamma > 0.0 && cfg.gamma < 0.5) {
                    return Err(err(line, "gamma out of (0,0.5)"));
                }
            }
            "sigma" => {
                sigma_line = line;
                cfg.sigma = number(value, line)?;
                if cfg.sigma < 0.0 {
                    return Err(err(line, format!("sigma {} must be >= 0", cfg.sigma)));
                }
            }
            "noise" => cfg.noise = value.parse::<NoiseKind>().map_err(|e| err(line, e))?,
            "tau_end" => {
                cfg.tau_end = number(value, line)?;
                if cfg.tau_end < 0.0 {
                    return Err(err(line, "tau_end must be >= 0"));
                }
            }
            "record_every" => {
                cfg.record_every = number(value, line)?;
                if cfg.record_every <= 0.0 {
                    return Err(err(line, "record_every must be > 0"));
                }
            }
            "seed" => cfg.seed = integer(value, line, key)?,
            "quantile_points" => {
                cfg.quantile_points = integer(value, line, key)?;
                if cfg.quantile_points < 2 {
                    return Err(err(line, "quantile_points must be >= 2"));
                }
            }
            "dt_meanfield" => {
                cfg.dt_meanfield = number(value, line)?;
                if cfg.dt_meanfield <= 0.0 {
                    return Err(err(line, "dt_meanfield must be > 0"));
                }
            }
            "flexible_q_bins" => {
                cfg.flexible_q_bins = integer(value, line, key)?;
                if cfg.flexible_q_bins < 1 {
                    return Err(err(line, "flexible_q_bins must be >= 1"));
                }
            }
            "eps0" => {
                let e = unit_interval(value, line, key)?;
                if e <= 0.0 {
                    return Err(err(line, "eps0 must be > 0"));
                }
                cfg.eps0 = Some(e);
            }
            _ => unreachable!("key list checked above"),
        }
    }

    for section in &sections {
        match section.kind {
            SectionKind::Stubborn => cfg.stubborn_groups.push(stubborn_group(section)?),
            SectionKind::Flexible => {
                cfg.flexible_groups
                    .extend(flexible_groups(section, cfg.flexible_q_bins, cfg.eps0)?)
            }
        }
    }

    let first_line = |kind: SectionKind| {
        sections
            .iter()
            .find(|s| s.kind == kind)
            .map(|s| s.line)
            .unwrap_or(0)
    };
    for (kind, groups, needed, name) in [
        (
            SectionKind::Stubborn,
            &cfg.stubborn_groups,
            cfg.alpha0 > 0.0,
            "stubborn",
        ),
        (
            SectionKind::Flexible,
            &cfg.flexible_groups,
            cfg.alpha0 < 1.0,
            "flexible",
        ),
    ] {
        if !needed {
            continue;
        }
        if groups.is_empty() {
            let line = line_of("alpha0").unwrap_or(0);
            return Err(err(
                line,
                format!(
                    "alpha0 = {} requires at least one [{name}] section",
                    cfg.alpha0
                ),
            ));
        }
        let total: f64 = groups.iter().map(|g| g.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(err(
                first_line(kind),
                format!("{name} weights sum to {total}, expected 1"),
            ));
        }
    }

    if cfg.sigma > 0.0 {
        if let Some(bound) = cfg.noise.noise_support_bound(cfg.gamma) {
            if cfg.sigma * 3f64.sqrt() > bound + 1e-12 {
                return Err(err(
                    sigma_line,
                    format!(
                        "sigma {} not admissible: sigma*sqrt(3) must be <= {} for {} noise at gamma {}",
                        cfg.sigma, bound, cfg.noise, cfg.gamma
                    ),
                ));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn stubborn_group(section: &Section) -> Result<GroupSpec> {
    let (w, wl) = section.require("weight")?;
    let weight = number(w, wl)?;
    if !(weight > 0.0 && weight <= 1.0) {
        return Err(err(wl, format!("weight {weight} out of (0,1]")));
    }
    let (p, pl) = section.require("p")?;
    let p = unit_interval(p, pl, "p")?;
    if let Some((q, ql)) = section.get("q") {
        if number(q, ql)? != 0.0 {
            return Err(err(ql, "stubborn sections must have q = 0"));
        }
    }
    let (d, dl) = section.require("w_dist")?;
    let w0 = d.parse::<OpinionDist>().map_err(|e| err(dl, e))?;
    Ok(GroupSpec::stubborn(weight, p, w0))
}

fn flexible_groups(section: &Section, bins: usize, eps0: Option<f64>) -> Result<Vec<GroupSpec>> {
    let (w, wl) = section.require("weight")?;
    let weight = number(w, wl)?;
    if !(weight > 0.0 && weight <= 1.0) {
        return Err(err(wl, format!("weight {weight} out of (0,1]")));
    }
    let (d, dl) = section.require("w_dist")?;
    let w0 = d.parse::<OpinionDist>().map_err(|e| err(dl, e))?;
    let (p_raw, pl) = section.require("p")?;
    let persuasion = if p_raw.replace(' ', "") == "1-q" {
        Persuasion::ComplementOfQ
    } else {
        Persuasion::Fixed(unit_interval(p_raw, pl, "p")?)
    };

    let (q_raw, ql) = section.require("q")?;
    let (q_lo, q_hi) = if q_raw.contains('(') {
        match q_raw.parse::<OpinionDist>().map_err(|e| err(ql, e))? {
            OpinionDist::Uniform(a, b) => (a, b),
            OpinionDist::Point(a) => (a, a),
        }
    } else {
        let q = number(q_raw, ql)?;
        (q, q)
    };
    if !(0.0..=1.0).contains(&q_lo) || !(0.0..=1.0).contains(&q_hi) {
        return Err(err(ql, format!("q range [{q_lo}, {q_hi}] out of [0,1]")));
    }
    if q_lo <= 0.0 {
        return Err(err(
            ql,
            "flexible q must be > 0 (use a [stubborn] section for q = 0)",
        ));
    }
    if let Some(e) = eps0 {
        if q_lo < e {
            return Err(err(ql, format!("q {q_lo} below declared eps0 {e}")));
        }
    }

    let groups = if q_lo == q_hi {
        vec![GroupSpec::new(weight, persuasion.value(q_lo), q_lo, w0)]
    } else {
        GroupSpec::q_binned(weight, q_lo, q_hi, persuasion, w0, bins)
    };
    for g in &groups {
        if !(0.0..=1.0).contains(&g.p) {
            return Err(err(pl, format!("p {} out of [0,1]", g.p)));
        }
    }
    Ok(groups)
}

/// Writes `cfg` in the scenario format with every group spelled out.
/// `parse_config(&emit_config(cfg)) == cfg` for valid configs.
pub fn emit_config(cfg: &ScenarioConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n_agents = {}", cfg.n_agents);
    let _ = writeln!(out, "alpha0 = {:?}", cfg.alpha0);
    let _ = writeln!(out, "gamma = {:?}", cfg.gamma);
    let _ = writeln!(out, "sigma = {:?}", cfg.sigma);
    let _ = writeln!(out, "noise = {}", cfg.noise);
    let _ = writeln!(out, "tau_end = {:?}", cfg.tau_end);
    let _ = writeln!(out, "record_every = {:?}", cfg.record_every);
    let _ = writeln!(out, "seed = {}", cfg.seed);
    let _ = writeln!(out, "quantile_points = {}", cfg.quantile_points);
    let _ = writeln!(out, "dt_meanfield = {:?}", cfg.dt_meanfield);
    let _ = writeln!(out, "flexible_q_bins = {}", cfg.flexible_q_bins);
    if let Some(e) = cfg.eps0 {
        let _ = writeln!(out, "eps0 = {e:?}");
    }
    for (name, groups) in [
        ("stubborn", &cfg.stubborn_groups),
        ("flexible", &cfg.flexible_groups),
    ] {
        for g in groups {
            let _ = writeln!(out, "\n[{name}]");
            let _ = writeln!(out, "weight = {:?}", g.weight);
            let _ = writeln!(out, "p = {:?}", g.p);
            let _ = writeln!(out, "q = {:?}", g.q);
            let _ = writeln!(out, "w_dist = {}", g.w0);
        }
    }
    out
}
