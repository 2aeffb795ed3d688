//! CSV and manifest emission.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::collision_sim::DensityGrid;
use crate::metrics::TimeSeries;

/// Renders `x` with 17 significant digits, enough for a lossless round trip.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

pub fn timeseries_header(n_groups: usize) -> String {
    let mut cols = vec![
        "tau".to_string(),
        "m_t".into(),
        "max_abs_mean_error".into(),
        "w1_to_limit".into(),
        "min_w".into(),
        "max_w".into(),
    ];
    cols.extend((1..=n_groups).map(|i| format!("mean_g{i}")));
    cols.extend((1..=n_groups).map(|i| format!("diam_g{i}")));
    cols.join(",")
}

pub fn timeseries_csv(series: &TimeSeries) -> String {
    let mut out = timeseries_header(series.n_groups);
    out.push('\n');
    for row in &series.rows {
        let mut fields = vec![
            fmt_num(row.tau),
            fmt_num(row.m_t),
            fmt_num(row.max_abs_mean_error),
            fmt_num(row.w1_to_limit),
            fmt_num(row.min_w),
            fmt_num(row.max_w),
        ];
        fields.extend(row.group_means.iter().map(|&x| fmt_num(x)));
        fields.extend(row.group_diameters.iter().map(|&x| fmt_num(x)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn density_csv(grid: &DensityGrid, tau: f64) -> String {
    let mut out = format!(
        "# tau={} subset={} n_w={} n_q={}\n",
        fmt_num(tau),
        grid.subset.name(),
        grid.n_w,
        grid.n_q
    );
    for row in grid.mass.chunks(grid.n_q) {
        let line: Vec<String> = row.iter().map(|&m| fmt_num(m)).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// Run metadata; config lines follow the `#` header so the whole file
/// parses as a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    pub events: u64,
    pub noise_resamples: u64,
    pub noise_fallbacks: u64,
    /// Fully resolved scenario, in scenario-file form.
    pub config: String,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# opinion-kinetics run manifest");
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# version: {}", self.version);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# wall_clock_seconds: {:.3}", self.wall_clock_seconds);
        let _ = writeln!(out, "# events: {}", self.events);
        let _ = writeln!(out, "# noise_resamples: {}", self.noise_resamples);
        let _ = writeln!(out, "# noise_fallbacks: {}", self.noise_fallbacks);
        out.push_str(&self.config);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_num(-0.25), "-2.5000000000000000e-1");
        assert_eq!(fmt_num(0.0), "0.0000000000000000e0");
        for x in [0.1 + 0.2, -1.0 / 3.0, 1e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn header_layout() {
        assert_eq!(
            timeseries_header(2),
            "tau,m_t,max_abs_mean_error,w1_to_limit,min_w,max_w,mean_g1,mean_g2,diam_g1,diam_g2"
        );
    }
}
