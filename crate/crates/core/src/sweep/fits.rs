use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::read_series;
use crate::error::{Error, Result};
use crate::observables::{fit_log_in_t, fit_power_law_in_w, late_time_mean, FitResult, FitWindow};

/// Power law of the late-time autocorrelation across `W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawFitSpec {
    #[serde(default)]
    pub w_min: Option<f64>,
    #[serde(default)]
    pub w_max: Option<f64>,
    /// Share of the recorded cycles averaged as "late time".
    #[serde(default = "default_fraction")]
    pub late_fraction: f64,
    #[serde(default = "default_late_t_min")]
    pub t_min: f64,
}

/// Logarithmic growth `F = a + b ln t` of the QFI, per `W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogFitSpec {
    #[serde(default = "default_log_t_min")]
    pub t_min: f64,
    #[serde(default)]
    pub t_max: Option<f64>,
}

fn default_fraction() -> f64 {
    0.2
}

fn default_late_t_min() -> f64 {
    1000.0
}

fn default_log_t_min() -> f64 {
    10.0
}

impl Default for PowerLawFitSpec {
    fn default() -> Self {
        PowerLawFitSpec { w_min: None, w_max: None, late_fraction: default_fraction(), t_min: default_late_t_min() }
    }
}

impl Default for LogFitSpec {
    fn default() -> Self {
        LogFitSpec { t_min: default_log_t_min(), t_max: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    #[serde(default)]
    pub power_law: Option<PowerLawFitSpec>,
    #[serde(default)]
    pub log: Option<LogFitSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    /// Set for per-`W` fits.
    #[serde(rename = "W")]
    pub w: Option<f64>,
    #[serde(flatten)]
    pub fit: FitResult,
}

/// `(W, [(t, A, F_Q)])` with trajectory-averaged points.
type SeriesByW = Vec<(f64, Vec<(f64, f64, f64)>)>;

/// Trajectory-averaged `(t, A, F_Q)` per `W`, in ascending `W` and `t`.
fn series_by_w(path: &Path) -> Result<SeriesByW> {
    let rows = read_series(path)?;
    let mut acc: BTreeMap<(u64, u64), (f64, f64, usize)> = BTreeMap::new();
    let mut ws: BTreeMap<u64, f64> = BTreeMap::new();
    for r in &rows {
        // Positive floats order like their bit patterns.
        let key = r.w.to_bits();
        ws.insert(key, r.w);
        let e = acc.entry((key, r.t)).or_insert((0.0, 0.0, 0));
        e.0 += r.a;
        e.1 += r.fq;
        e.2 += 1;
    }
    Ok(ws
        .into_iter()
        .map(|(key, w)| {
            let pts = acc
                .range((key, 0)..=(key, u64::MAX))
                .map(|(&(_, t), &(a, fq, k))| (t as f64, a / k as f64, fq / k as f64))
                .collect();
            (w, pts)
        })
        .collect())
}

/// Applies the configured fits to a series file and writes them as JSON.
pub fn run_fits(series: &Path, spec: &FitSpec, out: Option<&Path>) -> Result<Vec<FitRecord>> {
    let data = series_by_w(series)?;
    if data.is_empty() {
        return Err(Error::EmptyWindow(format!("{} holds no rows", series.display())));
    }
    let mut records = Vec::new();
    if let Some(p) = &spec.power_law {
        let window = FitWindow::new(p.w_min.unwrap_or(f64::MIN), p.w_max.unwrap_or(f64::MAX));
        let mut points = Vec::new();
        for (w, pts) in &data {
            if !window.contains(*w) {
                continue;
            }
            let a: Vec<(f64, f64)> = pts.iter().map(|&(t, a, _)| (t, a)).collect();
            points.push((*w, late_time_mean(&a, p.late_fraction, p.t_min)?));
        }
        let mut fit = fit_power_law_in_w(&points, window)?;
        fit.window = effective_window(points.iter().map(|p| p.0));
        records.push(FitRecord { w: None, fit });
    }
    if let Some(l) = &spec.log {
        let window = FitWindow::new(l.t_min, l.t_max.unwrap_or(f64::MAX));
        for (w, pts) in &data {
            let f: Vec<(f64, f64)> = pts.iter().map(|&(t, _, fq)| (t, fq)).collect();
            let mut fit = fit_log_in_t(&f, window)?;
            fit.window = effective_window(f.iter().map(|p| p.0).filter(|&t| window.contains(t)));
            records.push(FitRecord { w: Some(*w), fit });
        }
    }
    if let Some(out) = out {
        let json = serde_json::to_string_pretty(&records).expect("fit serialization is infallible");
        std::fs::write(out, json + "\n").map_err(|e| Error::io(out, e))?;
    }
    Ok(records)
}

/// The abscissa range actually covered by the fitted points.
fn effective_window(xs: impl Iterator<Item = f64>) -> FitWindow {
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    FitWindow::new(lo, hi)
}
