//! Autocorrelation, quantum Fisher information and the fits applied to them.

use std::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{trajectory_rng, BackendKind, Bitstring, QuantumState};
use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Default number of bootstrap resamples.
pub const DEFAULT_BOOTSTRAP: usize = 200;

/// Computational-basis product state `⊗_j |σ_j⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialPattern {
    pub bits: Vec<bool>,
}

impl InitialPattern {
    pub fn all_up(n: usize) -> Self {
        InitialPattern { bits: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// `A = (1/N) Σ_i (1 - 2σ_i) ⟨Z_i⟩`.
pub fn autocorrelation(z: &[f64], pattern: &InitialPattern) -> Result<f64> {
    if z.len() != pattern.len() {
        return Err(Error::LengthMismatch { expected: pattern.len(), found: z.len() });
    }
    if z.is_empty() {
        return Err(Error::InvalidSize("autocorrelation of an empty register".into()));
    }
    let sum: f64 = z.iter().zip(&pattern.bits).map(|(&zi, &s)| if s { -zi } else { zi }).sum();
    Ok(sum / z.len() as f64)
}

/// `4 (⟨M²⟩ - ⟨M⟩²)`, clamped at zero against rounding.
pub fn qfi_from_moments(m1: f64, m2: f64) -> f64 {
    (4.0 * (m2 - m1 * m1)).max(0.0)
}

/// Exact QFI of a pure state from the variance of the total magnetization.
pub fn qfi_exact<S: QuantumState>(state: &S) -> f64 {
    let (m1, m2) = state.magnetization_moments();
    qfi_from_moments(m1, m2)
}

/// `4 Σ_{i,j} (⟨Z_i Z_j⟩ - ⟨Z_i⟩⟨Z_j⟩)` from one- and two-point functions.
pub fn qfi_from_correlators(z: &[f64], zz: &[Vec<f64>]) -> Result<f64> {
    if zz.len() != z.len() {
        return Err(Error::LengthMismatch { expected: z.len(), found: zz.len() });
    }
    let mut sum = 0.0;
    for (i, row) in zz.iter().enumerate() {
        if row.len() != z.len() {
            return Err(Error::LengthMismatch { expected: z.len(), found: row.len() });
        }
        for (j, &c) in row.iter().enumerate() {
            sum += c - z[i] * z[j];
        }
    }
    Ok(4.0 * sum)
}

/// Magnetization variance witness under global depolarization with
/// attenuation `f`: the state is `f|ψ⟩⟨ψ| + (1 - f) I/2^N`.
pub fn qfi_attenuated(n: usize, m1: f64, m2: f64, f: f64) -> f64 {
    let n = n as f64;
    (4.0 * (n + f * (m2 - n) - f * f * m1 * m1)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiEstimate {
    pub estimate: f64,
    pub bootstrap_err: f64,
}

fn unbiased_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    let mean = sum / n as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0)
}

/// `4 · Var(m)` over the shots with `m = N - 2·popcount`, using the unbiased
/// variance, and the spread of the estimator over `resamples` nonparametric
/// bootstrap resamples. Resample `b` draws from stream `b` of `seed`.
pub fn qfi_from_samples(samples: &[Bitstring], resamples: usize, seed: u64) -> Result<QfiEstimate> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, found: samples.len() });
    }
    let m: Vec<f64> = samples.iter().map(|b| b.magnetization() as f64).collect();
    let estimate = 4.0 * unbiased_variance(m.iter().copied());
    if resamples < 2 {
        return Ok(QfiEstimate { estimate, bootstrap_err: 0.0 });
    }
    let boot: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = trajectory_rng(seed, b as u64);
            let draw: Vec<f64> = (0..m.len()).map(|_| m[rng.random_range(0..m.len())]).collect();
            4.0 * unbiased_variance(draw.iter().copied())
        })
        .collect();
    Ok(QfiEstimate { estimate, bootstrap_err: unbiased_variance(boot.iter().copied()).sqrt() })
}

/// Sampled QFI statistics over Haar-random pure states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarBaseline {
    pub n: usize,
    pub num_samples: usize,
    pub fq_mean: f64,
    pub fq_std: f64,
    /// Standard error of `fq_mean`.
    pub fq_sem: f64,
    pub density_mean: f64,
    pub density_std: f64,
}

/// Largest register the dense Haar sampler accepts.
pub const HAAR_MAX_QUBITS: usize = 14;

/// Draws normalized complex Gaussian vectors (sample `k` from stream `k` of
/// `seed`) and reports the mean and spread of the exact QFI and of `F_Q/N`.
pub fn haar_qfi_baseline(n: usize, num_samples: usize, seed: u64) -> Result<HaarBaseline> {
    if n == 0 || n > HAAR_MAX_QUBITS {
        return Err(Error::InvalidParameter(format!("Haar sampling supports 1..={HAAR_MAX_QUBITS} qubits, got {n}")));
    }
    if num_samples < 2 {
        return Err(Error::InsufficientData { needed: 2, found: num_samples });
    }
    let values: Vec<f64> = (0..num_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, k as u64);
            let mut amps: Vec<C64> =
                (0..1usize << n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
            let norm = amps.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            qfi_exact(&StateVector::from_amplitudes(amps).expect("power-of-two length"))
        })
        .collect();
    let mean = values.iter().sum::<f64>() / num_samples as f64;
    let std = unbiased_variance(values.iter().copied()).sqrt();
    Ok(HaarBaseline {
        n,
        num_samples,
        fq_mean: mean,
        fq_std: std,
        fq_sem: std / (num_samples as f64).sqrt(),
        density_mean: mean / n as f64,
        density_std: std / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    /// `A = c · W^a`, coefficients `[c, a]`.
    PowerLawInW,
    /// `F = a + b ln t`, coefficients `[a, b]`.
    LogInT,
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitModel::PowerLawInW => "power_law_in_w",
            FitModel::LogInT => "log_in_t",
        })
    }
}

/// Closed interval of the abscissa (`W` or `t`) admitted into a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    pub const ALL: FitWindow = FitWindow { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        FitWindow { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub coeffs: [f64; 2],
    pub window: FitWindow,
    /// Residual 2-norm in the fitted (linearized) coordinates.
    pub residual: f64,
    /// Coefficient of determination; 0 when the data have no variance.
    pub r2: f64,
    pub points: usize,
}

struct LineFit {
    intercept: f64,
    slope: f64,
    ss_res: f64,
    ss_tot: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::Domain("fit abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot = ys.iter().map(|y| (y - my) * (y - my)).sum();
    Ok(LineFit { intercept, slope, ss_res, ss_tot })
}

fn select(points: &[(f64, f64)], window: FitWindow) -> Result<Vec<(f64, f64)>> {
    let inside: Vec<(f64, f64)> = points.iter().copied().filter(|&(x, _)| window.contains(x)).collect();
    match inside.len() {
        0 => Err(Error::EmptyWindow(format!("no points in [{}, {}]", window.lo, window.hi))),
        k if k < 3 => Err(Error::InsufficientData { needed: 3, found: k }),
        _ => Ok(inside),
    }
}

fn finish(model: FitModel, coeffs: [f64; 2], window: FitWindow, fit: &LineFit, points: usize) -> Result<FitResult> {
    if !coeffs.iter().all(|c| c.is_finite()) {
        return Err(Error::Domain(format!("non-finite fit coefficients {coeffs:?}")));
    }
    let r2 = if fit.ss_tot > 0.0 { 1.0 - fit.ss_res / fit.ss_tot } else { 0.0 };
    Ok(FitResult { model, coeffs, window, residual: fit.ss_res.sqrt(), r2, points })
}

/// Least-squares line through `(ln W, ln A)` for the points with `W` in `window`.
pub fn fit_power_law_in_w(points: &[(f64, f64)], window: FitWindow) -> Result<FitResult> {
    let pts = select(points, window)?;
    if let Some(&(w, a)) = pts.iter().find(|&&(w, a)| !(w > 0.0 && a > 0.0)) {
        return Err(Error::Domain(format!("power-law fit needs W > 0 and A > 0, got ({w}, {a})")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let fit = least_squares(&xs, &ys)?;
    finish(FitModel::PowerLawInW, [fit.intercept.exp(), fit.slope], window, &fit, pts.len())
}

/// Least squares of `F` against `ln t` for the points with `t` in `window`.
pub fn fit_log_in_t(points: &[(f64, f64)], window: FitWindow) -> Result<FitResult> {
    let pts = select(points, window)?;
    if let Some(&(t, _)) = pts.iter().find(|&&(t, _)| !(t >= 1.0)) {
        return Err(Error::Domain(format!("log fit needs t >= 1, got {t}")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let fit = least_squares(&xs, &ys)?;
    finish(FitModel::LogInT, [fit.intercept, fit.slope], window, &fit, pts.len())
}

/// Mean over the final `fraction` of the recorded points, restricted to
/// `t >= t_min`. Points must be sorted by `t`.
pub fn late_time_mean(points: &[(f64, f64)], fraction: f64, t_min: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("window fraction must lie in (0, 1], got {fraction}")));
    }
    let take = ((points.len() as f64 * fraction).ceil() as usize).max(1).min(points.len());
    let tail: Vec<f64> = points[points.len() - take..].iter().filter(|p| p.0 >= t_min).map(|p| p.1).collect();
    if tail.is_empty() {
        return Err(Error::EmptyWindow(format!("no recorded cycles with t >= {t_min} in the final {fraction} of the series")));
    }
    Ok(tail.iter().sum::<f64>() / tail.len() as f64)
}

/// One recorded time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: u64,
    pub w: f64,
    pub a: f64,
    pub a_err: f64,
    pub fq: f64,
    pub fq_err: f64,
    pub s_half: Option<f64>,
    pub backend: BackendKind,
    pub noise: String,
    pub shots: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    records: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; `t` must increase strictly and errors be nonnegative.
    pub fn push(&mut self, record: ObservableRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.t <= last.t {
                return Err(Error::InvalidParameter(format!("t = {} does not follow t = {}", record.t, last.t)));
            }
        }
        if !(record.a_err >= 0.0 && record.fq_err >= 0.0) {
            return Err(Error::InvalidParameter("error bars must be nonnegative".into()));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[ObservableRecord] {
        &self.records
    }

    pub fn autocorrelation_points(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t as f64, r.a)).collect()
    }

    pub fn qfi_points(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t as f64, r.fq)).collect()
    }
}
