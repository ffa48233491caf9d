//! Weighted covariance and correlation estimation.
//!
//! Two calibrations are supported: equal weighting of every observation
//! ("long-term") and exponential decay with a half-life in periods
//! ("short-term", 12 months by default). Moments use the population
//! convention with weighted means.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

/// Smallest eigenvalue accepted for a correlation or covariance matrix.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Half-life of the short-term calibration, in months.
pub const SHORT_TERM_HALF_LIFE: f64 = 12.0;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
const CLIP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    EqualWeight,
    ExponentialHalfLife(f64),
}

impl WeightScheme {
    pub fn long_term() -> Self {
        WeightScheme::EqualWeight
    }

    pub fn short_term() -> Self {
        WeightScheme::ExponentialHalfLife(SHORT_TERM_HALF_LIFE)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::EqualWeight => Ok(()),
            WeightScheme::ExponentialHalfLife(h) if h.is_finite() && h > 0.0 => Ok(()),
            WeightScheme::ExponentialHalfLife(h) => Err(invalid(format!("half-life must be positive, got {h}"))),
        }
    }

    /// Fewest observations for which an estimate is not flagged as short:
    /// two half-lives for the exponential scheme, two otherwise.
    pub fn recommended_observations(&self) -> usize {
        match *self {
            WeightScheme::EqualWeight => 2,
            WeightScheme::ExponentialHalfLife(h) => ((2.0 * h).ceil() as usize).max(2),
        }
    }

    /// Weights aligned with a chronologically ordered sample (oldest first).
    pub fn chronological_weights(&self, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        match *self {
            WeightScheme::EqualWeight => {
                if n == 0 {
                    return Err(invalid("cannot weight an empty sample"));
                }
                Ok(vec![1.0 / n as f64; n])
            }
            WeightScheme::ExponentialHalfLife(h) => {
                let mut w = ewma_weights(h, n)?;
                w.reverse();
                Ok(w)
            }
        }
    }
}

/// Exponential weights indexed by age (`k = 0` is the most recent period),
/// `w_k ∝ 2^(-k / half_life)`, normalized to sum to one.
pub fn ewma_weights(half_life: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("cannot weight an empty sample"));
    }
    if !(half_life.is_finite() && half_life > 0.0) {
        return Err(invalid(format!("half-life must be positive, got {half_life}")));
    }
    let raw: Vec<f64> = (0..n).map(|k| (-(k as f64) / half_life).exp2()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub cov_xy: f64,
    pub var_x: f64,
    pub var_y: f64,
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(invalid("weights must be finite and non-negative"));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(invalid(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Weighted mean taken around the first observation so that a constant
/// series has an exact mean.
fn weighted_mean(x: &[f64], w: &[f64]) -> f64 {
    let Some(&x0) = x.first() else { return 0.0 };
    x0 + x.iter().zip(w).map(|(a, b)| (a - x0) * b).sum::<f64>()
}

pub fn weighted_moments(x: &[f64], y: &[f64], w: &[f64]) -> Result<WeightedMoments> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(invalid(format!(
            "length mismatch: x={}, y={}, weights={}",
            x.len(),
            y.len(),
            w.len()
        )));
    }
    check_weights(w)?;
    let mean_x = weighted_mean(x, w);
    let mean_y = weighted_mean(y, w);
    let (mut cov_xy, mut var_x, mut var_y) = (0.0, 0.0, 0.0);
    for ((a, b), wk) in x.iter().zip(y).zip(w) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        cov_xy += wk * dx * dy;
        var_x += wk * dx * dx;
        var_y += wk * dy * dy;
    }
    Ok(WeightedMoments {
        mean_x,
        mean_y,
        cov_xy,
        var_x,
        var_y,
    })
}

/// Treats a variance as zero when it is indistinguishable from rounding noise
/// relative to the magnitude of the data.
fn is_degenerate(var: f64, x: &[f64]) -> bool {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    var <= (1e-12 * scale).powi(2)
}

fn clip_corr(rho: f64) -> f64 {
    debug_assert!(rho.abs() <= 1.0 + CLIP_TOLERANCE, "correlation overshoot {rho}");
    rho.clamp(-1.0, 1.0)
}

/// Weighted correlation of two chronologically ordered series.
pub fn weighted_corr(x: &[f64], y: &[f64], scheme: WeightScheme) -> Result<f64> {
    if x.len() != y.len() {
        return Err(invalid(format!("length mismatch: x={}, y={}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: x.len(),
        });
    }
    let w = scheme.chronological_weights(x.len())?;
    let m = weighted_moments(x, y, &w)?;
    if is_degenerate(m.var_x, x) {
        return Err(Error::DegenerateSeries("x".into()));
    }
    if is_degenerate(m.var_y, y) {
        return Err(Error::DegenerateSeries("y".into()));
    }
    Ok(clip_corr(m.cov_xy / (m.var_x.sqrt() * m.var_y.sqrt())))
}

/// Several named series sampled on a shared, strictly increasing set of dates.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSeries {
    labels: Vec<String>,
    timestamps: Vec<NaiveDate>,
    /// period × series
    values: DMatrix<f64>,
}

/// Result of intersecting several dated series.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub series: AlignedSeries,
    /// Dates present in at least one input but dropped because some other
    /// input lacked them.
    pub dropped: usize,
}

impl AlignedSeries {
    pub fn new(labels: Vec<String>, timestamps: Vec<NaiveDate>, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != timestamps.len() || values.ncols() != labels.len() {
            return Err(invalid(format!(
                "matrix is {}x{} but there are {} timestamps and {} labels",
                values.nrows(),
                values.ncols(),
                timestamps.len(),
                labels.len()
            )));
        }
        if timestamps.len() < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                actual: timestamps.len(),
            });
        }
        if let Some(w) = timestamps.windows(2).find(|w| w[1] <= w[0]) {
            return Err(invalid(format!("timestamps not strictly increasing at {}", w[1])));
        }
        let unique: BTreeSet<_> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(invalid("duplicate series label"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("aligned series contain non-finite values"));
        }
        Ok(Self {
            labels,
            timestamps,
            values,
        })
    }

    /// Keeps only the dates present in every input.
    pub fn align(inputs: &[(String, Vec<(NaiveDate, f64)>)]) -> Result<Alignment> {
        if inputs.is_empty() {
            return Err(invalid("no series to align"));
        }
        let maps: Vec<BTreeMap<NaiveDate, f64>> = inputs
            .iter()
            .map(|(label, obs)| {
                let mut m = BTreeMap::new();
                for (d, v) in obs {
                    if m.insert(*d, *v).is_some() {
                        return Err(invalid(format!("series '{label}' has duplicate date {d}")));
                    }
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        let union: BTreeSet<NaiveDate> = maps.iter().flat_map(|m| m.keys().copied()).collect();
        let common: Vec<NaiveDate> = union
            .iter()
            .copied()
            .filter(|d| maps.iter().all(|m| m.contains_key(d)))
            .collect();
        let values = DMatrix::from_fn(common.len(), maps.len(), |r, c| maps[c][&common[r]]);
        let labels = inputs.iter().map(|(l, _)| l.clone()).collect();
        let dropped = union.len() - common.len();
        Ok(Alignment {
            series: AlignedSeries::new(labels, common, values)?,
            dropped,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        &self.timestamps
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n_periods(&self) -> usize {
        self.timestamps.len()
    }

    pub fn n_series(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }

    pub fn column_by_label(&self, label: &str) -> Option<Vec<f64>> {
        self.index_of(label).map(|j| self.column(j))
    }

    /// Period-over-period changes, stamped with the later date.
    pub fn differences(&self) -> Result<AlignedSeries> {
        let n = self.n_periods();
        let values = DMatrix::from_fn(n - 1, self.n_series(), |r, c| {
            self.values[(r + 1, c)] - self.values[(r, c)]
        });
        AlignedSeries::new(self.labels.clone(), self.timestamps[1..].to_vec(), values)
    }

    /// Appends later periods of the same set of series.
    pub fn concat(&self, later: &AlignedSeries) -> Result<AlignedSeries> {
        if self.labels != later.labels {
            return Err(invalid("cannot concatenate series with different labels"));
        }
        let n = self.n_periods();
        let values = DMatrix::from_fn(n + later.n_periods(), self.n_series(), |r, c| {
            if r < n {
                self.values[(r, c)]
            } else {
                later.values[(r - n, c)]
            }
        });
        let mut ts = self.timestamps.clone();
        ts.extend_from_slice(&later.timestamps);
        AlignedSeries::new(self.labels.clone(), ts, values)
    }
}

/// Symmetric correlation matrix with companion volatilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    labels: Vec<String>,
    rho: DMatrix<f64>,
    vols: Vec<f64>,
    min_eigenvalue: f64,
    n_obs: Option<usize>,
    short_sample: bool,
}

/// Smallest eigenvalue of the symmetrized matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

impl CorrelationMatrix {
    /// Validates a user-supplied matrix. The diagonal must be one, the
    /// matrix symmetric and every entry within `[-1, 1]`, all to 1e-12.
    pub fn new(labels: Vec<String>, rho: DMatrix<f64>, vols: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if rho.nrows() != n || rho.ncols() != n || vols.len() != n {
            return Err(invalid(format!(
                "correlation matrix is {}x{} with {} vols for {} labels",
                rho.nrows(),
                rho.ncols(),
                vols.len(),
                n
            )));
        }
        if let Some(v) = vols.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(invalid(format!("volatility must be finite and non-negative, got {v}")));
        }
        let mut rho = rho;
        for i in 0..n {
            if (rho[(i, i)] - 1.0).abs() > CLIP_TOLERANCE {
                return Err(invalid(format!(
                    "diagonal entry for '{}' is {}",
                    labels[i],
                    rho[(i, i)]
                )));
            }
            rho[(i, i)] = 1.0;
            for j in 0..i {
                let (a, b) = (rho[(i, j)], rho[(j, i)]);
                if !a.is_finite() || (a - b).abs() > CLIP_TOLERANCE {
                    return Err(invalid(format!(
                        "correlation between '{}' and '{}' is not symmetric",
                        labels[i], labels[j]
                    )));
                }
                if a.abs() > 1.0 + CLIP_TOLERANCE {
                    return Err(invalid(format!(
                        "correlation between '{}' and '{}' is {a}",
                        labels[i], labels[j]
                    )));
                }
                let c = a.clamp(-1.0, 1.0);
                rho[(i, j)] = c;
                rho[(j, i)] = c;
            }
        }
        let min_eigenvalue = min_eigenvalue(&rho);
        Ok(Self {
            labels,
            rho,
            vols,
            min_eigenvalue,
            n_obs: None,
            short_sample: false,
        })
    }

    pub fn identity(labels: Vec<String>, vols: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, DMatrix::identity(n, n), vols)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn vols(&self) -> &[f64] {
        &self.vols
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.rho[(self.index_of(a)?, self.index_of(b)?)])
    }

    pub fn vol(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.vols[i])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Whether the smallest eigenvalue clears `-PSD_TOLERANCE`.
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOLERANCE
    }

    /// Number of periods behind an estimated matrix.
    pub fn n_obs(&self) -> Option<usize> {
        self.n_obs
    }

    /// Set when the sample is shorter than the scheme's recommended length.
    pub fn short_sample(&self) -> bool {
        self.short_sample
    }

    /// `diag(vols) · rho · diag(vols)`
    pub fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.vols[i] * self.rho[(i, j)] * self.vols[j]
        })
    }
}

/// Estimates the full correlation matrix and volatilities of aligned series.
pub fn corr_matrix(series: &AlignedSeries, scheme: WeightScheme) -> Result<CorrelationMatrix> {
    let n = series.n_periods();
    let w = scheme.chronological_weights(n)?;
    let k = series.n_series();
    let columns: Vec<Vec<f64>> = (0..k).map(|j| series.column(j)).collect();
    let means: Vec<f64> = columns.iter().map(|c| weighted_mean(c, &w)).collect();
    let centered: Vec<Vec<f64>> = columns
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|v| v - m).collect())
        .collect();
    let cov = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).zip(&w).map(|((x, y), wk)| wk * x * y).sum() };
    let mut vols = Vec::with_capacity(k);
    for (j, c) in centered.iter().enumerate() {
        let var = cov(c, c);
        if is_degenerate(var, &columns[j]) {
            return Err(Error::DegenerateSeries(series.labels[j].clone()));
        }
        vols.push(var.sqrt());
    }
    let mut rho = DMatrix::identity(k, k);
    for i in 0..k {
        for j in 0..i {
            let r = clip_corr(cov(&centered[i], &centered[j]) / (vols[i] * vols[j]));
            rho[(i, j)] = r;
            rho[(j, i)] = r;
        }
    }
    let min_eigenvalue = min_eigenvalue(&rho);
    Ok(CorrelationMatrix {
        labels: series.labels.clone(),
        rho,
        vols,
        min_eigenvalue,
        n_obs: Some(n),
        short_sample: n < scheme.recommended_observations(),
    })
}
