//! Eigenstate expectation values, microcanonical averages and ETH indicators.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::hamiltonian::{BasisTag, OperatorMatrix};
use crate::spectral::Spectrum;

/// Closed energy interval `[center - half_width, center + half_width]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindow {
    pub center: f64,
    pub half_width: f64,
}

impl EnergyWindow {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !center.is_finite() {
            return Err(param_err!("window needs a finite center and positive half width"));
        }
        Ok(Self { center, half_width })
    }

    #[inline]
    pub fn contains(&self, energy: f64) -> bool {
        (energy - self.center).abs() <= self.half_width
    }

    pub fn level_statistics_preset(sites: usize, omega: f64) -> Self {
        WindowPreset::LEVEL_STATISTICS.for_sites(sites, omega)
    }

    pub fn eth_preset(sites: usize, omega: f64) -> Self {
        WindowPreset::ETH.for_sites(sites, omega)
    }
}

/// Window placement rule in units of omega, depending on the parity of `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowPreset {
    pub center_even: f64,
    pub center_odd: f64,
    pub half_width: f64,
}

impl WindowPreset {
    /// Spacing statistics: half width 0.45, centered at 0.5 (even L) or 1 (odd L).
    pub const LEVEL_STATISTICS: Self = Self { center_even: 0.5, center_odd: 1.0, half_width: 0.45 };
    /// ETH indicators: half width 0.5, centered at 1 (even L) or 1.5 (odd L).
    pub const ETH: Self = Self { center_even: 1.0, center_odd: 1.5, half_width: 0.5 };

    pub fn for_sites(&self, sites: usize, omega: f64) -> EnergyWindow {
        let center = if sites % 2 == 0 { self.center_even } else { self.center_odd };
        EnergyWindow { center: center * omega, half_width: self.half_width * omega }
    }
}

/// `(E_alpha, O_alpha_alpha)` pairs for one observable.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EevSeries {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub observable: String,
    pub source: BasisTag,
}

impl EevSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn in_window<'a>(&'a self, window: &'a EnergyWindow) -> impl Iterator<Item = f64> + 'a {
        self.energies
            .iter()
            .zip(&self.values)
            .filter(move |(e, _)| window.contains(**e))
            .map(|(_, &v)| v)
    }

    /// Every value shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v + c).collect(), ..self.clone() }
    }
}

/// `O_aa = v_a^T O v_a` for every eigenvector of `spec`.
pub fn eigenstate_expectation_values(
    spec: &Spectrum,
    observable: &OperatorMatrix,
    label: &str,
) -> Result<EevSeries> {
    let vectors = spec.vectors()?;
    if observable.tag() != spec.source || observable.dim() != vectors.nrows() {
        return Err(param_err!(
            "observable in {} (dim {}) does not match spectrum in {} (dim {})",
            observable.tag(),
            observable.dim(),
            spec.source,
            vectors.nrows()
        ));
    }
    let ov = observable.to_faer() * vectors;
    let values = (0..vectors.ncols())
        .map(|a| (0..vectors.nrows()).map(|i| vectors[(i, a)] * ov[(i, a)]).sum())
        .collect();
    Ok(EevSeries {
        energies: spec.eigenvalues.clone(),
        values,
        observable: label.to_string(),
        source: spec.source,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MicrocanonicalAverage {
    pub mean: f64,
    pub n_states: usize,
}

pub fn microcanonical_average(eevs: &EevSeries, window: &EnergyWindow) -> Result<MicrocanonicalAverage> {
    let (sum, n) = eevs.in_window(window).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        return Err(param_err!("no eigenstates in window {window:?}"));
    }
    Ok(MicrocanonicalAverage { mean: sum / n as f64, n_states: n })
}

/// Strong and weak ETH indicators over one window.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EthIndicators {
    /// Largest absolute deviation from the window average.
    pub i_s: f64,
    /// Largest signed deviation `max (O_aa - mean)`.
    pub i_s_signed: f64,
    /// Root-mean-square deviation from the window average.
    pub i_w: f64,
    pub mean: f64,
    pub window: EnergyWindow,
    pub n_states: usize,
}

pub fn eth_indicators(eevs: &EevSeries, window: &EnergyWindow) -> Result<EthIndicators> {
    let avg = microcanonical_average(eevs, window)?;
    if avg.n_states < 2 {
        return Err(param_err!("ETH indicators need at least 2 states in the window, found {}", avg.n_states));
    }
    let mut i_s: f64 = 0.0;
    let mut i_s_signed = f64::NEG_INFINITY;
    let mut sq = 0.0;
    for v in eevs.in_window(window) {
        let d = v - avg.mean;
        i_s = i_s.max(d.abs());
        i_s_signed = i_s_signed.max(d);
        sq += d * d;
    }
    Ok(EthIndicators {
        i_s,
        i_s_signed,
        i_w: (sq / avg.n_states as f64).sqrt(),
        mean: avg.mean,
        window: *window,
        n_states: avg.n_states,
    })
}

/// Power-law fit `I_w ~ D^-gamma`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingFit {
    pub gamma: f64,
    pub gamma_err: f64,
    /// Intercept of `ln I_w` against `ln D`.
    pub log_prefactor: f64,
    pub residuals: Vec<f64>,
    pub dim_range: (f64, f64),
    pub accepted: bool,
}

/// Ordinary least squares of `y` on `x`: `(slope, intercept, slope_se,
/// intercept_se, residuals)`.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    let dof = (n - 2.0).max(1.0);
    let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof;
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    (slope, intercept, slope_se, intercept_se, residuals)
}

/// Fits `ln I_w = c - gamma ln D` by ordinary least squares.
pub fn fit_weak_decay(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(param_err!("need at least 3 points, got {}", points.len()));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(param_err!("sector dimensions must be strictly increasing"));
    }
    if points.iter().any(|&(d, i)| !(d > 0.0) || !(i > 0.0)) {
        return Err(param_err!("dimensions and I_w must be positive to take logarithms"));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, se, _, residuals) = ols(&x, &y);
    let gamma = -slope;
    Ok(ScalingFit {
        gamma,
        gamma_err: se,
        log_prefactor: intercept,
        residuals,
        dim_range: (points[0].0, points[points.len() - 1].0),
        accepted: gamma > 0.0,
    })
}

/// Linear fit `1 / gamma = a * ell + b`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaCurveFit {
    pub a: f64,
    pub b: f64,
    pub a_err: f64,
    pub b_err: f64,
    /// Coefficient of determination of the line through `(ell, 1/gamma)`.
    pub r_squared: f64,
    /// False when some error bar was zero and the fit fell back to unweighted.
    pub weighted: bool,
}

/// Fits `1/gamma` against `ell`; points are `(ell, gamma, gamma_err)`. Error
/// bars propagate as `gamma_err / gamma^2`.
pub fn fit_gamma_curve(points: &[(f64, f64, f64)]) -> Result<GammaCurveFit> {
    if points.len() < 3 {
        return Err(param_err!("need at least 3 constraint radii, got {}", points.len()));
    }
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(param_err!("all decay exponents must be positive"));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| 1.0 / p.1).collect();
    let sigma: Vec<f64> = points.iter().map(|p| p.2 / (p.1 * p.1)).collect();
    let weighted = sigma.iter().all(|&s| s > 0.0 && s.is_finite());

    let my = y.iter().sum::<f64>() / y.len() as f64;
    let (a, b, a_err, b_err) = if weighted {
        let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s)).collect();
        let sw: f64 = w.iter().sum();
        let swx: f64 = w.iter().zip(&x).map(|(w, x)| w * x).sum();
        let swy: f64 = w.iter().zip(&y).map(|(w, y)| w * y).sum();
        let swxx: f64 = w.iter().zip(&x).map(|(w, x)| w * x * x).sum();
        let swxy: f64 = w.iter().zip(&x).zip(&y).map(|((w, x), y)| w * x * y).sum();
        let det = sw * swxx - swx * swx;
        let a = (sw * swxy - swx * swy) / det;
        let b = (swxx * swy - swx * swxy) / det;
        (a, b, (sw / det).sqrt(), (swxx / det).sqrt())
    } else {
        let (a, b, a_err, b_err, _) = ols(&x, &y);
        (a, b, a_err, b_err)
    };
    let ss_res: f64 = x.iter().zip(&y).map(|(x, y)| (y - (a * x + b)).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(GammaCurveFit { a, b, a_err, b_err, r_squared, weighted })
}
