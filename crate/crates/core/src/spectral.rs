//! Dense diagonalization and spectral statistics.

use faer::{Mat, Side};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::eth::EnergyWindow;
use crate::hamiltonian::{BasisTag, ModelParams, OperatorMatrix};

/// Default tolerance (in units of the flip energy) for treating two levels as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Eigenvalues in ascending order with optional orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Option<Mat<f64>>,
    pub source: BasisTag,
    pub params: Option<ModelParams>,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<f64>, source: BasisTag) -> Self {
        Self { eigenvalues, eigenvectors: None, source, params: None }
    }

    pub fn with_params(mut self, params: ModelParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Energy unit; 1 when no parameters are attached.
    pub fn omega(&self) -> f64 {
        self.params.map_or(1.0, |p| p.omega)
    }

    pub fn vectors(&self) -> Result<&Mat<f64>> {
        self.eigenvectors
            .as_ref()
            .ok_or_else(|| param_err!("spectrum was computed without eigenvectors"))
    }

    /// Eigenvector `alpha` as an owned vector.
    pub fn vector(&self, alpha: usize) -> Result<Vec<f64>> {
        let v = self.vectors()?;
        Ok((0..v.nrows()).map(|i| v[(i, alpha)]).collect())
    }
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// Complex-doubled matrices report each eigenvalue of the underlying
/// Hermitian block once; eigenvectors are not available for them.
pub fn diagonalize(matrix: &OperatorMatrix, want_vectors: bool) -> Result<Spectrum> {
    let n = matrix.dim();
    let data = matrix.as_slice();
    if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
        return Err(param_err!("non-finite matrix entry at ({}, {})", pos / n.max(1), pos % n.max(1)));
    }
    let scale = data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (matrix.get(i, j) - matrix.get(j, i)).abs() > 1e-12 * scale {
                return Err(param_err!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    if matrix.is_complex_doubled() && want_vectors {
        return Err(Error::Unsupported("eigenvectors of complex-doubled sectors".into()));
    }
    if n == 0 {
        return Ok(Spectrum::new(Vec::new(), matrix.tag()));
    }
    let m = matrix.to_faer();
    let (mut eigenvalues, eigenvectors) = if want_vectors {
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigendecomposition of {n}x{n} matrix failed: {e:?}")))?;
        let s = evd.S().column_vector();
        let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
        (values, Some(evd.U().to_owned()))
    } else {
        let values = m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigenvalues of {n}x{n} matrix failed: {e:?}")))?;
        (values, None)
    };
    if matrix.is_complex_doubled() {
        eigenvalues = eigenvalues.into_iter().step_by(2).collect();
    }
    Ok(Spectrum { eigenvalues, eigenvectors, source: matrix.tag(), params: None })
}

/// Largest `|H v - E v|` over all eigenpairs.
pub fn max_residual(matrix: &OperatorMatrix, spec: &Spectrum) -> Result<f64> {
    let v = spec.vectors()?;
    let hv = matrix.to_faer() * v;
    let mut worst: f64 = 0.0;
    for (a, &e) in spec.eigenvalues.iter().enumerate() {
        let r: f64 = (0..v.nrows()).map(|i| (hv[(i, a)] - e * v[(i, a)]).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Fixed-width histogram starting at `start`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram {
    pub start: f64,
    pub bin_width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.start + (i as f64 + 0.5) * self.bin_width
    }

    /// Count in the bin that contains `x`, if `x` is in range.
    pub fn count_at(&self, x: f64) -> Option<usize> {
        let pos = (x - self.start) / self.bin_width;
        if pos < 0.0 {
            return None;
        }
        self.counts.get(pos.floor() as usize).copied()
    }
}

/// Number of levels per energy bin over `[E_min, E_max]`.
pub fn density_of_states(spec: &Spectrum, bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0) {
        return Err(param_err!("bin width must be positive, got {bin_width}"));
    }
    let Some((&lo, &hi)) = spec.eigenvalues.first().zip(spec.eigenvalues.last()) else {
        return Ok(Histogram { start: 0.0, bin_width, counts: Vec::new() });
    };
    let bins = (((hi - lo) / bin_width).floor() as usize + 1).max(1);
    let mut counts = vec![0usize; bins];
    for &e in &spec.eigenvalues {
        let i = (((e - lo) / bin_width).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    Ok(Histogram { start: lo, bin_width, counts })
}

/// Excess kurtosis `m4 / m2^2 - 3` of a sample.
pub fn excess_kurtosis(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

/// A run of levels separated by gaps no larger than the tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyCluster {
    pub center: f64,
    pub multiplicity: usize,
    /// Index of the first member; members are contiguous in the spectrum.
    pub first: usize,
    /// Nearest multiple of `omega / 2`, expressed in units of `omega`.
    pub nearest_half_multiple: f64,
    /// `|center - nearest_half_multiple * omega|`.
    pub distance: f64,
    /// Largest minus smallest member energy.
    pub spread: f64,
}

impl DegeneracyCluster {
    pub fn members(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.multiplicity
    }

    /// Whether the center sits on an integer (`L` even) or half-integer
    /// (`L` odd) multiple of `omega`, within `tol * omega`.
    pub fn at_special_energy(&self, sites: usize, omega: f64, tol: f64) -> bool {
        special_energy_offset(self.center, sites, omega) <= tol * omega
    }
}

/// Distance from `energy` to the nearest integer (even `L`) or half-integer
/// (odd `L`) multiple of `omega`.
pub fn special_energy_offset(energy: f64, sites: usize, omega: f64) -> f64 {
    let x = energy / omega;
    let shifted = if sites % 2 == 0 { x } else { x - 0.5 };
    (shifted - shifted.round()).abs() * omega
}

/// Single-linkage clustering of consecutive levels.
pub fn detect_degeneracies(spec: &Spectrum, tol: f64) -> Result<Vec<DegeneracyCluster>> {
    if !(tol > 0.0) {
        return Err(param_err!("degeneracy tolerance must be positive"));
    }
    let omega = spec.omega();
    let e = &spec.eigenvalues;
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=e.len() {
        if i == e.len() || e[i] - e[i - 1] > tol * omega {
            if i > start {
                let members = &e[start..i];
                let center = members.iter().sum::<f64>() / members.len() as f64;
                let nearest = (2.0 * center / omega).round() / 2.0;
                clusters.push(DegeneracyCluster {
                    center,
                    multiplicity: i - start,
                    first: start,
                    nearest_half_multiple: nearest,
                    distance: (center - nearest * omega).abs(),
                    spread: members[members.len() - 1] - members[0],
                });
            }
            start = i;
        }
    }
    Ok(clusters)
}

/// How degenerate levels inside a statistics window are treated.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpacingOptions {
    /// Keep every member of a degenerate multiplet (zero spacings) instead of one representative.
    pub include_degenerate: bool,
    pub degeneracy_tol: f64,
}

impl Default for SpacingOptions {
    fn default() -> Self {
        Self { include_degenerate: false, degeneracy_tol: DEFAULT_DEGENERACY_TOL }
    }
}

/// Normalized spacing distribution `p(s / s_mean)` within a window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpacingDistribution {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Probability density per bin; integrates to 1.
    pub density: Vec<f64>,
    pub normalized_spacings: Vec<f64>,
    pub mean_spacing: f64,
    pub levels_in_window: usize,
    /// Levels dropped because they duplicate a multiplet representative.
    pub excluded_degenerate: usize,
    /// Spacings below the degeneracy tolerance that were kept.
    pub zero_spacings: usize,
    pub options: SpacingOptions,
}

impl SpacingDistribution {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }
}

/// Minimum number of window levels for meaningful statistics.
pub const MIN_STATISTICS_LEVELS: usize = 50;

/// Levels in `window`, with degenerate multiplets collapsed unless requested.
fn window_levels(spec: &Spectrum, window: &EnergyWindow, options: &SpacingOptions) -> (Vec<f64>, usize) {
    let tol = options.degeneracy_tol * spec.omega();
    let mut levels: Vec<f64> = Vec::new();
    let mut excluded = 0;
    for &e in spec.eigenvalues.iter().filter(|&&e| window.contains(e)) {
        match levels.last() {
            Some(&prev) if !options.include_degenerate && e - prev <= tol => excluded += 1,
            _ => levels.push(e),
        }
    }
    (levels, excluded)
}

pub fn level_spacing_distribution(
    spec: &Spectrum,
    window: &EnergyWindow,
    n_bins: usize,
    options: SpacingOptions,
) -> Result<SpacingDistribution> {
    if n_bins == 0 {
        return Err(param_err!("need at least one bin"));
    }
    let (levels, excluded_degenerate) = window_levels(spec, window, &options);
    if levels.len() < 2 {
        return Err(param_err!("window {window:?} holds {} distinct levels; need at least 2", levels.len()));
    }
    if levels.len() < MIN_STATISTICS_LEVELS {
        warn!("only {} levels in window; spacing statistics will be noisy", levels.len());
    }
    let spacings: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_spacing = spacings.iter().sum::<f64>() / spacings.len() as f64;
    if !(mean_spacing > 0.0) {
        return Err(Error::Numerical("all spacings in the window vanish".into()));
    }
    let tol = options.degeneracy_tol * spec.omega();
    let zero_spacings = spacings.iter().filter(|&&s| s <= tol).count();
    let normalized: Vec<f64> = spacings.iter().map(|s| s / mean_spacing).collect();
    let upper = normalized.iter().cloned().fold(4.0f64, f64::max);
    let width = upper / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &s in &normalized {
        counts[((s / width).floor() as usize).min(n_bins - 1)] += 1;
    }
    let total = normalized.len() as f64;
    Ok(SpacingDistribution {
        bin_edges: (0..=n_bins).map(|i| i as f64 * width).collect(),
        density: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
        counts,
        normalized_spacings: normalized,
        mean_spacing,
        levels_in_window: levels.len() + excluded_degenerate,
        excluded_degenerate,
        zero_spacings,
        options,
    })
}

/// GOE Wigner surmise `(pi s / 2) exp(-pi s^2 / 4)`.
pub fn wigner_surmise_goe(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    let q = std::f64::consts::FRAC_PI_4;
    2.0 * q * s * (-q * s * s).exp()
}

/// Cumulative distribution of the GOE Wigner surmise.
pub fn wigner_surmise_goe_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    1.0 - (-std::f64::consts::FRAC_PI_4 * s * s).exp()
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Mean consecutive-spacing ratio and its bookkeeping.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RValue {
    pub mean: f64,
    pub ratios: usize,
    /// Spacings at or below the degeneracy tolerance, removed before forming ratios.
    pub excluded_zero_spacings: usize,
}

/// `<min(s_a, s_{a+1}) / max(s_a, s_{a+1})>` over the whole spectrum.
pub fn r_value(spec: &Spectrum) -> Result<RValue> {
    r_value_with_tol(&spec.eigenvalues, DEFAULT_DEGENERACY_TOL * spec.omega())
}

/// r-value of an ascending level sequence; spacings `<= zero_tol` are dropped.
pub fn r_value_with_tol(levels: &[f64], zero_tol: f64) -> Result<RValue> {
    if levels.len() < 3 {
        return Err(param_err!("r-value needs at least 3 levels, got {}", levels.len()));
    }
    let all: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let spacings: Vec<f64> = all.iter().cloned().filter(|&s| s > zero_tol).collect();
    let excluded = all.len() - spacings.len();
    if spacings.is_empty() {
        return Err(Error::Numerical("every level spacing vanishes".into()));
    }
    if spacings.len() < 2 {
        return Err(Error::Numerical("fewer than two non-zero spacings".into()));
    }
    let sum: f64 = spacings.windows(2).map(|w| w[0].min(w[1]) / w[0].max(w[1])).sum();
    let ratios = spacings.len() - 1;
    Ok(RValue { mean: sum / ratios as f64, ratios, excluded_zero_spacings: excluded })
}
