//! End-to-end helpers: basis, block, Hamiltonian, spectrum and the derived
//! quantities, with optional spectrum caching.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_basis, BoundaryCondition, ConstrainedBasis};
use crate::cache::{CacheKey, SpectrumCache};
use crate::error::{param_err, Result};
use crate::eth::{eigenstate_expectation_values, eth_indicators, fit_weak_decay, EevSeries, EthIndicators, ScalingFit, WindowPreset};
use crate::hamiltonian::{
    build_constrained_hamiltonian, build_observable, build_sector_hamiltonian, build_sector_hamiltonian_doubled,
    ModelParams, ObservableKind, OperatorMatrix, Target,
};
use crate::spectral::{
    diagonalize, ks_distance, level_spacing_distribution, r_value, wigner_surmise_goe_cdf, RValue, SpacingDistribution,
    SpacingOptions, Spectrum,
};
use crate::symmetry::{build_sector, SectorChoice, SymmetrySector};

/// A basis, the optional symmetry block inside it, and a spectrum of that block.
pub struct Solved {
    pub params: ModelParams,
    pub basis: Arc<ConstrainedBasis>,
    pub sector: Option<SymmetrySector>,
    pub spectrum: Spectrum,
}

impl Solved {
    pub fn target(&self) -> Target<'_> {
        match &self.sector {
            Some(s) => Target::Sector(s),
            None => Target::Basis(&self.basis),
        }
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }
}

/// Enumerates the basis and, if requested, the symmetry sector.
pub fn build_block(params: &ModelParams, choice: SectorChoice) -> Result<(Arc<ConstrainedBasis>, Option<SymmetrySector>)> {
    params.validate()?;
    let basis = Arc::new(enumerate_basis(params.sites, params.radius, params.bc)?);
    let sector = match choice {
        SectorChoice::Full => None,
        SectorChoice::Momentum { momentum, parity } => Some(build_sector(&basis, momentum, parity)?),
    };
    Ok((basis, sector))
}

/// Hamiltonian of the block; complex momenta come back in doubled form.
pub fn block_hamiltonian(params: &ModelParams, basis: &ConstrainedBasis, sector: Option<&SymmetrySector>) -> Result<OperatorMatrix> {
    match sector {
        None => build_constrained_hamiltonian(basis, params),
        Some(s) if s.is_real() => build_sector_hamiltonian(s, params),
        Some(s) => build_sector_hamiltonian_doubled(s, params),
    }
}

/// Diagonalizes one block, going through `cache` when given.
pub fn solve(params: &ModelParams, choice: SectorChoice, want_vectors: bool, cache: Option<&SpectrumCache>) -> Result<Solved> {
    let (basis, sector) = build_block(params, choice)?;
    let key = CacheKey::new(params, &choice, want_vectors);
    let cached = cache.and_then(|c| c.lookup(&key));
    let spectrum = match cached {
        Some(spec) => spec,
        None => {
            let h = block_hamiltonian(params, &basis, sector.as_ref())?;
            let spec = diagonalize(&h, want_vectors)?.with_params(*params);
            if let Some(c) = cache {
                c.store(&key, &spec)?;
            }
            spec
        }
    };
    Ok(Solved { params: *params, basis, sector, spectrum })
}

/// EEVs of `J^z / L`, the magnetization density.
pub fn magnetization_eevs(solved: &Solved) -> Result<EevSeries> {
    let jz = build_observable(solved.target(), ObservableKind::Jz)?;
    let eevs = eigenstate_expectation_values(&solved.spectrum, &jz, "Jz/L")?;
    let l = solved.params.sites as f64;
    Ok(EevSeries { values: eevs.values.iter().map(|v| v / l).collect(), ..eevs })
}

/// ETH indicators at one system size.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EthPoint {
    pub sites: usize,
    pub sector_dim: usize,
    pub indicators: EthIndicators,
}

/// Indicators of `J^z / L` over `sizes` in one block type, periodic chain.
pub fn eth_scaling(
    radius: usize,
    sizes: &[usize],
    omega: f64,
    choice: SectorChoice,
    preset: &WindowPreset,
    cache: Option<&SpectrumCache>,
) -> Result<Vec<EthPoint>> {
    if sizes.is_empty() {
        return Err(param_err!("need at least one system size"));
    }
    sizes
        .iter()
        .map(|&l| {
            let params = ModelParams::new(l, radius, BoundaryCondition::Periodic).with_omega(omega);
            let solved = solve(&params, choice, true, cache)?;
            let eevs = magnetization_eevs(&solved)?;
            let indicators = eth_indicators(&eevs, &preset.for_sites(l, omega))?;
            Ok(EthPoint { sites: l, sector_dim: solved.dim(), indicators })
        })
        .collect()
}

/// `I_w ~ D^-gamma` fit over a scaling series.
pub fn fit_eth_points(points: &[EthPoint]) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.sector_dim as f64, p.indicators.i_w)).collect();
    fit_weak_decay(&pts)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RValuePoint {
    pub sites: usize,
    pub radius: usize,
    pub lambda: f64,
    pub sector_dim: usize,
    pub r: RValue,
}

pub fn r_value_point(params: &ModelParams, choice: SectorChoice, cache: Option<&SpectrumCache>) -> Result<RValuePoint> {
    let solved = solve(params, choice, false, cache)?;
    Ok(RValuePoint {
        sites: params.sites,
        radius: params.radius,
        lambda: params.lambda,
        sector_dim: solved.dim(),
        r: r_value(&solved.spectrum)?,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelStatistics {
    pub sites: usize,
    pub radius: usize,
    pub sector_dim: usize,
    pub window: crate::eth::EnergyWindow,
    pub distribution: SpacingDistribution,
    /// Kolmogorov-Smirnov distance to the GOE Wigner surmise.
    pub ks_goe: f64,
}

pub fn level_statistics(
    params: &ModelParams,
    choice: SectorChoice,
    preset: &WindowPreset,
    n_bins: usize,
    options: SpacingOptions,
    cache: Option<&SpectrumCache>,
) -> Result<LevelStatistics> {
    let solved = solve(params, choice, false, cache)?;
    let window = preset.for_sites(params.sites, params.omega);
    let distribution = level_spacing_distribution(&solved.spectrum, &window, n_bins, options)?;
    let ks_goe = ks_distance(&distribution.normalized_spacings, wigner_surmise_goe_cdf);
    Ok(LevelStatistics { sites: params.sites, radius: params.radius, sector_dim: solved.dim(), window, distribution, ks_goe })
}
