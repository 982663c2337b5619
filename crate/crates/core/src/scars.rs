//! Quantum many-body scar diagnostics.
//!
//! Candidate states are embedded into the full `2^L` product space and tested
//! against the unconstrained total-spin operators. Inside the constrained
//! space the projected `Jx` coincides with `H / Omega`, so only the
//! unconstrained operators can tell a Dicke state from an ordinary eigenstate.

use std::sync::Arc;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_basis, BoundaryCondition};
use crate::error::{param_err, Error, Result};
use crate::basis::ConstrainedBasis;
use crate::hamiltonian::full_space::{self, apply_j2, apply_jx, apply_jy_imag, apply_jz};
use crate::cache::SpectrumCache;
use crate::hamiltonian::{build_sector_hamiltonian, ModelParams, Target};
use crate::pipeline::solve;
use crate::spectral::{detect_degeneracies, diagonalize, Spectrum};
use crate::symmetry::{build_sector, Parity, SectorChoice, SectorLabel};

/// Largest chain for which states are embedded into the full product space.
pub const MAX_SCAR_SITES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScarOptions {
    /// Residual threshold for flagging a Dicke state.
    pub tol: f64,
    /// Allowed distance (in units of omega) from an integer or half-integer multiple of omega.
    pub special_tol: f64,
    /// Gap (in units of omega) below which consecutive levels form one cluster.
    pub cluster_tol: f64,
}

impl Default for ScarOptions {
    fn default() -> Self {
        Self { tol: 1e-7, special_tol: 1e-6, cluster_tol: 1e-8 }
    }
}

/// One resolved state from a special-energy cluster.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScarRecord {
    pub energy: f64,
    pub sector: Option<SectorLabel>,
    /// `E / Omega`.
    pub m_x: f64,
    /// Eigenvalue of the restricted `Jx` that labelled this state.
    pub jx_eigenvalue: f64,
    /// `j` from `j (j + 1) = j2`.
    pub j: f64,
    pub j2: f64,
    /// `<(PJxP)^2 + (PJyP)^2 + Jz^2>`, the alternative reading of the Casimir.
    pub j2_projected: f64,
    pub residual_jx: f64,
    pub residual_j2: f64,
    pub eev_jz: f64,
    pub cluster_multiplicity: usize,
    pub flagged: bool,
}

/// Total spin `j` with `j (j + 1) = j2`.
pub fn spin_from_casimir(j2: f64) -> f64 {
    0.5 * ((1.0 + 4.0 * j2.max(0.0)).sqrt() - 1.0)
}

fn target_sites(target: Target<'_>) -> usize {
    match target {
        Target::Basis(b) => b.sites(),
        Target::Sector(s) => s.parent().sites(),
    }
}

/// Maps spectrum coordinates to a vector over all `2^L` configurations.
fn embed_full(target: Target<'_>, coords: &[f64]) -> Result<Vec<f64>> {
    match target {
        Target::Basis(b) => Ok(full_space::embed(b, coords)),
        Target::Sector(s) => Ok(full_space::embed(s.parent(), &s.embed_real(coords)?)),
    }
}

fn parent_basis<'a>(target: Target<'a>) -> &'a ConstrainedBasis {
    match target {
        Target::Basis(b) => b,
        Target::Sector(s) => s.parent(),
    }
}

/// `sum_c ||P J_c v||^2`, with `P` the projector onto `basis`.
fn projected_casimir(v: &[f64], basis: &ConstrainedBasis) -> f64 {
    let sites = basis.sites();
    [apply_jx(v, sites), apply_jy_imag(v, sites), apply_jz(v, sites)]
        .iter()
        .map(|img| basis.states().iter().map(|&s| img[s as usize].powi(2)).sum::<f64>())
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(image: &[f64], v: &[f64], value: f64) -> f64 {
    image.iter().zip(v).map(|(o, x)| (o - value * x).powi(2)).sum::<f64>().sqrt()
}

/// Eigenpairs of the symmetric Gram matrix `<v_a| O |v_b>`.
fn restricted_eigen(vs: &[Vec<f64>], images: &[Vec<f64>]) -> Result<(Vec<f64>, Mat<f64>)> {
    let m = vs.len();
    let g = Mat::from_fn(m, m, |a, b| 0.5 * (dot(&vs[a], &images[b]) + dot(&vs[b], &images[a])));
    let evd = g
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("restricted eigenproblem failed: {e:?}")))?;
    let s = evd.S().column_vector();
    Ok(((0..m).map(|i| s[i]).collect(), evd.U().to_owned()))
}

fn combine(vs: &[Vec<f64>], u: &Mat<f64>, col: usize) -> Vec<f64> {
    let mut out = vec![0.0; vs[0].len()];
    for (a, v) in vs.iter().enumerate() {
        let c = u[(a, col)];
        if c != 0.0 {
            out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
        }
    }
    out
}

/// Runs of sorted values whose consecutive gaps stay within `tol`.
fn group_runs(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            groups.push(start..i);
            start = i;
        }
    }
    groups
}

/// Resolves every cluster at an integer (even `L`) or half-integer (odd `L`)
/// multiple of omega into simultaneous `Jx`, `J^2` eigenvectors and tests
/// them as Dicke states.
pub fn find_dicke_scars(spec: &Spectrum, target: Target<'_>, options: &ScarOptions) -> Result<Vec<ScarRecord>> {
    let vectors = spec.vectors()?;
    let sites = target_sites(target);
    if sites > MAX_SCAR_SITES {
        return Err(Error::Resource(format!("scar search embeds into 2^L; needs L <= {MAX_SCAR_SITES}")));
    }
    let sector = match target {
        Target::Sector(s) => Some(s.label()),
        Target::Basis(_) => None,
    };
    let omega = spec.omega();
    let mut records = Vec::new();
    for cluster in detect_degeneracies(spec, options.cluster_tol)? {
        if !cluster.at_special_energy(sites, omega, options.special_tol) {
            continue;
        }
        let vs: Vec<Vec<f64>> = cluster
            .members()
            .map(|a| embed_full(target, &(0..vectors.nrows()).map(|i| vectors[(i, a)]).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let m_x = cluster.center / omega;

        let jx_images: Vec<Vec<f64>> = vs.iter().map(|v| apply_jx(v, sites)).collect();
        let (mu, ux) = restricted_eigen(&vs, &jx_images)?;
        for run in group_runs(&mu, options.cluster_tol) {
            let ws: Vec<Vec<f64>> = run.clone().map(|c| combine(&vs, &ux, c)).collect();
            let j2_images: Vec<Vec<f64>> = ws.iter().map(|w| apply_j2(w, sites)).collect();
            let (_, uj) = restricted_eigen(&ws, &j2_images)?;
            for (col, &jx_eigenvalue) in mu[run].iter().enumerate() {
                let u = combine(&ws, &uj, col);
                let n = norm(&u);
                let u: Vec<f64> = u.iter().map(|x| x / n).collect();
                let j2_img = apply_j2(&u, sites);
                let j2 = dot(&u, &j2_img);
                let residual_jx = residual(&apply_jx(&u, sites), &u, m_x);
                let residual_j2 = residual(&j2_img, &u, j2);
                records.push(ScarRecord {
                    energy: cluster.center,
                    sector,
                    m_x,
                    jx_eigenvalue,
                    j: spin_from_casimir(j2),
                    j2,
                    j2_projected: projected_casimir(&u, parent_basis(target)),
                    residual_jx,
                    residual_j2,
                    eev_jz: dot(&u, &apply_jz(&u, sites)),
                    cluster_multiplicity: cluster.multiplicity,
                    flagged: residual_jx <= options.tol && residual_j2 <= options.tol,
                });
            }
        }
    }
    Ok(records)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScarCountRow {
    pub sites: usize,
    pub radius: usize,
    pub dim: usize,
    /// States passing both Dicke residual tests.
    pub flagged: usize,
    /// Total multiplicity of clusters with at least two members at special energies.
    pub special_multiplicity: usize,
    /// Multiplicity of the cluster at zero energy.
    pub zero_multiplicity: usize,
}

/// Diagonalizes `params` in the chosen block and counts scars.
pub fn scar_count(
    params: &ModelParams,
    choice: SectorChoice,
    options: &ScarOptions,
    cache: Option<&SpectrumCache>,
) -> Result<ScarCountRow> {
    let solved = solve(params, choice, true, cache)?;
    let records = find_dicke_scars(&solved.spectrum, solved.target(), options)?;
    let spec = &solved.spectrum;
    let clusters = detect_degeneracies(spec, options.cluster_tol)?;
    let special_multiplicity = clusters
        .iter()
        .filter(|c| c.multiplicity > 1 && c.at_special_energy(params.sites, params.omega, options.special_tol))
        .map(|c| c.multiplicity)
        .sum();
    let zero_multiplicity = clusters
        .iter()
        .filter(|c| c.center.abs() <= options.special_tol * params.omega)
        .map(|c| c.multiplicity)
        .sum();
    Ok(ScarCountRow {
        sites: params.sites,
        radius: params.radius,
        dim: spec.len(),
        flagged: records.iter().filter(|r| r.flagged).count(),
        special_multiplicity,
        zero_multiplicity,
    })
}

/// Scar counts over a list of sizes on a periodic chain.
pub fn count_scars_vs_size(
    radius: usize,
    sizes: &[usize],
    choice: SectorChoice,
    omega: f64,
    options: &ScarOptions,
    cache: Option<&SpectrumCache>,
) -> Result<Vec<ScarCountRow>> {
    if sizes.is_empty() {
        return Err(param_err!("need at least one system size"));
    }
    sizes
        .iter()
        .map(|&l| {
            let params = ModelParams::new(l, radius, BoundaryCondition::Periodic).with_omega(omega);
            scar_count(&params, choice, options, cache)
        })
        .collect()
}

/// Whether the flagged counts grow strictly from row to row.
pub fn strictly_increasing(rows: &[ScarCountRow]) -> bool {
    rows.windows(2).all(|w| w[1].flagged > w[0].flagged)
}

/// Energy of the isolated radius-3 scar pair, in units of omega.
pub fn ell3_special_energy() -> f64 {
    7f64.sqrt() / 2.0
}

/// `<J^z>` of the isolated radius-3 scar pair.
pub const ELL3_SPECIAL_JZ: f64 = -3.0 / 7.0;

/// `j (j + 1)` at `j = 3/2`.
pub const ELL3_SPECIAL_J2: f64 = 3.75;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecialState {
    pub energy: f64,
    pub sector: SectorLabel,
    pub eev_jz: f64,
    /// `<J^2>` with the unconstrained total spin on the embedded state.
    pub j2: f64,
    /// `||J^2 v - <J^2> v||` for the unconstrained operator.
    pub j2_residual: f64,
    /// `<(PJxP)^2 + (PJyP)^2 + Jz^2>`.
    pub j2_projected: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ell3Report {
    pub sites: usize,
    pub omega: f64,
    /// States within `energy_tol` of `+-sqrt(7)/2 omega`.
    pub found: Vec<SpecialState>,
    /// The closest levels to each target energy, when nothing matched.
    pub nearest: Vec<SpecialState>,
    pub energy_tol: f64,
    pub passed: bool,
}

/// Searches both zero-momentum parity sectors of the radius-3 periodic chain
/// for the pair at `E = +-sqrt(7)/2 omega`.
pub fn find_ell3_special_scars(sites: usize, omega: f64) -> Result<Ell3Report> {
    if sites % 2 == 0 || sites < 7 {
        return Err(param_err!("the radius-3 special pair needs odd L >= 7, got {sites}"));
    }
    if sites > MAX_SCAR_SITES {
        return Err(Error::Resource(format!("needs L <= {MAX_SCAR_SITES}")));
    }
    let energy_tol = 1e-8;
    let params = ModelParams::new(sites, 3, BoundaryCondition::Periodic).with_omega(omega);
    let basis = Arc::new(enumerate_basis(sites, 3, BoundaryCondition::Periodic)?);
    let targets = [ell3_special_energy() * omega, -ell3_special_energy() * omega];
    let mut found = Vec::new();
    let mut nearest: Vec<(f64, SpecialState)> = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let sector = build_sector(&basis, 0, Some(parity))?;
        let spec = diagonalize(&build_sector_hamiltonian(&sector, &params)?, true)?;
        for (alpha, &e) in spec.eigenvalues.iter().enumerate() {
            let distance = targets.iter().map(|t| (e - t).abs()).fold(f64::INFINITY, f64::min);
            if distance > 1e-2 * omega {
                continue;
            }
            let v = embed_full(Target::Sector(&sector), &spec.vector(alpha)?)?;
            let j2_img = apply_j2(&v, sites);
            let j2 = dot(&v, &j2_img);
            let state = SpecialState {
                energy: e,
                sector: sector.label(),
                eev_jz: dot(&v, &apply_jz(&v, sites)),
                j2,
                j2_residual: residual(&j2_img, &v, j2),
                j2_projected: projected_casimir(&v, &basis),
            };
            if distance <= energy_tol * omega {
                found.push(state);
            } else {
                nearest.push((distance, state));
            }
        }
    }
    nearest.sort_by(|a, b| a.0.total_cmp(&b.0));
    let passed = found.len() == 2
        && targets.iter().all(|t| found.iter().any(|s| (s.energy - t).abs() <= energy_tol * omega))
        && found.iter().all(|s| (s.eev_jz - ELL3_SPECIAL_JZ).abs() <= 1e-8 && (s.j2 - ELL3_SPECIAL_J2).abs() <= 1e-6);
    Ok(Ell3Report {
        sites,
        omega,
        found,
        nearest: nearest.into_iter().take(4).map(|(_, s)| s).collect(),
        energy_tol,
        passed,
    })
}
