//! Operator matrices in the constrained basis or a symmetry sector.
//!
//! The constrained Hamiltonian is assembled by flipping one spin at a time and
//! keeping the move when the target is allowed; the optional two-site
//! perturbation `lambda * sum_i (X_i Z_{i+1} + Z_i X_{i+1})` only changes the
//! amplitude of each flip through the `Z` eigenvalues of the flipped site's
//! bond partners.

use std::fmt;

use faer::Mat;
use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{allowed_bits, window_count, BoundaryCondition, ConstrainedBasis};
use crate::error::{param_err, Error, Result};
use crate::symmetry::{Parity, SymmetrySector};

pub mod full_space;

/// Physical parameters of one model instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Energy scale of the single-spin flip term.
    pub omega: f64,
    /// Strength of the two-site flip-with-sign perturbation.
    pub lambda: f64,
    pub sites: usize,
    /// Constraint radius; 0 means unconstrained.
    pub radius: usize,
    pub bc: BoundaryCondition,
}

impl ModelParams {
    pub fn new(sites: usize, radius: usize, bc: BoundaryCondition) -> Self {
        Self { omega: 1.0, lambda: 0.0, sites, radius, bc }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(param_err!("omega must be positive and finite, got {}", self.omega));
        }
        if !self.lambda.is_finite() {
            return Err(param_err!("lambda must be finite"));
        }
        if self.lambda.abs() > 0.1 * self.omega {
            warn!(
                "perturbation |lambda| = {} exceeds 0.1 * omega; the model is no longer weakly perturbed",
                self.lambda.abs()
            );
        }
        Ok(())
    }

    fn check_basis(&self, basis: &ConstrainedBasis) -> Result<()> {
        if basis.sites() != self.sites || basis.radius() != self.radius || basis.bc() != self.bc {
            return Err(param_err!(
                "basis (L={}, radius={}, {}) does not match params (L={}, radius={}, {})",
                basis.sites(),
                basis.radius(),
                basis.bc(),
                self.sites,
                self.radius,
                self.bc
            ));
        }
        Ok(())
    }
}

/// Identifies the basis an operator or spectrum is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisTag {
    FullSpace { sites: usize },
    Constrained { sites: usize, radius: usize, bc: BoundaryCondition },
    Sector { sites: usize, radius: usize, momentum: usize, parity: Option<Parity> },
}

impl BasisTag {
    pub fn sites(&self) -> usize {
        match *self {
            BasisTag::FullSpace { sites }
            | BasisTag::Constrained { sites, .. }
            | BasisTag::Sector { sites, .. } => sites,
        }
    }

    pub fn of_basis(basis: &ConstrainedBasis) -> Self {
        BasisTag::Constrained { sites: basis.sites(), radius: basis.radius(), bc: basis.bc() }
    }

    pub fn of_sector(sector: &SymmetrySector) -> Self {
        BasisTag::Sector {
            sites: sector.parent().sites(),
            radius: sector.parent().radius(),
            momentum: sector.momentum(),
            parity: sector.parity(),
        }
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::FullSpace { sites } => write!(f, "full(L={sites})"),
            BasisTag::Constrained { sites, radius, bc } => write!(f, "constrained(L={sites},ell={radius},{bc})"),
            BasisTag::Sector { sites, radius, momentum, parity } => write!(
                f,
                "sector(L={sites},ell={radius},k={momentum},p={})",
                crate::symmetry::parity_label(*parity)
            ),
        }
    }
}

/// Dense real symmetric matrix, row-major with full storage.
///
/// A complex Hermitian block `A + iB` is stored in its real doubled form
/// `[[A, -B], [B, A]]`, flagged by `complex_doubled`; every eigenvalue of the
/// block then appears twice.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<f64>,
    tag: BasisTag,
    complex_doubled: bool,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize, tag: BasisTag) -> Self {
        Self { dim, data: vec![0.0; dim * dim], tag, complex_doubled: false }
    }

    pub fn identity(dim: usize, tag: BasisTag) -> Self {
        let mut m = Self::zeros(dim, tag);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64], tag: BasisTag) -> Self {
        let mut m = Self::zeros(diag.len(), tag);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// Wraps row-major data, checking the shape.
    pub fn from_row_major(dim: usize, data: Vec<f64>, tag: BasisTag) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(param_err!("expected {} entries for a {dim}x{dim} matrix, got {}", dim * dim, data.len()));
        }
        Ok(Self { dim, data, tag, complex_doubled: false })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn is_complex_doubled(&self) -> bool {
        self.complex_doubled
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Bitwise symmetry check.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn count_offdiagonal_nonzeros(&self) -> usize {
        (0..self.dim)
            .map(|i| (0..self.dim).filter(|&j| j != i && self.get(i, j) != 0.0).count())
            .sum()
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.data[i * self.dim + j])
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Bonds `(a, b)` (0-based sites) of the two-site perturbation.
fn bonds(sites: usize, bc: BoundaryCondition) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if bc == BoundaryCondition::Periodic && sites >= 2 {
        out.push((sites - 1, 0));
    }
    out
}

/// Amplitude of flipping 0-based `site` in configuration `bits`.
struct FlipAmplitude {
    half_omega: f64,
    lambda: f64,
    /// For each site, the partners it shares a bond with (with multiplicity).
    partners: Vec<Vec<usize>>,
}

impl FlipAmplitude {
    fn new(params: &ModelParams) -> Self {
        let mut partners = vec![Vec::new(); params.sites];
        for (a, b) in bonds(params.sites, params.bc) {
            partners[a].push(b);
            partners[b].push(a);
        }
        Self { half_omega: 0.5 * params.omega, lambda: params.lambda, partners }
    }

    #[inline]
    fn at(&self, bits: u64, site: usize) -> f64 {
        if self.lambda == 0.0 {
            return self.half_omega;
        }
        let z: f64 = self.partners[site]
            .iter()
            .map(|&p| if (bits >> p) & 1 == 1 { 1.0 } else { -1.0 })
            .sum();
        self.half_omega + self.lambda * z
    }
}

/// Constrained Hamiltonian in the full constrained basis.
pub fn build_constrained_hamiltonian(basis: &ConstrainedBasis, params: &ModelParams) -> Result<OperatorMatrix> {
    params.validate()?;
    params.check_basis(basis)?;
    let amp = FlipAmplitude::new(params);
    Ok(basis_flip_operator(basis, &single_flips(basis.sites()), |bits, site| amp.at(bits, site), |_| 0.0))
}

/// XOR masks flipping one site each; move `k` flips site `k`.
fn single_flips(sites: usize) -> Vec<u64> {
    (0..sites).map(|site| 1u64 << site).collect()
}

/// Operator whose off-diagonal part maps `s` to `s ^ masks[k]` with amplitude
/// `weight(s, k)`.
fn basis_flip_operator(
    basis: &ConstrainedBasis,
    masks: &[u64],
    weight: impl Fn(u64, usize) -> f64 + Sync,
    diagonal: impl Fn(u64) -> f64 + Sync,
) -> OperatorMatrix {
    let dim = basis.len();
    let mut data = vec![0.0; dim * dim];
    data.par_chunks_mut(dim.max(1)).enumerate().for_each(|(row, out)| {
        if dim == 0 {
            return;
        }
        let t = basis.states()[row];
        out[row] = diagonal(t);
        for (k, &mask) in masks.iter().enumerate() {
            let s = t ^ mask;
            if let Some(col) = basis.index_of(s) {
                // <t| W |s> for the move s -> t
                out[col] += weight(s, k);
            }
        }
    });
    OperatorMatrix { dim, data, tag: BasisTag::of_basis(basis), complex_doubled: false }
}

/// Projects a symmetric move operator onto a real sector. Each unordered
/// pair of sector vectors is evaluated once and mirrored, so the result is
/// exactly symmetric.
fn sector_flip_operator(
    sector: &SymmetrySector,
    masks: &[u64],
    weight: impl Fn(u64, usize) -> f64 + Sync,
    diagonal: impl Fn(u64) -> f64 + Sync,
) -> OperatorMatrix {
    let basis = sector.parent();
    let dim = sector.dim();
    let membership = sector.membership();
    let columns: Vec<Vec<(usize, f64)>> = sector
        .vectors()
        .par_iter()
        .enumerate()
        .map(|(a, v)| {
            let mut col: Vec<(usize, f64)> = Vec::new();
            let mut diag_acc = 0.0;
            for &(idx, c_s) in &v.members {
                let s = basis.states()[idx];
                let c_s = c_s.re;
                diag_acc += c_s * c_s * diagonal(s);
                for (k, &mask) in masks.iter().enumerate() {
                    let t = s ^ mask;
                    let Some(j) = basis.index_of(t) else { continue };
                    let Some((b, c_t)) = membership[j] else { continue };
                    let b = b as usize;
                    if b <= a {
                        col.push((b, c_t.re * weight(s, k) * c_s));
                    }
                }
            }
            col.push((a, diag_acc));
            col.sort_by_key(|&(b, _)| b);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for (b, x) in col {
                match merged.last_mut() {
                    Some((lb, acc)) if *lb == b => *acc += x,
                    _ => merged.push((b, x)),
                }
            }
            merged
        })
        .collect();

    let mut data = vec![0.0; dim * dim];
    for (a, col) in columns.into_iter().enumerate() {
        for (b, x) in col {
            data[b * dim + a] = x;
            data[a * dim + b] = x;
        }
    }
    OperatorMatrix { dim, data, tag: BasisTag::of_sector(sector), complex_doubled: false }
}

fn check_sector_params(sector: &SymmetrySector, params: &ModelParams) -> Result<()> {
    params.validate()?;
    params.check_basis(sector.parent())
}

/// Hamiltonian restricted to a real (k = 0 or k = L/2) symmetry sector.
pub fn build_sector_hamiltonian(sector: &SymmetrySector, params: &ModelParams) -> Result<OperatorMatrix> {
    check_sector_params(sector, params)?;
    if !sector.is_real() {
        return Err(Error::Unsupported(format!(
            "momentum {} has complex amplitudes; use build_sector_hamiltonian_doubled",
            sector.momentum()
        )));
    }
    let amp = FlipAmplitude::new(params);
    let masks = single_flips(sector.parent().sites());
    Ok(sector_flip_operator(sector, &masks, |b, s| amp.at(b, s), |_| 0.0))
}

/// Hamiltonian of any momentum sector as a real doubled matrix of size `2 * dim`.
pub fn build_sector_hamiltonian_doubled(sector: &SymmetrySector, params: &ModelParams) -> Result<OperatorMatrix> {
    check_sector_params(sector, params)?;
    let basis = sector.parent();
    let sites = basis.sites();
    let dim = sector.dim();
    let amp = FlipAmplitude::new(params);
    let membership = sector.membership();
    let mut block = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (a, v) in sector.vectors().iter().enumerate() {
        for &(idx, c_s) in &v.members {
            let s = basis.states()[idx];
            for site in 0..sites {
                let t = s ^ (1u64 << site);
                let Some(j) = basis.index_of(t) else { continue };
                let Some((b, c_t)) = membership[j] else { continue };
                let b = b as usize;
                if b <= a {
                    block[b * dim + a] += c_t.conj() * amp.at(s, site) * c_s;
                }
            }
        }
    }
    let n2 = 2 * dim;
    let mut data = vec![0.0; n2 * n2];
    for a in 0..dim {
        for b in 0..=a {
            let h = block[b * dim + a];
            // H[b][a] = h and H[a][b] = conj(h); diagonal is real.
            let (re, im) = if a == b { (h.re, 0.0) } else { (h.re, h.im) };
            let mut put = |r: usize, c: usize, x: f64| data[r * n2 + c] = x;
            put(b, a, re);
            put(a, b, re);
            put(b + dim, a + dim, re);
            put(a + dim, b + dim, re);
            // imaginary part enters the off-diagonal blocks [[A, -B], [B, A]]
            put(b + dim, a, im);
            put(a, b + dim, im);
            put(a + dim, b, -im);
            put(b, a + dim, -im);
        }
    }
    Ok(OperatorMatrix { dim: n2, data, tag: BasisTag::of_sector(sector), complex_doubled: true })
}

/// Total-spin observables compressed to the constrained space, `P O P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableKind {
    /// `Jx = (1/2) sum X_i`.
    Jx,
    /// `Jz = (1/2) sum Z_i` (diagonal).
    Jz,
    /// Unconstrained `J^2`, so `<v| P J^2 P |v>` is the Casimir expectation of
    /// the embedded state.
    JSquared,
}

/// The basis an observable is built in.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Basis(&'a ConstrainedBasis),
    Sector(&'a SymmetrySector),
}

fn jz_diagonal(bits: u64, sites: usize) -> f64 {
    bits.count_ones() as f64 - 0.5 * sites as f64
}

/// Site pairs `i < j` as XOR masks.
fn pair_swaps(sites: usize) -> Vec<u64> {
    (0..sites).flat_map(|j| (0..j).map(move |i| (1u64 << i) | (1u64 << j))).collect()
}

fn move_operator(
    target: Target<'_>,
    masks: &[u64],
    weight: impl Fn(u64, usize) -> f64 + Sync,
    diagonal: impl Fn(u64) -> f64 + Sync,
) -> Result<OperatorMatrix> {
    match target {
        Target::Basis(basis) => Ok(basis_flip_operator(basis, masks, weight, diagonal)),
        Target::Sector(sector) => {
            if !sector.is_real() {
                return Err(Error::Unsupported("observables are only built in real sectors".into()));
            }
            Ok(sector_flip_operator(sector, masks, weight, diagonal))
        }
    }
}

fn target_sites(target: Target<'_>) -> usize {
    match target {
        Target::Basis(b) => b.sites(),
        Target::Sector(s) => s.parent().sites(),
    }
}

pub fn build_observable(target: Target<'_>, kind: ObservableKind) -> Result<OperatorMatrix> {
    let sites = target_sites(target);
    match kind {
        ObservableKind::Jx => move_operator(target, &single_flips(sites), |_, _| 0.5, |_| 0.0),
        ObservableKind::Jz => move_operator(target, &[], |_, _| 0.0, |b| jz_diagonal(b, sites)),
        ObservableKind::JSquared => {
            // S_i . S_j = SWAP_ij / 2 - 1/4 for i != j, so
            // J^2 = 3L/4 - L(L-1)/4 + sum_{i<j} SWAP_ij.
            let masks = pair_swaps(sites);
            let l = sites as f64;
            let offset = 0.75 * l - 0.25 * l * (l - 1.0);
            let same = |b: u64, mask: u64| (b & mask).count_ones() != 1;
            move_operator(
                target,
                &masks,
                |b, k| if same(b, masks[k]) { 0.0 } else { 1.0 },
                |b| offset + masks.iter().filter(|&&m| same(b, m)).count() as f64,
            )
        }
    }
}

/// Diagonal projector onto configurations with exactly `r` constraint windows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentProjector {
    pub sites: usize,
    pub radius: usize,
    pub bc: BoundaryCondition,
    pub windows: usize,
    /// 0/1 diagonal over all `2^L` configurations.
    pub diagonal: Vec<u8>,
}

impl FragmentProjector {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().map(|&d| d as usize).sum()
    }

    /// Dense full-space matrix; only sensible for small chains.
    pub fn to_matrix(&self) -> OperatorMatrix {
        let diag: Vec<f64> = self.diagonal.iter().map(|&d| d as f64).collect();
        OperatorMatrix::from_diagonal(&diag, BasisTag::FullSpace { sites: self.sites })
    }
}

/// Largest chain length for full-space fragmentation operations.
pub const MAX_FULL_SPACE_SITES: usize = 14;

fn max_windows(sites: usize, radius: usize, bc: BoundaryCondition) -> usize {
    if radius == 0 || radius > sites {
        0
    } else {
        match bc {
            BoundaryCondition::Open => sites - radius + 1,
            BoundaryCondition::Periodic => sites,
        }
    }
}

pub fn build_fragment_projector(
    sites: usize,
    radius: usize,
    bc: BoundaryCondition,
    windows: usize,
) -> Result<FragmentProjector> {
    if sites > MAX_FULL_SPACE_SITES {
        return Err(Error::Resource(format!(
            "full-space projector needs L <= {MAX_FULL_SPACE_SITES}, got {sites}"
        )));
    }
    if sites == 0 || radius > sites {
        return Err(param_err!("invalid chain L={sites}, radius={radius}"));
    }
    let max = max_windows(sites, radius, bc);
    if windows > max {
        return Err(param_err!("window count {windows} exceeds the {max} available windows"));
    }
    let diagonal = (0u64..1 << sites)
        .map(|b| (window_count(b, sites, radius, bc) == windows) as u8)
        .collect();
    Ok(FragmentProjector { sites, radius, bc, windows, diagonal })
}

/// Outcome of checking the window-count fragmentation against the direct build.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FragmentationReport {
    pub sites: usize,
    pub radius: usize,
    pub bc: BoundaryCondition,
    /// Rank of each window-count projector, indexed by window count.
    pub sector_dims: Vec<usize>,
    pub orthogonal_idempotents: bool,
    pub complete: bool,
    pub zero_sector_matches_basis: bool,
    pub max_hamiltonian_deviation: f64,
    pub hamiltonian_matches: bool,
    pub passed: bool,
}

/// Largest chain length accepted by [`verify_fragmentation`].
pub const MAX_FRAGMENTATION_SITES: usize = 12;

pub fn verify_fragmentation(params: &ModelParams) -> Result<FragmentationReport> {
    params.validate()?;
    let (sites, radius, bc) = (params.sites, params.radius, params.bc);
    if sites > MAX_FRAGMENTATION_SITES {
        return Err(Error::Resource(format!(
            "fragmentation check needs L <= {MAX_FRAGMENTATION_SITES}, got {sites}"
        )));
    }
    let projectors = (0..=max_windows(sites, radius, bc))
        .map(|r| build_fragment_projector(sites, radius, bc, r))
        .collect::<Result<Vec<_>>>()?;
    let full = 1usize << sites;

    let mut orthogonal_idempotents = true;
    let mut complete = true;
    for x in 0..full {
        let mut sum = 0u32;
        for (r, p) in projectors.iter().enumerate() {
            let d = p.diagonal[x] as u32;
            orthogonal_idempotents &= d * d == d;
            for q in &projectors[r + 1..] {
                orthogonal_idempotents &= d * q.diagonal[x] as u32 == 0;
            }
            sum += d;
        }
        complete &= sum == 1;
    }

    let basis = crate::basis::enumerate_basis(sites, radius, bc)?;
    let zero = &projectors[0];
    let support: Vec<u64> = (0..full as u64).filter(|&x| zero.diagonal[x as usize] == 1).collect();
    let zero_sector_matches_basis = support == basis.states();

    let direct = build_constrained_hamiltonian(&basis, params)?;
    let mut max_dev: f64 = 0.0;
    if zero_sector_matches_basis {
        for (i, &t) in support.iter().enumerate() {
            for (j, &s) in support.iter().enumerate() {
                let projected = full_space::matrix_element(t, s, params);
                max_dev = max_dev.max((projected - direct.get(i, j)).abs());
            }
        }
    } else {
        max_dev = f64::INFINITY;
    }
    let hamiltonian_matches = max_dev <= 1e-12 * params.omega;

    Ok(FragmentationReport {
        sites,
        radius,
        bc,
        sector_dims: projectors.iter().map(FragmentProjector::rank).collect(),
        orthogonal_idempotents,
        complete,
        zero_sector_matches_basis,
        max_hamiltonian_deviation: max_dev,
        hamiltonian_matches,
        passed: orthogonal_idempotents && complete && zero_sector_matches_basis && hamiltonian_matches,
    })
}

/// Whether `bits` is allowed; re-exported for callers holding raw masks.
pub fn config_allowed(bits: u64, params: &ModelParams) -> bool {
    allowed_bits(bits, params.sites, params.radius, params.bc)
}
