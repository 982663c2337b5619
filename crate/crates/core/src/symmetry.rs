//! Translation and reflection symmetry sectors of a periodic constrained basis.
//!
//! Translation `T` maps site `i` to `i + 1` (cyclically); reflection `R` maps
//! site `i` to `L - i + 1`. A momentum-`k` sector vector picks up the phase
//! `exp(+2 pi i k / L)` under `T`. Sector vectors are obtained by applying the
//! group projector to the minimal bitmask of each orbit, so orbits whose
//! projection cancels simply drop out.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{site_mask, BoundaryCondition, ConstrainedBasis, SpinConfiguration};
use crate::error::{param_err, Result};

/// Cyclic shift of every spin by one site (`i -> i + 1`).
#[inline]
pub fn translate(bits: u64, sites: usize) -> u64 {
    if sites == 1 {
        return bits;
    }
    ((bits << 1) | (bits >> (sites - 1))) & site_mask(sites)
}

/// Mirror image of the chain (`i -> L - i + 1`).
#[inline]
pub fn reflect(bits: u64, sites: usize) -> u64 {
    bits.reverse_bits() >> (64 - sites)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            other => Err(param_err!("parity must be +1 or -1, got {other}")),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("+1"),
            Parity::Odd => f.write_str("-1"),
        }
    }
}

impl FromStr for Parity {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+1" | "1" | "+" | "even" => Ok(Parity::Even),
            "-1" | "-" | "odd" => Ok(Parity::Odd),
            other => Err(param_err!("unknown parity '{other}' (expected +1, -1, even or odd)")),
        }
    }
}

/// Parses `none` as no parity resolution.
pub fn parse_optional_parity(s: &str) -> Result<Option<Parity>> {
    if s.trim().eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// Formats an optional parity the way the CSV outputs expect.
pub fn parity_label(parity: Option<Parity>) -> String {
    parity.map_or_else(|| "none".to_string(), |p| p.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranslationOrbit {
    pub representative: SpinConfiguration,
    pub period: usize,
}

fn require_periodic(basis: &ConstrainedBasis) -> Result<()> {
    if basis.bc() != BoundaryCondition::Periodic {
        return Err(param_err!("symmetry sectors require periodic boundary conditions"));
    }
    Ok(())
}

/// Partition of the basis into translation orbits, ordered by representative.
pub fn build_orbits(basis: &ConstrainedBasis) -> Result<Vec<TranslationOrbit>> {
    require_periodic(basis)?;
    let sites = basis.sites();
    let mut seen = vec![false; basis.len()];
    let mut orbits = Vec::new();
    for (idx, &state) in basis.states().iter().enumerate() {
        if seen[idx] {
            continue;
        }
        let mut period = 0;
        let mut cur = state;
        loop {
            let j = basis.index_of(cur).expect("translation preserves the constraint");
            seen[j] = true;
            period += 1;
            cur = translate(cur, sites);
            if cur == state {
                break;
            }
        }
        orbits.push(TranslationOrbit {
            representative: basis.config(idx),
            period,
        });
    }
    Ok(orbits)
}

/// Momentum and parity labels of a sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorLabel {
    pub momentum: usize,
    pub parity: Option<Parity>,
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={},p={}", self.momentum, parity_label(self.parity))
    }
}

/// Which block of a Hamiltonian to work in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SectorChoice {
    /// The whole constrained basis.
    Full,
    Momentum { momentum: usize, parity: Option<Parity> },
}

impl SectorChoice {
    pub fn zero_momentum(parity: Option<Parity>) -> Self {
        SectorChoice::Momentum { momentum: 0, parity }
    }
}

impl fmt::Display for SectorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorChoice::Full => f.write_str("full"),
            SectorChoice::Momentum { momentum, parity } => write!(f, "k={momentum},p={}", parity_label(*parity)),
        }
    }
}

impl FromStr for SectorChoice {
    type Err = crate::error::Error;

    /// Accepts `full`, `k=<n>` or `k=<n>,p=<+1|-1|none>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(SectorChoice::Full);
        }
        let mut momentum = None;
        let mut parity = None;
        for part in s.split(',') {
            match part.trim().split_once('=') {
                Some(("k", v)) => momentum = Some(v.parse().map_err(|_| param_err!("bad momentum '{v}'"))?),
                Some(("p", v)) => parity = parse_optional_parity(v)?,
                _ => return Err(param_err!("cannot parse sector '{s}' (expected full, k=<n> or k=<n>,p=<+1|-1|none>)")),
            }
        }
        let momentum = momentum.ok_or_else(|| param_err!("sector '{s}' lacks k=<n>"))?;
        Ok(SectorChoice::Momentum { momentum, parity })
    }
}

/// One symmetry-adapted basis vector, stored by its support in the parent basis.
#[derive(Clone, Debug)]
pub struct SectorVector {
    /// Minimal bitmask of the (translation or dihedral) orbit.
    pub representative: u64,
    /// Norm of the projected orbit representative before normalization.
    pub norm: f64,
    /// `(parent index, amplitude)` pairs of the normalized vector.
    pub members: Vec<(usize, Complex64)>,
}

#[derive(Clone, Debug)]
pub struct SymmetrySector {
    parent: Arc<ConstrainedBasis>,
    label: SectorLabel,
    vectors: Vec<SectorVector>,
}

impl SymmetrySector {
    pub fn parent(&self) -> &Arc<ConstrainedBasis> {
        &self.parent
    }

    pub fn label(&self) -> SectorLabel {
        self.label
    }

    pub fn momentum(&self) -> usize {
        self.label.momentum
    }

    pub fn parity(&self) -> Option<Parity> {
        self.label.parity
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[SectorVector] {
        &self.vectors
    }

    /// `(representative, normalization)` per sector basis vector.
    pub fn entries(&self) -> impl Iterator<Item = (SpinConfiguration, f64)> + '_ {
        let sites = self.parent.sites();
        self.vectors.iter().map(move |v| {
            (SpinConfiguration::new(v.representative, sites).expect("valid"), v.norm)
        })
    }

    /// Whether all amplitudes are real (momentum 0 or L/2).
    pub fn is_real(&self) -> bool {
        is_real_momentum(self.label.momentum, self.parent.sites())
    }

    /// For every parent state, its sector vector index and amplitude.
    pub fn membership(&self) -> Vec<Option<(u32, Complex64)>> {
        let mut out = vec![None; self.parent.len()];
        for (a, v) in self.vectors.iter().enumerate() {
            for &(idx, c) in &v.members {
                out[idx] = Some((a as u32, c));
            }
        }
        out
    }

    /// Maps real sector coordinates to parent-basis coordinates.
    pub fn embed_real(&self, coords: &[f64]) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(param_err!("real embedding needs momentum 0 or L/2"));
        }
        if coords.len() != self.dim() {
            return Err(param_err!("expected {} sector coordinates, got {}", self.dim(), coords.len()));
        }
        let mut out = vec![0.0; self.parent.len()];
        for (v, &x) in self.vectors.iter().zip(coords) {
            for &(idx, c) in &v.members {
                out[idx] += c.re * x;
            }
        }
        Ok(out)
    }
}

pub(crate) fn is_real_momentum(momentum: usize, sites: usize) -> bool {
    momentum == 0 || 2 * momentum == sites
}

/// Builds the symmetry-adapted basis of sector `(momentum, parity)`.
pub fn build_sector(
    basis: &Arc<ConstrainedBasis>,
    momentum: usize,
    parity: Option<Parity>,
) -> Result<SymmetrySector> {
    require_periodic(basis)?;
    let sites = basis.sites();
    if momentum >= sites {
        return Err(param_err!("momentum {momentum} outside 0..{sites}"));
    }
    if parity.is_some() && (2 * momentum) % sites != 0 {
        return Err(param_err!(
            "reflection parity is only defined at k = 0 or k = L/2, got k = {momentum} for L = {sites}"
        ));
    }

    let theta = 2.0 * PI * momentum as f64 / sites as f64;
    // Phases e^{-i theta j}; exact +-1 on the real path.
    let phases: Vec<Complex64> = (0..sites)
        .map(|j| {
            if momentum == 0 {
                Complex64::new(1.0, 0.0)
            } else if 2 * momentum == sites {
                Complex64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                Complex64::from_polar(1.0, -theta * j as f64)
            }
        })
        .collect();

    let mut seen = vec![false; basis.len()];
    let mut vectors = Vec::new();
    let mut images: Vec<(u64, Complex64)> = Vec::with_capacity(2 * sites);
    for (idx, &state) in basis.states().iter().enumerate() {
        if seen[idx] {
            continue;
        }
        images.clear();
        let mut cur = state;
        for phase in &phases {
            images.push((cur, *phase));
            cur = translate(cur, sites);
        }
        if let Some(p) = parity {
            let mut cur = reflect(state, sites);
            for phase in &phases {
                images.push((cur, *phase * p.sign()));
                cur = translate(cur, sites);
            }
        }
        images.sort_by_key(|&(s, _)| s);
        let mut members: Vec<(usize, Complex64)> = Vec::new();
        for &(s, c) in images.iter() {
            match members.last_mut() {
                Some((last, acc)) if basis.states()[*last] == s => *acc += c,
                _ => members.push((basis.index_of(s).expect("symmetry preserves the constraint"), c)),
            }
        }
        for &(j, _) in &members {
            seen[j] = true;
        }
        members.retain(|(_, c)| c.norm() > 1e-9);
        let norm = members.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-9 {
            continue;
        }
        for (_, c) in members.iter_mut() {
            *c /= norm;
        }
        vectors.push(SectorVector { representative: state, norm, members });
    }

    Ok(SymmetrySector {
        parent: Arc::clone(basis),
        label: SectorLabel { momentum, parity },
        vectors,
    })
}

/// Dimension of every `(k, parity)` sector, with `parity = None` for all `k`
/// and both parities at the reflection-compatible momenta.
pub fn sector_dimension_table(basis: &Arc<ConstrainedBasis>) -> Result<BTreeMap<SectorLabel, usize>> {
    let sites = basis.sites();
    let orbits = build_orbits(basis)?;
    let mut table = BTreeMap::new();
    for k in 0..sites {
        let dim = orbits.iter().filter(|o| (k * o.period) % sites == 0).count();
        table.insert(SectorLabel { momentum: k, parity: None }, dim);
        if (2 * k) % sites == 0 {
            for p in [Parity::Even, Parity::Odd] {
                let dim = build_sector(basis, k, Some(p))?.dim();
                table.insert(SectorLabel { momentum: k, parity: Some(p) }, dim);
            }
        }
    }
    Ok(table)
}
