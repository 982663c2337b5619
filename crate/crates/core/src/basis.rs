//! Constrained product-state basis and its dimension.
//!
//! A configuration of `L` spin-1/2 sites is stored as a bitmask where bit
//! `i - 1` holds site `i` (1 = up, 0 = down). A constraint of radius `r`
//! forbids any run of `r` consecutive up spins; under periodic boundary
//! conditions runs wrap around the chain. Radius 0 denotes the unconstrained
//! chain.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};

/// Largest chain length representable by the bitmask encoding.
pub const MAX_SITES: usize = 62;

/// Default cap on the number of enumerated states (~512 MiB of `u64`).
pub const DEFAULT_BASIS_BUDGET: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Open,
    Periodic,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Open => f.write_str("obc"),
            BoundaryCondition::Periodic => f.write_str("pbc"),
        }
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obc" | "open" => Ok(BoundaryCondition::Open),
            "pbc" | "periodic" => Ok(BoundaryCondition::Periodic),
            other => Err(param_err!("unknown boundary condition '{other}'")),
        }
    }
}

/// A product state of `sites` spins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration {
    bits: u64,
    sites: usize,
}

impl SpinConfiguration {
    pub fn new(bits: u64, sites: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(param_err!("chain length {sites} outside 1..={MAX_SITES}"));
        }
        if bits >> sites != 0 {
            return Err(param_err!("bitmask {bits:#b} does not fit in {sites} sites"));
        }
        Ok(Self { bits, sites })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Whether site `site` (1-based) is up.
    pub fn is_up(&self, site: usize) -> bool {
        (self.bits >> (site - 1)) & 1 == 1
    }

    pub fn up_count(&self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Display for SpinConfiguration {
    /// Site 1 first, `u`/`d` per site.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 1..=self.sites {
            f.write_str(if self.is_up(site) { "u" } else { "d" })?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn site_mask(sites: usize) -> u64 {
    if sites >= 64 {
        u64::MAX
    } else {
        (1u64 << sites) - 1
    }
}

/// True if `bits` contains `radius` consecutive set bits, reading the lowest
/// `sites` bits as a line. `radius` must be >= 1.
#[inline]
fn has_linear_run(bits: u128, radius: usize) -> bool {
    let mut acc = bits;
    for shift in 1..radius {
        acc &= bits >> shift;
        if acc == 0 {
            return false;
        }
    }
    acc != 0
}

/// Raw admissibility test on a bitmask; radius 0 admits everything.
#[inline]
pub(crate) fn allowed_bits(bits: u64, sites: usize, radius: usize, bc: BoundaryCondition) -> bool {
    if radius == 0 {
        return true;
    }
    match bc {
        BoundaryCondition::Open => !has_linear_run(bits as u128, radius),
        BoundaryCondition::Periodic => {
            let b = bits as u128;
            // Unrolling the ring twice exposes every cyclic run; an all-up
            // ring has a run of exactly `sites`.
            let doubled = b | (b << sites);
            !has_linear_run(doubled, radius.min(sites))
        }
    }
}

/// Number of constraint windows (length-`radius` blocks of up spins).
pub(crate) fn window_count(bits: u64, sites: usize, radius: usize, bc: BoundaryCondition) -> usize {
    if radius == 0 || radius > sites {
        return 0;
    }
    let starts = match bc {
        BoundaryCondition::Open => sites - radius + 1,
        BoundaryCondition::Periodic => sites,
    };
    (0..starts)
        .filter(|&start| (0..radius).all(|o| (bits >> ((start + o) % sites)) & 1 == 1))
        .count()
}

fn check_radius(sites: usize, radius: usize) -> Result<()> {
    if sites == 0 || sites > MAX_SITES {
        return Err(param_err!("chain length {sites} outside 1..={MAX_SITES}"));
    }
    if radius > sites {
        return Err(param_err!("constraint radius {radius} exceeds chain length {sites}"));
    }
    Ok(())
}

/// Whether `config` survives the radius-`radius` constraint projector.
pub fn is_allowed(config: SpinConfiguration, radius: usize, bc: BoundaryCondition) -> Result<bool> {
    check_radius(config.sites, radius)?;
    Ok(allowed_bits(config.bits, config.sites, radius, bc))
}

/// Sorted list of allowed configurations for fixed `(L, radius, bc)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedBasis {
    states: Vec<u64>,
    sites: usize,
    radius: usize,
    bc: BoundaryCondition,
}

impl ConstrainedBasis {
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn config(&self, index: usize) -> SpinConfiguration {
        SpinConfiguration { bits: self.states[index], sites: self.sites }
    }

    /// Position of `bits` in the basis, if allowed.
    #[inline]
    pub fn index_of(&self, bits: u64) -> Option<usize> {
        self.states.binary_search(&bits).ok()
    }

    pub fn is_allowed_bits(&self, bits: u64) -> bool {
        allowed_bits(bits, self.sites, self.radius, self.bc)
    }
}

pub fn enumerate_basis(sites: usize, radius: usize, bc: BoundaryCondition) -> Result<ConstrainedBasis> {
    enumerate_basis_with_budget(sites, radius, bc, DEFAULT_BASIS_BUDGET)
}

/// Enumerates the allowed states in ascending bitmask order, refusing to
/// allocate more than `budget` states.
pub fn enumerate_basis_with_budget(
    sites: usize,
    radius: usize,
    bc: BoundaryCondition,
    budget: usize,
) -> Result<ConstrainedBasis> {
    check_radius(sites, radius)?;
    let expected = dimension(sites, radius, bc)?;
    let expected = expected
        .to_usize()
        .filter(|&n| n <= budget)
        .ok_or_else(|| Error::Resource(format!("basis of dimension {expected} exceeds budget of {budget} states")))?;

    let mut states = Vec::with_capacity(expected);
    let mut walker = Walker { sites, radius, bc, out: &mut states };
    // Sites are fixed from the most significant end with 0 before 1, so the
    // output comes out sorted.
    walker.descend(0, sites, 0, 0, true);
    debug_assert_eq!(states.len(), expected);
    Ok(ConstrainedBasis { states, sites, radius, bc })
}

struct Walker<'a> {
    sites: usize,
    radius: usize,
    bc: BoundaryCondition,
    out: &'a mut Vec<u64>,
}

impl Walker<'_> {
    /// `remaining` low sites still to fix; `run` is the current up-run at the
    /// low end of the prefix; `lead` is the up-run at the top end.
    fn descend(&mut self, prefix: u64, remaining: usize, run: usize, lead: usize, all_up: bool) {
        if remaining == 0 {
            if self.radius > 0 && self.bc == BoundaryCondition::Periodic {
                let wrap = if all_up { self.sites } else { lead + run };
                if wrap >= self.radius {
                    return;
                }
            }
            self.out.push(prefix);
            return;
        }
        let bit = remaining - 1;
        self.descend(prefix, bit, 0, lead, false);
        let run_up = run + 1;
        if self.radius == 0 || run_up < self.radius {
            let lead_up = if all_up { lead + 1 } else { lead };
            self.descend(prefix | (1u64 << bit), bit, run_up, lead_up, all_up);
        }
    }
}

/// Open-chain dimension for every length `0..=max_sites` at fixed radius.
fn obc_table(max_sites: usize, radius: usize) -> Vec<BigUint> {
    let mut table: Vec<BigUint> = Vec::with_capacity(max_sites + 1);
    for n in 0..=max_sites {
        let value = if radius == 0 || n < radius {
            BigUint::one() << n
        } else if n == radius {
            (BigUint::one() << n) - 1u32
        } else {
            table[n - radius..n].iter().sum()
        };
        table.push(value);
    }
    table
}

/// Open-chain constrained dimension: each term is the sum of the previous
/// `radius` terms, seeded by `2^L` below the radius and `2^L - 1` at it.
pub fn dimension_obc(sites: usize, radius: usize) -> Result<BigUint> {
    if sites == 0 {
        return Err(param_err!("chain length must be >= 1"));
    }
    Ok(obc_table(sites, radius).pop().expect("non-empty table"))
}

/// Periodic-chain constrained dimension, assembled from open-chain values by
/// classifying the run of up spins that contains the last site.
pub fn dimension_pbc(sites: usize, radius: usize) -> Result<BigUint> {
    if sites == 0 {
        return Err(param_err!("chain length must be >= 1"));
    }
    if radius == 0 || sites < radius {
        return Ok(BigUint::one() << sites);
    }
    if sites == radius {
        return Ok((BigUint::one() << sites) - 1u32);
    }
    let obc = obc_table(sites, radius);
    let mut total = obc[sites - 1].clone();
    // A run of m up spins covering the last site, flanked by down spins, can
    // sit in m positions and leaves an open chain of L - m - 2 sites.
    for run in 1..radius {
        total += &obc[sites - run - 2] * BigUint::from(run);
    }
    Ok(total)
}

pub fn dimension(sites: usize, radius: usize, bc: BoundaryCondition) -> Result<BigUint> {
    match bc {
        BoundaryCondition::Open => dimension_obc(sites, radius),
        BoundaryCondition::Periodic => dimension_pbc(sites, radius),
    }
}

/// `2 - d` for the asymptotic growth factor `d` of a radius-`radius` chain.
///
/// The growth factor solves `radius * ln d + ln(2 - d) = 0` on `(1, 2)`. The
/// deficit `2 - d` shrinks like `2^-radius`, so bisection runs on
/// `t = ln(2 - d)` to keep full relative precision for large radii.
pub fn growth_deficit(radius: usize, tol: f64) -> Result<f64> {
    if radius < 2 {
        return Err(param_err!("growth rate needs radius >= 2, got {radius}"));
    }
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(param_err!("tolerance {tol} outside (0, 1e-6]"));
    }
    let r = radius as f64;
    let residual = |t: f64| r * (2.0 - t.exp()).ln() + t;
    let mut lo = -r * std::f64::consts::LN_2 - 10.0;
    let mut hi = (1.0 - 1e-9f64).ln();
    let (f_lo, f_hi) = (residual(lo), residual(hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Numerical(format!(
            "no sign change for radius {radius}: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let width_d = hi.exp() - lo.exp();
        if width_d <= tol * 1e-3 && hi - lo <= 1e-13 * lo.abs().max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Asymptotic per-site growth factor `d` with `D ~ d^L`.
pub fn growth_rate(radius: usize, tol: f64) -> Result<f64> {
    Ok(2.0 - growth_deficit(radius, tol)?)
}

/// Ratio of consecutive dimensions at `max_sites`, an estimate of `d`.
pub fn empirical_growth_rate(radius: usize, bc: BoundaryCondition, max_sites: usize) -> Result<f64> {
    if radius == 0 {
        return Err(param_err!("growth rate is trivially 2 for the unconstrained chain"));
    }
    if max_sites < radius + 10 {
        return Err(param_err!("need max_sites >= radius + 10, got {max_sites} for radius {radius}"));
    }
    let num = dimension(max_sites, radius, bc)?;
    let den = dimension(max_sites - 1, radius, bc)?;
    Ok(biguint_ratio(&num, &den))
}

/// `num / den` as f64, safe for values beyond f64 range.
pub(crate) fn biguint_ratio(num: &BigUint, den: &BigUint) -> f64 {
    if den.is_zero() {
        return f64::INFINITY;
    }
    let shift = den.bits().saturating_sub(60);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}
