//! Operators on the unconstrained `2^L`-dimensional product space.
//!
//! These are evaluated term by term from the Pauli-string form of the model
//! and serve as the reference against which the constrained-basis builders
//! are checked. They are only meant for small chains.

use crate::basis::{window_count, ConstrainedBasis};
use crate::error::{Error, Result};
use crate::hamiltonian::{BasisTag, ModelParams, OperatorMatrix};

/// Largest chain for dense full-space matrices.
pub const MAX_DENSE_SITES: usize = 12;

/// A product of single-site Paulis with a real coefficient; only X and Z
/// are needed for the Hamiltonian.
struct PauliTerm {
    coeff: f64,
    x_sites: Vec<usize>,
    z_sites: Vec<usize>,
}

impl PauliTerm {
    /// Acts on basis state `s`, returning the image state and amplitude.
    fn act(&self, s: u64) -> (u64, f64) {
        let mut amp = self.coeff;
        for &z in &self.z_sites {
            amp *= if (s >> z) & 1 == 1 { 1.0 } else { -1.0 };
        }
        let mut t = s;
        for &x in &self.x_sites {
            t ^= 1 << x;
        }
        (t, amp)
    }
}

fn hamiltonian_terms(params: &ModelParams) -> Vec<PauliTerm> {
    let l = params.sites;
    let mut terms: Vec<PauliTerm> = (0..l)
        .map(|i| PauliTerm { coeff: 0.5 * params.omega, x_sites: vec![i], z_sites: vec![] })
        .collect();
    if params.lambda != 0.0 {
        let last = match params.bc {
            crate::basis::BoundaryCondition::Open => l.saturating_sub(1),
            crate::basis::BoundaryCondition::Periodic if l >= 2 => l,
            crate::basis::BoundaryCondition::Periodic => 0,
        };
        for i in 0..last {
            let j = (i + 1) % l;
            terms.push(PauliTerm { coeff: params.lambda, x_sites: vec![i], z_sites: vec![j] });
            terms.push(PauliTerm { coeff: params.lambda, x_sites: vec![j], z_sites: vec![i] });
        }
    }
    terms
}

/// `<t| H_0 |s>` of the unconstrained (optionally perturbed) Hamiltonian.
pub fn matrix_element(t: u64, s: u64, params: &ModelParams) -> f64 {
    hamiltonian_terms(params)
        .iter()
        .map(|term| {
            let (img, amp) = term.act(s);
            if img == t {
                amp
            } else {
                0.0
            }
        })
        .sum()
}

fn check_dense(sites: usize) -> Result<()> {
    if sites > MAX_DENSE_SITES {
        return Err(Error::Resource(format!("dense full-space matrix needs L <= {MAX_DENSE_SITES}, got {sites}")));
    }
    Ok(())
}

/// Dense `P H_0 P` over all `2^L` configurations, with the projector taken
/// from the zero-window-count condition.
pub fn projected_hamiltonian(params: &ModelParams) -> Result<OperatorMatrix> {
    params.validate()?;
    check_dense(params.sites)?;
    let n = 1usize << params.sites;
    let keep: Vec<bool> = (0..n as u64)
        .map(|b| window_count(b, params.sites, params.radius, params.bc) == 0)
        .collect();
    let terms = hamiltonian_terms(params);
    let mut data = vec![0.0; n * n];
    for s in 0..n {
        if !keep[s] {
            continue;
        }
        for term in &terms {
            let (t, amp) = term.act(s as u64);
            if keep[t as usize] {
                data[t as usize * n + s] += amp;
            }
        }
    }
    OperatorMatrix::from_row_major(n, data, BasisTag::FullSpace { sites: params.sites })
}

/// Places constrained-basis amplitudes into the `2^L` product space.
pub fn embed(basis: &ConstrainedBasis, amplitudes: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 1usize << basis.sites()];
    for (&s, &a) in basis.states().iter().zip(amplitudes) {
        out[s as usize] = a;
    }
    out
}

/// `(1/2) sum_i X_i` applied to a full-space vector.
pub fn apply_jx(v: &[f64], sites: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (s, &a) in v.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for i in 0..sites {
            out[s ^ (1 << i)] += 0.5 * a;
        }
    }
    out
}

/// `A` in `Jy = i A`, applied to a full-space vector.
pub fn apply_jy_imag(v: &[f64], sites: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (s, &a) in v.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for i in 0..sites {
            // Y|u> = i|d>, Y|d> = -i|u>
            let sign = if (s >> i) & 1 == 1 { 0.5 } else { -0.5 };
            out[s ^ (1 << i)] += sign * a;
        }
    }
    out
}

pub fn apply_jz(v: &[f64], sites: usize) -> Vec<f64> {
    v.iter()
        .enumerate()
        .map(|(s, &a)| a * ((s as u64).count_ones() as f64 - 0.5 * sites as f64))
        .collect()
}

/// Unconstrained total spin `J^2 = Jx^2 + Jy^2 + Jz^2` applied to `v`.
pub fn apply_j2(v: &[f64], sites: usize) -> Vec<f64> {
    let xx = apply_jx(&apply_jx(v, sites), sites);
    let yy = apply_jy_imag(&apply_jy_imag(v, sites), sites);
    let zz = apply_jz(&apply_jz(v, sites), sites);
    // (iA)(iA) = -A A
    xx.iter().zip(&yy).zip(&zz).map(|((x, y), z)| x - y + z).collect()
}

/// Unconstrained `(Omega/2) sum_i X_i` applied to `v`.
pub fn apply_free_hamiltonian(v: &[f64], sites: usize, omega: f64) -> Vec<f64> {
    apply_jx(v, sites).into_iter().map(|x| omega * x).collect()
}
