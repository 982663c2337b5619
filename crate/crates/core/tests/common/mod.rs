//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use scarchain::BoundaryCondition;

/// Longest run of up spins, wrapping around for periodic chains.
pub fn longest_run(bits: u64, sites: usize, bc: BoundaryCondition) -> usize {
    let up = |i: usize| (bits >> (i % sites)) & 1 == 1;
    if (0..sites).all(up) {
        return sites;
    }
    let span = match bc {
        BoundaryCondition::Open => sites,
        BoundaryCondition::Periodic => 2 * sites,
    };
    let (mut best, mut run) = (0, 0);
    for i in 0..span {
        run = if up(i) { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

pub fn allowed(bits: u64, sites: usize, radius: usize, bc: BoundaryCondition) -> bool {
    radius == 0 || longest_run(bits, sites, bc) < radius
}

/// Counts allowed configurations by visiting all `2^L` of them.
pub fn brute_force_count(sites: usize, radius: usize, bc: BoundaryCondition) -> u64 {
    (0..1u64 << sites).filter(|&b| allowed(b, sites, radius, bc)).count() as u64
}

/// `F(1) = F(2) = 1`.
pub fn fibonacci(n: usize) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// Largest real root of `x^(r+1) - 2 x^r + 1 = 0` below 2, by Newton from 2.
pub fn growth_root(radius: usize) -> f64 {
    let r = radius as f64;
    let f = |x: f64| x.powf(r) * (2.0 - x) - 1.0;
    let df = |x: f64| r * x.powf(r - 1.0) * (2.0 - x) - x.powf(r);
    // bracket between the maximum of f and 2
    let mut lo = 2.0 * r / (r + 1.0);
    let mut hi = 2.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let step = x - f(x) / df(x);
        x = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if f(x) > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    x
}

/// Dense `P H P` over the full product space, built from Pauli actions.
/// Row-major, `2^L x 2^L`.
pub fn full_projected_hamiltonian(
    sites: usize,
    radius: usize,
    bc: BoundaryCondition,
    omega: f64,
    lambda: f64,
) -> Vec<f64> {
    let n = 1usize << sites;
    let mut h = vec![0.0; n * n];
    let bonds: Vec<(usize, usize)> = match bc {
        BoundaryCondition::Open => (0..sites.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        BoundaryCondition::Periodic if sites >= 2 => (0..sites).map(|i| (i, (i + 1) % sites)).collect(),
        BoundaryCondition::Periodic => Vec::new(),
    };
    let z = |s: usize, i: usize| if (s >> i) & 1 == 1 { 1.0 } else { -1.0 };
    for s in 0..n {
        for i in 0..sites {
            h[(s ^ (1 << i)) * n + s] += 0.5 * omega;
        }
        for &(i, j) in &bonds {
            h[(s ^ (1 << i)) * n + s] += lambda * z(s, j);
            h[(s ^ (1 << j)) * n + s] += lambda * z(s, i);
        }
    }
    for s in 0..n {
        if !allowed(s as u64, sites, radius, bc) {
            for t in 0..n {
                h[s * n + t] = 0.0;
                h[t * n + s] = 0.0;
            }
        }
    }
    h
}

/// Rows and columns of `full` at the allowed configurations, ascending.
pub fn restrict(full: &[f64], sites: usize, radius: usize, bc: BoundaryCondition) -> (Vec<u64>, Vec<f64>) {
    let n = 1usize << sites;
    let keep: Vec<u64> = (0..n as u64).filter(|&b| allowed(b, sites, radius, bc)).collect();
    let d = keep.len();
    let mut out = vec![0.0; d * d];
    for (i, &t) in keep.iter().enumerate() {
        for (j, &s) in keep.iter().enumerate() {
            out[i * d + j] = full[t as usize * n + s as usize];
        }
    }
    (keep, out)
}

/// Eigenvalues of a symmetric row-major matrix by cyclic Jacobi rotations,
/// ascending.
pub fn jacobi_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    let mut a = matrix.to_vec();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s
    };
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    for _ in 0..100 {
        if off(&a) <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Mean spacing ratio, written out directly.
pub fn mean_ratio(levels: &[f64]) -> f64 {
    let s: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let r: Vec<f64> = s.windows(2).map(|w| w[0].min(w[1]) / w[0].max(w[1])).collect();
    r.iter().sum::<f64>() / r.len() as f64
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
