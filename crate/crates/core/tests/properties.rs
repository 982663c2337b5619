mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scarchain::basis::{dimension, enumerate_basis};
use scarchain::cache::{CacheKey, SpectrumCache};
use scarchain::eth::{eth_indicators, EevSeries, EnergyWindow};
use scarchain::format::g12;
use scarchain::hamiltonian::{build_constrained_hamiltonian, build_sector_hamiltonian, BasisTag, ModelParams, OperatorMatrix};
use scarchain::spectral::{diagonalize, r_value_with_tol, wigner_surmise_goe, wigner_surmise_goe_cdf, Spectrum};
use scarchain::symmetry::{build_sector, Parity, SectorChoice};
use scarchain::BoundaryCondition;

fn bc_strategy() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![Just(BoundaryCondition::Open), Just(BoundaryCondition::Periodic)]
}

/// `(sites, radius)` with `radius <= sites`.
fn chain(max_sites: usize) -> impl Strategy<Value = (usize, usize)> {
    (1..=max_sites).prop_flat_map(|l| (Just(l), 0..=l))
}

fn series(energies: Vec<f64>, values: Vec<f64>) -> EevSeries {
    EevSeries { energies, values, observable: "o".into(), source: BasisTag::FullSpace { sites: 1 } }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimension_matches_brute_force((l, r) in chain(14), bc in bc_strategy()) {
        let d = dimension(l, r, bc).unwrap();
        prop_assert_eq!(d, num_bigint::BigUint::from(brute_force_count(l, r, bc)));
    }

    #[test]
    fn dimension_monotone_in_radius(l in 2usize..40, r in 1usize..39) {
        prop_assume!(r < l);
        for bc in [BoundaryCondition::Open, BoundaryCondition::Periodic] {
            prop_assert!(dimension(l, r, bc).unwrap() <= dimension(l, r + 1, bc).unwrap());
        }
        prop_assert!(dimension(l, r, BoundaryCondition::Periodic).unwrap() <= dimension(l, r, BoundaryCondition::Open).unwrap());
    }

    #[test]
    fn hamiltonian_identities(
        (l, r) in chain(9),
        bc in bc_strategy(),
        lambda in prop_oneof![Just(0.0), -1.0f64..1.0],
        omega in 0.2f64..3.0,
    ) {
        let params = ModelParams::new(l, r, bc).with_omega(omega).with_lambda(lambda);
        let basis = enumerate_basis(l, r, bc).unwrap();
        let h = build_constrained_hamiltonian(&basis, &params).unwrap();
        prop_assert!(h.is_symmetric());
        let ev = diagonalize(&h, false).unwrap().eigenvalues;
        let scale = omega.max(lambda.abs()) * l as f64;
        prop_assert!((ev.iter().sum::<f64>() - h.trace()).abs() <= 1e-10 * scale);
        if lambda == 0.0 {
            let mirrored: Vec<f64> = ev.iter().rev().map(|e| -e).collect();
            prop_assert!(max_abs_diff(&ev, &mirrored) <= 1e-10 * scale);
        }
        let full = full_projected_hamiltonian(l, r, bc, omega, lambda);
        let (_, reference) = restrict(&full, l, r, bc);
        prop_assert!(max_abs_diff(h.as_slice(), &reference) <= 1e-12 * scale);
    }

    #[test]
    fn sectors_partition_the_basis(l in 3usize..=12, r in 0usize..=6) {
        prop_assume!(r <= l);
        let basis = Arc::new(enumerate_basis(l, r, BoundaryCondition::Periodic).unwrap());
        let total: usize = (0..l).map(|k| build_sector(&basis, k, None).unwrap().dim()).sum();
        prop_assert_eq!(total, basis.len());
        let k0 = build_sector(&basis, 0, None).unwrap().dim();
        let even = build_sector(&basis, 0, Some(Parity::Even)).unwrap().dim();
        let odd = build_sector(&basis, 0, Some(Parity::Odd)).unwrap().dim();
        prop_assert_eq!(even + odd, k0);
    }

    #[test]
    fn eigensolver_matches_jacobi(seed in any::<u64>(), n in 1usize..24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let m = OperatorMatrix::from_row_major(n, a.clone(), BasisTag::FullSpace { sites: 1 }).unwrap();
        let ev = diagonalize(&m, false).unwrap().eigenvalues;
        prop_assert!(max_abs_diff(&ev, &jacobi_eigenvalues(&a, n)) < 1e-11);
    }

    #[test]
    fn indicator_inequalities_and_shifts(
        values in prop::collection::vec(-1.0f64..1.0, 2..60),
        shift in -5.0f64..5.0,
    ) {
        let n = values.len();
        let energies: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let window = EnergyWindow::new(0.5, 0.6).unwrap();
        let base = eth_indicators(&series(energies.clone(), values.clone()), &window).unwrap();
        prop_assert!(base.i_s >= base.i_w);
        prop_assert!(base.i_s >= base.i_s_signed);
        let raised = eth_indicators(&series(energies.clone(), values.iter().map(|v| v + shift).collect()), &window).unwrap();
        prop_assert!((raised.i_w - base.i_w).abs() < 1e-12 && (raised.i_s - base.i_s).abs() < 1e-12);
        let moved = EnergyWindow::new(0.5 + shift, 0.6).unwrap();
        let later = eth_indicators(&series(energies.iter().map(|e| e + shift).collect(), values), &moved).unwrap();
        prop_assert_eq!(later.n_states, base.n_states);
        prop_assert!((later.i_w - base.i_w).abs() < 1e-12);
    }

    #[test]
    fn r_value_is_scale_and_shift_invariant(
        gaps in prop::collection::vec(0.01f64..2.0, 3..80),
        a in 0.1f64..10.0,
        b in -10.0f64..10.0,
    ) {
        let mut levels = vec![0.0];
        for g in &gaps {
            levels.push(levels[levels.len() - 1] + g);
        }
        let base = r_value_with_tol(&levels, 1e-12).unwrap().mean;
        prop_assert!((base - mean_ratio(&levels)).abs() < 1e-12);
        let mapped: Vec<f64> = levels.iter().map(|e| a * e + b).collect();
        prop_assert!((r_value_with_tol(&mapped, 1e-12).unwrap().mean - base).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&base));
    }

    #[test]
    fn wigner_cdf_integrates_density(s in 0.0f64..6.0) {
        let integral = simpson(wigner_surmise_goe, 0.0, s, 2000);
        prop_assert!((integral - wigner_surmise_goe_cdf(s)).abs() < 1e-10);
    }

    #[test]
    fn g12_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = g12(x).parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-12);
    }

    #[test]
    fn sector_choice_round_trips(k in 0usize..40, p in prop_oneof![Just(None), Just(Some(Parity::Even)), Just(Some(Parity::Odd))]) {
        let c = SectorChoice::Momentum { momentum: k, parity: p };
        prop_assert_eq!(c.to_string().parse::<SectorChoice>().unwrap(), c);
        let json = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<SectorChoice>(&json).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cache_round_trip(values in prop::collection::vec(-100.0f64..100.0, 0..50), l in 2usize..12) {
        let dir = tempfile::tempdir().unwrap();
        let cache = SpectrumCache::new(dir.path()).unwrap();
        let params = ModelParams::new(l, 2, BoundaryCondition::Periodic);
        let key = CacheKey::new(&params, &SectorChoice::Full, false);
        let mut sorted = values;
        sorted.sort_by(f64::total_cmp);
        let spec = Spectrum::new(sorted.clone(), BasisTag::FullSpace { sites: l }).with_params(params);
        cache.store(&key, &spec).unwrap();
        let back = cache.lookup(&key).unwrap();
        prop_assert_eq!(back.eigenvalues, sorted);
        let other = CacheKey::new(&params.with_lambda(0.5), &SectorChoice::Full, false);
        prop_assert!(cache.lookup(&other).is_none());
    }

    #[test]
    fn sector_spectra_lie_in_full_spectrum(l in 4usize..=11, r in 2usize..=5, lambda in -0.5f64..0.5) {
        prop_assume!(r <= l);
        let params = ModelParams::new(l, r, BoundaryCondition::Periodic).with_lambda(lambda);
        let basis = Arc::new(enumerate_basis(l, r, BoundaryCondition::Periodic).unwrap());
        let full = diagonalize(&build_constrained_hamiltonian(&basis, &params).unwrap(), false).unwrap().eigenvalues;
        for p in [Parity::Even, Parity::Odd] {
            let s = build_sector(&basis, 0, Some(p)).unwrap();
            for e in diagonalize(&build_sector_hamiltonian(&s, &params).unwrap(), false).unwrap().eigenvalues {
                prop_assert!(full.iter().any(|f| (f - e).abs() < 1e-9));
            }
        }
    }
}

#[test]
fn poisson_r_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut levels = Vec::with_capacity(1_000_001);
    let mut e = 0.0;
    levels.push(e);
    for _ in 0..1_000_000 {
        let u: f64 = rng.gen();
        e += -(1.0 - u).ln();
        levels.push(e);
    }
    let r = r_value_with_tol(&levels, 0.0).unwrap().mean;
    let expected = 2.0 * 2f64.ln() - 1.0;
    assert!((r - expected).abs() < 0.01, "{r} vs {expected}");
}

#[test]
fn wigner_normalization_and_mean() {
    let norm = simpson(wigner_surmise_goe, 0.0, 12.0, 20_000);
    let mean = simpson(|s| s * wigner_surmise_goe(s), 0.0, 12.0, 20_000);
    assert!((norm - 1.0).abs() < 1e-9);
    assert!((mean - 1.0).abs() < 1e-9);
    assert_eq!(wigner_surmise_goe(0.0), 0.0);
}
