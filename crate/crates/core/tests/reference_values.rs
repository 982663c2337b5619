//! Worked values: hand-derived and literature numbers, each checked against
//! an independent computation where one exists.

mod common;

use std::sync::Arc;

use common::*;
use scarchain::basis::{
    dimension_obc, dimension_pbc, empirical_growth_rate, enumerate_basis, growth_rate, is_allowed,
};
use scarchain::eth::{eigenstate_expectation_values, eth_indicators, fit_gamma_curve, fit_weak_decay, microcanonical_average, EevSeries, EnergyWindow, WindowPreset};
use scarchain::hamiltonian::{
    build_constrained_hamiltonian, build_fragment_projector, build_observable, build_sector_hamiltonian,
    verify_fragmentation, BasisTag, ModelParams, ObservableKind, OperatorMatrix, Target,
};
use scarchain::pipeline::{eth_scaling, fit_eth_points, solve};
use scarchain::scars::{count_scars_vs_size, find_dicke_scars, find_ell3_special_scars, scar_count, ScarOptions};
use scarchain::spectral::{
    density_of_states, detect_degeneracies, diagonalize, excess_kurtosis, level_spacing_distribution, r_value,
    r_value_with_tol, Spectrum, SpacingOptions,
};
use scarchain::symmetry::{build_orbits, build_sector, sector_dimension_table, Parity, SectorChoice};
use scarchain::BoundaryCondition::{Open, Periodic};
use scarchain::SpinConfiguration;

fn cfg(bits: u64, sites: usize) -> SpinConfiguration {
    SpinConfiguration::new(bits, sites).unwrap()
}

#[test]
fn allowed_configurations() {
    assert!(!is_allowed(cfg(0b111, 3), 3, Open).unwrap());
    assert!(is_allowed(cfg(0, 4), 1, Open).unwrap());
    // site 1 up, site 2 down, sites 3 and 4 up: the run 3-4-1 wraps
    let s = 0b1101;
    assert!(!is_allowed(cfg(s, 4), 3, Periodic).unwrap());
    assert!(is_allowed(cfg(s, 4), 3, Open).unwrap());
    for bits in 0..16 {
        for bc in [Open, Periodic] {
            assert_eq!(is_allowed(cfg(bits, 4), 3, bc).unwrap(), allowed(bits, 4, 3, bc));
        }
    }
}

#[test]
fn small_bases() {
    assert_eq!(enumerate_basis(2, 2, Open).unwrap().states(), &[0b00, 0b01, 0b10]);
    assert_eq!(enumerate_basis(1, 1, Open).unwrap().states(), &[0]);
    let b = enumerate_basis(4, 2, Periodic).unwrap();
    assert_eq!(b.len(), 7);
    let brute: Vec<u64> = (0..16).filter(|&x| allowed(x, 4, 2, Periodic)).collect();
    assert_eq!(b.states(), brute.as_slice());
}

#[test]
fn dimension_values() {
    let u = |n: u32| num_bigint::BigUint::from(n);
    assert_eq!(dimension_obc(3, 3).unwrap(), u(7));
    assert_eq!(dimension_obc(2, 3).unwrap(), u(4));
    assert_eq!(dimension_obc(5, 3).unwrap(), u(24));
    assert_eq!(dimension_obc(4, 2).unwrap(), u(8));
    assert_eq!(fibonacci(6), 8);
    assert_eq!(dimension_pbc(4, 2).unwrap(), u(7));
    assert_eq!(dimension_pbc(5, 5).unwrap(), u(31));
    assert_eq!(dimension_pbc(5, 3).unwrap(), u(21));
    for (l, r, bc) in [(5, 3, Open), (4, 2, Periodic), (5, 3, Periodic)] {
        assert_eq!(
            scarchain::basis::dimension(l, r, bc).unwrap(),
            num_bigint::BigUint::from(brute_force_count(l, r, bc))
        );
    }
}

#[test]
fn growth_values() {
    assert!((growth_rate(2, 1e-12).unwrap() - 1.618034).abs() < 1e-6);
    assert!((growth_rate(3, 1e-12).unwrap() - 1.839287).abs() < 1e-6);
    assert!(2.0 - growth_rate(64, 1e-12).unwrap() < 1e-15);
    // ratio of consecutive open-chain dimensions at L = 40
    let d40 = dimension_obc(40, 3).unwrap();
    let d41 = dimension_obc(41, 3).unwrap();
    let ratio = (d41.to_string().parse::<f64>().unwrap()) / d40.to_string().parse::<f64>().unwrap();
    assert!((ratio - growth_rate(3, 1e-12).unwrap()).abs() < 1e-9);
    for bc in [Open, Periodic] {
        assert!((empirical_growth_rate(2, bc, 60).unwrap() - 1.618034).abs() < 1e-6);
    }
    assert!(empirical_growth_rate(60, Open, 60).is_err());
}

#[test]
fn orbits_of_small_rings() {
    let b = enumerate_basis(4, 2, Periodic).unwrap();
    let orbits = build_orbits(&b).unwrap();
    let summary: Vec<(u64, usize)> = orbits.iter().map(|o| (o.representative.bits(), o.period)).collect();
    assert_eq!(summary, vec![(0b0000, 1), (0b0001, 4), (0b0101, 2)]);
    let b = enumerate_basis(2, 2, Periodic).unwrap();
    let periods: Vec<usize> = build_orbits(&b).unwrap().iter().map(|o| o.period).collect();
    assert_eq!(periods, vec![1, 2]);
    let b = enumerate_basis(5, 1, Periodic).unwrap();
    assert_eq!(build_orbits(&b).unwrap().len(), 1);
}

#[test]
fn sector_dimensions() {
    let b = Arc::new(enumerate_basis(4, 2, Periodic).unwrap());
    assert_eq!(build_sector(&b, 0, Some(Parity::Even)).unwrap().dim(), 3);
    assert_eq!(build_sector(&b, 0, Some(Parity::Odd)).unwrap().dim(), 0);
    let table = sector_dimension_table(&b).unwrap();
    let total: usize = table.iter().filter(|(k, _)| k.parity.is_none()).map(|(_, d)| d).sum();
    assert_eq!(total, 7);
    let b = Arc::new(enumerate_basis(3, 3, Periodic).unwrap());
    let total: usize = (0..3).map(|k| build_sector(&b, k, None).unwrap().dim()).sum();
    assert_eq!(total, 7);
    let b = Arc::new(enumerate_basis(6, 1, Periodic).unwrap());
    assert_eq!(build_sector(&b, 0, None).unwrap().dim(), 1);
}

#[test]
fn small_hamiltonians() {
    let one = build_constrained_hamiltonian(&enumerate_basis(1, 1, Open).unwrap(), &ModelParams::new(1, 1, Open)).unwrap();
    assert_eq!((one.dim(), one.get(0, 0)), (1, 0.0));

    let params = ModelParams::new(2, 2, Open);
    let h = build_constrained_hamiltonian(&enumerate_basis(2, 2, Open).unwrap(), &params).unwrap();
    let ev = diagonalize(&h, false).unwrap().eigenvalues;
    let s = 0.5f64.sqrt();
    assert!(max_abs_diff(&ev, &[-s, 0.0, s]) < 1e-14);
    assert!(max_abs_diff(&jacobi_eigenvalues(h.as_slice(), 3), &[-s, 0.0, s]) < 1e-14);

    let basis = enumerate_basis(6, 6, Periodic).unwrap();
    let h = build_constrained_hamiltonian(&basis, &ModelParams::new(6, 6, Periodic)).unwrap();
    let full = full_projected_hamiltonian(6, 6, Periodic, 1.0, 0.0);
    let (_, restricted) = restrict(&full, 6, 6, Periodic);
    assert!(max_abs_diff(&diagonalize(&h, false).unwrap().eigenvalues, &jacobi_eigenvalues(&restricted, 63)) < 1e-10);
}

#[test]
fn sector_block_inside_full_spectrum() {
    let params = ModelParams::new(4, 2, Periodic);
    let b = Arc::new(enumerate_basis(4, 2, Periodic).unwrap());
    let full = diagonalize(&build_constrained_hamiltonian(&b, &params).unwrap(), false).unwrap().eigenvalues;
    let s = build_sector(&b, 0, Some(Parity::Even)).unwrap();
    let block = build_sector_hamiltonian(&s, &params).unwrap();
    assert_eq!(block.dim(), 3);
    for e in diagonalize(&block, false).unwrap().eigenvalues {
        assert!(full.iter().any(|f| (f - e).abs() < 1e-12));
    }
    let empty = build_sector(&b, 0, Some(Parity::Odd)).unwrap();
    assert_eq!(build_sector_hamiltonian(&empty, &params).unwrap().dim(), 0);
    let b1 = Arc::new(enumerate_basis(5, 1, Periodic).unwrap());
    let s1 = build_sector(&b1, 0, Some(Parity::Even)).unwrap();
    let h1 = build_sector_hamiltonian(&s1, &ModelParams::new(5, 1, Periodic)).unwrap();
    assert_eq!((h1.dim(), h1.get(0, 0)), (1, 0.0));
}

#[test]
fn observables() {
    let b = enumerate_basis(4, 2, Periodic).unwrap();
    let jz = build_observable(Target::Basis(&b), ObservableKind::Jz).unwrap();
    assert_eq!(jz.get(0, 0), -2.0);
    let ev = diagonalize(&jz, false).unwrap().eigenvalues;
    let mut diag: Vec<f64> = (0..jz.dim()).map(|i| jz.get(i, i)).collect();
    diag.sort_by(f64::total_cmp);
    assert_eq!(ev, diag);

    // two sites, radius 2: |00>, |01>, |10>; J^2 spans singlet and triplet pieces
    let b = enumerate_basis(2, 2, Open).unwrap();
    let j2 = build_observable(Target::Basis(&b), ObservableKind::JSquared).unwrap();
    let ev = diagonalize(&j2, false).unwrap().eigenvalues;
    assert!(max_abs_diff(&ev, &[0.0, 2.0, 2.0]) < 1e-14);
}

#[test]
fn fragmentation_sectors() {
    let p = build_fragment_projector(3, 3, Open, 1).unwrap();
    assert_eq!(p.rank(), 1);
    assert_eq!(p.diagonal[0b111], 1);
    let report = verify_fragmentation(&ModelParams::new(6, 2, Periodic)).unwrap();
    assert!(report.passed);
    assert_eq!(report.sector_dims[0], 18);
    assert_eq!(verify_fragmentation(&ModelParams::new(3, 3, Open)).unwrap().sector_dims, vec![7, 1]);
    assert_eq!(verify_fragmentation(&ModelParams::new(2, 1, Open)).unwrap().sector_dims, vec![1, 2, 1]);
}

#[test]
fn free_chain_spectra() {
    let params = ModelParams::new(6, 0, Periodic);
    let spec = solve(&params, SectorChoice::Full, false, None).unwrap().spectrum;
    let dos = density_of_states(&spec, 0.05).unwrap();
    for (i, &c) in dos.counts.iter().enumerate() {
        let e = dos.bin_center(i);
        if c > 0 {
            assert!((e - e.round()).abs() <= 0.05, "mass at {e}");
        }
    }
    assert_eq!(dos.total(), 64);

    let spec = solve(&ModelParams::new(4, 0, Periodic), SectorChoice::Full, false, None).unwrap().spectrum;
    let clusters = detect_degeneracies(&spec, 1e-8).unwrap();
    let zero = clusters.iter().find(|c| c.center.abs() < 1e-8).unwrap();
    assert_eq!(zero.multiplicity, 6);
}

#[test]
fn pxp_density_is_near_gaussian() {
    let params = ModelParams::new(16, 2, Periodic);
    let spec = solve(&params, SectorChoice::zero_momentum(Some(Parity::Even)), false, None).unwrap().spectrum;
    let kappa = excess_kurtosis(&spec.eigenvalues);
    assert!(kappa.abs() < 0.5, "excess kurtosis {kappa}");
    let clusters = detect_degeneracies(&spec, 1e-8).unwrap();
    assert!(clusters.iter().all(|c| c.multiplicity == 1 || c.center.abs() < 1e-8));
}

fn picket_fence(n: usize) -> Spectrum {
    Spectrum::new((0..n).map(|i| i as f64).collect(), BasisTag::FullSpace { sites: 1 })
}

#[test]
fn picket_fence_statistics() {
    let spec = picket_fence(100);
    let window = EnergyWindow::new(49.5, 50.0).unwrap();
    let d = level_spacing_distribution(&spec, &window, 10, SpacingOptions::default()).unwrap();
    assert!(d.normalized_spacings.iter().all(|&s| (s - 1.0).abs() < 1e-12));
    let edges = &d.bin_edges;
    let hit = d.counts.iter().enumerate().find(|(_, &c)| c > 0).unwrap().0;
    assert!(edges[hit] <= 1.0 && 1.0 <= edges[hit + 1]);
    assert_eq!(r_value(&spec).unwrap().mean, 1.0);
}

#[test]
fn degenerate_levels_in_window() {
    let levels = vec![0.0, 0.3, 0.3, 0.3, 0.9, 1.4, 2.0, 2.1, 2.9];
    let spec = Spectrum::new(levels, BasisTag::FullSpace { sites: 1 });
    let window = EnergyWindow::new(1.5, 1.5).unwrap();
    let kept = level_spacing_distribution(&spec, &window, 5, SpacingOptions { include_degenerate: true, ..Default::default() })
        .unwrap();
    assert_eq!(kept.zero_spacings, 2);
    assert!(kept.counts[0] >= 2);
    let collapsed = level_spacing_distribution(&spec, &window, 5, SpacingOptions::default()).unwrap();
    assert_eq!(collapsed.excluded_degenerate, 2);
    assert_eq!(collapsed.zero_spacings, 0);
    assert_eq!(r_value_with_tol(&[0.0, 1.0, 1.0, 3.0, 4.0], 1e-9).unwrap().excluded_zero_spacings, 1);
}

fn series(energies: &[f64], values: &[f64]) -> EevSeries {
    EevSeries {
        energies: energies.to_vec(),
        values: values.to_vec(),
        observable: "test".into(),
        source: BasisTag::FullSpace { sites: 1 },
    }
}

#[test]
fn expectation_values_and_averages() {
    let b = enumerate_basis(6, 2, Periodic).unwrap();
    let params = ModelParams::new(6, 2, Periodic);
    let spec = diagonalize(&build_constrained_hamiltonian(&b, &params).unwrap(), true).unwrap();
    let id = OperatorMatrix::identity(b.len(), BasisTag::of_basis(&b));
    let eevs = eigenstate_expectation_values(&spec, &id, "1").unwrap();
    assert!(eevs.values.iter().all(|v| (v - 1.0).abs() < 1e-12));

    let w = EnergyWindow::new(0.0, 1.0).unwrap();
    let one = microcanonical_average(&series(&[0.5], &[0.7]), &w).unwrap();
    assert_eq!((one.mean, one.n_states), (0.7, 1));
    let flat = microcanonical_average(&series(&[0.1, 0.2, 0.3], &[0.4; 3]), &w).unwrap();
    assert!((flat.mean - 0.4).abs() < 1e-15);

    // an observable odd under the spectral reflection averages to zero
    let params = ModelParams::new(10, 2, Periodic);
    let solved = solve(&params, SectorChoice::zero_momentum(Some(Parity::Even)), true, None).unwrap();
    let jx = build_observable(solved.target(), ObservableKind::Jx).unwrap();
    let eevs = eigenstate_expectation_values(&solved.spectrum, &jx, "Jx").unwrap();
    let avg = microcanonical_average(&eevs, &EnergyWindow::new(0.0, 1.0).unwrap()).unwrap();
    assert!(avg.mean.abs() < 1e-9, "{}", avg.mean);
}

#[test]
fn indicator_arithmetic() {
    let w = EnergyWindow::new(0.0, 10.0).unwrap();
    let flat = eth_indicators(&series(&[0.0, 1.0, 2.0], &[0.3; 3]), &w).unwrap();
    assert!(flat.i_s < 1e-15 && flat.i_w < 1e-15);
    let ind = eth_indicators(&series(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.0, 0.0, 1.0]), &w).unwrap();
    assert!((ind.mean - 0.25).abs() < 1e-15);
    assert!((ind.i_s - 0.75).abs() < 1e-15);
    assert!((ind.i_w - 0.1875f64.sqrt()).abs() < 1e-15);
}

#[test]
fn decay_fits() {
    let pts: Vec<(f64, f64)> = [10.0, 40.0, 160.0, 640.0].iter().map(|&d: &f64| (d, 3.0 * d.powf(-0.5))).collect();
    let fit = fit_weak_decay(&pts).unwrap();
    assert!((fit.gamma - 0.5).abs() < 1e-12);
    let flat = fit_weak_decay(&[(10.0, 0.2), (20.0, 0.2), (30.0, 0.2)]).unwrap();
    assert!(flat.gamma.abs() < 1e-12 && !flat.accepted);

    let synth: Vec<(f64, f64, f64)> = (4..=8).map(|l| (l as f64, 1.0 / (2.0 * l as f64 + 1.0), 0.01)).collect();
    let curve = fit_gamma_curve(&synth).unwrap();
    assert!((curve.a - 2.0).abs() < 1e-9 && (curve.b - 1.0).abs() < 1e-9);
    let bare: Vec<(f64, f64, f64)> = synth.iter().map(|&(l, g, _)| (l, g, 0.0)).collect();
    let curve = fit_gamma_curve(&bare).unwrap();
    assert!(!curve.weighted);
    assert!((curve.a - 2.0).abs() < 1e-9);
}

#[test]
fn pxp_weak_eth_decay() {
    let sizes: Vec<usize> = (8..=18).step_by(2).collect();
    let points = eth_scaling(2, &sizes, 1.0, SectorChoice::zero_momentum(None), &WindowPreset::ETH, None).unwrap();
    let fit = fit_eth_points(&points).unwrap();
    assert!(fit.gamma > 0.0);
    assert!(fit.gamma_err / fit.gamma < 0.25, "{fit:?}");
}

#[test]
fn dicke_scars_at_small_sizes() {
    let options = ScarOptions::default();
    // radius = L excludes only the all-up state; low-j Dicke states survive
    let b = enumerate_basis(6, 6, Periodic).unwrap();
    let params = ModelParams::new(6, 6, Periodic);
    let spec = diagonalize(&build_constrained_hamiltonian(&b, &params).unwrap(), true).unwrap().with_params(params);
    let records = find_dicke_scars(&spec, Target::Basis(&b), &options).unwrap();
    assert!(records.iter().any(|r| r.flagged));

    let k0 = SectorChoice::zero_momentum(Some(Parity::Even));
    let solved = solve(&ModelParams::new(12, 4, Periodic), k0, true, None).unwrap();
    let records = find_dicke_scars(&solved.spectrum, solved.target(), &options).unwrap();
    let flagged: Vec<_> = records.iter().filter(|r| r.flagged).collect();
    assert!(!flagged.is_empty());
    for r in flagged {
        assert!((r.energy - r.energy.round()).abs() < 1e-6);
        assert!(r.eev_jz.abs() < 1e-9);
    }

    let rows = count_scars_vs_size(4, &[10, 12, 14], k0, 1.0, &options, None).unwrap();
    assert!(scarchain::scars::strictly_increasing(&rows));
    let pxp = count_scars_vs_size(2, &[10, 12, 14], k0, 1.0, &options, None).unwrap();
    assert!(pxp.iter().all(|r| r.flagged == 0));
    let free = scar_count(&ModelParams::new(8, 0, Periodic), SectorChoice::Full, &options, None).unwrap();
    assert_eq!(free.zero_multiplicity, 70);
    assert!(count_scars_vs_size(4, &[], k0, 1.0, &options, None).is_err());
}

#[test]
fn radius_three_pair() {
    let target = 7f64.sqrt() / 2.0;
    for l in [7, 9] {
        let report = find_ell3_special_scars(l, 1.0).unwrap();
        assert!(report.passed);
        let mut energies: Vec<f64> = report.found.iter().map(|s| s.energy).collect();
        energies.sort_by(f64::total_cmp);
        assert!(max_abs_diff(&energies, &[-target, target]) < 1e-8);
        assert!(report.found.iter().all(|s| (s.j2 - 3.75).abs() < 1e-6 && (s.eev_jz + 3.0 / 7.0).abs() < 1e-8));
    }
    assert!(find_ell3_special_scars(8, 1.0).is_err());
}
