//! Magnetization EEVs, ETH indicators and the weak-ETH decay exponent.

use scarchain::eth::{fit_gamma_curve, WindowPreset};
use scarchain::pipeline::{eth_scaling, fit_eth_points};
use scarchain::symmetry::SectorChoice;

fn main() -> scarchain::Result<()> {
    let k0 = SectorChoice::zero_momentum(None);
    let runs = [(2, vec![10, 12, 14, 16]), (4, vec![12, 13, 14, 15]), (5, vec![12, 13, 14, 15]), (6, vec![12, 13, 14, 15])];
    let mut gammas = Vec::new();
    for (ell, sizes) in runs {
        let points = eth_scaling(ell, &sizes, 1.0, k0, &WindowPreset::ETH, None)?;
        for p in &points {
            let i = &p.indicators;
            println!("ell={ell} L={} D={:>4} n={:>3} I_w={:.4} I_s={:.4}", p.sites, p.sector_dim, i.n_states, i.i_w, i.i_s);
        }
        let fit = fit_eth_points(&points)?;
        println!("ell={ell}: gamma = {:.3} +- {:.3}", fit.gamma, fit.gamma_err);
        if ell >= 4 {
            gammas.push((ell as f64, fit.gamma, fit.gamma_err));
        }
    }
    match fit_gamma_curve(&gammas) {
        Ok(c) => println!("1/gamma = {:.2} ell + {:.2}, R^2 = {:.3}", c.a, c.b, c.r_squared),
        Err(e) => println!("no 1/gamma fit: {e}"),
    }
    Ok(())
}
