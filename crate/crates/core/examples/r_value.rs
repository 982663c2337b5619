//! Mean spacing ratio of the weakly perturbed model versus constraint radius.

use scarchain::hamiltonian::ModelParams;
use scarchain::pipeline::r_value_point;
use scarchain::symmetry::{Parity, SectorChoice};
use scarchain::BoundaryCondition;

fn main() -> scarchain::Result<()> {
    let choice = SectorChoice::zero_momentum(Some(Parity::Even));
    println!("Poisson {:.4}, GOE ~0.5307", 2.0 * 2f64.ln() - 1.0);
    for (ell, sizes) in [(0, vec![12, 14, 16]), (2, vec![18, 20, 22]), (4, vec![14, 16, 18])] {
        for l in sizes {
            let params = ModelParams::new(l, ell, BoundaryCondition::Periodic).with_lambda(0.01);
            let p = r_value_point(&params, choice, None)?;
            println!("ell={ell} L={l} dim={:>5} <r>={:.4}", p.sector_dim, p.r.mean);
        }
    }
    Ok(())
}
