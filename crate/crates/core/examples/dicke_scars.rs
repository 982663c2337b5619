//! Dicke-state scars at integer energies for constraint radius 4.

use scarchain::hamiltonian::ModelParams;
use scarchain::pipeline::solve;
use scarchain::scars::{count_scars_vs_size, find_dicke_scars, ScarOptions};
use scarchain::symmetry::{Parity, SectorChoice};
use scarchain::BoundaryCondition;

fn main() -> scarchain::Result<()> {
    let options = ScarOptions::default();
    let choice = SectorChoice::zero_momentum(Some(Parity::Even));
    let solved = solve(&ModelParams::new(12, 4, BoundaryCondition::Periodic), choice, true, None)?;
    for r in find_dicke_scars(&solved.spectrum, solved.target(), &options)? {
        println!(
            "E={:>6.3} j={:.3} |Jx v - m v|={:.1e} |J2 v - j(j+1) v|={:.1e} <Jz>={:.1e} scar={}",
            r.energy, r.j, r.residual_jx, r.residual_j2, r.eev_jz, r.flagged
        );
    }
    for row in count_scars_vs_size(4, &[10, 11, 12, 13, 14], choice, 1.0, &options, None)? {
        println!("L={} dim={} scars={}", row.sites, row.dim, row.flagged);
    }
    Ok(())
}
