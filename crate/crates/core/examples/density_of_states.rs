//! Spectrum of the zero-momentum even block and its density of states.

use scarchain::hamiltonian::ModelParams;
use scarchain::pipeline::solve;
use scarchain::spectral::{density_of_states, excess_kurtosis};
use scarchain::symmetry::{Parity, SectorChoice};
use scarchain::BoundaryCondition;

fn main() -> scarchain::Result<()> {
    for ell in [2, 4] {
        let params = ModelParams::new(16, ell, BoundaryCondition::Periodic);
        let solved = solve(&params, SectorChoice::zero_momentum(Some(Parity::Even)), false, None)?;
        let e = &solved.spectrum.eigenvalues;
        let dos = density_of_states(&solved.spectrum, 0.25)?;
        println!("ell={ell}: dim {}, E in [{:.3}, {:.3}], excess kurtosis {:.3}", e.len(), e[0], e[e.len() - 1], excess_kurtosis(e));
        for (i, &c) in dos.counts.iter().enumerate() {
            println!("  {:>7.3} {}", dos.bin_center(i), "#".repeat(c.div_ceil(4)));
        }
    }
    Ok(())
}
