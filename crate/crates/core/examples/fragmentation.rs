//! The window-count operator splits the unconstrained space into blocks; the
//! zero-window block is the constrained model.

use scarchain::hamiltonian::{verify_fragmentation, ModelParams};
use scarchain::BoundaryCondition::{Open, Periodic};

fn main() -> scarchain::Result<()> {
    for (l, ell, bc) in [(8, 2, Periodic), (9, 3, Open), (10, 4, Periodic)] {
        let report = verify_fragmentation(&ModelParams::new(l, ell, bc))?;
        println!(
            "L={l} ell={ell} {bc}: block dims {:?}, max |H - P H0 P| = {:e}, passed = {}",
            report.sector_dims, report.max_hamiltonian_deviation, report.passed
        );
    }
    Ok(())
}
