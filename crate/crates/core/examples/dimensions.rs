//! Constrained Hilbert-space dimensions and their growth constants.

use scarchain::basis::{dimension, empirical_growth_rate, growth_rate};
use scarchain::BoundaryCondition::{Open, Periodic};

fn main() -> scarchain::Result<()> {
    println!("{:>3} {:>12} {:>12} {:>12}", "L", "ell=2 obc", "ell=3 obc", "ell=3 pbc");
    for l in (4..=40).step_by(4) {
        println!("{l:>3} {:>12} {:>12} {:>12}", dimension(l, 2, Open)?, dimension(l, 3, Open)?, dimension(l, 3, Periodic)?);
    }
    println!();
    for ell in 2..=8 {
        let d = growth_rate(ell, 1e-12)?;
        let e = empirical_growth_rate(ell, Periodic, 60)?;
        println!("ell={ell}: d = {d:.9}, D(60)/D(59) = {e:.9}");
    }
    Ok(())
}
