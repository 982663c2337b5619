//! Translation orbits and momentum/reflection sector dimensions of a ring.

use std::sync::Arc;

use scarchain::basis::enumerate_basis;
use scarchain::symmetry::{build_orbits, parity_label, sector_dimension_table};
use scarchain::BoundaryCondition;

fn main() -> scarchain::Result<()> {
    let basis = Arc::new(enumerate_basis(8, 2, BoundaryCondition::Periodic)?);
    println!("L=8, ell=2: {} states", basis.len());
    for orbit in build_orbits(&basis)? {
        println!("  {:08b} period {}", orbit.representative.bits(), orbit.period);
    }
    for (label, dim) in sector_dimension_table(&basis)? {
        println!("k={} p={}: {dim}", label.momentum, parity_label(label.parity));
    }
    Ok(())
}
