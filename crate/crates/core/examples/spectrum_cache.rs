//! A cold and a warm solve through the on-disk spectrum cache.

use std::time::Instant;

use scarchain::cache::SpectrumCache;
use scarchain::hamiltonian::ModelParams;
use scarchain::pipeline::solve;
use scarchain::symmetry::{Parity, SectorChoice};
use scarchain::BoundaryCondition;

fn main() -> scarchain::Result<()> {
    let dir = std::env::temp_dir().join("scarchain-cache-example");
    let cache = SpectrumCache::new(&dir)?;
    let params = ModelParams::new(22, 2, BoundaryCondition::Periodic);
    let choice = SectorChoice::zero_momentum(Some(Parity::Even));
    for run in ["cold", "warm"] {
        let t = Instant::now();
        let solved = solve(&params, choice, false, Some(&cache))?;
        println!("{run}: {} levels in {:.2}s", solved.dim(), t.elapsed().as_secs_f64());
    }
    println!("cache at {}", cache.dir().display());
    Ok(())
}
