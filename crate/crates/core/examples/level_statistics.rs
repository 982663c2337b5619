//! Level-spacing distribution in the mid-spectrum window against the GOE surmise.

use scarchain::eth::WindowPreset;
use scarchain::hamiltonian::ModelParams;
use scarchain::pipeline::level_statistics;
use scarchain::spectral::{wigner_surmise_goe, SpacingOptions};
use scarchain::symmetry::{Parity, SectorChoice};
use scarchain::BoundaryCondition;

fn main() -> scarchain::Result<()> {
    let choice = SectorChoice::zero_momentum(Some(Parity::Even));
    for l in [18, 20, 22] {
        let params = ModelParams::new(l, 2, BoundaryCondition::Periodic);
        let stats = level_statistics(&params, choice, &WindowPreset::LEVEL_STATISTICS, 10, SpacingOptions::default(), None)?;
        let d = &stats.distribution;
        println!("L={l}: {} levels in window, KS distance to GOE {:.3}", d.levels_in_window, stats.ks_goe);
        if l == 22 {
            for i in 0..d.counts.len() {
                let s = 0.5 * (d.bin_edges[i] + d.bin_edges[i + 1]);
                println!("  s={s:.2} p={:.3} goe={:.3}", d.density[i], wigner_surmise_goe(s));
            }
        }
    }
    Ok(())
}
