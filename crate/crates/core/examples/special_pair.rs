//! The isolated radius-3 scar pair at E = +-sqrt(7)/2.

use scarchain::scars::find_ell3_special_scars;

fn main() -> scarchain::Result<()> {
    for l in [7, 9, 11, 13] {
        let report = find_ell3_special_scars(l, 1.0)?;
        for s in &report.found {
            println!("L={l} {}: E={:+.10} <Jz>={:.10} J^2={:.10}", s.sector, s.energy, s.eev_jz, s.j2);
        }
    }
    Ok(())
}
