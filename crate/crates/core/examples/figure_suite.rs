//! Runs a small figure suite twice; the second run is a no-op.

use scarchain::suite::{run_figure_suite, Figure, RunConfig};

fn main() -> scarchain::Result<()> {
    let out = std::env::temp_dir().join("scarchain-suite-example");
    let config = RunConfig {
        radii: vec![2, 4],
        sizes: vec![10, 12],
        dims_max_sites: 30,
        output_dir: out.clone(),
        cache_dir: Some(out.join("cache")),
        ..RunConfig::default()
    };
    let figures = [Figure::Dims, Figure::Dos, Figure::Rvalue, Figure::Scars];
    for _ in 0..2 {
        let manifest = run_figure_suite(&config, &figures)?;
        println!("reused={} failed={} files={}", manifest.reused, manifest.failed_tasks(), manifest.outputs.len());
    }
    println!("outputs in {}", out.display());
    Ok(())
}
