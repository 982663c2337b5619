use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use scarchain::basis::enumerate_basis;
use scarchain::cache::SpectrumCache;
use scarchain::eth::{fit_gamma_curve, WindowPreset};
use scarchain::format::CsvWriter;
use scarchain::hamiltonian::{verify_fragmentation, ModelParams};
use scarchain::pipeline::{eth_scaling, fit_eth_points, level_statistics, magnetization_eevs, r_value_point, solve};
use scarchain::scars::{count_scars_vs_size, find_dicke_scars, find_ell3_special_scars, ScarOptions};
use scarchain::spectral::{SpacingOptions, DEFAULT_DEGENERACY_TOL};
use scarchain::suite::{run_figure_suite, write_dims_rows, Figure, RunConfig};
use scarchain::symmetry::{parity_label, sector_dimension_table, SectorChoice};
use scarchain::{BoundaryCondition, Error, Result};

#[derive(Parser)]
#[command(name = "scarchain", version, about = "Exact diagonalization of radius-constrained spin chains")]
struct Cli {
    /// Spectrum cache directory (SCARCHAIN_CACHE_DIR takes precedence).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constrained Hilbert-space dimensions for L = 1..=L-max.
    Dims {
        #[arg(long = "L-max")]
        l_max: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value = "pbc")]
        bc: BoundaryCondition,
    },
    /// Dimensions of every momentum and reflection sector.
    Sectors {
        #[arg(long = "L")]
        sites: usize,
        #[arg(long)]
        ell: usize,
    },
    /// Checks the window-count block structure of the full-space Hamiltonian.
    Fragcheck {
        #[arg(long = "L")]
        sites: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value = "pbc")]
        bc: BoundaryCondition,
    },
    /// Eigenvalues of one block.
    Spectrum {
        #[command(flatten)]
        model: Model,
        /// Metadata JSON destination.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Level-spacing histogram in the mid-spectrum window.
    Levelstats {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// Keep every member of degenerate multiplets.
        #[arg(long)]
        include_degenerate: bool,
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Mean spacing ratio for each size in a list.
    Rvalue {
        #[command(flatten)]
        sweep: Sweep,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Eigenstate expectation values of the magnetization density.
    Eev {
        #[command(flatten)]
        model: Model,
    },
    /// ETH indicators versus sector dimension, with the power-law fit.
    EthScaling {
        #[command(flatten)]
        sweep: Sweep,
        /// Fit-summary JSON destination.
        #[arg(long)]
        fit: Option<PathBuf>,
    },
    /// Fits the decay exponent across radii and the curve through them.
    GammaFit {
        #[arg(long, value_delimiter = ',', required = true)]
        ell: Vec<usize>,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value = "k=0")]
        sector: SectorChoice,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
    /// Dicke-state scars at special energies.
    Scars {
        #[arg(long)]
        ell: usize,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value = "k=0,p=+1")]
        sector: SectorChoice,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Also search for the isolated radius-3 pair at +-sqrt(7)/2.
        #[arg(long)]
        special_ell3: bool,
        /// CSV summary destination.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Runs the figure-dataset suite from a config file.
    Suite {
        /// JSON config; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Figures to produce; all when omitted.
        #[arg(long, value_delimiter = ',')]
        figure: Vec<Figure>,
        /// Overrides the configured output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Prints the default config and exits.
        #[arg(long)]
        print_default_config: bool,
    },
}

#[derive(Args)]
struct Model {
    #[arg(long = "L")]
    sites: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long, default_value = "pbc")]
    bc: BoundaryCondition,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// `full`, `k=<n>` or `k=<n>,p=<+1|-1>`.
    #[arg(long, default_value = "k=0,p=+1")]
    sector: SectorChoice,
}

impl Model {
    fn params(&self) -> ModelParams {
        ModelParams::new(self.sites, self.ell, self.bc).with_omega(self.omega).with_lambda(self.lambda)
    }
}

#[derive(Args)]
struct Sweep {
    #[arg(long)]
    ell: usize,
    /// Comma-separated sizes.
    #[arg(long = "L", value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value = "k=0,p=+1")]
    sector: SectorChoice,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

fn stdout_csv(header: &[&str]) -> Result<CsvWriter<BufWriter<io::Stdout>>> {
    Ok(CsvWriter::new(BufWriter::new(io::stdout()), header)?)
}

fn file_csv(path: &Path, header: &[&str]) -> Result<CsvWriter<BufWriter<fs::File>>> {
    Ok(CsvWriter::new(BufWriter::new(fs::File::create(path)?), header)?)
}

fn flush<W: Write>(w: CsvWriter<W>) -> Result<()> {
    w.into_inner().flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cache = SpectrumCache::resolve(cli.cache_dir.as_deref())?;
    let cache = cache.as_ref();
    match cli.command {
        Command::Dims { l_max, ell, bc } => {
            let mut w = stdout_csv(&["L", "ell", "bc", "dimension"])?;
            write_dims_rows(&mut w, &[ell], &[bc], l_max)?;
            flush(w)?;
        }
        Command::Sectors { sites, ell } => {
            let basis = Arc::new(enumerate_basis(sites, ell, BoundaryCondition::Periodic)?);
            let mut w = stdout_csv(&["k", "parity", "dimension"])?;
            for (label, dim) in sector_dimension_table(&basis)? {
                w.row(&[label.momentum.into(), (&parity_label(label.parity)).into(), dim.into()])?;
            }
            flush(w)?;
        }
        Command::Fragcheck { sites, ell, bc } => {
            let report = verify_fragmentation(&ModelParams::new(sites, ell, bc))?;
            write_json(None, &report)?;
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Spectrum { model, meta } => {
            let solved = solve(&model.params(), model.sector, false, cache)?;
            let mut w = stdout_csv(&["energy"])?;
            for e in &solved.spectrum.eigenvalues {
                w.row(&[(e / model.omega).into()])?;
            }
            flush(w)?;
            if let Some(path) = meta {
                let value = json!({
                    "params": solved.params, "sector": model.sector, "sector_dim": solved.dim(),
                    "energy_unit": "omega", "degeneracy_tol": DEFAULT_DEGENERACY_TOL,
                });
                write_json(Some(&path), &value)?;
            }
        }
        Command::Levelstats { model, bins, include_degenerate, meta } => {
            let options = SpacingOptions { include_degenerate, ..SpacingOptions::default() };
            let stats =
                level_statistics(&model.params(), model.sector, &WindowPreset::LEVEL_STATISTICS, bins, options, cache)?;
            let d = &stats.distribution;
            let mut w = stdout_csv(&["s_over_sbar", "count"])?;
            for (i, &c) in d.counts.iter().enumerate() {
                w.row(&[(0.5 * (d.bin_edges[i] + d.bin_edges[i + 1])).into(), c.into()])?;
            }
            flush(w)?;
            if let Some(path) = meta {
                let value = json!({
                    "params": model.params(), "sector": model.sector, "sector_dim": stats.sector_dim,
                    "window": stats.window, "levels_in_window": d.levels_in_window,
                    "excluded_degenerate": d.excluded_degenerate, "zero_spacings": d.zero_spacings,
                    "mean_spacing": d.mean_spacing, "bin_width": d.bin_width(), "ks_goe": stats.ks_goe,
                    "options": d.options,
                });
                write_json(Some(&path), &value)?;
            }
        }
        Command::Rvalue { sweep, lambda, meta } => {
            let mut points = Vec::new();
            let mut w = stdout_csv(&["sector_dim", "r_value"])?;
            for &l in &sweep.sizes {
                let params = ModelParams::new(l, sweep.ell, BoundaryCondition::Periodic)
                    .with_omega(sweep.omega)
                    .with_lambda(lambda);
                let p = r_value_point(&params, sweep.sector, cache)?;
                w.row(&[p.sector_dim.into(), p.r.mean.into()])?;
                points.push(p);
            }
            flush(w)?;
            if let Some(path) = meta {
                let value = json!({ "sector": sweep.sector, "degeneracy_tol": DEFAULT_DEGENERACY_TOL, "points": points });
                write_json(Some(&path), &value)?;
            }
        }
        Command::Eev { model } => {
            let solved = solve(&model.params(), model.sector, true, cache)?;
            let eevs = magnetization_eevs(&solved)?;
            let mut w = stdout_csv(&["energy", "eev"])?;
            for (e, v) in eevs.energies.iter().zip(&eevs.values) {
                w.row(&[(e / model.omega).into(), (*v).into()])?;
            }
            flush(w)?;
        }
        Command::EthScaling { sweep, fit } => {
            let points = eth_scaling(sweep.ell, &sweep.sizes, sweep.omega, sweep.sector, &WindowPreset::ETH, cache)?;
            let mut w = stdout_csv(&["L", "sector_dim", "I_w", "I_s", "I_s_signed"])?;
            for p in &points {
                let i = &p.indicators;
                w.row(&[p.sites.into(), p.sector_dim.into(), i.i_w.into(), i.i_s.into(), i.i_s_signed.into()])?;
            }
            flush(w)?;
            if let Some(path) = fit {
                let summary = fit_eth_points(&points);
                let value = match &summary {
                    Ok(f) => json!({ "ell": sweep.ell, "sector": sweep.sector, "fit": f }),
                    Err(e) => json!({ "ell": sweep.ell, "sector": sweep.sector, "fit": null, "error": e.to_string() }),
                };
                write_json(Some(&path), &value)?;
                summary?;
            }
        }
        Command::GammaFit { ell, sizes, sector, omega } => {
            let mut fits = Vec::new();
            for &r in &ell {
                let points = eth_scaling(r, &sizes, omega, sector, &WindowPreset::ETH, cache)?;
                fits.push((r, fit_eth_points(&points)?));
            }
            let pts: Vec<(f64, f64, f64)> = fits.iter().map(|(r, f)| (*r as f64, f.gamma, f.gamma_err)).collect();
            let curve = fit_gamma_curve(&pts)?;
            write_json(None, &json!({ "sector": sector, "sizes": sizes, "fits": fits, "curve": curve }))?;
        }
        Command::Scars { ell, sizes, sector, omega, special_ell3, summary } => {
            let options = ScarOptions::default();
            let mut records = Vec::new();
            for &l in &sizes {
                let params = ModelParams::new(l, ell, BoundaryCondition::Periodic).with_omega(omega);
                let solved = solve(&params, sector, true, cache)?;
                for rec in find_dicke_scars(&solved.spectrum, solved.target(), &options)? {
                    records.push(json!({ "L": l, "ell": ell, "record": rec }));
                }
            }
            let mut ok = true;
            if special_ell3 {
                if ell != 3 {
                    return Err(Error::Parameter("--special-ell3 needs --ell 3".into()));
                }
                let reports: Vec<_> =
                    sizes.iter().map(|&l| find_ell3_special_scars(l, omega)).collect::<Result<_>>()?;
                ok = reports.iter().all(|r| r.passed);
                write_json(None, &json!({ "records": records, "ell3_special": reports }))?;
            } else {
                write_json(None, &records)?;
            }
            if let Some(path) = summary {
                let rows = count_scars_vs_size(ell, &sizes, sector, omega, &options, cache)?;
                let mut w = file_csv(&path, &["L", "ell", "scar_count"])?;
                for row in &rows {
                    w.row(&[row.sites.into(), ell.into(), row.flagged.into()])?;
                }
                flush(w)?;
            }
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Suite { config, figure, output_dir, print_default_config } => {
            if print_default_config {
                write_json(None, &RunConfig::default())?;
                return Ok(ExitCode::SUCCESS);
            }
            let mut cfg = match config {
                Some(path) => RunConfig::from_json_file(&path)?,
                None => RunConfig::default(),
            };
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            if cli.cache_dir.is_some() {
                cfg.cache_dir = cli.cache_dir;
            }
            let figures = if figure.is_empty() { Figure::ALL.to_vec() } else { figure };
            let manifest = run_figure_suite(&cfg, &figures)?;
            for t in &manifest.tasks {
                eprintln!("{:<28} {:?} {:.1}s {}", t.name, t.status, t.seconds, t.error.as_deref().unwrap_or(""));
            }
            return Ok(ExitCode::from(manifest.exit_code() as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parameter(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
