//! Figure-dataset runner: configuration, job queue and manifest.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::{dimension, empirical_growth_rate, growth_rate, BoundaryCondition, MAX_SITES};
use crate::cache::SpectrumCache;
use crate::error::{param_err, Error, Result};
use crate::eth::{fit_gamma_curve, WindowPreset};
use crate::format::CsvWriter;
use crate::hamiltonian::ModelParams;
use crate::pipeline::{eth_scaling, fit_eth_points, level_statistics, magnetization_eevs, r_value_point, solve};
use crate::scars::{count_scars_vs_size, find_dicke_scars, find_ell3_special_scars, ScarOptions};
use crate::spectral::{density_of_states, SpacingOptions, DEFAULT_DEGENERACY_TOL};
use crate::symmetry::{Parity, SectorChoice};

/// A figure dataset the suite can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    Dims,
    Dos,
    Levelstats,
    Rvalue,
    Eev,
    EthScaling,
    Scars,
    GammaFit,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Dims,
        Figure::Dos,
        Figure::Levelstats,
        Figure::Rvalue,
        Figure::Eev,
        Figure::EthScaling,
        Figure::Scars,
        Figure::GammaFit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Dims => "dims",
            Figure::Dos => "dos",
            Figure::Levelstats => "levelstats",
            Figure::Rvalue => "rvalue",
            Figure::Eev => "eev",
            Figure::EthScaling => "eth-scaling",
            Figure::Scars => "scars",
            Figure::GammaFit => "gamma-fit",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| param_err!("unknown figure '{s}'"))
    }
}

/// Everything a suite run depends on. Energies are in units of `omega`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega: f64,
    /// Perturbation strength for every figure except `rvalue`.
    pub lambda: f64,
    /// Perturbation strength for `rvalue`.
    pub rvalue_lambda: f64,
    pub radii: Vec<usize>,
    pub sizes: Vec<usize>,
    pub bc: BoundaryCondition,
    /// Block for `dos`, `levelstats`, `rvalue` and `scars`.
    pub sector: SectorChoice,
    /// Block for `eev`, `eth-scaling` and `gamma-fit`.
    pub eth_sector: SectorChoice,
    pub level_window: WindowPreset,
    pub eth_window: WindowPreset,
    pub spacing_bins: usize,
    pub include_degenerate: bool,
    pub degeneracy_tol: f64,
    pub dos_bin_width: f64,
    pub dims_max_sites: usize,
    pub scar: ScarOptions,
    pub output_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for independent jobs.
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            lambda: 0.0,
            rvalue_lambda: 0.01,
            radii: vec![2],
            sizes: vec![10, 12, 14],
            bc: BoundaryCondition::Periodic,
            sector: SectorChoice::zero_momentum(Some(Parity::Even)),
            eth_sector: SectorChoice::zero_momentum(None),
            level_window: WindowPreset::LEVEL_STATISTICS,
            eth_window: WindowPreset::ETH,
            spacing_bins: 40,
            include_degenerate: false,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            dos_bin_width: 0.05,
            dims_max_sites: 60,
            scar: ScarOptions::default(),
            output_dir: PathBuf::from("output"),
            cache_dir: None,
            parallelism: 1,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| param_err!("config {}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(param_err!("omega must be positive"));
        }
        if self.radii.is_empty() {
            return Err(param_err!("radii must not be empty"));
        }
        if self.sizes.is_empty() {
            return Err(param_err!("sizes must not be empty"));
        }
        if let Some(&l) = self.sizes.iter().find(|&&l| l == 0 || l > MAX_SITES) {
            return Err(param_err!("system size {l} outside 1..={MAX_SITES}"));
        }
        if self.parallelism == 0 || self.spacing_bins == 0 {
            return Err(param_err!("parallelism and spacing_bins must be at least 1"));
        }
        if !(self.dos_bin_width > 0.0) || !(self.degeneracy_tol > 0.0) {
            return Err(param_err!("dos_bin_width and degeneracy_tol must be positive"));
        }
        if self.dims_max_sites == 0 || self.dims_max_sites > MAX_SITES {
            return Err(param_err!("dims_max_sites must lie in 1..={MAX_SITES}"));
        }
        let uses_momentum = |c: SectorChoice| matches!(c, SectorChoice::Momentum { .. });
        if self.bc == BoundaryCondition::Open && (uses_momentum(self.sector) || uses_momentum(self.eth_sector)) {
            return Err(param_err!("momentum sectors need periodic boundary conditions"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn params(&self, sites: usize, radius: usize) -> ModelParams {
        ModelParams::new(sites, radius, self.bc).with_omega(self.omega).with_lambda(self.lambda)
    }

    fn spacing_options(&self) -> SpacingOptions {
        SpacingOptions { include_degenerate: self.include_degenerate, degeneracy_tol: self.degeneracy_tol }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskRecord {
    pub name: String,
    pub figure: Figure,
    pub status: TaskStatus,
    pub error: Option<String>,
    /// Paths relative to the output directory.
    pub outputs: Vec<PathBuf>,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub figures: Vec<Figure>,
    pub tasks: Vec<TaskRecord>,
    /// Every file written, relative to the output directory.
    pub outputs: Vec<PathBuf>,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    /// True when a previous identical run was found and nothing was recomputed.
    pub reused: bool,
}

impl RunManifest {
    pub fn failed_tasks(&self) -> usize {
        self.tasks.iter().filter(|t| t.status == TaskStatus::Failed).count()
    }

    /// 0 when every task succeeded, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failed_tasks() == 0 {
            0
        } else {
            1
        }
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.json";

/// One independent unit of work.
struct Job {
    figure: Figure,
    name: String,
    radius: Option<usize>,
    sites: Option<usize>,
}

fn plan(config: &RunConfig, figures: &[Figure]) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &figure in figures {
        let job = |name: String, radius, sites| Job { figure, name, radius, sites };
        match figure {
            Figure::Dims | Figure::GammaFit => jobs.push(job(figure.to_string(), None, None)),
            Figure::Rvalue | Figure::EthScaling | Figure::Scars => {
                for &r in &config.radii {
                    jobs.push(job(format!("{figure}/ell{r}"), Some(r), None));
                }
            }
            Figure::Dos | Figure::Levelstats | Figure::Eev => {
                for &r in &config.radii {
                    for &l in &config.sizes {
                        jobs.push(job(format!("{figure}/ell{r}/L{l}"), Some(r), Some(l)));
                    }
                }
            }
        }
    }
    jobs
}

struct Out<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Out<'_> {
    fn csv(&mut self, name: &str, header: &[&str]) -> Result<CsvWriter<BufWriter<File>>> {
        self.written.push(PathBuf::from(name));
        Ok(CsvWriter::new(BufWriter::new(File::create(self.dir.join(name))?), header)?)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.dir.join(name), text)?;
        self.written.push(PathBuf::from(name));
        Ok(())
    }
}

fn finish(w: CsvWriter<BufWriter<File>>) -> Result<()> {
    w.into_inner().into_inner().map_err(|e| Error::Io(e.into_error()))?.sync_all()?;
    Ok(())
}

fn run_job(job: &Job, config: &RunConfig, cache: Option<&SpectrumCache>, out: &mut Out<'_>) -> Result<()> {
    let omega = config.omega;
    match job.figure {
        Figure::Dims => {
            let mut w = out.csv("dims.csv", &["L", "ell", "bc", "dimension"])?;
            let bcs = [BoundaryCondition::Open, BoundaryCondition::Periodic];
            write_dims_rows(&mut w, &config.radii, &bcs, config.dims_max_sites)?;
            finish(w)?;
            let mut g = out.csv("growth.csv", &["ell", "growth_rate", "empirical_obc", "empirical_pbc"])?;
            for &r in config.radii.iter().filter(|&&r| r >= 2 && r + 10 <= config.dims_max_sites) {
                let obc = empirical_growth_rate(r, BoundaryCondition::Open, config.dims_max_sites)?;
                let pbc = empirical_growth_rate(r, BoundaryCondition::Periodic, config.dims_max_sites)?;
                g.row(&[r.into(), growth_rate(r, 1e-13)?.into(), obc.into(), pbc.into()])?;
            }
            finish(g)
        }
        Figure::Dos => {
            let (r, l) = (job.radius.expect("radius"), job.sites.expect("sites"));
            let solved = solve(&config.params(l, r), config.sector, false, cache)?;
            let hist = density_of_states(&solved.spectrum, config.dos_bin_width * omega)?;
            let mut w = out.csv(&format!("dos_ell{r}_L{l}.csv"), &["energy", "count"])?;
            for (i, &c) in hist.counts.iter().enumerate() {
                w.row(&[(hist.bin_center(i) / omega).into(), c.into()])?;
            }
            finish(w)
        }
        Figure::Levelstats => {
            let (r, l) = (job.radius.expect("radius"), job.sites.expect("sites"));
            let stats = level_statistics(
                &config.params(l, r),
                config.sector,
                &config.level_window,
                config.spacing_bins,
                config.spacing_options(),
                cache,
            )?;
            let d = &stats.distribution;
            let mut w = out.csv(&format!("levelstats_ell{r}_L{l}.csv"), &["s_over_sbar", "count"])?;
            for (i, &c) in d.counts.iter().enumerate() {
                w.row(&[(0.5 * (d.bin_edges[i] + d.bin_edges[i + 1])).into(), c.into()])?;
            }
            finish(w)?;
            out.json(
                &format!("levelstats_ell{r}_L{l}.json"),
                &serde_json::json!({
                    "sites": l, "ell": r, "sector": config.sector, "sector_dim": stats.sector_dim,
                    "window": stats.window, "levels_in_window": d.levels_in_window,
                    "excluded_degenerate": d.excluded_degenerate, "zero_spacings": d.zero_spacings,
                    "mean_spacing": d.mean_spacing, "ks_goe": stats.ks_goe, "options": d.options,
                }),
            )
        }
        Figure::Rvalue => {
            let r = job.radius.expect("radius");
            let mut w = out.csv(&format!("rvalue_ell{r}.csv"), &["sector_dim", "r_value"])?;
            let mut points = Vec::new();
            for &l in &config.sizes {
                let params = config.params(l, r).with_lambda(config.rvalue_lambda);
                let p = r_value_point(&params, config.sector, cache)?;
                w.row(&[p.sector_dim.into(), p.r.mean.into()])?;
                points.push(p);
            }
            finish(w)?;
            out.json(&format!("rvalue_ell{r}.json"), &points)
        }
        Figure::Eev => {
            let (r, l) = (job.radius.expect("radius"), job.sites.expect("sites"));
            let solved = solve(&config.params(l, r), config.eth_sector, true, cache)?;
            let eevs = magnetization_eevs(&solved)?;
            let mut w = out.csv(&format!("eev_ell{r}_L{l}.csv"), &["energy", "eev"])?;
            for (e, v) in eevs.energies.iter().zip(&eevs.values) {
                w.row(&[(e / omega).into(), (*v).into()])?;
            }
            finish(w)
        }
        Figure::EthScaling => {
            let r = job.radius.expect("radius");
            let points = eth_scaling(r, &config.sizes, omega, config.eth_sector, &config.eth_window, cache)?;
            let mut w = out.csv(&format!("eth_ell{r}.csv"), &["L", "sector_dim", "I_w", "I_s", "I_s_signed"])?;
            for p in &points {
                let i = &p.indicators;
                w.row(&[p.sites.into(), p.sector_dim.into(), i.i_w.into(), i.i_s.into(), i.i_s_signed.into()])?;
            }
            finish(w)?;
            let fit = fit_eth_points(&points).ok();
            out.json(&format!("eth_ell{r}.json"), &serde_json::json!({ "ell": r, "points": points, "fit": fit }))
        }
        Figure::Scars => {
            let r = job.radius.expect("radius");
            let rows = count_scars_vs_size(r, &config.sizes, config.sector, omega, &config.scar, cache)?;
            let mut w = out.csv(&format!("scars_ell{r}.csv"), &["L", "ell", "scar_count"])?;
            for row in &rows {
                w.row(&[row.sites.into(), r.into(), row.flagged.into()])?;
            }
            finish(w)?;
            for &l in &config.sizes {
                let solved = solve(&config.params(l, r), config.sector, true, cache)?;
                let records = find_dicke_scars(&solved.spectrum, solved.target(), &config.scar)?;
                out.json(&format!("scars_ell{r}_L{l}.json"), &records)?;
                if r == 3 && l % 2 == 1 && l >= 7 {
                    out.json(&format!("ell3_special_L{l}.json"), &find_ell3_special_scars(l, omega)?)?;
                }
            }
            out.json(&format!("scars_ell{r}_counts.json"), &rows)
        }
        Figure::GammaFit => {
            let mut rows = Vec::new();
            for &r in &config.radii {
                let points = eth_scaling(r, &config.sizes, omega, config.eth_sector, &config.eth_window, cache)?;
                let fit = fit_eth_points(&points)?;
                rows.push((r, fit));
            }
            let mut w = out.csv("gamma_fit.csv", &["ell", "gamma", "gamma_err", "inverse_gamma"])?;
            for (r, fit) in &rows {
                w.row(&[(*r).into(), fit.gamma.into(), fit.gamma_err.into(), (1.0 / fit.gamma).into()])?;
            }
            finish(w)?;
            let pts: Vec<(f64, f64, f64)> = rows.iter().map(|(r, f)| (*r as f64, f.gamma, f.gamma_err)).collect();
            let curve = fit_gamma_curve(&pts)?;
            out.json("gamma_fit.json", &serde_json::json!({ "fits": rows, "curve": curve }))
        }
    }
}

/// Rows `L,ell,bc,dimension` for `L = 1..=max_sites`, exact integers.
pub fn write_dims_rows<W: Write>(
    w: &mut CsvWriter<W>,
    radii: &[usize],
    bcs: &[BoundaryCondition],
    max_sites: usize,
) -> Result<()> {
    for &r in radii {
        for &bc in bcs {
            let label = bc.to_string();
            for l in 1..=max_sites {
                let d = dimension(l, r, bc)?.to_string();
                w.row(&[l.into(), r.into(), (&label).into(), (&d).into()])?;
            }
        }
    }
    Ok(())
}

fn previous_run(dir: &Path, hash: &str, figures: &[Figure]) -> Option<RunManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
    let manifest: RunManifest = serde_json::from_str(&text).ok()?;
    let complete = manifest.config_hash == hash
        && manifest.figures == figures
        && manifest.failed_tasks() == 0
        && manifest.outputs.iter().all(|p| dir.join(p).is_file());
    complete.then_some(manifest)
}

/// Produces the datasets for `figures`. Task failures are recorded and the
/// run continues; configuration problems are returned as errors.
pub fn run_figure_suite(config: &RunConfig, figures: &[Figure]) -> Result<RunManifest> {
    config.validate()?;
    if figures.is_empty() {
        return Err(param_err!("no figures requested"));
    }
    let mut figures = figures.to_vec();
    figures.sort();
    figures.dedup();
    let hash = config.hash();
    let dir = config.output_dir.as_path();
    fs::create_dir_all(dir)?;
    if let Some(mut manifest) = previous_run(dir, &hash, &figures) {
        info!("outputs in {} are up to date", dir.display());
        manifest.reused = true;
        return Ok(manifest);
    }
    let cache = SpectrumCache::resolve(config.cache_dir.as_deref())?;
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());

    let mut config_text = serde_json::to_string_pretty(config)?;
    config_text.push('\n');
    fs::write(dir.join(CONFIG_FILE), config_text)?;

    let jobs = plan(config, &figures);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| param_err!("cannot start worker pool: {e}"))?;
    let tasks: Vec<TaskRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let t0 = Instant::now();
                let mut out = Out { dir, written: Vec::new() };
                let result = run_job(job, config, cache.as_ref(), &mut out);
                if let Err(e) = &result {
                    warn!("task {} failed: {e}", job.name);
                }
                TaskRecord {
                    name: job.name.clone(),
                    figure: job.figure,
                    status: if result.is_ok() { TaskStatus::Ok } else { TaskStatus::Failed },
                    error: result.err().map(|e| e.to_string()),
                    outputs: out.written,
                    seconds: t0.elapsed().as_secs_f64(),
                }
            })
            .collect()
    });

    let mut outputs: Vec<PathBuf> = vec![PathBuf::from(CONFIG_FILE)];
    outputs.extend(tasks.iter().flat_map(|t| t.outputs.iter().cloned()));
    let manifest = RunManifest {
        config_hash: hash,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        figures,
        tasks,
        outputs,
        started_unix,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        reused: false,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}
