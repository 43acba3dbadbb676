//! Parameter sweeps, analysis reports and the oracle self-check.
//!
//! Runs are split into fixed-size blocks of consecutive run indices. Each
//! run draws its schedule from its own counter-based stream, and block
//! results merge with exact integer arithmetic, so outputs do not depend on
//! the number of worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{AttemptSchedule, Engine, Mode, ModelParams};
use crate::ensemble::{
    fit_nu, fit_tc, uniform_grid, Canonical, FssFit, MeanTime, QCurve, SlopePeak, StatsAccumulator, DEFAULT_GRID,
};
use crate::error::{Error, Result};
use crate::io::{self, StatsFile};
use crate::oracle;

/// Runs per scheduling block.
const BLOCK: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sweep,
    Analyze,
    Stats,
    OracleCheck,
}

/// Everything needed to reproduce a job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub command: Command,
    pub sides: Vec<usize>,
    pub rs: Vec<u32>,
    pub mode: Mode,
    pub runs: u64,
    /// First run index; lets one ensemble be split over several invocations.
    pub run_start: u64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub t_grid: usize,
    pub nu_fixed: f64,
}

impl JobConfig {
    pub fn new(command: Command) -> Self {
        JobConfig {
            command,
            sides: Vec::new(),
            rs: Vec::new(),
            mode: Mode::Standard,
            runs: 1000,
            run_start: 0,
            seed: 0,
            workers: 1,
            out: PathBuf::from("out"),
            t_grid: DEFAULT_GRID,
            nu_fixed: 4.0 / 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let needs_params = matches!(self.command, Command::Sweep | Command::Stats);
        if needs_params && self.sides.is_empty() {
            return Err(Error::invalid("at least one --L is required"));
        }
        if needs_params && self.rs.is_empty() {
            return Err(Error::invalid("at least one --r is required"));
        }
        let max_side = match self.command {
            Command::OracleCheck => oracle::NAIVE_MAX_SIDE,
            _ => crate::lattice::MAX_SIDE,
        };
        if let Some(l) = self.sides.iter().find(|&&l| !(2..=max_side).contains(&l)) {
            return Err(Error::invalid(format!("L = {l} outside 2..={max_side}")));
        }
        if self.runs == 0 {
            return Err(Error::invalid("--runs must be positive"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("--workers must be positive"));
        }
        if self.t_grid < 2 {
            return Err(Error::invalid("--t-grid needs at least 2 points"));
        }
        if !(self.nu_fixed > 0.0 && self.nu_fixed.is_finite()) {
            return Err(Error::invalid("--nu-fixed must be positive"));
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
    }
}

/// Q-curve and final-state statistics of one parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    pub qcurve: QCurve,
    pub stats: StatsAccumulator,
}

fn run_block(params: &ModelParams, start: u64, end: u64) -> Ensemble {
    let mut engine = Engine::new(*params);
    let mut qcurve = QCurve::empty(params, start);
    let mut stats = StatsAccumulator::new(params.side * params.side);
    for k in start..end {
        let rec = engine.run_indexed(k);
        qcurve.push(&rec).expect("engine records match their params");
        stats.push(&rec);
    }
    Ensemble { qcurve, stats }
}

/// Runs `run_start..run_start + runs` of `params` on the current rayon pool.
pub fn run_ensemble(params: &ModelParams, run_start: u64, runs: u64) -> Ensemble {
    let end = run_start + runs;
    let blocks: Vec<(u64, u64)> = (run_start..end)
        .step_by(BLOCK as usize)
        .map(|s| (s, (s + BLOCK).min(end)))
        .collect();
    let parts: Vec<Ensemble> = blocks.into_par_iter().map(|(s, e)| run_block(params, s, e)).collect();
    let mut acc = Ensemble { qcurve: QCurve::empty(params, run_start), stats: StatsAccumulator::new(params.side * params.side) };
    for part in &parts {
        acc.qcurve = acc.qcurve.merge(&part.qcurve).expect("blocks are adjacent");
        acc.stats = acc.stats.merge(&part.stats).expect("same lattice");
    }
    acc
}

/// Runs an ensemble on a dedicated pool of `workers` threads.
pub fn run_ensemble_with_workers(params: &ModelParams, run_start: u64, runs: u64, workers: usize) -> Result<Ensemble> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| run_ensemble(params, run_start, runs)))
}

fn file_stem(kind: &str, p: &ModelParams, run_start: u64, runs: u64) -> String {
    let mut s = format!("{kind}_L{}_r{}_{}", p.side, p.r, p.mode);
    if run_start != 0 {
        write!(s, "_runs{}-{}", run_start, run_start + runs).unwrap();
    }
    s
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serialisable") + "\n";
    io::write_text(path, &text)
}

/// Files produced for one `(L, r)` by a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub side: usize,
    pub r: u32,
    pub qcurve: PathBuf,
    pub stats: PathBuf,
}

fn params_for(config: &JobConfig, side: usize, r: u32) -> ModelParams {
    ModelParams { side, r, mode: config.mode, seed: config.seed }
}

/// Runs every `(L, r)` and persists one Q-curve and one statistics file
/// for each, plus the job configuration.
pub fn cmd_sweep(config: &JobConfig) -> Result<Vec<SweepOutput>> {
    config.validate()?;
    ensure_dir(&config.out)?;
    let pool = config.pool()?;
    let mut outputs = Vec::new();
    for &side in &config.sides {
        for &r in &config.rs {
            let params = params_for(config, side, r);
            let ens = pool.install(|| run_ensemble(&params, config.run_start, config.runs));
            let stem_q = file_stem("qcurve", &params, config.run_start, config.runs);
            let stem_s = file_stem("stats", &params, config.run_start, config.runs);
            let qpath = config.out.join(format!("{stem_q}.txt"));
            let spath = config.out.join(format!("{stem_s}.txt"));
            io::write_qcurve(&qpath, &ens.qcurve)?;
            io::write_stats(&spath, &StatsFile { params, run_start: config.run_start, stats: ens.stats })?;
            outputs.push(SweepOutput { side, r, qcurve: qpath, stats: spath });
        }
    }
    write_json(&config.out.join("sweep.json"), &SweepManifest { config: config.clone(), outputs: outputs.clone() })?;
    Ok(outputs)
}

#[derive(Serialize)]
struct SweepManifest {
    config: JobConfig,
    outputs: Vec<SweepOutput>,
}

/// One row of a final-state table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub side: usize,
    pub r: u32,
    pub runs: u64,
    pub rho_mean: f64,
    pub rho_std: f64,
    pub largest_percent_mean: f64,
    pub largest_percent_std: f64,
    pub distinct_mean: f64,
    pub distinct_std: f64,
    pub wrap_fraction: f64,
}

impl StatsRow {
    pub fn from_stats(side: usize, r: u32, acc: &StatsAccumulator) -> Self {
        let (rho, m, d) = (acc.rho(), acc.largest_fraction(), acc.distinct_volumes());
        StatsRow {
            side,
            r,
            runs: acc.runs,
            rho_mean: rho.mean,
            rho_std: rho.std,
            largest_percent_mean: 100.0 * m.mean,
            largest_percent_std: 100.0 * m.std,
            distinct_mean: d.mean,
            distinct_std: d.std,
            wrap_fraction: acc.wrap_fraction(),
        }
    }
}

pub fn stats_table(rows: &[StatsRow]) -> String {
    let mut out = String::from("# L r runs rho_mean rho_std M_percent_mean M_percent_std n_mean n_std wrap_fraction\n");
    for row in rows {
        writeln!(
            out,
            "{} {} {} {:.6} {:.6} {:.4} {:.4} {:.3} {:.3} {:.6}",
            row.side,
            row.r,
            row.runs,
            row.rho_mean,
            row.rho_std,
            row.largest_percent_mean,
            row.largest_percent_std,
            row.distinct_mean,
            row.distinct_std,
            row.wrap_fraction
        )
        .unwrap();
    }
    out
}

/// Final-state ensembles for every `(L, r)`, written as statistics files
/// and one combined table.
pub fn cmd_stats(config: &JobConfig) -> Result<Vec<StatsRow>> {
    config.validate()?;
    ensure_dir(&config.out)?;
    let pool = config.pool()?;
    let mut rows = Vec::new();
    for &side in &config.sides {
        for &r in &config.rs {
            let params = params_for(config, side, r);
            let ens = pool.install(|| run_ensemble(&params, config.run_start, config.runs));
            let stem = file_stem("stats", &params, config.run_start, config.runs);
            io::write_stats(
                &config.out.join(format!("{stem}.txt")),
                &StatsFile { params, run_start: config.run_start, stats: ens.stats },
            )?;
            rows.push(StatsRow::from_stats(side, r, &ens.stats));
        }
    }
    io::write_text(&config.out.join(format!("final_state_{}.txt", config.mode)), &stats_table(&rows))?;
    write_json(&config.out.join(format!("final_state_{}.json", config.mode)), &rows)?;
    Ok(rows)
}

/// Scalars extracted from one lattice size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub side: usize,
    pub runs: u64,
    pub t_bar: Option<MeanTime>,
    pub max_slope: SlopePeak,
}

/// Outcome of the analysis of one constraint value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub r: u32,
    pub mode: Mode,
    pub sizes: Vec<SizeSummary>,
    /// False when no run of any size ever wrapped.
    pub percolates: bool,
    pub tc: Option<FssFit>,
    pub nu: Option<FssFit>,
    /// Why the fits were not attempted although some size wrapped.
    pub fit_skipped: Option<String>,
    pub files: Vec<PathBuf>,
}

/// Collects Q-curve files from a mix of file and directory arguments.
pub fn collect_qcurve_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("qcurve_") && n.ends_with(".txt"))
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Merges curves of the same `(L, r, mode)` and groups them by `(r, mode)`.
pub fn group_curves(curves: Vec<QCurve>) -> Result<BTreeMap<(u32, Mode), BTreeMap<usize, QCurve>>> {
    let mut groups: BTreeMap<(u32, Mode), BTreeMap<usize, QCurve>> = BTreeMap::new();
    for q in curves {
        let slot = groups.entry((q.r, q.mode)).or_default();
        match slot.remove(&q.side) {
            Some(prev) => {
                slot.insert(q.side, prev.merge(&q)?);
            }
            None => {
                slot.insert(q.side, q);
            }
        }
    }
    Ok(groups)
}

impl PartialOrd for Mode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

/// Canonical curves, plot data and scaling fits for one constraint.
pub fn analyze_group(config: &JobConfig, r: u32, mode: Mode, curves: &BTreeMap<usize, QCurve>) -> Result<AnalysisReport> {
    if curves.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "r = {r}: scaling fits need at least 3 lattice sizes, got {}",
            curves.len()
        )));
    }
    ensure_dir(&config.out)?;
    let grid = uniform_grid(config.t_grid);
    let canon: Vec<(usize, Canonical)> = curves.iter().map(|(&l, q)| (l, Canonical::new(q))).collect();
    let psi: Vec<Vec<f64>> = canon.iter().map(|(_, c)| grid.iter().map(|&t| c.psi(t)).collect()).collect();
    let sizes: Vec<SizeSummary> = curves
        .iter()
        .zip(&canon)
        .map(|((&side, q), (_, c))| SizeSummary {
            side,
            runs: q.runs(),
            t_bar: crate::ensemble::mean_percolation_time(q).ok(),
            max_slope: c.max_slope(config.t_grid.max(DEFAULT_GRID)),
        })
        .collect();

    let tag = format!("r{r}_{mode}");
    let mut files = Vec::new();

    let mut text = String::from("# t");
    for (l, _) in &canon {
        write!(text, " psi_L{l}").unwrap();
    }
    text.push('\n');
    for (k, t) in grid.iter().enumerate() {
        write!(text, "{t}").unwrap();
        for col in &psi {
            write!(text, " {:.12e}", col[k]).unwrap();
        }
        text.push('\n');
    }
    let path = config.out.join(format!("psi_{tag}.dat"));
    io::write_text(&path, &text)?;
    files.push(path);

    let percolates = sizes.iter().any(|s| s.t_bar.is_some());
    let mut tc = None;
    let mut nu = None;
    let mut fit_skipped = None;
    if percolates {
        let tc_points: Vec<(usize, f64)> =
            sizes.iter().filter_map(|s| s.t_bar.map(|m| (s.side, m.t_bar))).collect();
        let mut text = format!("# L L^(-1/nu) t_bar Q_N   (nu = {})\n", config.nu_fixed);
        for s in &sizes {
            if let Some(m) = s.t_bar {
                let x = (s.side as f64).powf(-1.0 / config.nu_fixed);
                writeln!(text, "{} {:.12e} {:.12e} {}", s.side, x, m.t_bar, m.percolating_mass).unwrap();
            }
        }
        let path = config.out.join(format!("tc_fss_{tag}.dat"));
        io::write_text(&path, &text)?;
        files.push(path);

        let mut text = String::from("# ln_L ln_max_slope L max_slope t_at_max\n");
        for s in &sizes {
            if s.max_slope.value > 0.0 {
                writeln!(
                    text,
                    "{:.12e} {:.12e} {} {:.12e} {:.12e}",
                    (s.side as f64).ln(),
                    s.max_slope.value.ln(),
                    s.side,
                    s.max_slope.value,
                    s.max_slope.t
                )
                .unwrap();
            }
        }
        let path = config.out.join(format!("nu_loglog_{tag}.dat"));
        io::write_text(&path, &text)?;
        files.push(path);

        let slope_points: Vec<(usize, f64)> = sizes.iter().map(|s| (s.side, s.max_slope.value)).collect();
        match (fit_tc(&tc_points, config.nu_fixed), fit_nu(&slope_points)) {
            (Ok(a), Ok(b)) => {
                tc = Some(a);
                nu = Some(b);
            }
            (Err(e), _) | (_, Err(e)) => fit_skipped = Some(e.to_string()),
        }
    }

    let report = AnalysisReport { r, mode, sizes, percolates, tc, nu, fit_skipped, files: Vec::new() };
    let mut summary = String::from("# volperc analysis summary\n");
    writeln!(summary, "r={r}").unwrap();
    writeln!(summary, "mode={mode}").unwrap();
    writeln!(summary, "sizes={}", report.sizes.iter().map(|s| s.side.to_string()).collect::<Vec<_>>().join(",")).unwrap();
    writeln!(summary, "percolates={percolates}").unwrap();
    match (&report.tc, &report.nu) {
        (Some(tc), Some(nu)) => {
            writeln!(summary, "nu_fixed={}", config.nu_fixed).unwrap();
            writeln!(summary, "t_c={}", tc.estimate).unwrap();
            writeln!(summary, "t_c_uncertainty={}", tc.uncertainty).unwrap();
            writeln!(summary, "nu={}", nu.estimate).unwrap();
            writeln!(summary, "nu_uncertainty={}", nu.uncertainty).unwrap();
        }
        _ if percolates => {
            writeln!(summary, "t_c=undetermined").unwrap();
            writeln!(summary, "fit_skipped={}", report.fit_skipped.as_deref().unwrap_or("")).unwrap();
        }
        _ => writeln!(summary, "t_c=inf").unwrap(),
    }
    for s in &report.sizes {
        match s.t_bar {
            Some(m) => writeln!(summary, "t_bar_L{}={} (Q_N={})", s.side, m.t_bar, m.percolating_mass).unwrap(),
            None => writeln!(summary, "t_bar_L{}=undefined (no run wrapped)", s.side).unwrap(),
        }
        writeln!(summary, "max_slope_L{}={} at t={}", s.side, s.max_slope.value, s.max_slope.t).unwrap();
    }
    let path = config.out.join(format!("summary_{tag}.txt"));
    io::write_text(&path, &summary)?;
    files.push(path);
    let json_path = config.out.join(format!("summary_{tag}.json"));
    files.push(json_path.clone());
    let report = AnalysisReport { files, ..report };
    write_json(&json_path, &report)?;
    Ok(report)
}

/// Loads Q-curves and analyses every constraint present (or those listed
/// in `config.rs`). Without an explicit `--r`, inputs must share one `r`.
pub fn cmd_analyze(config: &JobConfig, inputs: &[PathBuf]) -> Result<Vec<AnalysisReport>> {
    config.validate()?;
    let paths = collect_qcurve_paths(inputs)?;
    if paths.is_empty() {
        return Err(Error::InsufficientData("no Q-curve files given".into()));
    }
    let curves = paths.iter().map(|p| io::read_qcurve(p)).collect::<Result<Vec<_>>>()?;
    let mut groups = group_curves(curves)?;
    if config.rs.is_empty() {
        let rs: Vec<u32> = groups.keys().map(|k| k.0).collect();
        if groups.len() > 1 {
            return Err(Error::invalid(format!(
                "inputs mix constraint values {rs:?}; select one with --r"
            )));
        }
    } else {
        groups.retain(|k, _| config.rs.contains(&k.0));
        if let Some(missing) = config.rs.iter().find(|r| !groups.keys().any(|k| k.0 == **r)) {
            return Err(Error::InsufficientData(format!("no Q-curves for r = {missing}")));
        }
    }
    groups
        .iter()
        .map(|(&(r, mode), curves)| analyze_group(config, r, mode, curves))
        .collect()
}

/// One line of the oracle self-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    fn push(&mut self, name: String, passed: bool, detail: String) {
        self.lines.push(CheckLine { name, passed, detail });
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            writeln!(out, "[{}] {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail).unwrap();
        }
        out
    }
}

/// Monte Carlo runs used for the exhaustive comparison when `--runs` is small.
const MC_RUNS_AGAINST_EXACT: u64 = 100_000;

/// Engine/oracle equivalence over `config.runs` seeds for each `(L, r)`,
/// exhaustive Q-curves against Monte Carlo on every `L <= 3`, and any
/// supplied Q-curve files of tiny lattices against the exact values.
///
/// Defaults: `L in {2, 3, 8}`, `r in {0, 1, 2, 5}`.
pub fn cmd_oracle_check(config: &JobConfig, qcurves: &[PathBuf]) -> Result<CheckReport> {
    let mut config = config.clone();
    if config.sides.is_empty() {
        config.sides = vec![2, 3, 8];
    }
    if config.rs.is_empty() {
        config.rs = vec![0, 1, 2, 5];
    }
    config.validate()?;
    let pool = config.pool()?;
    let mut report = CheckReport::default();

    for &side in &config.sides {
        for &r in &config.rs {
            let params = params_for(&config, side, r);
            let n = side * side;
            let first_bad = pool.install(|| {
                (0..config.runs)
                    .into_par_iter()
                    .map(|k| {
                        let idx = config.run_start + k;
                        let sched = AttemptSchedule::for_run(n, params.seed, idx);
                        let fast = Engine::new(params).run(&sched);
                        let slow = oracle::naive_run(&params, &sched).expect("validated size");
                        (fast != slow).then_some((idx, fast, slow))
                    })
                    .find_first(|x| x.is_some())
                    .flatten()
            });
            let name = format!("engine vs naive L={side} r={r} mode={}", config.mode);
            match first_bad {
                None => report.push(name, true, format!("{} runs identical", config.runs)),
                Some((idx, fast, slow)) => {
                    report.push(name, false, format!("run {idx}: engine {fast:?} != naive {slow:?}"))
                }
            }
        }
    }

    let mut exact_cache: BTreeMap<(usize, u32), QCurve> = BTreeMap::new();
    let mut exact_for = |side: usize, r: u32| -> Result<QCurve> {
        if let Some(q) = exact_cache.get(&(side, r)) {
            return Ok(q.clone());
        }
        let params = params_for(&config, side, r);
        let q = pool.install(|| oracle::exact_qcurve(&params))?.qcurve;
        exact_cache.insert((side, r), q.clone());
        Ok(q)
    };

    let mc_runs = config.runs.max(MC_RUNS_AGAINST_EXACT);
    for &side in config.sides.iter().filter(|&&l| l <= oracle::EXACT_MAX_SIDE) {
        for &r in &config.rs {
            let exact = exact_for(side, r)?;
            let params = params_for(&config, side, r);
            let mc = pool.install(|| run_ensemble(&params, config.run_start, mc_runs)).qcurve;
            let mism = oracle::compare_to_exact(&exact, &mc, 4.0)?;
            let name = format!("exhaustive vs Monte Carlo L={side} r={r} ({mc_runs} runs, 4 sigma)");
            match mism.first() {
                None => report.push(name, true, format!("all {} points inside band", exact.sites() + 1)),
                Some(m) => report.push(name, false, m.to_string()),
            }
        }
    }

    for path in qcurves {
        let q = match io::read_qcurve(path) {
            Ok(q) => q,
            Err(e) => {
                report.push(format!("{}", path.display()), false, e.to_string());
                continue;
            }
        };
        let name = format!("{} against exact L={} r={}", path.display(), q.side, q.r);
        if q.side > oracle::EXACT_MAX_SIDE {
            report.push(name, false, format!("no exact reference for L = {}", q.side));
            continue;
        }
        let exact = {
            let mut cfg = config.clone();
            cfg.mode = q.mode;
            let params = params_for(&cfg, q.side, q.r);
            pool.install(|| oracle::exact_qcurve(&params))?.qcurve
        };
        let mism = oracle::compare_to_exact(&exact, &q, 4.0)?;
        match mism.first() {
            None => report.push(name, true, "inside 4 sigma band".into()),
            Some(m) => report.push(name, false, m.to_string()),
        }
    }
    Ok(report)
}
