//! Result tables, CSV output and the command-line experiments.
//!
//! Every command produces a [`ResultTable`]: named columns of equal length
//! plus an ordered list of metadata lines. Tables are written as CSV with
//! numbers at 12 significant digits, and the metadata goes to a sidecar
//! `<out>.meta.txt`. The only nondeterministic output is the timestamp line
//! in the sidecar, which `deterministic` suppresses.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::analytic::{self, TxDesign};
use crate::channel::SystemParams;
use crate::design::{self, OutageConstraints};
use crate::error::{Error, Result};
use crate::scenario::ScenarioFile;
use crate::sim::{self, BenchmarkSearch, SimConfig, SimMode};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig12(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(x) => Some(x),
            Cell::Int(n) => Some(n as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// `x` with 12 significant digits, trailing zeros dropped; scientific
/// notation outside `[1e-5, 1e12)`.
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    names: Vec<String>,
    columns: Vec<Vec<Cell>>,
    meta: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        ResultTable {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            columns: vec![Vec::new(); names.len()],
            meta: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::invalid(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.names.len()
            )));
        }
        for (col, cell) in self.columns.iter_mut().zip(row) {
            col.push(cell);
        }
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[Cell]> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[i])
    }

    /// Numeric column as `f64`s; `None` if absent or not numeric.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.iter().map(Cell::as_f64).collect()
    }

    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn add_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(&self.names).map_err(csv_err)?;
        for r in 0..self.n_rows() {
            out.write_record(self.columns.iter().map(|c| c[r].render()))
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn meta_text(&self, deterministic: bool) -> String {
        let mut s = String::new();
        if !deterministic {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            let _ = writeln!(s, "generated_unix_time: {secs}");
        }
        for (k, v) in &self.meta {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }

    /// Write `path` (CSV) and `path.meta.txt`; returns both paths.
    pub fn save(&self, path: &Path, deterministic: bool) -> Result<(PathBuf, PathBuf)> {
        let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let mut meta_path = path.as_os_str().to_owned();
        meta_path.push(".meta.txt");
        let meta_path = PathBuf::from(meta_path);
        std::fs::write(&meta_path, self.meta_text(deterministic))?;
        Ok((path.to_path_buf(), meta_path))
    }

    /// True if the table has a `feasible` column and no row is feasible.
    pub fn all_infeasible(&self) -> bool {
        match self.column("feasible") {
            Some(col) if !col.is_empty() => col.iter().all(|c| *c == Cell::Flag(false)),
            _ => false,
        }
    }
}

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub blocks: Option<u64>,
    pub grid_step: Option<f64>,
}

fn describe_params(t: &mut ResultTable, p: &SystemParams) {
    t.add_meta(
        "parameters",
        format!(
            "p_a={} p_b={} sigma2_a={} sigma2_b={} sigma2_e={} gbar_ab={} gbar_ae={}",
            p.p_a, p.p_b, p.sigma2_a, p.sigma2_b, p.sigma2_e, p.gbar_ab, p.gbar_ae
        ),
    );
}

fn scenario_meta(t: &mut ResultTable, s: &ScenarioFile, command: &str) {
    t.add_meta("command", command);
    for (name, conv) in s.unit_conversions() {
        t.add_meta(format!("unit.{name}"), conv);
    }
    describe_params(t, &s.params());
    if let Some(sw) = &s.sweep {
        t.add_meta("x_label", sw.variable.name());
    }
}

// Leading sweep column unless the command already reports that variable.
fn sweep_column(s: &ScenarioFile, own: &[&str]) -> Option<&'static str> {
    let name = s.sweep.as_ref()?.variable.name();
    (!own.contains(&name)).then_some(name)
}

fn with_sweep(sweep: Option<&str>, own: &[&str]) -> Vec<String> {
    sweep.into_iter().chain(own.iter().copied()).map(String::from).collect()
}

fn require_design(p: &crate::scenario::Point) -> Result<TxDesign> {
    p.design.ok_or_else(|| Error::Scenario {
        location: "design".into(),
        message: "a [design] section with alpha (or an alpha sweep) is required".into(),
    })
}

/// Closed-form secrecy outage, connection outage and throughput per point.
pub fn cmd_analytic(s: &ScenarioFile) -> Result<ResultTable> {
    let own = ["alpha", "r_b", "r_s", "p_so", "p_co", "eta", "method"];
    let sweep = sweep_column(s, &own);
    let mut t = ResultTable::new(&with_sweep(sweep, &own));
    scenario_meta(&mut t, s, "analytic");
    t.add_meta("y_label", "probability (p_so, p_co); bits per channel use (eta)");
    let points = s.points()?;
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|p| {
            let d = require_design(p)?;
            let r = analytic::evaluate(&p.params, &d)?;
            let mut row: Vec<Cell> = Vec::new();
            if sweep.is_some() {
                row.push(p.sweep_value.unwrap_or(f64::NAN).into());
            }
            row.extend([
                d.alpha.into(),
                d.r_b.into(),
                d.r_s.into(),
                r.p_so.into(),
                r.p_co.into(),
                r.eta.into(),
                r.method.as_str().into(),
            ]);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    for r in rows {
        t.push_row(r)?;
    }
    Ok(t)
}

/// Monte Carlo estimates next to the closed forms, per point.
pub fn cmd_simulate(s: &ScenarioFile, opts: &RunOptions) -> Result<ResultTable> {
    let mut sim_section = s.sim_section();
    if let Some(seed) = opts.seed {
        sim_section.seed = seed;
    }
    if let Some(blocks) = opts.blocks {
        sim_section.blocks = blocks;
    }
    let config: SimConfig = sim_section.config()?;
    let symbol = config.mode == SimMode::SymbolLevel;

    let mut own = vec![
        "alpha",
        "r_b",
        "r_s",
        "p_so_mc",
        "se_so",
        "p_co_mc",
        "se_co",
        "eta_mc",
        "p_so_analytic",
        "p_co_analytic",
        "eta_analytic",
        "n_blocks",
        "se_degenerate",
    ];
    if symbol {
        own.extend(["snr_ratio_bob", "snr_ratio_eve", "max_z_correlation", "resampled"]);
    }
    let sweep = sweep_column(s, &own);
    let mut t = ResultTable::new(&with_sweep(sweep, &own));
    scenario_meta(&mut t, s, "simulate");
    t.add_meta("seed", config.rng.seed.to_string());
    t.add_meta("streams", config.rng.stream_count.to_string());
    t.add_meta("blocks", config.n_blocks.to_string());
    t.add_meta(
        "mode",
        match config.mode {
            SimMode::FadingLevel => "fading-level".to_string(),
            SimMode::SymbolLevel => format!(
                "symbol-level, {} symbols per block, {:?} normalization",
                config.symbols_per_block, sim_section.normalization
            ),
        },
    );
    t.add_meta("y_label", "probability estimates with binomial standard errors");

    // Points run one after another; each simulation is already parallel.
    for p in s.points()? {
        let d = require_design(&p)?;
        let exact = analytic::evaluate(&p.params, &d)?;
        let (mc, extra) = if symbol {
            let r = sim::simulate_symbol_level(&p.params, &d, &config, sim_section.normalization)?;
            let extra: Vec<Cell> = vec![
                r.snr_ratio_bob.into(),
                r.snr_ratio_eve.into(),
                r.max_z_correlation.into(),
                r.resampled.into(),
            ];
            (r.outage, extra)
        } else {
            (sim::simulate_outage(&p.params, &d, &config)?, Vec::new())
        };
        let mut row: Vec<Cell> = Vec::new();
        if sweep.is_some() {
            row.push(p.sweep_value.unwrap_or(f64::NAN).into());
        }
        row.extend([
            d.alpha.into(),
            d.r_b.into(),
            d.r_s.into(),
            mc.p_so_hat.into(),
            mc.se_so.into(),
            mc.p_co_hat.into(),
            mc.se_co.into(),
            mc.eta_hat.into(),
            exact.p_so.into(),
            exact.p_co.into(),
            exact.eta.into(),
            mc.n_blocks.into(),
            mc.se_degenerate().into(),
        ]);
        row.extend(extra);
        t.push_row(row)?;
    }
    Ok(t)
}

/// Joint rate/power design per point, with the on-off benchmark alongside.
pub fn cmd_optimize(s: &ScenarioFile, opts: &RunOptions) -> Result<ResultTable> {
    if s.constraints.is_none() {
        return Err(Error::Scenario {
            location: "constraints".into(),
            message: "optimize needs a [constraints] section".into(),
        });
    }
    let mut refine = s.grid_refinement();
    if let Some(step) = opts.grid_step {
        if !(step > 0.0) {
            return Err(Error::invalid(format!("grid step must be positive, got {step}")));
        }
        refine.fine_step = step;
    }
    let own = [
        "epsilon",
        "delta",
        "feasible",
        "alpha",
        "r_b",
        "r_s",
        "eta",
        "p_so",
        "p_co",
        "binding",
        "branch",
        "phi1",
        "phi2",
        "psi",
        "method",
        "grid_step",
        "eta_benchmark",
        "benchmark_r_b",
        "benchmark_r_s",
        "benchmark_threshold",
    ];
    let sweep = sweep_column(s, &own);
    let mut t = ResultTable::new(&with_sweep(sweep, &own));
    scenario_meta(&mut t, s, "optimize");
    if s.params().sigma2_a > 0.0 {
        t.add_meta(
            "grid",
            format!(
                "r_max={} coarse_step={} fine_step={}",
                refine.r_max, refine.coarse_step, refine.fine_step
            ),
        );
    }
    t.add_meta("y_label", "optimized throughput (bits per channel use)");
    let search = BenchmarkSearch::default();

    let rows: Vec<Vec<Cell>> = s
        .points()?
        .par_iter()
        .map(|p| {
            let c: OutageConstraints = p.constraints.expect("checked above");
            let sol = design::optimize(&p.params, &c, &refine)?;
            let bench = sim::optimize_benchmark(&p.params, &c, &search)?;
            let d = sol.design;
            let nan = f64::NAN;
            let aux = sol.aux;
            let mut row: Vec<Cell> = Vec::new();
            if sweep.is_some() {
                row.push(p.sweep_value.unwrap_or(nan).into());
            }
            let bd = bench.design;
            row.extend([
                c.epsilon.into(),
                c.delta.into(),
                sol.feasible.into(),
                d.map_or(nan, |d| d.alpha).into(),
                d.map_or(nan, |d| d.r_b).into(),
                d.map_or(nan, |d| d.r_s).into(),
                sol.eta.into(),
                sol.p_so.into(),
                sol.p_co.into(),
                if sol.feasible { sol.binding.label() } else { "infeasible".into() }.into(),
                aux.map_or("none", |a| a.branch.as_str()).into(),
                aux.map_or(nan, |a| a.phi1).into(),
                aux.map_or(nan, |a| a.phi2).into(),
                aux.map_or(nan, |a| a.psi).into(),
                if p.params.sigma2_a == 0.0 { "closed-form" } else { "grid" }.into(),
                sol.grid_step.unwrap_or(nan).into(),
                bench.eta.into(),
                bd.map_or(nan, |d| d.r_b).into(),
                bd.map_or(nan, |d| d.r_s).into(),
                bd.map_or(nan, |d| d.threshold).into(),
            ]);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    for r in rows {
        t.push_row(r)?;
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Outage probabilities against the power split.
    Figure2,
    /// Optimized throughput against the secrecy cap.
    Figure3a,
    /// Benchmark throughput against the secrecy cap.
    Figure3b,
}

impl Figure {
    pub fn name(&self) -> &'static str {
        match self {
            Figure::Figure2 => "figure2",
            Figure::Figure3a => "figure3a",
            Figure::Figure3b => "figure3b",
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "figure2" => Ok(Figure::Figure2),
            "figure3a" => Ok(Figure::Figure3a),
            "figure3b" => Ok(Figure::Figure3b),
            other => Err(Error::invalid(format!(
                "unknown figure {other:?}; expected figure2, figure3a or figure3b"
            ))),
        }
    }
}

/// Secrecy caps of the throughput figures: exactly 0, then 50 log-spaced
/// values on `[1e-4, 1]`.
pub fn epsilon_sweep() -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(design::logspace(1e-4, 1.0, 50));
    *v.last_mut().expect("non-empty") = 1.0;
    v
}

pub const FIGURE3_SIGMA2_E: [f64; 3] = [0.0, 0.1, 0.2];

fn figure3_params(sigma2_e: f64) -> SystemParams {
    SystemParams::new(10.0, 10.0, 0.0, 0.1, sigma2_e)
}

pub fn figure_table(fig: Figure) -> Result<ResultTable> {
    match fig {
        Figure::Figure2 => {
            let p = SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1);
            let mut t = ResultTable::new(&["alpha", "p_co", "p_so"]);
            t.add_meta("figure", "figure2");
            describe_params(&mut t, &p);
            t.add_meta("design", "r_b=2 r_s=1");
            t.add_meta("x_label", "alpha (fraction of Alice's power on the information signal)");
            t.add_meta("y_label", "outage probability");
            for i in 0..101 {
                let alpha = 0.001 + 0.999 * i as f64 / 100.0;
                let r = analytic::evaluate(&p, &TxDesign::new(alpha, 2.0, 1.0)?)?;
                t.push_row(vec![alpha.into(), r.p_co.into(), r.p_so.into()])?;
            }
            Ok(t)
        }
        Figure::Figure3a | Figure::Figure3b => {
            let benchmark = fig == Figure::Figure3b;
            let names: Vec<String> = std::iter::once("epsilon".to_string())
                .chain(FIGURE3_SIGMA2_E.iter().map(|s| format!("eta_sigma2e_{s}")))
                .collect();
            let mut t = ResultTable::new(&names);
            t.add_meta("figure", fig.name());
            t.add_meta(
                "parameters",
                "p_a=10 p_b=10 sigma2_a=0 sigma2_b=0.1 gbar_ab=1 gbar_ae=1 delta=0.1; one series per sigma2_e",
            );
            t.add_meta(
                "scheme",
                if benchmark {
                    "on-off benchmark (no AN), grid-searched rates and threshold"
                } else {
                    "two-phase AN scheme, closed-form joint design"
                },
            );
            t.add_meta("x_label", "epsilon (secrecy outage cap)");
            t.add_meta("y_label", "optimized throughput (bits per channel use)");
            let search = BenchmarkSearch::default();
            let eps = epsilon_sweep();
            let rows: Vec<Vec<Cell>> = eps
                .par_iter()
                .map(|&e| {
                    let mut row: Vec<Cell> = vec![e.into()];
                    for se in FIGURE3_SIGMA2_E {
                        let p = figure3_params(se);
                        let c = OutageConstraints::new(e, 0.1)?;
                        let eta = if benchmark {
                            sim::optimize_benchmark(&p, &c, &search)?.eta
                        } else {
                            design::joint_design(&p, &c)?.eta
                        };
                        row.push(eta.into());
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            for r in rows {
                t.push_row(r)?;
            }
            Ok(t)
        }
    }
}

/// Write `<out_dir>/<name>.csv` and its sidecar.
pub fn cmd_figure(fig: Figure, out_dir: &Path, deterministic: bool) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir)?;
    let t = figure_table(fig)?;
    t.save(&out_dir.join(format!("{}.csv", fig.name())), deterministic)
}
