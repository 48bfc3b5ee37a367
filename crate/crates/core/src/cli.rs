//! Command-line front end. Exit codes: 0 success, 1 validation failure, 2 argument error,
//! 3 numerical failure.

use crate::chainoracle::{correlation_exact_with, evolve_partition_exact};
use crate::error::Error;
use crate::nibmsim::empirical_width_cdf;
use crate::partition::{
    free_energy_finite, partition_gw_infinite, ratio_to_tw, width_probability_exact, Model, ModelParams,
};
use crate::phase::{
    classify, classify_qp_at, free_energy_gw_finite, free_energy_gw_infinite, free_energy_qp_finite, mu_sigma,
};
use crate::tracywidom::{fredholm_det, solve_hastings_mcleod, tw_cdf_fredholm, tw_left_tail, tw_right_tail, TwEvaluator};
use crate::validation::{run_suite, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "xx0", version, about = "XX0 spin-chain partition functions, phase diagram and Tracy-Widom asymptotics")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (csv by default, json for validate)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = machine parallelism)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Flat key=value file; flags on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Painleve,
    Fredholm,
    Tails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Gw,
    Qp,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Gw => Model::Gw,
            ModelArg::Qp => Model::Qp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Oracle,
    Mc,
    Tw,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tracy-Widom GUE distribution F(x)
    Tw {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, value_enum, default_value_t = Method::Painleve)]
        method: Method,
    },
    /// Region, free energy and wall distance over a grid
    PhaseDiagram {
        #[arg(long, value_enum, default_value_t = ModelArg::Gw)]
        model: ModelArg,
        #[arg(long, default_value_t = 0.1)]
        tau_min: f64,
        #[arg(long, default_value_t = 3.0)]
        tau_max: f64,
        #[arg(long, default_value_t = 30)]
        tau_steps: usize,
        #[arg(long, default_value_t = 0.5)]
        n_inv_min: f64,
        #[arg(long, default_value_t = 4.0)]
        n_inv_max: f64,
        #[arg(long, default_value_t = 36)]
        n_inv_steps: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda_min: f64,
        #[arg(long, default_value_t = 4.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 36)]
        lambda_steps: usize,
        /// Reference N_f for A_QP
        #[arg(long, default_value_t = 16)]
        nf_ref: u32,
    },
    /// c Z^{|d|}/Z against F(x) along a fixed (tau, x) ray
    RatioConvergence {
        #[arg(long, value_enum, default_value_t = ModelArg::Gw)]
        model: ModelArg,
        #[arg(long, default_value_t = 2.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_target: f64,
        /// Increasing N_f values
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        sizes: Vec<u32>,
    },
    /// Monte Carlo width distribution of nonintersecting bridges
    McWidth {
        #[arg(long, default_value_t = 3)]
        nf: u32,
        #[arg(long, default_value_t = 3.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7")]
        n_values: Vec<u32>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Also evaluate the determinant formula
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        exact: bool,
    },
    /// Sector evolution of the chain against the Toeplitz determinant
    OracleCheck {
        #[arg(long, default_value_t = 24)]
        n: u32,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        nf_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Open chain instead of a ring
        #[arg(long)]
        open: bool,
    },
    /// Finite-size free energy next to its large-N closed form
    FreeEnergy {
        #[arg(long, value_enum, default_value_t = ModelArg::Gw)]
        model: ModelArg,
        #[arg(long)]
        nf: u32,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 16)]
        nf_ref: u32,
    },
    /// Run acceptance checks and emit a verdict per criterion
    Validate {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

const SUBCOMMANDS: [&str; 7] =
    ["tw", "phase-diagram", "ratio-convergence", "mc-width", "oracle-check", "free-energy", "validate"];

// ---------------------------------------------------------------- output

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::F(v) => s.serialize_f64(*v),
            Cell::I(v) => s.serialize_i64(*v),
            Cell::S(v) => s.serialize_str(v),
            Cell::B(v) => s.serialize_bool(*v),
        }
    }
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string().to_lowercase()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub comment: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

struct RowRef<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

struct RowsRef<'a>(&'a Table);

impl Serialize for RowsRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut q = s.serialize_seq(Some(self.0.rows.len()))?;
        for r in &self.0.rows {
            q.serialize_element(&RowRef(&self.0.columns, r))?;
        }
        q.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("comment", &self.comment)?;
        m.serialize_entry("columns", &self.columns)?;
        m.serialize_entry("rows", &RowsRef(self))?;
        m.end()
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.comment, self.columns.join(","));
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

/// serde_json formatter printing every float with 17 significant digits.
struct RoundTrip;

impl serde_json::ser::Formatter for RoundTrip {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, RoundTrip);
    v.serialize(&mut ser).expect("in-memory JSON serialisation");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

// ---------------------------------------------------------------- config file

/// Parse flat key=value text with `#` comments into `--key=value` flags.
pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        if key == "config" {
            continue;
        }
        flags.push(format!("--{key}={}", v.trim()));
    }
    Ok(flags)
}

/// Splice config-file flags in right after the subcommand so that later command-line flags
/// override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let flags = parse_config(&text)?;
    let Some(sub) = strs.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.as_str())).map(|p| p + 1) else {
        return Ok(args);
    };
    let mut out: Vec<OsString> = vec![args[0].clone(), args[sub].clone()];
    out.extend(flags.into_iter().map(OsString::from));
    out.extend(args[1..sub].iter().cloned());
    out.extend(args[sub + 1..].iter().cloned());
    Ok(out)
}

fn init_logging() {
    use log::LevelFilter;
    let level = match std::env::var("XX0_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).try_init();
}

// ---------------------------------------------------------------- commands

enum Failure {
    Validation(String),
    Argument(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_argument_error() {
            Failure::Argument(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if steps == 0 {
        return Err(Failure::Argument("grid needs at least one step".into()));
    }
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Failure::Argument(format!("grid bounds must satisfy 0 < min <= max, got [{lo}, {hi}]")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn cmd_tw(x: f64, method: Method) -> Result<Table, Failure> {
    let ev = TwEvaluator::standard();
    let (f, acc) = match method {
        Method::Painleve => {
            let fine = solve_hastings_mcleod(ev.grid_lo, ev.grid_hi, 0.5 * ev.step)?;
            let f = ev.cdf(x);
            (f, (f - fine.cdf(x)).abs())
        }
        Method::Fredholm => {
            let f = tw_cdf_fredholm(x, 40)?;
            (f, (f - fredholm_det(x, 320).clamp(0.0, 1.0)).abs())
        }
        Method::Tails => {
            let f = if x >= 3.0 {
                tw_right_tail(x)?
            } else if x <= -3.0 {
                tw_left_tail(x)?
            } else {
                return Err(Failure::Argument(format!("tail expansions need |x| >= 3, got {x}")));
            };
            let acc = if x >= ev.grid_lo && x <= ev.grid_hi { (f - ev.cdf(x)).abs() } else { f64::NAN };
            (f, acc)
        }
    };
    let name = match method {
        Method::Painleve => "painleve",
        Method::Fredholm => "fredholm",
        Method::Tails => "tails",
    };
    Ok(Table {
        comment: "Tracy-Widom GUE CDF F(x); accuracy_estimate is the change against a refined evaluation".into(),
        columns: vec!["x", "F", "method", "accuracy_estimate"],
        rows: vec![vec![Cell::F(x), Cell::F(f), Cell::S(name.into()), Cell::F(acc)]],
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_phase_diagram(
    model: ModelArg,
    tau: (f64, f64, usize),
    n_inv: (f64, f64, usize),
    lambda: (f64, f64, usize),
    nf_ref: u32,
) -> Result<Table, Failure> {
    match model {
        ModelArg::Gw => {
            let taus = grid(tau.0, tau.1, tau.2)?;
            let ns = grid(n_inv.0, n_inv.1, n_inv.2)?;
            let pts: Vec<(f64, f64)> = taus.iter().flat_map(|&t| ns.iter().map(move |&n| (t, n))).collect();
            let rows = pts
                .par_iter()
                .map(|&(t, n)| {
                    let p = classify(t, n)?;
                    Ok(vec![
                        Cell::F(t),
                        Cell::F(n),
                        Cell::S(p.region.to_string()),
                        Cell::F(p.free_energy),
                        Cell::F(p.wall_distance),
                    ])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Table {
                comment: "finite Gross-Witten diagram: tau = t/N_f, n_inv = N/N_f; free_energy = log Z / N_f^2; \
                          wall_distance is Euclidean in the (tau, n_inv) plane"
                    .into(),
                columns: vec!["tau", "n_inv", "region", "free_energy", "wall_distance"],
                rows,
            })
        }
        ModelArg::Qp => {
            let ls = grid(lambda.0, lambda.1, lambda.2)?;
            let rows = ls
                .par_iter()
                .map(|&l| {
                    let p = classify_qp_at(l, nf_ref)?;
                    Ok(vec![Cell::F(l), Cell::S(p.region.to_string()), Cell::F(p.free_energy), Cell::F(p.wall_distance)])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Table {
                comment: format!(
                    "Gaussian diagram: lambda = N/sqrt(N_f); free_energy = A_QP(N_f_ref={nf_ref}) - |lambda-2|^3/3 below the wall"
                ),
                columns: vec!["lambda", "region", "free_energy", "wall_distance"],
                rows,
            })
        }
    }
}

fn cmd_ratio_convergence(model: ModelArg, tau: f64, x_target: f64, sizes: &[u32]) -> Result<Table, Failure> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Failure::Argument("sizes must be a strictly increasing list of positive N_f".into()));
    }
    if model == ModelArg::Gw && !(tau > 0.0) {
        return Err(Failure::Argument(format!("tau must be positive, got {tau}")));
    }
    let ev = TwEvaluator::standard();
    let rows = sizes
        .par_iter()
        .map(|&n_f| -> Result<Vec<Cell>, Error> {
            let nf = n_f as f64;
            let (t, n_real) = match model {
                ModelArg::Gw => {
                    let t = tau * nf;
                    let ms = mu_sigma(n_f, t)?;
                    (t, ms.mu + x_target * ms.sigma)
                }
                ModelArg::Qp => (0.0, 2.0 * nf.sqrt() + x_target / (2f64.powf(2.0 / 3.0) * nf.powf(1.0 / 6.0))),
            };
            let n = n_real.round().max(1.0) as u32;
            let p = ModelParams::new(n, n_f, t)?;
            let r = ratio_to_tw(&p, model.into(), ev)?;
            Ok(vec![
                Cell::I(n_f as i64),
                Cell::F(t),
                Cell::I(n as i64),
                Cell::F(r.x),
                Cell::F(r.ratio),
                Cell::F(r.f_of_x),
                Cell::F(r.abs_gap),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Table {
        comment: match model {
            ModelArg::Gw => format!(
                "c Z^|d|/Z vs F(x) at tau={tau}, x_target={x_target}; N is the integer nearest the target, x its actual argument"
            ),
            ModelArg::Qp => format!(
                "c Z^|d|/Z vs F(x) for the Gaussian model near lambda=2, x_target={x_target}; t is unused, x is the actual argument"
            ),
        },
        columns: vec!["n_f", "t", "n", "x", "ratio", "f_of_x", "abs_gap"],
        rows,
    })
}

fn cmd_mc_width(nf: u32, t: f64, n_values: &[u32], samples: u64, exact: bool, seed: u64) -> Result<Table, Failure> {
    let cdf = empirical_width_cdf(nf, t, n_values, samples, seed)?;
    let rows = cdf
        .estimates
        .par_iter()
        .map(|e| {
            let ex = if exact { width_probability_exact(nf, t, e.n)? } else { f64::NAN };
            Ok(vec![Cell::I(e.n as i64), Cell::F(e.probability), Cell::F(e.std_error), Cell::F(ex)])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Table {
        comment: format!(
            "P(W < N) for N_f={nf} bridges over time t={t}: {} accepted of {} attempts, seed {seed}",
            cdf.samples, cdf.attempts
        ),
        columns: vec!["n", "probability", "std_error", "exact"],
        rows,
    })
}

fn cmd_oracle_check(n: u32, nfs: &[u32], ts: &[f64], delta: f64, open: bool) -> Result<Table, Failure> {
    let pts: Vec<(u32, f64)> = nfs.iter().flat_map(|&f| ts.iter().map(move |&t| (f, t))).collect();
    let rows = pts
        .par_iter()
        .map(|&(n_f, t)| -> Result<Vec<Cell>, Error> {
            let p = ModelParams::with_delta(n, n_f, t, delta)?;
            let evo = if open {
                // keep the block away from the free ends
                let first = n.saturating_sub(n_f) / 2;
                let pos: Vec<u32> = (first..first + n_f).collect();
                correlation_exact_with(&pos, &pos, n, t, delta, false)?
            } else {
                evolve_partition_exact(&p, true)?
            };
            let det = partition_gw_infinite(&p)?.value();
            Ok(vec![
                Cell::I(n as i64),
                Cell::I(n_f as i64),
                Cell::F(t),
                Cell::F(evo),
                Cell::F(det),
                Cell::F((evo - det).abs()),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Table {
        comment: format!(
            "<block|e^(-tH)|block> on {} (Delta={delta}) against det[I_(j-l)(t)]",
            if open { "an open chain, block centred" } else { "a periodic chain" }
        ),
        columns: vec!["n", "n_f", "t", "evolution", "determinant", "abs_diff"],
        rows,
    })
}

fn cmd_free_energy(model: ModelArg, nf: u32, t: f64, n: u32, nf_ref: u32) -> Result<Table, Failure> {
    let p = ModelParams::new(n, nf, t)?;
    let finite = free_energy_finite(&p, model.into())?;
    let (name, asym, asym_finite) = match model {
        ModelArg::Gw => {
            let tau = p.tau();
            ("gw", free_energy_gw_infinite(tau)?, free_energy_gw_finite(tau, p.n_inv())?)
        }
        ModelArg::Qp => {
            let v = free_energy_qp_finite(p.lambda(), nf_ref)?;
            ("qp", v, v)
        }
    };
    Ok(Table {
        comment: "free energies (1/N_f^2) log Z: finite determinant, large-N limit, large-N with wall correction".into(),
        columns: vec!["model", "n_f", "t", "n", "finite", "asymptotic", "asymptotic_with_wall"],
        rows: vec![vec![
            Cell::S(name.into()),
            Cell::I(nf as i64),
            Cell::F(t),
            Cell::I(n as i64),
            Cell::F(finite),
            Cell::F(asym),
            Cell::F(asym_finite),
        ]],
    })
}

fn validation_table(r: &crate::validation::ValidationReport) -> Table {
    let mut rows = Vec::new();
    for v in &r.criteria {
        if let Some(e) = &v.error {
            rows.push(vec![Cell::I(v.id as i64), Cell::S(v.name.into()), Cell::B(v.pass), Cell::S("error".into()), Cell::S(e.replace(',', ";"))]);
        }
        for m in &v.metrics {
            rows.push(vec![
                Cell::I(v.id as i64),
                Cell::S(v.name.into()),
                Cell::B(v.pass),
                Cell::S(m.name.replace(',', ";")),
                Cell::S(fmt_f64(m.value)),
            ]);
        }
    }
    Table {
        comment: format!("validation suite {:?}, seed {}, overall pass = {}", r.suite, r.seed, r.pass),
        columns: vec!["criterion", "name", "pass", "metric", "value"],
        rows,
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Argument(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| Failure::Numerical(e.to_string()))
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    if cli.common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
            .map_err(|e| Failure::Argument(e.to_string()))?;
    }
    let seed = cli.common.seed;
    let table = match cli.command {
        Command::Tw { x, method } => cmd_tw(x, method)?,
        Command::PhaseDiagram {
            model,
            tau_min,
            tau_max,
            tau_steps,
            n_inv_min,
            n_inv_max,
            n_inv_steps,
            lambda_min,
            lambda_max,
            lambda_steps,
            nf_ref,
        } => cmd_phase_diagram(
            model,
            (tau_min, tau_max, tau_steps),
            (n_inv_min, n_inv_max, n_inv_steps),
            (lambda_min, lambda_max, lambda_steps),
            nf_ref,
        )?,
        Command::RatioConvergence { model, tau, x_target, sizes } => cmd_ratio_convergence(model, tau, x_target, &sizes)?,
        Command::McWidth { nf, t, n_values, samples, exact } => cmd_mc_width(nf, t, &n_values, samples, exact, seed)?,
        Command::OracleCheck { n, nf_list, t_list, delta, open } => cmd_oracle_check(n, &nf_list, &t_list, delta, open)?,
        Command::FreeEnergy { model, nf, t, n, nf_ref } => cmd_free_energy(model, nf, t, n, nf_ref)?,
        Command::Validate { suite } => {
            let suite = match suite {
                SuiteArg::Oracle => Suite::Oracle,
                SuiteArg::Mc => Suite::Mc,
                SuiteArg::Tw => Suite::Tw,
                SuiteArg::All => Suite::All,
            };
            let report = run_suite(suite, seed);
            let text = match cli.common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report),
                Format::Csv => validation_table(&report).to_csv(),
            };
            emit(&text, &cli.common.out)?;
            if !report.pass {
                let failed: Vec<String> =
                    report.criteria.iter().filter(|v| !v.pass).map(|v| v.id.to_string()).collect();
                return Err(Failure::Validation(format!("failed criteria: {}", failed.join(", "))));
            }
            return Ok(());
        }
    };
    let text = match cli.common.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table),
    };
    emit(&text, &cli.common.out)
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    init_logging();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ARGUMENT;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGUMENT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Validation(m)) => {
            eprintln!("validation failed: {m}");
            EXIT_VALIDATION
        }
        Err(Failure::Argument(m)) => {
            eprintln!("error: {m}");
            EXIT_ARGUMENT
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            EXIT_NUMERICAL
        }
    }
}
