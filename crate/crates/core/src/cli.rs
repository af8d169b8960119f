//! Command-line front end: every computation as a command writing CSV or
//! JSON records.
//!
//! Exit codes: 0 on full success, 2 when some grid points (or the single
//! computation of a one-record command) failed to converge, 1 on
//! configuration errors such as unknown functions, malformed grids or
//! unwritable output paths.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analysis;
use crate::catalog::{self, TestFunction};
use crate::error::{Error, Result};
use crate::inversion::{self, KernelFamily};
use crate::omega::{self, NormSource};
use crate::transform::{self, SamplingGrid, TransformStatus, DEFAULT_H0, DEFAULT_LEVELS};
use crate::verify::{self, Suite};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_A: f64 = 0.1;
const THREADS_ENV: &str = "OMEGA_FT_THREADS";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Tabulate,
    Transform,
    Invert,
    Exchange,
    Eligibility,
    Norm,
    ExampleIntegral,
    Catalog,
}

impl CommandName {
    fn name(self) -> &'static str {
        match self {
            CommandName::Tabulate => "tabulate",
            CommandName::Transform => "transform",
            CommandName::Invert => "invert",
            CommandName::Exchange => "exchange",
            CommandName::Eligibility => "eligibility",
            CommandName::Norm => "norm",
            CommandName::ExampleIntegral => "example-integral",
            CommandName::Catalog => "catalog",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// `Ω_f(s)`.
    Omega,
    /// `Ψ_f(s) = ∫_0^s f̂`, for `L^p` input.
    Psi,
}

/// Options shared by every computing command. A JSON configuration file
/// uses the same (kebab-case) names; flags given on the command line win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Command to run; read from configuration files by `omega-ft run`.
    #[arg(skip)]
    pub command: Option<CommandName>,
    /// Catalog id (also `triangle_smoothed_gauss` and `k_<kernel family>`).
    #[arg(long)]
    pub function: Option<String>,
    /// Parameter of `--function` as NAME=VALUE; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub param: Vec<String>,
    /// Second function of `exchange` (default `gauss`).
    #[arg(long)]
    pub g: Option<String>,
    /// Parameter of `--g` as NAME=VALUE; repeatable.
    #[arg(long = "g-param", value_name = "NAME=VALUE")]
    pub g_param: Vec<String>,
    /// Explicit frequencies, comma separated or repeated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub s: Vec<f64>,
    /// Explicit positions, comma separated or repeated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Uniform grid: first point.
    #[arg(long, allow_negative_numbers = true)]
    pub min: Option<f64>,
    /// Uniform grid: last point.
    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,
    /// Uniform grid: number of intervals (`steps + 1` points).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Initial second-difference step of `transform`.
    #[arg(long)]
    pub h0: Option<f64>,
    /// Richardson levels of `transform`.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Summability kernel of `invert`.
    #[arg(long)]
    pub family: Option<String>,
    /// Kernel scales of `invert`, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<f64>,
    /// Translation applied to g before the eligibility conditions.
    #[arg(long, allow_negative_numbers = true)]
    pub shift: Option<f64>,
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    /// `invert`: report the norm ‖f - f∗ψ_a‖ instead of pointwise values.
    #[arg(long)]
    pub error_norm: bool,
    /// `catalog`: list every entry (the default).
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: `OMEGA_FT_THREADS`, then all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl RunConfig {
    /// `self` with every unset field taken from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        fn vec<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        RunConfig {
            command: self.command.or(base.command),
            function: self.function.or(base.function),
            param: vec(self.param, base.param),
            g: self.g.or(base.g),
            g_param: vec(self.g_param, base.g_param),
            s: vec(self.s, base.s),
            x: vec(self.x, base.x),
            y: self.y.or(base.y),
            nu: self.nu.or(base.nu),
            min: self.min.or(base.min),
            max: self.max.or(base.max),
            steps: self.steps.or(base.steps),
            tol: self.tol.or(base.tol),
            h0: self.h0.or(base.h0),
            levels: self.levels.or(base.levels),
            family: self.family.or(base.family),
            a: vec(self.a, base.a),
            shift: self.shift.or(base.shift),
            quantity: self.quantity.or(base.quantity),
            error_norm: self.error_norm || base.error_norm,
            list: self.list || base.list,
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            threads: self.threads.or(base.threads),
        }
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config `{}`: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("malformed config `{}`: {e}", path.display())))
    }

    fn tol(&self) -> Result<f64> {
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if tol > 0.0 && tol.is_finite() {
            Ok(tol)
        } else {
            Err(Error::InvalidParameter(format!("--tol must be positive, got {tol}")))
        }
    }
}

#[derive(Debug, Args)]
struct Invocation {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Debug, Parser)]
#[command(name = "omega-ft", version, about = "Regularized Fourier transforms, inversion and exchange identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ω_f (or Ψ_f) on a grid: s,value_re,value_im,error_estimate,status.
    Tabulate(Invocation),
    /// f̂ by extrapolated second differences: s,value_re,value_im,error_estimate,status,h_used,levels.
    Transform(Invocation),
    /// f∗ψ_a pointwise, or ‖f - f∗ψ_a‖ with --error-norm.
    Invert(Invocation),
    /// Both sides of ∫f̂g = ∫fĝ with the a-priori bound.
    Exchange(Invocation),
    /// Moment and variation conditions of g = --function.
    Eligibility(Invocation),
    /// Alexiewicz norm ‖f‖ = sup|∫_{-∞}^x f|.
    Norm(Invocation),
    /// ∫_0^∞ s^{-ν} log(1 + y²/(s-x)²) ds against its closed form.
    ExampleIntegral(Invocation),
    /// Catalog entries: id,description,params,flags.
    Catalog(Invocation),
    /// Runs the command named by the `command` field of --config.
    Run(Invocation),
    /// Runs an acceptance suite: kernels, omega, transform, inversion, exchange or all.
    Verify {
        suite: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "NaN".to_string(),
            Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

/// Rows of one command in column order, with the number of failed rows.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    failures: usize,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new(), failures: 0 }
    }

    fn render(&self, format: Format, command: &str, params: &Value) -> Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
                w.write_record(&self.columns).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        m.insert("command".into(), Value::from(command));
                        m.insert("version".into(), Value::from(VERSION));
                        m.insert("params".into(), params.clone());
                        for (c, cell) in self.columns.iter().zip(row) {
                            m.insert((*c).to_string(), cell.json());
                        }
                        Value::Object(m)
                    })
                    .collect();
                Ok(serde_json::to_string_pretty(&records)? + "\n")
            }
        }
    }
}

fn snake(value: &impl Serialize) -> String {
    match serde_json::to_value(value) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => "unknown".to_string(),
    }
}

fn parse_params(items: &[String]) -> Result<BTreeMap<String, f64>> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("parameter `{item}` is not NAME=VALUE")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("parameter `{item}` has a non-numeric value")))?;
            Ok((name.trim().to_string(), value))
        })
        .collect()
}

/// A catalog entry, the smoothed triangle, or a summability kernel `K_a`.
pub fn resolve_function(id: &str, params: &[String]) -> Result<TestFunction> {
    let params = parse_params(params)?;
    if id == "triangle_smoothed_gauss" {
        if let Some(name) = params.keys().next() {
            return Err(Error::InvalidParameter(format!("`{id}` has no parameter `{name}`")));
        }
        return Ok(analysis::triangle_smoothed_gauss());
    }
    if let Some(family) = id.strip_prefix("k_") {
        let family: KernelFamily = family.parse().map_err(|_| Error::UnknownFunction(id.to_string()))?;
        let a = params.get("a").copied().unwrap_or(1.0);
        return family.k_function(a);
    }
    catalog::lookup(id, &params)
}

fn function(config: &RunConfig) -> Result<TestFunction> {
    let id = config.function.as_deref().ok_or_else(|| Error::InvalidParameter("--function is required".into()))?;
    resolve_function(id, &config.param)
}

/// Explicit points (sorted, deduplicated) or the uniform `min/max/steps` grid.
fn points(explicit: &[f64], config: &RunConfig, what: &str) -> Result<Vec<f64>> {
    if !explicit.is_empty() {
        let mut p = explicit.to_vec();
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("--{what} values must be finite")));
        }
        p.sort_by(f64::total_cmp);
        p.dedup();
        return Ok(p);
    }
    Ok(uniform_grid(config)?
        .ok_or_else(|| Error::InvalidParameter(format!("give --{what} or a grid with --min, --max and --steps")))?
        .points()
        .to_vec())
}

fn uniform_grid(config: &RunConfig) -> Result<Option<SamplingGrid>> {
    match (config.min, config.max, config.steps) {
        (None, None, None) => Ok(None),
        (Some(min), Some(max), Some(steps)) => {
            if steps < 1 {
                return Err(Error::InvalidParameter("grid steps must be at least 1".into()));
            }
            if !(min < max) {
                return Err(Error::InvalidParameter(format!("grid needs min < max, got {min} and {max}")));
            }
            Ok(Some(SamplingGrid::uniform(min, max, steps + 1)?))
        }
        _ => Err(Error::InvalidParameter("a grid needs all of --min, --max and --steps".into())),
    }
}

fn complex_cells(z: Complex64) -> [Cell; 2] {
    [Cell::Num(z.re), Cell::Num(z.im)]
}

fn failed_row(table: &mut Table, lead: Vec<Cell>, message: &str) {
    eprintln!("warning: {message}");
    let mut row = lead;
    while row.len() + 1 < table.columns.len() {
        row.push(Cell::Num(f64::NAN));
    }
    row.push(Cell::Text("failed".into()));
    table.rows.push(row);
    table.failures += 1;
}

fn tabulate(config: &RunConfig) -> Result<Table> {
    let f = function(config)?;
    let tol = config.tol()?;
    let s = points(&config.s, config, "s")?;
    let quantity = config.quantity.unwrap_or(Quantity::Omega);
    let results: Vec<Result<(Complex64, f64, String)>> = s
        .par_iter()
        .map(|&s| match quantity {
            Quantity::Omega => omega::omega(&f, s, tol).map(|o| (o.value, o.error_estimate, snake(&o.status))),
            Quantity::Psi => omega::psi(&f, s, tol).map(|q| (q.value, q.error_estimate, snake(&q.status))),
        })
        .collect();
    let mut table = Table::new(&["s", "value_re", "value_im", "error_estimate", "status"]);
    for (s, r) in s.iter().zip(results) {
        match r {
            Ok((value, err, status)) => {
                if status != "converged" && status != "accelerated" {
                    table.failures += 1;
                }
                let [re, im] = complex_cells(value);
                table.rows.push(vec![Cell::Num(*s), re, im, Cell::Num(err), Cell::Text(status)]);
            }
            Err(e) => failed_row(&mut table, vec![Cell::Num(*s)], &format!("s = {s}: {e}")),
        }
    }
    Ok(table)
}

fn transform_cmd(config: &RunConfig) -> Result<Table> {
    let f = function(config)?;
    let tol = config.tol()?;
    let h0 = config.h0.unwrap_or(DEFAULT_H0);
    let levels = config.levels.unwrap_or(DEFAULT_LEVELS);
    if !(h0 > 0.0 && h0.is_finite()) || levels < 2 {
        return Err(Error::InvalidParameter(format!("need h0 > 0 and levels ≥ 2, got {h0} and {levels}")));
    }
    let grid = SamplingGrid::new(points(&config.s, config, "s")?)?;
    let mut table = Table::new(&["s", "value_re", "value_im", "error_estimate", "status", "h_used", "levels"]);
    for e in transform::ft_grid(&f, &grid, h0, levels, tol) {
        if e.status == TransformStatus::Failed {
            eprintln!("warning: s = {}: {}", e.s, e.message.as_deref().unwrap_or("failed"));
            table.failures += 1;
        }
        let [re, im] = complex_cells(e.value);
        table.rows.push(vec![
            Cell::Num(e.s),
            re,
            im,
            Cell::Num(e.error_estimate),
            Cell::Text(snake(&e.status)),
            Cell::Num(e.h_used),
            Cell::Int(e.extrapolation_levels as u64),
        ]);
    }
    Ok(table)
}

fn invert_cmd(config: &RunConfig) -> Result<Table> {
    let f = function(config)?;
    let tol = config.tol()?;
    let family: KernelFamily = config.family.as_deref().unwrap_or("gauss_weierstrass").parse()?;
    let scales = if config.a.is_empty() { vec![DEFAULT_A] } else { config.a.clone() };
    if config.error_norm {
        let grid = uniform_grid(config)?;
        let mut table = Table::new(&["family", "a", "error_norm", "grid_max", "argmax", "refinement_change", "points"]);
        let results = inversion::inversion_error_sweep(&f, family, &scales, grid.as_ref(), tol);
        for (a, r) in scales.iter().zip(results) {
            match r {
                Ok(n) => table.rows.push(vec![
                    Cell::Text(family.to_string()),
                    Cell::Num(*a),
                    Cell::Num(n.value),
                    Cell::Num(n.grid_max),
                    Cell::Num(n.argmax),
                    Cell::Num(n.refinement_change),
                    Cell::Int(n.points as u64),
                ]),
                Err(e @ (Error::Unsupported(_) | Error::Missing(_) | Error::InvalidParameter(_))) => return Err(e),
                Err(e) => {
                    eprintln!("warning: a = {a}: {e}");
                    table.failures += 1;
                    let mut row = vec![Cell::Text(family.to_string()), Cell::Num(*a)];
                    row.extend((0..4).map(|_| Cell::Num(f64::NAN)));
                    row.push(Cell::Int(0));
                    table.rows.push(row);
                }
            }
        }
        return Ok(table);
    }
    let xs = points(&config.x, config, "x")?;
    let jobs: Vec<(f64, f64)> = scales.iter().flat_map(|a| xs.iter().map(move |x| (*a, *x))).collect();
    let results: Vec<Result<inversion::Inversion>> =
        jobs.par_iter().map(|(a, x)| inversion::invert(&f, family, *a, *x, tol)).collect();
    let mut table = Table::new(&[
        "family",
        "a",
        "x",
        "value_re",
        "value_im",
        "error_estimate",
        "spectral_re",
        "spectral_im",
        "status",
    ]);
    for ((a, x), r) in jobs.iter().zip(results) {
        match r {
            Ok(inv) => {
                let [re, im] = complex_cells(inv.value);
                let spectral = inv.spectral.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let [sre, sim] = complex_cells(spectral);
                table.rows.push(vec![
                    Cell::Text(family.to_string()),
                    Cell::Num(*a),
                    Cell::Num(*x),
                    re,
                    im,
                    Cell::Num(inv.error_estimate),
                    sre,
                    sim,
                    Cell::Text("converged".into()),
                ]);
            }
            Err(e @ (Error::Unsupported(_) | Error::InvalidParameter(_))) => return Err(e),
            Err(e) => failed_row(
                &mut table,
                vec![Cell::Text(family.to_string()), Cell::Num(*a), Cell::Num(*x)],
                &format!("a = {a}, x = {x}: {e}"),
            ),
        }
    }
    Ok(table)
}

fn exchange_cmd(config: &RunConfig) -> Result<Table> {
    let f = function(config)?;
    let g_id = config.g.as_deref().unwrap_or("gauss");
    let g = resolve_function(g_id, &config.g_param)?;
    let r = analysis::exchange_check(&f, &g, config.shift, config.tol()?)?;
    let mut table = Table::new(&[
        "function",
        "g",
        "shift",
        "lhs_re",
        "lhs_im",
        "rhs_re",
        "rhs_im",
        "lhs_error",
        "rhs_error",
        "difference",
        "bound",
        "norm_f",
        "verdict",
        "rhs_transform",
    ]);
    let [lre, lim] = complex_cells(r.lhs);
    let [rre, rim] = complex_cells(r.rhs);
    table.rows.push(vec![
        Cell::Text(f.id().to_string()),
        Cell::Text(g.id().to_string()),
        Cell::Num(r.shift),
        lre,
        lim,
        rre,
        rim,
        Cell::Num(r.lhs_error),
        Cell::Num(r.rhs_error),
        Cell::Num(r.difference()),
        Cell::Num(r.bound),
        Cell::Num(r.norm_f),
        Cell::Text(snake(&r.eligibility.verdict)),
        Cell::Text(snake(&r.routes.rhs)),
    ]);
    Ok(table)
}

fn eligibility_cmd(config: &RunConfig) -> Result<Table> {
    let g = function(config)?;
    let tol = config.tol()?;
    let r = match config.shift {
        Some(a) => analysis::exchange_eligible_shifted(&g, a, tol)?,
        None => analysis::exchange_eligible(&g, tol)?,
    };
    let mut table = Table::new(&[
        "function",
        "shift",
        "g_l1_norm",
        "moment1_gprime",
        "moment2_dgprime",
        "var_p1g",
        "var_p2gprime",
        "var_h",
        "h_over_p1_l1",
        "verdict",
        "failing_conditions",
        "borderline_conditions",
    ]);
    table.rows.push(vec![
        Cell::Text(g.id().to_string()),
        Cell::Num(r.shift),
        Cell::Num(r.g_l1_norm),
        Cell::Num(r.moment1_gprime),
        Cell::Num(r.moment2_dgprime),
        Cell::Num(r.var_p1g),
        Cell::Num(r.var_p2gprime),
        Cell::Num(r.var_h),
        Cell::Num(r.h_over_p1_l1),
        Cell::Text(snake(&r.verdict)),
        Cell::Text(r.failing_conditions.join("; ")),
        Cell::Text(r.borderline_conditions.join("; ")),
    ]);
    Ok(table)
}

fn norm_cmd(config: &RunConfig) -> Result<Table> {
    let f = function(config)?;
    let grid = uniform_grid(config)?;
    let n = omega::alexiewicz_norm(&NormSource::Function(&f), grid.as_ref(), config.tol()?)?;
    let mut table = Table::new(&["function", "value", "grid_max", "argmax", "limit", "refinement_change", "points"]);
    table.rows.push(vec![
        Cell::Text(f.id().to_string()),
        Cell::Num(n.value),
        Cell::Num(n.grid_max),
        Cell::Num(n.argmax),
        Cell::Num(n.limit),
        Cell::Num(n.refinement_change),
        Cell::Int(n.points as u64),
    ]);
    Ok(table)
}

fn example_cmd(config: &RunConfig) -> Result<Table> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required")));
    let nu = need(config.nu, "nu")?;
    let x = need(config.x.first().copied(), "x")?;
    let y = need(config.y, "y")?;
    let r = analysis::example_integral(nu, x, y, config.tol.unwrap_or(1e-10))?;
    let mut table = Table::new(&["nu", "x", "y", "numeric", "closed_form", "relative_error", "error_estimate"]);
    table.rows.push(vec![
        Cell::Num(r.nu),
        Cell::Num(r.x),
        Cell::Num(r.y),
        Cell::Num(r.numeric),
        Cell::Num(r.closed_form),
        Cell::Num(r.relative_error()),
        Cell::Num(r.error_estimate),
    ]);
    Ok(table)
}

fn catalog_cmd(config: &RunConfig) -> Result<Table> {
    let mut entries = catalog::list();
    if let Some(id) = &config.function {
        entries.retain(|e| e.id == id);
        if entries.is_empty() {
            return Err(Error::UnknownFunction(id.clone()));
        }
    }
    let mut table = Table::new(&["id", "description", "params", "flags"]);
    for e in entries {
        let params: Vec<String> =
            e.params.iter().map(|p| format!("{}={} [{}, {}]", p.name, p.default, p.min, p.max)).collect();
        let flags: Vec<String> = e.flags.iter().map(|f| f.to_string()).collect();
        table.rows.push(vec![
            Cell::Text(e.id.to_string()),
            Cell::Text(e.description.to_string()),
            Cell::Text(params.join("; ")),
            Cell::Text(flags.join("; ")),
        ]);
    }
    Ok(table)
}

fn write_output(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let threads = match threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidParameter("thread count must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Convergence { .. } | Error::NotAccelerated { .. } => EXIT_PARTIAL,
        _ => EXIT_CONFIG,
    }
}

/// Runs one computing command with a fully merged configuration and
/// returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let Some(command) = config.command else {
        eprintln!("error: no command given");
        return EXIT_CONFIG;
    };
    let pool = match thread_pool(config.threads) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = pool.install(|| match command {
        CommandName::Tabulate => tabulate(config),
        CommandName::Transform => transform_cmd(config),
        CommandName::Invert => invert_cmd(config),
        CommandName::Exchange => exchange_cmd(config),
        CommandName::Eligibility => eligibility_cmd(config),
        CommandName::Norm => norm_cmd(config),
        CommandName::ExampleIntegral => example_cmd(config),
        CommandName::Catalog => catalog_cmd(config),
    });
    let table = match result {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let params = serde_json::to_value(config).unwrap_or(Value::Null);
    let rendered = table.render(config.format.unwrap_or_default(), command.name(), &params);
    match rendered.and_then(|text| write_output(&text, config.output.as_deref())) {
        Ok(()) if table.failures > 0 => EXIT_PARTIAL,
        Ok(()) => EXIT_SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn run_verify(suite: &str, format: Option<Format>, output: Option<PathBuf>, threads: Option<usize>) -> i32 {
    let suite: Suite = match suite.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let pool = match thread_pool(threads) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let format = format.unwrap_or_default();
    let report = pool.install(|| {
        verify::verify_with(suite, |o| {
            if format == Format::Csv && output.is_some() {
                eprintln!("{o}");
            }
        })
    });
    let text = match format {
        Format::Csv => format!("{report}\n"),
        Format::Json => {
            let mut value = serde_json::to_value(&report).unwrap_or(Value::Null);
            if let Value::Object(m) = &mut value {
                m.insert("command".into(), Value::from("verify"));
                m.insert("version".into(), Value::from(VERSION));
            }
            serde_json::to_string_pretty(&value).unwrap_or_default() + "\n"
        }
    };
    if let Err(e) = write_output(&text, output.as_deref()) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if report.all_passed() {
        EXIT_SUCCESS
    } else {
        EXIT_PARTIAL
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    let (command, invocation) = match cli.command {
        Command::Verify { suite, format, output, threads } => return run_verify(&suite, format, output, threads),
        Command::Tabulate(i) => (Some(CommandName::Tabulate), i),
        Command::Transform(i) => (Some(CommandName::Transform), i),
        Command::Invert(i) => (Some(CommandName::Invert), i),
        Command::Exchange(i) => (Some(CommandName::Exchange), i),
        Command::Eligibility(i) => (Some(CommandName::Eligibility), i),
        Command::Norm(i) => (Some(CommandName::Norm), i),
        Command::ExampleIntegral(i) => (Some(CommandName::ExampleIntegral), i),
        Command::Catalog(i) => (Some(CommandName::Catalog), i),
        Command::Run(i) => (None, i),
    };
    let base = match &invocation.config {
        Some(path) => match RunConfig::from_file(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        },
        None => RunConfig::default(),
    };
    let mut config = invocation.run.over(base);
    if command.is_some() {
        config.command = command;
    }
    run(&config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_values() {
        let file: RunConfig =
            serde_json::from_str(r#"{"command": "transform", "function": "gauss", "tol": 1e-6, "s": [1.0, 2.0], "levels": 3}"#)
                .unwrap();
        let flags = RunConfig { tol: Some(1e-9), s: vec![0.5], ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.command, Some(CommandName::Transform));
        assert_eq!(merged.function.as_deref(), Some("gauss"));
        assert_eq!(merged.tol, Some(1e-9));
        assert_eq!(merged.s, vec![0.5]);
        assert_eq!(merged.levels, Some(3));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"functoin": "gauss"}"#).is_err());
    }

    #[test]
    fn grids_and_params_are_validated() {
        let bad = RunConfig { min: Some(0.0), max: Some(1.0), steps: Some(0), ..Default::default() };
        assert!(uniform_grid(&bad).is_err());
        let partial = RunConfig { min: Some(0.0), ..Default::default() };
        assert!(uniform_grid(&partial).is_err());
        let ok = RunConfig { min: Some(-1.0), max: Some(1.0), steps: Some(4), ..Default::default() };
        assert_eq!(uniform_grid(&ok).unwrap().unwrap().len(), 5);
        assert!(parse_params(&["nu".into()]).is_err());
        assert!(parse_params(&["nu=abc".into()]).is_err());
        assert_eq!(parse_params(&["nu=1.5".into()]).unwrap()["nu"], 1.5);
    }

    #[test]
    fn extra_function_ids_resolve() {
        assert!(resolve_function("triangle_smoothed_gauss", &[]).is_ok());
        let k = resolve_function("k_dirichlet", &["a=2".into()]).unwrap();
        assert_eq!(k.params()["a"], 2.0);
        assert!(matches!(resolve_function("nonesuch", &[]), Err(Error::UnknownFunction(_))));
        assert!(matches!(resolve_function("k_nonesuch", &[]), Err(Error::UnknownFunction(_))));
    }

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23] {
            let text = Cell::Num(x).csv();
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
        assert_eq!(Cell::Num(f64::INFINITY).csv(), "inf");
        assert_eq!(Cell::Num(f64::INFINITY).json(), Value::Null);
    }
}
