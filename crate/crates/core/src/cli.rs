//! `scarf` command-line interface.
//!
//! Configuration precedence: built-in defaults, then an optional
//! `--config` file of `key = value` lines, then flags. Exit codes: 0 on
//! success, 1 when a check fails, 2 on usage or configuration errors.

use crate::algebra::ProductKind;
use crate::error::{Error, Result};
use crate::model::{closed_form_spectrum, potential_value, BaseParams, LatticeLabel};
use crate::numerics::Grid;
use crate::spectra::{bound_spectrum_fd, bound_spectrum_richardson, eigen_residual, rayleigh_quotient, RICHARDSON_TOLERANCE};
use crate::states::complex_state;
use crate::verify::{run_verification, CheckStatus, Tolerances, VerifyConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Default directory for written artifacts when `--output` is relative or
/// absent.
pub const OUTPUT_DIR_ENV: &str = "SCARF_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "scarf", version, about = "Real and complex factorization hierarchies of the Scarf II Hamiltonian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate Re V and Im V of a lattice member.
    Potential {
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form levels next to finite-difference (k = 0) or Rayleigh (k ≠ 0) values.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Number of levels to compute numerically [default: all bound levels].
        #[arg(long)]
        count: Option<usize>,
        /// Extrapolate from the grid and its refinement.
        #[arg(long)]
        richardson: bool,
    },
    /// Tabulate eigenstates of a lattice member, one CSV file per level.
    States {
        #[command(flatten)]
        common: Common,
        /// Comma-separated levels [default: all bound levels].
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Describe the (k, m) lattice and its ladder edges.
    Lattice {
        #[command(flatten)]
        common: Common,
        /// Half-width of the k range.
        #[arg(long, default_value_t = 2)]
        k_range: i64,
        /// Half-width of the m range.
        #[arg(long, default_value_t = 2)]
        m_range: i64,
    },
    /// Run the full identity suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Number of seeded random test functions.
        #[arg(long, default_value_t = 4)]
        test_functions: usize,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<i64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    /// Override a named tolerance, e.g. `--tol identity=1e-12`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (directory for `states --format csv`).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Plain-text `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// The resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k: i64,
    pub m: i64,
    pub x_max: f64,
    pub n_points: usize,
    pub tolerances: Tolerances,
    pub output_format: Format,
    pub output_path: Option<String>,
    pub seed: u64,
}

impl RunConfig {
    fn defaults(format: Format) -> Self {
        RunConfig {
            alpha: 3.0,
            beta: 6.8,
            gamma: 2.0,
            k: 0,
            m: 0,
            x_max: 8.0,
            n_points: 8001,
            tolerances: Tolerances::default(),
            output_format: format,
            output_path: None,
            seed: 42,
        }
    }

    pub fn base(&self) -> Result<BaseParams> {
        BaseParams::with_gamma(self.alpha, self.beta, self.gamma)
    }

    pub fn label(&self) -> Result<LatticeLabel> {
        Ok(self.base()?.label(self.k, self.m))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::symmetric(self.x_max, self.n_points)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidArgument(format!("config key {key}: cannot parse {value:?} as {what}"));
        let real = || value.parse::<f64>().map_err(|_| bad("a real number"));
        let int = || value.parse::<i64>().map_err(|_| bad("an integer"));
        match key {
            "alpha" => self.alpha = real()?,
            "beta" => self.beta = real()?,
            "gamma" => self.gamma = real()?,
            "k" => self.k = int()?,
            "m" => self.m = int()?,
            "x_max" => self.x_max = real()?,
            "n_points" => self.n_points = value.parse().map_err(|_| bad("a point count"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("a seed"))?,
            "output" => self.output_path = Some(value.to_string()),
            "format" => {
                self.output_format = match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(bad("csv or json")),
                }
            }
            _ => match key.strip_prefix("tol.") {
                Some(name) => self.tolerances.set(name, real()?)?,
                None => return Err(Error::InvalidArgument(format!("unknown config key {key:?}"))),
            },
        }
        Ok(())
    }

    fn resolve(common: &Common, default_format: Format) -> Result<Self> {
        let mut cfg = RunConfig::defaults(default_format);
        if let Some(path) = &common.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArgument(format!("config line {}: expected key = value", i + 1)))?;
                cfg.set(key.trim(), value.trim())?;
            }
        }
        if let Some(v) = common.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = common.beta {
            cfg.beta = v;
        }
        if let Some(v) = common.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = common.k {
            cfg.k = v;
        }
        if let Some(v) = common.m {
            cfg.m = v;
        }
        if let Some(v) = common.x_max {
            cfg.x_max = v;
        }
        if let Some(v) = common.n_points {
            cfg.n_points = v;
        }
        if let Some(v) = common.seed {
            cfg.seed = v;
        }
        if let Some(v) = common.format {
            cfg.output_format = v;
        }
        if let Some(p) = &common.output {
            cfg.output_path = Some(p.to_string_lossy().into_owned());
        }
        for t in &common.tol {
            let (name, value) = t
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("--tol expects NAME=VALUE, got {t:?}")))?;
            let v = value.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("--tol {name}: bad value {value:?}")))?;
            cfg.tolerances.set(name.trim(), v)?;
        }
        cfg.base()?;
        cfg.grid()?;
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize, S: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    results: R,
    residuals: S,
    pass: bool,
}

fn envelope<R: Serialize, S: Serialize>(command: &str, config: &RunConfig, results: R, residuals: S, pass: bool) -> String {
    let e = Envelope { command, config, results, residuals, pass };
    let mut s = serde_json::to_string_pretty(&e).expect("serializable report");
    s.push('\n');
    s
}

fn c2(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn resolve_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn emit(cfg: &RunConfig, content: &str) -> Result<()> {
    match &cfg.output_path {
        Some(p) => write_file(&resolve_path(Path::new(p)), content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, content).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

/// `x,re,im` rows with 17 significant digits.
pub fn table_csv(xs: &[f64], values: &[C64]) -> String {
    let mut s = String::from("x,re,im\n");
    for (x, v) in xs.iter().zip(values) {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", x, v.re, v.im);
    }
    s
}

fn cmd_potential(cfg: &RunConfig) -> Result<i32> {
    let label = cfg.label()?;
    let grid = cfg.grid()?;
    let xs = grid.nodes();
    let vs: Vec<C64> = xs.iter().map(|&x| potential_value(&label, x)).collect();
    let out = match cfg.output_format {
        Format::Csv => table_csv(&xs, &vs),
        Format::Json => envelope(
            "potential",
            cfg,
            json!({
                "x": xs,
                "re": vs.iter().map(|v| v.re).collect::<Vec<_>>(),
                "im": vs.iter().map(|v| v.im).collect::<Vec<_>>(),
            }),
            json!({}),
            true,
        ),
    };
    emit(cfg, &out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct LevelRow {
    n: usize,
    closed_form: f64,
    numerical: Option<[f64; 2]>,
    delta: Option<f64>,
}

fn cmd_spectrum(cfg: &RunConfig, count: Option<usize>, richardson: bool, tol_given: bool) -> Result<i32> {
    let label = cfg.label()?;
    let grid = cfg.grid()?;
    let levels = closed_form_spectrum(&label);
    let count = count.unwrap_or(levels.len());
    let (method, numerical): (&str, Vec<C64>) = if count == 0 {
        ("none", Vec::new())
    } else if label.k == 0 {
        let s = if richardson { bound_spectrum_richardson(&label, &grid, count)? } else { bound_spectrum_fd(&label, &grid, count)? };
        (if richardson { "richardson" } else { "finite_difference" }, s.energies())
    } else {
        // complex members: bilinear Rayleigh quotients of the chain-built states
        let base = BaseParams { alpha: label.base.alpha, beta: label.beta_eff(), gamma: label.gamma() };
        let member = base.label(label.k, 0);
        let qs = (0..count.min(levels.len()))
            .map(|n| complex_state(&base, label.k, n, &grid).and_then(|w| rayleigh_quotient(&member, &w, ProductKind::Bilinear)))
            .collect::<Result<Vec<_>>>()?;
        ("rayleigh", qs)
    };
    let tolerance = if richardson && !tol_given { RICHARDSON_TOLERANCE } else { cfg.tolerances.get("fd_spectrum") };
    let rows: Vec<LevelRow> = (0..levels.len().max(numerical.len()))
        .map(|n| {
            let closed = levels.get(n).map(|l| l.energy);
            let num = numerical.get(n).copied();
            LevelRow {
                n,
                closed_form: closed.unwrap_or(f64::NAN),
                numerical: num.map(c2),
                delta: closed.zip(num).map(|(c, v)| (v - c).norm()),
            }
        })
        .filter(|r| r.delta.is_some() || r.n < levels.len())
        .collect();
    let max_delta = rows.iter().filter_map(|r| r.delta).fold(0.0, f64::max);
    let pass = max_delta <= tolerance;
    let out = match cfg.output_format {
        Format::Json => {
            let levels_json: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "n": r.n, "closed_form": levels.get(r.n).map(|l| l.energy), "numerical": r.numerical, "delta": r.delta }))
                .collect();
            envelope(
                "spectrum",
                cfg,
                json!({ "method": method, "levels": levels_json }),
                json!({ "max_delta": max_delta, "tolerance": tolerance }),
                pass,
            )
        }
        Format::Csv => {
            let mut s = String::from("n,closed_form,numerical_re,numerical_im,delta\n");
            for r in &rows {
                let closed = levels.get(r.n).map(|l| format!("{:.16e}", l.energy)).unwrap_or_default();
                let (re, im) = r.numerical.map(|v| (format!("{:.16e}", v[0]), format!("{:.16e}", v[1]))).unwrap_or_default();
                let d = r.delta.map(|d| format!("{d:.16e}")).unwrap_or_default();
                let _ = writeln!(s, "{},{closed},{re},{im},{d}", r.n);
            }
            s
        }
    };
    emit(cfg, &out)?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_states(cfg: &RunConfig, ns: Option<Vec<usize>>) -> Result<i32> {
    let label = cfg.label()?;
    let grid = cfg.grid()?;
    let base = BaseParams { alpha: label.base.alpha, beta: label.beta_eff(), gamma: label.gamma() };
    let n_levels = closed_form_spectrum(&label).len();
    if n_levels == 0 {
        return Err(Error::Domain(format!("beta_eff = {} has no bound states", label.beta_eff())));
    }
    let ns = ns.unwrap_or_else(|| (0..n_levels).collect());
    let member = base.label(label.k, 0);
    let xs = grid.nodes();
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut pass = true;
    for &n in &ns {
        let w = complex_state(&base, label.k, n, &grid)?;
        let res = eigen_residual(&member, &w, C64::new(w.energy, 0.0));
        pass &= res <= cfg.tolerances.get("isospectral");
        match cfg.output_format {
            Format::Csv => {
                let dir = match &cfg.output_path {
                    Some(p) => resolve_path(Path::new(p)),
                    None => std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
                };
                let path = dir.join(format!("state_k{}_n{n}.csv", label.k));
                write_file(&path, &table_csv(&xs, w.f.values()))?;
                files.push(path);
            }
            Format::Json => rows.push(json!({
                "n": n,
                "k": label.k,
                "energy": w.energy,
                "eigen_residual": res,
                "re": w.f.values().iter().map(|v| v.re).collect::<Vec<_>>(),
                "im": w.f.values().iter().map(|v| v.im).collect::<Vec<_>>(),
            })),
        }
    }
    match cfg.output_format {
        Format::Csv => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Format::Json => emit(cfg, &envelope("states", cfg, json!({ "x": xs, "states": rows }), json!({}), pass))?,
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_lattice(cfg: &RunConfig, k_range: i64, m_range: i64) -> Result<i32> {
    if k_range < 0 || m_range < 0 {
        return Err(Error::InvalidArgument("lattice ranges must be non-negative".into()));
    }
    let base = cfg.base()?;
    let (k0, m0) = (cfg.k, cfg.m);
    let inside = |k: i64, m: i64| (k - k0).abs() <= k_range && (m - m0).abs() <= m_range;
    let mut nodes = Vec::new();
    let mut edges: Vec<(i64, i64, i64, i64, String)> = Vec::new();
    for k in k0 - k_range..=k0 + k_range {
        for m in m0 - m_range..=m0 + m_range {
            let l = base.label(k, m);
            nodes.push(json!({
                "k": k,
                "m": m,
                "alpha_eff": c2(l.alpha_eff()),
                "beta_eff": l.beta_eff(),
                "levels": closed_form_spectrum(&l).iter().map(|v| v.energy).collect::<Vec<_>>(),
            }));
            // lowering operators sit at the source, raising operators at the target
            let moves = [
                (k, m - 1, format!("A_minus[{k},{m}]")),
                (k, m + 1, format!("A_plus[{k},{}]", m + 1)),
                (k - 1, m, format!("C_minus[{k},{m}]")),
                (k + 1, m, format!("C_plus[{},{m}]", k + 1)),
            ];
            for (tk, tm, op) in moves {
                if inside(tk, tm) {
                    edges.push((k, m, tk, tm, op));
                }
            }
        }
    }
    let out = match cfg.output_format {
        Format::Json => {
            let e: Vec<Value> = edges.iter().map(|(a, b, c, d, op)| json!({ "from": [a, b], "to": [c, d], "operator": op })).collect();
            envelope("lattice", cfg, json!({ "nodes": nodes, "edges": e }), json!({}), true)
        }
        Format::Csv => {
            let mut s = String::from("from_k,from_m,to_k,to_m,operator\n");
            for (a, b, c, d, op) in &edges {
                let _ = writeln!(s, "{a},{b},{c},{d},{op}");
            }
            s
        }
    };
    emit(cfg, &out)?;
    Ok(EXIT_OK)
}

fn cmd_verify(cfg: &RunConfig, test_functions: usize) -> Result<i32> {
    let vc = VerifyConfig {
        base: cfg.base()?,
        k: cfg.k,
        m: cfg.m,
        grid: cfg.grid()?,
        seed: cfg.seed,
        n_test_functions: test_functions,
        tolerances: cfg.tolerances.clone(),
    };
    let report = run_verification(&vc)?;
    let out = match cfg.output_format {
        Format::Json => envelope(
            "verify",
            cfg,
            json!({ "checks": report.checks.len(), "passed": report.passed, "failed": report.failed, "skipped": report.skipped }),
            &report.checks,
            report.pass,
        ),
        Format::Csv => {
            let mut s = String::from("name,status,value,tolerance\n");
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "fail",
                    CheckStatus::Skipped => "skipped",
                };
                let v = c.value.map(|v| format!("{v:.16e}")).unwrap_or_default();
                let _ = writeln!(s, "{},{status},{v},{:e}", c.name, c.tolerance);
            }
            s
        }
    };
    emit(cfg, &out)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata<'_>) -> bool {
        metadata.level() <= log::Level::Warn
    }

    fn log(&self, record: &log::Record<'_>) {
        if self.enabled(record.metadata()) {
            eprintln!("{}: {}", record.level().as_str().to_lowercase(), record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

/// Runs the CLI on `argv` (including the program name) and returns the
/// exit code.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(log::LevelFilter::Warn);
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let run = || -> Result<i32> {
        match cli.command {
            Command::Potential { common } => cmd_potential(&RunConfig::resolve(&common, Format::Csv)?),
            Command::Spectrum { common, count, richardson } => {
                let tol_given = common.tol.iter().any(|t| t.trim_start().starts_with("fd_spectrum"));
                cmd_spectrum(&RunConfig::resolve(&common, Format::Json)?, count, richardson, tol_given)
            }
            Command::States { common, n } => cmd_states(&RunConfig::resolve(&common, Format::Csv)?, n),
            Command::Lattice { common, k_range, m_range } => cmd_lattice(&RunConfig::resolve(&common, Format::Json)?, k_range, m_range),
            Command::Verify { common, test_functions } => cmd_verify(&RunConfig::resolve(&common, Format::Json)?, test_functions),
        }
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
