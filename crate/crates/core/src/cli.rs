//! Job runner behind the `heat-rkhs` binary.
//!
//! A job is a [`JobConfig`], read from `--config` (JSON) and overridden by
//! command-line flags. Artifacts are CSV (header row, 17 significant digits,
//! complex numbers as `re_*`/`im_*` column pairs) or flat JSON objects.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 on numerical failure,
//! 3 when `verify` finds a failing check.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::control::{apply_operator, fd_oracle, feature, min_norm_control, ControlSignal, Lambda, Scenario, StateField};
use crate::error::Error;
use crate::geometry::sample_points;
use crate::gram::{gram, psd_check};
use crate::heat::{TimeParam, TruncationPolicy};
use crate::kernels::{KernelKind, KernelSpec};
use crate::verify::{run_suite, VerifyOptions};

/// Crank–Nicolson resolution used by `solve --oracle`.
pub const ORACLE_NX: usize = 400;
pub const ORACLE_NT: usize = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Kernel values at one pair, an input list of pairs, or sampled pairs (CSV)
    KernelEval,
    /// Gram matrix of sampled or given points with a PSD report (JSON)
    Gram,
    /// Final state driven by a profile or control file (CSV)
    Solve,
    /// Minimal-norm control reaching a target field (JSON + control CSV)
    Synthesize,
    /// Run the invariant checks and print a table
    Verify,
    /// Feature function h_z on the control grid (CSV)
    FeatureDump,
}

/// Named control profiles on `(0,T)`, written in `s = t/T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `0`
    Zero,
    /// `1`
    One,
    /// `sin(π s)`
    Sin,
    /// `s (1 - s)`
    Bump,
    /// `s² (1 - s)`
    Cubic,
}

impl Profile {
    fn eval(self, s: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::One => 1.0,
            Profile::Sin => (std::f64::consts::PI * s).sin(),
            Profile::Bump => s * (1.0 - s),
            Profile::Cubic => s * s * (1.0 - s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JobConfig {
    pub command: Option<Command>,
    pub kind: KernelKind,
    pub scenario: Scenario,
    #[serde(rename = "T")]
    pub t: f64,
    /// Truncation tolerance of the series.
    pub tol: f64,
    /// Distance of sampled points from the domain boundary.
    pub margin: f64,
    /// `auto`, `discrepancy:<noise>` or a number.
    pub lambda: String,
    /// Number of cells of the control grid.
    pub grid: usize,
    /// Number of sampled points (or pairs) when no input file is given.
    pub points: usize,
    pub oracle: bool,
    pub threads: Option<usize>,
    pub seed: u64,
    /// Single evaluation point `re,im`.
    pub z: Option<String>,
    pub w: Option<String>,
    pub profile: Profile,
    pub profile_right: Profile,
    /// Points (`kernel-eval`, `gram`, `solve`) or target field (`synthesize`).
    pub input: Option<PathBuf>,
    /// Control CSV for `solve`, as written by `synthesize`.
    pub control: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            command: None,
            kind: KernelKind::Left,
            scenario: Scenario::LeftOnly,
            t: 1.0,
            tol: 1e-12,
            margin: 0.05,
            lambda: "auto".into(),
            grid: 4096,
            points: 10,
            oracle: false,
            threads: None,
            seed: 0,
            z: None,
            w: None,
            profile: Profile::Sin,
            profile_right: Profile::Bump,
            input: None,
            control: None,
            out: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "heat-rkhs", version, allow_negative_numbers = true, about = "Kernels, states and minimal-norm controls of the boundary-controlled heat equation")]
struct Cli {
    /// Job to run (may instead come from the config file)
    command: Option<Command>,
    /// JSON job file; flags given on the command line win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Kernel: k0, left, right, plus, minus, full, half-line, bergman-sector, hardy-pullback, bergman-halfplane
    #[arg(long, value_parser = parse_kind)]
    kind: Option<KernelKind>,
    /// Control scenario: left, right, anti-sym, sym, both, half-line
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Horizon T > 0 [default: 1]
    #[arg(long = "T")]
    t: Option<f64>,
    /// Truncation tolerance for the series [default: 1e-12]
    #[arg(long)]
    tol: Option<f64>,
    /// Distance from the domain boundary for sampled points
    #[arg(long)]
    margin: Option<f64>,
    /// Tikhonov parameter: auto, a number, or discrepancy:<noise>
    #[arg(long)]
    lambda: Option<String>,
    /// Control grid cells M [default: 4096]
    #[arg(long)]
    grid: Option<usize>,
    /// Number of sampled or collocation points [default: 10]
    #[arg(long)]
    points: Option<usize>,
    /// Also run the Crank-Nicolson oracle (solve)
    #[arg(long)]
    oracle: bool,
    /// Worker threads [default: logical CPUs]
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for sampled points
    #[arg(long)]
    seed: Option<u64>,
    /// First argument as re,im
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Second argument as re,im
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Left control profile in s = t/T (solve)
    #[arg(long)]
    profile: Option<Profile>,
    /// Right control profile for the both scenario (solve)
    #[arg(long)]
    profile_right: Option<Profile>,
    /// Input CSV: points, pairs or a target field
    #[arg(long)]
    input: Option<PathBuf>,
    /// Control CSV to solve with instead of a profile
    #[arg(long)]
    control: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<KernelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure of a job, already classified for the exit status.
#[derive(Debug)]
pub enum JobError {
    Invalid(String),
    Numerical { operation: &'static str, source: Error },
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Invalid(_) => 1,
            JobError::Numerical { .. } => 2,
        }
    }
}

impl std::fmt::Display for JobError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JobError::Invalid(msg) => write!(f, "invalid input: {msg}"),
            JobError::Numerical { operation, source } => write!(f, "{operation} failed: {source}"),
        }
    }
}

type JobResult<T> = std::result::Result<T, JobError>;

fn invalid(msg: impl Into<String>) -> JobError {
    JobError::Invalid(msg.into())
}

/// Tags a library error with the operation that raised it.
fn op(operation: &'static str) -> impl Fn(Error) -> JobError {
    move |source| {
        if source.is_numerical() {
            JobError::Numerical { operation, source }
        } else {
            JobError::Invalid(format!("{operation}: {source}"))
        }
    }
}

fn io_error(path: &Path) -> impl Fn(io::Error) -> JobError + '_ {
    move |e| invalid(format!("{}: {e}", path.display()))
}

impl JobConfig {
    /// Merges a config file (if any) with the flags; flags win.
    fn from_cli(cli: Cli) -> JobResult<Self> {
        let mut cfg = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(io_error(path))?;
                serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?
            }
            None => JobConfig::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => { $( if let Some(v) = cli.$field { cfg.$field = v; } )* };
        }
        overlay!(kind, scenario, t, tol, margin, lambda, grid, points, seed, profile, profile_right);
        macro_rules! overlay_opt {
            ($($field:ident),*) => { $( if cli.$field.is_some() { cfg.$field = cli.$field; } )* };
        }
        overlay_opt!(command, threads, z, w, input, control, out);
        cfg.oracle |= cli.oracle;
        Ok(cfg)
    }

    pub fn validate(&self) -> JobResult<()> {
        if self.command.is_none() {
            return Err(invalid("no command given"));
        }
        TimeParam::new(self.t).map_err(|e| invalid(e.to_string()))?;
        TruncationPolicy::with_tol(self.tol).map_err(|e| invalid(e.to_string()))?;
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(invalid(format!("margin {} must be finite and ≥ 0", self.margin)));
        }
        if self.grid < ControlSignal::MIN_SAMPLES {
            return Err(invalid(format!("grid must have at least {} cells", ControlSignal::MIN_SAMPLES)));
        }
        if self.points == 0 {
            return Err(invalid("points must be positive"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be positive"));
        }
        self.lambda_setting()?;
        let paths: Vec<&PathBuf> = [&self.input, &self.control, &self.out].into_iter().flatten().collect();
        for (i, p) in paths.iter().enumerate() {
            if paths[..i].contains(p) {
                return Err(invalid(format!("path {} is used twice", p.display())));
            }
        }
        Ok(())
    }

    fn horizon(&self) -> TimeParam {
        TimeParam::new(self.t).expect("validated")
    }

    fn truncation(&self) -> TruncationPolicy {
        TruncationPolicy::with_tol(self.tol).expect("validated")
    }

    fn lambda_setting(&self) -> JobResult<Lambda> {
        self.lambda.parse().map_err(|e: Error| invalid(e.to_string()))
    }
}

/// Parses `re,im` (or a bare real number).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',').map(str::trim);
    let re = parts.next().unwrap_or("");
    let im = parts.next().unwrap_or("0");
    if parts.next().is_some() {
        return Err(format!("`{s}` is not of the form re,im"));
    }
    let re: f64 = re.parse().map_err(|_| format!("bad real part in `{s}`"))?;
    let im: f64 = im.parse().map_err(|_| format!("bad imaginary part in `{s}`"))?;
    Ok(Complex64::new(re, im))
}

/// 17 significant digits; negative zero is written as zero.
fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

/// Writes rows to `path`, or to `stdout` when no path is given.
fn write_csv(path: Option<&Path>, stdout: &mut dyn Write, header: &[&str], rows: &[Vec<f64>]) -> JobResult<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(|e| invalid(e.to_string()))?;
        for row in rows {
            w.write_record(row.iter().map(|&x| num(x))).map_err(|e| invalid(e.to_string()))?;
        }
        w.flush().map_err(|e| invalid(e.to_string()))?;
    }
    emit(path, stdout, &buf)
}

fn emit(path: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> JobResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(io_error(p)),
        None => stdout.write_all(bytes).map_err(|e| invalid(e.to_string())),
    }
}

fn write_json(path: Option<&Path>, stdout: &mut dyn Write, value: &serde_json::Value) -> JobResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| invalid(e.to_string()))?;
    text.push('\n');
    emit(path, stdout, text.as_bytes())
}

fn read_rows(path: &Path) -> JobResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| invalid(format!("{}: row {} is not numeric", path.display(), line + 2)))?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

/// Points from a CSV with columns `re_z,im_z` or `x`.
fn read_points(path: &Path) -> JobResult<Vec<Complex64>> {
    let (header, rows) = read_rows(path)?;
    if let (Some(r), Some(i)) = (column(&header, "re_z"), column(&header, "im_z")) {
        return Ok(rows.iter().map(|row| Complex64::new(row[r], row[i])).collect());
    }
    if let Some(x) = column(&header, "x") {
        return Ok(rows.iter().map(|row| Complex64::new(row[x], 0.0)).collect());
    }
    Err(invalid(format!("{}: expected columns `re_z,im_z` or `x`", path.display())))
}

/// Target field from a CSV with a point column set and `re_w,im_w`.
pub fn read_field(path: &Path, t: TimeParam) -> JobResult<StateField> {
    let points = read_points(path)?;
    let (header, rows) = read_rows(path)?;
    let (Some(r), Some(i)) = (column(&header, "re_w"), column(&header, "im_w")) else {
        return Err(invalid(format!("{}: expected columns `re_w,im_w`", path.display())));
    };
    let values = rows.iter().map(|row| Complex64::new(row[r], row[i])).collect();
    StateField::new(points, values, t).map_err(|e| invalid(e.to_string()))
}

/// Control CSV `t,re_u,im_u[,re_ur,im_ur]` on the midpoint grid of `(0,T)`.
pub fn read_control(path: &Path, t: TimeParam) -> JobResult<(ControlSignal, Option<ControlSignal>)> {
    let (header, rows) = read_rows(path)?;
    let (Some(tc), Some(r), Some(i)) = (column(&header, "t"), column(&header, "re_u"), column(&header, "im_u")) else {
        return Err(invalid(format!("{}: expected columns `t,re_u,im_u`", path.display())));
    };
    let m = rows.len();
    let h = t.get() / m as f64;
    for (k, row) in rows.iter().enumerate() {
        let expected = (k as f64 + 0.5) * h;
        if (row[tc] - expected).abs() > 1e-9 * t.get() {
            return Err(invalid(format!(
                "{}: row {} has t = {} but the midpoint grid of (0,{}) with {m} cells puts it at {expected}",
                path.display(),
                k + 2,
                row[tc],
                t.get()
            )));
        }
    }
    let signal = |re: usize, im: usize| {
        ControlSignal::new(t, rows.iter().map(|row| Complex64::new(row[re], row[im])).collect())
            .map_err(|e| invalid(format!("{}: {e}", path.display())))
    };
    let left = signal(r, i)?;
    let right = match (column(&header, "re_ur"), column(&header, "im_ur")) {
        (Some(r), Some(i)) => Some(signal(r, i)?),
        _ => None,
    };
    Ok((left, right))
}

fn control_rows(u: &ControlSignal, right: Option<&ControlSignal>) -> (Vec<&'static str>, Vec<Vec<f64>>) {
    let mut header = vec!["t", "re_u", "im_u"];
    if right.is_some() {
        header.extend(["re_ur", "im_ur"]);
    }
    let rows = u
        .grid()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut row = vec![t, u.samples[k].re, u.samples[k].im];
            if let Some(r) = right {
                row.extend([r.samples[k].re, r.samples[k].im]);
            }
            row
        })
        .collect();
    (header, rows)
}

fn split(values: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (values.iter().map(|v| v.re).collect(), values.iter().map(|v| v.im).collect())
}

fn single_point(s: &Option<String>, name: &str) -> JobResult<Option<Complex64>> {
    s.as_deref().map(|v| parse_complex(v).map_err(|e| invalid(format!("--{name}: {e}")))).transpose()
}

/// Executes a validated job, writing artifacts to `cfg.out` or `stdout`.
/// Returns the exit status of a successful run (nonzero only for a failing
/// `verify`).
pub fn run(cfg: &JobConfig, stdout: &mut (dyn Write + Send)) -> JobResult<i32> {
    cfg.validate()?;
    let mut job = || match cfg.command.expect("validated") {
        Command::KernelEval => kernel_eval(cfg, stdout),
        Command::Gram => gram_job(cfg, stdout),
        Command::Solve => solve(cfg, stdout),
        Command::Synthesize => synthesize(cfg, stdout),
        Command::Verify => verify(cfg, stdout),
        Command::FeatureDump => feature_dump(cfg, stdout),
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| invalid(format!("cannot start {n} threads: {e}")))?
            .install(job),
        None => job(),
    }
}

fn kernel_eval(cfg: &JobConfig, stdout: &mut dyn Write) -> JobResult<i32> {
    let spec = KernelSpec::new(cfg.kind, cfg.horizon(), cfg.truncation());
    let pairs: Vec<(Complex64, Complex64)> = match (single_point(&cfg.z, "z")?, single_point(&cfg.w, "w")?) {
        (Some(z), Some(w)) => vec![(z, w)],
        (Some(_), None) | (None, Some(_)) => return Err(invalid("--z and --w must be given together")),
        (None, None) => match &cfg.input {
            Some(path) => {
                let (header, rows) = read_rows(path)?;
                let cols: Vec<usize> = ["re_z", "im_z", "re_w", "im_w"]
                    .iter()
                    .map(|c| column(&header, c).ok_or_else(|| invalid(format!("{}: missing column `{c}`", path.display()))))
                    .collect::<JobResult<_>>()?;
                rows.iter()
                    .map(|r| (Complex64::new(r[cols[0]], r[cols[1]]), Complex64::new(r[cols[2]], r[cols[3]])))
                    .collect()
            }
            None => {
                let domain = cfg.kind.domain();
                let a = sample_points(domain, cfg.points, cfg.margin, cfg.seed).map_err(op("sample_points"))?;
                let b = sample_points(domain, cfg.points, cfg.margin, cfg.seed.wrapping_add(1))
                    .map_err(op("sample_points"))?;
                a.into_iter().zip(b).collect()
            }
        },
    };
    use rayon::prelude::*;
    let values = pairs
        .par_iter()
        .map(|&(z, w)| spec.eval(z, w))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(op("kernel-eval"))?;
    let rows: Vec<Vec<f64>> =
        pairs.iter().zip(&values).map(|((z, w), k)| vec![z.re, z.im, w.re, w.im, k.re, k.im]).collect();
    write_csv(cfg.out.as_deref(), stdout, &["re_z", "im_z", "re_w", "im_w", "re_k", "im_k"], &rows)?;
    Ok(0)
}

fn job_points(cfg: &JobConfig, domain: crate::Region) -> JobResult<Vec<Complex64>> {
    match &cfg.input {
        Some(path) => read_points(path),
        None => sample_points(domain, cfg.points, cfg.margin, cfg.seed).map_err(op("sample_points")),
    }
}

fn gram_job(cfg: &JobConfig, stdout: &mut dyn Write) -> JobResult<i32> {
    let spec = KernelSpec::new(cfg.kind, cfg.horizon(), cfg.truncation());
    let points = job_points(cfg, cfg.kind.domain())?;
    let g = gram(&spec, &points).map_err(op("gram"))?;
    let report = psd_check(&g, 1e-10);
    let n = g.len();
    let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| f(&g.entries[(i, j)])).collect()).collect()
    };
    let (pre, pim) = split(&points);
    let value = json!({
        "kind": cfg.kind.name(),
        "T": cfg.t,
        "points_re": pre,
        "points_im": pim,
        "entries_re": rows(|c| c.re),
        "entries_im": rows(|c| c.im),
        "min_eigenvalue": report.min_eigenvalue,
        "trace": report.trace,
        "psd_pass": report.passes,
    });
    write_json(cfg.out.as_deref(), stdout, &value)?;
    Ok(0)
}

/// Left and right boundary data the rod actually sees in each scenario.
fn rod_controls(scenario: Scenario, u: &ControlSignal, right: Option<&ControlSignal>) -> JobResult<(ControlSignal, ControlSignal)> {
    let neg = |s: &ControlSignal| s.scaled(Complex64::new(-1.0, 0.0));
    let zero = || ControlSignal::zeros(u.t, u.len()).expect("same grid as u");
    Ok(match scenario {
        Scenario::LeftOnly => (u.clone(), zero()),
        Scenario::RightOnly => (zero(), u.clone()),
        Scenario::AntiSym => (u.clone(), neg(u)),
        Scenario::Sym => (u.clone(), u.clone()),
        Scenario::Both => (u.clone(), right.cloned().unwrap_or_else(zero)),
        Scenario::HalfLine => return Err(invalid("the finite-difference oracle solves the rod, not the half line")),
    })
}

fn solve(cfg: &JobConfig, stdout: &mut dyn Write) -> JobResult<i32> {
    let t = cfg.horizon();
    let (u, right) = match &cfg.control {
        Some(path) => read_control(path, t)?,
        None => {
            let h = t.get();
            let left = ControlSignal::from_real_fn(t, cfg.grid, |s| cfg.profile.eval(s / h)).map_err(op("solve"))?;
            let right = ControlSignal::from_real_fn(t, cfg.grid, |s| cfg.profile_right.eval(s / h)).map_err(op("solve"))?;
            (left, Some(right))
        }
    };
    let points = match &cfg.input {
        Some(path) => read_points(path)?,
        None => {
            let n = cfg.points;
            let (a, b) = (cfg.margin, 1.0 - cfg.margin);
            if n > 1 && a >= b {
                return Err(invalid(format!("margin {} leaves no room on the rod", cfg.margin)));
            }
            (0..n)
                .map(|i| Complex64::new(if n == 1 { 0.5 } else { a + (b - a) * i as f64 / (n - 1) as f64 }, 0.0))
                .collect()
        }
    };
    let field = apply_operator(cfg.scenario, &u, right.as_ref(), &points).map_err(op("apply_operator"))?;
    let real_points = points.iter().all(|p| p.im == 0.0);

    let oracle = if cfg.oracle {
        if !real_points {
            return Err(invalid("--oracle needs real points in (0,1)"));
        }
        let (l, r) = rod_controls(cfg.scenario, &u, right.as_ref())?;
        let xs: Vec<f64> = points.iter().map(|p| p.re).collect();
        Some(fd_oracle(&l, &r, ORACLE_NX, ORACLE_NT, &xs).map_err(op("fd_oracle"))?)
    } else {
        None
    };

    let mut header: Vec<&str> = if real_points { vec!["x"] } else { vec!["re_z", "im_z"] };
    header.extend(["re_w", "im_w"]);
    if oracle.is_some() {
        header.extend(["re_w_fd", "im_w_fd", "abs_diff"]);
    }
    let rows: Vec<Vec<f64>> = (0..points.len())
        .map(|i| {
            let p = points[i];
            let w = field.values[i];
            let mut row = if real_points { vec![p.re] } else { vec![p.re, p.im] };
            row.extend([w.re, w.im]);
            if let Some(o) = &oracle {
                let v = o.values[i];
                row.extend([v.re, v.im, (w - v).norm()]);
            }
            row
        })
        .collect();
    write_csv(cfg.out.as_deref(), stdout, &header, &rows)?;
    Ok(0)
}

/// `<out stem>.control.csv` next to the JSON artifact.
pub fn control_path(out: &Path) -> PathBuf {
    out.with_extension("control.csv")
}

fn synthesize(cfg: &JobConfig, stdout: &mut dyn Write) -> JobResult<i32> {
    let t = cfg.horizon();
    let Some(input) = &cfg.input else {
        return Err(invalid("synthesize needs --input with the target field"));
    };
    let target = read_field(input, t)?;
    let result = min_norm_control(cfg.scenario, &target, cfg.lambda_setting()?, cfg.grid).map_err(op("min_norm_control"))?;
    let (cre, cim) = split(&result.coefficients);
    let (pre, pim) = split(&target.points);
    let (ure, uim) = split(&result.control.samples);
    let mut value = json!({
        "scenario": cfg.scenario.name(),
        "T": cfg.t,
        "lambda": result.lambda,
        "residual": result.residual,
        "norm_estimate": result.norm_estimate,
        "control_norm": result.control_norm,
        "points_re": pre,
        "points_im": pim,
        "coefficients_re": cre,
        "coefficients_im": cim,
        "control_t": result.control.grid(),
        "control_re": ure,
        "control_im": uim,
    });
    if let Some(r) = &result.control_right {
        let (rre, rim) = split(&r.samples);
        value["control_right_re"] = json!(rre);
        value["control_right_im"] = json!(rim);
    }
    if let Some(out) = &cfg.out {
        let path = control_path(out);
        value["control_csv"] = json!(path.display().to_string());
        let (header, rows) = control_rows(&result.control, result.control_right.as_ref());
        write_csv(Some(&path), stdout, &header, &rows)?;
    }
    write_json(cfg.out.as_deref(), stdout, &value)?;
    Ok(0)
}

fn verify(cfg: &JobConfig, stdout: &mut dyn Write) -> JobResult<i32> {
    let opts = VerifyOptions { t: cfg.horizon(), seed: cfg.seed, tol: cfg.tol, margin: cfg.margin };
    let rows = run_suite(&opts);
    let mut table = String::new();
    table.push_str(&format!("{:<30} {:>12} {:>12}  {}\n", "check", "defect", "tolerance", "result"));
    for r in &rows {
        let verdict = match (&r.error, r.passed) {
            (Some(e), _) => format!("FAIL ({e})"),
            (None, true) => "pass".into(),
            (None, false) => "FAIL".into(),
        };
        table.push_str(&format!("{:<30} {:>12.3e} {:>12.3e}  {verdict}\n", r.name, r.defect, r.tolerance));
    }
    let all = rows.iter().all(|r| r.passed);
    table.push_str(if all { "all checks passed\n" } else { "some checks FAILED\n" });
    stdout.write_all(table.as_bytes()).map_err(|e| invalid(e.to_string()))?;
    if let Some(out) = &cfg.out {
        write_json(Some(out), stdout, &json!({ "T": cfg.t, "seed": cfg.seed, "checks": rows, "all_passed": all }))?;
    }
    Ok(if all { 0 } else { 3 })
}

fn feature_dump(cfg: &JobConfig, stdout: &mut dyn Write) -> JobResult<i32> {
    let t = cfg.horizon();
    let z = single_point(&cfg.z, "z")?.ok_or_else(|| invalid("feature-dump needs --z"))?;
    let grid = ControlSignal::zeros(t, cfg.grid).map_err(op("feature-dump"))?.grid();
    let two = cfg.scenario.channels() == 2;
    let mut header = vec!["t", "re_h", "im_h"];
    if two {
        header.extend(["re_h_right", "im_h_right"]);
    }
    let rows = grid
        .iter()
        .map(|&s| {
            let f = feature(cfg.scenario, z, t, s).map_err(op("feature"))?;
            let mut row = vec![s, f.first.re, f.first.im];
            if two {
                row.extend([f.second.re, f.second.im]);
            }
            Ok(row)
        })
        .collect::<JobResult<Vec<_>>>()?;
    write_csv(cfg.out.as_deref(), stdout, &header, &rows)?;
    Ok(0)
}

/// Parses arguments, runs the job and reports failures as one line on
/// `stderr`. Returns the process exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(stderr, "{first}");
                    1
                }
            };
        }
    };
    let outcome = JobConfig::from_cli(cli).and_then(|cfg| run(&cfg, stdout));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
