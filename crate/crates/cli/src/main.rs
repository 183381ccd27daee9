// `!(a > b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand, ValueEnum};
use filippov_beb::classify::{classify, equilibria, sliding_region};
use filippov_beb::halfmaps::{tabulate, MapRow};
use filippov_beb::limit_cycles::{
    certify_cycle, displacement_csv, displacement_table, find_fixed_points, ScanOptions,
};
use filippov_beb::model::{builtin, parse_model};
use filippov_beb::sim::{events_csv, integrate, trajectory_csv, Controls};
use filippov_beb::sliding::{pseudo_equilibria, sample_field};
use filippov_beb::{Error, FilippovSystem, Side};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Boundary equilibrium bifurcations of planar piecewise-linear Filippov systems.
#[derive(Parser, Debug)]
#[command(name = "filippov-beb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Equilibria, folds, sliding segment and theorem hypotheses.
    Classify(Common),
    /// Pseudo-equilibria of the sliding flow.
    Pseudo(Common),
    /// Limit cycles: fixed points of the return map and their certificates.
    Cycles(Common),
    /// Tabulate the closed-form return map.
    Map(Common),
    /// Integrate one orbit.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        y0: f64,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
    },
    /// Write a phase-portrait bundle of CSV files.
    Portrait {
        #[command(flatten)]
        common: Common,
        /// Number of initial conditions on the ring.
        #[arg(long, default_value_t = 8)]
        ring: usize,
        /// Produce bundles for mu = -1, 0 and 1.
        #[arg(long)]
        sweep: bool,
    },
    /// Print a built-in model as a model file.
    Builtin {
        /// ex1, ex2 or ex3
        name: String,
        #[arg(long, allow_negative_numbers = true)]
        lambda_l: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// Model file (JSON).
    model: Option<PathBuf>,
    #[arg(long, conflicts_with = "model")]
    builtin: Option<String>,
    /// lambda_L of ex1.
    #[arg(long, allow_negative_numbers = true)]
    lambda_l: Option<f64>,
    /// Overrides the model's mu.
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    q_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q_max: Option<f64>,
    #[arg(long)]
    q_points: Option<usize>,
    /// Event tolerance for integration; residual bound for cycle certificates.
    #[arg(long)]
    tol: Option<f64>,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_input_error() { 1 } else { 2 }, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type Outcome = Result<String, Failure>;

impl Common {
    fn system(&self) -> Result<FilippovSystem, Failure> {
        if self.lambda_l.is_some() && self.builtin.as_deref() != Some("ex1") {
            return Err(usage("--lambda-l only applies to --builtin ex1"));
        }
        let sys = match (&self.model, &self.builtin) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                parse_model(&text)?
            }
            (None, Some(name)) => builtin(name, self.lambda_l)?,
            _ => return Err(usage("give a model file or --builtin ex1|ex2|ex3")),
        };
        let sys = match self.mu {
            Some(mu) if !mu.is_finite() => return Err(usage("--mu must be finite")),
            Some(mu) => sys.with_mu(mu),
            None => sys,
        };
        Ok(sys)
    }

    fn tol(&self, default: f64) -> Result<f64, Failure> {
        match self.tol {
            Some(t) if !(t > 0.0) => Err(usage("--tol must be positive")),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn run_classify(c: &Common) -> Outcome {
    let sys = c.system()?;
    let report = classify(&sys);
    match c.format {
        Format::Json => Ok(to_json(&report)),
        Format::Csv => {
            let v = serde_json::to_value(&report).expect("report serializes");
            let mut s = String::from("quantity,value\n");
            for key in ["mu", "beta_L", "beta_R", "gamma", "alpha", "zeta_L", "zeta_R", "kind", "gamma_sign_ok", "prediction"] {
                let field = match &v[key] {
                    Value::String(t) => t.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                };
                let _ = writeln!(s, "{key},{field}");
            }
            Ok(s)
        }
    }
}

fn run_pseudo(c: &Common) -> Outcome {
    let sys = c.system()?;
    let report = pseudo_equilibria(&sys)?;
    match c.format {
        Format::Json => Ok(to_json(&report)),
        Format::Csv => {
            let n = c.q_points.unwrap_or(200);
            let mut s = String::from("y,g_slide,theta\n");
            for (y, g, th) in sample_field(&sys, n)? {
                let _ = writeln!(s, "{y},{g},{th}");
            }
            Ok(s)
        }
    }
}

fn scan_options(c: &Common) -> ScanOptions {
    ScanOptions {
        q_min: c.q_min,
        q_max: c.q_max,
        n_scan: c.q_points.unwrap_or(ScanOptions::default().n_scan),
        ..ScanOptions::default()
    }
}

fn run_cycles(c: &Common) -> Outcome {
    let sys = c.system()?;
    let opts = scan_options(c);
    if c.format == Format::Csv {
        return Ok(displacement_csv(&displacement_table(&sys, &opts)?));
    }
    let tol = c.tol(1e-9)?;
    let report = find_fixed_points(&sys, &opts)?;
    let cycles: Vec<Value> = report
        .fixed_points
        .iter()
        .map(|fp| {
            let certificate = match certify_cycle(&sys, fp.y) {
                Ok(cert) => {
                    let ok = cert.max_residual() <= tol;
                    json!({ "certificate": cert, "residuals_within_tol": ok })
                }
                Err(e) => json!({ "certificate": null, "error": e.to_string() }),
            };
            json!({ "fixed_point": fp, "stability": fp.stability, "certification": certificate })
        })
        .collect();
    Ok(to_json(&json!({
        "name": sys.name,
        "mu": sys.mu,
        "count": cycles.len(),
        "stabilities": report.fixed_points.iter().map(|f| f.stability).collect::<Vec<_>>(),
        "cycles": cycles,
        "scan": { "q_min": report.q_min, "q_max": report.q_max, "n_scan": report.n_scan },
        "warnings": report.warnings,
    })))
}

fn run_map(c: &Common) -> Outcome {
    let sys = c.system()?;
    let zr = sys.fold(Side::Right);
    let scale = sys.fold(Side::Left).abs().max(zr.abs()).max(1.0);
    let q_min = c.q_min.unwrap_or(zr - 10.0 * scale);
    let q_max = c.q_max.unwrap_or(zr + 10.0 * scale);
    let n = c.q_points.unwrap_or(201);
    if !(q_min < q_max) || n < 2 || !q_min.is_finite() || !q_max.is_finite() {
        return Err(usage(format!("invalid map range [{q_min}, {q_max}] with {n} points")));
    }
    let qs: Vec<f64> = (0..n).map(|k| q_min + (q_max - q_min) * k as f64 / (n - 1) as f64).collect();
    let rows = tabulate(&sys, &qs);
    match c.format {
        Format::Json => Ok(to_json(&rows)),
        Format::Csv => Ok(map_csv(&rows)),
    }
}

fn map_csv(rows: &[MapRow]) -> String {
    let mut s = String::from("q,P_R,T_R,P,dP_dq,h\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.q, r.p_r, r.t_r, r.p, r.dp_dq, r.h);
    }
    s
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn run_simulate(c: &Common, x0: f64, y0: f64, t_max: f64) -> Outcome {
    let sys = c.system()?;
    let controls = Controls { event_tol: c.tol(1e-12)?, ..Controls::default() };
    let traj = integrate(&sys, x0, y0, t_max, &controls)?;
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
        let stem = format!("{}_mu{}", sys.name, sys.mu);
        write_file(dir, &format!("{stem}_trajectory.csv"), &trajectory_csv(&traj))?;
        write_file(dir, &format!("{stem}_events.csv"), &events_csv(&traj))?;
    }
    match c.format {
        Format::Json => Ok(to_json(&traj)),
        Format::Csv => Ok(trajectory_csv(&traj)),
    }
}

/// Writes one portrait bundle and returns its manifest.
fn portrait(sys: &FilippovSystem, dir: &Path, ring: usize, event_tol: f64) -> Result<Value, Failure> {
    let stem = format!("{}_mu{}", sys.name, sys.mu);
    let zl = sys.fold(Side::Left);
    let zr = sys.fold(Side::Right);
    let radius = 2.0 * zl.abs().max(zr.abs()).max(sys.mu.abs()).max(0.5);
    let slowest = [Side::Left, Side::Right]
        .iter()
        .filter_map(|&s| sys.half(s).focus().map(|(_, w)| w))
        .fold(f64::INFINITY, f64::min);
    let t_max = if slowest.is_finite() { 6.0 * 2.0 * PI / slowest } else { 50.0 };
    let controls = Controls { event_tol, ..Controls::default() };
    let mut files = Vec::new();
    let mut index = 0;
    for k in 0..ring {
        // Offset by half a slot so no start point lies on x = 0.
        let theta = 2.0 * PI * (k as f64 + 0.5) / ring as f64;
        let (x0, y0) = (radius * theta.cos(), radius * theta.sin());
        let traj = integrate(sys, x0, y0, t_max, &controls)?;
        let name = format!("{stem}_{index}.csv");
        write_file(dir, &name, &trajectory_csv(&traj))?;
        files.push(json!({ "file": name, "role": "trajectory", "start": [x0, y0] }));
        index += 1;
    }
    let mut cycles = Vec::new();
    if sys.mu != 0.0 {
        if let Ok(report) = find_fixed_points(sys, &ScanOptions::default()) {
            for fp in &report.fixed_points {
                let Ok(cert) = certify_cycle(sys, fp.y) else { continue };
                let orbit = integrate(sys, 0.0, cert.y_r, cert.period(), &Controls { event_tol, ..Controls::default() })?;
                let name = format!("{stem}_{index}.csv");
                write_file(dir, &name, &trajectory_csv(&orbit))?;
                files.push(json!({ "file": name, "role": "cycle", "stability": cert.stability }));
                cycles.push(cert);
                index += 1;
            }
        }
    }
    let sliding = sliding_region(sys).ok();
    if let Some(region) = sliding.filter(|r| r.exists) {
        let mut s = String::from("y,g_slide,theta\n");
        for (y, g, th) in sample_field(sys, 100)? {
            let _ = writeln!(s, "{y},{g},{th}");
        }
        let name = format!("{stem}_{index}.csv");
        write_file(dir, &name, &s)?;
        files.push(json!({ "file": name, "role": "sliding", "kind": region.kind }));
    }
    let eq = equilibria(sys).ok().map(|(l, r)| vec![l, r]);
    let pseudo = pseudo_equilibria(sys).ok().map(|r| r.roots.into_iter().filter(|p| p.admissible).collect::<Vec<_>>());
    let manifest = json!({
        "name": sys.name,
        "mu": sys.mu,
        "folds": { "zeta_L": num(zl), "zeta_R": num(zr) },
        "sliding": sliding,
        "equilibria": eq,
        "pseudo_equilibria": pseudo,
        "cycles": cycles,
        "files": files,
    });
    write_file(dir, &format!("{stem}_manifest.json"), &to_json(&manifest))?;
    Ok(manifest)
}

fn run_portrait(c: &Common, ring: usize, sweep: bool) -> Outcome {
    let sys = c.system()?;
    if sweep && c.mu.is_some() {
        return Err(usage("--sweep and --mu are exclusive"));
    }
    if ring == 0 {
        return Err(usage("--ring must be positive"));
    }
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let tol = c.tol(1e-12)?;
    let mus = if sweep { vec![-1.0, 0.0, 1.0] } else { vec![sys.mu] };
    let bundles = mus.into_iter().map(|mu| portrait(&sys.with_mu(mu), &dir, ring, tol)).collect::<Result<Vec<_>, _>>()?;
    Ok(to_json(&bundles))
}

fn run_builtin(name: &str, lambda_l: Option<f64>, mu: Option<f64>) -> Outcome {
    if lambda_l.is_some() && name != "ex1" {
        return Err(usage("--lambda-l only applies to ex1"));
    }
    let sys = builtin(name, lambda_l)?;
    let sys = mu.map_or(sys.clone(), |m| sys.with_mu(m));
    Ok(sys.to_json() + "\n")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Classify(c) => run_classify(c),
        Command::Pseudo(c) => run_pseudo(c),
        Command::Cycles(c) => run_cycles(c),
        Command::Map(c) => run_map(c),
        Command::Simulate { common, x0, y0, t_max } => run_simulate(common, *x0, *y0, *t_max),
        Command::Portrait { common, ring, sweep } => run_portrait(common, *ring, *sweep),
        Command::Builtin { name, lambda_l, mu } => run_builtin(name, *lambda_l, *mu),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
