//! The `ramint` command line.
//!
//! Exit codes: 0 success, 1 an inequality expectation was not met, 2 a
//! numerical, configuration or usage failure.
//!
//! CSV output uses a fixed header per command and `{:.16e}` for every real
//! (17 significant digits), so reruns are byte-identical.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::asymptotics::{compare, phi_coefficients};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::ramanujan::{
    bernstein_certificate, density_phi_derivative, eval_antiderivative, eval_derivative,
    EvalRequest, PI2,
};
use crate::special::PowerSeries;
use crate::turan::{alpha_bounds, g, scan_alpha, turan_derivatives, TuranParams};
use crate::verify::{run_suite, SuiteConfig};

/// Environment variable that overrides the default output directory.
pub const OUTPUT_DIR_ENV: &str = "RAMANUJAN_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "ramint-out";

#[derive(Debug, Parser)]
#[command(name = "ramint", version, about = "Ramanujan integral toolkit")]
pub struct Args {
    /// Quadrature tolerance, applied as both absolute and relative target.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Directory for files written by `verify` and `figure`.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// (-1)^n-signed derivative I_R^{(n)}(x) at each x.
    Eval {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
    },
    /// Asymptotic coefficients Φ_0..Φ_K.
    Coeffs {
        /// Positive real or `pi`.
        #[arg(long, default_value = "pi", allow_negative_numbers = true)]
        a: String,
        #[arg(long)]
        n: u32,
        #[arg(long = "K", visible_alias = "k")]
        k: usize,
    },
    /// Quadrature against the truncated expansion.
    AsymCompare {
        #[arg(long)]
        n: u32,
        /// log x; the comparison runs at x = e^{log_x}.
        #[arg(long)]
        log_x: f64,
        #[arg(long = "K", visible_alias = "k")]
        k: usize,
    },
    /// Run a verification suite and write report.json and report.csv.
    Verify {
        /// TOML suite; the bundled default when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run only the named checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Sampled data behind figures 1-4.
    Figure {
        #[arg(long)]
        id: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Sign patterns of H_n(x; α) derivatives (evidence only).
    ScanAlpha {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 20)]
        x_count: usize,
        #[arg(long, default_value_t = 5)]
        max_order: u32,
    },
    /// Antiderivative ∫_0^x I_R(y) dy.
    Antideriv {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
    },
    /// ∫ du / ((1 + e^u)(π² + u²)) over the real line.
    Certificate,
}

/// Resolved settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub quadrature: QuadratureConfig,
    pub output_dir: PathBuf,
}

impl CliConfig {
    pub fn from_args(args: &Args) -> Result<Self> {
        let mut quadrature = QuadratureConfig::default();
        if let Some(t) = args.tol {
            if !(t > 0.0) {
                return Err(Error::InvalidConfig(format!("--tol {t} must be positive")));
            }
            quadrature = quadrature.with_tol(t);
        }
        quadrature.validate()?;
        let output_dir = match &args.output_dir {
            Some(d) => d.clone(),
            None => std::env::var_os(OUTPUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        };
        Ok(Self {
            quadrature,
            output_dir,
        })
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let cfg = match CliConfig::from_args(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match dispatch(&args.command, &cfg, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn dispatch(cmd: &Command, cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let q = &cfg.quadrature;
    match cmd {
        Command::Eval { n, x } => {
            if let Some(bad) = x.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                writeln!(err, "usage error: x = {bad} must be positive").map_err(io)?;
                return Ok(2);
            }
            let mut s = String::from("n,x,value,abs_error,converged\n");
            let mut all = true;
            for &xv in x {
                let r = eval_derivative(&EvalRequest::new(*n, xv, *q))?;
                all &= r.converged;
                let _ = writeln!(s, "{n},{},{},{},{}", num(xv), num(r.value), num(r.abs_error), r.converged);
            }
            out.write_all(s.as_bytes()).map_err(io)?;
            Ok(if all { 0 } else { 2 })
        }
        Command::Coeffs { a, n, k } => {
            let a = parse_a(a)?;
            let c = phi_coefficients(a, *n, *k)?;
            let mut s = String::from("k,phi\n");
            for (i, v) in c.coeffs().iter().enumerate() {
                let _ = writeln!(s, "{i},{}", num(*v));
            }
            out.write_all(s.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::AsymCompare { n, log_x, k } => {
            let r = compare(*n, log_x.exp(), *k, q)?;
            let s = format!(
                "n,log_x,K,quadrature,expansion,rel_dev,next_term_ratio\n{n},{},{k},{},{},{},{}\n",
                num(*log_x),
                num(r.quadrature),
                num(r.expansion),
                num(r.rel_dev),
                num(r.next_term_ratio)
            );
            out.write_all(s.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Verify { config, only } => {
            let mut suite = match config {
                Some(p) => SuiteConfig::from_path(p)?,
                None => SuiteConfig::default_suite(),
            };
            if !only.is_empty() {
                suite = suite.only(only)?;
            }
            if cfg.quadrature != QuadratureConfig::default() {
                suite.quadrature.abs_tol = q.abs_tol;
                suite.quadrature.rel_tol = q.rel_tol;
            }
            let report = run_suite(&suite)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            std::fs::write(cfg.output_dir.join("report.json"), report.to_json())?;
            std::fs::write(cfg.output_dir.join("report.csv"), report.to_csv())?;
            let mut s = String::new();
            for r in &report.results {
                let status = if !r.numerical_failures.is_empty() {
                    "NUMERICAL-FAILURE"
                } else if r.expectation_met {
                    "ok"
                } else {
                    "UNMET"
                };
                let _ = writeln!(
                    s,
                    "{:<40} {:<17} violations={} worst_margin={:.3e}",
                    r.spec.name,
                    status,
                    r.violations.len(),
                    r.worst_margin
                );
            }
            let m = &report.summary;
            let _ = writeln!(
                s,
                "checks={} passed={} violated={} expected_failures={} unmet={} numerical_failures={}",
                m.total, m.passed, m.violated, m.expected_failures, m.expectations_unmet, m.numerical_failures
            );
            out.write_all(s.as_bytes()).map_err(io)?;
            Ok(report.exit_code())
        }
        Command::Figure { id, format, samples } => {
            let fig = figure_data(*id, *samples, q)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            let stem = cfg.output_dir.join(format!("figure{id}"));
            write_file(&stem.with_extension("csv"), &fig.to_csv())?;
            if *format == Format::Svg {
                write_file(&stem.with_extension("svg"), &fig.to_svg())?;
            }
            writeln!(out, "{}", stem.with_extension("csv").display()).map_err(io)?;
            Ok(0)
        }
        Command::ScanAlpha {
            n,
            alpha,
            x_min,
            x_max,
            x_count,
            max_order,
        } => {
            let b = alpha_bounds(*n)?;
            for a in alpha {
                if !(*a > b.sufficient && *a < b.necessary) {
                    writeln!(
                        err,
                        "warning: alpha = {a} lies outside ({}, {})",
                        b.sufficient, b.necessary
                    )
                    .map_err(io)?;
                }
            }
            if !(*x_min > 0.0 && x_max > x_min && *x_count >= 1) {
                writeln!(err, "usage error: need 0 < x-min < x-max and x-count >= 1").map_err(io)?;
                return Ok(2);
            }
            let xs = log_grid(*x_min, *x_max, *x_count);
            let rep = scan_alpha(*n, alpha, &xs, *max_order, q)?;
            let mut s = String::from("label,n,alpha,out_of_interval,x,order,value,abs_error,alternates\n");
            for c in &rep.cells {
                let ooi = rep
                    .summaries
                    .iter()
                    .find(|m| m.alpha == c.alpha)
                    .is_some_and(|m| m.out_of_interval);
                for (m, d) in c.derivatives.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{},{n},{},{ooi},{},{m},{},{},{}",
                        rep.label,
                        num(c.alpha),
                        num(c.x),
                        num(d.value),
                        num(d.abs_error),
                        c.alternates
                    );
                }
            }
            out.write_all(s.as_bytes()).map_err(io)?;
            for m in &rep.summaries {
                let fail = m
                    .first_positivity_failure
                    .map(|x| format!(" H<0 from x={x:e}"))
                    .unwrap_or_default();
                writeln!(
                    err,
                    "alpha={} alternates={} resolved={}{fail} (evidence only)",
                    m.alpha, m.all_alternate, m.all_resolved
                )
                .map_err(io)?;
            }
            let converged = rep
                .cells
                .iter()
                .all(|c| c.derivatives.iter().all(|d| d.converged));
            Ok(if converged { 0 } else { 2 })
        }
        Command::Antideriv { x } => {
            if let Some(bad) = x.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                writeln!(err, "usage error: x = {bad} must be positive").map_err(io)?;
                return Ok(2);
            }
            let mut s = String::from("x,value,abs_error,converged\n");
            let mut all = true;
            for &xv in x {
                let r = eval_antiderivative(xv, q)?;
                all &= r.converged;
                let _ = writeln!(s, "{},{},{},{}", num(xv), num(r.value), num(r.error_estimate), r.converged);
            }
            out.write_all(s.as_bytes()).map_err(io)?;
            Ok(if all { 0 } else { 2 })
        }
        Command::Certificate => {
            let r = bernstein_certificate(q)?;
            let s = format!(
                "value,abs_error,deviation_from_half,converged\n{},{},{},{}\n",
                num(r.value),
                num(r.error_estimate),
                num(r.value - 0.5),
                r.converged
            );
            out.write_all(s.as_bytes()).map_err(io)?;
            Ok(if r.converged { 0 } else { 2 })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_a(a: &str) -> Result<f64> {
    let v = if a.eq_ignore_ascii_case("pi") {
        std::f64::consts::PI
    } else {
        a.parse::<f64>()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse a = `{a}`")))?
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidConfig(format!("a = {a} must be positive")))
    }
}

fn log_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Columns of sampled curves.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: u32,
    pub title: &'static str,
    pub columns: Vec<String>,
    /// `rows[i][0]` is the abscissa.
    pub rows: Vec<Vec<f64>>,
}

impl FigureData {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| num(*v)).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    /// A minimal polyline plot; each series is scaled to unit maximum magnitude.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 40.0;
        const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
        let xs: Vec<f64> = self.rows.iter().map(|r| r[0]).collect();
        let (x0, x1) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let py = |y: f64| H / 2.0 - y * (H / 2.0 - PAD);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        );
        let _ = writeln!(s, "<title>{}</title>", self.title);
        let _ = writeln!(
            s,
            "<line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            H / 2.0,
            W - PAD,
            H / 2.0
        );
        let _ = writeln!(
            s,
            "<line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>",
            H - PAD
        );
        for (c, name) in self.columns.iter().enumerate().skip(1) {
            let peak = self
                .rows
                .iter()
                .map(|r| r[c].abs())
                .fold(0.0f64, f64::max)
                .max(f64::MIN_POSITIVE);
            let pts: Vec<String> = self
                .rows
                .iter()
                .map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[c] / peak)))
                .collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{}\" points=\"{}\"><title>{name}</title></polyline>",
                COLORS[(c - 1) % COLORS.len()],
                pts.join(" ")
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Default figure ranges: t ∈ [0.05, 10] for figures 1-2, x ∈ [0.1, 20] for
/// figure 3, x ∈ [0.5, 10] for figure 4. Figure 1 always contains `t = 1`.
pub fn figure_data(id: u32, samples: usize, cfg: &QuadratureConfig) -> Result<FigureData> {
    if samples < 2 {
        return Err(Error::InvalidConfig("need at least 2 samples".into()));
    }
    let orders: Vec<String> = (0..=5).map(|k| format!("d{k}")).collect();
    match id {
        1 => {
            let mut ts = log_grid(0.05, 10.0, samples);
            if !ts.contains(&1.0) {
                ts.push(1.0);
                ts.sort_by(f64::total_cmp);
            }
            let rows = ts
                .iter()
                .map(|&t| Ok(vec![t, density_phi_derivative(1, t)?]))
                .collect::<Result<_>>()?;
            Ok(FigureData {
                id,
                title: "derivative of phi_1",
                columns: vec!["t".into(), "phi1_prime".into()],
                rows,
            })
        }
        2 => {
            let rows = log_grid(0.05, 10.0, samples)
                .into_iter()
                .map(|t| {
                    let tt = PowerSeries::variable(t, 5);
                    let l = tt.ln();
                    let q = &(&l * &l) + &PowerSeries::constant(PI2, 5);
                    let jet = (&tt * &q).recip();
                    let mut r = vec![t];
                    r.extend((0..=5).map(|k| jet.derivative_at_center(k)));
                    r
                })
                .collect();
            let mut columns = vec!["t".to_string()];
            columns.extend(orders);
            Ok(FigureData {
                id,
                title: "phi_0 and its first five derivatives",
                columns,
                rows,
            })
        }
        3 => {
            let rows = log_grid(0.1, 20.0, samples)
                .into_iter()
                .map(|x| Ok(vec![x, g(x)?]))
                .collect::<Result<_>>()?;
            Ok(FigureData {
                id,
                title: "g(x)",
                columns: vec!["x".into(), "g".into()],
                rows,
            })
        }
        4 => {
            let p = TuranParams::new(3, 0.55)?;
            let rows = log_grid(0.5, 10.0, samples)
                .into_iter()
                .map(|x| {
                    let d = turan_derivatives(&p, x, 5, cfg)?;
                    let mut r = vec![x];
                    r.extend(d.iter().map(|v| v.value));
                    Ok(r)
                })
                .collect::<Result<_>>()?;
            let mut columns = vec!["x".to_string()];
            columns.extend(orders);
            Ok(FigureData {
                id,
                title: "H_3(x; 0.55) and its first five derivatives",
                columns,
                rows,
            })
        }
        _ => Err(Error::InvalidConfig(format!("unknown figure id {id}; expected 1-4"))),
    }
}
