//! Command-line front end.
//!
//! Every subcommand is deterministic: identical arguments produce
//! byte-identical CSV/JSON output (timings go to stderr). Exit codes:
//! 0 on success and on a passing `verify`, 1 on a failing `verify` or a
//! runtime error, 2 on usage errors.

use crate::cycles::{cycle_factors, enumerate_cycles};
use crate::decay::run_decay_suite;
use crate::filter::{build_delta_table, m0, theta, DeltaTable, FilterConfig};
use crate::report::{figure_series, run_full_verification};
use crate::svg::polyline_plot;
use crate::transform::{scaling_hat, synthesize_time, wavelet_hat};
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "gevrey-wavelet",
    version,
    about = "Smooth orthonormal wavelet with Lambert-W controlled spectral decay"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Regularity index (> 1).
    #[arg(long, global = true, default_value_t = 2.0)]
    sigma: f64,

    /// Bump half-width in radians, in (0, π/6].
    #[arg(long, global = true, default_value_t = PI / 12.0)]
    d: f64,

    /// Absolute quadrature tolerance for the delta table.
    #[arg(long = "tol", global = true, default_value_t = 1e-12)]
    tol: f64,

    /// Number of grid points for sweep outputs.
    #[arg(long = "grid-n", global = true, default_value_t = 4096)]
    grid_n: usize,

    /// Frequency window; default depends on the subcommand.
    #[arg(long = "xi-max", global = true)]
    xi_max: Option<f64>,

    /// Probe offset for the decay suite, in (0, 8π/15).
    #[arg(long, global = true, default_value_t = PI / 4.0)]
    eps: f64,

    /// Witness index for the decay suite (> 1).
    #[arg(long, global = true, default_value_t = 2.0)]
    eta: f64,

    /// Output file (for `plot`: output directory). Stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format for tabular data.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads for grid sweeps (merging is order-stable).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Emit the low-pass filter m0 over [-π, π].
    Filter,
    /// Emit the partition function theta over [-π, π].
    Theta,
    /// Emit the scaling function phi_hat over [-xi_max, xi_max] (default 16π).
    Scaling,
    /// Emit psi_hat over [-xi_max, xi_max] (default 16π).
    Wavelet,
    /// Synthesize the time-domain wavelet (xi_max default 256π).
    Synth {
        /// Sample count; a power of two.
        #[arg(long = "n-samples", default_value_t = 1 << 15)]
        n_samples: usize,
    },
    /// Invariant cycles of the doubling map with their filter products.
    Cycles {
        /// Longest cycle length to enumerate (<= 24).
        #[arg(long = "max-len", default_value_t = 8)]
        max_len: usize,
    },
    /// Run the decay suite over n = 3..=18 and emit its report.
    Decay,
    /// Run the full verification suite; exit 1 when any check fails.
    Verify,
    /// Write the five standard figures as SVG files.
    Plot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// Parses and runs; never panics on user input.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.exit_code() == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::Domain { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let config = FilterConfig {
        sigma: cli.sigma,
        d: cli.d,
        quad_tol: cli.tol,
        ..FilterConfig::default()
    };
    config.validate()?;
    if !(cli.eps > 0.0 && cli.eps < 8.0 * PI / 15.0) {
        return Err(Error::Config(format!(
            "--eps {} must lie in (0, 8π/15 = {})",
            cli.eps,
            8.0 * PI / 15.0
        )));
    }
    if !(cli.eta > 1.0) {
        return Err(Error::Config(format!("--eta {} must exceed 1", cli.eta)));
    }
    if cli.grid_n < 2 {
        return Err(Error::Config("--grid-n must be at least 2".into()));
    }
    if cli.jobs == 0 || cli.jobs > 512 {
        return Err(Error::Config("--jobs must lie in 1..=512".into()));
    }
    if let Some(xi_max) = cli.xi_max {
        if !(xi_max > 0.0 && xi_max.is_finite()) {
            return Err(Error::Config(format!("--xi-max {xi_max} must be positive")));
        }
    }

    let started = std::time::Instant::now();
    let table = build_delta_table(&config)?;
    let code = match &cli.command {
        Cmd::Filter => {
            let rows = sweep(&cli, &table, &config, -PI, PI, m0);
            write_table(&cli, &["xi", "m0"], &rows)?;
            0
        }
        Cmd::Theta => {
            let rows = sweep(&cli, &table, &config, -PI, PI, theta);
            write_table(&cli, &["xi", "theta"], &rows)?;
            0
        }
        Cmd::Scaling => {
            let w = cli.xi_max.unwrap_or(16.0 * PI);
            let rows = sweep(&cli, &table, &config, -w, w, |c, t, xi| {
                scaling_hat(c, t, xi)
            });
            write_table(&cli, &["xi", "phi_hat"], &rows)?;
            0
        }
        Cmd::Wavelet => {
            let w = cli.xi_max.unwrap_or(16.0 * PI);
            let grid = grid(&cli, -w, w);
            let rows: Vec<Vec<f64>> = crate::report::parallel_map(cli.jobs, &grid, |&xi| {
                let v = wavelet_hat(&config, &table, xi);
                vec![xi, v.re, v.im, v.norm()]
            });
            write_table(&cli, &["xi", "re_psi_hat", "im_psi_hat", "abs_psi_hat"], &rows)?;
            0
        }
        Cmd::Synth { n_samples } => {
            let w = cli.xi_max.unwrap_or(256.0 * PI);
            let synth = synthesize_time(&config, &table, w, *n_samples)?;
            eprintln!(
                "synth: l2 mass = {}, max imaginary residue = {:.3e}",
                synth.l2_mass, synth.max_imag
            );
            let rows: Vec<Vec<f64>> = synth
                .samples
                .abscissae
                .iter()
                .zip(&synth.samples.values)
                .map(|(x, v)| vec![*x, *v])
                .collect();
            write_table(&cli, &["x", "psi"], &rows)?;
            0
        }
        Cmd::Cycles { max_len } => {
            run_cycles(&cli, &config, &table, *max_len)?;
            0
        }
        Cmd::Decay => {
            let report = run_decay_suite(&config, &table, cli.eps, 3, 18, cli.eta)?;
            match cli.format {
                Format::Json => write_out(&cli, &json_string(&report.to_json()))?,
                Format::Csv => {
                    let mut text = String::from("n,xi_n,log_abs,r_upper,r_lower\n");
                    for s in &report.samples {
                        text.push_str(&format!(
                            "{},{},{},{},{}\n",
                            s.n, s.xi, s.log_abs_phi_hat, s.r_upper, s.r_lower
                        ));
                    }
                    write_out(&cli, &text)?;
                }
            }
            0
        }
        Cmd::Verify => {
            let report = run_full_verification(&config, cli.eps, cli.eta, cli.jobs)?;
            for check in &report.checks {
                eprintln!(
                    "{} {:<28} value {:>12.5e}  tol {:>9.3e}  {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.value,
                    check.tolerance,
                    check.detail
                );
            }
            write_out(&cli, &json_string(&report.to_json()))?;
            if report.pass {
                0
            } else {
                1
            }
        }
        Cmd::Plot => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("figs"));
            std::fs::create_dir_all(&dir).map_err(io_error)?;
            for fig in figure_series(&config, &table)? {
                let path = dir.join(format!("{}.svg", fig.name));
                let svg = polyline_plot(&fig.title, &fig.series, 900, 540);
                std::fs::write(&path, svg).map_err(io_error)?;
                println!("{}", path.display());
            }
            0
        }
    };
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    Ok(code)
}

fn io_error(err: std::io::Error) -> Error {
    Error::Envelope(format!("io: {err}")) // reused variant; message carries the cause
}

fn grid(cli: &Cli, a: f64, b: f64) -> Vec<f64> {
    (0..cli.grid_n)
        .map(|i| a + (b - a) * i as f64 / (cli.grid_n - 1) as f64)
        .collect()
}

fn sweep(
    cli: &Cli,
    table: &DeltaTable,
    config: &FilterConfig,
    a: f64,
    b: f64,
    f: impl Fn(&FilterConfig, &DeltaTable, f64) -> f64 + Sync,
) -> Vec<Vec<f64>> {
    let xs = grid(cli, a, b);
    crate::report::parallel_map(cli.jobs, &xs, |&xi| vec![xi, f(config, table, xi)])
}

fn write_table(cli: &Cli, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let text = match cli.format {
        Format::Csv => {
            let mut text = String::with_capacity(rows.len() * 32);
            text.push_str(&columns.join(","));
            text.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            text
        }
        Format::Json => {
            let mut object = serde_json::Map::new();
            for (i, col) in columns.iter().enumerate() {
                let series: Vec<Value> = rows.iter().map(|r| json!(r[i])).collect();
                object.insert((*col).to_string(), Value::Array(series));
            }
            json_string(&Value::Object(object))
        }
    };
    write_out(cli, &text)
}

fn run_cycles(cli: &Cli, config: &FilterConfig, table: &DeltaTable, max_len: usize) -> Result<()> {
    let cycles = enumerate_cycles(max_len)?;
    let mut rows = Vec::with_capacity(cycles.len());
    for cycle in &cycles {
        let factors = cycle_factors(config, table, cycle);
        let product: f64 = factors.iter().product();
        let zero_at = if product.abs() <= 1e-12 {
            let (idx, _) = factors
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite factors"))
                .expect("nonempty cycle");
            cycle[idx].to_string()
        } else {
            String::new()
        };
        let angles: Vec<String> = cycle.iter().map(|a| a.to_string()).collect();
        rows.push((angles.join(" "), cycle.len(), product, zero_at));
    }
    let text = match cli.format {
        Format::Csv => {
            let mut text = String::from("cycle,length,product,zero_at\n");
            for (cycle, len, product, zero_at) in &rows {
                text.push_str(&format!("{cycle},{len},{product},{zero_at}\n"));
            }
            text
        }
        Format::Json => {
            let entries: Vec<Value> = rows
                .iter()
                .map(|(cycle, len, product, zero_at)| {
                    json!({
                        "cycle": cycle,
                        "length": len,
                        "product": product,
                        "zero_at": zero_at,
                    })
                })
                .collect();
            json_string(&Value::Array(entries))
        }
    };
    write_out(cli, &text)
}

fn json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("finite values serialize");
    s.push('\n');
    s
}

fn write_out(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(io_error),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(io_error)
        }
    }
}
