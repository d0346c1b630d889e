//! `dcspec`: command-line front end for the quadratic-symbol toolkit.
//!
//! Inputs are JSON, outputs are CSV or JSON on stdout (or `--out`), with
//! optional SVG pictures. Diagnostics go to stderr as one JSON object per
//! line. Exit status: 0 success, 2 bad input, 3 numerical failure,
//! 4 degenerate spectrum.

mod commands;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{emit, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "dcspec", version, about = "Spectra, regions and pseudospectra of quadratic symbols")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

/// Either `--C0` (extent from the log-log schedule) or a fixed `--F`.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("extent").required(true).args(["c0", "f"])))]
pub struct ExtentArgs {
    #[arg(long = "C0")]
    pub c0: Option<f64>,
    #[arg(long = "F")]
    pub f: Option<f64>,
    #[arg(long = "C1")]
    pub c1: f64,
    /// Inner radius in units of h; `3` and `3h` are both accepted.
    #[arg(long, default_value = "3h", value_parser = parse_h_multiple)]
    pub inner: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension and basis of the singular space, plus the averaged-form margin.
    SingularSpace {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Lattice points of the spectrum in a disc.
    Spectrum {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        radius: f64,
    },
    /// Admissibility grid over the spectral region.
    Region {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        h: f64,
        #[command(flatten)]
        extent: ExtentArgs,
        /// Grid resolution `nx,ny`.
        #[arg(long, default_value = "101,101", value_parser = parse_pair)]
        res: (usize, usize),
        /// Grid window `x0,x1,y0,y1`; defaults to a square around the region.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
        window: Option<[f64; 4]>,
        /// Summary JSON path; without it the summary goes to stderr.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Averaging weight, deformed symbol and canonical normalizer diagnostics.
    Deform {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Converts between quadratic FBI phases and canonical maps.
    #[command(group(ArgGroup::new("input").required(true).args(["kappa", "phi"])))]
    Phase {
        #[arg(long)]
        kappa: Option<PathBuf>,
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// log10 of the truncated resolvent norm on a grid.
    Pseudospectrum {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        h: f64,
        #[arg(long = "N")]
        n: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
        window: [f64; 4],
        #[arg(long, default_value = "101,101", value_parser = parse_pair)]
        res: (usize, usize),
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Skip the comparison against degree N+10.
        #[arg(long)]
        no_check: bool,
    },
    /// Truncated resolvent norm at one point.
    Resolvent {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        h: f64,
        #[arg(long = "N")]
        n: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: (f64, f64),
    },
    /// Resolvent growth in 1/h over sampled admissible points.
    ProbeTheorem {
        #[arg(long)]
        symbol: PathBuf,
        #[command(flatten)]
        extent: ExtentArgs,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        h_list: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        n_start: u32,
        #[arg(long, default_value_t = 10)]
        n_step: u32,
        #[arg(long, default_value_t = 120)]
        n_cap: u32,
        #[arg(long, default_value_t = 1e-3)]
        n_tol: f64,
    },
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_window(s: &str) -> Result<[f64; 4], String> {
    let v = parse_floats(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] => Ok((a, b)),
        _ => Err(format!("expected two comma-separated counts, got {}", v.len())),
    }
}

fn parse_h_multiple(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let t = t.strip_suffix('h').unwrap_or(t);
    let t = if t.is_empty() { "1" } else { t };
    t.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("DCSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("DCSPEC_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit(&json!({
                "level": "error",
                "kind": "input",
                "reason": "usage",
                "exit_code": 2,
                "message": e.to_string().trim_end(),
            }));
            return ExitCode::from(2);
        }
    };
    match configure_threads().and_then(|_| commands::run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            emit(&e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
