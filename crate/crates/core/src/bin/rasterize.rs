//! Command-line digitizer: parses a job file, runs the stepper over the
//! clipped conic, and emits grid points, diagnostics and renders.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use conic_raster::engine::Rule;
use conic_raster::error::Error;
use conic_raster::job::{self, RunOptions};

#[derive(Parser)]
#[command(
    name = "rasterize",
    about = "Digitize a conic arc onto the integer grid by exact midpoint measurements"
)]
struct Args {
    /// Job description file (`key = value` lines; see the README).
    job_file: PathBuf,
    /// Print the per-step decision trace.
    #[arg(long)]
    trace: bool,
    /// Measure every emitted point against the distance oracle.
    #[arg(long)]
    oracle: bool,
    /// Also run the 4-connected register-machine baseline per segment.
    #[arg(long)]
    knuth: bool,
    /// Run the timing benchmark with N repetitions.
    #[arg(long, value_name = "N")]
    bench: Option<u32>,
    /// Points output path (overrides the job file).
    #[arg(long, value_name = "PATH")]
    points: Option<PathBuf>,
    /// SVG output path (overrides the job file).
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// PGM output path (overrides the job file).
    #[arg(long, value_name = "PATH")]
    pgm: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::DegenerateConic
        | Error::NoRealLocus
        | Error::EmptyAfterClipping
        | Error::ArcNotFound(_) => 2,
        Error::StepBudgetExceeded(_) => 3,
        _ => 1,
    }
}

fn run(args: &Args) -> Result<String, Error> {
    let text = std::fs::read_to_string(&args.job_file)?;
    let mut jb = job::parse_job(&text)?;
    if args.points.is_some() {
        jb.points_path = args.points.clone();
    }
    if args.svg.is_some() {
        jb.svg_path = args.svg.clone();
    }
    if args.pgm.is_some() {
        jb.pgm_path = args.pgm.clone();
    }

    let opts = RunOptions {
        trace: args.trace,
        oracle: args.oracle,
        knuth: args.knuth,
    };
    let report = job::run_job(&jb, &opts)?;
    let mut out = report.to_string();

    if args.trace {
        for (k, run) in report.runs.iter().enumerate() {
            let _ = writeln!(out, "trace segment {k}:");
            for tr in &run.traces {
                let m =
                    tr.m.map(|m| format!("M[4F={} valid={}]", m.f_mid4, m.valid))
                        .unwrap_or_else(|| "M[-]".into());
                let _ = writeln!(
                    out,
                    "  {} -> {}  rule={:?} chosen={:?} {} ooa={}",
                    tr.from, tr.to, tr.rule, tr.chosen, m, tr.potential_ooa
                );
                debug_assert!(tr.rule != Rule::Forced || tr.m.is_none());
            }
        }
    }

    if args.knuth {
        for (k, t) in &report.knuth_tables {
            let _ = writeln!(out, "knuth segment {k} (scale {}):", t.scale);
            let _ = writeln!(out, "  {:>6} {:>6} {:>10} {:>10} {:>10}", "x", "y", "q", "r", "s");
            for row in &t.rows {
                let _ = writeln!(
                    out,
                    "  {:>6} {:>6} {:>10} {:>10} {:>10}",
                    row.x, row.y, row.q, row.r, row.s
                );
            }
        }
    }

    if let Some(reps) = args.bench {
        let b = job::bench(&jb, reps)?;
        let _ = write!(out, "{b}");
    }
    Ok(out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(out) => {
            // A closed pipe downstream is not an error worth reporting.
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rasterize: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
