use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use netfloc::harness::gen::{random_instance, random_trace, rng, seed_from_env, FuzzConfig};
use netfloc::harness::{bench_csv, bench_trace, opt_command, run_trace, Mode, Trace};
use netfloc::instance_file::read_instance;
use netfloc::oracle::checks::kappa_violations;
use netfloc::{DynamicFacilityLocation, Error, Hierarchy, Rational, Scalar};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "netfloc", version, about = "Dynamic metric facility location")]
struct Cli {
    /// Number type for distances and costs.
    #[arg(long, value_enum, default_value_t = ScalarKind::F64, global = true)]
    scalar: ScalarKind,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalarKind {
    F64,
    F32,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace and print query answers.
    Run {
        instance: PathBuf,
        trace: PathBuf,
        /// Compare against the from-scratch oracle after every update.
        #[arg(long)]
        verified: bool,
    },
    /// Replay with oracle comparison and invariant checks; exit 1 on the first failure.
    Verify { instance: PathBuf, trace: PathBuf },
    /// Per-event timing table as CSV.
    Bench {
        instance: PathBuf,
        trace: PathBuf,
        #[arg(long, default_value_t = 1)]
        reps: usize,
    },
    /// Exact optimum after the trace, against the engine.
    Opt { instance: PathBuf, trace: PathBuf },
    /// Print the preprocessed tree.
    DumpTree { instance: PathBuf },
    /// Write a random instance and trace; the seed comes from NETFLOC_SEED.
    Gen {
        #[arg(long, default_value_t = 20)]
        facilities: usize,
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[arg(long, default_value_t = 1000)]
        events: usize,
        #[arg(long)]
        instance_out: PathBuf,
        #[arg(long)]
        trace_out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.scalar {
        ScalarKind::F64 => execute::<f64>(cli.command),
        ScalarKind::F32 => execute::<f32>(cli.command),
        ScalarKind::Exact => execute::<Rational>(cli.command),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load<T: Scalar>(instance: &Path, trace: &Path) -> Result<(netfloc::Instance<T>, Trace), Error> {
    Ok((read_instance(instance)?, Trace::read(trace)?))
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn execute<T: Scalar>(command: Command) -> Result<ExitCode, Error> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Run { instance, trace, verified } => {
            let (instance, trace) = load::<T>(&instance, &trace)?;
            let mut engine = DynamicFacilityLocation::new(instance)?;
            let mode = if verified { Mode::Verified } else { Mode::Fast };
            let report = run_trace(&mut engine, &trace, mode)?;
            for line in &report.outputs {
                let _ = writeln!(out, "{line}");
            }
            if let Some(failure) = report.failure {
                eprintln!("mismatch at {failure}");
                return Ok(ExitCode::from(EXIT_VERIFICATION));
            }
        }
        Command::Verify { instance, trace } => {
            let (instance, trace) = load::<T>(&instance, &trace)?;
            let report = netfloc::harness::verify_trace(&instance, &trace)?;
            if let Some(failure) = report.failure {
                eprintln!("verification failed at {failure}");
                return Ok(ExitCode::from(EXIT_VERIFICATION));
            }
            eprintln!("ok: {} states verified", report.verified_states);
        }
        Command::Bench { instance, trace, reps } => {
            let (instance, trace) = load::<T>(&instance, &trace)?;
            let rows = bench_trace(&instance, &trace, reps)?;
            let _ = write!(out, "{}", bench_csv(&rows, reps));
        }
        Command::Opt { instance, trace } => {
            let (instance, trace) = load::<T>(&instance, &trace)?;
            let report = opt_command(&instance, &trace)?;
            let _ = writeln!(out, "{report}");
        }
        Command::DumpTree { instance } => {
            let instance = read_instance::<T>(&instance)?;
            let engine = DynamicFacilityLocation::new(instance)?;
            let h: &Hierarchy<T> = engine.hierarchy();
            let p = h.params();
            let _ = writeln!(out, "# rho_min={} rho_max={} delta={} nodes={}", p.rho_min, p.rho_max, p.delta, h.len());
            let _ = write!(out, "{}", h.dump());
            if let Some(kappa) = engine.instance().kappa() {
                for v in kappa_violations(h, kappa) {
                    eprintln!("kappa bound: {v}");
                }
            }
        }
        Command::Gen { facilities, points, events, instance_out, trace_out } => {
            if facilities == 0 || facilities > points {
                return Err(Error::InvalidInstance("need 1 <= facilities <= points".into()));
            }
            let seed = seed_from_env(0);
            let mut r = rng(seed);
            let file = random_instance(&mut r, &FuzzConfig { facilities, points, ..Default::default() });
            let trace = random_trace(&mut r, points, events);
            write_file(&instance_out, &file.to_json())?;
            write_file(&trace_out, &format!("# seed {seed}\n{}", trace.to_text()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
