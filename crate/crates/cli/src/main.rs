use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ctsim::circuit::{render_text, sample, write_circuit, SimOptions};
use ctsim::gates::random_unitary;
use ctsim::protocols::{instantiate, ProtocolInstance, PROTOCOLS};
use ctsim::tensor::DEFAULT_DIM_CAP;
use ctsim::verify::{sweep, verify_instance, write_csv, write_json_lines, VerificationReport, DEFAULT_VERIFY_TOL};
use ctsim::StateVector;

const CAP_ENV: &str = "CT_DIM_CAP";

#[derive(Parser)]
#[command(name = "ctsim", version, about = "Build, simulate and verify compressed teleportation protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(clap::Args, Clone)]
struct Target {
    /// Protocol name.
    #[arg(long, default_value = "ct-controlled")]
    protocol: String,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Number of parties.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Write the circuit in the text format.
    Build {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw the circuit as a wire diagram.
    Render {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check every branch against the target and the resource claim.
    Verify {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
        /// Where to write the full report.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Verify a grid of dimensions, party counts and seeds.
    Sweep {
        #[arg(long, default_value = "ct-controlled")]
        protocol: String,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        d: Vec<u32>,
        /// Comma-separated party counts.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        n: Vec<usize>,
        /// Number of seeds, counting up from --seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the circuit once on a seeded random input.
    Sample {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
    },
}

enum Failure {
    Usage(String),
    Verification,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn sim_options() -> Result<SimOptions, Failure> {
    let cap = match std::env::var(CAP_ENV) {
        Ok(v) => v.trim().parse::<u128>().map_err(|_| Failure::Usage(format!("{CAP_ENV} must be an integer, got `{v}`")))?,
        Err(_) => DEFAULT_DIM_CAP,
    };
    Ok(SimOptions::with_cap(cap))
}

fn configure_jobs(jobs: Option<usize>) -> Outcome {
    let Some(jobs) = jobs else { return Ok(()) };
    if jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    Ok(())
}

fn check_protocol(name: &str) -> Outcome {
    if PROTOCOLS.contains(&name) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("unknown protocol `{name}` (known: {})", PROTOCOLS.join(", "))))
    }
}

fn build(t: &Target) -> Result<ProtocolInstance, Failure> {
    check_protocol(&t.protocol)?;
    Ok(instantiate(&t.protocol, t.d, t.n, t.seed)?)
}

/// Write to a temporary file next to `path`, then rename over it.
fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)?;
    Ok(())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Outcome {
    match output {
        Some(p) => write_atomic(p, bytes),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

fn encode(reports: &[VerificationReport], format: Format) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json_lines(reports, &mut buf)?,
        Format::Csv => write_csv(reports, &mut buf)?,
        Format::Text => {
            for r in reports {
                writeln!(buf, "{}", r.summary())?;
            }
        }
    }
    Ok(buf)
}

fn run(cli: Cli) -> Outcome {
    configure_jobs(cli.jobs)?;
    let opts = sim_options()?;
    match cli.command {
        Command::Build { target, output } => emit(output.as_deref(), write_circuit(&build(&target)?.circuit).as_bytes()),
        Command::Render { target, output } => emit(output.as_deref(), render_text(&build(&target)?.circuit).as_bytes()),
        Command::Verify { target, tol, output, format } => {
            let inst = build(&target)?;
            let report = verify_instance(&inst, tol, &opts);
            println!("{}", report.summary());
            if let Some(path) = output {
                write_atomic(&path, &encode(std::slice::from_ref(&report), format)?)?;
            }
            if report.skipped {
                return Err(Failure::Usage(format!("raise {CAP_ENV} to run this instance")));
            }
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Sweep { protocol, d, n, seeds, seed, tol, output, format } => {
            check_protocol(&protocol)?;
            if let Some(bad) = d.iter().find(|&&d| d < 2) {
                return Err(Failure::Usage(format!("dimension must be at least 2, got {bad}")));
            }
            let seed_list: Vec<u64> = (seed..seed + seeds).collect();
            let reports = sweep(&protocol, &d, &n, &seed_list, tol, &opts);
            emit(output.as_deref(), &encode(&reports, format)?)?;
            let passed = reports.iter().filter(|r| r.pass).count();
            eprintln!("{passed}/{} cells passed", reports.len());
            if passed == reports.len() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Sample { target, tol } => {
            let inst = build(&target)?;
            let dim = inst.circuit.input_dim();
            let input = StateVector::new(random_unitary(dim, target.seed.wrapping_add(1))?.column(0))?;
            let (outcomes, out) = sample(&inst.circuit, &input, target.seed)?;
            let expected = StateVector::residue(inst.target.apply(input.amplitudes())?).normalize()?;
            let fidelity = out.fidelity(&expected);
            let digits: Vec<String> = outcomes.iter().map(u32::to_string).collect();
            println!("outcomes ({}) fidelity {fidelity:.12}", digits.join(","));
            if fidelity >= 1.0 - tol {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}
