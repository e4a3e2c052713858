//! `xtalk`: command-line driver for crosstalk characterization, injection,
//! scheduler comparison and single-circuit simulation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use xtalk_core::circuit::parse_qasm;
use xtalk_core::device::{load_device, DeviceModel};
use xtalk_core::experiments::{
    bundled_device, bundled_suite, compact, emit_report, load_benchmarks, map_to_device, run_compare, run_injection,
    CompareOptions, ComparisonSummary, ExperimentError, ReportFormat, BUNDLED_DEVICES,
};
use xtalk_core::rb::{characterize_device_with, CrosstalkReport, RBConfig, SrbPairing};
use xtalk_core::schedule::{par_sched, xtalk_sched};
use xtalk_core::sim::{run_scheduled, NoiseBinding, ShotMode};

#[derive(Debug, Parser)]
#[command(
    name = "xtalk",
    version,
    about = "Crosstalk characterization and crosstalk-adaptive scheduling"
)]
struct Cli {
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure the CX crosstalk ratio matrix with simultaneous RB.
    Characterize {
        /// Bundled device name or path to a device JSON file.
        #[arg(long)]
        device: String,
        /// Sequence lengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 5, 10, 20, 50, 100, 150])]
        lengths: Vec<usize>,
        /// Random sequences per length.
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Pairing::ClassMatched)]
        pairing: Pairing,
        /// Sample this many shots per circuit instead of exact probabilities.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correct-output probability of a CSWAP with 0..=K injected simultaneous CX gates.
    Inject {
        #[arg(long)]
        device: String,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// ParSched against XtalkSched on a benchmark directory.
    Compare {
        #[arg(long)]
        device: String,
        /// Directory of `.qasm` benchmarks (default: the bundled suite).
        #[arg(long)]
        bench: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        omega: f64,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        /// Schedule with the ratios of a `characterize` JSON report instead of
        /// the device's declared ratios.
        #[arg(long, conflicts_with = "measure_crosstalk")]
        crosstalk_from: Option<PathBuf>,
        /// Characterize the device first (default RB settings, `--seed`) and
        /// schedule with the measured ratios.
        #[arg(long)]
        measure_crosstalk: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Schedule and simulate one QASM circuit; prints the outcome distribution.
    Simulate {
        #[arg(long)]
        device: String,
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = Scheduler::Par)]
        schedule: Scheduler,
        #[arg(long, default_value_t = 0.5)]
        omega: f64,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the distribution and the schedule into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Pairing {
    ClassMatched,
    Independent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scheduler {
    Par,
    Xtalk,
}

fn resolve_device(spec: &str) -> Result<DeviceModel, ExperimentError> {
    if let Some(d) = bundled_device(spec) {
        return Ok(d);
    }
    if !Path::new(spec).exists() {
        let names: Vec<&str> = BUNDLED_DEVICES.iter().map(|(n, _)| *n).collect();
        return Err(ExperimentError::Input(format!(
            "device {spec:?} is neither a file nor a bundled device ({})",
            names.join(", ")
        )));
    }
    Ok(load_device(spec)?)
}

fn shot_mode(shots: Option<u64>, seed: u64) -> ShotMode {
    match shots {
        Some(shots) => ShotMode::Sampled { shots, seed },
        None => ShotMode::Analytic,
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf, ExperimentError> {
    let io = |e| ExperimentError::Io {
        path: dir.display().to_string(),
        source: e,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn read_report(path: &Path) -> Result<CrosstalkReport, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| ExperimentError::Input(format!("{}: not a characterization report: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Characterize {
            device,
            lengths,
            seeds,
            seed,
            pairing,
            shots,
            out,
        } => {
            let d = resolve_device(&device)?;
            let cfg = RBConfig {
                lengths,
                num_seeds: seeds,
                seed,
                pairing: match pairing {
                    Pairing::ClassMatched => SrbPairing::ClassMatched,
                    Pairing::Independent => SrbPairing::Independent,
                },
            };
            let report = characterize_device_with(&d, &cfg, shot_mode(shots, seed))?;
            let csv = write(&out, "crosstalk_matrix.csv", &report.to_csv_matrix())?;
            let json = write(&out, "crosstalk_report.json", &report.to_json())?;
            for c in &report.cells {
                println!("r({}|{}) = {:.4}", c.edge, c.other, c.ratio);
            }
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Command::Inject { device, max_k, out } => {
            let d = resolve_device(&device)?;
            let report = run_injection(&d, max_k)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let csv = write(&out, "injection.csv", &report.to_csv()?)?;
            let json = write(&out, "injection.json", &report.to_json())?;
            for r in &report.rows {
                println!(
                    "k = {}: P({}) = {:.6}, drop {:.2}%",
                    r.k,
                    report.expected,
                    r.probability,
                    100.0 * r.relative_drop
                );
            }
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Command::Compare {
            device,
            bench,
            omega,
            threshold,
            crosstalk_from,
            measure_crosstalk,
            seed,
            format,
            out,
        } => {
            let d = resolve_device(&device)?;
            let benchmarks = match bench {
                Some(dir) => load_benchmarks(&dir)?,
                None => bundled_suite(),
            };
            let measured = match (crosstalk_from, measure_crosstalk) {
                (Some(path), _) => Some(read_report(&path)?),
                (None, true) => Some(characterize_device_with(
                    &d,
                    &RBConfig {
                        seed,
                        ..RBConfig::default()
                    },
                    ShotMode::Analytic,
                )?),
                (None, false) => None,
            };
            if let Some(r) = &measured {
                if r.device != d.name() {
                    eprintln!(
                        "warning: report is for device {:?}, comparing on {:?}",
                        r.device,
                        d.name()
                    );
                }
            }
            let opts = CompareOptions {
                omega,
                threshold,
                scheduler_crosstalk: measured.as_ref().map(CrosstalkReport::to_crosstalk_map),
            };
            let records = run_compare(&d, &benchmarks, &opts)?;
            let formats: &[ReportFormat] = match format {
                Format::Csv => &[ReportFormat::Csv],
                Format::Json => &[ReportFormat::Json],
                Format::Both => &[ReportFormat::Csv, ReportFormat::Json],
            };
            for r in &records {
                println!(
                    "{}: fidelity {:.6} -> {:.6}, depth {} -> {}",
                    r.benchmark, r.fidelity_par, r.fidelity_xtalk, r.depth_par, r.depth_xtalk
                );
            }
            if let Some(s) = ComparisonSummary::of(&records) {
                println!(
                    "mean: fidelity {:.6} -> {:.6}, depth {:.3} -> {:.3}",
                    s.mean_fidelity_par, s.mean_fidelity_xtalk, s.mean_depth_par, s.mean_depth_xtalk
                );
            }
            for &f in formats {
                println!("wrote {}", emit_report(&records, f, &out)?.display());
            }
        }
        Command::Simulate {
            device,
            circuit,
            schedule,
            omega,
            threshold,
            shots,
            seed,
            out,
        } => {
            let d = resolve_device(&device)?;
            let name = circuit.display().to_string();
            let text = std::fs::read_to_string(&circuit).map_err(|source| ExperimentError::Io {
                path: name.clone(),
                source,
            })?;
            let c = parse_qasm(&text).map_err(|source| ExperimentError::Qasm {
                name: name.clone(),
                source,
            })?;
            let mapped = map_to_device(&c, &d, &name)?;
            // Unmeasured circuits report every qubit, so their labels are kept.
            let (small, qubits) = if mapped.measurements().is_empty() {
                let all: Vec<usize> = (0..mapped.num_qubits()).collect();
                (mapped, all)
            } else {
                compact(&mapped)?
            };
            let sub = d.restrict(&qubits)?;
            let sc = match schedule {
                Scheduler::Par => par_sched(&small, &sub)?,
                Scheduler::Xtalk => xtalk_sched(&small, &sub, omega, threshold)?,
            };
            let dist = run_scheduled(
                &sc,
                &NoiseBinding {
                    device: &sub,
                    shot_mode: shot_mode(shots, seed),
                },
            )?;
            println!("{}", dist.to_json());
            if let Some(dir) = out {
                write(&dir, "distribution.json", &dist.to_json())?;
                write(&dir, "schedule.json", &sc.to_json())?;
                write(&dir, "schedule.qasm", &sc.to_annotated_qasm())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
