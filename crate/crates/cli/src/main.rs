//! Command-line front end: ingest Hamiltonian files, run the boosted-vs-
//! conventional measurement analysis, run Monte Carlo validation, and emit
//! table- and plot-ready data.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure
//! (degeneracy, conditioning, non-convergence).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use cbvqe_core::analysis::{
    analyze, validate, AnalysisOptions, AnalysisReport, AnalysisStatus, ValidationOptions,
};
use cbvqe_core::pauli::{BasisState, PauliSum};
use cbvqe_core::statevec::DEFAULT_QUBIT_CAP;

/// Environment variable overriding the exact-diagonalization qubit cap.
const QUBIT_CAP_ENV: &str = "CBVQE_QUBIT_CAP";

const CSV_HEADER: &str =
    "label,n_qubits,alpha,E_exact,M_vqe,M_hfvqe,speedup,asymptotic_speedup,asymptotic_ratio";

#[derive(Parser)]
#[command(
    name = "cbvqe",
    about = "Measurement-cost analysis for classically-boosted VQE",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full measurement-cost report for one or more Hamiltonian files.
    Analyze(AnalyzeArgs),
    /// Monte Carlo validation of the variance model on one Hamiltonian.
    Validate(ValidateArgs),
    /// Compact per-molecule CSV of overlap, speedup, and asymptotic ratio.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Target energy precision in Hartree.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Boosting determinant as a bitstring (qubit 0 rightmost); default is
    /// the dominant determinant of the ground state.
    #[arg(long)]
    hf_state: Option<String>,
    /// Write the report rows as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full reports as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Total measurement shots per replica.
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    /// Monte Carlo replicas.
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    /// Base seed; replicas derive independent streams from it.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    file: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Target energy precision in Hartree.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Write the sweep CSV to this path instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

/// Failure classified for the exit code.
enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => m,
        }
    }
}

fn classify(path: &Path, err: cbvqe_core::Error) -> Failure {
    let message = format!("{}: {err}", path.display());
    if err.is_input_error() {
        Failure::Input(message)
    } else {
        Failure::Numerical(message)
    }
}

fn qubit_cap() -> Result<usize, Failure> {
    match std::env::var(QUBIT_CAP_ENV) {
        Ok(raw) => raw.parse().map_err(|_| {
            Failure::Input(format!(
                "{QUBIT_CAP_ENV} must be a positive integer, got `{raw}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_QUBIT_CAP),
    }
}

fn load(path: &Path) -> Result<PauliSum, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    PauliSum::parse_hamiltonian(&text).map_err(|e| classify(path, e))
}

fn analyze_one(path: &Path, options: &AnalysisOptions) -> Result<AnalysisReport, Failure> {
    let sum = load(path)?;
    analyze(&sum, options).map_err(|e| classify(path, e))
}

/// Shortest-round-trip float formatting keeps machine output lossless and
/// byte-stable across runs.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn analyze_csv_row(report: &AnalysisReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        report.label,
        report.n_qubits,
        fmt_f64(report.alpha),
        fmt_f64(report.e_exact),
        report.m_vqe,
        report.m_hfvqe,
        fmt_f64(report.speedup),
        fmt_f64(report.asymptotic_speedup),
        fmt_f64(report.asymptotic_ratio)
    )
}

fn print_analyze_table(reports: &[AnalysisReport]) {
    println!(
        "{:<20} {:>6} {:>9} {:>15} {:>12} {:>12} {:>10} {:>13} {:>9}  status",
        "label",
        "qubits",
        "alpha",
        "E_exact (Ha)",
        "M_VQE",
        "M_HF-VQE",
        "speedup",
        "asym.speedup",
        "ratio",
    );
    for r in reports {
        let status = match r.status {
            AnalysisStatus::Boosted => "boosted",
            AnalysisStatus::ClassicallySolved => "classically solved",
        };
        println!(
            "{:<20} {:>6} {:>9.6} {:>15.8} {:>12} {:>12} {:>10.3} {:>13.3} {:>9.4}  {}",
            r.label,
            r.n_qubits,
            r.alpha,
            r.e_exact,
            r.m_vqe,
            r.m_hfvqe,
            r.speedup,
            r.asymptotic_speedup,
            r.asymptotic_ratio,
            status
        );
    }
}

fn write_text(path: &Path, content: &str) -> anyhow::Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let hf_state = match &args.hf_state {
        Some(bits) => Some(
            BasisState::from_bitstring(bits)
                .map_err(|e| Failure::Input(format!("--hf-state: {e}")))?,
        ),
        None => None,
    };
    let options = AnalysisOptions {
        epsilon: args.epsilon,
        hf_state,
        qubit_cap: qubit_cap()?,
    };

    let results: Vec<Result<AnalysisReport, Failure>> = args
        .files
        .par_iter()
        .map(|path| analyze_one(path, &options))
        .collect();

    let mut reports = Vec::new();
    let mut worst = 0u8;
    for result in results {
        match result {
            Ok(report) => reports.push(report),
            Err(failure) => {
                eprintln!("error: {}", failure.message());
                worst = worst.max(match failure {
                    Failure::Input(_) => 1,
                    Failure::Numerical(_) => 2,
                });
            }
        }
    }

    print_analyze_table(&reports);

    if let Some(path) = &args.csv {
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for report in &reports {
            csv.push_str(&analyze_csv_row(report));
            csv.push('\n');
        }
        write_text(path, &csv).map_err(|e| Failure::Input(e.to_string()))?;
    }
    if let Some(path) = &args.json {
        let mut json =
            serde_json::to_string_pretty(&reports).map_err(|e| Failure::Input(e.to_string()))?;
        json.push('\n');
        write_text(path, &json).map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(worst)
}

fn cmd_validate(args: &ValidateArgs) -> Result<u8, Failure> {
    let sum = load(&args.file)?;
    let options = ValidationOptions {
        shots: args.shots,
        replicas: args.replicas,
        seed: args.seed,
        qubit_cap: qubit_cap()?,
    };
    let summary = validate(&sum, &options).map_err(|e| classify(&args.file, e))?;

    println!(
        "validation of {} ({} qubits): seed {}, {} shots/replica, {} replicas",
        summary.label, summary.n_qubits, summary.seed, summary.shots, summary.replicas
    );
    println!(
        "alpha {:.6}, E_exact {:.8} Ha",
        summary.alpha, summary.e_exact
    );
    println!(
        "{:<12} {:>9} {:>14} {:>14} {:>7}  verdict",
        "channel", "shots", "predicted", "empirical", "z"
    );
    let verdict = |pass: Option<bool>| match pass {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "-",
    };
    for check in summary.observable_checks.iter().chain(&summary.h22_check) {
        println!(
            "{:<12} {:>9} {:>14.6e} {:>14.6e} {:>+7.2}  {}",
            check.label,
            check.shots,
            check.predicted,
            check.empirical,
            check.z_score,
            verdict(check.pass)
        );
    }
    println!(
        "lambda variance: predicted {:.6e}, empirical {:.6e}, ratio {:.4}, verdict {} (20% tolerance)",
        summary.predicted_lambda_variance,
        summary.empirical_lambda_variance,
        summary.lambda_ratio,
        verdict(summary.lambda_pass)
    );
    for warning in &summary.warnings {
        println!("warning: {warning}");
    }

    let all_passed = summary
        .observable_checks
        .iter()
        .chain(&summary.h22_check)
        .all(|c| c.pass != Some(false))
        && summary.lambda_pass != Some(false);
    if all_passed {
        Ok(0)
    } else {
        Err(Failure::Numerical(format!(
            "{}: empirical variances deviate from the model",
            args.file.display()
        )))
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, Failure> {
    let options = AnalysisOptions {
        epsilon: args.epsilon,
        hf_state: None,
        qubit_cap: qubit_cap()?,
    };
    let results: Vec<Result<AnalysisReport, Failure>> = args
        .files
        .par_iter()
        .map(|path| analyze_one(path, &options))
        .collect();

    let mut csv = String::from("label,n_qubits,alpha,speedup,asymptotic_ratio\n");
    let mut worst = 0u8;
    for result in results {
        match result {
            Ok(r) => {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.label,
                    r.n_qubits,
                    fmt_f64(r.alpha),
                    fmt_f64(r.speedup),
                    fmt_f64(r.asymptotic_ratio)
                ));
            }
            Err(failure) => {
                eprintln!("error: {}", failure.message());
                worst = worst.max(match failure {
                    Failure::Input(_) => 1,
                    Failure::Numerical(_) => 2,
                });
            }
        }
    }
    match &args.csv {
        Some(path) => write_text(path, &csv).map_err(|e| Failure::Input(e.to_string()))?,
        None => print!("{csv}"),
    }
    Ok(worst)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(match failure {
                Failure::Input(_) => 1,
                Failure::Numerical(_) => 2,
            })
        }
    }
}
