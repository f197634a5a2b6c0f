//! `wexpand`: run, validate and verify W-state expansion schemes.
//!
//! Exit codes: 0 success / accept, 1 usage error or malformed input file,
//! 2 validation or verification failure, 3 resource bound exceeded.
//! All artifacts use fixed field order and 17-significant-digit floats,
//! so identical invocations produce byte-identical output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use wexpand_core::analysis::{self, FormulaTable};
use wexpand_core::schemes::{self, ParallelLayout, WSpec, VERIFY_TOL};
use wexpand_core::state::{ModeId, Polarization, PureState, MAX_QUBITS, TOL};
use wexpand_core::{gates, Error, ExpansionOutcome};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "wexpand", version, about = "W-state expansion simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    /// Add one qubit at a time: block + loss filter on the old modes.
    Cascade,
    /// One block per mode; deterministic doubling, no filtering.
    Parallel,
    /// Blocks on k of n modes, loss filter on the rest.
    Partial,
    /// One cascade step on an even-sized W state.
    #[value(name = "odd_add")]
    OddAdd,
    /// Measure one qubit of an even-sized W state in H.
    #[value(name = "odd_project")]
    OddProject,
}

impl SchemeArg {
    fn id(self) -> &'static str {
        match self {
            SchemeArg::Cascade => "cascade",
            SchemeArg::Parallel => "parallel",
            SchemeArg::Partial => "partial",
            SchemeArg::OddAdd => "odd_add",
            SchemeArg::OddProject => "odd_project",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the expansion block on two basis polarizations (H or V).
    Bell {
        /// Ancilla-side polarization.
        a: String,
        /// Input-side polarization; V entangles the pair.
        b: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run one expansion scheme from an ideal W state and report the
    /// success probability and output fidelity.
    Run {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Starting W-state size.
        #[arg(long)]
        n: usize,
        /// Steps (cascade) or block count (partial).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write the artifact here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Embed the serialized output state in the descriptor (json only).
        #[arg(long)]
        emit_state: bool,
        /// Also write the bare output state to this path.
        #[arg(long)]
        state_out: Option<PathBuf>,
        /// Seed for optional measurement sampling of the output state.
        #[arg(long)]
        seed: Option<u64>,
        /// Shots drawn when --seed is given.
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        /// Largest tolerated deviation from the ideal outcome.
        #[arg(long, default_value_t = TOL)]
        tolerance: f64,
    },
    /// Cross-validate closed-form probabilities against simulation for
    /// every scheme family up to --max-n.
    Validate {
        #[arg(long, default_value_t = 6)]
        max_n: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = TOL)]
        tolerance: f64,
    },
    /// Check whether a serialized state is a faithfully doubled W state.
    Verify {
        state_file: PathBuf,
        /// Expected number of modes in the file.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = VERIFY_TOL)]
        tolerance: f64,
    },
    /// Print the gate registry as JSON matrices.
    DumpGates {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// serde_json formatter pinning every float to 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_artifact_json<T: Serialize>(value: &T) -> String {
    let mut bytes = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut bytes, SigDigits);
    value.serialize(&mut ser).expect("artifact serialization");
    bytes.push(b'\n');
    String::from_utf8(bytes).expect("artifacts are utf-8")
}

fn emit(artifact: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, artifact)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{artifact}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn usage(message: impl AsRef<str>) -> ExitCode {
    eprintln!("error: {}", message.as_ref());
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Bell { a, b, format } => cmd_bell(&a, &b, format),
        Command::Run {
            scheme,
            n,
            k,
            format,
            out,
            emit_state,
            state_out,
            seed,
            shots,
            tolerance,
        } => cmd_run(RunConfig {
            scheme,
            n,
            k,
            format,
            out,
            emit_state,
            state_out,
            seed,
            shots,
            tolerance,
        }),
        Command::Validate {
            max_n,
            format,
            out,
            tolerance,
        } => cmd_validate(max_n, format, out.as_deref(), tolerance),
        Command::Verify {
            state_file,
            n,
            tolerance,
        } => cmd_verify(&state_file, n, tolerance),
        Command::DumpGates { out } => cmd_dump_gates(out.as_deref()),
    }
}

#[derive(Serialize)]
struct BellReport {
    input: [String; 2],
    entangled: bool,
    state: PureState,
}

fn cmd_bell(a: &str, b: &str, format: Format) -> ExitCode {
    let (pol_a, pol_b) = match (Polarization::parse(a), Polarization::parse(b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return usage(e.to_string()),
    };
    let mode_a = ModeId::from("1");
    let mode_b = ModeId::from("2");
    let mut state = PureState::basis_state(&[(mode_a.clone(), pol_a), (mode_b.clone(), pol_b)])
        .expect("two fresh modes");
    schemes::expansion_block(&mut state, &mode_a, &mode_b).expect("block on fresh modes");
    let entangled = pol_b == Polarization::V;
    match format {
        Format::Json => {
            let report = BellReport {
                input: [pol_a.to_string(), pol_b.to_string()],
                entangled,
                state,
            };
            print!("{}", to_artifact_json(&report));
        }
        Format::Csv => {
            println!("input: {pol_a} {pol_b}");
            println!("state: {state}");
            println!("entangled: {entangled}");
        }
    }
    ExitCode::SUCCESS
}

struct RunConfig {
    scheme: SchemeArg,
    n: usize,
    k: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
    emit_state: bool,
    state_out: Option<PathBuf>,
    seed: Option<u64>,
    shots: u64,
    tolerance: f64,
}

#[derive(Serialize)]
struct SampleReport {
    seed: u64,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

#[derive(Serialize)]
struct RunReport {
    scheme: &'static str,
    start_n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    target_n: usize,
    success_probability: f64,
    analytic_probability: f64,
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<SampleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<PureState>,
}

/// Total qubits the scheme will hold at its widest.
fn qubits_needed(scheme: SchemeArg, n: usize, k: usize) -> usize {
    match scheme {
        SchemeArg::Cascade | SchemeArg::Partial => n + k,
        SchemeArg::Parallel => 2 * n,
        SchemeArg::OddAdd => n + 1,
        SchemeArg::OddProject => n,
    }
}

/// Closed-form probability the run is expected to reproduce.
fn analytic_probability(scheme: SchemeArg, n: usize, k: usize) -> Result<f64, Error> {
    match scheme {
        SchemeArg::Cascade => {
            let mut product = 1.0;
            for i in n..n + k {
                product *= analysis::p_step(i as u64)?;
            }
            Ok(product)
        }
        SchemeArg::Parallel => Ok(1.0),
        SchemeArg::Partial => analysis::p_partial(n as u64, k as u64),
        SchemeArg::OddAdd => analysis::p_odd_add(n as u64 / 2),
        // P(last mode of ideal W_n reads H) = (n-1)/n.
        SchemeArg::OddProject => Ok((n as f64 - 1.0) / n as f64),
    }
}

fn execute_scheme(scheme: SchemeArg, n: usize, k: usize) -> Result<ExpansionOutcome, Error> {
    let spec = WSpec::numbered(n)?;
    let w = schemes::ideal_w(&spec)?;
    match scheme {
        SchemeArg::Cascade => schemes::cascade_expand(n, k),
        SchemeArg::Parallel => {
            let layout = ParallelLayout::full(&spec);
            schemes::parallel_double(w, &spec, &layout)
        }
        SchemeArg::Partial => {
            let layout = ParallelLayout::leading(&spec, k)?;
            schemes::parallel_partial(w, &spec, &layout)
        }
        SchemeArg::OddAdd => schemes::odd_add_one(w, &spec),
        SchemeArg::OddProject => schemes::odd_project(w, &spec).map(|(outcome, _)| outcome),
    }
}

fn sample_counts(state: &PureState, seed: u64, shots: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let mut draw = rng.random_range(0.0..total);
        let mut picked = weights.len() - 1;
        for (index, w) in weights.iter().enumerate() {
            if draw < *w {
                picked = index;
                break;
            }
            draw -= w;
        }
        let letters: String = (0..state.n_modes())
            .map(|i| Polarization::from_bit(picked >> i).letter())
            .collect();
        *counts.entry(letters).or_insert(0) += 1;
    }
    SampleReport { seed, shots, counts }
}

fn cmd_run(config: RunConfig) -> ExitCode {
    let n = config.n;
    let k = match validate_run_params(&config) {
        Ok(k) => k,
        Err(message) => return usage(message),
    };
    if qubits_needed(config.scheme, n, k) > MAX_QUBITS {
        eprintln!(
            "error: {} qubits exceed the dense-simulation limit of {MAX_QUBITS}",
            qubits_needed(config.scheme, n, k)
        );
        return ExitCode::from(EXIT_RESOURCE);
    }
    let outcome = match execute_scheme(config.scheme, n, k) {
        Ok(outcome) => outcome,
        Err(err @ (Error::TooManyQubits(_) | Error::ResourceBound(_))) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_RESOURCE);
        }
        Err(err) => return usage(err.to_string()),
    };
    let analytic = analytic_probability(config.scheme, n, k).expect("validated parameters");
    let report = RunReport {
        scheme: config.scheme.id(),
        start_n: n,
        k: matches!(config.scheme, SchemeArg::Cascade | SchemeArg::Partial).then_some(k),
        target_n: outcome.target.n(),
        success_probability: outcome.success_probability,
        analytic_probability: analytic,
        fidelity: outcome.fidelity,
        samples: config
            .seed
            .map(|seed| sample_counts(&outcome.state, seed, config.shots)),
        state: config.emit_state.then(|| outcome.state.clone()),
    };
    if let Some(path) = &config.state_out {
        if let Err(message) = emit(&to_artifact_json(&outcome.state), Some(path)) {
            return usage(message);
        }
    }
    let artifact = match config.format {
        Format::Json => to_artifact_json(&report),
        Format::Csv => {
            let mut text = String::from(
                "scheme,start_n,k,target_n,success_probability,analytic_probability,fidelity\n",
            );
            text.push_str(&format!(
                "{},{},{},{},{:.16e},{:.16e},{:.16e}\n",
                report.scheme,
                report.start_n,
                report.k.map_or(String::new(), |k| k.to_string()),
                report.target_n,
                report.success_probability,
                report.analytic_probability,
                report.fidelity
            ));
            text
        }
    };
    if let Err(message) = emit(&artifact, config.out.as_deref()) {
        return usage(message);
    }
    let probability_delta = (outcome.success_probability - analytic).abs();
    if outcome.fidelity < 1.0 - config.tolerance || probability_delta > config.tolerance {
        eprintln!(
            "validation failed: fidelity {} (need >= {}), |p - analytic| = {:e} (tolerance {:e})",
            outcome.fidelity,
            1.0 - config.tolerance,
            probability_delta,
            config.tolerance
        );
        return ExitCode::from(EXIT_VALIDATION);
    }
    ExitCode::SUCCESS
}

/// Checks scheme preconditions up front; returns the effective k.
fn validate_run_params(config: &RunConfig) -> Result<usize, String> {
    let n = config.n;
    if n == 0 {
        return Err("--n must be >= 1".into());
    }
    if config.emit_state && config.format == Format::Csv {
        return Err("--emit-state requires --format json".into());
    }
    match config.scheme {
        SchemeArg::Cascade => {
            let k = config.k.ok_or("cascade needs --k (number of steps)")?;
            if k == 0 {
                return Err("--k must be >= 1".into());
            }
            Ok(k)
        }
        SchemeArg::Partial => {
            let k = config.k.ok_or("partial needs --k (number of blocks)")?;
            if k == 0 || k >= n {
                return Err(format!(
                    "partial needs 1 <= k < n (k = n is the parallel scheme); got k={k}, n={n}"
                ));
            }
            Ok(k)
        }
        SchemeArg::Parallel | SchemeArg::OddAdd | SchemeArg::OddProject => {
            if config.k.is_some() {
                return Err(format!("--k does not apply to {}", config.scheme.id()));
            }
            if matches!(config.scheme, SchemeArg::OddAdd | SchemeArg::OddProject) && !n.is_multiple_of(2) {
                return Err(format!("{} needs an even --n, got {n}", config.scheme.id()));
            }
            if matches!(config.scheme, SchemeArg::OddProject) && n < 2 {
                return Err("odd_project needs --n >= 2".into());
            }
            Ok(0)
        }
    }
}

fn table_to_csv(table: &FormulaTable) -> String {
    let mut text = String::from("scheme,size,analytic,simulated,abs_delta\n");
    for row in &table.rows {
        text.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e}\n",
            row.scheme, row.size, row.analytic, row.simulated, row.abs_delta
        ));
    }
    text
}

fn worker_count() -> Result<usize, String> {
    match std::env::var("WEXPAND_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(workers) if workers >= 1 => Ok(workers),
            _ => Err(format!("WEXPAND_THREADS must be a positive integer, got `{raw}`")),
        },
        Err(std::env::VarError::NotPresent) => Ok(1),
        Err(err) => Err(format!("WEXPAND_THREADS: {err}")),
    }
}

fn cmd_validate(max_n: u64, format: Format, out: Option<&Path>, tolerance: f64) -> ExitCode {
    let workers = match worker_count() {
        Ok(workers) => workers,
        Err(message) => return usage(message),
    };
    let table = match analysis::cross_validate_with_workers(max_n, workers) {
        Ok(table) => table,
        Err(err @ Error::ResourceBound(_)) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_RESOURCE);
        }
        Err(err) => return usage(err.to_string()),
    };
    let artifact = match format {
        Format::Csv => table_to_csv(&table),
        Format::Json => to_artifact_json(&table),
    };
    if let Err(message) = emit(&artifact, out) {
        return usage(message);
    }
    eprintln!(
        "validate: {} rows, max |delta| = {:.3e}",
        table.rows.len(),
        table.max_abs_delta()
    );
    if table.all_within(tolerance) {
        ExitCode::SUCCESS
    } else {
        eprintln!("validation failed: max |delta| exceeds {tolerance:e}");
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn cmd_verify(state_file: &Path, expected_modes: Option<usize>, tolerance: f64) -> ExitCode {
    let text = match std::fs::read_to_string(state_file) {
        Ok(text) => text,
        Err(err) => return usage(format!("cannot read {}: {err}", state_file.display())),
    };
    let state = match PureState::from_json(&text) {
        Ok(state) => state,
        Err(err) => return usage(format!("malformed state file: {err}")),
    };
    let reject = |reason: String| {
        println!("reject");
        eprintln!("verify: {reason}");
        ExitCode::from(EXIT_VALIDATION)
    };
    if let Some(expected) = expected_modes {
        if state.n_modes() != expected {
            return reject(format!(
                "expected {expected} modes, file has {}",
                state.n_modes()
            ));
        }
    }
    let spec = WSpec::new(state.modes().to_vec()).expect("modes validated on load");
    match schemes::verify_back(&state, &spec, tolerance) {
        Ok(true) => {
            println!("accept");
            ExitCode::SUCCESS
        }
        Ok(false) => reject("state is not a faithfully doubled W state".into()),
        Err(err) => reject(err.to_string()),
    }
}

fn cmd_dump_gates(out: Option<&Path>) -> ExitCode {
    let artifact = to_artifact_json(&gates::registry_json());
    match emit(&artifact, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => usage(message),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn artifact_floats_carry_17_significant_digits() {
        #[derive(Serialize)]
        struct Probe {
            x: f64,
        }
        let text = to_artifact_json(&Probe { x: 0.1 });
        assert_eq!(text, "{\"x\":1.0000000000000001e-1}\n");
        let text = to_artifact_json(&Probe { x: 0.75 });
        assert_eq!(text, "{\"x\":7.5000000000000000e-1}\n");
        // Round trip is exact at 17 digits.
        for value in [0.1, 2.0 / 3.0, std::f64::consts::FRAC_1_SQRT_2, 1.0, 5856.5] {
            let text = format!("{value:.16e}");
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), value.to_bits());
        }
    }

    #[test]
    fn analytic_probabilities_match_the_table() {
        assert_eq!(analytic_probability(SchemeArg::Parallel, 3, 0).unwrap(), 1.0);
        let cascade = analytic_probability(SchemeArg::Cascade, 1, 3).unwrap();
        assert!((cascade - 0.5).abs() < TOL);
        let partial = analytic_probability(SchemeArg::Partial, 3, 2).unwrap();
        assert!((partial - 5.0 / 6.0).abs() < TOL);
        let add = analytic_probability(SchemeArg::OddAdd, 4, 0).unwrap();
        assert!((add - 0.625).abs() < TOL);
        let project = analytic_probability(SchemeArg::OddProject, 6, 0).unwrap();
        assert!((project - 5.0 / 6.0).abs() < TOL);
    }

    #[test]
    fn sampling_is_deterministic_and_complete() {
        let spec = WSpec::numbered(3).unwrap();
        let w = schemes::ideal_w(&spec).unwrap();
        let a = sample_counts(&w, 42, 500);
        let b = sample_counts(&w, 42, 500);
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts.values().sum::<u64>(), 500);
        // Only single-V outcomes can ever appear.
        for key in a.counts.keys() {
            assert_eq!(key.chars().filter(|&c| c == 'V').count(), 1);
        }
    }

    #[test]
    fn qubit_budgets_per_scheme() {
        assert_eq!(qubits_needed(SchemeArg::Cascade, 2, 3), 5);
        assert_eq!(qubits_needed(SchemeArg::Parallel, 8, 0), 16);
        assert_eq!(qubits_needed(SchemeArg::Partial, 5, 2), 7);
        assert_eq!(qubits_needed(SchemeArg::OddAdd, 4, 0), 5);
        assert_eq!(qubits_needed(SchemeArg::OddProject, 6, 0), 6);
    }
}
