//! Batch command-line surface over the spacelike-core library.
//!
//! Exit codes: 0 when the checked condition holds (or the unitary
//! factorizes), 1 when a violation is found, 2 on usage or input errors.
//! Every run is fully determined by (command, config, seed): the same
//! invocation produces byte-identical stdout and output files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spacelike_core::field::dirac::{fermion_measurability_demo, Measurability};
use spacelike_core::field::{
    bracket_sign_table, c_number_scan, interval_type, operator_bracket_scan, FieldClass,
    FieldModel, IntervalType, SpacetimePoint, Statistics,
};
use spacelike_core::nosignal::{
    check_c_sampled, check_mc_analytic, check_mc_sampled, factorize_unitary, FactorizationResult,
    McVerdict, SampledVerdict, ANALYTIC_TOL, SAMPLED_TOL,
};
use spacelike_core::report::{
    format_operator_text, parse_operator_text, scan_csv, signal_csv, ProtocolFile, VerdictReport,
};
use spacelike_core::signal::simulate_protocol;
use spacelike_core::BipartiteDims;

#[derive(Parser)]
#[command(
    name = "spacelike",
    version,
    about = "No-signalling, unitary factorization, and microcausality checks"
)]
struct Cli {
    /// Worker thread cap. All current computations are single-threaded;
    /// the flag is validated (must be >= 1) and reserved.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckMode {
    McAnalytic,
    McSampled,
    CSampled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StatisticsArg {
    Bose,
    Fermi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FieldClassArg {
    ScalarLike,
    DiracLike,
}

#[derive(Subcommand)]
enum Command {
    /// Factorize a bipartite unitary into a tensor product, or report the
    /// dilation-criterion witness that obstructs it.
    Factorize {
        /// Operator text file ("dim N" header, row-major re/im pairs).
        input: PathBuf,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        /// Reconstruction tolerance, scaled by sqrt(d1*d2).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a no-signalling condition on a bipartite unitary.
    Check {
        input: PathBuf,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        #[arg(long, value_enum)]
        mode: CheckMode,
        /// Random (state, operation) pairs for the sampled modes.
        #[arg(long, default_value_t = 100)]
        n_samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Deviation tolerance; defaults depend on the mode.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a two-branch signalling protocol from a TOML description.
    Signal {
        protocol: PathBuf,
        /// Override the shot count from the protocol file.
        #[arg(long)]
        shots: Option<u64>,
        /// Override the seed from the protocol file.
        #[arg(long)]
        seed: Option<u64>,
        /// Exact-TV threshold separating "no signalling" (exit 0) from
        /// "signalling demonstrated" (exit 1).
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the outcome-distribution CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the field bracket over a grid of separations from the origin.
    FieldScan {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 40.0)]
        box_length: f64,
        #[arg(long, default_value_t = 2000)]
        n_max: i64,
        #[arg(long, value_enum, default_value_t = StatisticsArg::Bose)]
        statistics: StatisticsArg,
        #[arg(long, value_enum, default_value_t = FieldClassArg::ScalarLike)]
        field_class: FieldClassArg,
        #[arg(long, default_value_t = 2)]
        occupation_cutoff: u8,
        /// Time separation shared by all grid points.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 0.5)]
        x_min: f64,
        #[arg(long, default_value_t = 3.0)]
        x_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Also verify the bracket at operator level on the truncated Fock
        /// space (ScalarLike only; keep n_max small).
        #[arg(long)]
        operator: bool,
        /// Microcausality threshold on the spacelike c-number bracket.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Write the scan CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hermitian-fermion measurability demonstration at a pair of points.
    FermionDemo {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 8.0)]
        box_length: f64,
        #[arg(long, default_value_t = 8)]
        n_max: i64,
        #[arg(long, default_value_t = 0.0)]
        t1: f64,
        #[arg(long, default_value_t = 0.0)]
        x1: f64,
        #[arg(long, default_value_t = 0.0)]
        t2: f64,
        #[arg(long, default_value_t = 2.0)]
        x2: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the four-case commutator/anticommutator sign table.
    PauliJordan {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        eprintln!("error: --threads must be >= 1");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    if let Some(path) = out {
        std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Factorize {
            input,
            d1,
            d2,
            tol,
            out,
        } => {
            let u = parse_operator_text(&read_file(&input)?).map_err(|e| e.to_string())?;
            let dims = BipartiteDims::new(d1, d2).map_err(|e| e.to_string())?;
            let result = factorize_unitary(&u, dims, tol).map_err(|e| e.to_string())?;
            let (report, code, factors) = match &result {
                FactorizationResult::Product {
                    u1,
                    u2,
                    phase,
                    reconstruction_error,
                } => (
                    VerdictReport {
                        operation: "factorize".into(),
                        dims: Some((d1, d2)),
                        verdict: "Product".into(),
                        witness: Some(format!("global phase {phase:.12e}")),
                        residual: Some(*reconstruction_error),
                        tolerance: tol,
                        seed: None,
                    },
                    0,
                    Some(format!(
                        "# factor U1\n{}# factor U2\n{}",
                        format_operator_text(u1),
                        format_operator_text(u2)
                    )),
                ),
                FactorizationResult::NotProduct { witness, residual } => (
                    VerdictReport {
                        operation: "factorize".into(),
                        dims: Some((d1, d2)),
                        verdict: "NotProduct".into(),
                        witness: Some(format!(
                            "lambda residual at (k, k', l, l') = {witness:?}"
                        )),
                        residual: Some(*residual),
                        tolerance: tol,
                        seed: None,
                    },
                    1,
                    None,
                ),
            };
            let mut text = report.to_json();
            text.push('\n');
            if let Some(factors) = factors {
                text.push_str(&factors);
            }
            print!("{text}");
            write_out(&out, &text)?;
            Ok(code)
        }
        Command::Check {
            input,
            d1,
            d2,
            mode,
            n_samples,
            seed,
            tol,
            out,
        } => {
            let u = parse_operator_text(&read_file(&input)?).map_err(|e| e.to_string())?;
            let dims = BipartiteDims::new(d1, d2).map_err(|e| e.to_string())?;
            let (name, verdict, witness, residual, tolerance, used_seed) = match mode {
                CheckMode::McAnalytic => {
                    let tolerance = tol.unwrap_or(ANALYTIC_TOL);
                    match check_mc_analytic(&u, dims, tolerance).map_err(|e| e.to_string())? {
                        McVerdict::Holds { max_residual } => (
                            "check mc-analytic",
                            true,
                            None,
                            max_residual,
                            tolerance,
                            None,
                        ),
                        McVerdict::Violated { witness, residual } => (
                            "check mc-analytic",
                            false,
                            Some(format!(
                                "lambda residual at (k, k', l, l') = {witness:?}"
                            )),
                            residual,
                            tolerance,
                            None,
                        ),
                    }
                }
                CheckMode::McSampled | CheckMode::CSampled => {
                    let tolerance = tol.unwrap_or(SAMPLED_TOL);
                    let (name, v) = match mode {
                        CheckMode::McSampled => (
                            "check mc-sampled",
                            check_mc_sampled(&u, dims, n_samples, seed, tolerance),
                        ),
                        _ => (
                            "check c-sampled",
                            check_c_sampled(&u, dims, &[], &[], n_samples, seed, tolerance),
                        ),
                    };
                    match v.map_err(|e| e.to_string())? {
                        SampledVerdict::Holds { max_deviation } => {
                            (name, true, None, max_deviation, tolerance, Some(seed))
                        }
                        SampledVerdict::Violated {
                            sample, deviation, ..
                        } => (
                            name,
                            false,
                            Some(format!("sample index {sample}")),
                            deviation,
                            tolerance,
                            Some(seed),
                        ),
                    }
                }
            };
            let report = VerdictReport {
                operation: name.into(),
                dims: Some((d1, d2)),
                verdict: if verdict { "Holds" } else { "Violated" }.into(),
                witness,
                residual: Some(residual),
                tolerance,
                seed: used_seed,
            };
            let mut text = report.to_json();
            text.push('\n');
            print!("{text}");
            write_out(&out, &text)?;
            Ok(if verdict { 0 } else { 1 })
        }
        Command::Signal {
            protocol,
            shots,
            seed,
            tol,
            out,
        } => {
            let mut file =
                ProtocolFile::parse(&read_file(&protocol)?).map_err(|e| e.to_string())?;
            if let Some(shots) = shots {
                file.shots = shots;
            }
            if let Some(seed) = seed {
                file.seed = seed;
            }
            let spec = file.into_spec().map_err(|e| e.to_string())?;
            let report = simulate_protocol(&spec).map_err(|e| e.to_string())?;
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            let csv = signal_csv(&report.bob_dist_no_measure, &report.bob_dist_measure);
            print!("{json}\n{csv}");
            write_out(&out, &csv)?;
            // Exit 1 is the interesting outcome here: the protocol transmits
            // a signal, which is what the benchmark is built to demonstrate.
            Ok(if report.tv_exact > tol { 1 } else { 0 })
        }
        Command::FieldScan {
            mass,
            box_length,
            n_max,
            statistics,
            field_class,
            occupation_cutoff,
            t,
            x_min,
            x_max,
            points,
            operator,
            tol,
            out,
        } => {
            let statistics = match statistics {
                StatisticsArg::Bose => Statistics::Bose,
                StatisticsArg::Fermi => Statistics::Fermi,
            };
            let field_class = match field_class {
                FieldClassArg::ScalarLike => FieldClass::ScalarLike,
                FieldClassArg::DiracLike => FieldClass::DiracLike,
            };
            let model = FieldModel::new(
                mass,
                box_length,
                n_max,
                statistics,
                field_class,
                occupation_cutoff,
            )
            .map_err(|e| e.to_string())?;
            if points < 1 {
                return Err("points must be >= 1".into());
            }
            let grid: Vec<SpacetimePoint> = (0..points)
                .map(|i| {
                    let frac = if points == 1 {
                        0.0
                    } else {
                        i as f64 / (points - 1) as f64
                    };
                    SpacetimePoint::new(t, x_min + frac * (x_max - x_min))
                })
                .collect();
            let scan = if operator {
                operator_bracket_scan(&model, &grid).map_err(|e| e.to_string())?
            } else {
                c_number_scan(&model, &grid)
            };
            let spacelike_max = grid
                .iter()
                .zip(&scan.records)
                .filter(|(sep, _)| interval_type(sep) == IntervalType::Spacelike)
                .map(|(_, r)| r.c_number_bracket.norm())
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
            let spacelike_max = spacelike_max
                .ok_or_else(|| "grid contains no spacelike separations".to_string())?;
            let holds = spacelike_max <= tol;
            let verdict = if holds {
                format!(
                    "# microcausality holds: max spacelike |bracket| = {spacelike_max:.12e} <= {tol:.12e}\n"
                )
            } else {
                format!(
                    "# microcausality violated: max spacelike |bracket| = {spacelike_max:.12e} > {tol:.12e}\n"
                )
            };
            let csv = scan_csv(&scan);
            print!("{verdict}{csv}");
            write_out(&out, &csv)?;
            Ok(if holds { 0 } else { 1 })
        }
        Command::FermionDemo {
            mass,
            box_length,
            n_max,
            t1,
            x1,
            t2,
            x2,
            out,
        } => {
            let model = FieldModel::new(
                mass,
                box_length,
                n_max,
                Statistics::Fermi,
                FieldClass::DiracLike,
                1,
            )
            .map_err(|e| e.to_string())?;
            let a = SpacetimePoint::new(t1, x1);
            let b = SpacetimePoint::new(t2, x2);
            let demo = fermion_measurability_demo(&model, &a, &b).map_err(|e| e.to_string())?;
            let verdict = match demo.verdict {
                Measurability::NotMeasurable => "NotMeasurable",
                Measurability::Inconclusive => "Inconclusive",
            };
            let json = serde_json::to_string_pretty(&serde_json::json!({
                "operation": "fermion-demo",
                "anticomm_norm": demo.anticomm_norm,
                "comm_norm": demo.comm_norm,
                "product_norm": demo.product_norm,
                "verdict": verdict,
            }))
            .map_err(|e| e.to_string())?;
            let text = format!("{json}\n");
            print!("{text}");
            write_out(&out, &text)?;
            Ok(match demo.verdict {
                Measurability::NotMeasurable => 0,
                Measurability::Inconclusive => 1,
            })
        }
        Command::PauliJordan { out } => {
            let mut csv =
                String::from("field_class,statistics,bracket,relative_sign,vanishes_spacelike\n");
            for row in bracket_sign_table() {
                csv.push_str(&format!(
                    "{:?},{:?},{},{},{}\n",
                    row.field_class,
                    row.statistics,
                    row.bracket,
                    row.relative_sign,
                    row.vanishes_spacelike
                ));
            }
            print!("{csv}");
            write_out(&out, &csv)?;
            Ok(0)
        }
    }
}
