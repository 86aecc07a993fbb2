//! Command-line front end: metric validation, reproduction of the worked
//! two-qubit example, λ sweeps, signalling certification, and nonlinearity
//! and axiom diagnostics.
//!
//! Exit codes: 0 success, 1 invalid metric / failed check, 2 argument or
//! parse error, 3 signalling witness found (a result, not a failure).

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use metricqm::dynamics::{convexity_defect, UnitaryGate};
use metricqm::error::Error;
use metricqm::linalg::ComplexMatrix;
use metricqm::metric::{bloch_decomposition, parse_metric_source, verify_axioms, MetricOperator};
use metricqm::protocol::{
    certify, run_protocol, sweep_lambda, sweep_to_csv, ProtocolConfig, CERTIFY_THRESHOLD,
};
use metricqm::states::{check_trace_condition, paper_ensemble, BasisName, MeasurementProjector};

#[derive(Parser)]
#[command(name = "metricqm", version, about = "Quantum simulation under a metric-deformed inner product")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a metric operator candidate
    Validate {
        /// Metric source: `diag:a,b,...` or a matrix JSON file path
        #[arg(long)]
        metric: String,
    },
    /// Reproduce the two-qubit worked example at a given λ
    ReproducePaper {
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the protocol over a λ grid with A = diag(1, λ)
    Sweep {
        /// Comma-separated λ values
        #[arg(long)]
        lambdas: String,
        /// Alice's unitary: H, X, Z, I, rot:z:<θ>, rot:y:<θ>, or a matrix JSON path
        #[arg(long, default_value = "H")]
        unitary: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for a signalling witness for the given metric
    Certify {
        #[arg(long)]
        metric: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convexity defect of the paper's two ensembles under the given metric
    Nonlinearity {
        #[arg(long)]
        metric: String,
        #[arg(long, default_value = "H")]
        unitary: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampled verification of the three inner-product axioms
    Axioms {
        #[arg(long)]
        metric: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// `--seed` wins; METRICQM_SEED applies only when the flag is absent.
fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("METRICQM_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

fn emit(output: &OutputArgs, text: String) -> metricqm::Result<()> {
    match &output.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_unitary(source: &str) -> metricqm::Result<UnitaryGate> {
    match UnitaryGate::by_name(source) {
        Err(Error::UnknownUnitary(_)) => {
            let text = std::fs::read_to_string(source)?;
            let matrix: ComplexMatrix = serde_json::from_str(&text)?;
            UnitaryGate::new(matrix, source)
        }
        other => other,
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NotHermitian { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::NegativeEigenvalue { .. } => 1,
        _ => 2,
    }
}

fn cmd_validate(metric: &str) -> metricqm::Result<u8> {
    let candidate: Result<ComplexMatrix, Error> = if metric.starts_with("diag:") {
        parse_metric_source(metric).map(|m| m.matrix().clone())
    } else {
        let text = std::fs::read_to_string(metric)?;
        serde_json::from_str(&text).map_err(Error::from)
    };
    let candidate = candidate?;
    println!("dim: {}", candidate.dim());
    println!("hermiticity deviation: {:.3e}", candidate.hermiticity_deviation());
    match MetricOperator::validate(candidate) {
        Ok(a) => {
            let eigs: Vec<String> = a.eigen().eigenvalues.iter().map(|l| format!("{l:.12}")).collect();
            println!("eigenvalues: [{}]", eigs.join(", "));
            println!("verdict: valid metric (min eigenvalue {:.12})", a.min_eigenvalue());
            if a.dim() == 2 {
                let (a0, v) = bloch_decomposition(&a)?;
                println!("bloch decomposition: a0 = {a0:.12}, a_vec = [{:.12}, {:.12}, {:.12}]", v[0], v[1], v[2]);
            }
            Ok(0)
        }
        Err(e) => {
            println!("verdict: INVALID — {e}");
            Ok(1)
        }
    }
}

struct PaperQuantity {
    name: &'static str,
    computed: f64,
    expected: f64,
}

fn cmd_reproduce_paper(lambda: f64, output: &OutputArgs) -> metricqm::Result<u8> {
    if lambda <= 0.0 {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let a = MetricOperator::diag_lambda(lambda)?;
    let cfg = ProtocolConfig::paper_example(a.clone());
    let outcome = run_protocol(&cfg)?;
    let rho_z = &outcome.per_basis[0].final_density;
    let rho_x = &outcome.per_basis[1].final_density;

    let e_z = paper_ensemble(BasisName::Computational, &a)?;
    let e_x = paper_ensemble(BasisName::Diagonal, &a)?;
    let defect = convexity_defect(&e_z, &e_x, &cfg.alice_unitary, &a)?;

    let expected_defect = {
        // trace distance of I/(1+λ) and diag(1/2, 1/(2λ))
        let d1 = (1.0 / (1.0 + lambda) - 0.5).abs();
        let d2 = (1.0 / (1.0 + lambda) - 0.5 / lambda).abs();
        0.5 * (d1 + d2)
    };

    let quantities = vec![
        PaperQuantity {
            name: "rho_Z[0][0]",
            computed: rho_z.matrix().get(0, 0).re,
            expected: 1.0 / (1.0 + lambda),
        },
        PaperQuantity {
            name: "rho_Z[1][1]",
            computed: rho_z.matrix().get(1, 1).re,
            expected: 1.0 / (1.0 + lambda),
        },
        PaperQuantity {
            name: "rho_X[0][0]",
            computed: rho_x.matrix().get(0, 0).re,
            expected: 0.5,
        },
        PaperQuantity {
            name: "rho_X[1][1]",
            computed: rho_x.matrix().get(1, 1).re,
            expected: 0.5 / lambda,
        },
        PaperQuantity {
            name: "P_Z(0)",
            computed: outcome.per_basis[0].probability,
            expected: 1.0 / (1.0 + lambda),
        },
        PaperQuantity {
            name: "P_X(0)",
            computed: outcome.per_basis[1].probability,
            expected: 0.5,
        },
        PaperQuantity {
            name: "Tr(A rho_Z)",
            computed: check_trace_condition(rho_z, &a)?.0,
            expected: 1.0,
        },
        PaperQuantity {
            name: "Tr(A rho_X)",
            computed: check_trace_condition(rho_x, &a)?.0,
            expected: 1.0,
        },
        PaperQuantity {
            name: "probability gap",
            computed: outcome.probability_gap,
            expected: (1.0 - lambda).abs() / (2.0 * (1.0 + lambda)),
        },
        PaperQuantity {
            name: "nonlinearity defect",
            computed: defect,
            expected: expected_defect,
        },
    ];

    let text = match output.format {
        Format::Text => {
            let mut s = format!("two-qubit example at lambda = {lambda}\n");
            s.push_str(&format!("{:<22} {:>24} {:>24} {:>12}\n", "quantity", "computed", "expected", "|deviation|"));
            for q in &quantities {
                s.push_str(&format!(
                    "{:<22} {:>24.17} {:>24.17} {:>12.3e}\n",
                    q.name,
                    q.computed,
                    q.expected,
                    (q.computed - q.expected).abs()
                ));
            }
            s.push_str(&format!(
                "signalling magnitude: {:.17} (verdict: {})\n",
                outcome.signalling_magnitude,
                if outcome.signalling { "signalling" } else { "no-signalling" }
            ));
            s
        }
        Format::Json => {
            let entries: Vec<_> = quantities
                .iter()
                .map(|q| {
                    json!({
                        "name": q.name,
                        "computed": q.computed,
                        "expected": q.expected,
                        "deviation": (q.computed - q.expected).abs(),
                    })
                })
                .collect();
            let doc = json!({
                "lambda": lambda,
                "quantities": entries,
                "signalling_magnitude": outcome.signalling_magnitude,
                "signalling": outcome.signalling,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
        Format::Csv => {
            let mut s = String::from("quantity,computed,expected,deviation\n");
            for q in &quantities {
                s.push_str(&format!(
                    "{},{:.16e},{:.16e},{:.16e}\n",
                    q.name,
                    q.computed,
                    q.expected,
                    (q.computed - q.expected).abs()
                ));
            }
            s
        }
    };
    emit(output, text)?;
    Ok(0)
}

fn cmd_sweep(lambdas: &str, unitary: &str, output: &OutputArgs) -> metricqm::Result<u8> {
    let lambdas: Vec<f64> = lambdas
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad lambda '{s}': {e}"))))
        .collect::<metricqm::Result<_>>()?;
    let u = parse_unitary(unitary)?;
    let rows = sweep_lambda(&lambdas, &u, &MeasurementProjector::zero_projector())?;
    let text = match output.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows)?),
        // text and csv share the CSV table; it is already human-readable
        Format::Csv | Format::Text => sweep_to_csv(&rows),
    };
    emit(output, text)?;
    Ok(0)
}

fn cmd_certify(metric: &str, trials: usize, seed: Option<u64>, output: &OutputArgs) -> metricqm::Result<u8> {
    let a = parse_metric_source(metric)?;
    let seed = resolve_seed(seed);
    let cert = certify(&a, trials, seed, CERTIFY_THRESHOLD)?;
    let text = match output.format {
        Format::Text => {
            let mut s = format!(
                "certify: trials {}/{}, seed {}, threshold {:.1e}\n",
                cert.trials_used, cert.trials_requested, cert.seed, cert.threshold
            );
            if let Some(c) = cert.scalar_metric {
                s.push_str(&format!("metric is {c} * I (scalar; treated as non-signalling)\n"));
            }
            match &cert.witness {
                Some(w) => s.push_str(&format!(
                    "witness FOUND: unitary {}, bases ({}, {}), gap {:.12}, magnitude {:.12}\n",
                    w.unitary_label,
                    w.basis_pair.0.label(),
                    w.basis_pair.1.label(),
                    w.probability_gap,
                    w.signalling_magnitude
                )),
                None => s.push_str("no witness found\n"),
            }
            s
        }
        _ => format!("{}\n", serde_json::to_string_pretty(&cert)?),
    };
    emit(output, text)?;
    Ok(if cert.found { 3 } else { 0 })
}

fn cmd_nonlinearity(metric: &str, unitary: &str, output: &OutputArgs) -> metricqm::Result<u8> {
    let a = parse_metric_source(metric)?;
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: a.dim() });
    }
    let u = parse_unitary(unitary)?;
    let e_z = paper_ensemble(BasisName::Computational, &a)?;
    let e_x = paper_ensemble(BasisName::Diagonal, &a)?;
    let defect = convexity_defect(&e_z, &e_x, &u, &a)?;
    let text = match output.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({"unitary": u.label(), "defect": defect}))?
        ),
        _ => format!("convexity defect (E_Z vs E_X, unitary {}): {:.17}\n", u.label(), defect),
    };
    emit(output, text)?;
    Ok(0)
}

fn cmd_axioms(metric: &str, samples: usize, seed: Option<u64>, output: &OutputArgs) -> metricqm::Result<u8> {
    let a = parse_metric_source(metric)?;
    let seed = resolve_seed(seed);
    let report = verify_axioms(&a, samples, seed);
    let text = match output.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "conjugate_symmetry_max_violation": report.conjugate_symmetry_max_violation,
                "linearity_max_violation": report.linearity_max_violation,
                "positive_definiteness_min_value": report.positive_definiteness_min_value,
                "samples_used": report.samples_used,
                "seed": report.seed,
                "verdict": if report.verdict { "pass" } else { "fail" },
            }))?
        ),
        _ => format!(
            "axiom check over {} samples (seed {}):\n  conjugate symmetry max violation: {:.3e}\n  linearity max violation: {:.3e}\n  positive definiteness min value: {:.6e}\n  verdict: {}\n",
            report.samples_used,
            report.seed,
            report.conjugate_symmetry_max_violation,
            report.linearity_max_violation,
            report.positive_definiteness_min_value,
            if report.verdict { "pass" } else { "fail" }
        ),
    };
    emit(output, text)?;
    Ok(if report.verdict { 0 } else { 1 })
}

fn run(cli: Cli) -> metricqm::Result<u8> {
    match &cli.command {
        Command::Validate { metric } => cmd_validate(metric),
        Command::ReproducePaper { lambda, output } => cmd_reproduce_paper(*lambda, output),
        Command::Sweep { lambdas, unitary, output } => cmd_sweep(lambdas, unitary, output),
        Command::Certify { metric, trials, seed, output } => cmd_certify(metric, *trials, *seed, output),
        Command::Nonlinearity { metric, unitary, output } => cmd_nonlinearity(metric, unitary, output),
        Command::Axioms { metric, samples, seed, output } => cmd_axioms(metric, *samples, *seed, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
