//! Command-line front end: load tensors, solve, classify, falsify,
//! generate, verify.
//!
//! Exit codes are a stable contract:
//!   0  solved / member path
//!   1  usage or input error
//!   2  certified negative (empty solution set, non-membership witness,
//!      invalid candidate)
//!   3  inconclusive (search exhausted, incomplete enumeration, vi stall)

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tencomp_cli::formats::{load_tensor, tensor_to_canonical_json};
use tencomp_cli::reports;
use tencomp_core::engine::{
    solve_enumerate, solve_vi, verify_solution, SolveMethod, SolveOptions, TcpInstance,
    VerifyOutcome, ViOutcome,
};
use tencomp_core::gen::{self, DiagonalMode, ExampleId, GenKind, GenSpec};
use tencomp_core::monotone::{self, FnProperty, MonotoneOptions};
use tencomp_core::oracles::{self, OracleOptions, Verdict};
use tencomp_core::tensor::Tensor;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_NEGATIVE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tencomp",
    version,
    about = "Tensor complementarity problems: solvers and structured-class oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Residual tolerance on feasibility and complementarity.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Support-enumeration refuses dimensions above this cap.
    #[arg(long, global = true, default_value_t = 16)]
    cap: usize,
    /// Seed for every randomized search (echoed in reports).
    #[arg(long, global = true, default_value_t = 0x5EED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Enumerate,
    Vi,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem (q, A) for one q or a seeded batch.
    Solve {
        tensor: PathBuf,
        /// Right-hand side, comma-separated: --q "-1,-1".
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Batch spec "seed:count"; entries drawn uniform from [-2, 2].
        #[arg(long, value_name = "SEED:COUNT")]
        q_batch: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Run every membership oracle and audit the implication ladder.
    Classify { tensor: PathBuf },
    /// Search for a counterexample to one class or function property.
    Falsify {
        tensor: PathBuf,
        /// Class or property name, e.g. p, r0, strictly-semi-positive,
        /// pseudo-monotone, p0-function.
        #[arg(long)]
        property: String,
        /// Right-hand side for function properties (defaults to zero).
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
    },
    /// Emit a tensor file: a named example or a seeded random draw.
    Gen {
        /// Built-in instance: ex2.1, ex2.2, ex2.3, identity.
        #[arg(long, conflicts_with = "random")]
        example: Option<String>,
        /// Random kind: nonnegative, symmetric, general.
        #[arg(long)]
        random: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        density: Option<f64>,
        /// Diagonal handling for random draws: as-drawn, positive, `zero:<k>`.
        #[arg(long)]
        diagonal: Option<String>,
        /// Generation spec as a JSON file instead of flags.
        #[arg(long, conflicts_with_all = ["example", "random"])]
        spec: Option<PathBuf>,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a candidate solution against the three defining conditions.
    Verify {
        tensor: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let solve_opts = SolveOptions {
        tol_w: cli.tol,
        enumeration_cap: cli.cap,
        seed: cli.seed,
        ..SolveOptions::default()
    };
    let oracle_opts = OracleOptions {
        solve: solve_opts.clone(),
        seed: cli.seed,
        ..OracleOptions::default()
    };
    match cli.command {
        Command::Solve {
            ref tensor,
            ref q,
            ref q_batch,
            method,
        } => {
            let tensor = load(tensor)?;
            cmd_solve(
                &tensor,
                q.as_deref(),
                q_batch.as_deref(),
                method,
                &solve_opts,
                &cli,
            )
        }
        Command::Classify { ref tensor } => {
            let tensor = load(tensor)?;
            cmd_classify(&tensor, &oracle_opts, &cli)
        }
        Command::Falsify {
            ref tensor,
            ref property,
            ref q,
        } => {
            let tensor = load(tensor)?;
            cmd_falsify(&tensor, property, q.as_deref(), &oracle_opts, &cli)
        }
        Command::Gen {
            ref example,
            ref random,
            m,
            n,
            density,
            ref diagonal,
            ref spec,
            ref output,
        } => cmd_gen(
            example.as_deref(),
            random.as_deref(),
            m,
            n,
            density,
            diagonal.as_deref(),
            spec.as_deref(),
            output.as_deref(),
            cli.seed,
        ),
        Command::Verify {
            ref tensor,
            ref q,
            ref x,
        } => {
            let tensor = load(tensor)?;
            cmd_verify(&tensor, q, x, &cli)
        }
    }
}

fn load(path: &Path) -> Result<Tensor, String> {
    load_tensor(path).map_err(|e| e.to_string())
}

fn parse_vector(text: &str, expected: usize, name: &str) -> Result<Vec<f64>, String> {
    let values: Result<Vec<f64>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect();
    let values = values.map_err(|e| format!("--{name} '{text}': {e}"))?;
    if values.len() != expected {
        return Err(format!(
            "--{name} has {} components, tensor dimension is {expected}",
            values.len()
        ));
    }
    Ok(values)
}

/// Writes a report to stdout; a closed pipe downstream is not an error.
fn write_stdout(text: &str) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = lock.write_all(text.as_bytes());
    let _ = lock.flush();
}

fn emit(value: &Value, format: OutputFormat) {
    let mut text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(value).expect("valid json"),
        OutputFormat::Table => {
            let mut rendered = String::new();
            render_table(value, 0, &mut rendered);
            rendered.pop();
            rendered
        }
    };
    text.push('\n');
    write_stdout(&text);
}

/// Key/value rendering for terminals; arrays of scalars stay on one line.
fn render_table(value: &Value, indent: usize, out: &mut String) {
    use std::fmt::Write;
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, inner) in map {
                match inner {
                    Value::Object(_) | Value::Array(_) if !is_scalar_array(inner) => {
                        let _ = writeln!(out, "{pad}{key}:");
                        render_table(inner, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{key}: {}", render_scalar(inner));
                    }
                }
            }
        }
        Value::Array(items) => {
            for (position, inner) in items.iter().enumerate() {
                match inner {
                    Value::Object(_) | Value::Array(_) if !is_scalar_array(inner) => {
                        let _ = writeln!(out, "{pad}[{position}]");
                        render_table(inner, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}- {}", render_scalar(inner));
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", render_scalar(other));
        }
    }
}

fn is_scalar_array(value: &Value) -> bool {
    matches!(value, Value::Array(items)
        if items.iter().all(|v| !matches!(v, Value::Object(_) | Value::Array(_))))
}

fn render_scalar(value: &Value) -> String {
    match value {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render_scalar).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn cmd_solve(
    tensor: &Tensor,
    q: Option<&str>,
    q_batch: Option<&str>,
    method: Method,
    opts: &SolveOptions,
    cli: &Cli,
) -> Result<u8, String> {
    let n = tensor.dim();
    let batch: Vec<Vec<f64>> = match (q, q_batch) {
        (Some(q), None) => vec![parse_vector(q, n, "q")?],
        (None, Some(spec)) => {
            let (seed, count) = parse_batch_spec(spec)?;
            gen::q_batch(n, seed, count)
        }
        (Some(_), Some(_)) => return Err("use either --q or --q-batch, not both".into()),
        (None, None) => return Err("provide --q or --q-batch".into()),
    };
    let use_vi = match method {
        Method::Vi => true,
        Method::Enumerate => false,
        Method::Auto => n > opts.enumeration_cap,
    };
    let mut runs = Vec::new();
    let mut any_solved = false;
    let mut any_empty = false;
    let mut any_inconclusive = false;
    for q in &batch {
        let inst = TcpInstance::new(tensor.clone(), q.clone()).map_err(|e| e.to_string())?;
        let run = if use_vi {
            let outcome = solve_vi(&inst, opts).map_err(|e| e.to_string())?;
            match &outcome {
                ViOutcome::Solved { .. } => any_solved = true,
                _ => any_inconclusive = true,
            }
            json!({ "q": q, "report": reports::vi_outcome_json(&outcome) })
        } else {
            let result = solve_enumerate(&inst, opts).map_err(|e| e.to_string())?;
            let status = if !result.solutions.is_empty() {
                any_solved = true;
                "solved"
            } else if result.complete {
                any_empty = true;
                "certified_empty"
            } else {
                any_inconclusive = true;
                "inconclusive"
            };
            json!({
                "q": q,
                "report": {
                    "status": status,
                    "complete": result.complete,
                    "solutions": result
                        .solutions
                        .iter()
                        .map(|s| reports::solution_json(s, result.complete, SolveMethod::Enumerate))
                        .collect::<Vec<_>>(),
                },
            })
        };
        runs.push(run);
    }
    let report = json!({
        "method": if use_vi { "vi" } else { "enumerate" },
        "seed": cli.seed,
        "runs": runs,
    });
    emit(&report, cli.format);
    // Batch exit: a certified-empty instance is the decisive (negative)
    // outcome, then inconclusive, then solved.
    if any_empty {
        Ok(EXIT_NEGATIVE)
    } else if any_inconclusive {
        Ok(EXIT_INCONCLUSIVE)
    } else if any_solved {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_INCONCLUSIVE)
    }
}

fn parse_batch_spec(spec: &str) -> Result<(u64, usize), String> {
    let (seed, count) = spec
        .split_once(':')
        .ok_or_else(|| format!("--q-batch '{spec}': expected SEED:COUNT"))?;
    let seed = seed
        .trim()
        .parse::<u64>()
        .map_err(|e| format!("--q-batch seed: {e}"))?;
    let count = count
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("--q-batch count: {e}"))?;
    if count == 0 {
        return Err("--q-batch count must be at least 1".into());
    }
    Ok((seed, count))
}

fn cmd_classify(tensor: &Tensor, opts: &OracleOptions, cli: &Cli) -> Result<u8, String> {
    let report = oracles::classify_all(tensor, opts);
    let value = reports::class_report_json(tensor, &report);
    emit(&value, cli.format);
    if report.ladder_violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        // Internal inconsistency; surfaced loudly.
        Ok(EXIT_INCONCLUSIVE)
    }
}

fn cmd_falsify(
    tensor: &Tensor,
    property: &str,
    q: Option<&str>,
    opts: &OracleOptions,
    cli: &Cli,
) -> Result<u8, String> {
    let normalized = property.replace('-', "_");
    let verdict = if let Some(fn_property) = FnProperty::parse(&normalized) {
        let n = tensor.dim();
        let q = match q {
            Some(text) => parse_vector(text, n, "q")?,
            None => vec![0.0; n],
        };
        let inst = TcpInstance::new(tensor.clone(), q).map_err(|e| e.to_string())?;
        let mono_opts = MonotoneOptions {
            seed: cli.seed,
            ..MonotoneOptions::default()
        };
        monotone::falsify(&inst, fn_property, &mono_opts)
    } else {
        match normalized.as_str() {
            "p" => oracles::falsify_p(tensor, opts),
            "p0" => oracles::falsify_p0(tensor, opts),
            "semi_positive" => oracles::falsify_semi_positive(tensor, opts),
            "strictly_semi_positive" => oracles::falsify_strictly_semi_positive(tensor, opts),
            "copositive" => {
                oracles::check_copositive(tensor, false, opts).map_err(|e| e.to_string())?
            }
            "strictly_copositive" => {
                oracles::check_copositive(tensor, true, opts).map_err(|e| e.to_string())?
            }
            "r0" => oracles::check_r0(tensor, opts).map_err(|e| e.to_string())?,
            "r" => oracles::check_r(tensor, opts).map_err(|e| e.to_string())?,
            "q" => oracles::check_q(tensor, opts),
            other => return Err(format!("unknown property '{other}'")),
        }
    };
    let value = json!({
        "seed": cli.seed,
        "verdict": reports::verdict_json(&verdict),
    });
    emit(&value, cli.format);
    Ok(match verdict.verdict {
        Verdict::Member => EXIT_OK,
        Verdict::NonMember => EXIT_NEGATIVE,
        Verdict::NoCounterexampleFound => EXIT_INCONCLUSIVE,
    })
}

/// JSON form of a generation spec, accepted via `gen --spec`.
#[derive(serde::Deserialize)]
struct GenSpecFile {
    kind: String,
    order: usize,
    dim: usize,
    seed: Option<u64>,
    density: Option<f64>,
    diagonal: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    example: Option<&str>,
    random: Option<&str>,
    m: Option<usize>,
    n: Option<usize>,
    density: Option<f64>,
    diagonal: Option<&str>,
    spec_path: Option<&Path>,
    output: Option<&Path>,
    seed: u64,
) -> Result<u8, String> {
    let mut seed = seed;
    let tensor = match (example, random, spec_path) {
        (Some(name), None, None) => {
            let id = ExampleId::parse(name, m, n).map_err(|e| e.to_string())?;
            gen::example(&id).map_err(|e| e.to_string())?
        }
        (None, Some(kind), None) => {
            let order = m.ok_or("--random needs --m")?;
            let dim = n.ok_or("--random needs --n")?;
            let mut spec = GenSpec::new(parse_kind(kind)?, order, dim, seed);
            if let Some(density) = density {
                spec = spec.with_density(density);
            }
            if let Some(diagonal) = diagonal {
                spec = spec.with_diagonal(parse_diagonal(diagonal)?);
            }
            gen::random(&spec).map_err(|e| e.to_string())?
        }
        (None, None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let file: GenSpecFile =
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            seed = file.seed.unwrap_or(seed);
            let mut spec = GenSpec::new(parse_kind(&file.kind)?, file.order, file.dim, seed);
            if let Some(density) = file.density {
                spec = spec.with_density(density);
            }
            if let Some(diagonal) = &file.diagonal {
                spec = spec.with_diagonal(parse_diagonal(diagonal)?);
            }
            gen::random(&spec).map_err(|e| e.to_string())?
        }
        _ => return Err("provide exactly one of --example, --random, or --spec".into()),
    };
    let text = tensor_to_canonical_json(&tensor);
    match output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            let note = json!({
                "path": path.display().to_string(),
                "entries": tensor.nnz(),
                "order": tensor.order(),
                "dim": tensor.dim(),
                "seed": seed,
            });
            let mut shown = serde_json::to_string_pretty(&note).expect("valid json");
            shown.push('\n');
            write_stdout(&shown);
        }
        None => {
            write_stdout(&text);
            eprintln!("seed: {seed}");
        }
    }
    Ok(EXIT_OK)
}

fn parse_kind(text: &str) -> Result<GenKind, String> {
    match text {
        "nonnegative" => Ok(GenKind::Nonnegative),
        "symmetric" => Ok(GenKind::Symmetric),
        "general" => Ok(GenKind::General),
        other => Err(format!("unknown random kind '{other}'")),
    }
}

fn parse_diagonal(text: &str) -> Result<DiagonalMode, String> {
    match text {
        "as-drawn" => Ok(DiagonalMode::AsDrawn),
        "positive" => Ok(DiagonalMode::ForcePositive),
        other => match other.strip_prefix("zero:") {
            Some(index) => {
                let index: usize = index
                    .parse()
                    .map_err(|e| format!("--diagonal '{other}': {e}"))?;
                if index == 0 {
                    return Err("--diagonal zero:<k> is 1-based".into());
                }
                Ok(DiagonalMode::ForceZeroAt(index - 1))
            }
            None => Err(format!("unknown diagonal mode '{other}'")),
        },
    }
}

fn cmd_verify(tensor: &Tensor, q: &str, x: &str, cli: &Cli) -> Result<u8, String> {
    let n = tensor.dim();
    let q = parse_vector(q, n, "q")?;
    let x = parse_vector(x, n, "x")?;
    let inst = TcpInstance::new(tensor.clone(), q).map_err(|e| e.to_string())?;
    let outcome = verify_solution(&inst, &x, cli.tol).map_err(|e| e.to_string())?;
    match outcome {
        VerifyOutcome::Valid(solution) => {
            let value = json!({
                "valid": true,
                "x": solution.x,
                "w": solution.w,
                "support": solution.support.iter().map(|&i| i + 1).collect::<Vec<_>>(),
                "residuals": {
                    "min_x": solution.residuals.min_x,
                    "min_w": solution.residuals.min_w,
                    "comp": solution.residuals.comp,
                },
            });
            emit(&value, cli.format);
            Ok(EXIT_OK)
        }
        VerifyOutcome::Invalid(violation) => {
            let value = json!({ "valid": false, "violation": reports::violation_json(&violation) });
            emit(&value, cli.format);
            Ok(EXIT_NEGATIVE)
        }
    }
}
