//! Command-line front end: solve instances, check allocations, generate
//! test instances, and run benchmark suites.
//!
//! Exit codes: 0 success, 1 I/O, 2 parse/validation, 3 budget exceeded,
//! 4 incompatible method/profile.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nash_welfare::envy::wwef1_violations;
use nash_welfare::error::Error;
use nash_welfare::gen::{generate, GenConfig, Kind};
use nash_welfare::io::{parse_allocation, parse_instance, serialize_allocation, serialize_instance};
use nash_welfare::oracle::{brute_force_optimum, Objective};
use nash_welfare::rat::{format_rational, parse_rational, Rat};
use nash_welfare::repair::{repair_output, Transfer};
use nash_welfare::solver::{solve, Method, SolveOptions, SolveReport};
use nash_welfare::welfare::{nash_welfare, p_mean_welfare, PExponent, WelfareValue};
use nash_welfare::{Allocation, Instance};

#[derive(Parser)]
#[command(name = "nashwelfare", version, about = "Nash and p-mean welfare solvers for indivisible goods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print an allocation report as JSON.
    Solve(SolveArgs),
    /// Evaluate an allocation against an instance.
    Check(CheckArgs),
    /// Generate a deterministic instance.
    Gen(GenArgs),
    /// Run a benchmark suite and print a CSV table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// auto, ptas, pmean, kary, two-valuable, fptas or oracle.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Approximation parameter in (0,1); exact decimals are honored.
    #[arg(long, default_value = "0.5")]
    epsilon: String,
    /// Override the rounding precision λ (even integer >= 2).
    #[arg(long)]
    lambda: Option<u64>,
    /// p-mean exponent for --method pmean: a rational or "-inf".
    #[arg(long)]
    p: Option<String>,
    /// Apply the wwEF1 repair to the solver output.
    #[arg(long)]
    repair: bool,
    /// State/enumeration budget for oracle, kary and fptas.
    #[arg(long, default_value_t = 10_000_000u128)]
    budget: u128,
    /// Write the resulting allocation JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    instance: PathBuf,
    allocation: PathBuf,
    /// p-mean exponent to evaluate instead of Nash welfare.
    #[arg(long)]
    p: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    /// identical, kary, two-valuable or additive.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    value_max: u64,
    /// Distinct positive values for --kind kary.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite JSON: an array of rows {instance, method, epsilon?, lambda?,
    /// p?, repair?}.
    suite: PathBuf,
    /// Budget for oracle reference solutions; rows whose search space
    /// exceeds it leave the oracle columns empty.
    #[arg(long, default_value_t = 10_000_000u128)]
    budget: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

enum CliError {
    Io(std::io::Error),
    Lib(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Io(_) => 1,
        CliError::Lib(Error::Budget { .. }) => 3,
        CliError::Lib(Error::Unsupported(_)) => 4,
        CliError::Lib(_) => 2,
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(CliError::Io)
}

fn parse_epsilon(text: &str) -> Result<Rat, CliError> {
    parse_rational(text)
        .ok_or_else(|| CliError::Lib(Error::InvalidParameter(format!("cannot parse epsilon '{text}'"))))
}

fn welfare_json(w: &WelfareValue) -> Value {
    json!({
        "zero": w.is_zero(),
        "log": if w.is_zero() { Value::Null } else { json!(w.log_value()) },
        "linear": if w.is_zero() { json!(0.0) } else { json!(w.linear()) },
    })
}

fn transfers_json(log: &[Transfer]) -> Value {
    Value::Array(
        log.iter()
            .map(|t| json!({"round": t.round, "from": t.from, "to": t.to, "good": t.good}))
            .collect(),
    )
}

fn build_options(
    method: &str,
    epsilon: &str,
    lambda: Option<u64>,
    p: Option<&str>,
    budget: u128,
) -> Result<SolveOptions, CliError> {
    let method = Method::parse(method)?;
    let p = match p {
        Some(text) => PExponent::parse(text)?,
        None => PExponent::Zero,
    };
    Ok(SolveOptions {
        method,
        epsilon: parse_epsilon(epsilon)?,
        lambda,
        p,
        budget,
    })
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let instance = parse_instance(&read_file(&args.instance)?)?;
    let options = build_options(
        &args.method,
        &args.epsilon,
        args.lambda,
        args.p.as_deref(),
        args.budget,
    )?;
    let report = solve(&instance, &options)?;
    let repair = if args.repair {
        Some(repair_output(&instance, report.output.clone())?)
    } else {
        None
    };
    let final_output = repair.as_ref().map(|(o, _)| o).unwrap_or(&report.output);

    if let Some(path) = &args.out {
        std::fs::write(path, serialize_allocation(&final_output.allocation))?;
    }
    println!("{}", solve_report_json(&instance, &options, &report, repair.as_ref())?);
    Ok(())
}

fn solve_report_json(
    instance: &Instance,
    options: &SolveOptions,
    report: &SolveReport,
    repair: Option<&(nash_welfare::SolverOutput, Vec<Transfer>)>,
) -> Result<String, CliError> {
    let welfare = evaluate(instance, &report.output.allocation, &options.p)?;
    let violations = wwef1_violations(instance, &report.output.allocation)?;
    let mut doc = json!({
        "method": report.method.name(),
        "parameters": {
            "epsilon": format_rational(&options.epsilon),
            "lambda": report.lambda,
            "p": match &options.p { PExponent::Zero => Value::Null, p => json!(p.describe()) },
        },
        "welfare": welfare_json(&welfare),
        "zero_optimum": report.output.zero_optimum,
        "guarantee": report.guarantee,
        "wwef1": violations.is_empty(),
        "wwef1_violations": violations,
        "allocation": {"bundles": report.output.allocation.bundles()},
    });
    if let Some((repaired, log)) = repair {
        let rw = evaluate(instance, &repaired.allocation, &options.p)?;
        let rv = wwef1_violations(instance, &repaired.allocation)?;
        doc["repair"] = json!({
            "welfare": welfare_json(&rw),
            "wwef1": rv.is_empty(),
            "transfers": transfers_json(log),
            "allocation": {"bundles": repaired.allocation.bundles()},
        });
    }
    Ok(serde_json::to_string_pretty(&doc).expect("report serializes"))
}

fn evaluate(
    instance: &Instance,
    allocation: &Allocation,
    p: &PExponent,
) -> Result<WelfareValue, CliError> {
    Ok(match p {
        PExponent::Zero => nash_welfare(instance, allocation)?,
        other => p_mean_welfare(instance, allocation, other)?,
    })
}

fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let instance = parse_instance(&read_file(&args.instance)?)?;
    let allocation = parse_allocation(&read_file(&args.allocation)?)?;
    let p = match args.p.as_deref() {
        Some(text) => PExponent::parse(text)?,
        None => PExponent::Zero,
    };
    let welfare = evaluate(&instance, &allocation, &p)?;
    let violations = wwef1_violations(&instance, &allocation)?;
    let utilities = allocation.utilities(&instance);
    let per_agent: Vec<Value> = utilities
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let weighted = u / &instance.weights()[i];
            json!({
                "agent": i,
                "utility": format_rational(u),
                "utility_per_weight": format_rational(&weighted),
            })
        })
        .collect();
    let doc = json!({
        "welfare": welfare_json(&welfare),
        "per_agent": per_agent,
        "wwef1": violations.is_empty(),
        "violations": violations,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let config = GenConfig {
        kind: Kind::parse(&args.kind)?,
        agents: args.n,
        goods: args.m,
        seed: args.seed,
        value_max: args.value_max,
        k: args.k,
    };
    let instance = generate(&config)?;
    let text = serialize_instance(&instance);
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let suite: Value = serde_json::from_str(&read_file(&args.suite)?)
        .map_err(|e| CliError::Lib(Error::parse("$", format!("invalid JSON: {e}"))))?;
    let rows = suite
        .as_array()
        .ok_or_else(|| CliError::Lib(Error::parse("$", "suite must be a JSON array")))?;
    let mut csv = String::from("instance,method,params,welfare_log,oracle_log,ratio,ms,transfers\n");
    let suite_dir = args.suite.parent().map(Path::to_path_buf).unwrap_or_default();
    for row in rows {
        csv.push_str(&bench_row(row, &suite_dir, args.budget));
        csv.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// One CSV line per (instance, method) row; failures fill the welfare_log
/// column with failed(reason) and leave the rest empty.
fn bench_row(row: &Value, suite_dir: &Path, budget: u128) -> String {
    let instance_name = row
        .get("instance")
        .and_then(Value::as_str)
        .unwrap_or("<missing>");
    let method_name = row.get("method").and_then(Value::as_str).unwrap_or("auto");
    let epsilon = row
        .get("epsilon")
        .map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .unwrap_or_else(|| "0.5".to_string());
    let lambda = row.get("lambda").and_then(Value::as_u64);
    let p = row.get("p").and_then(Value::as_str).map(str::to_string);
    let repair = row.get("repair").and_then(Value::as_bool).unwrap_or(false);

    let params_desc = {
        let mut parts = vec![format!("eps={epsilon}")];
        if let Some(l) = lambda {
            parts.push(format!("lambda={l}"));
        }
        if let Some(p) = &p {
            parts.push(format!("p={p}"));
        }
        if repair {
            parts.push("repair".to_string());
        }
        parts.join(";")
    };

    type RowData = (f64, Option<f64>, f64, u128, Option<usize>, bool);
    let run = || -> Result<RowData, CliError> {
        let path = suite_dir.join(instance_name);
        let instance = parse_instance(&read_file(&path)?)?;
        let options = build_options(method_name, &epsilon, lambda, p.as_deref(), budget)?;
        let start = Instant::now();
        let report = solve(&instance, &options)?;
        let (output, transfers) = if repair {
            let (o, log) = repair_output(&instance, report.output)?;
            (o, Some(log.len()))
        } else {
            (report.output, None)
        };
        let elapsed = start.elapsed().as_millis();
        let welfare = evaluate(&instance, &output.allocation, &options.p)?;

        let objective = match &options.p {
            PExponent::Zero => Objective::Nash,
            other => Objective::PMean(other.clone()),
        };
        let oracle = match brute_force_optimum(&instance, &objective, Some(budget)) {
            Ok(res) => Some(res.best_welfare),
            Err(Error::Budget { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let ratio = oracle.as_ref().map(|o| ratio_linear(&welfare, o));
        Ok((
            welfare.log_value(),
            oracle.as_ref().map(|o| o.log_value()),
            ratio.unwrap_or(f64::NAN),
            elapsed,
            transfers,
            welfare.is_zero(),
        ))
    };

    match run() {
        Ok((wlog, olog, ratio, ms, transfers, wzero)) => {
            let fmt_log = |zero: bool, v: f64| {
                if zero || v == f64::NEG_INFINITY {
                    "-inf".to_string()
                } else {
                    format!("{v:.12}")
                }
            };
            format!(
                "{instance_name},{method_name},{params_desc},{},{},{},{ms},{}",
                fmt_log(wzero, wlog),
                olog.map(|v| fmt_log(v == f64::NEG_INFINITY, v)).unwrap_or_default(),
                if ratio.is_nan() { String::new() } else { format!("{ratio:.6}") },
                transfers.map(|t| t.to_string()).unwrap_or_default(),
            )
        }
        Err(err) => {
            let reason: String = err
                .to_string()
                .chars()
                .map(|c| if c == ',' || c == '\n' { ' ' } else { c })
                .collect();
            format!("{instance_name},{method_name},{params_desc},failed({reason}),,,,")
        }
    }
}

/// exp(log a - log b) with the zero cases pinned.
fn ratio_linear(a: &WelfareValue, b: &WelfareValue) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 1.0,
        (true, false) => 0.0,
        (false, true) => f64::INFINITY,
        (false, false) => (a.log_value() - b.log_value()).exp(),
    }
}
