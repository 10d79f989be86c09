//! Command-line frontend.
//!
//! Exit codes: 0 on success (an infeasible control query is a result, not a
//! failure), 1 on usage errors, 2 on data errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::control::{solve, ControlQuery, Goal, Operation, SearchOptions};
use crate::instance::Instance;
use crate::measures::{
    baseline_add_measure, baseline_cost_measure, rivalry, strength_report, BaselineConfig, MeasureError, StrengthConfig,
};
use crate::pabulib::{self, ParseOptions};
use crate::rational::{format_decimal, format_exact};
use crate::reductions::{build, planted_cover, random_without_cover, rx3c_has_exact_cover, Construction};
use crate::report::{self, sort_rows};
use crate::rules::{evaluate, RuleId};
use crate::tiebreak::TieBreakOrder;

#[derive(Parser, Debug)]
#[command(name = "pb-control", version, about = "Participatory budgeting rules, control and project strength")]
struct Cli {
    /// Worker threads for enumerations.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Stop enumerations after this many seconds and mark results partial.
    #[arg(long, global = true, value_name = "SECONDS")]
    time_budget: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a rule and print the funded projects and the trace.
    Evaluate {
        #[command(flatten)]
        input: Input,
    },
    /// Solve a control query; prints JSON.
    Control(ControlArgs),
    /// Strength measures of every project as CSV.
    Measures(MeasuresArgs),
    /// Rivalry matrix as CSV.
    Rivalry(RivalryArgs),
    /// Write a reduction instance (.pb) and a JSON sidecar with the query.
    Reduce(ReduceArgs),
    /// Pearson correlations between the measures of report CSVs.
    Correlate {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Input {
    file: PathBuf,
    #[arg(long)]
    rule: RuleId,
    /// Comma-separated project ids (or @FILE); defaults to file order.
    #[arg(long)]
    tiebreak: Option<String>,
    /// Drop ballot entries naming unknown projects instead of failing.
    #[arg(long)]
    lenient: bool,
}

#[derive(Args, Debug)]
struct ControlArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    goal: Goal,
    #[arg(long = "op")]
    operation: Operation,
    #[arg(long)]
    project: String,
    /// Bound on the total weight of the controlled projects.
    #[arg(long)]
    r: u64,
    /// `unit`, `cost`, or a CSV file of `project,weight` lines (unlisted projects weigh 1).
    #[arg(long, default_value = "unit")]
    weights: String,
    /// Comma-separated spoiler ids (or @FILE) for addition control.
    #[arg(long)]
    spoilers: Option<String>,
    /// Also cap the number of controlled projects (enumeration only).
    #[arg(long)]
    max_size: Option<usize>,
}

#[derive(Args, Debug)]
struct MeasuresArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 3)]
    r_max: usize,
    /// Size cap for enumerating measures and the add baseline.
    #[arg(long, default_value_t = crate::measures::DEFAULT_CAP)]
    cap: usize,
    /// Exact enumeration (the default).
    #[arg(long, conflicts_with = "sample")]
    exact: bool,
    /// Monte-Carlo estimate from this many samples per probability.
    #[arg(long, requires = "seed")]
    sample: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include the cost and add baseline measures.
    #[arg(long)]
    baselines: bool,
    /// Instance column value; defaults to the file stem.
    #[arg(long)]
    instance_id: Option<String>,
}

#[derive(Args, Debug)]
struct RivalryArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    project: Option<String>,
    #[arg(long)]
    all: bool,
    #[arg(long)]
    r: usize,
    /// Decimal cells instead of exact fractions.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// One of 1, 1d, 3, 4, 6, 6d, 8, 9.
    #[arg(long)]
    theorem: Construction,
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with = "no_cover")]
    planted_cover: bool,
    #[arg(long)]
    no_cover: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output .pb path; the sidecar goes next to it with a .json extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// Runs the command line `args` (including the program name), writing
/// results to `out`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            2
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    let options = SearchOptions {
        jobs: cli.jobs.max(1),
        deadline: match cli.time_budget {
            Some(s) if s.is_finite() && s >= 0.0 => Some(Instant::now() + Duration::from_secs_f64(s)),
            Some(s) => return Err(Failure::Usage(format!("invalid time budget {s}"))),
            None => None,
        },
    };
    match cli.command {
        Command::Evaluate { input } => cmd_evaluate(&input, out),
        Command::Control(a) => cmd_control(&a, options, out),
        Command::Measures(a) => cmd_measures(&a, options, out),
        Command::Rivalry(a) => cmd_rivalry(&a, options, out),
        Command::Reduce(a) => cmd_reduce(&a, out),
        Command::Correlate { reports } => cmd_correlate(&reports, out),
    }
}

/// A comma-separated list, or the whitespace/comma-separated contents of `@FILE`.
fn id_list(spec: &str) -> Result<Vec<String>, Failure> {
    let text = match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Failure::Data(format!("{path}: {e}")))?,
        None => spec.to_string(),
    };
    Ok(text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string).collect())
}

fn load(input: &Input) -> Result<(Instance, TieBreakOrder), Failure> {
    let parsed = pabulib::read_file(&input.file, &ParseOptions { strict: !input.lenient })
        .map_err(|e| Failure::Data(format!("{}: {e}", input.file.display())))?;
    let instance = parsed.instance;
    let tiebreak = match &input.tiebreak {
        None => TieBreakOrder::input_order(&instance),
        Some(spec) => TieBreakOrder::from_ids(&instance, &id_list(spec)?)?,
    };
    Ok((instance, tiebreak))
}

fn cmd_evaluate(input: &Input, out: &mut dyn Write) -> CliResult {
    let (instance, tiebreak) = load(input)?;
    let outcome = evaluate(input.rule, &instance, &tiebreak)?;
    let funded: Vec<String> = outcome.funded_sorted().iter().map(|&i| instance.project_id(i).0.clone()).collect();
    writeln!(out, "rule: {}", input.rule)?;
    writeln!(out, "budget: {}", instance.budget())?;
    writeln!(out, "funded: {}", if funded.is_empty() { "(none)".to_string() } else { funded.join(", ") })?;
    writeln!(out, "funded cost: {}", outcome.funded_cost(&instance))?;
    writeln!(out, "trace:")?;
    for ev in &outcome.trace {
        let mut line = format!(
            "  {} {} {}",
            ev.round,
            instance.project_id(ev.project),
            if ev.funded { "funded" } else { "skipped" }
        );
        if let Some(t) = &ev.time {
            line.push_str(&format!(" time={} ({})", format_exact(t), format_decimal(t)));
        }
        if let Some(q) = &ev.q {
            line.push_str(&format!(" q={} ({})", format_exact(q), format_decimal(q)));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn read_weights(spec: &str, instance: &Instance) -> Result<Option<Vec<u64>>, Failure> {
    match spec {
        "unit" => Ok(None),
        "cost" => {
            let mut w = Vec::with_capacity(instance.num_projects());
            for (i, p) in instance.projects().iter().enumerate() {
                let v = u64::try_from(&p.cost).map_err(|_| {
                    Failure::Data(format!("cost of `{}` does not fit in 64 bits", instance.project_id(i)))
                })?;
                w.push(v);
            }
            Ok(Some(w))
        }
        path => {
            let mut weights = vec![1u64; instance.num_projects()];
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .trim(csv::Trim::All)
                .from_path(path)
                .map_err(|e| Failure::Data(format!("{path}: {e}")))?;
            for rec in reader.records() {
                let rec = rec?;
                let id = rec.get(0).unwrap_or("");
                let w = rec.get(1).unwrap_or("");
                let idx = instance.require_index(id)?;
                weights[idx] = w.parse().map_err(|_| Failure::Data(format!("{path}: bad weight `{w}` for `{id}`")))?;
            }
            Ok(Some(weights))
        }
    }
}

fn cmd_control(a: &ControlArgs, options: SearchOptions, out: &mut dyn Write) -> CliResult {
    let (instance, tiebreak) = load(&a.input)?;
    let mut query = ControlQuery::for_project(&instance, a.input.rule, a.goal, a.operation, &a.project, a.r)?;
    query.weights = read_weights(&a.weights, &instance)?;
    if let Some(spec) = &a.spoilers {
        let ids = id_list(spec)?;
        query.spoilers = ids.iter().map(|id| instance.require_index(id)).collect::<Result<_, _>>()?;
    }
    query.max_size = a.max_size;
    let answer = solve(&query, &instance, &tiebreak, options)?;
    let witness = answer.witness.as_ref().map(|w| {
        let mut ids: Vec<String> = w.iter().map(|&i| instance.project_id(i).0.clone()).collect();
        ids.sort();
        ids
    });
    let doc = json!({
        "rule": a.input.rule.name(),
        "goal": a.goal.to_string(),
        "operation": a.operation.to_string(),
        "project": a.project,
        "bound": a.r,
        "solver": answer.solver.name(),
        "feasible": answer.feasible,
        "complete": answer.complete,
        "status": if answer.feasible { "feasible" } else if answer.complete { "infeasible" } else { "partial" },
        "witness": witness,
        "weight": answer.weight,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn instance_label(file: &Path, explicit: &Option<String>) -> String {
    explicit.clone().unwrap_or_else(|| file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
}

fn cmd_measures(a: &MeasuresArgs, options: SearchOptions, out: &mut dyn Write) -> CliResult {
    let (instance, tiebreak) = load(&a.input)?;
    let id = instance_label(&a.input.file, &a.instance_id);
    let config = StrengthConfig { r_max: a.r_max, cap: a.cap, sampling: a.sample.zip(a.seed), options };
    let rep = strength_report(&instance, a.input.rule, &tiebreak, &config)?;
    let mut rows = report::strength_rows(&id, &instance, &rep, a.cap);
    if a.baselines {
        let bc = BaselineConfig::default();
        for ps in rep.projects.iter().filter(|p| !p.funded) {
            let cost = baseline_cost_measure(&instance, a.input.rule, ps.project, &tiebreak, &bc)?;
            let add = baseline_add_measure(&instance, a.input.rule, ps.project, &tiebreak, a.cap, &bc)?;
            let pid = instance.project_id(ps.project).as_str();
            rows.extend(report::baseline_rows(&id, a.input.rule.name(), pid, &cost, &add, a.cap));
        }
    }
    sort_rows(&mut rows);
    report::write_measure_csv(out, &rows)?;
    Ok(())
}

fn cmd_rivalry(a: &RivalryArgs, options: SearchOptions, out: &mut dyn Write) -> CliResult {
    let (instance, tiebreak) = load(&a.input)?;
    let m = instance.num_projects();
    let outcome = evaluate(a.input.rule, &instance, &tiebreak)?;
    let rows: Vec<usize> = match &a.project {
        Some(p) => vec![instance.require_index(p)?],
        None => (0..m).filter(|&p| !outcome.is_funded(p)).collect(),
    };
    let columns: Vec<usize> = (0..m).collect();
    let mut entries = Vec::with_capacity(rows.len());
    let mut partial = false;
    for &p in &rows {
        let mut row = Vec::with_capacity(m);
        for &q in &columns {
            row.push(if p == q {
                None
            } else {
                match rivalry(&instance, a.input.rule, p, q, &tiebreak, a.r, options) {
                    Ok(v) => Some(v),
                    Err(MeasureError::Incomplete) => {
                        partial = true;
                        None
                    }
                    Err(e) => return Err(e.into()),
                }
            });
        }
        entries.push(row);
    }
    let matrix = crate::measures::RivalryMatrix { r: a.r, rows, columns, entries };
    report::write_rivalry_csv(&mut *out, &instance, a.input.rule.name(), &matrix, a.decimal)?;
    if partial {
        writeln!(out, "# partial: time budget exhausted; empty off-diagonal cells were not computed")?;
    }
    Ok(())
}

fn cmd_reduce(a: &ReduceArgs, out: &mut dyn Write) -> CliResult {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let rx3c = if a.no_cover {
        random_without_cover(a.n, &mut rng, 100_000)
            .ok_or_else(|| Failure::Data(format!("no cover-free instance found for N = {}", a.n)))?
    } else {
        planted_cover(a.n, &mut rng).0
    };
    let cover = rx3c_has_exact_cover(&rx3c);
    let red = build(a.theorem, &rx3c);
    let ids = |v: &[usize]| -> Vec<String> { v.iter().map(|&i| red.instance.project_id(i).0.clone()).collect() };
    let q = &red.query;
    let witness = cover.as_ref().map(|c| {
        let mut w = ids(&red.action_for_cover(c));
        w.sort();
        w
    });
    let sidecar = json!({
        "construction": a.theorem.code(),
        "n": a.n,
        "seed": a.seed,
        "sets": rx3c.family(),
        "set_projects": ids(&red.set_projects),
        "has_cover": cover.is_some(),
        "cover": cover,
        "expected_feasible": cover.is_some(),
        "witness": witness,
        "tiebreak": ids(red.tiebreak.order()),
        "query": {
            "rule": q.rule.name(),
            "goal": q.goal.to_string(),
            "operation": q.operation.to_string(),
            "project": red.instance.project_id(q.distinguished).as_str(),
            "bound": q.bound,
            "weights": q.weights,
            "spoilers": ids(&q.spoilers),
            "max_size": q.max_size,
        },
    });
    pabulib::write_file(&a.out, &red.instance)?;
    let side = a.out.with_extension("json");
    fs::write(&side, serde_json::to_string_pretty(&sidecar)? + "\n")?;
    writeln!(out, "{}", a.out.display())?;
    writeln!(out, "{}", side.display())?;
    Ok(())
}

fn cmd_correlate(reports: &[PathBuf], out: &mut dyn Write) -> CliResult {
    let mut rows = Vec::new();
    for path in reports {
        let f = fs::File::open(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        rows.extend(
            report::read_measure_csv(BufReader::new(f))
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        );
    }
    let table = report::correlate(&rows)?;
    report::write_correlation_csv(out, &table)?;
    Ok(())
}

/// Entry point for the binary.
pub fn main_with_env() -> i32 {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    run(std::env::args_os(), &mut lock)
}
