//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed ratio check, 2 usage or I/O error,
//! 3 infeasible instance, 4 size beyond an exact limit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{instance_digest, instance_to_json, parse_instance, InstanceFile};
use crate::generators::{self, instance_seed, GenSpec};
use crate::instance::{Coloring, PairInstance};
use crate::oracle::exact_optimum;
use crate::problem::{guarantee_bound, solve, Networks, Objective, ProblemSpec, Structure};
use crate::two_tsp::{TourSubroutine, TspParams};

#[derive(Parser, Debug)]
#[command(name = "pairnet", version, about = "Red/blue colorings of point pairs with short networks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an approximation algorithm on an instance file.
    Solve(SolveArgs),
    /// Brute-force optimum over all feasible colorings.
    Exact(ExactArgs),
    /// Approximation versus optimum over a generated batch, as CSV.
    Ratio(RatioArgs),
    /// Write a generated instance.
    Gen(GenArgs),
    /// List everything wrong with an instance file.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct Selector {
    #[arg(long, value_parser = parse_structure)]
    problem: Structure,
    #[arg(long, value_parser = parse_objective)]
    objective: Objective,
}

impl Selector {
    fn spec(&self) -> ProblemSpec {
        ProblemSpec::new(self.problem, self.objective)
    }
}

fn parse_structure(s: &str) -> std::result::Result<Structure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_objective(s: &str) -> std::result::Result<Objective, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug, Clone)]
struct TourArgs {
    #[arg(long, default_value_t = 1.0 / 12.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.5)]
    beta: f64,
    /// Cut limit below the default; voids the tour guarantee.
    #[arg(long)]
    cap_k: Option<usize>,
    #[arg(long, value_enum, default_value_t = SubroutineArg::Auto)]
    subroutine: SubroutineArg,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SubroutineArg {
    Auto,
    Christofides,
    DoubleTree,
    Exact,
}

impl TourArgs {
    fn params(&self, seed: u64) -> Result<TspParams> {
        let params = TspParams {
            mu: self.mu,
            beta: self.beta,
            cap_k: self.cap_k,
            seed,
            subroutine: match self.subroutine {
                SubroutineArg::Auto => TourSubroutine::Auto,
                SubroutineArg::Christofides => TourSubroutine::Christofides,
                SubroutineArg::DoubleTree => TourSubroutine::DoubleTree,
                SubroutineArg::Exact => TourSubroutine::Exact,
            },
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    selector: Selector,
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    tour: TourArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the exact oracle and report the ratio.
    #[arg(long)]
    oracle: bool,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    selector: Selector,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    RandomEuclidean,
    RandomMetric,
    UnitLine,
    RandomLine,
    SeparatedLine,
    PartitionMatching,
    ConnectedPartitionMst,
}

#[derive(Args, Debug)]
struct RatioArgs {
    #[command(flatten)]
    selector: Selector,
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    min_n: usize,
    #[arg(long, default_value_t = 5)]
    max_n: usize,
    #[arg(long = "box", default_value_t = 100.0)]
    side: f64,
    #[command(flatten)]
    tour: TourArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "box", default_value_t = 100.0)]
    side: f64,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Comma-separated positive integers for the partition gadget.
    #[arg(long, value_delimiter = ',')]
    xs: Vec<u64>,
    /// Vertex count for the connected-partition gadget.
    #[arg(long)]
    vertices: Option<usize>,
    /// Comma-separated `a-b` edges for the connected-partition gadget.
    #[arg(long, value_delimiter = ',', value_parser = parse_edge)]
    edges: Vec<(usize, usize)>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_edge(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once('-').ok_or_else(|| format!("edge `{s}` is not of the form a-b"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("edge `{s}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub instance_digest: String,
    pub problem: ProblemSpec,
    pub algorithm: String,
    pub n: usize,
    pub coloring: Coloring,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub networks: Option<Networks>,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bottleneck: Option<f64>,
    pub guarantee_factor: Option<f64>,
    pub guarantee_valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explored_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pairnet: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Solve(a) => cmd_solve(a).map(|_| 0),
        Command::Exact(a) => cmd_exact(a).map(|_| 0),
        Command::Ratio(a) => cmd_ratio(a),
        Command::Gen(a) => cmd_gen(a).map(|_| 0),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn read_instance(path: &Path) -> Result<PairInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(output, &text)
}

/// `value / oracle`, with `0 / 0` read as an exact hit.
fn ratio(value: f64, oracle: f64) -> f64 {
    if oracle == 0.0 {
        if value == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        value / oracle
    }
}

const RELATIVE_TOLERANCE: f64 = 1e-9;

fn within(value: f64, limit: f64) -> bool {
    value <= limit * (1.0 + RELATIVE_TOLERANCE) + f64::EPSILON
}

fn solve_report(inst: &PairInstance, spec: ProblemSpec, params: &TspParams, with_oracle: bool) -> Result<RunReport> {
    let s = solve(inst, spec, params)?;
    let oracle = if with_oracle { Some(exact_optimum(inst, spec)?.value) } else { None };
    Ok(RunReport {
        instance_digest: instance_digest(inst),
        problem: spec,
        algorithm: spec.algorithm_id(inst.kind()).to_string(),
        n: inst.pair_count(),
        ratio: oracle.map(|o| ratio(s.value, o)),
        oracle,
        guarantee_valid: s.guarantee_factor.is_some(),
        guarantee_factor: s.guarantee_factor,
        coloring: s.coloring,
        networks: Some(s.networks),
        value: s.value,
        sum: Some(s.sum),
        max: Some(s.max),
        bottleneck: Some(s.bottleneck),
        enumerated_count: s.enumerated_count,
        explored_count: None,
        wall_time: None,
    })
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let start = Instant::now();
    let inst = read_instance(&a.input)?;
    let params = a.tour.params(a.seed)?;
    let mut report = solve_report(&inst, a.selector.spec(), &params, a.oracle)?;
    if a.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    emit_json(a.output.as_deref(), &report)
}

fn cmd_exact(a: ExactArgs) -> Result<()> {
    let start = Instant::now();
    let inst = read_instance(&a.input)?;
    let spec = a.selector.spec();
    let r = exact_optimum(&inst, spec)?;
    let report = RunReport {
        instance_digest: instance_digest(&inst),
        problem: spec,
        algorithm: "exact".to_string(),
        n: inst.pair_count(),
        coloring: r.argmin,
        networks: None,
        value: r.value,
        sum: None,
        max: None,
        bottleneck: None,
        guarantee_factor: Some(1.0),
        guarantee_valid: true,
        enumerated_count: None,
        explored_count: Some(r.explored_count),
        oracle: Some(r.value),
        ratio: None,
        wall_time: a.timing.then(|| start.elapsed().as_secs_f64()),
    };
    emit_json(a.output.as_deref(), &report)
}

fn batch_instance(a: &RatioArgs, index: usize) -> Result<(PairInstance, u64)> {
    let seed = instance_seed(a.seed, index as u64);
    let even_only = a.selector.problem == Structure::Matching;
    let sizes: Vec<usize> = (a.min_n..=a.max_n).filter(|n| !even_only || n % 2 == 0).collect();
    if sizes.is_empty() {
        return Err(Error::usage(format!("no usable pair count in [{}, {}]", a.min_n, a.max_n)));
    }
    let n = sizes[(seed % sizes.len() as u64) as usize];
    let inst = match a.family {
        Family::RandomEuclidean => generators::random_euclidean(n, seed, a.side)?,
        Family::RandomMetric => generators::random_metric(n, seed)?,
        Family::UnitLine => generators::unit_line(n, seed)?,
        Family::RandomLine => generators::random_line(n, seed)?,
        Family::SeparatedLine => generators::separated_line(n, seed)?,
        Family::PartitionMatching | Family::ConnectedPartitionMst => {
            return Err(Error::usage("ratio batches need a random family"))
        }
    };
    Ok((inst, seed))
}

/// One line of the ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub instance_id: usize,
    pub n: usize,
    pub algorithm: String,
    pub value: f64,
    pub oracle: f64,
    pub ratio: f64,
    /// `None` when the configuration voids the guarantee.
    pub bound: Option<f64>,
    pub pass: bool,
}

fn ratio_row(a: &RatioArgs, index: usize) -> Result<RatioRow> {
    let (inst, seed) = batch_instance(a, index)?;
    let spec = a.selector.spec();
    let params = a.tour.params(seed)?;
    let s = solve(&inst, spec, &params)?;
    let oracle = exact_optimum(&inst, spec)?.value;
    let bound = s.guarantee_factor.map(|_| guarantee_bound(spec, &inst, &params));
    let above_optimum = within(oracle, s.value);
    let pass = above_optimum && bound.is_none_or(|b| within(s.value, b * oracle));
    Ok(RatioRow {
        instance_id: index,
        n: inst.pair_count(),
        algorithm: spec.algorithm_id(inst.kind()).to_string(),
        value: s.value,
        oracle,
        ratio: ratio(s.value, oracle),
        bound,
        pass,
    })
}

fn cmd_ratio(a: RatioArgs) -> Result<i32> {
    if a.min_n == 0 || a.min_n > a.max_n {
        return Err(Error::usage(format!("bad pair count range [{}, {}]", a.min_n, a.max_n)));
    }
    let mut rows = (0..a.count).into_par_iter().map(|i| ratio_row(&a, i)).collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.instance_id);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance_id", "n", "algorithm", "value", "oracle", "ratio", "bound", "pass"])
        .map_err(csv_error)?;
    for r in &rows {
        w.write_record([
            r.instance_id.to_string(),
            r.n.to_string(),
            r.algorithm.clone(),
            r.value.to_string(),
            r.oracle.to_string(),
            r.ratio.to_string(),
            r.bound.map(|b| b.to_string()).unwrap_or_else(|| "void".to_string()),
            r.pass.to_string(),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::internal(e.to_string()))?;
    emit(a.output.as_deref(), &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("pairnet: {failed} of {} instances exceed their bound", rows.len());
        return Ok(1);
    }
    Ok(0)
}

fn csv_error(e: csv::Error) -> Error {
    Error::internal(format!("csv: {e}"))
}

fn gen_spec(a: &GenArgs) -> Result<GenSpec> {
    let n = || a.n.ok_or_else(|| Error::usage("this family needs --n"));
    Ok(match a.family {
        Family::RandomEuclidean => GenSpec::RandomEuclidean { n: n()?, seed: a.seed, side: a.side },
        Family::RandomMetric => GenSpec::RandomMetric { n: n()?, seed: a.seed },
        Family::UnitLine => GenSpec::UnitLine { n: n()?, seed: a.seed },
        Family::RandomLine => GenSpec::RandomLine { n: n()?, seed: a.seed },
        Family::SeparatedLine => GenSpec::SeparatedLine { n: n()?, seed: a.seed },
        Family::PartitionMatching => GenSpec::PartitionMatching { xs: a.xs.clone(), epsilon: a.epsilon },
        Family::ConnectedPartitionMst => GenSpec::ConnectedPartitionMst {
            vertices: a.vertices.ok_or_else(|| Error::usage("this family needs --vertices"))?,
            edges: a.edges.clone(),
        },
    })
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let inst = generators::generate(&gen_spec(&a)?)?;
    emit(a.output.as_deref(), &instance_to_json(&inst))
}

/// Prints one violation per line; exits 2 when there are any.
fn cmd_validate(a: ValidateArgs) -> Result<i32> {
    let text =
        fs::read_to_string(&a.input).map_err(|e| Error::usage(format!("cannot read {}: {e}", a.input.display())))?;
    let file: InstanceFile = serde_json::from_str(&text)?;
    let violations = file.violations()?;
    if violations.is_empty() {
        println!("ok");
        return Ok(0);
    }
    for v in &violations {
        eprintln!("{v}");
    }
    Ok(2)
}
