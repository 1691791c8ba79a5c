//! Command-line front end: argument parsing, model loading and report output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use influence_centrality::centrality::exact_influence_centrality;
use influence_centrality::edgelist::parse_edge_list_with;
use influence_centrality::estimator::DEFAULT_MAX_RR_SETS;
use influence_centrality::model::parse_explicit_model;
use influence_centrality::profile::{exact_profile, Basis};
use influence_centrality::rr::RRSampler;
use influence_centrality::{
    estimate, simulate_cascade, CentralityMode, CentralityReport, DistanceFunction, EdgeListFormat,
    EstimationMode, EstimatorConfig, NodeId, NodeWiseFunction, RngStream, TriggeringModel,
};

/// Environment variable overriding the RR-set budget.
pub const BUDGET_ENV: &str = "CC_MAX_RR_SETS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] influence_centrality::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(influence_centrality::Error::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "infcent", version, about = "Influence-based centralities of diffusion models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate centralities from RR sets.
    Estimate(EstimateArgs),
    /// Exact centralities by enumerating every live-edge outcome.
    Exact(ExactArgs),
    /// Rank of the layered-graph basis, and optionally a decomposition.
    BasisCheck(BasisArgs),
    /// Forward cascades from a seed set.
    Simulate(SimulateArgs),
    /// Raw RR sets, one per line.
    RrDump(RrDumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKindArg {
    /// Independent cascade; weights are edge probabilities.
    Ic,
    /// Linear threshold; weights are edge weights, default 1/in-degree.
    Lt,
    /// Every edge live with certainty.
    Bfs,
    /// Per-node triggering-set distributions.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Individual,
    Group,
    Shapley,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKindArg,
    /// Edge list (`u v [w]`) or explicit-model file.
    #[arg(long)]
    pub input: PathBuf,
    /// Uniform IC probability for an unweighted edge list.
    #[arg(long)]
    pub prob: Option<f64>,
    /// Treat node ids as labels and number them in order of appearance.
    #[arg(long)]
    pub remap: bool,
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// deg, har, rch, cls or soi.
    #[arg(long = "fn", value_name = "NAME")]
    pub function: String,
    /// Threshold for soi.
    #[arg(long)]
    pub delta: Option<u32>,
    #[arg(long, value_enum, default_value = "individual")]
    pub mode: ModeArg,
    /// Query sets for group mode: one per line, comma-separated ids.
    #[arg(long)]
    pub groups: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Include the phase-1 trace (JSON output) or print it to standard error.
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Allow n = 5 (M = 1050).
    #[arg(long = "allow-n5")]
    pub allow_n5: bool,
    #[arg(long, value_enum, requires = "input")]
    pub model: Option<ModelKindArg>,
    /// Model whose profile is decomposed over the basis.
    #[arg(long, requires = "model")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub prob: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seed set, comma-separated ids.
    #[arg(long)]
    pub seeds: String,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RrDumpArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    /// Fixed root; uniform when absent.
    #[arg(long)]
    pub root: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A loaded model with optional display labels.
pub struct LoadedModel {
    pub model: TriggeringModel,
    pub labels: Option<Vec<String>>,
}

impl LoadedModel {
    fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    fn node_id(&self, token: &str) -> Result<NodeId> {
        let token = token.trim();
        let id = match &self.labels {
            Some(labels) => labels.iter().position(|l| l == token),
            None => token.parse().ok(),
        };
        match id {
            Some(v) if v < self.model.node_count() => Ok(v),
            _ => Err(CliError::Usage(format!("unknown node `{token}`"))),
        }
    }

    fn node_list(&self, text: &str) -> Result<Vec<NodeId>> {
        let ids = text
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| self.node_id(t))
            .collect::<Result<Vec<_>>>()?;
        if ids.is_empty() {
            return Err(CliError::Usage("empty node set".into()));
        }
        Ok(ids)
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::File { path: path.to_path_buf(), source })
}

/// Whether the first data line of an edge list carries a weight.
fn has_weights(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.split_whitespace().count() == 3)
}

fn load_model(kind: ModelKindArg, input: &Path, prob: Option<f64>, remap: bool) -> Result<LoadedModel> {
    let text = read_file(input)?;
    if prob.is_some() && kind != ModelKindArg::Ic {
        return Err(CliError::Usage("--prob applies to the ic model only".into()));
    }
    if kind == ModelKindArg::Explicit {
        if remap {
            return Err(CliError::Usage("--remap is not supported for explicit models".into()));
        }
        let model = parse_explicit_model(text.as_bytes(), None)?;
        return Ok(LoadedModel { model, labels: None });
    }
    let weighted = has_weights(&text);
    let format = match (kind, weighted) {
        (ModelKindArg::Ic, true) => EdgeListFormat::IcWeighted,
        (ModelKindArg::Lt, true) => EdgeListFormat::LtWeighted,
        (ModelKindArg::Bfs, true) => {
            return Err(CliError::Usage("the bfs model takes an unweighted edge list".into()));
        }
        _ => EdgeListFormat::Unweighted,
    };
    let list = parse_edge_list_with(text.as_bytes(), format, remap)?;
    let labels = remap.then(|| list.labels.clone());
    let model = match (kind, list.weights) {
        (ModelKindArg::Ic, Some(w)) => {
            if prob.is_some() {
                return Err(CliError::Usage("--prob conflicts with a weighted edge list".into()));
            }
            TriggeringModel::independent_cascade(list.graph, &w)?
        }
        (ModelKindArg::Ic, None) => {
            let p = prob.ok_or_else(|| CliError::Usage("an unweighted ic edge list needs --prob".into()))?;
            TriggeringModel::independent_cascade_uniform(list.graph, p)?
        }
        (ModelKindArg::Lt, Some(w)) => TriggeringModel::linear_threshold(list.graph, &w)?,
        (ModelKindArg::Lt, None) => TriggeringModel::linear_threshold_uniform(list.graph),
        _ => TriggeringModel::bfs_instance(list.graph),
    };
    Ok(LoadedModel { model, labels })
}

fn parse_function(args: &FunctionArgs) -> Result<DistanceFunction> {
    if args.function == "soi" {
        let delta = args
            .delta
            .ok_or_else(|| CliError::Usage("soi needs a threshold: pass --delta".into()))?;
        if delta == 0 {
            return Err(CliError::Usage("--delta must be positive".into()));
        }
        return Ok(NodeWiseFunction::SphereOfInfluence(delta).into());
    }
    if args.delta.is_some() {
        return Err(CliError::Usage(format!("--delta applies to soi, not `{}`", args.function)));
    }
    Ok(args.function.parse()?)
}

fn parse_groups(loaded: &LoadedModel, args: &FunctionArgs) -> Result<Option<Vec<Vec<NodeId>>>> {
    match (args.mode, &args.groups) {
        (ModeArg::Group, Some(path)) => {
            let text = read_file(path)?;
            let groups = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(|l| loaded.node_list(l))
                .collect::<Result<Vec<_>>>()?;
            if groups.is_empty() {
                return Err(CliError::Usage(format!("{} lists no groups", path.display())));
            }
            Ok(Some(groups))
        }
        (ModeArg::Group, None) => Err(CliError::Usage("group mode needs --groups".into())),
        (_, Some(_)) => Err(CliError::Usage("--groups applies to group mode only".into())),
        (_, None) => Ok(None),
    }
}

fn budget() -> Result<u64> {
    parse_budget(std::env::var(BUDGET_ENV).ok().as_deref())
}

fn parse_budget(value: Option<&str>) -> Result<u64> {
    match value {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BUDGET_ENV} must be a non-negative integer, got `{v}`"))),
        None => Ok(DEFAULT_MAX_RR_SETS),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::File { path: path.to_path_buf(), source }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(CliError::Output)
        }
    }
}

fn render<T: serde::Serialize>(
    report: &CentralityReport,
    labels: Option<&[String]>,
    format: FormatArg,
    extra: Option<&T>,
) -> Result<String> {
    Ok(match format {
        FormatArg::Csv => report.to_csv(labels)?,
        FormatArg::Json => report.to_json(labels, extra)?,
    })
}

fn run_estimate(args: &EstimateArgs) -> Result<()> {
    let loaded = load_model(args.model.model, &args.model.input, args.model.prob, args.model.remap)?;
    let f = parse_function(&args.function)?;
    let g = f
        .as_additive()
        .ok_or_else(|| CliError::Usage(format!("`{f}` is not additive and cannot be estimated from RR sets")))?;
    let mode = match parse_groups(&loaded, &args.function)? {
        Some(groups) => EstimationMode::Group(groups),
        None if args.function.mode == ModeArg::Shapley => EstimationMode::Shapley,
        None => EstimationMode::Individual,
    };
    let cfg = EstimatorConfig {
        epsilon: args.eps,
        ell: args.ell,
        k: args.k,
        mode,
        g,
        seed: args.seed,
        workers: args.workers,
        max_rr_sets: budget()?,
    };
    let (report, trace) = estimate(&loaded.model, &cfg)?;
    eprintln!(
        "phase 1: {} RR sets in {:.3}s, LB = {}; phase 2: {} RR sets in {:.3}s",
        trace.phase_one_rr_sets,
        trace.phase_one_time.as_secs_f64(),
        trace.lower_bound,
        trace.phase_two_rr_sets,
        trace.phase_two_time.as_secs_f64()
    );
    if trace.kth_estimate_below_one {
        eprintln!("warning: the k-th largest estimate is below 1; the error bound does not apply");
    }
    let extra = args.trace.then_some(&trace);
    if args.trace && args.output.format == FormatArg::Csv {
        eprintln!("{}", serde_json::to_string_pretty(&trace).expect("trace serializes"));
    }
    let text = render(&report, loaded.labels(), args.output.format, extra)?;
    emit(args.output.output.as_deref(), &text)
}

fn run_exact(args: &ExactArgs) -> Result<()> {
    let loaded = load_model(args.model.model, &args.model.input, args.model.prob, args.model.remap)?;
    let f = parse_function(&args.function)?;
    let mode = match parse_groups(&loaded, &args.function)? {
        Some(groups) => CentralityMode::Group(groups),
        None if args.function.mode == ModeArg::Shapley => CentralityMode::Shapley,
        None => CentralityMode::Individual,
    };
    let report = exact_influence_centrality(&loaded.model, f, &mode)?;
    let text = render::<()>(&report, loaded.labels(), args.output.format, None)?;
    emit(args.output.output.as_deref(), &text)
}

fn run_basis_check(args: &BasisArgs) -> Result<()> {
    let basis = Basis::new(args.n, args.allow_n5)?;
    let rank = basis.rank_check();
    let decomposition = match (args.model, &args.input) {
        (Some(kind), Some(input)) => {
            let loaded = load_model(kind, input, args.prob, false)?;
            if loaded.model.node_count() != args.n {
                return Err(CliError::Usage(format!(
                    "the model has {} nodes but --n is {}",
                    loaded.model.node_count(),
                    args.n
                )));
            }
            let profile = exact_profile(&loaded.model, basis.index())?;
            Some(basis.decompose(&profile)?)
        }
        _ => None,
    };
    let text = match args.output.format {
        FormatArg::Csv => {
            let mut s = format!(
                "M={}, |L|={}, rank={}, full-rank={}\n",
                rank.m, rank.layered, rank.rank, rank.full_rank
            );
            if let Some(d) = &decomposition {
                s.push_str(&format!("residual={:e}, coefficient-sum={}\n", d.residual, d.coefficient_sum));
                s.push_str(&d.to_csv()?);
            }
            s
        }
        FormatArg::Json => {
            #[derive(serde::Serialize)]
            struct Doc<'a> {
                rank: &'a influence_centrality::profile::RankReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                decomposition: Option<&'a influence_centrality::profile::BasisDecomposition>,
            }
            let doc = Doc { rank: &rank, decomposition: decomposition.as_ref() };
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    };
    emit(args.output.output.as_deref(), &text)
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let loaded = load_model(args.model.model, &args.model.input, args.model.prob, args.model.remap)?;
    let seeds = loaded.node_list(&args.seeds)?;
    let n = loaded.model.node_count();
    let name = |v: NodeId| loaded.labels().map_or_else(|| v.to_string(), |l| l[v].clone());
    let runs = (0..args.runs)
        .map(|r| simulate_cascade(&loaded.model, &seeds, &mut RngStream::new(args.seed, r)))
        .collect::<influence_centrality::Result<Vec<_>>>()?;
    let text = match args.output.format {
        FormatArg::Csv => {
            let mut s = String::from("run");
            for v in 0..n {
                s.push(',');
                s.push_str(&name(v));
            }
            s.push('\n');
            for (r, seq) in runs.iter().enumerate() {
                s.push_str(&r.to_string());
                for d in seq.times() {
                    s.push(',');
                    s.push_str(&d.to_string());
                }
                s.push('\n');
            }
            s
        }
        FormatArg::Json => {
            let rows: Vec<_> = runs
                .iter()
                .enumerate()
                .map(|(r, seq)| serde_json::json!({ "run": r, "times": seq.times(), "sets": seq.sets() }))
                .collect();
            serde_json::to_string_pretty(&rows).expect("runs serialize") + "\n"
        }
    };
    emit(args.output.output.as_deref(), &text)
}

fn run_rr_dump(args: &RrDumpArgs) -> Result<()> {
    let loaded = load_model(args.model.model, &args.model.input, args.model.prob, args.model.remap)?;
    if loaded.model.node_count() == 0 {
        return Err(CliError::Usage("the graph has no nodes".into()));
    }
    let root = args.root.as_deref().map(|r| loaded.node_id(r)).transpose()?;
    let mut rng = RngStream::new(args.seed, 0);
    let mut sampler = RRSampler::new(&loaded.model);
    let mut s = String::new();
    for _ in 0..args.count {
        s.push_str(&sampler.sample(&mut rng, root).dump_line(loaded.labels()));
        s.push('\n');
    }
    emit(args.output.as_deref(), &s)
}

pub fn run(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    let out = match &cli.command {
        Command::Estimate(a) => run_estimate(a),
        Command::Exact(a) => run_exact(a),
        Command::BasisCheck(a) => run_basis_check(a),
        Command::Simulate(a) => run_simulate(a),
        Command::RrDump(a) => run_rr_dump(a),
    };
    if out.is_ok() {
        eprintln!("done in {:.3}s", started.elapsed().as_secs_f64());
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;

    fn workspace() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("edge.tsv"), "0 1 0.5\n").unwrap();
        fs::write(dir.path().join("named.tsv"), "# chain\na b\nb c\n").unwrap();
        fs::write(dir.path().join("groups.txt"), "0\n\n# both\n0,1\n").unwrap();
        dir
    }

    /// Runs a command line with file arguments resolved against `dir` and
    /// returns what it wrote to `out`.
    fn run_in(dir: &Path, args: &[&str]) -> Result<String> {
        let resolve = |a: &str| if a.contains('.') { dir.join(a).display().to_string() } else { a.to_string() };
        let out = dir.join("out");
        let mut argv = vec!["infcent".to_string()];
        argv.extend(args.iter().map(|a| resolve(a)));
        argv.extend(["--output".to_string(), out.display().to_string()]);
        run(&Cli::try_parse_from(argv).unwrap())?;
        Ok(fs::read_to_string(out).unwrap())
    }

    #[test]
    fn weights_are_detected_from_the_first_data_line() {
        assert!(has_weights("# c\n0 1 0.5\n"));
        assert!(!has_weights("\n0 1\n1 2 0.5\n"));
    }

    #[test]
    fn budget_parsing() {
        assert_eq!(parse_budget(None).unwrap(), DEFAULT_MAX_RR_SETS);
        assert_eq!(parse_budget(Some(" 40 ")).unwrap(), 40);
        assert!(parse_budget(Some("lots")).is_err());
    }

    #[test]
    fn exit_codes() {
        let over = CliError::Core(influence_centrality::Error::BudgetExceeded { requested: 10, cap: 5 });
        assert_eq!(over.exit_code(), 3);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
    }

    #[test]
    fn exact_single_edge_csv() {
        let dir = workspace();
        let out = run_in(dir.path(), &["exact", "--model", "ic", "--input", "edge.tsv", "--fn", "rch"]).unwrap();
        assert_eq!(out, "node,value\n0,1.5\n1,1\n");
    }

    #[test]
    fn exact_json_has_metadata() {
        let dir = workspace();
        let out = run_in(dir.path(), &["exact", "--model", "ic", "--input", "edge.tsv", "--fn", "rch", "--format", "json"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["metadata"]["method"], "exact");
        assert_eq!(v["values"][0]["value"], 1.5);
    }

    #[test]
    fn group_mode_reads_groups_file() {
        let dir = workspace();
        let args = ["exact", "--model", "ic", "--input", "edge.tsv", "--fn", "rch", "--mode", "group", "--groups", "groups.txt"];
        assert_eq!(run_in(dir.path(), &args).unwrap(), "group,value\n0,1.5\n\"0,1\",2\n");
    }

    #[test]
    fn remapped_labels_appear_in_output() {
        let dir = workspace();
        let out = run_in(dir.path(), &["exact", "--model", "bfs", "--input", "named.tsv", "--remap", "--fn", "deg"]).unwrap();
        assert_eq!(out, "node,value\na,1\nb,1\nc,0\n");
    }

    #[test]
    fn basis_check_reports_full_rank() {
        let dir = workspace();
        let out = run_in(dir.path(), &["basis-check", "--n", "3"]).unwrap();
        assert_eq!(out.trim(), "M=18, |L|=18, rank=18, full-rank=true");
    }

    #[test]
    fn estimate_reports_estimated_values() {
        let dir = workspace();
        let args = ["estimate", "--model", "ic", "--input", "edge.tsv", "--fn", "har", "--mode", "shapley", "--format", "json", "--trace"];
        let v: serde_json::Value = serde_json::from_str(&run_in(dir.path(), &args).unwrap()).unwrap();
        assert_eq!(v["metadata"]["method"], "estimated");
        assert_eq!(v["values"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn rr_dump_lines_start_at_the_root() {
        let dir = workspace();
        let out = run_in(dir.path(), &["rr-dump", "--model", "ic", "--input", "edge.tsv", "--count", "4", "--root", "1"]).unwrap();
        assert_eq!(out.lines().count(), 4);
        assert!(out.lines().all(|l| l.starts_with("1 | 1:0")));
    }

    #[test]
    fn simulate_prints_one_row_per_run() {
        let dir = workspace();
        let out = run_in(dir.path(), &["simulate", "--model", "ic", "--input", "edge.tsv", "--seeds", "1", "--runs", "3"]).unwrap();
        assert_eq!(out, "run,0,1\n0,inf,0\n1,inf,0\n2,inf,0\n");
    }

    #[test]
    fn usage_errors() {
        let dir = workspace();
        let cases: [&[&str]; 5] = [
            &["exact", "--model", "ic", "--input", "edge.tsv", "--fn", "soi"],
            &["exact", "--model", "ic", "--input", "named.tsv", "--remap", "--fn", "deg"],
            &["exact", "--model", "ic", "--input", "missing.tsv", "--fn", "deg"],
            &["estimate", "--model", "ic", "--input", "edge.tsv", "--fn", "cls"],
            &["exact", "--model", "ic", "--input", "edge.tsv", "--fn", "rch", "--mode", "group"],
        ];
        for args in cases {
            let err = run_in(dir.path(), args).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}");
        }
    }
}
