//! Command-line front end.
//!
//! Every output starts with `#` lines holding the tool version and the full
//! parsed configuration as JSON, so a file records how it was made.
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::binomial::{EdgeTrials, NodeProbability, ScoreConfig, DEFAULT_EXACT_THRESHOLD};
use crate::detect::{extract_level, louvain, Objective, SizeRange};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_candidates, filter_min_size, oriented, overlap_scores, parse_noise_sweep,
    rank_metrics, run_sweep, score_groups, spearman, average_pr, write_sweep_csv,
    write_sweep_jsonl, ExperimentConfig, LevelChoice, Method, ScoreVector, TiePolicy,
};
use crate::graph::{
    load_graph_file, read_groups_file, read_groups_file_interning, write_edge_list,
    write_groups_jsonl, Graph, GraphBuilder, Group, LoadOptions, WeightMode,
};
use crate::group_graph::{build_group_graph, score_group_edges, write_group_edges_jsonl, TrialsMode};
use crate::membership::{membership_config, membership_scores, Aggregator};
use crate::synth::{generate, Preset};

#[derive(Debug, Parser, Serialize)]
#[command(name = "groupsig", version, about = "Score, rank, and evaluate graph communities")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a planted-partition graph and its reference groups.
    Synth(SynthArgs),
    /// Score every group.
    Score(ScoreArgs),
    /// Sort groups by one model's score.
    Rank(ScoreArgs),
    /// Evaluate rankings against reference groups.
    Eval(EvalArgs),
    /// Run Louvain and write the groups of every level.
    Detect(DetectArgs),
    /// Per-node membership scores and their group aggregates.
    Membership(MembershipArgs),
    /// Significance of edges between groups.
    Edges(EdgesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightArg {
    Unweighted,
    Integer,
    Round,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Args, Serialize)]
pub struct GraphInput {
    /// Edge list: `u v` or `u v w` per line.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = WeightArg::Unweighted)]
    pub weights: WeightArg,
    #[arg(long)]
    pub allow_self_loops: bool,
}

impl GraphInput {
    fn load(&self) -> Result<Graph> {
        let mode = match self.weights {
            WeightArg::Unweighted => WeightMode::Unweighted,
            WeightArg::Integer => WeightMode::IntegerWeights,
            WeightArg::Round => WeightMode::RoundToInteger,
        };
        let options = LoadOptions {
            weight_mode: mode,
            allow_self_loops: self.allow_self_loops,
        };
        load_graph_file(&self.graph, &options)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ScoringFlags {
    /// Degrees at or below this use the exact tail.
    #[arg(long, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    pub exact_threshold: u64,
    /// Use `(deg + din) / 2` trials in the edge model.
    #[arg(long)]
    pub half_volume_trials: bool,
    /// Node probability `(|g| - 1) / (n - 1)`.
    #[arg(long)]
    pub self_excluded: bool,
}

impl ScoringFlags {
    fn config(&self) -> ScoreConfig {
        ScoreConfig {
            exact_threshold: self.exact_threshold,
            edge_trials: if self.half_volume_trials {
                EdgeTrials::HalfVolume
            } else {
                EdgeTrials::Degree
            },
            node_probability: if self.self_excluded {
                NodeProbability::SelfExcluded
            } else {
                NodeProbability::GroupOverGraph
            },
            ..ScoreConfig::default()
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub preset: Preset,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; receives `graph.txt` and `groups.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long)]
    pub groups: PathBuf,
    /// node, edge, global, pvalue, max, lower-only, or any method name.
    #[arg(long, default_value = "node")]
    pub model: Method,
    #[command(flatten)]
    pub scoring: ScoringFlags,
    #[arg(long, default_value_t = 3)]
    pub min_size: usize,
    /// Size filter `LO:HI`; overrides `--min-size`.
    #[arg(long)]
    pub size_range: Option<SizeRange>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieArg {
    Undefined,
    Zero,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelArg {
    First,
    Final,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Sweep a synthetic preset instead of reading files.
    #[arg(long, conflicts_with_all = ["groups", "refs", "scores", "graph"])]
    pub preset: Option<Preset>,
    /// Noise levels for a sweep.
    #[arg(long, default_value = "0.025:0.225:0.025")]
    pub noise_sweep: String,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "edge")]
    pub objective: Objective,
    #[arg(long, value_enum, default_value_t = LevelArg::Final)]
    pub level: LevelArg,
    /// Candidate size filter; overrides `--min-size` for candidates.
    #[arg(long)]
    pub size_range: Option<SizeRange>,
    #[arg(long, value_enum, default_value_t = TieArg::Undefined)]
    pub tie_policy: TieArg,
    /// Candidate groups.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Reference groups.
    #[arg(long)]
    pub refs: Option<PathBuf>,
    /// CSV with a `group` column and one numeric column per method.
    #[arg(long, conflicts_with = "graph")]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Comma-separated methods (default: binomial, modularity, conductance,
    /// tpr, size).
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 3)]
    pub min_size: usize,
    #[command(flatten)]
    pub scoring: ScoringFlags,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value = "edge")]
    pub objective: Objective,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub min_size: usize,
    /// Overrides `--min-size`.
    #[arg(long)]
    pub size_range: Option<SizeRange>,
    /// Output directory; receives `level-<k>.jsonl` and `final.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MembershipArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long)]
    pub groups: PathBuf,
    /// median, mean, or q<alpha> such as q0.9.
    #[arg(long, default_value = "median")]
    pub aggregator: Aggregator,
    /// One row per member instead of per group.
    #[arg(long)]
    pub per_node: bool,
    #[arg(long, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    pub exact_threshold: u64,
    #[arg(long, default_value_t = 1)]
    pub min_size: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialsArg {
    Outgoing,
    Total,
}

#[derive(Debug, Args, Serialize)]
pub struct EdgesArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// A partition (groups must not overlap).
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long, value_enum, default_value_t = TrialsArg::Outgoing)]
    pub trials_mode: TrialsArg,
    #[arg(long, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    pub exact_threshold: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => Failure::Usage(msg),
            other => Failure::Data(other),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn require_file(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("input file {} does not exist", path.display())))
    }
}

fn header(cli: &Cli) -> Vec<String> {
    vec![
        format!("groupsig {}", env!("CARGO_PKG_VERSION")),
        format!("config {}", serde_json::to_string(cli).expect("config serializes")),
    ]
}

/// Writes to `path`, or to `stdout` when absent.
fn with_output(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|source| Error::Io {
                path: p.to_owned(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_header(out: &mut dyn Write, header: &[String]) -> Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

pub const SCORE_COLUMNS: [&str; 22] = [
    "group", "size", "deg", "din", "q", "p_node", "p_edge", "intensity", "node_score",
    "node_lower", "node_upper", "node_exact", "rel_error", "edge_score", "global_score",
    "pvalue_he", "modularity", "conductance", "tpr", "model", "score", "label",
];

fn score_record(v: &ScoreVector) -> Vec<String> {
    vec![
        v.group.clone(),
        v.size.to_string(),
        v.deg.to_string(),
        v.din.to_string(),
        v.q.to_string(),
        v.p_node.to_string(),
        v.p_edge.to_string(),
        v.intensity.to_string(),
        v.node.score.to_string(),
        v.node.lower.to_string(),
        v.node.upper.to_string(),
        v.node.used_exact.to_string(),
        fmt_opt(v.node.rel_error_bound),
        v.edge.score.to_string(),
        v.global.to_string(),
        fmt_opt(v.pvalue_he),
        fmt_opt(v.modularity),
        fmt_opt(v.conductance),
        v.tpr.to_string(),
        v.model.name().to_string(),
        v.score.to_string(),
        v.label.as_str().to_string(),
    ]
}

fn write_rows(
    out: &mut dyn Write,
    header: &[String],
    format: Format,
    columns: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
    json_rows: impl Iterator<Item = serde_json::Value>,
) -> Result<()> {
    write_header(out, header)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(columns)?;
            for r in rows {
                w.write_record(&r)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for r in json_rows {
                writeln!(out, "{r}")?;
            }
        }
    }
    Ok(())
}

fn load_scored(args: &ScoreArgs) -> CliResult<(Graph, Vec<Group>)> {
    require_file(&args.input.graph)?;
    require_file(&args.groups)?;
    let graph = args.input.load()?;
    let range = args
        .size_range
        .unwrap_or(SizeRange::new(args.min_size, usize::MAX));
    let groups = read_groups_file(&args.groups, &graph)?
        .into_iter()
        .filter(|g| range.contains(g.len()))
        .collect();
    Ok((graph, groups))
}

fn cmd_synth(cli: &Cli, args: &SynthArgs, stdout: &mut dyn Write) -> CliResult {
    let (graph, groups) = generate(&args.preset.spec(args.noise, args.seed))?;
    let head = header(cli);
    create_dir(&args.out)?;
    let graph_path = args.out.join("graph.txt");
    let groups_path = args.out.join("groups.jsonl");
    with_output(Some(&graph_path), stdout, |w| write_edge_list(w, &graph, &head))?;
    with_output(Some(&groups_path), stdout, |w| write_groups_jsonl(w, &graph, &groups, &head))?;
    writeln!(
        stdout,
        "{} nodes, {} edges, {} groups -> {}",
        graph.node_count(),
        graph.edge_count(),
        groups.len(),
        args.out.display()
    )
    .map_err(Error::from)?;
    Ok(())
}

fn cmd_score(cli: &Cli, args: &ScoreArgs, stdout: &mut dyn Write) -> CliResult {
    let (graph, groups) = load_scored(args)?;
    let vectors = score_groups(&graph, &groups, &args.scoring.config(), args.model)?;
    let head = header(cli);
    with_output(args.out.as_deref(), stdout, |w| {
        write_rows(
            w,
            &head,
            args.format,
            &SCORE_COLUMNS,
            vectors.iter().map(score_record),
            vectors.iter().map(|v| serde_json::to_value(v).expect("serializable")),
        )
    })?;
    Ok(())
}

fn cmd_rank(cli: &Cli, args: &ScoreArgs, stdout: &mut dyn Write) -> CliResult {
    let (graph, groups) = load_scored(args)?;
    let vectors = score_groups(&graph, &groups, &args.scoring.config(), args.model)?;
    let keys = oriented(
        &vectors.iter().map(|v| v.score).collect::<Vec<_>>(),
        args.model.direction(),
    );
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
    let head = header(cli);
    let row = |rank: usize, v: &ScoreVector| {
        vec![
            (rank + 1).to_string(),
            v.group.clone(),
            v.size.to_string(),
            v.score.to_string(),
            v.label.as_str().to_string(),
        ]
    };
    with_output(args.out.as_deref(), stdout, |w| {
        write_rows(
            w,
            &head,
            args.format,
            &["rank", "group", "size", "score", "label"],
            order.iter().enumerate().map(|(r, &i)| row(r, &vectors[i])),
            order.iter().enumerate().map(|(r, &i)| {
                let v = &vectors[i];
                serde_json::json!({
                    "rank": r + 1, "group": v.group, "size": v.size,
                    "score": v.score, "label": v.label.as_str(),
                })
            }),
        )
    })?;
    Ok(())
}

/// Reads a `group,<method>...` score table and aligns it to `groups`.
fn read_score_table(path: &Path, groups: &[Group]) -> Result<Vec<(String, Vec<f64>)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let names: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if names.len() < 2 || names[0] != "group" {
        return Err(Error::Parse {
            line: 1,
            message: "score table needs a `group` column followed by score columns".into(),
        });
    }
    let mut by_group = std::collections::HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .skip(1)
            .map(|x| {
                x.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 2,
                    message: format!("score {x:?} is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        by_group.insert(record[0].to_string(), values);
    }
    let mut columns: Vec<(String, Vec<f64>)> =
        names[1..].iter().map(|n| (n.clone(), Vec::new())).collect();
    for g in groups {
        let row = by_group
            .get(g.id())
            .ok_or_else(|| Error::InvalidGroup {
                group: g.id().to_owned(),
                message: "missing from the score table".into(),
            })?;
        for (col, &v) in columns.iter_mut().zip(row) {
            col.1.push(v);
        }
    }
    Ok(columns)
}

pub const EVAL_COLUMNS: [&str; 8] = [
    "method", "spr", "topPR", "top5PR", "top_size", "no_ranking", "avgPR", "candidates",
];

fn cmd_eval(cli: &Cli, args: &EvalArgs, stdout: &mut dyn Write) -> CliResult {
    let methods = if args.methods.is_empty() {
        Method::STANDARD.to_vec()
    } else {
        args.methods.clone()
    };
    let mut config = ExperimentConfig::new(&methods, args.trials, args.seed);
    config.objective = args.objective;
    config.level = match args.level {
        LevelArg::First => LevelChoice::First,
        LevelArg::Final => LevelChoice::Final,
    };
    config.candidate_sizes = args
        .size_range
        .unwrap_or(SizeRange::new(args.min_size, usize::MAX));
    config.min_reference_size = args.min_size;
    config.score_config = args.scoring.config();
    config.tie_policy = match args.tie_policy {
        TieArg::Undefined => TiePolicy::Undefined,
        TieArg::Zero => TiePolicy::Zero,
    };
    let head = header(cli);

    if let Some(preset) = args.preset {
        let noises = parse_noise_sweep(&args.noise_sweep)?;
        let rows = run_sweep(preset, &noises, &config)?;
        with_output(args.out.as_deref(), stdout, |w| match args.format {
            Format::Csv => write_sweep_csv(w, &rows, &head),
            Format::Jsonl => write_sweep_jsonl(w, &rows, &head),
        })?;
        return Ok(());
    }

    let (Some(groups_path), Some(refs_path)) = (&args.groups, &args.refs) else {
        return Err(Failure::Usage(
            "eval needs --preset, or --groups and --refs with --scores or --graph".into(),
        ));
    };
    require_file(groups_path)?;
    require_file(refs_path)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    if let Some(scores_path) = &args.scores {
        require_file(scores_path)?;
        let mut builder = GraphBuilder::new();
        let candidates = filter_min_size(&read_groups_file_interning(groups_path, &mut builder)?, args.min_size);
        let references = filter_min_size(&read_groups_file_interning(refs_path, &mut builder)?, args.min_size);
        let overlaps = overlap_scores(&candidates, &references)?;
        let reference: Vec<f64> = overlaps.iter().map(|o| o.score).collect();
        let avg = average_pr(&overlaps);
        for (name, values) in read_score_table(scores_path, &candidates)? {
            let direction = name.parse::<Method>().map(Method::direction).unwrap_or_default();
            let spr = spearman(&reference, &oriented(&values, direction))?;
            let metrics = (!values.is_empty())
                .then(|| rank_metrics(&overlaps, &values, direction))
                .transpose()?;
            rows.push(vec![
                name,
                fmt_opt(spr),
                fmt_opt(metrics.map(|m| m.top_pr)),
                fmt_opt(metrics.map(|m| m.top5_pr)),
                fmt_opt(metrics.map(|m| m.top_size)),
                values.windows(2).all(|w| w[0] == w[1]).to_string(),
                fmt_opt(avg),
                candidates.len().to_string(),
            ]);
        }
    } else if let Some(graph_path) = &args.graph {
        require_file(graph_path)?;
        let graph = load_graph_file(graph_path, &LoadOptions::default())?;
        let candidates = filter_min_size(&read_groups_file(groups_path, &graph)?, args.min_size);
        let references = filter_min_size(&read_groups_file(refs_path, &graph)?, args.min_size);
        let (avg, _, trials) = evaluate_candidates(&graph, &candidates, &references, &config)?;
        for t in trials {
            rows.push(vec![
                t.method.name().to_string(),
                fmt_opt(t.spr),
                fmt_opt(t.metrics.map(|m| m.top_pr)),
                fmt_opt(t.metrics.map(|m| m.top5_pr)),
                fmt_opt(t.metrics.map(|m| m.top_size)),
                t.no_ranking.to_string(),
                fmt_opt(avg),
                candidates.len().to_string(),
            ]);
        }
    } else {
        return Err(Failure::Usage("eval with --groups/--refs needs --scores or --graph".into()));
    }
    with_output(args.out.as_deref(), stdout, |w| {
        let json = rows.iter().map(|r| {
            serde_json::Value::Object(
                EVAL_COLUMNS
                    .iter()
                    .zip(r)
                    .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
                    .collect(),
            )
        });
        write_rows(w, &head, args.format, &EVAL_COLUMNS, rows.iter().cloned(), json)
    })?;
    Ok(())
}

fn cmd_detect(cli: &Cli, args: &DetectArgs, stdout: &mut dyn Write) -> CliResult {
    require_file(&args.input.graph)?;
    let graph = args.input.load()?;
    let partition = louvain(&graph, args.objective, args.seed)?;
    let range = args
        .size_range
        .unwrap_or(SizeRange::new(args.min_size, usize::MAX));
    let head = header(cli);
    create_dir(&args.out)?;
    let last = partition.level_count() - 1;
    for level in 0..=last {
        let groups = extract_level(&partition, level, range)?;
        let mut names = vec![format!("level-{level}.jsonl")];
        if level == last {
            names.push("final.jsonl".into());
        }
        for name in names {
            let path = args.out.join(name);
            with_output(Some(&path), stdout, |w| write_groups_jsonl(w, &graph, &groups, &head))?;
        }
        writeln!(stdout, "level {level}: {} groups", groups.len()).map_err(Error::from)?;
    }
    Ok(())
}

fn cmd_membership(cli: &Cli, args: &MembershipArgs, stdout: &mut dyn Write) -> CliResult {
    require_file(&args.input.graph)?;
    require_file(&args.groups)?;
    let graph = args.input.load()?;
    let groups = filter_min_size(&read_groups_file(&args.groups, &graph)?, args.min_size);
    let config = ScoreConfig {
        exact_threshold: args.exact_threshold,
        ..membership_config()
    };
    let mut rows = Vec::new();
    for g in &groups {
        let scores = membership_scores(&graph, g, &config)?;
        if args.per_node {
            for m in &scores {
                rows.push(vec![
                    g.id().to_string(),
                    graph.label(m.node).to_string(),
                    m.deg_node.to_string(),
                    m.din_node.to_string(),
                    m.p.to_string(),
                    m.score.to_string(),
                ]);
            }
        } else {
            let values: Vec<f64> = scores.iter().map(|m| m.score).collect();
            rows.push(vec![
                g.id().to_string(),
                g.len().to_string(),
                args.aggregator.apply(&values)?.to_string(),
            ]);
        }
    }
    let columns: &[&str] = if args.per_node {
        &["group", "node", "deg", "din", "p", "score"]
    } else {
        &["group", "size", "membership_score"]
    };
    let head = header(cli);
    with_output(args.out.as_deref(), stdout, |w| {
        write_rows(w, &head, Format::Csv, columns, rows.into_iter(), std::iter::empty())
    })?;
    Ok(())
}

fn cmd_edges(cli: &Cli, args: &EdgesArgs, stdout: &mut dyn Write) -> CliResult {
    require_file(&args.input.graph)?;
    require_file(&args.groups)?;
    let graph = args.input.load()?;
    let groups = read_groups_file(&args.groups, &graph)?;
    let gg = build_group_graph(&graph, &groups)?;
    let mode = match args.trials_mode {
        TrialsArg::Outgoing => TrialsMode::Outgoing,
        TrialsArg::Total => TrialsMode::Total,
    };
    let config = ScoreConfig {
        exact_threshold: args.exact_threshold,
        ..ScoreConfig::default()
    };
    let records = score_group_edges(&graph, &gg, mode, &config)?;
    let head = header(cli);
    with_output(args.out.as_deref(), stdout, |w| write_group_edges_jsonl(w, &records, &head))?;
    Ok(())
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Synth(a) => cmd_synth(cli, a, stdout),
        Command::Score(a) => cmd_score(cli, a, stdout),
        Command::Rank(a) => cmd_rank(cli, a, stdout),
        Command::Eval(a) => cmd_eval(cli, a, stdout),
        Command::Detect(a) => cmd_detect(cli, a, stdout),
        Command::Membership(a) => cmd_membership(cli, a, stdout),
        Command::Edges(a) => cmd_edges(cli, a, stdout),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let mut buf = Vec::new();
                let r = pool.install(|| dispatch(&cli, &mut buf));
                let _ = stdout.write_all(&buf);
                r
            }
            Err(e) => Err(Failure::Usage(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
