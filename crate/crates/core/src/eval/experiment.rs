use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Direction, average_pr, overlap_scores, rank_metrics, spearman, filter_min_size, Method, RankMetrics};
use crate::binomial::ScoreConfig;
use crate::detect::{extract_level, louvain, Objective, SizeRange};
use crate::error::{Error, Result};
use crate::graph::{group_stats, Graph, Group, GroupStats};
use crate::synth::{generate, mix_seed, Preset, SyntheticSpec};

/// What a trial's SPR becomes when a method ties every candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Undefined, and left out of the mean.
    #[default]
    Undefined,
    /// Counted as zero correlation.
    Zero,
}

/// Which Louvain pass supplies the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelChoice {
    First,
    #[default]
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    pub objective: Objective,
    pub level: LevelChoice,
    pub candidate_sizes: SizeRange,
    pub min_reference_size: usize,
    pub score_config: ScoreConfig,
    pub tie_policy: TiePolicy,
}

impl ExperimentConfig {
    pub fn new(methods: &[Method], trials: usize, seed: u64) -> Self {
        Self {
            methods: methods.to_vec(),
            trials,
            seed,
            objective: Objective::EdgeModularity,
            level: LevelChoice::Final,
            candidate_sizes: SizeRange::default(),
            min_reference_size: 3,
            score_config: ScoreConfig::default(),
            tie_policy: TiePolicy::Undefined,
        }
    }
}

#[derive(Debug, Clone)]
pub enum DataSource {
    /// A fresh graph per trial; the spec's own seed is replaced per trial.
    Synthetic(SyntheticSpec),
    /// One fixed graph; trials differ only in the detection seed.
    Loaded { graph: Graph, references: Vec<Group> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodTrial {
    pub method: Method,
    /// `None` when undefined.
    pub spr: Option<f64>,
    /// Every candidate got the same value.
    pub no_ranking: bool,
    pub metrics: Option<RankMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub candidates: usize,
    pub avg_pr: Option<f64>,
    /// All candidates share one overlap score (or fewer than two exist), so
    /// no method can be correlated with it.
    pub reference_constant: bool,
    pub methods: Vec<MethodTrial>,
}

/// One detection run's inputs.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub seed: u64,
    pub graph: Graph,
    pub candidates: Vec<Group>,
    pub references: Vec<Group>,
}

/// Builds trial `trial`: graph, detected candidates, and size-filtered
/// references.
pub fn trial_data(source: &DataSource, config: &ExperimentConfig, trial: usize) -> Result<TrialData> {
    let seed = mix_seed(config.seed, trial as u64);
    let (graph, references) = match source {
        DataSource::Synthetic(spec) => generate(&SyntheticSpec {
            seed,
            ..spec.clone()
        })?,
        DataSource::Loaded { graph, references } => (graph.clone(), references.clone()),
    };
    let partition = louvain(&graph, config.objective, mix_seed(seed, 1))?;
    let level = match config.level {
        LevelChoice::First => 0,
        LevelChoice::Final => partition.level_count() - 1,
    };
    let candidates = extract_level(&partition, level, config.candidate_sizes)?;
    Ok(TrialData {
        seed,
        graph,
        candidates,
        references: filter_min_size(&references, config.min_reference_size),
    })
}

/// Scores `candidates` by every configured method against `references`.
pub fn evaluate_candidates(
    graph: &Graph,
    candidates: &[Group],
    references: &[Group],
    config: &ExperimentConfig,
) -> Result<(Option<f64>, bool, Vec<MethodTrial>)> {
    let overlaps = overlap_scores(candidates, references)?;
    let reference: Vec<f64> = overlaps.iter().map(|o| o.score).collect();
    let reference_constant = reference.len() < 2 || reference.windows(2).all(|w| w[0] == w[1]);
    let stats: Vec<GroupStats> = candidates
        .iter()
        .map(|g| group_stats(graph, g))
        .collect::<Result<_>>()?;
    let methods = config
        .methods
        .iter()
        .map(|&method| {
            if candidates.is_empty() {
                return Ok(MethodTrial {
                    method,
                    spr: None,
                    no_ranking: false,
                    metrics: None,
                });
            }
            let values = super::method_values(graph, candidates, &stats, method, &config.score_config)?;
            let no_ranking = values.windows(2).all(|w| w[0] == w[1]);
            let spr = match (reference_constant, no_ranking, config.tie_policy) {
                (true, _, _) => None,
                (false, true, TiePolicy::Zero) => Some(0.0),
                (false, _, _) => spearman(&reference, &oriented(&values, method.direction()))?,
            };
            Ok(MethodTrial {
                method,
                spr,
                no_ranking,
                metrics: Some(rank_metrics(&overlaps, &values, method.direction())?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((average_pr(&overlaps), reference_constant, methods))
}

/// Flips ascending scores so that larger always ranks higher.
pub fn oriented(values: &[f64], direction: Direction) -> Vec<f64> {
    match direction {
        Direction::Descending => values.to_vec(),
        Direction::Ascending => values.iter().map(|v| -v).collect(),
    }
}

pub fn run_trial(source: &DataSource, config: &ExperimentConfig, trial: usize) -> Result<TrialOutcome> {
    let data = trial_data(source, config, trial)?;
    let (avg_pr, reference_constant, methods) =
        evaluate_candidates(&data.graph, &data.candidates, &data.references, config)?;
    Ok(TrialOutcome {
        trial,
        seed: data.seed,
        candidates: data.candidates.len(),
        avg_pr,
        reference_constant,
        methods,
    })
}

/// Mean and sample standard deviation of the defined values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub count: usize,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let count = v.len();
        if count == 0 {
            return Self {
                mean: None,
                std: None,
                count,
            };
        }
        let mean = v.iter().sum::<f64>() / count as f64;
        let std = (count > 1).then(|| {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        });
        Self {
            mean: Some(mean),
            std,
            count,
        }
    }

    pub fn standard_error(&self) -> Option<f64> {
        self.std.map(|s| s / (self.count as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub spr: Summary,
    pub top_pr: Summary,
    pub top5_pr: Summary,
    pub top_size: Summary,
    /// Fraction of trials with candidates where the method tied them all.
    pub noranking_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub trials: Vec<TrialOutcome>,
    pub methods: Vec<MethodSummary>,
    pub groups: Summary,
    pub avg_pr: Summary,
    pub reference_constant_trials: usize,
}

impl EvalReport {
    pub fn from_trials(trials: Vec<TrialOutcome>, methods: &[Method]) -> Self {
        let summaries = methods
            .iter()
            .enumerate()
            .map(|(i, &method)| {
                let rows: Vec<&MethodTrial> = trials.iter().map(|t| &t.methods[i]).collect();
                let ranked: Vec<&MethodTrial> = rows.iter().copied().filter(|r| r.metrics.is_some()).collect();
                let metric = |f: fn(&RankMetrics) -> f64| Summary::of(ranked.iter().filter_map(|r| r.metrics.as_ref().map(f)));
                MethodSummary {
                    method,
                    spr: Summary::of(rows.iter().filter_map(|r| r.spr)),
                    top_pr: metric(|m| m.top_pr),
                    top5_pr: metric(|m| m.top5_pr),
                    top_size: metric(|m| m.top_size),
                    noranking_rate: if ranked.is_empty() {
                        0.0
                    } else {
                        ranked.iter().filter(|r| r.no_ranking).count() as f64 / ranked.len() as f64
                    },
                }
            })
            .collect();
        Self {
            groups: Summary::of(trials.iter().map(|t| t.candidates as f64)),
            avg_pr: Summary::of(trials.iter().filter_map(|t| t.avg_pr)),
            reference_constant_trials: trials.iter().filter(|t| t.reference_constant).count(),
            methods: summaries,
            trials,
        }
    }

    pub fn method(&self, method: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// Runs all trials in parallel. Results do not depend on scheduling.
pub fn run_experiment(source: &DataSource, config: &ExperimentConfig) -> Result<EvalReport> {
    if config.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if config.methods.is_empty() {
        return Err(Error::invalid("no methods selected"));
    }
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(source, config, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_trials(trials, &config.methods))
}

/// One report per noise level of a preset.
pub fn run_sweep(preset: Preset, noises: &[f64], config: &ExperimentConfig) -> Result<Vec<(f64, EvalReport)>> {
    noises
        .iter()
        .map(|&noise| {
            let source = DataSource::Synthetic(preset.spec(noise, config.seed));
            run_experiment(&source, config).map(|r| (noise, r))
        })
        .collect()
}

/// `LO:HI:STEP`, inclusive of `HI` up to rounding.
pub fn parse_noise_sweep(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::invalid(format!("noise sweep {s:?}: expected LO:HI:STEP")))?;
    let [lo, hi, step] = parts[..] else {
        return Err(Error::invalid(format!("noise sweep {s:?}: expected LO:HI:STEP")));
    };
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(step > 0.0) || hi < lo || lo < 0.0 || hi > 1.0 {
        return Err(Error::invalid(format!("noise sweep {s:?} is empty or out of [0, 1]")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| ((lo + k as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "noise",
    "method",
    "spr_mean",
    "spr_std",
    "spr_trials",
    "topPR_mean",
    "topPR_std",
    "top5PR_mean",
    "avgPR",
    "groups_mean",
    "noranking_rate",
];

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.6}"))
}

/// One CSV row per (noise, method), after `# ` header lines.
pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[(f64, EvalReport)], header: &[String]) -> Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for (noise, report) in rows {
        for m in &report.methods {
            w.write_record([
                format!("{noise}"),
                m.method.name().to_string(),
                opt(m.spr.mean),
                opt(m.spr.std),
                m.spr.count.to_string(),
                opt(m.top_pr.mean),
                opt(m.top_pr.std),
                opt(m.top5_pr.mean),
                opt(report.avg_pr.mean),
                opt(report.groups.mean),
                format!("{:.6}", m.noranking_rate),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Same rows as JSON objects, one per line.
pub fn write_sweep_jsonl<W: Write>(mut out: W, rows: &[(f64, EvalReport)], header: &[String]) -> Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for (noise, report) in rows {
        for m in &report.methods {
            let row = serde_json::json!({
                "noise": noise,
                "method": m.method.name(),
                "spr_mean": m.spr.mean,
                "spr_std": m.spr.std,
                "spr_trials": m.spr.count,
                "topPR_mean": m.top_pr.mean,
                "topPR_std": m.top_pr.std,
                "top5PR_mean": m.top5_pr.mean,
                "avgPR": report.avg_pr.mean,
                "groups_mean": report.groups.mean,
                "noranking_rate": m.noranking_rate,
            });
            writeln!(out, "{row}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        let s = Summary::of([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, Some(2.5));
        assert!((s.std.unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.standard_error().unwrap() - s.std.unwrap() / 2.0).abs() < 1e-15);
        let empty = Summary::of([]);
        assert_eq!((empty.mean, empty.count), (None, 0));
        assert_eq!(Summary::of([7.0]).std, None);
    }

    #[test]
    fn noise_sweep_parsing() {
        let v = parse_noise_sweep("0.025:0.225:0.025").unwrap();
        assert_eq!(v, crate::synth::default_noise_sweep().iter().map(|x| (x * 1e9).round() / 1e9).collect::<Vec<_>>());
        assert_eq!(parse_noise_sweep("0.1:0.1:0.05").unwrap(), vec![0.1]);
        for bad in ["0.1:0.05:0.01", "0:1", "a:b:c", "0:0.5:0", "0:2:0.5"] {
            assert!(parse_noise_sweep(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn perfect_cliques_give_undefined_spr() {
        let spec = SyntheticSpec {
            group_sizes: vec![8; 4],
            internal_probs: vec![1.0; 4],
            noise_prob: 0.0,
            seed: 0,
        };
        let cfg = ExperimentConfig::new(&Method::STANDARD, 1, 3);
        let report = run_experiment(&DataSource::Synthetic(spec), &cfg).unwrap();
        assert_eq!(report.reference_constant_trials, 1);
        for m in &report.methods {
            assert_eq!(m.spr.count, 0, "{}", m.method);
            assert_eq!(m.top_pr.mean, Some(1.0));
        }
        assert_eq!(report.groups.mean, Some(4.0));
    }

    #[test]
    fn tie_policy_zero_counts_ties() {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8)];
        let g = Graph::from_edges(9, &edges).unwrap();
        // c1 and c2 tie on size, differ on overlap
        let refs = vec![Group::new("r", 0..4).unwrap()];
        let cands = vec![Group::new("a", 0..4).unwrap(), Group::new("b", 4..8).unwrap()];
        let mut cfg = ExperimentConfig::new(&[Method::Size, Method::Binomial, Method::Conductance], 1, 0);
        let (_, constant, rows) = evaluate_candidates(&g, &cands, &refs, &cfg).unwrap();
        assert!(!constant);
        assert!(rows[0].no_ranking);
        assert_eq!(rows[0].spr, None);
        assert_eq!(rows[1].spr, Some(1.0));
        // "a" has conductance 1/9, "b" 1/4: lower ranks higher
        assert_eq!(rows[2].spr, Some(1.0));
        cfg.tie_policy = TiePolicy::Zero;
        let (_, _, rows) = evaluate_candidates(&g, &cands, &refs, &cfg).unwrap();
        assert_eq!(rows[0].spr, Some(0.0));
    }

    #[test]
    fn deterministic_and_order_independent() {
        let cfg = ExperimentConfig::new(&Method::STANDARD, 4, 17);
        let src = DataSource::Synthetic(Preset::Syn2.spec(0.05, 0));
        let a = run_experiment(&src, &cfg).unwrap();
        let b = run_experiment(&src, &cfg).unwrap();
        assert_eq!(a, b);
        let sequential: Vec<TrialOutcome> = (0..4).map(|t| run_trial(&src, &cfg, t).unwrap()).collect();
        assert_eq!(a.trials, sequential);
    }

    #[test]
    fn sweep_csv_shape() {
        let cfg = ExperimentConfig::new(&Method::STANDARD, 2, 1);
        let rows = run_sweep(Preset::Syn1, &[0.05, 0.1], &cfg).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows, &["seed=1".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# seed=1"));
        assert_eq!(lines.next().unwrap(), SWEEP_COLUMNS.join(","));
        assert_eq!(lines.count(), 2 * Method::STANDARD.len());
        let mut j = Vec::new();
        write_sweep_jsonl(&mut j, &rows, &[]).unwrap();
        assert_eq!(String::from_utf8(j).unwrap().lines().count(), 10);
    }

    #[test]
    fn loaded_source_reuses_graph() {
        let spec = Preset::Syn1.spec(0.05, 99);
        let (graph, references) = generate(&spec).unwrap();
        let cfg = ExperimentConfig::new(&[Method::Binomial], 2, 5);
        let report = run_experiment(&DataSource::Loaded { graph, references }, &cfg).unwrap();
        assert_eq!(report.trials.len(), 2);
        assert!(report.groups.mean.unwrap() >= 5.0);
    }
}
