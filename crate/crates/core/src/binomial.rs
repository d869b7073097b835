//! Binomial-tail significance of a group's internal edges.
//!
//! Each of a group's `deg` incident edges is a trial whose far end lands inside
//! the group with probability `p` under the null model. The score of a group is
//! `-log10 P(X >= din)` for `X ~ Binomial(deg, p)`, computed exactly for small
//! degrees and from the KL-divergence sandwich
//!
//! ```text
//! exp(-deg KL(q||p)) / sqrt(2 deg)  <=  P(X >= din)  <=  exp(-deg KL(q||p))
//! ```
//!
//! otherwise, where `q = din / deg`.

use std::f64::consts::LN_10;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::graph::{group_stats, Graph, Group, GroupStats};

/// Default degree at or below which the exact tail is summed.
pub const DEFAULT_EXACT_THRESHOLD: u64 = 50;

/// Number of trials, number of successes, and success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailParams {
    trials: u64,
    successes: u64,
    p: f64,
}

impl TailParams {
    pub fn new(trials: u64, successes: u64, p: f64) -> Result<Self> {
        if successes > trials {
            return Err(Error::invalid(format!(
                "successes {successes} exceed trials {trials}"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("probability {p} not in (0, 1)")));
        }
        Ok(Self {
            trials,
            successes,
            p,
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn new(first: f64) -> Self {
        Self {
            sum: first,
            carry: 0.0,
        }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln C(n, k)` via log-gamma.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn ln_pmf(n: u64, k: u64, ln_p: f64, ln_not_p: f64) -> f64 {
    ln_choose(n, k) + k as f64 * ln_p + (n - k) as f64 * ln_not_p
}

/// Natural log of the upper tail `P(X >= successes)`.
///
/// Terms are summed as ratios to the largest one, walking away from the mode,
/// so nothing overflows or underflows before the sum converges. When the
/// threshold sits at or below the mean the (shorter) lower tail is summed and
/// the result taken as its complement through `ln_1p`.
pub fn ln_binomial_tail(params: &TailParams) -> f64 {
    let (n, k, p) = (params.trials, params.successes, params.p);
    if k == 0 {
        return 0.0;
    }
    let ln_p = p.ln();
    let ln_not_p = (-p).ln_1p();
    if k as f64 > n as f64 * p {
        let odds = p / (1.0 - p);
        let mut term = 1.0;
        let mut sum = CompensatedSum::new(1.0);
        for i in k..n {
            term *= (n - i) as f64 / (i + 1) as f64 * odds;
            sum.add(term);
            if term <= sum.value() * 1e-17 {
                break;
            }
        }
        (ln_pmf(n, k, ln_p, ln_not_p) + sum.value().ln()).min(0.0)
    } else {
        let inv_odds = (1.0 - p) / p;
        let mut term = 1.0;
        let mut sum = CompensatedSum::new(1.0);
        for i in (1..k).rev() {
            term *= i as f64 / (n - i + 1) as f64 * inv_odds;
            sum.add(term);
            if term <= sum.value() * 1e-17 {
                break;
            }
        }
        let below = (ln_pmf(n, k - 1, ln_p, ln_not_p) + sum.value().ln())
            .exp()
            .min(1.0);
        (-below).ln_1p()
    }
}

/// Exact upper-tail probability `P(X >= successes)`.
pub fn binomial_tail_exact(params: &TailParams) -> f64 {
    ln_binomial_tail(params).exp()
}

/// `-log10 P(X >= successes)`, never negative.
pub fn exact_tail_score(params: &TailParams) -> f64 {
    (-ln_binomial_tail(params) / LN_10).max(0.0)
}

/// Relative entropy `KL(q || p)` in nats, with `0 ln 0 = 0`.
pub fn kl_divergence(q: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("probability {p} not in (0, 1)")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("proportion {q} not in [0, 1]")));
    }
    Ok(kl_unchecked(q, p))
}

fn kl_unchecked(q: f64, p: f64) -> f64 {
    let mut kl = 0.0;
    if q > 0.0 {
        kl += q * (q / p).ln();
    }
    if q < 1.0 {
        kl += (1.0 - q) * ((1.0 - q) / (1.0 - p)).ln();
    }
    kl.max(0.0)
}

/// Lower and upper scores from the KL bounds on the tail.
///
/// `lower = deg KL(din/deg || p) / ln 10` comes from the upper bound on the
/// tail; `upper = lower + log10(2 deg) / 2` from the lower bound.
pub fn approx_scores(deg: u64, din: u64, p: f64) -> Result<(f64, f64)> {
    if deg == 0 {
        return Err(Error::invalid("approximate scores need deg >= 1"));
    }
    if din > deg {
        return Err(Error::invalid(format!("din {din} exceeds deg {deg}")));
    }
    let kl = kl_divergence(din as f64 / deg as f64, p)?;
    let lower = deg as f64 * kl / LN_10;
    Ok((lower, lower + 0.5 * (2.0 * deg as f64).log10()))
}

/// How the node-based success probability is derived from group size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeProbability {
    /// `|g| / n`.
    #[default]
    GroupOverGraph,
    /// `(|g| - 1) / (n - 1)`, the variant without self-edges.
    SelfExcluded,
}

impl NodeProbability {
    pub fn probability(self, group_size: usize, node_count: usize) -> f64 {
        match self {
            NodeProbability::GroupOverGraph if node_count > 0 => {
                group_size as f64 / node_count as f64
            }
            NodeProbability::SelfExcluded if node_count > 1 => {
                group_size.saturating_sub(1) as f64 / (node_count - 1) as f64
            }
            _ => 0.0,
        }
    }
}

/// Trial count used by the edge-based model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeTrials {
    /// `deg`, the same trial count as the node-based model.
    #[default]
    Degree,
    /// `floor((deg + din) / 2)`.
    HalfVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Degrees at or below this use the exact tail.
    pub exact_threshold: u64,
    /// Score 0 whenever `q <= p`. When disabled, such groups fall back to the
    /// exact tail since the KL bounds only hold for `q >= p`.
    pub zero_when_not_above_expected: bool,
    pub node_probability: NodeProbability,
    pub edge_trials: EdgeTrials,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            zero_when_not_above_expected: true,
            node_probability: NodeProbability::GroupOverGraph,
            edge_trials: EdgeTrials::Degree,
        }
    }
}

impl ScoreConfig {
    /// Exact tail at every degree with the insignificance shortcut disabled.
    pub fn exact_override() -> Self {
        Self {
            exact_threshold: u64::MAX,
            zero_when_not_above_expected: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialScore {
    /// `-log10` of the tail, or its approximation; 0 when insignificant.
    pub score: f64,
    /// Score implied by the upper bound on the tail.
    pub lower: f64,
    /// Score implied by the lower bound on the tail.
    pub upper: f64,
    pub used_exact: bool,
    /// `(upper - lower) / lower`; only set on the approximate path.
    pub rel_error_bound: Option<f64>,
    /// False when the observed proportion does not exceed the expected one.
    pub significant: bool,
}

impl BinomialScore {
    pub fn zero() -> Self {
        Self {
            score: 0.0,
            lower: 0.0,
            upper: 0.0,
            used_exact: false,
            rel_error_bound: None,
            significant: false,
        }
    }

    pub fn label(&self) -> SignificanceLabel {
        significance_label(self.score)
    }
}

/// Scores `successes` out of `trials` against success probability `p`.
pub fn binomial_score(trials: u64, successes: u64, p: f64, config: &ScoreConfig) -> BinomialScore {
    debug_assert!(successes <= trials);
    if trials == 0 || p >= 1.0 || p.is_nan() {
        return BinomialScore::zero();
    }
    if p <= 0.0 {
        if successes == 0 {
            return BinomialScore::zero();
        }
        return BinomialScore {
            score: f64::INFINITY,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            used_exact: true,
            rel_error_bound: None,
            significant: true,
        };
    }
    let q = successes as f64 / trials as f64;
    let above = q > p;
    if !above && config.zero_when_not_above_expected {
        return BinomialScore::zero();
    }
    let (lower, upper) = if above {
        let lower = trials as f64 * kl_unchecked(q, p) / LN_10;
        (lower, lower + 0.5 * (2.0 * trials as f64).log10())
    } else {
        (0.0, 0.0)
    };
    if trials <= config.exact_threshold || !above {
        let params = TailParams {
            trials,
            successes,
            p,
        };
        let score = exact_tail_score(&params);
        return BinomialScore {
            score,
            lower,
            upper,
            used_exact: true,
            rel_error_bound: None,
            significant: above && score > 0.0,
        };
    }
    let score = 0.5 * (lower + upper);
    BinomialScore {
        score,
        lower,
        upper,
        used_exact: false,
        rel_error_bound: (lower > 0.0).then(|| (upper - lower) / lower),
        significant: score > 0.0,
    }
}

/// Group-level score for precomputed statistics.
pub fn score_stats(stats: &GroupStats, p: f64, config: &ScoreConfig) -> BinomialScore {
    binomial_score(stats.deg, stats.din, p, config)
}

pub fn node_probability(stats: &GroupStats, node_count: usize, config: &ScoreConfig) -> f64 {
    config.node_probability.probability(stats.size, node_count)
}

/// Node-based score from statistics.
pub fn node_score(stats: &GroupStats, node_count: usize, config: &ScoreConfig) -> BinomialScore {
    score_stats(stats, node_probability(stats, node_count, config), config)
}

/// Edge-based score from statistics, with `p = (deg + din) / 2m`.
pub fn edge_score(stats: &GroupStats, config: &ScoreConfig) -> BinomialScore {
    match config.edge_trials {
        EdgeTrials::Degree => binomial_score(stats.deg, stats.din, stats.p_edge, config),
        EdgeTrials::HalfVolume => {
            binomial_score(stats.volume() / 2, stats.din, stats.p_edge, config)
        }
    }
}

/// Global score from statistics: the tail is multiplied by `C(n, |g|)`.
pub fn global_score(stats: &GroupStats, node_count: usize, config: &ScoreConfig) -> BinomialScore {
    let base = node_score(stats, node_count, config);
    let penalty = ln_choose(node_count as u64, stats.size as u64) / LN_10;
    let score = (base.score - penalty).max(0.0);
    BinomialScore {
        score,
        lower: (base.lower - penalty).max(0.0),
        upper: (base.upper - penalty).max(0.0),
        significant: score > 0.0,
        ..base
    }
}

pub fn score_node_based(graph: &Graph, group: &Group, config: &ScoreConfig) -> Result<BinomialScore> {
    let stats = group_stats(graph, group)?;
    Ok(node_score(&stats, graph.node_count(), config))
}

pub fn score_edge_based(graph: &Graph, group: &Group, config: &ScoreConfig) -> Result<BinomialScore> {
    if graph.edge_count() == 0 {
        return Err(Error::invalid("edge-based score needs at least one edge"));
    }
    let stats = group_stats(graph, group)?;
    Ok(edge_score(&stats, config))
}

pub fn score_global(graph: &Graph, group: &Group, config: &ScoreConfig) -> Result<BinomialScore> {
    let stats = group_stats(graph, group)?;
    Ok(global_score(&stats, graph.node_count(), config))
}

/// `-log10` of the configuration-model p-value bound
/// `C(din + deg, 2 din) C(m, din) / C(2m, 2 din)`.
///
/// The sign is kept: a bound above one gives a negative score.
pub fn pvalue_bound_he(deg: u64, din: u64, edge_count: u64) -> Result<f64> {
    if din > deg || din > edge_count || din + deg > 2 * edge_count {
        return Err(Error::invalid(format!(
            "p-value bound undefined for deg={deg}, din={din}, m={edge_count}"
        )));
    }
    let ln_bound = ln_choose(din + deg, 2 * din) + ln_choose(edge_count, din)
        - ln_choose(2 * edge_count, 2 * din);
    Ok(-ln_bound / LN_10)
}

/// Qualitative band of a score, read like a logarithmic magnitude scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignificanceLabel {
    None,
    Weak,
    Moderate,
    High,
    VeryHigh,
}

impl SignificanceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SignificanceLabel::None => "none",
            SignificanceLabel::Weak => "weak",
            SignificanceLabel::Moderate => "moderate",
            SignificanceLabel::High => "high",
            SignificanceLabel::VeryHigh => "very high",
        }
    }
}

impl fmt::Display for SignificanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bands: 0 none, (0,1) weak, [1,2) moderate, [2,3) high, 3 and above very high.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn significance_label(score: f64) -> SignificanceLabel {
    if !(score > 0.0) {
        SignificanceLabel::None
    } else if score < 1.0 {
        SignificanceLabel::Weak
    } else if score < 2.0 {
        SignificanceLabel::Moderate
    } else if score < 3.0 {
        SignificanceLabel::High
    } else {
        SignificanceLabel::VeryHigh
    }
}
