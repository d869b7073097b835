use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Direction;
use crate::baseline::{conductance_from_stats, modularity_from_stats, tpr};
use crate::binomial::{
    edge_score, global_score, node_score, pvalue_bound_he, significance_label, BinomialScore,
    ScoreConfig, SignificanceLabel,
};
use crate::error::{Error, Result};
use crate::graph::{group_stats, Graph, Group, GroupStats};

/// A way of scoring candidate groups for ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Node-based binomial score.
    Binomial,
    /// Lower score only, skipping the exact tail.
    BinomialLower,
    BinomialEdge,
    BinomialGlobal,
    /// Larger of the node- and edge-based scores.
    BinomialMax,
    /// Node-based exact tail at every degree, no zero shortcut.
    BinomialExact,
    /// Configuration-model p-value bound, sign kept.
    PValueHe,
    /// Same bound clamped at 0.
    PValueHeClamped,
    Modularity,
    Conductance,
    Tpr,
    Size,
}

impl Method {
    pub const ALL: [Method; 12] = [
        Method::Binomial,
        Method::BinomialLower,
        Method::BinomialEdge,
        Method::BinomialGlobal,
        Method::BinomialMax,
        Method::BinomialExact,
        Method::PValueHe,
        Method::PValueHeClamped,
        Method::Modularity,
        Method::Conductance,
        Method::Tpr,
        Method::Size,
    ];

    /// The comparison set used in sweeps by default.
    pub const STANDARD: [Method; 5] = [
        Method::Binomial,
        Method::Modularity,
        Method::Conductance,
        Method::Tpr,
        Method::Size,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Binomial => "binomial",
            Method::BinomialLower => "binomial-lower",
            Method::BinomialEdge => "binomial-edge",
            Method::BinomialGlobal => "binomial-global",
            Method::BinomialMax => "binomial-max",
            Method::BinomialExact => "binomial-exact",
            Method::PValueHe => "pvalue-he",
            Method::PValueHeClamped => "pvalue-he-clamped",
            Method::Modularity => "modularity",
            Method::Conductance => "conductance",
            Method::Tpr => "tpr",
            Method::Size => "size",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Method::Conductance => Direction::Ascending,
            _ => Direction::Descending,
        }
    }

    /// Whether this method is one of the binomial family (for no-ranking
    /// accounting).
    pub fn is_binomial(self) -> bool {
        matches!(
            self,
            Method::Binomial
                | Method::BinomialLower
                | Method::BinomialEdge
                | Method::BinomialGlobal
                | Method::BinomialMax
                | Method::BinomialExact
        )
    }

    /// Ranking value of `group`; `stats` must belong to it.
    pub fn evaluate(
        self,
        graph: &Graph,
        group: &Group,
        stats: &GroupStats,
        config: &ScoreConfig,
    ) -> Result<f64> {
        let n = graph.node_count();
        let m = graph.edge_count();
        Ok(match self {
            Method::Binomial => node_score(stats, n, config).score,
            Method::BinomialLower => {
                let cfg = ScoreConfig {
                    exact_threshold: 0,
                    ..*config
                };
                node_score(stats, n, &cfg).lower
            }
            Method::BinomialEdge => edge_score(stats, config).score,
            Method::BinomialGlobal => global_score(stats, n, config).score,
            Method::BinomialMax => node_score(stats, n, config)
                .score
                .max(edge_score(stats, config).score),
            Method::BinomialExact => {
                let cfg = ScoreConfig {
                    node_probability: config.node_probability,
                    ..ScoreConfig::exact_override()
                };
                node_score(stats, n, &cfg).score
            }
            Method::PValueHe => pvalue_bound_he(stats.deg, stats.din, m)?,
            Method::PValueHeClamped => pvalue_bound_he(stats.deg, stats.din, m)?.max(0.0),
            Method::Modularity => modularity_from_stats(stats, m)?,
            Method::Conductance => conductance_from_stats(stats, m)?,
            Method::Tpr => tpr(graph, group)?,
            Method::Size => group.len() as f64,
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    /// Method names, plus the model aliases `node`, `edge`, `global`,
    /// `pvalue`, `max`, `lower-only`, `exact`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let alias = match s.as_str() {
            "node" => Some(Method::Binomial),
            "edge" => Some(Method::BinomialEdge),
            "global" => Some(Method::BinomialGlobal),
            "pvalue" => Some(Method::PValueHe),
            "max" => Some(Method::BinomialMax),
            "lower-only" | "lower" => Some(Method::BinomialLower),
            "exact" => Some(Method::BinomialExact),
            _ => None,
        };
        alias
            .or_else(|| Method::ALL.into_iter().find(|m| m.name() == s))
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}")))
    }
}

/// Every score of one group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreVector {
    pub group: String,
    pub size: usize,
    pub deg: u64,
    pub din: u64,
    pub q: f64,
    pub p_node: f64,
    pub p_edge: f64,
    pub intensity: f64,
    pub node: BinomialScore,
    pub edge: BinomialScore,
    pub global: f64,
    pub pvalue_he: Option<f64>,
    pub modularity: Option<f64>,
    pub conductance: Option<f64>,
    pub tpr: f64,
    /// Method selected for `score` and `label`.
    pub model: Method,
    pub score: f64,
    pub label: SignificanceLabel,
}

pub fn score_vector(graph: &Graph, group: &Group, config: &ScoreConfig, model: Method) -> Result<ScoreVector> {
    let stats = group_stats(graph, group)?;
    let n = graph.node_count();
    let m = graph.edge_count();
    let score = model.evaluate(graph, group, &stats, config)?;
    Ok(ScoreVector {
        group: group.id().to_string(),
        size: stats.size,
        deg: stats.deg,
        din: stats.din,
        q: stats.q,
        p_node: stats.p_node,
        p_edge: stats.p_edge,
        intensity: stats.intensity,
        node: node_score(&stats, n, config),
        edge: edge_score(&stats, config),
        global: global_score(&stats, n, config).score,
        pvalue_he: pvalue_bound_he(stats.deg, stats.din, m).ok(),
        modularity: modularity_from_stats(&stats, m).ok(),
        conductance: conductance_from_stats(&stats, m).ok(),
        tpr: tpr(graph, group)?,
        model,
        score,
        label: significance_label(score.max(0.0)),
    })
}

/// Scores every group in parallel; output order follows `groups`.
pub fn score_groups(graph: &Graph, groups: &[Group], config: &ScoreConfig, model: Method) -> Result<Vec<ScoreVector>> {
    groups
        .par_iter()
        .map(|g| score_vector(graph, g, config, model))
        .collect()
}

/// Ranking values of `method` for each group, in order.
pub fn method_values(graph: &Graph, groups: &[Group], stats: &[GroupStats], method: Method, config: &ScoreConfig) -> Result<Vec<f64>> {
    groups
        .iter()
        .zip(stats)
        .map(|(g, s)| method.evaluate(graph, g, s, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::clique_and_path;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("node".parse::<Method>().unwrap(), Method::Binomial);
        assert_eq!("max".parse::<Method>().unwrap(), Method::BinomialMax);
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn clique_and_path_vectors() {
        let (g, g1, g2) = clique_and_path();
        let cfg = ScoreConfig::default();
        let v = score_groups(&g, &[g1, g2], &cfg, Method::BinomialMax).unwrap();
        assert_eq!(v[0].group, "g1");
        assert!((v[0].node.score - 1.806_179_973_983_887).abs() < 1e-9);
        assert!((v[1].edge.score - 1.431_363_764_158_987).abs() < 1e-9);
        assert_eq!(v[0].score, v[0].node.score);
        assert_eq!(v[1].score, v[1].edge.score);
        assert_eq!(v[0].global, 0.0);
        assert_eq!(v[0].conductance, Some(0.0));
        assert_eq!(v[0].tpr, 1.0);
        assert_eq!(v[1].tpr, 0.0);
        assert_eq!(v[0].label, SignificanceLabel::Moderate);
    }

    #[test]
    fn max_is_at_least_each_model() {
        let (g, g1, g2) = clique_and_path();
        let cfg = ScoreConfig::default();
        for grp in [&g1, &g2] {
            let s = group_stats(&g, grp).unwrap();
            let max = Method::BinomialMax.evaluate(&g, grp, &s, &cfg).unwrap();
            for m in [Method::Binomial, Method::BinomialEdge] {
                assert!(max >= m.evaluate(&g, grp, &s, &cfg).unwrap());
            }
        }
    }

    #[test]
    fn he_bound_keeps_sign_unless_clamped() {
        let edges: Vec<(usize, usize)> = (1..11).map(|v| (0, v)).collect();
        let g = Graph::from_edges(11, &edges).unwrap();
        let grp = Group::new("pair", [0, 1]).unwrap();
        let s = group_stats(&g, &grp).unwrap();
        let raw = Method::PValueHe.evaluate(&g, &grp, &s, &ScoreConfig::default()).unwrap();
        let clamped = Method::PValueHeClamped.evaluate(&g, &grp, &s, &ScoreConfig::default()).unwrap();
        assert!(raw < 0.0);
        assert_eq!(clamped, 0.0);
    }
}
