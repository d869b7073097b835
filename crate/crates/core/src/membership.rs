//! Binomial significance of a single node's membership in its group, and
//! group scores aggregated from member scores.

use serde::{Deserialize, Serialize};

use crate::binomial::{binomial_score, node_score, NodeProbability, ScoreConfig};
use crate::error::{Error, Result};
use crate::fixtures::dumbbell;
use crate::graph::{group_stats, Graph, Group, NodeId};

/// Node-level config: self-excluded `p = (|g| - 1) / (n - 1)`.
pub fn membership_config() -> ScoreConfig {
    ScoreConfig {
        node_probability: NodeProbability::SelfExcluded,
        ..ScoreConfig::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipScore {
    pub node: NodeId,
    pub deg_node: u64,
    /// Edges from the node to other members.
    pub din_node: u64,
    pub p: f64,
    pub score: f64,
}

fn score_member(
    graph: &Graph,
    group: &Group,
    node: NodeId,
    is_member: impl Fn(NodeId) -> bool,
    config: &ScoreConfig,
) -> MembershipScore {
    let deg_node = graph.degree(node);
    let din_node: u64 = graph
        .neighbors(node)
        .iter()
        .filter(|&&(v, _)| v != node && is_member(v))
        .map(|&(_, w)| w)
        .sum();
    let p = config
        .node_probability
        .probability(group.len(), graph.node_count());
    let score = binomial_score(deg_node, din_node, p, config).score;
    MembershipScore {
        node,
        deg_node,
        din_node,
        p,
        score,
    }
}

pub fn membership_score(
    graph: &Graph,
    group: &Group,
    node: NodeId,
    config: &ScoreConfig,
) -> Result<MembershipScore> {
    group.validate_for(graph)?;
    if !group.contains(node) {
        return Err(Error::InvalidGroup {
            group: group.id().to_owned(),
            message: format!("node {node} is not a member"),
        });
    }
    Ok(score_member(graph, group, node, |v| group.contains(v), config))
}

/// Scores of every member, in member order.
pub fn membership_scores(
    graph: &Graph,
    group: &Group,
    config: &ScoreConfig,
) -> Result<Vec<MembershipScore>> {
    group.validate_for(graph)?;
    let members = group.member_set();
    Ok(group
        .members()
        .iter()
        .map(|&v| score_member(graph, group, v, |u| members.contains(&u), config))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregator {
    Median,
    Mean,
    /// Linear interpolation between order statistics, `alpha` in `[0, 1]`.
    Quantile(f64),
}

impl Aggregator {
    pub fn apply(self, values: &[f64]) -> Result<f64> {
        if values.is_empty() {
            return Err(Error::invalid("cannot aggregate an empty list"));
        }
        match self {
            Aggregator::Mean => Ok(values.iter().sum::<f64>() / values.len() as f64),
            Aggregator::Median => Aggregator::Quantile(0.5).apply(values),
            Aggregator::Quantile(alpha) => {
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::invalid(format!("quantile {alpha} not in [0, 1]")));
                }
                let mut sorted = values.to_vec();
                sorted.sort_by(f64::total_cmp);
                let h = (sorted.len() - 1) as f64 * alpha;
                let lo = h.floor() as usize;
                let hi = (lo + 1).min(sorted.len() - 1);
                Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
            }
        }
    }
}

impl std::str::FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Aggregator::Median),
            "mean" => Ok(Aggregator::Mean),
            other => other
                .strip_prefix('q')
                .and_then(|a| a.parse::<f64>().ok())
                .filter(|a| (0.0..=1.0).contains(a))
                .map(Aggregator::Quantile)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "aggregator {other:?}: expected median, mean, or q<alpha>"
                    ))
                }),
        }
    }
}

/// Aggregate of member scores; the median by default.
pub fn group_score_median_membership(
    graph: &Graph,
    group: &Group,
    aggregator: Aggregator,
    config: &ScoreConfig,
) -> Result<f64> {
    let scores: Vec<f64> = membership_scores(graph, group, config)?
        .into_iter()
        .map(|m| m.score)
        .collect();
    aggregator.apply(&scores)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub clique_size: usize,
    pub bridge_edges: usize,
    pub node_count: usize,
    /// Node-based group scores of the first clique, the second, and their union.
    pub group_binomial: [f64; 3],
    /// Median membership scores of the same three groups.
    pub median_membership: [f64; 3],
}

impl ResolutionReport {
    /// The union outscores both cliques on the group-level score.
    pub fn union_wins_group_binomial(&self) -> bool {
        self.group_binomial[2] > self.group_binomial[0]
            && self.group_binomial[2] > self.group_binomial[1]
    }

    /// Both cliques outscore the union on median membership.
    pub fn cliques_win_median_membership(&self) -> bool {
        self.median_membership[0] > self.median_membership[2]
            && self.median_membership[1] > self.median_membership[2]
    }
}

/// Scores two bridged cliques separately and joined, in a graph padded with
/// `ambient_nodes` isolated nodes.
pub fn resolution_demo(
    clique_size: usize,
    bridge_edges: usize,
    ambient_nodes: usize,
) -> Result<ResolutionReport> {
    if clique_size < 2 {
        return Err(Error::invalid("cliques need at least two nodes"));
    }
    if bridge_edges > clique_size * clique_size {
        return Err(Error::invalid("more bridges than distinct node pairs"));
    }
    let (graph, g1, g2) = dumbbell(clique_size, bridge_edges, ambient_nodes);
    let union = Group::new("union", g1.members().iter().chain(g2.members()).copied())?;
    let group_cfg = ScoreConfig::default();
    let member_cfg = membership_config();
    let mut group_binomial = [0.0; 3];
    let mut median_membership = [0.0; 3];
    for (i, grp) in [&g1, &g2, &union].into_iter().enumerate() {
        let stats = group_stats(&graph, grp)?;
        group_binomial[i] = node_score(&stats, graph.node_count(), &group_cfg).score;
        median_membership[i] =
            group_score_median_membership(&graph, grp, Aggregator::Median, &member_cfg)?;
    }
    Ok(ResolutionReport {
        clique_size,
        bridge_edges,
        node_count: graph.node_count(),
        group_binomial,
        median_membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::score_stats;
    use crate::graph::GraphBuilder;

    /// n = 20, group {0..5}; node 0 has 3 edges inside and 1 outside.
    fn twenty_node_example() -> (Graph, Group) {
        let mut b = GraphBuilder::with_nodes(20);
        for v in [1, 2, 3, 10] {
            b.add_edge(0, v, 1).unwrap();
        }
        (b.build(), Group::new("g", 0..5).unwrap())
    }

    #[test]
    fn twenty_node_membership_example() {
        let (g, grp) = twenty_node_example();
        let m = membership_score(&g, &grp, 0, &membership_config()).unwrap();
        assert_eq!((m.deg_node, m.din_node), (4, 3));
        assert!((m.p - 4.0 / 19.0).abs() < 1e-15);
        // 4 p^3 (1 - p) + p^4 at p = 4/19
        let p = 4.0f64 / 19.0;
        let tail = 4.0 * p.powi(3) * (1.0 - p) + p.powi(4);
        assert!((tail - 0.031_430_084).abs() < 1e-9);
        assert!((m.score + tail.log10()).abs() < 1e-12);
        assert!((m.score - 1.50).abs() < 0.01);
    }

    #[test]
    fn all_edges_outside_scores_zero() {
        let mut b = GraphBuilder::with_nodes(10);
        b.add_edge(0, 5, 1).unwrap();
        b.add_edge(0, 6, 1).unwrap();
        let g = b.build();
        let grp = Group::new("g", [0, 1, 2]).unwrap();
        assert_eq!(membership_score(&g, &grp, 0, &membership_config()).unwrap().score, 0.0);
    }

    #[test]
    fn single_inside_edge() {
        let g = Graph::from_edges(10, &[(0, 1)]).unwrap();
        let grp = Group::new("g", [0, 1, 2]).unwrap();
        let m = membership_score(&g, &grp, 0, &membership_config()).unwrap();
        assert!((m.score + (2.0f64 / 9.0).log10()).abs() < 1e-12);
    }

    #[test]
    fn non_member_rejected() {
        let (g, grp) = twenty_node_example();
        assert!(membership_score(&g, &grp, 12, &membership_config()).is_err());
    }

    #[test]
    fn matches_group_score_on_single_node_stats() {
        let (g, grp) = twenty_node_example();
        let cfg = membership_config();
        for m in membership_scores(&g, &grp, &cfg).unwrap() {
            let stats = crate::graph::stats_from_counts(&g, 1, m.deg_node, m.din_node);
            assert_eq!(score_stats(&stats, m.p, &cfg).score, m.score);
        }
    }

    #[test]
    fn symmetric_group_median_equals_mean() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        let g = Graph::from_edges(50, &edges).unwrap();
        let grp = Group::new("k5", 0..5).unwrap();
        let cfg = membership_config();
        let median = group_score_median_membership(&g, &grp, Aggregator::Median, &cfg).unwrap();
        let mean = group_score_median_membership(&g, &grp, Aggregator::Mean, &cfg).unwrap();
        let single = membership_score(&g, &grp, 0, &cfg).unwrap().score;
        assert!((median - single).abs() < 1e-12 && (mean - single).abs() < 1e-12);
    }

    #[test]
    fn isolated_singleton() {
        let g = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let grp = Group::new("s", [0]).unwrap();
        let s = group_score_median_membership(&g, &grp, Aggregator::Median, &membership_config()).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(Aggregator::Median.apply(&v).unwrap(), 2.5);
        assert_eq!(Aggregator::Quantile(0.0).apply(&v).unwrap(), 1.0);
        assert_eq!(Aggregator::Quantile(1.0).apply(&v).unwrap(), 4.0);
        assert!((Aggregator::Quantile(0.25).apply(&v).unwrap() - 1.75).abs() < 1e-15);
        assert!(Aggregator::Quantile(1.5).apply(&v).is_err());
        assert!(Aggregator::Mean.apply(&[]).is_err());
        assert_eq!("q0.9".parse::<Aggregator>().unwrap(), Aggregator::Quantile(0.9));
        assert!("q2".parse::<Aggregator>().is_err());
    }

    #[test]
    fn score_falls_as_group_grows() {
        // node 0: 4 edges, 3 into the group; growing the group raises p
        let mut b = GraphBuilder::with_nodes(200);
        for v in [1, 2, 3, 150] {
            b.add_edge(0, v, 1).unwrap();
        }
        let g = b.build();
        let cfg = membership_config();
        let mut prev = f64::INFINITY;
        for size in 4..40 {
            let grp = Group::new("g", 0..size).unwrap();
            let s = membership_score(&g, &grp, 0, &cfg).unwrap().score;
            assert!(s < prev, "size {size}: {s} >= {prev}");
            prev = s;
        }
    }

    #[test]
    fn median_ignores_minority_changes() {
        let base = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mut changed = base;
        changed[0] = 0.5;
        changed[4] = 90.0;
        assert_eq!(
            Aggregator::Median.apply(&base).unwrap(),
            Aggregator::Median.apply(&changed).unwrap()
        );
    }

    #[test]
    fn resolution_limit_small_cliques() {
        let r = resolution_demo(6, 1, 10_000 - 12).unwrap();
        assert_eq!(r.node_count, 10_000);
        assert!(r.union_wins_group_binomial(), "{r:?}");
        assert!(r.cliques_win_median_membership(), "{r:?}");
    }

    #[test]
    fn five_edge_groups_join_below_size_condition() {
        // two 4-node diamonds (5 edges each) joined by one bridge; group size
        // 4/200 is below 2^-5 of the graph, so the union must win
        let diamond = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
        let mut edges: Vec<(usize, usize)> = diamond.to_vec();
        edges.extend(diamond.iter().map(|&(u, v)| (u + 4, v + 4)));
        edges.push((1, 5));
        let g = Graph::from_edges(200, &edges).unwrap();
        let cfg = ScoreConfig::default();
        let score = |grp: &Group| node_score(&group_stats(&g, grp).unwrap(), 200, &cfg).score;
        let g1 = Group::new("g1", 0..4).unwrap();
        let union = Group::new("u", 0..8).unwrap();
        // 4/200 is below the 1/32 crossover density
        assert!(score(&union) > score(&g1));
    }

    #[test]
    fn unbridged_join_lowers_every_member() {
        let (graph, g1, g2) = dumbbell(5, 0, 200);
        let union = Group::new("u", g1.members().iter().chain(g2.members()).copied()).unwrap();
        let cfg = membership_config();
        let apart = membership_scores(&graph, &g1, &cfg).unwrap();
        let joined = membership_scores(&graph, &union, &cfg).unwrap();
        for a in &apart {
            let j = joined.iter().find(|j| j.node == a.node).unwrap();
            assert!(j.score < a.score);
        }
    }
}
