//! Comparison scorers: group-wise modularity, conductance, triangle
//! participation ratio, and size.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{group_stats, Graph, Group, GroupStats, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineVector {
    pub modularity_q: f64,
    /// Lower is better.
    pub conductance: f64,
    pub tpr: f64,
    pub size: usize,
}

pub fn baselines(graph: &Graph, group: &Group) -> Result<BaselineVector> {
    let stats = group_stats(graph, group)?;
    Ok(BaselineVector {
        modularity_q: modularity_from_stats(&stats, graph.edge_count())?,
        conductance: conductance_from_stats(&stats, graph.edge_count())?,
        tpr: tpr(graph, group)?,
        size: size_score(group),
    })
}

/// `din / m - p_edge^2`, one group's term of Newman modularity.
pub fn modularity_groupwise(graph: &Graph, group: &Group) -> Result<f64> {
    let stats = group_stats(graph, group)?;
    modularity_from_stats(&stats, graph.edge_count())
}

pub fn modularity_from_stats(stats: &GroupStats, edge_count: u64) -> Result<f64> {
    if edge_count == 0 {
        return Err(Error::Undefined("modularity of an edgeless graph".into()));
    }
    Ok(stats.din as f64 / edge_count as f64 - stats.p_edge * stats.p_edge)
}

pub fn conductance(graph: &Graph, group: &Group) -> Result<f64> {
    let stats = group_stats(graph, group)?;
    conductance_from_stats(&stats, graph.edge_count())
}

/// Cut edges over the smaller of the two volumes (`deg + din` for the group,
/// `2m - deg - din` for its complement).
///
/// An edgeless group scores 1; a group holding every edge scores 0.
pub fn conductance_from_stats(stats: &GroupStats, edge_count: u64) -> Result<f64> {
    let volume = stats.volume();
    let complement = 2 * edge_count - volume;
    match (volume, complement) {
        (0, 0) => Err(Error::Undefined(
            "conductance with both volumes zero".into(),
        )),
        (0, _) => Ok(1.0),
        (_, 0) => Ok(0.0),
        (v, c) => Ok(stats.outgoing() as f64 / v.min(c) as f64),
    }
}

/// Members of `group` that lie on at least one triangle inside the group,
/// found by intersecting sorted neighbor lists of the induced subgraph.
pub fn triangle_members(graph: &Graph, group: &Group) -> Result<Vec<NodeId>> {
    group.validate_for(graph)?;
    let members = group.members();
    // local index -> sorted local neighbors with larger index
    let local: std::collections::HashMap<NodeId, usize> =
        members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let forward: Vec<Vec<usize>> = members
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let mut row: Vec<usize> = graph
                .neighbors(u)
                .iter()
                .filter_map(|(v, _)| local.get(v).copied())
                .filter(|&j| j > i)
                .collect();
            row.sort_unstable();
            row
        })
        .collect();
    let mut on_triangle = vec![false; members.len()];
    for (a, row) in forward.iter().enumerate() {
        for &b in row {
            let (x, y) = (row, &forward[b]);
            let (mut i, mut j) = (0, 0);
            while i < x.len() && j < y.len() {
                match x[i].cmp(&y[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        on_triangle[a] = true;
                        on_triangle[b] = true;
                        on_triangle[x[i]] = true;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    Ok(members
        .iter()
        .zip(on_triangle)
        .filter_map(|(&v, t)| t.then_some(v))
        .collect())
}

/// Fraction of members on a triangle whose three corners are all members.
pub fn tpr(graph: &Graph, group: &Group) -> Result<f64> {
    let hits = triangle_members(graph, group)?.len();
    Ok(hits as f64 / group.len() as f64)
}

pub fn size_score(group: &Group) -> usize {
    group.len()
}

/// O(|g|^3) reference used to check [`triangle_members`].
pub fn triangle_members_brute_force(graph: &Graph, group: &Group) -> Vec<NodeId> {
    let m = group.members();
    let mut hit = HashSet::new();
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            if graph.multiplicity(m[a], m[b]) == 0 {
                continue;
            }
            for c in b + 1..m.len() {
                if graph.multiplicity(m[a], m[c]) > 0 && graph.multiplicity(m[b], m[c]) > 0 {
                    hit.extend([m[a], m[b], m[c]]);
                }
            }
        }
    }
    let mut v: Vec<_> = hit.into_iter().collect();
    v.sort_unstable();
    v
}
