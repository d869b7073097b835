//! Undirected multigraph storage and group connectivity statistics.
//!
//! Nodes carry dense ids `0..n` with a label table kept alongside, so the
//! scoring loops index plain vectors. Parallel edges are folded into an
//! integer multiplicity on a single adjacency entry.

mod io;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    load_graph, load_graph_file, read_groups, read_groups_file, read_groups_file_interning,
    read_groups_interning, write_edge_list, write_groups_jsonl, GroupFormat, LoadOptions,
    WeightMode,
};

pub type NodeId = usize;

/// Immutable undirected multigraph.
///
/// A self-loop (only present when ingestion allowed it) counts once towards
/// the edge count and twice towards its owner's degree.
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<(NodeId, u64)>>,
    degree: Vec<u64>,
    edge_count: u64,
}

impl Graph {
    /// Unweighted graph on `node_count` nodes labelled `"0".."n-1"`.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut builder = GraphBuilder::with_nodes(node_count);
        for &(u, v) in edges {
            builder.add_edge(u, v, 1)?;
        }
        Ok(builder.build())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Sorted `(neighbor, multiplicity)` pairs. A self-loop appears as the node itself.
    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, u64)] {
        &self.adjacency[node]
    }

    /// Weighted degree.
    pub fn degree(&self, node: NodeId) -> u64 {
        self.degree[node]
    }

    pub fn multiplicity(&self, u: NodeId, v: NodeId) -> u64 {
        let row = &self.adjacency[u];
        match row.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => row[i].1,
            Err(_) => 0,
        }
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Each undirected edge once as `(u, v, multiplicity)` with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, row)| {
            row.iter()
                .filter(move |&&(v, _)| u <= v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    fn check_node(&self, id: NodeId) -> Result<()> {
        if id >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                id,
                node_count: self.node_count(),
            });
        }
        Ok(())
    }
}

/// Accumulates edges before freezing them into a [`Graph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    rows: Vec<HashMap<NodeId, u64>>,
    allow_self_loops: bool,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder pre-populated with nodes labelled by their ids.
    pub fn with_nodes(node_count: usize) -> Self {
        let mut builder = Self::new();
        for i in 0..node_count {
            builder.intern(&i.to_string());
        }
        builder
    }

    pub fn allow_self_loops(mut self, allow: bool) -> Self {
        self.allow_self_loops = allow;
        self
    }

    /// Dense id for `label`, creating the node on first sight.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        self.rows.push(HashMap::new());
        id
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Adds `multiplicity` parallel copies of `{u, v}`; zero is a no-op.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, multiplicity: u64) -> Result<()> {
        let n = self.labels.len();
        for id in [u, v] {
            if id >= n {
                return Err(Error::NodeOutOfRange { id, node_count: n });
            }
        }
        if u == v && !self.allow_self_loops {
            return Err(Error::SelfLoop {
                line: 0,
                label: self.labels[u].clone(),
            });
        }
        if multiplicity == 0 {
            return Ok(());
        }
        *self.rows[u].entry(v).or_insert(0) += multiplicity;
        if u != v {
            *self.rows[v].entry(u).or_insert(0) += multiplicity;
        }
        Ok(())
    }

    pub fn build(self) -> Graph {
        let mut edge_count = 0u64;
        let mut degree = Vec::with_capacity(self.rows.len());
        let adjacency: Vec<Vec<(NodeId, u64)>> = self
            .rows
            .into_iter()
            .enumerate()
            .map(|(u, row)| {
                let mut row: Vec<(NodeId, u64)> = row.into_iter().collect();
                row.sort_unstable();
                let mut d = 0;
                for &(v, w) in &row {
                    if v == u {
                        d += 2 * w;
                        edge_count += 2 * w;
                    } else {
                        d += w;
                        edge_count += w;
                    }
                }
                degree.push(d);
                row
            })
            .collect();
        Graph {
            labels: self.labels,
            index: self.index,
            adjacency,
            degree,
            edge_count: edge_count / 2,
        }
    }
}

/// A labelled set of nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Group {
    id: String,
    members: Vec<NodeId>,
}

impl Group {
    /// Members are sorted; an empty set or a repeated id is rejected.
    pub fn new(id: impl Into<String>, members: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let id = id.into();
        let mut members: Vec<NodeId> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::InvalidGroup {
                group: id,
                message: "group has no members".into(),
            });
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGroup {
                group: id,
                message: format!("node {} listed twice", w[0]),
            });
        }
        Ok(Self { id, members })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    pub fn validate_for(&self, graph: &Graph) -> Result<()> {
        match self.members.last() {
            Some(&last) => graph.check_node(last),
            None => Ok(()),
        }
    }

    pub(crate) fn member_set(&self) -> HashSet<NodeId> {
        self.members.iter().copied().collect()
    }
}

/// Connectivity summary of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub size: usize,
    /// Edges with at least one endpoint in the group.
    pub deg: u64,
    /// Edges with both endpoints in the group.
    pub din: u64,
    /// `|g| / n`.
    pub p_node: f64,
    /// `(deg + din) / 2m`; zero on an edgeless graph.
    pub p_edge: f64,
    /// Observed proportion `din / deg`, zero when `deg == 0`.
    pub q: f64,
    /// `q / p_node`.
    pub intensity: f64,
}

impl GroupStats {
    pub fn outgoing(&self) -> u64 {
        self.deg - self.din
    }

    /// Sum of member degrees, `deg + din`.
    pub fn volume(&self) -> u64 {
        self.deg + self.din
    }

    /// `q / p` for an arbitrary null-model probability.
    pub fn intensity_for(&self, p: f64) -> f64 {
        if p > 0.0 {
            self.q / p
        } else {
            0.0
        }
    }
}

/// Degree, internal degree, and null-model proportions of `group`.
pub fn group_stats(graph: &Graph, group: &Group) -> Result<GroupStats> {
    group.validate_for(graph)?;
    let members = group.member_set();
    let mut internal_twice = 0u64;
    let mut outgoing = 0u64;
    for &u in group.members() {
        for &(v, w) in graph.neighbors(u) {
            if v == u {
                internal_twice += 2 * w;
            } else if members.contains(&v) {
                internal_twice += w;
            } else {
                outgoing += w;
            }
        }
    }
    let din = internal_twice / 2;
    let deg = din + outgoing;
    Ok(stats_from_counts(graph, group.len(), deg, din))
}

pub(crate) fn stats_from_counts(graph: &Graph, size: usize, deg: u64, din: u64) -> GroupStats {
    let n = graph.node_count();
    let m = graph.edge_count();
    let p_node = if n > 0 { size as f64 / n as f64 } else { 0.0 };
    let p_edge = if m > 0 {
        (deg + din) as f64 / (2 * m) as f64
    } else {
        0.0
    };
    let q = if deg > 0 { din as f64 / deg as f64 } else { 0.0 };
    let intensity = if p_node > 0.0 { q / p_node } else { 0.0 };
    GroupStats {
        size,
        deg,
        din,
        p_node,
        p_edge,
        q,
        intensity,
    }
}
