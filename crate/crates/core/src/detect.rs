//! Candidate groups from Louvain modularity optimization.
//!
//! Two objectives share one implementation. Both are sums over communities
//! of `delta(c) / m`:
//!
//! * edge modularity (Newman): `delta = din - (deg + din)^2 / 4m`
//! * node modularity: `delta = din - deg * |c| / n`
//!
//! A move of node `i` into community `c` gains
//! `delta(c + i) - delta(c) - delta({i})`, which only needs the community's
//! cached `din`, total strength, and node count.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Group, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    #[default]
    EdgeModularity,
    NodeModularity,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" | "edge-modularity" => Ok(Objective::EdgeModularity),
            "node" | "node-modularity" => Ok(Objective::NodeModularity),
            other => Err(Error::invalid(format!("unknown objective {other:?}"))),
        }
    }
}

/// Exhaustive, exclusive community assignment plus the assignment after each
/// Louvain pass (the last level equals `assignment`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    levels: Vec<Vec<usize>>,
}

/// Relabels communities `0..k` in order of first appearance.
fn normalize(assignment: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

impl Partition {
    /// Single-level partition from an arbitrary labelling.
    pub fn from_assignment(assignment: &[usize]) -> Self {
        let assignment = normalize(assignment);
        Self {
            levels: vec![assignment.clone()],
            assignment,
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |&c| c + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl Default for SizeRange {
    fn default() -> Self {
        Self {
            min: 3,
            max: usize::MAX,
        }
    }
}

impl SizeRange {
    pub fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, size: usize) -> bool {
        (self.min..=self.max).contains(&size)
    }
}

impl std::str::FromStr for SizeRange {
    type Err = Error;

    /// `LO:HI`, with either side optional.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("size range {s:?}: expected LO:HI")))?;
        let parse = |x: &str, default: usize| -> Result<usize> {
            if x.is_empty() {
                Ok(default)
            } else {
                x.parse()
                    .map_err(|_| Error::invalid(format!("size range {s:?}: bad bound {x:?}")))
            }
        };
        let range = SizeRange::new(parse(lo, 0)?, parse(hi, usize::MAX)?);
        if range.min > range.max {
            return Err(Error::invalid(format!("size range {s:?} is empty")));
        }
        Ok(range)
    }
}

/// Groups of one level, ordered by community index and filtered by size.
pub fn extract_level(partition: &Partition, level: usize, range: SizeRange) -> Result<Vec<Group>> {
    let assignment = partition.levels.get(level).ok_or_else(|| {
        Error::invalid(format!(
            "level {level} out of range ({} levels)",
            partition.level_count()
        ))
    })?;
    let k = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); k];
    for (v, &c) in assignment.iter().enumerate() {
        members[c].push(v);
    }
    members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| range.contains(m.len()))
        .map(|(c, m)| Group::new(format!("c{c}"), m))
        .collect()
}

/// Groups of the final level.
pub fn extract_final(partition: &Partition, range: SizeRange) -> Result<Vec<Group>> {
    extract_level(partition, partition.level_count() - 1, range)
}

/// Per-community objective terms, scaled so the total is `sum / m`.
#[derive(Debug, Clone, Copy)]
struct Scorer {
    objective: Objective,
    edges: f64,
    nodes: f64,
}

impl Scorer {
    fn delta(&self, din: f64, strength: f64, size: f64) -> f64 {
        match self.objective {
            Objective::EdgeModularity => din - strength * strength / (4.0 * self.edges),
            Objective::NodeModularity => din - (strength - din) * size / self.nodes,
        }
    }
}

/// Total objective of an assignment over `graph`.
pub fn modularity_total(graph: &Graph, assignment: &[usize], objective: Objective) -> Result<f64> {
    if assignment.len() != graph.node_count() {
        return Err(Error::invalid(format!(
            "assignment covers {} of {} nodes",
            assignment.len(),
            graph.node_count()
        )));
    }
    if graph.edge_count() == 0 {
        return Err(Error::Undefined("modularity of an edgeless graph".into()));
    }
    let k = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut din = vec![0.0; k];
    let mut strength = vec![0.0; k];
    let mut size = vec![0.0; k];
    for &c in assignment {
        size[c] += 1.0;
    }
    for (u, v, w) in graph.edges() {
        let w = w as f64;
        let (cu, cv) = (assignment[u], assignment[v]);
        strength[cu] += w;
        strength[cv] += w;
        if cu == cv {
            din[cu] += w;
        }
    }
    let scorer = Scorer {
        objective,
        edges: graph.edge_count() as f64,
        nodes: graph.node_count() as f64,
    };
    let total: f64 = (0..k)
        .map(|c| scorer.delta(din[c], strength[c], size[c]))
        .sum();
    Ok(total / scorer.edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LouvainConfig {
    pub objective: Objective,
    pub seed: u64,
    /// Cap on local-move sweeps per level.
    pub max_sweeps: usize,
    pub max_levels: usize,
}

impl LouvainConfig {
    pub fn new(objective: Objective, seed: u64) -> Self {
        Self {
            objective,
            seed,
            max_sweeps: 1000,
            max_levels: 64,
        }
    }
}

/// Weighted graph of one Louvain level. Self-loop weight counts once towards
/// `din` and twice towards strength.
#[derive(Debug, Clone)]
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    strength: Vec<f64>,
    size: Vec<f64>,
}

impl LevelGraph {
    fn from_graph(graph: &Graph) -> Self {
        let n = graph.node_count();
        let mut adj = vec![Vec::new(); n];
        let mut loops = vec![0.0; n];
        for (u, row) in adj.iter_mut().enumerate() {
            for &(v, w) in graph.neighbors(u) {
                if u == v {
                    loops[u] = w as f64;
                } else {
                    row.push((v, w as f64));
                }
            }
        }
        let strength = (0..n).map(|u| graph.degree(u) as f64).collect();
        Self {
            adj,
            loops,
            strength,
            size: vec![1.0; n],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Collapses each community into one node; `comm` must be normalized.
    fn aggregate(&self, comm: &[usize]) -> Self {
        let k = comm.iter().max().map_or(0, |&c| c + 1);
        let mut loops = vec![0.0; k];
        let mut strength = vec![0.0; k];
        let mut size = vec![0.0; k];
        let mut rows: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        for i in 0..self.len() {
            let ci = comm[i];
            loops[ci] += self.loops[i];
            strength[ci] += self.strength[i];
            size[ci] += self.size[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    if i < j {
                        loops[ci] += w;
                    }
                } else {
                    *rows[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj = rows
            .into_iter()
            .map(|row| {
                let mut row: Vec<(usize, f64)> = row.into_iter().collect();
                row.sort_by_key(|&(c, _)| c);
                row
            })
            .collect();
        Self {
            adj,
            loops,
            strength,
            size,
        }
    }
}

const GAIN_EPS: f64 = 1e-9;

type MoveObserver<'a> = Option<&'a mut dyn FnMut(&[usize])>;

/// One local-moving phase. Returns the normalized community of each level
/// node and whether any node moved. `observer` sees the assignment after
/// every move.
fn local_moving(
    level: &LevelGraph,
    scorer: &Scorer,
    rng: &mut ChaCha8Rng,
    max_sweeps: usize,
    mut observer: MoveObserver<'_>,
) -> (Vec<usize>, bool) {
    let n = level.len();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut c_din = level.loops.clone();
    let mut c_strength = level.strength.clone();
    let mut c_size = level.size.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut link = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;

    for _ in 0..max_sweeps {
        let mut moved = false;
        for &i in &order {
            let home = comm[i];
            for &(j, w) in &level.adj[i] {
                let c = comm[j];
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                link[c] += w;
            }
            let (loop_i, str_i, size_i) = (level.loops[i], level.strength[i], level.size[i]);
            c_din[home] -= loop_i + link[home];
            c_strength[home] -= str_i;
            c_size[home] -= size_i;

            let alone = scorer.delta(loop_i, str_i, size_i);
            let gain = |c: usize, k: f64, din: &[f64], st: &[f64], sz: &[f64]| {
                scorer.delta(din[c] + loop_i + k, st[c] + str_i, sz[c] + size_i)
                    - scorer.delta(din[c], st[c], sz[c])
                    - alone
            };
            let mut best = home;
            let mut best_gain = gain(home, link[home], &c_din, &c_strength, &c_size);
            for &c in &touched {
                if c == home {
                    continue;
                }
                let g = gain(c, link[c], &c_din, &c_strength, &c_size);
                if g > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = g;
                }
            }
            c_din[best] += loop_i + link[best];
            c_strength[best] += str_i;
            c_size[best] += size_i;
            comm[i] = best;
            for &c in &touched {
                link[c] = 0.0;
                seen[c] = false;
            }
            touched.clear();
            if best != home {
                moved = true;
                if let Some(obs) = observer.as_mut() {
                    obs(&comm);
                }
            }
        }
        moved_any |= moved;
        if !moved {
            break;
        }
    }
    (normalize(&comm), moved_any)
}

/// Louvain with the default sweep and level caps.
pub fn louvain(graph: &Graph, objective: Objective, seed: u64) -> Result<Partition> {
    louvain_with(graph, &LouvainConfig::new(objective, seed))
}

pub fn louvain_with(graph: &Graph, config: &LouvainConfig) -> Result<Partition> {
    if graph.edge_count() == 0 {
        return Err(Error::invalid("Louvain needs at least one edge"));
    }
    let scorer = Scorer {
        objective: config.objective,
        edges: graph.edge_count() as f64,
        nodes: graph.node_count() as f64,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut level = LevelGraph::from_graph(graph);
    let mut assignment: Vec<usize> = (0..graph.node_count()).collect();
    let mut levels = Vec::new();
    for _ in 0..config.max_levels {
        let (comm, moved) = local_moving(&level, &scorer, &mut rng, config.max_sweeps, None);
        if !moved {
            break;
        }
        assignment = assignment.iter().map(|&c| comm[c]).collect();
        levels.push(assignment.clone());
        let next = level.aggregate(&comm);
        if next.len() == level.len() {
            break;
        }
        level = next;
    }
    if levels.is_empty() {
        levels.push(assignment.clone());
    }
    Ok(Partition { assignment, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    fn random_graph(n: usize, density: f64, seed: u64) -> Graph {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < density {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn two_triangles_split() {
        for objective in [Objective::EdgeModularity, Objective::NodeModularity] {
            let p = louvain(&two_triangles(), objective, 7).unwrap();
            let a = p.assignment();
            assert_eq!(p.community_count(), 2);
            assert!(a[0] == a[1] && a[1] == a[2]);
            assert!(a[3] == a[4] && a[4] == a[5]);
            assert_ne!(a[0], a[3]);
        }
        let p = louvain(&two_triangles(), Objective::EdgeModularity, 7).unwrap();
        let q = modularity_total(&two_triangles(), p.assignment(), Objective::EdgeModularity).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        let groups = extract_final(&p, SizeRange::default()).unwrap();
        assert_eq!(groups.len(), 2);
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let p = louvain(&g, Objective::EdgeModularity, 0).unwrap();
        assert_eq!(p.assignment(), &[0, 0]);
    }

    #[test]
    fn edgeless_graph_rejected() {
        assert!(louvain(&Graph::from_edges(3, &[]).unwrap(), Objective::EdgeModularity, 0).is_err());
    }

    #[test]
    fn node_modularity_extremes() {
        let g = random_graph(40, 0.2, 1);
        let one = vec![0; 40];
        assert_eq!(modularity_total(&g, &one, Objective::NodeModularity).unwrap(), 0.0);
        // complete tripartite graph split along its parts: din = 0 everywhere
        let mut edges = Vec::new();
        for u in 0..30 {
            for v in u + 1..30 {
                if u % 3 != v % 3 {
                    edges.push((u, v));
                }
            }
        }
        let tri = Graph::from_edges(30, &edges).unwrap();
        let parts: Vec<usize> = (0..30).map(|v| v % 3).collect();
        let q = modularity_total(&tri, &parts, Objective::NodeModularity).unwrap();
        assert!(q < 0.0 && q > -1.0, "{q}");
        assert!((q + 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn node_modularity_approaches_one() {
        let mut prev = 0.0;
        for k in [2usize, 5, 20, 80] {
            let mut edges = Vec::new();
            for c in 0..k {
                let base = 3 * c;
                edges.extend([(base, base + 1), (base + 1, base + 2), (base + 2, base)]);
            }
            let g = Graph::from_edges(3 * k, &edges).unwrap();
            let parts: Vec<usize> = (0..3 * k).map(|v| v / 3).collect();
            let q = modularity_total(&g, &parts, Objective::NodeModularity).unwrap();
            assert!(q > prev);
            prev = q;
        }
        assert!(prev > 0.98);
    }

    #[test]
    fn level_extraction() {
        let g = two_triangles();
        let p = louvain(&g, Objective::EdgeModularity, 1).unwrap();
        assert!(extract_level(&p, p.level_count(), SizeRange::default()).is_err());
        let tiny = Partition::from_assignment(&[0, 0, 0, 1, 1, 2]);
        assert_eq!(extract_level(&tiny, 0, SizeRange::default()).unwrap().len(), 1);
        assert_eq!(extract_level(&tiny, 0, SizeRange::new(1, usize::MAX)).unwrap().len(), 3);
        assert_eq!(extract_level(&tiny, 0, SizeRange::new(2, 2)).unwrap().len(), 1);
        assert_eq!("50:500".parse::<SizeRange>().unwrap(), SizeRange::new(50, 500));
        assert_eq!(":9".parse::<SizeRange>().unwrap(), SizeRange::new(0, 9));
        assert!("9:1".parse::<SizeRange>().is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let g = random_graph(80, 0.08, 3);
        let a = louvain(&g, Objective::EdgeModularity, 11).unwrap();
        let b = louvain(&g, Objective::EdgeModularity, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_move_improves_objective() {
        for objective in [Objective::EdgeModularity, Objective::NodeModularity] {
            for seed in 0..5 {
                let g = random_graph(60, 0.1, seed);
                let level = LevelGraph::from_graph(&g);
                let scorer = Scorer {
                    objective,
                    edges: g.edge_count() as f64,
                    nodes: g.node_count() as f64,
                };
                let mut prev = modularity_total(&g, &(0..60).collect::<Vec<_>>(), objective).unwrap();
                let mut moves = 0;
                let mut obs = |comm: &[usize]| {
                    let q = modularity_total(&g, &normalize(comm), objective).unwrap();
                    assert!(q > prev, "{objective:?}: {q} <= {prev}");
                    prev = q;
                    moves += 1;
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                local_moving(&level, &scorer, &mut rng, 1000, Some(&mut obs));
                assert!(moves > 0);
            }
        }
    }

    #[test]
    fn objective_nondecreasing_across_levels() {
        for objective in [Objective::EdgeModularity, Objective::NodeModularity] {
            let g = random_graph(150, 0.05, 9);
            let p = louvain(&g, objective, 2).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for level in p.levels() {
                let q = modularity_total(&g, level, objective).unwrap();
                assert!(q >= prev - 1e-12);
                prev = q;
            }
        }
    }

    #[test]
    fn edge_objective_equals_groupwise_sum() {
        let g = random_graph(50, 0.1, 4);
        let p = louvain(&g, Objective::EdgeModularity, 4).unwrap();
        let groups = extract_final(&p, SizeRange::new(1, usize::MAX)).unwrap();
        let sum: f64 = groups
            .iter()
            .map(|grp| crate::baseline::modularity_groupwise(&g, grp).unwrap())
            .sum();
        let q = modularity_total(&g, p.assignment(), Objective::EdgeModularity).unwrap();
        assert!((sum - q).abs() < 1e-12);
    }

    #[test]
    fn planted_cliques_recovered() {
        let spec = crate::synth::SyntheticSpec {
            group_sizes: vec![10; 6],
            internal_probs: vec![0.9; 6],
            noise_prob: 0.01,
            seed: 5,
        };
        let (g, _) = crate::synth::generate(&spec).unwrap();
        let p = louvain(&g, Objective::EdgeModularity, 5).unwrap();
        assert_eq!(p.community_count(), 6);
        let pn = louvain(&g, Objective::NodeModularity, 5).unwrap();
        assert_eq!(pn.community_count(), 6);
    }

    proptest! {
        #[test]
        fn qn_in_unit_range(seed in 0u64..1000, n in 2usize..60, density in 0.02f64..0.6, k in 1usize..12) {
            use rand::Rng;
            let g = random_graph(n, density, seed);
            prop_assume!(g.edge_count() > 0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
            let assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let q = modularity_total(&g, &assignment, Objective::NodeModularity).unwrap();
            prop_assert!((-1.0..=1.0).contains(&q), "{}", q);
        }
    }
}
