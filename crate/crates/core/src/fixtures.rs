//! Small hand-built instances used by tests, examples, and documentation.

use crate::graph::{Graph, GraphBuilder, Group};

/// Two isolated groups on 8 nodes and 9 edges: `g1` is a 4-clique (6 edges),
/// `g2` a 4-node path (3 edges).
pub fn clique_and_path() -> (Graph, Group, Group) {
    let edges = [
        (0, 1),
        (0, 2),
        (0, 3),
        (1, 2),
        (1, 3),
        (2, 3),
        (4, 5),
        (5, 6),
        (6, 7),
    ];
    let g = Graph::from_edges(8, &edges).expect("valid fixture");
    (
        g,
        Group::new("g1", [0, 1, 2, 3]).expect("valid fixture"),
        Group::new("g2", [4, 5, 6, 7]).expect("valid fixture"),
    )
}

/// Candidate and reference groups with the overlaps of the worked ranking
/// example: references of size 10 and 15, candidates of size 6, 14, and 5,
/// with `|c1 ∩ r1| = 5`, `|c1 ∩ r2| = 1`, `|c2 ∩ r2| = 14`, `|c3 ∩ r1| = 5`.
///
/// Returns `(candidates, references)` over nodes `0..25`.
pub fn worked_evaluation() -> (Vec<Group>, Vec<Group>) {
    let r1: Vec<usize> = (0..10).collect();
    let r2: Vec<usize> = (10..25).collect();
    let c1: Vec<usize> = (0..5).chain([10]).collect();
    let c2: Vec<usize> = (11..25).collect();
    let c3: Vec<usize> = (5..10).collect();
    let g = |id: &str, m: Vec<usize>| Group::new(id, m).expect("valid fixture");
    (
        vec![g("c1", c1), g("c2", c2), g("c3", c3)],
        vec![g("r1", r1), g("r2", r2)],
    )
}

/// Two cliques of `clique_size` nodes joined by `bridge_edges` edges, plus
/// `ambient_nodes` isolated nodes.
///
/// Bridge `i` joins node `i % c` of the first clique to node `i / c` of the
/// second, so distinct bridges never repeat a pair. Returns the graph and the
/// two clique groups.
pub fn dumbbell(clique_size: usize, bridge_edges: usize, ambient_nodes: usize) -> (Graph, Group, Group) {
    let c = clique_size;
    assert!(c >= 1, "cliques need at least one node");
    assert!(bridge_edges <= c * c, "at most c^2 distinct bridges");
    let mut b = GraphBuilder::with_nodes(2 * c + ambient_nodes);
    for offset in [0, c] {
        for u in 0..c {
            for v in u + 1..c {
                b.add_edge(offset + u, offset + v, 1).expect("in range");
            }
        }
    }
    for i in 0..bridge_edges {
        b.add_edge(i % c, c + i / c, 1).expect("in range");
    }
    (
        b.build(),
        Group::new("g1", 0..c).expect("valid fixture"),
        Group::new("g2", c..2 * c).expect("valid fixture"),
    )
}
