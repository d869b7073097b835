//! Score two groups under the node and edge models and show where they disagree.
//!
//! cargo run --example score_groups

use groupsig::binomial::{edge_score, node_score, ScoreConfig};
use groupsig::fixtures::clique_and_path;
use groupsig::graph::group_stats;

fn main() -> groupsig::Result<()> {
    let (graph, clique, path) = clique_and_path();
    let cfg = ScoreConfig::default();
    println!("{:>6} {:>4} {:>4} {:>8} {:>8} {:>12}", "group", "deg", "din", "node", "edge", "label(node)");
    for g in [&clique, &path] {
        let s = group_stats(&graph, g)?;
        let node = node_score(&s, graph.node_count(), &cfg);
        let edge = edge_score(&s, &cfg);
        println!(
            "{:>6} {:>4} {:>4} {:>8.3} {:>8.3} {:>12}",
            g.id(),
            s.deg,
            s.din,
            node.score,
            edge.score,
            node.label().as_str()
        );
    }
    Ok(())
}
