//! Significance of the edges between the planted groups of a noisy graph.
//!
//! cargo run --example group_edges

use groupsig::binomial::ScoreConfig;
use groupsig::group_graph::{build_group_graph, score_group_edges, TrialsMode};
use groupsig::synth::{generate, Preset};

fn main() -> groupsig::Result<()> {
    let (graph, groups) = generate(&Preset::Syn3.spec(0.1, 5))?;
    let gg = build_group_graph(&graph, &groups)?;
    let mut records = score_group_edges(&graph, &gg, TrialsMode::Outgoing, &ScoreConfig::default())?;
    records.sort_by(|a, b| b.max_score().total_cmp(&a.max_score()));
    println!("{} group pairs joined by at least one edge; strongest five:", records.len());
    for r in records.iter().take(5) {
        println!(
            "  {} -- {}: {} edges, score {:.2} / {:.2}",
            r.source, r.target, r.weight, r.score_st, r.score_ts
        );
    }
    Ok(())
}
