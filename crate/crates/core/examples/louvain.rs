//! Louvain under both objectives on a noisy planted partition.
//!
//! cargo run --release --example louvain

use groupsig::detect::{extract_final, louvain, modularity_total, Objective, SizeRange};
use groupsig::eval::{average_pr, overlap_scores};
use groupsig::synth::{generate, Preset};

fn main() -> groupsig::Result<()> {
    let (graph, truth) = generate(&Preset::Syn1.spec(0.05, 3))?;
    for objective in [Objective::EdgeModularity, Objective::NodeModularity] {
        let part = louvain(&graph, objective, 3)?;
        let q = modularity_total(&graph, part.assignment(), objective)?;
        let groups = extract_final(&part, SizeRange::default())?;
        let avg = average_pr(&overlap_scores(&groups, &truth)?).unwrap_or(0.0);
        println!(
            "{objective:?}: {} levels, {} communities ({} of size >= 3), objective {q:.4}, avgPR {avg:.3}",
            part.level_count(),
            part.community_count(),
            groups.len()
        );
    }
    Ok(())
}
