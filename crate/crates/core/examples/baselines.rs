//! Modularity, conductance, TPR and size for the groups of a synthetic graph.
//!
//! cargo run --example baselines

use groupsig::baseline::baselines;
use groupsig::synth::{generate, Preset};

fn main() -> groupsig::Result<()> {
    let (graph, groups) = generate(&Preset::Syn1.spec(0.05, 11))?;
    println!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
    println!("{:>10} {:>5} {:>9} {:>11} {:>6}", "group", "size", "modul.", "conductance", "tpr");
    for g in &groups {
        let b = baselines(&graph, g)?;
        println!(
            "{:>10} {:>5} {:>9.4} {:>11.4} {:>6.3}",
            g.id(),
            b.size,
            b.modularity_q,
            b.conductance,
            b.tpr
        );
    }
    Ok(())
}
