//! Generate each planted-partition preset and write one to disk.
//!
//! cargo run --example synthetic [-- OUT_DIR]

use std::fs::File;

use groupsig::graph::{write_edge_list, write_groups_jsonl};
use groupsig::synth::{generate, Preset};

fn main() -> groupsig::Result<()> {
    for preset in [Preset::Syn1, Preset::Syn2, Preset::Syn3] {
        let (g, groups) = generate(&preset.spec(0.05, 0))?;
        let sizes: Vec<usize> = groups.iter().map(|x| x.len()).collect();
        println!("{:>5}: n={} m={} sizes {:?}", preset.name(), g.node_count(), g.edge_count(), sizes);
    }
    if let Some(dir) = std::env::args().nth(1) {
        let (g, groups) = generate(&Preset::Syn1.spec(0.05, 0))?;
        std::fs::create_dir_all(&dir)?;
        write_edge_list(File::create(format!("{dir}/graph.txt"))?, &g, &[])?;
        write_groups_jsonl(File::create(format!("{dir}/groups.jsonl"))?, &g, &groups, &[])?;
        println!("wrote {dir}/graph.txt and {dir}/groups.jsonl");
    }
    Ok(())
}
