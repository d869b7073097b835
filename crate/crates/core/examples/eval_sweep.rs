//! Ranking quality of each method over a noise sweep, written as CSV.
//!
//! cargo run --release --example eval_sweep [-- TRIALS]

use groupsig::eval::{run_sweep, write_sweep_csv, ExperimentConfig, Method};
use groupsig::synth::Preset;

fn main() -> groupsig::Result<()> {
    let trials = std::env::args().nth(1).map_or(20, |t| t.parse().expect("integer"));
    let cfg = ExperimentConfig::new(&Method::STANDARD, trials, 0);
    let rows = run_sweep(Preset::Syn1, &[0.05, 0.1, 0.15], &cfg)?;
    write_sweep_csv(std::io::stdout().lock(), &rows, &[format!("syn1, {trials} trials")])
}
