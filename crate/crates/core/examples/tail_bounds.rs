//! Exact binomial tail next to its KL-based bounds as the degree grows.
//!
//! cargo run --example tail_bounds

use groupsig::binomial::{approx_scores, exact_tail_score, TailParams};

fn main() -> groupsig::Result<()> {
    let (q, p) = (0.6, 0.2);
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "deg", "lower", "exact", "upper", "rel.err");
    for deg in [10u64, 50, 100, 500, 1000, 5000] {
        let din = (q * deg as f64).round() as u64;
        let exact = exact_tail_score(&TailParams::new(deg, din, p)?);
        let (lower, upper) = approx_scores(deg, din, p)?;
        let approx = 0.5 * (lower + upper);
        println!(
            "{deg:>6} {lower:>10.3} {exact:>10.3} {upper:>10.3} {:>8.4}",
            (approx - exact).abs() / exact
        );
    }
    Ok(())
}
