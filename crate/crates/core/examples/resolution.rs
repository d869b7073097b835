//! Two bridged cliques: the group score prefers their union, the median
//! membership score prefers the cliques.
//!
//! cargo run --example resolution [-- CLIQUE_SIZE NODES]

use groupsig::membership::resolution_demo;

fn main() -> groupsig::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer"));
    let c = args.next().unwrap_or(6);
    let n = args.next().unwrap_or(10_000);
    let r = resolution_demo(c, 1, n - 2 * c)?;
    let names = ["clique A", "clique B", "union"];
    println!("{:>9} {:>10} {:>12}", "", "group", "median memb.");
    for (i, name) in names.iter().enumerate() {
        println!("{name:>9} {:>10.3} {:>12.3}", r.group_binomial[i], r.median_membership[i]);
    }
    println!(
        "union wins group score: {}; cliques win membership: {}",
        r.union_wins_group_binomial(),
        r.cliques_win_median_membership()
    );
    Ok(())
}
