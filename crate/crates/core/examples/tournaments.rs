//! Build, inspect and enumerate tournaments.

use volterra_lab::tournament::{build_tripartite_transitive, enumerate_all, verify_tripartite, Tournament};

fn main() -> volterra_lab::error::Result<()> {
    let t = Tournament::build(4, &[(1, 2), (2, 3), (3, 1), (1, 4), (2, 4), (4, 3)])?;
    println!("edges {:?}", t.edges());
    println!("scores {:?}, index {}", t.scores(), t.index()?);
    println!("relabelled by (2 3 4 1): {:?}", t.relabel(&[2, 3, 4, 1])?.edges());

    let with_winner = enumerate_all(4)?.filter(|t| t.scores().contains(&3)).count();
    println!("tournaments on 4 vertices with a Condorcet winner: {with_winner} of 64");

    let (t, p) = build_tripartite_transitive([2, 3, 4])?;
    println!("tripartite on {} vertices, parts {:?}, A -> B -> C -> A: {}", t.n(), p.sizes(), verify_tripartite(&t, &p)?);
    Ok(())
}
