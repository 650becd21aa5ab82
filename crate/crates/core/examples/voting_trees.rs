//! Evaluate voting trees and compute their exact guarantees.

use volterra_lab::tournament::Tournament;
use volterra_lab::votetree::{guarantee, guarantee_samples, mc_winner_distribution, VotingTree};

fn main() -> volterra_lab::error::Result<()> {
    let balanced = VotingTree::new(4, vec![1, 2, 3, 4])?;
    let t = Tournament::transitive(4);
    println!("balanced tree on the transitive tournament elects {}", balanced.evaluate(&t)?);

    let g = guarantee(&balanced)?;
    println!("guarantee {} (witness index {}, winner {})", g.value, g.witness_index, g.winner);

    for (k, r) in guarantee_samples(3, 4, 5, 7)?.iter().enumerate() {
        println!("random tree {k} of height 3 on 4 candidates: guarantee {}", r.value);
    }

    let freq = mc_winner_distribution(4, &Tournament::cycle3(), 20_000, 1)?;
    println!("winner frequencies of 20000 random trees on the 3-cycle: {:?}", freq.to_f64());
    Ok(())
}
