//! Class size of an essential graph, per-root sizes, and counting under a
//! hypothesis that fixes some orientations.

use causal_design::mec::{count_mec, count_with_prior, rooted_sizes, Hypothesis};
use causal_design::{chord4, Result};

fn main() -> Result<()> {
    let g = chord4();
    println!("members: {}", count_mec(&g)?);
    for (v, size) in rooted_sizes(&g)?.iter().enumerate() {
        println!("  rooted at {}: {size}", g.name(v));
    }

    // Knowing X1 -> X2 leaves only part of the class.
    let x1 = g.index_of("X1").unwrap();
    let x2 = g.index_of("X2").unwrap();
    let h = Hypothesis::from_orientations(&g, &[(x1, x2)])?;
    println!("members with X1 -> X2: {}", count_with_prior(&g, &h)?);
    Ok(())
}
