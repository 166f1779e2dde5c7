//! What an experiment reveals for one ground truth: the post-experiment
//! essential graph, its gain, and the distance to the truth.

use causal_design::bench::{discovered_edge_ratio, shd};
use causal_design::mec::{sample_uniform, RandomSource};
use causal_design::orient::{interventional_essential_graph, Membership};
use causal_design::{chord4, Result, TargetSet};

fn main() -> Result<()> {
    let g = chord4();
    let truth = sample_uniform(&g, &mut RandomSource::new(5, 0))?;
    let names: Vec<String> = truth.directed_edges().iter().map(|&(a, b)| format!("{}->{}", g.name(a), g.name(b))).collect();
    println!("truth: {}", names.join(", "));

    for target in ["X1", "X2", "X4"] {
        let targets = TargetSet::from_names(&g, &[target])?;
        let after = interventional_essential_graph(&g, &targets, &truth, Membership::Check)?;
        println!(
            "intervene on {target}: gain {}, ratio {:.2}, shd to truth {}",
            after.gain(),
            discovered_edge_ratio(&g, &targets, &truth)?,
            shd(&after.closed.adjacency_matrix(), &truth.adjacency_matrix())?
        );
    }
    Ok(())
}
