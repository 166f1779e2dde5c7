//! Greedy target selection on a random chordal graph with the exact, lazy,
//! and sampled objectives, compared against brute force.

use causal_design::bench::{gen_random_chordal, GeneratorConfig, Model};
use causal_design::design::{run_design, DesignOptions, Method, ObjectiveKind, SamplePolicy};
use causal_design::mec::{count_mec, RandomSource};
use causal_design::Result;

fn main() -> Result<()> {
    let config = GeneratorConfig::new(Model::ChordalPeo, 12, 0.3);
    let g = gen_random_chordal(&config, &mut RandomSource::new(3, 0))?;
    println!("{} vertices, {} undirected edges, {} members", g.vertex_count(), g.num_undirected(), count_mec(&g)?);

    let options = DesignOptions { seed: 11, policy: SamplePolicy::PerRound, ..Default::default() };
    for method in [Method::GreedyExact, Method::Lazy, Method::GreedyUnbiased, Method::GreedyFast, Method::BruteForce] {
        let report = run_design(&g, 3, ObjectiveKind::Average, method, &options)?;
        println!(
            "{:<16} targets {:?}  objective {:.4}  evaluations {}",
            report.method,
            report.targets.names(&g),
            report.objective_f64(),
            report.evaluations
        );
    }
    Ok(())
}
