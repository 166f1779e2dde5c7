//! Designs on tree-shaped essential graphs: minimax (best worst case) and
//! greedy on the closed-form average gain.

use causal_design::bench::{gen_random_tree, GeneratorConfig, Model};
use causal_design::design::exact_average_gain;
use causal_design::mec::RandomSource;
use causal_design::tree::{minimax_forest, tree_average_gain, tree_greedy_average, tree_worst_case_gain, ForestDecomposition};
use causal_design::Result;

fn main() -> Result<()> {
    let config = GeneratorConfig::new(Model::TreeBa, 15, 0.0);
    let tree = gen_random_tree(&config, &mut RandomSource::new(7, 0))?;
    let forest = ForestDecomposition::new(&tree)?;
    println!("tree with {} vertices", tree.vertex_count());

    for k in 1..=3 {
        let (targets, largest) = minimax_forest(&forest, k);
        let greedy = tree_greedy_average(&forest, k)?;
        println!(
            "k={k}: minimax {:?} (largest piece {largest}, worst-case gain {}, average {}); greedy {:?} (average {:.3})",
            targets.names(&tree),
            tree_worst_case_gain(&forest, &targets),
            exact_average_gain(&tree, &targets)?,
            greedy.targets.names(&tree),
            greedy.objective_f64(),
        );
        assert_eq!(tree_average_gain(&forest, &greedy.targets)?, greedy.objective_value);
    }
    Ok(())
}
