//! Drawing class members with the uniform and the fast sampler.

use std::collections::BTreeMap;

use causal_design::mec::{FastSampler, RandomSource, UniformSampler};
use causal_design::{chord4, Result};

fn main() -> Result<()> {
    let g = chord4();
    let uniform = UniformSampler::new(&g)?;
    let fast = FastSampler::new(&g)?;
    let draws = 5000;

    let mut tally: BTreeMap<_, [usize; 2]> = BTreeMap::new();
    for j in 0..draws {
        let a = uniform.sample(&mut RandomSource::new(1, j));
        let b = fast.sample(&mut RandomSource::new(2, j))?;
        tally.entry(a.directed_edges()).or_default()[0] += 1;
        tally.entry(b.directed_edges()).or_default()[1] += 1;
    }
    println!("{:<44} {:>8} {:>8}", "member", "uniform", "fast");
    for (edges, [u, f]) in &tally {
        let shown: Vec<String> = edges.iter().map(|&(a, b)| format!("{}>{}", g.name(a), g.name(b))).collect();
        println!("{:<44} {:>8.3} {:>8.3}", shown.join(" "), *u as f64 / draws as f64, *f as f64 / draws as f64);
    }
    Ok(())
}
