//! Synthetic benchmarks: generators, metrics, baselines and the suite runner.

mod gen;
mod suite;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, Pdag, TargetSet};
use crate::mec::RandomSource;
use crate::orient::{gain, Membership};

pub use gen::{
    chordal_scale, gen_erdos_renyi_dag, gen_random_chordal, gen_random_tree, GeneratorConfig, Model,
};
pub use suite::{
    run_experiment, summarize, write_csv, write_json_lines, ExperimentRecord, SummaryRow, SuiteConfig, SuiteSpec,
    CSV_SCHEMA_VERSION,
};

/// How the ground-truth root of a tree is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMode {
    #[default]
    Uniform,
    DegreeBased,
}

/// Root vertex for a ground-truth orientation of an undirected tree:
/// uniform, or with probability proportional to degree.
pub fn sample_ground_truth_root(tree: &Pdag, mode: RootMode, rng: &mut RandomSource) -> usize {
    let p = tree.vertex_count();
    match mode {
        RootMode::Uniform => rng.gen_range(0..p),
        RootMode::DegreeBased => {
            let total: usize = (0..p).map(|v| tree.degree(v)).sum();
            if total == 0 {
                return rng.gen_range(0..p);
            }
            let mut r = rng.gen_range(0..total);
            for v in 0..p {
                let d = tree.degree(v);
                if r < d {
                    return v;
                }
                r -= d;
            }
            unreachable!("draw below total degree")
        }
    }
}

/// The orientation of a tree with every edge pointing away from `root`.
pub fn orient_from_root(tree: &Pdag, root: usize) -> Result<Dag> {
    let p = tree.vertex_count();
    let mut seen = vec![false; p];
    let mut edges = Vec::with_capacity(tree.num_edges());
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        for w in tree.neighbors(v).ones() {
            if !seen[w] {
                seen[w] = true;
                edges.push((v, w));
                stack.push(w);
            }
        }
    }
    if edges.len() != tree.num_edges() {
        return Err(Error::Incompatible("graph is not a tree".into()));
    }
    Dag::from_pdag(Pdag::new(p, &edges, &[])?)
}

/// Share of the essential graph's undirected edges that the experiment
/// orients under `truth`; 1 when there is nothing to orient.
pub fn discovered_edge_ratio(essential: &Pdag, targets: &TargetSet, truth: &Dag) -> Result<f64> {
    let m = essential.num_undirected();
    let g = gain(essential, targets, truth, Membership::Check)?;
    Ok(if m == 0 { 1.0 } else { g as f64 / m as f64 })
}

/// Structural Hamming distance: the number of pairs `i < j` whose entries
/// differ in either direction.
pub fn shd(a: &[Vec<u8>], b: &[Vec<u8>]) -> Result<usize> {
    let p = a.len();
    if b.len() != p || a.iter().chain(b).any(|row| row.len() != p) {
        return Err(Error::Domain("adjacency matrices must be square and of equal size".into()));
    }
    let mut d = 0;
    for i in 0..p {
        for j in i + 1..p {
            if a[i][j] != b[i][j] || a[j][i] != b[j][i] {
                d += 1;
            }
        }
    }
    Ok(d)
}

/// `k` distinct vertices uniformly at random.
pub fn rand_baseline(essential: &Pdag, k: usize, rng: &mut RandomSource) -> Result<TargetSet> {
    let p = essential.vertex_count();
    if k > p {
        return Err(Error::Budget { k, max: p });
    }
    Ok(index::sample(rng, p, k).into_iter().collect())
}

/// The `k` vertices with the most undirected edges (smallest id on ties).
pub fn max_degree_baseline(essential: &Pdag, k: usize) -> Result<TargetSet> {
    let p = essential.vertex_count();
    if k > p {
        return Err(Error::Budget { k, max: p });
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(essential.undirected_neighbors(v).count_ones(..)), v));
    Ok(order.into_iter().take(k).collect())
}
