#![allow(dead_code)]

use causal_design::bench::{gen_erdos_renyi_dag, gen_random_chordal, GeneratorConfig, Model};
use causal_design::mec::RandomSource;
use causal_design::orient::essential_graph_of;
use causal_design::{Dag, Pdag, TargetSet};
use rand::Rng;

pub fn uceg(p: usize, r: f64, seed: u64) -> Pdag {
    gen_random_chordal(&GeneratorConfig::new(Model::ChordalPeo, p, r), &mut RandomSource::new(seed, 0)).unwrap()
}

pub fn er_dag(p: usize, r: f64, seed: u64) -> Dag {
    gen_erdos_renyi_dag(&GeneratorConfig::new(Model::ErDag, p, r), &mut RandomSource::new(seed, 0)).unwrap()
}

/// Essential graph of a random DAG: usually mixes directed edges with several
/// chain components.
pub fn er_essential(p: usize, r: f64, seed: u64) -> Pdag {
    essential_graph_of(&er_dag(p, r, seed))
}

pub fn random_targets(p: usize, k: usize, rng: &mut RandomSource) -> TargetSet {
    rand::seq::index::sample(rng, p, k.min(p)).into_iter().collect()
}

pub fn random_subset(p: usize, rng: &mut RandomSource) -> TargetSet {
    (0..p).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Vertex `v` of `g` becomes `perm[v]`.
pub fn relabel(g: &Pdag, perm: &[usize]) -> Pdag {
    let d: Vec<_> = g.directed_edges().into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    let u: Vec<_> = g.undirected_edges().into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    Pdag::new(g.vertex_count(), &d, &u).unwrap()
}

/// Largest component of `tree` (undirected) after deleting `removed`.
pub fn largest_component(tree: &Pdag, removed: &[bool]) -> usize {
    let p = tree.vertex_count();
    let mut seen = removed.to_vec();
    let mut best = 0;
    for s in 0..p {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for w in tree.undirected_neighbors(v).ones() {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Disjoint union of undirected graphs.
pub fn disjoint_union(parts: &[Pdag]) -> Pdag {
    let mut offset = 0;
    let mut edges = Vec::new();
    for g in parts {
        edges.extend(g.undirected_edges().into_iter().map(|(a, b)| (a + offset, b + offset)));
        offset += g.vertex_count();
    }
    Pdag::undirected_graph(offset, &edges).unwrap()
}
