use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::{Dag, Pdag, VertexSet};
use crate::error::{Error, Result};

/// Same adjacencies, every edge undirected.
pub fn skeleton(g: &Pdag) -> Pdag {
    let mut s = Pdag::empty(g.vertex_count());
    for (a, b) in g.directed_edges().into_iter().chain(g.undirected_edges()) {
        s.insert_undirected(a.min(b), a.max(b));
    }
    s.with_names_of(g)
}

/// Triples `(a, c, b)` with `a → c ← b`, `a < b` and `a`, `b` nonadjacent.
pub fn v_structures(g: &Pdag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for c in 0..g.vertex_count() {
        let pa: Vec<usize> = g.parents(c).ones().collect();
        for (i, &a) in pa.iter().enumerate() {
            for &b in &pa[i + 1..] {
                if !g.adjacent(a, b) {
                    out.insert((a, c, b));
                }
            }
        }
    }
    out
}

/// Two DAGs are Markov equivalent iff they share skeleton and v-structures.
pub fn is_markov_equivalent(a: &Dag, b: &Dag) -> Result<bool> {
    if a.vertex_count() != b.vertex_count() {
        return Err(Error::InvalidGraph(format!(
            "vertex count mismatch: {} vs {}",
            a.vertex_count(),
            b.vertex_count()
        )));
    }
    Ok(skeleton(a) == skeleton(b) && v_structures(a) == v_structures(b))
}

/// One connected component of the undirected part of a graph.
#[derive(Clone, Debug)]
pub struct ChainComponent {
    /// Global vertex ids, ascending. Local id `i` maps to `vertices[i]`.
    pub vertices: Vec<usize>,
    /// Induced undirected subgraph on local ids.
    pub graph: Pdag,
}

impl ChainComponent {
    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Connected components after deleting every directed edge, ordered by their
/// smallest vertex.
pub fn chain_components(g: &Pdag) -> Vec<ChainComponent> {
    undirected_components(g)
        .into_iter()
        .map(|vertices| {
            let graph = g.induced_undirected(&vertices);
            ChainComponent { vertices, graph }
        })
        .collect()
}

pub(crate) fn undirected_components(g: &Pdag) -> Vec<Vec<usize>> {
    let p = g.vertex_count();
    let mut seen = FixedBitSet::with_capacity(p);
    let mut out = Vec::new();
    for s in 0..p {
        if seen.contains(s) {
            continue;
        }
        seen.insert(s);
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for w in g.undirected_neighbors(v).ones() {
                if !seen.contains(w) {
                    seen.insert(w);
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Maximum-cardinality search order over the skeleton of `g`.
fn mcs_order(g: &Pdag) -> Vec<usize> {
    let p = g.vertex_count();
    let adj: Vec<VertexSet> = (0..p).map(|v| g.neighbors(v)).collect();
    let mut weight = vec![0usize; p];
    let mut done = FixedBitSet::with_capacity(p);
    let mut order = Vec::with_capacity(p);
    for _ in 0..p {
        let v = (0..p)
            .filter(|&v| !done.contains(v))
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .expect("unvisited vertex remains");
        done.insert(v);
        order.push(v);
        for w in adj[v].ones() {
            if !done.contains(w) {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Chordality of the skeleton, via maximum-cardinality search and the
/// perfect-elimination check on the reversed visit order.
pub fn is_chordal(g: &Pdag) -> bool {
    let p = g.vertex_count();
    let order = mcs_order(g);
    let mut pos = vec![0usize; p];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in &order {
        let earlier: Vec<usize> = g.neighbors(v).ones().filter(|&w| pos[w] < pos[v]).collect();
        let Some(&u) = earlier.iter().max_by_key(|&&w| pos[w]) else {
            continue;
        };
        let nu = g.neighbors(u);
        if earlier.iter().any(|&w| w != u && !nu.contains(w)) {
            return false;
        }
    }
    true
}

/// Vertices reachable from `v` along directed edges, including `v` itself.
pub fn descendants(d: &Dag, v: usize) -> VertexSet {
    let mut seen = FixedBitSet::with_capacity(d.vertex_count());
    seen.insert(v);
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for c in d.children(x).ones() {
            if !seen.contains(c) {
                seen.insert(c);
                stack.push(c);
            }
        }
    }
    seen
}

/// Chain-graph check: no directed edge inside an undirected component, and the
/// quotient graph over components is acyclic. This is a partial screen for
/// essential graphs; chordality of components is checked separately.
pub fn validate_chain_graph(g: &Pdag) -> bool {
    let comps = undirected_components(g);
    let mut comp_of = vec![0usize; g.vertex_count()];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut quotient = Pdag::empty(comps.len());
    for (a, b) in g.directed_edges() {
        let (ca, cb) = (comp_of[a], comp_of[b]);
        if ca == cb {
            return false;
        }
        if quotient.has_directed(cb, ca) {
            return false;
        }
        if !quotient.has_directed(ca, cb) {
            quotient.insert_directed(ca, cb);
        }
    }
    super::topological_order(&quotient).is_some()
}

/// Screens an essential-graph input: chain graph with chordal chain components.
pub(crate) fn check_essential(g: &Pdag) -> Result<()> {
    if !validate_chain_graph(g) {
        return Err(Error::InvalidEssentialGraph(
            "not a chain graph (partially directed cycle or directed edge inside a chain component)".into(),
        ));
    }
    for c in chain_components(g) {
        if !is_chordal(&c.graph) {
            return Err(Error::InvalidEssentialGraph(format!(
                "chain component containing {} is not chordal",
                g.name(c.vertices[0])
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::chord4;

    fn path(p: usize) -> Pdag {
        let e: Vec<_> = (1..p).map(|i| (i - 1, i)).collect();
        Pdag::undirected_graph(p, &e).unwrap()
    }

    #[test]
    fn skeleton_examples() {
        let d = Dag::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(skeleton(&d), path(3));
        assert_eq!(skeleton(&path(3)), path(3));
        assert_eq!(skeleton(&chord4()).undirected_edges().len(), 5);
        assert_eq!(skeleton(&skeleton(&d)), skeleton(&d));
    }

    #[test]
    fn v_structure_examples() {
        let g = Pdag::new(3, &[(0, 2), (1, 2)], &[]).unwrap();
        assert_eq!(v_structures(&g).into_iter().collect::<Vec<_>>(), vec![(0, 2, 1)]);
        let tri = Pdag::new(3, &[(0, 2), (1, 2)], &[(0, 1)]).unwrap();
        assert!(v_structures(&tri).is_empty());
    }

    #[test]
    fn markov_equivalence_examples() {
        let a = Dag::new(3, &[(0, 1), (1, 2)]).unwrap();
        let b = Dag::new(3, &[(1, 0), (1, 2)]).unwrap();
        assert!(is_markov_equivalent(&a, &b).unwrap());
        let collider = Dag::new(3, &[(0, 2), (1, 2)]).unwrap();
        let chain = Dag::new(3, &[(2, 0), (1, 2)]).unwrap();
        assert!(!is_markov_equivalent(&collider, &chain).unwrap());
        assert!(is_markov_equivalent(&a, &a).unwrap());
        assert!(is_markov_equivalent(&a, &Dag::new(4, &[]).unwrap()).is_err());
    }

    #[test]
    fn chain_component_examples() {
        let comps = chain_components(&chord4());
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].vertices, vec![0, 1, 2, 3]);

        let d = Dag::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let comps = chain_components(&d);
        assert_eq!(comps.len(), 4);
        assert!(comps.iter().all(|c| c.is_trivial()));

        // CHORD4 rooted at X1: X1->X2, X1->X3, X2->X4, X3->X4, X2-X3
        let rooted = Pdag::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], &[(1, 2)]).unwrap();
        let comps = chain_components(&rooted);
        let nontrivial: Vec<_> = comps.iter().filter(|c| !c.is_trivial()).collect();
        assert_eq!(nontrivial.len(), 1);
        assert_eq!(nontrivial[0].vertices, vec![1, 2]);
        assert_eq!(comps.len(), 3);
    }

    #[test]
    fn chordality_examples() {
        let c4 = Pdag::undirected_graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(!is_chordal(&c4));
        assert!(is_chordal(&chord4()));
        assert!(is_chordal(&path(6)));
        let star = Pdag::undirected_graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(is_chordal(&star));
        let c5 = Pdag::undirected_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(!is_chordal(&c5));
    }

    #[test]
    fn descendant_examples() {
        let d = Dag::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(descendants(&d, 1).ones().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(descendants(&d, 2).ones().collect::<Vec<_>>(), vec![2]);
        assert_eq!(descendants(&d, 0).count_ones(..), 3);
    }

    #[test]
    fn chain_graph_validation() {
        assert!(validate_chain_graph(&chord4()));
        let bad = Pdag::new(3, &[(0, 1), (2, 0)], &[(1, 2)]).unwrap();
        assert!(!validate_chain_graph(&bad));
        let d = Dag::new(4, &[(0, 1), (1, 2), (0, 3)]).unwrap();
        assert!(validate_chain_graph(&d));
        // directed edge inside an undirected component
        let inside = Pdag::new(3, &[(0, 2)], &[(0, 1), (1, 2)]).unwrap();
        assert!(!validate_chain_graph(&inside));
    }
}
