//! Graph values shared by every other module.
//!
//! Vertices are dense indices `0..p`. Adjacency is kept as three bitsets per
//! vertex (parents, children, undirected neighbours), which gives constant-time
//! pair lookups and cheap neighbourhood iteration at the same time.

mod io;
pub(crate) mod ops;

pub use io::{parse_edge_list, parse_graph, parse_graph_json, to_edge_list, to_json, GraphJson};
pub use ops::{
    chain_components, descendants, is_chordal, is_markov_equivalent, skeleton,
    validate_chain_graph, v_structures, ChainComponent,
};

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A set of vertex ids backed by a bitset of length `p`.
pub type VertexSet = FixedBitSet;

/// Partially directed graph: disjoint sets of directed and undirected edges.
///
/// Houses essential graphs, rooted essential graphs, hypothesis graphs and
/// chain graphs. Values are immutable once built; operations that "edit" a
/// graph return a new value.
#[derive(Clone)]
pub struct Pdag {
    names: Option<Arc<[String]>>,
    parents: Vec<FixedBitSet>,
    children: Vec<FixedBitSet>,
    undirected: Vec<FixedBitSet>,
}

impl Pdag {
    /// Graph with `p` vertices and no edges.
    pub fn empty(p: usize) -> Self {
        Pdag {
            names: None,
            parents: vec![FixedBitSet::with_capacity(p); p],
            children: vec![FixedBitSet::with_capacity(p); p],
            undirected: vec![FixedBitSet::with_capacity(p); p],
        }
    }

    /// Builds a graph on vertices `0..p`. Self-loops, repeated pairs and pairs
    /// present in both edge sets are rejected.
    pub fn new(p: usize, directed: &[(usize, usize)], undirected: &[(usize, usize)]) -> Result<Self> {
        let mut g = Pdag::empty(p);
        for &(a, b) in directed {
            g.check_new_pair(a, b)?;
            g.insert_directed(a, b);
        }
        for &(a, b) in undirected {
            g.check_new_pair(a, b)?;
            g.insert_undirected(a, b);
        }
        Ok(g)
    }

    /// Like [`Pdag::new`] but with user-facing vertex names.
    pub fn with_names(
        names: Vec<String>,
        directed: &[(usize, usize)],
        undirected: &[(usize, usize)],
    ) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate vertex name {n:?}")));
            }
        }
        let g = Pdag::new(names.len(), directed, undirected)?;
        Ok(g.renamed(Arc::from(names)))
    }

    /// Undirected graph on `0..p`.
    pub fn undirected_graph(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Pdag::new(p, &[], edges)
    }

    fn check_new_pair(&self, a: usize, b: usize) -> Result<()> {
        let p = self.vertex_count();
        if a >= p || b >= p {
            return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range for {p} vertices")));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
        }
        if self.adjacent(a, b) {
            return Err(Error::InvalidGraph(format!(
                "pair ({}, {}) appears more than once",
                self.name(a),
                self.name(b)
            )));
        }
        Ok(())
    }

    pub(crate) fn renamed(mut self, names: Arc<[String]>) -> Self {
        debug_assert_eq!(names.len(), self.vertex_count());
        self.names = Some(names);
        self
    }

    /// Copies the vertex names of `other` (same vertex count) onto this graph.
    pub(crate) fn with_names_of(self, other: &Pdag) -> Self {
        match &other.names {
            Some(n) => self.renamed(n.clone()),
            None => self,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.parents.len()
    }

    /// Name of vertex `v`; defaults to the decimal id when no names were given.
    pub fn name(&self, v: usize) -> String {
        match &self.names {
            Some(n) => n[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.vertex_count()).map(|v| self.name(v)).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        match &self.names {
            Some(n) => n.iter().position(|x| x == name),
            None => name.parse::<usize>().ok().filter(|&v| v < self.vertex_count()),
        }
    }

    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.children[a].contains(b)
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected[a].contains(b)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.children[a].contains(b) || self.parents[a].contains(b) || self.undirected[a].contains(b)
    }

    pub fn parents(&self, v: usize) -> &VertexSet {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &VertexSet {
        &self.children[v]
    }

    pub fn undirected_neighbors(&self, v: usize) -> &VertexSet {
        &self.undirected[v]
    }

    /// All vertices adjacent to `v`, regardless of edge type.
    pub fn neighbors(&self, v: usize) -> VertexSet {
        let mut n = self.parents[v].clone();
        n.union_with(&self.children[v]);
        n.union_with(&self.undirected[v]);
        n
    }

    pub fn degree(&self, v: usize) -> usize {
        self.parents[v].count_ones(..) + self.children[v].count_ones(..) + self.undirected[v].count_ones(..)
    }

    /// Directed edges `(tail, head)` in lexicographic order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ch) in self.children.iter().enumerate() {
            out.extend(ch.ones().map(|b| (a, b)));
        }
        out
    }

    /// Undirected edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, un) in self.undirected.iter().enumerate() {
            out.extend(un.ones().filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    pub fn num_directed(&self) -> usize {
        self.children.iter().map(|c| c.count_ones(..)).sum()
    }

    pub fn num_undirected(&self) -> usize {
        self.undirected.iter().map(|c| c.count_ones(..)).sum::<usize>() / 2
    }

    pub fn num_edges(&self) -> usize {
        self.num_directed() + self.num_undirected()
    }

    /// True when the graph has no undirected edges.
    pub fn is_fully_directed(&self) -> bool {
        self.undirected.iter().all(|u| u.is_clear())
    }

    /// True when the graph has no directed edges.
    pub fn is_fully_undirected(&self) -> bool {
        self.children.iter().all(|c| c.is_clear())
    }

    /// Binary adjacency matrix with `m[i][j] = 1` for `i → j`; undirected
    /// edges set both entries.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let p = self.vertex_count();
        let mut m = vec![vec![0u8; p]; p];
        for (a, b) in self.directed_edges() {
            m[a][b] = 1;
        }
        for (a, b) in self.undirected_edges() {
            m[a][b] = 1;
            m[b][a] = 1;
        }
        m
    }

    /// Subgraph induced by `vertices` (relabelled `0..vertices.len()` in the
    /// given order), keeping only undirected edges.
    pub fn induced_undirected(&self, vertices: &[usize]) -> Pdag {
        let mut g = Pdag::empty(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_undirected(a, b) {
                    g.insert_undirected(i, j);
                }
            }
        }
        if let Some(n) = &self.names {
            let sub: Vec<String> = vertices.iter().map(|&v| n[v].clone()).collect();
            g.names = Some(Arc::from(sub));
        }
        g
    }

    pub(crate) fn insert_directed(&mut self, a: usize, b: usize) {
        self.children[a].insert(b);
        self.parents[b].insert(a);
    }

    pub(crate) fn insert_undirected(&mut self, a: usize, b: usize) {
        self.undirected[a].insert(b);
        self.undirected[b].insert(a);
    }

    /// Turns `a → b` back into `a - b`.
    pub(crate) fn unorient(&mut self, a: usize, b: usize) {
        debug_assert!(self.has_directed(a, b));
        self.children[a].set(b, false);
        self.parents[b].set(a, false);
        self.insert_undirected(a, b);
    }

    /// Sets the pair `{a, b}` (which must be adjacent) to `a → b`, whatever it was.
    pub(crate) fn set_direction(&mut self, a: usize, b: usize) {
        debug_assert!(self.adjacent(a, b));
        self.undirected[a].set(b, false);
        self.undirected[b].set(a, false);
        self.children[b].set(a, false);
        self.parents[a].set(b, false);
        self.insert_directed(a, b);
    }

    /// Turns the undirected edge `a - b` into `a → b`.
    pub(crate) fn orient(&mut self, a: usize, b: usize) {
        debug_assert!(self.has_undirected(a, b));
        self.undirected[a].set(b, false);
        self.undirected[b].set(a, false);
        self.insert_directed(a, b);
    }
}

impl PartialEq for Pdag {
    fn eq(&self, other: &Self) -> bool {
        self.children == other.children && self.undirected == other.undirected
    }
}

impl Eq for Pdag {}

impl std::hash::Hash for Pdag {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.children.hash(state);
        self.undirected.hash(state);
    }
}

impl fmt::Debug for Pdag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .directed_edges()
            .into_iter()
            .map(|(a, b)| format!("{}->{}", self.name(a), self.name(b)))
            .collect();
        parts.extend(
            self.undirected_edges()
                .into_iter()
                .map(|(a, b)| format!("{}--{}", self.name(a), self.name(b))),
        );
        write!(f, "Pdag(p={}; {})", self.vertex_count(), parts.join(", "))
    }
}

/// Fully directed acyclic graph.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dag(Pdag);

impl Dag {
    pub fn new(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Dag::from_pdag(Pdag::new(p, edges, &[])?)
    }

    /// Checks that `g` has no undirected edges and no directed cycle.
    pub fn from_pdag(g: Pdag) -> Result<Self> {
        if !g.is_fully_directed() {
            return Err(Error::InvalidGraph("a DAG cannot contain undirected edges".into()));
        }
        if topological_order(&g).is_none() {
            return Err(Error::InvalidGraph("graph contains a directed cycle".into()));
        }
        Ok(Dag(g))
    }

    pub(crate) fn from_pdag_unchecked(g: Pdag) -> Self {
        debug_assert!(g.is_fully_directed());
        Dag(g)
    }

    pub fn as_pdag(&self) -> &Pdag {
        &self.0
    }

    pub fn into_pdag(self) -> Pdag {
        self.0
    }

    /// Vertices in a topological order (Kahn, smallest ready id first).
    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(&self.0).expect("Dag is acyclic")
    }
}

impl std::ops::Deref for Dag {
    type Target = Pdag;

    fn deref(&self) -> &Pdag {
        &self.0
    }
}

/// Topological order of the directed part of `g`, or `None` on a directed cycle.
pub(crate) fn topological_order(g: &Pdag) -> Option<Vec<usize>> {
    let p = g.vertex_count();
    let mut indeg: Vec<usize> = (0..p).map(|v| g.parents(v).count_ones(..)).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..p).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(p);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for c in g.children(v).ones() {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == p).then_some(order)
}

/// Sorted set of distinct vertex ids: the intervention targets of one experiment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TargetSet(Vec<usize>);

impl TargetSet {
    pub fn empty() -> Self {
        TargetSet(Vec::new())
    }

    /// Sorts and validates `ids` against a graph with `p` vertices.
    pub fn new(mut ids: Vec<usize>, p: usize) -> Result<Self> {
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidTargets(format!("vertex {} listed twice", w[0])));
        }
        if let Some(&v) = ids.iter().find(|&&v| v >= p) {
            return Err(Error::InvalidTargets(format!("vertex {v} out of range for {p} vertices")));
        }
        Ok(TargetSet(ids))
    }

    /// Resolves user-facing names against `g`.
    pub fn from_names<S: AsRef<str>>(g: &Pdag, names: &[S]) -> Result<Self> {
        let ids = names
            .iter()
            .map(|n| {
                g.index_of(n.as_ref())
                    .ok_or_else(|| Error::InvalidTargets(format!("unknown vertex {:?}", n.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        TargetSet::new(ids, g.vertex_count())
    }

    pub fn all(p: usize) -> Self {
        TargetSet((0..p).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// New set with `v` added.
    pub fn with(&self, v: usize) -> Self {
        let mut ids = self.0.clone();
        if let Err(pos) = ids.binary_search(&v) {
            ids.insert(pos, v);
        }
        TargetSet(ids)
    }

    pub fn union(&self, other: &TargetSet) -> Self {
        let mut ids: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        ids.sort_unstable();
        ids.dedup();
        TargetSet(ids)
    }

    pub fn is_subset(&self, other: &TargetSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn names(&self, g: &Pdag) -> Vec<String> {
        self.0.iter().map(|&v| g.name(v)).collect()
    }
}

impl FromIterator<usize> for TargetSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut ids: Vec<usize> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        TargetSet(ids)
    }
}

/// The four-vertex chordal graph used throughout the tests and examples:
/// `X1-X2, X1-X3, X2-X3, X2-X4, X3-X4`, whose class has ten members.
pub fn chord4() -> Pdag {
    Pdag::with_names(
        ["X1", "X2", "X3", "X4"].iter().map(|s| s.to_string()).collect(),
        &[],
        &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
    )
    .expect("static graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(Pdag::new(3, &[(1, 1)], &[]).is_err());
        assert!(Pdag::new(3, &[(0, 1)], &[(1, 0)]).is_err());
        assert!(Pdag::new(3, &[(0, 1), (1, 0)], &[]).is_err());
        assert!(Pdag::new(3, &[], &[(0, 1), (0, 1)]).is_err());
        assert!(Pdag::new(3, &[(0, 5)], &[]).is_err());
        assert!(Pdag::with_names(vec!["a".into(), "a".into()], &[], &[]).is_err());
    }

    #[test]
    fn undirected_edges_are_canonical() {
        let g = Pdag::new(3, &[], &[(2, 0), (1, 2)]).unwrap();
        assert_eq!(g.undirected_edges(), vec![(0, 2), (1, 2)]);
        assert!(g.has_undirected(0, 2) && g.has_undirected(2, 0));
    }

    #[test]
    fn dag_rejects_cycles() {
        assert!(Dag::new(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
        let d = Dag::new(3, &[(2, 1), (1, 0)]).unwrap();
        assert_eq!(d.topological_order(), vec![2, 1, 0]);
    }

    #[test]
    fn target_set_validation() {
        assert!(TargetSet::new(vec![1, 1], 3).is_err());
        assert!(TargetSet::new(vec![3], 3).is_err());
        let t = TargetSet::new(vec![2, 0], 3).unwrap();
        assert_eq!(t.as_slice(), &[0, 2]);
        assert_eq!(t.with(1).as_slice(), &[0, 1, 2]);
        let g = chord4();
        assert_eq!(TargetSet::from_names(&g, &["X4", "X1"]).unwrap().as_slice(), &[0, 3]);
        assert!(TargetSet::from_names(&g, &["X9"]).is_err());
    }
}
