//! Meek-rule closure and the quantities defined on top of it.
//!
//! The closure repeatedly orients an undirected edge `a - b` as `a → b` when
//! one of the four rules applies:
//!
//! 1. some `c → a` with `c`, `b` nonadjacent;
//! 2. some `a → c → b`;
//! 3. two nonadjacent `c`, `d` with `a - c`, `a - d`, `c → b`, `d → b`;
//! 4. some `d → c → b` with `a` adjacent to both `c` and `d`, and `b`, `d`
//!    nonadjacent.
//!
//! The fixpoint does not depend on the order in which rules fire.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::{is_chordal, skeleton, v_structures, Dag, Pdag, TargetSet};

/// Fixpoint of the Meek rules plus the edges the closure (and any imposed
/// orientations) directed.
#[derive(Clone, Debug)]
pub struct OrientationResult {
    pub closed: Pdag,
    /// Pairs `(tail, head)` undirected in the input and directed in `closed`, sorted.
    pub newly_directed: Vec<(usize, usize)>,
}

impl OrientationResult {
    pub fn gain(&self) -> usize {
        self.newly_directed.len()
    }
}

/// Runs the four Meek rules to a fixpoint.
///
/// A pair for which rules demand both directions yields
/// [`Error::Inconsistent`]; that can only happen on inputs that are not
/// partially directed graphs of some DAG.
pub fn meek_closure(g: &Pdag) -> Result<OrientationResult> {
    let mut closed = g.clone();
    let mut newly = Vec::new();
    close_in_place(&mut closed, &mut newly)?;
    newly.sort_unstable();
    Ok(OrientationResult { closed, newly_directed: newly })
}

fn rule_fires(g: &Pdag, a: usize, b: usize) -> bool {
    // Rule 1
    if g.parents(a).ones().any(|c| !g.adjacent(c, b)) {
        return true;
    }
    // Rule 2
    if !g.children(a).is_disjoint(g.parents(b)) {
        return true;
    }
    // Rule 3
    let mut shared = g.undirected_neighbors(a).clone();
    shared.intersect_with(g.parents(b));
    if shared.count_ones(..) >= 2 {
        let s: Vec<usize> = shared.ones().collect();
        for (i, &c) in s.iter().enumerate() {
            if s[i + 1..].iter().any(|&d| !g.adjacent(c, d)) {
                return true;
            }
        }
    }
    // Rule 4
    for c in g.parents(b).ones() {
        if c == a || !g.adjacent(a, c) {
            continue;
        }
        if g.parents(c).ones().any(|d| d != a && g.adjacent(a, d) && !g.adjacent(d, b)) {
            return true;
        }
    }
    false
}

/// Worklist closure. Every newly directed pair is appended to `newly`.
pub(crate) fn close_in_place(g: &mut Pdag, newly: &mut Vec<(usize, usize)>) -> Result<()> {
    let p = g.vertex_count();
    let mut queued = FixedBitSet::with_capacity(p * p);
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for (a, b) in g.undirected_edges() {
        queued.insert(a * p + b);
        queue.push_back((a, b));
    }
    while let Some((a, b)) = queue.pop_front() {
        queued.set(a * p + b, false);
        if !g.has_undirected(a, b) {
            continue;
        }
        let forward = rule_fires(g, a, b);
        let backward = rule_fires(g, b, a);
        let (tail, head) = match (forward, backward) {
            (false, false) => continue,
            (true, true) => {
                return Err(Error::Inconsistent(format!(
                    "rules orient {} - {} both ways",
                    g.name(a),
                    g.name(b)
                )))
            }
            (true, false) => (a, b),
            (false, true) => (b, a),
        };
        g.orient(tail, head);
        newly.push((tail, head));

        let mut touched = g.neighbors(tail);
        touched.union_with(&g.neighbors(head));
        touched.insert(tail);
        touched.insert(head);
        // Rule premises for a pair reach at most two hops from the new edge.
        for v in touched.ones() {
            for w in g.undirected_neighbors(v).ones() {
                let (x, y) = (v.min(w), v.max(w));
                if !queued.contains(x * p + y) {
                    queued.insert(x * p + y);
                    queue.push_back((x, y));
                }
            }
        }
    }
    Ok(())
}

/// Imposes `orientations` on a copy of `g`, closes it, and reports every edge
/// that went from undirected to directed (imposed ones included).
pub(crate) fn close_with(g: &Pdag, orientations: &[(usize, usize)]) -> Result<OrientationResult> {
    let mut closed = g.clone();
    let mut newly = Vec::with_capacity(orientations.len());
    for &(a, b) in orientations {
        if closed.has_undirected(a, b) {
            closed.orient(a, b);
            newly.push((a, b));
        } else if closed.has_directed(b, a) {
            return Err(Error::Inconsistent(format!(
                "imposed {} -> {} contradicts {} -> {}",
                g.name(a),
                g.name(b),
                g.name(b),
                g.name(a)
            )));
        } else if !closed.adjacent(a, b) {
            return Err(Error::Inconsistent(format!(
                "imposed {} -> {} is not an edge",
                g.name(a),
                g.name(b)
            )));
        }
    }
    close_in_place(&mut closed, &mut newly)?;
    newly.sort_unstable();
    Ok(OrientationResult { closed, newly_directed: newly })
}

/// Observational essential graph of a DAG: skeleton, v-structures directed,
/// then Meek closure.
pub fn essential_graph_of(d: &Dag) -> Pdag {
    let mut g = skeleton(d);
    for (a, c, b) in v_structures(d) {
        if g.has_undirected(a, c) {
            g.orient(a, c);
        }
        if g.has_undirected(b, c) {
            g.orient(b, c);
        }
    }
    let mut scratch = Vec::new();
    close_in_place(&mut g, &mut scratch).expect("closure of a DAG pattern is consistent");
    g
}

/// Directed edges of `truth` with at least one endpoint in `targets`.
pub fn incident_orientations(targets: &TargetSet, truth: &Dag) -> Vec<(usize, usize)> {
    truth
        .directed_edges()
        .into_iter()
        .filter(|&(a, b)| targets.contains(a) || targets.contains(b))
        .collect()
}

/// True when `truth` belongs to the class represented by `essential`.
pub fn is_member(essential: &Pdag, truth: &Dag) -> bool {
    essential.vertex_count() == truth.vertex_count()
        && skeleton(essential) == skeleton(truth)
        && essential.directed_edges().iter().all(|&(a, b)| truth.has_directed(a, b))
        && v_structures(essential) == v_structures(truth)
}

/// Whether [`interventional_essential_graph`] re-checks class membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Check,
    /// The caller guarantees membership (e.g. the DAG came from a sampler).
    Trusted,
}

/// Essential graph after intervening on `targets` when `truth` is the ground
/// truth: imposes the incident orientations and closes. `newly_directed` is
/// the resolved set of the experiment.
pub fn interventional_essential_graph(
    essential: &Pdag,
    targets: &TargetSet,
    truth: &Dag,
    membership: Membership,
) -> Result<OrientationResult> {
    if membership == Membership::Check && !is_member(essential, truth) {
        return Err(Error::Inconsistent(
            "ground-truth DAG is not a member of the essential graph's class".into(),
        ));
    }
    close_with(essential, &incident_orientations(targets, truth))
}

/// Number of edges an experiment resolves for a given ground truth.
pub fn gain(essential: &Pdag, targets: &TargetSet, truth: &Dag, membership: Membership) -> Result<usize> {
    Ok(interventional_essential_graph(essential, targets, truth, membership)?.gain())
}

/// Rooted essential graph of a UCEG: every edge at `root` points away from it,
/// then Meek closure.
pub fn rooted_essential_graph(uceg: &Pdag, root: usize) -> Result<Pdag> {
    check_uceg(uceg)?;
    if root >= uceg.vertex_count() {
        return Err(Error::NotUceg(format!("root {root} out of range")));
    }
    Ok(rooted_closure(uceg, root)?.closed)
}

pub(crate) fn rooted_closure(uceg: &Pdag, root: usize) -> Result<OrientationResult> {
    let out: Vec<(usize, usize)> = uceg.undirected_neighbors(root).ones().map(|w| (root, w)).collect();
    close_with(uceg, &out)
}

pub(crate) fn check_uceg(g: &Pdag) -> Result<()> {
    if !g.is_fully_undirected() {
        return Err(Error::NotUceg("graph has directed edges".into()));
    }
    if g.vertex_count() == 0 {
        return Err(Error::NotUceg("graph is empty".into()));
    }
    if crate::graph::chain_components(g).len() != 1 {
        return Err(Error::NotUceg("graph is not connected".into()));
    }
    if !is_chordal(g) {
        return Err(Error::NotUceg("graph is not chordal".into()));
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
    fn rule_one() {
        let g = Pdag::new(3, &[(0, 1)], &[(1, 2)]).unwrap();
        let r = meek_closure(&g).unwrap();
        assert_eq!(r.newly_directed, vec![(1, 2)]);
    }

    #[test]
    fn rule_two() {
        // a=0, c=1, b=2: a->c, c->b, a-b
        let g = Pdag::new(3, &[(0, 1), (1, 2)], &[(0, 2)]).unwrap();
        assert_eq!(meek_closure(&g).unwrap().newly_directed, vec![(0, 2)]);
    }

    #[test]
    fn rule_three() {
        // a=0, b=1, c=2, d=3: c->b, d->b, a-c, a-d, a-b, c,d nonadjacent
        let g = Pdag::new(4, &[(2, 1), (3, 1)], &[(0, 2), (0, 3), (0, 1)]).unwrap();
        assert_eq!(meek_closure(&g).unwrap().newly_directed, vec![(0, 1)]);
    }

    #[test]
    fn rule_four() {
        // a=0, b=1, c=2, d=3: d->c->b, a-b, a-c, a-d, b,d nonadjacent
        let g = Pdag::new(4, &[(3, 2), (2, 1)], &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = meek_closure(&g).unwrap();
        assert!(r.newly_directed.contains(&(0, 1)));
    }

    #[test]
    fn undirected_chordal_graph_is_a_fixpoint() {
        let r = meek_closure(&chord4()).unwrap();
        assert!(r.newly_directed.is_empty());
        assert_eq!(r.closed, chord4());
    }

    #[test]
    fn essential_graph_examples() {
        let chain = Dag::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(essential_graph_of(&chain), path(3));
        let collider = Dag::new(3, &[(0, 2), (1, 2)]).unwrap();
        let e = essential_graph_of(&collider);
        assert_eq!(e.directed_edges(), vec![(0, 2), (1, 2)]);
        assert_eq!(e.num_undirected(), 0);
    }

    #[test]
    fn incident_orientation_examples() {
        // CHORD4 rooted at X1 with X2->X3
        let truth = Dag::new(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(incident_orientations(&TargetSet::empty(), &truth).is_empty());
        assert_eq!(incident_orientations(&TargetSet::all(4), &truth).len(), 5);
        let t = TargetSet::new(vec![3], 4).unwrap();
        assert_eq!(incident_orientations(&t, &truth), vec![(1, 3), (2, 3)]);
    }

    #[test]
    fn interventional_examples() {
        let g = chord4();
        let truth = Dag::new(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
        let none = interventional_essential_graph(&g, &TargetSet::empty(), &truth, Membership::Check).unwrap();
        assert!(none.newly_directed.is_empty());
        assert_eq!(none.closed, g);
        // X2 - X3 is not incident to X1 and both of its orientations stay
        // consistent with X1 -> X2, X1 -> X3, so only four edges resolve.
        let x1 = TargetSet::new(vec![0], 4).unwrap();
        let r = interventional_essential_graph(&g, &x1, &truth, Membership::Check).unwrap();
        assert_eq!(r.newly_directed, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(r.closed.undirected_edges(), vec![(1, 2)]);

        let p5 = path(5);
        let truth = Dag::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let t = TargetSet::new(vec![2], 5).unwrap();
        let r = interventional_essential_graph(&p5, &t, &truth, Membership::Check).unwrap();
        assert_eq!(r.newly_directed, vec![(1, 2), (2, 3), (3, 4)]);
        assert_eq!(gain(&p5, &TargetSet::all(5), &truth, Membership::Check).unwrap(), 4);
    }

    #[test]
    fn non_member_is_rejected() {
        let collider = Dag::new(3, &[(0, 1), (2, 1)]).unwrap();
        let t = TargetSet::new(vec![0], 3).unwrap();
        assert!(gain(&path(3), &t, &collider, Membership::Check).is_err());
    }

    #[test]
    fn rooted_examples() {
        let g = chord4();
        let r1 = rooted_essential_graph(&g, 0).unwrap();
        assert_eq!(r1.directed_edges(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(r1.undirected_edges(), vec![(1, 2)]);
        let r2 = rooted_essential_graph(&g, 1).unwrap();
        assert_eq!(r2.directed_edges(), vec![(1, 0), (1, 2), (1, 3)]);
        assert_eq!(r2.undirected_edges(), vec![(0, 2), (2, 3)]);
        let star = Pdag::undirected_graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let rs = rooted_essential_graph(&star, 0).unwrap();
        assert_eq!(rs.num_directed(), 4);
        assert_eq!(rs.num_undirected(), 0);
    }

    #[test]
    fn rooted_rejects_non_uceg() {
        let c4 = Pdag::undirected_graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(matches!(rooted_essential_graph(&c4, 0), Err(Error::NotUceg(_))));
        let split = Pdag::undirected_graph(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(rooted_essential_graph(&split, 0).is_err());
        let directed = Pdag::new(2, &[(0, 1)], &[]).unwrap();
        assert!(rooted_essential_graph(&directed, 0).is_err());
    }

    #[test]
    fn contradictory_input_is_an_error() {
        // 2->0 forces 0->1 by rule 1 (2,1 nonadjacent); 3->1 forces 1->0 likewise.
        let g = Pdag::new(4, &[(2, 0), (3, 1)], &[(0, 1)]).unwrap();
        assert!(matches!(meek_closure(&g), Err(Error::Inconsistent(_))));
    }
}
