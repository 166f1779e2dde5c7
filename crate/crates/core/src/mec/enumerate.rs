//! Brute-force enumeration of class members.
//!
//! Independent of the counting recursion: it orients the undirected edges one
//! at a time, pruning any assignment that creates a collider between
//! nonadjacent parents or a directed cycle, so every leaf is an acyclic
//! orientation with exactly the essential graph's v-structures.

use crate::error::{Error, Result};
use crate::graph::{ops::check_essential, Dag, Pdag};

/// Default bound on the number of members [`enumerate_mec`] will materialise.
pub const DEFAULT_ENUMERATION_CAP: usize = 200_000;

/// All members of the class of `essential`. Fails with
/// [`Error::CapExceeded`] once more than `cap` members have been found.
pub fn enumerate_mec(essential: &Pdag, cap: usize) -> Result<Vec<Dag>> {
    check_essential(essential)?;
    let edges = essential.undirected_edges();
    let mut work = essential.clone();
    let mut out = Vec::new();
    extend(&mut work, &edges, 0, cap, &mut out)?;
    Ok(out)
}

fn extend(work: &mut Pdag, edges: &[(usize, usize)], i: usize, cap: usize, out: &mut Vec<Dag>) -> Result<()> {
    if i == edges.len() {
        if out.len() >= cap {
            return Err(Error::CapExceeded { what: "class enumeration".into(), cap: cap as u64 });
        }
        out.push(Dag::from_pdag_unchecked(work.clone()));
        return Ok(());
    }
    let (a, b) = edges[i];
    for (tail, head) in [(a, b), (b, a)] {
        if new_collider(work, tail, head) || reaches(work, head, tail) {
            continue;
        }
        work.orient(tail, head);
        let r = extend(work, edges, i + 1, cap, out);
        work.unorient(tail, head);
        r?;
    }
    Ok(())
}

fn new_collider(g: &Pdag, tail: usize, head: usize) -> bool {
    g.parents(head).ones().any(|w| w != tail && !g.adjacent(w, tail))
}

fn reaches(g: &Pdag, from: usize, to: usize) -> bool {
    let mut seen = fixedbitset::FixedBitSet::with_capacity(g.vertex_count());
    let mut stack = vec![from];
    seen.insert(from);
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        for c in g.children(v).ones() {
            if !seen.contains(c) {
                seen.insert(c);
                stack.push(c);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{chord4, is_markov_equivalent};

    #[test]
    fn small_classes() {
        let edge = Pdag::undirected_graph(2, &[(0, 1)]).unwrap();
        assert_eq!(enumerate_mec(&edge, 10).unwrap().len(), 2);
        let members = enumerate_mec(&chord4(), 100).unwrap();
        assert_eq!(members.len(), 10);
        for m in &members {
            assert!(is_markov_equivalent(m, &members[0]).unwrap());
        }
        let mut dedup = members.clone();
        dedup.sort_by_key(|d| d.directed_edges());
        dedup.dedup();
        assert_eq!(dedup.len(), 10);
        let directed = Pdag::new(3, &[(0, 1), (2, 1)], &[]).unwrap();
        assert_eq!(enumerate_mec(&directed, 10).unwrap().len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_mec(&chord4(), 9), Err(Error::CapExceeded { .. })));
        assert!(enumerate_mec(&chord4(), 10).is_ok());
    }
}
