//! Resolved edge sets for sampled members on graphs of at most 64 vertices.
//!
//! Adjacency is kept as `u64` masks and the closure reuses scratch buffers.
//! Because the orientations come from a member of the class, every edge the
//! rules can orient points the way the member does, so each rule is tested
//! in that direction only.

use crate::graph::{Dag, Pdag};

pub(crate) const MAX_VERTICES: usize = 64;

pub(crate) struct MemberClosure {
    p: usize,
    par: Vec<u64>,
    ch: Vec<u64>,
    und: Vec<u64>,
    adj: Vec<u64>,
}

#[derive(Default)]
pub(crate) struct Scratch {
    par: Vec<u64>,
    ch: Vec<u64>,
    und: Vec<u64>,
    truth: Vec<u64>,
}

fn mask(s: &fixedbitset::FixedBitSet) -> u64 {
    s.ones().fold(0, |m, v| m | 1 << v)
}

fn ones(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(v)
    })
}

impl MemberClosure {
    pub(crate) fn new(g: &Pdag) -> Option<Self> {
        let p = g.vertex_count();
        if p > MAX_VERTICES {
            return None;
        }
        let par: Vec<u64> = (0..p).map(|v| mask(g.parents(v))).collect();
        let ch: Vec<u64> = (0..p).map(|v| mask(g.children(v))).collect();
        let und: Vec<u64> = (0..p).map(|v| mask(g.undirected_neighbors(v))).collect();
        let adj = (0..p).map(|v| par[v] | ch[v] | und[v]).collect();
        Some(MemberClosure { p, par, ch, und, adj })
    }

    /// Imposes the edges of `truth` incident to `targets` (a vertex mask),
    /// closes, and calls `hit(tail, head)` for every edge that became
    /// directed. Returns how many did.
    pub(crate) fn resolve(
        &self,
        truth: &Dag,
        targets: u64,
        s: &mut Scratch,
        mut hit: impl FnMut(usize, usize),
    ) -> usize {
        let p = self.p;
        s.par.clone_from(&self.par);
        s.ch.clone_from(&self.ch);
        s.und.clone_from(&self.und);
        s.truth.clear();
        s.truth.extend((0..p).map(|v| mask(truth.children(v)) & self.und[v]));
        let mut count = 0;
        let mut orient = |s: &mut Scratch, t: usize, h: usize| {
            s.und[t] &= !(1 << h);
            s.und[h] &= !(1 << t);
            s.ch[t] |= 1 << h;
            s.par[h] |= 1 << t;
            count += 1;
            hit(t, h);
        };
        for x in ones(targets) {
            for w in ones(s.und[x]) {
                if s.truth[x] >> w & 1 == 1 {
                    orient(s, x, w);
                } else {
                    orient(s, w, x);
                }
            }
        }
        loop {
            let mut changed = false;
            for t in 0..p {
                for h in ones(s.truth[t] & s.und[t]) {
                    if self.fires(s, t, h) {
                        orient(s, t, h);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        count
    }

    fn fires(&self, s: &Scratch, a: usize, b: usize) -> bool {
        let adj = &self.adj;
        if s.par[a] & !adj[b] != 0 {
            return true;
        }
        if s.ch[a] & s.par[b] != 0 {
            return true;
        }
        let shared = s.und[a] & s.par[b];
        if shared.count_ones() >= 2 && ones(shared).any(|c| shared & !adj[c] & !(1 << c) != 0) {
            return true;
        }
        ones(s.par[b] & adj[a]).any(|c| s.par[c] & adj[a] & !adj[b] & !(1 << a) != 0)
    }
}
