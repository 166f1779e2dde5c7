//! Drawing members of a Markov equivalence class.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigUint, RandBigInt};
use rand::seq::SliceRandom;
use rand::Rng;

use super::count::MecCounter;
use super::rng::RandomSource;
use crate::error::{Error, Result};
use crate::graph::{ops::check_essential, ops::undirected_components, topological_order, Dag, Pdag};
use crate::orient::{is_member, rooted_closure};

/// Exact uniform sampler.
///
/// In every undirected component the root is drawn with probability
/// proportional to the size of its rooted subclass (exact big-integer
/// weights); the rooted orientation is applied and the remaining undirected
/// components are processed the same way. Keeps its counting memo and, on
/// graphs of at most 64 vertices, every rooting it has closed, so repeated
/// sampling from one class is cheap after the first draws.
pub struct UniformSampler {
    essential: Pdag,
    counter: Arc<MecCounter>,
    nodes: RwLock<HashMap<u64, Arc<Node>>>,
}

/// A component of at most 64 vertices met while sampling, keyed by its vertex
/// mask. Rootings are closed on first use.
struct Node {
    sizes: Arc<Vec<BigUint>>,
    total: BigUint,
    rooted: Vec<OnceLock<Rooted>>,
}

struct Rooted {
    directed: Vec<(usize, usize)>,
    /// Undirected components left over, in the order they are processed.
    subs: Vec<u64>,
}

impl UniformSampler {
    pub fn new(essential: &Pdag) -> Result<Self> {
        Self::with_counter(essential, Arc::new(MecCounter::new()))
    }

    /// Shares an existing counting memo.
    pub fn with_counter(essential: &Pdag, counter: Arc<MecCounter>) -> Result<Self> {
        check_essential(essential)?;
        Ok(UniformSampler { essential: essential.clone(), counter, nodes: RwLock::default() })
    }

    pub fn counter(&self) -> &Arc<MecCounter> {
        &self.counter
    }

    pub fn essential(&self) -> &Pdag {
        &self.essential
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Dag {
        if self.essential.vertex_count() <= 64 {
            return self.sample_masked(rng);
        }
        self.sample_general(rng)
    }

    fn sample_general(&self, rng: &mut RandomSource) -> Dag {
        let mut out = self.essential.clone();
        let mut pending: Vec<(Vec<usize>, Pdag)> = undirected_components(&self.essential)
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let local = self.essential.induced_undirected(&c);
                (c, local)
            })
            .collect();
        // Process in ascending order of smallest vertex.
        pending.reverse();
        while let Some((ids, local)) = pending.pop() {
            let root = pick_root(&self.counter.root_sizes(&local), rng);
            let rooted = rooted_closure(&local, root).expect("rooting a chordal component is consistent");
            for &(a, b) in &rooted.newly_directed {
                out.orient(ids[a], ids[b]);
            }
            let mut subs: Vec<(Vec<usize>, Pdag)> = undirected_components(&rooted.closed)
                .into_iter()
                .filter(|c| c.len() > 1)
                .map(|c| {
                    let local = rooted.closed.induced_undirected(&c);
                    (c.iter().map(|&v| ids[v]).collect(), local)
                })
                .collect();
            subs.reverse();
            pending.extend(subs);
        }
        Dag::from_pdag_unchecked(out)
    }
}

impl UniformSampler {
    fn sample_masked(&self, rng: &mut RandomSource) -> Dag {
        let mut out = self.essential.clone();
        let mut pending: Vec<u64> = undirected_components(&self.essential)
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| vertex_mask(&c))
            .rev()
            .collect();
        while let Some(mask) = pending.pop() {
            let node = self.node(mask);
            let root = pick_root_from(&node.sizes, &node.total, rng);
            let rooted = node.rooted[root].get_or_init(|| self.root(mask, root));
            for &(a, b) in &rooted.directed {
                out.orient(a, b);
            }
            pending.extend(rooted.subs.iter().rev());
        }
        Dag::from_pdag_unchecked(out)
    }

    fn node(&self, mask: u64) -> Arc<Node> {
        if let Some(hit) = self.nodes.read().expect("sampler lock").get(&mask) {
            return hit.clone();
        }
        let ids = mask_vertices(mask);
        let sizes = self.counter.root_sizes(&self.essential.induced_undirected(&ids));
        let node = Arc::new(Node {
            total: sizes.iter().sum(),
            rooted: (0..ids.len()).map(|_| OnceLock::new()).collect(),
            sizes,
        });
        self.nodes.write().expect("sampler lock").entry(mask).or_insert(node).clone()
    }

    fn root(&self, mask: u64, root: usize) -> Rooted {
        let ids = mask_vertices(mask);
        let local = self.essential.induced_undirected(&ids);
        let rooted = rooted_closure(&local, root).expect("rooting a chordal component is consistent");
        Rooted {
            directed: rooted.newly_directed.iter().map(|&(a, b)| (ids[a], ids[b])).collect(),
            subs: undirected_components(&rooted.closed)
                .into_iter()
                .filter(|c| c.len() > 1)
                .map(|c| c.iter().fold(0, |m, &v| m | 1 << ids[v]))
                .collect(),
        }
    }
}

fn vertex_mask(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

fn mask_vertices(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// Uniform integer in `[0, total)`, then a walk over cumulative weights.
fn pick_root(sizes: &[BigUint], rng: &mut RandomSource) -> usize {
    pick_root_from(sizes, &sizes.iter().sum(), rng)
}

fn pick_root_from(sizes: &[BigUint], total: &BigUint, rng: &mut RandomSource) -> usize {
    let mut r = rng.gen_biguint_below(total);
    for (v, s) in sizes.iter().enumerate() {
        if r < *s {
            return v;
        }
        r -= s;
    }
    unreachable!("draw below total weight")
}

/// One uniformly distributed member of the class of `essential`.
pub fn sample_uniform(essential: &Pdag, rng: &mut RandomSource) -> Result<Dag> {
    Ok(UniformSampler::new(essential)?.sample(rng))
}

/// Termination policy of the fast sampler.
#[derive(Clone, Copy, Debug)]
pub struct FastSamplerConfig {
    /// Resampling events allowed per restart are `effort * p^3`.
    pub effort: u64,
    /// Restarts (with a fresh label shuffle) before falling back to the
    /// uniform sampler.
    pub restarts: u32,
}

impl Default for FastSamplerConfig {
    fn default() -> Self {
        FastSamplerConfig { effort: 100, restarts: 10 }
    }
}

/// Local triple repair sampler.
///
/// Vertex labels are shuffled, then every triple touching an undirected edge
/// is swept in that order. A triple whose induced orientation is incomplete,
/// a directed 3-cycle, or a v-structure absent from the essential graph has
/// its essential-undirected edges redrawn by fair coin flips until it is
/// acceptable. Sweeps repeat until one passes without a repair. Output is
/// always a member of the class but not exactly uniform.
pub struct FastSampler {
    essential: Pdag,
    /// Triples `(x, y, z)` with at least one undirected edge, ascending ids.
    triples: Vec<[usize; 3]>,
    config: FastSamplerConfig,
    fallback: std::sync::OnceLock<UniformSampler>,
}

impl FastSampler {
    pub fn new(essential: &Pdag) -> Result<Self> {
        Self::with_config(essential, FastSamplerConfig::default())
    }

    pub fn with_config(essential: &Pdag, config: FastSamplerConfig) -> Result<Self> {
        check_essential(essential)?;
        let p = essential.vertex_count();
        let mut triples = Vec::new();
        for (a, b) in essential.undirected_edges() {
            for c in 0..p {
                if c == a || c == b {
                    continue;
                }
                let mut t = [a, b, c];
                t.sort_unstable();
                // Record each triple once: from its lexicographically first undirected edge.
                let first = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
                    .into_iter()
                    .find(|&(x, y)| essential.has_undirected(x, y))
                    .expect("triple contains (a, b)");
                if first == (a, b) {
                    triples.push(t);
                }
            }
        }
        Ok(FastSampler { essential: essential.clone(), triples, config, fallback: Default::default() })
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Result<Dag> {
        if self.essential.is_fully_directed() {
            return Ok(Dag::from_pdag_unchecked(self.essential.clone()));
        }
        let p = self.essential.vertex_count() as u64;
        let budget = self.config.effort.saturating_mul(p * p * p).max(1);
        for _ in 0..self.config.restarts {
            if let Some(d) = self.attempt(rng, budget) {
                return Ok(d);
            }
        }
        let fallback = match self.fallback.get() {
            Some(f) => f,
            None => {
                let f = UniformSampler::new(&self.essential)?;
                self.fallback.get_or_init(|| f)
            }
        };
        Ok(fallback.sample(rng))
    }

    fn attempt(&self, rng: &mut RandomSource, budget: u64) -> Option<Dag> {
        let p = self.essential.vertex_count();
        let mut label: Vec<usize> = (0..p).collect();
        label.shuffle(rng);
        // Sweep order: triples sorted by their shuffled labels.
        let mut order: Vec<[usize; 3]> = self.triples.clone();
        order.sort_by_cached_key(|t| {
            let mut l = [label[t[0]], label[t[1]], label[t[2]]];
            l.sort_unstable();
            l
        });

        let mut work = self.essential.clone();
        let mut events = 0u64;
        loop {
            let mut repaired = false;
            for t in &order {
                if self.triple_ok(&work, t) {
                    continue;
                }
                repaired = true;
                loop {
                    events += 1;
                    if events > budget {
                        return None;
                    }
                    for (x, y) in pairs(t) {
                        if self.essential.has_undirected(x, y) {
                            if rng.gen_bool(0.5) {
                                work.set_direction(x, y);
                            } else {
                                work.set_direction(y, x);
                            }
                        }
                    }
                    if self.triple_ok(&work, t) {
                        break;
                    }
                }
            }
            if !repaired {
                break;
            }
        }
        // With fewer than three vertices an edge lies in no triple.
        for (a, b) in work.undirected_edges() {
            if rng.gen_bool(0.5) {
                work.set_direction(a, b);
            } else {
                work.set_direction(b, a);
            }
        }
        topological_order(&work)?;
        let dag = Dag::from_pdag_unchecked(work);
        is_member(&self.essential, &dag).then_some(dag)
    }

    fn triple_ok(&self, g: &Pdag, t: &[usize; 3]) -> bool {
        let ps = pairs(t);
        if ps.iter().any(|&(x, y)| g.has_undirected(x, y)) {
            return false;
        }
        let adj = ps.map(|(x, y)| g.adjacent(x, y));
        match adj.iter().filter(|&&a| a).count() {
            3 => {
                let [a, b, c] = *t;
                let cyc1 = g.has_directed(a, b) && g.has_directed(b, c) && g.has_directed(c, a);
                let cyc2 = g.has_directed(b, a) && g.has_directed(c, b) && g.has_directed(a, c);
                !(cyc1 || cyc2)
            }
            2 => {
                let (mid, ends) = if !adj[0] {
                    (t[2], (t[0], t[1]))
                } else if !adj[1] {
                    (t[1], (t[0], t[2]))
                } else {
                    (t[0], (t[1], t[2]))
                };
                let collider = g.has_directed(ends.0, mid) && g.has_directed(ends.1, mid);
                !collider || (self.essential.has_directed(ends.0, mid) && self.essential.has_directed(ends.1, mid))
            }
            _ => true,
        }
    }
}

fn pairs(t: &[usize; 3]) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
}

/// One member drawn with the fast sampler (default termination policy).
pub fn sample_fast(essential: &Pdag, rng: &mut RandomSource) -> Result<Dag> {
    FastSampler::new(essential)?.sample(rng)
}

/// Which sampler a caller wants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Uniform,
    Fast,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SamplerKind::Uniform),
            "fast" => Ok(SamplerKind::Fast),
            other => Err(Error::Incompatible(format!("unknown sampler {other:?}"))),
        }
    }
}

/// Either sampler behind one interface.
pub enum Sampler {
    Uniform(UniformSampler),
    Fast(FastSampler),
}

impl Sampler {
    pub fn new(kind: SamplerKind, essential: &Pdag) -> Result<Self> {
        Ok(match kind {
            SamplerKind::Uniform => Sampler::Uniform(UniformSampler::new(essential)?),
            SamplerKind::Fast => Sampler::Fast(FastSampler::new(essential)?),
        })
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Result<Dag> {
        match self {
            Sampler::Uniform(s) => Ok(s.sample(rng)),
            Sampler::Fast(s) => s.sample(rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{chord4, v_structures};
    use crate::mec::enumerate_mec;

    #[test]
    fn cached_rootings_draw_the_same_members() {
        use crate::bench::{gen_random_chordal, GeneratorConfig, Model};
        for seed in 0..20u64 {
            let config = GeneratorConfig::new(Model::ChordalPeo, 6 + seed as usize, 0.3);
            let g = gen_random_chordal(&config, &mut RandomSource::new(seed, 0)).unwrap();
            let s = UniformSampler::new(&g).unwrap();
            let (mut a, mut b) = (RandomSource::new(seed, 1), RandomSource::new(seed, 1));
            for _ in 0..50 {
                assert_eq!(s.sample_masked(&mut a), s.sample_general(&mut b));
            }
        }
    }

    #[test]
    fn directed_input_is_returned() {
        let d = Pdag::new(3, &[(0, 1), (2, 1)], &[]).unwrap();
        let mut rng = RandomSource::new(1, 0);
        assert_eq!(sample_uniform(&d, &mut rng).unwrap().as_pdag(), &d);
        assert_eq!(sample_fast(&d, &mut rng).unwrap().as_pdag(), &d);
    }

    #[test]
    fn samples_are_members() {
        let g = chord4();
        let members = enumerate_mec(&g, 100).unwrap();
        let uni = UniformSampler::new(&g).unwrap();
        let fast = FastSampler::new(&g).unwrap();
        let mut rng = RandomSource::new(3, 0);
        for _ in 0..200 {
            assert!(members.contains(&uni.sample(&mut rng)));
            assert!(members.contains(&fast.sample(&mut rng).unwrap()));
        }
    }

    #[test]
    fn fast_sampler_on_tree_has_no_colliders() {
        let tree = Pdag::undirected_graph(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)]).unwrap();
        let fast = FastSampler::new(&tree).unwrap();
        let mut rng = RandomSource::new(11, 0);
        for _ in 0..100 {
            assert!(v_structures(&fast.sample(&mut rng).unwrap()).is_empty());
        }
    }

    #[test]
    fn root_marginals_on_chord4() {
        let g = chord4();
        let uni = UniformSampler::new(&g).unwrap();
        let mut rng = RandomSource::new(5, 0);
        let n = 20_000;
        let mut roots = [0usize; 4];
        for _ in 0..n {
            let d = uni.sample(&mut rng);
            let r = (0..4).find(|&v| d.parents(v).is_clear()).unwrap();
            roots[r] += 1;
        }
        for (v, expect) in [0.2, 0.3, 0.3, 0.2].into_iter().enumerate() {
            let f = roots[v] as f64 / n as f64;
            let sigma = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!((f - expect).abs() < 4.0 * sigma, "root {v}: {f}");
        }
    }

    #[test]
    fn deterministic_per_key() {
        let g = chord4();
        let a = sample_uniform(&g, &mut RandomSource::new(9, 2)).unwrap();
        let b = sample_uniform(&g, &mut RandomSource::new(9, 2)).unwrap();
        assert_eq!(a, b);
        let a = sample_fast(&g, &mut RandomSource::new(9, 2)).unwrap();
        let b = sample_fast(&g, &mut RandomSource::new(9, 2)).unwrap();
        assert_eq!(a, b);
    }
}
