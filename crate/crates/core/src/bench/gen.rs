//! Random instance generators.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, Pdag};
use crate::mec::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    ErDag,
    ChordalPeo,
    TreeBa,
    TreeBoundedDegree,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::ErDag => "er-dag",
            Model::ChordalPeo => "chordal-peo",
            Model::TreeBa => "tree-ba",
            Model::TreeBoundedDegree => "tree-bounded-degree",
        }
    }

    pub fn is_tree(self) -> bool {
        matches!(self, Model::TreeBa | Model::TreeBoundedDegree)
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Model::ErDag, Model::ChordalPeo, Model::TreeBa, Model::TreeBoundedDegree]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Incompatible(format!("unknown model {s:?}")))
    }
}

fn default_degree_bound() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub model: Model,
    pub p: usize,
    /// Target edge density: about `r · C(p, 2)` edges.
    #[serde(default)]
    pub r: f64,
    /// Maximum degree for bounded-degree trees.
    #[serde(default = "default_degree_bound")]
    pub degree_bound: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(model: Model, p: usize, r: f64) -> Self {
        GeneratorConfig { model, p, r, degree_bound: default_degree_bound(), seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Domain("p must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::Domain(format!("r must lie in [0, 1], got {}", self.r)));
        }
        if self.model == Model::TreeBoundedDegree && self.degree_bound < 2 && self.p > 2 {
            return Err(Error::Domain("degree bound must be at least 2".into()));
        }
        Ok(())
    }

    /// Generates one graph: a DAG for `er-dag`, an undirected graph otherwise.
    pub fn generate(&self, rng: &mut RandomSource) -> Result<Pdag> {
        self.validate()?;
        Ok(match self.model {
            Model::ErDag => gen_erdos_renyi_dag(self, rng)?.into_pdag(),
            Model::ChordalPeo => gen_random_chordal(self, rng)?,
            Model::TreeBa | Model::TreeBoundedDegree => gen_random_tree(self, rng)?,
        })
    }
}

/// `G(p, r)` skeleton oriented along a uniformly random vertex order.
pub fn gen_erdos_renyi_dag(config: &GeneratorConfig, rng: &mut RandomSource) -> Result<Dag> {
    config.validate()?;
    let p = config.p;
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut rank = vec![0; p];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut edges = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            if rng.gen_bool(config.r) {
                edges.push(if rank[a] < rank[b] { (a, b) } else { (b, a) });
            }
        }
    }
    Dag::new(p, &edges)
}

/// Random chordal connected graph from a random perfect elimination order.
///
/// Vertices are taken from the highest rank down. The vertex of rank `i`
/// (1-based) links to each lower-ranked vertex with probability
/// `min(1, c / i)`, or to one uniformly chosen lower vertex if none was
/// picked; its lower neighbours are then completed into a clique. `c` is
/// calibrated so that the expected edge count is about `r · C(p, 2)`.
pub fn gen_random_chordal(config: &GeneratorConfig, rng: &mut RandomSource) -> Result<Pdag> {
    config.validate()?;
    let c = chordal_scale(config.p, config.r);
    let mut order: Vec<usize> = (0..config.p).collect();
    order.shuffle(rng);
    let by_rank = chordal_by_rank(config.p, c, rng);
    let edges: Vec<(usize, usize)> = by_rank.into_iter().map(|(a, b)| (order[a], order[b])).collect();
    Pdag::undirected_graph(config.p, &edges)
}

/// Edges between rank positions (0-based) of the chordal construction.
#[allow(clippy::needless_range_loop)]
fn chordal_by_rank(p: usize, c: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut adj = vec![vec![false; p]; p];
    for x in (1..p).rev() {
        let prob = (c / (x + 1) as f64).min(1.0);
        let mut linked = false;
        for y in 0..x {
            if !adj[x][y] && rng.gen_bool(prob) {
                adj[x][y] = true;
                adj[y][x] = true;
            }
            linked |= adj[x][y];
        }
        if !linked {
            let y = rng.gen_range(0..x);
            adj[x][y] = true;
            adj[y][x] = true;
        }
        let parents: Vec<usize> = (0..x).filter(|&y| adj[x][y]).collect();
        for (i, &a) in parents.iter().enumerate() {
            for &b in &parents[i + 1..] {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    let mut edges = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            if adj[a][b] {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Scale `c` whose mean edge count (clique completion included) is closest
/// to `r · C(p, 2)`. Found by bisection on a fixed-seed Monte-Carlo
/// estimate, so it is a deterministic function of `(p, r)`.
pub fn chordal_scale(p: usize, r: f64) -> f64 {
    static CACHE: Mutex<BTreeMap<(usize, u64), f64>> = Mutex::new(BTreeMap::new());
    if p < 3 {
        return 1.0;
    }
    let key = (p, r.to_bits());
    if let Some(&c) = CACHE.lock().expect("scale cache").get(&key) {
        return c;
    }
    let c = calibrate(p, r);
    CACHE.lock().expect("scale cache").insert(key, c);
    c
}

fn calibrate(p: usize, r: f64) -> f64 {
    let target = r * (p * (p - 1) / 2) as f64;
    const TRIALS: u64 = 64;
    let mean_edges = |c: f64| -> f64 {
        let total: usize = (0..TRIALS)
            .map(|t| chordal_by_rank(p, c, &mut RandomSource::new(0x6368_6f72_6461_6c00, t)).len())
            .sum();
        total as f64 / TRIALS as f64
    };
    let (mut lo, mut hi) = (0.0, p as f64);
    if mean_edges(lo) >= target {
        return lo;
    }
    if mean_edges(hi) <= target {
        return hi;
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if mean_edges(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random undirected tree on `p` vertices.
///
/// `tree-ba`: each new vertex attaches to one existing vertex chosen with
/// probability proportional to its degree. `tree-bounded-degree`: a
/// Galton–Watson process grown breadth-first with offspring uniform on
/// `{0, .., bound − 1}` (so no degree exceeds `bound`), stopped at `p`
/// vertices; runs that die out earlier are rejected.
pub fn gen_random_tree(config: &GeneratorConfig, rng: &mut RandomSource) -> Result<Pdag> {
    config.validate()?;
    let p = config.p;
    let edges = match config.model {
        Model::TreeBa => ba_tree(p, rng),
        Model::TreeBoundedDegree => galton_watson_tree(p, config.degree_bound, rng)?,
        other => return Err(Error::Incompatible(format!("{} is not a tree model", other.name()))),
    };
    Pdag::undirected_graph(p, &edges)
}

fn ba_tree(p: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(p.saturating_sub(1));
    // Every edge endpoint once per incidence: sampling from it is degree-proportional.
    let mut ends: Vec<usize> = Vec::with_capacity(2 * p);
    for v in 1..p {
        let u = if ends.is_empty() { 0 } else { ends[rng.gen_range(0..ends.len())] };
        edges.push((u, v));
        ends.push(u);
        ends.push(v);
    }
    edges
}

const GW_ATTEMPTS: usize = 100_000;

fn galton_watson_tree(p: usize, bound: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if p <= 2 || bound == 2 {
        // Degree at most two: the tree is a path.
        return Ok((1..p).map(|v| (v - 1, v)).collect());
    }
    for _ in 0..GW_ATTEMPTS {
        let mut edges = Vec::with_capacity(p - 1);
        let mut queue = VecDeque::from([0usize]);
        let mut next = 1;
        while let Some(v) = queue.pop_front() {
            let kids = rng.gen_range(0..bound);
            for _ in 0..kids {
                if next == p {
                    break;
                }
                edges.push((v, next));
                queue.push_back(next);
                next += 1;
            }
            if next == p {
                return Ok(edges);
            }
        }
    }
    Err(Error::Domain(format!("no Galton-Watson tree reached {p} vertices with degree bound {bound}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_chordal, ops::undirected_components};

    #[test]
    fn er_extremes_and_determinism() {
        let mut cfg = GeneratorConfig::new(Model::ErDag, 6, 0.0);
        assert_eq!(gen_erdos_renyi_dag(&cfg, &mut RandomSource::new(1, 0)).unwrap().num_edges(), 0);
        cfg.r = 1.0;
        assert_eq!(gen_erdos_renyi_dag(&cfg, &mut RandomSource::new(1, 0)).unwrap().num_edges(), 15);
        cfg.r = 0.4;
        let a = gen_erdos_renyi_dag(&cfg, &mut RandomSource::new(9, 0)).unwrap();
        let b = gen_erdos_renyi_dag(&cfg, &mut RandomSource::new(9, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chordal_outputs() {
        for (p, r) in [(1, 0.2), (2, 0.0), (10, 0.2), (20, 0.2), (15, 0.5)] {
            let cfg = GeneratorConfig::new(Model::ChordalPeo, p, r);
            for s in 0..30 {
                let g = gen_random_chordal(&cfg, &mut RandomSource::new(s, 0)).unwrap();
                assert!(is_chordal(&g));
                assert_eq!(undirected_components(&g).len(), 1);
                if p == 2 {
                    assert_eq!(g.num_edges(), 1);
                }
            }
        }
    }

    #[test]
    fn chordal_density_is_calibrated() {
        let cfg = GeneratorConfig::new(Model::ChordalPeo, 20, 0.2);
        let n = 200;
        let total: usize =
            (0..n).map(|s| gen_random_chordal(&cfg, &mut RandomSource::new(s, 1)).unwrap().num_edges()).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 38.0).abs() < 3.0, "mean edges {mean}");
    }

    #[test]
    fn trees() {
        for model in [Model::TreeBa, Model::TreeBoundedDegree] {
            for p in [1, 2, 5, 12, 40] {
                let cfg = GeneratorConfig::new(model, p, 0.0);
                let t = gen_random_tree(&cfg, &mut RandomSource::new(p as u64, 0)).unwrap();
                assert_eq!(t.num_edges(), p - 1);
                assert_eq!(undirected_components(&t).len(), 1);
                if model == Model::TreeBoundedDegree {
                    assert!((0..p).all(|v| t.degree(v) <= cfg.degree_bound));
                }
            }
        }
    }
}
