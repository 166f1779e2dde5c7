//! The average-gain objective: exact and sampled.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ops::check_essential, Dag, Pdag, TargetSet};
use crate::mec::{MecCounter, RandomSource, Sampler, SamplerKind};
use crate::orient::close_with;
use crate::par;
use super::resolve::{MemberClosure, Scratch};

/// Exact average gain: the targets' incident undirected edges are oriented
/// every consistent way, each orientation weighted by the number of class
/// members agreeing with it. All members sharing those orientations resolve
/// the same edges, so one closure per orientation suffices.
pub fn exact_average_gain(essential: &Pdag, targets: &TargetSet) -> Result<BigRational> {
    check_essential(essential)?;
    check_targets(essential, targets)?;
    Ok(exact_with(&MecCounter::new(), essential, targets))
}

fn check_targets(essential: &Pdag, targets: &TargetSet) -> Result<()> {
    match targets.iter().find(|&t| t >= essential.vertex_count()) {
        Some(t) => Err(Error::InvalidTargets(format!("vertex {t} out of range"))),
        None => Ok(()),
    }
}

pub(crate) fn exact_with(counter: &MecCounter, essential: &Pdag, targets: &TargetSet) -> BigRational {
    let edges: Vec<(usize, usize)> = essential
        .undirected_edges()
        .into_iter()
        .filter(|&(a, b)| targets.contains(a) || targets.contains(b))
        .collect();
    if edges.is_empty() {
        return BigRational::zero();
    }
    let size = counter.count_unchecked(essential, essential);
    let mut weighted = BigUint::zero();
    let mut covered = BigUint::zero();
    let mut work = essential.clone();
    let mut assigned = Vec::with_capacity(edges.len());
    let mut visit = |h: &Pdag, orientation: &[(usize, usize)]| {
        let c = counter.count_unchecked(essential, h);
        if c.is_zero() {
            return;
        }
        let d = close_with(essential, orientation).expect("a hypothesis with members closes consistently").gain();
        weighted += &c * BigUint::from(d);
        covered += c;
    };
    orient_all(&mut work, &edges, 0, &mut assigned, &mut visit);
    debug_assert_eq!(covered, size, "hypotheses partition the class");
    BigRational::new(BigInt::from(weighted), BigInt::from(size))
}

/// Backtracking over orientations of `edges`, pruning new colliders between
/// nonadjacent parents and directed cycles.
fn orient_all(
    work: &mut Pdag,
    edges: &[(usize, usize)],
    i: usize,
    assigned: &mut Vec<(usize, usize)>,
    visit: &mut impl FnMut(&Pdag, &[(usize, usize)]),
) {
    if i == edges.len() {
        visit(work, assigned);
        return;
    }
    let (a, b) = edges[i];
    for (tail, head) in [(a, b), (b, a)] {
        if creates_collider(work, tail, head) || reaches(work, head, tail) {
            continue;
        }
        work.orient(tail, head);
        assigned.push((tail, head));
        orient_all(work, edges, i + 1, assigned, visit);
        assigned.pop();
        work.unorient(tail, head);
    }
}

fn creates_collider(g: &Pdag, tail: usize, head: usize) -> bool {
    g.parents(head).ones().any(|c| c != tail && !g.adjacent(c, tail))
}

fn reaches(g: &Pdag, from: usize, to: usize) -> bool {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        for w in g.children(v).ones() {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Smallest `N` with `N > m (2 + ε) / ε² · ln(2 / δ)`; 1 when `m = 0`.
pub fn required_samples(epsilon: f64, delta: f64, undirected_count: usize) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    if undirected_count == 0 {
        return Ok(1);
    }
    let bound = undirected_count as f64 * (2.0 + epsilon) / (epsilon * epsilon) * (2.0 / delta).ln();
    if bound >= usize::MAX as f64 / 2.0 {
        return Err(Error::Domain("sample bound overflows".into()));
    }
    Ok(bound.floor() as usize + 1)
}

/// Per-call accuracy `(ε′ / 4k, δ′ / 4k²)` under which greedy with sampled
/// objectives is a `(1 − 1/e − ε′)`-approximation with probability `1 − δ′`.
pub fn guarantee_parameters(eps_prime: f64, delta_prime: f64, k: usize) -> Result<(f64, f64)> {
    if !(eps_prime > 0.0 && delta_prime > 0.0) || k == 0 {
        return Err(Error::Domain("eps_prime, delta_prime and k must be positive".into()));
    }
    let k = k as f64;
    Ok((eps_prime / (4.0 * k), delta_prime / (4.0 * k * k)))
}

/// How an evaluator computes the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvaluatorMode {
    Exact,
    /// Mean gain over `N` uniformly sampled members.
    Unbiased(usize),
    /// Mean gain over `N` members from the fast sampler.
    Fast(usize),
}

/// When sampled evaluators draw fresh members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplePolicy {
    /// Every estimate draws its own `N` members, so a marginal gain is the
    /// difference of two independent estimates.
    #[default]
    PerQuery,
    /// One pool of `N` members per greedy round, shared by all candidates of
    /// that round. Per-member singleton resolved sets are cached and combined
    /// by union, which is exact for any target set.
    PerRound,
}

/// Evaluates the average gain (exactly or by sampling) and counts calls.
///
/// Sample `j` of query `q` draws from stream `(q << 32) | j` of the seed, so
/// results do not depend on the worker count.
pub struct GainEvaluator {
    essential: Pdag,
    mode: EvaluatorMode,
    policy: SamplePolicy,
    seed: u64,
    threads: usize,
    counter: Arc<MecCounter>,
    sampler: Option<Sampler>,
    evaluations: u64,
    queries: u64,
    edge_index: Vec<u32>,
    undirected: usize,
    pool: Option<Pool>,
    exact_base: Option<(TargetSet, BigRational)>,
    member_closure: Option<MemberClosure>,
}

/// Cached singleton resolved sets of a sample pool, as bit masks over the
/// essential graph's undirected edges: `masks[(j * p + x) * words ..]`.
struct Pool {
    samples: usize,
    words: usize,
    masks: Vec<u64>,
}

impl GainEvaluator {
    pub fn new(essential: &Pdag, mode: EvaluatorMode, seed: u64) -> Result<Self> {
        check_essential(essential)?;
        let counter = Arc::new(MecCounter::new());
        let sampler = match mode {
            EvaluatorMode::Exact => None,
            EvaluatorMode::Unbiased(n) | EvaluatorMode::Fast(n) if n == 0 => {
                return Err(Error::Domain("sample count must be at least 1".into()))
            }
            EvaluatorMode::Unbiased(_) => Some(Sampler::Uniform(crate::mec::UniformSampler::with_counter(
                essential,
                counter.clone(),
            )?)),
            EvaluatorMode::Fast(_) => Some(Sampler::new(SamplerKind::Fast, essential)?),
        };
        let p = essential.vertex_count();
        let mut edge_index = vec![u32::MAX; p * p];
        let edges = essential.undirected_edges();
        for (i, &(a, b)) in edges.iter().enumerate() {
            edge_index[a * p + b] = i as u32;
            edge_index[b * p + a] = i as u32;
        }
        Ok(GainEvaluator {
            essential: essential.clone(),
            mode,
            policy: SamplePolicy::default(),
            seed,
            threads: par::default_threads(),
            counter,
            sampler,
            evaluations: 0,
            queries: 0,
            edge_index,
            undirected: edges.len(),
            pool: None,
            exact_base: None,
            member_closure: MemberClosure::new(essential),
        })
    }

    pub fn exact(essential: &Pdag) -> Result<Self> {
        Self::new(essential, EvaluatorMode::Exact, 0)
    }

    pub fn with_policy(mut self, policy: SamplePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn essential(&self) -> &Pdag {
        &self.essential
    }

    pub fn mode(&self) -> EvaluatorMode {
        self.mode
    }

    pub fn policy(&self) -> SamplePolicy {
        self.policy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_exact(&self) -> bool {
        self.mode == EvaluatorMode::Exact
    }

    pub fn samples(&self) -> Option<usize> {
        match self.mode {
            EvaluatorMode::Exact => None,
            EvaluatorMode::Unbiased(n) | EvaluatorMode::Fast(n) => Some(n),
        }
    }

    /// Objective or marginal-gain evaluations so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn counter(&self) -> &Arc<MecCounter> {
        &self.counter
    }

    fn check(&self, targets: &TargetSet) -> Result<()> {
        check_targets(&self.essential, targets)
    }

    /// Objective value of `targets`.
    pub fn evaluate(&mut self, targets: &TargetSet) -> Result<BigRational> {
        self.check(targets)?;
        self.evaluations += 1;
        match self.mode {
            EvaluatorMode::Exact => Ok(exact_with(&self.counter, &self.essential, targets)),
            _ if self.policy == SamplePolicy::PerRound => {
                if self.pool.is_none() {
                    self.begin_round()?;
                }
                Ok(self.pool_value(targets, None))
            }
            _ => self.fresh_estimate(targets),
        }
    }

    /// Starts a greedy round: under [`SamplePolicy::PerRound`] a new pool
    /// is drawn; otherwise nothing happens.
    pub fn begin_round(&mut self) -> Result<()> {
        if self.is_exact() || self.policy != SamplePolicy::PerRound {
            return Ok(());
        }
        self.pool = Some(self.draw_pool()?);
        Ok(())
    }

    /// Marginal gain of adding `x` to `base`, and the objective of
    /// `base ∪ {x}`. Per query, the two estimates come from independent
    /// draws and the marginal may be negative; within a pooled round they
    /// share members and it is not.
    pub fn marginal(&mut self, base: &TargetSet, x: usize) -> Result<(BigRational, BigRational)> {
        self.check(&base.with(x))?;
        self.evaluations += 1;
        match self.mode {
            EvaluatorMode::Exact => {
                let base_value = match &self.exact_base {
                    Some((b, v)) if b == base => v.clone(),
                    _ => {
                        let v = exact_with(&self.counter, &self.essential, base);
                        self.exact_base = Some((base.clone(), v.clone()));
                        v
                    }
                };
                let value = exact_with(&self.counter, &self.essential, &base.with(x));
                Ok((&value - &base_value, value))
            }
            _ if self.policy == SamplePolicy::PerRound => {
                if self.pool.is_none() {
                    self.begin_round()?;
                }
                let value = self.pool_value(base, Some(x));
                let base_value = self.pool_value(base, None);
                Ok((&value - &base_value, value))
            }
            _ => {
                let base_value = self.fresh_estimate(base)?;
                let value = self.fresh_estimate(&base.with(x))?;
                Ok((&value - &base_value, value))
            }
        }
    }

    fn draw(&self, sampler: &Sampler, query: u64, j: usize) -> Result<Dag> {
        let mut rng = RandomSource::new(self.seed, (query << 32) | j as u64);
        sampler.sample(&mut rng)
    }

    fn resolved(&self, truth: &Dag, targets: &TargetSet) -> usize {
        if let Some(c) = &self.member_closure {
            let m = targets.iter().fold(0u64, |m, v| m | 1 << v);
            return c.resolve(truth, m, &mut Scratch::default(), |_, _| {});
        }
        let orientation: Vec<(usize, usize)> = truth
            .directed_edges()
            .into_iter()
            .filter(|&(a, b)| (targets.contains(a) || targets.contains(b)) && self.essential.has_undirected(a, b))
            .collect();
        if orientation.is_empty() {
            return 0;
        }
        close_with(&self.essential, &orientation).expect("sampled members close consistently").gain()
    }

    /// Mean gain of `targets` over `N` members drawn for this query alone.
    fn fresh_estimate(&mut self, targets: &TargetSet) -> Result<BigRational> {
        let query = self.queries;
        self.queries += 1;
        let n = self.samples().expect("sampled mode");
        if targets.is_empty() {
            return Ok(BigRational::zero());
        }
        let sampler = self.sampler.as_ref().expect("sampled mode has a sampler");
        let per_sample = par::map_indices(n, self.threads, |j| -> Result<usize> {
            Ok(self.resolved(&self.draw(sampler, query, j)?, targets))
        });
        let mut total = 0u64;
        for r in per_sample {
            total += r? as u64;
        }
        Ok(BigRational::new(total.into(), BigInt::from(n)))
    }

    fn draw_pool(&mut self) -> Result<Pool> {
        let query = self.queries;
        self.queries += 1;
        let sampler = self.sampler.as_ref().expect("sampled mode has a sampler");
        let n = self.samples().expect("sampled mode");
        let p = self.essential.vertex_count();
        let words = self.undirected.div_ceil(64).max(1);
        let chunks = par::map_indices(n, self.threads, |j| -> Result<Vec<u64>> {
            let truth = self.draw(sampler, query, j)?;
            let mut masks = vec![0u64; p * words];
            if let Some(c) = &self.member_closure {
                let mut scratch = Scratch::default();
                for x in 0..p {
                    let row = &mut masks[x * words..(x + 1) * words];
                    c.resolve(&truth, 1 << x, &mut scratch, |a, b| {
                        let e = self.edge_index[a * p + b] as usize;
                        row[e / 64] |= 1 << (e % 64);
                    });
                }
                return Ok(masks);
            }
            for x in 0..p {
                let orientation: Vec<(usize, usize)> = truth
                    .parents(x)
                    .ones()
                    .map(|w| (w, x))
                    .chain(truth.children(x).ones().map(|w| (x, w)))
                    .filter(|&(a, b)| self.essential.has_undirected(a, b))
                    .collect();
                if orientation.is_empty() {
                    continue;
                }
                let r = close_with(&self.essential, &orientation).expect("sampled members close consistently");
                for (a, b) in r.newly_directed {
                    let e = self.edge_index[a * p + b] as usize;
                    masks[x * words + e / 64] |= 1 << (e % 64);
                }
            }
            Ok(masks)
        });
        let mut masks = Vec::with_capacity(n * p * words);
        for c in chunks {
            masks.extend(c?);
        }
        Ok(Pool { samples: n, words, masks })
    }

    fn pool_value(&self, base: &TargetSet, x: Option<usize>) -> BigRational {
        let pool = self.pool.as_ref().expect("pool drawn");
        let p = self.essential.vertex_count();
        let w = pool.words;
        let mut total = 0u64;
        let mut acc = vec![0u64; w];
        for j in 0..pool.samples {
            acc.iter_mut().for_each(|a| *a = 0);
            for v in base.iter().chain(x) {
                let m = &pool.masks[(j * p + v) * w..(j * p + v + 1) * w];
                acc.iter_mut().zip(m).for_each(|(a, b)| *a |= b);
            }
            total += acc.iter().map(|a| a.count_ones() as u64).sum::<u64>();
        }
        BigRational::new(total.into(), pool.samples.into())
    }
}

/// Sampled estimate of the average gain as a float.
pub fn estimate_average_gain(evaluator: &mut GainEvaluator, targets: &TargetSet) -> Result<f64> {
    Ok(super::to_f64(&evaluator.evaluate(targets)?))
}
