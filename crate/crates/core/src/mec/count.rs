//! Exact class-size counting by recursive rooting.
//!
//! The size of a class is the product over chain components of the size of
//! each component, and the size of an undirected connected chordal component
//! is the sum over its vertices `X` of the size of the `X`-rooted subclass.
//! Rooting `X` orients its edges outwards and closes under the Meek rules;
//! the undirected remainder splits into smaller components and the recursion
//! continues until everything is directed.
//!
//! Prior knowledge enters as a hypothesis graph: any rooting that orients an
//! edge against the hypothesis contributes zero.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{ops::check_essential, ops::undirected_components, skeleton, Pdag};
use crate::orient::rooted_closure;

/// Class sizes outgrow 64 bits quickly; counts are exact big integers.
pub type MecCount = BigUint;

/// Prior knowledge about orientations: the essential graph's skeleton with all
/// of its directed edges plus extra ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis(Pdag);

impl Hypothesis {
    /// Validates `h` against `essential`: same skeleton, and every directed
    /// edge of `essential` is directed the same way in `h`.
    pub fn new(essential: &Pdag, h: Pdag) -> Result<Self> {
        if h.vertex_count() != essential.vertex_count() || skeleton(&h) != skeleton(essential) {
            return Err(Error::InvalidHypothesis("skeleton differs from the essential graph".into()));
        }
        if let Some((a, b)) = essential.directed_edges().into_iter().find(|&(a, b)| !h.has_directed(a, b)) {
            return Err(Error::InvalidHypothesis(format!(
                "hypothesis drops the essential edge {} -> {}",
                essential.name(a),
                essential.name(b)
            )));
        }
        Ok(Hypothesis(h))
    }

    /// `essential` with the given undirected edges oriented.
    pub fn from_orientations(essential: &Pdag, orientations: &[(usize, usize)]) -> Result<Self> {
        let mut h = essential.clone();
        for &(a, b) in orientations {
            if h.has_undirected(a, b) {
                h.orient(a, b);
            } else if !h.has_directed(a, b) {
                return Err(Error::InvalidHypothesis(format!(
                    "{} -> {} is not an undirected edge of the essential graph",
                    essential.name(a),
                    essential.name(b)
                )));
            }
        }
        Ok(Hypothesis(h))
    }

    pub fn graph(&self) -> &Pdag {
        &self.0
    }
}

/// Canonical encoding of a constrained component: vertex count plus two bits
/// per pair `i < j` (none, undirected, `i → j`, `j → i`).
#[derive(Clone, PartialEq, Eq, Hash)]
struct ComponentKey {
    m: usize,
    bits: Vec<u64>,
}

impl ComponentKey {
    fn of(h: &Pdag) -> Self {
        let m = h.vertex_count();
        let pairs = m * m.saturating_sub(1) / 2;
        let mut bits = vec![0u64; (2 * pairs).div_ceil(64)];
        let mut k = 0usize;
        for i in 0..m {
            for j in i + 1..m {
                let code: u64 = if h.has_undirected(i, j) {
                    1
                } else if h.has_directed(i, j) {
                    2
                } else if h.has_directed(j, i) {
                    3
                } else {
                    0
                };
                bits[(2 * k) / 64] |= code << ((2 * k) % 64);
                k += 1;
            }
        }
        ComponentKey { m, bits }
    }
}

/// Memoising counter. Component results are keyed by their local structure,
/// so identical sub-components met under different roots are counted once.
///
/// Safe to share between threads: readers proceed concurrently and inserts
/// are idempotent.
#[derive(Default)]
pub struct MecCounter {
    memo: RwLock<HashMap<ComponentKey, Arc<Vec<BigUint>>>>,
}

impl MecCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct components memoised so far.
    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    pub fn count(&self, essential: &Pdag) -> Result<MecCount> {
        check_essential(essential)?;
        Ok(self.count_unchecked(essential, essential))
    }

    pub fn count_with_prior(&self, essential: &Pdag, h: &Hypothesis) -> Result<MecCount> {
        check_essential(essential)?;
        Ok(self.count_unchecked(essential, h.graph()))
    }

    /// Product over chain components of `essential`, constraints taken from `h`.
    pub(crate) fn count_unchecked(&self, essential: &Pdag, h: &Pdag) -> MecCount {
        let mut total = BigUint::one();
        for comp in undirected_components(essential) {
            if comp.len() < 2 {
                continue;
            }
            let local = restrict(essential, h, &comp);
            total *= self.component_size(&local);
            if total.is_zero() {
                break;
            }
        }
        total
    }

    pub(crate) fn component_size(&self, local: &Pdag) -> BigUint {
        self.root_sizes(local).iter().sum()
    }

    /// Per-root subclass sizes of a connected chordal component. `local`
    /// carries the component's skeleton, with hypothesis-forced edges directed.
    pub(crate) fn root_sizes(&self, local: &Pdag) -> Arc<Vec<BigUint>> {
        let key = ComponentKey::of(local);
        if let Some(hit) = self.memo.read().expect("memo lock").get(&key) {
            return hit.clone();
        }
        let sizes = Arc::new(self.compute_root_sizes(local));
        self.memo.write().expect("memo lock").entry(key).or_insert_with(|| sizes.clone());
        sizes
    }

    fn compute_root_sizes(&self, local: &Pdag) -> Vec<BigUint> {
        let m = local.vertex_count();
        if m == 1 {
            return vec![BigUint::one()];
        }
        let ug = skeleton(local);
        (0..m)
            .map(|root| {
                let rooted = rooted_closure(&ug, root).expect("rooting a chordal component is consistent");
                if rooted.newly_directed.iter().any(|&(a, b)| local.has_directed(b, a)) {
                    return BigUint::zero();
                }
                let mut size = BigUint::one();
                for sub in undirected_components(&rooted.closed) {
                    if sub.len() < 2 {
                        continue;
                    }
                    size *= self.component_size(&restrict(&rooted.closed, local, &sub));
                    if size.is_zero() {
                        break;
                    }
                }
                size
            })
            .collect()
    }
}

/// Component on `vertices` (local ids in the given order): skeleton taken
/// from the undirected edges of `g`, orientation from `h` where `h` directs.
pub(crate) fn restrict(g: &Pdag, h: &Pdag, vertices: &[usize]) -> Pdag {
    let mut out = Pdag::empty(vertices.len());
    for (i, &a) in vertices.iter().enumerate() {
        for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
            if !g.has_undirected(a, b) {
                continue;
            }
            if h.has_directed(a, b) {
                out.insert_directed(i, j);
            } else if h.has_directed(b, a) {
                out.insert_directed(j, i);
            } else {
                out.insert_undirected(i, j);
            }
        }
    }
    out
}

/// Size of the class represented by `essential`.
pub fn count_mec(essential: &Pdag) -> Result<MecCount> {
    MecCounter::new().count(essential)
}

/// Number of class members whose edges all agree with the hypothesis.
pub fn count_with_prior(essential: &Pdag, h: &Hypothesis) -> Result<MecCount> {
    MecCounter::new().count_with_prior(essential, h)
}

/// Subclass sizes of a UCEG per root vertex.
pub fn rooted_sizes(uceg: &Pdag) -> Result<Vec<MecCount>> {
    crate::orient::check_uceg(uceg)?;
    Ok(MecCounter::new().root_sizes(uceg).as_ref().clone())
}
