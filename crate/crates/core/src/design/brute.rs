//! Exhaustive oracles: worst-case gain by enumeration and brute-force design.

use num_rational::BigRational;

use super::objective::exact_with;
use super::{DesignReport, ObjectiveKind};
use crate::error::{Error, Result};
use crate::graph::{ops::check_essential, Dag, Pdag, TargetSet};
use crate::mec::{enumerate_mec, MecCounter};
use crate::orient::close_with;

/// Largest number of candidate target sets [`brute_force_design`] will try.
pub const BRUTE_FORCE_SUBSET_CAP: u64 = 2_000_000;

/// Resolved sets of every singleton experiment on one member, as edge masks.
struct MemberMasks {
    words: usize,
    masks: Vec<u64>,
}

impl MemberMasks {
    fn new(essential: &Pdag, truth: &Dag, edge_index: &[usize]) -> Self {
        let p = essential.vertex_count();
        let words = essential.num_undirected().div_ceil(64).max(1);
        let mut masks = vec![0u64; p * words];
        for x in 0..p {
            let orientation: Vec<(usize, usize)> = truth
                .directed_edges()
                .into_iter()
                .filter(|&(a, b)| (a == x || b == x) && essential.has_undirected(a, b))
                .collect();
            if orientation.is_empty() {
                continue;
            }
            for (a, b) in close_with(essential, &orientation).expect("members close consistently").newly_directed {
                let e = edge_index[a * p + b];
                masks[x * words + e / 64] |= 1 << (e % 64);
            }
        }
        MemberMasks { words, masks }
    }

    /// Resolved-edge count of a target set: the union of its singletons'.
    fn gain(&self, targets: &[usize]) -> usize {
        (0..self.words)
            .map(|w| targets.iter().fold(0u64, |acc, &x| acc | self.masks[x * self.words + w]).count_ones() as usize)
            .sum()
    }
}

fn edge_index(essential: &Pdag) -> Vec<usize> {
    let p = essential.vertex_count();
    let mut index = vec![usize::MAX; p * p];
    for (i, (a, b)) in essential.undirected_edges().into_iter().enumerate() {
        index[a * p + b] = i;
        index[b * p + a] = i;
    }
    index
}

/// Minimum gain of `targets` over all class members. Enumerates the class,
/// so it fails with [`Error::CapExceeded`] on classes larger than `cap`.
pub fn worst_case_gain(essential: &Pdag, targets: &TargetSet, cap: usize) -> Result<usize> {
    if let Some(t) = targets.iter().find(|&t| t >= essential.vertex_count()) {
        return Err(Error::InvalidTargets(format!("vertex {t} out of range")));
    }
    let index = edge_index(essential);
    let members = enumerate_mec(essential, cap)?;
    Ok(members
        .iter()
        .map(|d| MemberMasks::new(essential, d, &index).gain(targets.as_slice()))
        .min()
        .unwrap_or(0))
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// Next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Best `k`-subset under the exact objective, trying every one in
/// lexicographic order (the first optimum wins). The worst-case objective
/// enumerates the class once, bounded by `member_cap`.
pub fn brute_force_design(
    essential: &Pdag,
    k: usize,
    objective: ObjectiveKind,
    member_cap: usize,
) -> Result<DesignReport> {
    check_essential(essential)?;
    let p = essential.vertex_count();
    if k > p {
        return Err(Error::Budget { k, max: p });
    }
    let subsets = binomial(p, k);
    if subsets > BRUTE_FORCE_SUBSET_CAP {
        return Err(Error::CapExceeded { what: format!("{subsets} candidate target sets"), cap: BRUTE_FORCE_SUBSET_CAP });
    }
    let mut combo: Vec<usize> = (0..k).collect();
    let mut best: Option<(Vec<usize>, BigRational)> = None;
    let mut evaluations = 0u64;
    let mut consider = |c: &[usize], v: BigRational| {
        evaluations += 1;
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((c.to_vec(), v));
        }
    };
    match objective {
        ObjectiveKind::Average => {
            let counter = MecCounter::new();
            loop {
                let t: TargetSet = combo.iter().copied().collect();
                consider(&combo, exact_with(&counter, essential, &t));
                if !next_combination(&mut combo, p) {
                    break;
                }
            }
        }
        ObjectiveKind::Worst => {
            let index = edge_index(essential);
            let members: Vec<MemberMasks> =
                enumerate_mec(essential, member_cap)?.iter().map(|d| MemberMasks::new(essential, d, &index)).collect();
            loop {
                let worst = members.iter().map(|m| m.gain(&combo)).min().unwrap_or(0);
                consider(&combo, BigRational::from_integer(worst.into()));
                if !next_combination(&mut combo, p) {
                    break;
                }
            }
        }
    }
    let (targets, value) = best.expect("at least one subset");
    Ok(DesignReport::new("brute-force", objective, k, targets.into_iter().collect(), Vec::new(), value, evaluations))
}
