//! Experiment design when every undirected component is a tree.
//!
//! In a tree component every member has a single root, and the root fixes
//! every orientation. Intervening on `I` resolves every edge when the root is
//! in `I`; otherwise it resolves everything outside the component of
//! `T \ I` that holds the root. Both objectives therefore reduce to the sizes
//! of the components left after deleting the targets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::design::{DesignReport, DesignStep, ObjectiveKind};
use crate::error::{Error, Result};
use crate::graph::{ops::undirected_components, Pdag, TargetSet};

/// One tree component with its vertices in global ids.
#[derive(Clone, Debug)]
pub struct TreeComponent {
    /// Global ids, ascending; local id `i` is `vertices[i]`.
    pub vertices: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl TreeComponent {
    fn from_local(vertices: Vec<usize>, local: &Pdag) -> Self {
        let adj = (0..local.vertex_count()).map(|v| local.undirected_neighbors(v).ones().collect()).collect();
        TreeComponent { vertices, adj }
    }

    /// Wraps an undirected tree given in local ids.
    pub fn from_tree(tree: &Pdag) -> Result<Self> {
        check_tree(tree)?;
        Ok(Self::from_local((0..tree.vertex_count()).collect(), tree))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Local neighbours of local vertex `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn local_id(&self, global: usize) -> Option<usize> {
        self.vertices.binary_search(&global).ok()
    }

    /// Sizes of the components of the tree minus `removed` (local flags),
    /// plus the component label of every surviving vertex.
    fn components_without(&self, removed: &[bool]) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if removed[s] || label[s] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            label[s] = id;
            stack.push(s);
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in &self.adj[v] {
                    if !removed[w] && label[w] == usize::MAX {
                        label[w] = id;
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        (sizes, label)
    }

    fn removed_flags(&self, targets: &TargetSet) -> Vec<bool> {
        let mut removed = vec![false; self.len()];
        for t in targets.iter() {
            if let Some(i) = self.local_id(t) {
                removed[i] = true;
            }
        }
        removed
    }
}

fn check_tree(tree: &Pdag) -> Result<()> {
    let n = tree.vertex_count();
    if n == 0 || !tree.is_fully_undirected() {
        return Err(Error::Incompatible("expected a nonempty undirected tree".into()));
    }
    if tree.num_undirected() != n - 1 || undirected_components(tree).len() != 1 {
        return Err(Error::Incompatible("graph is not a tree".into()));
    }
    Ok(())
}

/// The nontrivial chain components of an essential graph, each a tree.
#[derive(Clone, Debug)]
pub struct ForestDecomposition {
    pub trees: Vec<TreeComponent>,
    /// Total number of vertices in the trees.
    pub p_u: usize,
    vertex_count: usize,
}

impl ForestDecomposition {
    /// Fails with [`Error::Incompatible`] when some chain component is not a tree.
    pub fn new(essential: &Pdag) -> Result<Self> {
        crate::graph::ops::check_essential(essential)?;
        let mut trees = Vec::new();
        for comp in undirected_components(essential) {
            if comp.len() < 2 {
                continue;
            }
            let local = essential.induced_undirected(&comp);
            if local.num_undirected() != comp.len() - 1 {
                return Err(Error::Incompatible(format!(
                    "chain component containing {} is not a tree",
                    essential.name(comp[0])
                )));
            }
            trees.push(TreeComponent::from_local(comp, &local));
        }
        let p_u = trees.iter().map(TreeComponent::len).sum();
        Ok(ForestDecomposition { trees, p_u, vertex_count: essential.vertex_count() })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Global ids of all tree vertices, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.trees.iter().flat_map(|t| t.vertices.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    fn check_targets(&self, targets: &TargetSet) -> Result<()> {
        match targets.iter().find(|&t| !self.trees.iter().any(|tr| tr.local_id(t).is_some())) {
            Some(t) => Err(Error::InvalidTargets(format!("vertex {t} is not in a tree component"))),
            None => Ok(()),
        }
    }
}

/// Edges resolved in a tree rooted at `root` (local id) by intervening on
/// `targets` (global ids; those outside the tree are ignored).
pub fn tree_gain(tree: &TreeComponent, targets: &TargetSet, root: usize) -> usize {
    let removed = tree.removed_flags(targets);
    let n = tree.len();
    if removed[root] {
        return n - 1;
    }
    let (sizes, label) = tree.components_without(&removed);
    n - sizes[label[root]]
}

/// Exact average gain over the forest:
/// `(Σ_r |T_r|² − |I| − Σ_r Σ_j |C_j(I_r)|²) / p_u`.
pub fn tree_average_gain(forest: &ForestDecomposition, targets: &TargetSet) -> Result<BigRational> {
    forest.check_targets(targets)?;
    if forest.p_u == 0 {
        return Ok(BigRational::zero());
    }
    let mut num: i64 = -(targets.len() as i64);
    for tree in &forest.trees {
        let n = tree.len() as i64;
        num += n * n;
        let (sizes, _) = tree.components_without(&tree.removed_flags(targets));
        num -= sizes.iter().map(|&s| (s * s) as i64).sum::<i64>();
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(forest.p_u)))
}

/// Greedy removal threshold test: DFS from `start`; a vertex whose live
/// subtree (itself included, removed subtrees excluded) exceeds `mid` is
/// removed. Returns the removed local ids.
fn threshold_cut(tree: &TreeComponent, start: usize, mid: usize) -> Vec<usize> {
    let n = tree.len();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![start];
    parent[start] = start;
    while let Some(v) = stack.pop() {
        order.push(v);
        // Reverse so that smaller neighbours are visited first.
        for &w in tree.adj[v].iter().rev() {
            if parent[w] == usize::MAX {
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut live = vec![1usize; n];
    let mut cut = Vec::new();
    for &v in order.iter().rev() {
        if live[v] > mid {
            cut.push(v);
            live[v] = 0;
        }
        if v != start {
            live[parent[v]] += live[v];
        }
    }
    cut.sort_unstable();
    cut
}

/// Minimax design on one tree: at most `budget` targets minimising the
/// largest component left after deleting them. Returns global target ids
/// and that size.
pub fn minimax_single_tree(tree: &TreeComponent, budget: usize) -> (TargetSet, usize) {
    let n = tree.len();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for start in 0..n {
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if threshold_cut(tree, start, mid).len() <= budget {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let cut = if lo == n { Vec::new() } else { threshold_cut(tree, start, lo) };
        let mut removed = vec![false; n];
        for &v in &cut {
            removed[v] = true;
        }
        let worst = tree.components_without(&removed).0.into_iter().max().unwrap_or(0);
        if best.as_ref().is_none_or(|(w, _)| worst < *w) {
            best = Some((worst, cut));
        }
    }
    let (worst, cut) = best.unwrap_or((0, Vec::new()));
    let targets = cut.into_iter().map(|v| tree.vertices[v]).collect();
    (targets, worst)
}

/// Optimal worst component size per tree and budget.
#[derive(Clone, Debug)]
pub struct MinimaxTable {
    /// `d[r][j]`: best worst-component size of tree `r` with budget `j`.
    pub d: Vec<Vec<usize>>,
    pub targets: Vec<Vec<TargetSet>>,
}

impl MinimaxTable {
    pub fn build(forest: &ForestDecomposition, k: usize) -> Self {
        let mut d = Vec::with_capacity(forest.trees.len());
        let mut targets = Vec::with_capacity(forest.trees.len());
        for tree in &forest.trees {
            let (row_d, row_t): (Vec<usize>, Vec<TargetSet>) = (0..=k)
                .map(|j| {
                    let (t, w) = minimax_single_tree(tree, j.min(tree.len()));
                    (w, t)
                })
                .unzip();
            d.push(row_d);
            targets.push(row_t);
        }
        MinimaxTable { d, targets }
    }
}

/// Budgets `k_r` with `Σ k_r ≤ k` minimising `Σ_r d[r][k_r]`, by dynamic
/// programming over trees. Ties go to the allocation giving earlier trees
/// smaller budgets. Returns the budgets and the objective.
pub fn allocate_budget(table: &MinimaxTable, k: usize) -> (Vec<usize>, usize) {
    let r = table.d.len();
    // best[i][b]: minimum over the first i trees using at most b budget.
    let mut best = vec![vec![0usize; k + 1]; r + 1];
    let mut choice = vec![vec![0usize; k + 1]; r + 1];
    for i in 1..=r {
        let row = &table.d[i - 1];
        for b in 0..=k {
            let mut top = usize::MAX;
            let mut arg = 0;
            for j in 0..=b.min(row.len() - 1) {
                let v = best[i - 1][b - j] + row[j];
                if v < top {
                    top = v;
                    arg = j;
                }
            }
            best[i][b] = top;
            choice[i][b] = arg;
        }
    }
    let mut budgets = vec![0; r];
    let mut b = k;
    for i in (1..=r).rev() {
        budgets[i - 1] = choice[i][b];
        b -= choice[i][b];
    }
    (budgets, best[r][k])
}

/// Minimax design over a forest: the per-tree table plus budget allocation.
pub fn minimax_forest(forest: &ForestDecomposition, k: usize) -> (TargetSet, usize) {
    let table = MinimaxTable::build(forest, k);
    let (budgets, objective) = allocate_budget(&table, k);
    let targets = budgets
        .iter()
        .enumerate()
        .fold(TargetSet::empty(), |acc, (r, &j)| acc.union(&table.targets[r][j]));
    (targets, objective)
}

/// Worst-case gain of `targets` on a forest: every tree at its least
/// favourable root.
pub fn tree_worst_case_gain(forest: &ForestDecomposition, targets: &TargetSet) -> usize {
    forest
        .trees
        .iter()
        .map(|t| (0..t.len()).map(|root| tree_gain(t, targets, root)).min().unwrap_or(0))
        .sum()
}

/// Greedy maximisation of [`tree_average_gain`]; candidates are the tree
/// vertices, ties go to the smallest id.
pub fn tree_greedy_average(forest: &ForestDecomposition, k: usize) -> Result<DesignReport> {
    let candidates = forest.vertices();
    if k > candidates.len() {
        return Err(Error::Budget { k, max: candidates.len() });
    }
    let mut chosen = TargetSet::empty();
    let mut current = BigRational::zero();
    let mut steps = Vec::with_capacity(k);
    let mut evaluations = 0u64;
    for _ in 0..k {
        let mut best: Option<(usize, BigRational)> = None;
        for &x in candidates.iter().filter(|&&x| !chosen.contains(x)) {
            let value = tree_average_gain(forest, &chosen.with(x))?;
            evaluations += 1;
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((x, value));
            }
        }
        let (x, value) = best.expect("budget within candidate count");
        chosen = chosen.with(x);
        steps.push(DesignStep { vertex: x, marginal_gain: &value - &current, objective: value.clone() });
        current = value;
    }
    Ok(DesignReport::new("tree-greedy", ObjectiveKind::Average, k, chosen, steps, current, evaluations))
}

/// Minimax design reported as a [`DesignReport`] whose objective is the
/// worst-case gain of the chosen targets.
pub fn tree_minimax_design(forest: &ForestDecomposition, k: usize) -> Result<DesignReport> {
    if k > forest.vertex_count {
        return Err(Error::Budget { k, max: forest.vertex_count });
    }
    let (targets, worst_size) = minimax_forest(forest, k);
    let objective = BigRational::from_integer(tree_worst_case_gain(forest, &targets).into());
    let mut report = DesignReport::new("tree-minimax", ObjectiveKind::Worst, k, targets, Vec::new(), objective, 0);
    report.parameters.insert("minimax_component_sum".into(), worst_size.into());
    Ok(report)
}
