//! Greedy and lazy greedy maximisation of the average gain.

use num_rational::BigRational;
use num_traits::Zero;

use super::{DesignReport, DesignStep, GainEvaluator, ObjectiveKind};
use crate::error::{Error, Result};
use crate::graph::TargetSet;

fn check_budget(evaluator: &GainEvaluator, k: usize) -> Result<usize> {
    let p = evaluator.essential().vertex_count();
    if k > p {
        return Err(Error::Budget { k, max: p });
    }
    Ok(p)
}

fn method_name(evaluator: &GainEvaluator, lazy: bool) -> String {
    let mode = match evaluator.mode() {
        super::EvaluatorMode::Exact => "exact",
        super::EvaluatorMode::Unbiased(_) => "unbiased",
        super::EvaluatorMode::Fast(_) => "fast",
    };
    format!("{}-{mode}", if lazy { "lazy" } else { "greedy" })
}

fn finish(evaluator: &GainEvaluator, k: usize, chosen: TargetSet, steps: Vec<DesignStep>, lazy: bool) -> DesignReport {
    let value = steps.last().map(|s| s.objective.clone()).unwrap_or_else(BigRational::zero);
    let mut report =
        DesignReport::new(&method_name(evaluator, lazy), ObjectiveKind::Average, k, chosen, steps, value, evaluator.evaluations());
    if !evaluator.is_exact() {
        report.seed = Some(evaluator.seed());
        report.samples = evaluator.samples();
        report.parameters.insert("sample_policy".into(), serde_json::to_value(evaluator.policy()).expect("policy serialises"));
    }
    report
}

/// `k` rounds, each adding the vertex of largest marginal gain (smallest id
/// on ties). Every remaining vertex is evaluated in every round.
pub fn greedy_design(evaluator: &mut GainEvaluator, k: usize) -> Result<DesignReport> {
    let p = check_budget(evaluator, k)?;
    let mut chosen = TargetSet::empty();
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        evaluator.begin_round()?;
        let mut best: Option<(usize, BigRational, BigRational)> = None;
        for x in (0..p).filter(|&x| !chosen.contains(x)) {
            let (delta, value) = evaluator.marginal(&chosen, x)?;
            if best.as_ref().is_none_or(|(_, b, _)| delta > *b) {
                best = Some((x, delta, value));
            }
        }
        let (x, delta, value) = best.expect("k <= p leaves a candidate");
        chosen = chosen.with(x);
        steps.push(DesignStep { vertex: x, marginal_gain: delta, objective: value });
    }
    Ok(finish(evaluator, k, chosen, steps, false))
}

/// Lazy greedy: profits start at +∞ and are refreshed only for the current
/// leader; a leader whose profit was refreshed this round is taken.
/// Priority is (profit descending, id ascending), so with an exact
/// evaluator the result equals [`greedy_design`] with no more evaluations.
/// With a sampled evaluator stale profits come from other samples and the
/// report is flagged heuristic.
pub fn lazy_greedy_design(evaluator: &mut GainEvaluator, k: usize) -> Result<DesignReport> {
    let p = check_budget(evaluator, k)?;
    let mut chosen = TargetSet::empty();
    let mut steps = Vec::with_capacity(k);
    // None stands for +∞.
    let mut profit: Vec<Option<BigRational>> = vec![None; p];
    let mut value: Vec<BigRational> = vec![BigRational::zero(); p];
    for _ in 0..k {
        evaluator.begin_round()?;
        let mut updated = vec![false; p];
        loop {
            let leader = (0..p)
                .filter(|&x| !chosen.contains(x))
                .reduce(|a, b| if ahead(&profit[b], &profit[a]) { b } else { a })
                .expect("k <= p leaves a candidate");
            if updated[leader] {
                chosen = chosen.with(leader);
                steps.push(DesignStep {
                    vertex: leader,
                    marginal_gain: profit[leader].clone().expect("updated profit is finite"),
                    objective: value[leader].clone(),
                });
                break;
            }
            let (delta, v) = evaluator.marginal(&chosen, leader)?;
            profit[leader] = Some(delta);
            value[leader] = v;
            updated[leader] = true;
        }
    }
    let mut report = finish(evaluator, k, chosen, steps, true);
    report.heuristic = !evaluator.is_exact();
    Ok(report)
}

/// Strictly higher profit; `b` is only ever compared against an earlier id.
fn ahead(b: &Option<BigRational>, a: &Option<BigRational>) -> bool {
    match (b, a) {
        (None, None) => false,
        (None, Some(_)) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x > y,
    }
}
