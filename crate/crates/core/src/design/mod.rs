//! Choosing intervention targets on general essential graphs.

mod brute;
mod greedy;
mod method;
mod objective;
mod resolve;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::{Pdag, TargetSet};

pub use brute::{brute_force_design, worst_case_gain, BRUTE_FORCE_SUBSET_CAP};
pub use greedy::{greedy_design, lazy_greedy_design};
pub use method::{evaluate_exact, run_design, DesignOptions, Method};
pub use objective::{
    estimate_average_gain, exact_average_gain, guarantee_parameters, required_samples, EvaluatorMode,
    GainEvaluator, SamplePolicy,
};

/// Which objective a design optimises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Average,
    Worst,
}

impl std::str::FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "average" => Ok(ObjectiveKind::Average),
            "worst" => Ok(ObjectiveKind::Worst),
            other => Err(Error::Incompatible(format!("unknown objective {other:?}"))),
        }
    }
}

/// One greedy round.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignStep {
    pub vertex: usize,
    pub marginal_gain: BigRational,
    /// Objective of the targets chosen so far, this vertex included.
    pub objective: BigRational,
}

/// Outcome of a design method.
#[derive(Clone, Debug)]
pub struct DesignReport {
    pub method: String,
    pub objective: ObjectiveKind,
    pub k: usize,
    pub targets: TargetSet,
    /// Empty for methods that do not build the set incrementally.
    pub steps: Vec<DesignStep>,
    pub objective_value: BigRational,
    /// Objective (or marginal-gain) evaluations performed.
    pub evaluations: u64,
    /// Set when the method's exactness argument does not apply, e.g. lazy
    /// evaluation on top of a sampled objective.
    pub heuristic: bool,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl DesignReport {
    pub fn new(
        method: &str,
        objective: ObjectiveKind,
        k: usize,
        targets: TargetSet,
        steps: Vec<DesignStep>,
        objective_value: BigRational,
        evaluations: u64,
    ) -> Self {
        DesignReport {
            method: method.to_string(),
            objective,
            k,
            targets,
            steps,
            objective_value,
            evaluations,
            heuristic: false,
            seed: None,
            samples: None,
            parameters: BTreeMap::new(),
        }
    }

    pub fn objective_f64(&self) -> f64 {
        to_f64(&self.objective_value)
    }

    /// JSON rendering with vertex names from `g`; rationals appear both as
    /// floats and as exact `"num/den"` strings.
    pub fn to_json(&self, g: &Pdag) -> serde_json::Value {
        let steps: Vec<_> = self
            .steps
            .iter()
            .map(|s| {
                serde_json::json!({
                    "vertex": g.name(s.vertex),
                    "marginal_gain": to_f64(&s.marginal_gain),
                    "marginal_gain_exact": s.marginal_gain.to_string(),
                    "objective": to_f64(&s.objective),
                    "objective_exact": s.objective.to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "method": self.method,
            "objective": self.objective,
            "k": self.k,
            "targets": self.targets.names(g),
            "target_ids": self.targets.as_slice(),
            "steps": steps,
            "objective_value": self.objective_f64(),
            "objective_exact": self.objective_value.to_string(),
            "evaluations": self.evaluations,
            "heuristic": self.heuristic,
            "seed": self.seed,
            "samples": self.samples,
            "parameters": self.parameters,
        })
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
