//! One entry point for every design method.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{
    brute_force_design, exact_average_gain, greedy_design, guarantee_parameters, lazy_greedy_design,
    required_samples, worst_case_gain, DesignReport, EvaluatorMode, GainEvaluator, ObjectiveKind, SamplePolicy,
};
use crate::bench::{max_degree_baseline, rand_baseline};
use crate::error::{Error, Result};
use crate::graph::{Pdag, TargetSet};
use crate::mec::{RandomSource, DEFAULT_ENUMERATION_CAP};
use crate::tree::{tree_average_gain, tree_greedy_average, tree_minimax_design, ForestDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GreedyExact,
    GreedyUnbiased,
    GreedyFast,
    Lazy,
    BruteForce,
    TreeMinimax,
    TreeGreedy,
    Rand,
    Maxdeg,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::GreedyExact,
        Method::GreedyUnbiased,
        Method::GreedyFast,
        Method::Lazy,
        Method::BruteForce,
        Method::TreeMinimax,
        Method::TreeGreedy,
        Method::Rand,
        Method::Maxdeg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::GreedyExact => "greedy-exact",
            Method::GreedyUnbiased => "greedy-unbiased",
            Method::GreedyFast => "greedy-fast",
            Method::Lazy => "lazy",
            Method::BruteForce => "brute-force",
            Method::TreeMinimax => "tree-minimax",
            Method::TreeGreedy => "tree-greedy",
            Method::Rand => "rand",
            Method::Maxdeg => "maxdeg",
        }
    }

    pub fn supports(self, objective: ObjectiveKind) -> bool {
        match objective {
            ObjectiveKind::Average => true,
            ObjectiveKind::Worst => {
                matches!(self, Method::BruteForce | Method::TreeMinimax | Method::Rand | Method::Maxdeg)
            }
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Incompatible(format!("unknown method {s:?}")))
    }
}

/// Settings shared by the design methods.
#[derive(Clone, Debug)]
pub struct DesignOptions {
    pub seed: u64,
    /// Fixed sample count for sampled methods; overrides the accuracy settings.
    pub samples: Option<usize>,
    /// Per-call accuracy used when no sample count is given.
    pub epsilon: f64,
    pub delta: f64,
    /// Overall guarantee; when both are set they replace `epsilon`/`delta`
    /// through [`guarantee_parameters`].
    pub eps_prime: Option<f64>,
    pub delta_prime: Option<f64>,
    pub policy: SamplePolicy,
    pub member_cap: usize,
    pub threads: Option<usize>,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            seed: 0,
            samples: None,
            epsilon: 0.1,
            delta: 0.1,
            eps_prime: None,
            delta_prime: None,
            policy: SamplePolicy::default(),
            member_cap: DEFAULT_ENUMERATION_CAP,
            threads: None,
        }
    }
}

impl DesignOptions {
    /// Sample count and the `(ε, δ)` it was derived from, if any.
    pub fn resolve_samples(&self, essential: &Pdag, k: usize) -> Result<(usize, Option<(f64, f64)>)> {
        if let Some(n) = self.samples {
            if n == 0 {
                return Err(Error::Domain("sample count must be at least 1".into()));
            }
            return Ok((n, None));
        }
        let (eps, delta) = match (self.eps_prime, self.delta_prime) {
            (Some(e), Some(d)) => guarantee_parameters(e, d, k.max(1))?,
            (None, None) => (self.epsilon, self.delta),
            _ => return Err(Error::Domain("eps-prime and delta-prime must be given together".into())),
        };
        Ok((required_samples(eps, delta, essential.num_undirected())?, Some((eps, delta))))
    }
}

/// Runs `method` for budget `k`. Fails with [`Error::Budget`] when `k`
/// exceeds the vertex count and with [`Error::Incompatible`] when the method
/// cannot serve the objective or needs tree components the graph lacks.
pub fn run_design(
    essential: &Pdag,
    k: usize,
    objective: ObjectiveKind,
    method: Method,
    options: &DesignOptions,
) -> Result<DesignReport> {
    crate::graph::ops::check_essential(essential)?;
    let p = essential.vertex_count();
    if k > p {
        return Err(Error::Budget { k, max: p });
    }
    if !method.supports(objective) {
        return Err(Error::Incompatible(format!(
            "method {} does not optimise the {} objective",
            method.name(),
            match objective {
                ObjectiveKind::Average => "average",
                ObjectiveKind::Worst => "worst-case",
            }
        )));
    }
    let evaluator = |mode: EvaluatorMode| -> Result<GainEvaluator> {
        let ev = GainEvaluator::new(essential, mode, options.seed)?.with_policy(options.policy);
        Ok(match options.threads {
            Some(t) => ev.with_threads(t),
            None => ev,
        })
    };
    let mut report = match method {
        Method::GreedyExact => greedy_design(&mut evaluator(EvaluatorMode::Exact)?, k)?,
        Method::Lazy => lazy_greedy_design(&mut evaluator(EvaluatorMode::Exact)?, k)?,
        Method::GreedyUnbiased | Method::GreedyFast => {
            let (n, accuracy) = options.resolve_samples(essential, k)?;
            let mode = if method == Method::GreedyUnbiased { EvaluatorMode::Unbiased(n) } else { EvaluatorMode::Fast(n) };
            let mut report = greedy_design(&mut evaluator(mode)?, k)?;
            if let Some((e, d)) = accuracy {
                report.parameters.insert("epsilon".into(), e.into());
                report.parameters.insert("delta".into(), d.into());
            }
            report
        }
        Method::BruteForce => brute_force_design(essential, k, objective, options.member_cap)?,
        Method::TreeGreedy => tree_greedy_average(&ForestDecomposition::new(essential)?, k)?,
        Method::TreeMinimax => {
            let forest = ForestDecomposition::new(essential)?;
            let mut report = tree_minimax_design(&forest, k)?;
            if objective == ObjectiveKind::Average {
                report.objective = ObjectiveKind::Average;
                report.objective_value = tree_average_gain(&forest, &report.targets)?;
            }
            report
        }
        Method::Rand | Method::Maxdeg => {
            let targets = if method == Method::Rand {
                rand_baseline(essential, k, &mut RandomSource::new(options.seed, 0))?
            } else {
                max_degree_baseline(essential, k)?
            };
            let value = evaluate_exact(essential, &targets, objective, options.member_cap)?;
            let mut report = DesignReport::new(method.name(), objective, k, targets, Vec::new(), value, 1);
            if method == Method::Rand {
                report.seed = Some(options.seed);
            }
            report
        }
    };
    report.method = method.name().to_string();
    Ok(report)
}

/// Exact objective value of a fixed target set.
pub fn evaluate_exact(
    essential: &Pdag,
    targets: &TargetSet,
    objective: ObjectiveKind,
    member_cap: usize,
) -> Result<BigRational> {
    match objective {
        ObjectiveKind::Average => exact_average_gain(essential, targets),
        ObjectiveKind::Worst => Ok(BigRational::from_integer(worst_case_gain(essential, targets, member_cap)?.into())),
    }
}
