//! A small oracle-case benchmark written as CSV to standard output.

use causal_design::bench::{run_experiment, summarize, write_csv, Model, SuiteConfig, SuiteSpec};
use causal_design::design::{Method, ObjectiveKind};
use causal_design::Result;

fn main() -> Result<()> {
    let suite = |model, p, r, methods: Vec<Method>| SuiteSpec {
        model,
        p,
        r,
        degree_bound: 4,
        instances: 5,
        k: 2,
        methods,
        objective: ObjectiveKind::Average,
        ground_truths: 20,
        root_mode: Default::default(),
        samples: Some(500),
        epsilon: 0.1,
        delta: 0.1,
        sample_policy: Default::default(),
    };
    let config = SuiteConfig {
        seed: 42,
        suites: vec![
            suite(Model::ChordalPeo, 10, 0.3, vec![Method::GreedyExact, Method::GreedyUnbiased, Method::Rand, Method::Maxdeg]),
            suite(Model::TreeBoundedDegree, 12, 0.0, vec![Method::TreeGreedy, Method::TreeMinimax, Method::Rand]),
        ],
        timing: false,
    };
    let records = run_experiment(&config);
    write_csv(&records, std::io::stdout())?;
    for row in summarize(&records) {
        eprintln!("suite {} {:<16} mean ratio {:?}", row.suite, row.method, row.mean_ratio);
    }
    Ok(())
}
