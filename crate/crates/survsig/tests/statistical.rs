//! Fixed-seed statistical agreement: analytic joint survival sits within
//! four standard errors of a million-sample simulation for every bundled
//! model at five time tuples each. Seeds are pinned, so the gate is
//! deterministic.

use survsig::modelfile::LoadedModel;
use survsig::oracle::{estimate_joint_survival, simulate_failure_times};
use survsig::reliability::SurvivalEvaluator;

const SAMPLES: usize = 1_000_000;
const SIGMA: f64 = 4.0;

fn gate(text: &str, seed: u64, grids: &[&[f64]]) {
    let loaded = LoadedModel::from_json_str(text).unwrap();
    let model = loaded.shared().unwrap();
    let dists = loaded.distributions().to_vec();
    let evaluator = SurvivalEvaluator::new(&model, dists.clone()).unwrap();
    let run = simulate_failure_times(&model, &dists, seed, SAMPLES).unwrap();
    for times in grids {
        let exact = match times.len() {
            2 => evaluator.joint_survival_two(times[0], times[1]).unwrap(),
            3 => evaluator
                .joint_survival_three(times[0], times[1], times[2])
                .unwrap(),
            _ => unreachable!("joint queries take 2 or 3 times"),
        };
        let (estimate, stderr) = estimate_joint_survival(&run, times).unwrap();
        assert!(
            (exact - estimate).abs() <= SIGMA * stderr,
            "at {times:?}: exact {exact}, estimate {estimate}, stderr {stderr}"
        );
    }
}

#[test]
fn pair_of_four_shared_components() {
    gate(
        include_str!("../models/pair_small.json"),
        101,
        &[
            &[0.2, 0.2],
            &[0.5, 1.0],
            &[1.0, 0.5],
            &[1.5, 1.5],
            &[0.8, 0.3],
        ],
    );
}

#[test]
fn pair_of_seven_components() {
    gate(
        include_str!("../models/pair_medium.json"),
        102,
        &[
            &[0.3, 0.3],
            &[0.4, 0.9],
            &[0.9, 0.4],
            &[1.2, 1.2],
            &[0.1, 0.7],
        ],
    );
}

#[test]
fn pair_with_two_component_types() {
    gate(
        include_str!("../models/pair_two_types.json"),
        103,
        &[
            &[0.25, 0.25],
            &[0.4, 0.8],
            &[0.8, 0.4],
            &[1.1, 1.1],
            &[0.6, 0.15],
        ],
    );
}

#[test]
fn triple_with_every_sharing_pattern() {
    gate(
        include_str!("../models/triple_small.json"),
        104,
        &[
            &[0.3, 0.3, 0.3],
            &[0.2, 0.5, 0.8],
            &[0.8, 0.5, 0.2],
            &[0.5, 0.5, 1.0],
            &[1.2, 0.7, 0.9],
        ],
    );
}
