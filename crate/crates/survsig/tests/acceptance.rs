//! End-to-end acceptance checks. Each test covers one numbered criterion
//! of the release checklist, enforces a wall-clock ceiling, and prints a
//! PASS line (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};

use survsig::lifetimes::{
    count_kernel_single, count_kernel_three, count_kernel_two, count_kernel_two_multitype,
    LifetimeDistribution,
};
use survsig::model::{SharedModel, System};
use survsig::modelfile::LoadedModel;
use survsig::oracle::{
    estimate_joint_survival, exhaustive_signature, simulate_failure_times, SimRng,
};
use survsig::order::{OrderLabel, PairOrder, TripleOrder};
use survsig::reliability::{standalone_survival, SurvivalEvaluator};
use survsig::signature::{
    joint_signature_three, joint_signature_two, merged_signature, signature_bounds,
    survival_signature_single, variant_signature, EventKind, SignatureTable, DEFAULT_BUDGET,
};
use survsig::structure::{build, ComponentId, StructureExpr, StructureFunction};

const PAIR_SMALL: &str = include_str!("../models/pair_small.json");
const PAIR_MEDIUM: &str = include_str!("../models/pair_medium.json");
const TRIPLE_SMALL: &str = include_str!("../models/triple_small.json");
const PAIR_TWO_TYPES: &str = include_str!("../models/pair_two_types.json");
const SINGLE_BRIDGE: &str = include_str!("../models/single_bridge.json");

/// Absolute tolerance for identities that are exact in real arithmetic.
const TOL: f64 = 1e-12;
/// Statistical gate: analytic values must sit within this many standard
/// errors of the fixed-seed Monte-Carlo estimate.
const SIGMA: f64 = 4.0;

fn parse(text: &str) -> LoadedModel {
    LoadedModel::from_json_str(text).expect("bundled model parses")
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn finish(criterion: u32, what: &str, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed < limit,
        "criterion {criterion} took {elapsed:?}, ceiling is {limit:?}"
    );
    println!("PASS criterion {criterion}: {what} ({elapsed:.2?} < {limit:?})");
}

#[test]
fn c1_seven_component_pair_headline_cell_is_exact() {
    let start = Instant::now();
    let model = parse(PAIR_MEDIUM).shared().unwrap();
    let table = joint_signature_two(&model, PairOrder::Earlier, DEFAULT_BUDGET).unwrap();
    let cell = table.get(&[1, 1, 2, 1]).unwrap().expect("feasible cell");
    assert_eq!(cell.ratio(), ratio(10, 24), "joint cell (1,1,2,1)");
    // The whole table agrees with brute-force enumeration over every
    // labeled survivor configuration.
    let oracle = exhaustive_signature(
        &model,
        OrderLabel::Pair(PairOrder::Earlier),
        EventKind::AllFunction,
    )
    .unwrap();
    assert_eq!(table, oracle);
    finish(
        1,
        "seven-component pair: joint cell (1,1,2,1) = 10/24 exactly",
        start,
        Duration::from_secs(1),
    );
}

#[test]
fn c2_four_component_pair_known_rows_are_exact() {
    let start = Instant::now();
    let model = parse(PAIR_SMALL).shared().unwrap();
    let table = merged_signature(&model, EventKind::AllFunction, DEFAULT_BUDGET).unwrap();
    // Axis order (l_1, l_2, l_[1]2, l_1[2]); the thirteen rows with a
    // nontrivial derivation, spanning all three time orderings.
    let rows: [([usize; 4], i64, i64); 13] = [
        ([0, 0, 1, 1], 0, 1),
        ([0, 1, 1, 1], 1, 2),
        ([1, 0, 1, 1], 0, 1),
        ([1, 1, 1, 1], 1, 2),
        ([0, 0, 2, 1], 0, 1),
        ([0, 1, 2, 1], 1, 2),
        ([1, 0, 2, 1], 0, 1),
        ([1, 1, 2, 1], 1, 2),
        ([0, 0, 1, 2], 1, 2),
        ([0, 1, 1, 2], 1, 2),
        ([1, 0, 1, 2], 1, 1),
        ([1, 1, 1, 2], 1, 1),
        ([1, 1, 2, 2], 1, 1),
    ];
    for (levels, num, den) in rows {
        let cell = table
            .get(&levels)
            .unwrap()
            .unwrap_or_else(|| panic!("missing cell {levels:?}"));
        assert_eq!(cell.ratio(), ratio(num, den), "cell {levels:?}");
    }
    finish(
        2,
        "all 13 known four-component pair rows exact (values 0, 1/2, 1)",
        start,
        Duration::from_secs(1),
    );
}

#[test]
fn c3_third_system_state_classification_counts() {
    let start = Instant::now();
    let loaded = parse(TRIPLE_SMALL);
    let structures: Vec<&StructureFunction> =
        loaded.systems().iter().map(|s| s.structure()).collect();
    assert_eq!(structures.len(), 3);
    let names = ["A", "B", "C", "D", "E"];
    // Classify "all three systems function" over the 2^5 survivor
    // patterns of the shared pool; each pattern stands for 2^5 raw
    // possibilities in the 2^10 accounting of nested survivor slots.
    const SCALE: usize = 32;
    let mut failed_b_or_d = 0usize;
    let mut working_with_a = 0usize;
    let mut failed_a_c = 0usize;
    let mut working_via_c_e = 0usize;
    let mut failed_without_e = 0usize;
    for bits in 0..32u32 {
        let up = |name: &str| {
            let i = names.iter().position(|n| *n == name).unwrap();
            bits & (1 << i) != 0
        };
        let state: HashMap<ComponentId, bool> = names
            .iter()
            .map(|n| (ComponentId::new(*n).unwrap(), up(n)))
            .collect();
        let all = structures.iter().all(|s| s.evaluate(&state).unwrap());
        if !up("B") || !up("D") {
            assert!(!all, "a failed doubly-shared component stops some system");
            failed_b_or_d += SCALE;
        } else if up("A") {
            assert!(all, "B, D, A functioning keeps all three systems up");
            working_with_a += SCALE;
        } else if !up("C") {
            assert!(!all, "without A, the third system needs C");
            failed_a_c += SCALE;
        } else if up("E") {
            assert!(all, "C and E substitute for A in the third system");
            working_via_c_e += SCALE;
        } else {
            assert!(!all, "C without E leaves the third system down");
            failed_without_e += SCALE;
        }
    }
    assert_eq!(failed_b_or_d, 768);
    assert_eq!(working_with_a, 128);
    assert_eq!(failed_a_c, 64);
    assert_eq!(working_via_c_e, 32);
    assert_eq!(failed_without_e, 32);
    assert_eq!(
        failed_b_or_d + working_with_a + failed_a_c + working_via_c_e + failed_without_e,
        1024
    );
    finish(
        3,
        "third-system classification counts 768/128/64/32/32 of 1024",
        start,
        Duration::from_secs(1),
    );
}

#[test]
fn c4_joint_surface_matches_simulation_within_four_sigma() {
    let start = Instant::now();
    let loaded = parse(PAIR_SMALL);
    let model = loaded.shared().unwrap();
    let dists = loaded.distributions().to_vec();
    let evaluator = SurvivalEvaluator::new(&model, dists.clone()).unwrap();
    const SEED: u64 = 20_260_815;
    const SAMPLES: usize = 1_000_000;
    let run = simulate_failure_times(&model, &dists, SEED, SAMPLES).unwrap();
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
    let mut surface = vec![vec![0.0f64; grid.len()]; grid.len()];
    for (i, &t_1) in grid.iter().enumerate() {
        for (j, &t_2) in grid.iter().enumerate() {
            let exact = evaluator.joint_survival_two(t_1, t_2).unwrap();
            surface[i][j] = exact;
            let (estimate, stderr) = estimate_joint_survival(&run, &[t_1, t_2]).unwrap();
            assert!(
                (exact - estimate).abs() <= SIGMA * stderr,
                "({t_1}, {t_2}): exact {exact}, estimate {estimate}, stderr {stderr}"
            );
        }
    }
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            if i > 0 {
                assert!(surface[i][j] <= surface[i - 1][j] + TOL, "rising in t_1");
            }
            if j > 0 {
                assert!(surface[i][j] <= surface[i][j - 1] + TOL, "rising in t_2");
            }
        }
    }
    finish(
        4,
        "21x21 joint surface within 4 sigma of a 10^6-sample simulation, nonincreasing",
        start,
        Duration::from_secs(60),
    );
}

/// The count kernels demand survivor counts that are nonincreasing in
/// time, with exact ties carrying equal counts.
fn feasible_chain(stages: &[(f64, usize)]) -> bool {
    let mut sorted = stages.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    sorted.windows(2).all(|w| {
        if w[0].0 == w[1].0 {
            w[0].1 == w[1].1
        } else {
            w[1].1 <= w[0].1
        }
    })
}

#[test]
fn c5_count_kernels_are_normalized() {
    let start = Instant::now();
    let exp = LifetimeDistribution::Exponential { rate: 0.7 };
    let single_dists = vec![
        LifetimeDistribution::Exponential { rate: 1.0 },
        LifetimeDistribution::Weibull { shape: 1.5, scale: 1.0 },
    ];
    let weibull = LifetimeDistribution::Weibull { shape: 1.3, scale: 0.8 };
    let two_types = parse(PAIR_TWO_TYPES);
    let pair_model = two_types.shared().unwrap();
    let pair_counts = pair_model.group_counts();

    for trial in 0..10u64 {
        let mut rng = SimRng::for_sample(5_000 + trial, 0);
        let mut draw = || 0.1 + 1.5 * rng.next_uniform();
        // Three strictly increasing base times; orderings map onto them.
        let mut base = [draw(), draw(), draw()];
        base.sort_by(|a, b| a.partial_cmp(b).unwrap());
        base[1] += base[0] + 0.05;
        base[2] += base[1] + 0.05;

        // One query time per type lattice.
        let t = base[0];
        let counts = [2usize, 3];
        let mut sum = 0.0;
        for l_0 in 0..=counts[0] {
            for l_1 in 0..=counts[1] {
                sum += count_kernel_single(&single_dists, &counts, &[l_0, l_1], t).unwrap();
            }
        }
        assert!((sum - 1.0).abs() <= TOL, "single kernel sums to {sum}");

        // Two observation times in each of the three relations.
        let (n_1, n_2, n_12) = (1usize, 2, 2);
        for (t_1, t_2) in [(base[0], base[1]), (base[0], base[0]), (base[1], base[0])] {
            let mut sum = 0.0;
            for l_1 in 0..=n_1 {
                for l_2 in 0..=n_2 {
                    for a in 0..=n_12 {
                        for b in 0..=n_12 {
                            if !feasible_chain(&[(t_1, a), (t_2, b)]) {
                                continue;
                            }
                            sum += count_kernel_two(&exp, (n_1, n_2, n_12), (l_1, l_2, a, b), t_1, t_2)
                                .unwrap();
                        }
                    }
                }
            }
            assert!((sum - 1.0).abs() <= TOL, "pair kernel sums to {sum}");
        }

        // Two component types at once.
        for (t_1, t_2) in [(base[0], base[1]), (base[0], base[0]), (base[1], base[0])] {
            let per_type: Vec<Vec<[usize; 4]>> = (0..pair_model.type_count())
                .map(|ty| {
                    let n_1 = pair_counts.count(ty, 0b01);
                    let n_2 = pair_counts.count(ty, 0b10);
                    let n_12 = pair_counts.count(ty, 0b11);
                    let mut quads = Vec::new();
                    for l_1 in 0..=n_1 {
                        for l_2 in 0..=n_2 {
                            for a in 0..=n_12 {
                                for b in 0..=n_12 {
                                    if feasible_chain(&[(t_1, a), (t_2, b)]) {
                                        quads.push([l_1, l_2, a, b]);
                                    }
                                }
                            }
                        }
                    }
                    quads
                })
                .collect();
            let mut sum = 0.0;
            for q_0 in &per_type[0] {
                for q_1 in &per_type[1] {
                    sum += count_kernel_two_multitype(
                        two_types.distributions(),
                        &pair_counts,
                        &[*q_0, *q_1],
                        t_1,
                        t_2,
                    )
                    .unwrap();
                }
            }
            assert!((sum - 1.0).abs() <= TOL, "two-type kernel sums to {sum}");
        }

        // Three observation times under every weak ordering, ties included.
        let counts3 = [1usize, 0, 2, 2, 1, 0, 2];
        let [n_1, n_2, n_3, n_12, n_13, n_23, n_123] = counts3;
        for order in TripleOrder::all() {
            let times: Vec<f64> = order.ranks().iter().map(|r| base[*r as usize]).collect();
            let (t_1, t_2, t_3) = (times[0], times[1], times[2]);
            let mut sum = 0.0;
            for l_1 in 0..=n_1 {
                for l_2 in 0..=n_2 {
                    for l_3 in 0..=n_3 {
                        for a in 0..=n_12 {
                            for b in 0..=n_12 {
                                if !feasible_chain(&[(t_1, a), (t_2, b)]) {
                                    continue;
                                }
                                for c in 0..=n_13 {
                                    for d in 0..=n_13 {
                                        if !feasible_chain(&[(t_1, c), (t_3, d)]) {
                                            continue;
                                        }
                                        for e in 0..=n_23 {
                                            for f in 0..=n_23 {
                                                if !feasible_chain(&[(t_2, e), (t_3, f)]) {
                                                    continue;
                                                }
                                                for x in 0..=n_123 {
                                                    for y in 0..=n_123 {
                                                        for z in 0..=n_123 {
                                                            if !feasible_chain(&[
                                                                (t_1, x),
                                                                (t_2, y),
                                                                (t_3, z),
                                                            ]) {
                                                                continue;
                                                            }
                                                            sum += count_kernel_three(
                                                                &weibull,
                                                                &counts3,
                                                                &[
                                                                    l_1, l_2, l_3, a, b, c, d,
                                                                    e, f, x, y, z,
                                                                ],
                                                                t_1,
                                                                t_2,
                                                                t_3,
                                                            )
                                                            .unwrap();
                                                        }
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            assert!(
                (sum - 1.0).abs() <= TOL,
                "triple kernel sums to {sum} under {}",
                order.label()
            );
        }
    }
    finish(
        5,
        "all count kernels sum to 1 over the feasible lattice (10 random time tuples)",
        start,
        Duration::from_secs(10),
    );
}

fn random_expr(rng: &mut SimRng, pool: &[String], depth: usize) -> StructureExpr {
    if depth == 0 || rng.next_uniform() < 0.35 {
        let i = (rng.next_u64() % pool.len() as u64) as usize;
        return build::atom(&pool[i]);
    }
    let arity = 2 + (rng.next_u64() % 3) as usize;
    let children: Vec<StructureExpr> = (0..arity)
        .map(|_| random_expr(rng, pool, depth - 1))
        .collect();
    match rng.next_u64() % 3 {
        0 => build::and(children),
        1 => build::or(children),
        _ => {
            let k = 1 + (rng.next_u64() % arity as u64) as usize;
            build::k_of_n(k, children)
        }
    }
}

/// A model over `system_count` random coherent structures sharing a pool
/// of 4 to `max_components` single-type components.
fn random_model(seed: u64, system_count: usize, max_components: usize) -> SharedModel {
    let mut rng = SimRng::for_sample(seed, 0);
    let m = 4 + (rng.next_u64() % (max_components as u64 - 3)) as usize;
    let pool: Vec<String> = (0..m).map(|i| format!("C{i}")).collect();
    let systems: Vec<System> = (0..system_count)
        .map(|s| {
            let structure = StructureFunction::expr(random_expr(&mut rng, &pool, 3)).unwrap();
            structure.verify_coherent().unwrap();
            System::new(format!("S{}", s + 1), structure).unwrap()
        })
        .collect();
    let components: Vec<(ComponentId, String)> = pool
        .iter()
        .map(|n| (ComponentId::new(n).unwrap(), "T".to_string()))
        .collect();
    SharedModel::new(systems, components, vec!["T".to_string()]).unwrap()
}

#[test]
fn c6_engine_matches_exhaustive_oracle_on_random_models() {
    let start = Instant::now();
    let mut compared = 0usize;
    for trial in 0..100u64 {
        let model = random_model(41_000 + trial, 2, 10);
        for event in [EventKind::AllFunction, EventKind::FirstWithoutSecond] {
            for order in PairOrder::ALL {
                let engine = variant_signature(&model, order, event, DEFAULT_BUDGET).unwrap();
                let oracle =
                    exhaustive_signature(&model, OrderLabel::Pair(order), event).unwrap();
                assert_eq!(engine, oracle, "pair trial {trial} {event:?} {order:?}");
                compared += 1;
            }
        }
    }
    for trial in 0..20u64 {
        let model = random_model(42_000 + trial, 3, 9);
        for order in TripleOrder::all() {
            let engine = joint_signature_three(&model, order, DEFAULT_BUDGET).unwrap();
            let oracle =
                exhaustive_signature(&model, OrderLabel::Triple(order), EventKind::AllFunction)
                    .unwrap();
            assert_eq!(engine, oracle, "triple trial {trial} {}", order.label());
            compared += 1;
        }
    }
    assert_eq!(compared, 100 * 6 + 20 * 13);
    finish(
        6,
        "engine equals the exhaustive oracle on 100 random pairs and 20 random triples",
        start,
        Duration::from_secs(120),
    );
}

fn assert_monotone(table: &SignatureTable, context: &str) {
    for (levels, value) in table.iter() {
        for axis in 0..levels.len() {
            let mut up = levels.clone();
            up[axis] += 1;
            if up[axis] > table.axes()[axis].max {
                continue;
            }
            if let Some(bigger) = table.get(&up).unwrap() {
                assert!(
                    value.ratio() <= bigger.ratio(),
                    "{context}: value drops from {levels:?} to {up:?}"
                );
            }
        }
    }
}

#[test]
fn c7_probability_identities_hold() {
    let start = Instant::now();
    let pair_texts = [PAIR_SMALL, PAIR_MEDIUM, PAIR_TWO_TYPES];
    let ts: Vec<f64> = (0..=8).map(|i| i as f64 * 0.25).collect();

    // Marginal survival through the grouped table equals the standalone
    // single-system route.
    for text in [PAIR_SMALL, PAIR_MEDIUM, PAIR_TWO_TYPES, TRIPLE_SMALL] {
        let loaded = parse(text);
        let model = loaded.shared().unwrap();
        let evaluator =
            SurvivalEvaluator::new(&model, loaded.distributions().to_vec()).unwrap();
        for system in loaded.systems() {
            for &t in &ts {
                let grouped = evaluator.marginal_survival(system.name(), t).unwrap();
                let standalone = standalone_survival(
                    system.structure(),
                    loaded.components(),
                    loaded.types(),
                    loaded.distributions(),
                    t,
                    DEFAULT_BUDGET,
                )
                .unwrap();
                assert!(
                    (grouped - standalone).abs() <= TOL,
                    "{}: {grouped} vs {standalone} at t = {t}",
                    system.name()
                );
            }
        }
    }

    // Conditioning on the second system's status recomposes the first
    // system's marginal by total probability.
    for text in pair_texts {
        let loaded = parse(text);
        let model = loaded.shared().unwrap();
        let evaluator =
            SurvivalEvaluator::new(&model, loaded.distributions().to_vec()).unwrap();
        let first = loaded.systems()[0].name().to_string();
        let second = loaded.systems()[1].name().to_string();
        for &t_2 in &[0.3, 0.9] {
            let m_2 = evaluator.marginal_survival(&second, t_2).unwrap();
            assert!(m_2 > 0.0 && m_2 < 1.0);
            for &t in &[0.2, 0.7, 1.4] {
                let up = evaluator
                    .conditional_survival_given_functioning(t, t_2)
                    .unwrap();
                let down = evaluator.conditional_survival_given_failed(t, t_2).unwrap();
                let m_1 = evaluator.marginal_survival(&first, t).unwrap();
                assert!(
                    (up * m_2 + down * (1.0 - m_2) - m_1).abs() <= TOL,
                    "total probability at t = {t}, t_2 = {t_2}"
                );
            }
        }
    }

    // Per cell, the four exhaustive pair events partition certainty; the
    // identity is exact in rational arithmetic.
    for text in pair_texts {
        let model = parse(text).shared().unwrap();
        for order in PairOrder::ALL {
            let tables: Vec<SignatureTable> = [
                EventKind::AllFunction,
                EventKind::FirstWithoutSecond,
                EventKind::SecondWithoutFirst,
                EventKind::Neither,
            ]
            .iter()
            .map(|e| variant_signature(&model, order, *e, DEFAULT_BUDGET).unwrap())
            .collect();
            for (levels, _) in tables[0].iter() {
                let sum = tables.iter().fold(BigRational::zero(), |acc, t| {
                    acc + t.get(&levels).unwrap().expect("aligned cell").ratio()
                });
                assert!(sum.is_one(), "events at {levels:?} sum to {sum}");
            }
        }
    }

    // Joint survival never exceeds either marginal.
    let coarse = [0.0, 0.4, 0.8, 1.2, 1.6, 2.0];
    for text in pair_texts {
        let loaded = parse(text);
        let model = loaded.shared().unwrap();
        let evaluator =
            SurvivalEvaluator::new(&model, loaded.distributions().to_vec()).unwrap();
        let first = loaded.systems()[0].name().to_string();
        let second = loaded.systems()[1].name().to_string();
        for &t_1 in &coarse {
            for &t_2 in &coarse {
                let joint = evaluator.joint_survival_two(t_1, t_2).unwrap();
                assert!(joint <= evaluator.marginal_survival(&first, t_1).unwrap() + TOL);
                assert!(joint <= evaluator.marginal_survival(&second, t_2).unwrap() + TOL);
            }
        }
    }
    {
        let loaded = parse(TRIPLE_SMALL);
        let model = loaded.shared().unwrap();
        let evaluator =
            SurvivalEvaluator::new(&model, loaded.distributions().to_vec()).unwrap();
        for &t_1 in &[0.0, 0.6, 1.2] {
            for &t_2 in &[0.0, 0.6, 1.2] {
                for &t_3 in &[0.0, 0.6, 1.2] {
                    let joint = evaluator.joint_survival_three(t_1, t_2, t_3).unwrap();
                    for (system, t) in loaded.systems().iter().zip([t_1, t_2, t_3]) {
                        let marginal = evaluator.marginal_survival(system.name(), t).unwrap();
                        assert!(joint <= marginal + TOL);
                    }
                }
            }
        }
    }

    // Every all-function table is nondecreasing in every level.
    for text in pair_texts {
        let model = parse(text).shared().unwrap();
        for order in PairOrder::ALL {
            let table =
                variant_signature(&model, order, EventKind::AllFunction, DEFAULT_BUDGET).unwrap();
            assert_monotone(&table, &format!("pair {}", order.label()));
        }
    }
    {
        let model = parse(TRIPLE_SMALL).shared().unwrap();
        for order in TripleOrder::all() {
            let table = joint_signature_three(&model, order, DEFAULT_BUDGET).unwrap();
            assert_monotone(&table, &format!("triple {}", order.label()));
        }
    }

    finish(
        7,
        "marginal routes, total probability, event partition, joint bounds, monotonicity",
        start,
        Duration::from_secs(30),
    );
}

#[test]
fn c8_partial_table_bounds_bracket_true_values() {
    let start = Instant::now();
    let mut tables: Vec<SignatureTable> = Vec::new();
    let bridge = parse(SINGLE_BRIDGE);
    tables.push(
        survival_signature_single(
            bridge.systems()[0].structure(),
            bridge.components(),
            bridge.types(),
            DEFAULT_BUDGET,
        )
        .unwrap(),
    );
    for text in [PAIR_SMALL, PAIR_MEDIUM, PAIR_TWO_TYPES] {
        let model = parse(text).shared().unwrap();
        for order in PairOrder::ALL {
            tables.push(
                variant_signature(&model, order, EventKind::AllFunction, DEFAULT_BUDGET).unwrap(),
            );
        }
    }
    {
        let model = parse(TRIPLE_SMALL).shared().unwrap();
        for spec in ["1<2<3", "1=2=3", "3<1=2"] {
            let order = TripleOrder::parse(spec).unwrap();
            tables.push(joint_signature_three(&model, order, DEFAULT_BUDGET).unwrap());
        }
    }

    let mut rng = SimRng::for_sample(88, 0);
    for (index, table) in tables.iter().enumerate() {
        let cells: Vec<(Vec<usize>, BigRational)> =
            table.iter().map(|(l, v)| (l, v.ratio())).collect();
        let mut evaluated: Vec<Vec<usize>> = cells
            .iter()
            .filter(|_| rng.next_uniform() < 0.2)
            .map(|(l, _)| l.clone())
            .collect();
        if evaluated.is_empty() {
            evaluated.push(cells[0].0.clone());
        }
        let chosen: HashSet<&Vec<usize>> = evaluated.iter().collect();
        for (levels, truth) in &cells {
            if chosen.contains(levels) {
                continue;
            }
            let (lower, upper) = signature_bounds(table, &evaluated, levels).unwrap();
            assert!(
                lower <= *truth && *truth <= upper,
                "table {index}, cell {levels:?}: {truth} outside [{lower}, {upper}]"
            );
        }
    }
    finish(
        8,
        "monotonicity bounds from a random 20% of cells bracket every other cell",
        start,
        Duration::from_secs(10),
    );
}
