//! Independent verification paths: a brute-force signature oracle and a
//! seeded Monte-Carlo lifetime simulator.
//!
//! The brute-force oracle enumerates every labeled survivor
//! configuration with a flat per-component odometer and counts both
//! favourable and total configurations per cell, evaluating structures
//! through their minimal path sets. It shares no counting, pruning, or
//! structure-evaluation machinery with the sweep engine, so agreement
//! between the two is meaningful evidence of correctness.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lifetimes::LifetimeDistribution;
use crate::model::SharedModel;
use crate::order::OrderLabel;
use crate::signature::{CellValue, EventKind, Problem, SignatureTable};

/// Component cap for the exhaustive oracle; beyond this the flat
/// enumeration is pointlessly slow.
const MAX_ORACLE_COMPONENTS: usize = 12;

/// Identifier of the pseudo-random generator, recorded in simulation
/// output so runs are reproducible across machines.
pub const GENERATOR_ID: &str = "splitmix64";

/// Brute-force joint/variant signature: every nested survivor
/// configuration is enumerated one by one; cell denominators are counted
/// rather than computed, and structures are evaluated via minimal path
/// sets. Restricted to models with at most 12 involved components.
pub fn exhaustive_signature(
    model: &SharedModel,
    order: OrderLabel,
    event: EventKind,
) -> Result<SignatureTable> {
    let ranks: Vec<u8> = match order {
        OrderLabel::Pair(o) => {
            if model.system_count() != 2 {
                return Err(Error::WrongArity {
                    expected: "2".into(),
                    found: model.system_count(),
                });
            }
            o.ranks().to_vec()
        }
        OrderLabel::Triple(o) => {
            if model.system_count() != 3 {
                return Err(Error::WrongArity {
                    expected: "3".into(),
                    found: model.system_count(),
                });
            }
            o.ranks().to_vec()
        }
        OrderLabel::None | OrderLabel::Any => {
            return Err(Error::InvalidOrder(
                "the exhaustive oracle needs a concrete time ordering".into(),
            ))
        }
    };
    if event == EventKind::SingleSystem {
        return Err(Error::InvalidTable(
            "the exhaustive oracle computes joint and variant tables only".into(),
        ));
    }
    let problem = Problem::from_model(
        model,
        &ranks,
        &event.requirements(model.system_count()),
        event,
        order,
    )?;
    let n = problem.universe.len();
    if n > MAX_ORACLE_COMPONENTS {
        return Err(Error::TooLarge(format!(
            "the exhaustive oracle enumerates at most {MAX_ORACLE_COMPONENTS} components, model involves {n}"
        )));
    }

    // Per-component number of stages in its group: a component's fate is
    // how many of them it survives.
    let mut fate_radix = vec![0usize; n];
    for g in &problem.groups {
        let range = g.first_bit as usize..g.first_bit as usize + g.size;
        fate_radix[range].fill(g.stages.len() + 1);
    }
    let strides = problem.strides();
    // Offset contribution of one component surviving one more stage of
    // its group: the stage's axes all grow by one.
    let mut stage_weight: Vec<Vec<usize>> = Vec::with_capacity(problem.groups.len());
    for g in &problem.groups {
        stage_weight.push(
            g.stages
                .iter()
                .map(|s| s.axes.iter().map(|a| strides[*a]).sum())
                .collect(),
        );
    }
    let group_of: Vec<usize> = {
        let mut v = vec![0usize; n];
        for (gi, g) in problem.groups.iter().enumerate() {
            let range = g.first_bit as usize..g.first_bit as usize + g.size;
            v[range].fill(gi);
        }
        v
    };

    // Each evaluated system's functioning predicate: minimal path sets
    // with, per member, the number of stages the member must survive to
    // be visible to the system.
    let position: HashMap<_, _> = problem
        .universe
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();
    struct Predicate {
        paths: Vec<Vec<(usize, usize)>>,
        must_function: bool,
    }
    let mut predicates = Vec::with_capacity(problem.systems.len());
    for spec in &problem.systems {
        let mut need = vec![0usize; n];
        for g in &problem.groups {
            for (si, stage) in g.stages.iter().enumerate() {
                if stage.systems.contains(&predicates.len()) {
                    let range = g.first_bit as usize..g.first_bit as usize + g.size;
                    need[range].fill(si + 1);
                }
            }
        }
        let structure = model.systems()[spec.system_index].structure();
        let paths = structure
            .minimal_path_sets()?
            .into_iter()
            .map(|set| {
                set.into_iter()
                    .map(|id| {
                        let c = position[&id];
                        (c, need[c])
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        predicates.push(Predicate {
            paths,
            must_function: spec.must_function,
        });
    }

    let box_size: usize = problem.axes.iter().map(|a| a.max + 1).product();
    let mut favourable = vec![0u64; box_size];
    let mut total = vec![0u64; box_size];

    // Flat odometer over component fates.
    let mut fates = vec![0usize; n];
    loop {
        let mut offset = 0usize;
        for c in 0..n {
            offset += stage_weight[group_of[c]][..fates[c]].iter().sum::<usize>();
        }
        let ok = predicates.iter().all(|p| {
            let functioning = p
                .paths
                .iter()
                .any(|path| path.iter().all(|&(c, need)| fates[c] >= need));
            functioning == p.must_function
        });
        total[offset] += 1;
        if ok {
            favourable[offset] += 1;
        }

        let mut pos = 0;
        loop {
            if pos == n {
                break;
            }
            if fates[pos] + 1 < fate_radix[pos] {
                fates[pos] += 1;
                break;
            }
            fates[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }

    let radices: Vec<usize> = problem.axes.iter().map(|a| a.max + 1).collect();
    let mut levels = vec![0usize; radices.len()];
    let mut cells: Vec<Option<CellValue>> = vec![None; box_size];
    for (off, cell) in cells.iter_mut().enumerate() {
        let mut rem = off;
        for i in (0..radices.len()).rev() {
            levels[i] = rem % radices[i];
            rem /= radices[i];
        }
        if problem.is_feasible(&levels) {
            *cell = Some(CellValue::new(favourable[off], total[off]));
        } else {
            debug_assert_eq!(total[off], 0);
        }
    }
    Ok(SignatureTable::from_parts(
        problem.event,
        problem.order,
        problem.axes.clone(),
        problem.chains.clone(),
        cells,
    ))
}

/// Deterministic splitmix64 stream. Each sample gets its own stream
/// derived from (seed, sample index), so sample generation is
/// order-independent and can be split across workers.
pub struct SimRng {
    state: u64,
}

impl SimRng {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn for_sample(seed: u64, sample: u64) -> SimRng {
        SimRng {
            state: Self::mix(seed ^ Self::mix(sample.wrapping_mul(Self::GAMMA))),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        Self::mix(self.state)
    }

    /// Uniform draw strictly inside (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Per-system failure times of a seeded simulation batch.
pub struct SimulationRun {
    seed: u64,
    system_names: Vec<String>,
    /// `times[i][j]`: failure time of system i in sample j; infinite
    /// when the system outlives every component failure.
    times: Vec<Vec<f64>>,
}

impl SimulationRun {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generator(&self) -> &'static str {
        GENERATOR_ID
    }

    pub fn len(&self) -> usize {
        self.times.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn system_count(&self) -> usize {
        self.times.len()
    }

    pub fn system_names(&self) -> &[String] {
        &self.system_names
    }

    /// Failure times of one system across all samples.
    pub fn times(&self, system: usize) -> &[f64] {
        &self.times[system]
    }
}

/// Draws `samples` iid component-lifetime vectors and records each
/// system's failure time: the first component failure after which the
/// structure no longer functions on the surviving set.
pub fn simulate_failure_times(
    model: &SharedModel,
    dists: &[LifetimeDistribution],
    seed: u64,
    samples: usize,
) -> Result<SimulationRun> {
    if dists.len() != model.type_count() {
        return Err(Error::WrongTypeCount {
            expected: model.type_count(),
            found: dists.len(),
        });
    }
    for dist in dists {
        dist.validate()?;
    }
    assert!(samples >= 1, "simulation needs at least one sample");

    let components = model.components();
    let n = components.len();
    let index_of: HashMap<_, _> = components
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.clone(), i))
        .collect();
    // Path sets over declaration indices, one set per system.
    let mut paths: Vec<Vec<Vec<usize>>> = Vec::with_capacity(model.system_count());
    for system in model.systems() {
        paths.push(
            system
                .structure()
                .minimal_path_sets()?
                .into_iter()
                .map(|set| set.into_iter().map(|id| index_of[&id]).collect())
                .collect(),
        );
    }

    let mut times: Vec<Vec<f64>> = vec![Vec::with_capacity(samples); model.system_count()];
    let mut lifetimes = vec![0.0f64; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut alive = vec![true; n];
    for sample in 0..samples {
        let mut rng = SimRng::for_sample(seed, sample as u64);
        for (c, (_, ty)) in components.iter().enumerate() {
            lifetimes[c] = dists[*ty].quantile(rng.next_uniform());
        }
        order.clear();
        order.extend(0..n);
        order.sort_unstable_by(|a, b| lifetimes[*a].total_cmp(&lifetimes[*b]));
        alive.iter_mut().for_each(|a| *a = true);
        let mut unresolved = model.system_count();
        let mut failed_at = vec![f64::INFINITY; model.system_count()];
        for &c in &order {
            if unresolved == 0 || lifetimes[c].is_infinite() {
                break;
            }
            alive[c] = false;
            for (i, system_paths) in paths.iter().enumerate() {
                if failed_at[i].is_finite() {
                    continue;
                }
                let functioning = system_paths
                    .iter()
                    .any(|path| path.iter().all(|&m| alive[m]));
                if !functioning {
                    failed_at[i] = lifetimes[c];
                    unresolved -= 1;
                }
            }
        }
        for (i, t) in failed_at.into_iter().enumerate() {
            times[i].push(t);
        }
    }
    Ok(SimulationRun {
        seed,
        system_names: model.systems().iter().map(|s| s.name().to_string()).collect(),
        times,
    })
}

/// Fraction of samples in which every system outlives its query time,
/// with the binomial standard error sqrt(p̂(1−p̂)/N).
pub fn estimate_joint_survival(run: &SimulationRun, times: &[f64]) -> Result<(f64, f64)> {
    if times.len() != run.system_count() {
        return Err(Error::WrongArity {
            expected: run.system_count().to_string(),
            found: times.len(),
        });
    }
    for &t in times {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
    }
    let n = run.len();
    let mut hits = 0usize;
    for j in 0..n {
        if (0..run.system_count()).all(|i| run.times[i][j] > times[i]) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::System;
    use crate::order::{PairOrder, TripleOrder};
    use crate::signature::{
        joint_signature_three, joint_signature_two_multitype, variant_signature, DEFAULT_BUDGET,
    };
    use crate::structure::build::*;
    use crate::structure::StructureFunction;

    #[test]
    fn oracle_matches_engine_on_pair_models() {
        for model in [fixtures::pair_small(), fixtures::pair_medium()] {
            for order in PairOrder::ALL {
                let engine =
                    joint_signature_two_multitype(&model, order, DEFAULT_BUDGET).unwrap();
                let oracle =
                    exhaustive_signature(&model, OrderLabel::Pair(order), EventKind::AllFunction)
                        .unwrap();
                assert_eq!(engine, oracle);
                for event in [EventKind::FirstWithoutSecond, EventKind::Neither] {
                    let engine = variant_signature(&model, order, event, DEFAULT_BUDGET).unwrap();
                    let oracle =
                        exhaustive_signature(&model, OrderLabel::Pair(order), event).unwrap();
                    assert_eq!(engine, oracle);
                }
            }
        }
    }

    #[test]
    fn oracle_matches_engine_on_multitype_pair() {
        let model = fixtures::pair_two_types();
        for order in PairOrder::ALL {
            let engine = joint_signature_two_multitype(&model, order, DEFAULT_BUDGET).unwrap();
            let oracle =
                exhaustive_signature(&model, OrderLabel::Pair(order), EventKind::AllFunction)
                    .unwrap();
            assert_eq!(engine, oracle);
        }
    }

    #[test]
    fn oracle_matches_engine_on_triple_model() {
        let model = fixtures::triple_small();
        for order in TripleOrder::all() {
            let engine = joint_signature_three(&model, order, DEFAULT_BUDGET).unwrap();
            let oracle =
                exhaustive_signature(&model, OrderLabel::Triple(order), EventKind::AllFunction)
                    .unwrap();
            assert_eq!(engine, oracle);
        }
    }

    #[test]
    fn oracle_reproduces_known_cell() {
        let oracle = exhaustive_signature(
            &fixtures::pair_medium(),
            OrderLabel::Pair(PairOrder::Earlier),
            EventKind::AllFunction,
        )
        .unwrap();
        let v = oracle.get(&[1, 1, 2, 1]).unwrap().unwrap();
        assert_eq!(v.favourable, 10u32.into());
        assert_eq!(v.total, 24u32.into());
    }

    #[test]
    fn oracle_rejects_large_models() {
        let s1 = StructureFunction::expr(or((0..7).map(|i| atom(&format!("a{i}"))).collect()))
            .unwrap();
        let s2 = StructureFunction::expr(and((7..13).map(|i| atom(&format!("a{i}"))).collect()))
            .unwrap();
        let names: Vec<String> = (0..13).map(|i| format!("a{i}")).collect();
        let (components, types) =
            fixtures::one_type(&names.iter().map(String::as_str).collect::<Vec<_>>());
        let model = crate::model::SharedModel::new(
            vec![
                System::new("S1", s1).unwrap(),
                System::new("S2", s2).unwrap(),
            ],
            components,
            types,
        )
        .unwrap();
        assert!(matches!(
            exhaustive_signature(
                &model,
                OrderLabel::Pair(PairOrder::Same),
                EventKind::AllFunction
            ),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn rng_is_deterministic_and_in_range() {
        let mut a = SimRng::for_sample(42, 7);
        let mut b = SimRng::for_sample(42, 7);
        for _ in 0..100 {
            let u = a.next_uniform();
            assert_eq!(u, b.next_uniform());
            assert!(u > 0.0 && u < 1.0);
        }
        let mut c = SimRng::for_sample(42, 8);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn simulation_is_reproducible() {
        let model = fixtures::pair_small();
        let dists = fixtures::exp1_for(&model);
        let a = simulate_failure_times(&model, &dists, 9001, 500).unwrap();
        let b = simulate_failure_times(&model, &dists, 9001, 500).unwrap();
        assert_eq!(a.times(0), b.times(0));
        assert_eq!(a.times(1), b.times(1));
        let c = simulate_failure_times(&model, &dists, 9002, 500).unwrap();
        assert_ne!(a.times(0), c.times(0));
        assert_eq!(a.generator(), "splitmix64");
        assert_eq!(a.len(), 500);
    }

    #[test]
    fn series_and_parallel_failure_times() {
        // S1 = A∧B fails at min(T_A, T_B); S2 = A∨B at max.
        let model = fixtures::pair_shared_two_types();
        let dists = fixtures::exp1_for(&model);
        let run = simulate_failure_times(&model, &dists, 1234, 1000).unwrap();
        for j in 0..1000 {
            let mut rng = SimRng::for_sample(1234, j as u64);
            let ta = dists[0].quantile(rng.next_uniform());
            let tb = dists[1].quantile(rng.next_uniform());
            assert_eq!(run.times(0)[j], ta.min(tb));
            assert_eq!(run.times(1)[j], ta.max(tb));
        }
    }

    #[test]
    fn estimates_match_closed_form() {
        let model = fixtures::pair_small();
        let dists = fixtures::exp1_for(&model);
        let run = simulate_failure_times(&model, &dists, 77, 100_000).unwrap();
        let (all_alive, se0) = estimate_joint_survival(&run, &[0.0, 0.0]).unwrap();
        assert_eq!(all_alive, 1.0);
        assert_eq!(se0, 0.0);
        let (none, _) = estimate_joint_survival(&run, &[100.0, 100.0]).unwrap();
        assert_eq!(none, 0.0);
        // P(S2 outlives ln 2) = 2e^{-2t} - e^{-3t} at t = ln 2.
        let t = std::f64::consts::LN_2;
        let (p, se) = estimate_joint_survival(&run, &[0.0, t]).unwrap();
        assert!((p - 0.375).abs() <= 4.0 * se, "p = {p}, se = {se}");
        assert!(matches!(
            estimate_joint_survival(&run, &[0.5]),
            Err(Error::WrongArity { .. })
        ));
    }

    #[test]
    fn infinite_lifetimes_leave_systems_alive() {
        // A step CDF capped at 0.5 leaves mass at infinity.
        let capped = LifetimeDistribution::empirical(vec![(1.0, 0.5)], false).unwrap();
        let model = fixtures::pair_small();
        let run = simulate_failure_times(&model, &[capped], 5, 2000).unwrap();
        let alive_forever = run
            .times(0)
            .iter()
            .filter(|t| t.is_infinite())
            .count();
        assert!(alive_forever > 0);
        // Finite failures only at the single breakpoint.
        for &t in run.times(0) {
            assert!(t.is_infinite() || t == 1.0);
        }
    }
}
