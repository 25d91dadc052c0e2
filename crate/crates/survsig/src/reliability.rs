//! Survival probabilities over time: joint, marginal, and conditional.
//!
//! A [`SurvivalEvaluator`] pairs a model with one lifetime distribution
//! per component type and computes probabilities as expectations of the
//! exact signature tables against the survivor-count kernels:
//! Σ_l Φ(l) · P(counts = l). A table depends only on the qualitative
//! ordering of the query times, so sweeping a time grid re-solves at most
//! one table per ordering; everything is cached. Floating point enters
//! only at the kernel and summation step.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::lifetimes::{count_kernel_single, merge_stages, LifetimeDistribution};
use crate::model::SharedModel;
use crate::order::{OrderLabel, PairOrder, TripleOrder};
use crate::signature::{
    joint_signature_three, survival_signature_grouped, survival_signature_single,
    variant_signature, EventKind, SignatureTable, DEFAULT_BUDGET,
};
use crate::structure::{ComponentId, StructureFunction};

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// P(T > t) for one system alone: its signature summed against the
/// per-type binomial survivor-count kernel. Components never referenced
/// by the structure are ignored.
pub fn standalone_survival(
    structure: &StructureFunction,
    components: &[(ComponentId, String)],
    types: &[String],
    dists: &[LifetimeDistribution],
    t: f64,
    budget: u64,
) -> Result<f64> {
    check_time(t)?;
    if dists.len() != types.len() {
        return Err(Error::WrongTypeCount {
            expected: types.len(),
            found: dists.len(),
        });
    }
    for dist in dists {
        dist.validate()?;
    }
    let table = survival_signature_single(structure, components, types, budget)?;
    let counts = table.max_levels();
    let mut total = 0.0;
    for (levels, value) in table.iter() {
        if value.is_zero() {
            continue;
        }
        total += value.to_f64() * count_kernel_single(dists, &counts, &levels, t)?;
    }
    Ok(total)
}

/// Survival probabilities of 2–3 systems with shared components and iid
/// lifetimes per component type.
pub struct SurvivalEvaluator<'a> {
    model: &'a SharedModel,
    dists: Vec<LifetimeDistribution>,
    budget: u64,
    joint: RefCell<HashMap<(EventKind, OrderLabel), Rc<SignatureTable>>>,
    grouped: RefCell<HashMap<usize, Rc<SignatureTable>>>,
}

impl<'a> SurvivalEvaluator<'a> {
    /// One distribution per component type, in the model's type order.
    pub fn new(model: &'a SharedModel, dists: Vec<LifetimeDistribution>) -> Result<Self> {
        SurvivalEvaluator::with_budget(model, dists, DEFAULT_BUDGET)
    }

    pub fn with_budget(
        model: &'a SharedModel,
        dists: Vec<LifetimeDistribution>,
        budget: u64,
    ) -> Result<Self> {
        if dists.len() != model.type_count() {
            return Err(Error::WrongTypeCount {
                expected: model.type_count(),
                found: dists.len(),
            });
        }
        for dist in &dists {
            dist.validate()?;
        }
        Ok(SurvivalEvaluator {
            model,
            dists,
            budget,
            joint: RefCell::new(HashMap::new()),
            grouped: RefCell::new(HashMap::new()),
        })
    }

    pub fn model(&self) -> &SharedModel {
        self.model
    }

    pub fn distributions(&self) -> &[LifetimeDistribution] {
        &self.dists
    }

    fn require_arity(&self, expected: usize) -> Result<()> {
        if self.model.system_count() != expected {
            return Err(Error::WrongArity {
                expected: expected.to_string(),
                found: self.model.system_count(),
            });
        }
        Ok(())
    }

    fn pair_table(&self, event: EventKind, order: PairOrder) -> Result<Rc<SignatureTable>> {
        let key = (event, OrderLabel::Pair(order));
        if let Some(table) = self.joint.borrow().get(&key) {
            return Ok(table.clone());
        }
        let table = Rc::new(variant_signature(self.model, order, event, self.budget)?);
        self.joint.borrow_mut().insert(key, table.clone());
        Ok(table)
    }

    fn triple_table(&self, order: TripleOrder) -> Result<Rc<SignatureTable>> {
        let key = (EventKind::AllFunction, OrderLabel::Triple(order));
        if let Some(table) = self.joint.borrow().get(&key) {
            return Ok(table.clone());
        }
        let table = Rc::new(joint_signature_three(self.model, order, self.budget)?);
        self.joint.borrow_mut().insert(key, table.clone());
        Ok(table)
    }

    fn grouped_table(&self, system_idx: usize) -> Result<Rc<SignatureTable>> {
        if let Some(table) = self.grouped.borrow().get(&system_idx) {
            return Ok(table.clone());
        }
        let name = self.model.systems()[system_idx].name();
        let table = Rc::new(survival_signature_grouped(self.model, name, self.budget)?);
        self.grouped.borrow_mut().insert(system_idx, table.clone());
        Ok(table)
    }

    /// P(counts = levels) for a joint table's level vector: one factor per
    /// sharing group, observed at its member systems' times. Iterates the
    /// groups in the exact order the table lays out its axes.
    fn joint_kernel(&self, levels: &[usize], times: &[f64]) -> Result<f64> {
        let mut prob = 1.0;
        let mut axis = 0;
        for (ty, dist) in self.dists.iter().enumerate() {
            for mask in self.model.group_masks() {
                let n = self.model.group_members(ty, mask).len();
                let mut observations = Vec::new();
                for (sys, &t) in times.iter().enumerate() {
                    if mask & (1 << sys) != 0 {
                        observations.push((t, levels[axis]));
                        axis += 1;
                    }
                }
                prob *= dist.group_kernel(n, &merge_stages(&observations)?)?;
                if prob == 0.0 {
                    return Ok(0.0);
                }
            }
        }
        debug_assert_eq!(axis, levels.len());
        Ok(prob)
    }

    /// P(counts = levels) for a single-system grouped table: only the
    /// groups referencing the system, all observed at one time.
    fn grouped_kernel(&self, system_idx: usize, levels: &[usize], t: f64) -> Result<f64> {
        let mut prob = 1.0;
        let mut axis = 0;
        for (ty, dist) in self.dists.iter().enumerate() {
            for mask in self.model.group_masks() {
                if mask & (1 << system_idx) == 0 {
                    continue;
                }
                let n = self.model.group_members(ty, mask).len();
                prob *= dist.group_kernel(n, &[(t, levels[axis])])?;
                axis += 1;
            }
        }
        debug_assert_eq!(axis, levels.len());
        Ok(prob)
    }

    fn expectation(&self, table: &SignatureTable, times: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (levels, value) in table.iter() {
            if value.is_zero() {
                continue;
            }
            let weight = self.joint_kernel(&levels, times)?;
            if weight != 0.0 {
                total += value.to_f64() * weight;
            }
        }
        Ok(total)
    }

    /// P(T_1 > t_1, T_2 > t_2) for a two-system model.
    pub fn joint_survival_two(&self, t_1: f64, t_2: f64) -> Result<f64> {
        self.event_probability(EventKind::AllFunction, t_1, t_2)
    }

    /// Probability of a two-system functioning/failure event, e.g. the
    /// first system working at t_1 while the second has failed by t_2.
    pub fn event_probability(&self, event: EventKind, t_1: f64, t_2: f64) -> Result<f64> {
        self.require_arity(2)?;
        check_time(t_1)?;
        check_time(t_2)?;
        let order = PairOrder::from_times(t_1, t_2);
        let table = self.pair_table(event, order)?;
        self.expectation(&table, &[t_1, t_2])
    }

    /// P(T_1 > t_1, T_2 > t_2, T_3 > t_3) for a three-system model.
    pub fn joint_survival_three(&self, t_1: f64, t_2: f64, t_3: f64) -> Result<f64> {
        self.require_arity(3)?;
        for t in [t_1, t_2, t_3] {
            check_time(t)?;
        }
        let order = TripleOrder::from_times(t_1, t_2, t_3);
        let table = self.triple_table(order)?;
        self.expectation(&table, &[t_1, t_2, t_3])
    }

    /// P(T > t) for the named system, marginalizing the others out.
    pub fn marginal_survival(&self, system: &str, t: f64) -> Result<f64> {
        check_time(t)?;
        let (idx, _) = self.model.system(system)?;
        let table = self.grouped_table(idx)?;
        let mut total = 0.0;
        for (levels, value) in table.iter() {
            if value.is_zero() {
                continue;
            }
            total += value.to_f64() * self.grouped_kernel(idx, &levels, t)?;
        }
        Ok(total)
    }

    fn second_marginal(&self, t_2: f64) -> Result<f64> {
        self.marginal_survival(self.model.systems()[1].name(), t_2)
    }

    /// P(T_1 > t | T_2 > t_2): survival of the first system given the
    /// second was still functioning when inspected at t_2.
    pub fn conditional_survival_given_functioning(&self, t: f64, t_2: f64) -> Result<f64> {
        self.require_arity(2)?;
        let joint = self.joint_survival_two(t, t_2)?;
        let functioning = self.second_marginal(t_2)?;
        if functioning <= 0.0 {
            return Err(Error::ConditioningOnNullEvent(format!(
                "the second system cannot be functioning at t = {t_2}"
            )));
        }
        Ok((joint / functioning).clamp(0.0, 1.0))
    }

    /// P(T_1 > t | T_2 ≤ t_2): survival of the first system given the
    /// second had already failed when inspected at t_2.
    pub fn conditional_survival_given_failed(&self, t: f64, t_2: f64) -> Result<f64> {
        self.require_arity(2)?;
        let witnessed = self.event_probability(EventKind::FirstWithoutSecond, t, t_2)?;
        let failed = 1.0 - self.second_marginal(t_2)?;
        if failed <= 0.0 {
            return Err(Error::ConditioningOnNullEvent(format!(
                "the second system cannot have failed by t = {t_2}"
            )));
        }
        Ok((witnessed / failed).clamp(0.0, 1.0))
    }

    /// P(T_1 > t, T_2 > t | T_2 > t_2) for t > t_2: both systems alive at
    /// a later time t given the second was functioning at t_2.
    pub fn conditional_joint_survival(&self, t: f64, t_2: f64) -> Result<f64> {
        self.require_arity(2)?;
        check_time(t)?;
        check_time(t_2)?;
        if t <= t_2 {
            return Err(Error::InvalidTimeOrder(format!(
                "conditional joint survival needs t > t_2, got t = {t} and t_2 = {t_2}"
            )));
        }
        let joint = self.joint_survival_two(t, t)?;
        let functioning = self.second_marginal(t_2)?;
        if functioning <= 0.0 {
            return Err(Error::ConditioningOnNullEvent(format!(
                "the second system cannot be functioning at t = {t_2}"
            )));
        }
        Ok((joint / functioning).clamp(0.0, 1.0))
    }
}
