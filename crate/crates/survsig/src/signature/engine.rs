//! Enumeration engine behind every signature table.
//!
//! A table computation is described by sharing groups (per type), each
//! observed at one or more stages (time ranks); a stage's survivor set is
//! a subset of the previous stage's. The engine sweeps all nested subset
//! chains once, evaluates the per-system functioning requirements at each
//! complete configuration, and accumulates favourable counts per level
//! cell. Totals are the closed-form products of binomial choice counts.
//!
//! Events that require a system to function (or fail) prune a subtree as
//! soon as that system's survivor view is complete and violates the
//! requirement.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::comb::binomial;
use crate::error::{Error, Result};
use crate::model::{mask_label, GroupMask, SharedModel};
use crate::order::OrderLabel;
use crate::signature::table::{Axis, CellValue, Chain, EventKind, SignatureTable};
use crate::structure::{CompiledStructure, ComponentId, StructureFunction};

/// Default cap on complete configurations evaluated per table.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Cap on table cells (the full axis box), independent of the budget.
const MAX_CELLS: usize = 1 << 24;

/// Evaluation masks are u64 bit sets, so a table may involve at most 64
/// components.
const MAX_MASK_COMPONENTS: usize = 64;

pub(crate) struct EvalSystem {
    /// Index of the system in the model's declaration order.
    pub system_index: usize,
    pub compiled: CompiledStructure,
    pub must_function: bool,
}

pub(crate) struct Stage {
    /// Axes carrying this stage's survivor count (tied observers).
    pub axes: Vec<usize>,
    /// Evaluated systems whose view includes this stage's survivor set.
    pub systems: Vec<usize>,
}

pub(crate) struct Group {
    /// Member bit positions: first_bit..first_bit + size.
    pub first_bit: u32,
    pub size: usize,
    /// Observation stages, earliest first.
    pub stages: Vec<Stage>,
}

/// A fully resolved table computation.
pub(crate) struct Problem {
    pub event: EventKind,
    pub order: OrderLabel,
    pub axes: Vec<Axis>,
    pub chains: Vec<Chain>,
    pub groups: Vec<Group>,
    pub systems: Vec<EvalSystem>,
    /// Involved components in group order; bit i of an evaluation mask
    /// is the state of `universe[i]`.
    pub universe: Vec<ComponentId>,
}

impl Problem {
    /// Joint/variant table over all of a model's systems: one axis per
    /// (type, group, observer), with observers staged by their time rank.
    pub(crate) fn from_model(
        model: &SharedModel,
        ranks: &[u8],
        requirements: &[Option<bool>],
        event: EventKind,
        order: OrderLabel,
    ) -> Result<Problem> {
        Problem::build(model, ranks, requirements, event, order, None)
    }

    /// Single-system table over the groups referencing `system_idx`, all
    /// observed at one time. Used for marginal survival.
    pub(crate) fn grouped_single(model: &SharedModel, system_idx: usize) -> Result<Problem> {
        let mut requirements = vec![None; model.system_count()];
        requirements[system_idx] = Some(true);
        let ranks = vec![0u8; model.system_count()];
        Problem::build(
            model,
            &ranks,
            &requirements,
            EventKind::SingleSystem,
            OrderLabel::None,
            Some(system_idx),
        )
    }

    fn build(
        model: &SharedModel,
        ranks: &[u8],
        requirements: &[Option<bool>],
        event: EventKind,
        order: OrderLabel,
        only_system: Option<usize>,
    ) -> Result<Problem> {
        let system_count = model.system_count();
        assert_eq!(ranks.len(), system_count);
        assert_eq!(requirements.len(), system_count);

        let mut eval_index = vec![None; system_count];
        let mut eval_specs = Vec::new();
        for (i, req) in requirements.iter().enumerate() {
            if let Some(must) = req {
                eval_index[i] = Some(eval_specs.len());
                eval_specs.push((i, *must));
            }
        }

        let multi = model.type_count() > 1;
        let mut universe: Vec<ComponentId> = Vec::new();
        let mut axes = Vec::new();
        let mut chains = Vec::new();
        let mut groups = Vec::new();
        for ty in 0..model.type_count() {
            for mask in model.group_masks() {
                let observers: Vec<usize> = (0..system_count)
                    .filter(|i| mask & (1 << i) != 0)
                    .filter(|i| only_system.is_none_or(|target| *i == target))
                    .collect();
                if observers.is_empty() {
                    continue;
                }
                let members = model.group_members(ty, mask);
                let first_bit = universe.len() as u32;
                universe.extend(members.iter().cloned());
                if universe.len() > MAX_MASK_COMPONENTS {
                    return Err(Error::TooLarge(format!(
                        "more than {MAX_MASK_COMPONENTS} components involved"
                    )));
                }
                let base_axis = axes.len();
                for obs in &observers {
                    axes.push(Axis::new(
                        axis_label(model.types(), ty, mask, *obs, multi),
                        members.len(),
                    ));
                }
                let mut by_rank: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
                for (pos, obs) in observers.iter().enumerate() {
                    by_rank.entry(ranks[*obs]).or_default().push(pos);
                }
                let stages: Vec<Stage> = by_rank
                    .into_values()
                    .map(|positions| Stage {
                        axes: positions.iter().map(|p| base_axis + p).collect(),
                        systems: positions
                            .iter()
                            .filter_map(|p| eval_index[observers[*p]])
                            .collect(),
                    })
                    .collect();
                if stages.len() > 1 || stages[0].axes.len() > 1 {
                    chains.push(Chain {
                        stages: stages.iter().map(|s| s.axes.clone()).collect(),
                    });
                }
                groups.push(Group {
                    first_bit,
                    size: members.len(),
                    stages,
                });
            }
        }

        let systems = eval_specs
            .into_iter()
            .map(|(i, must)| {
                Ok(EvalSystem {
                    system_index: i,
                    compiled: CompiledStructure::compile(
                        model.systems()[i].structure(),
                        &universe,
                    )?,
                    must_function: must,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Problem {
            event,
            order,
            axes,
            chains,
            groups,
            systems,
            universe,
        })
    }

    /// Plain single-system signature: one axis per type, no model needed.
    pub(crate) fn standalone_single(
        structure: &StructureFunction,
        components: &[(ComponentId, String)],
        types: &[String],
    ) -> Result<Problem> {
        structure.verify_coherent()?;
        let mut declared_type = BTreeMap::new();
        for (id, type_name) in components {
            let ty = types
                .iter()
                .position(|t| t == type_name)
                .ok_or_else(|| Error::UnknownType {
                    component: id.to_string(),
                    type_name: type_name.clone(),
                })?;
            if declared_type.insert(id.clone(), ty).is_some() {
                return Err(Error::DuplicateComponent(id.to_string()));
            }
        }
        let atoms = structure.atoms();
        let mut per_type: Vec<Vec<ComponentId>> = vec![Vec::new(); types.len()];
        for atom in &atoms {
            match declared_type.get(atom) {
                Some(ty) => per_type[*ty].push(atom.clone()),
                None => return Err(Error::UnknownComponent(atom.to_string())),
            }
        }
        if atoms.len() > MAX_MASK_COMPONENTS {
            return Err(Error::TooLarge(format!(
                "more than {MAX_MASK_COMPONENTS} components involved"
            )));
        }
        let mut universe = Vec::new();
        let mut axes = Vec::new();
        let mut groups = Vec::new();
        for (ty, members) in per_type.iter().enumerate() {
            let first_bit = universe.len() as u32;
            universe.extend(members.iter().cloned());
            axes.push(Axis::new(format!("l_{}", types[ty]), members.len()));
            groups.push(Group {
                first_bit,
                size: members.len(),
                stages: vec![Stage {
                    axes: vec![ty],
                    systems: vec![0],
                }],
            });
        }
        let systems = vec![EvalSystem {
            system_index: 0,
            compiled: CompiledStructure::compile(structure, &universe)?,
            must_function: true,
        }];
        Ok(Problem {
            event: EventKind::SingleSystem,
            order: OrderLabel::None,
            axes,
            chains: Vec::new(),
            groups,
            systems,
            universe,
        })
    }

    /// Number of complete configurations the sweep visits before pruning:
    /// each component independently chooses how many of its group's
    /// stages it survives. None on overflow.
    pub(crate) fn leaf_count(&self) -> Option<u128> {
        let mut leaves: u128 = 1;
        for g in &self.groups {
            let per_member = (g.stages.len() + 1) as u128;
            for _ in 0..g.size {
                leaves = leaves.checked_mul(per_member)?;
            }
        }
        Some(leaves)
    }

    fn box_size(&self) -> usize {
        self.axes.iter().map(|a| a.max + 1).product()
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (self.axes[i + 1].max + 1);
        }
        strides
    }

    /// The denominator at a cell: the number of distinct configurations
    /// with those survivor counts, as a product of binomials along each
    /// group's stage chain.
    fn cell_total(&self, levels: &[usize]) -> BigUint {
        let mut total = BigUint::one();
        for g in &self.groups {
            let mut prev = g.size;
            for stage in &g.stages {
                let level = levels[stage.axes[0]];
                total *= binomial(prev, level);
                prev = level;
            }
        }
        total
    }

    pub(crate) fn is_feasible(&self, levels: &[usize]) -> bool {
        self.chains.iter().all(|c| c.feasible(levels))
    }

    /// Runs the sweep and assembles the table.
    pub(crate) fn solve(&self, budget: u64) -> Result<SignatureTable> {
        match self.leaf_count() {
            Some(leaves) if leaves <= budget as u128 => {}
            _ => {
                return Err(Error::TooLarge(format!(
                    "enumeration needs {} configurations, budget is {}",
                    self.leaf_count()
                        .map_or_else(|| "over 2^128".to_string(), |l| l.to_string()),
                    budget
                )));
            }
        }
        let box_size = self.box_size();
        if box_size > MAX_CELLS {
            return Err(Error::TooLarge(format!(
                "table would hold {box_size} cells (limit {MAX_CELLS})"
            )));
        }
        let strides = self.strides();
        let sweep_groups: Vec<SweepGroup> = self
            .groups
            .iter()
            .map(|g| SweepGroup {
                pool: if g.size == 0 {
                    0
                } else {
                    (((1u128 << g.size) - 1) as u64) << g.first_bit
                },
                stages: g
                    .stages
                    .iter()
                    .map(|s| SweepStage {
                        stride_sum: s.axes.iter().map(|a| strides[*a]).sum(),
                        apply_to: s.systems.clone(),
                        checks: Vec::new(),
                    })
                    .collect(),
            })
            .collect();
        let mut sweep_groups = sweep_groups;
        // A system's requirement is checked once its view is complete:
        // at its last contributing stage in sweep order.
        let mut last: Vec<Option<(usize, usize)>> = vec![None; self.systems.len()];
        for (gi, g) in sweep_groups.iter().enumerate() {
            for (si, s) in g.stages.iter().enumerate() {
                for sys in &s.apply_to {
                    last[*sys] = Some((gi, si));
                }
            }
        }
        for (sys, pos) in last.iter().enumerate() {
            let (gi, si) = pos.expect("every evaluated system observes some stage");
            sweep_groups[gi].stages[si].checks.push(sys);
        }

        let ctx = SweepCtx {
            groups: &sweep_groups,
            systems: &self.systems,
        };
        let mut state = SweepState {
            masks: vec![0u64; self.systems.len()],
            favourable: vec![0u64; box_size],
        };
        sweep_group(&ctx, &mut state, 0, 0);

        let mut cells: Vec<Option<CellValue>> = vec![None; box_size];
        let radices: Vec<usize> = self.axes.iter().map(|a| a.max + 1).collect();
        let mut levels = vec![0usize; self.axes.len()];
        for (off, cell) in cells.iter_mut().enumerate() {
            let mut rem = off;
            for i in (0..radices.len()).rev() {
                levels[i] = rem % radices[i];
                rem /= radices[i];
            }
            if self.is_feasible(&levels) {
                *cell = Some(CellValue::new(
                    state.favourable[off],
                    self.cell_total(&levels),
                ));
            } else {
                debug_assert_eq!(state.favourable[off], 0);
            }
        }
        Ok(SignatureTable::from_parts(
            self.event,
            self.order,
            self.axes.clone(),
            self.chains.clone(),
            cells,
        ))
    }
}

/// Axis label: the group's systems in ascending order with the observer
/// bracketed, prefixed by the type name in multi-type tables.
pub(crate) fn axis_label(
    types: &[String],
    ty: usize,
    mask: GroupMask,
    observer: usize,
    multi: bool,
) -> String {
    let mut suffix = String::new();
    if mask.count_ones() == 1 {
        suffix.push_str(&(observer + 1).to_string());
    } else {
        for i in 0..3 {
            if mask & (1 << i) == 0 {
                continue;
            }
            if i == observer {
                suffix.push_str(&format!("[{}]", i + 1));
            } else {
                suffix.push_str(&(i + 1).to_string());
            }
        }
    }
    debug_assert!(!mask_label(mask).is_empty());
    if multi {
        format!("l^{}_{}", types[ty], suffix)
    } else {
        format!("l_{suffix}")
    }
}

struct SweepStage {
    /// Offset contribution per survivor: the stage's axes share one value.
    stride_sum: usize,
    /// Evaluated systems seeing this stage's survivor set.
    apply_to: Vec<usize>,
    /// Evaluated systems whose requirement is verified here.
    checks: Vec<usize>,
}

struct SweepGroup {
    pool: u64,
    stages: Vec<SweepStage>,
}

struct SweepCtx<'a> {
    groups: &'a [SweepGroup],
    systems: &'a [EvalSystem],
}

struct SweepState {
    masks: Vec<u64>,
    favourable: Vec<u64>,
}

fn sweep_group(ctx: &SweepCtx, state: &mut SweepState, g: usize, offset: usize) {
    if g == ctx.groups.len() {
        state.favourable[offset] += 1;
        return;
    }
    sweep_stage(ctx, state, g, 0, ctx.groups[g].pool, offset);
}

fn sweep_stage(ctx: &SweepCtx, state: &mut SweepState, g: usize, s: usize, pool: u64, offset: usize) {
    let group = &ctx.groups[g];
    if s == group.stages.len() {
        sweep_group(ctx, state, g + 1, offset);
        return;
    }
    let stride_sum = group.stages[s].stride_sum;
    for size in 0..=pool.count_ones() {
        sweep_select(ctx, state, (g, s), pool, size, 0, offset + size as usize * stride_sum);
    }
}

/// Enumerates size-`need` subsets of `remaining`, applying each chosen
/// subset to the stage's systems and descending to the next stage (whose
/// pool is the chosen subset). `at` is the (group, stage) position.
fn sweep_select(
    ctx: &SweepCtx,
    state: &mut SweepState,
    at: (usize, usize),
    remaining: u64,
    need: u32,
    chosen: u64,
    offset: usize,
) {
    let (g, s) = at;
    if need == 0 {
        let stage = &ctx.groups[g].stages[s];
        for sys in &stage.apply_to {
            state.masks[*sys] |= chosen;
        }
        let mut ok = true;
        for sys in &stage.checks {
            let spec = &ctx.systems[*sys];
            if spec.compiled.eval(state.masks[*sys]) != spec.must_function {
                ok = false;
                break;
            }
        }
        if ok {
            sweep_stage(ctx, state, g, s + 1, chosen, offset);
        }
        for sys in &stage.apply_to {
            state.masks[*sys] &= !chosen;
        }
        return;
    }
    if remaining.count_ones() < need {
        return;
    }
    let low = remaining & remaining.wrapping_neg();
    let rest = remaining ^ low;
    sweep_select(ctx, state, at, rest, need - 1, chosen | low, offset);
    sweep_select(ctx, state, at, rest, need, chosen, offset);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::System;
    use crate::order::PairOrder;
    use crate::structure::build::*;

    fn id(name: &str) -> ComponentId {
        ComponentId::new(name).unwrap()
    }

    fn pair_small() -> SharedModel {
        let s1 = StructureFunction::expr(or(vec![atom("B"), and(vec![atom("A"), atom("C")])]))
            .unwrap();
        let s2 = StructureFunction::expr(and(vec![atom("B"), or(vec![atom("A"), atom("D")])]))
            .unwrap();
        SharedModel::new(
            vec![System::new("S1", s1).unwrap(), System::new("S2", s2).unwrap()],
            ["A", "B", "C", "D"]
                .iter()
                .map(|n| (id(n), "T".to_string()))
                .collect(),
            vec!["T".to_string()],
        )
        .unwrap()
    }

    #[test]
    fn pair_axes_and_chains() {
        let model = pair_small();
        let order = PairOrder::Earlier;
        let problem = Problem::from_model(
            &model,
            &order.ranks(),
            &EventKind::AllFunction.requirements(2),
            EventKind::AllFunction,
            OrderLabel::Pair(order),
        )
        .unwrap();
        let labels: Vec<&str> = problem.axes.iter().map(|a| a.label.as_str()).collect();
        assert_eq!(labels, vec!["l_1", "l_2", "l_[1]2", "l_1[2]"]);
        assert_eq!(problem.axes[2].max, 2);
        assert_eq!(problem.chains.len(), 1);
        assert_eq!(problem.chains[0].stages, vec![vec![2], vec![3]]);
        assert_eq!(problem.leaf_count(), Some(2 * 2 * 9));
    }

    #[test]
    fn same_order_merges_stages() {
        let model = pair_small();
        let problem = Problem::from_model(
            &model,
            &PairOrder::Same.ranks(),
            &EventKind::AllFunction.requirements(2),
            EventKind::AllFunction,
            OrderLabel::Pair(PairOrder::Same),
        )
        .unwrap();
        assert_eq!(problem.chains[0].stages, vec![vec![2, 3]]);
        assert_eq!(problem.leaf_count(), Some(2 * 2 * 4));
    }

    #[test]
    fn grouped_single_axes() {
        let model = pair_small();
        let problem = Problem::grouped_single(&model, 0).unwrap();
        let labels: Vec<&str> = problem.axes.iter().map(|a| a.label.as_str()).collect();
        assert_eq!(labels, vec!["l_1", "l_[1]2"]);
        assert!(problem.chains.is_empty());
    }

    #[test]
    fn budget_enforced() {
        let model = pair_small();
        let problem = Problem::from_model(
            &model,
            &PairOrder::Earlier.ranks(),
            &EventKind::AllFunction.requirements(2),
            EventKind::AllFunction,
            OrderLabel::Pair(PairOrder::Earlier),
        )
        .unwrap();
        assert!(matches!(problem.solve(10), Err(Error::TooLarge(_))));
        assert!(problem.solve(DEFAULT_BUDGET).is_ok());
    }

    #[test]
    fn axis_labels_cover_triple_and_types() {
        let types = vec!["T".to_string()];
        assert_eq!(axis_label(&types, 0, 0b001, 0, false), "l_1");
        assert_eq!(axis_label(&types, 0, 0b011, 0, false), "l_[1]2");
        assert_eq!(axis_label(&types, 0, 0b011, 1, false), "l_1[2]");
        assert_eq!(axis_label(&types, 0, 0b111, 1, false), "l_1[2]3");
        assert_eq!(axis_label(&types, 0, 0b111, 2, false), "l_12[3]");
        let types = vec!["gears".to_string(), "motors".to_string()];
        assert_eq!(axis_label(&types, 1, 0b110, 2, true), "l^motors_2[3]");
    }
}
