//! Exact survival signatures: single-system, joint two- and three-system,
//! variant events, unions over orderings, and monotonicity bounds.
//!
//! All values are exact rationals (favourable, total) over the uniform
//! distribution of survivor sets given per-group survivor counts, with
//! later survivors nested inside earlier ones per sharing group.

mod engine;
mod table;

pub use engine::DEFAULT_BUDGET;
pub(crate) use engine::Problem;
pub use table::{
    format_probability, signature_bounds, Axis, CellValue, EventKind, SignatureTable,
};

use crate::error::{Error, Result};
use crate::model::SharedModel;
use crate::order::{OrderLabel, PairOrder, TripleOrder};
use crate::structure::{ComponentId, StructureFunction};

fn require_systems(model: &SharedModel, expected: usize) -> Result<()> {
    if model.system_count() != expected {
        return Err(Error::WrongArity {
            expected: expected.to_string(),
            found: model.system_count(),
        });
    }
    Ok(())
}

/// Signature of one system alone: Φ(l_1,…,l_K) is the probability the
/// system functions given exactly l_k components of type k function,
/// uniformly over the equally likely survivor sets.
pub fn survival_signature_single(
    structure: &StructureFunction,
    components: &[(ComponentId, String)],
    types: &[String],
    budget: u64,
) -> Result<SignatureTable> {
    Problem::standalone_single(structure, components, types)?.solve(budget)
}

/// Signature of one system of a shared model, with levels split per
/// (type, sharing group) referencing the system. Axis labels match the
/// joint tables.
pub fn survival_signature_grouped(
    model: &SharedModel,
    system: &str,
    budget: u64,
) -> Result<SignatureTable> {
    let (idx, _) = model.system(system)?;
    Problem::grouped_single(model, idx)?.solve(budget)
}

/// Joint signature of two systems with one component type: the
/// probability both function given the level vector
/// (l_1, l_2, l_[1]2, l_1[2]) under the given time ordering.
pub fn joint_signature_two(
    model: &SharedModel,
    order: PairOrder,
    budget: u64,
) -> Result<SignatureTable> {
    if model.type_count() != 1 {
        return Err(Error::WrongTypeCount {
            expected: 1,
            found: model.type_count(),
        });
    }
    joint_signature_two_multitype(model, order, budget)
}

/// Joint signature of two systems with any number of component types:
/// one level quadruple per type, chains applied per type.
pub fn joint_signature_two_multitype(
    model: &SharedModel,
    order: PairOrder,
    budget: u64,
) -> Result<SignatureTable> {
    require_systems(model, 2)?;
    let event = EventKind::AllFunction;
    Problem::from_model(
        model,
        &order.ranks(),
        &event.requirements(2),
        event,
        OrderLabel::Pair(order),
    )?
    .solve(budget)
}

/// Joint signature of three systems under a weak ordering of their
/// observation times; pairwise groups nest over two stages, the triple
/// group over up to three.
pub fn joint_signature_three(
    model: &SharedModel,
    order: TripleOrder,
    budget: u64,
) -> Result<SignatureTable> {
    require_systems(model, 3)?;
    let event = EventKind::AllFunction;
    Problem::from_model(
        model,
        order.ranks().as_ref(),
        &event.requirements(3),
        event,
        OrderLabel::Triple(order),
    )?
    .solve(budget)
}

/// Two-system signature for an arbitrary functioning/failure event
/// (S1 functions and S2 fails, S1 functions with S2 unconstrained, both
/// fail, and so on) over the same cells as the joint table.
pub fn variant_signature(
    model: &SharedModel,
    order: PairOrder,
    event: EventKind,
    budget: u64,
) -> Result<SignatureTable> {
    require_systems(model, 2)?;
    if event == EventKind::SingleSystem {
        return Err(Error::InvalidTable(
            "single-system tables come from survival_signature_single".into(),
        ));
    }
    Problem::from_model(
        model,
        &order.ranks(),
        &event.requirements(2),
        event,
        OrderLabel::Pair(order),
    )?
    .solve(budget)
}

/// Union of the per-ordering tables for an event: every cell feasible
/// under some ordering, with the shared cells (which provably agree)
/// stored once. The result carries the `any` order label.
pub fn merged_signature(
    model: &SharedModel,
    event: EventKind,
    budget: u64,
) -> Result<SignatureTable> {
    let tables: Vec<SignatureTable> = match model.system_count() {
        2 => PairOrder::ALL
            .iter()
            .map(|o| {
                Problem::from_model(
                    model,
                    &o.ranks(),
                    &event.requirements(2),
                    event,
                    OrderLabel::Pair(*o),
                )?
                .solve(budget)
            })
            .collect::<Result<_>>()?,
        3 => TripleOrder::all()
            .iter()
            .map(|o| {
                Problem::from_model(
                    model,
                    o.ranks().as_ref(),
                    &event.requirements(3),
                    event,
                    OrderLabel::Triple(*o),
                )?
                .solve(budget)
            })
            .collect::<Result<_>>()?,
        found => {
            return Err(Error::WrongArity {
                expected: "2 or 3".into(),
                found,
            })
        }
    };
    let refs: Vec<&SignatureTable> = tables.iter().collect();
    SignatureTable::merge(&refs)
}
