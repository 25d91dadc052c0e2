//! Models shared across unit tests.

use crate::lifetimes::LifetimeDistribution;
use crate::model::{SharedModel, System};
use crate::structure::build::*;
use crate::structure::{ComponentId, StructureFunction};

pub fn id(name: &str) -> ComponentId {
    ComponentId::new(name).unwrap()
}

pub fn one_type(names: &[&str]) -> (Vec<(ComponentId, String)>, Vec<String>) {
    (
        names.iter().map(|n| (id(n), "T".to_string())).collect(),
        vec!["T".to_string()],
    )
}

fn system(name: &str, expr: crate::structure::StructureExpr) -> System {
    System::new(name, StructureFunction::expr(expr).unwrap()).unwrap()
}

/// Two systems sharing {A, B}: S1 = B∨(A∧C), S2 = B∧(A∨D).
/// Group counts (n_1, n_2, n_12) = (1, 1, 2).
pub fn pair_small() -> SharedModel {
    let (components, types) = one_type(&["A", "B", "C", "D"]);
    SharedModel::new(
        vec![
            system("S1", or(vec![atom("B"), and(vec![atom("A"), atom("C")])])),
            system("S2", and(vec![atom("B"), or(vec![atom("A"), atom("D")])])),
        ],
        components,
        types,
    )
    .unwrap()
}

/// Two systems sharing {A, B, C}, each with two further components:
/// S1 = (D∧C∧(A∨B)) ∨ (E∧ at least 2 of {A,B,C}),
/// S2 = (G∧A) ∨ (F∧(B∨C)).
/// Group counts (n_1, n_2, n_12) = (2, 2, 3).
pub fn pair_medium() -> SharedModel {
    let (components, types) = one_type(&["A", "B", "C", "D", "E", "F", "G"]);
    SharedModel::new(
        vec![
            system(
                "S1",
                or(vec![
                    and(vec![atom("D"), atom("C"), or(vec![atom("A"), atom("B")])]),
                    and(vec![
                        atom("E"),
                        k_of_n(2, vec![atom("A"), atom("B"), atom("C")]),
                    ]),
                ]),
            ),
            system(
                "S2",
                or(vec![
                    and(vec![atom("G"), atom("A")]),
                    and(vec![atom("F"), or(vec![atom("B"), atom("C")])]),
                ]),
            ),
        ],
        components,
        types,
    )
    .unwrap()
}

/// Three systems over {A..E}: S1 = B∨(A∧C), S2 = B∧(A∨D),
/// S3 = D∧(A∨(C∧E)). Sharing: n_12 = 1 (B), n_13 = 1 (C), n_23 = 1 (D),
/// n_123 = 1 (A), n_3 = 1 (E), n_1 = n_2 = 0.
pub fn triple_small() -> SharedModel {
    let (components, types) = one_type(&["A", "B", "C", "D", "E"]);
    SharedModel::new(
        vec![
            system("S1", or(vec![atom("B"), and(vec![atom("A"), atom("C")])])),
            system("S2", and(vec![atom("B"), or(vec![atom("A"), atom("D")])])),
            system(
                "S3",
                and(vec![
                    atom("D"),
                    or(vec![atom("A"), and(vec![atom("C"), atom("E")])]),
                ]),
            ),
        ],
        components,
        types,
    )
    .unwrap()
}

/// Two systems, two types; all shared components are type T1, all own
/// components type T2: S1 = B∨(A∧C)∨E, S2 = B∧(A∨D).
pub fn pair_two_types() -> SharedModel {
    let components = vec![
        (id("A"), "T1".to_string()),
        (id("B"), "T1".to_string()),
        (id("C"), "T2".to_string()),
        (id("D"), "T2".to_string()),
        (id("E"), "T2".to_string()),
    ];
    SharedModel::new(
        vec![
            system(
                "S1",
                or(vec![atom("B"), and(vec![atom("A"), atom("C")]), atom("E")]),
            ),
            system("S2", and(vec![atom("B"), or(vec![atom("A"), atom("D")])])),
        ],
        components,
        vec!["T1".to_string(), "T2".to_string()],
    )
    .unwrap()
}

/// Two systems, two types, both components shared: S1 = A∧B, S2 = A∨B
/// with A of type T1 and B of type T2. Each type has group counts
/// (0, 0, 1).
pub fn pair_shared_two_types() -> SharedModel {
    let components = vec![(id("A"), "T1".to_string()), (id("B"), "T2".to_string())];
    SharedModel::new(
        vec![
            system("S1", and(vec![atom("A"), atom("B")])),
            system("S2", or(vec![atom("A"), atom("B")])),
        ],
        components,
        vec!["T1".to_string(), "T2".to_string()],
    )
    .unwrap()
}

pub fn exponential(rate: f64) -> LifetimeDistribution {
    LifetimeDistribution::exponential(rate).unwrap()
}

/// Rate-1 exponentials for every type of a model, in type order.
pub fn exp1_for(model: &SharedModel) -> Vec<LifetimeDistribution> {
    model.types().iter().map(|_| exponential(1.0)).collect()
}
