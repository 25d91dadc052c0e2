//! JSON model files: typed components with lifetime distributions and
//! 1–3 named systems given as structure expressions.
//!
//! ```json
//! {
//!   "types": [
//!     {"name": "T", "distribution": {"kind": "exponential", "rate": 1.0}}
//!   ],
//!   "components": [
//!     {"id": "A", "type": "T"},
//!     {"id": "B", "type": "T"}
//!   ],
//!   "systems": [
//!     {"name": "S1", "structure": {"or": [{"atom": "A"}, {"atom": "B"}]}}
//!   ]
//! }
//! ```
//!
//! Expression nodes are objects with exactly one key: `atom`, `and`,
//! `or`, or `k_of_n` (`{"k_of_n": {"k": 2, "of": [...]}}`). Distribution
//! objects follow the `kind`-tagged forms of
//! [`LifetimeDistribution`](crate::lifetimes::LifetimeDistribution).
//! Schema violations are reported with line and column positions;
//! semantic problems (duplicate names, undeclared components, invalid
//! parameters) with a description of the offending declaration.

use std::collections::HashSet;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lifetimes::LifetimeDistribution;
use crate::model::{SharedModel, System};
use crate::structure::{ComponentId, StructureExpr, StructureFunction};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModelFile {
    types: Vec<RawType>,
    components: Vec<RawComponent>,
    systems: Vec<RawSystem>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawType {
    name: String,
    distribution: LifetimeDistribution,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    id: String,
    #[serde(rename = "type")]
    type_name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    name: String,
    structure: StructureExpr,
}

/// A parsed and validated model file: every system is coherent over the
/// declared components, and every type carries a usable distribution.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    systems: Vec<System>,
    components: Vec<(ComponentId, String)>,
    types: Vec<String>,
    dists: Vec<LifetimeDistribution>,
}

impl LoadedModel {
    pub fn from_json_str(text: &str) -> Result<LoadedModel> {
        let raw: RawModelFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidModelFile(e.to_string()))?;

        let mut types = Vec::with_capacity(raw.types.len());
        let mut dists = Vec::with_capacity(raw.types.len());
        for decl in raw.types {
            if types.contains(&decl.name) {
                return Err(Error::DuplicateType(decl.name));
            }
            decl.distribution.validate()?;
            types.push(decl.name);
            dists.push(decl.distribution);
        }

        let mut components = Vec::with_capacity(raw.components.len());
        let mut seen = HashSet::new();
        for decl in raw.components {
            let id = ComponentId::new(decl.id)?;
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateComponent(id.to_string()));
            }
            if !types.contains(&decl.type_name) {
                return Err(Error::UnknownType {
                    component: id.to_string(),
                    type_name: decl.type_name,
                });
            }
            components.push((id, decl.type_name));
        }

        if raw.systems.is_empty() || raw.systems.len() > 3 {
            return Err(Error::WrongArity {
                expected: "1, 2 or 3".into(),
                found: raw.systems.len(),
            });
        }
        let mut systems: Vec<System> = Vec::with_capacity(raw.systems.len());
        for decl in raw.systems {
            if systems.iter().any(|s| s.name() == decl.name) {
                return Err(Error::DuplicateSystemName(decl.name));
            }
            let structure = StructureFunction::expr(decl.structure)?;
            structure.verify_coherent()?;
            for atom in structure.atoms() {
                if !seen.contains(&atom) {
                    return Err(Error::UnknownComponent(atom.to_string()));
                }
            }
            systems.push(System::new(decl.name, structure)?);
        }

        Ok(LoadedModel {
            systems,
            components,
            types,
            dists,
        })
    }

    pub fn systems(&self) -> &[System] {
        &self.systems
    }

    pub fn system(&self, name: &str) -> Result<&System> {
        self.systems
            .iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownSystem(name.into()))
    }

    pub fn components(&self) -> &[(ComponentId, String)] {
        &self.components
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    /// Distributions in type order, aligned with `types()`.
    pub fn distributions(&self) -> &[LifetimeDistribution] {
        &self.dists
    }

    /// Shared model over all declared systems (needs 2 or 3).
    pub fn shared(&self) -> Result<SharedModel> {
        SharedModel::new(
            self.systems.clone(),
            self.components.clone(),
            self.types.clone(),
        )
    }

    /// Shared model over the named systems, in the given order.
    pub fn shared_subset(&self, names: &[&str]) -> Result<SharedModel> {
        let systems = names
            .iter()
            .map(|n| self.system(n).cloned())
            .collect::<Result<Vec<_>>>()?;
        SharedModel::new(systems, self.components.clone(), self.types.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::order::PairOrder;
    use crate::signature::{joint_signature_two, DEFAULT_BUDGET};

    const PAIR_SMALL: &str =
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/models/pair_small.json"));
    const PAIR_MEDIUM: &str =
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/models/pair_medium.json"));
    const TRIPLE_SMALL: &str =
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/models/triple_small.json"));
    const PAIR_TWO_TYPES: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/models/pair_two_types.json"
    ));
    const SINGLE_BRIDGE: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/models/single_bridge.json"
    ));
    const UNDECLARED: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/models/invalid_undeclared.json"
    ));

    #[test]
    fn bundled_models_parse() {
        for text in [PAIR_SMALL, PAIR_MEDIUM, TRIPLE_SMALL, PAIR_TWO_TYPES] {
            let loaded = LoadedModel::from_json_str(text).unwrap();
            loaded.shared().unwrap();
        }
        let single = LoadedModel::from_json_str(SINGLE_BRIDGE).unwrap();
        assert_eq!(single.systems().len(), 1);
        assert!(matches!(single.shared(), Err(Error::WrongArity { .. })));
    }

    #[test]
    fn bundled_pair_small_matches_fixture() {
        // The bundled file and the programmatic fixture must describe the
        // same model: identical sharing counts and identical joint tables.
        let loaded = LoadedModel::from_json_str(PAIR_SMALL).unwrap();
        let from_file = loaded.shared().unwrap();
        let fixture = fixtures::pair_small();
        assert_eq!(from_file.group_counts(), fixture.group_counts());
        for order in PairOrder::ALL {
            assert_eq!(
                joint_signature_two(&from_file, order, DEFAULT_BUDGET).unwrap(),
                joint_signature_two(&fixture, order, DEFAULT_BUDGET).unwrap(),
            );
        }
        assert_eq!(
            loaded.distributions(),
            &[LifetimeDistribution::Exponential { rate: 1.0 }]
        );
    }

    #[test]
    fn bundled_triple_matches_fixture() {
        let loaded = LoadedModel::from_json_str(TRIPLE_SMALL).unwrap();
        let from_file = loaded.shared().unwrap();
        let fixture = fixtures::triple_small();
        assert_eq!(from_file.group_counts(), fixture.group_counts());
    }

    #[test]
    fn bundled_pair_medium_matches_fixture() {
        let loaded = LoadedModel::from_json_str(PAIR_MEDIUM).unwrap();
        let from_file = loaded.shared().unwrap();
        let fixture = fixtures::pair_medium();
        assert_eq!(from_file.group_counts(), fixture.group_counts());
        for order in PairOrder::ALL {
            assert_eq!(
                joint_signature_two(&from_file, order, DEFAULT_BUDGET).unwrap(),
                joint_signature_two(&fixture, order, DEFAULT_BUDGET).unwrap(),
            );
        }
    }

    #[test]
    fn undeclared_component_is_reported_by_name() {
        let err = LoadedModel::from_json_str(UNDECLARED).unwrap_err();
        assert_eq!(err, Error::UnknownComponent("X".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = LoadedModel::from_json_str("{\n  \"types\": [,]\n}").unwrap_err();
        match err {
            Error::InvalidModelFile(msg) => {
                assert!(msg.contains("line 2"), "missing position in: {msg}");
            }
            other => panic!("expected InvalidModelFile, got {other:?}"),
        }
        // Unknown keys are schema violations, not silently ignored.
        let err = LoadedModel::from_json_str(
            r#"{"types": [], "components": [], "systems": [], "extra": 1}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidModelFile(_)));
    }

    #[test]
    fn semantic_errors() {
        let dup_type = r#"{
            "types": [
                {"name": "T", "distribution": {"kind": "exponential", "rate": 1.0}},
                {"name": "T", "distribution": {"kind": "exponential", "rate": 2.0}}
            ],
            "components": [], "systems": [{"name": "S", "structure": {"atom": "A"}}]
        }"#;
        assert!(matches!(
            LoadedModel::from_json_str(dup_type),
            Err(Error::DuplicateType(_))
        ));

        let bad_rate = r#"{
            "types": [{"name": "T", "distribution": {"kind": "exponential", "rate": -1.0}}],
            "components": [], "systems": [{"name": "S", "structure": {"atom": "A"}}]
        }"#;
        assert!(matches!(
            LoadedModel::from_json_str(bad_rate),
            Err(Error::InvalidDistribution(_))
        ));

        let bad_type_ref = r#"{
            "types": [{"name": "T", "distribution": {"kind": "exponential", "rate": 1.0}}],
            "components": [{"id": "A", "type": "U"}],
            "systems": [{"name": "S", "structure": {"atom": "A"}}]
        }"#;
        assert!(matches!(
            LoadedModel::from_json_str(bad_type_ref),
            Err(Error::UnknownType { .. })
        ));

        let four = r#"{
            "types": [{"name": "T", "distribution": {"kind": "exponential", "rate": 1.0}}],
            "components": [{"id": "A", "type": "T"}],
            "systems": [
                {"name": "S1", "structure": {"atom": "A"}},
                {"name": "S2", "structure": {"atom": "A"}},
                {"name": "S3", "structure": {"atom": "A"}},
                {"name": "S4", "structure": {"atom": "A"}}
            ]
        }"#;
        assert!(matches!(
            LoadedModel::from_json_str(four),
            Err(Error::WrongArity { .. })
        ));
    }

    #[test]
    fn subset_selection() {
        let loaded = LoadedModel::from_json_str(TRIPLE_SMALL).unwrap();
        let pair = loaded.shared_subset(&["S3", "S1"]).unwrap();
        assert_eq!(pair.system_count(), 2);
        assert_eq!(pair.systems()[0].name(), "S3");
        assert!(matches!(
            loaded.shared_subset(&["S1", "Sx"]),
            Err(Error::UnknownSystem(_))
        ));
    }
}
