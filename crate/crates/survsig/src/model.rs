//! Shared-component models: 2 or 3 systems over a common component pool,
//! with the sharing partition derived from structure-atom membership.
//!
//! A component belongs to the group of exactly those systems whose
//! structures reference it. Within each component type the groups
//! partition the type's components; group sizes drive both signature
//! enumeration and the count kernels.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::structure::{ComponentId, StructureFunction};

/// A named system with its structure function.
#[derive(Debug, Clone)]
pub struct System {
    name: String,
    structure: StructureFunction,
}

impl System {
    pub fn new(name: impl Into<String>, structure: StructureFunction) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::InvalidSystemName(name));
        }
        Ok(System { name, structure })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn structure(&self) -> &StructureFunction {
        &self.structure
    }
}

/// A sharing group: the set of systems (by index) referencing a component,
/// encoded as a bitmask with bit i set for system i.
pub type GroupMask = u8;

/// Two or three systems over a typed component pool.
///
/// Construction validates everything: system count and names, component
/// and type declarations, atom resolution, and coherence of every
/// structure. Components referenced by no system are permitted and
/// tracked separately; they are irrelevant to all probabilities.
#[derive(Debug, Clone)]
pub struct SharedModel {
    systems: Vec<System>,
    types: Vec<String>,
    components: Vec<(ComponentId, usize)>,
    /// Members per (type index, nonempty group mask), sorted by name.
    groups: BTreeMap<(usize, GroupMask), Vec<ComponentId>>,
    unused: Vec<ComponentId>,
}

impl SharedModel {
    /// Builds and validates a model. `components` pairs each id with its
    /// type name; `types` fixes the type ordering used by tables.
    pub fn new(
        systems: Vec<System>,
        components: Vec<(ComponentId, String)>,
        types: Vec<String>,
    ) -> Result<Self> {
        if systems.len() < 2 || systems.len() > 3 {
            return Err(Error::WrongArity {
                expected: "2 or 3".into(),
                found: systems.len(),
            });
        }
        let mut names = HashSet::new();
        for s in &systems {
            if !names.insert(s.name.clone()) {
                return Err(Error::DuplicateSystemName(s.name.clone()));
            }
        }
        let mut type_index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, t) in types.iter().enumerate() {
            if type_index.insert(t, i).is_some() {
                return Err(Error::DuplicateType(t.clone()));
            }
        }
        let mut indexed = Vec::with_capacity(components.len());
        let mut seen = HashSet::new();
        for (id, type_name) in &components {
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateComponent(id.to_string()));
            }
            let ty = *type_index
                .get(type_name.as_str())
                .ok_or_else(|| Error::UnknownType {
                    component: id.to_string(),
                    type_name: type_name.clone(),
                })?;
            indexed.push((id.clone(), ty));
        }

        let atom_sets: Vec<BTreeSet<ComponentId>> = systems
            .iter()
            .map(|s| {
                s.structure.verify_coherent()?;
                Ok(s.structure.atoms())
            })
            .collect::<Result<_>>()?;
        let declared: HashSet<&ComponentId> = indexed.iter().map(|(id, _)| id).collect();
        for atoms in &atom_sets {
            for atom in atoms {
                if !declared.contains(atom) {
                    return Err(Error::UnknownComponent(atom.to_string()));
                }
            }
        }

        let mut groups: BTreeMap<(usize, GroupMask), Vec<ComponentId>> = BTreeMap::new();
        let mut unused = Vec::new();
        for (id, ty) in &indexed {
            let mut mask: GroupMask = 0;
            for (i, atoms) in atom_sets.iter().enumerate() {
                if atoms.contains(id) {
                    mask |= 1 << i;
                }
            }
            if mask == 0 {
                unused.push(id.clone());
            } else {
                groups.entry((*ty, mask)).or_default().push(id.clone());
            }
        }
        for members in groups.values_mut() {
            members.sort();
        }
        unused.sort();

        Ok(SharedModel {
            systems,
            types,
            components: indexed,
            groups,
            unused,
        })
    }

    pub fn systems(&self) -> &[System] {
        &self.systems
    }

    pub fn system_count(&self) -> usize {
        self.systems.len()
    }

    /// Looks a system up by name, returning its index and definition.
    pub fn system(&self, name: &str) -> Result<(usize, &System)> {
        self.systems
            .iter()
            .enumerate()
            .find(|(_, s)| s.name == name)
            .ok_or_else(|| Error::UnknownSystem(name.into()))
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    /// Declared components with their type indices, in declaration order.
    pub fn components(&self) -> &[(ComponentId, usize)] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component_type(&self, id: &ComponentId) -> Result<usize> {
        self.components
            .iter()
            .find(|(c, _)| c == id)
            .map(|(_, ty)| *ty)
            .ok_or_else(|| Error::UnknownComponent(id.to_string()))
    }

    /// Members of a (type, group) cell, sorted by name. Empty for groups
    /// with no members.
    pub fn group_members(&self, type_idx: usize, mask: GroupMask) -> &[ComponentId] {
        self.groups
            .get(&(type_idx, mask))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Components referenced by no structure (irrelevant to every query).
    pub fn unused_components(&self) -> &[ComponentId] {
        &self.unused
    }

    /// True when no component is referenced by more than one system, so
    /// the systems' lifetimes are independent.
    pub fn is_independent(&self) -> bool {
        self.groups.keys().all(|(_, mask)| mask.count_ones() < 2)
    }

    /// All nonempty group masks for the model's system count, in a fixed
    /// order: singletons first, then pairs, then the triple.
    pub fn group_masks(&self) -> Vec<GroupMask> {
        let s = self.system_count();
        let mut masks: Vec<GroupMask> = (1..(1u8 << s)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
    }

    pub fn group_counts(&self) -> GroupCounts {
        let mut counts = vec![[0usize; 8]; self.types.len()];
        for ((ty, mask), members) in &self.groups {
            counts[*ty][*mask as usize] = members.len();
        }
        GroupCounts {
            system_count: self.systems.len(),
            types: self.types.clone(),
            counts,
        }
    }

    /// A new model over the named systems, in the given order, keeping the
    /// full component pool and type ordering. Components used only by the
    /// dropped systems become unused. Sharing groups are recomputed, so
    /// tables built from the restriction use the smaller canonical axes.
    pub fn restrict(&self, names: &[&str]) -> Result<SharedModel> {
        let systems = names
            .iter()
            .map(|name| self.system(name).map(|(_, s)| s.clone()))
            .collect::<Result<Vec<_>>>()?;
        let components = self
            .components
            .iter()
            .map(|(id, ty)| (id.clone(), self.types[*ty].clone()))
            .collect();
        SharedModel::new(systems, components, self.types.clone())
    }
}

/// Per-type sizes of the sharing groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCounts {
    system_count: usize,
    types: Vec<String>,
    /// `counts[type][mask]`: components of the type referenced by exactly
    /// the systems in `mask`.
    counts: Vec<[usize; 8]>,
}

impl GroupCounts {
    pub fn system_count(&self) -> usize {
        self.system_count
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn count(&self, type_idx: usize, mask: GroupMask) -> usize {
        self.counts[type_idx][mask as usize]
    }

    /// Components of the type exclusive to system `i`.
    pub fn own(&self, type_idx: usize, i: usize) -> usize {
        self.count(type_idx, 1 << i)
    }

    /// Components of the type shared by exactly systems `i` and `j`.
    pub fn pair(&self, type_idx: usize, i: usize, j: usize) -> usize {
        assert_ne!(i, j);
        self.count(type_idx, (1 << i) | (1 << j))
    }

    /// Components of the type shared by all three systems.
    pub fn triple(&self, type_idx: usize) -> usize {
        self.count(type_idx, 0b111)
    }

    /// Components of the type referenced by system `i` at all: the n*_i
    /// of the count identities.
    pub fn referenced_by(&self, type_idx: usize, i: usize) -> usize {
        (1..(1u8 << self.system_count))
            .filter(|mask| mask & (1 << i) != 0)
            .map(|mask| self.count(type_idx, mask))
            .sum()
    }

    /// All components of the type across groups (excluding unused ones).
    pub fn total_of_type(&self, type_idx: usize) -> usize {
        (1..(1u8 << self.system_count))
            .map(|mask| self.count(type_idx, mask))
            .sum()
    }
}

/// Renders a mask like `12` or `2` for diagnostics (1-based system ids).
pub fn mask_label(mask: GroupMask) -> String {
    (0..3)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| (i + 1).to_string())
        .collect()
}

impl fmt::Display for GroupCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (ty, name) in self.types.iter().enumerate() {
            writeln!(f, "type {name}:")?;
            for mask in 1..(1u8 << self.system_count) {
                let label = mask_label(mask);
                writeln!(f, "  n_{label} = {}", self.count(ty, mask))?;
            }
        }
        Ok(())
    }
}
