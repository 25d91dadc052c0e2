//! Monotone (coherent) structure functions over named components.
//!
//! A structure function maps a component state vector to the system state
//! (1 = functioning). Two representations are supported:
//!
//! * expression trees built from `Atom`, `And`, `Or` and `KofN` nodes,
//!   negation-free and constant-free, hence monotone by construction;
//! * explicit truth tables, gated by an exhaustive monotonicity check
//!   (at most 20 components).
//!
//! In both cases the boundary conditions φ(all failed) = 0 and
//! φ(all functioning) = 1 are required.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Components a truth table (or exhaustive scan) may range over at most.
pub const MAX_EXHAUSTIVE_COMPONENTS: usize = 20;

/// A component identifier: a non-empty token of letters, digits and
/// underscores, unique within a model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ComponentId(String);

impl ComponentId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::InvalidComponentName(name));
        }
        Ok(ComponentId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for ComponentId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        ComponentId::new(s)
    }
}

impl From<ComponentId> for String {
    fn from(id: ComponentId) -> String {
        id.0
    }
}

/// An expression-tree node. `And`/`Or` take two or more children and
/// `KofN` requires at least `k` of its children to function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureExpr {
    Atom(ComponentId),
    And(Vec<StructureExpr>),
    Or(Vec<StructureExpr>),
    KOfN {
        k: usize,
        of: Vec<StructureExpr>,
    },
}

impl StructureExpr {
    fn validate(&self) -> Result<()> {
        match self {
            StructureExpr::Atom(_) => Ok(()),
            StructureExpr::And(children) | StructureExpr::Or(children) => {
                if children.len() < 2 {
                    return Err(Error::InvalidStructure(
                        "and/or nodes need at least 2 children".into(),
                    ));
                }
                children.iter().try_for_each(|c| c.validate())
            }
            StructureExpr::KOfN { k, of } => {
                if *k == 0 {
                    return Err(Error::InvalidStructure("k_of_n requires k >= 1".into()));
                }
                if of.len() < *k {
                    return Err(Error::InvalidStructure(format!(
                        "k_of_n with k={} needs at least {} children, found {}",
                        k,
                        k,
                        of.len()
                    )));
                }
                of.iter().try_for_each(|c| c.validate())
            }
        }
    }

    fn collect_atoms(&self, atoms: &mut BTreeSet<ComponentId>) {
        match self {
            StructureExpr::Atom(id) => {
                atoms.insert(id.clone());
            }
            StructureExpr::And(children) | StructureExpr::Or(children) => {
                children.iter().for_each(|c| c.collect_atoms(atoms));
            }
            StructureExpr::KOfN { of, .. } => {
                of.iter().for_each(|c| c.collect_atoms(atoms));
            }
        }
    }

    fn eval_with(&self, lookup: &impl Fn(&ComponentId) -> Result<bool>) -> Result<bool> {
        Ok(match self {
            StructureExpr::Atom(id) => lookup(id)?,
            StructureExpr::And(children) => {
                for c in children {
                    if !c.eval_with(lookup)? {
                        return Ok(false);
                    }
                }
                true
            }
            StructureExpr::Or(children) => {
                for c in children {
                    if c.eval_with(lookup)? {
                        return Ok(true);
                    }
                }
                false
            }
            StructureExpr::KOfN { k, of } => {
                let mut alive = 0usize;
                for c in of {
                    if c.eval_with(lookup)? {
                        alive += 1;
                        if alive >= *k {
                            return Ok(true);
                        }
                    }
                }
                false
            }
        })
    }
}

/// A monotone structure function: either an expression tree or a verified
/// truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureFunction {
    Expr(StructureExpr),
    TruthTable {
        components: Vec<ComponentId>,
        /// `outputs[m]` is φ of the state whose bit i (LSB first, following
        /// the order of `components`) tells whether component i functions.
        outputs: Vec<bool>,
    },
}

/// Result of a successful coherence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceReport {
    pub component_count: usize,
    pub monotone: bool,
    pub fails_when_all_fail: bool,
    pub functions_when_all_function: bool,
}

impl StructureFunction {
    /// Builds an expression-tree structure, validating node shapes.
    pub fn expr(expr: StructureExpr) -> Result<Self> {
        expr.validate()?;
        Ok(StructureFunction::Expr(expr))
    }

    /// Builds a truth-table structure. The table is verified to be
    /// monotone with the required boundary values before it can be used.
    pub fn truth_table(components: Vec<ComponentId>, outputs: Vec<bool>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidStructure(
                "truth table needs at least one component".into(),
            ));
        }
        if n > MAX_EXHAUSTIVE_COMPONENTS {
            return Err(Error::TooLarge(format!(
                "truth table over {} components exceeds the {}-component limit",
                n, MAX_EXHAUSTIVE_COMPONENTS
            )));
        }
        let mut seen = BTreeSet::new();
        for c in &components {
            if !seen.insert(c.clone()) {
                return Err(Error::DuplicateComponent(c.to_string()));
            }
        }
        if outputs.len() != 1usize << n {
            return Err(Error::InvalidStructure(format!(
                "truth table over {} components needs {} outputs, found {}",
                n,
                1usize << n,
                outputs.len()
            )));
        }
        let table = StructureFunction::TruthTable {
            components,
            outputs,
        };
        table.verify_coherent()?;
        Ok(table)
    }

    /// The components the structure references, sorted by name.
    pub fn atoms(&self) -> BTreeSet<ComponentId> {
        match self {
            StructureFunction::Expr(expr) => {
                let mut atoms = BTreeSet::new();
                expr.collect_atoms(&mut atoms);
                atoms
            }
            StructureFunction::TruthTable { components, .. } => {
                components.iter().cloned().collect()
            }
        }
    }

    /// Evaluates φ for the given state. Every referenced component must be
    /// assigned; extra assignments are ignored.
    pub fn evaluate(&self, state: &HashMap<ComponentId, bool>) -> Result<bool> {
        match self {
            StructureFunction::Expr(expr) => expr.eval_with(&|id: &ComponentId| {
                state
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::UnassignedComponent(id.to_string()))
            }),
            StructureFunction::TruthTable {
                components,
                outputs,
            } => {
                let mut index = 0usize;
                for (bit, id) in components.iter().enumerate() {
                    let alive = state
                        .get(id)
                        .copied()
                        .ok_or_else(|| Error::UnassignedComponent(id.to_string()))?;
                    if alive {
                        index |= 1 << bit;
                    }
                }
                Ok(outputs[index])
            }
        }
    }

    /// Checks monotonicity and the boundary values φ(all failed) = 0,
    /// φ(all functioning) = 1. Expression trees are monotone by
    /// construction; truth tables are checked exhaustively.
    pub fn verify_coherent(&self) -> Result<CoherenceReport> {
        match self {
            StructureFunction::Expr(expr) => {
                expr.validate()?;
                let n = self.atoms().len();
                // Constant-free, negation-free formulas are monotone with
                // φ(0)=0 and φ(1)=1; evaluate the boundaries anyway.
                let all = |v: bool| {
                    expr.eval_with(&|_| Ok(v)).expect("constant lookup cannot fail")
                };
                if all(false) {
                    return Err(Error::BoundaryViolation(
                        "structure functions when all components fail".into(),
                    ));
                }
                if !all(true) {
                    return Err(Error::BoundaryViolation(
                        "structure fails when all components function".into(),
                    ));
                }
                Ok(CoherenceReport {
                    component_count: n,
                    monotone: true,
                    fails_when_all_fail: true,
                    functions_when_all_function: true,
                })
            }
            StructureFunction::TruthTable {
                components,
                outputs,
            } => {
                let n = components.len();
                if outputs[0] {
                    return Err(Error::BoundaryViolation(
                        "φ(all failed) must be 0".into(),
                    ));
                }
                if !outputs[(1usize << n) - 1] {
                    return Err(Error::BoundaryViolation(
                        "φ(all functioning) must be 1".into(),
                    ));
                }
                for mask in 0..outputs.len() {
                    if !outputs[mask] {
                        continue;
                    }
                    for bit in 0..n {
                        let superset = mask | (1 << bit);
                        if superset != mask && !outputs[superset] {
                            let render = |m: usize| {
                                components
                                    .iter()
                                    .enumerate()
                                    .filter(|(b, _)| m & (1 << b) != 0)
                                    .map(|(_, id)| id.to_string())
                                    .collect::<Vec<_>>()
                                    .join(",")
                            };
                            return Err(Error::NonMonotone {
                                lower: render(mask),
                                upper: render(superset),
                            });
                        }
                    }
                }
                Ok(CoherenceReport {
                    component_count: n,
                    monotone: true,
                    fails_when_all_fail: true,
                    functions_when_all_function: true,
                })
            }
        }
    }

    /// All minimal sets of components whose joint functioning (with every
    /// other component failed) makes the system function. Derived
    /// exhaustively, so limited to 20 components.
    pub fn minimal_path_sets(&self) -> Result<Vec<BTreeSet<ComponentId>>> {
        let atoms: Vec<ComponentId> = self.atoms().into_iter().collect();
        let n = atoms.len();
        if n > MAX_EXHAUSTIVE_COMPONENTS {
            return Err(Error::TooLarge(format!(
                "path-set extraction over {} components exceeds the {}-component limit",
                n, MAX_EXHAUSTIVE_COMPONENTS
            )));
        }
        let compiled = CompiledStructure::compile(self, &atoms)?;
        let mut paths = Vec::new();
        for mask in 1u64..(1u64 << n) {
            if !compiled.eval(mask) {
                continue;
            }
            let mut minimal = true;
            for bit in 0..n {
                if mask & (1 << bit) != 0 && compiled.eval(mask & !(1 << bit)) {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                paths.push(
                    atoms
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask & (1 << b) != 0)
                        .map(|(_, id)| id.clone())
                        .collect(),
                );
            }
        }
        paths.sort_by(|a: &BTreeSet<_>, b: &BTreeSet<_>| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(paths)
    }
}

/// A structure compiled against a component indexing, evaluated on a
/// bitmask of functioning components. Used on enumeration hot paths.
#[derive(Debug, Clone)]
pub(crate) struct CompiledStructure {
    node: CompiledNode,
}

#[derive(Debug, Clone)]
enum CompiledNode {
    Atom(u32),
    And(Vec<CompiledNode>),
    Or(Vec<CompiledNode>),
    KOfN(usize, Vec<CompiledNode>),
    Table { bits: Vec<u32>, outputs: Vec<bool> },
}

impl CompiledStructure {
    /// Compiles against `universe`, mapping each referenced component to
    /// its position (the bit index). Errors on unindexed components.
    pub(crate) fn compile(
        structure: &StructureFunction,
        universe: &[ComponentId],
    ) -> Result<Self> {
        assert!(universe.len() <= 64, "mask evaluation limited to 64 components");
        let index: HashMap<&ComponentId, u32> = universe
            .iter()
            .enumerate()
            .map(|(i, id)| (id, i as u32))
            .collect();
        let lookup = |id: &ComponentId| -> Result<u32> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownComponent(id.to_string()))
        };
        let node = match structure {
            StructureFunction::Expr(expr) => Self::compile_expr(expr, &lookup)?,
            StructureFunction::TruthTable {
                components,
                outputs,
            } => CompiledNode::Table {
                bits: components.iter().map(&lookup).collect::<Result<_>>()?,
                outputs: outputs.clone(),
            },
        };
        Ok(CompiledStructure { node })
    }

    fn compile_expr(
        expr: &StructureExpr,
        lookup: &impl Fn(&ComponentId) -> Result<u32>,
    ) -> Result<CompiledNode> {
        Ok(match expr {
            StructureExpr::Atom(id) => CompiledNode::Atom(lookup(id)?),
            StructureExpr::And(children) => CompiledNode::And(
                children
                    .iter()
                    .map(|c| Self::compile_expr(c, lookup))
                    .collect::<Result<_>>()?,
            ),
            StructureExpr::Or(children) => CompiledNode::Or(
                children
                    .iter()
                    .map(|c| Self::compile_expr(c, lookup))
                    .collect::<Result<_>>()?,
            ),
            StructureExpr::KOfN { k, of } => CompiledNode::KOfN(
                *k,
                of.iter()
                    .map(|c| Self::compile_expr(c, lookup))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    #[inline]
    pub(crate) fn eval(&self, mask: u64) -> bool {
        Self::eval_node(&self.node, mask)
    }

    fn eval_node(node: &CompiledNode, mask: u64) -> bool {
        match node {
            CompiledNode::Atom(bit) => mask & (1u64 << bit) != 0,
            CompiledNode::And(children) => children.iter().all(|c| Self::eval_node(c, mask)),
            CompiledNode::Or(children) => children.iter().any(|c| Self::eval_node(c, mask)),
            CompiledNode::KOfN(k, children) => {
                let mut alive = 0usize;
                for c in children {
                    if Self::eval_node(c, mask) {
                        alive += 1;
                        if alive >= *k {
                            return true;
                        }
                    }
                }
                false
            }
            CompiledNode::Table { bits, outputs } => {
                let mut index = 0usize;
                for (i, bit) in bits.iter().enumerate() {
                    if mask & (1u64 << bit) != 0 {
                        index |= 1 << i;
                    }
                }
                outputs[index]
            }
        }
    }
}

/// Shorthand constructors for building expressions in code.
pub mod build {
    use super::*;

    pub fn atom(name: &str) -> StructureExpr {
        StructureExpr::Atom(ComponentId::new(name).expect("valid component name"))
    }

    pub fn and(children: Vec<StructureExpr>) -> StructureExpr {
        StructureExpr::And(children)
    }

    pub fn or(children: Vec<StructureExpr>) -> StructureExpr {
        StructureExpr::Or(children)
    }

    pub fn k_of_n(k: usize, of: Vec<StructureExpr>) -> StructureExpr {
        StructureExpr::KOfN { k, of }
    }
}
