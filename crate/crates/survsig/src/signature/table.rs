//! Signature tables: exact rational values over feasible level vectors.
//!
//! A table is a dense mixed-radix array over its axis box; infeasible
//! cells hold no value and are absent from iteration and from exported
//! documents. Values are kept unreduced as (favourable, total)
//! configuration counts.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::OrderLabel;

/// One level axis: values run 0..=max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub label: String,
    pub max: usize,
}

impl Axis {
    pub fn new(label: impl Into<String>, max: usize) -> Axis {
        Axis {
            label: label.into(),
            max,
        }
    }
}

/// An exact probability stored as unreduced configuration counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellValue {
    pub favourable: BigUint,
    pub total: BigUint,
}

impl CellValue {
    pub fn new(favourable: impl Into<BigUint>, total: impl Into<BigUint>) -> CellValue {
        let v = CellValue {
            favourable: favourable.into(),
            total: total.into(),
        };
        assert!(!v.total.is_zero(), "cell total must be positive");
        assert!(v.favourable <= v.total, "favourable exceeds total");
        v
    }

    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.favourable.clone().into(), self.total.clone().into())
    }

    pub fn to_f64(&self) -> f64 {
        match (self.favourable.to_f64(), self.total.to_f64()) {
            (Some(f), Some(t)) if t.is_finite() && f.is_finite() => f / t,
            _ => self.ratio().to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.favourable.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.favourable == self.total
    }
}

/// The event a table's values describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// One system functions (single-system signature).
    SingleSystem,
    /// Every system in the model functions.
    AllFunction,
    /// System 1 functions and system 2 fails.
    FirstWithoutSecond,
    /// System 2 functions and system 1 fails.
    SecondWithoutFirst,
    /// System 1 functions; system 2 unconstrained.
    FirstOnly,
    /// System 2 functions; system 1 unconstrained.
    SecondOnly,
    /// Both systems fail.
    Neither,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::SingleSystem => "single",
            EventKind::AllFunction => "both",
            EventKind::FirstWithoutSecond => "s1not2",
            EventKind::SecondWithoutFirst => "s2not1",
            EventKind::FirstOnly => "s1only",
            EventKind::SecondOnly => "s2only",
            EventKind::Neither => "neither",
        }
    }

    pub fn parse(s: &str) -> Result<EventKind> {
        match s {
            "single" => Ok(EventKind::SingleSystem),
            "both" | "all" => Ok(EventKind::AllFunction),
            "s1not2" => Ok(EventKind::FirstWithoutSecond),
            "s2not1" => Ok(EventKind::SecondWithoutFirst),
            "s1only" => Ok(EventKind::FirstOnly),
            "s2only" => Ok(EventKind::SecondOnly),
            "neither" => Ok(EventKind::Neither),
            other => Err(Error::InvalidTable(format!("unknown event `{other}`"))),
        }
    }

    /// Per-system functioning requirement: Some(true) must function,
    /// Some(false) must fail, None unconstrained.
    pub fn requirements(&self, system_count: usize) -> Vec<Option<bool>> {
        let mut req = vec![None; system_count];
        match self {
            EventKind::SingleSystem => req[0] = Some(true),
            EventKind::AllFunction => req.iter_mut().for_each(|r| *r = Some(true)),
            EventKind::FirstWithoutSecond => {
                req[0] = Some(true);
                req[1] = Some(false);
            }
            EventKind::SecondWithoutFirst => {
                req[0] = Some(false);
                req[1] = Some(true);
            }
            EventKind::FirstOnly => req[0] = Some(true),
            EventKind::SecondOnly => req[1] = Some(true),
            EventKind::Neither => {
                req[0] = Some(false);
                req[1] = Some(false);
            }
        }
        req
    }

    /// Whether the event probability is nondecreasing in every level.
    /// Events requiring a failure are not monotone, so monotonicity
    /// bounds do not apply to them.
    pub fn is_monotone(&self) -> bool {
        matches!(
            self,
            EventKind::SingleSystem
                | EventKind::AllFunction
                | EventKind::FirstOnly
                | EventKind::SecondOnly
        )
    }
}

/// A nesting constraint over a sharing group's axes: within a stage all
/// axis values are equal (tied observation times); across stages values
/// are non-increasing (later survivors are a subset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// Axis indices per stage, earliest stage first.
    pub stages: Vec<Vec<usize>>,
}

impl Chain {
    pub(crate) fn feasible(&self, levels: &[usize]) -> bool {
        let mut prev: Option<usize> = None;
        for stage in &self.stages {
            let v = levels[stage[0]];
            if stage.iter().any(|a| levels[*a] != v) {
                return false;
            }
            if let Some(p) = prev {
                if v > p {
                    return false;
                }
            }
            prev = Some(v);
        }
        true
    }
}

/// An exact signature table for one event and one time-ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTable {
    event: EventKind,
    order: OrderLabel,
    axes: Vec<Axis>,
    chains: Vec<Chain>,
    /// Row-major over the axis box (first axis slowest); None = absent.
    cells: Vec<Option<CellValue>>,
}

impl SignatureTable {
    pub(crate) fn from_parts(
        event: EventKind,
        order: OrderLabel,
        axes: Vec<Axis>,
        chains: Vec<Chain>,
        cells: Vec<Option<CellValue>>,
    ) -> SignatureTable {
        let size: usize = axes.iter().map(|a| a.max + 1).product();
        assert_eq!(cells.len(), size, "cell storage must cover the axis box");
        SignatureTable {
            event,
            order,
            axes,
            chains,
            cells,
        }
    }

    pub fn event(&self) -> EventKind {
        self.event
    }

    pub fn order(&self) -> OrderLabel {
        self.order
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis_index(&self, label: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.label == label)
    }

    pub fn max_levels(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.max).collect()
    }

    fn box_size(&self) -> usize {
        self.axes.iter().map(|a| a.max + 1).product()
    }

    fn offset(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.axes.len() {
            return Err(Error::LevelOutOfRange {
                what: format!("level vector of length {}", levels.len()),
                level: levels.len(),
                max: self.axes.len(),
            });
        }
        let mut off = 0usize;
        for (axis, level) in self.axes.iter().zip(levels) {
            if *level > axis.max {
                return Err(Error::LevelOutOfRange {
                    what: axis.label.clone(),
                    level: *level,
                    max: axis.max,
                });
            }
            off = off * (axis.max + 1) + level;
        }
        Ok(off)
    }

    /// Whether the level vector satisfies the table's nesting chains.
    /// Merged tables carry no chains; their feasibility is cell presence.
    pub fn is_feasible(&self, levels: &[usize]) -> Result<bool> {
        let off = self.offset(levels)?;
        if self.chains.is_empty() {
            return Ok(self.cells[off].is_some());
        }
        Ok(self.chains.iter().all(|c| c.feasible(levels)))
    }

    /// The value at a cell; Ok(None) when the cell is infeasible/absent.
    pub fn get(&self, levels: &[usize]) -> Result<Option<&CellValue>> {
        let off = self.offset(levels)?;
        Ok(self.cells[off].as_ref())
    }

    /// Present cells in lexicographic level order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &CellValue)> + '_ {
        let radices: Vec<usize> = self.axes.iter().map(|a| a.max + 1).collect();
        self.cells.iter().enumerate().filter_map(move |(off, c)| {
            c.as_ref().map(|value| {
                let mut levels = vec![0usize; radices.len()];
                let mut rem = off;
                for i in (0..radices.len()).rev() {
                    levels[i] = rem % radices[i];
                    rem /= radices[i];
                }
                (levels, value)
            })
        })
    }

    pub fn feasible_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// CSV document: axis labels, favourable, total, probability; one row
    /// per present cell in lexicographic order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for axis in &self.axes {
            out.push_str(&axis.label);
            out.push(',');
        }
        out.push_str("favourable,total,probability\n");
        for (levels, value) in self.iter() {
            for l in &levels {
                out.push_str(&l.to_string());
                out.push(',');
            }
            out.push_str(&format!(
                "{},{},{}\n",
                value.favourable,
                value.total,
                format_probability(value.to_f64())
            ));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        let doc = TableDoc {
            event: self.event.label().to_string(),
            order: self.order.label(),
            axes: self
                .axes
                .iter()
                .map(|a| AxisDoc {
                    label: a.label.clone(),
                    max: a.max,
                })
                .collect(),
            chains: self.chains.iter().map(|c| c.stages.clone()).collect(),
            cells: self
                .iter()
                .map(|(levels, v)| CellDoc {
                    levels,
                    favourable: v.favourable.to_string(),
                    total: v.total.to_string(),
                    probability: v.to_f64(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("table serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<SignatureTable> {
        let doc: TableDoc =
            serde_json::from_str(s).map_err(|e| Error::InvalidTable(e.to_string()))?;
        let event = EventKind::parse(&doc.event)?;
        let order = OrderLabel::parse(&doc.order)?;
        let axes: Vec<Axis> = doc
            .axes
            .into_iter()
            .map(|a| Axis::new(a.label, a.max))
            .collect();
        if axes.is_empty() {
            return Err(Error::InvalidTable("no axes".into()));
        }
        for chain in &doc.chains {
            for stage in chain {
                if stage.is_empty() || stage.iter().any(|a| *a >= axes.len()) {
                    return Err(Error::InvalidTable("chain references a bad axis".into()));
                }
            }
        }
        let chains: Vec<Chain> = doc
            .chains
            .into_iter()
            .map(|stages| Chain { stages })
            .collect();
        let size: usize = axes.iter().map(|a| a.max + 1).product();
        let mut table = SignatureTable {
            event,
            order,
            axes,
            chains,
            cells: vec![None; size],
        };
        for cell in doc.cells {
            let parse_count = |s: &str| {
                s.parse::<BigUint>()
                    .map_err(|_| Error::InvalidTable(format!("bad count `{s}`")))
            };
            let favourable = parse_count(&cell.favourable)?;
            let total = parse_count(&cell.total)?;
            if total.is_zero() || favourable > total {
                return Err(Error::InvalidTable(format!(
                    "cell {:?} has counts {}/{}",
                    cell.levels, favourable, total
                )));
            }
            let off = table.offset(&cell.levels)?;
            if table.cells[off].is_some() {
                return Err(Error::InvalidTable(format!(
                    "duplicate cell {:?}",
                    cell.levels
                )));
            }
            table.cells[off] = Some(CellValue { favourable, total });
        }
        Ok(table)
    }

    /// Union of per-ordering tables of the same event over the same axes.
    /// Cells present in several inputs must agree exactly; the result
    /// carries the `any` order label and no chains.
    pub fn merge(tables: &[&SignatureTable]) -> Result<SignatureTable> {
        let first = tables
            .first()
            .ok_or_else(|| Error::InvalidTable("nothing to merge".into()))?;
        let mut cells: Vec<Option<CellValue>> = vec![None; first.box_size()];
        for table in tables {
            if table.event != first.event || table.axes != first.axes {
                return Err(Error::InvalidTable(
                    "merge requires identical event and axes".into(),
                ));
            }
            for (off, cell) in table.cells.iter().enumerate() {
                match (&cells[off], cell) {
                    (_, None) => {}
                    (None, Some(v)) => cells[off] = Some(v.clone()),
                    (Some(prev), Some(v)) => {
                        if prev != v {
                            return Err(Error::InvalidTable(format!(
                                "merge conflict at offset {off}: {}/{} vs {}/{}",
                                prev.favourable, prev.total, v.favourable, v.total
                            )));
                        }
                    }
                }
            }
        }
        Ok(SignatureTable {
            event: first.event,
            order: OrderLabel::Any,
            axes: first.axes.clone(),
            chains: Vec::new(),
            cells,
        })
    }
}

/// Monotonicity bounds for a query cell from a subset of evaluated cells.
///
/// The lower bound is the largest value among evaluated cells dominated by
/// the query (componentwise), defaulting to 0; the upper bound is the
/// smallest value among evaluated cells dominating the query, defaulting
/// to 1. Only valid for events monotone in the levels.
pub fn signature_bounds(
    table: &SignatureTable,
    evaluated: &[Vec<usize>],
    query: &[usize],
) -> Result<(BigRational, BigRational)> {
    if !table.event().is_monotone() {
        return Err(Error::NonMonotoneEvent(table.event().label().into()));
    }
    if !table.is_feasible(query)? {
        return Err(Error::InfeasibleQuery(format!("{query:?}")));
    }
    let mut lower = BigRational::zero();
    let mut upper = BigRational::new(1.into(), 1.into());
    let dominates = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(x, y)| x >= y);
    for levels in evaluated {
        let value = table
            .get(levels)?
            .ok_or_else(|| Error::InfeasibleQuery(format!("{levels:?}")))?
            .ratio();
        if dominates(query, levels) && value > lower {
            lower = value.clone();
        }
        if dominates(levels, query) && value < upper {
            upper = value;
        }
    }
    Ok((lower, upper))
}

/// Formats a probability with 12 significant digits, trailing zeros
/// trimmed. Deterministic across platforms.
pub fn format_probability(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let text = if (-5..12).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    };
    trim_zeros(&text)
}

fn trim_zeros(text: &str) -> String {
    let (mantissa, exp) = match text.find('e') {
        Some(i) => (&text[..i], &text[i..]),
        None => (text, ""),
    };
    let trimmed = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    format!("{trimmed}{exp}")
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    event: String,
    order: String,
    axes: Vec<AxisDoc>,
    chains: Vec<Vec<Vec<usize>>>,
    cells: Vec<CellDoc>,
}

#[derive(Serialize, Deserialize)]
struct AxisDoc {
    label: String,
    max: usize,
}

#[derive(Serialize, Deserialize)]
struct CellDoc {
    levels: Vec<usize>,
    favourable: String,
    total: String,
    probability: f64,
}
