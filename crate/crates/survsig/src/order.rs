//! Qualitative orderings of the systems' observation times.
//!
//! The ordering of (t_1, t_2) or (t_1, t_2, t_3) determines which level
//! vectors are feasible and how shared-group subset chains nest. Ties
//! merge ranks: systems observed at the same time see the same survivor
//! set.

use std::fmt;

use crate::error::{Error, Result};

/// Ordering of two observation times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairOrder {
    /// t_1 < t_2
    Earlier,
    /// t_1 = t_2
    Same,
    /// t_1 > t_2
    Later,
}

impl PairOrder {
    pub const ALL: [PairOrder; 3] = [PairOrder::Earlier, PairOrder::Same, PairOrder::Later];

    pub fn from_times(t1: f64, t2: f64) -> PairOrder {
        if t1 < t2 {
            PairOrder::Earlier
        } else if t1 > t2 {
            PairOrder::Later
        } else {
            PairOrder::Same
        }
    }

    pub fn parse(s: &str) -> Result<PairOrder> {
        match s {
            "earlier" => Ok(PairOrder::Earlier),
            "same" => Ok(PairOrder::Same),
            "later" => Ok(PairOrder::Later),
            other => Err(Error::InvalidOrder(other.into())),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PairOrder::Earlier => "earlier",
            PairOrder::Same => "same",
            PairOrder::Later => "later",
        }
    }

    /// Dense time ranks of (t_1, t_2): 0 for the earliest time.
    pub fn ranks(&self) -> [u8; 2] {
        match self {
            PairOrder::Earlier => [0, 1],
            PairOrder::Same => [0, 0],
            PairOrder::Later => [1, 0],
        }
    }
}

impl fmt::Display for PairOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Weak ordering of three observation times, stored as dense ranks:
/// `ranks[i]` is the rank of t_{i+1}, 0 = earliest, and the used ranks
/// are exactly 0..r for some r. There are 13 such orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TripleOrder {
    ranks: [u8; 3],
}

impl TripleOrder {
    pub fn new(ranks: [u8; 3]) -> Result<TripleOrder> {
        let max = *ranks.iter().max().expect("nonempty");
        let dense = (0..=max).all(|r| ranks.contains(&r)) && max <= 2;
        if !dense {
            return Err(Error::InvalidOrder(format!("{ranks:?}")));
        }
        Ok(TripleOrder { ranks })
    }

    pub fn from_times(t1: f64, t2: f64, t3: f64) -> TripleOrder {
        let ts = [t1, t2, t3];
        let mut ranks = [0u8; 3];
        for i in 0..3 {
            // Rank = number of strictly earlier distinct times.
            let mut earlier: Vec<f64> = ts.iter().copied().filter(|t| *t < ts[i]).collect();
            earlier.sort_by(f64::total_cmp);
            earlier.dedup();
            ranks[i] = earlier.len() as u8;
        }
        TripleOrder { ranks }
    }

    /// Parses a rank string like `1<2=3` or `2=3<1`: the three system ids
    /// in time order, separated by `<` (strictly earlier) or `=` (tied).
    pub fn parse(s: &str) -> Result<TripleOrder> {
        let bad = || Error::InvalidOrder(s.into());
        let mut ranks = [u8::MAX; 3];
        let mut rank = 0u8;
        let mut chars = s.chars();
        let mut expect_id = true;
        loop {
            match chars.next() {
                Some(c) if expect_id => {
                    let sys = c.to_digit(10).ok_or_else(bad)? as usize;
                    if !(1..=3).contains(&sys) || ranks[sys - 1] != u8::MAX {
                        return Err(bad());
                    }
                    ranks[sys - 1] = rank;
                    expect_id = false;
                }
                Some('<') if !expect_id => {
                    rank += 1;
                    expect_id = true;
                }
                Some('=') if !expect_id => expect_id = true,
                None if !expect_id => break,
                _ => return Err(bad()),
            }
        }
        if ranks.contains(&u8::MAX) {
            return Err(bad());
        }
        TripleOrder::new(ranks)
    }

    /// All 13 weak orderings, sorted by label.
    pub fn all() -> Vec<TripleOrder> {
        let mut orders = Vec::new();
        for r1 in 0..3u8 {
            for r2 in 0..3u8 {
                for r3 in 0..3u8 {
                    if let Ok(o) = TripleOrder::new([r1, r2, r3]) {
                        orders.push(o);
                    }
                }
            }
        }
        orders.sort_by_key(|o| o.label());
        orders
    }

    pub fn rank(&self, system: usize) -> u8 {
        self.ranks[system]
    }

    pub fn ranks(&self) -> [u8; 3] {
        self.ranks
    }

    pub fn label(&self) -> String {
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by_key(|i| (self.ranks[*i], *i));
        let mut out = String::new();
        for (pos, i) in order.iter().enumerate() {
            if pos > 0 {
                let prev = order[pos - 1];
                out.push(if self.ranks[*i] == self.ranks[prev] { '=' } else { '<' });
            }
            out.push_str(&(i + 1).to_string());
        }
        out
    }
}

impl fmt::Display for TripleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Ordering metadata carried by a signature table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderLabel {
    /// Single-system table: one observation time, no coupling.
    None,
    Pair(PairOrder),
    Triple(TripleOrder),
    /// Union of the per-ordering tables (overlapping cells agree).
    Any,
}

impl OrderLabel {
    pub fn label(&self) -> String {
        match self {
            OrderLabel::None => "none".into(),
            OrderLabel::Pair(p) => p.label().into(),
            OrderLabel::Triple(t) => t.label(),
            OrderLabel::Any => "any".into(),
        }
    }

    pub fn parse(s: &str) -> Result<OrderLabel> {
        match s {
            "none" => Ok(OrderLabel::None),
            "any" => Ok(OrderLabel::Any),
            _ => PairOrder::parse(s)
                .map(OrderLabel::Pair)
                .or_else(|_| TripleOrder::parse(s).map(OrderLabel::Triple)),
        }
    }

    /// Dense per-system time ranks, when the label names one ordering.
    pub fn system_ranks(&self) -> Option<Vec<u8>> {
        match self {
            OrderLabel::None => Some(vec![0]),
            OrderLabel::Pair(p) => Some(p.ranks().to_vec()),
            OrderLabel::Triple(t) => Some(t.ranks().to_vec()),
            OrderLabel::Any => None,
        }
    }
}

impl fmt::Display for OrderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
