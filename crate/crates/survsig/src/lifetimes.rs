//! Component lifetime distributions and count kernels: the probability
//! that the per-group survivor counts equal a given level vector at the
//! query times.
//!
//! Components of one type are iid; distinct types are independent. A
//! sharing group observed at times τ_1 ≤ … ≤ τ_m with survivor counts
//! a_1 ≥ … ≥ a_m bins its n members by failure interval, giving a
//! multinomial probability in the CDF increments.

use serde::{Deserialize, Serialize};

use crate::comb::multinomial_f64;
use crate::error::{Error, Result};
use crate::model::GroupCounts;

/// Failure-time distribution of one component type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LifetimeDistribution {
    Exponential {
        rate: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
    /// Breakpoints (t_j, F_j) with t strictly increasing and F
    /// nondecreasing in [0, 1]. Evaluated as a right-continuous step
    /// function, or piecewise linearly from the origin when
    /// `interpolate` is set. F may stay below 1; mass beyond the last
    /// breakpoint means the component may outlive every finite time.
    Empirical {
        points: Vec<(f64, f64)>,
        #[serde(default)]
        interpolate: bool,
    },
}

impl LifetimeDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        let dist = LifetimeDistribution::Exponential { rate };
        dist.validate()?;
        Ok(dist)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        let dist = LifetimeDistribution::Weibull { shape, scale };
        dist.validate()?;
        Ok(dist)
    }

    pub fn empirical(points: Vec<(f64, f64)>, interpolate: bool) -> Result<Self> {
        let dist = LifetimeDistribution::Empirical {
            points,
            interpolate,
        };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        match self {
            LifetimeDistribution::Exponential { rate } => {
                if !rate.is_finite() || *rate <= 0.0 {
                    return bad(format!("exponential rate must be finite and positive, got {rate}"));
                }
            }
            LifetimeDistribution::Weibull { shape, scale } => {
                if !shape.is_finite() || *shape <= 0.0 {
                    return bad(format!("weibull shape must be finite and positive, got {shape}"));
                }
                if !scale.is_finite() || *scale <= 0.0 {
                    return bad(format!("weibull scale must be finite and positive, got {scale}"));
                }
            }
            LifetimeDistribution::Empirical { points, .. } => {
                if points.is_empty() {
                    return bad("empirical distribution needs at least one breakpoint".into());
                }
                let mut prev: Option<(f64, f64)> = None;
                for &(t, f) in points {
                    if !t.is_finite() || t < 0.0 {
                        return bad(format!("empirical breakpoint time {t} is not a nonnegative real"));
                    }
                    if !f.is_finite() || !(0.0..=1.0).contains(&f) {
                        return bad(format!("empirical CDF value {f} is outside [0, 1]"));
                    }
                    if let Some((pt, pf)) = prev {
                        if t <= pt {
                            return bad(format!(
                                "empirical breakpoint times must be strictly increasing, got {t} after {pt}"
                            ));
                        }
                        if f < pf {
                            return bad(format!(
                                "empirical CDF values must be nondecreasing, got {f} after {pf}"
                            ));
                        }
                    }
                    prev = Some((t, f));
                }
            }
        }
        Ok(())
    }

    /// F(t), the probability a component fails at or before `t`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(match self {
            LifetimeDistribution::Exponential { rate } => -(-rate * t).exp_m1(),
            LifetimeDistribution::Weibull { shape, scale } => -(-(t / scale).powf(*shape)).exp_m1(),
            LifetimeDistribution::Empirical {
                points,
                interpolate: false,
            } => {
                let below = points.partition_point(|&(tj, _)| tj <= t);
                if below == 0 {
                    0.0
                } else {
                    points[below - 1].1
                }
            }
            LifetimeDistribution::Empirical {
                points,
                interpolate: true,
            } => {
                let (mut t0, mut f0) = (0.0, 0.0);
                let mut value = None;
                for &(t1, f1) in points {
                    if t <= t1 {
                        // A zero-length first leg is a jump at the origin.
                        value = Some(if t1 == t0 {
                            f1
                        } else {
                            f0 + (f1 - f0) * (t - t0) / (t1 - t0)
                        });
                        break;
                    }
                    (t0, f0) = (t1, f1);
                }
                value.unwrap_or(f0)
            }
        })
    }

    /// Generalized inverse CDF: the smallest t with F(t) ≥ p, or
    /// infinity when F never reaches p. Defined for p in [0, 1].
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        match self {
            LifetimeDistribution::Exponential { rate } => {
                if p >= 1.0 {
                    f64::INFINITY
                } else {
                    -(-p).ln_1p() / rate
                }
            }
            LifetimeDistribution::Weibull { shape, scale } => {
                if p >= 1.0 {
                    f64::INFINITY
                } else {
                    scale * (-(-p).ln_1p()).powf(1.0 / shape)
                }
            }
            LifetimeDistribution::Empirical {
                points,
                interpolate: false,
            } => match points.iter().find(|&&(_, fj)| fj >= p) {
                Some(&(tj, _)) => tj,
                None => f64::INFINITY,
            },
            LifetimeDistribution::Empirical {
                points,
                interpolate: true,
            } => {
                let (mut t0, mut f0) = (0.0, 0.0);
                for &(t1, f1) in points {
                    if f1 >= p {
                        // p > f0 here, so the leg is not flat.
                        return if t1 == t0 {
                            t1
                        } else {
                            t0 + (t1 - t0) * (p - f0) / (f1 - f0)
                        };
                    }
                    (t0, f0) = (t1, f1);
                }
                f64::INFINITY
            }
        }
    }

    /// Probability that of `n` iid components exactly `count` survive
    /// past each stage time, stages in nondecreasing time order with
    /// nonincreasing counts. An empty stage list is the sure event.
    pub fn group_kernel(&self, n: usize, stages: &[(f64, usize)]) -> Result<f64> {
        let mut prev_t = 0.0;
        for &(t, _) in stages {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::NegativeTime(t));
            }
            if t < prev_t {
                return Err(Error::InvalidTimeOrder(format!(
                    "stage times must be nondecreasing, got {t} after {prev_t}"
                )));
            }
            prev_t = t;
        }
        let mut prev = n;
        for &(_, count) in stages {
            if count > prev {
                return Err(Error::InfeasibleLevels(format!(
                    "survivor counts must be nonincreasing, got {count} after {prev}"
                )));
            }
            prev = count;
        }
        if stages.is_empty() {
            return Ok(1.0);
        }
        // Bin the components by the stage interval in which they fail;
        // CDF increments are clamped against rounding-level negatives.
        let mut parts = Vec::with_capacity(stages.len() + 1);
        let mut prob = 1.0;
        let (mut prev_count, mut prev_f) = (n, 0.0);
        for &(t, count) in stages {
            let f = self.cdf(t)?;
            parts.push(prev_count - count);
            prob *= (f - prev_f).max(0.0).powi((prev_count - count) as i32);
            (prev_count, prev_f) = (count, f);
        }
        parts.push(prev_count);
        prob *= (1.0 - prev_f).max(0.0).powi(prev_count as i32);
        Ok(multinomial_f64(n, &parts) * prob)
    }
}

/// Sorts one group's per-system observations by time and merges ties,
/// which must agree on the survivor count.
pub(crate) fn merge_stages(observations: &[(f64, usize)]) -> Result<Vec<(f64, usize)>> {
    for &(t, _) in observations {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
    }
    let mut sorted = observations.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, usize)> = Vec::with_capacity(sorted.len());
    for (t, count) in sorted {
        match merged.last() {
            Some(&(pt, pc)) if pt == t => {
                if pc != count {
                    return Err(Error::InfeasibleLevels(format!(
                        "a group observed at equal times must have equal survivor counts, got {pc} and {count} at t = {t}"
                    )));
                }
            }
            _ => merged.push((t, count)),
        }
    }
    Ok(merged)
}

fn check_level(what: &str, level: usize, max: usize) -> Result<()> {
    if level > max {
        return Err(Error::LevelOutOfRange {
            what: what.to_string(),
            level,
            max,
        });
    }
    Ok(())
}

/// Probability that exactly `levels[k]` of `counts[k]` components of
/// type k function at time `t`, for every type.
pub fn count_kernel_single(
    dists: &[LifetimeDistribution],
    counts: &[usize],
    levels: &[usize],
    t: f64,
) -> Result<f64> {
    for len in [counts.len(), levels.len()] {
        if len != dists.len() {
            return Err(Error::WrongTypeCount {
                expected: dists.len(),
                found: len,
            });
        }
    }
    let mut prob = 1.0;
    for (k, dist) in dists.iter().enumerate() {
        check_level(&format!("type {k} level"), levels[k], counts[k])?;
        prob *= dist.group_kernel(counts[k], &[(t, levels[k])])?;
    }
    Ok(prob)
}

/// Probability that a two-system single-type model's survivor counts
/// equal (l_1, l_2, l_[1]2, l_1[2]) at times (t_1, t_2): own groups are
/// observed at their system's time, the shared group at both.
pub fn count_kernel_two(
    dist: &LifetimeDistribution,
    counts: (usize, usize, usize),
    levels: (usize, usize, usize, usize),
    t_1: f64,
    t_2: f64,
) -> Result<f64> {
    let (n_1, n_2, n_12) = counts;
    let (l_1, l_2, shared_1, shared_2) = levels;
    check_level("l_1", l_1, n_1)?;
    check_level("l_2", l_2, n_2)?;
    check_level("l_[1]2", shared_1, n_12)?;
    check_level("l_1[2]", shared_2, n_12)?;
    let shared = merge_stages(&[(t_1, shared_1), (t_2, shared_2)])?;
    Ok(dist.group_kernel(n_1, &[(t_1, l_1)])?
        * dist.group_kernel(n_2, &[(t_2, l_2)])?
        * dist.group_kernel(n_12, &shared)?)
}

/// Product over component types of the two-system kernel; distinct
/// types fail independently. `levels[k]` is type k's quadruple in the
/// same order as `count_kernel_two`.
pub fn count_kernel_two_multitype(
    dists: &[LifetimeDistribution],
    counts: &GroupCounts,
    levels: &[[usize; 4]],
    t_1: f64,
    t_2: f64,
) -> Result<f64> {
    if counts.system_count() != 2 {
        return Err(Error::WrongArity {
            expected: "2".into(),
            found: counts.system_count(),
        });
    }
    for len in [dists.len(), levels.len()] {
        if len != counts.types().len() {
            return Err(Error::WrongTypeCount {
                expected: counts.types().len(),
                found: len,
            });
        }
    }
    let mut prob = 1.0;
    for (k, dist) in dists.iter().enumerate() {
        let l = levels[k];
        prob *= count_kernel_two(
            dist,
            (counts.own(k, 0), counts.own(k, 1), counts.pair(k, 0, 1)),
            (l[0], l[1], l[2], l[3]),
            t_1,
            t_2,
        )?;
    }
    Ok(prob)
}

/// Probability of a canonical three-system level vector for one
/// component type. `counts` is (n_1, n_2, n_3, n_12, n_13, n_23, n_123)
/// and `levels` follows the joint-table axis order
/// (l_1, l_2, l_3, l_[1]2, l_1[2], l_[1]3, l_1[3], l_[2]3, l_2[3],
/// l_[1]23, l_1[2]3, l_12[3]).
pub fn count_kernel_three(
    dist: &LifetimeDistribution,
    counts: &[usize; 7],
    levels: &[usize; 12],
    t_1: f64,
    t_2: f64,
    t_3: f64,
) -> Result<f64> {
    let [n_1, n_2, n_3, n_12, n_13, n_23, n_123] = *counts;
    let names = [
        "l_1", "l_2", "l_3", "l_[1]2", "l_1[2]", "l_[1]3", "l_1[3]", "l_[2]3", "l_2[3]",
        "l_[1]23", "l_1[2]3", "l_12[3]",
    ];
    let maxes = [
        n_1, n_2, n_3, n_12, n_12, n_13, n_13, n_23, n_23, n_123, n_123, n_123,
    ];
    for i in 0..12 {
        check_level(names[i], levels[i], maxes[i])?;
    }
    let mut prob = dist.group_kernel(n_1, &[(t_1, levels[0])])?
        * dist.group_kernel(n_2, &[(t_2, levels[1])])?
        * dist.group_kernel(n_3, &[(t_3, levels[2])])?;
    prob *= dist.group_kernel(n_12, &merge_stages(&[(t_1, levels[3]), (t_2, levels[4])])?)?;
    prob *= dist.group_kernel(n_13, &merge_stages(&[(t_1, levels[5]), (t_3, levels[6])])?)?;
    prob *= dist.group_kernel(n_23, &merge_stages(&[(t_2, levels[7]), (t_3, levels[8])])?)?;
    prob *= dist.group_kernel(
        n_123,
        &merge_stages(&[(t_1, levels[9]), (t_2, levels[10]), (t_3, levels[11])])?,
    )?;
    Ok(prob)
}
