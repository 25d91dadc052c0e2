//! Exact combinatorial counts used by signature tables and kernels.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut result = BigUint::one();
    for i in 0..k {
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

/// Exact multinomial coefficient n! / (parts[0]! · parts[1]! · ...).
///
/// The parts must sum to `n`.
pub fn multinomial(n: usize, parts: &[usize]) -> BigUint {
    debug_assert_eq!(parts.iter().sum::<usize>(), n);
    let mut result = BigUint::one();
    let mut remaining = n;
    for &p in parts {
        result *= binomial(remaining, p);
        remaining -= p;
    }
    result
}

/// `multinomial` as an f64; exact whenever the count fits 53 bits.
pub fn multinomial_f64(n: usize, parts: &[usize]) -> f64 {
    multinomial(n, parts).to_f64().unwrap_or(f64::INFINITY)
}

/// Calls `f` with every k-element combination (as a sub-slice of indices
/// into `items`) of the given items, in lexicographic order.
pub fn for_each_combination<T: Copy>(items: &[T], k: usize, f: &mut impl FnMut(&[T])) {
    let mut chosen = Vec::with_capacity(k);
    combo_rec(items, k, 0, &mut chosen, f);
}

fn combo_rec<T: Copy>(
    items: &[T],
    k: usize,
    start: usize,
    chosen: &mut Vec<T>,
    f: &mut impl FnMut(&[T]),
) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    let needed = k - chosen.len();
    for i in start..=items.len().saturating_sub(needed) {
        chosen.push(items[i]);
        combo_rec(items, k, i + 1, chosen, f);
        chosen.pop();
    }
}
