//! Multi-index bookkeeping for dimensions n ≤ 3.
//!
//! A multi-index is stored as `[usize; 3]`; components at positions ≥ n are
//! kept at zero. All enumerations are ordered by total order, then
//! lexicographically, so component layouts are reproducible.

pub type MultiIndex = [usize; 3];

pub const ZERO: MultiIndex = [0, 0, 0];

/// Total order |α|.
pub fn order(alpha: MultiIndex) -> usize {
    alpha[0] + alpha[1] + alpha[2]
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// α! = α₁!α₂!α₃!
pub fn mi_factorial(alpha: MultiIndex) -> f64 {
    factorial(alpha[0]) * factorial(alpha[1]) * factorial(alpha[2])
}

pub fn add(a: MultiIndex, b: MultiIndex) -> MultiIndex {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Component-wise difference, or `None` if any component of `b` exceeds `a`.
pub fn checked_sub(a: MultiIndex, b: MultiIndex) -> Option<MultiIndex> {
    if a[0] >= b[0] && a[1] >= b[1] && a[2] >= b[2] {
        Some([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    } else {
        None
    }
}

pub fn unit(j: usize) -> MultiIndex {
    let mut e = ZERO;
    e[j] = 1;
    e
}

/// Monomial power xᵅ over the first n coordinates of x.
pub fn monomial(x: &[f64], alpha: MultiIndex) -> f64 {
    let mut v = 1.0;
    for (j, &xj) in x.iter().enumerate() {
        for _ in 0..alpha[j] {
            v *= xj;
        }
    }
    v
}

/// All multi-indices in n variables with |α| ≤ max_order.
pub fn enumerate(n: usize, max_order: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for k in 0..=max_order {
        out.extend(enumerate_exact(n, k));
    }
    out
}

/// All multi-indices in n variables with |α| = k, lexicographically ordered.
pub fn enumerate_exact(n: usize, k: usize) -> Vec<MultiIndex> {
    assert!(n >= 1 && n <= 3, "dimension out of range");
    let mut out = Vec::new();
    match n {
        1 => out.push([k, 0, 0]),
        2 => {
            for a0 in (0..=k).rev() {
                out.push([a0, k - a0, 0]);
            }
        }
        _ => {
            for a0 in (0..=k).rev() {
                for a1 in (0..=(k - a0)).rev() {
                    out.push([a0, a1, k - a0 - a1]);
                }
            }
        }
    }
    // lexicographic within fixed total order
    out.sort();
    out
}

/// Position of α within `enumerate(n, max_order)`.
pub fn position(list: &[MultiIndex], alpha: MultiIndex) -> Option<usize> {
    list.iter().position(|&a| a == alpha)
}
