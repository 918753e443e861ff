//! Dense vector/matrix helpers shared by the solvers: dot products, norms,
//! a pivoted Gaussian solve for the Newton and LCP paths, and Euclidean
//! projection onto the unit simplex.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // f64 math via the trait under no_std
use num_traits::Float;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
}

pub fn norm_2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Solves the square system in-place (row-major `a`, length `n*n`) by
/// Gaussian elimination with partial pivoting. Returns `None` when a pivot
/// falls below `1e-14` times the row scale (singular to working precision).
pub fn solve_dense(a: &mut [f64], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let scale = norm_inf(a).max(1.0);
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (pivot_row, pivot_abs) =
            (col..n)
                .map(|r| (r, a[perm[r] * n + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cand| if cand.1 > best.1 { cand } else { best },
                );
        if pivot_abs <= 1e-14 * scale {
            return None;
        }
        perm.swap(col, pivot_row);
        let prow = perm[col];
        let pivot = a[prow * n + col];
        for &row in &perm[col + 1..n] {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for c in col + 1..n {
                a[row * n + c] -= factor * a[prow * n + c];
            }
            b[row] -= factor * b[prow];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let row = perm[col];
        let mut acc = b[row];
        for c in col + 1..n {
            acc -= a[row * n + c] * x[c];
        }
        x[col] = acc / a[row * n + col];
    }
    Some(x)
}

/// Euclidean projection onto the unit simplex `{ y >= 0, sum y = 1 }`.
/// Components clipped to zero are exactly zero.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    let mut rho = 0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
            rho = k + 1;
        }
    }
    debug_assert!(rho > 0, "projection of {n}-vector lost all mass");
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}
