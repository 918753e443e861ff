//! Root finding for the restricted square system `g(u) = C u^{m-1} + q = 0`
//! over one support: sign pruning, closed forms for singleton supports and
//! order 2, and a damped multi-start Newton iteration for the rest. Starts
//! come from a Halton sequence scaled to the root radius, so runs are
//! deterministic without any seed.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // f64 math via the trait under no_std
use num_traits::Float;

use crate::linalg::{norm_inf, solve_dense};
use crate::tensor::Tensor;

use super::SolveOptions;

pub(super) struct RootSearch {
    pub roots: Vec<Vec<f64>>,
    pub complete: bool,
}

impl RootSearch {
    fn none() -> Self {
        RootSearch {
            roots: Vec::new(),
            complete: true,
        }
    }
}

/// All numerically distinct roots of `C u^{m-1} + q_local = 0` found in the
/// positive region. `q_full` only sets the start radius so that every
/// support of one instance searches the same scale.
pub(super) fn roots_on_support(
    sub: &Tensor,
    q_local: &[f64],
    q_full: &[f64],
    opts: &SolveOptions,
) -> RootSearch {
    if pruned_by_sign(sub, q_local) {
        return RootSearch::none();
    }
    let r = sub.dim();
    let m = sub.order();
    if r == 1 {
        return singleton_roots(sub, q_local[0], m);
    }
    if m == 2 {
        return linear_roots(sub, q_local);
    }
    newton_multistart(sub, q_local, q_full, opts)
}

/// A row whose coefficients all share one sign, with `q` on the same side,
/// keeps `g` bounded away from zero on `u > 0`: no roots, exactly.
fn pruned_by_sign(sub: &Tensor, q_local: &[f64]) -> bool {
    let r = sub.dim();
    let mut lo = vec![0.0f64; r];
    let mut hi = vec![0.0f64; r];
    for (tuple, value) in sub.entries() {
        let row = tuple[0] as usize;
        lo[row] = lo[row].min(value);
        hi[row] = hi[row].max(value);
    }
    for row in 0..r {
        let q = q_local[row];
        if lo[row] >= 0.0 && q >= 0.0 && (q > 0.0 || hi[row] > 0.0) {
            return true;
        }
        if hi[row] <= 0.0 && q <= 0.0 && (q < 0.0 || lo[row] < 0.0) {
            return true;
        }
    }
    false
}

/// `c u^{m-1} + q = 0` in one variable, solved in closed form.
fn singleton_roots(sub: &Tensor, q: f64, m: usize) -> RootSearch {
    let c = sub.value_at(&vec![0; m]);
    if c == 0.0 {
        if q == 0.0 {
            // Every u solves; return a representative but flag the
            // continuum as not enumerated.
            return RootSearch {
                roots: vec![vec![1.0]],
                complete: false,
            };
        }
        return RootSearch::none();
    }
    let target = -q / c;
    let degree = (m - 1) as f64;
    let root = if (m - 1) % 2 == 1 {
        // odd power: unique real root
        target.signum() * target.abs().powf(1.0 / degree)
    } else if target > 0.0 {
        target.powf(1.0 / degree)
    } else {
        return RootSearch::none();
    };
    RootSearch {
        roots: vec![vec![root]],
        complete: true,
    }
}

/// Order 2: the restricted system is linear and solved exactly.
fn linear_roots(sub: &Tensor, q_local: &[f64]) -> RootSearch {
    let r = sub.dim();
    let mut matrix = vec![0.0f64; r * r];
    for (tuple, value) in sub.entries() {
        matrix[tuple[0] as usize * r + tuple[1] as usize] += value;
    }
    let mut rhs: Vec<f64> = q_local.iter().map(|&q| -q).collect();
    match solve_dense(&mut matrix, &mut rhs) {
        Some(root) => RootSearch {
            roots: vec![root],
            complete: true,
        },
        None => {
            // Singular: a continuum or nothing. Keep the all-ones
            // representative when it happens to solve; either way the
            // root set cannot be certified.
            let ones = vec![1.0; r];
            let g = residual(sub, q_local, &ones);
            let scale = 1e-12 * (1.0 + norm_inf(q_local));
            if norm_inf(&g) <= scale {
                RootSearch {
                    roots: vec![ones],
                    complete: false,
                }
            } else {
                RootSearch {
                    roots: Vec::new(),
                    complete: false,
                }
            }
        }
    }
}

fn residual(sub: &Tensor, q_local: &[f64], u: &[f64]) -> Vec<f64> {
    let mut g = sub.contract(u).expect("support dimensions agree");
    for (gi, qi) in g.iter_mut().zip(q_local) {
        *gi += qi;
    }
    g
}

fn newton_multistart(
    sub: &Tensor,
    q_local: &[f64],
    q_full: &[f64],
    opts: &SolveOptions,
) -> RootSearch {
    let r = sub.dim();
    let m = sub.order();
    if sub.nnz() == 0 || sub.entries().all(|(_, v)| v == 0.0) {
        // Constant g: either no roots or a continuum.
        return if norm_inf(q_local) == 0.0 {
            RootSearch {
                roots: vec![vec![1.0; r]],
                complete: false,
            }
        } else {
            RootSearch::none()
        };
    }
    // Roots of the homogeneous-plus-constant system scale like
    // |q|^(1/(m-1)); search the box [0, radius]^r.
    let radius = 1.0 + norm_inf(q_full).max(1.0).powf(1.0 / (m as f64 - 1.0));
    let escape = 1e8 * (1.0 + radius);
    let converge_tol = 1e-11 * (1.0 + norm_inf(q_local));
    let starts = opts.starts_per_var * r;
    let mut roots: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut complete = true;
    for start in 0..starts {
        let mut u: Vec<f64> = (0..r)
            .map(|axis| radius * halton(start as u64 + 1, PRIMES[axis % PRIMES.len()]))
            .collect();
        let mut diverged = false;
        for _ in 0..opts.newton_max_iter {
            let g = residual(sub, q_local, &u);
            if !g.iter().all(|v| v.is_finite()) {
                diverged = true;
                break;
            }
            let g_norm = norm_inf(&g);
            if g_norm <= converge_tol {
                break;
            }
            let mut lhs = sub
                .contract_jacobian(&u)
                .expect("dimension fixed per support");
            let mut rhs: Vec<f64> = g.iter().map(|&v| -v).collect();
            let Some(step) = solve_dense(&mut lhs, &mut rhs) else {
                break; // stalled at a singular Jacobian; not a divergence
            };
            let mut damping = 1.0;
            let mut improved = false;
            for _ in 0..12 {
                let trial: Vec<f64> = u
                    .iter()
                    .zip(&step)
                    .map(|(ui, di)| ui + damping * di)
                    .collect();
                let g_trial = residual(sub, q_local, &trial);
                if g_trial.iter().all(|v| v.is_finite()) && norm_inf(&g_trial) < g_norm {
                    u = trial;
                    improved = true;
                    break;
                }
                damping *= 0.5;
            }
            if !improved {
                break; // line search exhausted; local minimum of |g|
            }
            if norm_inf(&u) > escape {
                diverged = true;
                break;
            }
        }
        if diverged {
            complete = false;
            continue;
        }
        let g = residual(sub, q_local, &u);
        if norm_inf(&g) <= converge_tol {
            // Sharpen to the limit: regular roots reach machine precision
            // in a few quadratic steps, while iterates caught in the basin
            // of the zero root of the homogeneous part keep halving until
            // they drop below the support-positivity filter.
            let u = polish(sub, q_local, u, 64);
            let g_norm = norm_inf(&residual(sub, q_local, &u));
            if g_norm <= converge_tol {
                record_root(&mut roots, u, g_norm, opts.dedup_tol);
            }
        }
    }
    RootSearch {
        roots: roots.into_iter().map(|(u, _)| u).collect(),
        complete,
    }
}

/// Full-step Newton refinement of a near-root; stops as soon as a step
/// stops improving.
pub(super) fn polish(sub: &Tensor, q_local: &[f64], start: Vec<f64>, iters: usize) -> Vec<f64> {
    let mut u = start;
    for _ in 0..iters {
        let g = residual(sub, q_local, &u);
        if !g.iter().all(|v| v.is_finite()) {
            break;
        }
        let g_norm = norm_inf(&g);
        let mut lhs = sub
            .contract_jacobian(&u)
            .expect("dimension fixed per support");
        let mut rhs: Vec<f64> = g.iter().map(|&v| -v).collect();
        let Some(step) = solve_dense(&mut lhs, &mut rhs) else {
            break;
        };
        let trial: Vec<f64> = u.iter().zip(&step).map(|(ui, di)| ui + di).collect();
        let g_trial = residual(sub, q_local, &trial);
        if g_trial.iter().all(|v| v.is_finite()) && norm_inf(&g_trial) < g_norm {
            u = trial;
        } else {
            break;
        }
    }
    u
}

fn record_root(roots: &mut Vec<(Vec<f64>, f64)>, u: Vec<f64>, g_norm: f64, dedup_tol: f64) {
    for (existing, existing_norm) in roots.iter_mut() {
        let gap = existing
            .iter()
            .zip(&u)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if gap <= dedup_tol * (1.0 + norm_inf(&u)) {
            if g_norm < *existing_norm {
                *existing = u;
                *existing_norm = g_norm;
            }
            return;
        }
    }
    roots.push((u, g_norm));
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical-inverse Halton point `i >= 1` in base `b`, in `(0, 1)`.
fn halton(mut i: u64, base: u64) -> f64 {
    let mut fraction = 1.0;
    let mut value = 0.0;
    while i > 0 {
        fraction /= base as f64;
        value += fraction * (i % base) as f64;
        i /= base;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Support;

    fn ex22() -> Tensor {
        Tensor::from_entries(
            3,
            2,
            &[
                (vec![0, 0, 0], 1.0),
                (vec![0, 1, 1], -1.0),
                (vec![1, 0, 0], -2.0),
                (vec![1, 1, 1], 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn halton_is_low_discrepancy_prefix() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert_eq!(halton(1, 3), 1.0 / 3.0);
    }

    #[test]
    fn singleton_closed_forms() {
        let opts = SolveOptions::default();
        // u^2 = 1 on support {0} of the order-3 instance
        let sub = ex22()
            .principal_subtensor(&Support::new(vec![0], 2).unwrap())
            .unwrap();
        let found = roots_on_support(&sub, &[-1.0], &[-1.0, -1.0], &opts);
        assert!(found.complete);
        assert_eq!(found.roots, vec![vec![1.0]]);
        // u^2 = -1: no real root
        let found = roots_on_support(&sub, &[1.0], &[1.0, 1.0], &opts);
        assert!(found.complete);
        assert!(found.roots.is_empty());
    }

    #[test]
    fn pair_system_with_no_real_root_is_budget_complete() {
        // u1^2 - u2^2 - 1 = 0 and -2 u1^2 + u2^2 - 1 = 0 force u1^2 = -2.
        let opts = SolveOptions::default();
        let found = roots_on_support(&ex22(), &[-1.0, -1.0], &[-1.0, -1.0], &opts);
        assert!(found.roots.is_empty());
        assert!(found.complete);
    }

    #[test]
    fn pair_system_root_is_sharp() {
        // u1^2 - u2^2 + 1 = 0, -2 u1^2 + u2^2 + 1 = 0 => (sqrt2, sqrt3).
        let opts = SolveOptions::default();
        let found = roots_on_support(&ex22(), &[1.0, 1.0], &[1.0, 1.0], &opts);
        assert_eq!(found.roots.len(), 1);
        let u = &found.roots[0];
        assert!((u[0] - 2.0f64.sqrt()).abs() < 1e-10);
        assert!((u[1] - 3.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn sign_prune_fires_on_nonnegative_rows() {
        let allpos = Tensor::from_entries(
            3,
            2,
            &[
                (vec![0, 0, 0], 1.0),
                (vec![0, 1, 1], 2.0),
                (vec![1, 0, 0], 1.0),
                (vec![1, 1, 1], 1.0),
            ],
        )
        .unwrap();
        assert!(pruned_by_sign(&allpos, &[0.5, -1.0]));
        assert!(pruned_by_sign(&allpos, &[0.0, -1.0]));
        assert!(!pruned_by_sign(&ex22(), &[-1.0, -1.0]));
    }
}
