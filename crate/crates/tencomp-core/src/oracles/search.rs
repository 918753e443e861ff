//! Multi-start subgradient searches behind the falsifiers.
//!
//! Each falsifier minimizes a max-of-terms objective — componentwise
//! products for the P family, field components for the semi-positive
//! family, the homogeneous form for copositivity — over either the unit
//! sphere or the faces of the unit simplex. Homogeneity makes the sign of
//! every objective scale-invariant, so those compact domains decide the
//! orthant/whole-space questions.
//!
//! Starts are deterministic: structured points first (coordinate vectors,
//! signed pairs, face centers), then seeded draws. The best point is kept by
//! strict improvement, so scans are reproducible.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // f64 math via the trait under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{norm_2, project_simplex};
use crate::tensor::{Support, Tensor};

use super::OracleOptions;

/// Result of one multi-start minimization. `point` lives in the full
/// ambient dimension even when the search ran on a face.
#[derive(Debug, Clone)]
pub(super) struct SearchOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub starts: usize,
    pub evaluations: usize,
    /// False when faces had to be sampled rather than enumerated.
    pub exhaustive_faces: bool,
    pub faces: usize,
}

/// Objectives over the unit sphere in the full space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum SphereObjective {
    /// `max_i x_i (A x^{m-1})_i` over every index.
    ProductsAll,
    /// Same max, restricted to indices with `|x_i|` above the activity
    /// threshold.
    ProductsActive,
}

/// Objectives over simplex faces (nonnegative orthant questions).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum FaceObjective {
    /// `max_k (A x^{m-1})_k` over active components `x_k > tau`.
    ComponentsActive,
    /// `max_k x_k (A x^{m-1})_k` over the face.
    Products,
    /// The form `A x^m`.
    Form,
}

struct Evaluation {
    value: f64,
    gradient: Vec<f64>,
}

fn eval_sphere(tensor: &Tensor, objective: SphereObjective, tau: f64, x: &[f64]) -> Evaluation {
    let contracted = tensor.contract(x).expect("dimension checked by caller");
    let n = x.len();
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        if objective == SphereObjective::ProductsActive && x[i].abs() <= tau {
            continue;
        }
        let term = x[i] * contracted[i];
        if best.is_none_or(|(_, b)| term > b) {
            best = Some((i, term));
        }
    }
    let Some((active, value)) = best else {
        return Evaluation {
            value: f64::INFINITY,
            gradient: vec![0.0; n],
        };
    };
    // d/dx [ x_k (A x^{m-1})_k ] = e_k (A x^{m-1})_k + x_k J_k.
    let jacobian = tensor.contract_jacobian(x).expect("dimension checked");
    let mut gradient = vec![0.0; n];
    for (j, slot) in gradient.iter_mut().enumerate() {
        *slot = x[active] * jacobian[active * n + j];
    }
    gradient[active] += contracted[active];
    Evaluation { value, gradient }
}

fn eval_face(sub: &Tensor, objective: FaceObjective, tau: f64, u: &[f64]) -> Evaluation {
    let r = u.len();
    match objective {
        FaceObjective::Form => {
            let value = sub.polyval(u).expect("dimension checked");
            let gradient = sub.polyval_gradient(u).expect("dimension checked");
            Evaluation { value, gradient }
        }
        FaceObjective::ComponentsActive => {
            let contracted = sub.contract(u).expect("dimension checked");
            let mut best: Option<(usize, f64)> = None;
            for k in 0..r {
                if u[k] > tau && best.is_none_or(|(_, b)| contracted[k] > b) {
                    best = Some((k, contracted[k]));
                }
            }
            let Some((active, value)) = best else {
                return Evaluation {
                    value: f64::INFINITY,
                    gradient: vec![0.0; r],
                };
            };
            let jacobian = sub.contract_jacobian(u).expect("dimension checked");
            Evaluation {
                value,
                gradient: jacobian[active * r..(active + 1) * r].to_vec(),
            }
        }
        FaceObjective::Products => {
            let contracted = sub.contract(u).expect("dimension checked");
            let (active, value) = (0..r).map(|k| (k, u[k] * contracted[k])).fold(
                (0, f64::NEG_INFINITY),
                |best, cand| if cand.1 > best.1 { cand } else { best },
            );
            let jacobian = sub.contract_jacobian(u).expect("dimension checked");
            let mut gradient = vec![0.0; r];
            for (j, slot) in gradient.iter_mut().enumerate() {
                *slot = u[active] * jacobian[active * r + j];
            }
            gradient[active] += contracted[active];
            Evaluation { value, gradient }
        }
    }
}

/// Projected subgradient descent from one start; returns the best visited
/// point and value.
fn descend<E, P>(
    start: Vec<f64>,
    evaluate: &E,
    project: &P,
    iters: usize,
    evaluations: &mut usize,
) -> (Vec<f64>, f64)
where
    E: Fn(&[f64]) -> Evaluation,
    P: Fn(&[f64]) -> Vec<f64>,
{
    let mut current = project(&start);
    let mut best_point = current.clone();
    let mut best_value = f64::INFINITY;
    for step_index in 0..iters {
        let eval = evaluate(&current);
        *evaluations += 1;
        if eval.value < best_value {
            best_value = eval.value;
            best_point = current.clone();
        }
        let scale = norm_2(&eval.gradient);
        if !scale.is_finite() || scale == 0.0 {
            break;
        }
        let step = 0.5 / (1.0 + 0.15 * step_index as f64);
        let shifted: Vec<f64> = current
            .iter()
            .zip(&eval.gradient)
            .map(|(xi, gi)| xi - step * gi / scale)
            .collect();
        current = project(&shifted);
    }
    let eval = evaluate(&current);
    *evaluations += 1;
    if eval.value < best_value {
        best_value = eval.value;
        best_point = current;
    }
    (best_point, best_value)
}

fn normalize_sphere(x: &[f64]) -> Vec<f64> {
    let norm = norm_2(x);
    if norm == 0.0 || !norm.is_finite() {
        let mut unit = vec![0.0; x.len()];
        unit[0] = 1.0;
        return unit;
    }
    x.iter().map(|&v| v / norm).collect()
}

/// Structured sphere starts: coordinate vectors and signed pairs; the pair
/// `(e_i - e_j)/sqrt(2)` is the canonical P-breaker for row-constant
/// tensors.
fn sphere_starts(n: usize, budget: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut x = vec![0.0; n];
            x[i] = sign;
            starts.push(x);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for sign in [1.0, -1.0] {
                let mut x = vec![0.0; n];
                x[i] = core::f64::consts::FRAC_1_SQRT_2;
                x[j] = sign * core::f64::consts::FRAC_1_SQRT_2;
                starts.push(x);
            }
        }
    }
    while starts.len() < budget {
        let x: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        starts.push(normalize_sphere(&x));
    }
    starts
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

pub(super) fn sphere_search(
    tensor: &Tensor,
    objective: SphereObjective,
    opts: &OracleOptions,
    early_stop: f64,
) -> SearchOutcome {
    let n = tensor.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts = sphere_starts(n, opts.starts, &mut rng);
    let evaluate = |x: &[f64]| {
        let snapped = snap_small(x, opts.tau);
        eval_sphere(tensor, objective, opts.tau, &snapped)
    };
    let project = |x: &[f64]| normalize_sphere(x);
    let mut evaluations = 0usize;
    let mut best_point = vec![0.0; n];
    let mut best_value = f64::INFINITY;
    let total = starts.len();
    for start in starts {
        let (point, value) = descend(
            start,
            &evaluate,
            &project,
            opts.search_iters,
            &mut evaluations,
        );
        if value < best_value {
            best_value = value;
            best_point = point;
        }
        if best_value < early_stop {
            break;
        }
    }
    best_point = snap_small(&best_point, opts.tau);
    SearchOutcome {
        point: best_point,
        value: best_value,
        starts: total,
        evaluations,
        exhaustive_faces: true,
        faces: 0,
    }
}

/// Components at or below the activity threshold are snapped to exact zero
/// so emitted witnesses have unambiguous supports.
fn snap_small(x: &[f64], tau: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| if v.abs() <= tau { 0.0 } else { v })
        .collect()
}

fn face_masks(n: usize, cap: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    if n <= cap {
        return ((1..(1usize << n)).collect(), true);
    }
    // Sampled faces: singletons, pairs, the widest addressable face, then
    // random masks. Bitmask addressing covers the first usize::BITS
    // indices.
    let width = n.min(usize::BITS as usize - 1);
    let mut masks: BTreeSet<usize> = BTreeSet::new();
    for i in 0..width {
        masks.insert(1usize << i);
        for j in i + 1..width {
            masks.insert(1usize << i | 1usize << j);
        }
    }
    masks.insert((1usize << width) - 1);
    let budget = 4 * n * n;
    let mut guard = 0;
    while masks.len() < budget && guard < 16 * budget {
        guard += 1;
        let mut mask = 0usize;
        for i in 0..width {
            if rng.gen::<bool>() {
                mask |= 1usize << i;
            }
        }
        if mask != 0 {
            masks.insert(mask);
        }
    }
    (masks.into_iter().collect(), false)
}

fn face_starts(r: usize, budget: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    starts.push(vec![1.0 / r as f64; r]);
    for k in 0..r {
        if starts.len() >= budget.max(1) {
            break;
        }
        let mut vertex = vec![0.0; r];
        vertex[k] = 1.0;
        starts.push(vertex);
    }
    while starts.len() < budget {
        let draws: Vec<f64> = (0..r).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = draws.iter().sum();
        starts.push(draws.iter().map(|d| d / total).collect());
    }
    starts
}

pub(super) fn face_search(
    tensor: &Tensor,
    objective: FaceObjective,
    opts: &OracleOptions,
    early_stop: f64,
) -> SearchOutcome {
    let n = tensor.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (masks, exhaustive_faces) = face_masks(n, opts.face_cap, &mut rng);
    let mut evaluations = 0usize;
    let mut starts_total = 0usize;
    let mut best_point = vec![0.0; n];
    let mut best_value = f64::INFINITY;
    let faces = masks.len();
    'faces: for mask in masks {
        let support = Support::from_bitmask(mask, n).expect("mask nonzero and in range");
        let sub = tensor.principal_subtensor(&support).expect("support valid");
        let evaluate = |u: &[f64]| {
            let snapped = snap_small(u, opts.tau);
            eval_face(&sub, objective, opts.tau, &snapped)
        };
        let project = |u: &[f64]| project_simplex(u);
        let r = support.len();
        // A singleton face is a single point: one evaluation suffices.
        let (budget, iters) = if r == 1 {
            (1, 0)
        } else {
            (opts.starts, opts.search_iters)
        };
        let local_starts = face_starts(r, budget, &mut rng);
        starts_total += local_starts.len();
        for start in local_starts {
            let (point, value) = descend(start, &evaluate, &project, iters, &mut evaluations);
            if value < best_value {
                best_value = value;
                best_point = support.scatter(&snap_small(&point, opts.tau));
            }
            if best_value < early_stop {
                break 'faces;
            }
        }
    }
    SearchOutcome {
        point: best_point,
        value: best_value,
        starts: starts_total,
        evaluations,
        exhaustive_faces,
        faces,
    }
}
