//! Scalable heuristic route: embed the problem in a variational inequality
//! on the unit simplex in `R^{n+1}` over the field
//! `F(x, s) = (A x^{m-1} + s q + s e; s)`, find a stationary point by a
//! projected fixed-point iteration with an extrapolation step and adaptive
//! step length, then rescale `z = x / s^{1/(m-1)}` back to a candidate
//! solution and verify it.
//!
//! A stationary point with `s` at zero signals that no rescaling exists;
//! that outcome is surfaced as [`ViOutcome::RConditionSuspect`] instead of
//! being retried into a fake answer. The field need not be monotone, so the
//! iteration is explicitly heuristic: when every start stalls the best
//! residual is reported, never masked.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // f64 math via the trait under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{norm_inf, project_simplex, sub};
use crate::tensor::Support;

use super::{
    newton, verify_candidate, EngineError, SolveOptions, TcpInstance, TcpSolution, VerifyOutcome,
};

/// A point of the augmented simplex problem: `y = (x, s)` on the unit
/// simplex, the common minimal field value `omega`, and the stationarity
/// residual (how far positive coordinates sit above `omega`).
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexViState {
    pub y: Vec<f64>,
    pub omega: f64,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViDiagnostics {
    pub start_index: usize,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub s_value: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViOutcome {
    /// A stationary point rescaled and verified as a solution.
    Solved {
        solution: TcpSolution,
        diagnostics: ViDiagnostics,
    },
    /// Converged, but the augmenting variable `s` sits at zero, so no
    /// rescaling to a solution exists from this point.
    RConditionSuspect {
        state: SimplexViState,
        diagnostics: ViDiagnostics,
    },
    /// Every start stalled above the acceptance threshold.
    Failed { best_residual: f64, starts: usize },
}

impl ViOutcome {
    pub fn solution(&self) -> Option<&TcpSolution> {
        match self {
            ViOutcome::Solved { solution, .. } => Some(solution),
            _ => None,
        }
    }
}

fn field(inst: &TcpInstance, y: &[f64]) -> Result<Vec<f64>, EngineError> {
    let n = inst.dim();
    let (x, s) = (&y[..n], y[n]);
    let contracted = inst.tensor().contract(x)?;
    let mut out = Vec::with_capacity(n + 1);
    for (i, value) in contracted.into_iter().enumerate() {
        out.push(value + s * inst.q()[i] + s);
    }
    out.push(s);
    Ok(out)
}

fn stationarity(field_values: &[f64], y: &[f64]) -> (f64, f64) {
    let omega = field_values
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v));
    let mut residual = 0.0f64;
    for (&fv, &yv) in field_values.iter().zip(y) {
        if yv > 0.0 {
            residual = residual.max(fv - omega);
        }
    }
    (omega, residual)
}

fn natural_residual(inst: &TcpInstance, y: &[f64]) -> Result<f64, EngineError> {
    let f = field(inst, y)?;
    let shifted: Vec<f64> = y.iter().zip(&f).map(|(yi, fi)| yi - fi).collect();
    let projected = project_simplex(&shifted);
    Ok(norm_inf(&sub(y, &projected)))
}

pub(super) fn solve(inst: &TcpInstance, opts: &SolveOptions) -> Result<ViOutcome, EngineError> {
    let n = inst.dim();
    let m = inst.order();
    // q >= 0: the zero vector solves outright (w = q).
    if inst.q().iter().all(|&qi| qi >= 0.0) {
        let zero = vec![0.0; n];
        if let VerifyOutcome::Valid(solution) =
            verify_candidate(inst, &zero, opts.tol_w, opts.tol_x, opts.pos_tol)?
        {
            let diagnostics = ViDiagnostics {
                start_index: 0,
                iterations: 0,
                kkt_residual: 0.0,
                s_value: 1.0,
                omega: 1.0,
            };
            return Ok(ViOutcome::Solved {
                solution,
                diagnostics,
            });
        }
    }
    let merit_floor = opts.vi_tol * 1e-2;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_residual = f64::INFINITY;
    let mut suspect: Option<(SimplexViState, ViDiagnostics)> = None;
    for start_index in 0..opts.vi_starts {
        let mut y = if start_index == 0 {
            vec![1.0 / (n + 1) as f64; n + 1]
        } else {
            let draws: Vec<f64> = (0..n + 1).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = draws.iter().sum();
            draws.iter().map(|d| d / total).collect()
        };
        let mut gamma = 1.0f64;
        let mut merit = natural_residual(inst, &y)?;
        let mut iterations = 0usize;
        let mut resets = 0usize;
        while iterations < opts.vi_max_iter {
            iterations += 1;
            let f = field(inst, &y)?;
            let predictor_arg: Vec<f64> =
                y.iter().zip(&f).map(|(yi, fi)| yi - gamma * fi).collect();
            let predictor = project_simplex(&predictor_arg);
            let f_pred = field(inst, &predictor)?;
            let corrector_arg: Vec<f64> = y
                .iter()
                .zip(&f_pred)
                .map(|(yi, fi)| yi - gamma * fi)
                .collect();
            let candidate = project_simplex(&corrector_arg);
            let candidate_merit = natural_residual(inst, &candidate)?;
            if candidate_merit <= merit * (1.0 - 1e-4) || candidate_merit < merit_floor {
                y = candidate;
                merit = candidate_merit;
                gamma = (gamma * 1.05).min(10.0);
            } else {
                gamma *= 0.5;
                if gamma < 1e-13 {
                    // Step underflow at a nonsmooth kink; restart the step
                    // size a couple of times before giving the start up.
                    resets += 1;
                    if resets > 2 {
                        break;
                    }
                    gamma = 1.0;
                }
            }
            if merit < merit_floor {
                break;
            }
        }
        let f = field(inst, &y)?;
        let (omega, kkt_residual) = stationarity(&f, &y);
        best_residual = best_residual.min(kkt_residual);
        let s = y[n];
        let diagnostics = ViDiagnostics {
            start_index,
            iterations,
            kkt_residual,
            s_value: s,
            omega,
        };
        if s > opts.s_min {
            // Rescale and let the support Newton finish the job; even a
            // moderately converged point usually sits in the right basin.
            // The candidate only counts if full verification passes.
            let scale = s.powf(1.0 / (m as f64 - 1.0));
            let z: Vec<f64> = y[..n].iter().map(|&xi| xi / scale).collect();
            if let Some(solution) = polish_and_verify(inst, &z, opts)? {
                return Ok(ViOutcome::Solved {
                    solution,
                    diagnostics,
                });
            }
            if kkt_residual < opts.vi_tol {
                if let VerifyOutcome::Valid(solution) =
                    verify_candidate(inst, &z, opts.tol_w, opts.tol_x, opts.pos_tol)?
                {
                    return Ok(ViOutcome::Solved {
                        solution,
                        diagnostics,
                    });
                }
            }
        } else if kkt_residual < opts.vi_tol {
            // Converged, but the augmenting variable vanished: no
            // rescaling exists from this stationary point.
            let state = SimplexViState {
                y: y.clone(),
                omega,
                kkt_residual,
            };
            let keep = match &suspect {
                Some((_, held)) => kkt_residual < held.kkt_residual,
                None => true,
            };
            if keep {
                suspect = Some((state, diagnostics));
            }
        }
    }
    if let Some((state, diagnostics)) = suspect {
        return Ok(ViOutcome::RConditionSuspect { state, diagnostics });
    }
    Ok(ViOutcome::Failed {
        best_residual,
        starts: opts.vi_starts,
    })
}

/// Sharpens a rescaled candidate by Newton steps on its apparent support
/// before verification. The support is read off `z` at a ladder of
/// thresholds, coarsest structure last, since the VI point is only accurate
/// to its stall level.
fn polish_and_verify(
    inst: &TcpInstance,
    z: &[f64],
    opts: &SolveOptions,
) -> Result<Option<TcpSolution>, EngineError> {
    let scale = 1.0 + norm_inf(z);
    let mut tried: Option<Vec<usize>> = None;
    for relative in [1e-6, 1e-4, 1e-2] {
        let threshold = relative * scale;
        let indices: Vec<usize> = (0..z.len()).filter(|&i| z[i] > threshold).collect();
        if indices.is_empty() || tried.as_ref() == Some(&indices) {
            continue;
        }
        tried = Some(indices.clone());
        let support = Support::new(indices, z.len()).expect("indices increasing and in range");
        let sub_tensor = inst.tensor().principal_subtensor(&support)?;
        let q_local = support.gather(inst.q());
        let polished = newton::polish(&sub_tensor, &q_local, support.gather(z), 24);
        if !polished.iter().all(|&u| u > opts.pos_tol) {
            continue;
        }
        let x = support.scatter(&polished);
        if let VerifyOutcome::Valid(solution) =
            verify_candidate(inst, &x, opts.tol_w, opts.tol_x, opts.pos_tol)?
        {
            return Ok(Some(solution));
        }
    }
    Ok(None)
}
