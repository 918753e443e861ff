//! Solvers for the complementarity problem `(q, A)`: find `x >= 0` with
//! `w = q + A x^{m-1} >= 0` and `x' w = 0`.
//!
//! Two routes are provided. [`solve_enumerate`] decomposes the problem over
//! all nonzero complementary supports and solves each restricted square
//! polynomial system (exact for order 2 and singleton supports, multi-start
//! Newton otherwise); it is the desk-scale route the membership oracles rely
//! on, and it carries an explicit completeness flag. [`solve_vi`] runs a
//! projected fixed-point iteration on an augmented simplex variational
//! inequality; it scales past the enumeration cap but is heuristic, and
//! failure is reported rather than masked.

mod newton;
mod vi;

pub use vi::{SimplexViState, ViDiagnostics, ViOutcome};

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{dot, norm_2, norm_inf};
use crate::tensor::{Support, Tensor, TensorError};

/// Options shared by the solvers. Defaults match the documented tolerances.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Absolute tolerance on `w`-nonnegativity and complementarity.
    pub tol_w: f64,
    /// Tolerance on `x`-nonnegativity; tinier negatives are clamped to zero.
    pub tol_x: f64,
    /// Support positivity threshold: a root counts for support `J` only if
    /// every `J`-component exceeds this.
    pub pos_tol: f64,
    /// Solutions closer than `dedup_tol * (1 + |x|_inf)` in sup norm are one.
    pub dedup_tol: f64,
    /// `solve_enumerate` refuses instances with more than this many
    /// variables.
    pub enumeration_cap: usize,
    /// Newton iteration budget per start.
    pub newton_max_iter: usize,
    /// Newton starts per support variable (low-discrepancy sequence).
    pub starts_per_var: usize,
    /// Positivity floor for the augmented simplex variable `s`.
    pub s_min: f64,
    /// Acceptance threshold on the simplex-VI stationarity residual.
    pub vi_tol: f64,
    /// Iteration budget per VI start.
    pub vi_max_iter: usize,
    /// Number of VI starts (first is the barycenter, rest seeded random).
    pub vi_starts: usize,
    /// Seed for every randomized search in the engine.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_w: 1e-9,
            tol_x: 1e-12,
            pos_tol: 1e-9,
            dedup_tol: 1e-6,
            enumeration_cap: 16,
            newton_max_iter: 64,
            starts_per_var: 8,
            s_min: 1e-8,
            vi_tol: 1e-8,
            vi_max_iter: 4000,
            vi_starts: 16,
            seed: 0x5EED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    Tensor(TensorError),
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    /// Support enumeration over `2^n - 1` patterns was refused.
    CapExceeded {
        dim: usize,
        cap: usize,
    },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Tensor(e) => write!(f, "{e}"),
            EngineError::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "vector length {got} does not match instance dimension {expected}"
                )
            }
            EngineError::CapExceeded { dim, cap } => write!(
                f,
                "support enumeration refused: dimension {dim} exceeds cap {cap}; \
                 raise the cap or use the vi solver"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EngineError {}

impl From<TensorError> for EngineError {
    fn from(e: TensorError) -> Self {
        EngineError::Tensor(e)
    }
}

/// The problem data: a tensor `A` and a vector `q` of matching dimension.
#[derive(Debug, Clone)]
pub struct TcpInstance {
    tensor: Tensor,
    q: Vec<f64>,
}

impl TcpInstance {
    pub fn new(tensor: Tensor, q: Vec<f64>) -> Result<Self, EngineError> {
        if q.len() != tensor.dim() {
            return Err(EngineError::DimensionMismatch {
                expected: tensor.dim(),
                got: q.len(),
            });
        }
        Ok(TcpInstance { tensor, q })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn order(&self) -> usize {
        self.tensor.order()
    }

    /// The map `F(x) = A x^{m-1} + q`.
    pub fn field(&self, x: &[f64]) -> Result<Vec<f64>, EngineError> {
        let mut w = self.tensor.contract(x)?;
        for (wi, qi) in w.iter_mut().zip(&self.q) {
            *wi += qi;
        }
        Ok(w)
    }
}

/// Feasibility diagnostics of a candidate pair `(x, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// Smallest component of `x` before clamping.
    pub min_x: f64,
    /// Smallest component of `w`.
    pub min_w: f64,
    /// `|x' w|`.
    pub comp: f64,
}

impl Residuals {
    /// Worst constraint violation, as a single nonnegative number.
    pub fn worst(&self) -> f64 {
        (-self.min_x)
            .max(0.0)
            .max((-self.min_w).max(0.0))
            .max(self.comp)
    }
}

/// A verified feasible pair for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TcpSolution {
    pub x: Vec<f64>,
    /// `w = q + A x^{m-1}`, recomputed from `x`.
    pub w: Vec<f64>,
    /// Indices where `x` is (numerically) positive.
    pub support: Vec<usize>,
    pub residuals: Residuals,
}

/// Which of the three defining conditions a candidate broke first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolatedCondition {
    XNegative,
    WNegative,
    Complementarity,
}

impl fmt::Display for ViolatedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolatedCondition::XNegative => write!(f, "x >= 0"),
            ViolatedCondition::WNegative => write!(f, "q + A x^{{m-1}} >= 0"),
            ViolatedCondition::Complementarity => write!(f, "x' (q + A x^{{m-1}}) = 0"),
        }
    }
}

/// First violated condition with its magnitude and offending index.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: ViolatedCondition,
    pub magnitude: f64,
    pub index: Option<usize>,
}

/// Outcome of [`verify_solution`]: violations are data, not errors.
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyOutcome {
    Valid(TcpSolution),
    Invalid(Violation),
}

impl VerifyOutcome {
    pub fn solution(self) -> Option<TcpSolution> {
        match self {
            VerifyOutcome::Valid(sol) => Some(sol),
            VerifyOutcome::Invalid(_) => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, VerifyOutcome::Valid(_))
    }
}

/// How a solution set was produced; recorded in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Enumerate,
    Vi,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::Enumerate => "enumerate",
            SolveMethod::Vi => "vi",
        }
    }
}

/// Recomputes `w` and checks the three defining conditions at tolerance
/// `tol` (on `w` and complementarity; `x`-negativity below 1e-12 is clamped).
pub fn verify_solution(
    inst: &TcpInstance,
    x: &[f64],
    tol: f64,
) -> Result<VerifyOutcome, EngineError> {
    verify_candidate(
        inst,
        x,
        tol,
        SolveOptions::default().tol_x,
        SolveOptions::default().pos_tol,
    )
}

pub(crate) fn verify_candidate(
    inst: &TcpInstance,
    x: &[f64],
    tol_w: f64,
    tol_x: f64,
    pos_tol: f64,
) -> Result<VerifyOutcome, EngineError> {
    if x.len() != inst.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: inst.dim(),
            got: x.len(),
        });
    }
    let min_x = x.iter().fold(f64::INFINITY, |acc, &v| acc.min(v));
    if min_x < -tol_x {
        return Ok(VerifyOutcome::Invalid(Violation {
            condition: ViolatedCondition::XNegative,
            magnitude: -min_x,
            index: position_of_min(x),
        }));
    }
    let clamped: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
    let w = inst.field(&clamped)?;
    let min_w = w.iter().fold(f64::INFINITY, |acc, &v| acc.min(v));
    if min_w < -tol_w {
        return Ok(VerifyOutcome::Invalid(Violation {
            condition: ViolatedCondition::WNegative,
            magnitude: -min_w,
            index: position_of_min(&w),
        }));
    }
    let comp = dot(&clamped, &w).abs();
    if comp > tol_w * (1.0 + norm_2(&clamped) * norm_2(&w)) {
        return Ok(VerifyOutcome::Invalid(Violation {
            condition: ViolatedCondition::Complementarity,
            magnitude: comp,
            index: None,
        }));
    }
    let support = (0..clamped.len())
        .filter(|&i| clamped[i] > pos_tol)
        .collect();
    Ok(VerifyOutcome::Valid(TcpSolution {
        x: clamped,
        w,
        support,
        residuals: Residuals {
            min_x: min_x.min(0.0),
            min_w: min_w.min(0.0),
            comp,
        },
    }))
}

fn position_of_min(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &x)| match best {
            Some((_, b)) if b <= x => best,
            _ => Some((i, x)),
        })
        .map(|(i, _)| i)
}

/// Roots found for one support pattern, plus whether the per-support search
/// ran its full budget without divergence.
#[derive(Debug, Clone)]
pub struct SupportSolve {
    pub solutions: Vec<TcpSolution>,
    pub complete: bool,
}

/// Solves the square system `(A x^{m-1} + q)_J = 0`, `x = 0` off `J`, and
/// keeps roots that are strictly positive on `J` and feasible off it.
///
/// Order 2 and singleton supports are solved exactly; larger systems run a
/// damped Newton iteration from a deterministic low-discrepancy start set.
/// A start that leaves the search region or hits non-finite values marks the
/// result incomplete; it is never silently dropped.
pub fn solve_support(
    inst: &TcpInstance,
    support: &Support,
    opts: &SolveOptions,
) -> Result<SupportSolve, EngineError> {
    let sub = inst.tensor().principal_subtensor(support)?;
    let q_local = support.gather(inst.q());
    let found = newton::roots_on_support(&sub, &q_local, inst.q(), opts);
    let mut solutions = Vec::new();
    for local in found.roots {
        if !local.iter().all(|&u| u > opts.pos_tol) {
            continue;
        }
        let x = support.scatter(&local);
        if let VerifyOutcome::Valid(sol) =
            verify_candidate(inst, &x, opts.tol_w, opts.tol_x, opts.pos_tol)?
        {
            push_dedup(&mut solutions, sol, opts.dedup_tol);
        }
    }
    Ok(SupportSolve {
        solutions,
        complete: found.complete,
    })
}

/// The solution set of one enumeration run.
#[derive(Debug, Clone)]
pub struct EnumerateResult {
    /// Verified, deduplicated solutions in deterministic order (trivial
    /// point first, then supports by ascending bitmask, then root order).
    pub solutions: Vec<TcpSolution>,
    /// True when every support's search met its budget without divergence;
    /// only then does an empty set certify unsolvability at desk scale.
    pub complete: bool,
}

impl EnumerateResult {
    /// Solutions other than the all-zero vector.
    pub fn nonzero(&self) -> impl Iterator<Item = &TcpSolution> {
        self.solutions.iter().filter(|s| !s.support.is_empty())
    }

    pub fn certified_empty(&self) -> bool {
        self.complete && self.solutions.is_empty()
    }
}

/// Unions [`solve_support`] over all `2^n - 1` supports (plus the trivial
/// point when `q >= 0`). Refuses dimensions above the enumeration cap.
pub fn solve_enumerate(
    inst: &TcpInstance,
    opts: &SolveOptions,
) -> Result<EnumerateResult, EngineError> {
    let n = inst.dim();
    if n > opts.enumeration_cap {
        return Err(EngineError::CapExceeded {
            dim: n,
            cap: opts.enumeration_cap,
        });
    }
    let mut solutions = Vec::new();
    let zero = vec![0.0; n];
    if let VerifyOutcome::Valid(sol) =
        verify_candidate(inst, &zero, opts.tol_w, opts.tol_x, opts.pos_tol)?
    {
        solutions.push(sol);
    }
    let mut complete = true;
    for mask in 1usize..(1usize << n) {
        let support = Support::from_bitmask(mask, n).expect("mask in range");
        let part = solve_support(inst, &support, opts)?;
        complete &= part.complete;
        for sol in part.solutions {
            push_dedup(&mut solutions, sol, opts.dedup_tol);
        }
    }
    Ok(EnumerateResult {
        solutions,
        complete,
    })
}

/// Heuristic large-scale route via the augmented simplex variational
/// inequality with a projected fixed-point iteration; see [`ViOutcome`].
pub fn solve_vi(inst: &TcpInstance, opts: &SolveOptions) -> Result<ViOutcome, EngineError> {
    vi::solve(inst, opts)
}

/// Keeps the first occurrence on ties, preferring the smaller residual.
fn push_dedup(solutions: &mut Vec<TcpSolution>, candidate: TcpSolution, dedup_tol: f64) {
    for existing in solutions.iter_mut() {
        let gap = existing
            .x
            .iter()
            .zip(&candidate.x)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if gap <= dedup_tol * (1.0 + norm_inf(&candidate.x)) {
            if candidate.residuals.worst() < existing.residuals.worst() {
                *existing = candidate;
            }
            return;
        }
    }
    solutions.push(candidate);
}
