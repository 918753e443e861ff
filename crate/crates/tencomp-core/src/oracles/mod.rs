//! Certificate-producing membership oracles for the structured tensor
//! classes.
//!
//! Every oracle returns a [`ClassVerdict`] whose certificate can be
//! replayed: `NonMember` always carries a [`Witness`] that violates the
//! defining inequality by more than the tolerance, `Member` is produced only
//! by an exact rule or a complete support enumeration, and search-based
//! "nothing found" outcomes stay three-valued
//! ([`Verdict::NoCounterexampleFound`]) — P-type and copositivity decisions
//! are intractable in general, so falsifiers never claim membership.
//!
//! The exact rules wired in as fast paths:
//!
//! - a nonnegative tensor solves every right-hand side iff its diagonal is
//!   strictly positive; with a zero diagonal entry `k`, the vector with
//!   `q_k < 0 < q_i` elsewhere is unsolvable ([`RuleId::NonnegativeDiagonalQ`]);
//! - the R class is characterized by the problems with `q = 0` and `q = e`
//!   having only the zero solution, and R membership implies solvability for
//!   every `q` ([`RuleId::RImpliesQ`]);
//! - a copositive tensor needs a nonnegative diagonal, strictly copositive a
//!   positive one ([`RuleId::DiagonalNecessity`]);
//! - a nonnegative symmetric tensor is copositive outright, and strictly
//!   copositive iff its diagonal is positive
//!   ([`RuleId::NonnegativeSymmetricCopositive`],
//!   [`RuleId::PositiveDiagonalStrictlyCopositive`]).

mod search;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // f64 math via the trait under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{solve_enumerate, EngineError, EnumerateResult, SolveOptions, TcpInstance};
use crate::monotone::FnProperty;
use crate::tensor::Tensor;

use search::{face_search, sphere_search, FaceObjective, SphereObjective};

/// The structured tensor classes this crate decides or falsifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorClass {
    Q,
    R,
    R0,
    P,
    P0,
    SemiPositive,
    StrictlySemiPositive,
    Copositive,
    StrictlyCopositive,
}

impl TensorClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TensorClass::Q => "q",
            TensorClass::R => "r",
            TensorClass::R0 => "r0",
            TensorClass::P => "p",
            TensorClass::P0 => "p0",
            TensorClass::SemiPositive => "semi_positive",
            TensorClass::StrictlySemiPositive => "strictly_semi_positive",
            TensorClass::Copositive => "copositive",
            TensorClass::StrictlyCopositive => "strictly_copositive",
        }
    }

    pub const ALL: [TensorClass; 9] = [
        TensorClass::Q,
        TensorClass::R,
        TensorClass::R0,
        TensorClass::P,
        TensorClass::P0,
        TensorClass::SemiPositive,
        TensorClass::StrictlySemiPositive,
        TensorClass::Copositive,
        TensorClass::StrictlyCopositive,
    ];
}

impl fmt::Display for TensorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Subject of a verdict: a tensor class or a property of the map
/// `x -> A x^{m-1} + q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassId {
    Tensor(TensorClass),
    Function(FnProperty),
}

impl ClassId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassId::Tensor(c) => c.as_str(),
            ClassId::Function(p) => p.as_str(),
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<TensorClass> for ClassId {
    fn from(c: TensorClass) -> Self {
        ClassId::Tensor(c)
    }
}

impl From<FnProperty> for ClassId {
    fn from(p: FnProperty) -> Self {
        ClassId::Function(p)
    }
}

/// Three-valued membership decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NonMember,
    /// The falsifier exhausted its budget without a violation; membership
    /// is not claimed.
    NoCounterexampleFound,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::NonMember => "non_member",
            Verdict::NoCounterexampleFound => "no_counterexample_found",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exact rules cited by fast-path verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleId {
    /// Nonnegative tensor: solvable for every `q` iff the diagonal is
    /// strictly positive.
    NonnegativeDiagonalQ,
    /// R membership implies solvability for every `q`.
    RImpliesQ,
    /// Copositivity forces a nonnegative (strict: positive) diagonal.
    DiagonalNecessity,
    /// Nonnegative symmetric tensors are copositive.
    NonnegativeSymmetricCopositive,
    /// Nonnegative symmetric tensors are strictly copositive iff every
    /// diagonal entry is positive.
    PositiveDiagonalStrictlyCopositive,
}

impl RuleId {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleId::NonnegativeDiagonalQ => "nonnegative-diagonal-q",
            RuleId::RImpliesQ => "r-implies-q",
            RuleId::DiagonalNecessity => "diagonal-necessity",
            RuleId::NonnegativeSymmetricCopositive => "nonnegative-symmetric-copositive",
            RuleId::PositiveDiagonalStrictlyCopositive => "positive-diagonal-strictly-copositive",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One enumeration probe: which `q` was solved and what came back.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub q: Vec<f64>,
    pub solutions: usize,
    pub nonzero_solutions: usize,
    pub complete: bool,
}

/// Replayable record of the enumerations behind a verdict.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnumerationRecord {
    pub probes: Vec<ProbeRecord>,
}

/// Budget report for search-based outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchRecord {
    pub starts: usize,
    pub evaluations: usize,
    pub faces: usize,
    pub pairs: usize,
    pub best_value: Option<f64>,
    /// Empirical modulus infimum for the strong/uniform properties.
    pub estimated_modulus: Option<f64>,
    pub seed: u64,
}

impl SearchRecord {
    fn empty(seed: u64) -> Self {
        SearchRecord {
            starts: 0,
            evaluations: 0,
            faces: 0,
            pairs: 0,
            best_value: None,
            estimated_modulus: None,
            seed,
        }
    }
}

/// Concrete data whose replay through the defining inequality confirms a
/// `NonMember` verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A single vector violating the class condition named in `condition`.
    Vector {
        x: Vec<f64>,
        condition: &'static str,
        value: f64,
    },
    /// A pair `(x, y)` violating a monotonicity/P-function property.
    Pair {
        x: Vec<f64>,
        y: Vec<f64>,
        lhs: f64,
        rhs: f64,
        condition: &'static str,
    },
    /// `x >= 0`, `x != 0`, `t >= 0` with `(A x^{m-1})_i + t = 0` on the
    /// support and `>= 0` off it.
    RSystem { x: Vec<f64>, t: f64 },
    /// A right-hand side whose solution set is certified empty.
    QVector {
        q: Vec<f64>,
        enumeration: Option<ProbeRecord>,
    },
}

/// What backs a verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// An exact rule fired; the rules are listed in `citations`.
    Rule,
    /// A complete (or attempted) support enumeration.
    Enumeration(EnumerationRecord),
    /// A replayable counterexample.
    Witness(Witness),
    /// A search ran out of budget without finding anything.
    Search(SearchRecord),
}

impl Certificate {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Certificate::Witness(w) => Some(w),
            _ => None,
        }
    }
}

/// Membership decision for one class with its replayable certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassVerdict {
    pub class: ClassId,
    pub verdict: Verdict,
    pub certificate: Certificate,
    /// Whether the underlying enumeration/search ran exhaustively at its
    /// configured budget (sampled faces or an incomplete Newton sweep clear
    /// this).
    pub complete: bool,
    pub citations: Vec<RuleId>,
}

/// Options for the oracles and falsifiers.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub solve: SolveOptions,
    /// Multi-start budget per face or sphere.
    pub starts: usize,
    /// Seed for every randomized search.
    pub seed: u64,
    /// Full face enumeration up to this dimension; sampled above it.
    pub face_cap: usize,
    /// Activity threshold distinguishing `x_k > 0` on the simplex.
    pub tau: f64,
    /// Strict inequalities count as violated at or below this.
    pub zero_tol: f64,
    /// Weak inequalities count as violated below minus this.
    pub viol_tol: f64,
    /// Subgradient iterations per start.
    pub search_iters: usize,
    /// Random right-hand sides appended to the deterministic Q battery.
    pub q_battery_random: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            solve: SolveOptions::default(),
            starts: 64,
            seed: 0x5EED,
            face_cap: 12,
            tau: 1e-7,
            zero_tol: 1e-12,
            viol_tol: 1e-9,
            search_iters: 120,
            q_battery_random: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Copositivity is defined for symmetric tensors only.
    NotSymmetric,
    Engine(EngineError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::NotSymmetric => {
                write!(f, "copositivity requires a (verified) symmetric tensor")
            }
            OracleError::Engine(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

impl From<EngineError> for OracleError {
    fn from(e: EngineError) -> Self {
        OracleError::Engine(e)
    }
}

// ---------------------------------------------------------------------------
// Definitional evaluators (shared by searches, replay, and tests)
// ---------------------------------------------------------------------------

/// `max_i x_i (A x^{m-1})_i`; a P-tensor keeps this positive for `x != 0`.
pub fn p_condition_value(tensor: &Tensor, x: &[f64]) -> f64 {
    let w = tensor.contract(x).expect("dimension agreed");
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| xi * wi)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_{|x_i| > tau} x_i (A x^{m-1})_i`; a P0-tensor keeps this
/// nonnegative for `x != 0`.
pub fn p0_condition_value(tensor: &Tensor, x: &[f64], tau: f64) -> f64 {
    let w = tensor.contract(x).expect("dimension agreed");
    let mut best = f64::NEG_INFINITY;
    for (xi, wi) in x.iter().zip(&w) {
        if xi.abs() > tau {
            best = best.max(xi * wi);
        }
    }
    best
}

/// `max_{x_k > tau} (A x^{m-1})_k` for `x >= 0`; semi-positive tensors keep
/// this nonnegative (strictly semi-positive: positive) for `x != 0`.
pub fn semipositive_condition_value(tensor: &Tensor, x: &[f64], tau: f64) -> f64 {
    let w = tensor.contract(x).expect("dimension agreed");
    let mut best = f64::NEG_INFINITY;
    for (xk, wk) in x.iter().zip(&w) {
        if *xk > tau {
            best = best.max(*wk);
        }
    }
    best
}

/// Residual of the homogeneous slack system at `(x, t)`: zero means
/// `(A x^{m-1})_i + t = 0` wherever `x_i > 0` and `>= 0` elsewhere, i.e. a
/// valid R/R0 counterexample (t = 0 for R0).
pub fn rsystem_residual(tensor: &Tensor, x: &[f64], t: f64, tau: f64) -> f64 {
    if t < 0.0 || x.iter().any(|&v| v < 0.0) || x.iter().all(|&v| v <= tau) {
        return f64::INFINITY;
    }
    let w = tensor.contract(x).expect("dimension agreed");
    let mut residual = 0.0f64;
    for (xi, wi) in x.iter().zip(&w) {
        let slack = wi + t;
        if *xi > tau {
            residual = residual.max(slack.abs());
        } else {
            residual = residual.max(-slack);
        }
    }
    residual.max(0.0)
}

/// Replays a witness through the raw definitional inequality of `class`.
/// Returns the violation magnitude when it confirms, `None` when it fails
/// to violate (an unsound witness) or does not apply.
pub fn replay_witness(
    tensor: &Tensor,
    class: TensorClass,
    witness: &Witness,
    opts: &OracleOptions,
) -> Option<f64> {
    match (class, witness) {
        (TensorClass::P, Witness::Vector { x, .. }) => {
            let value = p_condition_value(tensor, x);
            (nonzero(x) && value <= opts.zero_tol).then_some(-value)
        }
        (TensorClass::P0, Witness::Vector { x, .. }) => {
            let value = p0_condition_value(tensor, x, opts.tau);
            (nonzero(x) && value <= -opts.viol_tol).then_some(-value)
        }
        (TensorClass::SemiPositive, Witness::Vector { x, .. }) => {
            let value = semipositive_condition_value(tensor, x, opts.tau);
            (nonneg_nonzero(x) && value <= -opts.viol_tol).then_some(-value)
        }
        (TensorClass::StrictlySemiPositive, Witness::Vector { x, .. }) => {
            let value = semipositive_condition_value(tensor, x, opts.tau);
            (nonneg_nonzero(x) && value <= opts.zero_tol).then_some(-value)
        }
        (TensorClass::Copositive, Witness::Vector { x, .. }) => {
            let value = tensor.polyval(x).expect("dimension agreed");
            (nonneg_nonzero(x) && value <= -opts.viol_tol).then_some(-value)
        }
        (TensorClass::StrictlyCopositive, Witness::Vector { x, .. }) => {
            let value = tensor.polyval(x).expect("dimension agreed");
            (nonneg_nonzero(x) && value <= opts.zero_tol).then_some(-value)
        }
        (TensorClass::R0, Witness::RSystem { x, t }) => {
            let residual = rsystem_residual(tensor, x, *t, opts.tau);
            (*t == 0.0 && residual <= opts.viol_tol).then_some(residual)
        }
        (TensorClass::R, Witness::RSystem { x, t }) => {
            let residual = rsystem_residual(tensor, x, *t, opts.tau);
            (residual <= opts.viol_tol).then_some(residual)
        }
        (TensorClass::Q, Witness::QVector { q, .. }) => {
            let inst = TcpInstance::new(tensor.clone(), q.clone()).ok()?;
            let result = solve_enumerate(&inst, &opts.solve).ok()?;
            result.certified_empty().then_some(0.0)
        }
        _ => None,
    }
}

fn nonzero(x: &[f64]) -> bool {
    x.iter().any(|&v| v != 0.0)
}

fn nonneg_nonzero(x: &[f64]) -> bool {
    x.iter().all(|&v| v >= 0.0) && nonzero(x)
}

// ---------------------------------------------------------------------------
// R0 / R / Q oracles (enumeration + exact rules)
// ---------------------------------------------------------------------------

fn enumerate_probe(
    tensor: &Tensor,
    q: Vec<f64>,
    opts: &SolveOptions,
) -> Result<(EnumerateResult, ProbeRecord), EngineError> {
    let inst = TcpInstance::new(tensor.clone(), q.clone())?;
    let result = solve_enumerate(&inst, opts)?;
    let nonzero_solutions = result.nonzero().count();
    let record = ProbeRecord {
        q,
        solutions: result.solutions.len(),
        nonzero_solutions,
        complete: result.complete,
    };
    Ok((result, record))
}

/// Scales an R-system witness so its first positive component is 1
/// (`x -> x/a`, `t -> t/a^{m-1}` preserves the system).
fn normalize_rsystem(x: &[f64], t: f64, order: usize) -> (Vec<f64>, f64) {
    let Some(&a) = x.iter().find(|&&v| v > 0.0) else {
        return (x.to_vec(), t);
    };
    let scaled: Vec<f64> = x.iter().map(|&v| v / a).collect();
    (scaled, t / a.powi(order as i32 - 1))
}

/// R0 membership: the problem with `q = 0` must have only the zero
/// solution. Any nonzero solution is a replayable witness with `t = 0`.
pub fn check_r0(tensor: &Tensor, opts: &OracleOptions) -> Result<ClassVerdict, EngineError> {
    let (result, record) = enumerate_probe(tensor, vec![0.0; tensor.dim()], &opts.solve)?;
    if let Some(solution) = result.nonzero().next() {
        let (x, t) = normalize_rsystem(&solution.x, 0.0, tensor.order());
        return Ok(ClassVerdict {
            class: TensorClass::R0.into(),
            verdict: Verdict::NonMember,
            certificate: Certificate::Witness(Witness::RSystem { x, t }),
            complete: true,
            citations: vec![],
        });
    }
    let complete = result.complete;
    Ok(ClassVerdict {
        class: TensorClass::R0.into(),
        verdict: if complete {
            Verdict::Member
        } else {
            Verdict::NoCounterexampleFound
        },
        certificate: Certificate::Enumeration(EnumerationRecord {
            probes: vec![record],
        }),
        complete,
        citations: vec![],
    })
}

/// R membership: R0 plus only the zero solution for `q = e`. A nonzero
/// solution of the `q = e` problem converts to a witness of the slack
/// system with `t = 1` (rescaled so its leading component is 1).
pub fn check_r(tensor: &Tensor, opts: &OracleOptions) -> Result<ClassVerdict, EngineError> {
    let r0 = check_r0(tensor, opts)?;
    if r0.verdict == Verdict::NonMember {
        return Ok(ClassVerdict {
            class: TensorClass::R.into(),
            ..r0
        });
    }
    let (result, e_record) = enumerate_probe(tensor, vec![1.0; tensor.dim()], &opts.solve)?;
    if let Some(solution) = result.nonzero().next() {
        let (x, t) = normalize_rsystem(&solution.x, 1.0, tensor.order());
        return Ok(ClassVerdict {
            class: TensorClass::R.into(),
            verdict: Verdict::NonMember,
            certificate: Certificate::Witness(Witness::RSystem { x, t }),
            complete: true,
            citations: vec![],
        });
    }
    let mut probes = match r0.certificate {
        Certificate::Enumeration(record) => record.probes,
        _ => vec![],
    };
    probes.push(e_record);
    let complete = r0.complete && result.complete;
    Ok(ClassVerdict {
        class: TensorClass::R.into(),
        verdict: if complete && r0.verdict == Verdict::Member {
            Verdict::Member
        } else {
            Verdict::NoCounterexampleFound
        },
        certificate: Certificate::Enumeration(EnumerationRecord { probes }),
        complete,
        citations: vec![],
    })
}

/// Deterministic right-hand sides probed before seeded random ones:
/// `-e`, `+e`, then each negated coordinate vector.
fn q_battery(n: usize, opts: &OracleOptions) -> Vec<Vec<f64>> {
    let mut battery = Vec::new();
    battery.push(vec![-1.0; n]);
    battery.push(vec![1.0; n]);
    for i in 0..n {
        let mut q = vec![0.0; n];
        q[i] = -1.0;
        battery.push(q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.q_battery_random {
        battery.push((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
    }
    battery
}

/// Q membership cascade: the nonnegative diagonal rule decides exactly;
/// otherwise R membership suffices; otherwise a battery of right-hand sides
/// hunts for a certified-empty instance.
pub fn check_q(tensor: &Tensor, opts: &OracleOptions) -> ClassVerdict {
    let n = tensor.dim();
    if tensor.is_nonnegative() {
        let diagonal = tensor.diagonal();
        if diagonal.iter().all(|&d| d > 0.0) {
            return ClassVerdict {
                class: TensorClass::Q.into(),
                verdict: Verdict::Member,
                certificate: Certificate::Rule,
                complete: true,
                citations: vec![RuleId::NonnegativeDiagonalQ],
            };
        }
        // Zero diagonal entry k: q negative at k and positive elsewhere is
        // unsolvable (any solution would be supported on k alone, leaving
        // w_k = q_k < 0).
        let k = diagonal
            .iter()
            .position(|&d| d <= 0.0)
            .expect("some entry not positive");
        let mut q = vec![1.0; n];
        q[k] = -1.0;
        let enumeration = if n <= opts.solve.enumeration_cap {
            enumerate_probe(tensor, q.clone(), &opts.solve)
                .ok()
                .map(|(_, record)| record)
        } else {
            None
        };
        return ClassVerdict {
            class: TensorClass::Q.into(),
            verdict: Verdict::NonMember,
            certificate: Certificate::Witness(Witness::QVector { q, enumeration }),
            complete: true,
            citations: vec![RuleId::NonnegativeDiagonalQ],
        };
    }
    if n > opts.solve.enumeration_cap {
        return ClassVerdict {
            class: TensorClass::Q.into(),
            verdict: Verdict::NoCounterexampleFound,
            certificate: Certificate::Search(SearchRecord::empty(opts.seed)),
            complete: false,
            citations: vec![],
        };
    }
    match check_r(tensor, opts) {
        Ok(r) if r.verdict == Verdict::Member => {
            return ClassVerdict {
                class: TensorClass::Q.into(),
                verdict: Verdict::Member,
                certificate: Certificate::Rule,
                complete: r.complete,
                citations: vec![RuleId::RImpliesQ],
            };
        }
        _ => {}
    }
    let mut probes = Vec::new();
    let mut all_complete = true;
    for q in q_battery(n, opts) {
        match enumerate_probe(tensor, q.clone(), &opts.solve) {
            Ok((result, record)) => {
                let empty = result.certified_empty();
                all_complete &= result.complete;
                probes.push(record.clone());
                if empty {
                    return ClassVerdict {
                        class: TensorClass::Q.into(),
                        verdict: Verdict::NonMember,
                        certificate: Certificate::Witness(Witness::QVector {
                            q,
                            enumeration: Some(record),
                        }),
                        complete: true,
                        citations: vec![],
                    };
                }
            }
            Err(_) => all_complete = false,
        }
    }
    ClassVerdict {
        class: TensorClass::Q.into(),
        verdict: Verdict::NoCounterexampleFound,
        certificate: Certificate::Enumeration(EnumerationRecord { probes }),
        complete: all_complete,
        citations: vec![],
    }
}

// ---------------------------------------------------------------------------
// Falsifiers (sphere / simplex searches)
// ---------------------------------------------------------------------------

const P_CONDITION: &str = "exists i: x_i * (A x^{m-1})_i > 0";
const P0_CONDITION: &str = "exists i: x_i != 0 and x_i * (A x^{m-1})_i >= 0";
const SEMI_CONDITION: &str = "exists k: x_k > 0 and (A x^{m-1})_k >= 0";
const STRICT_SEMI_CONDITION: &str = "exists k: x_k > 0 and (A x^{m-1})_k > 0";
const COPOSITIVE_CONDITION: &str = "A x^m >= 0 for x >= 0";
const STRICT_COPOSITIVE_CONDITION: &str = "A x^m > 0 for x >= 0, x != 0";
const DIAGONAL_NONNEG_CONDITION: &str = "diagonal entries of a copositive tensor are >= 0";
const DIAGONAL_POSITIVE_CONDITION: &str =
    "diagonal entries of a strictly copositive tensor are > 0";

fn search_verdict(
    class: TensorClass,
    condition: &'static str,
    outcome: search::SearchOutcome,
    threshold: f64,
    replay: impl Fn(&[f64]) -> f64,
    seed: u64,
) -> ClassVerdict {
    // Only emit a witness the raw condition confirms.
    if outcome.value <= threshold && replay(&outcome.point) <= threshold {
        return ClassVerdict {
            class: class.into(),
            verdict: Verdict::NonMember,
            certificate: Certificate::Witness(Witness::Vector {
                x: outcome.point,
                condition,
                value: outcome.value,
            }),
            complete: true,
            citations: vec![],
        };
    }
    ClassVerdict {
        class: class.into(),
        verdict: Verdict::NoCounterexampleFound,
        certificate: Certificate::Search(SearchRecord {
            starts: outcome.starts,
            evaluations: outcome.evaluations,
            faces: outcome.faces,
            pairs: 0,
            best_value: Some(outcome.value),
            estimated_modulus: None,
            seed,
        }),
        complete: outcome.exhaustive_faces,
        citations: vec![],
    }
}

/// Searches the unit sphere for `x` with every product
/// `x_i (A x^{m-1})_i <= 0`; such an `x` refutes the P property.
pub fn falsify_p(tensor: &Tensor, opts: &OracleOptions) -> ClassVerdict {
    let outcome = sphere_search(tensor, SphereObjective::ProductsAll, opts, -1.0);
    search_verdict(
        TensorClass::P,
        P_CONDITION,
        outcome,
        opts.zero_tol,
        |x| p_condition_value(tensor, x),
        opts.seed,
    )
}

/// Searches for `x` whose every nonzero component has a strictly negative
/// product; such an `x` refutes the P0 property.
pub fn falsify_p0(tensor: &Tensor, opts: &OracleOptions) -> ClassVerdict {
    let outcome = sphere_search(tensor, SphereObjective::ProductsActive, opts, -1.0);
    search_verdict(
        TensorClass::P0,
        P0_CONDITION,
        outcome,
        -opts.viol_tol,
        |x| p0_condition_value(tensor, x, opts.tau),
        opts.seed,
    )
}

/// Face-by-face simplex search for `x >= 0` whose positive components all
/// see a strictly negative field value.
pub fn falsify_semi_positive(tensor: &Tensor, opts: &OracleOptions) -> ClassVerdict {
    let outcome = face_search(tensor, FaceObjective::ComponentsActive, opts, -1.0);
    search_verdict(
        TensorClass::SemiPositive,
        SEMI_CONDITION,
        outcome,
        -opts.viol_tol,
        |x| semipositive_condition_value(tensor, x, opts.tau),
        opts.seed,
    )
}

/// Like [`falsify_semi_positive`] with the weak threshold: all positive
/// components at or below zero refute strict semi-positivity.
pub fn falsify_strictly_semi_positive(tensor: &Tensor, opts: &OracleOptions) -> ClassVerdict {
    let outcome = face_search(tensor, FaceObjective::ComponentsActive, opts, -1.0);
    search_verdict(
        TensorClass::StrictlySemiPositive,
        STRICT_SEMI_CONDITION,
        outcome,
        opts.zero_tol,
        |x| semipositive_condition_value(tensor, x, opts.tau),
        opts.seed,
    )
}

/// The P condition restricted to the nonnegative orthant: searches simplex
/// faces for `x >= 0` with every product `x_i (A x^{m-1})_i <= 0`. Such an
/// `x` also refutes P outright; this restricted form backs the P-function
/// cross-check probe.
pub fn falsify_p_orthant(tensor: &Tensor, opts: &OracleOptions) -> ClassVerdict {
    let outcome = face_search(tensor, FaceObjective::Products, opts, -1.0);
    search_verdict(
        TensorClass::P,
        P_CONDITION,
        outcome,
        opts.zero_tol,
        |x| p_condition_value(tensor, x),
        opts.seed,
    )
}

/// Copositivity of a (verified) symmetric tensor: diagonal necessity first,
/// the exact nonnegative rule second, simplex minimization of the form
/// last.
pub fn check_copositive(
    tensor: &Tensor,
    strict: bool,
    opts: &OracleOptions,
) -> Result<ClassVerdict, OracleError> {
    if !tensor.is_symmetric() {
        return Err(OracleError::NotSymmetric);
    }
    let class = if strict {
        TensorClass::StrictlyCopositive
    } else {
        TensorClass::Copositive
    };
    let diagonal = tensor.diagonal();
    let bad = diagonal
        .iter()
        .position(|&d| if strict { d <= 0.0 } else { d < 0.0 });
    if let Some(k) = bad {
        let mut x = vec![0.0; tensor.dim()];
        x[k] = 1.0;
        return Ok(ClassVerdict {
            class: class.into(),
            verdict: Verdict::NonMember,
            certificate: Certificate::Witness(Witness::Vector {
                x,
                condition: if strict {
                    DIAGONAL_POSITIVE_CONDITION
                } else {
                    DIAGONAL_NONNEG_CONDITION
                },
                value: diagonal[k],
            }),
            complete: true,
            citations: vec![RuleId::DiagonalNecessity],
        });
    }
    if tensor.is_nonnegative() {
        // Every monomial of A x^m is nonnegative on the orthant; with a
        // positive diagonal the form is positive off the origin.
        return Ok(ClassVerdict {
            class: class.into(),
            verdict: Verdict::Member,
            certificate: Certificate::Rule,
            complete: true,
            citations: vec![if strict {
                RuleId::PositiveDiagonalStrictlyCopositive
            } else {
                RuleId::NonnegativeSymmetricCopositive
            }],
        });
    }
    let outcome = face_search(tensor, FaceObjective::Form, opts, -1.0);
    let (condition, threshold) = if strict {
        (STRICT_COPOSITIVE_CONDITION, opts.zero_tol)
    } else {
        (COPOSITIVE_CONDITION, -opts.viol_tol)
    };
    Ok(search_verdict(
        class,
        condition,
        outcome,
        threshold,
        |x| tensor.polyval(x).expect("dimension agreed"),
        opts.seed,
    ))
}

// ---------------------------------------------------------------------------
// Full classification + implication-ladder audit
// ---------------------------------------------------------------------------

/// Verdict table for one tensor, with the audit of the implication ladder.
#[derive(Debug, Clone)]
pub struct ClassReport {
    pub verdicts: Vec<ClassVerdict>,
    /// Classes that could not be decided, with the reason.
    pub skipped: Vec<(ClassId, String)>,
    /// Implication-ladder inconsistencies (must be empty).
    pub ladder_violations: Vec<String>,
}

impl ClassReport {
    pub fn verdict_for(&self, class: TensorClass) -> Option<&ClassVerdict> {
        self.verdicts
            .iter()
            .find(|v| v.class == ClassId::Tensor(class))
    }
}

/// Runs every applicable oracle and audits the verdict table against the
/// class inclusions.
pub fn classify_all(tensor: &Tensor, opts: &OracleOptions) -> ClassReport {
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();
    match check_r0(tensor, opts) {
        Ok(v) => verdicts.push(v),
        Err(e) => skipped.push((TensorClass::R0.into(), format!("{e}"))),
    }
    match check_r(tensor, opts) {
        Ok(v) => verdicts.push(v),
        Err(e) => skipped.push((TensorClass::R.into(), format!("{e}"))),
    }
    verdicts.push(check_q(tensor, opts));
    verdicts.push(falsify_p(tensor, opts));
    verdicts.push(falsify_p0(tensor, opts));
    verdicts.push(falsify_semi_positive(tensor, opts));
    verdicts.push(falsify_strictly_semi_positive(tensor, opts));
    if tensor.is_symmetric() {
        for strict in [false, true] {
            match check_copositive(tensor, strict, opts) {
                Ok(v) => verdicts.push(v),
                Err(e) => {
                    let class = if strict {
                        TensorClass::StrictlyCopositive
                    } else {
                        TensorClass::Copositive
                    };
                    skipped.push((class.into(), format!("{e}")));
                }
            }
        }
    } else {
        let reason = String::from("tensor is not symmetric");
        skipped.push((TensorClass::Copositive.into(), reason.clone()));
        skipped.push((TensorClass::StrictlyCopositive.into(), reason));
    }
    let ladder_violations = ladder_audit(&verdicts);
    ClassReport {
        verdicts,
        skipped,
        ladder_violations,
    }
}

/// Class inclusions the verdict table must respect: `(stronger, weaker)`
/// with stronger membership forcing weaker membership.
pub const CLASS_LADDER: [(TensorClass, TensorClass); 9] = [
    (TensorClass::P, TensorClass::StrictlySemiPositive),
    (TensorClass::P, TensorClass::P0),
    (TensorClass::P0, TensorClass::SemiPositive),
    (TensorClass::StrictlySemiPositive, TensorClass::SemiPositive),
    (TensorClass::StrictlySemiPositive, TensorClass::R),
    (TensorClass::StrictlySemiPositive, TensorClass::R0),
    (TensorClass::R, TensorClass::R0),
    (TensorClass::R, TensorClass::Q),
    (TensorClass::StrictlyCopositive, TensorClass::Copositive),
];

/// Checks a verdict table against [`CLASS_LADDER`] plus the conditional
/// rule "semi-positive and R0 together force R".
pub fn ladder_audit(verdicts: &[ClassVerdict]) -> Vec<String> {
    let lookup = |class: TensorClass| -> Option<Verdict> {
        verdicts
            .iter()
            .find(|v| v.class == ClassId::Tensor(class))
            .map(|v| v.verdict)
    };
    let mut violations = Vec::new();
    for (stronger, weaker) in CLASS_LADDER {
        if lookup(stronger) == Some(Verdict::Member) && lookup(weaker) == Some(Verdict::NonMember) {
            violations.push(format!(
                "{stronger} is a member but {weaker} is a non-member"
            ));
        }
    }
    if lookup(TensorClass::SemiPositive) == Some(Verdict::Member)
        && lookup(TensorClass::R0) == Some(Verdict::Member)
        && lookup(TensorClass::R) == Some(Verdict::NonMember)
    {
        violations.push(String::from(
            "semi_positive and r0 members cannot make r a non-member",
        ));
    }
    violations
}
