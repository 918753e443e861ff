//! Pairwise monotonicity and P-function checks for the map
//! `F(x) = A x^{m-1} + q` on the nonnegative orthant.
//!
//! [`check_pair`] evaluates one defining inequality on one ordered pair;
//! [`falsify`] scans a deterministic pool of structured pairs (coordinate
//! points, signed scalings, the origin) followed by seeded random pairs and
//! returns the first violation as a replayable witness. All properties scan
//! the same pool in the same order, so a certified violation of a weak
//! property is always accompanied by violations of every stronger property
//! ([`fn_ladder_audit`] checks that bookkeeping).
//!
//! The modulus constants of the strong/uniform properties are estimated
//! empirically (Euclidean norm) and reported; no membership claim is ever
//! made from a finite sample.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{EngineError, TcpInstance};
use crate::linalg::{dot, sub};
use crate::oracles::{
    falsify_p_orthant, p_condition_value, Certificate, ClassVerdict, OracleOptions, SearchRecord,
    Verdict, Witness,
};
use crate::tensor::Tensor;

/// Function properties checked pairwise on `K = R^n_+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FnProperty {
    PseudoMonotone,
    Monotone,
    StrictlyMonotone,
    StronglyMonotone,
    P0Function,
    PFunction,
    UniformPFunction,
}

impl FnProperty {
    pub fn as_str(&self) -> &'static str {
        match self {
            FnProperty::PseudoMonotone => "pseudo_monotone",
            FnProperty::Monotone => "monotone",
            FnProperty::StrictlyMonotone => "strictly_monotone",
            FnProperty::StronglyMonotone => "strongly_monotone",
            FnProperty::P0Function => "p0_function",
            FnProperty::PFunction => "p_function",
            FnProperty::UniformPFunction => "uniform_p_function",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        FnProperty::ALL.iter().copied().find(|p| p.as_str() == name)
    }

    pub const ALL: [FnProperty; 7] = [
        FnProperty::PseudoMonotone,
        FnProperty::Monotone,
        FnProperty::StrictlyMonotone,
        FnProperty::StronglyMonotone,
        FnProperty::P0Function,
        FnProperty::PFunction,
        FnProperty::UniformPFunction,
    ];

    fn condition(&self) -> &'static str {
        match self {
            FnProperty::PseudoMonotone => "(x-y)'F(y) >= 0 implies (x-y)'F(x) >= 0",
            FnProperty::Monotone => "(F(x)-F(y))'(x-y) >= 0",
            FnProperty::StrictlyMonotone => "(F(x)-F(y))'(x-y) > 0 for x != y",
            FnProperty::StronglyMonotone => "(F(x)-F(y))'(x-y) >= c |x-y|^2 for some c > 0",
            FnProperty::P0Function => "exists k: x_k != y_k and (x_k-y_k)(F(x)-F(y))_k >= 0",
            FnProperty::PFunction => "max_k (x_k-y_k)(F(x)-F(y))_k > 0",
            FnProperty::UniformPFunction => {
                "max_k (x_k-y_k)(F(x)-F(y))_k >= c |x-y|^2 for some c > 0"
            }
        }
    }
}

impl fmt::Display for FnProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneError {
    /// The defining inequalities quantify over distinct pairs.
    EqualPoints,
    Engine(EngineError),
}

impl fmt::Display for MonotoneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonotoneError::EqualPoints => write!(f, "x and y must be distinct"),
            MonotoneError::Engine(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MonotoneError {}

impl From<EngineError> for MonotoneError {
    fn from(e: EngineError) -> Self {
        MonotoneError::Engine(e)
    }
}

/// A pair violating one property, with the two sides of the broken
/// implication/inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub property: FnProperty,
}

impl PairWitness {
    pub fn into_witness(self) -> Witness {
        Witness::Pair {
            x: self.x,
            y: self.y,
            lhs: self.lhs,
            rhs: self.rhs,
            condition: self.property.condition(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairCheck {
    Pass,
    Violation(PairWitness),
}

impl PairCheck {
    pub fn is_violation(&self) -> bool {
        matches!(self, PairCheck::Violation(_))
    }
}

/// Options for the pair falsifiers.
#[derive(Debug, Clone)]
pub struct MonotoneOptions {
    /// Random pairs live in the box `[0, radius]^n`; homogeneous growth
    /// makes far-field pairs uninformative.
    pub radius: f64,
    pub random_pairs: usize,
    pub seed: u64,
    /// Strict inequalities count as violated at or below this.
    pub zero_tol: f64,
    /// Weak inequalities count as violated below minus this.
    pub viol_tol: f64,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        MonotoneOptions {
            radius: 4.0,
            random_pairs: 256,
            seed: 0x5EED,
            zero_tol: 1e-12,
            viol_tol: 1e-9,
        }
    }
}

/// Evaluates the defining inequality of `property` on the ordered pair
/// `(x, y)` (both in the nonnegative orthant).
pub fn check_pair(
    inst: &TcpInstance,
    x: &[f64],
    y: &[f64],
    property: FnProperty,
    opts: &MonotoneOptions,
) -> Result<PairCheck, MonotoneError> {
    if x == y {
        return Err(MonotoneError::EqualPoints);
    }
    let fx = inst.field(x)?;
    let fy = inst.field(y)?;
    let diff = sub(x, y);
    let witness = |lhs: f64, rhs: f64| {
        PairCheck::Violation(PairWitness {
            x: x.to_vec(),
            y: y.to_vec(),
            lhs,
            rhs,
            property,
        })
    };
    let gap = || dot(&sub(&fx, &fy), &diff);
    let max_product = || -> f64 {
        diff.iter()
            .zip(fx.iter().zip(&fy))
            .map(|(d, (a, b))| d * (a - b))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let outcome = match property {
        FnProperty::PseudoMonotone => {
            let lhs = dot(&diff, &fy);
            let rhs = dot(&diff, &fx);
            if lhs >= 0.0 && rhs < -opts.viol_tol {
                witness(lhs, rhs)
            } else {
                PairCheck::Pass
            }
        }
        FnProperty::Monotone => {
            let g = gap();
            if g < -opts.viol_tol {
                witness(g, 0.0)
            } else {
                PairCheck::Pass
            }
        }
        FnProperty::StrictlyMonotone => {
            let g = gap();
            if g <= opts.zero_tol {
                witness(g, 0.0)
            } else {
                PairCheck::Pass
            }
        }
        FnProperty::StronglyMonotone => {
            let g = gap();
            let dist2 = dot(&diff, &diff);
            if g <= opts.zero_tol {
                witness(g, dist2)
            } else {
                PairCheck::Pass
            }
        }
        FnProperty::P0Function => {
            // All products on differing components strictly negative.
            let mut worst = f64::NEG_INFINITY;
            for (d, (a, b)) in diff.iter().zip(fx.iter().zip(&fy)) {
                if *d != 0.0 {
                    worst = worst.max(d * (a - b));
                }
            }
            if worst < -opts.viol_tol {
                witness(worst, 0.0)
            } else {
                PairCheck::Pass
            }
        }
        FnProperty::PFunction => {
            let value = max_product();
            if value <= opts.zero_tol {
                witness(value, 0.0)
            } else {
                PairCheck::Pass
            }
        }
        FnProperty::UniformPFunction => {
            let value = max_product();
            let dist2 = dot(&diff, &diff);
            if value <= opts.zero_tol {
                witness(value, dist2)
            } else {
                PairCheck::Pass
            }
        }
    };
    Ok(outcome)
}

/// Deterministic point pool: origin, scaled coordinate vectors, scaled
/// coordinate pairs, scaled all-ones; scales are dyadic so golden pairs
/// evaluate exactly.
fn structured_points(n: usize) -> Vec<Vec<f64>> {
    let scales = [0.25, 0.5, 1.0, 2.0];
    let mut points = vec![vec![0.0; n]];
    for &s in &scales {
        for i in 0..n {
            let mut p = vec![0.0; n];
            p[i] = s;
            points.push(p);
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut p = vec![0.0; n];
                p[i] = s;
                p[j] = s;
                points.push(p);
            }
        }
        points.push(vec![s; n]);
    }
    points
}

/// Scans structured then seeded random ordered pairs for a violation of
/// `property`; the first one found (lowest pool index) becomes the witness.
pub fn falsify(inst: &TcpInstance, property: FnProperty, opts: &MonotoneOptions) -> ClassVerdict {
    let n = inst.dim();
    let points = structured_points(n);
    let mut pairs_checked = 0usize;
    let mut modulus: Option<f64> = None;
    let scan = |x: &[f64], y: &[f64], pairs_checked: &mut usize| -> Option<PairWitness> {
        if x == y {
            return None;
        }
        *pairs_checked += 1;
        match check_pair(inst, x, y, property, opts) {
            Ok(PairCheck::Violation(w)) => Some(w),
            _ => None,
        }
    };
    let mut found: Option<PairWitness> = None;
    'outer: for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some(w) = scan(x, y, &mut pairs_checked) {
                found = Some(w);
                break 'outer;
            }
        }
    }
    if found.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.random_pairs {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..opts.radius)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..opts.radius)).collect();
            if let Some(w) = scan(&x, &y, &mut pairs_checked) {
                found = Some(w);
                break;
            }
        }
    }
    if matches!(
        property,
        FnProperty::StronglyMonotone | FnProperty::UniformPFunction
    ) && found.is_none()
    {
        modulus = Some(estimate_modulus(inst, property, &points, opts));
    }
    match found {
        Some(w) => ClassVerdict {
            class: property.into(),
            verdict: Verdict::NonMember,
            certificate: Certificate::Witness(w.into_witness()),
            complete: true,
            citations: vec![],
        },
        None => ClassVerdict {
            class: property.into(),
            verdict: Verdict::NoCounterexampleFound,
            certificate: Certificate::Search(SearchRecord {
                starts: 0,
                evaluations: pairs_checked,
                faces: 0,
                pairs: pairs_checked,
                best_value: None,
                estimated_modulus: modulus,
                seed: opts.seed,
            }),
            complete: true,
            citations: vec![],
        },
    }
}

/// Infimum of the defining ratio over the structured pool (Euclidean
/// norm); a sample statistic, not a certificate.
fn estimate_modulus(
    inst: &TcpInstance,
    property: FnProperty,
    points: &[Vec<f64>],
    _opts: &MonotoneOptions,
) -> f64 {
    let mut infimum = f64::INFINITY;
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            if i == j || x == y {
                continue;
            }
            let (Ok(fx), Ok(fy)) = (inst.field(x), inst.field(y)) else {
                continue;
            };
            let diff = sub(x, y);
            let dist2 = dot(&diff, &diff);
            if dist2 == 0.0 {
                continue;
            }
            let value = match property {
                FnProperty::StronglyMonotone => dot(&sub(&fx, &fy), &diff),
                _ => diff
                    .iter()
                    .zip(fx.iter().zip(&fy))
                    .map(|(d, (a, b))| d * (a - b))
                    .fold(f64::NEG_INFINITY, f64::max),
            };
            infimum = infimum.min(value / dist2);
        }
    }
    infimum
}

/// Runs every property falsifier on one instance (shared pool and order).
pub fn falsify_all(inst: &TcpInstance, opts: &MonotoneOptions) -> Vec<ClassVerdict> {
    FnProperty::ALL
        .iter()
        .map(|&p| falsify(inst, p, opts))
        .collect()
}

/// Property implications: `(stronger, weaker)`; a certified violation of
/// the weaker side must come with one for the stronger side.
pub const FN_LADDER: [(FnProperty, FnProperty); 8] = [
    (FnProperty::StronglyMonotone, FnProperty::StrictlyMonotone),
    (FnProperty::StrictlyMonotone, FnProperty::Monotone),
    (FnProperty::Monotone, FnProperty::PseudoMonotone),
    (FnProperty::StronglyMonotone, FnProperty::UniformPFunction),
    (FnProperty::StrictlyMonotone, FnProperty::PFunction),
    (FnProperty::Monotone, FnProperty::P0Function),
    (FnProperty::UniformPFunction, FnProperty::PFunction),
    (FnProperty::PFunction, FnProperty::P0Function),
];

/// Bookkeeping audit: no stronger property may stand unviolated while a
/// weaker one (which it implies) carries a certified violation.
pub fn fn_ladder_audit(verdicts: &[ClassVerdict]) -> Vec<String> {
    let lookup = |p: FnProperty| -> Option<Verdict> {
        verdicts
            .iter()
            .find(|v| v.class == crate::oracles::ClassId::Function(p))
            .map(|v| v.verdict)
    };
    let mut violations = Vec::new();
    for (stronger, weaker) in FN_LADDER {
        if lookup(weaker) == Some(Verdict::NonMember)
            && lookup(stronger).is_some_and(|v| v != Verdict::NonMember)
        {
            violations.push(format!(
                "{weaker} has a certified violation but {stronger} does not"
            ));
        }
    }
    violations
}

/// Consistency report of [`p_function_implies_r_probe`].
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// Falsifier verdict for the P-function property of `x -> A x^{m-1}`.
    pub p_function: ClassVerdict,
    /// Falsifier verdict for the P condition restricted to the orthant.
    pub p_tensor_orthant: ClassVerdict,
    pub consistent: bool,
    pub notes: Vec<String>,
}

/// Cross-checks the bridge "P function (with `y = 0`) forces the orthant P
/// condition": a witness on either side must replay on the other. Any
/// mismatch is an internal inconsistency and is reported.
pub fn p_function_implies_r_probe(
    tensor: &Tensor,
    mono_opts: &MonotoneOptions,
    oracle_opts: &OracleOptions,
) -> Result<ConsistencyReport, MonotoneError> {
    let inst = TcpInstance::new(tensor.clone(), vec![0.0; tensor.dim()])?;
    let p_function = falsify(&inst, FnProperty::PFunction, mono_opts);
    let p_tensor_orthant = falsify_p_orthant(tensor, oracle_opts);
    let mut consistent = true;
    let mut notes = Vec::new();
    if let Certificate::Witness(Witness::Vector { x, .. }) = &p_tensor_orthant.certificate {
        // An orthant P-counterexample must violate the P-function property
        // against the origin.
        let zero = vec![0.0; tensor.dim()];
        match check_pair(&inst, x, &zero, FnProperty::PFunction, mono_opts) {
            Ok(check) if check.is_violation() => {
                notes.push(String::from(
                    "orthant witness replays as a (x, 0) pair violation",
                ));
            }
            Ok(_) => {
                consistent = false;
                notes.push(String::from(
                    "orthant witness failed to violate the P-function property at (x, 0)",
                ));
            }
            Err(e) => {
                consistent = false;
                notes.push(format!("orthant witness could not be replayed: {e}"));
            }
        }
    }
    if let Certificate::Witness(Witness::Pair { x, y, .. }) = &p_function.certificate {
        if y.iter().all(|&v| v == 0.0) && x.iter().all(|&v| v >= 0.0) {
            let value = p_condition_value(tensor, x);
            if value <= oracle_opts.zero_tol {
                notes.push(String::from(
                    "pair witness with y = 0 replays as an orthant violation",
                ));
            } else {
                consistent = false;
                notes.push(format!(
                    "pair witness with y = 0 has orthant P value {value} > 0"
                ));
            }
        }
    }
    Ok(ConsistencyReport {
        p_function,
        p_tensor_orthant,
        consistent,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{example, ExampleId};

    fn ex23_instance() -> TcpInstance {
        TcpInstance::new(example(&ExampleId::Ex23).unwrap(), vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn golden_pair_arithmetic_is_exact() {
        let inst = ex23_instance();
        let fx = inst.field(&[1.0, 0.0]).unwrap();
        let fy = inst.field(&[0.0, 0.25]).unwrap();
        assert_eq!(fx, vec![-0.5, -1.5]);
        assert_eq!(fy, vec![9.0 / 16.0, 9.0 / 16.0]);
        let diff = sub(&[1.0, 0.0], &[0.0, 0.25]);
        assert_eq!(dot(&diff, &fy), 27.0 / 64.0);
        assert_eq!(dot(&diff, &fx), -1.0 / 8.0);
    }

    #[test]
    fn pseudo_monotone_violation_on_golden_pair() {
        let inst = ex23_instance();
        let opts = MonotoneOptions::default();
        let check = check_pair(
            &inst,
            &[1.0, 0.0],
            &[0.0, 0.25],
            FnProperty::PseudoMonotone,
            &opts,
        )
        .unwrap();
        match check {
            PairCheck::Violation(w) => {
                assert_eq!(w.lhs, 27.0 / 64.0);
                assert_eq!(w.rhs, -1.0 / 8.0);
            }
            PairCheck::Pass => panic!("golden pair must violate pseudo-monotonicity"),
        }
    }

    #[test]
    fn p0_violation_on_golden_pair() {
        let inst = ex23_instance();
        let opts = MonotoneOptions::default();
        let check = check_pair(
            &inst,
            &[1.0, 1.0],
            &[0.0, 0.25],
            FnProperty::P0Function,
            &opts,
        )
        .unwrap();
        assert!(
            check.is_violation(),
            "both componentwise products are negative"
        );
        assert_eq!(inst.field(&[1.0, 1.0]).unwrap(), vec![0.5, -0.5]);
    }

    #[test]
    fn monotone_pass_for_diagonal_even_order() {
        // (F(x)-F(y))'(x-y) = sum (x_i^{m-1} - y_i^{m-1})(x_i - y_i) >= 0
        // for odd powers.
        let tensor = example(&ExampleId::IdentityDiagonal { order: 4, dim: 2 }).unwrap();
        let inst = TcpInstance::new(tensor, vec![0.3, -0.7]).unwrap();
        let opts = MonotoneOptions::default();
        let check =
            check_pair(&inst, &[1.0, 0.0], &[0.0, 1.0], FnProperty::Monotone, &opts).unwrap();
        assert!(!check.is_violation());
        let verdict = falsify(&inst, FnProperty::Monotone, &opts);
        assert_eq!(verdict.verdict, Verdict::NoCounterexampleFound);
    }

    #[test]
    fn equal_points_are_an_error() {
        let inst = ex23_instance();
        let opts = MonotoneOptions::default();
        let err =
            check_pair(&inst, &[1.0, 2.0], &[1.0, 2.0], FnProperty::Monotone, &opts).unwrap_err();
        assert_eq!(err, MonotoneError::EqualPoints);
    }

    #[test]
    fn falsify_finds_golden_violations_within_budget() {
        let inst = ex23_instance();
        let opts = MonotoneOptions::default();
        let pseudo = falsify(&inst, FnProperty::PseudoMonotone, &opts);
        assert_eq!(pseudo.verdict, Verdict::NonMember);
        let p0 = falsify(&inst, FnProperty::P0Function, &opts);
        assert_eq!(p0.verdict, Verdict::NonMember);
    }

    #[test]
    fn shared_pool_keeps_the_ladder_consistent() {
        let inst = ex23_instance();
        let opts = MonotoneOptions::default();
        let verdicts = falsify_all(&inst, &opts);
        assert!(fn_ladder_audit(&verdicts).is_empty());
    }

    #[test]
    fn probe_is_consistent_on_golden_tensors() {
        let oracle_opts = OracleOptions::default();
        let mono_opts = MonotoneOptions::default();
        for id in [ExampleId::Ex23, ExampleId::AllOnes { order: 3, dim: 2 }] {
            let tensor = example(&id).unwrap();
            let report = p_function_implies_r_probe(&tensor, &mono_opts, &oracle_opts).unwrap();
            assert!(report.consistent, "probe disagreed: {:?}", report.notes);
            assert_eq!(report.p_function.verdict, Verdict::NonMember);
        }
        let identity = example(&ExampleId::IdentityDiagonal { order: 4, dim: 2 }).unwrap();
        let report = p_function_implies_r_probe(&identity, &mono_opts, &oracle_opts).unwrap();
        assert!(report.consistent);
        assert_eq!(report.p_function.verdict, Verdict::NoCounterexampleFound);
    }
}
