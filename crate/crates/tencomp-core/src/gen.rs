//! Canonical built-in instances and seeded random tensor generators.
//!
//! The built-ins are the small golden instances used across the test
//! corpus: `ex2.1` (the all-ones tensor, parameterized by shape), `ex2.2`
//! and `ex2.3` (an order-3, dim-2 pair whose entries differ in one sign and
//! which separate the R0/R/strictly-semi-positive classes), and `identity`
//! (ones on the diagonal, zero elsewhere).
//!
//! Random generation is reproducible: the same [`GenSpec`] always yields
//! the same tensor, entry for entry.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // f64 math via the trait under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{for_each_permutation, Tensor, TensorError, DENSE_CAP};

#[derive(Debug, Clone, PartialEq)]
pub enum GenError {
    Tensor(TensorError),
    UnknownExample(String),
    /// `ex2.1` and `identity` need an explicit shape.
    ShapeRequired(String),
    DensityOutOfRange(f64),
    /// The full index space `dim^order` is too large to enumerate.
    TooLarge {
        order: usize,
        dim: usize,
    },
    DiagonalIndexOutOfRange {
        index: usize,
        dim: usize,
    },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::Tensor(e) => write!(f, "{e}"),
            GenError::UnknownExample(name) => write!(f, "unknown example '{name}'"),
            GenError::ShapeRequired(name) => {
                write!(f, "example '{name}' needs explicit order and dim")
            }
            GenError::DensityOutOfRange(d) => {
                write!(f, "density must lie in (0, 1], got {d}")
            }
            GenError::TooLarge { order, dim } => {
                write!(f, "index space {dim}^{order} exceeds the generation cap")
            }
            GenError::DiagonalIndexOutOfRange { index, dim } => {
                write!(f, "diagonal index {index} out of range for dimension {dim}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GenError {}

impl From<TensorError> for GenError {
    fn from(e: TensorError) -> Self {
        GenError::Tensor(e)
    }
}

/// Built-in instance names accepted by the generators and the CLI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExampleId {
    /// `ex2.1`: every entry 1.
    AllOnes { order: usize, dim: usize },
    /// `ex2.2`: order 3, dim 2; entries (1,1,1)=1, (1,2,2)=-1, (2,1,1)=-2,
    /// (2,2,2)=1 in 1-based indexing.
    Ex22,
    /// `ex2.3`: like `ex2.2` with the first slice flipped: (1,1,1)=-1,
    /// (1,2,2)=1.
    Ex23,
    /// Ones on the diagonal, zeros elsewhere.
    IdentityDiagonal { order: usize, dim: usize },
}

impl ExampleId {
    /// Parses a CLI-style name; `ex2.1` and `identity` take their shape
    /// from the optional parameters.
    pub fn parse(name: &str, order: Option<usize>, dim: Option<usize>) -> Result<Self, GenError> {
        match name {
            "ex2.1" => match (order, dim) {
                (Some(order), Some(dim)) => Ok(ExampleId::AllOnes { order, dim }),
                _ => Err(GenError::ShapeRequired(String::from(name))),
            },
            "ex2.2" => Ok(ExampleId::Ex22),
            "ex2.3" => Ok(ExampleId::Ex23),
            "identity" => match (order, dim) {
                (Some(order), Some(dim)) => Ok(ExampleId::IdentityDiagonal { order, dim }),
                _ => Err(GenError::ShapeRequired(String::from(name))),
            },
            other => Err(GenError::UnknownExample(String::from(other))),
        }
    }
}

/// Materializes a built-in instance.
pub fn example(id: &ExampleId) -> Result<Tensor, GenError> {
    match *id {
        ExampleId::AllOnes { order, dim } => all_ones(order, dim),
        ExampleId::Ex22 => Ok(Tensor::from_entries(
            3,
            2,
            &[
                (vec![0, 0, 0], 1.0),
                (vec![0, 1, 1], -1.0),
                (vec![1, 0, 0], -2.0),
                (vec![1, 1, 1], 1.0),
            ],
        )?),
        ExampleId::Ex23 => Ok(Tensor::from_entries(
            3,
            2,
            &[
                (vec![0, 0, 0], -1.0),
                (vec![0, 1, 1], 1.0),
                (vec![1, 0, 0], -2.0),
                (vec![1, 1, 1], 1.0),
            ],
        )?),
        ExampleId::IdentityDiagonal { order, dim } => identity_diagonal(order, dim),
    }
}

/// The all-ones tensor: `(A x^{m-1})_i = (x_1 + .. + x_n)^{m-1}`.
pub fn all_ones(order: usize, dim: usize) -> Result<Tensor, GenError> {
    let total = checked_space(order, dim)?;
    let mut entries = Vec::with_capacity(total);
    let mut tuple = vec![0usize; order];
    for _ in 0..total {
        entries.push((tuple.clone(), 1.0));
        increment(&mut tuple, dim);
    }
    Ok(Tensor::from_entries(order, dim, &entries)?)
}

/// Ones on the diagonal: `(A x^{m-1})_i = x_i^{m-1}`.
pub fn identity_diagonal(order: usize, dim: usize) -> Result<Tensor, GenError> {
    let entries: Vec<(Vec<usize>, f64)> = (0..dim).map(|i| (vec![i; order], 1.0)).collect();
    Ok(Tensor::from_entries(order, dim, &entries)?)
}

/// Entry populations for [`random`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Entries drawn from `|N(0,1)|`.
    Nonnegative,
    /// Drawn from `N(0,1)`, then symmetrized by averaging each index
    /// tuple's value over all `m!` permutations.
    Symmetric,
    /// Entries drawn from `N(0,1)`.
    General,
}

/// What to do with the diagonal after the draw; lets corpora force the
/// solvable / unsolvable regimes of nonnegative instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalMode {
    #[default]
    AsDrawn,
    /// Every diagonal entry redrawn as `|N(0,1)| + 0.1`.
    ForcePositive,
    /// The diagonal entry at this index removed (set to zero).
    ForceZeroAt(usize),
}

/// A reproducible random-tensor request.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub order: usize,
    pub dim: usize,
    pub seed: u64,
    /// Probability that an index tuple receives an entry, in `(0, 1]`.
    pub density: f64,
    pub diagonal: DiagonalMode,
}

impl GenSpec {
    pub fn new(kind: GenKind, order: usize, dim: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            order,
            dim,
            seed,
            density: 1.0,
            diagonal: DiagonalMode::AsDrawn,
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn with_diagonal(mut self, diagonal: DiagonalMode) -> Self {
        self.diagonal = diagonal;
        self
    }
}

/// Draws the tensor described by `spec`; identical specs yield identical
/// tensors.
pub fn random(spec: &GenSpec) -> Result<Tensor, GenError> {
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(GenError::DensityOutOfRange(spec.density));
    }
    if let DiagonalMode::ForceZeroAt(index) = spec.diagonal {
        if index >= spec.dim {
            return Err(GenError::DiagonalIndexOutOfRange {
                index,
                dim: spec.dim,
            });
        }
    }
    let total = checked_space(spec.order, spec.dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut raw: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut tuple = vec![0usize; spec.order];
    for _ in 0..total {
        if rng.gen::<f64>() < spec.density {
            let value = match spec.kind {
                GenKind::Nonnegative => normal(&mut rng).abs(),
                GenKind::Symmetric | GenKind::General => normal(&mut rng),
            };
            raw.insert(tuple.clone(), value);
        }
        increment(&mut tuple, spec.dim);
    }
    if spec.kind == GenKind::Symmetric {
        raw = symmetrize(raw, spec.order);
    }
    match spec.diagonal {
        DiagonalMode::AsDrawn => {}
        DiagonalMode::ForcePositive => {
            for i in 0..spec.dim {
                let value = normal(&mut rng).abs() + 0.1;
                raw.insert(vec![i; spec.order], value);
            }
        }
        DiagonalMode::ForceZeroAt(index) => {
            raw.remove(&vec![index; spec.order]);
        }
    }
    let entries: Vec<(Vec<usize>, f64)> = raw.into_iter().collect();
    Ok(Tensor::from_entries(spec.order, spec.dim, &entries)?)
}

/// Seeded batch of right-hand sides with entries uniform on `[-2, 2]`,
/// the convention used for solvability probing.
pub fn q_batch(dim: usize, seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect()
}

/// Exact symmetrization: each touched permutation class takes the average
/// of its drawn values over all `m!` index permutations, then fills every
/// distinct position of the class.
fn symmetrize(raw: BTreeMap<Vec<usize>, f64>, order: usize) -> BTreeMap<Vec<usize>, f64> {
    let mut classes: BTreeSet<Vec<usize>> = BTreeSet::new();
    for tuple in raw.keys() {
        let mut class = tuple.clone();
        class.sort_unstable();
        classes.insert(class);
    }
    let factorial: f64 = (1..=order).map(|k| k as f64).product();
    let mut out = BTreeMap::new();
    for class in classes {
        let mut representative: Vec<u32> = class.iter().map(|&i| i as u32).collect();
        let mut sum = 0.0;
        let mut positions: BTreeSet<Vec<usize>> = BTreeSet::new();
        for_each_permutation(&mut representative, |perm| {
            let position: Vec<usize> = perm.iter().map(|&i| i as usize).collect();
            sum += raw.get(&position).copied().unwrap_or(0.0);
            positions.insert(position);
        });
        let value = sum / factorial;
        if value != 0.0 {
            for position in positions {
                out.insert(position, value);
            }
        }
    }
    out
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller on two uniforms; the log argument stays positive.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

fn checked_space(order: usize, dim: usize) -> Result<usize, GenError> {
    if order < 2 {
        return Err(GenError::Tensor(TensorError::OrderTooSmall { order }));
    }
    if dim == 0 {
        return Err(GenError::Tensor(TensorError::ZeroDim));
    }
    let mut total: usize = 1;
    for _ in 0..order {
        total = total
            .checked_mul(dim)
            .ok_or(GenError::TooLarge { order, dim })?;
        if total > DENSE_CAP {
            return Err(GenError::TooLarge { order, dim });
        }
    }
    Ok(total)
}

fn increment(tuple: &mut [usize], dim: usize) {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < dim {
            return;
        }
        *slot = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex22_contracts_as_printed() {
        let t = example(&ExampleId::Ex22).unwrap();
        assert_eq!(t.contract(&[1.0, 1.0]).unwrap(), vec![0.0, -1.0]);
    }

    #[test]
    fn ex23_contracts_as_printed() {
        let t = example(&ExampleId::Ex23).unwrap();
        assert_eq!(t.contract(&[1.0, 1.0]).unwrap(), vec![0.0, -1.0]);
        assert_eq!(t.diagonal(), vec![-1.0, 1.0]);
    }

    #[test]
    fn all_ones_shape_and_contraction() {
        let t = example(&ExampleId::AllOnes { order: 3, dim: 2 }).unwrap();
        assert_eq!(t.nnz(), 8);
        assert_eq!(t.contract(&[1.0, 1.0]).unwrap(), vec![4.0, 4.0]);
        let wide = all_ones(3, 4).unwrap();
        assert_eq!(wide.nnz(), 64);
    }

    #[test]
    fn parse_names() {
        assert!(matches!(
            ExampleId::parse("ex2.2", None, None),
            Ok(ExampleId::Ex22)
        ));
        assert!(matches!(
            ExampleId::parse("ex2.1", Some(3), Some(4)),
            Ok(ExampleId::AllOnes { order: 3, dim: 4 })
        ));
        assert!(matches!(
            ExampleId::parse("ex2.1", None, None),
            Err(GenError::ShapeRequired(_))
        ));
        assert!(matches!(
            ExampleId::parse("nope", None, None),
            Err(GenError::UnknownExample(_))
        ));
    }

    #[test]
    fn random_nonnegative_is_nonnegative() {
        let spec = GenSpec::new(GenKind::Nonnegative, 3, 3, 1);
        let t = random(&spec).unwrap();
        assert!(t.is_nonnegative());
        assert!(t.nnz() > 0);
    }

    #[test]
    fn random_symmetric_is_symmetric() {
        let spec = GenSpec::new(GenKind::Symmetric, 4, 2, 2).with_density(0.6);
        let t = random(&spec).unwrap();
        assert!(t.is_symmetric());
    }

    #[test]
    fn same_spec_same_tensor() {
        let spec = GenSpec::new(GenKind::General, 3, 4, 9).with_density(0.3);
        let a = random(&spec).unwrap();
        let b = random(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forced_diagonal_modes() {
        let spec = GenSpec::new(GenKind::Nonnegative, 3, 3, 5)
            .with_density(0.5)
            .with_diagonal(DiagonalMode::ForcePositive);
        let t = random(&spec).unwrap();
        assert!(t.diagonal().iter().all(|&d| d >= 0.1));
        let spec = spec.with_diagonal(DiagonalMode::ForceZeroAt(1));
        let t = random(&spec).unwrap();
        assert_eq!(t.diagonal()[1], 0.0);
    }

    #[test]
    fn density_validation() {
        let spec = GenSpec::new(GenKind::General, 3, 2, 0).with_density(0.0);
        assert!(matches!(random(&spec), Err(GenError::DensityOutOfRange(_))));
    }
}
