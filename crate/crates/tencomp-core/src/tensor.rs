//! Tensor storage and the multilinear operations everything else consumes.
//!
//! A [`Tensor`] is an order-`m`, dimension-`n` real multi-array held in
//! coordinate form: a lexicographically sorted list of `(index tuple, value)`
//! pairs with implicit zeros. Small tensors can additionally carry a dense
//! row-major buffer; both storage paths accumulate in the same fixed order
//! (ascending lexicographic over nonzero tuples) so results are
//! bit-identical.
//!
//! Indices are 0-based throughout the core API. File formats are 1-based and
//! converted at the IO boundary.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Densify only while the full index space stays below this many entries.
pub const DENSE_CAP: usize = 10_000_000;

/// Errors from tensor construction and the multilinear kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorError {
    /// Order must be at least 2.
    OrderTooSmall { order: usize },
    /// Dimension must be at least 1.
    ZeroDim,
    /// An index tuple had the wrong number of components.
    TupleLength { expected: usize, got: usize },
    /// An index component fell outside `0..dim`.
    IndexOutOfRange { index: usize, dim: usize },
    /// The same index tuple appeared twice.
    DuplicateTuple { tuple: Vec<usize> },
    /// A vector's length did not match the tensor dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A support pattern must select at least one index.
    EmptySupport,
    /// Support indices must be strictly increasing.
    SupportNotIncreasing,
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::OrderTooSmall { order } => {
                write!(f, "tensor order must be >= 2, got {order}")
            }
            TensorError::ZeroDim => write!(f, "tensor dimension must be >= 1"),
            TensorError::TupleLength { expected, got } => {
                write!(f, "index tuple has {got} components, expected {expected}")
            }
            TensorError::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            TensorError::DuplicateTuple { tuple } => {
                write!(f, "duplicate index tuple {tuple:?}")
            }
            TensorError::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "vector length {got} does not match tensor dimension {expected}"
                )
            }
            TensorError::EmptySupport => write!(f, "support pattern is empty"),
            TensorError::SupportNotIncreasing => {
                write!(f, "support indices must be strictly increasing")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TensorError {}

/// Ordered subset `J` of `0..n`: the indices allowed to be positive in a
/// candidate solution, and the index set of a principal sub-tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    indices: Vec<usize>,
    dim: usize,
}

impl Support {
    /// Builds a support from strictly increasing indices in `0..dim`.
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self, TensorError> {
        if indices.is_empty() {
            return Err(TensorError::EmptySupport);
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(TensorError::SupportNotIncreasing);
        }
        let last = *indices.last().expect("nonempty");
        if last >= dim {
            return Err(TensorError::IndexOutOfRange { index: last, dim });
        }
        Ok(Support { indices, dim })
    }

    /// The full index set `0..dim`.
    pub fn full(dim: usize) -> Self {
        Support {
            indices: (0..dim).collect(),
            dim,
        }
    }

    /// Decodes a nonzero bitmask (bit `i` selects index `i`); only the
    /// first `usize::BITS` indices are addressable this way.
    pub fn from_bitmask(mask: usize, dim: usize) -> Option<Self> {
        let width = usize::BITS as usize;
        if mask == 0 || dim == 0 || (dim < width && mask >> dim != 0) {
            return None;
        }
        let indices = (0..dim.min(width)).filter(|i| mask >> i & 1 == 1).collect();
        Some(Support { indices, dim })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Scatters a support-local vector into a full `dim`-length vector.
    pub fn scatter(&self, local: &[f64]) -> Vec<f64> {
        debug_assert_eq!(local.len(), self.indices.len());
        let mut full = vec![0.0; self.dim];
        for (slot, &i) in self.indices.iter().enumerate() {
            full[i] = local[slot];
        }
        full
    }

    /// Gathers the support components out of a full `dim`-length vector.
    pub fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| full[i]).collect()
    }
}

/// Order-`m`, dimension-`n` real tensor in sorted coordinate form, with an
/// optional dense buffer for fast random access.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    /// Flattened tuples: entry `k` occupies `idx[k*order..(k+1)*order]`.
    idx: Vec<u32>,
    val: Vec<f64>,
    dense: Option<Vec<f64>>,
}

impl Tensor {
    /// Builds a tensor from coordinate entries. Tuples may arrive in any
    /// order; they are sorted lexicographically. Duplicates are an error.
    pub fn from_entries(
        order: usize,
        dim: usize,
        entries: &[(Vec<usize>, f64)],
    ) -> Result<Self, TensorError> {
        if order < 2 {
            return Err(TensorError::OrderTooSmall { order });
        }
        if dim == 0 {
            return Err(TensorError::ZeroDim);
        }
        let mut tagged: Vec<(Vec<u32>, f64)> = Vec::with_capacity(entries.len());
        for (tuple, value) in entries {
            if tuple.len() != order {
                return Err(TensorError::TupleLength {
                    expected: order,
                    got: tuple.len(),
                });
            }
            let mut packed = Vec::with_capacity(order);
            for &component in tuple {
                if component >= dim {
                    return Err(TensorError::IndexOutOfRange {
                        index: component,
                        dim,
                    });
                }
                packed.push(component as u32);
            }
            tagged.push((packed, *value));
        }
        tagged.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in tagged.windows(2) {
            if pair[0].0 == pair[1].0 {
                let tuple = pair[0].0.iter().map(|&i| i as usize).collect();
                return Err(TensorError::DuplicateTuple { tuple });
            }
        }
        let mut idx = Vec::with_capacity(tagged.len() * order);
        let mut val = Vec::with_capacity(tagged.len());
        for (tuple, value) in tagged {
            idx.extend_from_slice(&tuple);
            val.push(value);
        }
        Ok(Tensor {
            order,
            dim,
            idx,
            val,
            dense: None,
        })
    }

    /// The zero tensor.
    pub fn zeros(order: usize, dim: usize) -> Result<Self, TensorError> {
        Tensor::from_entries(order, dim, &[])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored coordinate entries.
    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    /// Iterates stored entries in ascending lexicographic tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.idx
            .chunks_exact(self.order)
            .zip(self.val.iter().copied())
    }

    /// Total size of the full index space, if it fits in a `usize`.
    pub fn index_space(&self) -> Option<usize> {
        let mut total: usize = 1;
        for _ in 0..self.order {
            total = total.checked_mul(self.dim)?;
        }
        Some(total)
    }

    /// Populates the dense buffer when the index space is within
    /// [`DENSE_CAP`]; a no-op otherwise. Operations stay bit-identical with
    /// the coordinate path.
    pub fn densify(&mut self) {
        if self.dense.is_some() {
            return;
        }
        let Some(total) = self.index_space() else {
            return;
        };
        if total > DENSE_CAP {
            return;
        }
        let mut buf = vec![0.0; total];
        for (tuple, value) in self.entries() {
            buf[flat_offset(tuple, self.dim)] = value;
        }
        self.dense = Some(buf);
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    /// Entry at an index tuple (0 when unstored).
    pub fn value_at(&self, tuple: &[usize]) -> f64 {
        debug_assert_eq!(tuple.len(), self.order);
        if let Some(dense) = &self.dense {
            let mut offset = 0usize;
            for &component in tuple {
                offset = offset * self.dim + component;
            }
            return dense[offset];
        }
        let mut packed = [0u32; 16];
        let mut spill;
        let key: &[u32] = if self.order <= 16 {
            for (slot, &component) in tuple.iter().enumerate() {
                packed[slot] = component as u32;
            }
            &packed[..self.order]
        } else {
            spill = Vec::with_capacity(self.order);
            spill.extend(tuple.iter().map(|&c| c as u32));
            &spill
        };
        match binary_search_tuple(&self.idx, self.order, key) {
            Some(slot) => self.val[slot],
            None => 0.0,
        }
    }

    /// The contraction `A x^{m-1}`: component `i` is
    /// `sum a_{i i2..im} x_{i2} .. x_{im}`. Terms accumulate in ascending
    /// lexicographic tuple order, skipping exact zeros, so the coordinate and
    /// dense paths agree bitwise.
    pub fn contract(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim];
        if let Some(dense) = &self.dense {
            let mut tuple = vec![0usize; self.order];
            for &value in dense.iter() {
                if value != 0.0 {
                    let mut term = value;
                    for &component in &tuple[1..] {
                        term *= x[component];
                    }
                    out[tuple[0]] += term;
                }
                increment_tuple(&mut tuple, self.dim);
            }
        } else {
            for (tuple, value) in self.entries() {
                if value == 0.0 {
                    continue;
                }
                let mut term = value;
                for &component in &tuple[1..] {
                    term *= x[component as usize];
                }
                out[tuple[0] as usize] += term;
            }
        }
        Ok(out)
    }

    /// The homogeneous form `A x^m = x' (A x^{m-1})`, accumulated directly
    /// over stored tuples in lexicographic order.
    pub fn polyval(&self, x: &[f64]) -> Result<f64, TensorError> {
        self.check_dim(x)?;
        let mut acc = 0.0;
        if let Some(dense) = &self.dense {
            let mut tuple = vec![0usize; self.order];
            for &value in dense.iter() {
                if value != 0.0 {
                    let mut term = value;
                    for &component in &tuple {
                        term *= x[component];
                    }
                    acc += term;
                }
                increment_tuple(&mut tuple, self.dim);
            }
        } else {
            for (tuple, value) in self.entries() {
                if value == 0.0 {
                    continue;
                }
                let mut term = value;
                for &component in tuple {
                    term *= x[component as usize];
                }
                acc += term;
            }
        }
        Ok(acc)
    }

    /// Jacobian of `x -> A x^{m-1}` as a row-major `n x n` matrix, assembled
    /// exactly: each stored tuple contributes, at every trailing position,
    /// the product of its other trailing components.
    pub fn contract_jacobian(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        self.check_dim(x)?;
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for (tuple, value) in self.entries() {
            if value == 0.0 {
                continue;
            }
            let row = tuple[0] as usize;
            for position in 1..self.order {
                let mut partial = value;
                for (slot, &component) in tuple.iter().enumerate().skip(1) {
                    if slot != position {
                        partial *= x[component as usize];
                    }
                }
                out[row * n + tuple[position] as usize] += partial;
            }
        }
        Ok(out)
    }

    /// Gradient of `x -> A x^m`, exact for arbitrary (not necessarily
    /// symmetric) tensors; for symmetric `A` it equals `m * A x^{m-1}`.
    pub fn polyval_gradient(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim];
        for (tuple, value) in self.entries() {
            if value == 0.0 {
                continue;
            }
            for position in 0..self.order {
                let mut partial = value;
                for (slot, &component) in tuple.iter().enumerate() {
                    if slot != position {
                        partial *= x[component as usize];
                    }
                }
                out[tuple[position] as usize] += partial;
            }
        }
        Ok(out)
    }

    /// Principal sub-tensor: entries with every index in `J`, re-indexed to
    /// `0..|J|`. For `|J| = 1` this is the 1-dim tensor holding the diagonal
    /// entry.
    pub fn principal_subtensor(&self, support: &Support) -> Result<Tensor, TensorError> {
        if support.dim() != self.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                got: support.dim(),
            });
        }
        let mut position = vec![usize::MAX; self.dim];
        for (slot, &i) in support.indices().iter().enumerate() {
            position[i] = slot;
        }
        let mut entries = Vec::new();
        'outer: for (tuple, value) in self.entries() {
            let mut local = Vec::with_capacity(self.order);
            for &component in tuple {
                let slot = position[component as usize];
                if slot == usize::MAX {
                    continue 'outer;
                }
                local.push(slot);
            }
            entries.push((local, value));
        }
        Tensor::from_entries(self.order, support.len(), &entries)
    }

    /// The diagonal `(a_{ii..i})_{i in 0..n}`.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut diag = vec![0.0; self.dim];
        let mut tuple = vec![0usize; self.order];
        for (i, slot) in diag.iter_mut().enumerate() {
            tuple.fill(i);
            *slot = self.value_at(&tuple);
        }
        diag
    }

    /// Exhaustive check that every stored entry is invariant under index
    /// permutations (unstored positions count as zero).
    pub fn is_symmetric(&self) -> bool {
        let mut scratch = vec![0u32; self.order];
        let mut tuple = vec![0usize; self.order];
        for (stored, value) in self.entries() {
            scratch.copy_from_slice(stored);
            let mut ok = true;
            for_each_permutation(&mut scratch, |perm| {
                if ok {
                    for (slot, &component) in perm.iter().enumerate() {
                        tuple[slot] = component as usize;
                    }
                    if self.value_at(&tuple) != value {
                        ok = false;
                    }
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }

    /// True when every stored entry is `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.val.iter().all(|&v| v >= 0.0)
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), TensorError> {
        if x.len() != self.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

fn flat_offset(tuple: &[u32], dim: usize) -> usize {
    let mut offset = 0usize;
    for &component in tuple {
        offset = offset * dim + component as usize;
    }
    offset
}

fn increment_tuple(tuple: &mut [usize], dim: usize) {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < dim {
            return;
        }
        *slot = 0;
    }
}

fn binary_search_tuple(idx: &[u32], order: usize, key: &[u32]) -> Option<usize> {
    let count = idx.len() / order;
    let mut lo = 0usize;
    let mut hi = count;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let tuple = &idx[mid * order..(mid + 1) * order];
        match tuple.cmp(key) {
            core::cmp::Ordering::Less => lo = mid + 1,
            core::cmp::Ordering::Greater => hi = mid,
            core::cmp::Ordering::Equal => return Some(mid),
        }
    }
    None
}

/// Calls `visit` on every permutation of `items` (Heap's algorithm; `m!`
/// calls, duplicates included for repeated components).
pub(crate) fn for_each_permutation<F: FnMut(&[u32])>(items: &mut [u32], mut visit: F) {
    fn heap<F: FnMut(&[u32])>(items: &mut [u32], k: usize, visit: &mut F) {
        if k <= 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            heap(items, k - 1, visit);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let len = items.len();
    heap(items, len, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn all_ones(order: usize, dim: usize) -> Tensor {
        let mut entries = Vec::new();
        let mut tuple = vec![0usize; order];
        let total = dim.pow(order as u32);
        for _ in 0..total {
            entries.push((tuple.clone(), 1.0));
            increment_tuple(&mut tuple, dim);
        }
        Tensor::from_entries(order, dim, &entries).unwrap()
    }

    // Order-3, dim-2 instance with entries a_111=1, a_122=-1, a_211=-2,
    // a_222=1 (0-based below).
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

    // Same but a_111=-1, a_122=+1.
    fn ex23() -> Tensor {
        Tensor::from_entries(
            3,
            2,
            &[
                (vec![0, 0, 0], -1.0),
                (vec![0, 1, 1], 1.0),
                (vec![1, 0, 0], -2.0),
                (vec![1, 1, 1], 1.0),
            ],
        )
        .unwrap()
    }

    /// Independent oracle: contraction by brute-force loop over the full
    /// index space through `value_at`.
    fn brute_contract(t: &Tensor, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; t.dim()];
        let mut tuple = vec![0usize; t.order()];
        let total = t.index_space().unwrap();
        for _ in 0..total {
            let a = t.value_at(&tuple);
            if a != 0.0 {
                let mut term = a;
                for &c in &tuple[1..] {
                    term *= x[c];
                }
                out[tuple[0]] += term;
            }
            increment_tuple(&mut tuple, t.dim());
        }
        out
    }

    #[test]
    fn contract_all_ones() {
        let t = all_ones(3, 2);
        let out = t.contract(&[1.0, 1.0]).unwrap();
        assert_eq!(out, vec![4.0, 4.0]);
    }

    #[test]
    fn contract_ex22_at_ones() {
        let out = ex22().contract(&[1.0, 1.0]).unwrap();
        assert_eq!(out, vec![0.0, -1.0]);
    }

    #[test]
    fn contract_at_zero_is_zero() {
        let out = ex23().contract(&[0.0, 0.0]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn contract_matches_brute_force() {
        for t in [all_ones(3, 2), ex22(), ex23(), all_ones(4, 3)] {
            let x: Vec<f64> = (0..t.dim()).map(|i| 0.3 * i as f64 - 0.7).collect();
            assert_eq!(t.contract(&x).unwrap(), brute_contract(&t, &x));
        }
    }

    #[test]
    fn polyval_all_ones() {
        assert_eq!(all_ones(3, 2).polyval(&[1.0, 1.0]).unwrap(), 8.0);
    }

    #[test]
    fn polyval_ex23_at_ones() {
        // Hand contraction of the two nonzero slices: 1*0 + 1*(-1) = -1,
        // cross-checked against the brute-force loop.
        let t = ex23();
        assert_eq!(t.polyval(&[1.0, 1.0]).unwrap(), -1.0);
        let w = brute_contract(&t, &[1.0, 1.0]);
        assert_eq!(w[0] + w[1], -1.0);
    }

    #[test]
    fn polyval_at_zero() {
        assert_eq!(ex22().polyval(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn subtensor_full_support_is_identity() {
        let t = ex23();
        let sub = t.principal_subtensor(&Support::full(2)).unwrap();
        assert_eq!(sub, t);
    }

    #[test]
    fn subtensor_singletons_are_diagonal_entries() {
        let first = ex23()
            .principal_subtensor(&Support::new(vec![0], 2).unwrap())
            .unwrap();
        assert_eq!(first.value_at(&[0, 0, 0]), -1.0);
        let second = ex22()
            .principal_subtensor(&Support::new(vec![1], 2).unwrap())
            .unwrap();
        assert_eq!(second.value_at(&[0, 0, 0]), 1.0);
    }

    #[test]
    fn diagonal_values() {
        assert_eq!(all_ones(3, 2).diagonal(), vec![1.0, 1.0]);
        assert_eq!(ex22().diagonal(), vec![1.0, 1.0]);
        assert_eq!(ex23().diagonal(), vec![-1.0, 1.0]);
    }

    #[test]
    fn symmetry_flags() {
        assert!(all_ones(3, 2).is_symmetric());
        // a_122 = 1 but a_212 = 0
        assert!(!ex23().is_symmetric());
    }

    #[test]
    fn nonnegativity_flags() {
        assert!(all_ones(3, 2).is_nonnegative());
        assert!(!ex22().is_nonnegative());
    }

    #[test]
    fn dense_and_coordinate_paths_bit_identical() {
        for t in [ex22(), ex23(), all_ones(4, 3)] {
            let mut dense = t.clone();
            dense.densify();
            assert!(dense.is_dense());
            let x: Vec<f64> = (0..t.dim()).map(|i| 1.0 - 0.37 * i as f64).collect();
            let a = t.contract(&x).unwrap();
            let b = dense.contract(&x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
            assert_eq!(
                t.polyval(&x).unwrap().to_bits(),
                dense.polyval(&x).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn duplicate_tuple_rejected() {
        let err = Tensor::from_entries(2, 2, &[(vec![0, 1], 1.0), (vec![0, 1], 2.0)]).unwrap_err();
        assert_eq!(err, TensorError::DuplicateTuple { tuple: vec![0, 1] });
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let t = ex22();
        assert!(matches!(
            t.contract(&[1.0, 2.0, 3.0]),
            Err(TensorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn support_validation() {
        assert!(Support::new(vec![], 3).is_err());
        assert!(Support::new(vec![1, 1], 3).is_err());
        assert!(Support::new(vec![2, 1], 3).is_err());
        assert!(Support::new(vec![0, 3], 3).is_err());
        let s = Support::new(vec![0, 2], 3).unwrap();
        assert_eq!(s.scatter(&[5.0, 7.0]), vec![5.0, 0.0, 7.0]);
        assert_eq!(s.gather(&[5.0, 6.0, 7.0]), vec![5.0, 7.0]);
    }

    #[test]
    fn permutations_cover_factorial() {
        let mut items = [0u32, 1, 2, 3];
        let mut count = 0;
        for_each_permutation(&mut items, |_| count += 1);
        assert_eq!(count, 24);
    }
}
