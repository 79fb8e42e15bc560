//! Dense Hermitian state core: validation, spectral decomposition, tensor
//! products, partial traces, entropies, pinching, partial transpose.
//!
//! Subsystem ordering is row-major throughout: the leftmost factor varies
//! slowest, matching the Kronecker product convention. Dimensions here are
//! small (≤ 64), so everything is dense and eigendecomposition-based; matrix
//! logarithms are always taken through the spectral decomposition.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::majorization::ProbVector;

pub use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Entrywise Hermiticity tolerance for validation.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Trace-one tolerance for validation.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVITY_TOL, 0)` are clipped to zero; anything
/// below fails validation.
pub const NEGATIVITY_TOL: f64 = 1e-9;
/// Degeneracy clustering threshold, relative to the largest eigenvalue.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Support threshold: eigenvalues at or below this count as zero for
/// supports and relative-entropy domains.
pub const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StateError {
    #[error("matrix is not Hermitian: max |M - M†| entry {0:.3e}")]
    NotHermitian(f64),
    #[error("trace is {0}, not 1")]
    NotUnitTrace(f64),
    #[error("matrix is not positive semidefinite: eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("matrix side {side} does not match subsystem dimensions {dims:?}")]
    DimsMismatch { side: usize, dims: Vec<usize> },
    #[error("bad subsystem index set {0:?}")]
    BadSubsystemIndex(Vec<usize>),
    #[error("projectors do not form an orthogonal resolution of the identity")]
    ProjectorsNotResolution,
    #[error("operation requires dims {expected:?}, state has {got:?}")]
    WrongDims { expected: Vec<usize>, got: Vec<usize> },
    #[error("states have different total dimension ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("vector norm is {0}, not 1")]
    NotNormalized(f64),
    #[error("eigensolver failed to converge")]
    EigensolverFailure,
}

/// A density matrix: Hermitian, positive semidefinite, unit trace, annotated
/// with the dimensions of its tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Vec<usize>,
}

/// A unit-norm pure state annotated with subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: CVector,
    dims: Vec<usize>,
}

/// Spectral decomposition of a density matrix: descending eigenvalues,
/// aligned orthonormal eigenvectors, and the grouping of indices into
/// clusters of numerically equal eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: ProbVector,
    pub eigenvectors: CMatrix,
    pub blocks: Vec<Vec<usize>>,
}

impl DensityMatrix {
    /// Validates and wraps a raw matrix. The stored matrix is symmetrized
    /// as `(M + M†)/2` so downstream eigensolves see an exactly Hermitian
    /// operand.
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self, StateError> {
        let side = mat.nrows();
        if mat.ncols() != side || dims.is_empty() || dims.iter().product::<usize>() != side {
            return Err(StateError::DimsMismatch { side, dims });
        }
        let mut herm_dev = 0.0f64;
        for i in 0..side {
            for j in 0..side {
                herm_dev = herm_dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if herm_dev > HERMITICITY_TOL {
            return Err(StateError::NotHermitian(herm_dev));
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(StateError::NotUnitTrace(trace.re));
        }
        let sym = symmetrize(&mat);
        let eigs = hermitian_eigenvalues_desc(&sym)?;
        let min = eigs.last().copied().unwrap_or(0.0);
        if min < -NEGATIVITY_TOL {
            return Err(StateError::NotPositive(min));
        }
        Ok(Self { mat: sym, dims })
    }

    /// Wraps a matrix known valid by construction; symmetrizes only.
    pub(crate) fn from_parts_unchecked(mat: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(mat.nrows(), dims.iter().product::<usize>());
        Self {
            mat: symmetrize(&mat),
            dims,
        }
    }

    /// Diagonal state with the given populations.
    pub fn from_diagonal(populations: &[f64], dims: Vec<usize>) -> Result<Self, StateError> {
        let mat = CMatrix::from_fn(populations.len(), populations.len(), |i, j| {
            if i == j {
                Complex64::new(populations[i], 0.0)
            } else {
                Complex64::ZERO
            }
        });
        Self::new(mat, dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Reinterprets the tensor-factor structure without touching the matrix.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<DensityMatrix, StateError> {
        if dims.iter().product::<usize>() != self.dim() {
            return Err(StateError::DimsMismatch { side: self.dim(), dims });
        }
        Ok(DensityMatrix {
            mat: self.mat.clone(),
            dims,
        })
    }

    /// Spectral decomposition with descending eigenvalues and degeneracy
    /// clusters at relative gap `DEGENERACY_TOL`. Within a cluster the
    /// eigenvectors are re-orthonormalized, which leaves the reconstruction
    /// unchanged up to the cluster's eigenvalue spread.
    pub fn spectral(&self) -> Result<SpectralDecomp, StateError> {
        let eig = SymmetricEigen::try_new(self.mat.clone(), f64::EPSILON, 4096)
            .ok_or(StateError::EigensolverFailure)?;
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut vals = Vec::with_capacity(n);
        let mut vecs = CMatrix::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            vals.push(eig.eigenvalues[i]);
            vecs.set_column(k, &eig.eigenvectors.column(i));
        }
        let gap = DEGENERACY_TOL * vals[0].max(f64::MIN_POSITIVE);
        let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
        for k in 1..n {
            if vals[k - 1] - vals[k] < gap {
                blocks.last_mut().unwrap().push(k);
            } else {
                blocks.push(vec![k]);
            }
        }
        for block in &blocks {
            if block.len() > 1 {
                orthonormalize_columns(&mut vecs, block);
            }
        }
        Ok(SpectralDecomp {
            eigenvalues: ProbVector::from_sorted_eigenvalues(&vals),
            eigenvectors: vecs,
            blocks,
        })
    }

    /// Kronecker product of a list of states; dims are concatenated.
    pub fn tensor(states: &[DensityMatrix]) -> DensityMatrix {
        assert!(!states.is_empty(), "tensor of no states");
        let mut mat = states[0].mat.clone();
        let mut dims = states[0].dims.clone();
        for s in &states[1..] {
            mat = mat.kronecker(&s.mat);
            dims.extend_from_slice(&s.dims);
        }
        DensityMatrix::from_parts_unchecked(mat, dims)
    }

    /// Reduced state on the subsystems in `keep` (ascending order), tracing
    /// out the rest.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        let n = self.dims.len();
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let distinct = keep.windows(2).all(|w| w[0] != w[1]);
        if keep.is_empty() || !distinct || keep.iter().any(|&a| a >= n) {
            return Err(StateError::BadSubsystemIndex(keep));
        }
        let traced: Vec<usize> = (0..n).filter(|a| !keep.contains(a)).collect();
        let strides = strides_of(&self.dims);
        let keep_dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let keep_offsets = offsets_for(&keep, &keep_dims, &strides);
        let traced_dims: Vec<usize> = traced.iter().map(|&a| self.dims[a]).collect();
        let traced_offsets = offsets_for(&traced, &traced_dims, &strides);

        let dk: usize = keep_dims.iter().product();
        let mut out = CMatrix::zeros(dk, dk);
        for (r, &ro) in keep_offsets.iter().enumerate() {
            for (c, &co) in keep_offsets.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for &to in &traced_offsets {
                    acc += self.mat[(ro + to, co + to)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(out, keep_dims))
    }

    /// All single-subsystem marginals, in subsystem order.
    pub fn marginals(&self) -> Result<Vec<DensityMatrix>, StateError> {
        (0..self.dims.len()).map(|a| self.partial_trace(&[a])).collect()
    }

    /// Reorders tensor factors: new factor `k` is old factor `perm[k]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<DensityMatrix, StateError> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(StateError::BadSubsystemIndex(perm.to_vec()));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let map = index_permutation(&self.dims, perm);
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                out[(map[r], map[c])] = self.mat[(r, c)];
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(out, new_dims))
    }

    /// Von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> Result<f64, StateError> {
        Ok(self.spectral()?.eigenvalues.shannon_entropy())
    }

    /// Quantum relative entropy `tr ρ(log₂ρ − log₂σ)` in bits, or `+∞` when
    /// the support of `self` leaks outside the support of `other` (tested at
    /// eigenvalue threshold `SUPPORT_TOL`).
    pub fn relative_entropy(&self, other: &DensityMatrix) -> Result<f64, StateError> {
        if self.dim() != other.dim() {
            return Err(StateError::DimensionMismatch(self.dim(), other.dim()));
        }
        let rho = self.spectral()?;
        let sigma = other.spectral()?;
        let lam = rho.eigenvalues.entries();
        let sig = sigma.eigenvalues.entries();
        let mut total = lam
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.log2())
            .sum::<f64>();
        for (j, &s) in sig.iter().enumerate() {
            let wj = sigma.eigenvectors.column(j);
            if s <= SUPPORT_TOL {
                // Weight of rho in the null direction of sigma.
                let mut weight = 0.0;
                for (i, &l) in lam.iter().enumerate() {
                    if l > SUPPORT_TOL {
                        weight += l * rho.eigenvectors.column(i).dotc(&wj).norm_sqr();
                    }
                }
                if weight > SUPPORT_TOL {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            for (i, &l) in lam.iter().enumerate() {
                if l > 0.0 {
                    let overlap = rho.eigenvectors.column(i).dotc(&wj).norm_sqr();
                    total -= l * overlap * s.log2();
                }
            }
        }
        Ok(total)
    }

    /// Pinches by an orthogonal projector resolution on one subsystem:
    /// `Σ_k (Π_k)_a ρ (Π_k)_a`. The result is renormalized to unit trace to
    /// absorb the tolerance allowed on the resolution.
    pub fn pinch(&self, projectors: &[CMatrix], subsystem: usize) -> Result<DensityMatrix, StateError> {
        if subsystem >= self.dims.len() {
            return Err(StateError::BadSubsystemIndex(vec![subsystem]));
        }
        let da = self.dims[subsystem];
        let mut sum = CMatrix::zeros(da, da);
        for p in projectors {
            if p.nrows() != da || p.ncols() != da {
                return Err(StateError::ProjectorsNotResolution);
            }
            let herm = (p - p.adjoint()).norm();
            let idem = (p * p - p).norm();
            if herm > 1e-8 || idem > 1e-8 {
                return Err(StateError::ProjectorsNotResolution);
            }
            sum += p;
        }
        if (&sum - CMatrix::identity(da, da)).norm() > 1e-8 {
            return Err(StateError::ProjectorsNotResolution);
        }
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for p in projectors {
            let e = embed_on_subsystem(p, &self.dims, subsystem);
            out += &e * &self.mat * &e;
        }
        let tr = out.trace().re;
        out.scale_mut(1.0 / tr);
        Ok(DensityMatrix::from_parts_unchecked(out, self.dims.clone()))
    }

    /// Transpose on the second factor of a two-qubit state. The caller
    /// inspects the minimum eigenvalue (Peres–Horodecki witness, exact for
    /// two qubits).
    pub fn partial_transpose(&self) -> Result<CMatrix, StateError> {
        if self.dims != [2, 2] {
            return Err(StateError::WrongDims {
                expected: vec![2, 2],
                got: self.dims.clone(),
            });
        }
        let mut out = CMatrix::zeros(4, 4);
        for i1 in 0..2 {
            for j1 in 0..2 {
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        out[(i1 * 2 + j2, i2 * 2 + j1)] = self.mat[(i1 * 2 + j1, i2 * 2 + j2)];
                    }
                }
            }
        }
        Ok(out)
    }
}

impl PureState {
    /// Validates norm within `1e-12`, then stores the exactly renormalized
    /// vector.
    pub fn new(vec: CVector, dims: Vec<usize>) -> Result<Self, StateError> {
        let side = vec.len();
        if dims.is_empty() || dims.iter().product::<usize>() != side {
            return Err(StateError::DimsMismatch { side, dims });
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(Self {
            vec: vec.unscale(norm),
            dims,
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_unnormalized(vec: CVector, dims: Vec<usize>) -> Result<Self, StateError> {
        let norm = vec.norm();
        if norm <= 0.0 {
            return Err(StateError::NotNormalized(norm));
        }
        Self::new(vec.unscale(norm), dims)
    }

    pub fn vector(&self) -> &CVector {
        &self.vec
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// The full projector `|ψ⟩⟨ψ|` as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let mat = &self.vec * self.vec.adjoint();
        DensityMatrix::from_parts_unchecked(mat, self.dims.clone())
    }

    /// Single-subsystem marginal, computed directly from the amplitudes
    /// without forming the full projector.
    pub fn marginal(&self, subsystem: usize) -> Result<DensityMatrix, StateError> {
        if subsystem >= self.dims.len() {
            return Err(StateError::BadSubsystemIndex(vec![subsystem]));
        }
        let da = self.dims[subsystem];
        let post: usize = self.dims[subsystem + 1..].iter().product();
        let pre: usize = self.dims[..subsystem].iter().product();
        let mut out = CMatrix::zeros(da, da);
        for p in 0..pre {
            for q in 0..post {
                for x in 0..da {
                    let ix = (p * da + x) * post + q;
                    for y in 0..da {
                        let iy = (p * da + y) * post + q;
                        out[(x, y)] += self.vec[ix] * self.vec[iy].conj();
                    }
                }
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(out, vec![da]))
    }

    /// All single-subsystem marginals, in subsystem order.
    pub fn marginals(&self) -> Result<Vec<DensityMatrix>, StateError> {
        (0..self.dims.len()).map(|a| self.marginal(a)).collect()
    }
}

impl SpectralDecomp {
    /// `Σ λ_i v_i v_i†`, for round-trip checks.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (i, &l) in self.eigenvalues.entries().iter().enumerate() {
            let v = self.eigenvectors.column(i);
            out += (v * v.adjoint()).scale(l);
        }
        out
    }

    /// Projectors onto the distinct-eigenvalue clusters, in block order.
    pub fn block_projectors(&self) -> Vec<CMatrix> {
        let n = self.eigenvectors.nrows();
        self.blocks
            .iter()
            .map(|block| {
                let mut p = CMatrix::zeros(n, n);
                for &i in block {
                    let v = self.eigenvectors.column(i);
                    p += v * v.adjoint();
                }
                p
            })
            .collect()
    }
}

pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues_desc(m: &CMatrix) -> Result<Vec<f64>, StateError> {
    let eig = SymmetricEigen::try_new(symmetrize(m), f64::EPSILON, 4096)
        .ok_or(StateError::EigensolverFailure)?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Embeds an operator acting on subsystem `a` into the full space:
/// `I_pre ⊗ op ⊗ I_post`.
pub(crate) fn embed_on_subsystem(op: &CMatrix, dims: &[usize], a: usize) -> CMatrix {
    let pre: usize = dims[..a].iter().product();
    let post: usize = dims[a + 1..].iter().product();
    CMatrix::identity(pre, pre)
        .kronecker(op)
        .kronecker(&CMatrix::identity(post, post))
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

/// Flat offsets contributed by every joint setting of the listed subsystems.
fn offsets_for(subs: &[usize], sub_dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let total: usize = sub_dims.iter().product();
    let mut out = Vec::with_capacity(total.max(1));
    for mut idx in 0..total.max(1) {
        let mut off = 0;
        for k in (0..subs.len()).rev() {
            off += (idx % sub_dims[k]) * strides[subs[k]];
            idx /= sub_dims[k];
        }
        out.push(off);
    }
    out
}

/// For each flat index over `dims`, the flat index after reordering factors
/// by `perm` (new factor k = old factor perm[k]).
fn index_permutation(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let strides = strides_of(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides_of(&new_dims);
    let total: usize = dims.iter().product();
    let mut map = vec![0usize; total];
    for (old, slot) in map.iter_mut().enumerate() {
        let mut new_idx = 0;
        for k in 0..n {
            let old_factor = perm[k];
            let digit = (old / strides[old_factor]) % dims[old_factor];
            new_idx += digit * new_strides[k];
        }
        *slot = new_idx;
    }
    map
}

/// Modified Gram–Schmidt over the listed columns (used within degenerate
/// eigenvalue clusters, where any orthonormal basis of the cluster is valid).
fn orthonormalize_columns(m: &mut CMatrix, cols: &[usize]) {
    for (k, &j) in cols.iter().enumerate() {
        let mut v = m.column(j).clone_owned();
        for &i in &cols[..k] {
            let u = m.column(i).clone_owned();
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm > 0.0 {
            v.unscale_mut(norm);
        }
        m.set_column(j, &v);
    }
}
