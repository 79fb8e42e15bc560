//! Least-disordered separable composites, correlation information, and the
//! classical-correlation classifier.
//!
//! The optimal separable composite of a marginal set is assembled from the
//! lattice meet of the marginal spectra: every marginal is re-expanded as an
//! ensemble over those common weights, and the product-vector mixture of the
//! expansions reproduces all marginals while its spectrum equals the meet.
//! That spectrum claim, the orthogonality of the product vectors, and the
//! Gram-matrix diagnostics are all asserted by tests rather than assumed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::{realize_ensemble, Ensemble, EnsembleError};
use crate::majorization::{infimum, MajError, ProbVector};
use crate::qstate::{hermitian_eigenvalues_desc, CMatrix, CVector, DensityMatrix, StateError};

/// Frobenius tolerance for "pinching left the state unchanged".
const PINCH_TOL: f64 = 1e-8;
/// Commutator-norm tolerance for the degenerate-marginal classifier branch.
const COMMUTATOR_TOL: f64 = 1e-8;
/// PPT negativity threshold for the two-qubit flag.
const PPT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CompositeError {
    #[error("a composite needs at least two marginals")]
    TooFewMarginals,
    #[error("partition does not cover the subsystems disjointly: {0:?}")]
    BadPartition(Vec<Vec<usize>>),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Majorization(#[from] MajError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// Summary of a state analysis: spectrum, marginal spectra, correlation
/// information in bits, and classification flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositeReport {
    pub spectrum: Vec<f64>,
    pub marginal_spectra: Vec<Vec<f64>>,
    pub correlation_bits: f64,
    pub is_classical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_qubit_ppt: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_offdiag_max: Option<f64>,
}

impl CompositeReport {
    /// Analyzes an arbitrary multipartite state. The PPT flag is present
    /// exactly for two-qubit states, where it decides separability.
    pub fn for_state(rho: &DensityMatrix) -> Result<Self, CompositeError> {
        Self::build(rho, None)
    }

    /// Analysis of a freshly built composite, including the Gram-matrix
    /// off-diagonal diagnostic of its ensemble.
    pub fn for_composite(rho: &DensityMatrix, ensemble: &Ensemble) -> Result<Self, CompositeError> {
        Self::build(rho, Some(ensemble))
    }

    fn build(rho: &DensityMatrix, ensemble: Option<&Ensemble>) -> Result<Self, CompositeError> {
        let spectrum = rho.spectral()?.eigenvalues.entries().to_vec();
        let marginal_spectra = rho
            .marginals()?
            .iter()
            .map(|m| Ok(m.spectral()?.eigenvalues.entries().to_vec()))
            .collect::<Result<Vec<_>, CompositeError>>()?;
        let correlation_bits = correlation_information(rho)?;
        let is_classical = is_classically_correlated(rho)?;
        let two_qubit_ppt = if rho.dims() == [2, 2] {
            let pt = rho.partial_transpose()?;
            let min = *hermitian_eigenvalues_desc(&pt)?.last().unwrap();
            Some(min >= -PPT_TOL)
        } else {
            None
        };
        let gram_offdiag_max = match ensemble {
            Some(e) => {
                let g = gram_matrix(e);
                let mut max = 0.0f64;
                for i in 0..g.nrows() {
                    for j in 0..g.ncols() {
                        if i != j {
                            max = max.max(g[(i, j)].norm());
                        }
                    }
                }
                Some(max)
            }
            None => None,
        };
        Ok(Self {
            spectrum,
            marginal_spectra,
            correlation_bits,
            is_classical,
            two_qubit_ppt,
            gram_offdiag_max,
        })
    }
}

/// Builds the least-disordered separable state compatible with the given
/// marginals, together with its product-vector ensemble.
///
/// The common weights are the infimum of the marginal spectra; each marginal
/// is realized as an ensemble over those weights, and the composite is the
/// weighted mixture of the product vectors.
pub fn build_optimal_separable(
    marginals: &[DensityMatrix],
) -> Result<(DensityMatrix, Ensemble), CompositeError> {
    if marginals.len() < 2 {
        return Err(CompositeError::TooFewMarginals);
    }
    let spectra = marginals
        .iter()
        .map(|m| Ok(m.spectral()?.eigenvalues))
        .collect::<Result<Vec<_>, CompositeError>>()?;
    let weights = infimum(&spectra)?;
    let local: Vec<Ensemble> = marginals
        .iter()
        .map(|m| realize_ensemble(m, &weights))
        .collect::<Result<_, _>>()?;

    let dims: Vec<usize> = marginals.iter().map(DensityMatrix::dim).collect();
    let total: usize = dims.iter().product();
    let support = local[0].len();
    let mut sigma = CMatrix::zeros(total, total);
    let mut product_vectors = Vec::with_capacity(support);
    for alpha in 0..support {
        let mut v = CVector::from_element(1, Complex64::ONE);
        for ens in &local {
            v = v.kronecker(&ens.vectors()[alpha]);
        }
        let w = local[0].weights().entries()[alpha];
        sigma += (&v * v.adjoint()).scale(w);
        product_vectors.push(v);
    }
    let state = DensityMatrix::from_parts_unchecked(sigma, dims);
    let ensemble = Ensemble::new(local[0].weights().clone(), product_vectors);
    Ok((state, ensemble))
}

/// Weighted overlap matrix `G_{αβ} = √w_α ⟨φ_α|φ_β⟩ √w_β` of an ensemble;
/// isospectral with the state the ensemble represents.
pub fn gram_matrix(ensemble: &Ensemble) -> CMatrix {
    let n = ensemble.len();
    let w = ensemble.weights().entries();
    CMatrix::from_fn(n, n, |a, b| {
        ensemble.vectors()[a].dotc(&ensemble.vectors()[b]) * (w[a].sqrt() * w[b].sqrt())
    })
}

/// Correlation information `C(ρ) = Σ_a S(ρ^a) − S(ρ)` in bits; the
/// multipartite generalization of mutual information.
pub fn correlation_information(rho: &DensityMatrix) -> Result<f64, CompositeError> {
    let mut total = 0.0;
    for m in rho.marginals()? {
        total += m.von_neumann_entropy()?;
    }
    Ok(total - rho.von_neumann_entropy()?)
}

/// Splits the correlation information across a partition of the subsystems:
/// per-block values `C(ρ_i)` plus the residual `S(ρ ‖ ⊗_i ρ_i)`. The two
/// sides satisfy `C(ρ) = Σ_i C(ρ_i) + residual`.
pub fn partition_correlation(
    rho: &DensityMatrix,
    partition: &[Vec<usize>],
) -> Result<(Vec<f64>, f64), CompositeError> {
    let n = rho.num_subsystems();
    let mut seen = vec![false; n];
    let mut covered = 0;
    for block in partition {
        if block.is_empty() {
            return Err(CompositeError::BadPartition(partition.to_vec()));
        }
        for &a in block {
            if a >= n || std::mem::replace(&mut seen[a], true) {
                return Err(CompositeError::BadPartition(partition.to_vec()));
            }
            covered += 1;
        }
    }
    if covered != n {
        return Err(CompositeError::BadPartition(partition.to_vec()));
    }

    let blocks = partition
        .iter()
        .map(|block| {
            let mut sorted = block.clone();
            sorted.sort_unstable();
            Ok(rho.partial_trace(&sorted)?)
        })
        .collect::<Result<Vec<_>, CompositeError>>()?;
    let per_block = blocks
        .iter()
        .map(correlation_information)
        .collect::<Result<Vec<_>, _>>()?;

    // Align ρ with the factor order of ⊗_i ρ_i before taking the relative
    // entropy.
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for block in partition {
        let mut sorted = block.clone();
        sorted.sort_unstable();
        order.extend(sorted);
    }
    let aligned = rho.permute_subsystems(&order)?;
    let product = DensityMatrix::tensor(&blocks);
    let residual = aligned.relative_entropy(&product)?;
    Ok((per_block, residual))
}

/// Maximum correlation information any separable state with the given
/// marginal spectra can carry: `Σ_a H(λ^a) − H(inf λ)`.
pub fn max_separable_correlation(spectra: &[ProbVector]) -> Result<f64, MajError> {
    let meet = infimum(spectra)?;
    Ok(spectra.iter().map(ProbVector::shannon_entropy).sum::<f64>() - meet.shannon_entropy())
}

/// Decides whether a state is diagonal in some product of its marginal
/// eigenbases.
///
/// Stages: (i) pinch by every party's distinct-eigenvalue projectors and
/// reject on any change; (ii) accept when every marginal spectrum is
/// non-degenerate (the pinched form is then fully diagonal); (iii) with
/// degeneracies, accept iff for every party the conditional block operators
/// form a commuting family. A commuting family here is ∗-closed, hence
/// simultaneously diagonalizable, and its common eigenbasis refines the
/// marginal eigenspaces — which is exactly the basis freedom available.
pub fn is_classically_correlated(rho: &DensityMatrix) -> Result<bool, CompositeError> {
    let n = rho.num_subsystems();
    if n < 2 {
        return Ok(true);
    }
    let decomps = rho
        .marginals()?
        .iter()
        .map(|m| Ok(m.spectral()?))
        .collect::<Result<Vec<_>, CompositeError>>()?;

    let mut pinched = rho.clone();
    for (a, decomp) in decomps.iter().enumerate() {
        pinched = pinched.pinch(&decomp.block_projectors(), a)?;
    }
    if (pinched.matrix() - rho.matrix()).norm() > PINCH_TOL {
        return Ok(false);
    }

    if decomps.iter().all(|d| d.blocks.iter().all(|b| b.len() == 1)) {
        return Ok(true);
    }

    for (a, decomp) in decomps.iter().enumerate() {
        if decomp.blocks.iter().all(|b| b.len() == 1) {
            continue;
        }
        let ops = conditional_operators(rho, a);
        for i in 0..ops.len() {
            for j in (i + 1)..ops.len() {
                let comm = (&ops[i] * &ops[j] - &ops[j] * &ops[i]).norm();
                if comm > COMMUTATOR_TOL {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Party-`a` operators `⟨m|ρ|n⟩` over a product basis of the other parties.
/// Their span is basis-independent, so pairwise commutativity of this family
/// decides whether a single party-`a` basis diagonalizes every one of them.
fn conditional_operators(rho: &DensityMatrix, a: usize) -> Vec<CMatrix> {
    let dims = rho.dims();
    let da = dims[a];
    let pre: usize = dims[..a].iter().product();
    let post: usize = dims[a + 1..].iter().product();
    let mut ops = Vec::new();
    for m_pre in 0..pre {
        for m_post in 0..post {
            for n_pre in 0..pre {
                for n_post in 0..post {
                    let mut op = CMatrix::zeros(da, da);
                    for x in 0..da {
                        for y in 0..da {
                            let row = (m_pre * da + x) * post + m_post;
                            let col = (n_pre * da + y) * post + n_post;
                            op[(x, y)] = rho.matrix()[(row, col)];
                        }
                    }
                    if op.norm() > 1e-12 {
                        ops.push(op);
                    }
                }
            }
        }
    }
    ops
}

/// Spectrum of a state as a clipped probability vector.
pub fn state_spectrum(rho: &DensityMatrix) -> Result<ProbVector, StateError> {
    Ok(rho.spectral()?.eigenvalues)
}

/// Convenience wrapper: `true` when the partial transpose of a two-qubit
/// state stays positive within `1e-10`.
pub fn two_qubit_ppt(rho: &DensityMatrix) -> Result<bool, StateError> {
    let pt = rho.partial_transpose()?;
    let min = *hermitian_eigenvalues_desc(&pt)?.last().unwrap();
    Ok(min >= -PPT_TOL)
}

/// Marginal spectra of a state, in subsystem order.
pub fn marginal_spectra(rho: &DensityMatrix) -> Result<Vec<ProbVector>, StateError> {
    rho.marginals()?
        .iter()
        .map(|m| Ok(m.spectral()?.eigenvalues))
        .collect()
}
