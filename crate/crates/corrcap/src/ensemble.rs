//! Constructive ensemble realization: given a state ρ and target weights
//! Λ ≺ λ(ρ), produce unit vectors with `ρ = Σ_α Λ_α |φ_α⟩⟨φ_α|`.
//!
//! The weights exist as an ensemble exactly when Λ is majorized by the
//! spectrum, and the construction is a Schur–Horn rotation chain: starting
//! from `diag(λ)`, a sequence of at most `d−1` two-level Givens rotations
//! drives the diagonal to Λ. Each step places the largest remaining target
//! value by rotating the pair of active diagonal entries that bracket it;
//! the pair always exists while the remaining target is majorized by the
//! remaining diagonal, which the placement step preserves.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::majorization::{compare, MajOrder, ProbVector};
use crate::qstate::{CMatrix, CVector, DensityMatrix, StateError};

/// Absolute tolerance at which a diagonal entry counts as already equal to
/// its target (no rotation spent). Kept tight so that free placements do
/// not accumulate visible drift on the final diagonal.
const PLACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EnsembleError {
    #[error("target weights are not majorized by the spectrum")]
    NotMajorized,
    #[error(transparent)]
    State(#[from] StateError),
}

/// Result of the rotation chain: a real orthogonal `U` with
/// `diag(U · diag(λ) · Uᵀ) = target`, and the number of Givens rotations
/// spent (at most `d − 1`).
#[derive(Debug, Clone)]
pub struct SchurHornUnitary {
    pub matrix: DMatrix<f64>,
    pub rotations: usize,
}

/// An ensemble realizing a density matrix: weights restricted to their
/// support, one unit vector per nonzero weight.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: ProbVector,
    vectors: Vec<CVector>,
}

impl Ensemble {
    pub(crate) fn new(weights: ProbVector, vectors: Vec<CVector>) -> Self {
        debug_assert_eq!(weights.len(), vectors.len());
        Self { weights, vectors }
    }

    pub fn weights(&self) -> &ProbVector {
        &self.weights
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `Σ_α w_α |φ_α⟩⟨φ_α|`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors[0].len();
        let mut out = CMatrix::zeros(n, n);
        for (w, v) in self.weights.entries().iter().zip(&self.vectors) {
            out += (v * v.adjoint()).scale(*w);
        }
        out
    }
}

/// Builds a real orthogonal matrix whose conjugation carries `diag(lambda)`
/// to a matrix with diagonal `target`, given `target ≺ lambda`.
///
/// Both spectra are zero-padded to a common length `d`. Target entries are
/// placed in descending order; each placement rotates the two active
/// diagonal entries bracketing the target value, with the angle chosen to
/// set one of them exactly. Entries already matching within `1e-12` are
/// placed for free, so `target = lambda` yields the identity with zero
/// rotations.
pub fn schur_horn_unitary(
    lambda: &ProbVector,
    target: &ProbVector,
) -> Result<SchurHornUnitary, EnsembleError> {
    if !matches!(
        compare(target, lambda),
        MajOrder::MajorizedBy | MajOrder::Equal
    ) {
        return Err(EnsembleError::NotMajorized);
    }
    let d = lambda.len().max(target.len());
    let mut values: Vec<f64> = (0..d).map(|i| lambda.entry_padded(i)).collect();
    let tgt: Vec<f64> = (0..d).map(|i| target.entry_padded(i)).collect();

    let mut u = DMatrix::<f64>::identity(d, d);
    let mut active: Vec<usize> = (0..d).collect();
    // placed[pos] = rank of the target value finally held at `pos`.
    let mut placed: Vec<usize> = vec![usize::MAX; d];
    let mut rotations = 0usize;

    for (rank, &t) in tgt.iter().enumerate() {
        // The last active entry carries the remaining trace; place it.
        if active.len() == 1 {
            let pos = active.pop().unwrap();
            debug_assert!((values[pos] - t).abs() <= 1e-9);
            placed[pos] = rank;
            continue;
        }
        // Free placement when some active entry already matches.
        if let Some(k) = active
            .iter()
            .position(|&p| (values[p] - t).abs() <= PLACE_TOL)
        {
            let pos = active.remove(k);
            placed[pos] = rank;
            continue;
        }
        // Bracketing pair: tightest active value above t and tightest below.
        let hi = active
            .iter()
            .copied()
            .filter(|&p| values[p] > t)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]));
        let lo = active
            .iter()
            .copied()
            .filter(|&p| values[p] < t)
            .max_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (hi, lo) = match (hi, lo) {
            (Some(hi), Some(lo)) => (hi, lo),
            // Rounding from earlier free placements can leave the target a
            // hair outside the active range; the nearest entry is then
            // within that accumulated error.
            _ => {
                let k = (0..active.len())
                    .min_by(|&a, &b| {
                        let da = (values[active[a]] - t).abs();
                        let db = (values[active[b]] - t).abs();
                        da.total_cmp(&db)
                    })
                    .unwrap();
                let pos = active.remove(k);
                assert!(
                    (values[pos] - t).abs() <= 1e-9,
                    "placement drift {} exceeds tolerance",
                    (values[pos] - t).abs()
                );
                placed[pos] = rank;
                continue;
            }
        };
        let c2 = (t - values[lo]) / (values[hi] - values[lo]);
        let c = c2.sqrt();
        let s = (1.0 - c2).max(0.0).sqrt();
        // Givens rotation in the (hi, lo) plane, accumulated into U.
        for j in 0..d {
            let (a, b) = (u[(hi, j)], u[(lo, j)]);
            u[(hi, j)] = c * a + s * b;
            u[(lo, j)] = -s * a + c * b;
        }
        values[lo] += values[hi] - t;
        values[hi] = t;
        rotations += 1;
        active.retain(|&p| p != hi);
        placed[hi] = rank;
    }

    // Route each placed value to its rank's row: final row `rank` must be
    // the chain row that holds target[rank].
    let mut matrix = DMatrix::<f64>::zeros(d, d);
    for (pos, &rank) in placed.iter().enumerate() {
        matrix.row_mut(rank).copy_from(&u.row(pos));
    }
    Ok(SchurHornUnitary { matrix, rotations })
}

/// Realizes the ensemble `ρ = Σ_α target_α |φ_α⟩⟨φ_α|` over the zero-padded
/// spectral basis of ρ, dropping zero target weights.
pub fn realize_ensemble(
    rho: &DensityMatrix,
    target: &ProbVector,
) -> Result<Ensemble, EnsembleError> {
    let decomp = rho.spectral()?;
    let lambda = &decomp.eigenvalues;
    let sh = schur_horn_unitary(lambda, target)?;
    let d = lambda.len().max(target.len());
    let dim = rho.dim();

    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for alpha in 0..d {
        let w = target.entry_padded(alpha);
        // Weights at rounding scale cannot carry a normalized vector.
        if w <= crate::majorization::EPS_TOL {
            continue;
        }
        let mut v = CVector::zeros(dim);
        for i in 0..dim {
            let amp = sh.matrix[(alpha, i)] * lambda.entry_padded(i).max(0.0).sqrt();
            if amp != 0.0 {
                v += decomp.eigenvectors.column(i) * Complex64::new(amp, 0.0);
            }
        }
        v.unscale_mut(w.sqrt());
        weights.push(w);
        vectors.push(v);
    }
    let weights = ProbVector::new(&weights).expect("support of a spectrum sums to one");
    Ok(Ensemble::new(weights, vectors))
}
