//! Closed-form least-disordered two-qubit composites for the classically
//! correlated, separable, and entangled classes, the disorder hierarchy
//! between them, correlation-capacity curves, and feline (generalized cat)
//! states of isospectral qudits.
//!
//! The closed forms assume marginals diagonal in the computational basis
//! with larger eigenvalues `p_a ≥ p_b`; [`QubitPair`] canonicalizes labels
//! and the constructors swap the tensor factors back when the caller's
//! labels were reversed, so marginal `a` of every returned state carries the
//! caller's `p_a`.

use num_complex::Complex64;
use thiserror::Error;

use crate::composite::correlation_information;
use crate::majorization::ProbVector;
use crate::qstate::{CMatrix, CVector, DensityMatrix, PureState};

/// Guard on feline state size: `n·log₂(d)` may not exceed this.
pub const FELINE_QUBIT_BUDGET: f64 = 20.0;
/// Dense-matrix guard for the decohered feline form.
pub const FELINE_DENSE_DIM_CAP: usize = 4096;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TwoQubitError {
    #[error("probability {0} outside [0.5, 1]")]
    BadProbability(f64),
    #[error("feline state needs at least two parties, got {0}")]
    BadPartyCount(usize),
    #[error("feline state of {parties} parties of dimension {local_dim} is too large")]
    TooLarge { parties: usize, local_dim: usize },
}

/// A pair of qubit marginals identified by their larger eigenvalues, held in
/// canonical order `p_a ≥ p_b` with the label swap recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPair {
    p_a: f64,
    p_b: f64,
    swapped: bool,
}

impl QubitPair {
    pub fn new(p_a: f64, p_b: f64) -> Result<Self, TwoQubitError> {
        for p in [p_a, p_b] {
            if !(0.5..=1.0).contains(&p) {
                return Err(TwoQubitError::BadProbability(p));
            }
        }
        if p_a >= p_b {
            Ok(Self { p_a, p_b, swapped: false })
        } else {
            Ok(Self { p_a: p_b, p_b: p_a, swapped: true })
        }
    }

    /// Larger marginal eigenvalue in canonical order.
    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    /// Whether the caller's labels were reversed to reach canonical order.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    fn finish(&self, mat: CMatrix) -> DensityMatrix {
        let state = DensityMatrix::from_parts_unchecked(mat, vec![2, 2]);
        if self.swapped {
            state.permute_subsystems(&[1, 0]).expect("two factors")
        } else {
            state
        }
    }
}

/// Spectrum `Λ^s = (p_b, 1−p_b, 0, 0)` of the optimal separable composite.
pub fn spectrum_separable(pair: &QubitPair) -> ProbVector {
    ProbVector::new(&[pair.p_b, 1.0 - pair.p_b, 0.0, 0.0]).expect("valid spectrum")
}

/// Spectrum `Λ^e = (1+p_b−p_a, p_a−p_b, 0, 0)` of the optimal entangled
/// composite; its leading entry saturates the purification triangle bound.
pub fn spectrum_entangled(pair: &QubitPair) -> ProbVector {
    ProbVector::new(&[1.0 + pair.p_b - pair.p_a, pair.p_a - pair.p_b, 0.0, 0.0])
        .expect("valid spectrum")
}

/// Spectrum `Λ^c = (p_b, max(p_a−p_b, 1−p_a), min(p_a−p_b, 1−p_a), 0)` of
/// the optimal classically correlated composite.
pub fn spectrum_classical(pair: &QubitPair) -> ProbVector {
    let x = pair.p_a - pair.p_b;
    let y = 1.0 - pair.p_a;
    ProbVector::new(&[pair.p_b, x.max(y), x.min(y), 0.0]).expect("valid spectrum")
}

/// Optimal separable composite `σ^s = p_b|θ0⟩⟨θ0| + (1−p_b)|11⟩⟨11|` with
/// `cos²θ = p_a(1−p_a) / p_b(1−p_b)` in canonical labels.
pub fn sigma_separable(pair: &QubitPair) -> DensityMatrix {
    let (pa, pb) = (pair.p_a, pair.p_b);
    let denom = pb * (1.0 - pb);
    let cos2 = if denom > 0.0 {
        (pa * (1.0 - pa) / denom).clamp(0.0, 1.0)
    } else {
        // p_b = 1 forces p_a = 1; both marginals pure, θ = 0.
        1.0
    };
    let (c, s) = (cos2.sqrt(), (1.0 - cos2).max(0.0).sqrt());
    // |θ0⟩ = (c|0⟩ + s|1⟩) ⊗ |0⟩ over the basis {|00⟩,|01⟩,|10⟩,|11⟩}.
    let theta0 = CVector::from_column_slice(&[
        Complex64::new(c, 0.0),
        Complex64::ZERO,
        Complex64::new(s, 0.0),
        Complex64::ZERO,
    ]);
    let mut mat = (&theta0 * theta0.adjoint()).scale(pb);
    mat[(3, 3)] += Complex64::new(1.0 - pb, 0.0);
    pair.finish(mat)
}

/// Optimal entangled composite in the product basis:
/// populations `(p_b, p_a−p_b, 0, 1−p_a)` with coherence
/// `√(p_b(1−p_a))` between `|00⟩` and `|11⟩`.
pub fn sigma_entangled(pair: &QubitPair) -> DensityMatrix {
    let (pa, pb) = (pair.p_a, pair.p_b);
    let g = (pb * (1.0 - pa)).max(0.0).sqrt();
    let mut mat = CMatrix::zeros(4, 4);
    mat[(0, 0)] = Complex64::new(pb, 0.0);
    mat[(1, 1)] = Complex64::new(pa - pb, 0.0);
    mat[(3, 3)] = Complex64::new(1.0 - pa, 0.0);
    mat[(0, 3)] = Complex64::new(g, 0.0);
    mat[(3, 0)] = Complex64::new(g, 0.0);
    pair.finish(mat)
}

/// Optimal classically correlated composite: the decohered entangled one,
/// diagonal `(p_b, p_a−p_b, 0, 1−p_a)` in the product basis.
pub fn sigma_classical(pair: &QubitPair) -> DensityMatrix {
    let (pa, pb) = (pair.p_a, pair.p_b);
    let mut mat = CMatrix::zeros(4, 4);
    mat[(0, 0)] = Complex64::new(pb, 0.0);
    mat[(1, 1)] = Complex64::new(pa - pb, 0.0);
    mat[(3, 3)] = Complex64::new(1.0 - pa, 0.0);
    pair.finish(mat)
}

/// The disorder hierarchy `(Λ^c, Λ^s, Λ^e)`; each majorized by the next.
pub fn hierarchy(pair: &QubitPair) -> (ProbVector, ProbVector, ProbVector) {
    (
        spectrum_classical(pair),
        spectrum_separable(pair),
        spectrum_entangled(pair),
    )
}

/// One row of the capacity curve: correlation information of the three
/// optimal composites at a fixed `p_b`.
#[derive(Debug, Clone, Copy)]
pub struct Fig1Row {
    pub p_b: f64,
    pub c_classical: f64,
    pub c_separable: f64,
    pub c_entangled: f64,
}

/// Sweeps `p_b` over `[1/2, 1]` on a uniform grid of `steps` points at fixed
/// `p_a`, evaluating the correlation information of each optimal composite
/// from the assembled state itself (not the closed forms). Labels swap
/// automatically where `p_b > p_a`, so the full range is covered.
pub fn fig1_curve(p_a: f64, steps: usize) -> Result<Vec<Fig1Row>, TwoQubitError> {
    if !(0.5..=1.0).contains(&p_a) {
        return Err(TwoQubitError::BadProbability(p_a));
    }
    assert!(steps >= 2, "a sweep needs at least two grid points");
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let p_b = 0.5 + 0.5 * k as f64 / (steps - 1) as f64;
        let pair = QubitPair::new(p_a, p_b)?;
        let c_of = |rho: &DensityMatrix| {
            correlation_information(rho).expect("closed-form states are valid")
        };
        rows.push(Fig1Row {
            p_b,
            c_classical: c_of(&sigma_classical(&pair)),
            c_separable: c_of(&sigma_separable(&pair)),
            c_entangled: c_of(&sigma_entangled(&pair)),
        });
    }
    Ok(rows)
}

/// CSV rendering of a capacity curve, nine significant digits per value.
pub fn fig1_to_csv(rows: &[Fig1Row]) -> String {
    let mut out = String::from("p_b,C_classical,C_separable,C_entangled\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::io::sig9(r.p_b),
            crate::io::sig9(r.c_classical),
            crate::io::sig9(r.c_separable),
            crate::io::sig9(r.c_entangled)
        ));
    }
    out
}

/// Feline state of `n` isospectral qudits, `Σ_k √λ_k |k k … k⟩`, plus its
/// decohered diagonal version. The pure state carries `n·H(λ)` bits of
/// correlation information and the decohered one `(n−1)·H(λ)`.
///
/// The decohered form is materialized densely, which caps the practical
/// total dimension at 4096 on top of the `n·log₂d ≤ 20` guard.
pub fn feline_state(
    n: usize,
    spectrum: &ProbVector,
) -> Result<(PureState, DensityMatrix), TwoQubitError> {
    if n < 2 {
        return Err(TwoQubitError::BadPartyCount(n));
    }
    let d = spectrum.len();
    let too_large = TwoQubitError::TooLarge {
        parties: n,
        local_dim: d,
    };
    if d < 1 || (n as f64) * (d as f64).log2() > FELINE_QUBIT_BUDGET {
        return Err(too_large);
    }
    let total = d.checked_pow(n as u32).ok_or(too_large.clone())?;
    if total > FELINE_DENSE_DIM_CAP {
        return Err(too_large);
    }
    // |k k … k⟩ has flat index k · (d^{n-1} + … + d + 1).
    let diag_stride: usize = (0..n).map(|j| d.pow(j as u32)).sum();
    let mut vec = CVector::zeros(total);
    let mut dec = CMatrix::zeros(total, total);
    for (k, &lam) in spectrum.entries().iter().enumerate() {
        let idx = k * diag_stride;
        vec[idx] = Complex64::new(lam.max(0.0).sqrt(), 0.0);
        dec[(idx, idx)] = Complex64::new(lam.max(0.0), 0.0);
    }
    let dims = vec![d; n];
    let pure = PureState::from_unnormalized(vec, dims.clone()).expect("spectrum sums to one");
    let decohered = DensityMatrix::from_parts_unchecked(dec, dims);
    Ok((pure, decohered))
}
