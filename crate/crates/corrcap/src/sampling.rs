//! Reproducible random generation for all property suites.
//!
//! Randomness is organized around [`SeededStream`]: a master seed plus a
//! derivation path. Each `(seed, path)` pair maps to a fixed ChaCha12 key,
//! so parallel trials that derive their own child streams draw identical
//! values regardless of schedule or platform. The key derivation is fixed:
//! a SplitMix64 walk absorbs the master seed and each path element in turn,
//! and four further outputs form the 32-byte ChaCha key.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::majorization::ProbVector;
use crate::qstate::{CMatrix, CVector, DensityMatrix, PureState};

/// Total-dimension cap for generated pure states.
pub const MAX_TOTAL_DIM: usize = 1 << 20;

/// Default rectangle-move budget per pmf cell for classical joint sampling.
pub const DEFAULT_MOVES_PER_CELL: usize = 50;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SampleError {
    #[error("total dimension {0} exceeds the 2^20 guard")]
    TooLarge(usize),
    #[error("rank {rank} invalid for dimension {dim}")]
    BadRank { dim: usize, rank: usize },
}

/// A value-like handle on a deterministic random stream: a 64-bit master
/// seed plus a derivation path of indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededStream {
    master_seed: u64,
    path: Vec<u64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeededStream {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            path: Vec::new(),
        }
    }

    /// Child stream at derivation index `idx`.
    pub fn child(&self, idx: u64) -> Self {
        let mut path = self.path.clone();
        path.push(idx);
        Self {
            master_seed: self.master_seed,
            path,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// The ChaCha12 generator keyed by this stream's `(seed, path)`.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut state = self.master_seed;
        let _ = splitmix64(&mut state);
        for &p in &self.path {
            state ^= p.wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let _ = splitmix64(&mut state);
        }
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha12Rng::from_seed(key)
    }
}

fn complex_gaussian(rng: &mut ChaCha12Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state on the given subsystem dimensions: a normalized
/// complex Gaussian vector, hence unitarily invariant.
pub fn haar_pure(dims: &[usize], stream: &SeededStream) -> Result<PureState, SampleError> {
    let total: usize = dims.iter().product();
    if total == 0 || total > MAX_TOTAL_DIM {
        return Err(SampleError::TooLarge(total));
    }
    let mut rng = stream.rng();
    let raw = CVector::from_fn(total, |_, _| complex_gaussian(&mut rng));
    Ok(PureState::from_unnormalized(raw, dims.to_vec()).expect("gaussian vector is nonzero"))
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the usual
/// phase fix on the R diagonal.
pub fn haar_unitary(dim: usize, stream: &SeededStream) -> CMatrix {
    let mut rng = stream.rng();
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix of the given rank: the partial trace of a Haar
/// pure state on `dim × rank` (the induced Hilbert–Schmidt family).
pub fn random_density(dim: usize, rank: usize, stream: &SeededStream) -> Result<DensityMatrix, SampleError> {
    if rank == 0 || rank > dim {
        return Err(SampleError::BadRank { dim, rank });
    }
    if dim * rank > MAX_TOTAL_DIM {
        return Err(SampleError::TooLarge(dim * rank));
    }
    let mut rng = stream.rng();
    let m = CMatrix::from_fn(dim, rank, |_, _| complex_gaussian(&mut rng));
    let mut rho = &m * m.adjoint();
    let tr = rho.trace().re;
    rho.scale_mut(1.0 / tr);
    Ok(DensityMatrix::from_parts_unchecked(rho, vec![dim]))
}

/// Flat-Dirichlet weights: normalized unit exponentials.
pub fn dirichlet_weights(n: usize, stream: &SeededStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut w: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Random separable state `Σ_k w_k ⊗_a |u^a_k⟩⟨u^a_k|` with flat-Dirichlet
/// weights and independent Haar local vectors; separable by construction.
pub fn random_separable(dims: &[usize], terms: usize, stream: &SeededStream) -> DensityMatrix {
    assert!(terms >= 1, "at least one product term");
    let weights = dirichlet_weights(terms, &stream.child(0));
    let total: usize = dims.iter().product();
    let mut rho = CMatrix::zeros(total, total);
    for (k, &w) in weights.iter().enumerate() {
        let term = stream.child(1 + k as u64);
        let mut vec = CVector::from_element(1, Complex64::ONE);
        for (a, &d) in dims.iter().enumerate() {
            let local = haar_pure(&[d], &term.child(a as u64)).expect("small local dim");
            vec = vec.kronecker(local.vector());
        }
        rho += (&vec * vec.adjoint()).scale(w);
    }
    DensityMatrix::from_parts_unchecked(rho, dims.to_vec())
}

/// A joint pmf over a product of finite alphabets, stored flat in row-major
/// order (leftmost party varies slowest).
#[derive(Debug, Clone)]
pub struct JointPmf {
    dims: Vec<usize>,
    p: Vec<f64>,
}

impl JointPmf {
    /// Independent product of the given marginals.
    pub fn product(marginals: &[ProbVector]) -> Self {
        let dims: Vec<usize> = marginals.iter().map(ProbVector::len).collect();
        let total: usize = dims.iter().product();
        let mut p = vec![0.0; total];
        for (idx, cell) in p.iter_mut().enumerate() {
            let mut rest = idx;
            let mut val = 1.0;
            for (a, &d) in dims.iter().enumerate().rev() {
                val *= marginals[a].entries()[rest % d];
                rest /= d;
                let _ = a;
            }
            *cell = val;
        }
        Self { dims, p }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cells(&self) -> &[f64] {
        &self.p
    }

    /// Classical marginal of one party.
    pub fn marginal(&self, a: usize) -> Vec<f64> {
        let post: usize = self.dims[a + 1..].iter().product();
        let da = self.dims[a];
        let mut out = vec![0.0; da];
        for (idx, &v) in self.p.iter().enumerate() {
            out[(idx / post) % da] += v;
        }
        out
    }

    /// Cells sorted non-increasingly as a spectrum.
    pub fn sorted_spectrum(&self) -> ProbVector {
        ProbVector::new(&self.p).expect("pmf is a distribution")
    }
}

/// Random joint pmf with the given marginals: starts from the product pmf
/// and applies `iterations` random rectangle moves, each of which shifts
/// mass around a 2×2 rectangle of two parties (other parties' indices held
/// fixed) and therefore preserves every marginal exactly.
pub fn random_classical_joint(
    marginal_spectra: &[ProbVector],
    iterations: usize,
    stream: &SeededStream,
) -> JointPmf {
    let mut joint = JointPmf::product(marginal_spectra);
    let n = joint.dims.len();
    if n < 2 || joint.dims.iter().filter(|&&d| d >= 2).count() < 2 {
        return joint;
    }
    let mut rng = stream.rng();
    let strides = {
        let mut s = vec![1usize; n];
        for k in (0..n - 1).rev() {
            s[k] = s[k + 1] * joint.dims[k + 1];
        }
        s
    };
    for _ in 0..iterations {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b || joint.dims[a] < 2 || joint.dims[b] < 2 {
            continue;
        }
        let i = rng.random_range(0..joint.dims[a]);
        let i2 = (i + 1 + rng.random_range(0..joint.dims[a] - 1)) % joint.dims[a];
        let j = rng.random_range(0..joint.dims[b]);
        let j2 = (j + 1 + rng.random_range(0..joint.dims[b] - 1)) % joint.dims[b];
        // Uniform setting of the remaining parties.
        let mut base = 0usize;
        for (k, &stride) in strides.iter().enumerate() {
            if k != a && k != b {
                base += rng.random_range(0..joint.dims[k]) * stride;
            }
        }
        let idx = |ia: usize, jb: usize| base + ia * strides[a] + jb * strides[b];
        let (c00, c01, c10, c11) = (idx(i, j), idx(i, j2), idx(i2, j), idx(i2, j2));
        let lo = -joint.p[c00].min(joint.p[c11]);
        let hi = joint.p[c01].min(joint.p[c10]);
        if hi - lo <= 0.0 {
            continue;
        }
        let delta = lo + (hi - lo) * rng.random::<f64>();
        joint.p[c00] += delta;
        joint.p[c11] += delta;
        joint.p[c01] -= delta;
        joint.p[c10] -= delta;
        joint.p[c00] = joint.p[c00].max(0.0);
        joint.p[c11] = joint.p[c11].max(0.0);
        joint.p[c01] = joint.p[c01].max(0.0);
        joint.p[c10] = joint.p[c10].max(0.0);
    }
    joint
}

/// Random effect operator `0 ≤ E ≤ I`: Haar eigenvectors with uniform
/// eigenvalues in `[0, 1]`, covering projective and weak measurements.
pub fn random_effect(dim: usize, stream: &SeededStream) -> CMatrix {
    let v = haar_unitary(dim, &stream.child(0));
    let mut rng = stream.child(1).rng();
    let mut out = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let e = rng.random::<f64>();
        let col = v.column(j);
        out += (col * col.adjoint()).scale(e);
    }
    out
}
