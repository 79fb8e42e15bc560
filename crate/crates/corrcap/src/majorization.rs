//! Majorization partial order on probability spectra and its lattice.
//!
//! A spectrum `x` is majorized by `y` (written `x ≺ y`) when every prefix sum
//! of `x` is bounded by the corresponding prefix sum of `y`, after both are
//! sorted non-increasingly and zero-padded to a common length. The meet
//! (infimum) of a set is read off the pointwise minimum of the prefix-sum
//! profiles; the join (supremum) takes the pointwise maximum and then its
//! least concave majorant, computed as an upper convex hull over the integer
//! grid. The meet needs no hull step: a pointwise minimum of concave
//! sequences is already concave.

use thiserror::Error;

/// Absolute tolerance for prefix-sum comparisons and normalization checks.
pub const EPS_TOL: f64 = 1e-12;

/// Loose tolerance accepted on raw input before canonicalization.
const INPUT_TOL: f64 = 1e-9;

/// Errors from spectrum construction and lattice operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MajError {
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("empty set of distributions")]
    EmptySet,
}

/// Outcome of comparing two spectra under the majorization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajOrder {
    /// First argument is majorized by the second (more disordered).
    MajorizedBy,
    /// First argument majorizes the second (less disordered).
    Majorizes,
    /// Both directions hold within tolerance.
    Equal,
    /// Neither direction holds: the prefix-sum curves cross.
    Incomparable,
}

/// A probability spectrum: non-negative entries, sorted non-increasingly,
/// summing to one.
///
/// Construction via [`ProbVector::new`] canonicalizes raw input (sorts,
/// clips negatives within `1e-9`, renormalizes). Trailing zeros are
/// significant only for storage; all comparisons zero-pad to a common
/// length, so `(0.7, 0.3)` and `(0.7, 0.3, 0.0)` compare `Equal`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    entries: Vec<f64>,
}

impl ProbVector {
    /// Canonicalizes a raw sequence into a spectrum.
    ///
    /// Rejects entries below `-1e-9` or a total further than `1e-9` from
    /// one; otherwise sorts descending, clips small negatives to zero and
    /// renormalizes to exact unit sum.
    pub fn new(raw: &[f64]) -> Result<Self, MajError> {
        if raw.is_empty() {
            return Err(MajError::NotADistribution("empty entry list".into()));
        }
        if let Some(&bad) = raw.iter().find(|x| !x.is_finite() || **x < -INPUT_TOL) {
            return Err(MajError::NotADistribution(format!(
                "entry {bad} below tolerance -{INPUT_TOL}"
            )));
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > INPUT_TOL {
            return Err(MajError::NotADistribution(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        let mut entries: Vec<f64> = raw.iter().map(|&x| x.max(0.0)).collect();
        entries.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = entries.iter().sum();
        for e in &mut entries {
            *e /= total;
        }
        Ok(Self { entries })
    }

    /// Builds a spectrum from eigenvalues already sorted non-increasingly.
    ///
    /// Clips negatives within `1e-9` and renormalizes; used for solver
    /// output where the ordering is established by the caller.
    pub(crate) fn from_sorted_eigenvalues(vals: &[f64]) -> Self {
        debug_assert!(vals.windows(2).all(|w| w[0] >= w[1] - 1e-9));
        let mut entries: Vec<f64> = vals.iter().map(|&x| x.max(0.0)).collect();
        entries.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = entries.iter().sum();
        for e in &mut entries {
            *e /= total;
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at `i`, reading zero beyond the stored length.
    pub fn entry_padded(&self, i: usize) -> f64 {
        self.entries.get(i).copied().unwrap_or(0.0)
    }

    /// Prefix sums padded with trailing zeros to length `d`.
    pub fn prefix_sums(&self, d: usize) -> Vec<f64> {
        let mut acc = 0.0;
        (0..d)
            .map(|i| {
                acc += self.entry_padded(i);
                acc
            })
            .collect()
    }

    /// Shannon entropy in bits, with `0·log 0 = 0`.
    pub fn shannon_entropy(&self) -> f64 {
        shannon_entropy_bits(&self.entries)
    }
}

/// Shannon entropy of a non-negative weight slice, in bits.
pub(crate) fn shannon_entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Compares two spectra under majorization, zero-padding to common length.
///
/// `MajorizedBy` means every prefix sum of `a` is at most that of `b`
/// within `1e-12`; ties at exactly equal prefix sums satisfy both sides.
pub fn compare(a: &ProbVector, b: &ProbVector) -> MajOrder {
    let d = a.len().max(b.len());
    let pa = a.prefix_sums(d);
    let pb = b.prefix_sums(d);
    let below = pa.iter().zip(&pb).all(|(x, y)| *x <= *y + EPS_TOL);
    let above = pa.iter().zip(&pb).all(|(x, y)| *y <= *x + EPS_TOL);
    match (below, above) {
        (true, true) => MajOrder::Equal,
        (true, false) => MajOrder::MajorizedBy,
        (false, true) => MajOrder::Majorizes,
        (false, false) => MajOrder::Incomparable,
    }
}

/// Greatest lower bound of a set of spectra under majorization.
///
/// The `j`-th prefix sum of the result is the minimum of the `j`-th prefix
/// sums over the set (after zero-padding to the largest dimension); entries
/// are the successive differences. No concavity repair is needed: the
/// pointwise minimum of concave sequences is concave.
pub fn infimum(set: &[ProbVector]) -> Result<ProbVector, MajError> {
    if set.is_empty() {
        return Err(MajError::EmptySet);
    }
    let d = set.iter().map(ProbVector::len).max().unwrap();
    let profiles: Vec<Vec<f64>> = set.iter().map(|v| v.prefix_sums(d)).collect();
    let mut mu = vec![0.0; d + 1];
    for j in 1..=d {
        mu[j] = profiles.iter().map(|p| p[j - 1]).fold(f64::INFINITY, f64::min);
    }
    let entries: Vec<f64> = (1..=d).map(|j| (mu[j] - mu[j - 1]).max(0.0)).collect();
    debug_assert!(entries.windows(2).all(|w| w[0] >= w[1] - EPS_TOL));
    let total: f64 = entries.iter().sum();
    let entries = entries.into_iter().map(|e| e / total).collect();
    Ok(ProbVector { entries })
}

/// Least upper bound of a set of spectra under majorization.
///
/// Takes the pointwise maximum `ν` of the prefix-sum profiles and lifts it
/// to its least concave majorant: the upper convex hull of the points
/// `(0,0), (1,ν_1), …, (d,1)`, evaluated back on the integer grid. The
/// result majorizes every input and is majorized by every common upper
/// bound, making it the lattice join.
pub fn supremum(set: &[ProbVector]) -> Result<ProbVector, MajError> {
    if set.is_empty() {
        return Err(MajError::EmptySet);
    }
    let d = set.iter().map(ProbVector::len).max().unwrap();
    let profiles: Vec<Vec<f64>> = set.iter().map(|v| v.prefix_sums(d)).collect();
    let mut nu = vec![0.0; d + 1];
    for j in 1..=d {
        nu[j] = profiles
            .iter()
            .map(|p| p[j - 1])
            .fold(f64::NEG_INFINITY, f64::max);
    }
    let hull = least_concave_majorant(&nu);
    let entries: Vec<f64> = (1..=d).map(|j| (hull[j] - hull[j - 1]).max(0.0)).collect();
    debug_assert!(entries.windows(2).all(|w| w[0] >= w[1] - EPS_TOL));
    let total: f64 = entries.iter().sum();
    let entries = entries.into_iter().map(|e| e / total).collect();
    Ok(ProbVector { entries })
}

/// Least concave majorant of `(j, values[j])` on the integer grid,
/// via a monotone-chain upper hull. Returns the hull evaluated at every
/// integer abscissa.
fn least_concave_majorant(values: &[f64]) -> Vec<f64> {
    // Hull vertices as (x, y); slopes along the stack strictly decrease.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(values.len());
    for (x, &y) in values.iter().enumerate() {
        let p = (x as f64, y);
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Pop b when it lies on or below the chord a--p.
            if (b.1 - a.1) * (p.0 - b.0) <= (p.1 - b.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(values.len());
    let mut seg = 0;
    for j in 0..values.len() {
        let x = j as f64;
        while seg + 1 < hull.len() && hull[seg + 1].0 < x {
            seg += 1;
        }
        if seg + 1 == hull.len() {
            out.push(hull[seg].1);
        } else {
            let (x0, y0) = hull[seg];
            let (x1, y1) = hull[seg + 1];
            out.push(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
        }
    }
    out
}
