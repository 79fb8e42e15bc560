//! Randomized and exhaustive verification suites behind `verify`.
//!
//! Each suite aggregates to a [`SuiteReport`] with a failure count and the
//! worst violation seen, so exit codes and CI assertions can consume them
//! directly. Trials derive per-index child streams, making `--parallel`
//! runs bitwise identical to serial ones.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composite::{build_optimal_separable, gram_matrix, marginal_spectra};
use crate::locc::{capacity_infimum, entropy_sum_minus_max, monotonicity_trial};
use crate::majorization::{infimum, supremum, ProbVector};
use crate::qstate::DensityMatrix;
use crate::sampling::{haar_pure, random_classical_joint, random_density, random_separable, SeededStream};
use crate::twoqubit::{spectrum_classical, spectrum_entangled, spectrum_separable, QubitPair};

/// Summary of one verification suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    pub max_violation: f64,
}

/// The named property suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Theorem1,
    NielsenKempe,
    Hierarchy,
    Locc,
    Corollary3,
    LatticeOracle,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Theorem1,
        Suite::NielsenKempe,
        Suite::Hierarchy,
        Suite::Locc,
        Suite::Corollary3,
        Suite::LatticeOracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::NielsenKempe => "nielsen-kempe",
            Suite::Hierarchy => "hierarchy",
            Suite::Locc => "locc",
            Suite::Corollary3 => "corollary3",
            Suite::LatticeOracle => "lattice-oracle",
        }
    }

    /// Trial count used when the caller does not specify one.
    pub fn default_trials(&self) -> usize {
        match self {
            Suite::Theorem1 => 500,
            Suite::LatticeOracle => 0, // exhaustive; the count is intrinsic
            _ => 1000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Runs the named suite. `trials` is ignored by the exhaustive lattice
/// oracle; the other suites fall back to their standard counts when
/// `trials` is 0.
pub fn run_suite(suite: Suite, trials: usize, seed: u64, parallel: bool) -> SuiteReport {
    let trials = if trials == 0 { suite.default_trials() } else { trials };
    match suite {
        Suite::Theorem1 => theorem1_suite(trials, seed, parallel),
        Suite::NielsenKempe => nielsen_kempe_suite(trials, seed, parallel),
        Suite::Hierarchy => hierarchy_suite(trials, seed, parallel),
        Suite::Locc => locc_suite(trials, seed, parallel),
        Suite::Corollary3 => corollary3_suite(trials, seed, parallel),
        Suite::LatticeOracle => lattice_oracle_suite(parallel),
    }
}

struct TrialOutcome {
    failed: bool,
    violation: f64,
}

fn aggregate<F>(suite: Suite, trials: usize, parallel: bool, run: F) -> SuiteReport
where
    F: Fn(usize) -> TrialOutcome + Sync + Send,
{
    let fold = |acc: (usize, f64), out: TrialOutcome| {
        (acc.0 + usize::from(out.failed), acc.1.max(out.violation))
    };
    let (failures, max_violation) = if parallel {
        (0..trials)
            .into_par_iter()
            .map(run)
            .fold(|| (0usize, f64::NEG_INFINITY), fold)
            .reduce(
                || (0usize, f64::NEG_INFINITY),
                |a, b| (a.0 + b.0, a.1.max(b.1)),
            )
    } else {
        (0..trials).map(run).fold((0usize, f64::NEG_INFINITY), fold)
    };
    SuiteReport {
        suite: suite.name().to_string(),
        trials,
        failures,
        max_violation: if max_violation.is_finite() { max_violation } else { 0.0 },
    }
}

/// The assembled separable composite must have the meet of the marginal
/// spectra as its spectrum, reproduce the marginals, and carry an
/// orthogonal product ensemble (vanishing Gram off-diagonals).
fn theorem1_suite(trials: usize, seed: u64, parallel: bool) -> SuiteReport {
    let root = SeededStream::new(seed);
    aggregate(Suite::Theorem1, trials, parallel, move |t| {
        let stream = root.child(t as u64);
        let mut rng = stream.rng();
        let n = 2 + rand::Rng::random_range(&mut rng, 0..2u32) as usize;
        let marginals: Vec<DensityMatrix> = (0..n)
            .map(|a| {
                let mut r = stream.child(1 + a as u64).rng();
                let dim = 2 + rand::Rng::random_range(&mut r, 0..2u32) as usize;
                let rank = 1 + rand::Rng::random_range(&mut r, 0..dim as u32) as usize;
                random_density(dim, rank, &stream.child(10 + a as u64)).expect("small dims")
            })
            .collect();
        let spectra: Vec<ProbVector> = marginals
            .iter()
            .map(|m| m.spectral().expect("valid").eigenvalues)
            .collect();
        let meet = infimum(&spectra).expect("non-empty");
        let (sigma, ensemble) = build_optimal_separable(&marginals).expect("valid marginals");

        let mut violation = 0.0f64;
        let lam = sigma.spectral().expect("valid").eigenvalues;
        let d = lam.len().max(meet.len());
        for i in 0..d {
            violation = violation.max((lam.entry_padded(i) - meet.entry_padded(i)).abs());
        }
        let mut failed = violation > 1e-8;

        for (a, want) in marginals.iter().enumerate() {
            let got = sigma.partial_trace(&[a]).expect("valid subsystem");
            let dev = (got.matrix() - want.matrix()).norm();
            violation = violation.max(dev);
            failed |= dev > 1e-9;
        }

        let g = gram_matrix(&ensemble);
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                if i != j {
                    let off = g[(i, j)].norm();
                    violation = violation.max(off);
                    failed |= off > 1e-8;
                }
            }
        }
        TrialOutcome { failed, violation }
    })
}

/// Nielsen–Kempe, sharpened: the spectrum of a random separable state is
/// majorized by the meet of its marginal spectra.
fn nielsen_kempe_suite(trials: usize, seed: u64, parallel: bool) -> SuiteReport {
    const DIMS: [[usize; 2]; 3] = [[2, 2], [2, 3], [3, 3]];
    let root = SeededStream::new(seed);
    aggregate(Suite::NielsenKempe, trials, parallel, move |t| {
        let stream = root.child(t as u64);
        let dims = DIMS[t % DIMS.len()];
        let terms = 1 + t % 8;
        let rho = random_separable(&dims, terms, &stream);
        let lam = rho.spectral().expect("valid").eigenvalues;
        let meet = infimum(&marginal_spectra(&rho).expect("valid")).expect("non-empty");
        let d = lam.len().max(meet.len());
        let pa = lam.prefix_sums(d);
        let pb = meet.prefix_sums(d);
        let violation = pa
            .iter()
            .zip(&pb)
            .map(|(x, y)| x - y)
            .fold(f64::NEG_INFINITY, f64::max);
        TrialOutcome {
            failed: violation > 1e-12,
            violation,
        }
    })
}

/// The two-qubit disorder hierarchy: the closed-form spectra chain under
/// majorization, arbitrary two-qubit states sit below the entangled
/// optimum of their own marginals, and classical joint pmfs sit below the
/// classical optimum.
fn hierarchy_suite(trials: usize, seed: u64, parallel: bool) -> SuiteReport {
    let root = SeededStream::new(seed);
    aggregate(Suite::Hierarchy, trials, parallel, move |t| {
        let stream = root.child(t as u64);
        let mut rng = stream.rng();
        let mut violation = f64::NEG_INFINITY;
        let excess = |a: &ProbVector, b: &ProbVector| {
            let d = a.len().max(b.len());
            let pa = a.prefix_sums(d);
            let pb = b.prefix_sums(d);
            pa.iter()
                .zip(&pb)
                .map(|(x, y)| x - y)
                .fold(f64::NEG_INFINITY, f64::max)
        };

        // Closed-form chain on a random pair.
        let pa = 0.5 + 0.5 * rand::Rng::random::<f64>(&mut rng);
        let pb = 0.5 + 0.5 * rand::Rng::random::<f64>(&mut rng);
        let pair = QubitPair::new(pa, pb).expect("in range");
        violation = violation.max(excess(&spectrum_classical(&pair), &spectrum_separable(&pair)));
        violation = violation.max(excess(&spectrum_separable(&pair), &spectrum_entangled(&pair)));

        // Arbitrary two-qubit state against the entangled optimum of its
        // own marginals.
        let rank = 1 + (t % 4);
        let rho = random_density(4, rank, &stream.child(1))
            .expect("small dims")
            .with_dims(vec![2, 2])
            .expect("4 = 2·2");
        let spectra = marginal_spectra(&rho).expect("valid");
        let mpair = QubitPair::new(spectra[0].entries()[0], spectra[1].entries()[0]).expect("in range");
        let lam = rho.spectral().expect("valid").eigenvalues;
        violation = violation.max(excess(&lam, &spectrum_entangled(&mpair)));

        // Random classical joint against the classical optimum.
        let marginals = [
            ProbVector::new(&[pa, 1.0 - pa]).expect("valid"),
            ProbVector::new(&[pb, 1.0 - pb]).expect("valid"),
        ];
        let joint = random_classical_joint(&marginals, 200, &stream.child(2));
        violation = violation.max(excess(&joint.sorted_spectrum(), &spectrum_classical(&pair)));

        TrialOutcome {
            failed: violation > 1e-12,
            violation,
        }
    })
}

/// LOCC monotonicity: one random local measurement per trial on a random
/// 3- or 4-qubit pure state; checks the entropy monotone and per-party
/// average marginal entropies.
fn locc_suite(trials: usize, seed: u64, parallel: bool) -> SuiteReport {
    let root = SeededStream::new(seed);
    aggregate(Suite::Locc, trials, parallel, move |t| {
        let stream = root.child(t as u64);
        let n = 3 + t % 2;
        let psi = haar_pure(&vec![2; n], &stream.child(0)).expect("small dims");
        let report = monotonicity_trial(&psi, 1, &stream.child(1));
        let violation = report
            .max_violation
            .max(report.marginal_entropy_max_violation);
        TrialOutcome {
            failed: violation > 1e-10,
            violation,
        }
    })
}

/// On random all-qubit pure states the separable capacity equals the
/// entropy monotone, and the capacity itself is monotone under one round
/// of local measurement.
fn corollary3_suite(trials: usize, seed: u64, parallel: bool) -> SuiteReport {
    let root = SeededStream::new(seed);
    aggregate(Suite::Corollary3, trials, parallel, move |t| {
        let stream = root.child(t as u64);
        let n = 2 + t % 3;
        let psi = haar_pure(&vec![2; n], &stream.child(0)).expect("small dims");
        let equality_gap = (capacity_infimum(&psi) - entropy_sum_minus_max(&psi)).abs();
        let report = monotonicity_trial(&psi, 1, &stream.child(1));
        let violation = equality_gap.max(report.capacity_max_violation);
        TrialOutcome {
            failed: violation > 1e-10,
            violation,
        }
    })
}

// ------------------------------------------------------------------
// Exhaustive lattice oracle.
//
// Works entirely in integer arithmetic: spectra are partitions of 12 into
// at most four parts; suprema of such spectra live on the denominator-144
// grid because hull interpolation gaps divide 12. The oracle classifies
// bounds by raw prefix comparison, independent of the hull- and
// minimum-based implementation it is checking.
// ------------------------------------------------------------------

/// Non-increasing `parts`-tuples of non-negative integers summing to
/// `total` (zero-padded partitions).
fn partitions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, cap: u32, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let remaining = (cur.len() - pos) as u32;
        let lo = left.div_ceil(remaining);
        for k in (lo..=cap.min(left)).rev() {
            cur[pos] = k;
            rec(cur, pos + 1, left - k, k, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    rec(&mut cur, 0, total, total, &mut out);
    out
}

fn int_prefixes(v: &[u32]) -> [u32; 4] {
    let mut acc = 0;
    let mut out = [0u32; 4];
    for (i, &x) in v.iter().enumerate() {
        acc += x;
        out[i] = acc;
    }
    out
}

fn lattice_oracle_subset(
    subset: &[&[u32]],
    family12: &[(Vec<u32>, [u32; 4])],
    family144: &[(Vec<u32>, [u32; 4])],
) -> TrialOutcome {
    let mut pmin = [u32::MAX; 4];
    let mut pmax = [0u32; 4];
    for s in subset {
        let p = int_prefixes(s);
        for j in 0..4 {
            pmin[j] = pmin[j].min(p[j]);
            pmax[j] = pmax[j].max(p[j] * 12);
        }
    }

    // Greatest lower bound: maximal element of the lower-bound set.
    let lower: Vec<&(Vec<u32>, [u32; 4])> = family12
        .iter()
        .filter(|(_, p)| (0..4).all(|j| p[j] <= pmin[j]))
        .collect();
    let glb = lower
        .iter()
        .find(|(_, p)| lower.iter().all(|(_, q)| (0..4).all(|j| q[j] <= p[j])));

    // Least upper bound: prefix-wise minimum over the upper-bound set,
    // verified to be attained by a member of that set.
    let mut lub_prefix = [u32::MAX; 4];
    let mut lub_witness = false;
    for (_, p) in family144 {
        if (0..4).all(|j| p[j] >= pmax[j]) {
            for j in 0..4 {
                lub_prefix[j] = lub_prefix[j].min(p[j]);
            }
        }
    }
    for (_, p) in family144 {
        if *p == lub_prefix {
            lub_witness = true;
            break;
        }
    }

    let spectra: Vec<ProbVector> = subset
        .iter()
        .map(|s| {
            let raw: Vec<f64> = s.iter().map(|&k| k as f64 / 12.0).collect();
            ProbVector::new(&raw).expect("grid spectrum")
        })
        .collect();
    let inf = infimum(&spectra).expect("non-empty");
    let sup = supremum(&spectra).expect("non-empty");

    let mut violation = 0.0f64;
    let mut failed = false;
    match glb {
        Some((v, _)) => {
            for (j, &part) in v.iter().enumerate() {
                let dev = (inf.entry_padded(j) * 12.0 - part as f64).abs();
                violation = violation.max(dev / 12.0);
                failed |= dev > 1e-6;
            }
        }
        None => failed = true,
    }
    if lub_witness {
        let mut prev = 0u32;
        for (j, &acc) in lub_prefix.iter().enumerate() {
            let part = acc - prev;
            prev = acc;
            let dev = (sup.entry_padded(j) * 144.0 - part as f64).abs();
            violation = violation.max(dev / 144.0);
            failed |= dev > 1e-6;
        }
    } else {
        failed = true;
    }
    TrialOutcome { failed, violation }
}

/// Exhaustive check of `infimum`/`supremum` against brute-force bounds on
/// the denominator-12 grid, over every subset of size ≤ 3.
pub fn lattice_oracle_suite(parallel: bool) -> SuiteReport {
    let family12: Vec<(Vec<u32>, [u32; 4])> = partitions(12, 4)
        .into_iter()
        .map(|v| {
            let p = int_prefixes(&v);
            (v, p)
        })
        .collect();
    let family144: Vec<(Vec<u32>, [u32; 4])> = partitions(144, 4)
        .into_iter()
        .map(|v| {
            let p = int_prefixes(&v);
            (v, p)
        })
        .collect();

    let n = family12.len();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        subsets.push(vec![i]);
        for j in (i + 1)..n {
            subsets.push(vec![i, j]);
            for k in (j + 1)..n {
                subsets.push(vec![i, j, k]);
            }
        }
    }

    let run = |subset: &Vec<usize>| {
        let members: Vec<&[u32]> = subset.iter().map(|&i| family12[i].0.as_slice()).collect();
        lattice_oracle_subset(&members, &family12, &family144)
    };
    let fold = |acc: (usize, f64), out: TrialOutcome| {
        (acc.0 + usize::from(out.failed), acc.1.max(out.violation))
    };
    let (failures, max_violation) = if parallel {
        subsets
            .par_iter()
            .map(run)
            .fold(|| (0usize, 0.0f64), fold)
            .reduce(|| (0usize, 0.0f64), |a, b| (a.0 + b.0, a.1.max(b.1)))
    } else {
        subsets.iter().map(run).fold((0usize, 0.0f64), fold)
    };
    SuiteReport {
        suite: Suite::LatticeOracle.name().to_string(),
        trials: subsets.len(),
        failures,
        max_violation,
    }
}
