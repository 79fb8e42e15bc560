//! Acceptance suite: each test pins one release criterion at its stated
//! tolerance and prints a PASS line when it holds (run with
//! `cargo test --test acceptance -- --nocapture` to see the lines).

use corrcap::composite::{is_classically_correlated, marginal_spectra};
use corrcap::ensemble::{realize_ensemble, schur_horn_unitary};
use corrcap::majorization::infimum;
use corrcap::sampling::{random_density, SeededStream};
use corrcap::suites::{lattice_oracle_suite, run_suite, Suite};
use corrcap::twoqubit::{
    feline_state, fig1_curve, sigma_classical, sigma_entangled, sigma_separable, QubitPair,
};
use corrcap::ProbVector;
use rand::Rng;

fn pass(n: usize, name: &str) {
    println!("acceptance criterion {n} ({name}): PASS");
}

#[test]
fn criterion_1_lattice_oracle() {
    let report = lattice_oracle_suite(true);
    assert_eq!(report.trials, 6579, "exhaustive subset count");
    assert_eq!(report.failures, 0, "{report:?}");
    pass(1, "lattice oracle, denominator-12 grid");
}

#[test]
fn criterion_2_theorem1_suite() {
    let report = run_suite(Suite::Theorem1, 500, 1001, true);
    assert_eq!(report.trials, 500);
    assert_eq!(report.failures, 0, "{report:?}");
    pass(2, "suite theorem1, 500 random marginal sets");
}

#[test]
fn criterion_3_nielsen_kempe_suite() {
    let report = run_suite(Suite::NielsenKempe, 1000, 1002, true);
    assert_eq!(report.trials, 1000);
    assert_eq!(report.failures, 0, "{report:?}");
    assert!(report.max_violation <= 1e-12, "{report:?}");
    pass(3, "suite nielsen-kempe, 1000 separable states");
}

#[test]
fn criterion_4_fig1_reproduction() {
    let rows = fig1_curve(0.65, 201).expect("valid sweep");
    assert_eq!(rows.len(), 201);
    let at = |p: f64| {
        rows.iter()
            .find(|r| (r.p_b - p).abs() < 1e-9)
            .unwrap_or_else(|| panic!("grid point {p} missing"))
    };

    let iso = at(0.65);
    assert!((iso.c_entangled - 1.868136).abs() < 1e-5);
    assert!((iso.c_separable - 0.934068).abs() < 1e-5);
    assert!((iso.c_classical - 0.934068).abs() < 1e-5);

    let half = at(0.5);
    assert!((half.c_classical - 0.493422).abs() < 1e-5);
    assert!((half.c_separable - 0.934068).abs() < 1e-5);
    assert!((half.c_entangled - 1.324229).abs() < 1e-5);

    for r in &rows {
        assert!(r.c_classical <= r.c_separable + 1e-9, "order at p_b={}", r.p_b);
        assert!(r.c_separable <= r.c_entangled + 1e-9, "order at p_b={}", r.p_b);
    }
    let top = at(1.0);
    assert!(top.c_classical.abs() < 1e-9);
    assert!(top.c_separable.abs() < 1e-9);
    assert!(top.c_entangled.abs() < 1e-9);
    pass(4, "capacity curve at p_a = 0.65");
}

#[test]
fn criterion_5_hierarchy_suite() {
    let report = run_suite(Suite::Hierarchy, 1000, 1003, true);
    assert_eq!(report.trials, 1000);
    assert_eq!(report.failures, 0, "{report:?}");
    assert!(report.max_violation <= 1e-12, "{report:?}");
    pass(5, "suite hierarchy, three random families");
}

#[test]
fn criterion_6_feline_values() {
    let spectrum = ProbVector::new(&[0.65, 0.35]).expect("valid");
    let (pure, decohered) = feline_state(3, &spectrum).expect("small instance");
    let c_pure: f64 = pure
        .marginals()
        .expect("valid")
        .iter()
        .map(|m| m.von_neumann_entropy().expect("valid"))
        .sum();
    let c_dec = corrcap::composite::correlation_information(&decohered).expect("valid");
    let h = spectrum.shannon_entropy();
    assert!((c_pure - 3.0 * h).abs() < 1e-9);
    assert!((c_dec - 2.0 * h).abs() < 1e-9);
    assert!((c_pure - 2.802204).abs() < 1e-6);
    assert!((c_dec - 1.868136).abs() < 1e-6);
    pass(6, "feline state capacities at n = 3, spectrum (0.65, 0.35)");
}

#[test]
fn criterion_7_locc_and_corollary3_suites() {
    let locc = run_suite(Suite::Locc, 1000, 1004, true);
    assert_eq!(locc.trials, 1000);
    assert_eq!(locc.failures, 0, "{locc:?}");
    assert!(locc.max_violation <= 1e-10, "{locc:?}");

    let cor3 = run_suite(Suite::Corollary3, 1000, 1005, true);
    assert_eq!(cor3.trials, 1000);
    assert_eq!(cor3.failures, 0, "{cor3:?}");
    assert!(cor3.max_violation <= 1e-10, "{cor3:?}");
    pass(7, "suites locc and corollary3, 1000 trials each");
}

#[test]
fn criterion_8_ensemble_construction() {
    let root = SeededStream::new(1006);
    for t in 0..1000u64 {
        let stream = root.child(t);
        let dim = 2 + (t % 7) as usize;
        let rho = random_density(dim, 1 + (t as usize % dim), &stream.child(0)).expect("small");
        let lam = rho.spectral().expect("valid").eigenvalues;
        let other = random_density(dim, dim, &stream.child(1))
            .expect("small")
            .spectral()
            .expect("valid")
            .eigenvalues;
        let target = infimum(&[lam.clone(), other]).expect("non-empty");

        let sh = schur_horn_unitary(&lam, &target).expect("target below spectrum");
        let d = sh.matrix.nrows();
        assert!(sh.rotations < d, "rotation count {} at d={d}", sh.rotations);
        for i in 0..d {
            let row: f64 = (0..d).map(|j| sh.matrix[(i, j)].powi(2)).sum();
            let col: f64 = (0..d).map(|j| sh.matrix[(j, i)].powi(2)).sum();
            assert!((row - 1.0).abs() <= 1e-12, "row sum {row}");
            assert!((col - 1.0).abs() <= 1e-12, "col sum {col}");
        }

        let ens = realize_ensemble(&rho, &target).expect("constructible");
        let dev = (ens.reconstruct() - rho.matrix()).norm();
        assert!(dev < 1e-9, "reconstruction error {dev}");
    }
    pass(8, "ensemble construction on 1000 (state, weights) pairs");
}

#[test]
fn criterion_9_classifier() {
    let root = SeededStream::new(1007);
    let mut checked = 0usize;
    for t in 0..200u64 {
        let mut rng = root.child(t).rng();
        let pa: f64 = 0.5 + 0.49 * rng.random::<f64>();
        let pb: f64 = 0.5 + 0.49 * rng.random::<f64>();
        let pair = QubitPair::new(pa, pb).expect("in range");
        assert!(
            is_classically_correlated(&sigma_classical(&pair)).expect("valid"),
            "σ^c misclassified at ({pa}, {pb})"
        );
        if (pa - pb).abs() > 1e-3 {
            assert!(
                !is_classically_correlated(&sigma_separable(&pair)).expect("valid"),
                "σ^s misclassified at ({pa}, {pb})"
            );
            checked += 1;
        }
        // p_a < 1 keeps σ^e entangled, hence never classical.
        assert!(
            !is_classically_correlated(&sigma_entangled(&pair)).expect("valid"),
            "σ^e misclassified at ({pa}, {pb})"
        );
    }
    assert!(checked > 100, "distinct-spectra samples: {checked}");

    let even =
        corrcap::DensityMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5], vec![2, 2]).expect("valid");
    assert!(
        is_classically_correlated(&even).expect("valid"),
        "degenerate product-diagonal mixture misclassified"
    );
    pass(9, "classifier on the four reference families");
}

/// The marginal spectra of every constructed optimum must match the
/// requested pair; kept separate from criterion 9 so classifier failures
/// do not mask construction ones.
#[test]
fn constructed_optima_are_marginally_faithful() {
    let root = SeededStream::new(1008);
    for t in 0..100u64 {
        let mut rng = root.child(t).rng();
        let pa: f64 = 0.5 + 0.5 * rng.random::<f64>();
        let pb: f64 = 0.5 + 0.5 * rng.random::<f64>();
        let pair = QubitPair::new(pa, pb).expect("in range");
        for sigma in [
            sigma_classical(&pair),
            sigma_separable(&pair),
            sigma_entangled(&pair),
        ] {
            let spectra = marginal_spectra(&sigma).expect("valid");
            assert!((spectra[0].entries()[0] - pa.max(1.0 - pa)).abs() < 1e-10);
            assert!((spectra[1].entries()[0] - pb.max(1.0 - pb)).abs() < 1e-10);
        }
    }
}
