//! Correlative capacity of composite quantum states.
//!
//! This crate implements the majorization lattice on probability spectra
//! (meet and join), the construction of the least-disordered separable
//! state compatible with a set of marginals, correlation-information
//! accounting and classical-correlation classification, closed-form
//! two-qubit optima with their disorder hierarchy, and an LOCC-monotone
//! harness for multipartite pure states — together with reproducible
//! samplers and the verification suites that exercise all of it.
//!
//! Entropies are reported in bits throughout. All operations are pure
//! functions over immutable values and safe to use across threads.

pub mod composite;
pub mod ensemble;
pub mod io;
pub mod locc;
pub mod majorization;
pub mod qstate;
pub mod sampling;
pub mod suites;
pub mod twoqubit;

pub use composite::{
    build_optimal_separable, correlation_information, gram_matrix, is_classically_correlated,
    max_separable_correlation, partition_correlation, CompositeReport,
};
pub use ensemble::{realize_ensemble, schur_horn_unitary, Ensemble, SchurHornUnitary};
pub use majorization::{compare, infimum, supremum, MajOrder, ProbVector};
pub use qstate::{DensityMatrix, PureState, SpectralDecomp};
pub use sampling::SeededStream;
pub use suites::{run_suite, Suite, SuiteReport};
pub use twoqubit::QubitPair;
