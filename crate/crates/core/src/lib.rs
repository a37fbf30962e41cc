//! Probabilistic cloning of linearly independent pure states.
//!
//! A set of pure states can be cloned exactly, with some success probability
//! `η`, by a single unitary followed by a probe measurement if and only if the
//! states are linearly independent. This crate decides that question for a
//! concrete set, computes the largest admissible `η` for an `m`-copy machine,
//! synthesizes the unitary explicitly and simulates it on exact statevectors.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the `probclone` crate.
//!
//! Pipeline:
//!
//! - [`states`]: state vectors, state sets, Gram matrices `X^(k)` and the
//!   linear-independence test.
//! - [`feasibility`]: the PSD condition `X^(1) − η X^(m) ⪰ 0`, the maximal
//!   efficiency by two independent routes and the constants matrix `C`.
//! - [`synthesis`]: Gram-Schmidt transport of inner products and unitary
//!   completion, assembled into a [`CloningMachine`].
//! - [`simulator`]: probe measurement, post-selection, Monte Carlo sampling
//!   and end-to-end verification.

#![no_std]

extern crate alloc;

pub mod error;
pub mod feasibility;
pub mod linalg;
pub mod simulator;
pub mod states;
pub mod synthesis;

pub use error::{Error, Result};
pub use feasibility::{
    constants_matrix, is_feasible, max_efficiency, max_efficiency_bisect, max_efficiency_eigen,
    ConstantsMatrix, FeasibilityReport, Feasibility, Method,
};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use simulator::{
    clone_fidelity, run_exact, run_sampled, sample_outcomes, verify_machine, CloneOutcome, MemberCheck,
    MonteCarloReport, VerificationReport,
};
pub use states::{gram, is_linearly_independent, make_state, GramMatrix, Independence, StateSet, StateVector};
pub use synthesis::{
    apply_coeffs, build_machine, build_machine_with_blank, complete_unitary, gram_schmidt,
    CloningMachine, MachineParts, OrthonormalizationResult,
};

/// Default tolerance on the minimum Gram eigenvalue for independence.
pub const INDEPENDENCE_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;
/// Width of the final bracket in the bisection solver.
pub const BISECTION_TOL: f64 = 1e-10;
