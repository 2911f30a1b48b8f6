//! Exact-arithmetic toolkit for deciding when small tournaments fail to be
//! quasirandomness-forcing.
//!
//! The crate enumerates tournaments up to isomorphism, counts induced copies,
//! evaluates densities in weighted step tournamentons with exact rationals,
//! expands parametrized densities into polynomials, and packages every
//! disqualification argument as a machine-checkable certificate that an
//! independent verifier recomputes from scratch.

pub mod catalog;
pub mod certify;
pub mod hsearch;
pub mod rational;
pub mod stepton;
pub mod subcount;
pub mod sympoly;
pub mod tournament;

pub use catalog::catalog;
pub use certify::{classify_five_vertex, classify_six_vertex, verify, Certificate, Reason};
pub use rational::Rat;
pub use stepton::{
    step_matrix_certificate, blowup_witness_certificate, d_star, d_step, equality_witness, split_certificate,
    twin_automorphism_certificate, ExtendedStepTournamenton, StochasticVector, TournamentMatrix,
};
pub use subcount::{blowup_threshold, count_copies, density, expected_density, DensityValue};
pub use sympoly::{builtin_matrices, d_star_poly, evaluate, find_exceeding, ParamMatrix, RationalPolynomial};
pub use tournament::{
    are_isomorphic, enumerate_tournaments, paley_tournament, CanonicalCode, Tournament,
};
