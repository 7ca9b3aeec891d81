//! Quantum metrics from the normalized trace on full matrix algebras, at
//! desk scale.
//!
//! The crate builds, on the algebra of `n x n` complex matrices:
//!
//! - dense complex arithmetic, a cyclic-Jacobi Hermitian eigensolver, the
//!   operator norm, and seeded random Hermitian / Haar-unitary generation
//!   ([`matrix`], [`eigen`], [`random`]);
//! - the block-diagonal unital *-monomorphism `pi_{k,n}`, the normalized
//!   trace, and the trace-preserving conditional expectation `P_{k,n}` in
//!   three independently computed forms ([`maps`]);
//! - the two Lip-norms `L_1(a) = ||a - P_1(a)||` and
//!   `L_k(a) = max(||a - P_1(a)||, k ||a - P_k(a)||)`, their `(2,0)`
//!   quasi-Leibniz and kernel checks, and the certificate that the two are
//!   never intertwined by a unital *-isomorphism ([`lip`]);
//! - the induced state-space distance, computed as a certified lower bound
//!   by constrained ascent over the unit Lip-ball, with an exact
//!   vertex-enumeration oracle on commuting instances ([`mk`]);
//! - the shared JSON matrix file format ([`io`]).
//!
//! All values are immutable after construction and every operation is a pure
//! function, so everything is safe to share across threads; callers may
//! parallelize over independent inputs.

#![allow(clippy::needless_range_loop)]

pub mod eigen;
pub mod error;
pub mod io;
pub mod lip;
pub mod maps;
pub mod matrix;
pub mod mk;
pub mod random;

pub use eigen::{clip_spectrum, eigh, operator_norm, operator_norm_hermitian, Spectrum};
pub use error::{Error, Result};
pub use lip::{
    certify_non_isometry, check_kernel, check_quasi_leibniz, check_unitary_invariance,
    gap_positive_exact, lip_eval, witness, LipSpec, LipVariant, WitnessReport,
};
pub use maps::{
    basis_b, block_decompose, cond_expectation, cond_expectation_basis, cond_expectation_blockmean,
    embed, hs_inner, normalized_trace, BlockDecomposition, DivisorPair,
};
pub use matrix::{
    adjoint, conjugate_by_unitary, jordan, lie, matrix_unit, unitarity_deviation, HermitianMatrix,
    Matrix, HERMITICITY_TOL, UNITARITY_TOL,
};
pub use mk::{
    mk_diagonal_oracle, mk_distance, pairing, DensityState, MkOptions, MkResult, StepRule,
};
pub use random::{random_ginibre, random_hermitian, random_unitary};

/// Absolute-plus-relative comparison tolerance, default `1e-9` on both parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// `|a - b| <= abs + rel * max(|a|, |b|)`.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}
