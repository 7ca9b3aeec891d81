//! The two trace-induced Lip-norms on self-adjoint `n x n` matrices, their
//! quasi-Leibniz and kernel checks, unitary invariance of the trace
//! variant, and the non-isometry certificate built from the witness matrix
//! `diag(k, 0, ..., 0)`.
//!
//! The trace variant is `L_1(a) = ||a - P_1(a)||`; the divisor variant is
//! `L_k(a) = max(||a - P_1(a)||, k ||a - P_k(a)||)` for a proper divisor
//! `1 < k < n`. On the witness the two take the closed-form values
//! `k(n-1)/n` and `k^2(n-k)/n`; the strict gap between them, combined with
//! the unitary invariance of `L_1`, rules out any unital *-isomorphism
//! intertwining the two seminorms.

use serde::Serialize;

use crate::eigen::{operator_norm, operator_norm_hermitian};
use crate::error::{Error, Result};
use crate::maps::{cond_expectation, normalized_trace, DivisorPair};
use crate::matrix::{conjugate_by_unitary, HermitianMatrix, Matrix};

/// Which seminorm is in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipVariant {
    /// `L_1(a) = ||a - P_1(a)||`.
    Trace,
    /// `L_k(a) = max(||a - P_1(a)||, k ||a - P_k(a)||)`.
    Divisor(usize),
}

/// A Lip-norm on `sa(M_n)` together with its quasi-Leibniz constants,
/// fixed at `(C, D) = (2, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipSpec {
    n: usize,
    variant: LipVariant,
    leibniz_c: f64,
    leibniz_d: f64,
}

impl LipSpec {
    pub fn trace(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidLipSpec {
                n,
                reason: "trace variant requires n >= 2",
            });
        }
        Ok(Self {
            n,
            variant: LipVariant::Trace,
            leibniz_c: 2.0,
            leibniz_d: 0.0,
        })
    }

    pub fn divisor(k: usize, n: usize) -> Result<Self> {
        if !n.is_multiple_of(k) || k <= 1 || k >= n {
            return Err(Error::InvalidDivisorVariant { k, n });
        }
        Ok(Self {
            n,
            variant: LipVariant::Divisor(k),
            leibniz_c: 2.0,
            leibniz_d: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> LipVariant {
        self.variant
    }

    pub fn leibniz_c(&self) -> f64 {
        self.leibniz_c
    }

    pub fn leibniz_d(&self) -> f64 {
        self.leibniz_d
    }
}

fn check_dim(spec: &LipSpec, a: &HermitianMatrix) -> Result<()> {
    if a.dim() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: (spec.n(), spec.n()),
            got: (a.dim(), a.dim()),
        });
    }
    Ok(())
}

/// Deviation of `a` from the expectation onto the `pair` subalgebra, as a
/// self-adjoint element.
fn deviation(pair: DivisorPair, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let p = cond_expectation(pair, a.matrix())?;
    Ok(HermitianMatrix::symmetrize(a.matrix().sub(&p)?))
}

/// Evaluate the seminorm on a self-adjoint element. Exactly diagonal inputs
/// stay on the exact max-entry path for the operator norms involved.
pub fn lip_eval(spec: &LipSpec, a: &HermitianMatrix) -> Result<f64> {
    check_dim(spec, a)?;
    let n = spec.n();
    let trace_part = operator_norm_hermitian(&deviation(DivisorPair::new(1, n)?, a)?)?;
    match spec.variant() {
        LipVariant::Trace => Ok(trace_part),
        LipVariant::Divisor(k) => {
            let block_part = operator_norm_hermitian(&deviation(DivisorPair::new(k, n)?, a)?)?;
            Ok(trace_part.max(k as f64 * block_part))
        }
    }
}

/// The witness `diag(k, 0, ..., 0)` separating the two seminorms;
/// requires `k | n` with `1 < k < n`.
pub fn witness(n: usize, k: usize) -> Result<HermitianMatrix> {
    if !n.is_multiple_of(k) || k <= 1 || k >= n {
        return Err(Error::InvalidDivisorVariant { k, n });
    }
    let mut diag = vec![0.0; n];
    diag[0] = k as f64;
    Ok(HermitianMatrix::from_diag_re(&diag))
}

/// Certificate that the two seminorms at `(n, k)` are not intertwined by any
/// unital *-isomorphism.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub n: usize,
    pub k: usize,
    /// `L_1` on the witness.
    pub lip1_value: f64,
    /// `L_k` on the witness.
    pub lipk_value: f64,
    /// `lipk_value - lip1_value`, strictly positive.
    pub gap: f64,
    /// `k (n-1) / n`.
    pub closed_form_lip1: f64,
    /// `k^2 (n-k) / n`.
    pub closed_form_lipk: f64,
    /// Why the gap rules out a quantum isometry.
    pub conclusion: String,
}

/// Tolerance on the match between evaluated seminorms and their closed forms.
pub const WITNESS_CLOSED_FORM_TOL: f64 = 1e-12;

/// Exact integer form of the gap positivity: `k (k(n-k) - (n-1)) > 0`,
/// following the chain `k(n-k) >= n > n-1`.
pub fn gap_positive_exact(n: usize, k: usize) -> bool {
    let n = n as i64;
    let k = k as i64;
    k * (k * (n - k) - (n - 1)) > 0
}

/// Evaluate both seminorms on the witness, check the closed forms, and
/// certify the gap by exact integer arithmetic.
pub fn certify_non_isometry(n: usize, k: usize) -> Result<WitnessReport> {
    let w = witness(n, k)?;
    let lip1_value = lip_eval(&LipSpec::trace(n)?, &w)?;
    let lipk_value = lip_eval(&LipSpec::divisor(k, n)?, &w)?;
    let closed_form_lip1 = (k * (n - 1)) as f64 / n as f64;
    let closed_form_lipk = (k * k * (n - k)) as f64 / n as f64;

    let dev1 = (lip1_value - closed_form_lip1).abs();
    let devk = (lipk_value - closed_form_lipk).abs();
    if dev1 > WITNESS_CLOSED_FORM_TOL || devk > WITNESS_CLOSED_FORM_TOL {
        return Err(Error::InvalidLipSpec {
            n,
            reason: "witness evaluation drifted from its closed form",
        });
    }
    if !gap_positive_exact(n, k) {
        // unreachable for valid (n, k); the integer chain k(n-k) >= n > n-1
        // holds whenever k | n and 1 < k < n
        return Err(Error::InvalidDivisorVariant { k, n });
    }

    let gap = lipk_value - lip1_value;
    let conclusion = format!(
        "L_1 is invariant under conjugation by every unitary, so any unital \
         *-isomorphism pi satisfies L_1 o pi = L_1; on the witness \
         diag({k}, 0, ...) the values L_1 = {lip1_value} and L_k = {lipk_value} \
         differ, hence no *-isomorphism intertwines the two seminorms and the \
         two quantum metric spaces at n = {n}, k = {k} are a positive \
         distance apart."
    );
    Ok(WitnessReport {
        n,
        k,
        lip1_value,
        lipk_value,
        gap,
        closed_form_lip1,
        closed_form_lipk,
        conclusion,
    })
}

/// Residual `|L_1(U a U*) - L_1(a)|`; the contract is
/// `residual <= 1e-9 (1 + ||a||)`.
pub fn check_unitary_invariance(n: usize, u: &Matrix, a: &HermitianMatrix) -> Result<f64> {
    let spec = LipSpec::trace(n)?;
    check_dim(&spec, a)?;
    let conj = conjugate_by_unitary(u, a.matrix())?;
    let conj_h = HermitianMatrix::with_tolerance(conj, 1e-9)?;
    let lhs = lip_eval(&spec, &conj_h)?;
    let rhs = lip_eval(&spec, a)?;
    Ok((lhs - rhs).abs())
}

/// Quasi-Leibniz margin
/// `C (||a|| L(b) + ||b|| L(a)) + D L(a) L(b) - max(L(a o b), L({a, b}))`
/// with `(C, D) = (2, 0)`; nonnegative up to `1e-9 (1+||a||)(1+||b||)`.
pub fn check_quasi_leibniz(
    spec: &LipSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<f64> {
    check_dim(spec, a)?;
    check_dim(spec, b)?;
    let jordan = crate::matrix::jordan(a, b)?;
    let lie = crate::matrix::lie(a, b)?;
    let lhs = lip_eval(spec, &jordan)?.max(lip_eval(spec, &lie)?);
    let la = lip_eval(spec, a)?;
    let lb = lip_eval(spec, b)?;
    let na = operator_norm(a.matrix())?;
    let nb = operator_norm(b.matrix())?;
    let rhs = spec.leibniz_c() * (na * lb + nb * la) + spec.leibniz_d() * la * lb;
    Ok(rhs - lhs)
}

/// Seminorm threshold for the kernel test.
pub const KERNEL_SEMINORM_TOL: f64 = 1e-10;
/// Scalar-distance threshold for the kernel test.
pub const KERNEL_SCALAR_TOL: f64 = 1e-9;

/// True iff `L(a) <= 1e-10` and `||a - tr_n(a) I|| <= 1e-9` agree, i.e. the
/// kernel of the seminorm is exactly the real scalars.
pub fn check_kernel(spec: &LipSpec, a: &HermitianMatrix) -> Result<bool> {
    check_dim(spec, a)?;
    let lip = lip_eval(spec, a)?;
    let tr = normalized_trace(a.matrix())?.re;
    let scalar = Matrix::identity(spec.n()).scale_re(tr);
    let dist = operator_norm_hermitian(&HermitianMatrix::symmetrize(a.matrix().sub(&scalar)?))?;
    Ok((lip <= KERNEL_SEMINORM_TOL) == (dist <= KERNEL_SCALAR_TOL))
}
