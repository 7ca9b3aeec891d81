//! Dense complex matrices and self-adjoint elements.
//!
//! Row-major storage: `entries[i * n_cols + j]` holds the `i`-row, `j`-column
//! entry (0-based internally; operations that quote the 1-based convention,
//! such as [`matrix_unit`], say so in their own docs). Construction rejects
//! NaN and infinite components, so every value in circulation is finite.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Admission tolerance for self-adjointness, max absolute entry deviation.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Admission tolerance for unitarity, max absolute entry of `U*U - I`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// A dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Complex64>,
}

impl Matrix {
    /// Creates a matrix from row-major entries, rejecting length mismatches
    /// and non-finite components.
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(Error::LengthMismatch {
                expected: n_rows * n_cols,
                got: entries.len(),
            });
        }
        for (idx, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: idx / n_cols,
                    col: idx % n_cols,
                });
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Diagonal matrix from complex entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, z) in diag.iter().enumerate() {
            m.set(i, i, *z);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_diag_re(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(*x, 0.0));
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n_cols + j] = v;
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Matrix {
        Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Matrix {
        Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch {
                expected: (self.n_cols, other.n_cols),
                got: (other.n_rows, other.n_cols),
            });
        }
        let mut out = Matrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for l in 0..self.n_cols {
                let a_il = self.get(i, l);
                if a_il == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.n_cols {
                    let v = out.get(i, j) + a_il * other.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Unnormalized trace `Tr`.
    pub fn trace(&self) -> Complex64 {
        let n = self.n_rows.min(self.n_cols);
        (0..n).map(|i| self.get(i, i)).sum()
    }

    /// Max absolute value over entries.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max entry deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// True when every off-diagonal entry is exactly zero. Diagonal matrices
    /// take an exact operator-norm path, so this test is bitwise.
    pub fn is_exactly_diagonal(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                if i != j && self.get(i, j) != Complex64::new(0.0, 0.0) {
                    return false;
                }
            }
        }
        true
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch {
                expected: (self.n_rows, self.n_cols),
                got: (other.n_rows, other.n_cols),
            });
        }
        Ok(())
    }
}

/// Conjugate transpose: `adjoint(a)[i][j] = conj(a[j][i])`.
pub fn adjoint(a: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.n_cols(), a.n_rows());
    for i in 0..a.n_rows() {
        for j in 0..a.n_cols() {
            out.set(j, i, a.get(i, j).conj());
        }
    }
    out
}

/// Standard matrix unit `E_{n,j,k}` with 1-based `j`, `k`: a single 1 at
/// row `j`, column `k`, zeros elsewhere.
pub fn matrix_unit(n: usize, j: usize, k: usize) -> Result<Matrix> {
    if j < 1 || j > n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    if k < 1 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let mut m = Matrix::zeros(n, n);
    m.set(j - 1, k - 1, Complex64::new(1.0, 0.0));
    Ok(m)
}

/// A self-adjoint matrix. Construction checks `max |a - a*| <= HERMITICITY_TOL`
/// then stores the symmetrized `(a + a*)/2`, so held values are exactly
/// conjugate-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: Matrix,
}

impl HermitianMatrix {
    pub fn new(a: Matrix) -> Result<Self> {
        Self::with_tolerance(a, HERMITICITY_TOL)
    }

    pub fn with_tolerance(a: Matrix, tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                n_rows: a.n_rows(),
                n_cols: a.n_cols(),
            });
        }
        let dev = a.hermiticity_deviation();
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: tol,
            });
        }
        Ok(Self::symmetrize(a))
    }

    /// Symmetrizes without an admission gate. For values Hermitian by
    /// construction (sums and real scalings of Hermitian matrices, `a - P(a)`,
    /// Jordan/Lie products).
    pub(crate) fn symmetrize(a: Matrix) -> Self {
        let n = a.n_rows();
        let mut m = a;
        for i in 0..n {
            let d = m.get(i, i);
            m.set(i, i, Complex64::new(d.re, 0.0));
            for j in (i + 1)..n {
                let v = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
        Self { inner: m }
    }

    /// Hermitian diagonal matrix from real entries.
    pub fn from_diag_re(diag: &[f64]) -> Self {
        Self {
            inner: Matrix::from_diag_re(diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.n_rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(Self::symmetrize(self.inner.add(&other.inner)?))
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(Self::symmetrize(self.inner.sub(&other.inner)?))
    }

    pub fn scale_re(&self, factor: f64) -> HermitianMatrix {
        Self::symmetrize(self.inner.scale_re(factor))
    }
}

/// Jordan product `(ab + ba) / 2` of self-adjoint elements; self-adjoint.
pub fn jordan(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let ab = a.matrix().mul(b.matrix())?;
    let ba = b.matrix().mul(a.matrix())?;
    Ok(HermitianMatrix::symmetrize(ab.add(&ba)?.scale_re(0.5)))
}

/// Lie product `(ab - ba) / 2i` of self-adjoint elements; self-adjoint.
pub fn lie(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let ab = a.matrix().mul(b.matrix())?;
    let ba = b.matrix().mul(a.matrix())?;
    // 1/(2i) = -i/2
    let half_over_i = Complex64::new(0.0, -0.5);
    Ok(HermitianMatrix::symmetrize(ab.sub(&ba)?.scale(half_over_i)))
}

/// Max entry deviation of `U*U` from the identity.
pub fn unitarity_deviation(u: &Matrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let gram = adjoint(u).mul(u).expect("square");
    let mut dev: f64 = 0.0;
    let n = u.n_rows();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            dev = dev.max((gram.get(i, j) - target).norm());
        }
    }
    dev
}

/// Conjugation `U a U*` by a unitary; rejects `U` with `max |U*U - I| > UNITARITY_TOL`.
pub fn conjugate_by_unitary(u: &Matrix, a: &Matrix) -> Result<Matrix> {
    let dev = unitarity_deviation(u);
    if dev > UNITARITY_TOL {
        return Err(Error::NotUnitary {
            deviation: dev,
            tolerance: UNITARITY_TOL,
        });
    }
    u.mul(a)?.mul(&adjoint(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn new_rejects_length_mismatch() {
        let err = Matrix::new(2, 2, vec![c(1.0, 0.0); 3]).unwrap_err();
        assert_eq!(
            err,
            Error::LengthMismatch {
                expected: 4,
                got: 3
            }
        );
    }

    #[test]
    fn new_rejects_non_finite() {
        let err = Matrix::new(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, Error::NonFiniteEntry { row: 0, col: 1 });
        let err = Matrix::new(1, 1, vec![c(0.0, f64::INFINITY)]).unwrap_err();
        assert_eq!(err, Error::NonFiniteEntry { row: 0, col: 0 });
    }

    #[test]
    fn adjoint_conjugate_transposes() {
        // [[0, i], [0, 0]] -> [[0, 0], [-i, 0]]
        let a = Matrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let at = adjoint(&a);
        assert_eq!(at.get(0, 0), c(0.0, 0.0));
        assert_eq!(at.get(0, 1), c(0.0, 0.0));
        assert_eq!(at.get(1, 0), c(0.0, -1.0));
        assert_eq!(at.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn adjoint_fixes_identity_and_is_involutive() {
        let id = Matrix::identity(3);
        assert_eq!(adjoint(&id), id);
        let a = Matrix::new(
            2,
            2,
            vec![c(1.0, 2.0), c(3.0, -4.0), c(0.0, 5.0), c(-6.0, 0.0)],
        )
        .unwrap();
        assert_eq!(adjoint(&adjoint(&a)), a);
    }

    #[test]
    fn adjoint_is_anti_multiplicative() {
        // (ab)* = b* a*, checked against direct multiplication on fixed 3x3 inputs.
        let a = Matrix::new(
            3,
            3,
            vec![
                c(1.0, 0.5),
                c(0.0, -1.0),
                c(2.0, 0.0),
                c(-0.5, 0.25),
                c(1.5, 1.5),
                c(0.0, 0.0),
                c(0.75, -2.0),
                c(3.0, 1.0),
                c(-1.0, -1.0),
            ],
        )
        .unwrap();
        let b = Matrix::new(
            3,
            3,
            vec![
                c(0.5, -0.5),
                c(2.0, 1.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(-1.0, 2.0),
                c(0.25, 0.25),
                c(0.0, -3.0),
                c(1.0, 1.0),
                c(2.0, -0.5),
            ],
        )
        .unwrap();
        let lhs = adjoint(&a.mul(&b).unwrap());
        let rhs = adjoint(&b).mul(&adjoint(&a)).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs_entry() <= 1e-14);
    }

    #[test]
    fn matrix_unit_places_single_one() {
        let e = matrix_unit(2, 1, 2).unwrap();
        assert_eq!(e.get(0, 1), c(1.0, 0.0));
        assert_eq!(e.get(0, 0), c(0.0, 0.0));
        assert_eq!(e.get(1, 0), c(0.0, 0.0));
        assert_eq!(e.get(1, 1), c(0.0, 0.0));
        assert!(matrix_unit(2, 0, 1).is_err());
        assert!(matrix_unit(2, 1, 3).is_err());
    }

    #[test]
    fn matrix_units_multiply_and_sum() {
        // E_{k,q,p} E_{k,p,q} = E_{k,q,q}
        let k = 4;
        for q in 1..=k {
            for p in 1..=k {
                let lhs = matrix_unit(k, q, p)
                    .unwrap()
                    .mul(&matrix_unit(k, p, q).unwrap())
                    .unwrap();
                let rhs = matrix_unit(k, q, q).unwrap();
                assert!(lhs.sub(&rhs).unwrap().max_abs_entry() == 0.0);
            }
        }
        // sum of E_{n,j,j} is the identity
        let n = 5;
        let mut acc = Matrix::zeros(n, n);
        for j in 1..=n {
            acc = acc.add(&matrix_unit(n, j, j).unwrap()).unwrap();
        }
        assert_eq!(acc, Matrix::identity(n));
    }

    #[test]
    fn hermitian_admission_and_symmetrization() {
        let a = Matrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        )
        .unwrap();
        let h = HermitianMatrix::new(a).unwrap();
        assert_eq!(h.matrix().get(0, 1), c(0.0, 1.0));
        assert_eq!(h.matrix().get(1, 0), c(0.0, -1.0));

        let bad = Matrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            HermitianMatrix::new(bad),
            Err(Error::NotHermitian { .. })
        ));

        let rect = Matrix::zeros(2, 3);
        assert!(matches!(
            HermitianMatrix::new(rect),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn jordan_fixes_idempotent() {
        // E_{2,1,1} o E_{2,1,1} = E_{2,1,1}
        let e = HermitianMatrix::new(matrix_unit(2, 1, 1).unwrap()).unwrap();
        let j = jordan(&e, &e).unwrap();
        assert!(j.matrix().sub(e.matrix()).unwrap().max_abs_entry() == 0.0);
    }

    #[test]
    fn lie_is_alternating() {
        let a = HermitianMatrix::new(
            Matrix::new(
                2,
                2,
                vec![c(1.0, 0.0), c(0.5, 2.0), c(0.5, -2.0), c(-3.0, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let l = lie(&a, &a).unwrap();
        assert!(l.matrix().max_abs_entry() == 0.0);
    }

    #[test]
    fn jordan_of_anticommuting_pair_vanishes() {
        // [[0,1],[1,0]] o diag(1,-1) = 0
        let x = HermitianMatrix::new(
            Matrix::new(
                2,
                2,
                vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let z = HermitianMatrix::from_diag_re(&[1.0, -1.0]);
        let j = jordan(&x, &z).unwrap();
        assert!(j.matrix().max_abs_entry() == 0.0);
    }

    #[test]
    fn jordan_squares_match() {
        // jordan(a, a) = a^2
        let a = HermitianMatrix::new(
            Matrix::new(
                2,
                2,
                vec![c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(0.5, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let sq = a.matrix().mul(a.matrix()).unwrap();
        let j = jordan(&a, &a).unwrap();
        assert!(j.matrix().sub(&sq).unwrap().max_abs_entry() <= 1e-15);
    }

    #[test]
    fn conjugation_requires_unitary() {
        let not_u = Matrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        let a = Matrix::identity(2);
        assert!(matches!(
            conjugate_by_unitary(&not_u, &a),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn conjugation_by_identity_and_permutation() {
        let a = Matrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(2.0, 3.0), c(2.0, -3.0), c(4.0, 0.0)],
        )
        .unwrap();
        let same = conjugate_by_unitary(&Matrix::identity(2), &a).unwrap();
        assert!(same.sub(&a).unwrap().max_abs_entry() == 0.0);

        // swap on diag(1,2) gives diag(2,1)
        let swap = Matrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let d = Matrix::from_diag_re(&[1.0, 2.0]);
        let out = conjugate_by_unitary(&swap, &d).unwrap();
        let expect = Matrix::from_diag_re(&[2.0, 1.0]);
        assert!(out.sub(&expect).unwrap().max_abs_entry() == 0.0);
    }

    #[test]
    fn trace_is_cyclic_on_fixed_pair() {
        let a = Matrix::new(
            2,
            2,
            vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0), c(0.5, 0.5)],
        )
        .unwrap();
        let b = Matrix::new(
            2,
            2,
            vec![c(-1.0, 0.0), c(2.0, 2.0), c(0.0, 1.0), c(4.0, -3.0)],
        )
        .unwrap();
        let ab = a.mul(&b).unwrap().trace();
        let ba = b.mul(&a).unwrap().trace();
        assert!((ab - ba).norm() <= 1e-12);
    }
}
