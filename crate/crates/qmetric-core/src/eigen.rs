//! Hermitian eigendecomposition by cyclic Jacobi rotations, plus the
//! operator (spectral) norm.
//!
//! Each rotation works on a 2x2 principal block `[[α, β], [conj(β), γ]]`:
//! the phase of `β` is absorbed first (`D = diag(e^{iφ}, 1)` turns the block
//! real symmetric), then a classical Jacobi rotation with the smaller-angle
//! root zeroes the off-diagonal pair. Sweeps run until the off-diagonal
//! Frobenius mass falls below `1e-13` of the input Frobenius norm, within a
//! budget of `40 n` sweeps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{adjoint, HermitianMatrix, Matrix};

/// Off-diagonal mass threshold relative to the input Frobenius norm.
const OFF_DIAGONAL_REL_TOL: f64 = 1e-13;

/// Eigendecomposition of a self-adjoint matrix: `h = V diag(λ) V*` with
/// eigenvalues ascending and eigenvector columns unitary.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl Spectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Rebuild `V diag(λ) V*`.
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.eigenvectors;
        let n = v.n_rows();
        let mut scaled = v.clone();
        for j in 0..n {
            for i in 0..n {
                scaled.set(i, j, v.get(i, j) * self.eigenvalues[j]);
            }
        }
        scaled.mul(&adjoint(v)).expect("square")
    }
}

fn off_diagonal_mass(a: &Matrix) -> f64 {
    let n = a.n_rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix. Deterministic; fails with
/// [`Error::EighNoConvergence`] if the sweep budget is exhausted.
pub fn eigh(h: &HermitianMatrix) -> Result<Spectrum> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = Matrix::identity(n);

    if n <= 1 {
        let eigenvalues = (0..n).map(|i| a.get(i, i).re).collect();
        return Ok(Spectrum {
            eigenvalues,
            eigenvectors: v,
        });
    }

    let threshold = OFF_DIAGONAL_REL_TOL * h.matrix().frobenius_norm();
    // below this, a rotation cannot move the off-diagonal mass meaningfully
    let skip = threshold / ((n * n) as f64);
    let max_sweeps = 40 * n;

    let mut converged = false;
    let mut sweeps_used = 0;
    for _sweep in 0..max_sweeps {
        if off_diagonal_mass(&a) <= threshold {
            converged = true;
            break;
        }
        sweeps_used += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let gamma = a.get(q, q).re;
                let phase = apq / r;

                // classical symmetric Jacobi on the phase-stripped block
                let tau = (gamma - alpha) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let jpp = phase * c;
                let jpq = phase * s;
                // columns p, q of a and v transform by the rotation
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * jpp - aiq * s);
                    a.set(i, q, aip * jpq + aiq * c);

                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * jpp - viq * s);
                    v.set(i, q, vip * jpq + viq * c);
                }
                // rows follow by conjugate symmetry; the 2x2 block is exact
                for i in 0..n {
                    if i != p && i != q {
                        a.set(p, i, a.get(i, p).conj());
                        a.set(q, i, a.get(i, q).conj());
                    }
                }
                a.set(p, p, Complex64::new(alpha - t * r, 0.0));
                a.set(q, q, Complex64::new(gamma + t * r, 0.0));
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
            }
        }
    }

    if !converged && off_diagonal_mass(&a) > threshold {
        return Err(Error::EighNoConvergence {
            sweeps: sweeps_used,
            off_diagonal: off_diagonal_mass(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("finite eigenvalues")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors.set(i, new_col, v.get(i, old_col));
        }
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Operator norm (largest singular value).
///
/// Exactly diagonal input returns the max entry modulus directly; Hermitian
/// input returns the max absolute eigenvalue; anything else goes through the
/// largest eigenvalue of `a* a`. Non-square input is rejected.
pub fn operator_norm(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            n_rows: a.n_rows(),
            n_cols: a.n_cols(),
        });
    }
    if a.is_exactly_diagonal() {
        let mut m: f64 = 0.0;
        for i in 0..a.n_rows() {
            m = m.max(a.get(i, i).norm());
        }
        return Ok(m);
    }
    if a.is_hermitian(crate::matrix::HERMITICITY_TOL) {
        let h = HermitianMatrix::symmetrize(a.clone());
        return Ok(eigh(&h)?.max_abs_eigenvalue());
    }
    let gram = adjoint(a).mul(a)?;
    let spec = eigh(&HermitianMatrix::symmetrize(gram))?;
    Ok(spec.max_eigenvalue().max(0.0).sqrt())
}

/// Operator norm of a self-adjoint element: max absolute eigenvalue.
pub fn operator_norm_hermitian(h: &HermitianMatrix) -> Result<f64> {
    if h.matrix().is_exactly_diagonal() {
        let mut m: f64 = 0.0;
        for i in 0..h.dim() {
            m = m.max(h.matrix().get(i, i).norm());
        }
        return Ok(m);
    }
    Ok(eigh(h)?.max_abs_eigenvalue())
}

/// Clip the spectrum of a self-adjoint element into `[-bound, bound]`.
/// This is the Frobenius-metric projection onto the operator-norm ball.
pub fn clip_spectrum(h: &HermitianMatrix, bound: f64) -> Result<HermitianMatrix> {
    if h.matrix().is_exactly_diagonal() {
        let clipped: Vec<f64> = (0..h.dim())
            .map(|i| h.matrix().get(i, i).re.clamp(-bound, bound))
            .collect();
        return Ok(HermitianMatrix::from_diag_re(&clipped));
    }
    let spec = eigh(h)?;
    if spec
        .eigenvalues
        .iter()
        .all(|l| (-bound..=bound).contains(l))
    {
        return Ok(h.clone());
    }
    let clipped = Spectrum {
        eigenvalues: spec
            .eigenvalues
            .iter()
            .map(|l| l.clamp(-bound, bound))
            .collect(),
        eigenvectors: spec.eigenvectors,
    };
    Ok(HermitianMatrix::symmetrize(clipped.reconstruct()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::unitarity_deviation;
    use crate::random::random_hermitian;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_diagonal_input() {
        let h = HermitianMatrix::from_diag_re(&[2.0, 5.0]);
        let spec = eigh(&h).unwrap();
        assert_eq!(spec.eigenvalues, vec![2.0, 5.0]);
        // eigenvectors are a permutation of the identity columns
        assert!(unitarity_deviation(&spec.eigenvectors) <= 1e-14);
        let recon = spec.reconstruct();
        assert!(recon.sub(h.matrix()).unwrap().max_abs_entry() <= 1e-14);
    }

    #[test]
    fn eigh_pauli_x() {
        let x = HermitianMatrix::new(
            Matrix::new(
                2,
                2,
                vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let spec = eigh(&x).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for seed in 0..5u64 {
            let h = random_hermitian(6, seed);
            let spec = eigh(&h).unwrap();
            let scale = operator_norm_hermitian(&h).unwrap().max(1.0);
            let resid = spec.reconstruct().sub(h.matrix()).unwrap();
            assert!(
                operator_norm(&resid).unwrap() <= 1e-10 * scale,
                "reconstruction residual too large at seed {seed}"
            );
            assert!(unitarity_deviation(&spec.eigenvectors) <= 1e-10);
            for w in spec.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn operator_norm_examples() {
        let d = Matrix::from_diag_re(&[3.0, -1.0]);
        assert_eq!(operator_norm(&d).unwrap(), 3.0);

        let x = Matrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(operator_norm(&x).unwrap(), 1.0, epsilon = 1e-12);

        // [[1,1],[0,1]]: largest eigenvalue of a*a is (3+sqrt 5)/2, so the
        // norm is the golden ratio.
        let shear = Matrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let got = operator_norm(&shear).unwrap();
        assert!((got - golden).abs() <= 1e-9 * golden);
    }

    #[test]
    fn operator_norm_rejects_non_square() {
        assert!(matches!(
            operator_norm(&Matrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn clip_spectrum_bounds_norm() {
        let h = random_hermitian(5, 11);
        let clipped = clip_spectrum(&h, 0.5).unwrap();
        assert!(operator_norm_hermitian(&clipped).unwrap() <= 0.5 + 1e-12);
        // already-inside input is returned unchanged
        let small = h.scale_re(1e-3);
        let same = clip_spectrum(&small, 10.0).unwrap();
        assert!(same.matrix().sub(small.matrix()).unwrap().max_abs_entry() == 0.0);
    }

    #[test]
    fn eigh_zero_matrix() {
        let z = HermitianMatrix::from_diag_re(&[0.0, 0.0, 0.0]);
        let spec = eigh(&z).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.0, 0.0, 0.0]);
    }
}
