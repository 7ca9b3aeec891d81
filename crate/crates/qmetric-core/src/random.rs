//! Seeded generation of Hermitian matrices and Haar-distributed unitaries.
//!
//! Everything here is deterministic for a fixed seed (ChaCha8 streams).
//! Haar unitaries come from orthonormalizing a complex Gaussian matrix by
//! modified Gram-Schmidt; MGS produces the unique QR factor whose diagonal
//! pivots are real and nonnegative, which fixes the phase convention.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{HermitianMatrix, Matrix};

fn gaussian_complex_matrix(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let scale = 1.0 / 2.0_f64.sqrt();
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m.set(i, j, Complex64::new(re * scale, im * scale));
        }
    }
    m
}

/// Random complex Gaussian (Ginibre) matrix.
pub fn random_ginibre(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gaussian_complex_matrix(n, &mut rng)
}

/// Random Hermitian matrix `(g + g*)/2` of a complex Gaussian `g`.
pub fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_complex_matrix(n, &mut rng);
    HermitianMatrix::symmetrize(g)
}

/// Haar-distributed random unitary.
pub fn random_unitary(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = gaussian_complex_matrix(n, &mut rng);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
        // astronomically unlikely rank deficiency: redraw
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Returns `None`
/// when a column is numerically dependent on its predecessors.
fn gram_schmidt(a: &Matrix) -> Option<Matrix> {
    let n = a.n_rows();
    let mut q = a.clone();
    for j in 0..n {
        let mut col: Vec<Complex64> = (0..n).map(|i| q.get(i, j)).collect();
        for _pass in 0..2 {
            for prev in 0..j {
                let mut proj = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    proj += q.get(i, prev).conj() * col[i];
                }
                for i in 0..n {
                    col[i] -= proj * q.get(i, prev);
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-200 {
            return None;
        }
        for i in 0..n {
            q.set(i, j, col[i] / norm);
        }
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::unitarity_deviation;

    #[test]
    fn same_seed_same_output() {
        let a = random_hermitian(4, 42);
        let b = random_hermitian(4, 42);
        assert_eq!(a.matrix(), b.matrix());
        let u = random_unitary(4, 42);
        let v = random_unitary(4, 42);
        assert_eq!(u, v);
        let w = random_unitary(4, 43);
        assert_ne!(u, w);
    }

    #[test]
    fn unitary_is_unitary() {
        for seed in 0..10u64 {
            let u = random_unitary(5, seed);
            assert!(
                unitarity_deviation(&u) <= 1e-10,
                "seed {seed}: deviation {}",
                unitarity_deviation(&u)
            );
        }
    }

    #[test]
    fn unitary_columns_are_normalized() {
        let u = random_unitary(5, 7);
        for j in 0..5 {
            let norm: f64 = (0..5).map(|i| u.get(i, j).norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn one_by_one_unitary_is_unimodular() {
        let u = random_unitary(1, 3);
        assert!((u.get(0, 0).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hermitian_output_is_hermitian() {
        let h = random_hermitian(6, 9);
        assert_eq!(h.matrix().hermiticity_deviation(), 0.0);
    }
}
