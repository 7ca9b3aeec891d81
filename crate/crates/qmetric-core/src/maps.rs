//! The block-diagonal embedding, normalized trace, trace inner product, and
//! the trace-preserving conditional expectation onto the embedded subalgebra.
//!
//! The conditional expectation ships in three independently computed forms:
//! coordinate-wise block-column sums (the production path, [`cond_expectation`]),
//! the arithmetic mean of the diagonal blocks pushed back through the
//! embedding ([`cond_expectation_blockmean`]), and the inner-product expansion
//! over the embedded matrix-unit basis ([`cond_expectation_basis`]). The three
//! agree to machine precision and cross-checking them is the backbone of the
//! verification suite.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{matrix_unit, Matrix};

/// A validated pair `(k, n)` with `k | n`, parameterizing the embedding of
/// `k x k` matrices as `n/k` diagonal blocks of an `n x n` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisorPair {
    k: usize,
    n: usize,
}

impl DivisorPair {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || n == 0 || k > n || !n.is_multiple_of(k) {
            return Err(Error::NotADivisor { k, n });
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of diagonal blocks, `n / k`.
    pub fn block_count(&self) -> usize {
        self.n / self.k
    }
}

/// The diagonal `k x k` blocks `B_1, ..., B_{n/k}` of an `n x n` matrix,
/// top-left to bottom-right.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub pair: DivisorPair,
    pub blocks: Vec<Matrix>,
}

/// Extract the diagonal blocks of `a` along `pair`.
pub fn block_decompose(pair: DivisorPair, a: &Matrix) -> Result<BlockDecomposition> {
    check_square_of(pair.n(), a)?;
    let k = pair.k();
    let mut blocks = Vec::with_capacity(pair.block_count());
    for l in 0..pair.block_count() {
        let mut b = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                b.set(i, j, a.get(l * k + i, l * k + j));
            }
        }
        blocks.push(b);
    }
    Ok(BlockDecomposition { pair, blocks })
}

fn check_square_of(n: usize, a: &Matrix) -> Result<()> {
    if a.n_rows() != n || a.n_cols() != n {
        return Err(Error::DimensionMismatch {
            expected: (n, n),
            got: (a.n_rows(), a.n_cols()),
        });
    }
    Ok(())
}

/// The unital *-monomorphism placing `n/k` non-overlapping copies of a
/// `k x k` matrix on the block diagonal. In the 1-based coordinate form,
/// entry `(p, q)` of the image is `a[1 + (p-1) mod k, 1 + (q-1) mod k]`
/// when `floor((p-1)/k) = floor((q-1)/k)` and zero otherwise.
pub fn embed(pair: DivisorPair, a: &Matrix) -> Result<Matrix> {
    check_square_of(pair.k(), a)?;
    let k = pair.k();
    let n = pair.n();
    let mut out = Matrix::zeros(n, n);
    for l in 0..pair.block_count() {
        for i in 0..k {
            for j in 0..k {
                out.set(l * k + i, l * k + j, a.get(i, j));
            }
        }
    }
    Ok(out)
}

/// The normalized trace `tr_n = Tr / n`, the unique tracial state.
pub fn normalized_trace(a: &Matrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            n_rows: a.n_rows(),
            n_cols: a.n_cols(),
        });
    }
    Ok(a.trace() * (1.0 / a.n_rows() as f64))
}

/// Inner product `tr_n(b* a)` induced by the normalized trace.
pub fn hs_inner(a: &Matrix, b: &Matrix) -> Result<Complex64> {
    if !a.is_square() || a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: (a.n_rows(), a.n_cols()),
            got: (b.n_rows(), b.n_cols()),
        });
    }
    // tr(b* a) = sum_{i,j} conj(b[i][j]) a[i][j]
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..a.n_rows() {
        for j in 0..a.n_cols() {
            s += b.get(i, j).conj() * a.get(i, j);
        }
    }
    Ok(s * (1.0 / a.n_rows() as f64))
}

/// The embedded matrix-unit family `{ embed(pair, E_{k,p,q}) : 1 <= p,q <= k }`,
/// `k^2` elements, pairwise orthogonal for [`hs_inner`]. Ordered `p`-major.
pub fn basis_b(pair: DivisorPair) -> Vec<Matrix> {
    let k = pair.k();
    let mut out = Vec::with_capacity(k * k);
    for p in 1..=k {
        for q in 1..=k {
            let unit = matrix_unit(k, p, q).expect("indices in range");
            out.push(embed(pair, &unit).expect("dimensions match"));
        }
    }
    out
}

/// Trace-preserving conditional expectation onto the image of the embedding,
/// computed coordinate-wise: within each diagonal block, entry `(p, q)` of
/// every block is replaced by `(k/n) * sum_l a[p + k l, q + k l]`; entries
/// off the block diagonal vanish. For `k = 1` this is `tr_n(a) I_n`.
pub fn cond_expectation(pair: DivisorPair, a: &Matrix) -> Result<Matrix> {
    check_square_of(pair.n(), a)?;
    let k = pair.k();
    let n = pair.n();
    let m = pair.block_count();
    let weight = k as f64 / n as f64;
    let mut out = Matrix::zeros(n, n);
    for p in 0..k {
        for q in 0..k {
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..m {
                s += a.get(p + k * l, q + k * l);
            }
            let v = s * weight;
            for l in 0..m {
                out.set(p + k * l, q + k * l, v);
            }
        }
    }
    Ok(out)
}

/// Conditional expectation as the arithmetic mean of the diagonal blocks,
/// pushed back through the embedding.
pub fn cond_expectation_blockmean(pair: DivisorPair, a: &Matrix) -> Result<Matrix> {
    let decomp = block_decompose(pair, a)?;
    let k = pair.k();
    let mut acc = Matrix::zeros(k, k);
    for b in &decomp.blocks {
        acc = acc.add(b)?;
    }
    let mean = acc.scale_re(pair.k() as f64 / pair.n() as f64);
    embed(pair, &mean)
}

/// Conditional expectation as the orthogonal expansion
/// `sum_b (hs_inner(a,b) / hs_inner(b,b)) b` over the embedded unit basis.
pub fn cond_expectation_basis(pair: DivisorPair, a: &Matrix) -> Result<Matrix> {
    check_square_of(pair.n(), a)?;
    let n = pair.n();
    let mut out = Matrix::zeros(n, n);
    for b in basis_b(pair) {
        let num = hs_inner(a, &b)?;
        let den = hs_inner(&b, &b)?;
        let coeff = num / den;
        // basis members have disjoint supports, so this is an assignment
        for i in 0..n {
            for j in 0..n {
                let w = b.get(i, j);
                if w != Complex64::new(0.0, 0.0) {
                    out.set(i, j, out.get(i, j) + coeff * w);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::operator_norm;
    use crate::matrix::adjoint;
    use crate::random::random_hermitian;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_complex(n: usize, seed: u64) -> Matrix {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        use rand_distr::StandardNormal;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                m.set(i, j, Complex64::new(re, im));
            }
        }
        m
    }

    #[test]
    fn divisor_pair_validation() {
        assert!(DivisorPair::new(2, 4).is_ok());
        assert!(DivisorPair::new(1, 1).is_ok());
        assert!(DivisorPair::new(4, 4).is_ok());
        assert!(DivisorPair::new(2, 5).is_err());
        assert!(DivisorPair::new(0, 4).is_err());
        assert!(DivisorPair::new(5, 4).is_err());
    }

    #[test]
    fn embed_matrix_unit() {
        // embed((2,4), E_{2,1,2}) has ones at 1-based (1,2) and (3,4)
        let pair = DivisorPair::new(2, 4).unwrap();
        let e = matrix_unit(2, 1, 2).unwrap();
        let out = embed(pair, &e).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (0, 1) || (i, j) == (2, 3) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(out.get(i, j), c(expect, 0.0), "at ({i},{j})");
            }
        }
    }

    #[test]
    fn embed_is_unital() {
        let pair = DivisorPair::new(3, 6).unwrap();
        let out = embed(pair, &Matrix::identity(3)).unwrap();
        assert_eq!(out, Matrix::identity(6));
    }

    #[test]
    fn embed_coordinate_formula_matches_block_assembly() {
        // independent oracle: write each entry straight from the 1-based
        // coordinate formula and compare with the block-assembly output
        let pair = DivisorPair::new(3, 6).unwrap();
        let a = random_complex(3, 17);
        let out = embed(pair, &a).unwrap();
        for p in 1..=6usize {
            for q in 1..=6usize {
                let expect = if (p - 1) / 3 == (q - 1) / 3 {
                    a.get((p - 1) % 3, (q - 1) % 3)
                } else {
                    c(0.0, 0.0)
                };
                assert_eq!(out.get(p - 1, q - 1), expect);
            }
        }
        // spot value quoted in the interface docs: 1-based (5,6) is a_{2,3}
        assert_eq!(out.get(4, 5), a.get(1, 2));
    }

    #[test]
    fn embed_checks_dimensions() {
        let pair = DivisorPair::new(2, 4).unwrap();
        assert!(embed(pair, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn embed_is_multiplicative_and_star_preserving() {
        let pair = DivisorPair::new(2, 6).unwrap();
        let a = random_complex(2, 3);
        let b = random_complex(2, 4);
        let lhs = embed(pair, &a.mul(&b).unwrap()).unwrap();
        let rhs = embed(pair, &a)
            .unwrap()
            .mul(&embed(pair, &b).unwrap())
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs_entry() <= 1e-12);

        let star_lhs = embed(pair, &adjoint(&a)).unwrap();
        let star_rhs = adjoint(&embed(pair, &a).unwrap());
        assert!(star_lhs.sub(&star_rhs).unwrap().max_abs_entry() == 0.0);
    }

    #[test]
    fn embed_is_isometric() {
        let pair = DivisorPair::new(3, 9).unwrap();
        let a = random_complex(3, 8);
        let na = operator_norm(&a).unwrap();
        let ne = operator_norm(&embed(pair, &a).unwrap()).unwrap();
        assert!((na - ne).abs() <= 1e-10 * (1.0 + na));
    }

    #[test]
    fn normalized_trace_examples() {
        let d = Matrix::from_diag_re(&[1.0, 0.0]);
        assert_eq!(normalized_trace(&d).unwrap(), c(0.5, 0.0));
        assert_eq!(normalized_trace(&Matrix::identity(7)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn trace_commutes_with_embedding() {
        for (k, n) in [(1, 4), (2, 4), (3, 6), (4, 8)] {
            let pair = DivisorPair::new(k, n).unwrap();
            for seed in 0..5u64 {
                let a = random_complex(k, 100 + seed);
                let lhs = normalized_trace(&embed(pair, &a).unwrap()).unwrap();
                let rhs = normalized_trace(&a).unwrap();
                assert!((lhs - rhs).norm() <= 1e-12, "pair ({k},{n}) seed {seed}");
            }
        }
    }

    #[test]
    fn hs_inner_orthogonal_units_and_positivity() {
        let e11 = matrix_unit(2, 1, 1).unwrap();
        let e22 = matrix_unit(2, 2, 2).unwrap();
        assert_eq!(hs_inner(&e11, &e22).unwrap(), c(0.0, 0.0));

        let a = random_complex(3, 5);
        let ip = hs_inner(&a, &a).unwrap();
        assert!(ip.re > 0.0 && ip.im.abs() <= 1e-15);
        let z = Matrix::zeros(3, 3);
        assert_eq!(hs_inner(&z, &z).unwrap(), c(0.0, 0.0));

        // conjugate symmetry
        let b = random_complex(3, 6);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() <= 1e-14);
    }

    #[test]
    fn hs_inner_of_embedded_unit_is_one_over_k() {
        for (k, n) in [(2, 4), (3, 6), (4, 8)] {
            let pair = DivisorPair::new(k, n).unwrap();
            for q in 1..=k {
                let b = embed(pair, &matrix_unit(k, q, q).unwrap()).unwrap();
                let ip = hs_inner(&b, &b).unwrap();
                assert!((ip - c(1.0 / k as f64, 0.0)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn basis_b_shape_and_orthogonality() {
        let trivial = basis_b(DivisorPair::new(1, 5).unwrap());
        assert_eq!(trivial.len(), 1);
        assert_eq!(trivial[0], Matrix::identity(5));

        let pair = DivisorPair::new(2, 4).unwrap();
        let basis = basis_b(pair);
        assert_eq!(basis.len(), 4);
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let ip = hs_inner(x, y).unwrap();
                if i == j {
                    assert!(ip.norm() > 0.0);
                } else {
                    assert_eq!(ip, c(0.0, 0.0), "members {i},{j} not orthogonal");
                }
            }
        }
    }

    #[test]
    fn cond_expectation_k1_is_trace_times_identity() {
        let pair = DivisorPair::new(1, 2).unwrap();
        let a = Matrix::from_diag_re(&[1.0, 0.0]);
        let p = cond_expectation(pair, &a).unwrap();
        assert_eq!(p, Matrix::from_diag_re(&[0.5, 0.5]));
    }

    #[test]
    fn cond_expectation_witness_value() {
        // P_{2,4}(diag(2,0,0,0)) = diag(1,0,1,0)
        let pair = DivisorPair::new(2, 4).unwrap();
        let a = Matrix::from_diag_re(&[2.0, 0.0, 0.0, 0.0]);
        let p = cond_expectation(pair, &a).unwrap();
        assert_eq!(p, Matrix::from_diag_re(&[1.0, 0.0, 1.0, 0.0]));
        let pb = cond_expectation_blockmean(pair, &a).unwrap();
        assert_eq!(pb, Matrix::from_diag_re(&[1.0, 0.0, 1.0, 0.0]));
        let ps = cond_expectation_basis(pair, &a).unwrap();
        assert!(ps.sub(&p).unwrap().max_abs_entry() <= 1e-15);
    }

    #[test]
    fn cond_expectation_fixes_embedded_elements() {
        let pair = DivisorPair::new(3, 6).unwrap();
        let b = random_complex(3, 21);
        let emb = embed(pair, &b).unwrap();
        let p = cond_expectation(pair, &emb).unwrap();
        assert!(p.sub(&emb).unwrap().max_abs_entry() <= 1e-12);
    }

    #[test]
    fn blockmean_form_agrees_on_random_input() {
        let pair = DivisorPair::new(3, 6).unwrap();
        let a = random_complex(6, 33);
        let p0 = cond_expectation(pair, &a).unwrap();
        let p1 = cond_expectation_blockmean(pair, &a).unwrap();
        assert!(p0.sub(&p1).unwrap().max_abs_entry() <= 1e-14);
        let id = Matrix::identity(6);
        assert_eq!(cond_expectation_blockmean(pair, &id).unwrap(), id);
    }

    #[test]
    fn basis_form_agrees_on_random_input() {
        let pair = DivisorPair::new(4, 8).unwrap();
        let a = random_complex(8, 44);
        let p0 = cond_expectation_blockmean(pair, &a).unwrap();
        let p1 = cond_expectation_basis(pair, &a).unwrap();
        assert!(p0.sub(&p1).unwrap().max_abs_entry() <= 1e-13);

        // k = 1 reduces to tr_n(a) I
        let pair1 = DivisorPair::new(1, 8).unwrap();
        let tr = normalized_trace(&a).unwrap();
        let expect = Matrix::identity(8).scale(tr);
        let got = cond_expectation_basis(pair1, &a).unwrap();
        assert!(got.sub(&expect).unwrap().max_abs_entry() <= 1e-14);
    }

    #[test]
    fn cond_expectation_is_idempotent_and_trace_preserving() {
        let pair = DivisorPair::new(2, 6).unwrap();
        let a = random_complex(6, 55);
        let p = cond_expectation(pair, &a).unwrap();
        let pp = cond_expectation(pair, &p).unwrap();
        assert!(pp.sub(&p).unwrap().max_abs_entry() <= 1e-12);
        let ta = normalized_trace(&a).unwrap();
        let tp = normalized_trace(&p).unwrap();
        assert!((ta - tp).norm() <= 1e-12);
    }

    #[test]
    fn cond_expectation_preserves_hermiticity() {
        let pair = DivisorPair::new(2, 4).unwrap();
        let h = random_hermitian(4, 66);
        let p = cond_expectation(pair, h.matrix()).unwrap();
        assert!(p.hermiticity_deviation() <= 1e-15);
    }

    #[test]
    fn block_decompose_extracts_diagonal_blocks() {
        let pair = DivisorPair::new(2, 6).unwrap();
        let a = random_complex(6, 88);
        let decomp = block_decompose(pair, &a).unwrap();
        assert_eq!(decomp.blocks.len(), 3);
        for (l, block) in decomp.blocks.iter().enumerate() {
            assert_eq!(block.n_rows(), 2);
            assert_eq!(block.n_cols(), 2);
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(block.get(i, j), a.get(2 * l + i, 2 * l + j));
                }
            }
        }
        assert!(block_decompose(pair, &Matrix::identity(4)).is_err());
    }

    #[test]
    fn degenerate_pair_k_equals_n() {
        let pair = DivisorPair::new(4, 4).unwrap();
        let a = random_complex(4, 77);
        assert!(embed(pair, &a).unwrap().sub(&a).unwrap().max_abs_entry() == 0.0);
        let p = cond_expectation(pair, &a).unwrap();
        assert!(p.sub(&a).unwrap().max_abs_entry() == 0.0);
    }
}
