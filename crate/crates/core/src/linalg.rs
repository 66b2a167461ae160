//! Dense complex linear algebra helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
// Only needed when nothing in the build links std.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_RTOL: f64 = 1e-10;

pub fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// `e^{-i 2π num/den}` with the numerator reduced first, so integer phases
/// come out exactly as `1`.
pub fn root_of_unity(num: i64, den: u64) -> Complex64 {
    let den_i = den as i64;
    let r = num.rem_euclid(den_i);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    cis(-core::f64::consts::TAU * r as f64 / den as f64)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value; zero for empty matrices.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    // λ_max(A†A) is cheaper than a full SVD when A is tall.
    let gram = if m.nrows() >= m.ncols() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x));
    top.max(0.0).sqrt()
}

/// ‖A − A†‖_F.
pub fn hermitian_defect(m: &CMat) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
/// Column `j` of the returned matrix is the eigenvector for `values[j]`.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    // Symmetrize first so roundoff in the input cannot leak into the solver.
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Orthonormal basis of the column space, as columns. Singular values below
/// `RANK_RTOL · σ_max` are dropped.
pub fn range_basis(m: &CMat) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    // Left singular vectors from the Hermitian eigenproblem of m m†; each
    // singular value is then re-measured as ‖m† v‖ so null directions sit at
    // roundoff level rather than its square root.
    let (_, vectors) = eigh(&(m * m.adjoint()));
    let adj = m.adjoint();
    let sigma: Vec<f64> = (0..vectors.ncols())
        .map(|i| vec_norm(&(&adj * vectors.column(i))))
        .collect();
    let smax = sigma.iter().fold(0.0f64, |a, &s| a.max(s));
    let mut keep: Vec<usize> = (0..sigma.len())
        .filter(|&i| smax > 0.0 && sigma[i] > RANK_RTOL * smax)
        .collect();
    // Largest singular value first.
    keep.reverse();
    CMat::from_fn(m.nrows(), keep.len(), |r, c| vectors[(r, keep[c])])
}

pub fn rank(m: &CMat) -> usize {
    range_basis(m).ncols()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Vector with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_cvec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_of_unity_is_exact_on_integers() {
        assert_eq!(root_of_unity(6, 3), Complex64::new(1.0, 0.0));
        assert_eq!(root_of_unity(-3, 3), Complex64::new(1.0, 0.0));
        let z = root_of_unity(1, 4);
        assert!((z - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn eigh_sorts_and_diagonalizes() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(0.0, -2.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let (vals, vecs) = eigh(&m);
        let r = 5f64.sqrt();
        assert!((vals[0] + r).abs() < 1e-12 && (vals[1] - r).abs() < 1e-12);
        let recon = &vecs * CMat::from_diagonal(&CVec::from_iterator(2, vals.iter().map(|&x| x.into()))) * vecs.adjoint();
        assert!(frobenius(&(recon - m)) < 1e-12);
    }

    #[test]
    fn operator_norm_of_rectangular_block() {
        let m = CMat::from_fn(3, 2, |r, c| if r == c { Complex64::new(2.0 + r as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
        assert_eq!(operator_norm(&CMat::zeros(0, 4)), 0.0);
    }

    #[test]
    fn range_basis_drops_null_directions() {
        let one = Complex64::new(1.0, 0.0);
        let m = CMat::from_row_slice(2, 2, &[one, one, one, one]);
        assert_eq!(rank(&m), 1);
    }
}
