//! Polar decomposition `A = U P` of square matrices.

use crate::error::{Error, Result};
use crate::linalg::{columns_to_matrix, gram_schmidt, real, CMatrix, CVector};
use crate::spectral::eig::hermitian_eig;

#[derive(Debug, Clone)]
pub struct Polar {
    pub u: CMatrix,
    pub p: CMatrix,
}

/// `A = U P` with `P = (A^* A)^{1/2}` and `U` unitary.
///
/// `U` maps each right singular vector `v_k` with `sigma_k` above the
/// threshold to `A v_k / sigma_k`. The remaining columns are completed by
/// Gram-Schmidt over `e_1, e_2, ...` in index order, both on the domain
/// side (kernel directions) and on the range side.
pub fn polar(a: &CMatrix) -> Result<Polar> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!("polar needs a square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    let eig = hermitian_eig(&(a.adjoint() * a))?;
    let sigma_max = eig.max().max(0.0).sqrt();
    let threshold = 1e-12 * sigma_max.max(1.0) * n as f64;

    let mut p = CMatrix::zeros(n, n);
    let mut domain: Vec<CVector> = Vec::new();
    let mut range: Vec<CVector> = Vec::new();
    for k in 0..n {
        let s = eig.eigenvalues[k].max(0.0).sqrt();
        let v = eig.vector(k);
        if s > 0.0 {
            p += &v * v.adjoint() * real(s);
        }
        if s > threshold {
            range.push(a * &v / real(s));
            domain.push(v);
        }
    }
    // orthonormal completions, ordered by basis index
    let complete = |start: &[CVector]| -> Vec<CVector> {
        let mut cols: Vec<CVector> = start.to_vec();
        for j in 0..n {
            let mut e = CVector::zeros(n);
            e[j] = real(1.0);
            cols.push(e);
        }
        let q = gram_schmidt(&cols, 1e-10);
        q.into_iter().take(n).collect()
    };
    let dom = complete(&domain);
    let ran = complete(&range);
    let dm = columns_to_matrix(n, &dom);
    let rm = columns_to_matrix(n, &ran);
    // U = sum_k ran_k dom_k^*; the leading pairs are the exact polar pairs
    let u = &rm * dm.adjoint();
    Ok(Polar { u, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE, ZERO};
    use nalgebra::DVector;

    #[test]
    fn positive_diagonal_is_its_own_factor() {
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![real(2.0), real(3.0)]));
        let d = polar(&a).unwrap();
        assert!((d.u - CMatrix::identity(2, 2)).norm() < 1e-14);
        assert!((d.p - a).norm() < 1e-14);
    }

    #[test]
    fn rotation_is_unitary_factor() {
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, real(-1.0), ONE, ZERO]);
        let d = polar(&a).unwrap();
        assert!((d.p - CMatrix::identity(2, 2)).norm() < 1e-14);
        assert!((&d.u - &a).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_completes_to_unitary() {
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let d = polar(&a).unwrap();
        assert!((&d.u * &d.p - &a).norm() < 1e-14);
        assert!((d.u.adjoint() * &d.u - CMatrix::identity(2, 2)).norm() < 1e-14);
        let z = CMatrix::zeros(3, 3);
        let dz = polar(&z).unwrap();
        assert!((dz.u - CMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn complex_entries() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0), c(0.5, 0.5)]);
        let d = polar(&a).unwrap();
        assert!((&d.u * &d.p - &a).norm() < 1e-12);
        assert!((d.u.adjoint() * &d.u - CMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
