//! Unitary equivalence of projections with equal rank and co-rank.

use crate::error::{Error, Result};
use crate::expr::OperatorExpr;
use crate::linalg::{columns_to_matrix, gram_schmidt, hermitian_defect, max_abs, CMatrix, CVector};

const PROJECTION_TOLERANCE: f64 = 1e-10;

/// A unitary `U` with `Q U = U P` at truncation `d`: `U` carries the
/// canonical basis of `range P` onto that of `range Q` and likewise for the
/// kernels. Canonical bases come from Gram-Schmidt over `P e_1, P e_2, ...`.
pub fn unitary_equiv_projections(p: &OperatorExpr, q: &OperatorExpr, d: usize) -> Result<CMatrix> {
    let a = projection_truncation(p, d)?;
    let b = projection_truncation(q, d)?;
    let (ra, ka) = range_and_kernel(&a);
    let (rb, kb) = range_and_kernel(&b);
    if ra.len() != rb.len() {
        return Err(Error::RankMismatch { left: ra.len(), right: rb.len() });
    }
    let src: Vec<CVector> = ra.into_iter().chain(ka).collect();
    let dst: Vec<CVector> = rb.into_iter().chain(kb).collect();
    Ok(columns_to_matrix(d, &dst) * columns_to_matrix(d, &src).adjoint())
}

fn projection_truncation(p: &OperatorExpr, d: usize) -> Result<CMatrix> {
    let a = p.truncate(d)?;
    let defect = hermitian_defect(&a).max(max_abs(&(&a * &a - &a)));
    if defect > PROJECTION_TOLERANCE {
        return Err(Error::NotProjection { defect });
    }
    Ok(a)
}

fn range_and_kernel(a: &CMatrix) -> (Vec<CVector>, Vec<CVector>) {
    let n = a.nrows();
    let complement = CMatrix::identity(n, n) - a;
    let range: Vec<CVector> = (0..n).map(|j| a.column(j).into_owned()).collect();
    let kernel: Vec<CVector> = (0..n).map(|j| complement.column(j).into_owned()).collect();
    (gram_schmidt(&range, 1e-8), gram_schmidt(&kernel, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Tail;
    use crate::linalg::{real, ONE, ZERO};
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> OperatorExpr {
        let m = CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|x| real(*x))));
        OperatorExpr::dense(m, Tail::Zero).unwrap()
    }

    #[test]
    fn equal_projections_give_identity() {
        let u = unitary_equiv_projections(&diag(&[1.0, 0.0]), &diag(&[1.0, 0.0]), 2).unwrap();
        assert!((u - CMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn swapped_projections_give_swap() {
        let u = unitary_equiv_projections(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), 2).unwrap();
        let swap = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!((u - swap).norm() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            unitary_equiv_projections(&diag(&[1.0, 0.0]), &diag(&[1.0, 1.0]), 2),
            Err(Error::RankMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            unitary_equiv_projections(&diag(&[0.5, 0.0]), &diag(&[1.0, 0.0]), 2),
            Err(Error::NotProjection { .. })
        ));
    }
}
