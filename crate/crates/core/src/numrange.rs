//! Numerical range `W(T) = {<T x, x> : |x| = 1}` at truncation.
//!
//! The boundary is traced through the support function: for each angle
//! `theta` the top eigenvector of the Hermitian part of `e^{-i theta} A`
//! maximises `Re(e^{-i theta} <A x, x>)`, so `<A v, v>` is a boundary point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::OperatorExpr;
use crate::linalg::{dot, hermitian_defect, max_abs, CMatrix};
use crate::spectral::eig::hermitian_eig;
use crate::spectral::norm::top_eigenpair;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub point: Complex64,
    pub maximizer: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumRangeBoundary {
    pub points: Vec<BoundaryPoint>,
}

/// Support points of `W(truncate(T, d))` on a uniform grid of `n_angles`.
pub fn numrange_boundary(t: &OperatorExpr, d: usize, n_angles: usize) -> Result<NumRangeBoundary> {
    if n_angles < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 angles, got {n_angles}")));
    }
    let a = t.truncate(d)?;
    let points = (0..n_angles)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_angles as f64;
            boundary_point(&a, theta)
        })
        .collect::<Result<_>>()?;
    Ok(NumRangeBoundary { points })
}

/// The support point of `W(A)` in direction `theta`.
pub fn boundary_point(a: &CMatrix, theta: f64) -> Result<BoundaryPoint> {
    let rot = Complex64::from_polar(1.0, -theta);
    let b = a * rot;
    let h = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
    let (_, v) = top_eigenpair(&h)?;
    let point = dot(&(a * &v), &v);
    Ok(BoundaryPoint { theta, point, maximizer: Vector::from_dvector(&v) })
}

/// `sup W(P) = |P|` for positive `P`, at truncation `d`.
pub fn sup_numrange_positive(p: &OperatorExpr, d: usize) -> Result<f64> {
    let a = p.truncate(d)?;
    let scale = max_abs(&a).max(1.0);
    let asymmetry = hermitian_defect(&a);
    if asymmetry > 1e-10 * scale {
        return Err(Error::NotHermitian { asymmetry });
    }
    let eig = hermitian_eig(&a)?;
    if eig.min() < -1e-10 {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    Ok(eig.max())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremePoints {
    /// `+|T|` is attained as `<T x, x>`.
    pub plus: bool,
    /// `-|T|` is attained as `<T x, x>`.
    pub minus: bool,
    pub norm: f64,
    pub plus_witness: Option<Vector>,
    pub minus_witness: Option<Vector>,
}

/// Which of `+|T|`, `-|T|` lie in `W(T)` (they are then extreme points).
pub fn extreme_point_check(t: &OperatorExpr, d: usize) -> Result<ExtremePoints> {
    let a = t.truncate(d)?;
    let asymmetry = hermitian_defect(&a);
    if asymmetry > 1e-10 * max_abs(&a).max(1.0) {
        return Err(Error::NotSelfAdjoint { asymmetry });
    }
    let eig = hermitian_eig(&a)?;
    let norm = eig.max().abs().max(eig.min().abs());
    let tol = 1e-9 * norm.max(1.0);
    let form = |v: &nalgebra::DVector<Complex64>| dot(&(&a * v), v).re;
    let top = eig.top_vector(1e-10);
    let bottom = eig.vector(eig.dim() - 1);
    let plus = (form(&top) - norm).abs() <= tol;
    let minus = (form(&bottom) + norm).abs() <= tol;
    Ok(ExtremePoints {
        plus,
        minus,
        norm,
        plus_witness: plus.then(|| Vector::from_dvector(&top)),
        minus_witness: minus.then(|| Vector::from_dvector(&bottom)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Tail;
    use crate::linalg::{c, real, ONE, ZERO};
    use crate::seq::SeqSpec;
    use crate::subspace::SubspaceSpec;
    use nalgebra::DVector;

    fn dense(a: CMatrix) -> OperatorExpr {
        OperatorExpr::dense(a, Tail::Zero).unwrap()
    }

    #[test]
    fn identity_collapses_to_one_point() {
        let b = numrange_boundary(&OperatorExpr::Identity, 3, 12).unwrap();
        assert!(b.points.iter().all(|p| (p.point - ONE).norm() < 1e-14));
    }

    #[test]
    fn nilpotent_gives_circle_of_radius_half() {
        let t = dense(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]));
        let b = numrange_boundary(&t, 2, 36).unwrap();
        for p in &b.points {
            assert!((p.point.norm() - 0.5).abs() < 1e-12);
            // support point lies in direction theta
            assert!((p.point - Complex64::from_polar(0.5, p.theta)).norm() < 1e-12);
        }
    }

    #[test]
    fn normal_diagonal_stays_on_segment() {
        let t = dense(CMatrix::from_diagonal(&DVector::from_vec(vec![ONE, c(0.0, 1.0)])));
        let b = numrange_boundary(&t, 2, 8).unwrap();
        for p in &b.points {
            // on the segment from 1 to i: re + im = 1, both in [0, 1]
            assert!((p.point.re + p.point.im - 1.0).abs() < 1e-12);
        }
        assert!(matches!(numrange_boundary(&t, 2, 2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sup_of_positive() {
        let p = OperatorExpr::projection(SubspaceSpec::span(vec![Vector::basis(1)]).unwrap());
        assert!((sup_numrange_positive(&p, 3).unwrap() - 1.0).abs() < 1e-14);
        let d = OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap());
        assert!((sup_numrange_positive(&d, 3).unwrap() - 0.75).abs() < 1e-14);
        let neg = dense(CMatrix::from_diagonal(&DVector::from_vec(vec![real(-1.0)])));
        assert!(matches!(sup_numrange_positive(&neg, 1), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn extreme_points_of_small_diagonals() {
        let e = extreme_point_check(&dense(CMatrix::from_diagonal(&DVector::from_vec(vec![ONE, real(-1.0)]))), 2).unwrap();
        assert!(e.plus && e.minus);
        let e = extreme_point_check(&dense(CMatrix::from_diagonal(&DVector::from_vec(vec![ONE, ZERO]))), 2).unwrap();
        assert!(e.plus && !e.minus);
    }
}
