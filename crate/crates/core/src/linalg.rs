//! Dense complex matrix helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `max |A - A^*|` entrywise.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Resize to `d x d`, keeping the top-left block and padding with zeros.
pub fn pad_square(a: &CMatrix, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    let r = a.nrows().min(d);
    let s = a.ncols().min(d);
    out.view_mut((0, 0), (r, s)).copy_from(&a.view((0, 0), (r, s)));
    out
}

/// `<x, y> = y^* x` on dense vectors.
pub fn dot(x: &CVector, y: &CVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Modified Gram-Schmidt with one reorthogonalisation pass.
///
/// Returns the orthonormal vectors produced from the columns that remain
/// independent at tolerance `tol` (relative to the largest input norm), in
/// input order.
pub fn gram_schmidt(columns: &[CVector], tol: f64) -> Vec<CVector> {
    let scale = columns.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1.0);
    let mut basis: Vec<CVector> = Vec::new();
    for v in columns {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let r = dot(&w, q);
                w -= q * r;
            }
        }
        let n = w.norm();
        if n > tol * scale {
            basis.push(w / real(n));
        }
    }
    basis
}

/// Columns of an orthonormal basis as a matrix (`n x k`).
pub fn columns_to_matrix(n: usize, cols: &[CVector]) -> CMatrix {
    let mut m = CMatrix::zeros(n, cols.len());
    for (k, v) in cols.iter().enumerate() {
        m.set_column(k, v);
    }
    m
}

/// Rotate `v` so its first entry of modulus above `tol` is real and positive.
pub fn fix_phase(v: &mut CVector, tol: f64) {
    if let Some(z) = v.iter().find(|z| z.norm() > tol).copied() {
        let phase = z.conj() / z.norm();
        *v *= phase;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let a = CVector::from_vec(vec![real(1.0), real(1.0), ZERO]);
        let b = CVector::from_vec(vec![real(2.0), real(2.0), ZERO]);
        let e = CVector::from_vec(vec![ZERO, ZERO, c(0.0, 1.0)]);
        let q = gram_schmidt(&[a, b, e], 1e-12);
        assert_eq!(q.len(), 2);
        assert!(dot(&q[0], &q[1]).norm() < 1e-15);
    }

    #[test]
    fn pad_keeps_top_left_block() {
        let a = CMatrix::from_fn(3, 3, |i, j| real((3 * i + j) as f64));
        let p = pad_square(&a, 2);
        assert_eq!(p[(1, 1)], real(4.0));
        let q = pad_square(&a, 4);
        assert_eq!(q[(3, 3)], ZERO);
        assert_eq!(q[(2, 2)], real(8.0));
    }
}
