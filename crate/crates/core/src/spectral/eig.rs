//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies a real plane rotation that annihilates it. Sweeps
//! run over all pairs `p < q` in row order, so results are deterministic.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fix_phase, frobenius, hermitian_defect, real, CMatrix, CVector};

/// Maximum number of sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal convergence threshold relative to `|A|_F`.
pub const OFFDIAG_THRESHOLD: f64 = 1e-12;
/// Accepted input asymmetry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Eigenvalues sorted descending with matching unit eigenvectors (columns).
#[derive(Debug, Clone, Serialize)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: CMatrix,
}

impl EigResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Indices of eigenvalues within `tol` of eigenvalue `k`, in sorted order.
    pub fn cluster(&self, k: usize, tol: f64) -> Vec<usize> {
        let lambda = self.eigenvalues[k];
        (0..self.dim()).filter(|&i| (self.eigenvalues[i] - lambda).abs() <= tol).collect()
    }

    /// Orthonormal basis of the span of the eigenvectors in `indices`, in
    /// canonical order: Gram-Schmidt applied to the projections of
    /// `e_1, e_2, ...` onto that eigenspace.
    pub fn canonical_basis(&self, indices: &[usize]) -> Vec<CVector> {
        let n = self.eigenvectors.nrows();
        let vs: Vec<CVector> = indices.iter().map(|&k| self.vector(k)).collect();
        let mut out: Vec<CVector> = Vec::new();
        for j in 0..n {
            if out.len() == vs.len() {
                break;
            }
            // P e_j = sum_k v_k conj(v_k[j])
            let mut w = CVector::zeros(n);
            for v in &vs {
                w += v * v[j].conj();
            }
            for _ in 0..2 {
                for q in &out {
                    let r = crate::linalg::dot(&w, q);
                    w -= q * r;
                }
            }
            let norm = w.norm();
            if norm > 1e-8 {
                let mut u = w / real(norm);
                fix_phase(&mut u, 1e-12);
                out.push(u);
            }
        }
        out
    }

    /// Top eigenvector, canonicalised within the degenerate top cluster.
    pub fn top_vector(&self, tol: f64) -> CVector {
        let cluster = self.cluster(0, tol * self.max().abs().max(1.0));
        self.canonical_basis(&cluster).into_iter().next().unwrap_or_else(|| self.vector(0))
    }
}

/// Eigen-decomposition of a Hermitian matrix.
pub fn hermitian_eig(a: &CMatrix) -> Result<EigResult> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!("matrix must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let scale = crate::linalg::max_abs(a).max(1.0);
    let asym = hermitian_defect(a);
    if asym > HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let n = a.nrows();
    // symmetrise the input
    let mut m = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n, n);
    let norm_f = frobenius(&m);
    let target = OFFDIAG_THRESHOLD * norm_f;

    let mut converged = n <= 1 || norm_f == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        converged = off_diagonal(&m) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    // stable sort keeps basis order among exact ties
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col: DVector<Complex64> = v.column(i).into_owned();
        fix_phase(&mut col, 1e-12);
        eigenvectors.set_column(k, &col);
    }
    Ok(EigResult { eigenvalues, eigenvectors })
}

fn off_diagonal(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let g = m[(p, q)];
    let off = g.norm();
    if off == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // negligible pivot relative to both diagonal entries
    if off < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = g / off; // e^{i phi}
    let theta = (aqq - app) / (2.0 * off);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    // U = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane
    let u_pp = real(cs);
    let u_pq = real(sn);
    let u_qp = phase.conj() * (-sn);
    let u_qq = phase.conj() * cs;
    let n = m.nrows();
    // A <- A U
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * u_pp + akq * u_qp;
        m[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- U^* A
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        m[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = real(m[(p, p)].re);
    m[(q, q)] = real(m[(q, q)].re);
    // V <- V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Hermitian square root of a positive semidefinite matrix.
///
/// Eigenvalues down to `-tol * max(1, |A|)` are clamped to zero; anything
/// more negative is reported as `NotPositive`.
pub fn psd_sqrt(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(a)?;
    let scale = eig.max().abs().max(1.0);
    if eig.min() < -tol * scale {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    let n = a.nrows();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let s = eig.eigenvalues[k].max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let v = eig.vector(k);
        out += &v * v.adjoint() * real(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ZERO};

    #[test]
    fn diagonal_input() {
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![real(3.0), real(1.0), real(2.0)]));
        let e = hermitian_eig(&a).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.vector(0)[0], real(1.0));
        assert_eq!(e.vector(1)[2], real(1.0));
        assert_eq!(e.vector(2)[1], real(1.0));
    }

    #[test]
    fn swap_matrix() {
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, real(1.0), real(1.0), ZERO]);
        let e = hermitian_eig(&a).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        let s = 1.0 / 2f64.sqrt();
        assert!((e.vector(0) - CVector::from_vec(vec![real(s), real(s)])).norm() < 1e-14);
        assert!((e.vector(1) - CVector::from_vec(vec![real(s), real(-s)])).norm() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1
        let a = CMatrix::from_row_slice(2, 2, &[real(2.0), c(0.0, 1.0), c(0.0, -1.0), real(2.0)]);
        let e = hermitian_eig(&a).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let v = e.vector(0);
        assert!((&a * &v - &v * real(3.0)).norm() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, real(1.0), ZERO, ZERO]);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn canonical_basis_of_degenerate_cluster() {
        let a = CMatrix::identity(3, 3);
        let e = hermitian_eig(&a).unwrap();
        let basis = e.canonical_basis(&e.cluster(0, 1e-10));
        assert_eq!(basis.len(), 3);
        for (k, b) in basis.iter().enumerate() {
            assert!((b[k] - real(1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn sqrt_of_projection_like_gram() {
        // T = [[0,1],[0,0]] has T*T = diag(0, 1)
        let g = CMatrix::from_diagonal(&DVector::from_vec(vec![ZERO, real(1.0)]));
        let s = psd_sqrt(&g, 1e-10).unwrap();
        assert!((s - g).norm() < 1e-15);
        let neg = CMatrix::from_diagonal(&DVector::from_vec(vec![real(-1.0), real(1.0)]));
        assert!(matches!(psd_sqrt(&neg, 1e-10), Err(Error::NotPositive { .. })));
    }
}
