//! Deflation of positive operators: `T = sum_n beta_n v_n (x) v_n + R_1`
//! with `beta_n` the greedily extracted top eigenvalues and `|R_1| <= beta_n`.

use nalgebra::linalg::SymmetricEigen;
use serde::Serialize;

use crate::an::{classify_an, Verdict};
use crate::error::{Error, Result};
use crate::expr::OperatorExpr;
use crate::linalg::{columns_to_matrix, fix_phase, frobenius, hermitian_defect, max_abs, real, CMatrix, CVector};
use crate::seq::ComplexSeqSpec;
use crate::spectral::eig::{hermitian_eig, EigResult};
use crate::spectral::norm::{top_singular_value, JACOBI_LIMIT};
use crate::vector::Vector;

pub use crate::an::{rewrite_lotd, LotdForm};

/// Eigenvalues closer than this (relative) form one degenerate cluster.
const CLUSTER_TOLERANCE: f64 = 1e-10;
/// Number of trailing betas inspected by the limit estimate.
const AITKEN_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub betas: Vec<f64>,
    pub vecs: Vec<Vector>,
    /// `R_1` on the working truncation.
    pub residual: CMatrix,
    /// Extrapolated limit of the betas, when they are monotone.
    pub beta_limit: Option<f64>,
    pub dim: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub dim: usize,
    pub terms: usize,
    pub betas: Vec<f64>,
    pub beta_limit: Option<f64>,
    pub residual_norm: f64,
    /// `max |<v_i, v_j> - delta_ij|`.
    pub orthonormality_residual: f64,
    pub warnings: Vec<String>,
}

impl Decomposition {
    pub fn residual_norm(&self) -> f64 {
        top_singular_value(&self.residual).map(|(s, _)| s).unwrap_or(f64::NAN)
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.vecs.iter().enumerate() {
            for (j, b) in self.vecs.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - real(target)).norm());
            }
        }
        worst
    }

    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            dim: self.dim,
            terms: self.betas.len(),
            betas: self.betas.clone(),
            beta_limit: self.beta_limit,
            residual_norm: self.residual_norm(),
            orthonormality_residual: self.orthonormality_residual(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Extract up to `n_max` top eigenpairs of `truncate(T, d)`.
///
/// Each step compresses to the orthogonal complement of what has been
/// extracted and removes the whole top eigenspace there, in basis-index
/// order. Stops at `n_max` terms, when the next beta is `<= tol`, or when
/// the extrapolated limit stops moving by more than `tol`.
pub fn deflate(t: &OperatorExpr, n_max: usize, d: usize, tol: f64) -> Result<Decomposition> {
    let mut warnings = Vec::new();
    match classify_an(t).verdict {
        Verdict::NotAn => return Err(Error::NotAn),
        Verdict::Unknown => warnings.push("AN classification is unknown; the decomposition is computed anyway".into()),
        Verdict::An => {}
    }
    let a = t.truncate(d)?;
    let scale = max_abs(&a).max(1.0);
    let asymmetry = hermitian_defect(&a);
    if asymmetry > 1e-10 * scale {
        return Err(Error::NotHermitian { asymmetry });
    }
    if let OperatorExpr::Diagonal(ComplexSeqSpec::Real { sequence }) = t {
        let values: Vec<f64> = (1..=d).map(|j| sequence.eval(j)).collect();
        return diagonal_deflation(&values, n_max, tol, warnings);
    }
    let eig = eig_any(&a)?;
    if eig.dim() > 0 && eig.min() < -tol {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    dense_deflation(&a, n_max, tol, warnings)
}

fn diagonal_deflation(values: &[f64], n_max: usize, tol: f64, warnings: Vec<String>) -> Result<Decomposition> {
    let d = values.len();
    if let Some(min) = values.iter().copied().reduce(f64::min) {
        if min < -tol {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    // stable: equal values keep index order
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut betas = Vec::new();
    let mut vecs = Vec::new();
    let mut residual = CMatrix::from_fn(d, d, |i, j| if i == j { real(values[i]) } else { real(0.0) });
    let mut limit = Limit::default();
    for &i in &order {
        // a settled limit only stops between clusters
        let new_cluster = betas.last().is_none_or(|b: &f64| (b - values[i]).abs() > CLUSTER_TOLERANCE * b.max(1.0));
        if betas.len() >= n_max || values[i] <= tol || (limit.settled && new_cluster) {
            break;
        }
        betas.push(values[i]);
        vecs.push(Vector::basis(i + 1));
        residual[(i, i)] = real(0.0);
        limit.update(&betas, tol);
    }
    Ok(Decomposition { beta_limit: limit.estimate, betas, vecs, residual, dim: d, warnings })
}

fn dense_deflation(a: &CMatrix, n_max: usize, tol: f64, warnings: Vec<String>) -> Result<Decomposition> {
    let d = a.nrows();
    let mut q = CMatrix::identity(d, d);
    let mut betas = Vec::new();
    let mut vecs: Vec<Vector> = Vec::new();
    let mut residual = a.clone();
    let mut limit = Limit::default();
    while betas.len() < n_max && q.ncols() > 0 && !limit.settled {
        let b = q.adjoint() * a * &q;
        let eig = eig_any(&b)?;
        let beta = eig.max();
        if beta <= tol {
            break;
        }
        let cluster = eig.cluster(0, CLUSTER_TOLERANCE * beta.abs().max(1.0));
        let ambient: Vec<CVector> = cluster.iter().map(|&k| &q * eig.vector(k)).collect();
        for v in canonical_span_basis(&ambient, d).into_iter().take(n_max - betas.len()) {
            residual -= &v * v.adjoint() * real(beta);
            betas.push(beta);
            vecs.push(Vector::from_dvector(&v).pruned(1e-300));
            limit.update(&betas, tol);
        }
        let rest: Vec<CVector> = (0..eig.dim()).filter(|k| !cluster.contains(k)).map(|k| eig.vector(k)).collect();
        q = &q * columns_to_matrix(eig.dim(), &rest);
    }
    // symmetrise away rounding in the rank-one updates
    let residual = (&residual + residual.adjoint()) * real(0.5);
    Ok(Decomposition { beta_limit: limit.estimate, betas, vecs, residual, dim: d, warnings })
}

/// Orthonormal basis of `span(vs)` from the projections of `e_1, e_2, ...`.
fn canonical_span_basis(vs: &[CVector], d: usize) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    for j in 0..d {
        if out.len() == vs.len() {
            break;
        }
        let mut w = CVector::zeros(d);
        for v in vs {
            w += v * v[j].conj();
        }
        for _ in 0..2 {
            for u in &out {
                let r = u.dotc(&w);
                w -= u * r;
            }
        }
        let n = w.norm();
        if n > 1e-8 {
            let mut u = w / real(n);
            fix_phase(&mut u, 1e-12);
            out.push(u);
        }
    }
    out
}

/// Full Hermitian eigendecomposition, sorted descending.
fn eig_any(b: &CMatrix) -> Result<EigResult> {
    if b.nrows() <= JACOBI_LIMIT {
        return hermitian_eig(b);
    }
    let e = SymmetricEigen::new(b.clone());
    let mut order: Vec<usize> = (0..b.nrows()).collect();
    order.sort_by(|&i, &j| e.eigenvalues[j].total_cmp(&e.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&k| e.eigenvalues[k]).collect();
    let cols: Vec<CVector> = order.iter().map(|&k| e.eigenvectors.column(k).into_owned()).collect();
    Ok(EigResult { eigenvalues, eigenvectors: columns_to_matrix(b.nrows(), &cols) })
}

/// Aitken extrapolation over the trailing betas.
#[derive(Debug, Default)]
struct Limit {
    estimate: Option<f64>,
    settled: bool,
}

impl Limit {
    fn update(&mut self, betas: &[f64], tol: f64) {
        let n = betas.len();
        if n < 3 {
            return;
        }
        let window = &betas[n.saturating_sub(AITKEN_WINDOW)..];
        if window.windows(2).any(|w| w[1] > w[0]) {
            self.estimate = None;
            return;
        }
        let (x0, x1, x2) = (betas[n - 3], betas[n - 2], betas[n - 1]);
        let (d1, d2) = (x1 - x0, x2 - x1);
        let dd = d2 - d1;
        let next = if dd.abs() <= f64::EPSILON * x2.abs().max(1.0) { x2 } else { x2 - d2 * d2 / dd };
        if let Some(prev) = self.estimate {
            if n >= AITKEN_WINDOW && (next - prev).abs() <= tol * next.abs().max(1.0) {
                self.settled = true;
            }
        }
        self.estimate = Some(next);
    }
}

/// `sum_n beta_n v_n v_n^* + R_1` as a `d x d` matrix.
pub fn reconstruct(dec: &Decomposition, d: usize) -> CMatrix {
    let mut out = dec.residual.clone().resize(d, d, real(0.0));
    for (beta, v) in dec.betas.iter().zip(&dec.vecs) {
        let v = v.to_dvector(d);
        out += &v * v.adjoint() * real(*beta);
    }
    out
}

/// Frobenius distance between `reconstruct(dec, d)` and `truncate(T, d)`.
pub fn reconstruction_error(t: &OperatorExpr, dec: &Decomposition, d: usize) -> Result<f64> {
    Ok(frobenius(&(reconstruct(dec, d) - t.truncate(d)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Tail;
    use crate::seq::SeqSpec;
    use nalgebra::DVector;

    fn dense(a: CMatrix) -> OperatorExpr {
        OperatorExpr::dense(a, Tail::Zero).unwrap()
    }

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|x| real(*x))))
    }

    #[test]
    fn simplest_diagonal_form() {
        let t = dense(diag(&[3.0, 2.0, 1.0]));
        let dec = deflate(&t, 3, 3, 1e-10).unwrap();
        assert_eq!(dec.betas.len(), 3);
        for (b, e) in dec.betas.iter().zip([3.0, 2.0, 1.0]) {
            assert!((b - e).abs() < 1e-14);
        }
        for (k, v) in dec.vecs.iter().enumerate() {
            assert!((v.sub(&Vector::basis(k + 1))).norm() < 1e-14);
        }
        assert!(dec.residual_norm() < 1e-14);
        assert!((reconstruct(&dec, 3) - diag(&[3.0, 2.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn one_term_leaves_the_rest() {
        let t = dense(diag(&[2.0, 1.0]));
        let dec = deflate(&t, 1, 2, 1e-10).unwrap();
        assert_eq!(dec.betas, vec![2.0]);
        assert!((&dec.residual - diag(&[0.0, 1.0])).norm() < 1e-14);
        assert!((reconstruct(&dec, 2) - diag(&[2.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn degenerate_cluster_in_index_order() {
        let t = dense(diag(&[1.0, 2.0, 2.0]));
        let dec = deflate(&t, 3, 3, 1e-10).unwrap();
        assert_eq!(dec.vecs[0], Vector::basis(2));
        assert_eq!(dec.vecs[1], Vector::basis(3));
    }

    #[test]
    fn harmonic_diagonal_limit() {
        let t = OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, -1.0, 1.0).unwrap());
        let dec = deflate(&t, 256, 256, 1e-10).unwrap();
        assert!(dec.betas.windows(2).all(|w| w[1] < w[0]));
        assert!((dec.beta_limit.unwrap() - 1.0).abs() < 1e-2);
        assert!(dec.residual_norm() <= dec.betas.last().unwrap() + 1e-9);
    }

    #[test]
    fn errors() {
        let neg = dense(diag(&[1.0, -1.0]));
        assert!(matches!(deflate(&neg, 2, 2, 1e-10), Err(Error::NotPositive { .. })));
        let enan = crate::an::enan_counterexample().p;
        assert!(matches!(deflate(&enan, 2, 8, 1e-10), Err(Error::NotAn)));
    }

    #[test]
    fn geometric_betas_settle_the_limit() {
        let t = OperatorExpr::real_diagonal(SeqSpec::geometric(2.0, -1.0, 0.5).unwrap());
        let dec = deflate(&t, 50, 50, 1e-10).unwrap();
        assert_eq!(dec.betas.len(), AITKEN_WINDOW);
        assert!((dec.beta_limit.unwrap() - 2.0).abs() < 1e-12);
        // a degenerate cluster is never split by the stopping rule
        let dec = deflate(&OperatorExpr::Identity, 50, 12, 1e-10).unwrap();
        assert_eq!(dec.betas.len(), 12);
    }
}
