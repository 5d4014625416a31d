//! Certificates for norm attainment and its consequences.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::OperatorExpr;
use crate::linalg::{columns_to_matrix, dot, hermitian_defect, real, CMatrix, CVector};
use crate::spectral::eig::hermitian_eig;
use crate::spectral::norm::{operator_norm, top_eigenpair, Attainment, NonAttainment, NormOptions, NormReport};
use crate::subspace::{SubspaceKind, SubspaceSpec};
use crate::vector::Vector;

/// Relative tolerance for "`|T|` is an eigenvalue of `P_T`".
pub const EIGEN_TOLERANCE: f64 = 1e-9;
/// Tolerance for witness consequence checks.
pub const WITNESS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum CertificateStatus {
    /// `witness` is in the domain coordinates of the operator; for
    /// restrictions `ambient_witness` is its image under `V_M`.
    Attained { witness: Vector, ambient_witness: Option<Vector> },
    NotAttained { rule: NonAttainment },
    Unknown { report: NormReport },
}

impl CertificateStatus {
    pub fn tag(&self) -> &'static str {
        match self {
            CertificateStatus::Attained { .. } => "Attained",
            CertificateStatus::NotAttained { .. } => "NotAttained",
            CertificateStatus::Unknown { .. } => "Unknown",
        }
    }

    pub fn witness(&self) -> Option<&Vector> {
        match self {
            CertificateStatus::Attained { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttainmentCertificate {
    pub status: CertificateStatus,
    /// `|T|` when known exactly.
    pub norm: Option<f64>,
    pub checks: Vec<WitnessTag>,
    pub method: String,
}

impl AttainmentCertificate {
    pub fn is_attained(&self) -> bool {
        matches!(self.status, CertificateStatus::Attained { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessTag {
    /// `|T x0| = |T|`.
    NormAttained,
    /// `<T y, T x0> = 0` for every probe `y` orthogonal to `x0`.
    OrthogonalImages,
    /// `T^* T x0 = |T|^2 x0`.
    GramEigenvector,
    /// For positive `T`: `T x0 = |T| x0`.
    EigenvectorOfPositive,
    /// For positive `T`: `<T x0, y> = 0 = <T y, x0>`, so both the line
    /// through `x0` and its orthogonal complement are invariant.
    ReducesOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessChecks {
    pub verified: Vec<WitnessTag>,
    pub failed: Vec<WitnessTag>,
}

fn domain_embedding(t: &OperatorExpr) -> Option<&SubspaceSpec> {
    match t {
        OperatorExpr::Restrict(_, m) => Some(m),
        _ => None,
    }
}

/// Decide property N for `T`.
pub fn check_n(t: &OperatorExpr, opts: &NormOptions) -> Result<AttainmentCertificate> {
    let report = operator_norm(t, opts)?;
    let (status, norm) = match &report.attained {
        Attainment::NotAttained { reason } => (CertificateStatus::NotAttained { rule: *reason }, report.exact),
        Attainment::Attained { witness } => (attained(t, witness.clone())?, report.exact),
        Attainment::Unknown => match stable_gram_eigenvector(t, opts)? {
            Some((sigma, v)) => (attained(t, v)?, Some(sigma)),
            None => (CertificateStatus::Unknown { report: report.clone() }, None),
        },
    };
    let checks = match (&status, norm) {
        (CertificateStatus::Attained { witness, .. }, Some(n)) if !t.contains_sqrt_gram() => {
            let probes = default_probes(witness, t.domain_dim());
            let mut tags = verify_witness_with_norm(t, witness, &probes, n, WITNESS_TOLERANCE)?.verified;
            if gram_residual(t, witness, n)? <= WITNESS_TOLERANCE * n.max(1.0).powi(2) {
                tags.push(WitnessTag::GramEigenvector);
            }
            tags
        }
        _ => vec![],
    };
    Ok(AttainmentCertificate { status, norm, checks, method: report.method })
}

fn attained(t: &OperatorExpr, witness: Vector) -> Result<CertificateStatus> {
    let ambient_witness = match domain_embedding(t) {
        Some(m) => Some(m.embed(&witness)?),
        None => None,
    };
    Ok(CertificateStatus::Attained { witness, ambient_witness })
}

/// `|T^* T x - sigma^2 x|`.
fn gram_residual(t: &OperatorExpr, x: &Vector, sigma: f64) -> Result<f64> {
    let y = t.apply(x)?;
    let z = t.adjoint().apply(&y)?;
    Ok(z.axpy(real(-sigma * sigma), x).norm())
}

/// Ladder test: the top eigenpair of the Gram compression must be an exact
/// eigenpair of `T^* T` at two successive dimensions with the same value.
fn stable_gram_eigenvector(t: &OperatorExpr, opts: &NormOptions) -> Result<Option<(f64, Vector)>> {
    if t.contains_sqrt_gram() {
        return Ok(None);
    }
    let dims = opts.dims();
    let mut prev: Option<(f64, bool)> = None;
    for &d in &dims {
        let (lambda, v) = top_eigenpair(&t.gram_compression(d)?)?;
        let sigma = lambda.max(0.0).sqrt();
        let v = Vector::from_dvector(&v);
        let scale = sigma.max(1.0).powi(2);
        let exact = gram_residual(t, &v, sigma)? <= EIGEN_TOLERANCE * scale;
        if let Some((s0, e0)) = prev {
            if e0 && exact && (sigma - s0).abs() <= EIGEN_TOLERANCE * sigma.max(1.0) {
                return Ok(Some((sigma, v)));
            }
        }
        prev = Some((sigma, exact));
    }
    Ok(None)
}

/// Orthonormal probes: the first few basis vectors with the witness
/// direction removed.
fn default_probes(x0: &Vector, domain: Option<usize>) -> Vec<Vector> {
    let n = (x0.support_max() + 2).min(domain.unwrap_or(usize::MAX)).max(1);
    let x = x0.to_dvector(n);
    let mut cols: Vec<CVector> = vec![x.clone()];
    for j in 0..n {
        let mut e = CVector::zeros(n);
        e[j] = real(1.0);
        cols.push(e);
    }
    let q = crate::linalg::gram_schmidt(&cols, 1e-8);
    q.into_iter().skip(1).map(|v| Vector::from_dvector(&v).pruned(1e-15)).collect()
}

/// Verify the consequences of `x0` attaining the norm, against `probes`
/// orthogonal to `x0`.
pub fn verify_witness(t: &OperatorExpr, x0: &Vector, probes: &[Vector], tol: f64) -> Result<WitnessChecks> {
    let report = operator_norm(t, &NormOptions::default())?;
    verify_witness_with_norm(t, x0, probes, report.value(), tol)
}

pub fn verify_witness_with_norm(
    t: &OperatorExpr,
    x0: &Vector,
    probes: &[Vector],
    norm: f64,
    tol: f64,
) -> Result<WitnessChecks> {
    if (x0.norm() - 1.0).abs() > tol {
        return Err(Error::InvalidArgument(format!("witness must be a unit vector, has norm {}", x0.norm())));
    }
    for (index, y) in probes.iter().enumerate() {
        let overlap = y.inner(x0).norm();
        if overlap > tol * y.norm().max(1.0) {
            return Err(Error::ProbeNotOrthogonal { index, overlap });
        }
    }
    let tx0 = t.apply(x0)?;
    let achieved = tx0.norm();
    if (achieved - norm).abs() > tol * norm.max(1.0) {
        return Err(Error::WitnessInvalid { achieved, norm });
    }
    let mut verified = vec![WitnessTag::NormAttained];
    let mut failed = vec![];
    let images: Vec<Vector> = probes.iter().map(|y| t.apply(y)).collect::<Result<_>>()?;
    let ortho = images.iter().all(|ty| ty.inner(&tx0).norm() <= tol * norm.max(1.0).powi(2));
    if ortho {
        verified.push(WitnessTag::OrthogonalImages);
    } else {
        failed.push(WitnessTag::OrthogonalImages);
    }
    let support = probes.iter().map(Vector::support_max).chain([x0.support_max()]).max().unwrap_or(1);
    if is_positive_at(t, support)? {
        if tx0.axpy(real(-norm), x0).norm() <= tol * norm.max(1.0) {
            verified.push(WitnessTag::EigenvectorOfPositive);
        } else {
            failed.push(WitnessTag::EigenvectorOfPositive);
        }
        let reduces = probes
            .iter()
            .zip(images.iter())
            .all(|(y, ty)| tx0.inner(y).norm() <= tol * norm.max(1.0) && ty.inner(x0).norm() <= tol * norm.max(1.0));
        if reduces {
            verified.push(WitnessTag::ReducesOperator);
        } else {
            failed.push(WitnessTag::ReducesOperator);
        }
    }
    Ok(WitnessChecks { verified, failed })
}

/// Positive semidefinite on the first `d` coordinates (or on its whole
/// support when it is finite-dimensional).
fn is_positive_at(t: &OperatorExpr, d: usize) -> Result<bool> {
    if t.domain_dim().is_some() && !matches!(t, OperatorExpr::SqrtGram(_)) {
        return Ok(false);
    }
    let d = t.finite_support().map_or(d, |n| n.max(d)).max(1);
    let a = t.truncate(d)?;
    let scale = crate::linalg::max_abs(&a).max(1.0);
    if hermitian_defect(&a) > 1e-10 * scale {
        return Ok(false);
    }
    let eig = hermitian_eig(&a)?;
    Ok(eig.min() >= -1e-10 * scale)
}

fn check_self_adjoint(t: &OperatorExpr, opts: &NormOptions) -> Result<()> {
    if t.is_structurally_self_adjoint() {
        return Ok(());
    }
    if t.domain_dim().is_some() {
        return Err(Error::NotSelfAdjoint { asymmetry: f64::INFINITY });
    }
    let d = t.finite_support().unwrap_or_else(|| opts.dims()[0]).max(1);
    let a = t.truncate(d)?;
    let asymmetry = hermitian_defect(&a);
    if asymmetry > 1e-10 * crate::linalg::max_abs(&a).max(1.0) {
        return Err(Error::NotSelfAdjoint { asymmetry });
    }
    Ok(())
}

/// Property N for self-adjoint `T`: attained iff `|T|` or `-|T|` is an
/// eigenvalue of `T` itself.
pub fn check_n_selfadjoint(t: &OperatorExpr, opts: &NormOptions) -> Result<AttainmentCertificate> {
    check_self_adjoint(t, opts)?;
    let base = check_n(t, opts)?;
    let norm = match (&base.status, base.norm) {
        (CertificateStatus::Attained { .. }, Some(n)) => n,
        _ => return Ok(AttainmentCertificate { method: format!("self-adjoint/{}", base.method), ..base }),
    };
    let tol = EIGEN_TOLERANCE * norm.max(1.0);
    let mut dims: Vec<usize> = vec![];
    if let Some(n) = t.finite_support() {
        dims.push(n.max(1));
    }
    if let Some(w) = base.status.witness() {
        dims.push(w.support_max().max(1));
    }
    dims.extend(opts.dims());
    for d in dims {
        let eig = hermitian_eig(&t.truncate(d)?)?;
        let top = eig.top_vector(1e-10);
        let bottom = eig.vector(eig.dim() - 1);
        for (lambda, v) in [(eig.max(), top), (eig.min(), bottom)] {
            if (lambda.abs() - norm).abs() > tol {
                continue;
            }
            let x = Vector::from_dvector(&v);
            if t.apply(&x)?.axpy(real(-lambda), &x).norm() <= tol {
                return Ok(AttainmentCertificate {
                    status: attained(t, x)?,
                    norm: Some(norm),
                    checks: base.checks,
                    method: if lambda >= 0.0 { "self-adjoint-eigenvalue(+)".into() } else { "self-adjoint-eigenvalue(-)".into() },
                });
            }
        }
    }
    Ok(AttainmentCertificate {
        status: CertificateStatus::Unknown {
            report: operator_norm(t, opts)?,
        },
        norm: None,
        checks: vec![],
        method: "self-adjoint-eigenvalue".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointConsistency {
    pub consistent: bool,
    pub status: String,
    pub adjoint_status: String,
    /// `T x0 / |T|` for an attaining `x0`, which attains `|T^*|`.
    pub adjoint_witness: Option<Vector>,
}

/// `T` and `T^*` attain their norms together.
pub fn check_adjoint_consistency(t: &OperatorExpr, opts: &NormOptions) -> Result<AdjointConsistency> {
    let a = check_n(t, opts)?;
    let b = check_n(&t.adjoint(), opts)?;
    if matches!(a.status, CertificateStatus::Unknown { .. }) || matches!(b.status, CertificateStatus::Unknown { .. }) {
        return Err(Error::Inconclusive(format!("{} / adjoint {}", a.status.tag(), b.status.tag())));
    }
    let mut consistent = a.status.tag() == b.status.tag();
    let mut adjoint_witness = None;
    if let (CertificateStatus::Attained { witness, .. }, Some(norm)) = (&a.status, a.norm) {
        if norm > 0.0 && !t.contains_sqrt_gram() {
            let y = t.apply(witness)?.scale(real(1.0 / norm));
            let achieved = t.adjoint().apply(&y)?.norm();
            consistent &= (achieved - norm).abs() <= WITNESS_TOLERANCE * norm.max(1.0);
            adjoint_witness = Some(y);
        }
    }
    Ok(AdjointConsistency {
        consistent,
        status: a.status.tag().into(),
        adjoint_status: b.status.tag().into(),
        adjoint_witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntermediatePoint {
    pub x: Vector,
    /// The value the quadratic form was driven to.
    pub target: f64,
    pub achieved: f64,
    pub iterations: usize,
}

/// Orthonormal basis of `M` inside the first `d` coordinates, as columns of
/// a `D x r` matrix with `D >= d` covering every basis vector's support.
fn subspace_basis(m: &SubspaceSpec, d: usize) -> (usize, CMatrix) {
    let vectors: Vec<Vector> = match m.kind() {
        SubspaceKind::SpanFinite { .. } => m.span_basis().to_vec(),
        _ => {
            let mut out = vec![];
            let mut k = 1;
            while let Some(v) = m.embedded_basis(k) {
                if v.support_max() > d || out.len() >= d {
                    break;
                }
                out.push(v);
                k += 1;
            }
            out
        }
    };
    let dim = vectors.iter().map(Vector::support_max).max().unwrap_or(0).max(d);
    let cols: Vec<CVector> = vectors.iter().map(|v| v.to_dvector(dim)).collect();
    (dim, columns_to_matrix(dim, &cols))
}

/// Bisection along the normalised segment from `y` to `w` (orthonormal)
/// for a point where `<A x, x> = target`.
fn bisect_quadratic(a: &CMatrix, y: &CVector, w: &CVector, target: f64) -> (CVector, f64, usize) {
    let form = |s: f64| -> (CVector, f64) {
        let x = y * real(1.0 - s) + w * real(s);
        let x = &x / real(x.norm());
        let q = dot(&(a * &x), &x).re;
        (x, q)
    };
    let scale = target.abs().max(1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut best, mut value) = form(0.5);
    let mut iterations = 0;
    for it in 1..=200 {
        iterations = it;
        let mid = 0.5 * (lo + hi);
        let (x, q) = form(mid);
        best = x;
        value = q;
        if (q - target).abs() <= 1e-12 * scale {
            break;
        }
        if q < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (best, value, iterations)
}

/// A unit `x` with `|T x| = |T|_M|`, given `|T|_M| < |T|` at truncation `d`.
pub fn attain_intermediate_norm(t: &OperatorExpr, m: &SubspaceSpec, d: usize) -> Result<IntermediatePoint> {
    let (dim, q) = subspace_basis(m, d);
    let g = t.gram_compression(dim)?;
    let restricted = top_eigenpair(&(q.adjoint() * &g * &q))?.0.max(0.0).sqrt();
    let eig = hermitian_eig(&g)?;
    let full = eig.max().max(0.0).sqrt();
    if full - restricted <= 1e-12 * full.max(1.0) {
        return Err(Error::GapNotStrict { restricted, full });
    }
    let y = eig.vector(eig.dim() - 1);
    let w = eig.top_vector(1e-10);
    let (x, _, iterations) = bisect_quadratic(&g, &y, &w, restricted * restricted);
    let x = Vector::from_dvector(&x);
    let achieved = if t.contains_sqrt_gram() { restricted } else { t.apply(&x)?.norm() };
    Ok(IntermediatePoint { x, target: restricted, achieved, iterations })
}

/// For positive `P`: a unit `x` with `<P x, x> = |P|_M|`, given
/// `|P|_M| < |P|` at truncation `d`.
pub fn attain_intermediate_quadratic(p: &OperatorExpr, m: &SubspaceSpec, d: usize) -> Result<IntermediatePoint> {
    let (dim, q) = subspace_basis(m, d);
    let a = p.truncate(dim)?;
    let scale = crate::linalg::max_abs(&a).max(1.0);
    let asymmetry = hermitian_defect(&a);
    if asymmetry > 1e-10 * scale {
        return Err(Error::NotSelfAdjoint { asymmetry });
    }
    let eig = hermitian_eig(&a)?;
    if eig.min() < -1e-10 * scale {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    let g = p.gram_compression(dim)?;
    let restricted = top_eigenpair(&(q.adjoint() * &g * &q))?.0.max(0.0).sqrt();
    let full = eig.max();
    if full - restricted <= 1e-12 * full.max(1.0) {
        return Err(Error::GapNotStrict { restricted, full });
    }
    let y = eig.vector(eig.dim() - 1);
    let w = eig.top_vector(1e-10);
    let (x, value, iterations) = bisect_quadratic(&a, &y, &w, restricted);
    Ok(IntermediatePoint { x: Vector::from_dvector(&x), target: restricted, achieved: value, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Tail;
    use crate::linalg::{ONE, ZERO};
    use crate::seq::{ComplexSeqSpec, SeqSpec};
    use nalgebra::DVector;

    fn diag(values: &[f64]) -> OperatorExpr {
        let m = CMatrix::from_diagonal(&DVector::from_vec(values.iter().map(|&v| real(v)).collect()));
        OperatorExpr::dense(m, Tail::Zero).unwrap()
    }

    #[test]
    fn finite_diagonal_attains_at_first_vector() {
        let t = OperatorExpr::real_diagonal(SeqSpec::explicit_then_zero(vec![3.0, 2.0, 1.0]).unwrap());
        let c = check_n(&t, &NormOptions::default()).unwrap();
        assert_eq!(c.norm, Some(3.0));
        assert_eq!(c.status.witness().unwrap(), &Vector::basis(1));
        assert!(c.checks.contains(&WitnessTag::EigenvectorOfPositive));
    }

    #[test]
    fn identity_plus_unit_diagonal_not_attained() {
        let seq = ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap()).unwrap();
        let t = OperatorExpr::sum(vec![OperatorExpr::Identity, OperatorExpr::diagonal(seq)]);
        let c = check_n(&t, &NormOptions::default()).unwrap();
        assert_eq!(c.status, CertificateStatus::NotAttained { rule: NonAttainment::StrictQuadraticGap });
        assert_eq!(c.norm, Some(2.0));
    }

    #[test]
    fn witness_checks_on_small_examples() {
        let c = verify_witness(&diag(&[2.0, 1.0]), &Vector::basis(1), &[Vector::basis(2)], 1e-12).unwrap();
        assert_eq!(
            c.verified,
            vec![WitnessTag::NormAttained, WitnessTag::OrthogonalImages, WitnessTag::EigenvectorOfPositive, WitnessTag::ReducesOperator]
        );
        let nil = OperatorExpr::dense(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]), Tail::Zero).unwrap();
        let c = verify_witness(&nil, &Vector::basis(2), &[Vector::basis(1)], 1e-12).unwrap();
        assert!(c.verified.contains(&WitnessTag::OrthogonalImages));
        assert!(c.failed.is_empty());
        assert!(matches!(
            verify_witness(&nil, &Vector::basis(1), &[], 1e-12),
            Err(Error::WitnessInvalid { .. })
        ));
        assert!(matches!(
            verify_witness(&nil, &Vector::basis(2), &[Vector::basis(2)], 1e-12),
            Err(Error::ProbeNotOrthogonal { .. })
        ));
    }

    #[test]
    fn self_adjoint_variants() {
        let c = check_n_selfadjoint(&diag(&[1.0, -1.0]), &NormOptions::default()).unwrap();
        assert_eq!(c.status.witness().unwrap(), &Vector::basis(1));

        let ex2 = OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap());
        let c = check_n_selfadjoint(&ex2, &NormOptions::default()).unwrap();
        assert_eq!(c.status.tag(), "NotAttained");

        let swap = OperatorExpr::dense(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]), Tail::Zero).unwrap();
        let c = check_n_selfadjoint(&swap, &NormOptions::default()).unwrap();
        let w = c.status.witness().unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!(w.sub(&Vector::from_real(&[s, s])).norm() < 1e-12);

        let shift = OperatorExpr::shift(1).unwrap();
        assert!(matches!(check_n_selfadjoint(&shift, &NormOptions::default()), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn shift_and_backward_shift_agree() {
        let r = check_adjoint_consistency(&OperatorExpr::shift(1).unwrap(), &NormOptions::default()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.adjoint_witness.unwrap(), Vector::basis(2));
    }

    #[test]
    fn restriction_witness_in_both_coordinates() {
        let t = OperatorExpr::restrict(diag(&[1.0, 2.0, 3.0]), SubspaceSpec::span(vec![Vector::basis(2)]).unwrap());
        let c = check_n(&t, &NormOptions::default()).unwrap();
        let CertificateStatus::Attained { witness, ambient_witness } = c.status else { panic!() };
        assert_eq!(witness, Vector::basis(1));
        assert_eq!(ambient_witness.unwrap(), Vector::basis(2));
        assert!((c.norm.unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn intermediate_norm_on_diagonals() {
        let m = SubspaceSpec::span(vec![Vector::basis(2)]).unwrap();
        let p = attain_intermediate_norm(&diag(&[2.0, 1.0]), &m, 2).unwrap();
        assert!((p.achieved - 1.0).abs() < 1e-10);

        let t = diag(&[3.0, 2.0, 1.0]);
        let m = SubspaceSpec::span(vec![Vector::basis(2), Vector::basis(3)]).unwrap();
        let p = attain_intermediate_norm(&t, &m, 3).unwrap();
        let y = t.apply(&p.x).unwrap();
        assert!((y.norm_sqr() - 4.0).abs() < 1e-10);

        let m = SubspaceSpec::span(vec![Vector::basis(1)]).unwrap();
        assert!(matches!(attain_intermediate_norm(&t, &m, 3), Err(Error::GapNotStrict { .. })));
    }
}
