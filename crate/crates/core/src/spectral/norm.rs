//! Operator norms: exact structured paths first, then a truncation ladder.

use nalgebra::linalg::{SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::expr::{OperatorExpr, Tail};
use crate::linalg::{fix_phase, real, CMatrix, CVector, ZERO};
use crate::seq::{ComplexSeqSpec, Extremum};
use crate::spectral::eig::hermitian_eig;
use crate::subspace::SubspaceKind;
use crate::vector::Vector;

/// Matrices up to this size go through the Jacobi solver; larger ones use
/// nalgebra's factorisations.
pub const JACOBI_LIMIT: usize = 64;

/// Largest dense block handled by the exact block-form path.
const BLOCK_LIMIT: usize = 512;

/// Structured proofs that the supremum defining the norm is not achieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonAttainment {
    /// `|lambda_j|` increases strictly towards its supremum.
    StrictlyMonotoneDiagonal,
    /// `|(alpha + beta lambda_j)|^2 < sup` for every `j`, so
    /// `|T x|^2 < |T|^2 |x|^2` for every nonzero `x`.
    StrictQuadraticGap,
    /// A projection restricted to a subspace meeting its range only in `{0}`
    /// while the restriction norm is 1.
    ProjectionTrivialIntersection,
}

impl NonAttainment {
    pub fn tag(self) -> &'static str {
        match self {
            NonAttainment::StrictlyMonotoneDiagonal => "strictly-monotone-diagonal",
            NonAttainment::StrictQuadraticGap => "strict-quadratic-gap",
            NonAttainment::ProjectionTrivialIntersection => "projection-trivial-intersection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum Attainment {
    Attained { witness: Vector },
    NotAttained { reason: NonAttainment },
    Unknown,
}

impl Attainment {
    pub fn tag(&self) -> &'static str {
        match self {
            Attainment::Attained { .. } => "Attained",
            Attainment::NotAttained { .. } => "NotAttained",
            Attainment::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub attained: Attainment,
    pub method: String,
}

impl NormReport {
    fn exact(value: f64, attained: Attainment, method: &str) -> Self {
        NormReport { lower: value, upper: value, exact: Some(value), attained, method: method.to_string() }
    }

    pub fn witness(&self) -> Option<&Vector> {
        match &self.attained {
            Attainment::Attained { witness } => Some(witness),
            _ => None,
        }
    }

    /// Best available value of the norm: the exact value or the lower bound.
    pub fn value(&self) -> f64 {
        self.exact.unwrap_or(self.lower)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormOptions {
    pub max_dim: usize,
    pub tolerance: f64,
    pub ladder: Vec<usize>,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { max_dim: 256, tolerance: 1e-10, ladder: vec![16, 64, 256, 1024] }
    }
}

impl NormOptions {
    pub fn with_max_dim(max_dim: usize) -> Self {
        NormOptions { max_dim, ..Default::default() }
    }

    /// Ladder dimensions not exceeding `max_dim` (at least one).
    pub fn dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.ladder.iter().copied().filter(|&d| d <= self.max_dim).collect();
        if dims.is_empty() {
            dims.push(self.max_dim.max(1));
        }
        dims
    }
}

/// Largest singular value and a matching unit right singular vector.
pub fn top_singular_value(a: &CMatrix) -> Result<(f64, CVector)> {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return Ok((0.0, CVector::zeros(n)));
    }
    if n <= JACOBI_LIMIT {
        let (lambda, v) = top_eigenpair(&(a.adjoint() * a))?;
        return Ok((lambda.max(0.0).sqrt(), v));
    }
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut v: CVector = v_t.row(0).adjoint();
    fix_phase(&mut v, 1e-12);
    Ok((svd.singular_values[0], v))
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector,
/// canonicalised inside a degenerate top cluster.
pub fn top_eigenpair(g: &CMatrix) -> Result<(f64, CVector)> {
    let n = g.nrows();
    if n == 0 {
        return Ok((0.0, CVector::zeros(0)));
    }
    if n <= JACOBI_LIMIT {
        let eig = hermitian_eig(g)?;
        return Ok((eig.max(), eig.top_vector(1e-10)));
    }
    let eig = SymmetricEigen::new(g.clone());
    let (k, lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &l)| if l > best.1 { (i, l) } else { best });
    let mut v: CVector = eig.eigenvectors.column(k).into_owned();
    fix_phase(&mut v, 1e-12);
    Ok((lambda, v))
}

/// `max |T x|` over unit `x` in `span{e_1..e_d}` for each `d`.
pub fn truncation_lower_bounds(t: &OperatorExpr, dims: &[usize]) -> Result<Vec<f64>> {
    dims.iter().map(|&d| Ok(top_eigenpair(&t.gram_compression(d)?)?.0.max(0.0).sqrt())).collect()
}

/// Norm of `T` with attainment status.
pub fn operator_norm(t: &OperatorExpr, opts: &NormOptions) -> Result<NormReport> {
    if let Some(r) = exact_norm(t)? {
        return Ok(r);
    }
    ladder_norm(t, opts)
}

fn ladder_norm(t: &OperatorExpr, opts: &NormOptions) -> Result<NormReport> {
    let upper = structural_upper(t)?;
    let mut lower = 0.0f64;
    let mut witness = None;
    for d in opts.dims() {
        let g = t.gram_compression(d)?;
        let (lambda, v) = top_eigenpair(&g)?;
        let sigma = lambda.max(0.0).sqrt();
        if sigma >= lower {
            lower = sigma;
            witness = Some(Vector::from_dvector(&v));
        }
    }
    let lower = lower.min(upper);
    let tol = opts.tolerance * upper.max(1.0);
    if let Some(w) = witness {
        let achieved = match t.apply(&w) {
            Ok(y) => y.norm(),
            Err(_) => lower,
        };
        if achieved >= upper - tol {
            let value = achieved.min(upper);
            return Ok(NormReport::exact(value, Attainment::Attained { witness: w }, "truncation-ladder"));
        }
    }
    Ok(NormReport { lower, upper, exact: None, attained: Attainment::Unknown, method: "truncation-ladder".into() })
}

/// Sound upper bound from the expression tree.
pub fn structural_upper(t: &OperatorExpr) -> Result<f64> {
    if let Some(r) = exact_norm(t)? {
        return Ok(r.upper);
    }
    Ok(match t {
        OperatorExpr::Diagonal(seq) => seq.sup_modulus().value,
        OperatorExpr::FiniteRank(terms) => terms.iter().map(|r| r.sigma * r.left.norm() * r.right.norm()).sum(),
        OperatorExpr::Scale(alpha, c) => alpha.norm() * structural_upper(c)?,
        OperatorExpr::Sum(cs) => cs.iter().map(structural_upper).sum::<Result<f64>>()?,
        OperatorExpr::Compose(cs) => cs.iter().map(structural_upper).product::<Result<f64>>()?,
        OperatorExpr::Adjoint(c) | OperatorExpr::Restrict(c, _) | OperatorExpr::SqrtGram(c) => structural_upper(c)?,
        OperatorExpr::Dense { matrix, tail } => {
            let s = top_singular_value(matrix)?.0;
            if *tail == Tail::Identity {
                s.max(1.0)
            } else {
                s
            }
        }
        OperatorExpr::Projection(_) | OperatorExpr::Shift(_) | OperatorExpr::Identity => 1.0,
    })
}

/// `T = alpha I + beta D` on the canonical basis.
#[derive(Debug, Clone)]
struct Affine {
    alpha: Complex64,
    beta: Complex64,
    seq: Option<ComplexSeqSpec>,
}

fn affine_diagonal(t: &OperatorExpr) -> Option<Affine> {
    match t {
        OperatorExpr::Identity => Some(Affine { alpha: real(1.0), beta: ZERO, seq: None }),
        OperatorExpr::Diagonal(s) => Some(Affine { alpha: ZERO, beta: real(1.0), seq: Some(s.clone()) }),
        OperatorExpr::Scale(a, c) => {
            let f = affine_diagonal(c)?;
            Some(Affine { alpha: f.alpha * a, beta: f.beta * a, seq: f.seq })
        }
        OperatorExpr::Adjoint(c) => {
            let f = affine_diagonal(c)?;
            Some(Affine { alpha: f.alpha.conj(), beta: f.beta.conj(), seq: f.seq.map(|s| s.conj()) })
        }
        OperatorExpr::Restrict(c, m) => match m.kind() {
            SubspaceKind::CanonicalTail { k } => {
                let f = affine_diagonal(c)?;
                Some(Affine { seq: f.seq.map(|s| s.shift_index(*k)), ..f })
            }
            _ => None,
        },
        OperatorExpr::Sum(cs) => {
            let mut acc = Affine { alpha: ZERO, beta: ZERO, seq: None };
            for c in cs {
                let f = affine_diagonal(c)?;
                if let Some(s) = f.seq {
                    match &acc.seq {
                        Some(prev) if *prev != s => return None,
                        _ => acc.seq = Some(s),
                    }
                }
                acc.alpha += f.alpha;
                acc.beta += f.beta;
            }
            Some(acc)
        }
        _ => None,
    }
}

/// `sup_j |alpha + beta lambda_j|` with attainment, when decidable.
fn affine_sup(f: &Affine) -> Option<Extremum> {
    let seq = match &f.seq {
        Some(s) if f.beta != ZERO => s,
        _ => return Some(Extremum { value: f.alpha.norm(), attained: true, witness_index: Some(1) }),
    };
    let gamma = f.alpha / f.beta;
    let scale = f.beta.norm();
    let ext = match seq {
        ComplexSeqSpec::Real { sequence } => {
            let e = sequence.affine(gamma.re, 1.0).sup_modulus();
            Extremum { value: (e.value * e.value + gamma.im * gamma.im).sqrt(), ..e }
        }
        ComplexSeqSpec::UnitModulus { .. } if gamma.im == 0.0 => seq.sup_affine_modulus(gamma.re, 1.0),
        ComplexSeqSpec::UnitModulus { .. } => return None,
    };
    Some(Extremum { value: scale * ext.value, ..ext })
}

/// Exact norm for the structured shapes; `None` when no rule applies.
pub fn exact_norm(t: &OperatorExpr) -> Result<Option<NormReport>> {
    if let Some((a, tail)) = t.block_form(BLOCK_LIMIT) {
        let (sigma, v) = top_singular_value(&a)?;
        let n = a.nrows();
        let (value, witness) = if n > 0 && sigma >= tail.norm() {
            (sigma, Vector::from_dvector(&v))
        } else {
            (tail.norm(), Vector::basis(n + 1))
        };
        // the zero operator attains its norm at any unit vector
        let witness = if witness.is_zero() { Vector::basis(1) } else { witness };
        return Ok(Some(NormReport::exact(value, Attainment::Attained { witness }, "block-singular-value")));
    }
    if let Some(f) = affine_diagonal(t) {
        if let Some(ext) = affine_sup(&f) {
            let attained = if ext.attained {
                Attainment::Attained { witness: Vector::basis(ext.witness_index.unwrap_or(1)) }
            } else if f.alpha != ZERO {
                Attainment::NotAttained { reason: NonAttainment::StrictQuadraticGap }
            } else {
                Attainment::NotAttained { reason: NonAttainment::StrictlyMonotoneDiagonal }
            };
            return Ok(Some(NormReport::exact(ext.value, attained, "affine-diagonal")));
        }
    }
    Ok(match t {
        OperatorExpr::Projection(m) => {
            if m.dim() == Some(0) {
                Some(NormReport::exact(0.0, Attainment::Attained { witness: Vector::basis(1) }, "projection"))
            } else {
                let witness = m.embedded_basis(1).expect("nonzero subspace");
                Some(NormReport::exact(1.0, Attainment::Attained { witness }, "projection"))
            }
        }
        OperatorExpr::Shift(_) => {
            Some(NormReport::exact(1.0, Attainment::Attained { witness: Vector::basis(1) }, "isometry"))
        }
        OperatorExpr::Adjoint(c) if matches!(c.as_ref(), OperatorExpr::Shift(_)) => {
            let OperatorExpr::Shift(k) = c.as_ref() else { unreachable!() };
            Some(NormReport::exact(1.0, Attainment::Attained { witness: Vector::basis(k + 1) }, "co-isometry"))
        }
        OperatorExpr::Scale(alpha, c) => exact_norm(c)?.map(|r| {
            let s = alpha.norm();
            let value = s * r.value();
            let attained = if s == 0.0 { Attainment::Attained { witness: Vector::basis(1) } } else { r.attained };
            NormReport::exact(value, attained, &r.method)
        }),
        OperatorExpr::Compose(cs) if cs.len() >= 2 && cs[0].is_isometry() => {
            let rest = if cs.len() == 2 { cs[1].clone() } else { OperatorExpr::Compose(cs[1..].to_vec()) };
            exact_norm(&rest)?.map(|r| NormReport { method: format!("isometry-compose/{}", r.method), ..r })
        }
        OperatorExpr::Restrict(c, m) => match m.kind() {
            SubspaceKind::SpanFinite { .. } if !c.contains_sqrt_gram() => {
                let r = m.dim().unwrap_or(0);
                let g = t.gram_compression(r)?;
                let (lambda, v) = top_eigenpair(&g)?;
                let witness = if r == 0 { Vector::basis(1) } else { Vector::from_dvector(&v) };
                let value = if r == 0 { 0.0 } else { lambda.max(0.0).sqrt() };
                Some(NormReport::exact(value, Attainment::Attained { witness }, "finite-span-restriction"))
            }
            SubspaceKind::BlockRepetition { .. } => match c.as_ref() {
                OperatorExpr::Projection(x) if matches!(x.kind(), SubspaceKind::BlockRepetition { .. }) => {
                    Some(match x.first_common_boundary(m) {
                        Some(b) => {
                            let flat: Vec<f64> = vec![1.0 / (b as f64).sqrt(); b];
                            let witness = m.coembed(&Vector::from_real(&flat));
                            NormReport::exact(1.0, Attainment::Attained { witness }, "block-projection-restriction")
                        }
                        None => NormReport::exact(
                            1.0,
                            Attainment::NotAttained { reason: NonAttainment::ProjectionTrivialIntersection },
                            "block-projection-restriction",
                        ),
                    })
                }
                _ => None,
            },
            _ => None,
        },
        OperatorExpr::Adjoint(c) => match exact_norm(c)? {
            Some(r) => {
                let value = r.value();
                let attained = match &r.attained {
                    Attainment::Attained { witness } if value > 0.0 && !c.contains_sqrt_gram() => {
                        let y = c.apply(witness)?.scale(real(1.0 / value));
                        Attainment::Attained { witness: y }
                    }
                    Attainment::Attained { .. } if value == 0.0 => Attainment::Attained { witness: Vector::basis(1) },
                    Attainment::NotAttained { reason } => Attainment::NotAttained { reason: *reason },
                    _ => Attainment::Unknown,
                };
                Some(NormReport { attained, method: format!("adjoint/{}", r.method), ..r })
            }
            None => None,
        },
        OperatorExpr::SqrtGram(c) => exact_norm(c)?.map(|r| NormReport { method: format!("sqrt-gram/{}", r.method), ..r }),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Tail;
    use crate::linalg::{c, ONE};
    use crate::seq::SeqSpec;
    use crate::subspace::SubspaceSpec;

    fn t_plus_i(a: f64) -> OperatorExpr {
        let seq = ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(a, a, 1.0).unwrap()).unwrap();
        OperatorExpr::sum(vec![OperatorExpr::Identity, OperatorExpr::diagonal(seq)])
    }

    #[test]
    fn identity_plus_unit_modulus_diagonal() {
        let r = operator_norm(&t_plus_i(1.0), &NormOptions::default()).unwrap();
        assert!((r.exact.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r.attained, Attainment::NotAttained { reason: NonAttainment::StrictQuadraticGap });
    }

    #[test]
    fn increasing_harmonic_diagonal() {
        let t = OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap());
        let r = operator_norm(&t, &NormOptions::default()).unwrap();
        assert_eq!(r.exact, Some(1.0));
        assert_eq!(r.attained, Attainment::NotAttained { reason: NonAttainment::StrictlyMonotoneDiagonal });
    }

    #[test]
    fn nilpotent_attains_at_e2() {
        let t = OperatorExpr::dense(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]), Tail::Zero).unwrap();
        let r = operator_norm(&t, &NormOptions::default()).unwrap();
        assert!((r.exact.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(r.witness().unwrap(), &Vector::basis(2));
    }

    #[test]
    fn backward_shift_attains_after_kernel() {
        let t = OperatorExpr::shift(2).unwrap().adjoint();
        let r = operator_norm(&t, &NormOptions::default()).unwrap();
        assert_eq!(r.witness().unwrap(), &Vector::basis(3));
    }

    #[test]
    fn enan_restriction_is_not_attained() {
        let x = SubspaceSpec::block_repetition(vec![], vec![1, 2]).unwrap();
        let m = SubspaceSpec::block_repetition(vec![2], vec![3]).unwrap();
        let t = OperatorExpr::restrict(OperatorExpr::projection(x), m);
        let r = operator_norm(&t, &NormOptions::default()).unwrap();
        assert_eq!(r.exact, Some(1.0));
        assert_eq!(r.attained, Attainment::NotAttained { reason: NonAttainment::ProjectionTrivialIntersection });
    }

    #[test]
    fn ladder_handles_identity_plus_shifted_finite_rank() {
        // S + e_1 (x) e_1: not a block form, yet attains at e_1 with norm sqrt(2)
        let r = OperatorExpr::finite_rank(vec![(1.0, Vector::basis(1), Vector::basis(1))]).unwrap();
        let t = OperatorExpr::sum(vec![OperatorExpr::shift(1).unwrap(), r]);
        let rep = operator_norm(&t, &NormOptions::with_max_dim(16)).unwrap();
        assert!((rep.lower - 2f64.sqrt()).abs() < 1e-12);
        assert!(rep.lower <= rep.upper);
    }

    #[test]
    fn adjoint_has_same_norm() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), ONE, ZERO, c(0.0, 2.0)]);
        let t = OperatorExpr::dense(a, Tail::Identity).unwrap();
        let n1 = operator_norm(&t, &NormOptions::default()).unwrap().exact.unwrap();
        let n2 = operator_norm(&t.adjoint(), &NormOptions::default()).unwrap().exact.unwrap();
        assert!((n1 - n2).abs() < 1e-12);
    }

    #[test]
    fn lower_bounds_increase_for_identity_plus_diagonal() {
        let b = truncation_lower_bounds(&t_plus_i(0.5), &[1, 2, 4, 8]).unwrap();
        for w in b.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(b[3] < 3f64.sqrt());
    }
}
