//! Symbolic bounded operators on `l^2` and their exact structural evaluation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dot, pad_square, real, CMatrix, CVector, ONE, ZERO};
use crate::seq::{ComplexSeqSpec, SeqSpec};
use crate::spectral::eig::{hermitian_eig, psd_sqrt};
use crate::subspace::{SubspaceKind, SubspaceSpec};
use crate::vector::Vector;

/// Behaviour of a dense block beyond its last row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Zero,
    Identity,
}

/// `x -> sigma <x, right> left`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    pub sigma: f64,
    pub left: Vector,
    pub right: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr {
    /// `e_j -> lambda_j e_j`.
    Diagonal(ComplexSeqSpec),
    /// A `d x d` block on `e_1..e_d`, followed by zero or the identity.
    Dense { matrix: CMatrix, tail: Tail },
    FiniteRank(Vec<RankOne>),
    /// Orthogonal projection onto a closed subspace.
    Projection(SubspaceSpec),
    /// `e_j -> e_{j + k}`.
    Shift(usize),
    Identity,
    Scale(Complex64, Box<OperatorExpr>),
    Sum(Vec<OperatorExpr>),
    /// `children[0] o children[1] o ...`; the last child acts first.
    Compose(Vec<OperatorExpr>),
    Adjoint(Box<OperatorExpr>),
    /// `T o V_M`, acting on the coordinates of `M`.
    Restrict(Box<OperatorExpr>, SubspaceSpec),
    /// `(T^* T)^{1/2}` kept symbolic; resolved only at truncation.
    SqrtGram(Box<OperatorExpr>),
}

use OperatorExpr as E;

impl OperatorExpr {
    pub fn zero() -> Self {
        E::FiniteRank(vec![])
    }

    pub fn diagonal(seq: ComplexSeqSpec) -> Self {
        E::Diagonal(seq)
    }

    pub fn real_diagonal(seq: SeqSpec) -> Self {
        E::Diagonal(ComplexSeqSpec::real(seq))
    }

    pub fn dense(matrix: CMatrix, tail: Tail) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvariantViolation(format!(
                "dense block must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("dense block entry".into()));
        }
        Ok(E::Dense { matrix, tail })
    }

    pub fn finite_rank(terms: Vec<(f64, Vector, Vector)>) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for (sigma, left, right) in terms {
            if !sigma.is_finite() {
                return Err(Error::NonFinite("finite-rank weight".into()));
            }
            if sigma <= 0.0 {
                return Err(Error::InvariantViolation(format!("finite-rank weight must be positive, got {sigma}")));
            }
            out.push(RankOne { sigma, left, right });
        }
        Ok(E::FiniteRank(out))
    }

    pub fn projection(m: SubspaceSpec) -> Self {
        E::Projection(m)
    }

    pub fn shift(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvariantViolation("shift offset must be positive".into()));
        }
        Ok(E::Shift(k))
    }

    pub fn scale(alpha: Complex64, child: OperatorExpr) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::NonFinite("scale factor".into()));
        }
        Ok(E::Scale(alpha, Box::new(child)))
    }

    pub fn sum(children: Vec<OperatorExpr>) -> Self {
        E::Sum(children)
    }

    pub fn compose(children: Vec<OperatorExpr>) -> Self {
        E::Compose(children)
    }

    pub fn restrict(child: OperatorExpr, m: SubspaceSpec) -> Self {
        E::Restrict(Box::new(child), m)
    }

    pub fn adjoint_of(child: OperatorExpr) -> Self {
        E::Adjoint(Box::new(child))
    }

    /// Short tag naming the top-level variant.
    pub fn kind_name(&self) -> &'static str {
        match self {
            E::Diagonal(_) => "diagonal",
            E::Dense { .. } => "dense",
            E::FiniteRank(_) => "finite_rank",
            E::Projection(_) => "projection",
            E::Shift(_) => "shift",
            E::Identity => "identity",
            E::Scale(..) => "scale",
            E::Sum(_) => "sum",
            E::Compose(_) => "compose",
            E::Adjoint(_) => "adjoint",
            E::Restrict(..) => "restrict",
            E::SqrtGram(_) => "sqrt_gram",
        }
    }

    pub fn contains_sqrt_gram(&self) -> bool {
        match self {
            E::SqrtGram(_) => true,
            E::Scale(_, c) | E::Adjoint(c) | E::Restrict(c, _) => c.contains_sqrt_gram(),
            E::Sum(cs) | E::Compose(cs) => cs.iter().any(E::contains_sqrt_gram),
            _ => false,
        }
    }

    /// Dimension of the domain when it is finite (restrictions to finite spans).
    pub fn domain_dim(&self) -> Option<usize> {
        match self {
            E::Restrict(_, m) => m.dim(),
            E::Compose(cs) => cs.last().and_then(E::domain_dim),
            E::Scale(_, c) | E::SqrtGram(c) => c.domain_dim(),
            E::Sum(cs) => cs.iter().find_map(E::domain_dim),
            _ => None,
        }
    }

    /// `T x` for finitely supported `x`.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        match self {
            E::Identity => Ok(x.clone()),
            E::Diagonal(seq) => {
                let mut out = Vector::zero();
                for (j, z) in x.iter() {
                    out.set(j, z * seq.eval(j));
                }
                Ok(out)
            }
            E::Dense { matrix, tail } => {
                let n = matrix.nrows();
                let head = matrix * x.to_dvector(n);
                let mut out = Vector::from_dvector(&head);
                if *tail == Tail::Identity {
                    for (j, z) in x.iter().filter(|(j, _)| *j > n) {
                        out.set(j, z);
                    }
                }
                Ok(out)
            }
            E::FiniteRank(terms) => {
                let mut out = Vector::zero();
                for t in terms {
                    out = out.axpy(x.inner(&t.right) * t.sigma, &t.left);
                }
                Ok(out)
            }
            E::Projection(m) => Ok(m.project(x)),
            E::Shift(k) => Ok(x.reindex(|j| Some(j + k))),
            E::Scale(alpha, c) => Ok(c.apply(x)?.scale(*alpha)),
            E::Sum(cs) => {
                let mut out = Vector::zero();
                for c in cs {
                    out = out.add(&c.apply(x)?);
                }
                Ok(out)
            }
            E::Compose(cs) => {
                let mut y = x.clone();
                for c in cs.iter().rev() {
                    y = c.apply(&y)?;
                }
                Ok(y)
            }
            E::Restrict(c, m) => c.apply(&m.embed(x)?),
            E::Adjoint(c) => match c.as_ref() {
                E::Shift(k) => Ok(x.reindex(|j| (j > *k).then(|| j - k))),
                E::Restrict(inner, m) => Ok(m.coembed(&inner.adjoint().apply(x)?)),
                E::SqrtGram(_) => c.apply(x),
                E::Adjoint(inner) => inner.apply(x),
                other => other.adjoint().apply(x),
            },
            E::SqrtGram(_) => Err(Error::UnboundedSupport(
                "square root of a Gram operator is only available through truncation".into(),
            )),
        }
    }

    /// `T^*`, pushed through the tree where the adjoint has a direct form.
    pub fn adjoint(&self) -> OperatorExpr {
        match self {
            E::Identity => E::Identity,
            E::Diagonal(seq) => E::Diagonal(seq.conj()),
            E::Dense { matrix, tail } => E::Dense { matrix: matrix.adjoint(), tail: *tail },
            E::FiniteRank(terms) => E::FiniteRank(
                terms
                    .iter()
                    .map(|t| RankOne { sigma: t.sigma, left: t.right.clone(), right: t.left.clone() })
                    .collect(),
            ),
            E::Projection(_) | E::SqrtGram(_) => self.clone(),
            E::Scale(alpha, c) => E::Scale(alpha.conj(), Box::new(c.adjoint())),
            E::Sum(cs) => E::Sum(cs.iter().map(E::adjoint).collect()),
            E::Compose(cs) => E::Compose(cs.iter().rev().map(E::adjoint).collect()),
            E::Adjoint(c) => c.as_ref().clone(),
            E::Shift(_) | E::Restrict(..) => E::Adjoint(Box::new(self.clone())),
        }
    }

    /// Images `T e_1, ..., T e_d` (fewer when the domain is finite).
    pub fn columns(&self, d: usize) -> Result<Vec<Vector>> {
        let n = self.domain_dim().map_or(d, |m| m.min(d));
        (1..=n).map(|j| self.apply(&Vector::basis(j))).collect()
    }

    /// `d x d` matrix `<T e_j, e_i>`.
    ///
    /// Restrictions are compressed through an orthonormal basis of the
    /// images `T V_M e_1, ..., T V_M e_d` (the triangular factor of their
    /// QR factorisation), so the singular values are exactly those of
    /// `T V_M` on the first `d` coordinates of `M`.
    pub fn truncate(&self, d: usize) -> Result<CMatrix> {
        match self {
            E::Identity => Ok(CMatrix::identity(d, d)),
            E::Diagonal(seq) => Ok(CMatrix::from_fn(d, d, |i, j| if i == j { seq.eval(j + 1) } else { ZERO })),
            E::Dense { matrix, tail } => {
                let mut out = pad_square(matrix, d);
                if *tail == Tail::Identity {
                    for j in matrix.nrows()..d {
                        out[(j, j)] = ONE;
                    }
                }
                Ok(out)
            }
            E::Shift(k) => Ok(CMatrix::from_fn(d, d, |i, j| if i == j + k { ONE } else { ZERO })),
            E::Scale(alpha, c) => Ok(c.truncate(d)? * *alpha),
            E::Sum(cs) => {
                let mut out = CMatrix::zeros(d, d);
                for c in cs {
                    out += c.truncate(d)?;
                }
                Ok(out)
            }
            E::Adjoint(c) => Ok(c.truncate(d)?.adjoint()),
            E::SqrtGram(c) => psd_sqrt(&c.gram_compression(d)?, 1e-10),
            E::Restrict(c, m) => {
                let images = if c.contains_sqrt_gram() {
                    restricted_images_via_truncation(c, m, d)?
                } else {
                    let n = m.dim().map_or(d, |k| k.min(d));
                    let mut cols = Vec::with_capacity(n);
                    for j in 1..=n {
                        cols.push(c.apply(&m.embedded_basis(j).expect("within dimension"))?);
                    }
                    cols
                };
                Ok(triangular_factor(&images, d))
            }
            E::Compose(cs) if self.contains_sqrt_gram() => {
                let mut out = CMatrix::identity(d, d);
                for c in cs {
                    out *= c.truncate(d)?;
                }
                Ok(out)
            }
            _ => {
                let cols = self.columns(d)?;
                let mut out = CMatrix::zeros(d, d);
                for (j, col) in cols.iter().enumerate() {
                    for (i, z) in col.iter().take_while(|(i, _)| *i <= d) {
                        out[(i - 1, j)] = z;
                    }
                }
                Ok(out)
            }
        }
    }

    /// `d x d` matrix `<T e_j, T e_i>`, the compression of `T^* T`.
    pub fn gram_compression(&self, d: usize) -> Result<CMatrix> {
        if let E::SqrtGram(c) = self {
            return c.gram_compression(d);
        }
        if self.contains_sqrt_gram() {
            let t = self.truncate(d)?;
            return Ok(t.adjoint() * t);
        }
        let cols = self.columns(d)?;
        let mut g = CMatrix::zeros(d, d);
        for i in 0..cols.len() {
            for j in i..cols.len() {
                let z = cols[j].inner(&cols[i]);
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        Ok(g)
    }

    /// The positive square root `P_T = (T^* T)^{1/2}`.
    ///
    /// Structured inputs keep their structure; anything else becomes a
    /// `SqrtGram` marker resolved at truncation.
    pub fn positive_sqrt(&self) -> Result<OperatorExpr> {
        match self {
            E::Identity | E::Shift(_) => Ok(E::Identity),
            E::Projection(_) | E::SqrtGram(_) => Ok(self.clone()),
            E::Adjoint(c) if matches!(c.as_ref(), E::Shift(_)) => {
                let E::Shift(k) = c.as_ref() else { unreachable!() };
                Ok(E::Projection(SubspaceSpec::canonical_tail(*k)))
            }
            E::Diagonal(seq) => Ok(match seq.modulus() {
                Some(m) => E::Diagonal(ComplexSeqSpec::real(m)),
                None => E::SqrtGram(Box::new(self.clone())),
            }),
            E::Dense { matrix, tail } => {
                let p = psd_sqrt(&(matrix.adjoint() * matrix), 1e-10)?;
                Ok(E::Dense { matrix: p, tail: *tail })
            }
            E::FiniteRank(terms) => {
                let n = terms.iter().map(|t| t.left.support_max().max(t.right.support_max())).max().unwrap_or(0);
                if n == 0 {
                    return Ok(E::zero());
                }
                let a = self.truncate(n)?;
                let eig = hermitian_eig(&(a.adjoint() * &a))?;
                let scale = eig.max().abs().max(1.0);
                if eig.min() < -1e-10 * scale {
                    return Err(Error::NotPositive { min_eigenvalue: eig.min() });
                }
                let mut out = vec![];
                for k in 0..n {
                    let mu = eig.eigenvalues[k];
                    if mu > 1e-24 * scale {
                        let v = Vector::from_dvector(&eig.vector(k));
                        out.push(RankOne { sigma: mu.sqrt(), left: v.clone(), right: v });
                    }
                }
                Ok(E::FiniteRank(out))
            }
            E::Scale(alpha, c) => Ok(E::Scale(real(alpha.norm()), Box::new(c.positive_sqrt()?))),
            E::Compose(cs) if cs.len() >= 2 && cs[0].is_isometry() => {
                let rest = if cs.len() == 2 { cs[1].clone() } else { E::Compose(cs[1..].to_vec()) };
                rest.positive_sqrt()
            }
            _ => Ok(E::SqrtGram(Box::new(self.clone()))),
        }
    }

    /// Structurally an isometry: shifts, the identity, unit-modulus diagonals.
    pub fn is_isometry(&self) -> bool {
        match self {
            E::Identity | E::Shift(_) => true,
            E::Diagonal(ComplexSeqSpec::UnitModulus { .. }) => true,
            E::Scale(alpha, c) => (alpha.norm() - 1.0).abs() <= 1e-15 && c.is_isometry(),
            E::Compose(cs) => cs.iter().all(E::is_isometry),
            _ => false,
        }
    }

    /// Structurally self-adjoint.
    pub fn is_structurally_self_adjoint(&self) -> bool {
        match self {
            E::Identity | E::Projection(_) | E::SqrtGram(_) => true,
            E::Diagonal(seq) => seq.is_real(),
            E::Dense { matrix, .. } => crate::linalg::hermitian_defect(matrix) <= 1e-10,
            E::FiniteRank(terms) => terms.iter().all(|t| t.left == t.right),
            E::Scale(alpha, c) => alpha.im == 0.0 && c.is_structurally_self_adjoint(),
            E::Sum(cs) => cs.iter().all(E::is_structurally_self_adjoint),
            _ => false,
        }
    }

    /// Block form `T = A (+) c I`: an `n x n` block on `e_1..e_n` followed by
    /// a multiple of the identity. `None` when the operator has no such form
    /// or the block would exceed `max_n`.
    pub fn block_form(&self, max_n: usize) -> Option<(CMatrix, Complex64)> {
        let out = match self {
            E::Identity => (CMatrix::zeros(0, 0), ONE),
            E::Dense { matrix, tail } => (matrix.clone(), if *tail == Tail::Identity { ONE } else { ZERO }),
            E::FiniteRank(terms) => {
                let n = terms.iter().map(|t| t.left.support_max().max(t.right.support_max())).max().unwrap_or(0);
                if n > max_n {
                    return None;
                }
                (self.truncate(n).ok()?, ZERO)
            }
            E::Diagonal(ComplexSeqSpec::Real { sequence }) => match sequence {
                SeqSpec::ExplicitThenZero { values } => (diag_block(values), ZERO),
                SeqSpec::ExplicitThenConstant { values, tail } => (diag_block(values), real(*tail)),
                _ => return None,
            },
            E::Projection(m) => match m.kind() {
                SubspaceKind::SpanFinite { vectors } => {
                    let n = vectors.iter().map(Vector::support_max).max().unwrap_or(0);
                    (self.truncate(n).ok()?, ZERO)
                }
                SubspaceKind::ComplementFinite { vectors } => {
                    let n = vectors.iter().map(Vector::support_max).max().unwrap_or(0);
                    (self.truncate(n).ok()?, ONE)
                }
                SubspaceKind::CanonicalTail { k } => (CMatrix::zeros(*k, *k), ONE),
                SubspaceKind::BlockRepetition { prefix, period } => {
                    if period.iter().any(|&b| b != 1) {
                        return None;
                    }
                    let n: usize = prefix.iter().sum();
                    (self.truncate(n).ok()?, ONE)
                }
            },
            E::Scale(alpha, c) => {
                let (a, t) = c.block_form(max_n)?;
                (a * *alpha, t * alpha)
            }
            E::Adjoint(c) => {
                let (a, t) = c.block_form(max_n)?;
                (a.adjoint(), t.conj())
            }
            E::Sum(cs) => {
                let parts: Vec<_> = cs.iter().map(|c| c.block_form(max_n)).collect::<Option<_>>()?;
                let n = parts.iter().map(|(a, _)| a.nrows()).max().unwrap_or(0);
                let mut acc = CMatrix::zeros(n, n);
                let mut tail = ZERO;
                for (a, t) in &parts {
                    acc += expand_block(a, *t, n);
                    tail += t;
                }
                (acc, tail)
            }
            E::Compose(cs) => {
                let parts: Vec<_> = cs.iter().map(|c| c.block_form(max_n)).collect::<Option<_>>()?;
                let n = parts.iter().map(|(a, _)| a.nrows()).max().unwrap_or(0);
                let mut acc = CMatrix::identity(n, n);
                let mut tail = ONE;
                for (a, t) in &parts {
                    acc *= expand_block(a, *t, n);
                    tail *= t;
                }
                (acc, tail)
            }
            _ => return None,
        };
        (out.0.nrows() <= max_n).then_some(out)
    }

    /// Largest index touched by the operator when it is finite-dimensional
    /// in the sense `T = P_n T P_n`.
    pub fn finite_support(&self) -> Option<usize> {
        match self.block_form(usize::MAX) {
            Some((a, t)) if t == ZERO => Some(a.nrows()),
            _ => None,
        }
    }
}

fn diag_block(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { real(values[i]) } else { ZERO })
}

/// The `n x n` block of `A (+) t I`.
fn expand_block(a: &CMatrix, t: Complex64, n: usize) -> CMatrix {
    let mut out = pad_square(a, n);
    for j in a.nrows()..n {
        out[(j, j)] = t;
    }
    out
}

fn restricted_images_via_truncation(c: &OperatorExpr, m: &SubspaceSpec, d: usize) -> Result<Vec<Vector>> {
    let n = m.dim().map_or(d, |k| k.min(d));
    let basis: Vec<Vector> = (1..=n).map(|j| m.embedded_basis(j).expect("within dimension")).collect();
    let support = basis.iter().map(Vector::support_max).max().unwrap_or(0).max(d);
    let t = c.truncate(support)?;
    Ok(basis.iter().map(|b| Vector::from_dvector(&(&t * b.to_dvector(support)))).collect())
}

/// Upper-triangular `R` (padded to `d x d`) with `B = Q R` for the columns
/// `B = [b_1 .. b_k]`, by modified Gram-Schmidt in column order.
fn triangular_factor(images: &[Vector], d: usize) -> CMatrix {
    let support = images.iter().map(Vector::support_max).max().unwrap_or(0).max(1);
    let cols: Vec<CVector> = images.iter().map(|v| v.to_dvector(support)).collect();
    let scale = cols.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-300);
    let mut q: Vec<CVector> = Vec::new();
    let mut r = CMatrix::zeros(d, d);
    for (j, b) in cols.iter().enumerate() {
        let mut w = b.clone();
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let h = dot(&w, qi);
                r[(i, j)] += h;
                w -= qi * h;
            }
        }
        let n = w.norm();
        if n > 1e-13 * scale && q.len() < d {
            r[(q.len(), j)] = real(n);
            q.push(w / real(n));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::spectral::norm::top_singular_value;

    fn harmonic_unit() -> ComplexSeqSpec {
        ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn shift_moves_basis_vectors() {
        let s = E::shift(1).unwrap();
        assert_eq!(s.apply(&Vector::basis(1)).unwrap(), Vector::basis(2));
        assert!(s.adjoint().apply(&Vector::basis(1)).unwrap().is_zero());
        assert_eq!(s.adjoint().apply(&Vector::basis(3)).unwrap(), Vector::basis(2));
    }

    #[test]
    fn enan_projection_formula() {
        let x = SubspaceSpec::block_repetition(vec![], vec![1, 2]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let y = E::projection(x).apply(&Vector::from_real(&[s, s, 0.0])).unwrap();
        let want = [s, s / 2.0, s / 2.0];
        for (j, w) in want.iter().enumerate() {
            assert!((y.get(j + 1) - real(*w)).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_plus_unit_modulus_diagonal_on_e1() {
        let t = E::sum(vec![E::Identity, E::diagonal(harmonic_unit())]);
        let y = t.apply(&Vector::basis(1)).unwrap();
        // lambda_1 = 1/2 + i sqrt(3)/2
        assert!((y.norm() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn adjoint_of_dense_is_conjugate_transpose() {
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let t = E::dense(a, Tail::Zero).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
        assert_eq!(t.adjoint(), E::Dense { matrix: want, tail: Tail::Zero });
    }

    #[test]
    fn adjoint_of_diagonal_conjugates() {
        let t = E::diagonal(harmonic_unit());
        let y = t.adjoint().apply(&Vector::basis(2)).unwrap();
        assert_eq!(y.get(2), t.apply(&Vector::basis(2)).unwrap().get(2).conj());
    }

    #[test]
    fn simple_truncations() {
        assert_eq!(E::Identity.truncate(3).unwrap(), CMatrix::identity(3, 3));
        let d = E::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap()).truncate(2).unwrap();
        assert!((d[(0, 0)] - real(0.5)).norm() < 1e-15);
        assert!((d[(1, 1)] - real(2.0 / 3.0)).norm() < 1e-15);
        assert_eq!(d[(0, 1)], ZERO);
    }

    #[test]
    fn restricted_enan_projection_truncation() {
        let x = SubspaceSpec::block_repetition(vec![], vec![1, 2]).unwrap();
        let m = SubspaceSpec::block_repetition(vec![2], vec![3]).unwrap();
        let t = E::restrict(E::projection(x), m);
        let a = t.truncate(1).unwrap();
        let (sigma, _) = top_singular_value(&a).unwrap();
        assert!((sigma - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn truncation_of_adjoint_matches_conjugate_transpose() {
        let x = SubspaceSpec::block_repetition(vec![1], vec![2]).unwrap();
        let t = E::compose(vec![E::shift(2).unwrap(), E::projection(x), E::diagonal(harmonic_unit())]);
        let a = t.truncate(7).unwrap();
        let b = t.adjoint().truncate(7).unwrap();
        assert!((a.adjoint() - b).norm() < 1e-14);
    }

    #[test]
    fn positive_sqrt_structured_cases() {
        let nil = E::dense(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]), Tail::Zero).unwrap();
        let E::Dense { matrix, .. } = nil.positive_sqrt().unwrap() else { panic!() };
        let want = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
        assert!((matrix - want).norm() < 1e-15);

        let d = E::real_diagonal(SeqSpec::explicit_then_zero(vec![-2.0, 1.0]).unwrap());
        let p = d.positive_sqrt().unwrap();
        assert_eq!(p.apply(&Vector::basis(1)).unwrap(), Vector::basis(1).scale(real(2.0)));

        let m = SubspaceSpec::canonical_tail(3);
        assert_eq!(E::projection(m.clone()).positive_sqrt().unwrap(), E::projection(m));
        assert_eq!(E::shift(2).unwrap().adjoint().positive_sqrt().unwrap(), E::projection(SubspaceSpec::canonical_tail(2)));
    }

    #[test]
    fn positive_sqrt_of_finite_rank_preserves_norms() {
        let t = E::finite_rank(vec![
            (2.0, Vector::from_dense(&[c(0.0, 1.0), ONE]), Vector::basis(3)),
            (1.0, Vector::basis(1), Vector::from_real(&[1.0, 1.0, 0.0])),
        ])
        .unwrap();
        let p = t.positive_sqrt().unwrap();
        for x in [Vector::basis(1), Vector::basis(3), Vector::from_dense(&[c(1.0, -1.0), ZERO, c(0.5, 0.0)])] {
            let a = t.apply(&x).unwrap().norm();
            let b = p.apply(&x).unwrap().norm();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn block_form_of_identity_plus_finite_rank() {
        let r = E::finite_rank(vec![(1.0, Vector::basis(2), Vector::basis(1))]).unwrap();
        let t = E::sum(vec![E::Identity, r]);
        let (a, tail) = t.block_form(64).unwrap();
        assert_eq!(tail, ONE);
        assert_eq!(a.nrows(), 2);
        assert_eq!(a[(1, 0)], ONE);
        assert_eq!(a[(0, 0)], ONE);
    }

    #[test]
    fn sqrt_gram_cannot_be_applied() {
        let t = E::SqrtGram(Box::new(E::shift(1).unwrap()));
        assert!(matches!(t.apply(&Vector::basis(1)), Err(Error::UnboundedSupport(_))));
        assert!((t.truncate(3).unwrap() - CMatrix::identity(3, 3)).norm() < 1e-14);
    }
}
