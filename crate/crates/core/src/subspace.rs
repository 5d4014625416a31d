//! Closed subspaces of `l^2` with exact projections and isometric embeddings.
//!
//! Each subspace `M` comes with a canonical isometry `V_M` from coordinate
//! space onto `M`; `embed` applies `V_M`, `coembed` applies `V_M^*` and
//! `project` applies `V_M V_M^*`.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, real, CVector};
use crate::vector::Vector;

/// Default Gram determinant threshold for generating sets.
pub const GRAM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum SubspaceKind {
    /// `span{v_1, ..., v_r}`.
    SpanFinite { vectors: Vec<Vector> },
    /// `{v_1, ..., v_r}^perp`.
    ComplementFinite { vectors: Vec<Vector> },
    /// Closed span of `e_{k+1}, e_{k+2}, ...`.
    CanonicalTail { k: usize },
    /// Vectors constant on consecutive blocks; block sizes are `prefix`
    /// followed by `period` repeated forever.
    BlockRepetition { prefix: Vec<usize>, period: Vec<usize> },
}

/// A closed subspace together with the data needed to embed into it.
#[derive(Debug, Clone)]
pub struct SubspaceSpec {
    kind: SubspaceKind,
    /// Orthonormal basis of the generating span (span / complement kinds).
    span_basis: Vec<Vector>,
    /// For complements: orthonormal basis of `M` inside `span{e_1..e_s}`.
    inner_basis: Vec<Vector>,
    /// Largest index touched by the generating vectors.
    support: usize,
}

impl Serialize for SubspaceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        crate::spec_doc::subspace_to_value(self).serialize(serializer)
    }
}

impl PartialEq for SubspaceSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

fn orthonormalize(vectors: &[Vector], support: usize) -> Result<Vec<Vector>> {
    let dense: Vec<CVector> = vectors
        .iter()
        .map(|v| {
            let n = v.norm();
            if n == 0.0 {
                CVector::zeros(support)
            } else {
                v.to_dvector(support) / real(n)
            }
        })
        .collect();
    // Gram determinant of the normalised generators = product of squared
    // Gram-Schmidt residuals.
    let mut basis: Vec<CVector> = Vec::new();
    let mut det = 1.0;
    for v in &dense {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let r = crate::linalg::dot(&w, q);
                w -= q * r;
            }
        }
        let n = w.norm();
        det *= n * n;
        if n == 0.0 {
            break;
        }
        basis.push(w / real(n));
    }
    if vectors.is_empty() {
        return Ok(vec![]);
    }
    if det <= GRAM_TOLERANCE || basis.len() < vectors.len() {
        return Err(Error::InvariantViolation(format!(
            "generating vectors are linearly dependent (Gram determinant {det:e})"
        )));
    }
    Ok(basis.iter().map(Vector::from_dvector).collect())
}

impl SubspaceSpec {
    pub fn span(vectors: Vec<Vector>) -> Result<Self> {
        let support = vectors.iter().map(Vector::support_max).max().unwrap_or(0);
        let span_basis = orthonormalize(&vectors, support)?;
        Ok(SubspaceSpec { kind: SubspaceKind::SpanFinite { vectors }, span_basis, inner_basis: vec![], support })
    }

    pub fn complement(vectors: Vec<Vector>) -> Result<Self> {
        let support = vectors.iter().map(Vector::support_max).max().unwrap_or(0);
        let span_basis = orthonormalize(&vectors, support)?;
        let dense_span: Vec<CVector> = span_basis.iter().map(|u| u.to_dvector(support)).collect();
        let candidates: Vec<CVector> = (0..support)
            .map(|j| {
                let mut e = CVector::zeros(support);
                e[j] = real(1.0);
                for u in &dense_span {
                    let r = u[j].conj();
                    e -= u * r;
                }
                e
            })
            .collect();
        let inner = gram_schmidt(&candidates, 1e-10);
        let expected = support - vectors.len();
        if inner.len() != expected {
            return Err(Error::InvariantViolation(format!(
                "complement basis has {} vectors, expected {expected}",
                inner.len()
            )));
        }
        Ok(SubspaceSpec {
            kind: SubspaceKind::ComplementFinite { vectors },
            span_basis,
            inner_basis: inner.iter().map(Vector::from_dvector).collect(),
            support,
        })
    }

    pub fn canonical_tail(k: usize) -> Self {
        SubspaceSpec { kind: SubspaceKind::CanonicalTail { k }, span_basis: vec![], inner_basis: vec![], support: 0 }
    }

    /// The whole space `l^2`.
    pub fn whole() -> Self {
        Self::canonical_tail(0)
    }

    pub fn block_repetition(prefix: Vec<usize>, period: Vec<usize>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvariantViolation("block repetition needs a non-empty period".into()));
        }
        if prefix.iter().chain(period.iter()).any(|&b| b == 0) {
            return Err(Error::InvariantViolation("block sizes must be positive".into()));
        }
        Ok(SubspaceSpec {
            kind: SubspaceKind::BlockRepetition { prefix, period },
            span_basis: vec![],
            inner_basis: vec![],
            support: 0,
        })
    }

    pub fn from_kind(kind: SubspaceKind) -> Result<Self> {
        match kind {
            SubspaceKind::SpanFinite { vectors } => Self::span(vectors),
            SubspaceKind::ComplementFinite { vectors } => Self::complement(vectors),
            SubspaceKind::CanonicalTail { k } => Ok(Self::canonical_tail(k)),
            SubspaceKind::BlockRepetition { prefix, period } => Self::block_repetition(prefix, period),
        }
    }

    pub fn kind(&self) -> &SubspaceKind {
        &self.kind
    }

    /// Orthonormal basis of a finite span (empty for other kinds).
    pub fn span_basis(&self) -> &[Vector] {
        &self.span_basis
    }

    /// `dim M`, or `None` when infinite.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            SubspaceKind::SpanFinite { vectors } => Some(vectors.len()),
            _ => None,
        }
    }

    /// `dim M^perp`, or `None` when infinite.
    pub fn codim(&self) -> Option<usize> {
        match &self.kind {
            SubspaceKind::SpanFinite { .. } => None,
            SubspaceKind::ComplementFinite { vectors } => Some(vectors.len()),
            SubspaceKind::CanonicalTail { k } => Some(*k),
            SubspaceKind::BlockRepetition { prefix, period } => {
                if period.iter().any(|&b| b >= 2) {
                    None
                } else {
                    Some(prefix.iter().map(|b| b - 1).sum())
                }
            }
        }
    }

    pub fn is_whole_space(&self) -> bool {
        self.codim() == Some(0)
    }

    /// `P_M x`.
    pub fn project(&self, x: &Vector) -> Vector {
        match &self.kind {
            SubspaceKind::SpanFinite { .. } => {
                let mut out = Vector::zero();
                for u in &self.span_basis {
                    out = out.axpy(x.inner(u), u);
                }
                out
            }
            SubspaceKind::ComplementFinite { .. } => {
                let mut out = x.clone();
                for u in &self.span_basis {
                    out = out.axpy(-x.inner(u), u);
                }
                out
            }
            SubspaceKind::CanonicalTail { k } => x.reindex(|j| (j > *k).then_some(j)),
            SubspaceKind::BlockRepetition { .. } => {
                let mut out = Vector::zero();
                for m in self.blocks_touched(x) {
                    let (start, size) = self.block(m);
                    let mean: Complex64 = (start..start + size).map(|i| x.get(i)).sum::<Complex64>() / real(size as f64);
                    for i in start..start + size {
                        out.set(i, mean);
                    }
                }
                out
            }
        }
    }

    /// `V_M e_m` for `m >= 1`, or `None` when `m` exceeds `dim M`.
    pub fn embedded_basis(&self, m: usize) -> Option<Vector> {
        assert!(m >= 1);
        match &self.kind {
            SubspaceKind::SpanFinite { .. } => self.span_basis.get(m - 1).cloned(),
            SubspaceKind::ComplementFinite { .. } => {
                let inner = self.inner_basis.len();
                if m <= inner {
                    Some(self.inner_basis[m - 1].clone())
                } else {
                    Some(Vector::basis(self.support + (m - inner)))
                }
            }
            SubspaceKind::CanonicalTail { k } => Some(Vector::basis(m + k)),
            SubspaceKind::BlockRepetition { .. } => {
                let (start, size) = self.block(m);
                let w = real(1.0 / (size as f64).sqrt());
                let mut v = Vector::zero();
                for i in start..start + size {
                    v.set(i, w);
                }
                Some(v)
            }
        }
    }

    /// `V_M x` for `x` in coordinate space.
    pub fn embed(&self, x: &Vector) -> Result<Vector> {
        if let Some(d) = self.dim() {
            if x.support_max() > d && x.iter().any(|(j, z)| j > d && z != Complex64::new(0.0, 0.0)) {
                return Err(Error::OutsideDomain { index: x.support_max(), dim: d });
            }
        }
        match &self.kind {
            SubspaceKind::CanonicalTail { k } => Ok(x.reindex(|j| Some(j + k))),
            _ => {
                let mut out = Vector::zero();
                for (m, z) in x.iter() {
                    let b = self.embedded_basis(m).expect("checked above");
                    out = out.axpy(z, &b);
                }
                Ok(out)
            }
        }
    }

    /// `V_M^* y`: coordinates of `P_M y` in the embedded basis.
    pub fn coembed(&self, y: &Vector) -> Vector {
        match &self.kind {
            SubspaceKind::SpanFinite { .. } => {
                let coords: Vec<Complex64> = self.span_basis.iter().map(|u| y.inner(u)).collect();
                Vector::from_dense(&coords)
            }
            SubspaceKind::ComplementFinite { vectors } => {
                let r = vectors.len();
                let mut out = Vector::zero();
                for (m, b) in self.inner_basis.iter().enumerate() {
                    out.set(m + 1, y.inner(b));
                }
                for (j, z) in y.iter() {
                    if j > self.support {
                        out.add_at(j - r, z);
                    }
                }
                out
            }
            SubspaceKind::CanonicalTail { k } => y.reindex(|j| (j > *k).then(|| j - k)),
            SubspaceKind::BlockRepetition { .. } => {
                let mut out = Vector::zero();
                for m in self.blocks_touched(y) {
                    let (start, size) = self.block(m);
                    let s: Complex64 = (start..start + size).map(|i| y.get(i)).sum();
                    out.set(m, s / real((size as f64).sqrt()));
                }
                out
            }
        }
    }

    // ---- block repetition helpers ----

    fn block_parts(&self) -> (&[usize], &[usize]) {
        match &self.kind {
            SubspaceKind::BlockRepetition { prefix, period } => (prefix, period),
            _ => panic!("not a block repetition subspace"),
        }
    }

    /// Size of block `m` (1-based).
    pub fn block_size(&self, m: usize) -> usize {
        let (prefix, period) = self.block_parts();
        if m <= prefix.len() {
            prefix[m - 1]
        } else {
            period[(m - 1 - prefix.len()) % period.len()]
        }
    }

    /// `(first coordinate, size)` of block `m` (1-based).
    pub fn block(&self, m: usize) -> (usize, usize) {
        let (prefix, period) = self.block_parts();
        let size = self.block_size(m);
        let before = if m <= prefix.len() {
            prefix[..m - 1].iter().sum::<usize>()
        } else {
            let k = m - 1 - prefix.len();
            let cycles = k / period.len();
            let rem = k % period.len();
            prefix.iter().sum::<usize>() + cycles * period.iter().sum::<usize>() + period[..rem].iter().sum::<usize>()
        };
        (before + 1, size)
    }

    /// Index of the block containing coordinate `j`.
    pub fn block_of(&self, j: usize) -> usize {
        let (prefix, period) = self.block_parts();
        let mut pos = 0;
        for (i, b) in prefix.iter().enumerate() {
            pos += b;
            if j <= pos {
                return i + 1;
            }
        }
        let p: usize = period.iter().sum();
        let rel = j - pos - 1;
        let cycles = rel / p;
        let mut within = rel % p;
        for (i, b) in period.iter().enumerate() {
            if within < *b {
                return prefix.len() + cycles * period.len() + i + 1;
            }
            within -= b;
        }
        unreachable!()
    }

    fn blocks_touched(&self, x: &Vector) -> Vec<usize> {
        let mut blocks: Vec<usize> = x.iter().map(|(j, _)| self.block_of(j)).collect();
        blocks.dedup();
        blocks
    }

    /// Positions `b` such that some block ends exactly at coordinate `b`,
    /// up to and including `limit`.
    fn boundaries_up_to(&self, limit: usize) -> Vec<usize> {
        let mut out = vec![];
        let mut m = 1;
        loop {
            let (start, size) = self.block(m);
            let end = start + size - 1;
            if end > limit {
                break;
            }
            out.push(end);
            m += 1;
        }
        out
    }

    /// Smallest coordinate at which blocks of both partitions end together.
    ///
    /// The finite block `1..=b` of the common coarsening carries a vector
    /// constant on blocks of both subspaces; without such a `b` their
    /// intersection is `{0}`.
    pub fn first_common_boundary(&self, other: &SubspaceSpec) -> Option<usize> {
        let (p1, q1) = self.block_parts();
        let (p2, q2) = other.block_parts();
        let s1: usize = q1.iter().sum();
        let s2: usize = q2.iter().sum();
        let l = lcm(s1, s2);
        let horizon = p1.iter().sum::<usize>() + p2.iter().sum::<usize>() + l + 1;
        let b1 = self.boundaries_up_to(horizon);
        let b2 = other.boundaries_up_to(horizon);
        b1.iter().find(|b| b2.binary_search(b).is_ok()).copied()
    }

    /// Flat unit vector spanning the first `n` blocks, in block coordinates.
    ///
    /// Coordinate `m` is `sqrt(b_m / B)` with `B` the total size, so the
    /// embedded vector is constant `1/sqrt(B)` on the first `B` coordinates.
    pub fn flat_block_vector(&self, n: usize) -> Vector {
        let total: usize = (1..=n).map(|m| self.block_size(m)).sum();
        let coords: Vec<Complex64> =
            (1..=n).map(|m| real((self.block_size(m) as f64 / total as f64).sqrt())).collect();
        Vector::from_dense(&coords)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn x_pattern() -> SubspaceSpec {
        SubspaceSpec::block_repetition(vec![], vec![1, 2]).unwrap()
    }

    fn m_pattern() -> SubspaceSpec {
        SubspaceSpec::block_repetition(vec![2], vec![3]).unwrap()
    }

    #[test]
    fn block_layout() {
        let x = x_pattern();
        assert_eq!(x.block(1), (1, 1));
        assert_eq!(x.block(2), (2, 2));
        assert_eq!(x.block(3), (4, 1));
        assert_eq!(x.block(4), (5, 2));
        assert_eq!(x.block_of(5), 4);
        assert_eq!(x.block_of(6), 4);
        let m = m_pattern();
        assert_eq!(m.block(1), (1, 2));
        assert_eq!(m.block(2), (3, 3));
        assert_eq!(m.block(4), (9, 3));
        assert_eq!(m.block_of(11), 4);
    }

    #[test]
    fn projection_onto_x_pattern_averages_pairs() {
        let s = 1.0 / 2f64.sqrt();
        let v = Vector::from_real(&[s, s, 0.0]);
        let p = x_pattern().project(&v);
        let expect = [s, s / 2.0, s / 2.0];
        for (j, e) in expect.iter().enumerate() {
            assert!((p.get(j + 1) - real(*e)).norm() < 1e-15);
        }
    }

    #[test]
    fn block_embedding_is_isometric() {
        let m = m_pattern();
        let x = Vector::from_dense(&[c(0.3, -0.1), c(1.0, 2.0), c(0.0, 0.5), c(-1.0, 0.0)]);
        let y = m.embed(&x).unwrap();
        assert!((y.norm() - x.norm()).abs() <= 1e-14 * x.norm());
        let back = m.coembed(&y);
        assert!(back.sub(&x).norm() < 1e-14);
    }

    #[test]
    fn x_and_m_meet_trivially() {
        assert_eq!(x_pattern().first_common_boundary(&m_pattern()), None);
        let coarse = SubspaceSpec::block_repetition(vec![], vec![3]).unwrap();
        assert_eq!(x_pattern().first_common_boundary(&coarse), Some(3));
    }

    #[test]
    fn codimensions() {
        assert_eq!(x_pattern().codim(), None);
        assert_eq!(SubspaceSpec::block_repetition(vec![3, 1], vec![1]).unwrap().codim(), Some(2));
        assert_eq!(SubspaceSpec::canonical_tail(4).codim(), Some(4));
        assert!(SubspaceSpec::whole().is_whole_space());
    }

    #[test]
    fn span_rejects_dependent_generators() {
        let a = Vector::from_real(&[1.0, 1.0]);
        let b = Vector::from_real(&[2.0, 2.0]);
        assert!(matches!(SubspaceSpec::span(vec![a, b]), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn complement_embedding_covers_tail() {
        let v = Vector::from_real(&[1.0, 1.0, 0.0]);
        let m = SubspaceSpec::complement(vec![v.clone()]).unwrap();
        // support 3, one constraint: two inner basis vectors, then e_4, e_5, ...
        let b1 = m.embedded_basis(1).unwrap();
        let b3 = m.embedded_basis(3).unwrap();
        assert!(b1.inner(&v).norm() < 1e-14);
        assert_eq!(b3, Vector::basis(4));
        let y = Vector::from_real(&[0.0, 0.0, 2.0, 0.0, 3.0]);
        let coords = m.coembed(&y);
        assert!((m.embed(&coords).unwrap().sub(&m.project(&y))).norm() < 1e-14);
    }

    #[test]
    fn span_domain_is_bounded() {
        let m = SubspaceSpec::span(vec![Vector::basis(2)]).unwrap();
        assert!(matches!(m.embed(&Vector::basis(2)), Err(Error::OutsideDomain { .. })));
    }
}
