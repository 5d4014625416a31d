//! Absolutely-norm-attaining (AN) classification over expression trees.
//!
//! The engine is syntactic: each node is matched against a fixed set of
//! structural rules. Anything outside the rule set ends as `Unknown`.

mod enan;
mod falsifier;
mod lotd;
mod unitary;

pub use enan::{block_family_gap, enan_counterexample, EnanCounterexample};
pub use falsifier::{sample_subspace_restrictions, FalsifierReport};
pub use lotd::{rewrite_lotd, LotdForm};
pub use unitary::unitary_equiv_projections;

use num_complex::Complex64;
use serde::Serialize;

use crate::attainment::{check_n, CertificateStatus};
use crate::expr::{OperatorExpr as E, Tail};
use crate::linalg::{hermitian_defect, max_abs, ZERO};
use crate::seq::{ComplexSeqSpec, SeqSpec};
use crate::spectral::eig::hermitian_eig;
use crate::spectral::norm::{exact_norm, truncation_lower_bounds, Attainment, NormOptions};
use crate::subspace::{SubspaceKind, SubspaceSpec};

const BLOCK_LIMIT: usize = 512;
const PROJECTION_TOLERANCE: f64 = 1e-10;
/// Truncation used when the rules fall back to a numerical N check.
const FALLBACK_DIM: usize = 64;
/// Length of the flat block family used as NotAN evidence.
const EVIDENCE_BLOCKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "AN")]
    An,
    #[serde(rename = "NotAN")]
    NotAn,
    Unknown,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::An => "AN",
            Verdict::NotAn => "NotAN",
            Verdict::Unknown => "Unknown",
        }
    }
}

/// The rule that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Compact operators are AN.
    Compact,
    /// A projection is AN iff its rank or its co-rank is finite.
    ProjectionRankDichotomy,
    /// `V T` and `T V` with `V` an isometry and `T` AN.
    IsometryComposition,
    /// A co-isometry is AN iff its kernel is finite-dimensional.
    CoIsometryKernel,
    /// `c I + R` with `R` of finite rank.
    IdentityPlusFiniteRank,
    /// `V + R` with `V` an isometry and `R` of finite rank.
    IsometryPlusFiniteRank,
    /// `V + R` or `P + R` with `V` an AN co-isometry, `P` an AN projection.
    CoIsometryOrProjectionPlusFiniteRank,
    /// `K + c I` with `K` positive compact, `c > 0`.
    CompactPlusIdentity,
    /// `K + c I + R` with `K` positive compact, `c > 0`, `R` finite rank.
    CompactIdentityFiniteRank,
    /// Diagonal with `lambda_j` decreasing to `lambda > 0`, finite kernel.
    DecreasingDiagonal,
    /// Sums, differences and products of two AN projections.
    ProjectionAlgebra,
    /// `U^* T U` with `U` unitary.
    UnitaryEquivalence,
    /// `T` is AN iff `(T^* T)^{1/2}` is.
    PositiveRootReduction,
    /// `alpha T` with `alpha != 0`.
    Scaling,
    /// Restrictions of AN operators are AN.
    RestrictionOfAn,
    /// The operator itself does not attain its norm.
    FailsN,
    NoRule,
}

impl Rule {
    pub fn tag(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
    }
}

/// A subspace whose restriction does not attain its norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub subspace: SubspaceSpec,
    /// `|T|_M|` minus the best value reached by the recorded family.
    pub gap: f64,
    /// Name of the vector family approaching the norm, if symbolic.
    pub family: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub node: &'static str,
    pub rule: Rule,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnVerdict {
    pub verdict: Verdict,
    pub rule: Rule,
    pub evidence: Option<Evidence>,
    pub derivation: Vec<Step>,
}

#[derive(Debug, Clone)]
struct Outcome {
    verdict: Verdict,
    rule: Rule,
    evidence: Option<Evidence>,
}

impl Outcome {
    fn an(rule: Rule) -> Self {
        Outcome { verdict: Verdict::An, rule, evidence: None }
    }

    fn not_an(rule: Rule, evidence: Evidence) -> Self {
        Outcome { verdict: Verdict::NotAn, rule, evidence: Some(evidence) }
    }

    fn unknown() -> Self {
        Outcome { verdict: Verdict::Unknown, rule: Rule::NoRule, evidence: None }
    }

    fn decided(&self) -> bool {
        self.verdict != Verdict::Unknown
    }

    fn relabel(self, rule: Rule) -> Self {
        Outcome { rule, ..self }
    }
}

/// Classify `T` against the rule set, recording every rule application.
pub fn classify_an(t: &E) -> AnVerdict {
    let mut derivation = Vec::new();
    let out = classify(t, &mut derivation);
    AnVerdict { verdict: out.verdict, rule: out.rule, evidence: out.evidence, derivation }
}

fn classify(t: &E, steps: &mut Vec<Step>) -> Outcome {
    let out = classify_node(t, steps);
    steps.push(Step { node: t.kind_name(), rule: out.rule, verdict: out.verdict });
    out
}

fn classify_node(t: &E, steps: &mut Vec<Step>) -> Outcome {
    if let E::Projection(m) = t {
        return projection_rule(t, m);
    }
    if let E::Dense { matrix, tail } = t {
        if is_projection_matrix(matrix) && (*tail == Tail::Identity || *tail == Tail::Zero) {
            return Outcome::an(Rule::ProjectionRankDichotomy);
        }
    }
    if let E::Diagonal(ComplexSeqSpec::Real { sequence }) = t {
        let out = real_diagonal_rule(t, sequence, steps);
        if out.decided() {
            return out;
        }
    }
    if is_compact(t) {
        return Outcome::an(Rule::Compact);
    }
    if t.is_isometry() {
        return Outcome::an(Rule::IsometryComposition);
    }
    if let Some((_, tail)) = t.block_form(BLOCK_LIMIT) {
        if tail != ZERO {
            return Outcome::an(Rule::IdentityPlusFiniteRank);
        }
    }
    let out = match t {
        E::Adjoint(c) => adjoint_rule(c, steps),
        E::Scale(alpha, c) if *alpha != ZERO => {
            let o = classify(c, steps);
            if o.decided() {
                o.relabel(Rule::Scaling)
            } else {
                Outcome::unknown()
            }
        }
        E::SqrtGram(c) => {
            let o = classify(c, steps);
            if o.decided() {
                o.relabel(Rule::PositiveRootReduction)
            } else {
                Outcome::unknown()
            }
        }
        E::Restrict(c, m) => restrict_rule(t, c, m, steps),
        E::Compose(cs) => compose_rule(cs, steps),
        E::Sum(cs) => sum_rule(cs, steps),
        _ => Outcome::unknown(),
    };
    if out.decided() {
        return out;
    }
    fallback(t, steps)
}

/// Positive-root reduction for structured shapes, then a direct N check.
fn fallback(t: &E, steps: &mut Vec<Step>) -> Outcome {
    if !t.contains_sqrt_gram() {
        if let Ok(p) = t.positive_sqrt() {
            if !matches!(p, E::SqrtGram(_)) && p != *t {
                let o = classify(&p, steps);
                if o.decided() {
                    return o.relabel(Rule::PositiveRootReduction);
                }
            }
        }
    }
    match fails_n_evidence(t, SubspaceSpec::whole()) {
        Some(ev) => Outcome::not_an(Rule::FailsN, ev),
        None => Outcome::unknown(),
    }
}

/// Evidence that `T` itself fails property N, reported on `subspace`.
fn fails_n_evidence(t: &E, subspace: SubspaceSpec) -> Option<Evidence> {
    let cert = check_n(t, &NormOptions::with_max_dim(FALLBACK_DIM)).ok()?;
    if !matches!(cert.status, CertificateStatus::NotAttained { .. }) {
        return None;
    }
    let norm = cert.norm?;
    let lower = truncation_lower_bounds(t, &[FALLBACK_DIM]).ok()?[0];
    Some(Evidence { subspace, gap: (norm - lower).max(0.0), family: None })
}

/// `rank P_M` and `corank P_M`; finite rank or co-rank makes `P_M` AN.
fn projection_rule(p: &E, m: &SubspaceSpec) -> Outcome {
    if m.dim().is_some() || m.codim().is_some() {
        return Outcome::an(Rule::ProjectionRankDichotomy);
    }
    match m.kind() {
        SubspaceKind::BlockRepetition { prefix, period } => {
            let witness = transversal_blocks(prefix, period);
            let gap = block_family_gap(p, &witness, EVIDENCE_BLOCKS).unwrap_or(f64::NAN);
            Outcome::not_an(
                Rule::ProjectionRankDichotomy,
                Evidence { subspace: witness, gap, family: Some("flat-block-vectors".into()) },
            )
        }
        _ => Outcome::unknown(),
    }
}

/// A block-repetition subspace sharing no block boundary with `X`.
///
/// `X` has boundaries `P0 + k p + s_i` for the partial sums `s_i` of its
/// period; repeating blocks of length `p` from `P0 + o`, with `o` a residue
/// that is not a partial sum, avoids all of them. Flat vectors on long runs
/// of such blocks are nearly constant on the blocks of `X`, so `|P x| -> 1`,
/// while `M ∩ X = {0}`.
fn transversal_blocks(prefix: &[usize], period: &[usize]) -> SubspaceSpec {
    let p0: usize = prefix.iter().sum();
    let p: usize = period.iter().sum();
    let partial: Vec<usize> = period
        .iter()
        .scan(0, |acc, b| {
            *acc += b;
            Some(*acc)
        })
        .collect();
    let offset = (1..p).find(|o| !partial.contains(o)).expect("a period block of size >= 2");
    SubspaceSpec::block_repetition(vec![p0 + offset], vec![p]).expect("positive block sizes")
}

fn is_projection_matrix(a: &nalgebra::DMatrix<Complex64>) -> bool {
    let scale = max_abs(a).max(1.0);
    hermitian_defect(a) <= PROJECTION_TOLERANCE * scale && max_abs(&(a * a - a)) <= PROJECTION_TOLERANCE * scale
}

/// Conservative compactness test.
pub fn is_compact(t: &E) -> bool {
    match t {
        E::Dense { tail, .. } => *tail == Tail::Zero,
        E::FiniteRank(_) => true,
        E::Diagonal(ComplexSeqSpec::Real { sequence }) => sequence.tends_to_zero(),
        E::Diagonal(_) | E::Identity | E::Shift(_) => false,
        E::Projection(m) => m.dim().is_some(),
        E::Scale(alpha, c) => *alpha == ZERO || is_compact(c),
        E::Sum(cs) => cs.iter().all(is_compact),
        E::Compose(cs) => cs.iter().any(is_compact),
        E::Adjoint(c) | E::SqrtGram(c) => is_compact(c),
        E::Restrict(c, m) => m.dim().is_some() || is_compact(c),
    }
}

/// Conservative finite-rank test.
pub fn is_finite_rank(t: &E) -> bool {
    match t {
        E::Dense { tail, .. } => *tail == Tail::Zero,
        E::FiniteRank(_) => true,
        E::Diagonal(ComplexSeqSpec::Real { sequence: SeqSpec::ExplicitThenZero { .. } }) => true,
        E::Diagonal(_) | E::Identity | E::Shift(_) => false,
        E::Projection(m) => m.dim().is_some(),
        E::Scale(alpha, c) => *alpha == ZERO || is_finite_rank(c),
        E::Sum(cs) => cs.iter().all(is_finite_rank),
        E::Compose(cs) => cs.iter().any(is_finite_rank),
        E::Adjoint(c) | E::SqrtGram(c) => is_finite_rank(c),
        E::Restrict(c, m) => m.dim().is_some() || is_finite_rank(c),
    }
}

/// Conservative positivity test.
fn is_positive(t: &E) -> bool {
    match t {
        E::Identity | E::Projection(_) | E::SqrtGram(_) => true,
        E::Diagonal(ComplexSeqSpec::Real { sequence }) => sequence.inf_value().value >= 0.0,
        E::FiniteRank(terms) => terms.iter().all(|r| r.left == r.right && r.sigma >= 0.0),
        E::Dense { matrix, .. } => {
            let scale = max_abs(matrix).max(1.0);
            hermitian_defect(matrix) <= 1e-10 * scale
                && hermitian_eig(matrix).map(|e| e.dim() == 0 || e.min() >= -1e-10 * scale).unwrap_or(false)
        }
        E::Scale(alpha, c) => alpha.im == 0.0 && alpha.re >= 0.0 && is_positive(c),
        E::Sum(cs) => cs.iter().all(is_positive),
        _ => false,
    }
}

fn is_unitary(t: &E) -> bool {
    match t {
        E::Identity | E::Diagonal(ComplexSeqSpec::UnitModulus { .. }) => true,
        E::Scale(alpha, c) => (alpha.norm() - 1.0).abs() <= 1e-15 && is_unitary(c),
        E::Compose(cs) => cs.iter().all(is_unitary),
        E::Adjoint(c) => is_unitary(c),
        _ => false,
    }
}

/// Adjoints of isometries built from shifts, unit-modulus diagonals and the
/// identity: their kernels have the (finite) dimension of the shifts.
fn is_coisometry(t: &E) -> bool {
    matches!(t, E::Adjoint(c) if c.is_isometry())
}

/// `c` when `t = c I`.
fn identity_coefficient(t: &E) -> Option<Complex64> {
    match t {
        E::Identity => Some(Complex64::new(1.0, 0.0)),
        E::Scale(alpha, c) => identity_coefficient(c).map(|z| z * alpha),
        _ => None,
    }
}

fn real_diagonal_rule(t: &E, sequence: &SeqSpec, steps: &mut Vec<Step>) -> Outcome {
    if let Ok(form) = rewrite_lotd(t) {
        let o = classify(&form.expr(), steps);
        if o.verdict == Verdict::An {
            return Outcome::an(Rule::DecreasingDiagonal);
        }
    }
    if sequence.tends_to_zero() {
        return Outcome::an(Rule::Compact);
    }
    if let Some(m) = ComplexSeqSpec::real(sequence.clone()).modulus() {
        if m != *sequence {
            let o = classify(&E::real_diagonal(m), steps);
            if o.decided() {
                return o.relabel(Rule::PositiveRootReduction);
            }
        }
    }
    if !sequence.sup_modulus().attained {
        if let Some(ev) = fails_n_evidence(t, SubspaceSpec::whole()) {
            return Outcome::not_an(Rule::FailsN, ev);
        }
    }
    Outcome::unknown()
}

fn adjoint_rule(c: &E, steps: &mut Vec<Step>) -> Outcome {
    if c.is_isometry() {
        // the kernel of the co-isometry is the finite co-dimension of the shifts
        return Outcome::an(Rule::CoIsometryKernel);
    }
    let pushed = c.adjoint();
    if !matches!(pushed, E::Adjoint(_)) {
        return classify(&pushed, steps);
    }
    Outcome::unknown()
}

fn restrict_rule(t: &E, c: &E, m: &SubspaceSpec, steps: &mut Vec<Step>) -> Outcome {
    let o = classify(c, steps);
    if o.verdict == Verdict::An {
        return Outcome::an(Rule::RestrictionOfAn);
    }
    // a restriction that misses its own norm
    if let Ok(Some(r)) = exact_norm(t) {
        if let Attainment::NotAttained { .. } = r.attained {
            let (gap, family) = match block_family_gap(c, m, EVIDENCE_BLOCKS) {
                Ok(g) if matches!(m.kind(), SubspaceKind::BlockRepetition { .. }) => {
                    (g, Some("flat-block-vectors".to_string()))
                }
                _ => (f64::NAN, None),
            };
            let gap = if gap.is_finite() {
                gap
            } else {
                match fails_n_evidence(t, SubspaceSpec::whole()) {
                    Some(ev) => ev.gap,
                    None => return Outcome::unknown(),
                }
            };
            return Outcome::not_an(Rule::FailsN, Evidence { subspace: m.clone(), gap, family });
        }
    }
    Outcome::unknown()
}

fn compose_rule(cs: &[E], steps: &mut Vec<Step>) -> Outcome {
    let rest = |s: &[E]| if s.len() == 1 { s[0].clone() } else { E::Compose(s.to_vec()) };
    if cs.len() == 3 && is_unitary(&cs[2]) && (cs[0] == cs[2].adjoint() || cs[0] == E::adjoint_of(cs[2].clone())) {
        let o = classify(&cs[1], steps);
        if o.verdict == Verdict::An {
            return o.relabel(Rule::UnitaryEquivalence);
        }
    }
    if cs.len() >= 2 && cs[0].is_isometry() {
        // |V T x| = |T x|: both verdicts and evidence carry over
        let o = classify(&rest(&cs[1..]), steps);
        if o.decided() {
            return o.relabel(Rule::IsometryComposition);
        }
    }
    if cs.len() >= 2 && cs[cs.len() - 1].is_isometry() {
        let o = classify(&rest(&cs[..cs.len() - 1]), steps);
        if o.verdict == Verdict::An {
            return o.relabel(Rule::IsometryComposition);
        }
    }
    if cs.len() == 2 && cs.iter().all(|c| matches!(c, E::Projection(_))) {
        let both = cs.iter().all(|c| classify(c, steps).verdict == Verdict::An);
        if both {
            return Outcome::an(Rule::ProjectionAlgebra);
        }
    }
    Outcome::unknown()
}

fn sum_rule(cs: &[E], steps: &mut Vec<Step>) -> Outcome {
    let (finite, rest): (Vec<&E>, Vec<&E>) = cs.iter().partition(|c| is_finite_rank(c));
    if rest.len() == 1 && !finite.is_empty() {
        // strip a nonzero scalar: alpha X + R = alpha (X + R / alpha)
        let mut x = rest[0];
        while let E::Scale(alpha, c) = x {
            if *alpha == ZERO {
                break;
            }
            x = c;
        }
        if x.is_isometry() {
            return Outcome::an(Rule::IsometryPlusFiniteRank);
        }
        if is_coisometry(x) {
            return Outcome::an(Rule::CoIsometryOrProjectionPlusFiniteRank);
        }
        if let E::Projection(_) = x {
            if classify(x, steps).verdict == Verdict::An {
                return Outcome::an(Rule::CoIsometryOrProjectionPlusFiniteRank);
            }
        }
    }
    // K + c I (+ R)
    let mut alpha = ZERO;
    let (mut n_compact, mut n_finite) = (0, 0);
    let mut shaped = true;
    for c in cs {
        if let Some(z) = identity_coefficient(c) {
            alpha += z;
        } else if is_finite_rank(c) {
            n_finite += 1;
        } else if is_compact(c) && is_positive(c) {
            n_compact += 1;
        } else {
            shaped = false;
            break;
        }
    }
    if shaped && alpha.im == 0.0 && alpha.re > 0.0 && n_compact > 0 {
        return Outcome::an(if n_finite == 0 { Rule::CompactPlusIdentity } else { Rule::CompactIdentityFiniteRank });
    }
    if cs.len() == 2 {
        let unsigned: Vec<&E> = cs
            .iter()
            .map(|c| match c {
                E::Scale(a, inner) if *a == Complex64::new(-1.0, 0.0) => inner.as_ref(),
                other => other,
            })
            .collect();
        if unsigned.iter().all(|c| matches!(c, E::Projection(_))) {
            let both = unsigned.iter().all(|c| classify(c, steps).verdict == Verdict::An);
            if both {
                return Outcome::an(Rule::ProjectionAlgebra);
            }
        }
    }
    Outcome::unknown()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{real, CMatrix};
    use crate::vector::Vector;

    fn identity_plus_rank_two() -> E {
        let r = E::finite_rank(vec![
            (1.0, Vector::basis(1), Vector::basis(2)),
            (0.5, Vector::from_real(&[1.0, 1.0, 1.0]), Vector::basis(3)),
        ])
        .unwrap();
        E::sum(vec![E::Identity, r])
    }

    fn enan_x() -> SubspaceSpec {
        SubspaceSpec::block_repetition(vec![], vec![1, 2]).unwrap()
    }

    #[test]
    fn finite_rank_projection() {
        let m = SubspaceSpec::span(vec![Vector::basis(1), Vector::basis(2), Vector::from_real(&[0.0, 0.0, 1.0, 1.0])]).unwrap();
        let v = classify_an(&E::projection(m));
        assert_eq!(v.verdict, Verdict::An);
        assert_eq!(v.rule, Rule::ProjectionRankDichotomy);
    }

    #[test]
    fn enan_projection_gets_transversal_subspace() {
        let v = classify_an(&E::projection(enan_x()));
        assert_eq!(v.verdict, Verdict::NotAn);
        let ev = v.evidence.unwrap();
        assert_eq!(ev.subspace, SubspaceSpec::block_repetition(vec![2], vec![3]).unwrap());
        assert_eq!(ev.family.as_deref(), Some("flat-block-vectors"));
        assert!(ev.gap > 0.0 && ev.gap < 1e-2);
    }

    #[test]
    fn transversal_subspace_for_other_patterns() {
        let x = SubspaceSpec::block_repetition(vec![1, 1], vec![2, 1, 3]).unwrap();
        let v = classify_an(&E::projection(x.clone()));
        assert_eq!(v.verdict, Verdict::NotAn);
        let m = v.evidence.unwrap().subspace;
        assert_eq!(x.first_common_boundary(&m), None);
    }

    #[test]
    fn identity_plus_finite_rank() {
        let v = classify_an(&identity_plus_rank_two());
        assert_eq!(v.verdict, Verdict::An);
        assert_eq!(v.rule, Rule::IdentityPlusFiniteRank);
    }

    #[test]
    fn shift_compositions() {
        let s = E::shift(1).unwrap();
        let a = classify_an(&E::compose(vec![s.clone(), identity_plus_rank_two()]));
        let b = classify_an(&E::compose(vec![identity_plus_rank_two(), s]));
        assert_eq!((a.verdict, a.rule), (Verdict::An, Rule::IsometryComposition));
        assert_eq!((b.verdict, b.rule), (Verdict::An, Rule::IsometryComposition));
        assert!(a.derivation.iter().any(|s| s.rule == Rule::IdentityPlusFiniteRank));
    }

    #[test]
    fn backward_shift() {
        let v = classify_an(&E::shift(1).unwrap().adjoint());
        assert_eq!((v.verdict, v.rule), (Verdict::An, Rule::CoIsometryKernel));
    }

    #[test]
    fn decreasing_diagonal_chain() {
        let t = E::real_diagonal(SeqSpec::harmonic(1.0, -1.0, 1.0).unwrap());
        let v = classify_an(&t);
        assert_eq!((v.verdict, v.rule), (Verdict::An, Rule::DecreasingDiagonal));
        assert!(v.derivation.iter().any(|s| s.rule == Rule::CompactIdentityFiniteRank));
    }

    #[test]
    fn increasing_diagonal_fails() {
        let t = E::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap());
        let v = classify_an(&t);
        assert_eq!((v.verdict, v.rule), (Verdict::NotAn, Rule::FailsN));
        assert!(v.evidence.unwrap().subspace.is_whole_space());
    }

    #[test]
    fn negative_decreasing_modulus_uses_root() {
        let t = E::real_diagonal(SeqSpec::harmonic(-1.0, 1.0, 1.0).unwrap());
        let v = classify_an(&t);
        assert_eq!(v.verdict, Verdict::An);
    }

    #[test]
    fn restricted_enan_fails() {
        let m = SubspaceSpec::block_repetition(vec![2], vec![3]).unwrap();
        let v = classify_an(&E::restrict(E::projection(enan_x()), m.clone()));
        assert_eq!(v.verdict, Verdict::NotAn);
        assert_eq!(v.evidence.unwrap().subspace, m);
    }

    #[test]
    fn unitary_conjugation_and_projection_algebra() {
        let u = E::diagonal(ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(0.5, 0.5, 1.0).unwrap()).unwrap());
        let t = E::compose(vec![u.adjoint(), E::shift(2).unwrap().adjoint(), u]);
        assert_eq!(classify_an(&t).verdict, Verdict::An);
        let p1 = E::projection(SubspaceSpec::canonical_tail(3));
        let p2 = E::projection(SubspaceSpec::span(vec![Vector::basis(1)]).unwrap());
        let diff = E::sum(vec![p1.clone(), E::scale(real(-1.0), p2.clone()).unwrap()]);
        let prod = E::compose(vec![p1, p2]);
        assert_eq!(classify_an(&diff).verdict, Verdict::An);
        assert_eq!(classify_an(&prod).verdict, Verdict::An);
    }

    #[test]
    fn compact_plus_identity_plus_rank_one() {
        let k = E::real_diagonal(SeqSpec::geometric(0.0, -1.0, 0.5).unwrap());
        let r = E::finite_rank(vec![(2.0, Vector::basis(1), Vector::basis(4))]).unwrap();
        let v = classify_an(&E::sum(vec![k.clone(), E::Identity]));
        assert_eq!(v.rule, Rule::CompactPlusIdentity);
        let v = classify_an(&E::sum(vec![k, E::scale(real(2.0), E::Identity).unwrap(), r]));
        assert_eq!(v.rule, Rule::CompactIdentityFiniteRank);
    }

    #[test]
    fn dense_projection_block() {
        let half = real(0.5);
        let a = CMatrix::from_row_slice(2, 2, &[half, half, half, half]);
        let v = classify_an(&E::dense(a, Tail::Identity).unwrap());
        assert_eq!(v.rule, Rule::ProjectionRankDichotomy);
    }

    #[test]
    fn shift_plus_finite_rank() {
        let r = E::finite_rank(vec![(1.0, Vector::basis(1), Vector::basis(1))]).unwrap();
        let v = classify_an(&E::sum(vec![E::shift(1).unwrap(), r.clone()]));
        assert_eq!(v.rule, Rule::IsometryPlusFiniteRank);
        let v = classify_an(&E::sum(vec![E::shift(1).unwrap().adjoint(), r]));
        assert_eq!(v.rule, Rule::CoIsometryOrProjectionPlusFiniteRank);
    }

    #[test]
    fn rule_tags_are_kebab_case() {
        assert_eq!(Rule::CoIsometryKernel.tag(), "co-isometry-kernel");
        assert_eq!(serde_json::to_value(Verdict::NotAn).unwrap(), "NotAN");
    }
}
