//! Built-in example checks, runnable without any input files.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::an::{classify_an, enan_counterexample, rewrite_lotd, EnanCounterexample, Verdict};
use crate::attainment::{check_n, CertificateStatus};
use crate::deflation::{deflate, reconstruction_error};
use crate::error::{Error, Result};
use crate::expr::{OperatorExpr, Tail};
use crate::linalg::{real, CMatrix};
use crate::numrange::numrange_boundary;
use crate::seq::{ComplexSeqSpec, SeqSpec};
use crate::spectral::norm::{operator_norm, truncation_lower_bounds, Attainment, NonAttainment, NormOptions};
use crate::subspace::SubspaceSpec;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("enan-formula-n-1-to-100", enan_formula),
    ("enan-restriction-not-attained", enan_restriction),
    ("identity-plus-unit-diagonal", identity_plus_unit_diagonal),
    ("increasing-diagonal-not-attained", increasing_diagonal),
    ("projection-rank-dichotomy", projection_classes),
    ("an-rule-examples", an_rule_examples),
    ("decreasing-diagonal-rewrite", decreasing_diagonal_rewrite),
    ("deflation-round-trips", deflation_round_trips),
    ("nilpotent-numerical-range", nilpotent_numrange),
];

/// Run every built-in check; errors count as failures.
pub fn run_suite() -> SuiteReport {
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult { name: name.to_string(), passed, detail }
        })
        .collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    SuiteReport { failed: checks.len() - passed, passed, checks }
}

fn enan_formula() -> Result<(bool, String)> {
    let e = enan_counterexample();
    let mut worst = 0.0f64;
    for n in 1..=100 {
        if !e.unit_norm_exact(n) {
            return Ok((false, format!("s^{n} is not a unit vector")));
        }
        worst = worst.max((e.norm_sq(n)? - EnanCounterexample::norm_sq_formula(n)).abs());
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.3e}")))
}

fn enan_restriction() -> Result<(bool, String)> {
    let e = enan_counterexample();
    let cert = check_n(&e.restriction(), &NormOptions::default())?;
    let lower = e.norm_sq(1000)?.sqrt();
    let ok = matches!(cert.status, CertificateStatus::NotAttained { .. }) && cert.norm == Some(1.0) && lower >= 0.9998;
    Ok((ok, format!("status {}, norm {:?}, |P s^1000| = {lower:.6}", cert.status.tag(), cert.norm)))
}

fn identity_plus_unit_diagonal() -> Result<(bool, String)> {
    let mut detail = vec![];
    let mut ok = true;
    for a in [0.5, 1.0] {
        let seq = ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(a, a, 1.0)?)?;
        let t = OperatorExpr::sum(vec![OperatorExpr::Identity, OperatorExpr::diagonal(seq.clone())]);
        let r = operator_norm(&t, &NormOptions::default())?;
        let expected = (2.0 * (1.0 + a)).sqrt();
        let exact = r.exact.unwrap_or(f64::NAN);
        let bounds = truncation_lower_bounds(&t, &[1, 2, 4, 8, 16, 32])?;
        let increasing = bounds.windows(2).all(|w| w[1] > w[0]) && bounds.iter().all(|b| *b < exact);
        ok &= (exact - expected).abs() <= 1e-12
            && r.attained == Attainment::NotAttained { reason: NonAttainment::StrictQuadraticGap }
            && increasing;
        detail.push(format!("a={a}: norm {exact:.15} ({})", r.attained.tag()));
    }
    Ok((ok, detail.join("; ")))
}

fn increasing_diagonal() -> Result<(bool, String)> {
    let t = OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0)?);
    let cert = check_n(&t, &NormOptions::default())?;
    let refused = matches!(rewrite_lotd(&t), Err(Error::NotLotdShape(_)));
    let ok = matches!(cert.status, CertificateStatus::NotAttained { rule: NonAttainment::StrictlyMonotoneDiagonal })
        && cert.norm == Some(1.0)
        && refused;
    Ok((ok, format!("status {}, decreasing-diagonal rewrite refused: {refused}", cert.status.tag())))
}

fn projection_classes() -> Result<(bool, String)> {
    let finite = SubspaceSpec::span((1..=3).map(Vector::basis).collect())?;
    let cofinite = SubspaceSpec::complement(vec![Vector::from_real(&[1.0, 1.0])])?;
    let cases = [
        (OperatorExpr::projection(finite), Verdict::An),
        (OperatorExpr::projection(cofinite), Verdict::An),
        (OperatorExpr::projection(SubspaceSpec::canonical_tail(2)), Verdict::An),
        (enan_counterexample().p, Verdict::NotAn),
    ];
    verdict_table(&cases)
}

fn an_rule_examples() -> Result<(bool, String)> {
    let r = OperatorExpr::finite_rank(vec![
        (1.0, Vector::basis(1), Vector::basis(2)),
        (0.5, Vector::from_real(&[1.0, 0.0, -1.0]), Vector::basis(3)),
    ])?;
    let i_plus_r = OperatorExpr::sum(vec![OperatorExpr::Identity, r]);
    let s = OperatorExpr::shift(1)?;
    let cases = [
        (i_plus_r.clone(), Verdict::An),
        (OperatorExpr::compose(vec![s.clone(), i_plus_r.clone()]), Verdict::An),
        (OperatorExpr::compose(vec![i_plus_r, s.clone()]), Verdict::An),
        (s.adjoint(), Verdict::An),
        (OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, -1.0, 1.0)?), Verdict::An),
        (OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0)?), Verdict::NotAn),
    ];
    verdict_table(&cases)
}

fn verdict_table(cases: &[(OperatorExpr, Verdict)]) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = vec![];
    for (t, expected) in cases {
        let v = classify_an(t);
        ok &= v.verdict == *expected;
        detail.push(format!("{} -> {} ({})", t.kind_name(), v.verdict.tag(), v.rule.tag()));
    }
    Ok((ok, detail.join("; ")))
}

fn decreasing_diagonal_rewrite() -> Result<(bool, String)> {
    let t = OperatorExpr::real_diagonal(SeqSpec::geometric(2.0, -1.0, 0.5)?);
    let f = rewrite_lotd(&t)?;
    let e = f.expr();
    let mut worst = 0.0f64;
    for j in 1..=50 {
        let x = Vector::basis(j).add(&Vector::basis(j + 1).scale(real(-0.25)));
        worst = worst.max(e.apply(&x)?.sub(&t.apply(&x)?).norm());
    }
    Ok((f.lambda == 2.0 && worst <= 1e-12, format!("lambda {}, max deviation {worst:.3e}", f.lambda)))
}

fn deflation_round_trips() -> Result<(bool, String)> {
    let diag = OperatorExpr::real_diagonal(SeqSpec::explicit_then_zero(vec![3.0, 2.0, 1.0])?);
    let d = deflate(&diag, 3, 3, 1e-10)?;
    let mut ok = d.betas == vec![3.0, 2.0, 1.0] && d.residual_norm() == 0.0;
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let t = OperatorExpr::dense(random_psd(20, seed), Tail::Zero)?;
        let dec = deflate(&t, 20, 20, 1e-10)?;
        let err = reconstruction_error(&t, &dec, 20)?;
        worst = worst.max(err);
        ok &= dec.betas.windows(2).all(|w| w[1] <= w[0])
            && dec.orthonormality_residual() <= 1e-10
            && dec.residual_norm() <= dec.betas.last().copied().unwrap_or(0.0) + 1e-9;
    }
    ok &= worst <= 1e-9;
    Ok((ok, format!("diag(3,2,1) exact; PSD 20x20 max reconstruction error {worst:.3e}")))
}

fn nilpotent_numrange() -> Result<(bool, String)> {
    let a = CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]);
    let t = OperatorExpr::dense(a, Tail::Zero)?;
    let b = numrange_boundary(&t, 2, 72)?;
    let worst = b.points.iter().map(|p| (p.point.norm() - 0.5).abs()).fold(0.0, f64::max);
    Ok((worst <= 1e-12, format!("max |radius - 1/2| {worst:.3e}")))
}

/// `B B^* / n` for a seeded complex Gaussian `B`.
pub fn random_psd(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let a = &b * b.adjoint() / real(n as f64);
    (&a + a.adjoint()) * real(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_check_passes() {
        let r = run_suite();
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(r.passed, CHECKS.len());
    }
}
