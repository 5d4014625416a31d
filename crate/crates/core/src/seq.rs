//! Closed-form coefficient sequences with decidable supremum and attainment.
//!
//! Every family is indexed from `j = 1`. The two infinite families are
//! monotone: `limit - coeff * g(j)` with `g` strictly decreasing to zero, so
//! the supremum and infimum are always either the first term or the limit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// A real coefficient sequence `(s_j)_{j >= 1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeqSpec {
    ExplicitThenZero { values: Vec<f64> },
    ExplicitThenConstant { values: Vec<f64>, tail: f64 },
    /// `limit - coeff / (j + offset)`, `offset > 0`.
    Harmonic { limit: f64, coeff: f64, offset: f64 },
    /// `limit - coeff * ratio^j`, `0 < ratio < 1`.
    Geometric { limit: f64, coeff: f64, ratio: f64 },
}

/// Extremum of a sequence: its value, and the first index attaining it if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub attained: bool,
    pub witness_index: Option<usize>,
}

impl Extremum {
    fn at(value: f64, index: usize) -> Self {
        Extremum { value, attained: true, witness_index: Some(index) }
    }

    fn limit(value: f64) -> Self {
        Extremum { value, attained: false, witness_index: None }
    }
}

fn check_finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

impl SeqSpec {
    pub fn explicit_then_zero(values: Vec<f64>) -> Result<Self> {
        values.iter().try_for_each(|&v| check_finite("explicit value", v))?;
        Ok(SeqSpec::ExplicitThenZero { values })
    }

    pub fn explicit_then_constant(values: Vec<f64>, tail: f64) -> Result<Self> {
        values.iter().try_for_each(|&v| check_finite("explicit value", v))?;
        check_finite("tail", tail)?;
        Ok(SeqSpec::ExplicitThenConstant { values, tail })
    }

    pub fn harmonic(limit: f64, coeff: f64, offset: f64) -> Result<Self> {
        check_finite("harmonic limit", limit)?;
        check_finite("harmonic coeff", coeff)?;
        check_finite("harmonic offset", offset)?;
        if offset <= 0.0 {
            return Err(Error::InvariantViolation(format!("harmonic offset must be > 0, got {offset}")));
        }
        Ok(SeqSpec::Harmonic { limit, coeff, offset })
    }

    pub fn geometric(limit: f64, coeff: f64, ratio: f64) -> Result<Self> {
        check_finite("geometric limit", limit)?;
        check_finite("geometric coeff", coeff)?;
        check_finite("geometric ratio", ratio)?;
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvariantViolation(format!("geometric ratio must lie in (0,1), got {ratio}")));
        }
        Ok(SeqSpec::Geometric { limit, coeff, ratio })
    }

    /// Re-check the construction invariants (used after deserialisation).
    pub fn validate(&self) -> Result<()> {
        match self {
            SeqSpec::ExplicitThenZero { values } => Self::explicit_then_zero(values.clone()).map(|_| ()),
            SeqSpec::ExplicitThenConstant { values, tail } => {
                Self::explicit_then_constant(values.clone(), *tail).map(|_| ())
            }
            SeqSpec::Harmonic { limit, coeff, offset } => Self::harmonic(*limit, *coeff, *offset).map(|_| ()),
            SeqSpec::Geometric { limit, coeff, ratio } => Self::geometric(*limit, *coeff, *ratio).map(|_| ()),
        }
    }

    /// `s_j` for `j >= 1`.
    pub fn eval(&self, j: usize) -> f64 {
        assert!(j >= 1, "sequences are indexed from 1");
        match self {
            SeqSpec::ExplicitThenZero { values } => values.get(j - 1).copied().unwrap_or(0.0),
            SeqSpec::ExplicitThenConstant { values, tail } => values.get(j - 1).copied().unwrap_or(*tail),
            SeqSpec::Harmonic { limit, coeff, offset } => limit - coeff / (j as f64 + offset),
            SeqSpec::Geometric { limit, coeff, ratio } => limit - coeff * ratio.powi(j as i32),
        }
    }

    /// The value the sequence converges to.
    pub fn limit(&self) -> f64 {
        match self {
            SeqSpec::ExplicitThenZero { .. } => 0.0,
            SeqSpec::ExplicitThenConstant { tail, .. } => *tail,
            SeqSpec::Harmonic { limit, .. } | SeqSpec::Geometric { limit, .. } => *limit,
        }
    }

    fn explicit_parts(&self) -> Option<(&[f64], f64)> {
        match self {
            SeqSpec::ExplicitThenZero { values } => Some((values, 0.0)),
            SeqSpec::ExplicitThenConstant { values, tail } => Some((values, *tail)),
            _ => None,
        }
    }

    fn monotone_coeff(&self) -> Option<f64> {
        match self {
            SeqSpec::Harmonic { coeff, .. } | SeqSpec::Geometric { coeff, .. } => Some(*coeff),
            _ => None,
        }
    }

    /// Supremum (`maximise`) or infimum of `s_j`; ties go to the smallest index.
    fn extremum_by(&self, maximise: bool) -> Extremum {
        if let Some((values, tail)) = self.explicit_parts() {
            let mut best = Extremum::at(tail, values.len() + 1);
            // scan explicit values first so the smallest index wins ties
            for (i, &v) in values.iter().enumerate().rev() {
                let better = if maximise { v >= best.value } else { v <= best.value };
                if better {
                    best = Extremum::at(v, i + 1);
                }
            }
            return best;
        }
        let coeff = self.monotone_coeff().expect("monotone family");
        let first = self.eval(1);
        let limit = self.limit();
        // coeff > 0: increasing to limit; coeff < 0: decreasing to limit
        let limit_side = if maximise { coeff > 0.0 } else { coeff < 0.0 };
        if limit_side {
            Extremum::limit(limit)
        } else {
            Extremum::at(first, 1)
        }
    }

    /// Supremum of `s_j` with attainment.
    pub fn sup_value(&self) -> Extremum {
        self.extremum_by(true)
    }

    /// Infimum of `s_j` with attainment.
    pub fn inf_value(&self) -> Extremum {
        self.extremum_by(false)
    }

    /// `sup_j |s_j|` with attainment and the first witness index.
    pub fn sup_modulus(&self) -> Extremum {
        if let Some((values, tail)) = self.explicit_parts() {
            let mut best = Extremum::at(tail.abs(), values.len() + 1);
            for (i, &v) in values.iter().enumerate().rev() {
                if v.abs() >= best.value {
                    best = Extremum::at(v.abs(), i + 1);
                }
            }
            return best;
        }
        let sup = self.sup_value();
        let inf = self.inf_value();
        let (a, b) = (
            Extremum { value: sup.value.abs(), ..sup },
            Extremum { value: inf.value.abs(), ..inf },
        );
        if a.value > b.value {
            a
        } else if b.value > a.value {
            b
        } else if a.attained {
            a
        } else {
            b
        }
    }

    /// The sequence `alpha + beta * s_j`, kept inside the same family.
    pub fn affine(&self, alpha: f64, beta: f64) -> SeqSpec {
        match self {
            SeqSpec::ExplicitThenZero { values } => {
                let values = values.iter().map(|v| alpha + beta * v).collect();
                if alpha == 0.0 {
                    SeqSpec::ExplicitThenZero { values }
                } else {
                    SeqSpec::ExplicitThenConstant { values, tail: alpha }
                }
            }
            SeqSpec::ExplicitThenConstant { values, tail } => SeqSpec::ExplicitThenConstant {
                values: values.iter().map(|v| alpha + beta * v).collect(),
                tail: alpha + beta * tail,
            },
            SeqSpec::Harmonic { limit, coeff, offset } => SeqSpec::Harmonic {
                limit: alpha + beta * limit,
                coeff: beta * coeff,
                offset: *offset,
            },
            SeqSpec::Geometric { limit, coeff, ratio } => SeqSpec::Geometric {
                limit: alpha + beta * limit,
                coeff: beta * coeff,
                ratio: *ratio,
            },
        }
    }

    /// The tail sequence `j -> s_{j + k}`.
    pub fn shift_index(&self, k: usize) -> SeqSpec {
        match self {
            SeqSpec::ExplicitThenZero { values } => SeqSpec::ExplicitThenZero {
                values: values.iter().skip(k).copied().collect(),
            },
            SeqSpec::ExplicitThenConstant { values, tail } => SeqSpec::ExplicitThenConstant {
                values: values.iter().skip(k).copied().collect(),
                tail: *tail,
            },
            SeqSpec::Harmonic { limit, coeff, offset } => SeqSpec::Harmonic {
                limit: *limit,
                coeff: *coeff,
                offset: offset + k as f64,
            },
            SeqSpec::Geometric { limit, coeff, ratio } => SeqSpec::Geometric {
                limit: *limit,
                coeff: coeff * ratio.powi(k as i32),
                ratio: *ratio,
            },
        }
    }

    /// Indices `j` with `s_j == 0`; `None` when there are infinitely many.
    pub fn zero_indices(&self) -> Option<Vec<usize>> {
        match self.explicit_parts() {
            Some((values, tail)) => {
                if tail == 0.0 {
                    None
                } else {
                    Some(values.iter().enumerate().filter(|(_, v)| **v == 0.0).map(|(i, _)| i + 1).collect())
                }
            }
            None => {
                let coeff = self.monotone_coeff().unwrap();
                if coeff == 0.0 {
                    if self.limit() == 0.0 {
                        None
                    } else {
                        Some(vec![])
                    }
                } else {
                    // strictly monotone: at most one zero; scan until values are beyond it
                    let mut zeros = vec![];
                    let limit = self.limit();
                    let mut j = 1;
                    loop {
                        let v = self.eval(j);
                        if v == 0.0 {
                            zeros.push(j);
                        }
                        let past = if coeff > 0.0 { v > 0.0 || limit <= 0.0 } else { v < 0.0 || limit >= 0.0 };
                        if past || j > 100_000 {
                            break;
                        }
                        j += 1;
                    }
                    Some(zeros)
                }
            }
        }
    }

    /// Number of indices `j` with `|s_j| >= threshold`, or `None` if infinite.
    pub fn count_modulus_at_least(&self, threshold: f64) -> Option<usize> {
        if let Some((values, tail)) = self.explicit_parts() {
            if tail.abs() >= threshold {
                return None;
            }
            return Some(values.iter().filter(|v| v.abs() >= threshold).count());
        }
        let limit = self.limit();
        if limit.abs() > threshold {
            return None;
        }
        if limit.abs() == threshold {
            // s_j - limit = -coeff g(j): terms from the far side of the limit stay at or above it
            let coeff = self.monotone_coeff().unwrap();
            if coeff == 0.0 || -coeff * limit > 0.0 {
                return None;
            }
        }
        // monotone with |limit| <= threshold: the qualifying indices form a prefix
        let mut last = 0;
        let mut j = 1;
        while j <= 1_000_000 {
            if self.eval(j).abs() >= threshold {
                last = j;
            } else if j > last + 1 && self.sign_settled(j) {
                break;
            }
            j += 1;
        }
        Some(last)
    }

    fn sign_settled(&self, j: usize) -> bool {
        let v = self.eval(j);
        let l = self.limit();
        v == 0.0 || l == 0.0 || v.signum() == l.signum()
    }

    /// True if the sequence tends to zero.
    pub fn tends_to_zero(&self) -> bool {
        self.limit() == 0.0
    }
}

/// A complex coefficient sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComplexSeqSpec {
    Real { sequence: SeqSpec },
    /// `a_j + i sqrt(1 - a_j^2)`, or its conjugate when `conjugate` is set.
    UnitModulus { real_part: SeqSpec, conjugate: bool },
}

impl ComplexSeqSpec {
    pub fn real(sequence: SeqSpec) -> Self {
        ComplexSeqSpec::Real { sequence }
    }

    pub fn unit_modulus(real_part: SeqSpec) -> Result<Self> {
        let sup = real_part.sup_value().value;
        let inf = real_part.inf_value().value;
        if sup > 1.0 || inf < -1.0 {
            return Err(Error::InvariantViolation(format!(
                "unit-modulus real part must stay in [-1, 1], got range [{inf}, {sup}]"
            )));
        }
        Ok(ComplexSeqSpec::UnitModulus { real_part, conjugate: false })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ComplexSeqSpec::Real { sequence } => sequence.validate(),
            ComplexSeqSpec::UnitModulus { real_part, .. } => {
                real_part.validate()?;
                Self::unit_modulus(real_part.clone()).map(|_| ())
            }
        }
    }

    pub fn eval(&self, j: usize) -> Complex64 {
        match self {
            ComplexSeqSpec::Real { sequence } => Complex64::new(sequence.eval(j), 0.0),
            ComplexSeqSpec::UnitModulus { real_part, conjugate } => {
                let a = real_part.eval(j);
                let b = (1.0 - a * a).max(0.0).sqrt();
                Complex64::new(a, if *conjugate { -b } else { b })
            }
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ComplexSeqSpec::Real { .. } => self.clone(),
            ComplexSeqSpec::UnitModulus { real_part, conjugate } => ComplexSeqSpec::UnitModulus {
                real_part: real_part.clone(),
                conjugate: !conjugate,
            },
        }
    }

    pub fn shift_index(&self, k: usize) -> Self {
        match self {
            ComplexSeqSpec::Real { sequence } => ComplexSeqSpec::Real { sequence: sequence.shift_index(k) },
            ComplexSeqSpec::UnitModulus { real_part, conjugate } => ComplexSeqSpec::UnitModulus {
                real_part: real_part.shift_index(k),
                conjugate: *conjugate,
            },
        }
    }

    pub fn sup_modulus(&self) -> Extremum {
        match self {
            ComplexSeqSpec::Real { sequence } => sequence.sup_modulus(),
            ComplexSeqSpec::UnitModulus { .. } => Extremum::at(1.0, 1),
        }
    }

    /// `sup_j |alpha + beta * lambda_j|` for real `alpha`, `beta`.
    ///
    /// For unit-modulus entries `|alpha + beta lambda_j|^2 = alpha^2 + beta^2
    /// + 2 alpha beta a_j` is monotone in `a_j`, so the extremum follows the
    /// supremum or infimum of the real part.
    pub fn sup_affine_modulus(&self, alpha: f64, beta: f64) -> Extremum {
        match self {
            ComplexSeqSpec::Real { sequence } => sequence.affine(alpha, beta).sup_modulus(),
            ComplexSeqSpec::UnitModulus { real_part, .. } => {
                let cross = alpha * beta;
                let base = alpha * alpha + beta * beta;
                let ext = if cross > 0.0 {
                    real_part.sup_value()
                } else if cross < 0.0 {
                    real_part.inf_value()
                } else {
                    return Extremum::at(base.sqrt(), 1);
                };
                let value = (base + 2.0 * cross * ext.value).max(0.0).sqrt();
                Extremum { value, ..ext }
            }
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, ComplexSeqSpec::Real { .. })
    }

    /// The sequence `|lambda_j|` when it stays inside a closed-form family.
    pub fn modulus(&self) -> Option<SeqSpec> {
        match self {
            ComplexSeqSpec::UnitModulus { .. } => Some(SeqSpec::ExplicitThenConstant { values: vec![], tail: 1.0 }),
            ComplexSeqSpec::Real { sequence } => {
                let inf = sequence.inf_value().value;
                let sup = sequence.sup_value().value;
                if inf >= 0.0 {
                    Some(sequence.clone())
                } else if sup <= 0.0 {
                    Some(sequence.affine(0.0, -1.0))
                } else {
                    match sequence {
                        SeqSpec::ExplicitThenZero { values } => Some(SeqSpec::ExplicitThenZero {
                            values: values.iter().map(|v| v.abs()).collect(),
                        }),
                        SeqSpec::ExplicitThenConstant { values, tail } => Some(SeqSpec::ExplicitThenConstant {
                            values: values.iter().map(|v| v.abs()).collect(),
                            tail: tail.abs(),
                        }),
                        _ => None,
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_eval_and_sup() {
        let s = SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.eval(1), 0.5);
        assert!((s.eval(2) - 2.0 / 3.0).abs() < 1e-15);
        let sup = s.sup_modulus();
        assert_eq!(sup.value, 1.0);
        assert!(!sup.attained);
        assert_eq!(sup.witness_index, None);
    }

    #[test]
    fn decreasing_harmonic_attains_at_first_index() {
        let s = SeqSpec::harmonic(1.0, -1.0, 1.0).unwrap();
        let sup = s.sup_modulus();
        assert_eq!(sup.value, 1.5);
        assert_eq!(sup.witness_index, Some(1));
    }

    #[test]
    fn sign_change_uses_first_term() {
        // 1 - 10/(j+1): first term -4 dominates the limit 1
        let s = SeqSpec::harmonic(1.0, 10.0, 1.0).unwrap();
        let sup = s.sup_modulus();
        assert_eq!(sup.value, 4.0);
        assert_eq!(sup.witness_index, Some(1));
    }

    #[test]
    fn explicit_families() {
        let s = SeqSpec::explicit_then_zero(vec![3.0, -5.0, 1.0]).unwrap();
        assert_eq!(s.sup_modulus(), Extremum::at(5.0, 2));
        let c = SeqSpec::explicit_then_constant(vec![0.5], 2.0).unwrap();
        assert_eq!(c.sup_modulus(), Extremum::at(2.0, 2));
        assert_eq!(c.eval(7), 2.0);
    }

    #[test]
    fn geometric_invariants() {
        assert!(matches!(SeqSpec::geometric(0.0, 1.0, 1.5), Err(Error::InvariantViolation(_))));
        let g = SeqSpec::geometric(2.0, -1.0, 0.5).unwrap();
        assert_eq!(g.eval(1), 2.5);
        assert_eq!(g.eval(3), 2.125);
        assert_eq!(g.shift_index(2).eval(1), g.eval(3));
    }

    #[test]
    fn unit_modulus_has_modulus_one() {
        let s = ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap()).unwrap();
        for j in 1..50 {
            assert!((s.eval(j).norm() - 1.0).abs() < 1e-15);
        }
        assert!(ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(2.0, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn affine_modulus_of_identity_plus_unit_diagonal() {
        // |1 + lambda_j| = sqrt(2 (1 + a_j)), sup = sqrt(2 (1 + a)) = 2 for a = 1
        let s = ComplexSeqSpec::unit_modulus(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap()).unwrap();
        let e = s.sup_affine_modulus(1.0, 1.0);
        assert!((e.value - 2.0).abs() < 1e-15);
        assert!(!e.attained);
        assert!(((Complex64::new(1.0, 0.0) + s.eval(1)).norm() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn counting_large_terms() {
        let s = SeqSpec::harmonic(1.0, 10.0, 1.0).unwrap();
        // values -4, -2.33, -1.5, -1, -0.67, ...: |s_j| >= 1 exactly for j <= 4
        assert_eq!(s.count_modulus_at_least(1.0), Some(4));
        assert_eq!(SeqSpec::harmonic(1.0, -1.0, 1.0).unwrap().count_modulus_at_least(1.0), None);
    }
}
