//! Rewriting `diag(lambda_j)` with `lambda_j` decreasing to `lambda > 0` as
//! `lambda (K / lambda + I - R)`, `K` positive compact and `R` the projection
//! onto the (finite) kernel.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::OperatorExpr;
use crate::linalg::real;
use crate::seq::{ComplexSeqSpec, SeqSpec};
use crate::subspace::SubspaceSpec;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LotdForm {
    pub lambda: f64,
    /// Coefficients `lambda_j - lambda` (zero on the kernel).
    pub k: SeqSpec,
    /// Kernel indices; `R` projects onto their span.
    pub kernel: Vec<usize>,
}

impl LotdForm {
    pub fn compact_part(&self) -> OperatorExpr {
        OperatorExpr::real_diagonal(self.k.clone())
    }

    pub fn kernel_projection(&self) -> OperatorExpr {
        if self.kernel.is_empty() {
            return OperatorExpr::zero();
        }
        let span = SubspaceSpec::span(self.kernel.iter().map(|&j| Vector::basis(j)).collect()).expect("distinct basis vectors");
        OperatorExpr::projection(span)
    }

    /// `lambda (K / lambda + I - R)`.
    pub fn expr(&self) -> OperatorExpr {
        let inner = OperatorExpr::sum(vec![
            OperatorExpr::Scale(real(1.0 / self.lambda), Box::new(self.compact_part())),
            OperatorExpr::Identity,
            OperatorExpr::Scale(real(-1.0), Box::new(self.kernel_projection())),
        ]);
        OperatorExpr::Scale(real(self.lambda), Box::new(inner))
    }
}

pub fn rewrite_lotd(t: &OperatorExpr) -> Result<LotdForm> {
    let seq = match t {
        OperatorExpr::Diagonal(ComplexSeqSpec::Real { sequence }) => sequence,
        other => return Err(Error::NotLotdShape(format!("expected a real diagonal, got {}", other.kind_name()))),
    };
    match seq {
        SeqSpec::ExplicitThenConstant { values, tail } if *tail > 0.0 => {
            let nonzero: Vec<f64> = values.iter().copied().filter(|v| *v != 0.0).collect();
            if nonzero.iter().any(|v| *v < *tail) || nonzero.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::NotLotdShape("nonzero values must decrease to the tail".into()));
            }
            let k_values = values.iter().map(|v| if *v == 0.0 { 0.0 } else { v - tail }).collect();
            let kernel = values.iter().enumerate().filter(|(_, v)| **v == 0.0).map(|(i, _)| i + 1).collect();
            Ok(LotdForm { lambda: *tail, k: SeqSpec::ExplicitThenZero { values: k_values }, kernel })
        }
        SeqSpec::Harmonic { limit, coeff, .. } | SeqSpec::Geometric { limit, coeff, .. } if *coeff <= 0.0 && *limit > 0.0 => {
            Ok(LotdForm { lambda: *limit, k: seq.affine(-limit, 1.0), kernel: vec![] })
        }
        _ => Err(Error::NotLotdShape("sequence does not decrease to a positive limit".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_rewrite(t: &OperatorExpr) {
        let f = rewrite_lotd(t).unwrap();
        let e = f.expr();
        for j in 1..40 {
            let x = Vector::basis(j).add(&Vector::basis(j + 3).scale(real(0.5)));
            let d = e.apply(&x).unwrap().sub(&t.apply(&x).unwrap()).norm();
            assert!(d < 1e-12, "mismatch {d} at {j}");
        }
    }

    #[test]
    fn explicit_then_constant() {
        let t = OperatorExpr::real_diagonal(SeqSpec::explicit_then_constant(vec![3.0, 2.0], 1.0).unwrap());
        let f = rewrite_lotd(&t).unwrap();
        assert_eq!(f.lambda, 1.0);
        assert_eq!(f.k, SeqSpec::ExplicitThenZero { values: vec![2.0, 1.0] });
        assert!(f.kernel.is_empty());
        check_rewrite(&t);
    }

    #[test]
    fn kernel_becomes_projection() {
        let t = OperatorExpr::real_diagonal(SeqSpec::explicit_then_constant(vec![3.0, 0.0, 2.0], 1.0).unwrap());
        let f = rewrite_lotd(&t).unwrap();
        assert_eq!(f.kernel, vec![2]);
        check_rewrite(&t);
    }

    #[test]
    fn geometric_decrease() {
        let t = OperatorExpr::real_diagonal(SeqSpec::geometric(2.0, -1.0, 0.5).unwrap());
        let f = rewrite_lotd(&t).unwrap();
        assert_eq!(f.lambda, 2.0);
        for j in 1..10 {
            assert!((f.k.eval(j) - 0.5f64.powi(j as i32)).abs() < 1e-15);
        }
        check_rewrite(&t);
        check_rewrite(&OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, -1.0, 1.0).unwrap()));
    }

    #[test]
    fn increasing_is_refused() {
        let t = OperatorExpr::real_diagonal(SeqSpec::harmonic(1.0, 1.0, 1.0).unwrap());
        assert!(matches!(rewrite_lotd(&t), Err(Error::NotLotdShape(_))));
        let t = OperatorExpr::real_diagonal(SeqSpec::explicit_then_constant(vec![1.0, 3.0], 1.0).unwrap());
        assert!(matches!(rewrite_lotd(&t), Err(Error::NotLotdShape(_))));
        assert!(matches!(rewrite_lotd(&OperatorExpr::Identity), Err(Error::NotLotdShape(_))));
    }
}
