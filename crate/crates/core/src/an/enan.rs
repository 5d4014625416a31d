//! A projection that attains its norm but is not AN.
//!
//! `X` is the block-repetition subspace with period `[1, 2]` and `M` the one
//! with prefix `[2]`, period `[3]`. The two share no block boundary, so
//! `M ∩ X = {0}` and `P_X|_M` cannot attain its norm 1, while flat vectors
//! `s^n` over the first `n` blocks of `M` push `|P s^n|` towards 1.

use serde::Serialize;

use crate::error::Result;
use crate::expr::OperatorExpr;
use crate::spectral::norm::{operator_norm, NormOptions};
use crate::subspace::SubspaceSpec;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnanCounterexample {
    pub p: OperatorExpr,
    pub x: SubspaceSpec,
    pub m: SubspaceSpec,
}

pub fn enan_counterexample() -> EnanCounterexample {
    let x = SubspaceSpec::block_repetition(vec![], vec![1, 2]).expect("valid pattern");
    let m = SubspaceSpec::block_repetition(vec![2], vec![3]).expect("valid pattern");
    EnanCounterexample { p: OperatorExpr::projection(x.clone()), x, m }
}

impl EnanCounterexample {
    /// Number of coordinates covered by the first `n` blocks of `M`.
    pub fn support_len(n: usize) -> usize {
        3 * (n - 1) + 2
    }

    /// `s^n` in the coordinates of `M` (one unit vector per block).
    pub fn s_coords(&self, n: usize) -> Vector {
        self.m.flat_block_vector(n)
    }

    /// `s^n` in `l^2`: `1 / sqrt(3(n-1)+2)` on the first `3(n-1)+2` indices.
    pub fn s(&self, n: usize) -> Vector {
        self.m.embed(&self.s_coords(n)).expect("coordinates within M")
    }

    /// `|s^n|^2 = 1` in exact arithmetic: the squared entries are all
    /// `1 / L` and there are exactly `L` of them.
    pub fn unit_norm_exact(&self, n: usize) -> bool {
        let covered: usize = (1..=n).map(|k| self.m.block_size(k)).sum();
        covered == Self::support_len(n)
    }

    /// `|P s^n|^2 = 2/3 + (6n - 5) / (6 (3(n-1) + 2))`.
    pub fn norm_sq_formula(n: usize) -> f64 {
        let l = Self::support_len(n) as f64;
        2.0 / 3.0 + (6.0 * n as f64 - 5.0) / (6.0 * l)
    }

    /// `|P s^n|^2` by applying `P`.
    pub fn norm_sq(&self, n: usize) -> Result<f64> {
        Ok(self.p.apply(&self.s(n))?.norm_sqr())
    }

    /// `P|_M` as an expression.
    pub fn restriction(&self) -> OperatorExpr {
        OperatorExpr::restrict(self.p.clone(), self.m.clone())
    }
}

/// `|T|_M| - |T V_M f_n|` for the flat block vector `f_n` of `M`.
pub fn block_family_gap(t: &OperatorExpr, m: &SubspaceSpec, n: usize) -> Result<f64> {
    let restricted = OperatorExpr::restrict(t.clone(), m.clone());
    let norm = operator_norm(&restricted, &NormOptions::with_max_dim(64))?.value();
    let x = m.embed(&m.flat_block_vector(n))?;
    Ok(norm - t.apply(&x)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_terms() {
        let e = enan_counterexample();
        assert!((e.norm_sq(1).unwrap() - 0.75).abs() < 1e-15);
        assert!((e.norm_sq(2).unwrap() - 0.9).abs() < 1e-15);
        assert!((EnanCounterexample::norm_sq_formula(2) - (2.0 / 3.0 + 7.0 / 30.0)).abs() < 1e-15);
    }

    #[test]
    fn s_is_flat_on_its_support() {
        let e = enan_counterexample();
        let s = e.s(3);
        assert_eq!(s.support_max(), 8);
        assert_eq!(s.nnz(), 8);
        for (_, z) in s.iter() {
            assert!((z.re - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        }
        assert!(e.unit_norm_exact(3));
    }

    #[test]
    fn gap_shrinks_along_the_family() {
        let e = enan_counterexample();
        let g1 = block_family_gap(&e.p, &e.m, 1).unwrap();
        let g10 = block_family_gap(&e.p, &e.m, 10).unwrap();
        assert!((g1 - (1.0 - 0.75f64.sqrt())).abs() < 1e-12);
        assert!(g10 < g1 && g10 > 0.0);
    }
}
