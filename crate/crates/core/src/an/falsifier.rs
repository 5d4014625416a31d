//! Random finite-dimensional restrictions as a falsifier for AN verdicts.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::OperatorExpr;
use crate::linalg::{CMatrix, CVector};
use crate::spectral::norm::top_singular_value;
use crate::subspace::SubspaceSpec;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsifierReport {
    /// Largest `|T|_M| - |T x|` over the trials, with `x` the computed
    /// maximiser inside `M`.
    pub worst_gap: f64,
    pub worst_subspace: SubspaceSpec,
    pub trials: usize,
}

/// Draw `trials` random subspaces of `span{e_1..e_d}` (dimension between 1
/// and `d/2`) and measure how far the compressed maximiser falls short of
/// the restriction norm under the full operator. Trial `i` uses the seed
/// `seed + i`.
pub fn sample_subspace_restrictions(t: &OperatorExpr, d: usize, trials: usize, seed: u64) -> Result<FalsifierReport> {
    if trials == 0 || d == 0 {
        return Err(Error::InvalidArgument("need at least one trial and d >= 1".into()));
    }
    let images = image_matrix(t, d)?;
    let d = images.ncols();
    let mut worst: Option<(f64, SubspaceSpec)> = None;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let k = if d <= 1 { 1 } else { 1 + (rand::Rng::random_range(&mut rng, 0..(d / 2).max(1))) };
        let q = random_orthonormal(&mut rng, d, k);
        let b = &images * &q;
        let (sigma, u) = top_singular_value(&b)?;
        let x = &q * &u;
        let achieved = (&images * &x).norm();
        let gap = (sigma - achieved).max(0.0);
        if worst.as_ref().is_none_or(|(g, _)| gap > *g) {
            let basis = (0..q.ncols()).map(|j| Vector::from_dvector(&q.column(j).into_owned())).collect();
            worst = Some((gap, SubspaceSpec::span(basis)?));
        }
    }
    let (worst_gap, worst_subspace) = worst.expect("at least one trial");
    Ok(FalsifierReport { worst_gap, worst_subspace, trials })
}

/// Columns `T e_1 .. T e_d` as a dense matrix over their joint support.
fn image_matrix(t: &OperatorExpr, d: usize) -> Result<CMatrix> {
    match t.columns(d) {
        Ok(cols) => {
            let rows = cols.iter().map(Vector::support_max).max().unwrap_or(0).max(d);
            let dense: Vec<CVector> = cols.iter().map(|c| c.to_dvector(rows)).collect();
            Ok(CMatrix::from_columns(&dense))
        }
        Err(Error::UnboundedSupport(_)) => t.truncate(d),
        Err(e) => Err(e),
    }
}

/// `k` orthonormal columns from complex Gaussian draws, by modified
/// Gram-Schmidt; degenerate draws are replaced.
fn random_orthonormal(rng: &mut ChaCha8Rng, d: usize, k: usize) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v = DVector::from_fn(d, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        });
        for u in &cols {
            let p = u.dotc(&v);
            v -= u * p;
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v / Complex64::new(n, 0.0));
        }
    }
    CMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Tail;

    #[test]
    fn identity_never_gaps() {
        for seed in [0, 7, 99] {
            let r = sample_subspace_restrictions(&OperatorExpr::Identity, 16, 20, seed).unwrap();
            assert!(r.worst_gap <= 1e-12);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = CMatrix::from_fn(8, 8, |i, j| Complex64::new((i * 3 + j) as f64 % 5.0, (i + 2 * j) as f64 % 3.0));
        let t = OperatorExpr::dense(a, Tail::Zero).unwrap();
        let r1 = sample_subspace_restrictions(&t, 8, 30, 42).unwrap();
        let r2 = sample_subspace_restrictions(&t, 8, 30, 42).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.worst_gap <= 1e-10);
        assert!(r1.worst_subspace.dim().unwrap() <= 4);
    }

    #[test]
    fn shift_images_leave_the_window() {
        let r = sample_subspace_restrictions(&OperatorExpr::shift(3).unwrap(), 10, 10, 1).unwrap();
        assert!(r.worst_gap <= 1e-12);
        assert!(matches!(sample_subspace_restrictions(&OperatorExpr::Identity, 4, 0, 1), Err(Error::InvalidArgument(_))));
    }
}
