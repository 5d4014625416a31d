use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use normattain::deflation::{deflate, reconstruction_error};
use normattain::linalg::CMatrix;
use normattain::numrange::numrange_boundary;
use normattain::spec_doc::{document_to_value, parse_spec};
use normattain::spectral::norm::{operator_norm, NormOptions};
use normattain::{OperatorExpr, SeqSpec, Tail, Vector};

fn complex_matrix(max_n: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n)
            .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(re, im)| Complex64::new(re, im))))
    })
}

fn dense(a: CMatrix) -> OperatorExpr {
    OperatorExpr::dense(a, Tail::Zero).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn numerical_range_lies_in_norm_disc(a in complex_matrix(5)) {
        let n = a.nrows();
        let norm = operator_norm(&dense(a.clone()), &NormOptions::default()).unwrap().value();
        let b = numrange_boundary(&dense(a), n, 36).unwrap();
        for p in &b.points {
            prop_assert!(p.point.norm() <= norm + 1e-9);
        }
    }

    #[test]
    fn norm_bounds_every_image(a in complex_matrix(5), seed in prop::collection::vec(-1.0f64..1.0, 5)) {
        let n = a.nrows();
        let x = DVector::from_iterator(n, seed.iter().take(n).map(|v| Complex64::new(*v, 0.0)));
        let norm = operator_norm(&dense(a.clone()), &NormOptions::default()).unwrap().value();
        prop_assert!((&a * &x).norm() <= norm * x.norm() + 1e-9);
    }

    #[test]
    fn deflation_reconstructs_psd(a in complex_matrix(6)) {
        let n = a.nrows();
        let p = &a * a.adjoint();
        let p = (&p + p.adjoint()) * Complex64::new(0.5, 0.0);
        let t = dense(p);
        let dec = deflate(&t, n, n, 1e-10).unwrap();
        prop_assert!(dec.betas.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(dec.orthonormality_residual() <= 1e-9);
        prop_assert!(reconstruction_error(&t, &dec, n).unwrap() <= 1e-8);
    }

    #[test]
    fn harmonic_sup_dominates_terms(limit in -3.0f64..3.0, coeff in -3.0f64..3.0, offset in 0.5f64..4.0) {
        let s = SeqSpec::harmonic(limit, coeff, offset).unwrap();
        let sup = s.sup_value();
        let inf = s.inf_value();
        for j in 1..200 {
            let v = s.eval(j);
            prop_assert!(v <= sup.value + 1e-12 && v >= inf.value - 1e-12);
        }
        if let Some(j) = sup.witness_index {
            prop_assert!(sup.attained);
            prop_assert!((s.eval(j) - sup.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn geometric_modulus_sup_dominates_terms(limit in -3.0f64..3.0, coeff in -3.0f64..3.0, ratio in 0.05f64..0.95) {
        let s = SeqSpec::geometric(limit, coeff, ratio).unwrap();
        let sup = s.sup_modulus();
        for j in 1..200 {
            prop_assert!(s.eval(j).abs() <= sup.value + 1e-12);
        }
    }

    #[test]
    fn spec_document_round_trips(values in prop::collection::vec(-5.0f64..5.0, 1..6), alpha in -2.0f64..2.0) {
        let diag = OperatorExpr::real_diagonal(SeqSpec::explicit_then_zero(values.clone()).unwrap());
        let r = OperatorExpr::finite_rank(vec![(1.0, Vector::from_real(&values), Vector::basis(1))]).unwrap();
        let t = OperatorExpr::scale(Complex64::new(alpha, 0.5), OperatorExpr::sum(vec![diag, r.adjoint()])).unwrap();
        let text = serde_json::json!({ "operator": t }).to_string();
        let doc = parse_spec(&text).unwrap();
        prop_assert_eq!(&doc.operator, &t);
        let again = parse_spec(&document_to_value(&doc).to_string()).unwrap();
        prop_assert_eq!(again, doc);
    }
}
