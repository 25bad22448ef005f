//! End-to-end Hecke check at small truncation: the invariant weight-3
//! combination is an eigenform with the closed-form Eisenstein eigenvalues.

use picard_forms::catalog::Catalog;
use picard_forms::cyclotomic::Cyc;
use picard_forms::eisenstein::split_prime;
use picard_forms::fj::VectorForm;
use picard_forms::hecke::{apply_scalar, eigenvalue, eisenstein_eigenvalue, HeckeOp};
use picard_forms::theta::validate::bootstrap_validated;

#[test]
fn scalar_weight3_eigenvalues() {
    let w = 8usize;
    let (_model, table, report) = bootstrap_validated(192, w, &[2, 7]).expect("bootstrap");
    assert!(report.passed());
    let cat = Catalog::new(&table, w);
    let x1 = cat.scalar("x1").unwrap();
    let form = VectorForm::scalar("x1", 3, 0, (*x1).clone());

    // T(-2): lambda = -1 - p^3 = -9
    let t2 = HeckeOp::minus_p(2).unwrap();
    let rep = eigenvalue(&form, &t2, &table).unwrap();
    assert_eq!(rep.eigenvalue, Cyc::from_int(-9));
    assert_eq!(rep.eigenvalue, eisenstein_eigenvalue(0, 3, &t2));
    assert!(rep.coefficients_checked.len() >= 2);

    // T(1+3r): lambda = (p+1) v + vbar^2 = 3 + 27r
    let v7 = split_prime(7).unwrap();
    let t7 = HeckeOp::nu(v7).unwrap();
    let rep = eigenvalue(&form, &t7, &table).unwrap();
    assert_eq!(rep.eigenvalue, Cyc::from_pair(3, 27));
    assert_eq!(rep.eigenvalue, eisenstein_eigenvalue(0, 3, &t7));

    // the zero series maps to the zero series
    let zero = VectorForm::scalar("zero", 3, 0, picard_forms::fj::FjSeries::zero(w));
    let img = apply_scalar(&t2, 3, &zero.last, &table).unwrap();
    assert!(img.is_zero());
}
