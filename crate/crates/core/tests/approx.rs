use hcsub::{fit, fit_with, make_compact, verify_fit, ComplexPolynomial, Disk, Error, FitOptions, PiecewiseTarget, TargetPiece, C64};

fn disk(re: f64, im: f64, r: f64) -> Disk {
    Disk::new(C64::new(re, im), r).unwrap()
}

fn constants(values: &[f64]) -> PiecewiseTarget {
    PiecewiseTarget::new(values.iter().map(|v| TargetPiece::constant(C64::new(*v, 0.0))).collect())
}

#[test]
fn indicator_on_two_disks() {
    let k = make_compact(vec![disk(0.0, 0.0, 1.0), disk(5.0, 0.0, 1.0)]).unwrap();
    let t = constants(&[1.0, 0.0]);
    let (p, cert) = fit(&k, &t, 1e-2, 0, 2048).unwrap();
    assert!(cert.fitted_degree <= 200);
    assert!(cert.is_valid());
    // Independent check at four times the certificate's density.
    let dense = 16 * 64usize.max(4 * (p.degree() + 1));
    let errs = verify_fit(&p, &k, &t, dense);
    assert!(errs.iter().all(|e| *e < 1e-2), "{errs:?}");
}

#[test]
fn three_disk_target() {
    let k = make_compact(vec![disk(0.0, 0.0, 1.0), disk(5.0, 0.0, 1.0), disk(0.0, 5.0, 1.0)]).unwrap();
    let t = constants(&[1.0, 0.0, 0.0]);
    let (p, cert) = fit(&k, &t, 5e-2, 0, 2048).unwrap();
    assert!(cert.is_valid());
    let dense = 16 * 64usize.max(4 * (p.degree() + 1));
    assert!(verify_fit(&p, &k, &t, dense).iter().all(|e| *e < 5e-2));
}

#[test]
fn valuation_is_respected() {
    let k = make_compact(vec![disk(0.0, 0.0, 1.0), disk(4.0, 0.0, 1.0)]).unwrap();
    let t = PiecewiseTarget::new(vec![
        TargetPiece::poly(ComplexPolynomial::monomial(3, C64::new(1.0, 0.0))),
        TargetPiece::zero(),
    ]);
    let (p, cert) = fit_with(&k, &t, &FitOptions::new(0.1).with_valuation(3)).unwrap();
    assert!(p.valuation().at_least(3));
    assert!(cert.is_valid());
}

#[test]
fn overlapping_disks_are_rejected() {
    match make_compact(vec![disk(0.0, 0.0, 1.0), disk(1.0, 0.0, 1.0)]) {
        Err(Error::Geometry { first: 0, second: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn degree_cap_reports_best_attempt() {
    let k = make_compact(vec![disk(0.0, 0.0, 1.0), disk(2.5, 0.0, 1.0)]).unwrap();
    let t = constants(&[1.0, 0.0]);
    match fit(&k, &t, 1e-8, 0, 20) {
        Err(Error::ApproximationFailure { best_ratio, best_errors, .. }) => {
            assert!(best_ratio > 1.0);
            assert_eq!(best_errors.len(), 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn polynomial_target_is_reproduced() {
    let f = ComplexPolynomial::from_real(&[1.0, -2.0, 0.5]);
    let k = make_compact(vec![disk(0.0, 0.0, 1.0), disk(6.0, 0.0, 2.0)]).unwrap();
    let t = PiecewiseTarget::new(vec![TargetPiece::poly(f.clone()), TargetPiece::poly(f.clone())]);
    let (p, _) = fit(&k, &t, 1e-9, 0, 64).unwrap();
    assert_eq!(p, f);
}
