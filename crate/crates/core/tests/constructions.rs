use hcsub::constructions::grid::closest_pair_below;
use hcsub::constructions::{
    compute_nk, default_m_schedule, lem1_perturb, lem2_bump, mk_basis, shkarin_grid, simul_build, x0_build,
    MkOptions, SimulOptions, X0Options,
};
use hcsub::verify::{check_bump, check_grid, check_lem1, check_mk, check_nk, check_x0, VerificationReport, DEFAULT_TOL_SLACK};
use hcsub::{ComplexPolynomial, Error, C64};

fn assert_passed(r: &VerificationReport) {
    let bad: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
    assert!(bad.is_empty(), "failed: {bad:?}");
}

#[test]
fn lem1_contract_small() {
    let pert = lem1_perturb(1.0, C64::new(0.0, 1.0), 3, 0.1, &ComplexPolynomial::one()).unwrap();
    assert_passed(&check_lem1(&pert, 4, 0.0));
}

#[test]
fn lem1_rejects_bad_input() {
    assert!(matches!(lem1_perturb(1.0, C64::new(0.0, 0.0), 3, 0.1, &ComplexPolynomial::one()), Err(Error::InvalidInput(_))));
    assert!(matches!(lem1_perturb(1.0, C64::new(1.0, 0.0), 3, -0.1, &ComplexPolynomial::one()), Err(Error::InvalidInput(_))));
}

#[test]
fn nk_known_values() {
    let one = C64::new(1.0, 0.0);
    let three = C64::new(3.0, 0.0);
    assert_eq!(compute_nk(one, &[1], 1).unwrap(), 1);
    assert_eq!(compute_nk(three, &[2], 1).unwrap(), 10);
    assert_passed(&check_nk(three, &[2], 1, 10, 10_000));
    // One below the minimum must fail the minimality check.
    assert!(!check_nk(three, &[2], 1, 9, 10_000).passed());
}

#[test]
fn bump_pair_mode() {
    let a = C64::new(1.0, 0.0);
    let m = default_m_schedule(a, 2);
    let b = lem2_bump(a, &m, 2, 0.25, 1).unwrap();
    assert!(b.p.valuation().at_least(1));
    assert_passed(&check_bump(&b, DEFAULT_TOL_SLACK));
}

#[test]
fn x0_two_stages() {
    let seeds = vec![ComplexPolynomial::one(), ComplexPolynomial::z()];
    let art = x0_build(&seeds, &X0Options::pair(C64::new(1.0, 0.0), C64::new(1.0, 0.0), 2)).unwrap();
    assert_eq!(art.series_count(), 2);
    assert_passed(&check_x0(&art, DEFAULT_TOL_SLACK));
}

#[test]
fn mk_two_stages() {
    let art = mk_basis(&MkOptions::pair(C64::new(1.0, 0.0), C64::new(1.0, 0.0), 2)).unwrap();
    assert_passed(&check_mk(&art, art.basis.len(), 20, DEFAULT_TOL_SLACK, 7));
}

#[test]
fn grid_small() {
    let g = shkarin_grid(0.5, 4.0, 1).unwrap();
    assert!(closest_pair_below(&g.points, 4.0).is_none());
    assert_passed(&check_grid(&g, 500));
}

#[test]
fn simul_defaults_fail_to_construct() {
    let opts = SimulOptions::new(1, 1, 0.5, ComplexPolynomial::z());
    assert!(simul_build(&opts).is_err());
}

#[test]
fn report_with_infinite_bound_round_trips() {
    let pert = lem1_perturb(1.0, C64::new(1.0, 0.0), 3, 0.1, &ComplexPolynomial::one()).unwrap();
    let mut r = check_lem1(&pert, 2, 0.0);
    r.push(hcsub::verify::Check::new("inf", "", 0.0, f64::INFINITY, hcsub::verify::Side::Exact, true));
    let text = serde_json::to_string(&r).unwrap();
    assert!(text.contains("\"inf\""));
    let back: VerificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}
