use hcsub::norms::{coeff_norm, sup_norm};
use hcsub::poly::poly_close;
use hcsub::{ComplexPolynomial, LogScalar, C64};
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn poly() -> impl Strategy<Value = ComplexPolynomial> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=65)
        .prop_map(|v| ComplexPolynomial::from_coeffs(v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap())
}

fn point(r: f64) -> impl Strategy<Value = C64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| C64::from_polar(m, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn taylor_shift_pointwise(p in poly(), c in point(1.0), z in point(1.0)) {
        let q = p.taylor_shift(c).unwrap();
        let scale = coeff_norm(&p, z.norm() + c.norm()).max(1.0);
        prop_assert!((q.eval(z) - p.eval(z + c)).norm() <= TOL * scale);
    }

    #[test]
    fn derivative_commutes_with_translation(p in poly(), c in point(1.0), mu in point(2.0)) {
        let a = p.taylor_shift(c).unwrap().derivative_iter(1, mu).unwrap();
        let b = p.derivative_iter(1, mu).unwrap().taylor_shift(c).unwrap();
        prop_assert!(poly_close(&a, &b, TOL));
    }

    #[test]
    fn translation_semigroup(p in poly(), a in point(1.0), s in 0u64..4, t in 0u64..4) {
        // T_a^s T_a^t = T_a^{s+t}
        let two = p.taylor_shift(a * s as f64).unwrap().taylor_shift(a * t as f64).unwrap();
        let one = p.taylor_shift(a * (s + t) as f64).unwrap();
        prop_assert!(poly_close(&two, &one, TOL));
    }

    #[test]
    fn derivative_semigroup(p in poly(), m in 0usize..8, n in 0usize..8, mu in point(2.0)) {
        let two = p.derivative_iter(m, mu).unwrap().derivative_iter(n, mu).unwrap();
        let one = p.derivative_iter(m + n, mu).unwrap();
        prop_assert!(poly_close(&two, &one, TOL));
    }

    #[test]
    fn weighted_translation_iterate(p in poly(), a in point(1.0), s in 0u64..5, b in -1.0f64..1.0) {
        let (scale, shifted) = p.scaled_translate_iter(a, s, b).unwrap();
        let mut step = p.clone();
        for _ in 0..s {
            step = step.taylor_shift(a).unwrap().scale(C64::new(b.exp(), 0.0));
        }
        let got = shifted.scale_log(scale).unwrap();
        prop_assert!(poly_close(&got, &step, TOL));
    }

    #[test]
    fn scaled_derivative_matches_plain(p in poly(), m in 0usize..10, b in -2.0f64..2.0) {
        let mu = C64::new(0.6, 0.8);
        let plain = p.derivative_iter(m, mu).unwrap().scale(C64::new(b.exp(), 0.0));
        let scaled = p.scaled_derivative(m, mu, LogScalar::exp_real(b)).unwrap();
        prop_assert!(poly_close(&plain, &scaled, TOL));
    }

    #[test]
    fn antiderivative_is_right_inverse(p in poly(), m in 0usize..12) {
        let s = p.scaled_antiderivative(m, LogScalar::ONE).unwrap();
        let back = s.derivative_iter(m, C64::new(1.0, 0.0)).unwrap();
        prop_assert!(poly_close(&back, &p, TOL));
    }

    #[test]
    fn sampled_norm_below_coefficient_norm(p in poly(), j in prop::sample::select(vec![1.0, 2.0, 4.0])) {
        let e = sup_norm(&p, j, LogScalar::ONE);
        prop_assert!(e.log_sampled_sup <= e.log_coeff_bound + hcsub::INEQ_SLACK);
    }
}

#[test]
fn monomial_norm_is_exact() {
    for n in 0..=64usize {
        let p = ComplexPolynomial::monomial(n, C64::new(1.0, 0.0));
        for j in [1.0f64, 2.0, 4.0] {
            let e = sup_norm(&p, j, LogScalar::ONE);
            // Norms are kept as logs; both sides are exactly `n ln j`.
            assert_eq!(e.log_sampled_sup, n as f64 * j.ln(), "n = {n}, j = {j}");
            assert_eq!(e.log_coeff_bound, n as f64 * j.ln(), "n = {n}, j = {j}");
            let v = j.powi(n as i32);
            // exp amplifies the last-bit error of `n ln j` by up to `n ln j`.
            assert!((e.sampled_sup() - v).abs() <= 1e-13 * v);
        }
    }
}

#[test]
fn shift_refuses_overflow() {
    let p = ComplexPolynomial::monomial(400, C64::new(1e200, 0.0));
    assert!(p.taylor_shift(C64::new(10.0, 0.0)).is_err());
}

#[test]
fn serde_round_trip() {
    let p = ComplexPolynomial::from_coeffs(vec![C64::new(0.1, -2.5), C64::new(0.0, 1e-300), C64::new(3.0, 0.0)]).unwrap();
    let s = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<ComplexPolynomial>(&s).unwrap(), p);
}
