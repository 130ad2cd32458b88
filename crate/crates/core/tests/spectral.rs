use std::f64::consts::PI;

use fibdyn::spectral::{
    classify_parameter, fixed_points, inverse_fixed_classification, period2_certificate, three_cycle, FixedKind,
    ParameterClass,
};
use fibdyn::ParamContext;
use num_complex::Complex64;
use proptest::prelude::*;

const EPS: f64 = f64::EPSILON;
const TAU: f64 = 1e-9;

/// Moduli of the eigenvalues of `[[a, a], [1, 0]]`, from the characteristic
/// polynomial `t^2 - a t - a`.
fn oracle_moduli(a: f64) -> [f64; 2] {
    let disc = a * a + 4.0 * a;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [((a - s) / 2.0).abs(), ((a + s) / 2.0).abs()]
    } else {
        let m = (-a).sqrt();
        [m, m]
    }
}

fn oracle_kind(m: [f64; 2]) -> FixedKind {
    let lo = m[0].min(m[1]);
    let hi = m[0].max(m[1]);
    if hi < 1.0 - TAU {
        FixedKind::Attracting
    } else if lo > 1.0 + TAU {
        FixedKind::Repelling
    } else if lo < 1.0 - TAU && hi > 1.0 + TAU {
        FixedKind::Saddle
    } else {
        FixedKind::Indifferent
    }
}

#[test]
fn fixed_point_examples() {
    let s = fixed_points(&ParamContext::real(0.21));
    assert!((s.alpha.a.re - 0.3).abs() < 1e-15 && (s.theta.a.re - 0.7).abs() < 1e-15);
    assert_eq!(s.theta.kind, FixedKind::Saddle);
    let e = s.theta.eigenvalues;
    assert!((e[1].re - 1.2569).abs() < 1e-4 && (e[0].re + 0.5569).abs() < 1e-4);

    let s = fixed_points(&ParamContext::real(0.0));
    assert_eq!((s.alpha.a.re, s.theta.a.re), (0.0, 1.0));

    let s = fixed_points(&ParamContext::real(-3.0));
    let m = s.alpha.moduli();
    assert!((m[0] * m[1] - 1.302_775_637_7).abs() < 1e-9 && s.alpha.kind == FixedKind::Repelling);

    let inv = inverse_fixed_classification(-3.0).unwrap();
    assert!((inv.product_modulus - 0.767_591_879_2).abs() < 1e-9 && inv.attracting);
}

#[test]
fn boundary_parameters() {
    let s = fixed_points(&ParamContext::real(-2.0));
    assert_eq!(s.alpha.kind, FixedKind::Indifferent);
    let mut args: Vec<f64> = s.alpha.eigenvalues.iter().map(|l| l.arg()).collect();
    args.sort_by(f64::total_cmp);
    assert!((args[0] + 2.0 * PI / 3.0).abs() < 1e-9 && (args[1] - 2.0 * PI / 3.0).abs() < 1e-9, "{args:?}");
    assert!(matches!(classify_parameter(-2.0), ParameterClass::Pair { alpha: FixedKind::Indifferent, .. }));

    let s = fixed_points(&ParamContext::real(0.25));
    assert!((s.alpha.a.re - 0.5).abs() < 1e-9 && (s.theta.a.re - 0.5).abs() < 1e-9);
    let mut e: Vec<f64> = s.theta.eigenvalues.iter().map(|l| l.re).collect();
    e.sort_by(f64::total_cmp);
    assert!((e[0] + 0.5).abs() < 1e-9 && (e[1] - 1.0).abs() < 1e-9, "{e:?}");
    assert_eq!(classify_parameter(0.25), ParameterClass::Degenerate);
}

#[test]
fn classification_matches_numerical_eigenvalues() {
    let n = 1000;
    for i in 0..n {
        let c = -25.0 + 25.25 * i as f64 / (n - 1) as f64;
        let got = classify_parameter(c);
        if c == 0.25 {
            assert_eq!(got, ParameterClass::Degenerate);
            continue;
        }
        let s = (1.0 - 4.0 * c).sqrt();
        let (a1, a2) = ((1.0 - s) / 2.0, (1.0 + s) / 2.0);
        let want = ParameterClass::Pair { alpha: oracle_kind(oracle_moduli(a1)), theta: oracle_kind(oracle_moduli(a2)) };
        assert_eq!(got, want, "c = {c}");
        let fp = fixed_points(&ParamContext::real(c));
        assert_eq!(ParameterClass::Pair { alpha: fp.alpha.kind, theta: fp.theta.kind }, want, "c = {c}");
    }
}

#[test]
fn no_two_cycles() {
    let c = period2_certificate(&ParamContext::real(0.2), [-3.0, 3.0, -3.0, 3.0], 32);
    assert!(c.converged > 0 && c.is_empty(), "{:?}", c.non_fixed);
    let c = period2_certificate(&ParamContext::real(-3.0), [-5.0, 5.0, -5.0, 5.0], 32);
    assert!(c.converged > 0 && c.is_empty(), "{:?}", c.non_fixed);
}

#[test]
fn cycle_is_a_saddle_for_small_positive_parameters() {
    for c in [0.01, 0.1, 0.2, 0.22, 0.249] {
        let info = three_cycle(&ParamContext::real(c)).unwrap();
        let m = [info.eigenvalues[0].norm(), info.eigenvalues[1].norm()];
        assert!(m[0].min(m[1]) < 1.0 && m[0].max(m[1]) > 1.0, "c = {c}: {m:?}");
    }
}

fn any_c() -> impl Strategy<Value = Complex64> {
    (0.0..10.0f64, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn vieta(c in any_c()) {
        let s = fixed_points(&ParamContext::new(c));
        let (a1, a2) = (s.alpha.a, s.theta.a);
        let scale = 1.0 + a1.norm().max(a2.norm());
        prop_assert!((a1 + a2 - 1.0).norm() <= 4.0 * EPS * scale);
        prop_assert!((a1 * a2 - c).norm() <= 4.0 * EPS * scale * scale);
        for info in [s.alpha, s.theta] {
            let p = info.eigenvalues[0] * info.eigenvalues[1];
            prop_assert!((p + info.a).norm() <= 4.0 * EPS * (1.0 + info.a.norm()), "{p} vs {}", -info.a);
        }
    }

    #[test]
    fn cycle_closes(c in any_c()) {
        let info = three_cycle(&ParamContext::new(c)).unwrap();
        prop_assert!(info.closure < 1e-12);
        prop_assert!((info.det - info.expected_det).norm() <= 1e-12 * (1.0 + info.det.norm()));
    }
}
