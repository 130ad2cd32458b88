use fibdyn::dynamics::{forward, inverse, iterate, iterate_orbit};
use fibdyn::monomial::{
    c0_kminus_oracle, c0_kplus_oracle, monomial_backward_c0, monomial_forward_c0, semiconjugacy_residual, OracleVerdict,
};
use fibdyn::{CPoint, Direction, Error, OrbitStatus, ParamContext, RPoint};
use num_complex::Complex64;
use proptest::prelude::*;

const EPS: f64 = f64::EPSILON;

fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, t)
}

fn annulus_point() -> impl Strategy<Value = CPoint> {
    (0.5..1.5f64, -3.2..3.2f64, 0.5..1.5f64, -3.2..3.2f64)
        .prop_map(|(r, t, s, u)| CPoint::new(polar(r, t), polar(s, u)))
}

fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm())
}

#[test]
fn examples() {
    let ctx = ParamContext::real(0.0);
    assert_eq!(ctx.apply_forward(RPoint::new(2.0, 1.0)).unwrap(), RPoint::new(2.0, 2.0));
    for c in [0.2, -3.0, 0.0] {
        let ctx = ParamContext::real(c);
        assert_eq!(ctx.apply_forward(RPoint::new(-1.0, -1.0)).unwrap(), RPoint::new(1.0 + c, -1.0));
        assert_eq!(ctx.apply_forward(RPoint::new(0.0, 7.5)).unwrap(), RPoint::new(c, 0.0));
        assert_eq!(ctx.apply_inverse(RPoint::new(1.0 + c, -1.0)).unwrap(), RPoint::new(-1.0, -1.0));
        assert_eq!(ctx.apply_inverse(RPoint::new(3.0, 0.0)), Err(Error::InverseUndefined));
    }
    let a2 = (1.0 + (1.0f64 - 0.8).sqrt()) / 2.0;
    let w = ParamContext::real(0.2).apply_forward(RPoint::new(a2, a2)).unwrap();
    assert!((w.x - a2).abs() < 4.0 * EPS && w.y == a2);
}

#[test]
fn orbit_examples() {
    let ctx = ParamContext::real(0.0);
    let t = iterate_orbit(&ctx, RPoint::new(0.0, 0.0), Direction::Forward, 10, |_, _| false).unwrap();
    assert_eq!(t.status, OrbitStatus::Bounded);
    assert!(t.points.iter().all(|p| *p == RPoint::new(0.0, 0.0)));

    let ctx = ParamContext::real(0.2);
    let t = iterate_orbit(&ctx, RPoint::new(2.0, 2.0), Direction::Forward, 10, |p, _| p.x.min(p.y) >= 2.0).unwrap();
    assert_eq!(t.status, OrbitStatus::Escaped(0));
    let t = iterate_orbit(&ctx, RPoint::new(5.0, 0.0), Direction::Backward, 10, |_, _| false).unwrap();
    assert_eq!(t.status, OrbitStatus::InverseUndefined(0));
}

#[test]
fn monomial_examples() {
    let re = |x: f64, y: f64| CPoint::real(x, y);
    assert_eq!(monomial_forward_c0(re(2.0, 1.0), 3).unwrap(), re(8.0, 4.0));
    assert_eq!(monomial_forward_c0(re(3.0, 2.0), 2).unwrap(), re(18.0, 6.0));
    assert_eq!(monomial_forward_c0(re(1.5, -2.0), 1).unwrap(), re(-3.0, 1.5));
    assert_eq!(monomial_backward_c0(re(4.0, 2.0), 1).unwrap(), re(2.0, 2.0));
    assert_eq!(monomial_backward_c0(re(3.0, 2.0), 1).unwrap(), re(2.0, 1.5));
    assert_eq!(monomial_backward_c0(re(3.0, 2.0), 2).unwrap(), re(1.5, 4.0 / 3.0));
}

#[test]
fn oracle_examples() {
    let re = |x: f64, y: f64| CPoint::real(x, y);
    assert_eq!(c0_kplus_oracle(re(0.0, 1e6), 1e-6), OracleVerdict::Inside);
    assert_eq!(c0_kplus_oracle(re(1.0, 1.0), 1e-6), OracleVerdict::Boundary);
    assert_eq!(c0_kplus_oracle(re(2.0, 1.0), 1e-6), OracleVerdict::Outside);
    let beta = (1.0 + 5f64.sqrt()) / 2.0;
    assert_eq!(c0_kminus_oracle(re(1.0, 1.0), 1e-6).unwrap(), OracleVerdict::Inside);
    assert_eq!(c0_kminus_oracle(re(4.0, 4f64.powf(1.0 / beta)), 1e-6).unwrap(), OracleVerdict::Inside);
    assert_eq!(c0_kminus_oracle(re(4.0, 1.0), 1e-6).unwrap(), OracleVerdict::Outside);
    assert_eq!(c0_kminus_oracle(re(0.0, 0.0), 1e-6), Err(Error::OriginExcluded));
    for z in [CPoint::new(Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)), re(0.0, 5.0), re(3.0, -2.0)] {
        assert!(semiconjugacy_residual(z) <= 4.0 * EPS * z.norm().powi(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn forward_after_inverse(x in -1e3..1e3f64, y in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64], c in -5.0..5.0f64) {
        let back = inverse(c, RPoint::new(x, y)).unwrap();
        let z = forward(c, back).unwrap();
        prop_assert!((z.x - x).abs() <= 4.0 * EPS * (x.abs() + c.abs()));
        prop_assert_eq!(z.y, y);
    }

    #[test]
    fn inverse_after_forward(x in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64], y in -1e3..1e3f64, c in -5.0..5.0f64) {
        let z = inverse(c, forward(c, RPoint::new(x, y)).unwrap()).unwrap();
        prop_assert_eq!(z.x, x);
        prop_assert!((z.y - y).abs() <= 4.0 * EPS * ((x * y).abs() + c.abs()) / x.abs());
    }

    #[test]
    fn forward_closed_form_matches_iteration(z in annulus_point(), n in 0usize..=10) {
        let direct = iterate(Complex64::new(0.0, 0.0), z, n as i64).unwrap();
        let closed = monomial_forward_c0(z, n).unwrap();
        prop_assert!(rel_close(direct.x, closed.x, 1e-9) && rel_close(direct.y, closed.y, 1e-9), "{direct:?} vs {closed:?}");
    }

    #[test]
    fn backward_closed_form_matches_iteration(z in annulus_point(), n in 0usize..=10) {
        let direct = iterate(Complex64::new(0.0, 0.0), z, -(n as i64)).unwrap();
        let closed = monomial_backward_c0(z, n).unwrap();
        prop_assert!(rel_close(direct.x, closed.x, 1e-9) && rel_close(direct.y, closed.y, 1e-9), "{direct:?} vs {closed:?}");
    }

    #[test]
    fn backward_inverts_forward(z in annulus_point(), n in 1usize..=5) {
        let there = monomial_forward_c0(z, n).unwrap();
        let back = monomial_backward_c0(there, n).unwrap();
        prop_assert!(rel_close(back.x, z.x, 1e-9) && rel_close(back.y, z.y, 1e-9));
    }

    #[test]
    fn semiconjugacy_holds(xr in -10.0..10.0f64, xi in -10.0..10.0f64, yr in -10.0..10.0f64, yi in -10.0..10.0f64) {
        let z = CPoint::new(Complex64::new(xr, xi), Complex64::new(yr, yi));
        let scale = z.x.norm() * z.y.norm() + z.x.norm();
        prop_assert!(semiconjugacy_residual(z) <= 4.0 * EPS * scale.max(EPS));
    }
}
