use fibdyn::dynamics::iterate;
use fibdyn::escape::{
    classify_backward, classify_forward, compactness_probe, escape_radii, in_dr, in_vr, nested_backward_probe,
    nested_forward_probe, r2_bound, region_membership, EscapeClassifier, SampleDomain,
};
use fibdyn::monomial::{c0_kplus_oracle, OracleVerdict};
use fibdyn::rng::{stream, uniform};
use fibdyn::{CPoint, Error, OrbitStatus, ParamContext, RPoint};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

#[test]
fn radii_examples() {
    let r = escape_radii(c(0.0)).unwrap();
    assert!((r.r0 - 2.1).abs() < 1e-12 && r.d_back == 2.0);
    assert!((r.r1 - 2.1).abs() < 1e-12 && (r.r2 - 4.2).abs() < 1e-12);
    assert!((escape_radii(c(8.0)).unwrap().r0 - 4.0 * 1.05).abs() < 1e-12);
    let r = escape_radii(c(0.2)).unwrap();
    assert!((r.r2 - 5.544).abs() < 1e-3, "{}", r.r2);
}

#[test]
fn region_examples() {
    let v = region_membership(&RPoint::new(3.0, 3.0), 2.0);
    assert!(v.in_vr && !v.in_dr);
    let v = region_membership(&RPoint::new(5.0, 0.1), 2.0);
    assert!(v.in_fr && v.in_gr);
    let v = region_membership(&RPoint::new(5.0, 0.0), 2.0);
    assert!(v.in_gr && !v.in_fr);
}

#[test]
fn classification_examples() {
    let c0 = ParamContext::real(0.0);
    assert_eq!(classify_forward(&c0, RPoint::new(3.0, 3.0), 2.5, 100).unwrap(), OrbitStatus::Escaped(0));
    for budget in [1, 10, 5000] {
        assert_eq!(classify_forward(&c0, RPoint::new(0.0, 0.0), 2.1, budget).unwrap(), OrbitStatus::Bounded);
    }
    let ctx = ParamContext::real(0.2);
    let r = escape_radii(ctx.c).unwrap();
    assert_eq!(classify_forward(&ctx, RPoint::new(0.3, 0.3), r.r0, 1000).unwrap(), OrbitStatus::Bounded);
    let a2 = (1.0 + 0.2f64.sqrt()) / 2.0;
    assert_eq!(classify_backward(&ctx, RPoint::new(a2, a2), r.r1, 1000).unwrap(), OrbitStatus::Bounded);
    assert_eq!(classify_backward(&ctx, RPoint::new(5.0, 0.0), r.r1, 1000).unwrap(), OrbitStatus::Escaped(0));
    match classify_backward(&c0, RPoint::new(0.1, 100.0), 2.1, 1000).unwrap() {
        OrbitStatus::Escaped(n) => assert!(n <= 5),
        s => panic!("{s:?}"),
    }
    assert!(matches!(classify_forward(&ctx, RPoint::new(0.0, 0.0), 1.5, 10), Err(Error::RadiusTooSmall { .. })));
}

#[test]
fn nested_examples() {
    let ctx = ParamContext::real(0.3);
    let r = escape_radii(ctx.c).unwrap().r2;
    for domain in [SampleDomain::Real, SampleDomain::Complex] {
        let rep = nested_forward_probe(&ctx, r, 2, 2000, 3, domain).unwrap();
        assert!(rep.is_monotone(), "{rep:?}");
    }
    let empty = nested_backward_probe(&ctx, r, 2, 0, 3, SampleDomain::Real).unwrap();
    assert!(empty.violations.is_empty() && empty.level_counts.iter().all(|&n| n == 0));
    assert!(nested_forward_probe(&ctx, r2_bound(ctx.c), 2, 10, 3, SampleDomain::Real).is_err());
}

#[test]
fn origin_survives_for_small_parameters() {
    for v in [0.0, 0.1, -0.24, 0.2] {
        let ctx = ParamContext::real(v);
        let r = escape_radii(ctx.c).unwrap().r2;
        let mut z = RPoint::new(0.0, 0.0);
        for _ in 0..200 {
            assert!(in_dr(&z, r));
            z = ctx.apply_forward(z).unwrap();
        }
    }
}

#[test]
fn compactness_examples() {
    for v in [0.0, 0.2, -3.0] {
        let ctx = ParamContext::real(v);
        let rep = compactness_probe(&ctx, 300, 2000, 5).unwrap();
        assert!(rep.within_bound(), "{rep:?}");
        assert!(rep.k_points >= 1);
    }
}

#[test]
fn c0_classifier_matches_oracle_in_the_ball() {
    let ctx = ParamContext::real(0.0);
    let cls = EscapeClassifier::<Complex64>::forward(&ctx, 2.1).unwrap();
    let mut g = stream(11, 0);
    let (mut agree, mut total) = (0, 0);
    while total < 2000 {
        let mut v = [0.0; 4];
        for t in &mut v {
            *t = uniform(&mut g, -3.0, 3.0);
        }
        let z = CPoint::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]));
        if z.norm() > 3.0 {
            continue;
        }
        let expected = match c0_kplus_oracle(z, 1e-3) {
            OracleVerdict::Boundary => continue,
            OracleVerdict::Inside => true,
            OracleVerdict::Outside => false,
        };
        total += 1;
        agree += usize::from((cls.classify_forward(z, 200) == OrbitStatus::Bounded) == expected);
    }
    assert!(agree as f64 >= 0.99 * total as f64, "{agree}/{total}");
}

fn fibonacci(n: usize) -> u32 {
    let (mut a, mut b) = (0u32, 1u32);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn first_exit_is_stable(v in -1.0..0.25f64, x in -4.0..4.0f64, y in -4.0..4.0f64, extra in 1usize..500) {
        let ctx = ParamContext::real(v);
        let r = escape_radii(ctx.c).unwrap().r0;
        let cls = EscapeClassifier::<f64>::forward(&ctx, r).unwrap();
        let short = cls.classify_forward(RPoint::new(x, y), 60);
        if let OrbitStatus::Escaped(n) = short {
            prop_assert_eq!(cls.classify_forward(RPoint::new(x, y), 60 + extra), OrbitStatus::Escaped(n));
        }
    }

    #[test]
    fn escaped_orbits_keep_growing(v in -2.0..2.0f64, x in -4.0..4.0f64, y in -4.0..4.0f64) {
        let ctx = ParamContext::real(v);
        let r = escape_radii(ctx.c).unwrap().r0;
        let cls = EscapeClassifier::<f64>::forward(&ctx, r).unwrap();
        if let OrbitStatus::Escaped(n) = cls.classify_forward(RPoint::new(x, y), 60) {
            let Ok(mut z) = iterate(v, RPoint::new(x, y), n as i64) else { return Ok(()) };
            prop_assume!(z.is_finite());
            for j in 1..=3 {
                match ctx.apply_forward(z) {
                    Ok(w) => z = w,
                    Err(_) => return Ok(()),
                }
                prop_assert!(in_vr(&z, r));
                prop_assert!(z.norm() >= (r / 2.0).powi(fibonacci(j) as i32));
            }
        }
    }
}
