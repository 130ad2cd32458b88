use fibdyn::dynamics::{forward, inverse};
use fibdyn::escape::{escape_radii, EscapeClassifier};
use fibdyn::grid::PixelGrid;
use fibdyn::partition::regions::region_rect;
use fibdyn::partition::{
    build_regions, certify_inclusion, locate, rect_image_bbox, transition_inclusions, verify_transition_tables,
    BackwardLimitClass, CertStatus, LabeledRect, LimitClass, RealPartition, Region, XInterval, DEFAULT_LIMIT_TOL,
    DEFAULT_MAX_DEPTH,
};
use fibdyn::rng::{stream, uniform};
use fibdyn::{Direction, OrbitStatus, ParamContext, RPoint};
use proptest::prelude::*;

const CLIP: f64 = 40.0;

fn near(r: &LabeledRect, z: &RPoint, tol: f64) -> bool {
    let inside = |i: &XInterval, v: f64| i.lo - tol <= v && v <= i.hi + tol;
    inside(&r.x, z.x) && inside(&r.y, z.y)
}

fn sample_in(r: &LabeledRect, g: &mut fibdyn::rng::StreamRng) -> RPoint {
    let pick = |i: &XInterval, g: &mut fibdyn::rng::StreamRng| {
        let (lo, hi) = (i.lo.max(-CLIP), i.hi.min(CLIP));
        match uniform(g, 0.0, 1.0) {
            u if u < 0.05 => lo,
            u if u < 0.10 => hi,
            _ => uniform(g, lo, hi),
        }
    };
    RPoint::new(pick(&r.x, g), pick(&r.y, g))
}

#[test]
fn locate_examples() {
    let regions = build_regions(0.2).unwrap();
    assert_eq!(locate(&regions, &RPoint::new(10.0, 10.0)), vec![Region::L]);
    assert!(locate(&regions, &RPoint::new(0.5, 0.5)).contains(&Region::Q0));
    let at_cycle = locate(&regions, &RPoint::new(-1.0, -1.0));
    for r in [Region::N, Region::Q2] {
        assert!(at_cycle.contains(&r), "{at_cycle:?}");
    }
    for z in at_cycle.iter().map(|r| region_rect(0.2, *r)) {
        assert!(z.contains(&RPoint::new(-1.0, -1.0)));
    }
}

#[test]
fn image_examples() {
    let (x, y) = rect_image_bbox(0.2, XInterval::new(-1.0, 0.0), XInterval::new(-1.0, 0.0));
    assert_eq!((x, y), (XInterval::new(0.2, 1.2), XInterval::new(-1.0, 0.0)));
    let (x, y) = rect_image_bbox(0.2, XInterval::new(f64::NEG_INFINITY, -1.0), XInterval::new(1.2, f64::INFINITY));
    assert_eq!((x.lo, x.hi), (f64::NEG_INFINITY, -1.2 + 0.2));
    assert_eq!(y, XInterval::new(f64::NEG_INFINITY, -1.0));
    let (x, y) = rect_image_bbox(0.0, XInterval::new(2.0, 2.0), XInterval::new(1.0, 1.0));
    assert_eq!((x, y), (XInterval::new(2.0, 2.0), XInterval::new(2.0, 2.0)));
}

#[test]
fn certification_examples() {
    use Region::*;
    let ok = |d, s, t: &[Region]| certify_inclusion(0.2, d, s, t, DEFAULT_MAX_DEPTH).unwrap().is_certified();
    assert!(ok(Direction::Forward, L, &[L]));
    assert!(ok(Direction::Forward, Q1, &[Q2, Q3]));
    assert!(ok(Direction::Forward, M, &[N]));
    let wrong = certify_inclusion(0.2, Direction::Forward, Q0, &[Q1], DEFAULT_MAX_DEPTH).unwrap();
    let CertStatus::Counterexample { point, image } = wrong.status else { panic!("{:?}", wrong.status) };
    let p = RPoint::new(point[0], point[1]);
    assert!(region_rect(0.2, Q0).contains(&p));
    let w = forward(0.2, p).unwrap();
    assert!((w.x - image[0]).abs() < 1e-12 && (w.y - image[1]).abs() < 1e-12);
    assert!(!region_rect(0.2, Q1).contains(&w));
}

#[test]
fn certificates_are_deterministic() {
    let a = verify_transition_tables(0.1, DEFAULT_MAX_DEPTH).unwrap();
    let b = verify_transition_tables(0.1, DEFAULT_MAX_DEPTH).unwrap();
    let text = |r: &fibdyn::partition::TransitionReport| r.certificates.iter().map(|c| c.to_text()).collect::<Vec<_>>();
    assert_eq!(text(&a), text(&b));
    assert!(a.all_certified());
}

#[test]
fn certified_inclusions_hold_on_samples() {
    for c in [0.05, 0.2, 0.24] {
        for (k, inc) in transition_inclusions().iter().enumerate() {
            let src = region_rect(c, inc.source);
            let targets: Vec<LabeledRect> = inc.targets.iter().map(|t| region_rect(c, *t)).collect();
            let mut g = stream(17, k as u64);
            for _ in 0..2000 {
                let z = sample_in(&src, &mut g);
                let w = match inc.direction {
                    Direction::Forward => forward(c, z).unwrap(),
                    Direction::Backward => match inverse(c, z) {
                        Ok(w) => w,
                        Err(_) => continue,
                    },
                };
                let tol = 1e-9 * (1.0 + w.norm());
                assert!(
                    targets.iter().any(|t| near(t, &w, tol)),
                    "c = {c}, {:?} {:?} -> {:?}: {z:?} maps to {w:?}",
                    inc.direction,
                    inc.source,
                    inc.targets
                );
            }
        }
    }
}

#[test]
fn limit_examples() {
    let rp = RealPartition::new(0.2).unwrap();
    let tol = DEFAULT_LIMIT_TOL;
    assert_eq!(rp.classify_limit(RPoint::new(0.3, 0.3), 10_000, tol), LimitClass::Alpha);
    assert_eq!(rp.classify_limit(rp.theta, 10_000, tol), LimitClass::Theta);
    assert!(matches!(rp.classify_limit(RPoint::new(2.0, 2.0), 10_000, tol), LimitClass::Escape(_)));
    assert!(matches!(rp.classify_backward_limit(RPoint::new(-1.0, -1.0), 1000, tol), BackwardLimitClass::Cycle3(_)));
    assert!(matches!(
        rp.classify_backward_limit(RPoint::new(0.1, 3.0), 1000, tol),
        BackwardLimitClass::BackwardEscape(_) | BackwardLimitClass::InverseUndefined(_)
    ));
    let it = rp.itinerary(RPoint::new(2.0, 2.0), Direction::Forward, 5);
    assert!(it.labels.iter().all(|l| l == &vec![Region::L]));
}

/// (5, 5) -> (5, 0.96) -> (0.96, 5) -> (5, 0.152) -> (0.152, 31.58): the
/// third preimage already lies in the strip A, whose backward orbits diverge.
#[test]
fn backward_orbit_from_5_5_escapes() {
    let rp = RealPartition::new(0.2).unwrap();
    let mut z = RPoint::new(5.0, 5.0);
    for _ in 0..4 {
        z = inverse(0.2, z).unwrap();
    }
    assert!(region_rect(0.2, Region::A).contains(&z), "{z:?}");
    assert!(matches!(
        rp.classify_backward_limit(RPoint::new(5.0, 5.0), 1000, DEFAULT_LIMIT_TOL),
        BackwardLimitClass::BackwardEscape(_)
    ));
}

#[test]
fn alpha_points_are_forward_bounded() {
    let c = 0.22;
    let rp = RealPartition::new(c).unwrap();
    let ctx = ParamContext::real(c);
    let cls = EscapeClassifier::<f64>::forward(&ctx, escape_radii(ctx.c).unwrap().r0).unwrap();
    let grid = PixelGrid::centered(2.0, 128).unwrap();
    let bad = grid.map(|x, y| {
        let z = RPoint::new(x, y);
        rp.classify_limit(z, 10_000, DEFAULT_LIMIT_TOL) == LimitClass::Alpha
            && cls.classify_forward(z, 10_000) != OrbitStatus::Bounded
    });
    assert_eq!(bad.iter().filter(|b| **b).count(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bbox_contains_sampled_images(
        c in -1.0..0.25f64,
        x0 in -5.0..5.0f64, wx in 0.0..4.0f64,
        y0 in -5.0..5.0f64, wy in 0.0..4.0f64,
        seed in 0u64..1000,
    ) {
        let (x, y) = (XInterval::new(x0, x0 + wx), XInterval::new(y0, y0 + wy));
        let (bx, by) = rect_image_bbox(c, x, y);
        let mut g = stream(seed, 0);
        for _ in 0..50 {
            let z = RPoint::new(uniform(&mut g, x.lo, x.hi), uniform(&mut g, y.lo, y.hi));
            let w = forward(c, z).unwrap();
            prop_assert!(bx.contains(w.x) && by.contains(w.y), "{w:?} outside {bx:?} x {by:?}");
        }
        let corners = [(x.lo, y.lo), (x.lo, y.hi), (x.hi, y.lo), (x.hi, y.hi)].map(|(a, b)| forward(c, RPoint::new(a, b)).unwrap().x);
        for face in [bx.lo, bx.hi] {
            prop_assert!(corners.iter().any(|v| (v - face).abs() <= 1e-9), "{face} vs {corners:?}");
        }
    }
}
