//! Pointwise contracts: plane containments of the disc bands, the torus
//! annulus inside the disc, direct tube attachment with its rejection
//! paths, extremum uniqueness, randomized circle-criterion soundness.

use hulllab_core::bump::{sample_e1, CutoffSpec, DiscFieldF, LemmaGh, SignFieldK};
use hulllab_core::checks::{extremum_uniqueness, torus_circle_criterion, FiberPoint, FiberSample};
use hulllab_core::error::CoreError;
use hulllab_core::num::C64;
use hulllab_core::smooth::CPoint;
use hulllab_core::surface::{
    attach_tube, build_disc_delta, build_rp2, build_torus, flatten_function, flatten_surface,
    graph_lift, rp2_g, torus_g, v_e_residual, v_i_residual, AffineMap2, FlattenKind, TubeSpec,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

#[test]
fn disc_outer_bands_lie_in_planes() {
    let spec = CutoffSpec::default();
    let disc = build_disc_delta(spec).unwrap();
    let chart = &disc.surface.charts[0];
    for i in 0..64 {
        let th = -PI + 2.0 * PI * i as f64 / 64.0;
        // inner band phi >= alpha3 sits in V_i
        for phi in [spec.alpha3, spec.alpha3 + 0.3, spec.alpha - 0.05] {
            let z = chart.map.eval([th, phi]);
            assert!(v_i_residual(&z) < 1e-10, "V_i residual at ({th}, {phi})");
        }
        // outer band phi <= -alpha3 sits in V_e
        for phi in [-spec.alpha3, -spec.alpha3 - 0.3, -spec.alpha + 0.05] {
            let z = chart.map.eval([th, phi]);
            assert!(v_e_residual(&z) < 1e-10, "V_e residual at ({th}, {phi})");
        }
    }
    // at chi = 3 the V_e point has norm > 3
    let (mut lo, mut hi) = (-spec.alpha + 1e-9, -spec.alpha2);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if disc.cutoffs.chi.value(mid) > 3.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi3chi = 0.5 * (lo + hi);
    assert!((disc.cutoffs.chi.value(phi3chi) - 3.0).abs() < 1e-9);
    for i in 0..16 {
        let th = -PI + 2.0 * PI * i as f64 / 16.0;
        let z = chart.map.eval([th, phi3chi]);
        assert!(v_e_residual(&z) < 1e-9);
        assert!(z.norm() > 3.0, "norm {} at theta {th}", z.norm());
    }
}

#[test]
fn disc_contains_torus_annulus() {
    let spec = CutoffSpec::default();
    let disc = build_disc_delta(spec).unwrap();
    let chart = &disc.surface.charts[0];
    for i in 0..48 {
        let th = -PI + 2.0 * PI * i as f64 / 48.0;
        for j in 0..16 {
            let phi = -spec.alpha1 + 2.0 * spec.alpha1 * j as f64 / 16.0;
            let z = chart.map.eval([th, phi]);
            let want = CPoint::from_c2(C64::cis(th), C64::cis(phi + th));
            assert!(
                z.dist(&want) < 1e-12,
                "annulus point off the torus at ({th}, {phi})"
            );
        }
    }
}

#[test]
fn graph_of_f_sits_at_zero_over_e() {
    let gh = Arc::new(LemmaGh::with_defaults().unwrap());
    let k = Arc::new(SignFieldK::new(gh.saw, sample_e1(&gh.saw, 500, 42)));
    let f = Arc::new(DiscFieldF::new(gh.clone(), k.clone()));
    let disc = build_disc_delta(CutoffSpec::default()).unwrap();
    struct W(Arc<DiscFieldF>);
    impl hulllab_core::bump::ComplexField2 for W {
        fn value(&self, p: [f64; 2]) -> C64 {
            self.0.value(p)
        }
        fn jac(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
            self.0.jac(p)
        }
    }
    let field: Arc<dyn hulllab_core::surface::SurfaceField> =
        Arc::new(hulllab_core::surface::fields::ComplexParamField { inner: W(f) });
    let lift = graph_lift(Arc::new(disc.surface.clone()), field);
    // over E1 samples the lifted third coordinate vanishes
    for q in k.e1_points().iter().take(64) {
        let z = lift.lifted.eval(0, *q);
        assert!(z.z(2).abs() < 1e-12, "lift over E off the zero section");
        // and projects back onto the disc point
        let base = disc.surface.eval(0, *q);
        assert_eq!(z.z(0), base.z(0));
        assert_eq!(z.z(1), base.z(1));
    }
}

#[test]
fn attach_tube_direct_and_rejections() {
    // the first link pair of the tori chain, joined by the standalone op
    let torus = build_torus();
    let t0 = flatten_surface(&torus, "max", 0.02, 0.35, 0.02).unwrap();
    let t0 = flatten_surface(&t0, "min", 0.02, 0.35, 0.02).unwrap();
    let mut t1 = t0.clone();
    for c in &mut t1.charts {
        c.map = Arc::new(hulllab_core::surface::charts::AffineChart {
            inner: c.map.clone(),
            map: AffineMap2::translation(C64::new(5.0, 0.0), C64::new(2.0, 0.0)),
        });
    }
    for (_, mp) in t1.marked.iter_mut() {
        mp.ambient = CPoint::from_c2(
            mp.ambient.z(0) + C64::new(5.0, 0.0),
            mp.ambient.z(1) + C64::new(2.0, 0.0),
        );
    }
    // frame: w = z - (0, 1): ports (1,1) -> (1,0) and (4,1) -> (4,0)
    let to_frame = AffineMap2::translation(C64::ZERO, C64::new(-1.0, 0.0));
    let spec = TubeSpec {
        a: 1.0,
        b: 4.0,
        r0: 0.004,
    };
    let join = attach_tube(&t0, &t1, ("max", "min"), &to_frame, spec).unwrap();
    assert!(join.surface.chart_index("tube").is_some());
    assert!(join.surface.seam_residual(48) < 1e-8);

    // rejection: port radius too large for the flat patch
    let too_big = TubeSpec {
        a: 1.0,
        b: 4.0,
        r0: 0.05,
    };
    let err = match attach_tube(&t0, &t1, ("max", "min"), &to_frame, too_big) {
        Err(e) => e,
        Ok(_) => panic!("oversized port radius must be rejected"),
    };
    assert!(
        matches!(err, CoreError::TubeHypothesis { .. }),
        "expected flat-disc violation, got {err}"
    );

    // rejection: a frame whose half-space hypothesis fails
    let bad_frame = AffineMap2::translation(C64::new(-2.0, 0.0), C64::new(-1.0, 0.0));
    let err = match attach_tube(&t0, &t1, ("max", "min"), &bad_frame, spec) {
        Err(e) => e,
        Ok(_) => panic!("bad frame must be rejected"),
    };
    assert!(matches!(err, CoreError::TubeHypothesis { .. }));
}

#[test]
fn flatten_function_rejects_vanished_gap() {
    let torus = build_torus();
    let t0 = flatten_surface(&torus, "max", 0.02, 0.35, 0.02).unwrap();
    // alpha_gap too large: the field never clears it outside eta
    let err = match flatten_function(torus_g(), &t0, "max", 0.05, 0.45, 1.2, FlattenKind::Max) {
        Err(e) => e,
        Ok(_) => panic!("oversized gap must be rejected"),
    };
    assert!(matches!(err, CoreError::NoAdmissibleGap(_)));
}

#[test]
fn extremum_uniqueness_torus_and_rp2() {
    let torus = build_torus();
    let r = extremum_uniqueness(torus_g().as_ref(), &torus, 512, 512, 1e-4, 1);
    assert!(r.pass, "{:?}", r.details);

    // on the projective plane the maximum has two antipodal preimages per
    // covering chart: four clusters in parameter space
    let rp2 = build_rp2();
    let g = rp2_g(&rp2);
    let r = extremum_uniqueness(g.as_ref(), &rp2, 384, 384, 1e-4, 4);
    assert!(r.pass, "{:?}", r.details);
}

#[test]
fn circle_criterion_soundness_randomized() {
    // 100 synthetic torus samples with known gap/coverage status
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for case in 0..100 {
        let cover = case % 2 == 1;
        let gap_center: f64 = rng.random_range(-PI..PI);
        let gap_width: f64 = rng.random_range(0.4..1.5);
        let mut points = Vec::new();
        // arcs avoiding the gap, with sparse z2 values
        for i in 0..1400 {
            let mut t1: f64 = rng.random_range(-PI..PI);
            // push t1 out of the gap
            let mut d = t1 - gap_center;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            if d.abs() < gap_width / 2.0 {
                t1 = gap_center + (gap_width / 2.0 + 0.01) * d.signum() + d;
            }
            let t2 = (3.0 * t1).sin() * 1.2 + 0.2 * ((i % 5) as f64);
            points.push(make_point(t1, t2));
        }
        if cover {
            // add one full vertical circle
            let a: f64 = rng.random_range(-PI..PI);
            for j in 0..600 {
                let t2 = -PI + 2.0 * PI * j as f64 / 600.0;
                points.push(make_point(a, t2));
            }
        }
        let sample = FiberSample {
            level: C64::ZERO,
            points,
            resolution: (600, 600),
            tolerance: 1e-6,
        };
        let r = torus_circle_criterion(&sample).unwrap();
        assert_eq!(
            r.pass, !cover,
            "case {case}: cover = {cover} but verdict = {}",
            r.pass
        );
    }
}

fn make_point(t1: f64, t2: f64) -> FiberPoint {
    FiberPoint {
        chart: 0,
        param: [t1, t2],
        z: CPoint::from_c2(C64::cis(t1), C64::cis(t2)),
    }
}

#[test]
fn rp2_antipodal_thousand_points() {
    let rp2 = build_rp2();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let chart = &rp2.charts[0];
    let dom = chart.map.domain();
    for _ in 0..1000 {
        let p = [
            rng.random_range(dom.lo[0]..dom.hi[0]),
            rng.random_range(dom.lo[1] * 0.999..dom.hi[1] * 0.999),
        ];
        let q = [
            hulllab_core::num::wrap_angle(p[0] + PI),
            -p[1],
        ];
        let (za, zb) = (chart.map.eval(p), chart.map.eval(q));
        assert!(za.dist(&zb) < 1e-12);
    }
}

#[test]
fn blowup_end_is_rejected_and_derivatives_grow() {
    use hulllab_core::smooth::{jacobian, DiffMode};
    let spec = CutoffSpec::default();
    let disc = build_disc_delta(spec).unwrap();
    let map = disc.surface.charts[0].map.as_ref();
    // the open end itself is a domain violation
    match jacobian(map, [0.3, -spec.alpha], DiffMode::Analytic) {
        Err(CoreError::DomainViolation { axis: 1, .. }) => {}
        other => panic!("expected domain rejection at the open end, got {other:?}"),
    }
    // representable points just inside stay finite but the derivative grows
    // without bound toward the end (the chart declares an fd margin there)
    let j_near = jacobian(map, [0.3, -spec.alpha + 1e-8], DiffMode::Analytic).unwrap();
    let j_far = jacobian(map, [0.3, -spec.alpha + 1e-3], DiffMode::Analytic).unwrap();
    assert!(j_near.is_finite());
    let norm = |j: &hulllab_core::smooth::RealJacobian| {
        j.rows().iter().flat_map(|r| r.iter()).fold(0.0f64, |a, x| a.max(x.abs()))
    };
    assert!(norm(&j_near) > 1e6 * norm(&j_far).min(1e6));
}
