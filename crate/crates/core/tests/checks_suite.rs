//! Certificate-level integration checks against the concrete constructions.

use hulllab_core::bump::{
    make_cutoffs, sample_e1, ComplexField2, CutoffSpec, DiscFieldF, LemmaGh, SignFieldK,
};
use hulllab_core::checks::{
    antiperiodicity_check, check_axis_range, check_disc_block_det, check_immersion,
    check_totally_real, disc_algebra_obstruction, extrema_verify, lemma_gh_suite,
    rp2_extrema_lagrange, rp2_fiber_finiteness, sample_fiber, torus_circle_criterion,
    totally_real_failures, AxisSet, ExpectedExtremum, TOL_MINOR, TOL_RANK,
};
use hulllab_core::num::C64;
use hulllab_core::surface::fields::ComplexParamField;
use hulllab_core::surface::{
    build_disc_delta, build_rp2, build_torus, graph_lift, rp2_g, torus_g,
};
use std::f64::consts::PI;
use std::sync::Arc;

fn disc_field() -> (Arc<DiscFieldF>, hulllab_core::surface::DiscDelta) {
    let disc = build_disc_delta(CutoffSpec::default()).unwrap();
    let gh = Arc::new(LemmaGh::with_defaults().unwrap());
    let saw = gh.saw;
    let k = Arc::new(SignFieldK::new(saw, sample_e1(&saw, 2000, 42)));
    (Arc::new(DiscFieldF::new(gh, k)), disc)
}

#[test]
fn immersion_torus_and_disc() {
    let torus = build_torus();
    let r = check_immersion(&torus, 256, 256, TOL_RANK);
    assert!(r.pass, "{}", serde_json::to_string(&r).unwrap());
    let min = r
        .residuals
        .iter()
        .find(|x| x.name == "second_singular_value_min")
        .unwrap();
    assert!(min.value >= 0.9, "torus sigma2 {}", min.value);

    let disc = build_disc_delta(CutoffSpec::default()).unwrap();
    let r = check_immersion(&disc.surface, 192, 192, TOL_RANK);
    assert!(r.pass, "disc immersion failed: {:?}", r.residuals);
}

#[test]
fn block_det_identity() {
    let disc = build_disc_delta(CutoffSpec::default()).unwrap();
    let spec = disc.cutoffs.spec;
    let r = check_disc_block_det(
        &disc.surface,
        &disc.cutoffs.chi,
        spec.alpha2,
        spec.alpha,
        128,
        128,
    );
    assert!(r.pass, "{:?}", r.residuals);
}

#[test]
fn totally_real_graph_over_torus() {
    let t = Arc::new(build_torus());
    let lift = graph_lift(t, torus_g());
    let r = check_totally_real(&lift.lifted, 128, 128, TOL_MINOR);
    assert!(r.pass, "{:?}", r.residuals);
    // the dz1^dz2 minor certifies everywhere over a totally real base
    assert_eq!(r.details["certificates"]["dz1^dz2"], 128 * 128);
}

#[test]
fn bare_rp2_fails_exactly_at_origin() {
    let p = build_rp2();
    let fails = totally_real_failures(&p, 256, 256, TOL_MINOR);
    assert!(!fails.is_empty(), "expected complex tangent hits");
    for (ci, q, _) in &fails {
        let z = p.eval(*ci, *q);
        assert!(
            z.norm() < 1e-2,
            "failure away from the origin: chart {ci} {q:?} -> |z| = {}",
            z.norm()
        );
    }
}

#[test]
fn rp2_graph_passes_with_df_minor() {
    let p = Arc::new(build_rp2());
    let g = rp2_g(&p);
    let lift = graph_lift(p.clone(), g);
    let r = check_totally_real(&lift.lifted, 256, 256, TOL_MINOR);
    assert!(r.pass, "{:?}", r.residuals);
    // at the complex tangent the certificate is dz2^df with value sqrt(3)
    let ct = lift.lifted.marked_point("ct+").unwrap();
    let j = hulllab_core::smooth::ComplexJacobian::from_real(
        &lift.lifted.charts[ct.chart].map.jac(ct.param),
    );
    let minors = hulllab_core::smooth::complex_minors(&j);
    assert!(minors[0].abs() < 1e-10, "dz1^dz2 should vanish");
    assert!(
        (minors[2].abs() - 3f64.sqrt()).abs() < 1e-9,
        "dz2^df = sqrt3 i expected, got {}",
        minors[2].abs()
    );
}

#[test]
fn torus_fibers_and_circle_criterion() {
    let torus = build_torus();
    let g = torus_g();
    // t = 2: empty
    let s = sample_fiber(g.as_ref(), &torus, C64::new(2.0, 0.0), 256, 256, 1e-3);
    assert!(s.points.is_empty());
    // t = 3/2: single cluster at the origin
    let s = sample_fiber(g.as_ref(), &torus, C64::new(1.5, 0.0), 512, 512, 1e-6);
    assert!(!s.points.is_empty());
    for p in &s.points {
        assert!(p.param[0].hypot(p.param[1]) < 0.05, "outlier at {:?}", p.param);
    }
    // t = 0: gap near theta1 = pi
    let s = sample_fiber(g.as_ref(), &torus, C64::ZERO, 512, 512, 2e-3);
    let r = torus_circle_criterion(&s).unwrap();
    assert!(r.pass, "{:?}", r.residuals);
    let gap_center = r
        .witnesses
        .iter()
        .find(|w| w.label == "gap_center")
        .unwrap()
        .params
        .unwrap()[0];
    assert!(
        (gap_center.abs() - PI).abs() < 0.5,
        "gap expected near pi, got {gap_center}"
    );
}

#[test]
fn full_circle_fails_coverage() {
    // synthetic sample: the full vertical circle K_a
    let torus = build_torus();
    let mut s = sample_fiber(
        torus_g().as_ref(),
        &torus,
        C64::new(0.25, 0.0),
        64,
        64,
        5e-2,
    );
    s.points.clear();
    for i in 0..512 {
        let t2 = -PI + 2.0 * PI * i as f64 / 512.0;
        s.points.push(hulllab_core::checks::FiberPoint {
            chart: 0,
            param: [0.3, t2],
            z: torus.eval(0, [0.3, t2]),
        });
    }
    s.resolution = (512, 512);
    let r = torus_circle_criterion(&s).unwrap();
    assert!(!r.pass, "full circle must fail coverage");
}

#[test]
fn axis_range_of_f() {
    let (f, disc) = disc_field();
    let field = ComplexParamField {
        inner: FWrap(f.clone()),
    };
    let r = check_axis_range(
        &field,
        &disc.surface,
        384,
        384,
        AxisSet::SegmentAndImaginary,
        1e-9,
    );
    assert!(r.pass, "{:?}", r.residuals);
    // constant 2 + 0i fails the segment axis set
    struct Const2;
    impl hulllab_core::surface::SurfaceField for Const2 {
        fn is_real(&self) -> bool {
            true
        }
        fn value(&self, _c: usize, _p: [f64; 2]) -> C64 {
            C64::new(2.0, 0.0)
        }
        fn jac(&self, _c: usize, _p: [f64; 2]) -> [[f64; 2]; 2] {
            [[0.0, 0.0], [0.0, 0.0]]
        }
    }
    let r = check_axis_range(
        &Const2,
        &disc.surface,
        16,
        16,
        AxisSet::SegmentAndImaginary,
        1e-9,
    );
    assert!(!r.pass);
    let r = check_axis_range(&Const2, &disc.surface, 16, 16, AxisSet::RealAndImaginary, 1e-9);
    assert!(r.pass);
}

struct FWrap(Arc<DiscFieldF>);
impl ComplexField2 for FWrap {
    fn value(&self, p: [f64; 2]) -> C64 {
        self.0.value(p)
    }
    fn jac(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        self.0.jac(p)
    }
}

#[test]
fn antiperiodicity_constant_plateau() {
    let cutoffs = make_cutoffs(CutoffSpec::default()).unwrap();
    // u constant at the gamma plateau: U(theta) = i e^{i theta} - sin theta
    let n = 32u32;
    let u = vec![2.0; 256];
    let r = antiperiodicity_check(&u, &cutoffs, n, 1e-12).unwrap();
    assert!(r.pass, "{:?}", r.residuals);

    // a 2 pi / n periodic band profile: sin(n theta) has period 2 pi / n
    let saw = hulllab_core::bump::SawtoothSpec::default();
    let u: Vec<f64> = (0..512)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / 512.0;
            0.1 + 0.03 * (th * saw.n as f64).sin()
        })
        .collect();
    let r = antiperiodicity_check(&u, &cutoffs, saw.n, 1e-8).unwrap();
    assert!(r.pass, "{:?}", r.residuals);

    // breaking periodicity with a bump breaks antiperiodicity
    let u_broken: Vec<f64> = (0..512)
        .map(|i| {
            let th = -PI + 2.0 * PI * i as f64 / 512.0;
            let bump = if (th - PI / 2.0).abs() < 0.2 { 0.05 } else { 0.0 };
            0.1 + 0.03 * (th * saw.n as f64).sin() + bump
        })
        .collect();
    let r = antiperiodicity_check(&u_broken, &cutoffs, saw.n, 1e-8).unwrap();
    assert!(!r.pass, "broken periodicity must fail");
}

#[test]
fn obstruction_trivial_cases() {
    let n = 512;
    let analytic: Vec<C64> = (0..n)
        .map(|i| C64::cis(2.0 * PI * i as f64 / n as f64))
        .collect();
    let r = disc_algebra_obstruction(&analytic, 16).unwrap();
    assert!(!r.pass, "e^{{i theta}} has no negative coefficients");

    let anti: Vec<C64> = (0..n)
        .map(|i| C64::cis(-2.0 * PI * i as f64 / n as f64))
        .collect();
    let r = disc_algebra_obstruction(&anti, 16).unwrap();
    assert!(r.pass);
    let max_neg = r
        .residuals
        .iter()
        .find(|x| x.name == "max_negative_coefficient")
        .unwrap();
    assert!((max_neg.value - 1.0).abs() < 1e-12);
}

#[test]
fn fiber_finiteness_cases() {
    let r = rp2_fiber_finiteness(-2.0, 0.3, 100_000);
    assert!(r.pass);
    assert!(r.details["solution_set"] == "empty");
    let r = rp2_fiber_finiteness(-1.0, 0.0, 100_000);
    assert!(r.pass);
    let r = rp2_fiber_finiteness(0.0, 0.0, 100_000);
    assert!(r.pass, "{:?}", r.residuals);
    assert!(r.details["root_count"].as_u64().unwrap() <= 8);
}

#[test]
fn fiber_finiteness_random_stability() {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let t = rng.random_range(-0.99..1.6);
        let w = rng.random_range(-1.5..1.5);
        let r = rp2_fiber_finiteness(t, w, 50_000);
        assert!(r.pass, "t={t} w={w}: {:?}", r.residuals);
    }
}

#[test]
fn torus_extrema() {
    let torus = build_torus();
    let g = torus_g();
    let r = extrema_verify(
        g.as_ref(),
        &torus,
        &[
            ExpectedExtremum {
                chart: 0,
                param: [0.0, 0.0],
                value: 1.5,
                is_max: true,
            },
            ExpectedExtremum {
                chart: 0,
                param: [PI, PI],
                value: -1.5,
                is_max: false,
            },
        ],
        1024,
        1024,
    );
    assert!(r.pass, "{:?}", r.residuals);
}

#[test]
fn rp2_lagrange_points() {
    let r = rp2_extrema_lagrange();
    assert!(r.pass, "{:?}", r.residuals);
}

#[test]
fn lemma_suite_400() {
    let gh = LemmaGh::with_defaults().unwrap();
    let r = lemma_gh_suite(&gh, 400, 400);
    assert!(r.pass, "{}", serde_json::to_string_pretty(&r).unwrap());
}
