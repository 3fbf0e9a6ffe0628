//! Finite-difference oracle sweeps and the minor/rank duality property.

use hulllab_core::bump::{sample_e1, CutoffSpec, DiscFieldF, LemmaGh, SignFieldK, E1_WALL_RADIUS};
use hulllab_core::num::C64;
use hulllab_core::smooth::{
    complex_dependence_sigma, complex_minors, fd_jacobian, ComplexJacobian, Param2,
};
use hulllab_core::surface::{build_disc_delta, build_rp2, build_sphere, build_torus, ChartedSurface};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn fd_sweep(surface: &ChartedSurface, points: usize, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (_, chart) in surface.charts.iter().enumerate() {
        let dom = chart.map.domain();
        let m = chart.fd_margin;
        for _ in 0..points {
            let p: Param2 = [
                rng.random_range(dom.lo[0] + m[0][0] + 1e-4..dom.hi[0] - m[0][1] - 1e-4),
                rng.random_range(dom.lo[1] + m[1][0] + 1e-4..dom.hi[1] - m[1][1] - 1e-4),
            ];
            if chart.in_hole(p) {
                continue;
            }
            let ja = chart.map.jac(p);
            let jf = fd_jacobian(chart.map.as_ref(), p, 1e-5).unwrap();
            worst = worst.max(ja.max_abs_diff(&jf));
            checked += 1;
        }
    }
    (worst, checked)
}

#[test]
fn fd_oracle_all_base_charts() {
    for (surface, pts) in [
        (build_torus(), 1000usize),
        (build_sphere(), 500),
        (build_rp2(), 500),
        (
            build_disc_delta(CutoffSpec::default()).unwrap().surface,
            1000,
        ),
    ] {
        let (worst, checked) = fd_sweep(&surface, pts, 2024);
        assert!(checked > pts / 2);
        assert!(
            worst < 1e-6,
            "{}: max |analytic - fd| = {worst:.3e}",
            surface.name
        );
    }
}

#[test]
fn fd_oracle_disc_field() {
    // gradient of f = -h + h_r + i k against centered differences, away
    // from the deliberately fine-scaled E1 dips
    let gh = Arc::new(LemmaGh::with_defaults().unwrap());
    let saw = gh.saw;
    let e1 = sample_e1(&saw, 2000, 42);
    let k = Arc::new(SignFieldK::new(saw, e1.clone()));
    let f = DiscFieldF::new(gh.clone(), k);
    use hulllab_core::bump::ComplexField2;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alpha = gh.cutoffs.alpha;
    // The series fields oscillate at the sigma-window scale pi/n; with the
    // ordering-forced n = 32 the truncation/rounding balance sits at 1e-6,
    // not at the 1e-5 used for the (much wider) chart profiles.
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    'outer: while checked < 1000 {
        let p: Param2 = [
            rng.random_range(-3.1..3.1),
            rng.random_range(-alpha + 0.02..alpha - 0.02),
        ];
        for q in &e1 {
            if (p[0] - q[0]).hypot(p[1] - q[1]) < 2.0 * E1_WALL_RADIUS {
                continue 'outer;
            }
        }
        checked += 1;
        let jac = f.jac(p);
        for (row, part) in [(0usize, 0usize), (1, 1)] {
            let fd = [
                (pick(&f, [p[0] + h, p[1]], part) - pick(&f, [p[0] - h, p[1]], part)) / (2.0 * h),
                (pick(&f, [p[0], p[1] + h], part) - pick(&f, [p[0], p[1] - h], part)) / (2.0 * h),
            ];
            worst = worst
                .max((jac[row][0] - fd[0]).abs())
                .max((jac[row][1] - fd[1]).abs());
        }
    }
    assert!(worst < 1e-6, "field fd residual {worst:.3e}");
}

fn pick(f: &DiscFieldF, p: Param2, part: usize) -> f64 {
    use hulllab_core::bump::ComplexField2;
    let v = f.value(p);
    if part == 0 {
        v.re
    } else {
        v.im
    }
}

#[test]
fn determinism_bitwise() {
    let gh = LemmaGh::with_defaults().unwrap();
    let a = gh.eval([0.873, 0.412], hulllab_core::bump::GhVariant::H);
    let b = gh.eval([0.873, 0.412], hulllab_core::bump::GhVariant::H);
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert_eq!(a.1[0].to_bits(), b.1[0].to_bits());
    let t = build_torus();
    let za = t.eval(0, [1.1, -2.2]);
    let zb = t.eval(0, [1.1, -2.2]);
    assert_eq!(za.coords(), zb.coords());
}

proptest! {
    /// Max |2x2 minor| vanishes exactly when the columns are C-linearly
    /// dependent, cross-checked against the smallest singular value of
    /// [u, iu, v, iv].
    #[test]
    fn minor_rank_duality(
        re in proptest::array::uniform6(-2.0f64..2.0),
        im in proptest::array::uniform6(-2.0f64..2.0),
        lambda_re in -2.0f64..2.0,
        lambda_im in -2.0f64..2.0,
        dependent in proptest::bool::ANY,
    ) {
        let u = [C64::new(re[0], im[0]), C64::new(re[1], im[1]), C64::new(re[2], im[2])];
        let v = if dependent {
            let l = C64::new(lambda_re, lambda_im);
            [l * u[0], l * u[1], l * u[2]]
        } else {
            [C64::new(re[3], im[3]), C64::new(re[4], im[4]), C64::new(re[5], im[5])]
        };
        let j = ComplexJacobian::from_columns(&u, &v);
        let max_minor = complex_minors(&j).iter().map(|m| m.abs()).fold(0.0f64, f64::max);
        let sigma = complex_dependence_sigma(&j);
        let scale = u.iter().chain(&v).map(|z| z.abs()).fold(0.0f64, f64::max).max(1e-9);
        if dependent {
            prop_assert!(max_minor < 1e-9 * scale * scale,
                "dependent columns produced minor {max_minor}");
            prop_assert!(sigma < 1e-5 * scale, "sigma {sigma} for dependent columns");
        } else if max_minor > 1e-3 {
            prop_assert!(sigma > 1e-8, "independent columns with sigma {sigma}");
        }
    }
}

#[test]
fn zero_fiber_set_distance_to_e() {
    // the exact-zero set of f stays within 1e-6 of E in parameter space,
    // and E itself evaluates to (numerically) zero
    let gh = Arc::new(LemmaGh::with_defaults().unwrap());
    let saw = gh.saw;
    let e1 = sample_e1(&saw, 2000, 42);
    let k = Arc::new(SignFieldK::new(saw, e1.clone()));
    let f = Arc::new(DiscFieldF::new(gh.clone(), k));
    let disc = build_disc_delta(CutoffSpec::default()).unwrap();
    let field = hulllab_core::surface::fields::ComplexParamField {
        inner: WrapF(f.clone()),
    };
    let fiber = hulllab_core::checks::fiber::sample_zero_fiber(&field, &disc.surface, 700, 700);
    assert!(
        fiber.points.len() > 50,
        "zero fiber too sparse: {}",
        fiber.points.len()
    );
    let paths = hulllab_core::bump::make_sawtooth(&saw).unwrap();
    let e_set = hulllab_core::bump::EParamSet { e1, paths };
    let mut worst = 0.0f64;
    for p in &fiber.points {
        worst = worst.max(e_set.dist(p.param));
    }
    assert!(worst < 1e-6, "zero-set distance to E = {worst:.3e}");

    // E evaluates to zero: sawtooth path points exactly, L within 1e-12
    use hulllab_core::bump::ComplexField2;
    for seg in e_set
        .paths
        .z_plus
        .segments
        .iter()
        .chain(e_set.paths.z_minus.segments.iter())
    {
        for t in [0.0, 0.3, 0.7, 1.0] {
            let p = [
                seg[0][0] + t * (seg[1][0] - seg[0][0]),
                seg[0][1] + t * (seg[1][1] - seg[0][1]),
            ];
            assert!(f.value(p).abs() < 1e-12, "f != 0 on path at {p:?}");
        }
    }
    for q in e_set.e1.iter().take(64) {
        assert!(f.value(*q).abs() < 1e-12);
    }
}

struct WrapF(Arc<DiscFieldF>);
impl hulllab_core::bump::ComplexField2 for WrapF {
    fn value(&self, p: Param2) -> C64 {
        self.0.value(p)
    }
    fn jac(&self, p: Param2) -> [[f64; 2]; 2] {
        self.0.jac(p)
    }
}
