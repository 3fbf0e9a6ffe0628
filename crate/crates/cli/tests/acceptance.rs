//! Acceptance suite: eleven criteria covering the constructions and their
//! certificates, each timed against its budget. Run with
//! `cargo test --test acceptance -- --nocapture` to see the per-criterion
//! lines; any failure panics at the end with the summary.

use hulllab::{preset, preset_names, run};
use hulllab_core::bump::{
    make_cutoffs, ramp_mu, sample_e1, ComplexField2, CutoffSpec, DiscFieldF, LemmaGh,
    SignFieldK,
};
use hulllab_core::checks::{
    check_disc_block_det, check_immersion, check_totally_real, extrema_verify,
    fiber_peak_compat, lemma_gh_suite, obstruction_grid_consistency, rp2_extrema_lagrange,
    rp2_fiber_finiteness, totally_real_failures, ExpectedExtremum, PeakCompatConfig, TOL_MINOR,
};
use hulllab_core::mesh::mesh_chain;
use hulllab_core::num::C64;
use hulllab_core::smooth::Param2;
use hulllab_core::bump::GhVariant;
use hulllab_core::surface::{
    build_disc_delta, build_rp2, build_torus, chain_rp2, chain_tori, flatten_surface, graph_lift,
    rp2_g, splice_disc, torus_g, ChainSpec, SurfaceField,
};
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

struct Criterion {
    id: usize,
    label: &'static str,
    budget: Duration,
}

struct Outcome {
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn check(c: &Criterion, f: impl FnOnce() -> (bool, String)) -> (Criterion, Outcome) {
    let t0 = Instant::now();
    let (pass, detail) = f();
    let elapsed = t0.elapsed();
    (
        Criterion { ..*c },
        Outcome {
            pass: pass && elapsed <= c.budget,
            detail: if elapsed > c.budget {
                format!("{detail}; OVER BUDGET {:?} > {:?}", elapsed, c.budget)
            } else {
                detail
            },
            elapsed,
        },
    )
}

fn disc_field() -> (Arc<LemmaGh>, Arc<DiscFieldF>, hulllab_core::surface::DiscDelta) {
    let disc = build_disc_delta(CutoffSpec::default()).unwrap();
    let gh = Arc::new(LemmaGh::with_defaults().unwrap());
    let k = Arc::new(SignFieldK::new(gh.saw, sample_e1(&gh.saw, 10_000, 42)));
    (gh.clone(), Arc::new(DiscFieldF::new(gh, k)), disc)
}

struct FWrap(Arc<DiscFieldF>);
impl ComplexField2 for FWrap {
    fn value(&self, p: Param2) -> C64 {
        self.0.value(p)
    }
    fn jac(&self, p: Param2) -> [[f64; 2]; 2] {
        self.0.jac(p)
    }
}

fn field_of(f: &Arc<DiscFieldF>) -> Arc<dyn hulllab_core::surface::SurfaceField> {
    Arc::new(hulllab_core::surface::fields::ComplexParamField {
        inner: FWrap(f.clone()),
    })
}

#[test]
fn acceptance() {
    let mut results: Vec<(Criterion, Outcome)> = Vec::new();

    // 1. torus extrema at 1024^2
    results.push(check(
        &Criterion {
            id: 1,
            label: "torus extrema 3/2 at (1,1), -3/2 at (-1,-1), 1024^2 grid",
            budget: Duration::from_secs(1),
        },
        || {
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
            (r.pass, format!("residuals {:?}", r.residuals.len()))
        },
    ));

    // 2. rp2 extrema and Lagrange points
    results.push(check(
        &Criterion {
            id: 2,
            label: "rp2 extrema 3/2 / -1/2, interior -1, Lagrange residuals < 1e-9",
            budget: Duration::from_secs(1),
        },
        || {
            let r = rp2_extrema_lagrange();
            (r.pass, format!("{} residuals", r.residuals.len()))
        },
    ));

    // 3. disc immersion + block determinant
    results.push(check(
        &Criterion {
            id: 3,
            label: "disc immersion sigma2 > 1e-6 on 512^2; block det = -chi chi' to 1e-8",
            budget: Duration::from_secs(10),
        },
        || {
            let disc = build_disc_delta(CutoffSpec::default()).unwrap();
            let imm = check_immersion(&disc.surface, 512, 512, 1e-6);
            let spec = disc.cutoffs.spec;
            let det = check_disc_block_det(
                &disc.surface,
                &disc.cutoffs.chi,
                spec.alpha2,
                spec.alpha,
                256,
                256,
            );
            (
                imm.pass && det.pass,
                format!(
                    "min sigma2 {:.3e}",
                    imm.residuals
                        .iter()
                        .find(|r| r.name == "second_singular_value_min")
                        .map(|r| r.value)
                        .unwrap_or(f64::NAN)
                ),
            )
        },
    ));

    // 4. total reality: f-graph over the disc, bare rp2, g-graph over rp2
    results.push(check(
        &Criterion {
            id: 4,
            label: "total reality: f-graph passes; bare rp2 fails only near origin; g-graph passes via dz2^df",
            budget: Duration::from_secs(30),
        },
        || {
            let (_, f, disc) = disc_field();
            let base = Arc::new(disc.surface.clone());
            let lift = graph_lift(base, field_of(&f));
            let a = check_totally_real(&lift.lifted, 512, 512, TOL_MINOR);

            let rp2 = build_rp2();
            let fails = totally_real_failures(&rp2, 512, 512, TOL_MINOR);
            let b = !fails.is_empty()
                && fails
                    .iter()
                    .all(|(ci, p, _)| rp2.eval(*ci, *p).norm() < 1e-2);

            let rp2 = Arc::new(build_rp2());
            let g = rp2_g(&rp2);
            let lift_g = graph_lift(rp2.clone(), g);
            let c = check_totally_real(&lift_g.lifted, 512, 512, TOL_MINOR);
            // dz2^df certifies at the complex tangent
            let ct = lift_g.lifted.marked_point("ct+").unwrap();
            let j = hulllab_core::smooth::ComplexJacobian::from_real(
                &lift_g.lifted.charts[ct.chart].map.jac(ct.param),
            );
            let minors = hulllab_core::smooth::complex_minors(&j);
            let d = minors[0].abs() < TOL_MINOR && minors[2].abs() > TOL_MINOR;
            (
                a.pass && b && c.pass && d,
                format!(
                    "f-graph {} | bare-rp2 fails near origin {} ({} pts) | g-graph {} | dz2^df {:.3}",
                    a.pass,
                    b,
                    fails.len(),
                    c.pass,
                    minors[2].abs()
                ),
            )
        },
    ));

    // 5. series pair property suite
    results.push(check(
        &Criterion {
            id: 5,
            label: "series pair properties (i)-(viii) + lambda > 0 on 400x400",
            budget: Duration::from_secs(30),
        },
        || {
            let gh = LemmaGh::with_defaults().unwrap();
            let r = lemma_gh_suite(&gh, 400, 400);
            (
                r.pass,
                format!(
                    "margins recorded: dphi_min {:.2e}",
                    r.residuals
                        .iter()
                        .find(|x| x.name == "ii_dphi_min")
                        .map(|x| x.value)
                        .unwrap_or(f64::NAN)
                ),
            )
        },
    ));

    // 6. level-set certificates + antiperiodicity + Fourier consistency
    results.push(check(
        &Criterion {
            id: 6,
            label: "20 level certificates; Ve containment 1e-8; Fourier N vs 2N 1e-8; antiperiodicity 1e-8",
            budget: Duration::from_secs(120),
        },
        || {
            let (gh, f, disc) = disc_field();
            let cfg = PeakCompatConfig::default();
            let field = field_of(&f);
            let compat = fiber_peak_compat(&f, field.as_ref(), &disc.surface, &cfg);
            let levels = compat.details["levels"].as_array().unwrap().len();

            // Fourier aliasing control on a real-level graph
            let gh2 = gh.clone();
            let sample_fn = move |n: usize| -> Vec<C64> {
                let chart_cutoffs = make_cutoffs(CutoffSpec::default()).unwrap();
                (0..n)
                    .map(|i| {
                        let theta = -PI + 2.0 * PI * i as f64 / n as f64;
                        let c = 0.3;
                        let (mut lo, mut hi) = (0.0, gh2.saw.phi3 + 1e-9);
                        for _ in 0..70 {
                            let mid = 0.5 * (lo + hi);
                            if gh2.eval([theta, mid], GhVariant::H).0 < c {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        let phi = 0.5 * (lo + hi);
                        let gmm = chart_cutoffs.gamma.value(phi);
                        let b = chart_cutoffs.beta.value(phi);
                        C64::cis(gmm + theta) + C64::new(b * (gmm + theta).cos(), 0.0)
                    })
                    .collect()
            };
            let fourier = obstruction_grid_consistency(&sample_fn, 8192, 24, 1e-8).unwrap();

            // antiperiodicity of the periodized graph
            let cutoffs = make_cutoffs(CutoffSpec::default()).unwrap();
            let n_samples = 512;
            let u: Vec<f64> = (0..n_samples)
                .map(|i| {
                    let theta = 2.0 * PI * i as f64 / n_samples as f64;
                    let c = 0.3;
                    let (mut lo, mut hi) = (0.0, gh.saw.phi3 + 1e-9);
                    for _ in 0..70 {
                        let mid = 0.5 * (lo + hi);
                        if gh.eval([theta, mid], GhVariant::G).0 < c {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                })
                .collect();
            let anti = hulllab_core::checks::antiperiodicity_check(&u, &cutoffs, gh.saw.n, 1e-8)
                .unwrap();
            (
                compat.pass && fourier.pass && anti.pass && levels >= 20,
                format!(
                    "{} levels | fourier {} | antiperiodicity {}",
                    levels, fourier.pass, anti.pass
                ),
            )
        },
    ));

    // 7. rp2 fiber finiteness battery
    results.push(check(
        &Criterion {
            id: 7,
            label: "50 random fibers finite & 4x-stable; dq/du3 identity 1e-9; t = -1 point; t < -1 empty",
            budget: Duration::from_secs(60),
        },
        || {
            use rand::{RngExt, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
            let mut ok = true;
            for _ in 0..50 {
                let t = rng.random_range(-0.99..1.8);
                let w = rng.random_range(-1.5..1.5);
                ok &= rp2_fiber_finiteness(t, w, 100_000).pass;
            }
            ok &= rp2_fiber_finiteness(-1.0, 0.0, 1000).pass;
            ok &= rp2_fiber_finiteness(-3.0, 0.5, 1000).pass;
            (ok, "50 random + 2 boundary cases".into())
        },
    ));

    // 8. flattening contract on the torus
    results.push(check(
        &Criterion {
            id: 8,
            label: "flatten: tangent inside B(p,eps) to 1e-10; original outside B(p,2eps); Lipschitz < bound < 1",
            budget: Duration::from_secs(30),
        },
        || {
            let (eps, eta, delta) = (0.02, 0.35, 0.02);
            let torus = build_torus();
            let t0 = flatten_surface(&torus, "max", eps, eta, delta).unwrap();
            let t0 = flatten_surface(&t0, "min", eps, eta, delta).unwrap();
            let mut tangent_resid = 0.0f64;
            let mut outside_exact = true;
            for (name, anchor) in [("max", [1.0, 1.0]), ("min", [-1.0, -1.0])] {
                let mp = t0.marked_point(name).unwrap();
                for i in 0..400 {
                    for j in 0..400 {
                        let q = [
                            mp.param[0] - 0.08 + 0.16 * i as f64 / 400.0,
                            mp.param[1] - 0.08 + 0.16 * j as f64 / 400.0,
                        ];
                        let z = t0.eval(0, q);
                        let d2 = (z.z(0) - C64::new(anchor[0], 0.0))
                            .abs_sq()
                            + (z.z(1) - C64::new(anchor[1], 0.0)).abs_sq();
                        if d2.sqrt() <= eps {
                            // tangent plane p + iR^2: real parts frozen
                            tangent_resid = tangent_resid
                                .max((z.z(0).re - anchor[0]).abs())
                                .max((z.z(1).re - anchor[1]).abs());
                        }
                        if d2.sqrt() > 2.0 * eps {
                            // graph coordinate |u| past 2 delta: bitwise original
                            let x = [z.z(0).im, z.z(1).im];
                            if x[0].hypot(x[1]) > 2.0 * delta {
                                let orig = torus.eval(0, q);
                                outside_exact &= z.coords() == orig.coords();
                            }
                        }
                    }
                }
            }
            // Lipschitz measurement over the eta-disc in graph coordinates
            let mu = ramp_mu();
            let est = hulllab_core::surface::flatten::estimate_graph(
                torus.charts[0].map.as_ref(),
                [0.0, 0.0],
                delta,
                1.1 * eta,
            )
            .unwrap();
            let bound = (8.0 * 2.0 * mu * est.k * delta).max(2.0 * est.k * eta);
            let mp = t0.marked_point("max").unwrap();
            let mut lip = 0.0f64;
            let m = 240;
            let mut prev: Option<([f64; 2], [f64; 2])> = None;
            for i in 0..m {
                for j in 0..m {
                    let q = [
                        mp.param[0] - 0.36 + 0.72 * i as f64 / m as f64,
                        mp.param[1] - 0.36 + 0.72 * j as f64 / m as f64,
                    ];
                    let z = t0.eval(0, q);
                    let x = [z.z(0).im, z.z(1).im];
                    let y = [1.0 - z.z(0).re, 1.0 - z.z(1).re];
                    if x[0].hypot(x[1]) < eta {
                        if let Some((px, py)) = prev {
                            let dx = (x[0] - px[0]).hypot(x[1] - px[1]);
                            if dx > 1e-9 && dx < 0.02 {
                                lip = lip.max((y[0] - py[0]).hypot(y[1] - py[1]) / dx);
                            }
                        }
                        prev = Some((x, y));
                    } else {
                        prev = None;
                    }
                }
                prev = None;
            }
            let ok = tangent_resid < 1e-10 && outside_exact && lip < bound && bound < 1.0;
            (
                ok,
                format!(
                    "tangent resid {:.2e} | outside exact {} | Lipschitz {:.3} < {:.3} < 1",
                    tangent_resid, outside_exact, lip, bound
                ),
            )
        },
    ));

    // 9. chain arithmetic and topology
    results.push(check(
        &Criterion {
            id: 9,
            label: "tau orbit exact; chain meshes chi = 2-2m / 2-m with correct orientability; ranges ordered",
            budget: Duration::from_secs(120),
        },
        || {
            // orbit arithmetic, exact
            let tau = |z: [f64; 2], k: i32| [z[0] + 5.0 * k as f64, z[1] + 2.0 * k as f64];
            let mut ok = tau([-1.0, -1.0], 1) == [4.0, 1.0]
                && tau([1.0, 1.0], 1) == [6.0, 3.0]
                && tau([-1.0, -1.0], 2) == [9.0, 3.0]
                && tau([1.0, 1.0], 2) == [11.0, 5.0];
            let mut detail = String::new();
            for m in 1..=3usize {
                let chain = chain_tori(ChainSpec::tori(m)).unwrap();
                // marked ports land on the exact orbit
                let mp = chain.surface.marked_point("link0/max").unwrap();
                ok &= mp.ambient.coords() == [1.0, 0.0, 1.0, 0.0];
                let mesh = mesh_chain(&chain, false, 64);
                let chi = mesh.euler_characteristic();
                ok &= chi == 2 - 2 * m as i64 && mesh.orientable();
                detail.push_str(&format!("T^{m}: chi {chi} | "));
                // ranges ordered with gaps
                let mut ranges = Vec::new();
                for charts in &chain.link_charts {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for &ci in charts {
                        for p in chain.surface.charts[ci].grid(96, 96) {
                            let v = chain.field.value(ci, p).re;
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                    ranges.push((lo, hi));
                }
                for w in ranges.windows(2) {
                    ok &= w[0].1 < w[1].0;
                }
            }
            for m in 1..=3usize {
                let chain = chain_rp2(ChainSpec::rp2(m)).unwrap();
                let mesh = mesh_chain(&chain, true, 64);
                let chi = mesh.euler_characteristic();
                ok &= chi == 2 - m as i64 && !mesh.orientable();
                detail.push_str(&format!("P^{m}: chi {chi} | "));
            }
            (ok, detail)
        },
    ));

    // 10. splice integrity
    results.push(check(
        &Criterion {
            id: 10,
            label: "splice: seam slope jump < 1e-6; h^-1(0) = E to 1e-6; h = 1 on the seam band",
            budget: Duration::from_secs(60),
        },
        || {
            let chain = chain_tori(ChainSpec::tori(1)).unwrap();
            let (_, f, disc) = disc_field();
            let spliced = splice_disc(&chain, &disc, f.clone(), 1.0).unwrap();
            let mut band_err = 0.0f64;
            let mut slope_jump = 0.0f64;
            for i in 0..64 {
                let th = -PI + 2.0 * PI * i as f64 / 64.0;
                let v = spliced
                    .field
                    .value(spliced.disc_chart, [th, spliced.phi_seam + 0.01]);
                band_err = band_err.max((v.re - 1.0).abs()).max(v.im.abs());
                let h = 1e-4;
                let a = spliced
                    .field
                    .value(spliced.disc_chart, [th, spliced.phi_seam + h])
                    .re;
                let b = spliced
                    .field
                    .value(spliced.disc_chart, [th, spliced.phi_seam + 2.0 * h])
                    .re;
                slope_jump = slope_jump.max(((b - a) / h).abs());
            }
            let vport = spliced.field.value(spliced.port_chart, spliced.port_param);
            band_err = band_err.max((vport.re - 1.0).abs());

            // zero set against E
            let field = field_of(&f);
            let zero = hulllab_core::checks::fiber::sample_zero_fiber(
                field.as_ref(),
                &disc.surface,
                700,
                700,
            );
            let paths = hulllab_core::bump::make_sawtooth(&f.gh.saw).unwrap();
            let e_set = hulllab_core::bump::EParamSet {
                e1: f.k.e1_points().to_vec(),
                paths,
            };
            let mut worst = 0.0f64;
            for p in &zero.points {
                worst = worst.max(e_set.dist(p.param));
            }
            let ok = band_err < 1e-12
                && slope_jump < 1e-6
                && worst < 1e-6
                && zero.points.len() > 32
                && spliced.surface.seam_residual(64) < 1e-8;
            (
                ok,
                format!(
                    "band {:.1e} | slope jump {:.1e} | zero-set dist {:.3e} ({} pts)",
                    band_err,
                    slope_jump,
                    worst,
                    zero.points.len()
                ),
            )
        },
    ));

    // 11. determinism across every preset
    results.push(check(
        &Criterion {
            id: 11,
            label: "two deterministic runs of every preset produce bitwise-identical manifests",
            budget: Duration::from_secs(300),
        },
        || {
            let base = std::env::temp_dir().join("hulllab-acceptance-det");
            std::fs::remove_dir_all(&base).ok();
            let mut ok = true;
            let mut detail = String::new();
            for name in preset_names() {
                let scenario = preset(name).unwrap();
                let d1 = base.join("a");
                let d2 = base.join("b");
                let r1 = run(&scenario, &d1, true).unwrap();
                let r2 = run(&scenario, &d2, true).unwrap();
                let m1 = std::fs::read(r1.out_dir.join("manifest.json")).unwrap();
                let m2 = std::fs::read(r2.out_dir.join("manifest.json")).unwrap();
                let same = m1 == m2;
                let passed = r1.manifest.pass && r2.manifest.pass;
                ok &= same && passed;
                detail.push_str(&format!(
                    "{name}: {} | ",
                    if same && passed { "ok" } else { "MISMATCH/FAIL" }
                ));
            }
            (ok, detail)
        },
    ));

    // summary
    let mut all_pass = true;
    println!("\n================ acceptance summary ================");
    for (c, o) in &results {
        println!(
            "[{}] criterion {:>2} ({:>6.2?}): {} -- {}",
            if o.pass { "PASS" } else { "FAIL" },
            c.id,
            o.elapsed,
            c.label,
            o.detail
        );
        all_pass &= o.pass;
    }
    println!("====================================================\n");
    assert!(all_pass, "acceptance criteria failed (see the summary above)");
}
