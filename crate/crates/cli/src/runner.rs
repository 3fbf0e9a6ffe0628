//! Build the scenario's surface, run the requested checks, write reports,
//! exports and the manifest.

use crate::scenario::{hex, Manifest, Scenario, SurfaceKind};
use hulllab_core::bump::{sample_e1, ComplexField2, DiscFieldF, GhVariant, LemmaGh, SignFieldK};
use hulllab_core::checks::{
    antiperiodicity_check, check_axis_range, check_disc_block_det, check_immersion,
    check_totally_real, extrema_verify, fiber_peak_compat, lemma_gh_suite, rp2_extrema_lagrange,
    rp2_fiber_finiteness, sample_fiber, torus_circle_criterion, AxisSet, ExpectedExtremum,
    PeakCompatConfig, VerificationReport, TOL_MINOR, TOL_RANK,
};
use hulllab_core::mesh::{mesh_chain, mesh_splice, mesh_sphere, mesh_torus_chart, SurfaceMesh};
use hulllab_core::num::C64;
use hulllab_core::smooth::Param2;
use hulllab_core::surface::{
    build_disc_delta, build_rp2, build_sphere, build_torus, chain_rp2, chain_tori, excise_discs,
    graph_lift, rp2_g, splice_disc, sphere_g, torus_g, ChainSpec, ChainSurface, ChartedSurface,
    DiscDelta, MarkedPoint, SpliceResult, SurfaceField,
};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub manifest: Manifest,
    pub reports: Vec<VerificationReport>,
    pub out_dir: PathBuf,
}

struct DiscBundle {
    disc: DiscDelta,
    gh: Arc<LemmaGh>,
    f: Arc<DiscFieldF>,
    field: Arc<dyn SurfaceField>,
}

struct Built {
    base: Arc<ChartedSurface>,
    field: Option<Arc<dyn SurfaceField>>,
    graph: Option<Arc<ChartedSurface>>,
    chain: Option<ChainSurface>,
    splice: Option<SpliceResult>,
    disc: Option<DiscBundle>,
    bordered_nu: Option<usize>,
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

fn disc_bundle(scenario: &Scenario) -> Result<DiscBundle, RunError> {
    let cutoffs = scenario.cutoffs.unwrap_or_default();
    let saw = scenario.sawtooth.unwrap_or_default();
    let disc = build_disc_delta(cutoffs).map_err(cfg_err)?;
    let weights = hulllab_core::bump::SeriesWeights::auto(&saw);
    let gh = Arc::new(LemmaGh::build(cutoffs, saw, weights).map_err(cfg_err)?);
    let k = Arc::new(SignFieldK::new(
        saw,
        sample_e1(&saw, scenario.e1_count, scenario.seed),
    ));
    let f = Arc::new(DiscFieldF::new(gh.clone(), k));
    let field: Arc<dyn SurfaceField> =
        Arc::new(hulllab_core::surface::fields::ComplexParamField {
            inner: FWrap(f.clone()),
        });
    Ok(DiscBundle {
        disc,
        gh,
        f,
        field,
    })
}

fn cfg_err(e: hulllab_core::CoreError) -> RunError {
    RunError::Config(e.to_string())
}

fn build(scenario: &Scenario) -> Result<Built, RunError> {
    let need_graph = scenario.checks.iter().any(|c| c == "totally-real");
    match &scenario.surface {
        SurfaceKind::Torus => {
            let base = Arc::new(build_torus());
            let field = torus_g();
            let graph = need_graph
                .then(|| Arc::new(graph_lift(base.clone(), field.clone()).lifted));
            Ok(Built {
                base,
                field: Some(field),
                graph,
                chain: None,
                splice: None,
                disc: None,
                bordered_nu: None,
            })
        }
        SurfaceKind::Sphere => {
            let base = Arc::new(build_sphere());
            let field = sphere_g(&base);
            Ok(Built {
                graph: need_graph
                    .then(|| Arc::new(graph_lift(base.clone(), field.clone()).lifted)),
                base,
                field: Some(field),
                chain: None,
                splice: None,
                disc: None,
                bordered_nu: None,
            })
        }
        SurfaceKind::Rp2 => {
            let base = Arc::new(build_rp2());
            let field = rp2_g(&base);
            Ok(Built {
                graph: need_graph
                    .then(|| Arc::new(graph_lift(base.clone(), field.clone()).lifted)),
                base,
                field: Some(field),
                chain: None,
                splice: None,
                disc: None,
                bordered_nu: None,
            })
        }
        SurfaceKind::DiscDelta => {
            let bundle = disc_bundle(scenario)?;
            let base = Arc::new(bundle.disc.surface.clone());
            let graph = need_graph
                .then(|| Arc::new(graph_lift(base.clone(), bundle.field.clone()).lifted));
            Ok(Built {
                base,
                field: Some(bundle.field.clone()),
                graph,
                chain: None,
                splice: None,
                disc: Some(bundle),
                bordered_nu: None,
            })
        }
        SurfaceKind::ToriChain { m } => {
            let chain = chain_tori(ChainSpec::tori(*m)).map_err(cfg_err)?;
            let base = Arc::new(chain.surface.clone());
            let field = chain.field.clone();
            let graph = need_graph
                .then(|| Arc::new(graph_lift(base.clone(), field.clone()).lifted));
            Ok(Built {
                base,
                field: Some(field),
                graph,
                chain: Some(chain),
                splice: None,
                disc: None,
                bordered_nu: None,
            })
        }
        SurfaceKind::Rp2Chain { m } => {
            let chain = chain_rp2(ChainSpec::rp2(*m)).map_err(cfg_err)?;
            let base = Arc::new(chain.surface.clone());
            let field = chain.field.clone();
            let graph = need_graph
                .then(|| Arc::new(graph_lift(base.clone(), field.clone()).lifted));
            Ok(Built {
                base,
                field: Some(field),
                graph,
                chain: Some(chain),
                splice: None,
                disc: None,
                bordered_nu: None,
            })
        }
        SurfaceKind::Bordered { nu_discs } => {
            let chain = chain_tori(ChainSpec::tori(1)).map_err(cfg_err)?;
            let bundle = disc_bundle(scenario)?;
            let spliced =
                splice_disc(&chain, &bundle.disc, bundle.f.clone(), 1.0).map_err(cfg_err)?;
            // Excise nu discs from a totally real region of the torus part,
            // far from both the splice port and the set E: disc centers on a
            // row through parameter (2, 2), spaced widely enough that the
            // mesh resolves each boundary circle separately.
            let mut surface = spliced.surface.clone();
            let port = surface
                .marked_point(&chain.splice_port)
                .map_err(cfg_err)?
                .clone();
            let mut names = Vec::new();
            let mut centers = Vec::new();
            for j in 0..*nu_discs {
                let name = format!("border-{j}");
                let param = [
                    2.0 + 1.1 * (j as f64 - (*nu_discs as f64 - 1.0) / 2.0),
                    2.0,
                ];
                let ambient = surface.charts[port.chart].map.eval(param);
                centers.push(ambient);
                surface.marked.insert(
                    name.clone(),
                    MarkedPoint {
                        chart: port.chart,
                        param,
                        ambient,
                        aliases: vec![],
                    },
                );
                names.push(name);
            }
            // radius: a fixed fraction of the nearest-neighbor spacing (or
            // of the chart scale when there is a single disc)
            let radius = if centers.len() > 1 {
                let mut min_d = f64::INFINITY;
                for i in 0..centers.len() {
                    for j in (i + 1)..centers.len() {
                        min_d = min_d.min(centers[i].dist(&centers[j]));
                    }
                }
                0.18 * min_d
            } else {
                0.1 * spliced.rho
            };
            // ambient samples of E (disc part) to keep clear of
            let e_points: Vec<hulllab_core::smooth::CPoint> = {
                let paths = hulllab_core::bump::make_sawtooth(&bundle.gh.saw).map_err(cfg_err)?;
                let chart = &bundle.disc.surface.charts[0];
                paths
                    .z_plus
                    .vertices()
                    .into_iter()
                    .take(64)
                    .map(|p| chart.map.eval(p))
                    .collect()
            };
            let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let radii = vec![radius; names.len()];
            let bordered = excise_discs(&surface, &name_refs, &radii, &e_points).map_err(cfg_err)?;
            let base = Arc::new(bordered);
            Ok(Built {
                base,
                field: Some(spliced.field.clone() as Arc<dyn SurfaceField>),
                graph: None,
                chain: Some(chain),
                splice: Some(spliced),
                disc: Some(bundle),
                bordered_nu: Some(*nu_discs),
            })
        }
    }
}

fn tol(scenario: &Scenario, name: &str, default: f64) -> f64 {
    scenario.tolerances.get(name).copied().unwrap_or(default)
}

fn run_check(
    name: &str,
    scenario: &Scenario,
    built: &Built,
) -> Result<Vec<VerificationReport>, RunError> {
    let (nu, nv) = scenario.grid;
    let mut out = Vec::new();
    match name {
        "seams" => {
            let resid = built.base.seam_residual(128);
            let mut r = VerificationReport::new(&format!("seams:{}", built.base.name));
            r.residual("seam_residual", resid, tol(scenario, "seam", 1e-10));
            out.push(r.finish(true));
        }
        "immersion" => {
            out.push(check_immersion(
                &built.base,
                nu,
                nv,
                tol(scenario, "rank", TOL_RANK),
            ));
        }
        "block-det" => {
            let bundle = built
                .disc
                .as_ref()
                .ok_or_else(|| RunError::Config("block-det needs the disc".into()))?;
            let spec = bundle.disc.cutoffs.spec;
            out.push(check_disc_block_det(
                &bundle.disc.surface,
                &bundle.disc.cutoffs.chi,
                spec.alpha2,
                spec.alpha,
                nu,
                nv,
            ));
        }
        "totally-real" => {
            let target = built
                .graph
                .as_ref()
                .unwrap_or(&built.base);
            out.push(check_totally_real(
                target,
                nu,
                nv,
                tol(scenario, "minor", TOL_MINOR),
            ));
        }
        "extrema" => match scenario.surface {
            SurfaceKind::Torus => {
                let field = built.field.as_ref().unwrap();
                out.push(extrema_verify(
                    field.as_ref(),
                    &built.base,
                    &[
                        ExpectedExtremum {
                            chart: 0,
                            param: [0.0, 0.0],
                            value: 1.5,
                            is_max: true,
                        },
                        ExpectedExtremum {
                            chart: 0,
                            param: [std::f64::consts::PI, std::f64::consts::PI],
                            value: -1.5,
                            is_max: false,
                        },
                    ],
                    nu.max(1024),
                    nv.max(1024),
                ));
            }
            SurfaceKind::Rp2 => {
                let field = built.field.as_ref().unwrap();
                let max = built.base.marked_point("max").map_err(cfg_err)?;
                let min = built.base.marked_point("min").map_err(cfg_err)?;
                out.push(extrema_verify(
                    field.as_ref(),
                    &built.base,
                    &[
                        ExpectedExtremum {
                            chart: max.chart,
                            param: max.param,
                            value: 1.5,
                            is_max: true,
                        },
                        ExpectedExtremum {
                            chart: min.chart,
                            param: min.param,
                            value: -1.0,
                            is_max: false,
                        },
                    ],
                    nu,
                    nv,
                ));
                out.push(rp2_extrema_lagrange());
            }
            _ => {
                return Err(RunError::Config(format!(
                    "extrema not defined for {:?}",
                    scenario.surface
                )))
            }
        },
        "fiber-circles" => {
            let field = built.field.as_ref().unwrap();
            for t in [0.0, 0.6, -0.9, 1.2] {
                let s = sample_fiber(
                    field.as_ref(),
                    &built.base,
                    C64::new(t, 0.0),
                    nu.max(512),
                    nv.max(512),
                    2e-3,
                );
                let r = torus_circle_criterion(&s).map_err(cfg_err)?;
                out.push(r);
            }
        }
        "lemma-gh" => {
            let bundle = built
                .disc
                .as_ref()
                .ok_or_else(|| RunError::Config("lemma-gh needs the disc".into()))?;
            out.push(lemma_gh_suite(&bundle.gh, nu.max(400), nv.max(400)));
        }
        "axis-range" => {
            let bundle = built
                .disc
                .as_ref()
                .ok_or_else(|| RunError::Config("axis-range needs the disc".into()))?;
            out.push(check_axis_range(
                bundle.field.as_ref(),
                &bundle.disc.surface,
                nu,
                nv,
                AxisSet::SegmentAndImaginary,
                tol(scenario, "axis", 1e-9),
            ));
        }
        "antiperiodicity" => {
            let bundle = built
                .disc
                .as_ref()
                .ok_or_else(|| RunError::Config("antiperiodicity needs the disc".into()))?;
            let saw = bundle.gh.saw;
            let samples = (4 * saw.n as usize).max(256).next_power_of_two();
            // u from the level {g = c}: bisection per theta inside the band
            let c = 0.5;
            let u: Vec<f64> = (0..samples)
                .map(|i| {
                    let theta = std::f64::consts::TAU * i as f64 / samples as f64;
                    let (mut lo, mut hi) = (0.0, saw.phi3);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if bundle.gh.eval([theta, mid], GhVariant::G).0 < c {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                })
                .collect();
            out.push(
                antiperiodicity_check(
                    &u,
                    &hulllab_core::bump::make_cutoffs(bundle.disc.cutoffs.spec).map_err(cfg_err)?,
                    saw.n,
                    tol(scenario, "antiperiodicity", 1e-8),
                )
                .map_err(cfg_err)?,
            );
        }
        "fiber-compat" => {
            if let Some(chain) = &built.chain {
                out.push(hulllab_core::checks::chain_fiber_compat(
                    chain,
                    (scenario.grid.0.max(512), scenario.grid.1.max(512)),
                ));
                return Ok(out);
            }
            let bundle = built
                .disc
                .as_ref()
                .ok_or_else(|| RunError::Config("fiber-compat needs the disc".into()))?;
            let cfg = PeakCompatConfig::default();
            out.push(fiber_peak_compat(
                &bundle.f,
                bundle.field.as_ref(),
                &bundle.disc.surface,
                &cfg,
            ));
        }
        "fiber-finiteness" => {
            use rand::{RngExt, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(scenario.seed);
            let mut r = VerificationReport::new("fiber-finiteness-batch");
            let mut all = true;
            for case in 0..50 {
                let t = rng.random_range(-0.99..1.8);
                let w = rng.random_range(-1.5..1.5);
                let rep = rp2_fiber_finiteness(t, w, 100_000);
                if !rep.pass {
                    all = false;
                    r.witness(
                        &format!("case-{case}"),
                        None,
                        Some([t, w]),
                        json!("failed"),
                    );
                }
            }
            for (t, w) in [(-2.0, 0.0), (-1.0, 0.0)] {
                if !rp2_fiber_finiteness(t, w, 10_000).pass {
                    all = false;
                }
            }
            r.residual("failed_cases", if all { 0.0 } else { 1.0 }, 0.0);
            out.push(r.finish(all));
        }
        "chain-arithmetic" => {
            let chain = built
                .chain
                .as_ref()
                .ok_or_else(|| RunError::Config("chain-arithmetic needs a chain".into()))?;
            out.push(chain_arithmetic_check(chain, &scenario.surface));
        }
        "topology" => {
            out.push(topology_check(scenario, built)?);
        }
        "excision" => {
            let nu_discs = built
                .bordered_nu
                .ok_or_else(|| RunError::Config("excision needs the bordered surface".into()))?;
            let mut r = VerificationReport::new("excision");
            let holes: usize = built.base.charts.iter().map(|c| c.holes.len()).sum();
            // the splice hole is also present on the port chart
            r.residual(
                "excised_holes_missing",
                (nu_discs + 1).saturating_sub(holes) as f64,
                0.0,
            );
            out.push(r.finish(true));
        }
        "splice-integrity" => {
            let chain = built
                .chain
                .as_ref()
                .ok_or_else(|| RunError::Config("splice-integrity needs a chain".into()))?;
            let bundle_owned;
            let bundle = match &built.disc {
                Some(b) => b,
                None => {
                    bundle_owned = disc_bundle(scenario)?;
                    &bundle_owned
                }
            };
            let spliced_owned;
            let spliced = match &built.splice {
                Some(s) => s,
                None => {
                    spliced_owned =
                        splice_disc(chain, &bundle.disc, bundle.f.clone(), 1.0).map_err(cfg_err)?;
                    &spliced_owned
                }
            };
            out.push(splice_integrity_check(spliced, bundle, scenario));
        }
        other => {
            return Err(RunError::Config(format!("unknown check '{other}'")));
        }
    }
    Ok(out)
}

fn chain_arithmetic_check(chain: &ChainSurface, kind: &SurfaceKind) -> VerificationReport {
    let mut r = VerificationReport::new("chain-arithmetic");
    let mut worst = 0.0f64;
    if matches!(kind, SurfaceKind::ToriChain { .. } | SurfaceKind::Bordered { .. }) {
        // tau-orbit points
        let expect: Vec<(&str, usize, [f64; 2])> = vec![
            ("link0/min", 0, [-1.0, -1.0]),
            ("link0/max", 0, [1.0, 1.0]),
        ];
        for (name, _, want) in expect {
            if let Ok(mp) = chain.surface.marked_point(name) {
                worst = worst
                    .max((mp.ambient.z(0).re - want[0]).abs())
                    .max((mp.ambient.z(1).re - want[1]).abs())
                    .max(mp.ambient.z(0).im.abs())
                    .max(mp.ambient.z(1).im.abs());
            }
        }
        for k in 1..chain.link_charts.len() {
            if let Ok(mp) = chain.surface.marked_point(&format!("link{k}/min")) {
                let want = [-1.0 + 5.0 * k as f64, -1.0 + 2.0 * k as f64];
                worst = worst
                    .max((mp.ambient.z(0).re - want[0]).abs())
                    .max((mp.ambient.z(1).re - want[1]).abs());
            }
        }
        r.residual("tau_orbit_error", worst, 0.0);
    }
    // field ranges disjoint and ordered
    let mut ranges: Vec<(f64, f64)> = Vec::new();
    for charts in &chain.link_charts {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &ci in charts {
            for p in chain.surface.charts[ci].grid(160, 160) {
                let v = chain.field.value(ci, p).re;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        ranges.push((lo, hi));
    }
    let mut ordered = true;
    let mut min_gap = f64::INFINITY;
    for w in ranges.windows(2) {
        ordered &= w[0].1 < w[1].0;
        min_gap = min_gap.min(w[1].0 - w[0].1);
    }
    if ranges.len() > 1 {
        r.margin("range_gap_min", min_gap, 0.0);
    }
    r.details = json!({"ranges": ranges});
    r.finish(ordered)
}

fn topology_check(scenario: &Scenario, built: &Built) -> Result<VerificationReport, RunError> {
    let mut r = VerificationReport::new("topology");
    let (mesh, expected_chi, expected_orientable, expected_boundaries): (SurfaceMesh, i64, bool, usize) =
        match (&scenario.surface, &built.chain, &built.splice) {
            (SurfaceKind::Torus, _, _) => (
                mesh_torus_chart(built.base.charts[0].map.as_ref(), &|_| false, 64),
                0,
                true,
                0,
            ),
            (SurfaceKind::Sphere, _, _) => (mesh_sphere(&built.base, 64), 2, true, 0),
            (SurfaceKind::ToriChain { m }, Some(chain), _) => {
                (mesh_chain(chain, false, 64), 2 - 2 * *m as i64, true, 0)
            }
            (SurfaceKind::Rp2Chain { m }, Some(chain), _) => {
                (mesh_chain(chain, true, 64), 2 - *m as i64, false, 0)
            }
            (SurfaceKind::Bordered { nu_discs }, Some(chain), Some(spliced)) => {
                // mesh the spliced surface with the bordered holes included
                let mut surface = spliced.surface.clone();
                for (ci, chart) in built.base.charts.iter().enumerate() {
                    if ci < surface.charts.len() {
                        surface.charts[ci].holes = chart.holes.clone();
                    }
                }
                let pseudo = SpliceResult {
                    surface,
                    field: spliced.field.clone(),
                    rho: spliced.rho,
                    r_k: spliced.r_k,
                    phi_seam: spliced.phi_seam,
                    disc_chart: spliced.disc_chart,
                    port_chart: spliced.port_chart,
                    port_param: spliced.port_param,
                    reposition: spliced.reposition,
                };
                (
                    mesh_splice(chain, &pseudo, 64),
                    -(*nu_discs as i64),
                    true,
                    *nu_discs,
                )
            }
            _ => {
                return Err(RunError::Config(format!(
                    "topology check undefined for {:?}",
                    scenario.surface
                )))
            }
        };
    let chi = mesh.euler_characteristic();
    let orientable = mesh.orientable();
    let boundaries = mesh.boundary_components();
    r.residual("euler_characteristic_error", (chi - expected_chi) as f64, 0.0);
    r.residual(
        "orientability_mismatch",
        if orientable == expected_orientable { 0.0 } else { 1.0 },
        0.0,
    );
    r.residual(
        "boundary_component_error",
        (boundaries as i64 - expected_boundaries as i64).abs() as f64,
        0.0,
    );
    r.details = json!({
        "euler_characteristic": chi,
        "orientable": orientable,
        "boundary_components": boundaries,
        "vertices": mesh.vertex_count(),
        "triangles": mesh.triangles.len(),
    });
    Ok(r.finish(true))
}

fn splice_integrity_check(
    spliced: &SpliceResult,
    bundle: &DiscBundle,
    scenario: &Scenario,
) -> VerificationReport {
    let mut r = VerificationReport::new("splice-integrity");
    // seam curves agree ambient-wise
    r.residual(
        "seam_residual",
        spliced.surface.seam_residual(96),
        tol(scenario, "splice-seam", 1e-8),
    );
    // h == 1 on a band around the seam, both sides
    let mut band_err = 0.0f64;
    for i in 0..64 {
        let th = -std::f64::consts::PI + std::f64::consts::TAU * i as f64 / 64.0;
        let v = spliced
            .field
            .value(spliced.disc_chart, [th, spliced.phi_seam + 0.01]);
        band_err = band_err.max((v.re - 1.0).abs()).max(v.im.abs());
    }
    let vport = spliced.field.value(spliced.port_chart, spliced.port_param);
    band_err = band_err.max((vport.re - 1.0).abs());
    r.residual("h_one_on_seam_band", band_err, 1e-12);
    // FD smoothness across the seam: one-sided radial slopes of h agree
    // (both vanish on the constant band) and the two parametrizations land
    // in V_e
    let mut slope_jump = 0.0f64;
    let mut ve_resid = 0.0f64;
    let chart = &spliced.surface.charts[spliced.disc_chart];
    for i in 0..32 {
        let th = -std::f64::consts::PI + std::f64::consts::TAU * i as f64 / 32.0;
        let h = 1e-4;
        let inner = spliced
            .field
            .value(spliced.disc_chart, [th, spliced.phi_seam + h])
            .re;
        let inner2 = spliced
            .field
            .value(spliced.disc_chart, [th, spliced.phi_seam + 2.0 * h])
            .re;
        slope_jump = slope_jump.max(((inner2 - inner) / h).abs());
        ve_resid = ve_resid.max(hulllab_core::surface::v_e_residual(
            &chart.map.eval([th, spliced.phi_seam + 0.002]),
        ));
    }
    r.residual("seam_fd_slope_jump", slope_jump, 1e-6);
    r.residual("seam_ve_residual", ve_resid, 1e-9);
    // h^-1(0) = E in the disc parameters
    let zero = hulllab_core::checks::fiber::sample_zero_fiber(
        bundle.field.as_ref(),
        &bundle.disc.surface,
        600,
        600,
    );
    let paths = hulllab_core::bump::make_sawtooth(&bundle.gh.saw).expect("sawtooth");
    let e_set = hulllab_core::bump::EParamSet {
        e1: bundle.f.k.e1_points().to_vec(),
        paths,
    };
    let mut worst = 0.0f64;
    for p in &zero.points {
        worst = worst.max(e_set.dist(p.param));
    }
    r.residual("zero_set_distance_to_e", worst, 1e-6);
    r.margin("zero_set_samples", zero.points.len() as f64, 32.0);
    r.details = json!({"rho": spliced.rho, "r_k": spliced.r_k, "phi_seam": spliced.phi_seam});
    r.finish(true)
}

fn export_files(
    scenario: &Scenario,
    built: &Built,
    out_dir: &Path,
) -> Result<BTreeMap<String, String>, RunError> {
    let mut files = BTreeMap::new();
    for (i, e) in scenario.exports.iter().enumerate() {
        let name = format!("{}-{i}.{}", scenario.name.replace('.', "_"), e.format);
        let path = out_dir.join(&name);
        match e.format.as_str() {
            "csv" => {
                hulllab_core::export::write_csv(&built.base, scenario.grid.0, scenario.grid.1, &path)
                    .map_err(cfg_err)?;
            }
            "bin" => {
                hulllab_core::export::write_bin(&built.base, scenario.grid.0, scenario.grid.1, &path)
                    .map_err(cfg_err)?;
            }
            "obj" => {
                let mesh = match (&scenario.surface, &built.chain) {
                    (SurfaceKind::ToriChain { .. }, Some(chain)) => mesh_chain(chain, false, 64),
                    (SurfaceKind::Rp2Chain { .. }, Some(chain)) => mesh_chain(chain, true, 64),
                    (SurfaceKind::Sphere, _) => mesh_sphere(&built.base, 64),
                    _ => mesh_torus_chart(built.base.charts[0].map.as_ref(), &|_| false, 64),
                };
                hulllab_core::export::write_obj(&mesh, e.projection, &path).map_err(cfg_err)?;
            }
            other => return Err(RunError::Config(format!("unknown export format {other}"))),
        }
        files.insert(name, hash_file(&path)?);
    }
    Ok(files)
}

fn hash_file(path: &Path) -> Result<String, RunError> {
    let bytes = std::fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(hex(&h.finalize()))
}

/// Build, check, export, and write the manifest. `deterministic` omits the
/// timestamp (runs are single-threaded and bitwise reproducible either way).
pub fn run(scenario: &Scenario, out_dir: &Path, deterministic: bool) -> Result<RunOutput, RunError> {
    scenario
        .validate()
        .map_err(RunError::Config)?;
    std::fs::create_dir_all(out_dir)?;
    let built = build(scenario)?;
    let mut reports = Vec::new();
    let mut checks = BTreeMap::new();
    for name in &scenario.checks {
        let rs = run_check(name, scenario, &built)?;
        let pass = rs.iter().all(|r| r.pass);
        checks.insert(name.clone(), pass);
        reports.extend(rs);
    }
    let config_hash = scenario.config_hash();
    let mut files = BTreeMap::new();
    for (i, mut report) in reports.clone().into_iter().enumerate() {
        report.config_hash = config_hash.clone();
        let name = format!("report-{i:02}-{}.json", report.check.replace([':', '/'], "_"));
        let path = out_dir.join(&name);
        std::fs::write(&path, serde_json::to_vec_pretty(&report).unwrap())?;
        files.insert(name, hash_file(&path)?);
    }
    files.extend(export_files(scenario, &built, out_dir)?);
    let pass = checks.values().all(|&b| b);
    let manifest = Manifest {
        tool: "hulllab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: scenario.clone(),
        config_hash,
        seed: scenario.seed,
        deterministic,
        timestamp: if deterministic {
            None
        } else {
            Some(format!("{:?}", std::time::SystemTime::now()))
        },
        checks,
        files,
        pass,
    };
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_vec_pretty(&manifest).unwrap())?;
    Ok(RunOutput {
        manifest,
        reports,
        out_dir: out_dir.to_path_buf(),
    })
}
