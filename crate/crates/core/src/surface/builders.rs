//! Constructors for the base surfaces: torus, sphere, projective plane, the
//! disc Delta, plus graph lifts and disc excision.

use super::charts::{
    DiscChart, GraphChart, PoleAxis, SphereChart, SpherePost, TorusChart, SPHERE_PHI_MAX,
};
use super::fields::{AmbientAffineField, ParamField, SurfaceField, TorusG};
use super::{trace_hole_boundary, ChartedSurface, ComplexTangentLocus, Hole, MarkedPoint, Seam, SurfaceChart};
use crate::bump::{make_cutoffs, CutoffSpec, Cutoffs};
use crate::error::{CoreError, Result};
use crate::smooth::{CPoint, ChartMap, Param2};
use std::f64::consts::PI;
use std::sync::Arc;

/// Standard torus with marked extremum points of g = cos t1 + cos t2 / 2.
pub fn build_torus() -> ChartedSurface {
    let map = Arc::new(TorusChart);
    let mut s = ChartedSurface::new("torus", 2);
    s.charts.push(SurfaceChart::new("t2", map.clone()));
    s.seams.push(Seam::Curves {
        chart_a: 0,
        a: Arc::new(|t| [-PI, -PI + 2.0 * PI * t]),
        chart_b: 0,
        b: Arc::new(|t| [PI, -PI + 2.0 * PI * t]),
    });
    s.seams.push(Seam::Curves {
        chart_a: 0,
        a: Arc::new(|t| [-PI + 2.0 * PI * t, -PI]),
        chart_b: 0,
        b: Arc::new(|t| [-PI + 2.0 * PI * t, PI]),
    });
    // exact ambient anchors: e^{0 i} = 1 and e^{i pi} = -1 (chart evaluation
    // carries sin(pi) dust, and the chain arithmetic is exact on these)
    s.marked.insert(
        "max".into(),
        MarkedPoint {
            chart: 0,
            param: [0.0, 0.0],
            ambient: CPoint::from_c2(crate::num::C64::ONE, crate::num::C64::ONE),
            aliases: vec![],
        },
    );
    s.marked.insert(
        "min".into(),
        MarkedPoint {
            chart: 0,
            param: [PI, PI],
            ambient: CPoint::from_c2(-crate::num::C64::ONE, -crate::num::C64::ONE),
            aliases: vec![],
        },
    );
    s
}

pub fn torus_g() -> Arc<dyn SurfaceField> {
    Arc::new(ParamField { inner: TorusG })
}

fn sphere_charts(post: SpherePost) -> (Arc<SphereChart>, Arc<SphereChart>) {
    (
        Arc::new(SphereChart {
            pole: PoleAxis::X2,
            post,
            phi_max: SPHERE_PHI_MAX,
        }),
        Arc::new(SphereChart {
            pole: PoleAxis::X3,
            post,
            phi_max: SPHERE_PHI_MAX,
        }),
    )
}

fn cross_chart_seam(
    a: Arc<SphereChart>,
    ai: usize,
    b: Arc<SphereChart>,
    bi: usize,
) -> Seam {
    // A band of sphere points covered by both charts.
    let sphere_pt = |t: f64| {
        let th = -PI + 2.0 * PI * t;
        let ph = 0.25f64;
        [ph.cos() * th.cos(), ph.sin() * 0.6, (1.0f64 - (ph.cos() * th.cos()).powi(2) - (ph.sin() * 0.6).powi(2)).max(0.0).sqrt()]
    };
    let ca = a.clone();
    let cb = b.clone();
    Seam::Curves {
        chart_a: ai,
        a: Arc::new(move |t| ca.params_of(sphere_pt(t))),
        chart_b: bi,
        b: Arc::new(move |t| cb.params_of(sphere_pt(t))),
    }
}

/// Unit sphere in the hyperplane x4 = 0, carrying the height field x1 + 2.
/// Complex tangents sit at (z1, z2) = (0, +-1), interior to the x2-pole chart.
pub fn build_sphere() -> ChartedSurface {
    let (a, b) = sphere_charts(SpherePost::Identity);
    let mut s = ChartedSurface::new("sphere", 2);
    s.charts.push(SurfaceChart::new("s2-a", a.clone()));
    s.charts.push(SurfaceChart::new("s2-b", b.clone()));
    s.seams.push(cross_chart_seam(a.clone(), 0, b.clone(), 1));
    // flatten/splice site: (-1, 0) on the sphere = (-1, 0, 0); both charts
    // cover it
    let pm = a.params_of([-1.0, 0.0, 0.0]);
    s.marked.insert(
        "min".into(),
        MarkedPoint {
            chart: 0,
            param: pm,
            ambient: a.eval(pm),
            aliases: vec![(1, b.params_of([-1.0, 0.0, 0.0]))],
        },
    );
    // complex tangents at the x3 poles, interior to chart a
    for (name, x3) in [("ct+", 1.0), ("ct-", -1.0)] {
        let p = a.params_of([0.0, 0.0, x3]);
        s.marked.insert(
            name.into(),
            MarkedPoint {
                chart: 0,
                param: p,
                ambient: a.eval(p),
                aliases: vec![],
            },
        );
        s.complex_tangent_loci.push(ComplexTangentLocus {
            chart: 0,
            param: p,
            radius: 0.2,
        });
    }
    s
}

/// Height field x1 + 2 on the sphere.
pub fn sphere_g(s: &ChartedSurface) -> Arc<dyn SurfaceField> {
    Arc::new(AmbientAffineField {
        maps: s.charts.iter().map(|c| c.map.clone()).collect(),
        coeffs: vec![1.0, 0.0, 0.0, 0.0],
        shift: 2.0,
    })
}

/// Projective plane P = image of the sphere under (z1^2, z1 z2), with the
/// marked extremum points of g = x1 + sqrt3 x3 and the complex tangent at
/// the origin.
pub fn build_rp2() -> ChartedSurface {
    let (a, b) = sphere_charts(SpherePost::Veronese);
    let mut s = ChartedSurface::new("rp2", 2);
    s.charts.push(SurfaceChart::new("rp2-a", a.clone()));
    s.charts.push(SurfaceChart::new("rp2-b", b.clone()));
    s.seams.push(cross_chart_seam(a.clone(), 0, b.clone(), 1));
    // antipodal identification inside chart a
    let ca = a.clone();
    s.seams.push(Seam::Curves {
        chart_a: 0,
        a: Arc::new(|t| [-1.0 + 2.0 * t, 0.3]),
        chart_b: 0,
        b: Arc::new(move |t| {
            let p = [-1.0 + 2.0 * t, 0.3];
            let _ = &ca;
            [p[0] + PI, -p[1]]
        }),
    });
    // max of g at (3/4, sqrt3/4) = image of +-(sqrt3/2, 0, 1/2); both sphere
    // preimages are interior to both charts
    let x_max = [3f64.sqrt() / 2.0, 0.0, 0.5];
    let x_max_anti = [-x_max[0], -x_max[1], -x_max[2]];
    let p_max = a.params_of(x_max);
    s.marked.insert(
        "max".into(),
        MarkedPoint {
            chart: 0,
            param: p_max,
            ambient: a.eval(p_max),
            aliases: vec![
                (0, a.params_of(x_max_anti)),
                (1, b.params_of(x_max)),
                (1, b.params_of(x_max_anti)),
            ],
        },
    );
    // min of g at (-1, 0) = image of (0, +-1, 0); the preimages sit at the
    // poles of chart a (outside its trimmed domain), so only chart b sees them
    let p_min = b.params_of([0.0, 1.0, 0.0]);
    s.marked.insert(
        "min".into(),
        MarkedPoint {
            chart: 1,
            param: p_min,
            ambient: b.eval(p_min),
            aliases: vec![(1, b.params_of([0.0, -1.0, 0.0]))],
        },
    );
    // complex tangent at (0, 0) = image of the x3 poles, interior to chart a
    for (name, x3) in [("ct+", 1.0), ("ct-", -1.0)] {
        let p = a.params_of([0.0, 0.0, x3]);
        s.marked.insert(
            name.into(),
            MarkedPoint {
                chart: 0,
                param: p,
                ambient: a.eval(p),
                aliases: vec![],
            },
        );
        s.complex_tangent_loci.push(ComplexTangentLocus {
            chart: 0,
            param: p,
            radius: 0.2,
        });
    }
    s
}

/// g = Re(z1 + sqrt3 z2) = x1 + sqrt3 x3 on the projective plane.
pub fn rp2_g(s: &ChartedSurface) -> Arc<dyn SurfaceField> {
    Arc::new(AmbientAffineField {
        maps: s.charts.iter().map(|c| c.map.clone()).collect(),
        coeffs: vec![1.0, 0.0, 3f64.sqrt(), 0.0],
        shift: 0.0,
    })
}

/// The disc Delta with its cutoff data.
pub struct DiscDelta {
    pub surface: ChartedSurface,
    pub cutoffs: Arc<Cutoffs>,
}

/// Build Delta = Phi([-pi, pi] x (-alpha, alpha]).
///
/// Verification grids stay 0.01 inside the phi ends (the top edge collapses
/// to a point, the bottom end blows up); FD validation keeps a wider margin
/// at the blow-up end where centered differences at step 1e-5 cannot track
/// the 1/(phi + alpha) growth.
pub fn build_disc_delta(spec: CutoffSpec) -> Result<DiscDelta> {
    let cutoffs = Arc::new(make_cutoffs(spec)?);
    let map = Arc::new(DiscChart {
        cutoffs: cutoffs.clone(),
    });
    let mut s = ChartedSurface::new("disc-delta", 2);
    s.charts.push(
        SurfaceChart::new("delta", map.clone()).with_margins(
            [[0.0, 0.0], [0.01, 0.01]],
            [[0.0, 0.0], [0.15, 0.02]],
        ),
    );
    let alpha = spec.alpha;
    s.seams.push(Seam::Curves {
        chart_a: 0,
        a: Arc::new(move |t| [-PI, -alpha + 0.02 + (2.0 * alpha - 0.04) * t]),
        chart_b: 0,
        b: Arc::new(move |t| [PI, -alpha + 0.02 + (2.0 * alpha - 0.04) * t]),
    });
    // top edge [-pi, pi] x {alpha} shrinks to the origin
    s.seams.push(Seam::Collapse {
        chart: 0,
        curve: Arc::new(move |t| [-PI + 2.0 * PI * t, alpha]),
        point: CPoint::from_c2(crate::num::C64::ZERO, crate::num::C64::ZERO),
    });
    Ok(DiscDelta {
        surface: s,
        cutoffs,
    })
}

/// Lifted graph surface in C^{n+1}.
pub struct GraphSurface {
    pub base: Arc<ChartedSurface>,
    pub field: Arc<dyn SurfaceField>,
    pub lifted: ChartedSurface,
}

/// Lift (surface, field) to the graph {(z, f(z))}.
pub fn graph_lift(base: Arc<ChartedSurface>, field: Arc<dyn SurfaceField>) -> GraphSurface {
    let mut lifted = ChartedSurface::new(&format!("{}-graph", base.name), base.ambient_n + 1);
    for (i, chart) in base.charts.iter().enumerate() {
        let mut c = SurfaceChart::new(
            &chart.name,
            Arc::new(GraphChart {
                base: chart.map.clone(),
                field: field.clone(),
                chart_index: i,
            }),
        );
        c.grid_margin = chart.grid_margin;
        c.fd_margin = chart.fd_margin;
        c.holes = chart.holes.clone();
        lifted.charts.push(c);
    }
    lifted.seams = base.seams.clone();
    // Collapse seams keep their base target only if the field vanishes
    // there; re-evaluate targets through the lift instead.
    lifted.seams = base
        .seams
        .iter()
        .map(|seam| match seam {
            Seam::Collapse { chart, curve, .. } => {
                let c = *chart;
                let q = curve(0.0);
                let z = lifted.charts[c].map.eval(q);
                Seam::Collapse {
                    chart: c,
                    curve: curve.clone(),
                    point: z,
                }
            }
            other => other.clone(),
        })
        .collect();
    for (name, mp) in &base.marked {
        lifted.marked.insert(
            name.clone(),
            MarkedPoint {
                chart: mp.chart,
                param: mp.param,
                ambient: lifted.charts[mp.chart].map.eval(mp.param),
                aliases: vec![],
            },
        );
    }
    lifted.complex_tangent_loci = base.complex_tangent_loci.clone();
    GraphSurface {
        base,
        field,
        lifted,
    }
}

/// Excise open discs (ambient radius `radii[i]` about the marked points
/// `centers[i]`) from a surface, yielding a bordered surface.
///
/// Closures must be pairwise disjoint and keep clear of the supplied
/// protected set (the set E of the construction).
pub fn excise_discs(
    surface: &ChartedSurface,
    centers: &[&str],
    radii: &[f64],
    protected: &[CPoint],
) -> Result<ChartedSurface> {
    if centers.len() != radii.len() {
        return Err(CoreError::ExcisionInvalid(
            "centers and radii length mismatch".into(),
        ));
    }
    let mut marked: Vec<MarkedPoint> = Vec::new();
    for name in centers {
        marked.push(surface.marked_point(name)?.clone());
    }
    for i in 0..marked.len() {
        for j in (i + 1)..marked.len() {
            let d = marked[i].ambient.dist(&marked[j].ambient);
            if d <= radii[i] + radii[j] {
                return Err(CoreError::ExcisionInvalid(format!(
                    "disc closures {i} and {j} intersect (centers {d} apart)"
                )));
            }
        }
    }
    let mut out = surface.clone();
    for (mp, &r) in marked.iter().zip(radii) {
        for q in protected {
            if q.dist(&mp.ambient) <= r {
                return Err(CoreError::ExcisionInvalid(
                    "excised disc meets the protected set".into(),
                ));
            }
        }
        let map = out.charts[mp.chart].map.clone();
        let center = mp.ambient;
        let contains = move |p: Param2| map.eval(p).dist(&center) < r;
        let boundary = trace_hole_boundary(&contains, mp.param, 1.0, 96);
        let map2 = out.charts[mp.chart].map.clone();
        let label = format!("excised-{}", out.charts[mp.chart].holes.len());
        out.charts[mp.chart].holes.push(Hole {
            label,
            contains: Arc::new(move |p: Param2| map2.eval(p).dist(&center) < r),
            boundary,
        });
    }
    out.name = format!("{}-bordered", surface.name);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::C64;

    #[test]
    fn torus_marked_points() {
        let t = build_torus();
        let max = t.marked_point("max").unwrap();
        assert_eq!(max.ambient.coords(), &[1.0, 0.0, 1.0, 0.0]);
        let g = torus_g();
        assert_eq!(g.value(0, max.param).re, 1.5);
        let min = t.marked_point("min").unwrap();
        assert_eq!(g.value(0, min.param).re, -1.5);
    }

    #[test]
    fn torus_seams_close() {
        let t = build_torus();
        assert!(t.seam_residual(64) < 1e-12);
    }

    #[test]
    fn rp2_marked_values() {
        let p = build_rp2();
        let g = rp2_g(&p);
        let max = p.marked_point("max").unwrap();
        assert!((g.value(max.chart, max.param).re - 1.5).abs() < 1e-12);
        let min = p.marked_point("min").unwrap();
        assert!((min.ambient.z(0) - C64::new(-1.0, 0.0)).abs() < 1e-12);
        assert!(min.ambient.z(1).abs() < 1e-12);
        assert!((g.value(min.chart, min.param).re + 1.0).abs() < 1e-12);
        // complex tangent marked at the origin of C^2
        let ct = p.marked_point("ct+").unwrap();
        assert!(ct.ambient.norm() < 1e-12);
    }

    #[test]
    fn rp2_seams_close() {
        let p = build_rp2();
        assert!(p.seam_residual(64) < 1e-10);
    }

    #[test]
    fn sphere_height_range() {
        let s = build_sphere();
        let g = sphere_g(&s);
        let min = s.marked_point("min").unwrap();
        assert!((g.value(min.chart, min.param).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn graph_lift_projects_back() {
        let t = Arc::new(build_torus());
        let lift = graph_lift(t.clone(), torus_g());
        for &(a, b) in &[(0.3, -1.2), (2.0, 0.5)] {
            let z3 = lift.lifted.eval(0, [a, b]);
            let z2 = t.eval(0, [a, b]);
            assert_eq!(z3.z(0), z2.z(0));
            assert_eq!(z3.z(1), z2.z(1));
            assert_eq!(z3.z(2).re, a.cos() + 0.5 * b.cos());
        }
        let max = lift.lifted.marked_point("max").unwrap();
        assert_eq!(max.ambient.coords(), &[1.0, 0.0, 1.0, 0.0, 1.5, 0.0]);
    }

    #[test]
    fn excise_rejects_overlap() {
        let t = build_torus();
        let err = excise_discs(&t, &["max", "max"], &[0.3, 0.3], &[]).unwrap_err();
        assert!(matches!(err, CoreError::ExcisionInvalid(_)));
    }

    #[test]
    fn excise_zero_discs_is_identity() {
        let t = build_torus();
        let out = excise_discs(&t, &[], &[], &[]).unwrap();
        assert_eq!(out.charts[0].holes.len(), 0);
    }

    #[test]
    fn excise_marks_hole() {
        let t = build_torus();
        let out = excise_discs(&t, &["max"], &[0.25], &[]).unwrap();
        assert_eq!(out.charts[0].holes.len(), 1);
        assert!(out.charts[0].in_hole([0.0, 0.0]));
        assert!(!out.charts[0].in_hole([1.0, 1.0]));
    }
}
