//! Connected-sum chains: m flattened tori translated by tau(z1, z2) =
//! (z1 + 5, z2 + 2), or m projective planes alternating with their
//! inversion, joined by tubes through flattened extremum ports, carrying
//! the staircase field (g0 shifted by 4k or 10k, linear on the tubes).

use super::charts::{AffineChart, AffineMap2};
use super::fields::{ChartFieldEntry, CompositeField, SignedOffsetField, SurfaceField};
use super::flatten::{flatten_function, flatten_surface, FlattenKind, TangentFrame};
use super::tube::{
    check_halfspace, cross_section, port_hole, remap_seam_pub, validate_port, TubeChart, TubeSpec,
};
use super::{builders, ChartedSurface, ComplexTangentLocus, MarkedPoint, Seam, SurfaceChart};
use crate::bump::RealField2;
use crate::error::{CoreError, Result};
use crate::num::C64;
use crate::smooth::Param2;
use std::f64::consts::PI;
use std::sync::Arc;

/// Chain configuration.
#[derive(Debug, Clone, Copy)]
pub struct ChainSpec {
    pub m: usize,
    /// Surface flattening radii.
    pub eps: f64,
    pub eta: f64,
    pub delta: f64,
    /// Function flattening window and gap.
    pub f_eps: f64,
    pub f_eta: f64,
    pub f_gap: f64,
}

impl Default for ChainSpec {
    fn default() -> Self {
        ChainSpec::tori(1)
    }
}

impl ChainSpec {
    /// Constants sized for the torus curvature (k about 1.2 on the eta-disc).
    pub fn tori(m: usize) -> ChainSpec {
        ChainSpec {
            m,
            eps: 0.02,
            eta: 0.35,
            delta: 0.02,
            f_eps: 0.05,
            f_eta: 0.45,
            f_gap: 0.03,
        }
    }

    /// Constants sized for the projective plane (k about 4 near the ports,
    /// non-orthogonal tangent splitting, flat minimum).
    pub fn rp2(m: usize) -> ChainSpec {
        ChainSpec {
            m,
            eps: 0.002,
            eta: 0.05,
            delta: 0.003,
            f_eps: 0.03,
            f_eta: 0.35,
            f_gap: 0.015,
        }
    }
}

/// Tube bookkeeping inside a chain.
#[derive(Debug, Clone, Copy)]
pub struct ChainTube {
    pub chart: usize,
    pub spec: TubeSpec,
    pub to_ambient: AffineMap2,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Built chain with its staircase field.
pub struct ChainSurface {
    pub surface: ChartedSurface,
    /// The raw staircase field f.
    pub field: Arc<dyn SurfaceField>,
    /// Shift making f + shift satisfy the splice hypotheses (5/2 or 2).
    pub field_shift: f64,
    /// Chart indices per link.
    pub link_charts: Vec<Vec<usize>>,
    pub tubes: Vec<ChainTube>,
    /// Field range offset per link (4k or 10k).
    pub link_offsets: Vec<f64>,
    /// Marked-point name of the splice port (flat minimum of link 0).
    pub splice_port: String,
}

impl ChainSurface {
    pub fn tube_charts(&self) -> Vec<usize> {
        self.tubes.iter().map(|t| t.chart).collect()
    }

    /// Cross-section circle of tube `i` at axial position t, in frame
    /// coordinates: returns (rho(t), ambient samples, frame map).
    pub fn tube_cross_section(
        &self,
        i: usize,
        t: f64,
        n: usize,
    ) -> (f64, Vec<crate::smooth::CPoint>, AffineMap2) {
        let tube = &self.tubes[i];
        let chart = TubeChart {
            spec: tube.spec,
            to_ambient: tube.to_ambient,
        };
        let (rho, pts) = cross_section(&chart, t, n);
        (rho, pts, tube.to_ambient)
    }
}

/// View a multi-chart surface field as a one-chart real field.
struct FieldChartView {
    field: Arc<dyn SurfaceField>,
    chart: usize,
}

impl RealField2 for FieldChartView {
    fn value(&self, p: Param2) -> f64 {
        self.field.value(self.chart, p).re
    }
    fn grad(&self, p: Param2) -> [f64; 2] {
        self.field.jac(self.chart, p)[0]
    }
}

/// Push a surface through a complex-affine map (translation, inversion).
fn transform_surface(src: &ChartedSurface, map: AffineMap2, name: &str) -> ChartedSurface {
    let mut out = ChartedSurface::new(name, src.ambient_n);
    for chart in &src.charts {
        let mut c = SurfaceChart::new(
            &chart.name,
            Arc::new(AffineChart {
                inner: chart.map.clone(),
                map,
            }),
        );
        c.grid_margin = chart.grid_margin;
        c.fd_margin = chart.fd_margin;
        c.holes = chart.holes.clone();
        out.charts.push(c);
    }
    out.seams = src
        .seams
        .iter()
        .map(|s| match s {
            Seam::Collapse {
                chart,
                curve,
                point,
            } => Seam::Collapse {
                chart: *chart,
                curve: curve.clone(),
                point: map.apply_point(point),
            },
            other => other.clone(),
        })
        .collect();
    for (k, mp) in &src.marked {
        out.marked.insert(
            k.clone(),
            MarkedPoint {
                chart: mp.chart,
                param: mp.param,
                ambient: map.apply_point(&mp.ambient),
                aliases: mp.aliases.clone(),
            },
        );
    }
    out.complex_tangent_loci = src.complex_tangent_loci.clone();
    out
}

/// Linear functional ell(t) = Im(c . t) used to pick the second frame
/// column inside the tangent plane.
fn ell(c: [f64; 2], t: [C64; 2]) -> f64 {
    c[0] * t[0].im + c[1] * t[1].im
}

/// Build the complex-affine frame for a tube between two ports whose
/// tangent planes coincide (as subspaces) and contain i * w_conn.
///
/// `c` is the separating real-linear functional (coefficients of Re z):
/// the frame's Re w1 becomes (c . z - c . port1) / (c . w_conn), so the
/// half-space hypotheses reduce to bounds on that functional.
fn frame_for_link(
    frame1: &TangentFrame,
    port1: [C64; 2],
    w_conn: [C64; 2],
    c: [f64; 2],
) -> Result<AffineMap2> {
    let t1 = [frame1.a[0][0], frame1.a[1][0]];
    let t2 = [frame1.a[0][1], frame1.a[1][1]];
    // i w_conn must lie in the tangent plane: solve i w_conn = alpha t1 + beta t2
    // over R (4 equations, 2 unknowns) and check the residual.
    let iw = [C64::I * w_conn[0], C64::I * w_conn[1]];
    let rows = [
        [t1[0].re, t2[0].re, iw[0].re],
        [t1[0].im, t2[0].im, iw[0].im],
        [t1[1].re, t2[1].re, iw[1].re],
        [t1[1].im, t2[1].im, iw[1].im],
    ];
    // normal equations
    let mut ata = [[0.0; 2]; 2];
    let mut atb = [0.0; 2];
    for r in &rows {
        for i in 0..2 {
            for j in 0..2 {
                ata[i][j] += r[i] * r[j];
            }
            atb[i] += r[i] * r[2];
        }
    }
    let sol = crate::num::solve2(ata, atb).ok_or_else(|| {
        CoreError::DegenerateTangent("port tangent frame collapsed".into())
    })?;
    let mut resid: f64 = 0.0;
    for r in &rows {
        resid = resid.max((r[0] * sol[0] + r[1] * sol[1] - r[2]).abs());
    }
    if resid > 1e-8 {
        return Err(CoreError::TubeHypothesis {
            hypothesis: format!("i * link vector not tangent at the port (residual {resid:.2e})"),
            w0: sol[0],
            w1: sol[1],
        });
    }
    // t_pick in ker(ell) so that the frame's Re w1 is proportional to c . z
    let (l1, l2) = (ell(c, t1), ell(c, t2));
    let (alpha, beta) = if l1.abs().max(l2.abs()) < 1e-14 {
        (1.0, 0.0)
    } else {
        (l2, -l1)
    };
    let t_pick = [
        t1[0].scale(alpha) + t2[0].scale(beta),
        t1[1].scale(alpha) + t2[1].scale(beta),
    ];
    let norm = (t_pick[0].abs_sq() + t_pick[1].abs_sq()).sqrt();
    if norm < 1e-12 {
        return Err(CoreError::DegenerateTangent(
            "frame column selection degenerate".into(),
        ));
    }
    let s = [
        (-C64::I * t_pick[0]).scale(1.0 / norm),
        (-C64::I * t_pick[1]).scale(1.0 / norm),
    ];
    let m = AffineMap2::from_columns(w_conn, s);
    if m.det().abs() < 1e-12 {
        return Err(CoreError::DegenerateTangent("tube frame singular".into()));
    }
    let mut to_frame = m.inverse().unwrap();
    // shift so that port1 lands at the origin
    let img = to_frame.apply(port1);
    to_frame.shift = [to_frame.shift[0] - img[0], to_frame.shift[1] - img[1]];
    Ok(to_frame)
}

struct LinkData {
    surface: ChartedSurface,
    entries: Vec<ChartFieldEntry>,
    offset: f64,
}

/// Frame selection per tube: returns (ambient -> frame map, a, b).
type FrameBuilder<'a> =
    &'a dyn Fn(usize, &TangentFrame, [C64; 2], [C64; 2]) -> Result<(AffineMap2, f64, f64)>;

/// Assemble links and tubes into one surface + staircase field.
#[allow(clippy::too_many_arguments)]
fn assemble_chain(
    name: &str,
    links: Vec<LinkData>,
    right_port: &str,
    left_port: &str,
    c_functional: [f64; 2],
    delta: f64,
    field_shift: f64,
    splice_port_link0: &str,
    frame_builder: FrameBuilder<'_>,
) -> Result<ChainSurface> {
    let m = links.len();
    let mut surface = ChartedSurface::new(name, 2);
    let mut entries: Vec<ChartFieldEntry> = Vec::new();
    let mut link_charts: Vec<Vec<usize>> = Vec::new();
    let mut tubes: Vec<ChainTube> = Vec::new();

    // first pass: copy link charts
    let mut offsets = Vec::new();
    for (k, link) in links.iter().enumerate() {
        let base = surface.charts.len();
        offsets.push(base);
        let ids: Vec<usize> = (0..link.surface.charts.len()).map(|i| base + i).collect();
        link_charts.push(ids);
        for chart in &link.surface.charts {
            let mut c = chart.clone();
            c.name = format!("link{k}/{}", chart.name);
            surface.charts.push(c);
        }
        for seam in &link.surface.seams {
            surface.seams.push(remap_seam_pub(seam, base));
        }
        for (nm, mp) in &link.surface.marked {
            surface.marked.insert(
                format!("link{k}/{nm}"),
                MarkedPoint {
                    chart: mp.chart + base,
                    param: mp.param,
                    ambient: mp.ambient,
                    aliases: mp.aliases.iter().map(|(c, q)| (c + base, *q)).collect(),
                },
            );
        }
        for locus in &link.surface.complex_tangent_loci {
            surface.complex_tangent_loci.push(ComplexTangentLocus {
                chart: locus.chart + base,
                param: locus.param,
                radius: locus.radius,
            });
        }
    }
    for link in &links {
        for e in &link.entries {
            entries.push(match e {
                ChartFieldEntry::Real { inner, offset } => ChartFieldEntry::Real {
                    inner: inner.clone(),
                    offset: *offset,
                },
                ChartFieldEntry::TubeLinear { lo, hi } => ChartFieldEntry::TubeLinear {
                    lo: *lo,
                    hi: *hi,
                },
                ChartFieldEntry::Complex { inner } => ChartFieldEntry::Complex {
                    inner: inner.clone(),
                },
            });
        }
    }

    // strip disjointness of the separating functional
    let mut ranges: Vec<(f64, f64)> = Vec::new();
    for link in &links {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for chart in &link.surface.charts {
            for p in chart.grid(48, 48) {
                let z = chart.map.eval(p);
                let v = c_functional[0] * z.z(0).re + c_functional[1] * z.z(1).re;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        ranges.push((lo, hi));
    }
    for k in 0..m.saturating_sub(1) {
        if !(ranges[k].1 <= ranges[k + 1].0 + 1e-9) {
            return Err(CoreError::OrderingViolation {
                requirement: format!("link strips {k} and {} must be disjoint", k + 1),
                values: vec![ranges[k].1, ranges[k + 1].0],
            });
        }
    }

    // second pass: tubes
    for k in 0..m.saturating_sub(1) {
        let s1 = &links[k].surface;
        let s2 = &links[k + 1].surface;
        let mp1 = s1.marked_point(right_port)?;
        let mp2 = s2.marked_point(left_port)?;
        let port1 = [mp1.ambient.z(0), mp1.ambient.z(1)];
        let port2 = [mp2.ambient.z(0), mp2.ambient.z(1)];
        let w_conn = [port2[0] - port1[0], port2[1] - port1[1]];
        let frame1 = TangentFrame::at(s1.charts[mp1.chart].map.as_ref(), mp1.param)?;
        let (to_frame, fa, fb) = frame_builder(k, &frame1, port1, w_conn)?;

        // port radius from the frame geometry: keep the doubled disc well
        // inside the flat patch
        let mut sigma_min = f64::INFINITY;
        for (s, mp) in [(s1, mp1), (s2, mp2)] {
            let fr = TangentFrame::at(s.charts[mp.chart].map.as_ref(), mp.param)?;
            let mut b = [[0.0; 2]; 2];
            for j in 0..2 {
                let t = [fr.a[0][j], fr.a[1][j]];
                let w = to_frame.apply_linear(t);
                b[0][j] = w[0].im;
                b[1][j] = w[1].im;
            }
            let s = crate::num::singular_values_mx2(&[b[0], b[1]]);
            sigma_min = sigma_min.min(s[1]);
        }
        let r0 = 0.2 * delta * sigma_min;
        let spec = TubeSpec { a: fa, b: fb, r0 };

        let p1 = validate_port(s1, right_port, &to_frame, spec.a, spec.r0)?;
        let p2 = validate_port(s2, left_port, &to_frame, spec.b, spec.r0)?;
        check_halfspace(s1, &to_frame, spec.a, false)?;
        check_halfspace(s2, &to_frame, spec.b, true)?;

        // holes on every covering chart
        for (link_idx, port) in [(k, &p1), (k + 1, &p2)] {
            let anchor = if link_idx == k { spec.a } else { spec.b };
            for site in &port.sites {
                let global = link_charts[link_idx][site.chart];
                let (hole, _) = port_hole(
                    links[link_idx].surface.charts[site.chart].map.clone(),
                    site,
                    &to_frame,
                    anchor,
                    spec.r0,
                );
                surface.charts[global].holes.push(hole);
            }
        }

        let to_ambient = to_frame
            .inverse()
            .ok_or_else(|| CoreError::DegenerateTangent("tube frame singular".into()))?;
        let tube_idx = surface.charts.len();
        surface.charts.push(SurfaceChart::new(
            &format!("tube{k}"),
            Arc::new(TubeChart { spec, to_ambient }),
        ));
        for psi in [PI / 2.0, -PI / 2.0] {
            surface.complex_tangent_loci.push(ComplexTangentLocus {
                chart: tube_idx,
                param: [0.5, psi],
                radius: 0.45,
            });
        }
        // seams: tube ends against the primary port boundaries
        let (_, curve1) = port_hole(
            s1.charts[p1.primary().chart].map.clone(),
            p1.primary(),
            &to_frame,
            spec.a,
            spec.r0,
        );
        let (_, curve2) = port_hole(
            s2.charts[p2.primary().chart].map.clone(),
            p2.primary(),
            &to_frame,
            spec.b,
            spec.r0,
        );
        surface.seams.push(Seam::Curves {
            chart_a: tube_idx,
            a: Arc::new(|t| [0.0, -PI + 2.0 * PI * t]),
            chart_b: link_charts[k][p1.primary().chart],
            b: curve1,
        });
        surface.seams.push(Seam::Curves {
            chart_a: tube_idx,
            a: Arc::new(|t| [1.0, -PI + 2.0 * PI * t]),
            chart_b: link_charts[k + 1][p2.primary().chart],
            b: curve2,
        });

        // field on the tube: plateau of link k's right port to plateau of
        // link k+1's left port
        let f_lo = {
            let e = &entries[link_charts[k][mp1.chart]];
            match e {
                ChartFieldEntry::Real { inner, offset } => inner.value(mp1.param) + offset,
                _ => unreachable!(),
            }
        };
        let f_hi = {
            let e = &entries[link_charts[k + 1][mp2.chart]];
            match e {
                ChartFieldEntry::Real { inner, offset } => inner.value(mp2.param) + offset,
                _ => unreachable!(),
            }
        };
        entries.push(ChartFieldEntry::TubeLinear { lo: f_lo, hi: f_hi });
        tubes.push(ChainTube {
            chart: tube_idx,
            spec,
            to_ambient,
            f_lo,
            f_hi,
        });
    }

    let field = Arc::new(CompositeField {
        entries,
        real: true,
    });
    Ok(ChainSurface {
        surface,
        field,
        field_shift,
        link_charts,
        tubes,
        link_offsets: links.iter().map(|l| l.offset).collect(),
        splice_port: format!("link0/{splice_port_link0}"),
    })
}

/// tau(z1, z2) = (z1 + 5, z2 + 2).
pub fn tau_tori(z: [C64; 2]) -> [C64; 2] {
    [z[0] + C64::new(5.0, 0.0), z[1] + C64::new(2.0, 0.0)]
}

/// Chain of m flattened tori joined along the real-z1 gaps; the staircase
/// field on link k is g0 + 4k and the certified field is f + 5/2.
pub fn chain_tori(spec: ChainSpec) -> Result<ChainSurface> {
    if spec.m < 1 {
        return Err(CoreError::InvalidArgument("chain needs m >= 1".into()));
    }
    let torus = builders::build_torus();
    let t0 = flatten_surface(&torus, "max", spec.eps, spec.eta, spec.delta)?;
    let t0 = flatten_surface(&t0, "min", spec.eps, spec.eta, spec.delta)?;
    let g = builders::torus_g();
    let g0 = flatten_function(
        g,
        &t0,
        "max",
        spec.f_eps,
        spec.f_eta,
        spec.f_gap,
        FlattenKind::Max,
    )?;
    let g0 = flatten_function(
        g0,
        &t0,
        "min",
        spec.f_eps,
        spec.f_eta,
        spec.f_gap,
        FlattenKind::Min,
    )?;
    let g0: Arc<dyn SurfaceField> = g0;

    let mut links = Vec::new();
    for k in 0..spec.m {
        let shift = AffineMap2::translation(
            C64::new(5.0 * k as f64, 0.0),
            C64::new(2.0 * k as f64, 0.0),
        );
        let s = transform_surface(&t0, shift, &format!("t{k}"));
        let entries = vec![ChartFieldEntry::Real {
            inner: Arc::new(FieldChartView {
                field: g0.clone(),
                chart: 0,
            }),
            offset: 4.0 * k as f64,
        }];
        links.push(LinkData {
            surface: s,
            entries,
            offset: 4.0 * k as f64,
        });
    }
    assemble_chain(
        "tori-chain",
        links,
        "max",
        "min",
        [1.0, 0.0],
        spec.delta,
        2.5,
        "min",
        // Pure translation: port k at tau^k(1, 1) goes to (1, 0), the next
        // minimum to (4, 0); tangent planes are already i R^2 translates.
        &|_k, _frame, port1, _w| {
            let shift = [C64::ONE - port1[0], -port1[1]];
            Ok((
                AffineMap2 {
                    m: AffineMap2::identity().m,
                    shift,
                },
                1.0,
                4.0,
            ))
        },
    )
}

/// Chain of m projective planes: even links are P0, odd links its
/// inversion, translated so consecutive flat ports differ by the vectors
/// u, v with g(u) = g(v) = 10; field on link k is +-g0 + 10k and the
/// certified field is f + 2.
pub fn chain_rp2(spec: ChainSpec) -> Result<ChainSurface> {
    if spec.m < 1 {
        return Err(CoreError::InvalidArgument("chain needs m >= 1".into()));
    }
    let rp2 = builders::build_rp2();
    let p0 = flatten_surface(&rp2, "max", spec.eps, spec.eta, spec.delta)?;
    let p0 = flatten_surface(&p0, "min", spec.eps, spec.eta, spec.delta)?;
    let g = builders::rp2_g(&rp2);
    let g0 = flatten_function(
        g,
        &p0,
        "max",
        spec.f_eps,
        spec.f_eta,
        spec.f_gap,
        FlattenKind::Max,
    )?;
    let g0 = flatten_function(
        g0,
        &p0,
        "min",
        spec.f_eps,
        spec.f_eta,
        spec.f_gap,
        FlattenKind::Min,
    )?;
    let g0: Arc<dyn SurfaceField> = g0;

    // least-norm vectors with i u, i v tangent at the ports and g = 10
    let sqrt3 = 3f64.sqrt();
    let u = [C64::new(2.5, 0.0), C64::new(2.5 * sqrt3, 0.0)];
    let b_v = 20.0 / (3.0 * sqrt3);
    let v = [C64::new(sqrt3 * b_v, 0.0), C64::new(0.5 * b_v, 0.0)];
    debug_assert!((u[0].re + sqrt3 * u[1].re - 10.0).abs() < 1e-12);
    debug_assert!((v[0].re + sqrt3 * v[1].re - 10.0).abs() < 1e-12);

    // marked ambient positions on P0
    let max_amb = [C64::new(0.75, 0.0), C64::new(sqrt3 / 4.0, 0.0)];
    let min_amb = [C64::new(-1.0, 0.0), C64::ZERO];

    // translations: a_0 = 0; even k: a_{k+1} = a_k + v + (max - (-max));
    // odd k: a_{k+1} = a_k + u + ((1,0) - (-1,0) reversed)
    let mut shifts: Vec<[C64; 2]> = vec![[C64::ZERO, C64::ZERO]];
    for k in 0..spec.m.saturating_sub(1) {
        let prev = shifts[k];
        let next = if k % 2 == 0 {
            // tau_{k+1}(-max) - tau_k(max) = v
            [
                prev[0] + v[0] + max_amb[0].scale(2.0),
                prev[1] + v[1] + max_amb[1].scale(2.0),
            ]
        } else {
            // tau_{k+1}(min) - tau_k(-min) = u
            [
                prev[0] + u[0] - min_amb[0].scale(2.0),
                prev[1] + u[1] - min_amb[1].scale(2.0),
            ]
        };
        shifts.push(next);
    }

    // Inverted copy: surface -P0; on it the field g~0 = -g0 with
    // max 1 at (1, 0) (the image of P0's min patch) and min -3/2 at
    // -(3/4, sqrt3/4) (the image of P0's max patch).
    let mut links = Vec::new();
    for k in 0..spec.m {
        let even = k % 2 == 0;
        let base_map = if even {
            AffineMap2::translation(shifts[k][0], shifts[k][1])
        } else {
            let mut m = AffineMap2::inversion();
            m.shift = shifts[k];
            m
        };
        let mut s = transform_surface(&p0, base_map, &format!("p{k}"));
        if !even {
            // port roles swap under inversion: the "max" port of the link is
            // the image of P0's min patch and vice versa
            let max_mp = s.marked.remove("max").unwrap();
            let min_mp = s.marked.remove("min").unwrap();
            s.marked.insert("max".into(), min_mp);
            s.marked.insert("min".into(), max_mp);
        }
        let sign = if even { 1.0 } else { -1.0 };
        let entries: Vec<ChartFieldEntry> = (0..s.charts.len())
            .map(|chart| ChartFieldEntry::Real {
                inner: Arc::new(SignedOffsetField {
                    inner: Arc::new(FieldChartView {
                        field: g0.clone(),
                        chart,
                    }),
                    sign,
                    offset: 0.0,
                }),
                offset: 10.0 * k as f64,
            })
            .collect();
        links.push(LinkData {
            surface: s,
            entries,
            offset: 10.0 * k as f64,
        });
    }
    assemble_chain(
        "rp2-chain",
        links,
        "max",
        "min",
        [1.0, sqrt3],
        spec.delta,
        2.0,
        "min",
        &|_k, frame1, port1, w_conn| {
            let f = frame_for_link(frame1, port1, w_conn, [1.0, sqrt3])?;
            Ok((f, 0.0, 1.0))
        },
    )
}

