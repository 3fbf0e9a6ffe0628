//! Tube attachment: a rotational neck joining two surfaces through flat
//! round ports, in a complex-affine frame where the ports sit at (a, 0) and
//! (b, 0) with tangent planes i R^2.
//!
//! The profile is parametric: (t(s), y(s)) with t' vanishing to all orders
//! at the ends, so the union with the two vertical rays over the port
//! circles is smooth; y dips to r0/2 at the waist and returns to r0 with
//! nonzero slope at the junctions, which keeps the chart an immersion.

use super::charts::AffineMap2;
use super::flatten::TangentFrame;
use super::{trace_hole_boundary, ChartedSurface, ComplexTangentLocus, Hole, MarkedPoint, Seam, SurfaceChart};
use crate::bump::glue::{step, step_d, GLUE_C};
use crate::bump::{CertifiedInterval, IntervalProperty, Profile1D};
use crate::error::{CoreError, Result};
use crate::num::{solve2, C64};
use crate::smooth::{CPoint, ChartMap, Domain2, Param2, RealJacobian};
use serde_json::json;
use std::f64::consts::PI;
use std::sync::Arc;

/// Tube geometry: axial span [a, b], port radius r0.
#[derive(Debug, Clone, Copy)]
pub struct TubeSpec {
    pub a: f64,
    pub b: f64,
    pub r0: f64,
}

impl TubeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) || !(self.r0 > 0.0) {
            return Err(CoreError::InvalidArgument(format!(
                "tube needs a < b and r0 > 0 (got a={}, b={}, r0={})",
                self.a, self.b, self.r0
            )));
        }
        Ok(())
    }

    /// Axial position: t(s) = a + (b - a) step(s).
    pub fn t_of_s(&self, s: f64) -> f64 {
        self.a + (self.b - self.a) * step(s, GLUE_C)
    }

    pub fn dt_ds(&self, s: f64) -> f64 {
        (self.b - self.a) * step_d(s, GLUE_C)
    }

    /// Radial profile in s: r0 at the ends, r0/2 at the waist.
    pub fn y_of_s(&self, s: f64) -> f64 {
        self.r0 * (1.0 - 2.0 * s * (1.0 - s))
    }

    pub fn dy_ds(&self, s: f64) -> f64 {
        self.r0 * (4.0 * s - 2.0)
    }

    /// s(t) by bisection (step is strictly monotone inside).
    pub fn s_of_t(&self, t: f64) -> f64 {
        let target = ((t - self.a) / (self.b - self.a)).clamp(0.0, 1.0);
        if target <= 0.0 {
            return 0.0;
        }
        if target >= 1.0 {
            return 1.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if step(mid, GLUE_C) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// rho(t) = y(s(t)) as a certified profile
    /// (positive, equal to r0 at both ends).
    pub fn rho_profile(&self) -> Profile1D {
        let me = *self;
        let f = move |t: f64| me.y_of_s(me.s_of_t(t));
        let me2 = *self;
        let df = move |t: f64| {
            let s = me2.s_of_t(t);
            let dt = me2.dt_ds(s);
            if dt.abs() < 1e-30 {
                // vertical tangency at the junctions
                f64::INFINITY * me2.dy_ds(s).signum()
            } else {
                me2.dy_ds(s) / dt
            }
        };
        Profile1D::new(
            "tube-rho",
            (self.a, self.b),
            Arc::new(f),
            Arc::new(df),
            vec![CertifiedInterval {
                lo: self.a,
                hi: self.b,
                property: IntervalProperty::NonvanishingDerivative,
            }],
            None,
            json!({"a": self.a, "b": self.b, "r0": self.r0}),
        )
    }
}

/// Chart of the tube in ambient coordinates: (s, psi) ->
/// frame_inv((t(s) + i y(s) cos psi, i y(s) sin psi)).
pub struct TubeChart {
    pub spec: TubeSpec,
    /// frame coordinates -> ambient
    pub to_ambient: AffineMap2,
}

impl ChartMap for TubeChart {
    fn ambient_n(&self) -> usize {
        2
    }
    fn domain(&self) -> Domain2 {
        Domain2::rect([0.0, 1.0], [-PI, PI]).periodic_v()
    }
    fn eval(&self, p: Param2) -> CPoint {
        let (s, psi) = (p[0], p[1]);
        let t = self.spec.t_of_s(s);
        let y = self.spec.y_of_s(s);
        let w = [
            C64::new(t, y * psi.cos()),
            C64::new(0.0, y * psi.sin()),
        ];
        let z = self.to_ambient.apply(w);
        CPoint::from_c2(z[0], z[1])
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        let (s, psi) = (p[0], p[1]);
        let dt = self.spec.dt_ds(s);
        let y = self.spec.y_of_s(s);
        let dy = self.spec.dy_ds(s);
        let cols = [
            [
                C64::new(dt, dy * psi.cos()),
                C64::new(0.0, dy * psi.sin()),
            ],
            [
                C64::new(0.0, -y * psi.sin()),
                C64::new(0.0, y * psi.cos()),
            ],
        ];
        let mut j = RealJacobian::new(2);
        for (col, w) in cols.iter().enumerate() {
            let z = self.to_ambient.apply_linear(*w);
            j.set(0, col, z[0].re);
            j.set(1, col, z[0].im);
            j.set(2, col, z[1].re);
            j.set(3, col, z[1].im);
        }
        j
    }
}

/// Sampled cross-section circle C_t (frame coordinates) pushed to ambient.
pub fn cross_section(chart: &TubeChart, t: f64, n: usize) -> (f64, Vec<CPoint>) {
    let s = chart.spec.s_of_t(t);
    let rho = chart.spec.y_of_s(s);
    let pts = (0..n)
        .map(|i| {
            let psi = -PI + 2.0 * PI * i as f64 / n as f64;
            chart.eval([s, psi])
        })
        .collect();
    (rho, pts)
}

/// Everything produced by a tube join.
pub struct TubeJoin {
    pub surface: ChartedSurface,
    pub tube_chart_index: usize,
    pub spec: TubeSpec,
    pub to_ambient: AffineMap2,
}

/// Newton-solve for the parameter point of the flat patch whose graph
/// x-coordinate equals `target`.
fn invert_patch_x(
    map: &dyn ChartMap,
    frame: &TangentFrame,
    q0: Param2,
    target: [f64; 2],
) -> Param2 {
    let mut q = q0;
    for _ in 0..40 {
        let z = map.eval(q);
        let (x, _) = frame.graph_coords(&z);
        let rhs = [target[0] - x[0], target[1] - x[1]];
        if rhs[0].abs() + rhs[1].abs() < 1e-13 {
            break;
        }
        let (dx, _) = frame.graph_jac(&map.jac(q));
        if let Some(dq) = solve2(dx, rhs) {
            q = [q[0] + dq[0], q[1] + dq[1]];
        } else {
            break;
        }
    }
    q
}

/// One chart preimage of a port.
pub(crate) struct PortSite {
    pub chart: usize,
    pub param: Param2,
    pub frame: TangentFrame,
    /// x = b_inv * (frame-plane coordinates); maps frame circle to patch x.
    pub b_inv: [[f64; 2]; 2],
}

pub(crate) struct PortData {
    pub sites: Vec<PortSite>,
}

impl PortData {
    pub fn primary(&self) -> &PortSite {
        &self.sites[0]
    }
}

/// Validate a port site: ambient point maps to `anchor` = (a or b, 0) in
/// frame coordinates, tangent plane goes to iR^2, flat disc of frame radius
/// 2 r0 present.
fn validate_port_site(
    map: &dyn ChartMap,
    chart: usize,
    param: Param2,
    label: &str,
    to_frame: &AffineMap2,
    anchor: f64,
    r0: f64,
) -> Result<PortSite> {
    let ambient = map.eval(param);
    let z = to_frame.apply([ambient.z(0), ambient.z(1)]);
    let want = [C64::new(anchor, 0.0), C64::ZERO];
    if (z[0] - want[0]).abs() > 1e-9 || (z[1] - want[1]).abs() > 1e-9 {
        return Err(CoreError::TubeHypothesis {
            hypothesis: format!("port '{label}' does not map to ({anchor}, 0) in the frame"),
            w0: z[0].re,
            w1: z[1].re,
        });
    }
    let frame = TangentFrame::at(map, param)?;
    // tangent columns must land in iR^2
    let mut b = [[0.0f64; 2]; 2];
    for j in 0..2 {
        let t = [frame.a[0][j], frame.a[1][j]];
        let w = to_frame.apply_linear(t);
        if w[0].re.abs().max(w[1].re.abs()) > 1e-9 {
            return Err(CoreError::TubeHypothesis {
                hypothesis: format!("tangent plane at port '{label}' is not i R^2 in the frame"),
                w0: w[0].re,
                w1: w[1].re,
            });
        }
        b[0][j] = w[0].im;
        b[1][j] = w[1].im;
    }
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    if det.abs() < 1e-12 {
        return Err(CoreError::DegenerateTangent(format!(
            "port '{label}' frame collapse"
        )));
    }
    let b_inv = [
        [b[1][1] / det, -b[0][1] / det],
        [-b[1][0] / det, b[0][0] / det],
    ];
    // flat disc of frame radius 2 r0: sample the ring, check flatness
    for i in 0..48 {
        let psi = 2.0 * PI * i as f64 / 48.0;
        let target = [2.0 * r0 * psi.cos(), 2.0 * r0 * psi.sin()];
        let x = [
            b_inv[0][0] * target[0] + b_inv[0][1] * target[1],
            b_inv[1][0] * target[0] + b_inv[1][1] * target[1],
        ];
        let q = invert_patch_x(map, &frame, param, x);
        let w = to_frame.apply([map.eval(q).z(0), map.eval(q).z(1)]);
        let flat_resid = (w[0].re - anchor).abs().max(w[1].re.abs());
        if flat_resid > 1e-8 {
            return Err(CoreError::TubeHypothesis {
                hypothesis: format!(
                    "port '{label}' disc of radius 2 r0 not flat (residual {flat_resid:.2e})"
                ),
                w0: q[0],
                w1: q[1],
            });
        }
    }
    Ok(PortSite {
        chart,
        param,
        frame,
        b_inv,
    })
}

/// Validate every chart preimage of the marked port point.
pub(crate) fn validate_port(
    surface: &ChartedSurface,
    marked: &str,
    to_frame: &AffineMap2,
    anchor: f64,
    r0: f64,
) -> Result<PortData> {
    let mp = surface.marked_point(marked)?;
    let mut sites = Vec::new();
    for (chart, param) in mp.sites() {
        sites.push(validate_port_site(
            surface.charts[chart].map.as_ref(),
            chart,
            param,
            marked,
            to_frame,
            anchor,
            r0,
        )?);
    }
    Ok(PortData { sites })
}

/// Check half-space containment of a surface in frame coordinates.
pub(crate) fn check_halfspace(
    surface: &ChartedSurface,
    to_frame: &AffineMap2,
    bound: f64,
    upper: bool,
) -> Result<()> {
    for chart in &surface.charts {
        for p in chart.grid(64, 64) {
            let z = chart.map.eval(p);
            let w = to_frame.apply([z.z(0), z.z(1)]);
            let v = w[0].re;
            let ok = if upper {
                v >= bound - 1e-9
            } else {
                v <= bound + 1e-9
            };
            if !ok {
                return Err(CoreError::TubeHypothesis {
                    hypothesis: format!(
                        "half-space Re w1 {} {bound} violated (value {v})",
                        if upper { ">=" } else { "<=" }
                    ),
                    w0: p[0],
                    w1: p[1],
                });
            }
        }
    }
    Ok(())
}

/// Excision hole for one port site. Returns the hole and the boundary
/// curve psi -> param matching the tube end circle.
pub(crate) fn port_hole(
    map: Arc<dyn ChartMap>,
    site: &PortSite,
    to_frame: &AffineMap2,
    anchor: f64,
    r0: f64,
) -> (Hole, Arc<dyn Fn(f64) -> Param2 + Send + Sync>) {
    let tf = *to_frame;
    let center_param = site.param;
    let dom = map.domain();
    let contains = {
        let map = map.clone();
        move |p: Param2| {
            if dom.param_dist(p, center_param) > 1.0 {
                return false;
            }
            let z = map.eval(p);
            let w = tf.apply([z.z(0), z.z(1)]);
            let d2 = (w[0].re - anchor).powi(2)
                + w[0].im * w[0].im
                + w[1].re * w[1].re
                + w[1].im * w[1].im;
            d2 < r0 * r0
        }
    };
    let boundary = trace_hole_boundary(&contains, center_param, 0.5, 96);
    let hole = Hole {
        label: format!("port-{anchor}"),
        contains: Arc::new(contains),
        boundary,
    };
    let frame = site.frame;
    let b_inv = site.b_inv;
    let curve = Arc::new(move |t: f64| {
        let psi = -PI + 2.0 * PI * t;
        let fx = [r0 * psi.cos(), r0 * psi.sin()];
        let x = [
            b_inv[0][0] * fx[0] + b_inv[0][1] * fx[1],
            b_inv[1][0] * fx[0] + b_inv[1][1] * fx[1],
        ];
        invert_patch_x(map.as_ref(), &frame, center_param, x)
    });
    (hole, curve)
}

/// Join two surfaces by a tube between their marked flat ports.
///
/// `to_frame` maps ambient C^2 to the frame where the lemma's hypotheses
/// are checked: S1 left of Re w1 = a, S2 right of Re w1 = b, flat discs of
/// radius 2 r0 at (a, 0) and (b, 0).
pub fn attach_tube(
    s1: &ChartedSurface,
    s2: &ChartedSurface,
    ports: (&str, &str),
    to_frame: &AffineMap2,
    spec: TubeSpec,
) -> Result<TubeJoin> {
    spec.validate()?;
    let p1 = validate_port(s1, ports.0, to_frame, spec.a, spec.r0)?;
    let p2 = validate_port(s2, ports.1, to_frame, spec.b, spec.r0)?;
    check_halfspace(s1, to_frame, spec.a, false)?;
    check_halfspace(s2, to_frame, spec.b, true)?;

    let to_ambient = to_frame.inverse().ok_or_else(|| {
        CoreError::DegenerateTangent("tube frame is singular".into())
    })?;

    let mut out = ChartedSurface::new(&format!("{}#{}", s1.name, s2.name), 2);
    let mut chart_offset = Vec::new();

    for (src, port, anchor) in [(s1, &p1, spec.a), (s2, &p2, spec.b)] {
        let base = out.charts.len();
        chart_offset.push(base);
        let mut charts: Vec<SurfaceChart> = src
            .charts
            .iter()
            .map(|chart| {
                let mut c = chart.clone();
                c.name = format!("{}/{}", src.name, chart.name);
                c
            })
            .collect();
        for site in &port.sites {
            let (hole, _) = port_hole(
                src.charts[site.chart].map.clone(),
                site,
                to_frame,
                anchor,
                spec.r0,
            );
            charts[site.chart].holes.push(hole);
        }
        out.charts.extend(charts);
        for seam in &src.seams {
            out.seams.push(remap_seam(seam, base));
        }
        for (name, mp) in &src.marked {
            out.marked.insert(
                format!("{}/{}", src.name, name),
                MarkedPoint {
                    chart: mp.chart + base,
                    param: mp.param,
                    ambient: mp.ambient,
                    aliases: mp
                        .aliases
                        .iter()
                        .map(|(c, q)| (c + base, *q))
                        .collect(),
                },
            );
        }
        for locus in &src.complex_tangent_loci {
            out.complex_tangent_loci.push(ComplexTangentLocus {
                chart: locus.chart + base,
                param: locus.param,
                radius: locus.radius,
            });
        }
    }

    let tube_chart_index = out.charts.len();
    let tube = Arc::new(TubeChart { spec, to_ambient });
    out.charts.push(SurfaceChart::new("tube", tube.clone()));
    // waist complex tangents at (1/2, +-pi/2)
    for psi in [PI / 2.0, -PI / 2.0] {
        out.complex_tangent_loci.push(ComplexTangentLocus {
            chart: tube_chart_index,
            param: [0.5, psi],
            radius: 0.45,
        });
    }

    // tube-end seams against the primary port boundaries
    let (_, curve1) = port_hole(
        s1.charts[p1.primary().chart].map.clone(),
        p1.primary(),
        to_frame,
        spec.a,
        spec.r0,
    );
    let (_, curve2) = port_hole(
        s2.charts[p2.primary().chart].map.clone(),
        p2.primary(),
        to_frame,
        spec.b,
        spec.r0,
    );
    out.seams.push(Seam::Curves {
        chart_a: tube_chart_index,
        a: Arc::new(move |t| [0.0, -PI + 2.0 * PI * t]),
        chart_b: chart_offset[0] + p1.primary().chart,
        b: curve1,
    });
    out.seams.push(Seam::Curves {
        chart_a: tube_chart_index,
        a: Arc::new(move |t| [1.0, -PI + 2.0 * PI * t]),
        chart_b: chart_offset[1] + p2.primary().chart,
        b: curve2,
    });

    Ok(TubeJoin {
        surface: out,
        tube_chart_index,
        spec,
        to_ambient,
    })
}

pub(crate) fn remap_seam_pub(seam: &Seam, offset: usize) -> Seam {
    remap_seam(seam, offset)
}

fn remap_seam(seam: &Seam, offset: usize) -> Seam {
    match seam {
        Seam::Curves {
            chart_a,
            a,
            chart_b,
            b,
        } => Seam::Curves {
            chart_a: chart_a + offset,
            a: a.clone(),
            chart_b: chart_b + offset,
            b: b.clone(),
        },
        Seam::Collapse {
            chart,
            curve,
            point,
        } => Seam::Collapse {
            chart: chart + offset,
            curve: curve.clone(),
            point: *point,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tube_profile_endpoints() {
        let spec = TubeSpec {
            a: 1.0,
            b: 4.0,
            r0: 0.02,
        };
        let rho = spec.rho_profile();
        assert!((rho.value(1.0) - 0.02).abs() < 1e-12);
        assert!((rho.value(4.0) - 0.02).abs() < 1e-12);
        assert!((rho.value(2.5) - 0.01).abs() < 1e-9);
        for i in 1..40 {
            let t = 1.0 + 3.0 * i as f64 / 40.0;
            assert!(rho.value(t) > 0.0);
        }
    }

    #[test]
    fn cross_sections_are_frame_circles() {
        let spec = TubeSpec {
            a: 0.0,
            b: 1.0,
            r0: 0.1,
        };
        let chart = TubeChart {
            spec,
            to_ambient: AffineMap2::identity(),
        };
        let (rho, pts) = cross_section(&chart, 0.5, 64);
        for z in pts {
            let t = z.z(0).re;
            let y = [z.z(0).im, z.z(1).im];
            assert!((t - 0.5).abs() < 1e-9);
            assert!(z.z(1).re.abs() < 1e-12);
            assert!((y[0].hypot(y[1]) - rho).abs() < 1e-10);
        }
    }

    #[test]
    fn tube_fd_jacobian() {
        let spec = TubeSpec {
            a: -1.0,
            b: 2.0,
            r0: 0.3,
        };
        let chart = TubeChart {
            spec,
            to_ambient: AffineMap2::identity(),
        };
        for &(s, psi) in &[(0.2, 0.6), (0.5, -2.0), (0.8, 3.0)] {
            let ja = chart.jac([s, psi]);
            let jf = crate::smooth::fd_jacobian(&chart, [s, psi], 1e-5).unwrap();
            assert!(ja.max_abs_diff(&jf) < 1e-6);
        }
    }

    #[test]
    fn waist_complex_tangent() {
        let spec = TubeSpec {
            a: 0.0,
            b: 1.0,
            r0: 0.5,
        };
        let chart = TubeChart {
            spec,
            to_ambient: AffineMap2::identity(),
        };
        let j = chart.jac([0.5, PI / 2.0]);
        let cj = crate::smooth::ComplexJacobian::from_real(&j);
        assert!(cj.minor(0, 1).abs() < 1e-12, "waist point should be a complex tangent");
        let j2 = chart.jac([0.3, 0.4]);
        let cj2 = crate::smooth::ComplexJacobian::from_real(&j2);
        assert!(cj2.minor(0, 1).abs() > 1e-4);
    }
}
