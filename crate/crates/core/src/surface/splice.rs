//! Splicing the disc into a chain: reposition the chain so the flat
//! minimum patch lies in the plane V_e at the origin, expand by rho,
//! remove the disc D bounded by the circle K in that plane, and glue in
//! the bounded part of Delta; the function h agrees with the (shifted)
//! chain field on the chain side and with f on the disc side, and both are
//! identically 1 on a band around the seam.

use super::builders::DiscDelta;
use super::chains::ChainSurface;
use super::charts::{AffineChart, AffineMap2};
use super::fields::{ChartFieldEntry, CompositeField, SurfaceField};
use super::flatten::TangentFrame;
use super::{trace_hole_boundary, ChartedSurface, Hole, MarkedPoint, Seam, SurfaceChart};
use crate::bump::{ComplexField2, DiscFieldF};
use crate::error::{CoreError, Result};
use crate::num::{solve2, C64};
use crate::smooth::{ChartMap, CPoint, Domain2, Param2, RealJacobian};
use std::f64::consts::PI;
use std::sync::Arc;

/// The plane V_e = {(x1 + i x2, 2 x2 - i x1)}; columns are the images of
/// the parameter basis vectors.
pub fn v_e_basis() -> [[C64; 2]; 2] {
    [
        [C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
        [C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
    ]
}

/// Parameter coordinates of a point assumed to lie on V_e.
pub fn v_e_params(z: &CPoint) -> [f64; 2] {
    [z.z(0).re, z.z(0).im]
}

/// Membership residual in V_e: |z2 - (2 x2 - i x1)|.
pub fn v_e_residual(z: &CPoint) -> f64 {
    let x1 = z.z(0).re;
    let x2 = z.z(0).im;
    (z.z(1) - C64::new(2.0 * x2, -x1)).abs()
}

/// Membership residual in V_i = {(x1 + i x2, -2 x2 + i x1)}.
pub fn v_i_residual(z: &CPoint) -> f64 {
    let x1 = z.z(0).re;
    let x2 = z.z(0).im;
    (z.z(1) - C64::new(-2.0 * x2, x1)).abs()
}

/// Disc chart restricted to phi >= phi_seam.
struct RestrictedDiscChart {
    inner: Arc<dyn ChartMap>,
    phi_seam: f64,
}

impl ChartMap for RestrictedDiscChart {
    fn ambient_n(&self) -> usize {
        self.inner.ambient_n()
    }
    fn domain(&self) -> Domain2 {
        let mut d = self.inner.domain();
        d.lo[1] = self.phi_seam;
        d.open_lo[1] = false;
        d
    }
    fn eval(&self, p: Param2) -> CPoint {
        self.inner.eval(p)
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        self.inner.jac(p)
    }
}

pub struct SpliceResult {
    pub surface: ChartedSurface,
    pub field: Arc<CompositeField>,
    pub rho: f64,
    pub r_k: f64,
    pub phi_seam: f64,
    /// Chart index of the disc part.
    pub disc_chart: usize,
    /// Chart index of the chain chart carrying the splice port.
    pub port_chart: usize,
    /// Splice port parameters in that chart.
    pub port_param: Param2,
    /// Frame: chain ambient -> V_e-positioned coordinates (before scaling).
    pub reposition: AffineMap2,
}

/// Splice the disc into the chain at its flat minimum patch.
///
/// `rho_request`: minimum expansion factor; the actual rho is the smallest
/// power of two at least 1.2 * chi(-phi3) / r_K and at least the request.
pub fn splice_disc(
    chain: &ChainSurface,
    disc: &DiscDelta,
    f_field: Arc<DiscFieldF>,
    rho_request: f64,
) -> Result<SpliceResult> {
    let mp = chain.surface.marked_point(&chain.splice_port)?.clone();
    let port_chart = mp.chart;
    let chart = &chain.surface.charts[port_chart];

    // hypothesis (iii): the shifted field is exactly 1 on the patch and
    // at least 1 everywhere
    let port_val = chain.field.value(port_chart, mp.param).re + chain.field_shift;
    if (port_val - 1.0).abs() > 1e-12 {
        return Err(CoreError::InvalidArgument(format!(
            "splice port field value {port_val} != 1 after shift"
        )));
    }
    for (ci, c) in chain.surface.charts.iter().enumerate() {
        for p in c.grid(48, 48) {
            let v = chain.field.value(ci, p).re + chain.field_shift;
            if v < 1.0 - 1e-9 {
                return Err(CoreError::InvalidArgument(format!(
                    "chain field dips below 1 after shift: {v} on chart {ci}"
                )));
            }
        }
    }

    // reposition: B maps the port tangent plane onto V_e, port to origin
    let frame = TangentFrame::at(chart.map.as_ref(), mp.param)?;
    let ve = v_e_basis();
    let t_inv = AffineMap2 {
        m: frame.a,
        shift: [C64::ZERO, C64::ZERO],
    }
    .inverse()
    .ok_or_else(|| CoreError::DegenerateTangent("splice port frame".into()))?;
    let b_lin = AffineMap2 {
        m: ve,
        shift: [C64::ZERO, C64::ZERO],
    };
    // B = V * T^-1
    let compose = |a: &AffineMap2, b: &AffineMap2| {
        // (a o b)(z) = a.shift + a.m (b.shift + b.m z)
        let mut m = [[C64::ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
            }
        }
        let s = a.apply(b.shift);
        AffineMap2 { m, shift: s }
    };
    let mut reposition = compose(&b_lin, &t_inv);
    let img = reposition.apply([mp.ambient.z(0), mp.ambient.z(1)]);
    reposition.shift = [reposition.shift[0] - img[0], reposition.shift[1] - img[1]];

    // Flat-patch radius in V_e parameters: ring-check flatness and pick r_K.
    let patch_x = |q: Param2| {
        let z = chart.map.eval(q);
        let w = reposition.apply([z.z(0), z.z(1)]);
        let zz = CPoint::from_c2(w[0], w[1]);
        (v_e_params(&zz), v_e_residual(&zz))
    };
    // The graph x-coordinate of the patch equals the V_e parameter after
    // repositioning; find a radius with exact flatness.
    let mut r_flat: f64 = 0.0;
    let mut rho_param = 1e-3;
    'outer: for _ in 0..40 {
        let mut ring_min = f64::INFINITY;
        for i in 0..48 {
            let t = std::f64::consts::TAU * i as f64 / 48.0;
            let q = [
                mp.param[0] + rho_param * t.cos(),
                mp.param[1] + rho_param * t.sin(),
            ];
            if chart.map.domain().contains(q).is_err() {
                break 'outer;
            }
            let (x, resid) = patch_x(q);
            if resid > 1e-10 {
                break 'outer;
            }
            ring_min = ring_min.min(x[0].hypot(x[1]));
        }
        r_flat = ring_min;
        rho_param *= 1.25;
    }
    if r_flat <= 0.0 {
        return Err(CoreError::InvalidArgument(
            "splice port has no flat neighborhood in V_e".into(),
        ));
    }
    let r_k = 0.45 * r_flat;

    // rho: smallest power of two with rho r_K >= 1.2 chi(-phi3)
    let phi3 = f_field.gh.saw.phi3;
    let chi_phi3 = disc.cutoffs.chi.value(-phi3);
    let needed = (1.2 * chi_phi3 / r_k).max(rho_request);
    let rho = 2f64.powi(needed.log2().ceil() as i32);
    if rho * r_k < chi_phi3 {
        return Err(CoreError::SpliceScale {
            required: chi_phi3 / r_k,
            got: rho,
        });
    }

    // seam angle: chi(phi_seam) = rho r_K on the blow-up branch
    let target = rho * r_k;
    let (mut lo, mut hi) = (-disc.cutoffs.spec.alpha + 1e-9, -disc.cutoffs.spec.alpha2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if disc.cutoffs.chi.value(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi_seam = 0.5 * (lo + hi);
    if !(phi_seam < -phi3) {
        return Err(CoreError::SpliceScale {
            required: target,
            got: disc.cutoffs.chi.value(phi_seam),
        });
    }

    // assemble: scaled, repositioned chain charts with the D hole
    let scale = AffineMap2::scaling(rho);
    let place = compose(&scale, &reposition);
    let mut surface = ChartedSurface::new(
        &format!("{}**", chain.surface.name),
        2,
    );
    for (i, c) in chain.surface.charts.iter().enumerate() {
        let mut nc = SurfaceChart::new(
            &c.name,
            Arc::new(AffineChart {
                inner: c.map.clone(),
                map: place,
            }),
        );
        nc.grid_margin = c.grid_margin;
        nc.fd_margin = c.fd_margin;
        nc.holes = c.holes.clone();
        if i == port_chart {
            // hole: V_e parameter disc of radius rho r_K around the origin
            let map = nc.map.clone();
            let dom = map.domain();
            let center = mp.param;
            let rr = rho * r_k;
            let contains = move |p: Param2| {
                if dom.param_dist(p, center) > 1.0 {
                    return false;
                }
                let z = map.eval(p);
                let x = v_e_params(&z);
                x[0].hypot(x[1]) < rr
            };
            let boundary = trace_hole_boundary(&contains, center, 0.5, 128);
            nc.holes.push(Hole {
                label: "splice-D".into(),
                contains: Arc::new(contains),
                boundary,
            });
        }
        surface.charts.push(nc);
    }
    for seam in &chain.surface.seams {
        surface.seams.push(super::tube::remap_seam_pub(seam, 0));
    }
    // re-evaluate marked ambient through the placement
    for (name, m) in &chain.surface.marked {
        surface.marked.insert(
            name.clone(),
            MarkedPoint {
                chart: m.chart,
                param: m.param,
                ambient: place.apply_point(&m.ambient),
                aliases: m.aliases.clone(),
            },
        );
    }
    surface.complex_tangent_loci = chain.surface.complex_tangent_loci.clone();

    // disc chart restricted to the bounded side
    let disc_chart_idx = surface.charts.len();
    let disc_map = Arc::new(RestrictedDiscChart {
        inner: disc.surface.charts[0].map.clone(),
        phi_seam,
    });
    let mut dc = SurfaceChart::new("delta-bounded", disc_map.clone());
    dc.grid_margin = [[0.0, 0.0], [1e-3, 0.01]];
    dc.fd_margin = [[0.0, 0.0], [1e-3, 0.02]];
    surface.charts.push(dc);
    for seam in &disc.surface.seams {
        surface
            .seams
            .push(super::tube::remap_seam_pub(seam, disc_chart_idx));
    }

    // seam along rho K: disc circle at phi_seam against the chain patch circle
    let port_map = surface.charts[port_chart].map.clone();
    let port_jac_frame = TangentFrame::at(port_map.as_ref(), mp.param)?;
    let center = mp.param;
    let rr = rho * r_k;
    let chain_curve = Arc::new(move |t: f64| {
        let psi = -PI + 2.0 * PI * t;
        let target = [rr * psi.cos(), rr * psi.sin()];
        // Newton in V_e parameters
        let mut q = center;
        for _ in 0..50 {
            let z = port_map.eval(q);
            let x = v_e_params(&z);
            let rhs = [target[0] - x[0], target[1] - x[1]];
            if rhs[0].abs() + rhs[1].abs() < 1e-12 {
                break;
            }
            let j = port_map.jac(q);
            let dx = [[j.get(0, 0), j.get(0, 1)], [j.get(1, 0), j.get(1, 1)]];
            match solve2(dx, rhs) {
                Some(dq) => q = [q[0] + dq[0], q[1] + dq[1]],
                None => break,
            }
        }
        q
    });
    let _ = port_jac_frame;
    surface.seams.push(Seam::Curves {
        chart_a: disc_chart_idx,
        a: Arc::new(move |t| [-PI + 2.0 * PI * t, phi_seam]),
        chart_b: port_chart,
        b: chain_curve,
    });

    // field: shifted chain field on chain charts, f on the disc chart
    let mut entries: Vec<ChartFieldEntry> = Vec::new();
    for ci in 0..chain.surface.charts.len() {
        let fld = chain.field.clone();
        let shift = chain.field_shift;
        entries.push(ChartFieldEntry::Real {
            inner: Arc::new(SpliceChainView {
                field: fld,
                chart: ci,
            }),
            offset: shift,
        });
    }
    entries.push(ChartFieldEntry::Complex {
        inner: Arc::new(FArc(f_field)),
    });
    let field = Arc::new(CompositeField {
        entries,
        real: false,
    });

    Ok(SpliceResult {
        surface,
        field,
        rho,
        r_k,
        phi_seam,
        disc_chart: disc_chart_idx,
        port_chart,
        port_param: mp.param,
        reposition,
    })
}

struct SpliceChainView {
    field: Arc<dyn SurfaceField>,
    chart: usize,
}

impl crate::bump::RealField2 for SpliceChainView {
    fn value(&self, p: Param2) -> f64 {
        self.field.value(self.chart, p).re
    }
    fn grad(&self, p: Param2) -> [f64; 2] {
        self.field.jac(self.chart, p)[0]
    }
}

struct FArc(Arc<DiscFieldF>);

impl ComplexField2 for FArc {
    fn value(&self, p: Param2) -> C64 {
        self.0.value(p)
    }
    fn jac(&self, p: Param2) -> [[f64; 2]; 2] {
        self.0.jac(p)
    }
}
