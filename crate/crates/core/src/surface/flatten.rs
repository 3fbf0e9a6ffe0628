//! Local flattening of a surface onto its tangent plane, and the matching
//! flattening of a function onto its extreme value.
//!
//! Near a totally real point p the plane C^2 splits as Pi + i Pi for the
//! tangent plane Pi, so z - p = u + i v with u, v in Pi. The flattened
//! surface replaces v by chi_delta(|u|) v: identical to the original
//! wherever |u| >= 2 delta, exactly the tangent plane over |u| <= delta.
//! The damping argument |u| is an ambient quantity, so charts that cover
//! the same point through different parameters stay consistent. Constants
//! r and k of the local graph bound |v| < k |u|^2, |dv/du| <= k |u| and are
//! estimated by ring sampling, inflated 10%.

use super::fields::SurfaceField;
use super::ChartedSurface;
use crate::bump::{ramp_mu, Ramp};
use crate::error::{CoreError, Result};
use crate::num::{solve2, C64};
use crate::smooth::{CPoint, ChartMap, Domain2, Param2, RealJacobian};
use std::sync::Arc;

/// Basis of the tangent plane at a point: complex matrix A with unit
/// tangent columns, plus its inverse.
#[derive(Debug, Clone, Copy)]
pub struct TangentFrame {
    pub origin: CPoint,
    pub a: [[C64; 2]; 2],
    pub a_inv: [[C64; 2]; 2],
}

pub(crate) fn mat_apply(m: &[[C64; 2]; 2], z: [C64; 2]) -> [C64; 2] {
    [
        m[0][0] * z[0] + m[0][1] * z[1],
        m[1][0] * z[0] + m[1][1] * z[1],
    ]
}

fn mat_inverse(m: &[[C64; 2]; 2]) -> Option<[[C64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-12 {
        return None;
    }
    let s = 1.0 / det.abs_sq();
    let inv_det = C64::new(det.re * s, -det.im * s);
    Some([
        [m[1][1] * inv_det, -m[0][1] * inv_det],
        [-m[1][0] * inv_det, m[0][0] * inv_det],
    ])
}

impl TangentFrame {
    /// Frame from the chart Jacobian at a point. Fails when the tangent
    /// plane is not totally real (columns complex-linearly dependent).
    pub fn at(map: &dyn ChartMap, q: Param2) -> Result<TangentFrame> {
        let origin = map.eval(q);
        let j = map.jac(q);
        let c0 = j.complex_column(0);
        let c1 = j.complex_column(1);
        let n0 = (c0[0].abs_sq() + c0[1].abs_sq()).sqrt();
        let n1 = (c1[0].abs_sq() + c1[1].abs_sq()).sqrt();
        let a = [
            [c0[0].scale(1.0 / n0), c1[0].scale(1.0 / n1)],
            [c0[1].scale(1.0 / n0), c1[1].scale(1.0 / n1)],
        ];
        let a_inv = mat_inverse(&a).ok_or_else(|| {
            CoreError::DegenerateTangent(format!(
                "tangent plane at ({}, {}) is not totally real",
                q[0], q[1]
            ))
        })?;
        Ok(TangentFrame { origin, a, a_inv })
    }

    /// Frame coordinates (x, y) with z - p = A x + i A y.
    pub fn graph_coords(&self, z: &CPoint) -> ([f64; 2], [f64; 2]) {
        let d = [z.z(0) - self.origin.z(0), z.z(1) - self.origin.z(1)];
        let w = mat_apply(&self.a_inv, d);
        ([w[0].re, w[1].re], [w[0].im, w[1].im])
    }

    /// Tangent-plane component u = A x as an ambient vector.
    pub fn tangent_vec(&self, x: [f64; 2]) -> [C64; 2] {
        mat_apply(&self.a, [C64::new(x[0], 0.0), C64::new(x[1], 0.0)])
    }

    /// Ambient norm |A x| of the tangent component.
    pub fn tangent_norm(&self, x: [f64; 2]) -> f64 {
        let u = self.tangent_vec(x);
        (u[0].abs_sq() + u[1].abs_sq()).sqrt()
    }

    pub fn assemble(&self, x: [f64; 2], y: [f64; 2]) -> CPoint {
        let w = [C64::new(x[0], y[0]), C64::new(x[1], y[1])];
        let z = mat_apply(&self.a, w);
        CPoint::from_c2(self.origin.z(0) + z[0], self.origin.z(1) + z[1])
    }

    /// Chart Jacobian in frame coordinates: (dx/dq, dy/dq), row-major.
    pub fn graph_jac(&self, j: &RealJacobian) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
        let mut dx = [[0.0; 2]; 2];
        let mut dy = [[0.0; 2]; 2];
        for col in 0..2 {
            let c = j.complex_column(col);
            let w = mat_apply(&self.a_inv, [c[0], c[1]]);
            dx[0][col] = w[0].re;
            dx[1][col] = w[1].re;
            dy[0][col] = w[0].im;
            dy[1][col] = w[1].im;
        }
        (dx, dy)
    }

    /// Orthonormal basis of the tangent plane as real 4-vectors.
    fn orthobasis(&self) -> [[f64; 4]; 2] {
        let c0 = [self.a[0][0], self.a[1][0]];
        let c1 = [self.a[0][1], self.a[1][1]];
        let v0 = [c0[0].re, c0[0].im, c0[1].re, c0[1].im];
        let mut v1 = [c1[0].re, c1[0].im, c1[1].re, c1[1].im];
        let n0: f64 = v0.iter().map(|t| t * t).sum::<f64>().sqrt();
        let b0 = [v0[0] / n0, v0[1] / n0, v0[2] / n0, v0[3] / n0];
        let d: f64 = (0..4).map(|i| b0[i] * v1[i]).sum();
        for i in 0..4 {
            v1[i] -= d * b0[i];
        }
        let n1: f64 = v1.iter().map(|t| t * t).sum::<f64>().sqrt();
        [b0, [v1[0] / n1, v1[1] / n1, v1[2] / n1, v1[3] / n1]]
    }

    /// Operator norm of w -> u (the Pi-component in the splitting
    /// C^2 = Pi + i Pi), sampled over ambient directions.
    pub fn projection_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..32 {
            for j in 0..8 {
                let t = std::f64::consts::TAU * i as f64 / 32.0;
                let s = std::f64::consts::PI * j as f64 / 8.0;
                let w = [
                    C64::new(t.cos() * s.cos(), t.sin() * s.cos()),
                    C64::new(t.cos() * s.sin(), t.sin() * s.sin()),
                ];
                let fc = mat_apply(&self.a_inv, w);
                let x = [fc[0].re, fc[1].re];
                let norm_w = (w[0].abs_sq() + w[1].abs_sq()).sqrt();
                if norm_w > 1e-12 {
                    worst = worst.max(self.tangent_norm(x) / norm_w);
                }
            }
        }
        worst
    }
}

/// Estimated local graph data at a marked point.
#[derive(Debug, Clone, Copy)]
pub struct GraphEstimate {
    pub r: f64,
    pub k: f64,
    pub mu: f64,
    /// Parameter radius inside which the flatten modifier may engage.
    pub r_param: f64,
}

/// Ring-sample the chart around q to estimate the graph constants, in the
/// ambient tangent-norm metric. Rings stop once they clear `r_cap`: the
/// constants only need to bound the graph on the disc the construction
/// uses, and letting the rings run to the edge of the graph region would
/// inflate k far past what the eta-disc sees.
pub fn estimate_graph(
    map: &dyn ChartMap,
    q: Param2,
    delta_hint: f64,
    r_cap: f64,
) -> Result<GraphEstimate> {
    let frame = TangentFrame::at(map, q)?;
    let basis = frame.orthobasis();
    let dom = map.domain();
    let j0 = frame.graph_jac(&map.jac(q)).0;
    let det0 = (j0[0][0] * j0[1][1] - j0[0][1] * j0[1][0]).abs();

    let to4 = |z: [C64; 2]| [z[0].re, z[0].im, z[1].re, z[1].im];
    let dirs = 64;
    let mut rho = 1e-3;
    let mut k_max: f64 = 0.0;
    let mut r_graph: f64 = 0.0;
    let mut r_param: Option<f64> = None;
    for _ in 0..60 {
        let mut ring_min_u = f64::INFINITY;
        let mut ok = true;
        for i in 0..dirs {
            let t = std::f64::consts::TAU * i as f64 / dirs as f64;
            let p = [q[0] + rho * t.cos(), q[1] + rho * t.sin()];
            if dom.contains(p).is_err() {
                ok = false;
                break;
            }
            let z = map.eval(p);
            let (x, y) = frame.graph_coords(&z);
            let un = frame.tangent_norm(x);
            let vn = frame.tangent_norm(y);
            ring_min_u = ring_min_u.min(un);
            if un < 1e-12 {
                ok = false;
                break;
            }
            k_max = k_max.max(vn / (un * un));
            let (dx, dy) = frame.graph_jac(&map.jac(p));
            let det = dx[0][0] * dx[1][1] - dx[0][1] * dx[1][0];
            if det.abs() < 0.25 * det0 {
                ok = false;
                break;
            }
            // dv/du as a 2x2 in the orthonormal tangent basis
            let mut pu = [[0.0; 2]; 2];
            let mut pv = [[0.0; 2]; 2];
            for col in 0..2 {
                let du4 = to4(frame.tangent_vec([dx[0][col], dx[1][col]]));
                let dv4 = to4(frame.tangent_vec([dy[0][col], dy[1][col]]));
                for row in 0..2 {
                    pu[row][col] = (0..4).map(|i| basis[row][i] * du4[i]).sum();
                    pv[row][col] = (0..4).map(|i| basis[row][i] * dv4[i]).sum();
                }
            }
            let mut m = [[0.0; 2]; 2];
            let mut solvable = true;
            for e in 0..2 {
                let rhs = [(e == 0) as i32 as f64, (e == 1) as i32 as f64];
                match solve2(pu, rhs) {
                    Some(col) => {
                        m[0][e] = pv[0][0] * col[0] + pv[0][1] * col[1];
                        m[1][e] = pv[1][0] * col[0] + pv[1][1] * col[1];
                    }
                    None => solvable = false,
                }
            }
            if solvable {
                let s = crate::num::singular_values_mx2(&[m[0], m[1]]);
                k_max = k_max.max(s[0] / un);
            }
        }
        if !ok {
            break;
        }
        r_graph = ring_min_u;
        if r_param.is_none() && ring_min_u > 3.0 * delta_hint {
            r_param = Some(rho);
        }
        if ring_min_u >= r_cap && r_param.is_some() {
            break;
        }
        rho *= 1.3;
    }
    let r_param = r_param.ok_or_else(|| CoreError::FlatteningConstants {
        detail: "graph region too small for requested delta".into(),
        r: r_graph,
        k: k_max,
        mu: ramp_mu(),
    })?;
    Ok(GraphEstimate {
        r: r_graph,
        k: 1.1 * k_max,
        mu: ramp_mu(),
        r_param,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FlattenPatch {
    pub center_param: Param2,
    pub frame: TangentFrame,
    pub delta: f64,
    pub eps: f64,
    pub r_param: f64,
}

/// Chart with flatten patches applied.
pub struct FlattenedChart {
    pub inner: Arc<dyn ChartMap>,
    pub patches: Vec<FlattenPatch>,
}

impl FlattenedChart {
    fn active_patch(&self, p: Param2) -> Option<&FlattenPatch> {
        let dom = self.inner.domain();
        self.patches
            .iter()
            .find(|patch| dom.param_dist(p, patch.center_param) < patch.r_param)
    }
}

impl ChartMap for FlattenedChart {
    fn ambient_n(&self) -> usize {
        self.inner.ambient_n()
    }
    fn domain(&self) -> Domain2 {
        self.inner.domain()
    }
    fn eval(&self, p: Param2) -> CPoint {
        let z = self.inner.eval(p);
        let Some(patch) = self.active_patch(p) else {
            return z;
        };
        let (x, y) = patch.frame.graph_coords(&z);
        let ru = patch.frame.tangent_norm(x);
        if ru >= 2.0 * patch.delta {
            return z;
        }
        let c = Ramp::value(ru / patch.delta);
        patch.frame.assemble(x, [c * y[0], c * y[1]])
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        let z = self.inner.eval(p);
        let ji = self.inner.jac(p);
        let Some(patch) = self.active_patch(p) else {
            return ji;
        };
        let (x, y) = patch.frame.graph_coords(&z);
        let ru = patch.frame.tangent_norm(x);
        if ru >= 2.0 * patch.delta {
            return ji;
        }
        let (dx, dy) = patch.frame.graph_jac(&ji);
        let c = Ramp::value(ru / patch.delta);
        let dc = Ramp::deriv(ru / patch.delta) / patch.delta;
        // d ru / dq = <A x, A dx_col> / ru; chi' = 0 on the plateau covers ru = 0
        let dr = if ru > 0.0 {
            let u = patch.frame.tangent_vec(x);
            let mut out = [0.0, 0.0];
            for col in 0..2 {
                let du = patch.frame.tangent_vec([dx[0][col], dx[1][col]]);
                out[col] = (u[0].re * du[0].re
                    + u[0].im * du[0].im
                    + u[1].re * du[1].re
                    + u[1].im * du[1].im)
                    / ru;
            }
            out
        } else {
            [0.0, 0.0]
        };
        let mut j = RealJacobian::new(2);
        for col in 0..2 {
            let w = [
                C64::new(dx[0][col], c * dy[0][col] + dc * dr[col] * y[0]),
                C64::new(dx[1][col], c * dy[1][col] + dc * dr[col] * y[1]),
            ];
            let amb = mat_apply(&patch.frame.a, w);
            j.set(0, col, amb[0].re);
            j.set(1, col, amb[0].im);
            j.set(2, col, amb[1].re);
            j.set(3, col, amb[1].im);
        }
        j
    }
}

/// Flatten `surface` onto its tangent plane at the marked point (all chart
/// preimages of it).
///
/// Validates the constants: eta < 1/(n k), delta < min(eta/2, r/4),
/// delta < 1/(8 n mu k), eps <= delta / (projection norm).
pub fn flatten_surface(
    surface: &ChartedSurface,
    marked: &str,
    eps: f64,
    eta: f64,
    delta: f64,
) -> Result<ChartedSurface> {
    let mp = surface.marked_point(marked)?.clone();
    let mut out = surface.clone();
    let n = surface.ambient_n as f64;
    let r_cap = 1.1 * eta.max(4.0 * delta);
    for (site_idx, (chart_idx, param)) in mp.sites().into_iter().enumerate() {
        let chart = &surface.charts[chart_idx];
        let est = estimate_graph(chart.map.as_ref(), param, delta, r_cap)?;
        let reject = |detail: &str| {
            Err(CoreError::FlatteningConstants {
                detail: detail.to_string(),
                r: est.r,
                k: est.k,
                mu: est.mu,
            })
        };
        if !(eta < 1.0 / (n * est.k)) {
            return reject("need eta < 1/(n k)");
        }
        if !(eta < est.r) {
            return reject("need eta < r");
        }
        if !(delta < (eta / 2.0).min(est.r / 4.0)) {
            return reject("need delta < min(eta/2, r/4)");
        }
        if !(delta < 1.0 / (8.0 * n * est.mu * est.k)) {
            return reject("need delta < 1/(8 n mu k)");
        }
        let frame = TangentFrame::at(chart.map.as_ref(), param)?;
        if site_idx == 0 && !(eps * frame.projection_norm() <= delta * (1.0 + 1e-9)) {
            return reject("need eps <= delta / projection norm for the tangent-ball property");
        }
        let patch = FlattenPatch {
            center_param: param,
            frame,
            delta,
            eps,
            r_param: est.r_param,
        };
        let target = &mut out.charts[chart_idx];
        // Nesting wrappers is fine: patch regions of distinct marked points
        // are disjoint and each wrapper is the identity outside its own.
        target.map = Arc::new(FlattenedChart {
            inner: target.map.clone(),
            patches: vec![patch],
        });
    }
    out.name = format!("{}|flat({marked})", surface.name);
    Ok(out)
}

/// Which end of the range the function is flattened onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlattenKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy)]
pub struct FuncPatch {
    pub ambient: CPoint,
    pub eps: f64,
    pub plateau: f64,
}

/// g0 = psi * g(p) + (1 - psi) * g with psi a radial step engaging inside
/// the 3 eps ambient ball of the marked point (psi = 1 within 2 eps).
pub struct FlattenedField {
    pub inner: Arc<dyn SurfaceField>,
    pub maps: Vec<Arc<dyn ChartMap>>,
    pub patches: Vec<FuncPatch>,
}

impl FlattenedField {
    fn psi(patch: &FuncPatch, d: f64) -> (f64, f64) {
        use crate::bump::glue::{step, step_d, GLUE_C};
        let x = (d - 2.0 * patch.eps) / patch.eps;
        (1.0 - step(x, GLUE_C), -step_d(x, GLUE_C) / patch.eps)
    }
}

impl SurfaceField for FlattenedField {
    fn is_real(&self) -> bool {
        self.inner.is_real()
    }
    fn value(&self, chart: usize, p: Param2) -> C64 {
        let mut v = self.inner.value(chart, p).re;
        let z = self.maps[chart].eval(p);
        for patch in &self.patches {
            let d = z.dist(&patch.ambient);
            if d < 3.0 * patch.eps {
                let (psi, _) = Self::psi(patch, d);
                v = psi * patch.plateau + (1.0 - psi) * v;
            }
        }
        C64::new(v, 0.0)
    }
    fn jac(&self, chart: usize, p: Param2) -> [[f64; 2]; 2] {
        let mut v = self.inner.value(chart, p).re;
        let mut g = self.inner.jac(chart, p)[0];
        let z = self.maps[chart].eval(p);
        let j = self.maps[chart].jac(p);
        for patch in &self.patches {
            let d = z.dist(&patch.ambient);
            if d < 3.0 * patch.eps && d > 0.0 {
                let (psi, dpsi_dd) = Self::psi(patch, d);
                let mut dd = [0.0, 0.0];
                for col in 0..2 {
                    let mut acc = 0.0;
                    for row in 0..2 * z.n() {
                        acc += (z.coords()[row] - patch.ambient.coords()[row]) * j.get(row, col);
                    }
                    dd[col] = acc / d;
                }
                let dv = [
                    dpsi_dd * dd[0] * (patch.plateau - v) + (1.0 - psi) * g[0],
                    dpsi_dd * dd[1] * (patch.plateau - v) + (1.0 - psi) * g[1],
                ];
                v = psi * patch.plateau + (1.0 - psi) * v;
                g = dv;
            } else if d == 0.0 {
                v = patch.plateau;
                g = [0.0, 0.0];
            }
        }
        [g, [0.0, 0.0]]
    }
}

/// Flatten `field` onto its strict extremum at the marked point of the
/// (already surface-flattened) `surface`.
pub fn flatten_function(
    field: Arc<dyn SurfaceField>,
    surface: &ChartedSurface,
    marked: &str,
    eps: f64,
    eta: f64,
    alpha_gap: f64,
    kind: FlattenKind,
) -> Result<Arc<FlattenedField>> {
    let mp = surface.marked_point(marked)?.clone();
    let m = field.value(mp.chart, mp.param).re;
    if !(3.0 * eps < eta) {
        return Err(CoreError::NoAdmissibleGap(format!(
            "need 3 eps < eta (eps = {eps}, eta = {eta})"
        )));
    }
    // Gap validation on a dense sample: off B(p, eta) the field stays at
    // least alpha_gap away from the extreme value; inside B(p, 3 eps) it
    // stays within alpha_gap of it.
    let sgn = match kind {
        FlattenKind::Max => 1.0,
        FlattenKind::Min => -1.0,
    };
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(96, 96) {
            let z = surface.eval(ci, p);
            let d = z.dist(&mp.ambient);
            let v = field.value(ci, p).re;
            if d >= eta && sgn * (m - v) < alpha_gap {
                return Err(CoreError::NoAdmissibleGap(format!(
                    "extremum not isolated: value {v} at ambient distance {d} (need gap {alpha_gap})"
                )));
            }
            if d <= 3.0 * eps && sgn * (m - v) > alpha_gap {
                return Err(CoreError::NoAdmissibleGap(format!(
                    "field leaves the gap band inside B(p, 3 eps): {v} at distance {d}"
                )));
            }
        }
    }
    let maps: Vec<Arc<dyn ChartMap>> = surface.charts.iter().map(|c| c.map.clone()).collect();
    Ok(Arc::new(FlattenedField {
        inner: field,
        maps,
        patches: vec![FuncPatch {
            ambient: mp.ambient,
            eps,
            plateau: m,
        }],
    }))
}
