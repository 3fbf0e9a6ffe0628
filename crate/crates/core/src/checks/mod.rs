//! Numerical certificates for the analytic hypotheses the constructions
//! rely on: immersion rank, total reality via complex minors, torus circle
//! criterion, axis-range containment, antiperiodicity, disc-algebra
//! obstruction, fiber finiteness on the projective plane, extrema.

pub mod fiber;
pub mod report;
pub mod suite;

pub use fiber::{chain_fiber_compat, fiber_peak_compat, sample_fiber, torus_circle_criterion, FiberPoint, FiberSample, PeakCompatConfig};
pub use report::{GridInfo, Residual, VerificationReport, Witness};
pub use suite::lemma_gh_suite;

use crate::bump::{Cutoffs, Profile1D};
use crate::error::{CoreError, Result};
use crate::num::C64;
use crate::smooth::{complex_minors, ComplexJacobian, Param2, MINOR_LABELS_C3};
use crate::surface::{ChartedSurface, SurfaceField};
use serde_json::json;

/// Default rank tolerance for immersion certification.
pub const TOL_RANK: f64 = 1e-6;
/// Default tolerance for the totally-real minor certificate.
pub const TOL_MINOR: f64 = 1e-8;

/// Gap thresholds for the circle criterion at a given sampling resolution:
/// a z1-gap counts when it exceeds three grid steps (at least 0.05 rad), a
/// vertical circle counts as covered when its z2 arguments leave no gap
/// over three grid steps.
pub fn torus_circle_tolerances(resolution: (usize, usize)) -> (f64, f64) {
    let (nu, nv) = resolution;
    let gap_min = (3.0 * std::f64::consts::TAU / nu.max(1) as f64).max(0.05);
    let cover_gap = 3.0 * std::f64::consts::TAU / nv.max(1) as f64;
    (gap_min, cover_gap)
}

/// Immersion: the second singular value of the chart Jacobian stays above
/// `tol` on the verification grid (declared singular margins excluded).
pub fn check_immersion(surface: &ChartedSurface, nu: usize, nv: usize, tol: f64) -> VerificationReport {
    let mut r = VerificationReport::new(&format!("immersion:{}", surface.name));
    let mut min_sigma = f64::INFINITY;
    let mut argmin: Option<(usize, Param2)> = None;
    let mut points = 0;
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            let s = chart.map.jac(p).singular_values();
            points += 1;
            if s[1] < min_sigma {
                min_sigma = s[1];
                argmin = Some((ci, p));
            }
        }
    }
    r.grid = GridInfo {
        nu,
        nv,
        charts: surface.charts.iter().map(|c| c.name.clone()).collect(),
        points,
        excluded: 0,
    };
    r.margin("second_singular_value_min", min_sigma, tol);
    if let Some((ci, p)) = argmin {
        r.witness(
            "argmin",
            Some(&surface.charts[ci].name),
            Some(p),
            json!(min_sigma),
        );
    }
    r.finish(true)
}

/// Total reality: at every grid point some 2x2 complex minor of the tangent
/// frame stays above `tol`. Points certified only by df-minors must lie in
/// the declared complex-tangent loci; failures are reported with witnesses.
pub fn check_totally_real(
    surface: &ChartedSurface,
    nu: usize,
    nv: usize,
    tol: f64,
) -> VerificationReport {
    let mut r = VerificationReport::new(&format!("totally-real:{}", surface.name));
    let mut fail_points: Vec<(usize, Param2, f64)> = Vec::new();
    let mut label_counts = vec![0usize; 3];
    let mut df_only_outside = 0usize;
    let mut min_best = f64::INFINITY;
    let mut points = 0;
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            points += 1;
            let j = ComplexJacobian::from_real(&chart.map.jac(p));
            let minors = complex_minors(&j);
            let best = minors.iter().map(|m| m.abs()).fold(0.0f64, f64::max);
            if best <= tol {
                if fail_points.len() < 256 {
                    fail_points.push((ci, p, best));
                }
                continue;
            }
            min_best = min_best.min(best);
            // prefer the base form dz1^dz2 whenever it certifies, matching
            // the case split over totally real base points
            let cert_idx = minors
                .iter()
                .position(|m| m.abs() > tol)
                .unwrap_or(0);
            label_counts[cert_idx.min(2)] += 1;
            // a df-minor-only certificate away from declared loci is suspicious
            if surface.ambient_n == 3 && cert_idx > 0 && minors[0].abs() <= tol {
                let in_locus = surface.complex_tangent_loci.iter().any(|l| {
                    l.chart == ci
                        && surface.charts[ci].map.domain().param_dist(p, l.param) < l.radius
                });
                if !in_locus {
                    df_only_outside += 1;
                }
            }
        }
    }
    r.grid = GridInfo {
        nu,
        nv,
        charts: surface.charts.iter().map(|c| c.name.clone()).collect(),
        points,
        excluded: 0,
    };
    r.residual("fail_points", fail_points.len() as f64, 0.0);
    r.residual("df_only_outside_loci", df_only_outside as f64, 0.0);
    for (ci, p, best) in fail_points.iter().take(8) {
        r.witness(
            "complex_tangent",
            Some(&surface.charts[*ci].name),
            Some(*p),
            json!(best),
        );
    }
    r.details = json!({
        "certificates": {
            "dz1^dz2": label_counts[0],
            "dz1^df": label_counts.get(1),
            "dz2^df": label_counts.get(2),
        },
        "min_best_minor": if min_best.is_finite() { min_best } else { 0.0 },
        "labels": MINOR_LABELS_C3,
    });
    r.finish(true)
}

/// Like [`check_totally_real`] but returns the raw failure points, for
/// assertions about where the complex tangents sit.
pub fn totally_real_failures(
    surface: &ChartedSurface,
    nu: usize,
    nv: usize,
    tol: f64,
) -> Vec<(usize, Param2, f64)> {
    let mut out = Vec::new();
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            let j = ComplexJacobian::from_real(&chart.map.jac(p));
            let best = complex_minors(&j)
                .iter()
                .map(|m| m.abs())
                .fold(0.0f64, f64::max);
            if best <= tol {
                out.push((ci, p, best));
            }
        }
    }
    out
}

/// Axis sets a field range may be confined to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSet {
    /// [-1, 1] on the real axis union the imaginary axis.
    SegmentAndImaginary,
    /// Both full axes.
    RealAndImaginary,
}

fn axis_dist(v: C64, set: AxisSet) -> f64 {
    let to_imag = v.re.abs();
    let to_real = match set {
        AxisSet::SegmentAndImaginary => v.im.abs().max((v.re.abs() - 1.0).max(0.0)),
        AxisSet::RealAndImaginary => v.im.abs(),
    };
    to_real.min(to_imag)
}

/// Range containment of a complex field in the configured axis set.
pub fn check_axis_range(
    field: &dyn SurfaceField,
    surface: &ChartedSurface,
    nu: usize,
    nv: usize,
    set: AxisSet,
    tol: f64,
) -> VerificationReport {
    let mut r = VerificationReport::new(&format!("axis-range:{}", surface.name));
    let mut worst = 0.0f64;
    let mut witness: Option<(usize, Param2, C64)> = None;
    let mut n_real = 0usize;
    let mut n_imag = 0usize;
    let mut points = 0usize;
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            points += 1;
            let v = field.value(ci, p);
            let d = axis_dist(v, set);
            if v.im.abs() <= tol {
                n_real += 1;
            } else {
                n_imag += 1;
            }
            if d > worst {
                worst = d;
                witness = Some((ci, p, v));
            }
        }
    }
    r.grid = GridInfo {
        nu,
        nv,
        charts: surface.charts.iter().map(|c| c.name.clone()).collect(),
        points,
        excluded: 0,
    };
    r.residual("axis_distance_max", worst, tol);
    if let Some((ci, p, v)) = witness {
        r.witness(
            "worst",
            Some(&surface.charts[ci].name),
            Some(p),
            json!([v.re, v.im]),
        );
    }
    r.details = json!({"classified_real": n_real, "classified_imaginary": n_imag});
    r.finish(true)
}

/// Antiperiodicity of the circle graph built from a 2 pi / n periodic band
/// function u: U(theta + pi) = -U(theta).
///
/// The grid must have size divisible by 2n so that theta + pi is a grid
/// shift.
pub fn antiperiodicity_check(
    u: &[f64],
    cutoffs: &Cutoffs,
    n: u32,
    tol: f64,
) -> Result<VerificationReport> {
    let len = u.len();
    if len == 0 || len % (2 * n as usize) != 0 || len % 2 != 0 {
        return Err(CoreError::GridIncompatible(format!(
            "need grid size divisible by 2n = {}, got {len}",
            2 * n
        )));
    }
    let mut r = VerificationReport::new("antiperiodicity");
    let mut worst = 0.0f64;
    let mut arg_worst = 0.0;
    let half = len / 2;
    let eval_u = |i: usize| -> C64 {
        let theta = std::f64::consts::TAU * i as f64 / len as f64;
        let g = cutoffs.gamma.value(u[i]);
        let b = cutoffs.beta.value(u[i]);
        C64::cis(g + theta) + C64::new(b * (g + theta).cos(), 0.0)
    };
    for i in 0..len {
        let a = eval_u(i);
        let b = eval_u((i + half) % len);
        let resid = (a + b).abs();
        if resid > worst {
            worst = resid;
            arg_worst = std::f64::consts::TAU * i as f64 / len as f64;
        }
    }
    r.residual("antiperiodicity_max", worst, tol);
    r.witness("argmax", None, Some([arg_worst, 0.0]), json!(worst));
    Ok(r.finish(true))
}

/// Negative-index Fourier coefficients of a sampled circle function; the
/// obstruction (graph outside the disc algebra, hence polynomially convex
/// by maximality) is present when some negative coefficient clears the
/// per-instance threshold 1e-2 * max nonnegative coefficient.
pub fn disc_algebra_obstruction(v: &[C64], n_coeffs: usize) -> Result<VerificationReport> {
    if v.len() < 4 * n_coeffs {
        return Err(CoreError::GridIncompatible(format!(
            "need >= 4 n_coeffs samples, got {} for {n_coeffs}",
            v.len()
        )));
    }
    let n = v.len();
    let coeff = |j: i64| -> C64 {
        let mut acc = C64::ZERO;
        for (m, &vm) in v.iter().enumerate() {
            let th = -(j as f64) * std::f64::consts::TAU * m as f64 / n as f64;
            acc = acc + vm * C64::cis(th);
        }
        acc.scale(1.0 / n as f64)
    };
    let mut max_neg = 0.0f64;
    let mut arg_neg = 0i64;
    for j in 1..=n_coeffs as i64 {
        let c = coeff(-j).abs();
        if c > max_neg {
            max_neg = c;
            arg_neg = -j;
        }
    }
    let mut max_nonneg = 0.0f64;
    for j in 0..=n_coeffs as i64 {
        max_nonneg = max_nonneg.max(coeff(j).abs());
    }
    let threshold = 1e-2 * max_nonneg;
    let mut r = VerificationReport::new("disc-algebra-obstruction");
    r.margin("max_negative_coefficient", max_neg, threshold);
    r.witness("coefficient_index", None, None, json!(arg_neg));
    r.details = json!({
        "samples": n,
        "n_coeffs": n_coeffs,
        "max_nonnegative_coefficient": max_nonneg,
        "threshold": threshold,
    });
    Ok(r.finish(true))
}

/// Fourier coefficients at two grid sizes must agree (aliasing control).
pub fn obstruction_grid_consistency(
    sample: &dyn Fn(usize) -> Vec<C64>,
    n: usize,
    n_coeffs: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let va = sample(n);
    let vb = sample(2 * n);
    let coeff = |v: &[C64], j: i64| -> C64 {
        let mut acc = C64::ZERO;
        for (m, &vm) in v.iter().enumerate() {
            let th = -(j as f64) * std::f64::consts::TAU * m as f64 / v.len() as f64;
            acc = acc + vm * C64::cis(th);
        }
        acc.scale(1.0 / v.len() as f64)
    };
    let mut worst = 0.0f64;
    for j in 1..=n_coeffs as i64 {
        worst = worst.max((coeff(&va, -j) - coeff(&vb, -j)).abs());
    }
    let mut r = VerificationReport::new("obstruction-grid-consistency");
    r.residual("coefficient_drift", worst, tol);
    Ok(r.finish(true))
}

/// The ellipse system of the projective-plane fiber analysis:
/// p(u1, u3) = 2 u1^2 + 5/8 u3^2 = t + 1,
/// q(u1, u3) = (2 u1 + sqrt3/2 u3)^2 (1 - u1^2 + sqrt3/2 u1 u3 - 19/16 u3^2).
pub fn rp2_q(u1: f64, u3: f64) -> f64 {
    let s = 3f64.sqrt();
    let a = 2.0 * u1 + 0.5 * s * u3;
    let b = 1.0 - u1 * u1 + 0.5 * s * u1 * u3 - 19.0 / 16.0 * u3 * u3;
    a * a * b
}

pub fn rp2_dq_du3(u1: f64, u3: f64) -> f64 {
    let s = 3f64.sqrt();
    let a = 2.0 * u1 + 0.5 * s * u3;
    let b = 1.0 - u1 * u1 + 0.5 * s * u1 * u3 - 19.0 / 16.0 * u3 * u3;
    2.0 * a * (0.5 * s) * b + a * a * (0.5 * s * u1 - 19.0 / 8.0 * u3)
}

fn ellipse_root_count(t: f64, w: f64, resolution: usize) -> usize {
    let a = ((t + 1.0) / 2.0).sqrt();
    let b = (8.0 * (t + 1.0) / 5.0).sqrt();
    let f = |psi: f64| rp2_q(a * psi.cos(), b * psi.sin()) - w * w;
    let mut count = 0;
    let mut prev = f(0.0);
    for i in 1..=resolution {
        let psi = std::f64::consts::TAU * i as f64 / resolution as f64;
        let cur = f(psi);
        if prev == 0.0 || prev.signum() != cur.signum() {
            count += 1;
        }
        prev = cur;
    }
    count
}

/// Fiber finiteness for the projective plane: level sets over the ellipse
/// are empty (t < -1), a point (t = -1), or meet q = w^2 in finitely many
/// points; the transversality identity dq/du3 = 2 sqrt3 u1 at u3 = 0
/// guarantees the variety never swallows the whole ellipse.
pub fn rp2_fiber_finiteness(t: f64, w: f64, resolution: usize) -> VerificationReport {
    let mut r = VerificationReport::new("rp2-fiber-finiteness");
    if t < -1.0 {
        r.details = json!({"solution_set": "empty", "t": t, "w": w});
        return r.finish(true);
    }
    if t == -1.0 {
        r.details = json!({"solution_set": "single point (0, 0)", "t": t, "w": w});
        return r.finish(true);
    }
    let count = ellipse_root_count(t, w, resolution);
    let count4 = ellipse_root_count(t, w, 4 * resolution);
    // gradient-independence at the two u3 = 0 ellipse points
    let a = ((t + 1.0) / 2.0).sqrt();
    let mut grad_resid = 0.0f64;
    for u1 in [a, -a] {
        let expect = 2.0 * 3f64.sqrt() * u1;
        grad_resid = grad_resid.max((rp2_dq_du3(u1, 0.0) - expect).abs());
        r.margin(
            &format!("dq_du3_nonzero_at_u1_{}", if u1 > 0.0 { "pos" } else { "neg" }),
            rp2_dq_du3(u1, 0.0).abs(),
            1e-12,
        );
    }
    r.residual("gradient_identity_residual", grad_resid, 1e-9);
    r.residual("root_count", count as f64, 8.0);
    r.residual(
        "root_count_refinement_drift",
        (count as f64 - count4 as f64).abs(),
        0.0,
    );
    r.details = json!({
        "t": t, "w": w,
        "root_count": count,
        "root_count_4x": count4,
        "resolution": resolution,
    });
    r.finish(true)
}

/// Expected extremum for [`extrema_verify`].
#[derive(Debug, Clone, Copy)]
pub struct ExpectedExtremum {
    pub chart: usize,
    pub param: Param2,
    pub value: f64,
    pub is_max: bool,
}

/// Dense-grid argmax/argmin of a real field, refined by gradient steps,
/// against expected locations (ambient distance < 1e-3, so antipodal chart
/// preimages of the same point agree) and values (within 1e-9).
pub fn extrema_verify(
    field: &dyn SurfaceField,
    surface: &ChartedSurface,
    expected: &[ExpectedExtremum],
    nu: usize,
    nv: usize,
) -> VerificationReport {
    let mut r = VerificationReport::new(&format!("extrema:{}", surface.name));
    let mut max_v = f64::NEG_INFINITY;
    let mut min_v = f64::INFINITY;
    let mut argmax = (0usize, [0.0, 0.0]);
    let mut argmin = (0usize, [0.0, 0.0]);
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            let v = field.value(ci, p).re;
            if v > max_v {
                max_v = v;
                argmax = (ci, p);
            }
            if v < min_v {
                min_v = v;
                argmin = (ci, p);
            }
        }
    }
    // polish the grid winners with small gradient steps
    let refine = |start: (usize, Param2), sign: f64| -> (usize, Param2, f64) {
        let (ci, mut p) = start;
        let dom = surface.charts[ci].map.domain();
        let mut step = 2.0 * (dom.hi[0] - dom.lo[0]) / nu as f64;
        let mut best = field.value(ci, p).re;
        for _ in 0..200 {
            let g = field.jac(ci, p)[0];
            let n = g[0].hypot(g[1]);
            if n < 1e-14 || step < 1e-12 {
                break;
            }
            let q = [p[0] + sign * step * g[0] / n, p[1] + sign * step * g[1] / n];
            if dom.contains(q).is_ok() {
                let v = field.value(ci, q).re;
                if sign * (v - best) > 0.0 {
                    best = v;
                    p = q;
                    continue;
                }
            }
            step *= 0.5;
        }
        (ci, p, best)
    };
    let (max_ci, max_p, max_v) = refine(argmax, 1.0);
    let (min_ci, min_p, min_v) = refine(argmin, -1.0);
    for e in expected {
        let (got_v, got_at) = if e.is_max {
            (max_v, (max_ci, max_p))
        } else {
            (min_v, (min_ci, min_p))
        };
        let name = if e.is_max { "max" } else { "min" };
        r.residual(&format!("{name}_value_error"), (got_v - e.value).abs(), 1e-9);
        let dist = surface
            .eval(got_at.0, got_at.1)
            .dist(&surface.eval(e.chart, e.param));
        r.residual(&format!("{name}_location_error"), dist, 1e-3);
        r.witness(
            name,
            Some(&surface.charts[got_at.0].name),
            Some(got_at.1),
            json!(got_v),
        );
    }
    r.grid = GridInfo {
        nu,
        nv,
        charts: surface.charts.iter().map(|c| c.name.clone()).collect(),
        points: nu * nv * surface.charts.len(),
        excluded: 0,
    };
    r.finish(true)
}

/// Uniqueness of the extremum: the set {g > max - band} must form a single
/// cluster in parameter space (per covering chart preimage).
pub fn extremum_uniqueness(
    field: &dyn SurfaceField,
    surface: &ChartedSurface,
    nu: usize,
    nv: usize,
    band: f64,
    expected_clusters: usize,
) -> VerificationReport {
    let mut r = VerificationReport::new(&format!("extremum-uniqueness:{}", surface.name));
    let mut max_v = f64::NEG_INFINITY;
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            max_v = max_v.max(field.value(ci, p).re);
        }
    }
    let mut pts: Vec<(usize, Param2)> = Vec::new();
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            if field.value(ci, p).re > max_v - band {
                pts.push((ci, p));
            }
        }
    }
    // single-linkage clustering at twice the grid spacing
    let link = 2.5 * (std::f64::consts::TAU / nu as f64);
    let mut cluster = vec![usize::MAX; pts.len()];
    let mut n_clusters = 0;
    for i in 0..pts.len() {
        if cluster[i] != usize::MAX {
            continue;
        }
        let id = n_clusters;
        n_clusters += 1;
        let mut stack = vec![i];
        cluster[i] = id;
        while let Some(j) = stack.pop() {
            for k in 0..pts.len() {
                if cluster[k] == usize::MAX
                    && pts[j].0 == pts[k].0
                    && surface.charts[pts[j].0]
                        .map
                        .domain()
                        .param_dist(pts[j].1, pts[k].1)
                        < link
                {
                    cluster[k] = id;
                    stack.push(k);
                }
            }
        }
    }
    r.residual(
        "cluster_count_excess",
        (n_clusters as f64 - expected_clusters as f64).abs(),
        0.0,
    );
    r.details = json!({"clusters": n_clusters, "near_max_points": pts.len(), "max": max_v});
    r.finish(true)
}

/// Projective-plane extrema: interior critical point of
/// g~(x1, x3) = 2 x1^2 + x3^2 + sqrt3 x1 x3 - 1 only at the origin with
/// value -1, and the boundary Lagrange system solved exactly by the four
/// known points with values 3/2, 3/2, -1/2, -1/2.
pub fn rp2_extrema_lagrange() -> VerificationReport {
    let s3 = 3f64.sqrt();
    let g = |x1: f64, x3: f64| 2.0 * x1 * x1 + x3 * x3 + s3 * x1 * x3 - 1.0;
    let grad = |x1: f64, x3: f64| [4.0 * x1 + s3 * x3, 2.0 * x3 + s3 * x1];
    let mut r = VerificationReport::new("rp2-extrema-lagrange");
    // interior critical point at the origin, value -1
    let g0 = grad(0.0, 0.0);
    r.residual("interior_gradient_at_origin", g0[0].hypot(g0[1]), 1e-12);
    r.residual("interior_value_error", (g(0.0, 0.0) + 1.0).abs(), 1e-9);
    // interior gradient vanishes nowhere else (dense scan of the open disc)
    let mut second_smallest = f64::INFINITY;
    for i in 0..800 {
        for j in 0..800 {
            let x1 = -1.0 + 2.0 * (i as f64 + 0.5) / 800.0;
            let x3 = -1.0 + 2.0 * (j as f64 + 0.5) / 800.0;
            if x1 * x1 + x3 * x3 >= 1.0 {
                continue;
            }
            let gv = grad(x1, x3);
            let n = gv[0].hypot(gv[1]);
            let d = x1.hypot(x3);
            if d > 0.05 {
                second_smallest = second_smallest.min(n / d);
            }
        }
    }
    // grad is linear nondegenerate: |grad| / |x| stays above the smallest
    // singular value of the Hessian
    r.margin("gradient_nondegeneracy", second_smallest, 0.5);
    // boundary Lagrange points
    let pts = [
        (s3 / 2.0, 0.5, 5.0, 1.5),
        (-s3 / 2.0, -0.5, 5.0, 1.5),
        (0.5, -s3 / 2.0, 1.0, -0.5),
        (-0.5, s3 / 2.0, 1.0, -0.5),
    ];
    let mut worst_resid = 0.0f64;
    let mut worst_val = 0.0f64;
    for (x1, x3, lambda, value) in pts {
        let gv = grad(x1, x3);
        let resid = (gv[0] - lambda * x1).hypot(gv[1] - lambda * x3);
        worst_resid = worst_resid.max(resid);
        worst_val = worst_val.max((g(x1, x3) - value).abs());
    }
    r.residual("lagrange_residual_max", worst_resid, 1e-9);
    r.residual("lagrange_value_error_max", worst_val, 1e-9);
    r.details = json!({"lambda_values": [5.0, 1.0]});
    r.finish(true)
}

/// Disc block-determinant identity: det of the (x1, x2) block of the Phi
/// Jacobian equals -chi chi' on alpha2 < |phi| < alpha.
pub fn check_disc_block_det(
    surface: &ChartedSurface,
    chi: &Profile1D,
    alpha2: f64,
    alpha: f64,
    nu: usize,
    nv: usize,
) -> VerificationReport {
    let mut r = VerificationReport::new("disc-block-determinant");
    let chart = &surface.charts[0];
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for p in chart.grid(nu, nv) {
        if p[1].abs() <= alpha2 || p[1].abs() >= alpha {
            continue;
        }
        checked += 1;
        let det = chart.map.jac(p).block_det_x1x2();
        let expect = -chi.value(p[1]) * chi.deriv(p[1]);
        let scale = 1.0 + expect.abs();
        worst = worst.max((det - expect).abs() / scale);
    }
    r.residual("block_det_relative_error", worst, 1e-8);
    r.details = json!({"points_checked": checked});
    r.finish(true)
}
