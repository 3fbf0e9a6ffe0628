//! Level-set sampling and the per-level polynomial-convexity certificates:
//! the torus circle criterion for pure-imaginary levels, plane containment
//! for the outer bands, and the disc-algebra obstruction for real levels.

use super::report::{GridInfo, VerificationReport};
use super::{disc_algebra_obstruction, torus_circle_tolerances};
use crate::bump::{DiscFieldF, GhVariant};
use crate::error::{CoreError, Result};
use crate::num::{max_circular_gap, solve2, wrap_angle, C64};
use crate::smooth::{CPoint, Param2};
use crate::surface::{v_e_residual, v_i_residual, ChartedSurface, SurfaceField};
use serde_json::json;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct FiberPoint {
    pub chart: usize,
    pub param: Param2,
    pub z: CPoint,
}

/// A sampled level set f^-1(t), tagged with the grid and inclusion
/// tolerance that produced it.
#[derive(Debug, Clone)]
pub struct FiberSample {
    pub level: C64,
    pub points: Vec<FiberPoint>,
    pub resolution: (usize, usize),
    pub tolerance: f64,
}

/// Grid prefilter at 10x tolerance, one Newton step toward the level set,
/// then the strict inclusion test. Duplicate cells collapse to one point.
pub fn sample_fiber(
    field: &dyn SurfaceField,
    surface: &ChartedSurface,
    t: C64,
    nu: usize,
    nv: usize,
    tol: f64,
) -> FiberSample {
    let mut points = Vec::new();
    for (ci, chart) in surface.charts.iter().enumerate() {
        let dom = chart.map.domain();
        let cell = [
            (dom.hi[0] - dom.lo[0]) / nu as f64,
            (dom.hi[1] - dom.lo[1]) / nv as f64,
        ];
        let mut seen = std::collections::BTreeSet::new();
        for p in chart.grid(nu, nv) {
            let v = field.value(ci, p);
            if (v - t).abs() >= 10.0 * tol {
                continue;
            }
            // one Newton step: real fields move along the gradient, complex
            // fields solve the 2x2 system
            let j = field.jac(ci, p);
            let rhs = t - v;
            let q = if field.is_real() {
                let g = j[0];
                let n2 = g[0] * g[0] + g[1] * g[1];
                if n2 > 1e-18 {
                    [p[0] + rhs.re * g[0] / n2, p[1] + rhs.re * g[1] / n2]
                } else {
                    p
                }
            } else {
                match solve2([j[0], j[1]], [rhs.re, rhs.im]) {
                    Some(dq) => [p[0] + dq[0], p[1] + dq[1]],
                    None => p,
                }
            };
            let q = if dom.contains(q).is_ok() && !chart.in_hole(q) {
                q
            } else {
                p
            };
            if (field.value(ci, q) - t).abs() >= tol {
                continue;
            }
            let key = (
                ((q[0] - dom.lo[0]) / cell[0]).floor() as i64,
                ((q[1] - dom.lo[1]) / cell[1]).floor() as i64,
            );
            if seen.insert(key) {
                points.push(FiberPoint {
                    chart: ci,
                    param: q,
                    z: chart.map.eval(q),
                });
            }
        }
    }
    FiberSample {
        level: t,
        points,
        resolution: (nu, nv),
        tolerance: tol,
    }
}

/// Exact-zero fiber: points where the field evaluates to exactly 0.0 + 0.0 i.
pub fn sample_zero_fiber(
    field: &dyn SurfaceField,
    surface: &ChartedSurface,
    nu: usize,
    nv: usize,
) -> FiberSample {
    let mut points = Vec::new();
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            let v = field.value(ci, p);
            if v.re == 0.0 && v.im == 0.0 {
                points.push(FiberPoint {
                    chart: ci,
                    param: p,
                    z: chart.map.eval(p),
                });
            }
        }
    }
    FiberSample {
        level: C64::ZERO,
        points,
        resolution: (nu, nv),
        tolerance: 0.0,
    }
}

/// Torus circle criterion: the sample avoids some vertical circle
/// {z1 = c*} and covers no vertical circle entirely.
pub fn torus_circle_criterion(sample: &FiberSample) -> Result<VerificationReport> {
    for fp in &sample.points {
        let on_torus =
            (fp.z.z(0).abs() - 1.0).abs() < 1e-8 && (fp.z.z(1).abs() - 1.0).abs() < 1e-8;
        if !on_torus {
            return Err(CoreError::SampleRejected(format!(
                "fiber point off the torus at chart {} {:?}",
                fp.chart, fp.param
            )));
        }
    }
    let mut r = VerificationReport::new("torus-circle-criterion");
    let (gap_min, cover_gap) = torus_circle_tolerances(sample.resolution);
    let args1: Vec<f64> = sample.points.iter().map(|p| p.z.z(0).arg()).collect();
    let (gap, center) = max_circular_gap(&args1);
    r.margin("z1_argument_gap", gap, gap_min);
    r.witness("gap_center", None, Some([center, 0.0]), json!(gap));

    // per-bin coverage of the z2 circle
    let nbins = 64usize;
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); nbins];
    for p in &sample.points {
        let a = wrap_angle(p.z.z(0).arg());
        let idx = (((a + PI) / (2.0 * PI) * nbins as f64) as usize).min(nbins - 1);
        bins[idx].push(p.z.z(1).arg());
    }
    let mut covered_bins = 0usize;
    let mut worst_bin_gap = f64::INFINITY;
    for b in &bins {
        if b.len() < 8 {
            continue;
        }
        let (bgap, _) = max_circular_gap(b);
        worst_bin_gap = worst_bin_gap.min(bgap);
        if bgap <= cover_gap {
            covered_bins += 1;
        }
    }
    r.residual("covered_vertical_circles", covered_bins as f64, 0.0);
    r.details = json!({
        "points": sample.points.len(),
        "min_bin_gap": if worst_bin_gap.is_finite() { worst_bin_gap } else { -1.0 },
        "cover_gap_threshold": cover_gap,
    });
    Ok(r.finish(!sample.points.is_empty()))
}

/// Which certificate applied at a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LevelCertificate {
    CircleCriterion,
    VeContainment,
    ViContainment,
    DiscAlgebraObstruction,
}

pub struct PeakCompatConfig {
    pub imag_fracs: Vec<f64>,
    pub real_levels: Vec<f64>,
    pub grid: (usize, usize),
    pub fourier_coeffs: usize,
    pub fourier_samples: usize,
    pub plane_tol: f64,
}

impl Default for PeakCompatConfig {
    fn default() -> Self {
        PeakCompatConfig {
            imag_fracs: vec![0.15, 0.3, 0.5, 0.7],
            real_levels: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            grid: (384, 384),
            fourier_coeffs: 24,
            fourier_samples: 4096,
            plane_tol: 1e-8,
        }
    }
}

/// Uniform circle graph of a real level of the disc field: for each theta,
/// bisect in phi for the crossing of h (or its reflection) at value c, and
/// return the z2 coordinates of the disc chart there.
fn level_graph(
    f: &DiscFieldF,
    disc: &ChartedSurface,
    c: f64,
    upper: bool,
    samples: usize,
) -> (Vec<CPoint>, f64, f64) {
    let chart = &disc.charts[0];
    let phi3 = f.gh.saw.phi3;
    let mut out = Vec::with_capacity(samples);
    let mut phi_lo = f64::INFINITY;
    let mut phi_hi = f64::NEG_INFINITY;
    for i in 0..samples {
        let theta = -PI + 2.0 * PI * i as f64 / samples as f64;
        // on the upper band f = -h decreases from 0 to -1; on the lower band
        // f = h_r increases from 0 to 1 as phi decreases
        let h_at = |phi: f64| -> f64 {
            if upper {
                f.gh.eval([theta, phi], GhVariant::H).0
            } else {
                f.gh.eval([-theta, -phi], GhVariant::H).0
            }
        };
        let (mut lo, mut hi) = if upper {
            (0.0, phi3 + 1e-9)
        } else {
            (-phi3 - 1e-9, 0.0)
        };
        // h_at is monotone in |phi| on the band
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let v = h_at(mid);
            if upper {
                if v < c {
                    lo = mid;
                } else {
                    hi = mid;
                }
            } else if v > c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let phi = 0.5 * (lo + hi);
        phi_lo = phi_lo.min(phi.abs());
        phi_hi = phi_hi.max(phi.abs());
        out.push(chart.map.eval([theta, phi]));
    }
    (out, phi_lo, phi_hi)
}

/// Aggregate per-level certificates for the disc field, mirroring the case
/// split: pure-imaginary levels by the circle criterion, the outer bands by
/// plane containment, real levels by the disc-algebra obstruction.
pub fn fiber_peak_compat(
    f: &DiscFieldF,
    field: &dyn SurfaceField,
    disc: &ChartedSurface,
    cfg: &PeakCompatConfig,
) -> VerificationReport {
    let mut r = VerificationReport::new("fiber-peak-compat");
    let mut levels = Vec::new();
    let mut all_ok = true;

    // max |k| over the annulus band to scale the imaginary levels
    let mut k_max = 0.0f64;
    {
        let band = f.gh.saw.phi1_plus();
        for i in 0..600 {
            for j in 0..60 {
                let p = [
                    -PI + 2.0 * PI * i as f64 / 600.0,
                    -band + 2.0 * band * j as f64 / 60.0,
                ];
                k_max = k_max.max(f.k.value(p).abs());
            }
        }
    }

    // pure-imaginary levels: circle criterion on the torus annulus. The
    // inclusion tolerance is relative to the level (a 10% band): the
    // criterion is about arc coverage, which the thickened fiber shares
    // with the exact one.
    for frac in &cfg.imag_fracs {
        for sign in [1.0, -1.0] {
            let t = C64::new(0.0, sign * frac * k_max);
            let sample = sample_fiber(field, disc, t, cfg.grid.0, cfg.grid.1, 0.1 * t.abs());
            let cert = torus_circle_criterion(&sample);
            let ok = cert.as_ref().map(|c| c.pass).unwrap_or(false);
            all_ok &= ok;
            levels.push(json!({
                "level": [t.re, t.im],
                "certificate": LevelCertificate::CircleCriterion,
                "pass": ok,
                "points": sample.points.len(),
            }));
        }
    }

    // t = 1: V_e containment; t = -1: V_i containment
    for (t, is_ve) in [(1.0, true), (-1.0, false)] {
        let sample = sample_fiber(
            field,
            disc,
            C64::new(t, 0.0),
            cfg.grid.0,
            cfg.grid.1,
            1e-6,
        );
        let mut worst = 0.0f64;
        for p in &sample.points {
            let resid = if is_ve {
                v_e_residual(&p.z)
            } else {
                v_i_residual(&p.z)
            };
            worst = worst.max(resid);
        }
        let ok = worst <= cfg.plane_tol && !sample.points.is_empty();
        all_ok &= ok;
        r.residual(
            if is_ve {
                "ve_containment_residual"
            } else {
                "vi_containment_residual"
            },
            worst,
            cfg.plane_tol,
        );
        levels.push(json!({
            "level": [t, 0.0],
            "certificate": if is_ve { LevelCertificate::VeContainment } else { LevelCertificate::ViContainment },
            "pass": ok,
            "points": sample.points.len(),
        }));
    }

    // real levels in (0, 1) and (-1, 0): obstruction on the circle graph,
    // unless the graph sits entirely in the outer plane bands
    let alpha3 = f.gh.cutoffs.alpha3;
    for &c in &cfg.real_levels {
        for upper in [true, false] {
            // upper band carries f = -c, lower band f = +c
            let t = if upper { -c } else { c };
            let (graph, band_lo, _band_hi) = level_graph(f, disc, c, upper, cfg.fourier_samples);
            let (cert, ok) = if band_lo >= alpha3 {
                // whole level inside the outer band: plane containment
                let mut worst = 0.0f64;
                for z in &graph {
                    let resid = if upper {
                        v_i_residual(z)
                    } else {
                        v_e_residual(z)
                    };
                    worst = worst.max(resid);
                }
                (
                    if upper {
                        LevelCertificate::ViContainment
                    } else {
                        LevelCertificate::VeContainment
                    },
                    worst <= cfg.plane_tol,
                )
            } else {
                let v_graph: Vec<C64> = graph.iter().map(|z| z.z(1)).collect();
                let rep = disc_algebra_obstruction(&v_graph, cfg.fourier_coeffs);
                (
                    LevelCertificate::DiscAlgebraObstruction,
                    rep.map(|x| x.pass).unwrap_or(false),
                )
            };
            all_ok &= ok;
            levels.push(json!({
                "level": [t, 0.0],
                "certificate": cert,
                "pass": ok,
            }));
        }
    }

    r.grid = GridInfo {
        nu: cfg.grid.0,
        nv: cfg.grid.1,
        charts: vec![disc.charts[0].name.clone()],
        points: 0,
        excluded: 0,
    };
    r.residual(
        "levels_failed",
        levels
            .iter()
            .filter(|l| !l["pass"].as_bool().unwrap_or(false))
            .count() as f64,
        0.0,
    );
    r.details = json!({"levels": levels, "k_max": k_max});
    r.finish(all_ok)
}

/// Per-level certificates for a chain field: interior levels of each link
/// translate back to the standard torus and satisfy the circle criterion;
/// plateau levels live in the flattened port patches (totally real planes).
pub fn chain_fiber_compat(
    chain: &crate::surface::ChainSurface,
    grid: (usize, usize),
) -> VerificationReport {
    let mut r = VerificationReport::new("chain-fiber-compat");
    let mut levels = Vec::new();
    let mut all_ok = true;
    for (k, charts) in chain.link_charts.iter().enumerate() {
        let offset = chain.link_offsets[k];
        // interior levels: fibers stay on the torus part
        for t in [-1.2, -0.5, 0.0, 0.7, 1.3] {
            let level = C64::new(t + offset, 0.0);
            let sample = sample_fiber(
                chain.field.as_ref(),
                &chain.surface,
                level,
                grid.0,
                grid.1,
                2e-3,
            );
            let pts: Vec<FiberPoint> = sample
                .points
                .into_iter()
                .filter(|p| charts.contains(&p.chart))
                .collect();
            // translate back: the link chart is the flattened torus shifted
            // by tau^k, so subtracting the shift lands on the standard torus
            let shifted: Vec<FiberPoint> = pts
                .into_iter()
                .map(|p| FiberPoint {
                    chart: 0,
                    param: p.param,
                    z: CPoint::from_c2(
                        p.z.z(0) - C64::new(5.0 * k as f64, 0.0),
                        p.z.z(1) - C64::new(2.0 * k as f64, 0.0),
                    ),
                })
                .collect();
            let sample = FiberSample {
                level,
                points: shifted,
                resolution: grid,
                tolerance: 2e-3,
            };
            let ok = torus_circle_criterion(&sample)
                .map(|c| c.pass)
                .unwrap_or(false);
            all_ok &= ok;
            levels.push(serde_json::json!({
                "level": level.re,
                "link": k,
                "certificate": LevelCertificate::CircleCriterion,
                "pass": ok,
                "points": sample.points.len(),
            }));
        }
        // plateau levels: fibers sit in the flat port patches
        for (t, port) in [(-1.5, "min"), (1.5, "max")] {
            let level = C64::new(t + offset, 0.0);
            let mp = match chain.surface.marked_point(&format!("link{k}/{port}")) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let sample = sample_fiber(
                chain.field.as_ref(),
                &chain.surface,
                level,
                grid.0,
                grid.1,
                1e-9,
            );
            let mut ok = !sample.points.is_empty();
            for p in &sample.points {
                if charts.contains(&p.chart) {
                    ok &= p.z.dist(&mp.ambient) < 0.2;
                }
            }
            all_ok &= ok;
            levels.push(serde_json::json!({
                "level": level.re,
                "link": k,
                "certificate": "flat-patch",
                "pass": ok,
                "points": sample.points.len(),
            }));
        }
    }
    r.residual(
        "levels_failed",
        levels
            .iter()
            .filter(|l| !l["pass"].as_bool().unwrap_or(false))
            .count() as f64,
        0.0,
    );
    r.details = serde_json::json!({"levels": levels});
    r.finish(all_ok)
}
