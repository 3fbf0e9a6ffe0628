//! The sign field k: zero exactly on the closure of the region above Z+,
//! the region below Z-, and the point set E1; positive between the paths
//! for 0 < theta < pi and negative for -pi < theta < 0.
//!
//! Realized as sin(theta) times flat walls. The sine factor kills k on the
//! two vertical segments L = {0, pi} x [-phi1+, phi1+] and makes k smooth
//! across the theta = +-pi seam. Each wall is a sum over sawtooth teeth of
//! products of one-sided flat functions of affine coordinates, so the whole
//! field is smooth by construction; the wall glue constant is chosen so the
//! band where a wall underflows to exact zero is narrower than 1e-6.

use super::glue::{e_flat, e_flat_d, exact_zero_width, WALL_C};
use super::sawtooth::SawtoothSpec;
use crate::smooth::Param2;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Radius of the dip each E1 sample carves out of k.
pub const E1_WALL_RADIUS: f64 = 1e-3;

/// One-sided wall: 0 for t <= 0 (flat), positive for t > 0.
#[inline]
fn wall(t: f64) -> f64 {
    e_flat(t, WALL_C)
}

#[inline]
fn wall_d(t: f64) -> f64 {
    e_flat_d(t, WALL_C)
}

/// Compact two-sided step on [0, 1] with the wall glue: exactly 0 at <= 0,
/// exactly 1 at >= 1.
#[inline]
fn wall_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = e_flat(x, WALL_C);
        let b = e_flat(1.0 - x, WALL_C);
        a / (a + b)
    }
}

#[inline]
fn wall_step_d(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let a = e_flat(x, WALL_C);
        let b = e_flat(1.0 - x, WALL_C);
        let da = e_flat_d(x, WALL_C);
        let db = -e_flat_d(1.0 - x, WALL_C);
        (da * b - a * db) / ((a + b) * (a + b))
    }
}

/// Sampled stand-in for the compact set E1 inside the annulus |phi| < phi1-.
pub fn sample_e1(saw: &SawtoothSpec, count: usize, seed: u64) -> Vec<Param2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = saw.phi1_minus * 0.999;
    (0..count)
        .map(|_| {
            [
                rng.random_range(-PI..PI),
                rng.random_range(-band..band),
            ]
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SignFieldK {
    saw: SawtoothSpec,
    e1: Vec<Param2>,
    /// Spatial hash over E1 (cell size = 3 * E1_WALL_RADIUS), with ghost
    /// copies across the theta seam.
    grid: HashMap<(i64, i64), Vec<usize>>,
    ghosted: Vec<Param2>,
    cell: f64,
    h_over: f64,
}

impl SignFieldK {
    pub fn new(saw: SawtoothSpec, e1: Vec<Param2>) -> SignFieldK {
        let cell = 3.0 * E1_WALL_RADIUS;
        let mut ghosted = Vec::with_capacity(e1.len() + 16);
        for &p in &e1 {
            ghosted.push(p);
            if p[0] > PI - cell {
                ghosted.push([p[0] - 2.0 * PI, p[1]]);
            }
            if p[0] < -PI + cell {
                ghosted.push([p[0] + 2.0 * PI, p[1]]);
            }
        }
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in ghosted.iter().enumerate() {
            let key = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
            grid.entry(key).or_default().push(i);
        }
        let h_over = 0.1 * (saw.phi1_plus() - saw.phi1_minus);
        SignFieldK {
            saw,
            e1,
            grid,
            ghosted,
            cell,
            h_over,
        }
    }

    pub fn e1_points(&self) -> &[Param2] {
        &self.e1
    }

    /// Width of the exact-zero band around the nominal zero set.
    pub fn zero_fattening() -> f64 {
        exact_zero_width(WALL_C).sqrt() * E1_WALL_RADIUS + exact_zero_width(WALL_C)
    }

    /// Wall vanishing on the closed region above Z+ and positive strictly
    /// below it. Returns (value, gradient).
    fn wall_above(&self, p: Param2) -> (f64, [f64; 2]) {
        let (p_lo, p_hi) = (self.saw.phi1_minus, self.saw.phi1_plus());
        let per = self.saw.period();
        let slope = (p_hi - p_lo) / per;
        let norm = (1.0 + slope * slope).sqrt();

        // base: below the line phi = phi1-
        let mut v = wall(p_lo - p[1]);
        let mut g = [0.0, -wall_d(p_lo - p[1])];

        // tooth triangle for the containing period
        let th_m = per * (p[0] / per).floor();
        let a = p[0] - th_m;
        let diag = p_hi - slope * a;
        let b = (diag - p[1]) / norm;
        let c = p[1] - (p_lo - self.h_over);
        let (wa, wb, wc) = (wall(a), wall(b), wall(c));
        if wa > 0.0 && wb > 0.0 && wc > 0.0 {
            let (da, db, dc) = (wall_d(a), wall_d(b), wall_d(c));
            v += wa * wb * wc;
            g[0] += da * wb * wc + wa * db * wc * (-slope / norm);
            g[1] += wa * db * wc * (-1.0 / norm) + wa * wb * dc;
        }
        (v, g)
    }

    /// Product of E1 dips near p (1.0 when no sample is close).
    fn e1_factor(&self, p: Param2) -> (f64, [f64; 2]) {
        let r2 = E1_WALL_RADIUS * E1_WALL_RADIUS;
        let key = (
            (p[0] / self.cell).floor() as i64,
            (p[1] / self.cell).floor() as i64,
        );
        let mut prod = 1.0;
        let mut grad = [0.0, 0.0];
        let mut idx: Vec<usize> = Vec::new();
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(v) = self.grid.get(&(key.0 + di, key.1 + dj)) {
                    idx.extend_from_slice(v);
                }
            }
        }
        idx.sort_unstable();
        for i in idx {
            let q = self.ghosted[i];
            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
            let x = d2 / r2;
            if x >= 1.0 {
                continue;
            }
            let f = wall_step(x);
            let df = wall_step_d(x) * 2.0 / r2;
            let fg = [df * (p[0] - q[0]), df * (p[1] - q[1])];
            grad = [grad[0] * f + prod * fg[0], grad[1] * f + prod * fg[1]];
            prod *= f;
        }
        (prod, grad)
    }

    /// Value and gradient of k.
    pub fn eval(&self, p: Param2) -> (f64, [f64; 2]) {
        let s = p[0].sin();
        let ds = p[0].cos();
        let (wu, gu) = self.wall_above(p);
        let (wdn, gdn_m) = self.wall_above([-p[0], -p[1]]);
        let gdn = [gdn_m[0], gdn_m[1]]; // gradient of wall_above at mirrored point
        let (pe, ge) = self.e1_factor(p);

        let w = wu * wdn * pe;
        let v = s * w;
        // d/dp [wdn(p)] = -grad wall_above(-p)
        let gw = [
            gu[0] * wdn * pe - wu * gdn[0] * pe + wu * wdn * ge[0],
            gu[1] * wdn * pe - wu * gdn[1] * pe + wu * wdn * ge[1],
        ];
        (v, [ds * w + s * gw[0], s * gw[1]])
    }

    pub fn value(&self, p: Param2) -> f64 {
        self.eval(p).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> SignFieldK {
        let saw = SawtoothSpec::default();
        let e1 = sample_e1(&saw, 500, 7);
        SignFieldK::new(saw, e1)
    }

    #[test]
    fn zero_on_path_and_above() {
        let k = field();
        let saw = SawtoothSpec::default();
        // on a vertical segment of Z+
        assert_eq!(k.value([saw.period(), 0.5 * (saw.phi1_minus + saw.phi1_plus())]), 0.0);
        // above Z+
        assert_eq!(k.value([1.0, 0.9]), 0.0);
        assert_eq!(k.value([2.2, saw.phi3 + 0.3]), 0.0);
        // below Z-
        assert_eq!(k.value([1.0, -0.9]), 0.0);
        // on L
        assert_eq!(k.value([0.0, 0.05]), 0.0);
    }

    #[test]
    fn signs_between_paths() {
        let k = field();
        let p = [PI / 2.0, 0.0];
        let vplus = k.value(p);
        let vminus = k.value([-p[0], p[1]]);
        // E1 dips could zero a specific point; these defaults do not.
        assert!(vplus > 0.0, "k = {vplus} at {p:?}");
        assert!(vminus < 0.0);
        assert!((vplus + vminus).abs() < 1e-15, "odd symmetry up to e1 dips");
    }

    #[test]
    fn zero_at_e1_samples() {
        let k = field();
        for &q in k.e1_points().iter().take(32) {
            assert_eq!(k.value(q), 0.0, "k nonzero at e1 sample {q:?}");
        }
    }

    #[test]
    fn gradient_matches_fd_away_from_dips() {
        let k = field();
        let h = 1e-5;
        'outer: for &(th, ph) in &[(1.1, 0.03), (2.4, -0.06), (-0.9, 0.02), (0.7, -0.01)] {
            for &q in k.e1_points() {
                if ((th - q[0]).powi(2) + (ph - q[1]).powi(2)).sqrt() < 2.0 * E1_WALL_RADIUS {
                    continue 'outer;
                }
            }
            let (_, g) = k.eval([th, ph]);
            let fd0 = (k.value([th + h, ph]) - k.value([th - h, ph])) / (2.0 * h);
            let fd1 = (k.value([th, ph + h]) - k.value([th, ph - h])) / (2.0 * h);
            assert!((g[0] - fd0).abs() < 1e-6, "at ({th},{ph}): {} vs {}", g[0], fd0);
            assert!((g[1] - fd1).abs() < 1e-6, "at ({th},{ph}): {} vs {}", g[1], fd1);
        }
    }

    #[test]
    fn seam_continuity() {
        let k = field();
        for i in 0..20 {
            let ph = -0.08 + i as f64 * 0.008;
            let a = k.value([PI - 1e-7, ph]);
            let b = k.value([-PI + 1e-7, ph]);
            assert!((a + b).abs() < 1e-6, "seam mismatch {a} vs {b}");
        }
    }
}
