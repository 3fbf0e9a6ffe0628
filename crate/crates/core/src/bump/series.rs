//! The pair of functions (g, h) on the parameter strip: g vanishes on and
//! below the sawtooth, rises strictly through the band above it, becomes
//! independent of theta past phi2, reaches 1 past phi3, and is 2 pi / n
//! periodic in theta; h agrees with g except on one window W where it is
//! strictly larger, which breaks the periodicity of its level-set graphs.
//!
//! Both are quotients of weighted double series of separated bumps
//! sigma_i(theta) tau_i(phi) by the theta-series lambda. The rectangle
//! cover behind the series is dyadic and implicit: at each level the
//! windows are a half-overlapping uniform grid of width w_l = (pi/n) 2^-l,
//! and the phi-threshold of a window is the sup of the sawtooth envelope
//! over it, computed on the fly. Deep levels carry rapidly decreasing
//! weights so the sum and two derivatives converge uniformly; the finitely
//! many levels kept leave an uncovered sliver above the sawtooth whose
//! height is recorded and checked against verification grids.

use super::cutoffs::CutoffSpec;
use super::glue::{bump, bump_d, step, step_d, GLUE_C};
use super::sawtooth::SawtoothSpec;
use crate::error::{CoreError, Result};
use crate::smooth::Param2;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

/// Per-family weights of the series, largest first: index 0 is the special
/// window W1 (the one h modifies), index l+1 is dyadic level l.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesWeights {
    pub c: Vec<f64>,
    /// Number of dyadic levels kept.
    pub truncation_order: usize,
    /// Uniform bound on the dropped tail's contribution through second
    /// derivatives.
    pub tail_bound: f64,
}

impl SeriesWeights {
    /// Weights c_l = 4^-l / (1 + N_l) with N_l a bound on the C^2 norm of
    /// the level-l summands, which makes the series converge uniformly in
    /// C^2. 21 levels put the uncovered sliver below 1e-6.
    pub fn dyadic(levels: usize, saw: &SawtoothSpec) -> SeriesWeights {
        let b2 = bump_c2_norm();
        let base_w = PI / saw.n as f64;
        let mut c = Vec::with_capacity(levels + 1);
        // W1 family: same width as level 0, weight doubled so it dominates.
        c.push(2.0 / (1.0 + b2 / (base_w * base_w)));
        for l in 0..levels {
            let w = base_w * 0.5f64.powi(l as i32);
            c.push(0.25f64.powi(l as i32) / (1.0 + b2 / (w * w)));
        }
        let tail = 3.0 * 0.25f64.powi(levels as i32);
        SeriesWeights {
            c,
            truncation_order: levels,
            tail_bound: tail,
        }
    }

    /// Depth at which the exact-zero sliver above the sawtooth drops below
    /// 1e-6 (plus two spare levels).
    pub fn auto_levels(saw: &SawtoothSpec) -> usize {
        let base_w = PI / saw.n as f64;
        let slope = (saw.phi1_plus() - saw.phi1_minus) / saw.period();
        let need = (base_w * slope / 5.4e-7).log2().ceil() as usize + 2;
        need.max(4)
    }

    pub fn auto(saw: &SawtoothSpec) -> SeriesWeights {
        SeriesWeights::dyadic(Self::auto_levels(saw), saw)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.len() != self.truncation_order + 1 {
            return Err(CoreError::TailBound {
                index: self.c.len(),
                detail: "weight count must be truncation_order + 1".into(),
            });
        }
        for (i, w) in self.c.windows(2).enumerate() {
            if !(w[1] > 0.0 && w[1] < w[0]) {
                return Err(CoreError::TailBound {
                    index: i + 1,
                    detail: format!("weights must decrease strictly: c[{}]={} c[{}]={}",
                        i, w[0], i + 1, w[1]),
                });
            }
        }
        Ok(())
    }
}

/// sup |b''| for the unit bump, scanned once.
fn bump_c2_norm() -> f64 {
    let n = 4000;
    let h = 1e-6;
    let mut m: f64 = 0.0;
    for i in 1..n {
        let x = i as f64 / n as f64;
        let d2 = (bump(x + h, GLUE_C) - 2.0 * bump(x, GLUE_C) + bump(x - h, GLUE_C)) / (h * h);
        m = m.max(d2.abs());
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhVariant {
    G,
    H,
}

/// Built evaluator for g, h and lambda.
#[derive(Debug, Clone)]
pub struct LemmaGh {
    pub cutoffs: CutoffSpec,
    pub saw: SawtoothSpec,
    pub weights: SeriesWeights,
    base_w: f64,
    period: f64,
    slope: f64,
}

struct Sums {
    num: f64,
    num_t: f64,
    num_p: f64,
    den: f64,
    den_t: f64,
}

impl LemmaGh {
    pub fn build(
        cutoffs: CutoffSpec,
        saw: SawtoothSpec,
        weights: SeriesWeights,
    ) -> Result<LemmaGh> {
        cutoffs.validate()?;
        saw.validate(&cutoffs)?;
        weights.validate()?;
        let period = saw.period();
        Ok(LemmaGh {
            base_w: PI / saw.n as f64,
            slope: (saw.phi1_plus() - saw.phi1_minus) / period,
            period,
            cutoffs,
            saw,
            weights,
        })
    }

    pub fn with_defaults() -> Result<LemmaGh> {
        let cutoffs = CutoffSpec::default();
        let saw = SawtoothSpec::default();
        let weights = SeriesWeights::auto(&saw);
        LemmaGh::build(cutoffs, saw, weights)
    }

    /// Height above the sawtooth below which coverage by the truncated
    /// series is not certified (value and phi-derivative may be exactly 0).
    pub fn uncovered_margin(&self) -> f64 {
        let w_last = self.base_w * 0.5f64.powi(self.weights.truncation_order as i32 - 1);
        2.0 * self.slope * w_last + 2e-6
    }

    /// Horizontal distance to a sawtooth vertex below which the margin
    /// above only certifies points past phi1+.
    pub fn vertex_margin(&self) -> f64 {
        2.0 * self.base_w * 0.5f64.powi(self.weights.truncation_order as i32 - 1)
    }

    fn tau(&self, phi: f64) -> (f64, f64) {
        let p3 = self.saw.phi3;
        (step(phi / p3, GLUE_C), step_d(phi / p3, GLUE_C) / p3)
    }

    /// tau-tilde ramp for threshold t: 0 below t, 1 above phi2.
    fn tau_tilde(&self, phi: f64, t: f64) -> (f64, f64) {
        let w = self.saw.phi2 - t;
        (step((phi - t) / w, GLUE_C), step_d((phi - t) / w, GLUE_C) / w)
    }

    fn accumulate(&self, theta: f64, phi: f64, variant: GhVariant, s: &mut Sums) {
        let (tau, dtau) = self.tau(phi);

        // W1 family: windows of width pi/n centered at pi/2 + j * period.
        {
            let w1 = self.base_w;
            let c1 = self.weights.c[0];
            let j = ((theta - PI / 2.0) / self.period).round();
            let center = PI / 2.0 + j * self.period;
            let x = (theta - (center - 0.5 * w1)) / w1;
            if x > 0.0 && x < 1.0 {
                let sg = bump(x, GLUE_C);
                let dsg = bump_d(x, GLUE_C) / w1;
                let (t0, dt0) = self.tau_tilde(phi, self.saw.phi1_plus());
                // j == 0 is the untranslated window; h swaps its tau_1 for tau_0.
                let use_tau0 = variant == GhVariant::H && j == 0.0;
                let (tt, dtt) = if use_tau0 {
                    (t0, dt0)
                } else {
                    (t0 * t0, 2.0 * t0 * dt0)
                };
                let ti = tt * tau;
                let dti = dtt * tau + tt * dtau;
                s.num += c1 * sg * ti;
                s.num_t += c1 * dsg * ti;
                s.num_p += c1 * sg * dti;
                s.den += c1 * sg;
                s.den_t += c1 * dsg;
            }
        }

        // Dyadic levels: half-overlapping windows, thresholds from the
        // envelope sup over each window. Window arithmetic runs in
        // period-reduced coordinates so the vertex-in-window comparisons are
        // exact (window edges can land exactly on sawtooth vertices, and an
        // ulp of drift there would break the periodicity of g).
        let theta_red = theta - self.period * (theta / self.period).floor();
        for l in 0..self.weights.truncation_order {
            let w = self.base_w * 0.5f64.powi(l as i32);
            let stepw = 0.5 * w;
            let cl = self.weights.c[l + 1];
            let k0 = (theta_red / stepw).floor();
            for k in [k0 - 1.0, k0] {
                let start = k * stepw;
                let x = (theta_red - start) / w;
                if x <= 0.0 || x >= 1.0 {
                    continue;
                }
                let t = self.saw.envelope_sup(start, start + w);
                let sg = bump(x, GLUE_C);
                let dsg = bump_d(x, GLUE_C) / w;
                let (tt, dtt) = self.tau_tilde(phi, t);
                let ti = tt * tau;
                let dti = dtt * tau + tt * dtau;
                s.num += cl * sg * ti;
                s.num_t += cl * dsg * ti;
                s.num_p += cl * sg * dti;
                s.den += cl * sg;
                s.den_t += cl * dsg;
            }
        }
    }

    /// Value and gradient of g or h at (theta, phi).
    pub fn eval(&self, p: Param2, variant: GhVariant) -> (f64, [f64; 2]) {
        let mut s = Sums {
            num: 0.0,
            num_t: 0.0,
            num_p: 0.0,
            den: 0.0,
            den_t: 0.0,
        };
        self.accumulate(p[0], p[1], variant, &mut s);
        let v = s.num / s.den;
        let dv_t = (s.num_t * s.den - s.num * s.den_t) / (s.den * s.den);
        let dv_p = s.num_p / s.den;
        (v, [dv_t, dv_p])
    }

    pub fn g(&self, p: Param2) -> f64 {
        self.eval(p, GhVariant::G).0
    }

    pub fn h(&self, p: Param2) -> f64 {
        self.eval(p, GhVariant::H).0
    }

    /// lambda(theta) = sum of all weighted sigma translates; positive for
    /// every theta.
    pub fn lambda(&self, theta: f64) -> f64 {
        let mut s = Sums {
            num: 0.0,
            num_t: 0.0,
            num_p: 0.0,
            den: 0.0,
            den_t: 0.0,
        };
        // phi high enough that every tau_i is 1 keeps the denominators shared.
        self.accumulate(theta, self.saw.phi3 + 1.0, GhVariant::G, &mut s);
        s.den
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({
            "cutoffs": self.cutoffs,
            "sawtooth": self.saw,
            "weights": {
                "c": self.weights.c,
                "truncation_order": self.weights.truncation_order,
                "tail_bound": self.weights.tail_bound,
            },
            "uncovered_margin": self.uncovered_margin(),
            "vertex_margin": self.vertex_margin(),
        })
    }
}
