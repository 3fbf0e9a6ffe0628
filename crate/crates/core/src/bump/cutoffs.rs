//! The cutoff triple (beta, gamma, chi) and the flattening ramp chi_delta.
//!
//! beta:  0 on |phi| <= a1, 1 on |phi| >= a3, even, strictly monotone with
//!        nonvanishing derivative on each transition.
//! gamma: phi on |phi| <= a2, +-pi/2 beyond +-a3, odd, strictly monotone.
//! chi:   1 on |phi| <= a2, 0 beyond alpha, blows up as phi -> -alpha+.
//!
//! gamma's transition is produced by integrating a positive derivative
//! profile (a step plus a hump correction) so that the function leaves the
//! identity flatly at a2, stays strictly increasing past pi/2, and lands on
//! the pi/2 plateau exactly at a3.

use super::glue::{hump_half_integral, step, step_d, GLUE_C};
use super::profile::{CertifiedInterval, IntervalProperty, Parity, Profile1D};
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

/// Angular cutoff thresholds. Required ordering:
/// 0 < alpha1 < alpha2 < pi/2 < alpha3 < alpha < pi.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CutoffSpec {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec {
            alpha1: 0.3,
            alpha2: 0.7,
            alpha3: 1.8,
            alpha: 2.8,
        }
    }
}

impl CutoffSpec {
    pub fn validate(&self) -> Result<()> {
        let v = [
            0.0,
            self.alpha1,
            self.alpha2,
            FRAC_PI_2,
            self.alpha3,
            self.alpha,
            PI,
        ];
        if v.windows(2).all(|w| w[0] < w[1]) {
            Ok(())
        } else {
            Err(CoreError::OrderingViolation {
                requirement: "0 < alpha1 < alpha2 < pi/2 < alpha3 < alpha < pi".into(),
                values: vec![self.alpha1, self.alpha2, self.alpha3, self.alpha],
            })
        }
    }
}

pub struct Cutoffs {
    pub spec: CutoffSpec,
    pub beta: Profile1D,
    pub gamma: Profile1D,
    pub chi: Profile1D,
}

/// Monotone transition defined by integrating a derivative profile.
/// Values come from a cumulative Simpson table with Hermite interpolation;
/// derivatives are analytic.
#[derive(Clone)]
struct IntegratedTransition {
    lo: f64,
    hi: f64,
    scale: f64,
    kappa: f64,
    start_value: f64,
    nodes_q: Arc<Vec<f64>>,
}

const TRANSITION_PANELS: usize = 4096;

impl IntegratedTransition {
    /// Derivative profile before scaling: step from 1 (at lo, flatly) to 0
    /// (at hi, flatly) plus kappa times a hump vanishing flatly at both ends.
    fn d_raw(lo: f64, hi: f64, kappa: f64, x: f64) -> f64 {
        let w = hi - lo;
        step((hi - x) / w, GLUE_C) + kappa * hump_half_integral((x - lo) / w, GLUE_C)
    }

    /// Build a transition from `start_value` at `lo` (slope 1, all higher
    /// derivatives matching the identity) to `end_value` at `hi` (flat).
    fn build(lo: f64, hi: f64, start_value: f64, end_value: f64) -> Result<IntegratedTransition> {
        let w = hi - lo;
        let target = end_value - start_value;
        // Integrals of the two derivative components (exact: step integrates
        // to w/2 by symmetry, the hump to w/2 by construction), refined by
        // quadrature so the endpoint lands within rounding of the target.
        let mut i_base = 0.0;
        let mut i_hump = 0.0;
        let n = TRANSITION_PANELS;
        let h = w / n as f64;
        for i in 0..n {
            let a = lo + i as f64 * h;
            let simpson = |f: &dyn Fn(f64) -> f64| h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
            i_base += simpson(&|x| step((hi - x) / w, GLUE_C));
            i_hump += simpson(&|x| hump_half_integral((x - lo) / w, GLUE_C));
        }
        let kappa = (target - i_base) / i_hump;
        // Reject derivative profiles that are not strictly positive inside.
        let mut min_d = f64::INFINITY;
        for i in 1..2000 {
            let x = lo + w * i as f64 / 2000.0;
            min_d = min_d.min(Self::d_raw(lo, hi, kappa, x));
        }
        if min_d <= 0.0 {
            return Err(CoreError::OrderingViolation {
                requirement: "transition derivative must stay positive (spec too asymmetric)"
                    .into(),
                values: vec![lo, hi, kappa, min_d],
            });
        }
        // Cumulative table.
        let mut q = Vec::with_capacity(n + 1);
        q.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = lo + i as f64 * h;
            acc += h / 6.0
                * (Self::d_raw(lo, hi, kappa, a)
                    + 4.0 * Self::d_raw(lo, hi, kappa, a + 0.5 * h)
                    + Self::d_raw(lo, hi, kappa, a + h));
            q.push(acc);
        }
        let scale = target / acc;
        Ok(IntegratedTransition {
            lo,
            hi,
            scale,
            kappa,
            start_value,
            nodes_q: Arc::new(q),
        })
    }

    fn value(&self, x: f64) -> f64 {
        let w = self.hi - self.lo;
        let n = self.nodes_q.len() - 1;
        let t = ((x - self.lo) / w * n as f64).clamp(0.0, n as f64 - 1e-9);
        let i = t.floor() as usize;
        let h = w / n as f64;
        let x0 = self.lo + i as f64 * h;
        let u = (x - x0) / h;
        // Cubic Hermite on [x0, x0+h] with exact endpoint derivatives.
        let q0 = self.nodes_q[i];
        let q1 = self.nodes_q[i + 1];
        let d0 = Self::d_raw(self.lo, self.hi, self.kappa, x0) * h;
        let d1 = Self::d_raw(self.lo, self.hi, self.kappa, x0 + h) * h;
        let u2 = u * u;
        let u3 = u2 * u;
        let q = q0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + d0 * (u3 - 2.0 * u2 + u)
            + q1 * (-2.0 * u3 + 3.0 * u2)
            + d1 * (u3 - u2);
        self.start_value + self.scale * q
    }

    fn deriv(&self, x: f64) -> f64 {
        self.scale * Self::d_raw(self.lo, self.hi, self.kappa, x)
    }

    fn end_value(&self) -> f64 {
        self.start_value + self.scale * self.nodes_q[self.nodes_q.len() - 1]
    }
}

/// Construct beta, gamma, chi for a validated spec.
pub fn make_cutoffs(spec: CutoffSpec) -> Result<Cutoffs> {
    spec.validate()?;
    let CutoffSpec {
        alpha1: a1,
        alpha2: a2,
        alpha3: a3,
        alpha,
    } = spec;

    // beta
    let wb = a3 - a1;
    let beta_f = move |phi: f64| {
        let x = (phi.abs() - a1) / wb;
        step(x, GLUE_C)
    };
    let beta_d = move |phi: f64| {
        let x = (phi.abs() - a1) / wb;
        phi.signum() * step_d(x, GLUE_C) / wb
    };
    let beta = Profile1D::new(
        "beta",
        (-PI, PI),
        Arc::new(beta_f),
        Arc::new(beta_d),
        vec![
            CertifiedInterval {
                lo: -a1,
                hi: a1,
                property: IntervalProperty::Constant(0.0),
            },
            CertifiedInterval {
                lo: a3,
                hi: PI,
                property: IntervalProperty::Constant(1.0),
            },
            CertifiedInterval {
                lo: a1,
                hi: a3,
                property: IntervalProperty::StrictlyIncreasing,
            },
            CertifiedInterval {
                lo: a1,
                hi: a3,
                property: IntervalProperty::NonvanishingDerivative,
            },
            CertifiedInterval {
                lo: -a3,
                hi: -a1,
                property: IntervalProperty::StrictlyDecreasing,
            },
        ],
        Some(Parity::Even),
        json!({"alpha1": a1, "alpha3": a3, "glue_c": GLUE_C}),
    );

    // gamma: identity on [-a2, a2], integrated transition on (a2, a3),
    // plateau pi/2 beyond, extended oddly.
    let trans = IntegratedTransition::build(a2, a3, a2, FRAC_PI_2)?;
    debug_assert!((trans.end_value() - FRAC_PI_2).abs() < 1e-12);
    let tr = trans.clone();
    let gamma_f = move |phi: f64| {
        let s = phi.abs();
        let v = if s <= a2 {
            s
        } else if s >= a3 {
            FRAC_PI_2
        } else {
            tr.value(s)
        };
        if phi < 0.0 {
            -v
        } else {
            v
        }
    };
    let tr2 = trans.clone();
    let gamma_d = move |phi: f64| {
        let s = phi.abs();
        if s <= a2 {
            1.0
        } else if s >= a3 {
            0.0
        } else {
            tr2.deriv(s)
        }
    };
    let gamma = Profile1D::new(
        "gamma",
        (-PI, PI),
        Arc::new(gamma_f),
        Arc::new(gamma_d),
        vec![
            CertifiedInterval {
                lo: a3,
                hi: PI,
                property: IntervalProperty::Constant(FRAC_PI_2),
            },
            CertifiedInterval {
                lo: -PI,
                hi: -a3,
                property: IntervalProperty::Constant(-FRAC_PI_2),
            },
            CertifiedInterval {
                lo: -a2,
                hi: a2,
                property: IntervalProperty::StrictlyIncreasing,
            },
            CertifiedInterval {
                lo: a2,
                hi: a3,
                property: IntervalProperty::StrictlyIncreasing,
            },
            CertifiedInterval {
                lo: a2,
                hi: a3,
                property: IntervalProperty::NonvanishingDerivative,
            },
        ],
        Some(Parity::Odd),
        json!({"alpha2": a2, "alpha3": a3, "kappa": trans.kappa, "glue_c": GLUE_C}),
    );

    // chi on (-alpha, +inf): blow-up branch, plateau 1, descent to 0.
    let wr = alpha - a2;
    let blow_c = 1.0 / wr;
    let chi_f = move |phi: f64| {
        if phi >= alpha {
            0.0
        } else if phi > a2 {
            1.0 - step((phi - a2) / wr, GLUE_C)
        } else if phi >= -a2 {
            1.0
        } else {
            // phi in (-alpha, -a2)
            let w = (-a2 - phi) / wr;
            1.0 + step(w, GLUE_C) * (1.0 / (phi + alpha) - blow_c)
        }
    };
    let chi_d = move |phi: f64| {
        if phi >= alpha || (-a2..=a2).contains(&phi) {
            0.0
        } else if phi > a2 {
            -step_d((phi - a2) / wr, GLUE_C) / wr
        } else {
            let w = (-a2 - phi) / wr;
            let s = step(w, GLUE_C);
            let ds = -step_d(w, GLUE_C) / wr;
            ds * (1.0 / (phi + alpha) - blow_c) - s / ((phi + alpha) * (phi + alpha))
        }
    };
    let chi = Profile1D::new(
        "chi",
        (-alpha, f64::INFINITY),
        Arc::new(chi_f),
        Arc::new(chi_d),
        vec![
            CertifiedInterval {
                lo: -a2,
                hi: a2,
                property: IntervalProperty::Constant(1.0),
            },
            CertifiedInterval {
                lo: alpha,
                hi: alpha + 1.0,
                property: IntervalProperty::Constant(0.0),
            },
            CertifiedInterval {
                lo: a2,
                hi: alpha,
                property: IntervalProperty::StrictlyDecreasing,
            },
            CertifiedInterval {
                lo: a2,
                hi: alpha,
                property: IntervalProperty::NonvanishingDerivative,
            },
            CertifiedInterval {
                lo: -alpha + 1e-4,
                hi: -a2,
                property: IntervalProperty::StrictlyDecreasing,
            },
            CertifiedInterval {
                lo: -alpha + 1e-4,
                hi: -a2,
                property: IntervalProperty::NonvanishingDerivative,
            },
        ],
        None,
        json!({"alpha2": a2, "alpha": alpha, "blow_shift": blow_c, "glue_c": GLUE_C}),
    );

    Ok(Cutoffs {
        spec,
        beta,
        gamma,
        chi,
    })
}

/// The nondecreasing ramp used by surface flattening: 0 for t <= 1,
/// 1 for t >= 2, together with mu = max of its derivative on (0, 2).
#[derive(Debug, Clone, Copy)]
pub struct Ramp;

impl Ramp {
    pub fn value(t: f64) -> f64 {
        step(t - 1.0, GLUE_C)
    }

    pub fn deriv(t: f64) -> f64 {
        step_d(t - 1.0, GLUE_C)
    }
}

/// mu = max over (0, 2) of the ramp derivative: dense scan refined locally
/// around the argmax so that any finer verification grid stays under
/// mu / delta + 1e-9.
pub fn ramp_mu() -> f64 {
    let n = 20000;
    let mut m: f64 = 0.0;
    let mut arg = 1.5;
    for i in 0..n {
        let t = 2.0 * (i as f64 + 0.5) / n as f64;
        let d = Ramp::deriv(t);
        if d > m {
            m = d;
            arg = t;
        }
    }
    let width = 4.0 / n as f64;
    for i in 0..n {
        let t = arg - width + 2.0 * width * i as f64 / n as f64;
        m = m.max(Ramp::deriv(t));
    }
    m
}

/// chi_delta(t) = ramp(t / delta): 0 on (-inf, delta], 1 on [2 delta, inf).
pub fn make_ramp(delta: f64) -> Result<Profile1D> {
    if !(delta > 0.0) {
        return Err(CoreError::InvalidArgument(format!(
            "ramp delta must be positive, got {delta}"
        )));
    }
    let f = move |t: f64| Ramp::value(t / delta);
    let df = move |t: f64| Ramp::deriv(t / delta) / delta;
    Ok(Profile1D::new(
        "chi_delta",
        (f64::NEG_INFINITY, f64::INFINITY),
        Arc::new(f),
        Arc::new(df),
        vec![
            CertifiedInterval {
                lo: -delta,
                hi: delta,
                property: IntervalProperty::Constant(0.0),
            },
            CertifiedInterval {
                lo: 2.0 * delta,
                hi: 4.0 * delta,
                property: IntervalProperty::Constant(1.0),
            },
            CertifiedInterval {
                lo: delta,
                hi: 2.0 * delta,
                property: IntervalProperty::StrictlyIncreasing,
            },
        ],
        None,
        json!({"delta": delta, "glue_c": GLUE_C}),
    ))
}
