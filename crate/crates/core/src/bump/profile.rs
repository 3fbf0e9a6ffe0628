//! One-variable profiles with derivative oracles and certified intervals.

use crate::error::{CoreError, Result};
use serde_json::json;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalProperty {
    Constant(f64),
    StrictlyIncreasing,
    StrictlyDecreasing,
    NonvanishingDerivative,
}

#[derive(Debug, Clone, Copy)]
pub struct CertifiedInterval {
    pub lo: f64,
    pub hi: f64,
    pub property: IntervalProperty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth function of one real variable with an analytic derivative and a
/// list of certified plateau/monotonicity intervals.
#[derive(Clone)]
pub struct Profile1D {
    pub name: String,
    /// Evaluation domain; values outside may be rejected by users of the profile.
    pub domain: (f64, f64),
    f: Fn1,
    df: Fn1,
    pub certified: Vec<CertifiedInterval>,
    pub parity: Option<Parity>,
    /// JSON description (construction constants) for reproducibility manifests.
    pub descriptor: serde_json::Value,
}

impl std::fmt::Debug for Profile1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile1D")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("certified", &self.certified.len())
            .finish()
    }
}

impl Profile1D {
    pub fn new(
        name: &str,
        domain: (f64, f64),
        f: Fn1,
        df: Fn1,
        certified: Vec<CertifiedInterval>,
        parity: Option<Parity>,
        descriptor: serde_json::Value,
    ) -> Profile1D {
        Profile1D {
            name: name.to_string(),
            domain,
            f,
            df,
            certified,
            parity,
            descriptor,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    /// Verify every certified interval on a dense sample and the declared
    /// parity to 1e-12. `samples` is per interval and must be >= 1000.
    pub fn certify(&self, samples: usize) -> Result<()> {
        if samples < 1000 {
            return Err(CoreError::InvalidArgument(
                "certification needs >= 1000 samples per interval".into(),
            ));
        }
        for ci in &self.certified {
            let w = ci.hi - ci.lo;
            let at = |i: usize| ci.lo + w * (i as f64 + 0.5) / samples as f64;
            match ci.property {
                IntervalProperty::Constant(c) => {
                    for i in 0..samples {
                        let v = self.value(at(i));
                        if v != c {
                            return Err(CoreError::InvalidArgument(format!(
                                "{}: plateau value {v} != {c} at x={}",
                                self.name,
                                at(i)
                            )));
                        }
                    }
                }
                IntervalProperty::StrictlyIncreasing | IntervalProperty::StrictlyDecreasing => {
                    let sgn = if ci.property == IntervalProperty::StrictlyIncreasing {
                        1.0
                    } else {
                        -1.0
                    };
                    let mut prev = self.value(at(0));
                    for i in 1..samples {
                        let v = self.value(at(i));
                        if sgn * (v - prev) <= 0.0 {
                            return Err(CoreError::InvalidArgument(format!(
                                "{}: monotonicity fails near x={}",
                                self.name,
                                at(i)
                            )));
                        }
                        prev = v;
                    }
                }
                IntervalProperty::NonvanishingDerivative => {
                    for i in 0..samples {
                        if self.deriv(at(i)) == 0.0 {
                            return Err(CoreError::InvalidArgument(format!(
                                "{}: derivative vanishes at x={}",
                                self.name,
                                at(i)
                            )));
                        }
                    }
                }
            }
        }
        if let Some(p) = self.parity {
            let reach = self.domain.1.min(-self.domain.0);
            for i in 0..samples {
                let x = reach * (i as f64 + 0.5) / samples as f64;
                let (a, b) = (self.value(x), self.value(-x));
                let resid = match p {
                    Parity::Even => (a - b).abs(),
                    Parity::Odd => (a + b).abs(),
                };
                if resid > 1e-12 {
                    return Err(CoreError::InvalidArgument(format!(
                        "{}: parity residual {resid} at x={x}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Finite-difference jumps of the first and second derivative across a
    /// junction point, for smooth-gluing verification.
    pub fn fd_junction_jump(&self, x0: f64, h: f64) -> (f64, f64) {
        let d1 = |x: f64| (self.value(x + h) - self.value(x - h)) / (2.0 * h);
        let d2 = |x: f64| {
            (self.value(x + h) - 2.0 * self.value(x) + self.value(x - h)) / (h * h)
        };
        let off = 3.0 * h;
        (
            (d1(x0 + off) - d1(x0 - off)).abs(),
            (d2(x0 + off) - d2(x0 - off)).abs(),
        )
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "domain": [self.domain.0, self.domain.1],
            "constants": self.descriptor,
            "certified_intervals": self.certified.iter().map(|ci| {
                json!({
                    "interval": [ci.lo, ci.hi],
                    "property": match ci.property {
                        IntervalProperty::Constant(c) => json!({"constant": c}),
                        IntervalProperty::StrictlyIncreasing => json!("strictly-increasing"),
                        IntervalProperty::StrictlyDecreasing => json!("strictly-decreasing"),
                        IntervalProperty::NonvanishingDerivative => json!("nonvanishing-derivative"),
                    }
                })
            }).collect::<Vec<_>>(),
            "parity": self.parity.map(|p| match p { Parity::Even => "even", Parity::Odd => "odd" }),
        })
    }
}
