//! Sawtooth paths and the region geometry they cut out of the parameter
//! strip: the closed set G_o on or below the path, the open band G_u
//! between the path and phi3, and the periodic upper envelope used by the
//! series cover.

use super::cutoffs::CutoffSpec;
use crate::error::{CoreError, Result};
use crate::smooth::Param2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sawtooth configuration. `phi1_plus` is always `phi1_minus + 2 pi / n`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SawtoothSpec {
    /// Positive, divisible by 4.
    pub n: u32,
    pub phi1_minus: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl Default for SawtoothSpec {
    fn default() -> Self {
        // phi1+ = phi1- + 2 pi / n must stay below alpha1; n = 32 leaves
        // phi1+ = 0.246 under the default alpha1 = 0.3.
        SawtoothSpec {
            n: 32,
            phi1_minus: 0.05,
            phi2: 0.5,
            phi3: 2.0,
        }
    }
}

impl SawtoothSpec {
    pub fn period(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn phi1_plus(&self) -> f64 {
        self.phi1_minus + self.period()
    }

    /// Internal consistency only: n divisible by 4, positive band, ordered
    /// phi thresholds. Path geometry needs no cutoff spec.
    pub fn validate_geometry(&self) -> Result<()> {
        if self.n == 0 || self.n % 4 != 0 {
            return Err(CoreError::InvalidArgument(format!(
                "sawtooth n must be a positive multiple of 4, got {}",
                self.n
            )));
        }
        let seq = [0.0, self.phi1_minus, self.phi1_plus(), self.phi2, self.phi3];
        if !seq.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::OrderingViolation {
                requirement: "0 < phi1- < phi1+ < phi2 < phi3".into(),
                values: seq.to_vec(),
            });
        }
        Ok(())
    }

    /// Full invariant, interleaved with the cutoff thresholds.
    pub fn validate(&self, cutoffs: &CutoffSpec) -> Result<()> {
        self.validate_geometry()?;
        let seq = [
            0.0,
            self.phi1_minus,
            self.phi1_plus(),
            cutoffs.alpha1,
            self.phi2,
            cutoffs.alpha2,
        ];
        if !seq.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::OrderingViolation {
                requirement: "0 < phi1- < phi1+ < alpha1 < phi2 < alpha2".into(),
                values: seq.to_vec(),
            });
        }
        if !(cutoffs.alpha3 < self.phi3 && self.phi3 < cutoffs.alpha) {
            return Err(CoreError::OrderingViolation {
                requirement: "alpha3 < phi3 < alpha".into(),
                values: vec![cutoffs.alpha3, self.phi3, cutoffs.alpha],
            });
        }
        Ok(())
    }

    /// Height of the diagonal through the period containing theta, measured
    /// at theta. At a vertex this is the top value phi1+.
    pub fn upper_envelope(&self, theta: f64) -> f64 {
        let per = self.period();
        let frac = theta - per * (theta / per).floor();
        if frac == 0.0 {
            self.phi1_plus()
        } else {
            self.phi1_plus() - (self.phi1_plus() - self.phi1_minus) * frac / per
        }
    }

    /// sup of the upper envelope over [a, b].
    pub fn envelope_sup(&self, a: f64, b: f64) -> f64 {
        let per = self.period();
        let next_vertex = per * (a / per).ceil();
        if next_vertex <= b || a == next_vertex {
            self.phi1_plus()
        } else {
            self.upper_envelope(a)
        }
    }

    /// Strictly above the path Z+.
    pub fn above_path(&self, p: Param2) -> bool {
        p[1] > self.upper_envelope(p[0])
    }

    /// On or below the path Z+ (the set G_o).
    pub fn in_g_o(&self, p: Param2) -> bool {
        !self.above_path(p)
    }

    /// Strictly above Z+ and strictly below phi3 (the set G_u).
    pub fn in_g_u(&self, p: Param2) -> bool {
        self.above_path(p) && p[1] < self.phi3
    }

    /// Height of p above the path (negative below).
    pub fn height_above(&self, p: Param2) -> f64 {
        p[1] - self.upper_envelope(p[0])
    }

    /// The open window W where h exceeds g.
    pub fn in_w(&self, p: Param2) -> bool {
        let half = 0.5 * self.period() / 2.0;
        (p[0] - PI / 2.0).abs() < half && p[1] > self.phi1_plus() && p[1] < self.phi2
    }
}

/// A polyline in parameter space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polyline {
    pub segments: Vec<[Param2; 2]>,
}

impl Polyline {
    pub fn dist(&self, p: Param2) -> f64 {
        self.segments
            .iter()
            .map(|s| seg_dist(p, s[0], s[1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// All segment endpoints.
    pub fn vertices(&self) -> Vec<Param2> {
        let mut v = Vec::new();
        for s in &self.segments {
            v.push(s[0]);
            v.push(s[1]);
        }
        v
    }
}

fn seg_dist(p: Param2, a: Param2, b: Param2) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// The three paths of the construction over theta in [-pi, pi]:
/// Z+ (vertical segments and diagonals), Z- (its image under
/// (theta, phi) -> (-theta, -phi)) and the two vertical segments L.
pub struct SawtoothPaths {
    pub z_plus: Polyline,
    pub z_minus: Polyline,
    pub l: Polyline,
}

pub fn make_sawtooth(spec: &SawtoothSpec) -> Result<SawtoothPaths> {
    spec.validate_geometry()?;
    let per = spec.period();
    let (p_lo, p_hi) = (spec.phi1_minus, spec.phi1_plus());
    let half_n = (spec.n / 2) as i64;
    let mut z_plus = Vec::new();
    for m in -half_n..=half_n {
        let th = m as f64 * per;
        z_plus.push([[th, p_lo], [th, p_hi]]);
        if m < half_n {
            z_plus.push([[th, p_hi], [th + per, p_lo]]);
        }
    }
    let z_minus = z_plus
        .iter()
        .map(|s| [[-s[0][0], -s[0][1]], [-s[1][0], -s[1][1]]])
        .collect();
    let l = vec![
        [[0.0, -p_hi], [0.0, p_hi]],
        [[PI, -p_hi], [PI, p_hi]],
    ];
    Ok(SawtoothPaths {
        z_plus: Polyline { segments: z_plus },
        z_minus: Polyline { segments: z_minus },
        l: Polyline { segments: l },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec4() -> SawtoothSpec {
        SawtoothSpec {
            n: 4,
            phi1_minus: 0.02,
            phi2: 1.7,
            phi3: 2.0,
        }
    }

    #[test]
    fn vertical_abscissas_for_n4() {
        let s = spec4();
        let paths = make_sawtooth(&s).unwrap();
        let mut verticals: Vec<f64> = paths
            .z_plus
            .segments
            .iter()
            .filter(|seg| seg[0][0] == seg[1][0])
            .map(|seg| seg[0][0])
            .collect();
        verticals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for expect in [0.0, PI / 2.0, PI, -PI / 2.0] {
            assert!(
                verticals.iter().any(|v| (v - expect).abs() < 1e-12),
                "missing vertical at {expect}"
            );
        }
    }

    #[test]
    fn z_minus_is_reflection() {
        let s = spec4();
        let paths = make_sawtooth(&s).unwrap();
        for seg in &paths.z_plus.segments {
            let mirrored = [[-seg[0][0], -seg[0][1]], [-seg[1][0], -seg[1][1]]];
            assert!(paths
                .z_minus
                .segments
                .iter()
                .any(|t| t[0] == mirrored[0] && t[1] == mirrored[1]));
        }
    }

    #[test]
    fn l_endpoints() {
        let s = spec4();
        let paths = make_sawtooth(&s).unwrap();
        let p = s.phi1_plus();
        assert_eq!(paths.l.segments[0], [[0.0, -p], [0.0, p]]);
        assert_eq!(paths.l.segments[1], [[PI, -p], [PI, p]]);
    }

    #[test]
    fn envelope_vertex_and_midpoint() {
        let s = SawtoothSpec::default();
        assert_eq!(s.upper_envelope(0.0), s.phi1_plus());
        let mid = s.period() / 2.0;
        let expect = 0.5 * (s.phi1_plus() + s.phi1_minus);
        assert!((s.upper_envelope(mid) - expect).abs() < 1e-12);
        assert_eq!(s.envelope_sup(-0.1, 0.1), s.phi1_plus());
    }
}
