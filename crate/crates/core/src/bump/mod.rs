//! Cutoffs, ramps, sawtooth paths, the series pair (g, h), the sign field k
//! and the composite disc field f.

pub mod cutoffs;
pub mod disc_field;
pub mod glue;
pub mod kfield;
pub mod profile;
pub mod sawtooth;
pub mod series;

pub use cutoffs::{make_cutoffs, make_ramp, ramp_mu, CutoffSpec, Cutoffs, Ramp};
pub use disc_field::{ComplexField2, DiscFieldF, GhField, RealField2};
pub use kfield::{sample_e1, SignFieldK, E1_WALL_RADIUS};
pub use profile::{CertifiedInterval, IntervalProperty, Parity, Profile1D};
pub use sawtooth::{make_sawtooth, Polyline, SawtoothPaths, SawtoothSpec};
pub use series::{GhVariant, LemmaGh, SeriesWeights};

use crate::smooth::Param2;

/// Distance from a parameter point to the set E = E1 + Z+ + Z- + L.
pub struct EParamSet {
    pub e1: Vec<Param2>,
    pub paths: SawtoothPaths,
}

impl EParamSet {
    pub fn dist(&self, p: Param2) -> f64 {
        let mut d = self
            .paths
            .z_plus
            .dist(p)
            .min(self.paths.z_minus.dist(p))
            .min(self.paths.l.dist(p));
        for q in &self.e1 {
            let dq = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            if dq < d {
                d = dq;
            }
        }
        d
    }
}
