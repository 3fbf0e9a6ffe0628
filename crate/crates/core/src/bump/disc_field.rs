//! The complex field f = -h + h_r + i k on the disc parameter strip, where
//! h_r(theta, phi) = h(-theta, -phi). Its range lies in [-1, 1] on the real
//! axis union i R on the imaginary one; f is identically 1 below -phi3 and
//! -1 above phi3, and its zero set is E.

use super::kfield::SignFieldK;
use super::series::{GhVariant, LemmaGh};
use crate::num::C64;
use crate::smooth::Param2;
use std::sync::Arc;

/// Real-valued smooth field on the parameter strip with gradient oracle.
pub trait RealField2: Send + Sync {
    fn value(&self, p: Param2) -> f64;
    fn grad(&self, p: Param2) -> [f64; 2];
}

/// Complex-valued smooth field with Jacobian oracle (rows: dRe, dIm).
pub trait ComplexField2: Send + Sync {
    fn value(&self, p: Param2) -> C64;
    fn jac(&self, p: Param2) -> [[f64; 2]; 2];

    fn is_zero_at(&self, p: Param2) -> bool {
        let v = self.value(p);
        v.re == 0.0 && v.im == 0.0
    }
}

/// g or h as a standalone real field.
#[derive(Clone)]
pub struct GhField {
    pub gh: Arc<LemmaGh>,
    pub variant: GhVariant,
}

impl RealField2 for GhField {
    fn value(&self, p: Param2) -> f64 {
        self.gh.eval(p, self.variant).0
    }
    fn grad(&self, p: Param2) -> [f64; 2] {
        self.gh.eval(p, self.variant).1
    }
}

#[derive(Clone)]
pub struct DiscFieldF {
    pub gh: Arc<LemmaGh>,
    pub k: Arc<SignFieldK>,
}

impl DiscFieldF {
    pub fn new(gh: Arc<LemmaGh>, k: Arc<SignFieldK>) -> DiscFieldF {
        DiscFieldF { gh, k }
    }

    /// h_r(p) = h(-theta, -phi).
    pub fn h_r(&self, p: Param2) -> f64 {
        self.gh.eval([-p[0], -p[1]], GhVariant::H).0
    }
}

impl ComplexField2 for DiscFieldF {
    fn value(&self, p: Param2) -> C64 {
        let h = self.gh.eval(p, GhVariant::H).0;
        let hr = self.gh.eval([-p[0], -p[1]], GhVariant::H).0;
        C64::new(-h + hr, self.k.value(p))
    }

    fn jac(&self, p: Param2) -> [[f64; 2]; 2] {
        let (_, gh) = self.gh.eval(p, GhVariant::H);
        let (_, ghr) = self.gh.eval([-p[0], -p[1]], GhVariant::H);
        let (_, gk) = self.k.eval(p);
        // d/dp of h(-theta, -phi) is -grad h at the mirrored point.
        [[-gh[0] - ghr[0], -gh[1] - ghr[1]], gk]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::cutoffs::CutoffSpec;
    use crate::bump::kfield::sample_e1;
    use crate::bump::sawtooth::SawtoothSpec;
    use crate::bump::series::SeriesWeights;
    use std::f64::consts::PI;

    fn f_field() -> DiscFieldF {
        let cutoffs = CutoffSpec::default();
        let saw = SawtoothSpec::default();
        let gh = LemmaGh::build(cutoffs, saw, SeriesWeights::dyadic(12, &saw)).unwrap();
        let k = SignFieldK::new(saw, sample_e1(&saw, 300, 11));
        DiscFieldF::new(Arc::new(gh), Arc::new(k))
    }

    #[test]
    fn constant_one_below_minus_phi3() {
        let f = f_field();
        let phi3 = f.gh.saw.phi3;
        for i in 0..25 {
            let p = [-PI + i as f64 * 0.25, -phi3 - 0.3];
            let v = f.value(p);
            assert_eq!(v.re, 1.0);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn constant_minus_one_above_phi3() {
        let f = f_field();
        let phi3 = f.gh.saw.phi3;
        let v = f.value([0.4, phi3 + 0.2]);
        assert_eq!(v.re, -1.0);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn zero_on_sawtooth_and_e1() {
        let f = f_field();
        let saw = f.gh.saw;
        // a sawtooth vertex and a diagonal midpoint
        let on_path = [
            [0.0, saw.phi1_plus()],
            [saw.period() * 1.5, 0.5 * (saw.phi1_plus() + saw.phi1_minus)],
        ];
        for p in on_path {
            let v = f.value(p);
            assert!(v.abs() < 1e-12, "f = {v:?} on path at {p:?}");
        }
        for &q in f.k.e1_points().iter().take(16) {
            assert!(f.value(q).abs() < 1e-12);
        }
    }

    #[test]
    fn axis_range_on_grid() {
        let f = f_field();
        let alpha = f.gh.cutoffs.alpha;
        for i in 0..120 {
            for j in 0..120 {
                let p = [
                    -PI + (i as f64 + 0.5) * 2.0 * PI / 120.0,
                    -alpha + 0.02 + (j as f64 + 0.5) * (2.0 * alpha - 0.04) / 120.0,
                ];
                let v = f.value(p);
                assert!(v.re >= -1.0 - 1e-12 && v.re <= 1.0 + 1e-12);
                if v.re != 0.0 {
                    assert_eq!(v.im, 0.0, "Im f nonzero where Re f = {} at {p:?}", v.re);
                }
            }
        }
    }

    #[test]
    fn reflected_h_pairing() {
        let f = f_field();
        for &(th, ph) in &[(0.8, 0.33), (-1.4, 1.1), (2.1, -0.6)] {
            let hr = f.h_r([th, ph]);
            let direct = f.gh.eval([-th, -ph], GhVariant::H).0;
            assert_eq!(hr, direct);
        }
    }
}
