//! Concrete chart maps: the torus, the sphere in the x4 = 0 hyperplane (two
//! polar charts), its Veronese-style image (the projective plane), the disc
//! chart Phi, complex-affine images and graph lifts.

use super::fields::SurfaceField;
use crate::bump::Cutoffs;
use crate::num::C64;
use crate::smooth::{CPoint, ChartMap, Domain2, Param2, RealJacobian};
use std::f64::consts::PI;
use std::sync::Arc;

/// Standard torus chart: (t1, t2) -> (e^{i t1}, e^{i t2}).
pub struct TorusChart;

impl ChartMap for TorusChart {
    fn ambient_n(&self) -> usize {
        2
    }
    fn domain(&self) -> Domain2 {
        Domain2::rect([-PI, PI], [-PI, PI]).periodic_u().periodic_v()
    }
    fn eval(&self, p: Param2) -> CPoint {
        CPoint::from_c2(C64::cis(p[0]), C64::cis(p[1]))
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        let mut j = RealJacobian::new(2);
        j.set(0, 0, -p[0].sin());
        j.set(1, 0, p[0].cos());
        j.set(2, 1, -p[1].sin());
        j.set(3, 1, p[1].cos());
        j
    }
}

/// Which coordinate axis of R^3 carries the chart poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleAxis {
    X2,
    X3,
}

/// What the sphere point maps to in C^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpherePost {
    /// (x1 + i x2, x3): the sphere itself inside the hyperplane x4 = 0.
    Identity,
    /// (z1^2, z1 z2) with z1 = x1 + i x2, z2 = x3: the projective plane.
    Veronese,
}

/// Polar chart of the unit sphere in R^3_{x1 x2 x3}, poles trimmed away.
/// theta in [-pi, pi] periodic, phi in [-phi_max, phi_max].
pub struct SphereChart {
    pub pole: PoleAxis,
    pub post: SpherePost,
    pub phi_max: f64,
}

pub const SPHERE_PHI_MAX: f64 = 0.45 * PI;

impl SphereChart {
    pub fn xyz(&self, p: Param2) -> ([f64; 3], [[f64; 3]; 2]) {
        let (ct, st) = (p[0].cos(), p[0].sin());
        let (cp, sp) = (p[1].cos(), p[1].sin());
        match self.pole {
            // x2-poles: (x1, x2, x3) = (cp ct, sp, cp st)
            PoleAxis::X2 => (
                [cp * ct, sp, cp * st],
                [
                    [-cp * st, 0.0, cp * ct],
                    [-sp * ct, cp, -sp * st],
                ],
            ),
            // x3-poles: (x1, x2, x3) = (cp ct, cp st, sp)
            PoleAxis::X3 => (
                [cp * ct, cp * st, sp],
                [
                    [-cp * st, cp * ct, 0.0],
                    [-sp * ct, -sp * st, cp],
                ],
            ),
        }
    }

    /// Parameters of a given sphere point in this chart (inverse map).
    pub fn params_of(&self, x: [f64; 3]) -> Param2 {
        match self.pole {
            PoleAxis::X2 => [x[2].atan2(x[0]), x[1].asin()],
            PoleAxis::X3 => [x[1].atan2(x[0]), x[2].asin()],
        }
    }
}

impl ChartMap for SphereChart {
    fn ambient_n(&self) -> usize {
        2
    }
    fn domain(&self) -> Domain2 {
        Domain2::rect([-PI, PI], [-self.phi_max, self.phi_max]).periodic_u()
    }
    fn eval(&self, p: Param2) -> CPoint {
        let (x, _) = self.xyz(p);
        let z1 = C64::new(x[0], x[1]);
        let z2 = C64::new(x[2], 0.0);
        match self.post {
            SpherePost::Identity => CPoint::from_c2(z1, z2),
            SpherePost::Veronese => CPoint::from_c2(z1 * z1, z1 * z2),
        }
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        let (x, dx) = self.xyz(p);
        let z1 = C64::new(x[0], x[1]);
        let z2 = C64::new(x[2], 0.0);
        let mut j = RealJacobian::new(2);
        for (col, d) in dx.iter().enumerate() {
            let dz1 = C64::new(d[0], d[1]);
            let dz2 = C64::new(d[2], 0.0);
            let (w1, w2) = match self.post {
                SpherePost::Identity => (dz1, dz2),
                SpherePost::Veronese => (
                    (z1 * dz1).scale(2.0),
                    z2 * dz1 + z1 * dz2,
                ),
            };
            j.set(0, col, w1.re);
            j.set(1, col, w1.im);
            j.set(2, col, w2.re);
            j.set(3, col, w2.im);
        }
        j
    }
}

/// The disc chart Phi(theta, phi) =
/// (chi e^{i theta}, chi [e^{i(gamma + theta)} + beta cos(gamma + theta)]).
pub struct DiscChart {
    pub cutoffs: Arc<Cutoffs>,
}

impl ChartMap for DiscChart {
    fn ambient_n(&self) -> usize {
        2
    }
    fn domain(&self) -> Domain2 {
        let a = self.cutoffs.spec.alpha;
        Domain2::rect([-PI, PI], [-a, a]).periodic_u().open_lo_v()
    }
    fn eval(&self, p: Param2) -> CPoint {
        let (theta, phi) = (p[0], p[1]);
        let chi = self.cutoffs.chi.value(phi);
        let gamma = self.cutoffs.gamma.value(phi);
        let beta = self.cutoffs.beta.value(phi);
        let psi = gamma + theta;
        let z1 = C64::cis(theta).scale(chi);
        let z2 = (C64::cis(psi) + C64::new(beta * psi.cos(), 0.0)).scale(chi);
        CPoint::from_c2(z1, z2)
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        let (theta, phi) = (p[0], p[1]);
        let chi = self.cutoffs.chi.value(phi);
        let dchi = self.cutoffs.chi.deriv(phi);
        let gamma = self.cutoffs.gamma.value(phi);
        let dgamma = self.cutoffs.gamma.deriv(phi);
        let beta = self.cutoffs.beta.value(phi);
        let dbeta = self.cutoffs.beta.deriv(phi);
        let psi = gamma + theta;
        let e_t = C64::cis(theta);
        let e_p = C64::cis(psi);
        let cpsi = psi.cos();
        let spsi = psi.sin();

        // z1 = chi e^{i theta}
        let dz1_t = (C64::I * e_t).scale(chi);
        let dz1_p = e_t.scale(dchi);
        // z2 = chi (e^{i psi} + beta cos psi)
        let inner = e_p + C64::new(beta * cpsi, 0.0);
        let dinner_t = C64::I * e_p + C64::new(-beta * spsi, 0.0);
        let dinner_p =
            (C64::I * e_p).scale(dgamma) + C64::new(dbeta * cpsi - beta * spsi * dgamma, 0.0);
        let dz2_t = dinner_t.scale(chi);
        let dz2_p = inner.scale(dchi) + dinner_p.scale(chi);

        let mut j = RealJacobian::new(2);
        j.set(0, 0, dz1_t.re);
        j.set(1, 0, dz1_t.im);
        j.set(2, 0, dz2_t.re);
        j.set(3, 0, dz2_t.im);
        j.set(0, 1, dz1_p.re);
        j.set(1, 1, dz1_p.im);
        j.set(2, 1, dz2_p.re);
        j.set(3, 1, dz2_p.im);
        j
    }
}

/// Complex-affine map z -> shift + M z on C^2.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap2 {
    pub m: [[C64; 2]; 2],
    pub shift: [C64; 2],
}

impl AffineMap2 {
    pub fn identity() -> AffineMap2 {
        AffineMap2 {
            m: [[C64::ONE, C64::ZERO], [C64::ZERO, C64::ONE]],
            shift: [C64::ZERO, C64::ZERO],
        }
    }

    pub fn translation(a: C64, b: C64) -> AffineMap2 {
        AffineMap2 {
            shift: [a, b],
            ..AffineMap2::identity()
        }
    }

    pub fn scaling(rho: f64) -> AffineMap2 {
        AffineMap2 {
            m: [[C64::new(rho, 0.0), C64::ZERO], [C64::ZERO, C64::new(rho, 0.0)]],
            shift: [C64::ZERO, C64::ZERO],
        }
    }

    pub fn inversion() -> AffineMap2 {
        AffineMap2 {
            m: [[-C64::ONE, C64::ZERO], [C64::ZERO, -C64::ONE]],
            shift: [C64::ZERO, C64::ZERO],
        }
    }

    /// Linear map with prescribed columns (images of e1, e2).
    pub fn from_columns(c0: [C64; 2], c1: [C64; 2]) -> AffineMap2 {
        AffineMap2 {
            m: [[c0[0], c1[0]], [c0[1], c1[1]]],
            shift: [C64::ZERO, C64::ZERO],
        }
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<AffineMap2> {
        let det = self.det();
        if det.abs() < 1e-300 {
            return None;
        }
        let inv_det = C64::new(det.re / det.abs_sq(), -det.im / det.abs_sq());
        let m = [
            [self.m[1][1] * inv_det, -self.m[0][1] * inv_det],
            [-self.m[1][0] * inv_det, self.m[0][0] * inv_det],
        ];
        // inverse of z -> shift + M z is w -> M^-1 (w - shift)
        let s0 = -(m[0][0] * self.shift[0] + m[0][1] * self.shift[1]);
        let s1 = -(m[1][0] * self.shift[0] + m[1][1] * self.shift[1]);
        Some(AffineMap2 {
            m,
            shift: [s0, s1],
        })
    }

    pub fn apply(&self, z: [C64; 2]) -> [C64; 2] {
        [
            self.shift[0] + self.m[0][0] * z[0] + self.m[0][1] * z[1],
            self.shift[1] + self.m[1][0] * z[0] + self.m[1][1] * z[1],
        ]
    }

    pub fn apply_linear(&self, z: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * z[0] + self.m[0][1] * z[1],
            self.m[1][0] * z[0] + self.m[1][1] * z[1],
        ]
    }

    pub fn apply_point(&self, z: &CPoint) -> CPoint {
        let w = self.apply([z.z(0), z.z(1)]);
        CPoint::from_c2(w[0], w[1])
    }

    /// Smallest singular value of the underlying real-linear map.
    pub fn sigma_min(&self) -> f64 {
        let cols = [
            self.apply_linear([C64::ONE, C64::ZERO]),
            self.apply_linear([C64::I, C64::ZERO]),
            self.apply_linear([C64::ZERO, C64::ONE]),
            self.apply_linear([C64::ZERO, C64::I]),
        ];
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|r| {
                cols.iter()
                    .map(|c| match r {
                        0 => c[0].re,
                        1 => c[0].im,
                        2 => c[1].re,
                        _ => c[1].im,
                    })
                    .collect()
            })
            .collect();
        let s = crate::num::singular_values_small(&rows, 4);
        s[3]
    }
}

/// Chart pushed through a complex-affine map of C^2.
pub struct AffineChart {
    pub inner: Arc<dyn ChartMap>,
    pub map: AffineMap2,
}

impl ChartMap for AffineChart {
    fn ambient_n(&self) -> usize {
        2
    }
    fn domain(&self) -> Domain2 {
        self.inner.domain()
    }
    fn eval(&self, p: Param2) -> CPoint {
        self.map.apply_point(&self.inner.eval(p))
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        let ji = self.inner.jac(p);
        let mut j = RealJacobian::new(2);
        for col in 0..2 {
            let c = ji.complex_column(col);
            let w = self.map.apply_linear([c[0], c[1]]);
            j.set(0, col, w[0].re);
            j.set(1, col, w[0].im);
            j.set(2, col, w[1].re);
            j.set(3, col, w[1].im);
        }
        j
    }
}

/// Graph chart into C^3: q -> (base(q), f(q)).
pub struct GraphChart {
    pub base: Arc<dyn ChartMap>,
    pub field: Arc<dyn SurfaceField>,
    pub chart_index: usize,
}

impl ChartMap for GraphChart {
    fn ambient_n(&self) -> usize {
        3
    }
    fn domain(&self) -> Domain2 {
        self.base.domain()
    }
    fn eval(&self, p: Param2) -> CPoint {
        let z = self.base.eval(p);
        let f = self.field.value(self.chart_index, p);
        CPoint::from_c3(z.z(0), z.z(1), f)
    }
    fn jac(&self, p: Param2) -> RealJacobian {
        let jb = self.base.jac(p);
        let jf = self.field.jac(self.chart_index, p);
        let mut j = RealJacobian::new(3);
        for col in 0..2 {
            for row in 0..4 {
                j.set(row, col, jb.get(row, col));
            }
            j.set(4, col, jf[0][col]);
            j.set(5, col, jf[1][col]);
        }
        j
    }
}
