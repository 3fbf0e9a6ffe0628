//! Evaluation and differentiation of chart maps: real/complex Jacobians,
//! 2x2 complex minors, singular values, and the centered finite-difference
//! oracle that validates every analytic derivative.

use crate::error::{CoreError, Result};
use crate::num::{singular_values_mx2, singular_values_small, C64};

/// Chart parameters. Two real coordinates throughout this crate; angular
/// parameters are stored unwrapped in radians (identifications are seam
/// metadata, never normalization on evaluation).
pub type Param2 = [f64; 2];

/// Default centered finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Tolerance at which analytic and FD Jacobians must agree on smooth regions.
pub const FD_TOL: f64 = 1e-6;

/// A point of C^n (n = 2 or 3) stored as n (real, imaginary) pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CPoint {
    parts: [f64; 6],
    n: usize,
}

impl CPoint {
    pub fn from_c2(z1: C64, z2: C64) -> CPoint {
        CPoint {
            parts: [z1.re, z1.im, z2.re, z2.im, 0.0, 0.0],
            n: 2,
        }
    }

    pub fn from_c3(z1: C64, z2: C64, z3: C64) -> CPoint {
        CPoint {
            parts: [z1.re, z1.im, z2.re, z2.im, z3.re, z3.im],
            n: 3,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The 2n real coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.parts[..2 * self.n]
    }

    pub fn z(&self, i: usize) -> C64 {
        C64::new(self.parts[2 * i], self.parts[2 * i + 1])
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|x| x.is_finite())
    }

    pub fn dist(&self, other: &CPoint) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.coords().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// 2n x 2 real matrix of partials: entry (i, j) = d x_i / d p_j.
#[derive(Debug, Clone, Copy)]
pub struct RealJacobian {
    rows: [[f64; 2]; 6],
    n: usize,
}

impl RealJacobian {
    pub fn new(n: usize) -> RealJacobian {
        RealJacobian {
            rows: [[0.0; 2]; 6],
            n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows[..2 * self.n]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.rows[i][j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    /// Column j as the complex tangent vector dPhi/dp_j.
    pub fn complex_column(&self, j: usize) -> [C64; 3] {
        let mut col = [C64::ZERO; 3];
        for i in 0..self.n {
            col[i] = C64::new(self.rows[2 * i][j], self.rows[2 * i + 1][j]);
        }
        col
    }

    /// Determinant of the (x1, x2) block (rows 0 and 1).
    pub fn block_det_x1x2(&self) -> f64 {
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    pub fn singular_values(&self) -> [f64; 2] {
        singular_values_mx2(self.rows())
    }

    pub fn is_finite(&self) -> bool {
        self.rows().iter().all(|r| r[0].is_finite() && r[1].is_finite())
    }

    pub fn max_abs_diff(&self, other: &RealJacobian) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 * self.n {
            for j in 0..2 {
                m = m.max((self.rows[i][j] - other.rows[i][j]).abs());
            }
        }
        m
    }
}

/// n x 2 complex matrix; column j is the complex tangent vector dPhi/dp_j.
#[derive(Debug, Clone, Copy)]
pub struct ComplexJacobian {
    cols: [[C64; 3]; 2],
    n: usize,
}

impl ComplexJacobian {
    pub fn from_real(j: &RealJacobian) -> ComplexJacobian {
        ComplexJacobian {
            cols: [j.complex_column(0), j.complex_column(1)],
            n: j.n(),
        }
    }

    pub fn from_columns(c0: &[C64], c1: &[C64]) -> ComplexJacobian {
        let n = c0.len();
        let mut cols = [[C64::ZERO; 3]; 2];
        cols[0][..n].copy_from_slice(c0);
        cols[1][..n].copy_from_slice(c1);
        ComplexJacobian { cols, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.cols[col][row]
    }

    /// 2x2 minor built from the given pair of rows.
    pub fn minor(&self, r0: usize, r1: usize) -> C64 {
        self.cols[0][r0] * self.cols[1][r1] - self.cols[0][r1] * self.cols[1][r0]
    }
}

/// Row-pair labels for minors, mirroring which holomorphic two-form
/// certifies total reality at a point.
pub const MINOR_LABELS_C3: [&str; 3] = ["dz1^dz2", "dz1^df", "dz2^df"];

/// All 2x2 minors in lexicographic row-pair order: n*(n-1)/2 values.
pub fn complex_minors(j: &ComplexJacobian) -> Vec<C64> {
    let n = j.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for r0 in 0..n {
        for r1 in (r0 + 1)..n {
            out.push(j.minor(r0, r1));
        }
    }
    out
}

/// Smallest singular value of the real 2n x 4 matrix [u, iu, v, iv].
///
/// Vanishes exactly when the two complex columns are C-linearly dependent,
/// which cross-checks the minor criterion.
pub fn complex_dependence_sigma(j: &ComplexJacobian) -> f64 {
    let n = j.n();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let u = j.entry(i, 0);
        let v = j.entry(i, 1);
        let iu = C64::I * u;
        let iv = C64::I * v;
        rows.push(vec![u.re, iu.re, v.re, iv.re]);
        rows.push(vec![u.im, iu.im, v.im, iv.im]);
    }
    let s = singular_values_small(&rows, 4);
    s[2]
}

/// Rectangular chart domain with optional per-axis periodicity.
#[derive(Debug, Clone, Copy)]
pub struct Domain2 {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Open at the lower end of the axis (used for the blow-up end of the disc chart).
    pub open_lo: [bool; 2],
    pub periodic: [bool; 2],
}

impl Domain2 {
    pub fn rect(u: [f64; 2], v: [f64; 2]) -> Domain2 {
        Domain2 {
            lo: [u[0], v[0]],
            hi: [u[1], v[1]],
            open_lo: [false, false],
            periodic: [false, false],
        }
    }

    pub fn periodic_u(mut self) -> Domain2 {
        self.periodic[0] = true;
        self
    }

    pub fn periodic_v(mut self) -> Domain2 {
        self.periodic[1] = true;
        self
    }

    pub fn open_lo_v(mut self) -> Domain2 {
        self.open_lo[1] = true;
        self
    }

    pub fn contains(&self, p: Param2) -> std::result::Result<(), (usize, f64, f64, f64)> {
        for axis in 0..2 {
            if self.periodic[axis] {
                continue;
            }
            let (lo, hi, x) = (self.lo[axis], self.hi[axis], p[axis]);
            let ok_lo = if self.open_lo[axis] { x > lo } else { x >= lo };
            if !(ok_lo && x <= hi) {
                return Err((axis, x, lo, hi));
            }
        }
        Ok(())
    }

    /// Parameter distance accounting for periodic axes.
    pub fn param_dist(&self, a: Param2, b: Param2) -> f64 {
        let mut s = 0.0;
        for axis in 0..2 {
            let mut d = (a[axis] - b[axis]).abs();
            if self.periodic[axis] {
                let per = self.hi[axis] - self.lo[axis];
                d = d % per;
                if d > per / 2.0 {
                    d = per - d;
                }
            }
            s += d * d;
        }
        s.sqrt()
    }
}

/// A smooth map from a two-parameter domain into C^n with an analytic
/// Jacobian. The finite-difference mode of [`jacobian`] is the oracle used
/// to validate implementations of this trait.
pub trait ChartMap: Send + Sync {
    fn ambient_n(&self) -> usize;
    fn domain(&self) -> Domain2;
    fn eval(&self, p: Param2) -> CPoint;
    fn jac(&self, p: Param2) -> RealJacobian;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    Analytic,
    FiniteDifference,
}

/// Evaluate a chart map with domain checking.
pub fn eval_chart(map: &dyn ChartMap, p: Param2) -> Result<CPoint> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(CoreError::NonFinite {
            context: "chart parameters".into(),
        });
    }
    if let Err((axis, value, lo, hi)) = map.domain().contains(p) {
        return Err(CoreError::DomainViolation {
            axis,
            value,
            lo,
            hi,
        });
    }
    let z = map.eval(p);
    if !z.is_finite() {
        return Err(CoreError::NonFinite {
            context: format!("chart value at ({}, {})", p[0], p[1]),
        });
    }
    Ok(z)
}

/// Jacobian of a chart map, analytic or by centered finite differences.
///
/// FD mode needs a step-sized margin inside the domain; a non-finite result
/// (for example at the blow-up end of the disc chart) is flagged as
/// boundary-singular.
pub fn jacobian(map: &dyn ChartMap, p: Param2, mode: DiffMode) -> Result<RealJacobian> {
    eval_chart(map, p)?;
    let j = match mode {
        DiffMode::Analytic => map.jac(p),
        DiffMode::FiniteDifference => fd_jacobian(map, p, FD_STEP)?,
    };
    if !j.is_finite() {
        return Err(CoreError::BoundarySingular(p[0], p[1]));
    }
    Ok(j)
}

pub fn fd_jacobian(map: &dyn ChartMap, p: Param2, h: f64) -> Result<RealJacobian> {
    let dom = map.domain();
    for axis in 0..2 {
        if !dom.periodic[axis] {
            if p[axis] - h < dom.lo[axis] || p[axis] + h > dom.hi[axis] {
                return Err(CoreError::DomainViolation {
                    axis,
                    value: p[axis],
                    lo: dom.lo[axis] + h,
                    hi: dom.hi[axis] - h,
                });
            }
        }
    }
    let n = map.ambient_n();
    let mut j = RealJacobian::new(n);
    for axis in 0..2 {
        let mut pp = p;
        let mut pm = p;
        pp[axis] += h;
        pm[axis] -= h;
        let zp = map.eval(pp);
        let zm = map.eval(pm);
        for i in 0..2 * n {
            j.set(i, axis, (zp.coords()[i] - zm.coords()[i]) / (2.0 * h));
        }
    }
    Ok(j)
}

/// Descending singular values of an arbitrary set of 2-column rows,
/// exposed for direct use on matrices that are not chart Jacobians.
pub fn singular_values(rows: &[[f64; 2]]) -> [f64; 2] {
    singular_values_mx2(rows)
}
