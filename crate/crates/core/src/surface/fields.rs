//! Scalar fields on charted surfaces.

use crate::bump::{ComplexField2, RealField2};
use crate::num::C64;
use crate::smooth::{ChartMap, Param2};
use std::sync::Arc;

/// A smooth real- or complex-valued function on a surface's parameter
/// domains, one evaluator per chart, with Jacobian oracle
/// (rows: d Re / d p, d Im / d p).
pub trait SurfaceField: Send + Sync {
    fn is_real(&self) -> bool;
    fn value(&self, chart: usize, p: Param2) -> C64;
    fn jac(&self, chart: usize, p: Param2) -> [[f64; 2]; 2];

    fn real_value(&self, chart: usize, p: Param2) -> f64 {
        self.value(chart, p).re
    }
}

/// Same real formula on every chart.
pub struct ParamField<F: RealField2> {
    pub inner: F,
}

impl<F: RealField2> SurfaceField for ParamField<F> {
    fn is_real(&self) -> bool {
        true
    }
    fn value(&self, _chart: usize, p: Param2) -> C64 {
        C64::new(self.inner.value(p), 0.0)
    }
    fn jac(&self, _chart: usize, p: Param2) -> [[f64; 2]; 2] {
        [self.inner.grad(p), [0.0, 0.0]]
    }
}

/// The torus height g = cos t1 + cos t2 / 2.
pub struct TorusG;

impl RealField2 for TorusG {
    fn value(&self, p: Param2) -> f64 {
        p[0].cos() + 0.5 * p[1].cos()
    }
    fn grad(&self, p: Param2) -> [f64; 2] {
        [-p[0].sin(), -0.5 * p[1].sin()]
    }
}

/// Real-affine function of the ambient real coordinates:
/// value = sum coeffs[i] * x_i + shift, evaluated through chart maps.
pub struct AmbientAffineField {
    pub maps: Vec<Arc<dyn ChartMap>>,
    pub coeffs: Vec<f64>,
    pub shift: f64,
}

impl SurfaceField for AmbientAffineField {
    fn is_real(&self) -> bool {
        true
    }
    fn value(&self, chart: usize, p: Param2) -> C64 {
        let z = self.maps[chart].eval(p);
        let v: f64 = z
            .coords()
            .iter()
            .zip(&self.coeffs)
            .map(|(x, c)| x * c)
            .sum();
        C64::new(v + self.shift, 0.0)
    }
    fn jac(&self, chart: usize, p: Param2) -> [[f64; 2]; 2] {
        let j = self.maps[chart].jac(p);
        let mut g = [0.0, 0.0];
        for (row, c) in self.coeffs.iter().enumerate() {
            g[0] += c * j.get(row, 0);
            g[1] += c * j.get(row, 1);
        }
        [g, [0.0, 0.0]]
    }
}

/// Complex field given per-chart from a `ComplexField2` (used for the disc
/// field f, whose formula lives in the parameter strip).
pub struct ComplexParamField<F: ComplexField2> {
    pub inner: F,
}

impl<F: ComplexField2> SurfaceField for ComplexParamField<F> {
    fn is_real(&self) -> bool {
        false
    }
    fn value(&self, _chart: usize, p: Param2) -> C64 {
        self.inner.value(p)
    }
    fn jac(&self, _chart: usize, p: Param2) -> [[f64; 2]; 2] {
        self.inner.jac(p)
    }
}

/// Field assembled chart-by-chart.
pub enum ChartFieldEntry {
    /// offset + real parameter field
    Real {
        inner: Arc<dyn RealField2>,
        offset: f64,
    },
    /// Linear sweep lo -> hi in the tube's axial step S(s).
    TubeLinear { lo: f64, hi: f64 },
    /// Complex parameter field (disc part of a splice).
    Complex { inner: Arc<dyn ComplexField2> },
}

pub struct CompositeField {
    pub entries: Vec<ChartFieldEntry>,
    pub real: bool,
}

impl SurfaceField for CompositeField {
    fn is_real(&self) -> bool {
        self.real
    }
    fn value(&self, chart: usize, p: Param2) -> C64 {
        match &self.entries[chart] {
            ChartFieldEntry::Real { inner, offset } => C64::new(inner.value(p) + offset, 0.0),
            ChartFieldEntry::TubeLinear { lo, hi } => {
                let s = crate::bump::glue::step(p[0], crate::bump::glue::GLUE_C);
                C64::new(lo + (hi - lo) * s, 0.0)
            }
            ChartFieldEntry::Complex { inner } => inner.value(p),
        }
    }
    fn jac(&self, chart: usize, p: Param2) -> [[f64; 2]; 2] {
        match &self.entries[chart] {
            ChartFieldEntry::Real { inner, .. } => [inner.grad(p), [0.0, 0.0]],
            ChartFieldEntry::TubeLinear { lo, hi } => {
                let ds = crate::bump::glue::step_d(p[0], crate::bump::glue::GLUE_C);
                [[(hi - lo) * ds, 0.0], [0.0, 0.0]]
            }
            ChartFieldEntry::Complex { inner } => inner.jac(p),
        }
    }
}

/// Real field seen through a translated/inverted copy of its chart: value
/// is sign * inner + offset, with parameters unchanged (translations do not
/// move chart parameters; the inversion flips the field sign per the chain
/// construction for projective planes).
pub struct SignedOffsetField {
    pub inner: Arc<dyn RealField2>,
    pub sign: f64,
    pub offset: f64,
}

impl RealField2 for SignedOffsetField {
    fn value(&self, p: Param2) -> f64 {
        self.sign * self.inner.value(p) + self.offset
    }
    fn grad(&self, p: Param2) -> [f64; 2] {
        let g = self.inner.grad(p);
        [self.sign * g[0], self.sign * g[1]]
    }
}
