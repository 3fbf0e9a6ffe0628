//! Charted surfaces in C^2 and C^3 and the constructions that assemble
//! them: explicit charts, local flattening, tube joins, translated chains,
//! the disc splice and graph lifts.

pub mod builders;
pub mod chains;
pub mod charts;
pub mod fields;
pub mod flatten;
pub mod splice;
pub mod tube;

pub use builders::{
    build_disc_delta, build_rp2, build_sphere, build_torus, excise_discs, graph_lift, rp2_g,
    sphere_g, torus_g, DiscDelta, GraphSurface,
};
pub use chains::{chain_rp2, chain_tori, ChainSpec, ChainSurface, ChainTube};
pub use charts::{AffineMap2, GraphChart};
pub use fields::{AmbientAffineField, ParamField, SurfaceField};
pub use flatten::{flatten_function, flatten_surface, FlattenKind, TangentFrame};
pub use splice::{splice_disc, v_e_residual, v_i_residual, SpliceResult};
pub use tube::{attach_tube, cross_section, TubeChart, TubeJoin, TubeSpec};

use crate::error::{CoreError, Result};
use crate::smooth::{CPoint, ChartMap, Param2};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Excised parameter region of a chart, with a polygon tracing its boundary
/// (used by meshing and by the tube seams).
#[derive(Clone)]
pub struct Hole {
    pub label: String,
    pub contains: Arc<dyn Fn(Param2) -> bool + Send + Sync>,
    pub boundary: Vec<Param2>,
}

impl std::fmt::Debug for Hole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hole")
            .field("label", &self.label)
            .field("boundary_pts", &self.boundary.len())
            .finish()
    }
}

/// One chart of a surface.
#[derive(Clone)]
pub struct SurfaceChart {
    pub name: String,
    pub map: Arc<dyn ChartMap>,
    /// Inset from the domain boundary used by verification grids
    /// (declared singular loci live inside these margins): [axis][lo, hi].
    pub grid_margin: [[f64; 2]; 2],
    /// Wider inset for finite-difference validation (blow-up ends).
    pub fd_margin: [[f64; 2]; 2],
    pub holes: Vec<Hole>,
}

impl std::fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("name", &self.name)
            .field("holes", &self.holes.len())
            .finish()
    }
}

impl SurfaceChart {
    pub fn new(name: &str, map: Arc<dyn ChartMap>) -> SurfaceChart {
        SurfaceChart {
            name: name.to_string(),
            map,
            grid_margin: [[0.0, 0.0], [0.0, 0.0]],
            fd_margin: [[0.0, 0.0], [0.0, 0.0]],
            holes: Vec::new(),
        }
    }

    pub fn with_margins(mut self, grid: [[f64; 2]; 2], fd: [[f64; 2]; 2]) -> SurfaceChart {
        self.grid_margin = grid;
        self.fd_margin = fd;
        self
    }

    pub fn in_hole(&self, p: Param2) -> bool {
        self.holes.iter().any(|h| (h.contains)(p))
    }

    /// True when p is inside a hole or within `reach` of a hole boundary
    /// point; meshes use this so holes smaller than a grid cell still cut.
    pub fn near_hole(&self, p: Param2, reach: f64) -> bool {
        self.holes.iter().any(|h| {
            (h.contains)(p)
                || h.boundary
                    .iter()
                    .any(|q| (p[0] - q[0]).hypot(p[1] - q[1]) < reach)
        })
    }

    /// Deterministic verification grid: exclusive-end uniform samples inside
    /// the grid margins, skipping holes.
    pub fn grid(&self, nu: usize, nv: usize) -> Vec<Param2> {
        self.grid_with_margin(nu, nv, self.grid_margin)
    }

    pub fn fd_grid(&self, nu: usize, nv: usize) -> Vec<Param2> {
        self.grid_with_margin(nu, nv, self.fd_margin)
    }

    fn grid_with_margin(&self, nu: usize, nv: usize, m: [[f64; 2]; 2]) -> Vec<Param2> {
        let d = self.map.domain();
        let u0 = d.lo[0] + m[0][0];
        let u1 = d.hi[0] - m[0][1];
        let v0 = d.lo[1] + m[1][0];
        let v1 = d.hi[1] - m[1][1];
        let mut out = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            let u = u0 + i as f64 * (u1 - u0) / nu as f64;
            for j in 0..nv {
                let v = v0 + j as f64 * (v1 - v0) / nv as f64;
                if !self.in_hole([u, v]) {
                    out.push([u, v]);
                }
            }
        }
        out
    }
}

/// Named point on a surface with both parameter and ambient coordinates.
///
/// When several chart parameters map to the same ambient point (overlapping
/// charts, antipodal identification), `aliases` lists the other preimages;
/// operations that modify the surface near the point (flattening, port
/// excision) must treat every site.
#[derive(Debug, Clone)]
pub struct MarkedPoint {
    pub chart: usize,
    pub param: Param2,
    pub ambient: CPoint,
    pub aliases: Vec<(usize, Param2)>,
}

impl MarkedPoint {
    pub fn sites(&self) -> Vec<(usize, Param2)> {
        let mut v = vec![(self.chart, self.param)];
        v.extend(self.aliases.iter().cloned());
        v
    }
}

type CurveFn = Arc<dyn Fn(f64) -> Param2 + Send + Sync>;

/// Identification metadata: parameter curves that map to equal ambient
/// points, or an edge collapsing to a single ambient point.
#[derive(Clone)]
pub enum Seam {
    Curves {
        chart_a: usize,
        a: CurveFn,
        chart_b: usize,
        b: CurveFn,
    },
    Collapse {
        chart: usize,
        curve: CurveFn,
        point: CPoint,
    },
}

/// Parameter neighborhoods where a complex tangent is expected; the
/// totally-real certificate is allowed to rely on df-minors there.
#[derive(Debug, Clone)]
pub struct ComplexTangentLocus {
    pub chart: usize,
    pub param: Param2,
    pub radius: f64,
}

/// A surface in C^n given by explicit charts with identifications.
#[derive(Clone)]
pub struct ChartedSurface {
    pub name: String,
    pub ambient_n: usize,
    pub charts: Vec<SurfaceChart>,
    pub seams: Vec<Seam>,
    pub marked: BTreeMap<String, MarkedPoint>,
    pub complex_tangent_loci: Vec<ComplexTangentLocus>,
}

impl std::fmt::Debug for ChartedSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChartedSurface")
            .field("name", &self.name)
            .field("ambient_n", &self.ambient_n)
            .field("charts", &self.charts.iter().map(|c| c.name.clone()).collect::<Vec<_>>())
            .finish()
    }
}

impl ChartedSurface {
    pub fn new(name: &str, ambient_n: usize) -> ChartedSurface {
        ChartedSurface {
            name: name.to_string(),
            ambient_n,
            charts: Vec::new(),
            seams: Vec::new(),
            marked: BTreeMap::new(),
            complex_tangent_loci: Vec::new(),
        }
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    pub fn eval(&self, chart: usize, p: Param2) -> CPoint {
        self.charts[chart].map.eval(p)
    }

    pub fn marked_point(&self, name: &str) -> Result<&MarkedPoint> {
        self.marked.get(name).ok_or_else(|| {
            CoreError::InvalidArgument(format!("no marked point '{name}' on {}", self.name))
        })
    }

    /// Max ambient mismatch across all seams, sampled at `samples` points each.
    pub fn seam_residual(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for seam in &self.seams {
            for i in 0..samples {
                let s = (i as f64 + 0.5) / samples as f64;
                let r = match seam {
                    Seam::Curves {
                        chart_a,
                        a,
                        chart_b,
                        b,
                    } => {
                        let za = self.eval(*chart_a, a(s));
                        let zb = self.eval(*chart_b, b(s));
                        za.dist(&zb)
                    }
                    Seam::Collapse {
                        chart,
                        curve,
                        point,
                    } => self.eval(*chart, curve(s)).dist(point),
                };
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Trace a hole boundary by bisecting along parameter rays from a center
/// until the predicate flips. Returns `segments` boundary points.
pub fn trace_hole_boundary(
    contains: &(dyn Fn(Param2) -> bool + Send + Sync),
    center: Param2,
    reach: f64,
    segments: usize,
) -> Vec<Param2> {
    let mut out = Vec::with_capacity(segments);
    for i in 0..segments {
        let t = std::f64::consts::TAU * i as f64 / segments as f64;
        let dir = [t.cos(), t.sin()];
        let mut lo = 0.0;
        let mut hi = reach;
        // ensure outside at reach; if not, extend once
        if contains([center[0] + dir[0] * hi, center[1] + dir[1] * hi]) {
            hi *= 3.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if contains([center[0] + dir[0] * mid, center[1] + dir[1] * mid]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push([center[0] + dir[0] * hi, center[1] + dir[1] * hi]);
    }
    out
}
