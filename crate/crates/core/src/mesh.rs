//! Triangle meshes exported from charted surfaces: Euler characteristic,
//! orientability, boundary counting, and the structured builders for each
//! surface kind (wrapped grids, pole fans, antipodal fundamental domains,
//! tube cylinders, loop zips).
//!
//! Meshes serve topology certification and file export; analytic checks
//! always run on the charts themselves.

use crate::smooth::{ChartMap, Param2};
use crate::surface::{ChainSurface, ChartedSurface, SpliceResult};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Default)]
pub struct SurfaceMesh {
    /// Ambient coordinates (2n reals per vertex).
    pub vertices: Vec<Vec<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn edge_set(&self) -> BTreeMap<(usize, usize), usize> {
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                *edges.entry(key).or_insert(0) += 1;
            }
        }
        edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        let used: BTreeSet<usize> = self.triangles.iter().flatten().copied().collect();
        let v = used.len() as i64;
        let e = self.edge_set().len() as i64;
        let f = self.triangles.len() as i64;
        v - e + f
    }

    /// Boundary loops: chains of edges incident to exactly one triangle.
    pub fn boundary_components(&self) -> usize {
        let edges = self.edge_set();
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(a, b), &count) in &edges {
            if count == 1 {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut loops = 0;
        for (&start, _) in &adj {
            if seen.contains(&start) {
                continue;
            }
            loops += 1;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                if let Some(ns) = adj.get(&v) {
                    stack.extend(ns.iter().copied());
                }
            }
        }
        loops
    }

    /// Orientability by orientation propagation: try to assign a flip flag
    /// to every triangle so that adjacent triangles induce opposite
    /// directions on their shared edge.
    pub fn orientable(&self) -> bool {
        // edge -> incident triangles with the direction each uses
        let mut incid: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                incid.entry(key).or_default().push((ti, a < b));
            }
        }
        let mut flip: Vec<Option<bool>> = vec![None; self.triangles.len()];
        for seed in 0..self.triangles.len() {
            if flip[seed].is_some() {
                continue;
            }
            flip[seed] = Some(false);
            let mut stack = vec![seed];
            while let Some(ti) = stack.pop() {
                let t = self.triangles[ti];
                let my_flip = flip[ti].unwrap();
                for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                    let key = (a.min(b), a.max(b));
                    let Some(list) = incid.get(&key) else { continue };
                    if list.len() != 2 {
                        continue;
                    }
                    let my_dir = (a < b) != my_flip;
                    for &(tj, dir_j) in list {
                        if tj == ti {
                            continue;
                        }
                        // consistent orientation: the neighbor must traverse
                        // the shared edge the opposite way
                        let need_flip = dir_j == my_dir;
                        match flip[tj] {
                            None => {
                                flip[tj] = Some(need_flip);
                                stack.push(tj);
                            }
                            Some(f) => {
                                if f != need_flip {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    pub fn merge(&mut self, other: SurfaceMesh) -> usize {
        let base = self.vertices.len();
        self.vertices.extend(other.vertices);
        self.triangles.extend(
            other
                .triangles
                .into_iter()
                .map(|t| [t[0] + base, t[1] + base, t[2] + base]),
        );
        base
    }

    /// Drop triangles touching pinch vertices until every boundary vertex
    /// has exactly two boundary edges.
    fn clean_pinches(&mut self) {
        for _ in 0..8 {
            let edges = self.edge_set();
            let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
            for (&(a, b), &c) in &edges {
                if c == 1 {
                    *degree.entry(a).or_insert(0) += 1;
                    *degree.entry(b).or_insert(0) += 1;
                }
            }
            let pinched: BTreeSet<usize> = degree
                .iter()
                .filter(|(_, &d)| d > 2)
                .map(|(&v, _)| v)
                .collect();
            if pinched.is_empty() {
                return;
            }
            self.triangles
                .retain(|t| !t.iter().any(|v| pinched.contains(v)));
        }
    }

    /// Ordered boundary loop closest to `anchor` (vertex index set walk).
    fn boundary_loop_near(&self, anchor: &[f64]) -> Vec<usize> {
        let edges = self.edge_set();
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(a, b), &count) in &edges {
            if count == 1 {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
        // pick the boundary vertex nearest the anchor, walk its loop
        let start = adj
            .keys()
            .min_by(|&&a, &&b| {
                let da = dist(&self.vertices[a], anchor);
                let db = dist(&self.vertices[b], anchor);
                da.partial_cmp(&db).unwrap()
            })
            .copied();
        let Some(start) = start else { return Vec::new() };
        let mut ordered = vec![start];
        let mut prev = start;
        let mut cur = adj[&start][0];
        while cur != start {
            ordered.push(cur);
            let ns = &adj[&cur];
            let next = if ns[0] == prev { ns[1] } else { ns[0] };
            prev = cur;
            cur = next;
            if ordered.len() > self.vertices.len() {
                break;
            }
        }
        ordered
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Structured grid over a chart with optional wrapping; triangles whose
/// corners fall in a hole are dropped.
pub fn mesh_chart(
    map: &dyn ChartMap,
    in_hole: &dyn Fn(Param2) -> bool,
    nu: usize,
    nv: usize,
    wrap_u: bool,
    wrap_v: bool,
    v_range: Option<(f64, f64)>,
) -> SurfaceMesh {
    let dom = map.domain();
    let (v0, v1) = v_range.unwrap_or((dom.lo[1], dom.hi[1]));
    let cols = if wrap_u { nu } else { nu + 1 };
    let rows = if wrap_v { nv } else { nv + 1 };
    let u_at = |i: usize| dom.lo[0] + (dom.hi[0] - dom.lo[0]) * i as f64 / nu as f64;
    let v_at = |j: usize| v0 + (v1 - v0) * j as f64 / nv as f64;
    let mut mesh = SurfaceMesh::default();
    let mut params = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            let p = [u_at(i), v_at(j)];
            params.push(p);
            mesh.vertices.push(map.eval(p).coords().to_vec());
        }
    }
    let id = |i: usize, j: usize| -> usize { (j % rows) * cols + (i % cols) };
    let ni = if wrap_u { nu } else { nu };
    let nj = if wrap_v { nv } else { nv };
    for j in 0..nj {
        for i in 0..ni {
            let q = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            let corner_params = [params[q[0]], params[q[1]], params[q[2]], params[q[3]]];
            if corner_params.iter().any(|&p| in_hole(p)) {
                continue;
            }
            mesh.triangles.push([q[0], q[1], q[2]]);
            mesh.triangles.push([q[0], q[2], q[3]]);
        }
    }
    mesh.clean_pinches();
    mesh
}

/// Fan cap from a fresh apex vertex onto an ordered loop.
fn fan_cap(mesh: &mut SurfaceMesh, apex_coords: Vec<f64>, ring: &[usize]) {
    let apex = mesh.vertices.len();
    mesh.vertices.push(apex_coords);
    for w in 0..ring.len() {
        let a = ring[w];
        let b = ring[(w + 1) % ring.len()];
        mesh.triangles.push([apex, a, b]);
    }
}

/// Bridge two ordered boundary loops with a triangulated annulus
/// (chi-neutral: adds |a| + |b| triangles, no vertices).
pub fn zip_loops(mesh: &mut SurfaceMesh, a: &[usize], b: &[usize]) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    // rotate b to start nearest a[0]
    let start_b = (0..b.len())
        .min_by(|&i, &j| {
            let di = dist(&mesh.vertices[b[i]], &mesh.vertices[a[0]]);
            let dj = dist(&mesh.vertices[b[j]], &mesh.vertices[a[0]]);
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap();
    // choose the direction of b that tracks a
    let next_a = &mesh.vertices[a[1 % a.len()]];
    let fwd = dist(&mesh.vertices[b[(start_b + 1) % b.len()]], next_a)
        <= dist(&mesh.vertices[b[(start_b + b.len() - 1) % b.len()]], next_a);
    let b_ord: Vec<usize> = (0..b.len())
        .map(|k| {
            if fwd {
                b[(start_b + k) % b.len()]
            } else {
                b[(start_b + b.len() - k) % b.len()]
            }
        })
        .collect();
    let (la, lb) = (a.len(), b_ord.len());
    let (mut ia, mut ib) = (0usize, 0usize);
    while ia < la || ib < lb {
        let adv_a = if ib >= lb {
            true
        } else if ia >= la {
            false
        } else {
            (ia + 1) * lb <= (ib + 1) * la
        };
        if adv_a {
            mesh.triangles
                .push([a[ia % la], a[(ia + 1) % la], b_ord[ib % lb]]);
            ia += 1;
        } else {
            mesh.triangles
                .push([a[ia % la], b_ord[(ib + 1) % lb], b_ord[ib % lb]]);
            ib += 1;
        }
    }
}

/// Mesh of a closed torus chart (both axes wrapped).
pub fn mesh_torus_chart(
    map: &dyn ChartMap,
    in_hole: &dyn Fn(Param2) -> bool,
    n: usize,
) -> SurfaceMesh {
    mesh_chart(map, in_hole, n, n, true, true, None)
}

/// Mesh of the sphere (two pole fans over a wrapped band).
pub fn mesh_sphere(surface: &ChartedSurface, n: usize) -> SurfaceMesh {
    let chart = &surface.charts[0];
    let dom = chart.map.domain();
    let mut mesh = mesh_chart(
        chart.map.as_ref(),
        &|p| chart.in_hole(p),
        n,
        n / 2,
        true,
        false,
        Some((dom.lo[1] + 1e-6, dom.hi[1] - 1e-6)),
    );
    // cap the two pole holes with fans; chart has x2-poles at phi = +-pi/2
    let rows = n / 2 + 1;
    let bottom: Vec<usize> = (0..n).collect();
    let top: Vec<usize> = (0..n).map(|i| (rows - 1) * n + i).collect();
    // ambient pole points (0, -+1, 0) -> (z1, z2) = (-+i, 0)
    fan_cap(&mut mesh, vec![0.0, -1.0, 0.0, 0.0], &bottom);
    let top_rev: Vec<usize> = top.into_iter().rev().collect();
    fan_cap(&mut mesh, vec![0.0, 1.0, 0.0, 0.0], &top_rev);
    mesh
}

/// Mesh of a projective-plane link: a tilted hemisphere fundamental domain
/// with the equator identified antipodally and a fan at the tilted pole.
/// `chart_eval` maps a sphere point to ambient coordinates (through the
/// link's charts, so translations, inversions and flatten patches apply).
pub fn mesh_rp2_fundamental(
    chart_eval: &dyn Fn([f64; 3]) -> Option<Vec<f64>>,
    in_hole: &dyn Fn([f64; 3]) -> bool,
    n: usize,
) -> SurfaceMesh {
    // tilt axis chosen clear of the marked points
    let axis = {
        let v = [0.2f64, 1.0, 0.1];
        let n0 = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n0, v[1] / n0, v[2] / n0]
    };
    // orthonormal frame (e1, e2, axis)
    let e1 = {
        let v = [1.0f64, 0.0, 0.0];
        let d = v[0] * axis[0] + v[1] * axis[1] + v[2] * axis[2];
        let w = [v[0] - d * axis[0], v[1] - d * axis[1], v[2] - d * axis[2]];
        let n0 = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        [w[0] / n0, w[1] / n0, w[2] / n0]
    };
    let e2 = [
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    let sphere_pt = |theta: f64, phi: f64| -> [f64; 3] {
        let (ct, st) = (theta.cos(), theta.sin());
        let (cp, sp) = (phi.cos(), phi.sin());
        [
            cp * (ct * e1[0] + st * e2[0]) + sp * axis[0],
            cp * (ct * e1[1] + st * e2[1]) + sp * axis[1],
            cp * (ct * e1[2] + st * e2[2]) + sp * axis[2],
        ]
    };
    assert!(n % 2 == 0, "antipodal equator needs even n");
    let rows = n / 4; // phi from 0 to pi/2 - cap
    let phi_max = std::f64::consts::FRAC_PI_2 * 0.96;
    let mut mesh = SurfaceMesh::default();
    // vertex ids: equator row has n/2 distinct vertices (antipodal pairs)
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for j in 0..=rows {
        let phi = phi_max * j as f64 / rows as f64;
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            if j == 0 && i >= n / 2 {
                // antipodal identification on the equator
                let id = row[i - n / 2];
                row.push(id);
                continue;
            }
            let theta = std::f64::consts::TAU * i as f64 / n as f64;
            let x = sphere_pt(theta, phi);
            let coords = chart_eval(x).expect("fundamental-domain point outside both charts");
            row.push(mesh.vertices.len());
            mesh.vertices.push(coords);
        }
        ids.push(row);
    }
    for j in 0..rows {
        for i in 0..n {
            let q = [
                ids[j][i],
                ids[j][(i + 1) % n],
                ids[j + 1][(i + 1) % n],
                ids[j + 1][i],
            ];
            // hole test on the cell corners (sphere points)
            let mut hole = false;
            for (di, dj) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
                let theta = std::f64::consts::TAU * ((i + di) % n) as f64 / n as f64;
                let phi = phi_max * (j + dj) as f64 / rows as f64;
                if in_hole(sphere_pt(theta, phi)) {
                    hole = true;
                    break;
                }
            }
            if hole {
                continue;
            }
            mesh.triangles.push([q[0], q[1], q[2]]);
            mesh.triangles.push([q[0], q[2], q[3]]);
        }
    }
    // pole cap
    let pole = sphere_pt(0.0, std::f64::consts::FRAC_PI_2);
    let ring: Vec<usize> = ids[rows].clone();
    if let Some(coords) = chart_eval(pole) {
        fan_cap(&mut mesh, coords, &ring);
    }
    mesh.clean_pinches();
    mesh
}

/// Mesh of a tube chart (psi wrapped, s free).
pub fn mesh_tube(map: &dyn ChartMap, ns: usize, npsi: usize) -> SurfaceMesh {
    mesh_chart(map, &|_| false, npsi, ns, true, false, None)
}

/// Mesh of the disc chart over [phi_lo, phi_hi] with the shrinking top edge
/// capped at the origin.
pub fn mesh_disc_delta(
    map: &dyn ChartMap,
    n: usize,
    phi_lo: f64,
    cap_to_origin: bool,
) -> SurfaceMesh {
    let dom = map.domain();
    let phi_hi = dom.hi[1] - 0.02;
    let mut mesh = mesh_chart(
        map,
        &|_| false,
        n,
        n / 2,
        true,
        false,
        Some((phi_lo, phi_hi)),
    );
    if cap_to_origin {
        let rows = n / 2 + 1;
        let top: Vec<usize> = (0..n).map(|i| (rows - 1) * n + i).rev().collect();
        fan_cap(&mut mesh, vec![0.0; 4], &top);
    }
    mesh
}

/// Tube-end angular key of an ambient point, for zip alignment.
fn frame_angle(to_frame: &crate::surface::AffineMap2, coords: &[f64]) -> f64 {
    let z = [
        crate::num::C64::new(coords[0], coords[1]),
        crate::num::C64::new(coords[2], coords[3]),
    ];
    let w = to_frame.apply(z);
    w[1].im.atan2(w[0].im)
}

/// Full mesh of a chain (tori or projective planes) with its tubes zipped in.
pub fn mesh_chain(chain: &ChainSurface, is_rp2: bool, n: usize) -> SurfaceMesh {
    let mut mesh = SurfaceMesh::default();
    let mut link_ranges: Vec<(usize, usize)> = Vec::new();
    for charts in &chain.link_charts {
        let lm = if !is_rp2 {
            let ci = charts[0];
            let chart = &chain.surface.charts[ci];
            let reach = 1.2 * std::f64::consts::TAU / n as f64;
            mesh_torus_chart(chart.map.as_ref(), &|p| chart.near_hole(p, reach), n)
        } else {
            mesh_rp2_link(chain, charts, n)
        };
        let lo = mesh.merge(lm);
        link_ranges.push((lo, mesh.vertices.len()));
    }
    // tubes + zips
    for (ti, tube) in chain.tubes.iter().enumerate() {
        let tchart = &chain.surface.charts[tube.chart];
        let tm = mesh_tube(tchart.map.as_ref(), n / 4, n / 2);
        let base = mesh.merge(tm);
        let to_frame = tube.to_ambient.inverse().unwrap();
        // tube-end rings: s = 0 row and s = 1 row
        let cols = n / 2;
        let rows = n / 4 + 1;
        let end0: Vec<usize> = (0..cols).map(|i| base + i).collect();
        let end1: Vec<usize> = (0..cols).map(|i| base + (rows - 1) * cols + i).collect();
        // stair loops on the two links nearest the tube ends
        let c0 = mesh.vertices[end0[0]].clone();
        let c1 = mesh.vertices[end1[0]].clone();
        let loop0 = submesh_in_range(&mesh, link_ranges[ti]).boundary_loop_near(&c0);
        let loop1 = submesh_in_range(&mesh, link_ranges[ti + 1]).boundary_loop_near(&c1);
        // order the stair rings by the frame angle and zip
        let by_angle = |ids: &[usize], mesh: &SurfaceMesh| -> Vec<usize> {
            let mut v: Vec<usize> = ids.to_vec();
            v.sort_by(|&a, &b| {
                frame_angle(&to_frame, &mesh.vertices[a])
                    .partial_cmp(&frame_angle(&to_frame, &mesh.vertices[b]))
                    .unwrap()
            });
            v
        };
        let l0 = by_angle(&loop0, &mesh);
        let l1 = by_angle(&loop1, &mesh);
        zip_loops(&mut mesh, &end0, &l0);
        zip_loops(&mut mesh, &end1, &l1);
    }
    mesh
}

/// Triangles of the full mesh restricted to a vertex range.
fn submesh_in_range(mesh: &SurfaceMesh, range: (usize, usize)) -> SurfaceMesh {
    SurfaceMesh {
        vertices: mesh.vertices.clone(),
        triangles: mesh
            .triangles
            .iter()
            .filter(|t| t.iter().all(|&v| v >= range.0 && v < range.1))
            .copied()
            .collect(),
    }
}

fn mesh_rp2_link(chain: &ChainSurface, charts: &[usize], n: usize) -> SurfaceMesh {
    // evaluate the fundamental-domain sphere point through whichever chart
    // covers it
    let cap = (0.45 * std::f64::consts::PI).sin() * 0.999;
    let eval = |x: [f64; 3]| -> Option<Vec<f64>> {
        // chart 0: x2-poles; chart 1: x3-poles (see SphereChart)
        let (ci_local, params) = if x[1].abs() <= cap {
            (0usize, [x[2].atan2(x[0]), x[1].asin()])
        } else if x[2].abs() <= cap {
            (1usize, [x[1].atan2(x[0]), x[2].asin()])
        } else {
            return None;
        };
        let chart = &chain.surface.charts[charts[ci_local]];
        Some(chart.map.eval(params).coords().to_vec())
    };
    let reach = 1.5 * std::f64::consts::TAU / n as f64;
    let in_hole = |x: [f64; 3]| -> bool {
        for (ci_local, params) in [
            (0usize, [x[2].atan2(x[0]), x[1].asin()]),
            (1usize, [x[1].atan2(x[0]), x[2].asin()]),
        ] {
            let chart = &chain.surface.charts[charts[ci_local]];
            let dom = chart.map.domain();
            if dom.contains(params).is_ok() && chart.near_hole(params, reach) {
                return true;
            }
        }
        false
    };
    mesh_rp2_fundamental(&eval, &in_hole, n)
}

/// Mesh of a spliced surface: the chain with its D hole, the bounded disc
/// part, and the seam zipped along rho K.
pub fn mesh_splice(chain_mesh_src: &ChainSurface, splice: &SpliceResult, n: usize) -> SurfaceMesh {
    let is_rp2 = splice.surface.name.contains("rp2");
    // chain part: same topology as the chain, but charts live in the spliced
    // surface (scaled/repositioned), including the splice-D hole
    let mut pseudo = ChainSurface {
        surface: splice.surface.clone(),
        field: chain_mesh_src.field.clone(),
        field_shift: chain_mesh_src.field_shift,
        link_charts: chain_mesh_src.link_charts.clone(),
        tubes: chain_mesh_src.tubes.clone(),
        link_offsets: chain_mesh_src.link_offsets.clone(),
        splice_port: chain_mesh_src.splice_port.clone(),
    };
    // tubes in the spliced surface live at the same chart indices but their
    // ambient frames moved; recompute nothing for the mesh (the zip uses
    // stair geometry only through angles, tolerable under affine maps).
    for t in &mut pseudo.tubes {
        let m = compose_affine(&splice_placement(splice), &t.to_ambient);
        t.to_ambient = m;
    }
    let mut mesh = mesh_chain(&pseudo, is_rp2, n);

    // disc part
    let disc_chart = &splice.surface.charts[splice.disc_chart];
    let dm = mesh_disc_delta(disc_chart.map.as_ref(), n, splice.phi_seam, true);
    let base = mesh.merge(dm);
    // seam: disc boundary row (phi = phi_seam) against the splice-D stair loop
    let cols = n;
    let disc_ring: Vec<usize> = (0..cols).map(|i| base + i).collect();
    // stair loop near the port center on the chain part
    let port_amb = splice
        .surface
        .charts[splice.port_chart]
        .map
        .eval(splice.port_param)
        .coords()
        .to_vec();
    let chain_part = SurfaceMesh {
        vertices: mesh.vertices.clone(),
        triangles: mesh
            .triangles
            .iter()
            .filter(|t| t.iter().all(|&v| v < base))
            .copied()
            .collect(),
    };
    let stair = chain_part.boundary_loop_near(&port_amb);
    zip_loops(&mut mesh, &disc_ring, &stair);
    mesh
}

fn splice_placement(splice: &SpliceResult) -> crate::surface::AffineMap2 {
    let mut scale = crate::surface::AffineMap2::scaling(splice.rho);
    let repos = splice.reposition;
    // scale o reposition
    let mut m = [[crate::num::C64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = scale.m[i][0] * repos.m[0][j] + scale.m[i][1] * repos.m[1][j];
        }
    }
    let shift = scale.apply(repos.shift);
    scale.m = m;
    scale.shift = shift;
    scale
}

fn compose_affine(
    a: &crate::surface::AffineMap2,
    b: &crate::surface::AffineMap2,
) -> crate::surface::AffineMap2 {
    let mut m = [[crate::num::C64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
        }
    }
    crate::surface::AffineMap2 {
        m,
        shift: a.apply(b.shift),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_sphere, build_torus};

    #[test]
    fn torus_mesh_characteristic() {
        let t = build_torus();
        let m = mesh_torus_chart(t.charts[0].map.as_ref(), &|_| false, 48);
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_components(), 0);
        assert!(m.orientable());
    }

    #[test]
    fn sphere_mesh_characteristic() {
        let s = build_sphere();
        let m = mesh_sphere(&s, 48);
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.boundary_components(), 0);
        assert!(m.orientable());
    }

    #[test]
    fn torus_with_hole() {
        let t = build_torus();
        let m = mesh_chart(
            t.charts[0].map.as_ref(),
            &|p| p[0].hypot(p[1]) < 0.4,
            48,
            48,
            true,
            true,
            None,
        );
        assert_eq!(m.euler_characteristic(), -1);
        assert_eq!(m.boundary_components(), 1);
    }

    #[test]
    fn zip_preserves_characteristic() {
        let t = build_torus();
        let mut m = mesh_chart(
            t.charts[0].map.as_ref(),
            &|p| p[0].hypot(p[1]) < 0.4,
            48,
            48,
            true,
            true,
            None,
        );
        let chi_before = m.euler_characteristic();
        // zip the hole against a translated copy of itself is nonsense
        // geometrically, but chi bookkeeping is what matters here
        let hole_center = t.eval(0, [0.0, 0.0]).coords().to_vec();
        let l = m.boundary_loop_near(&hole_center);
        assert!(!l.is_empty());
        // duplicate loop vertices as a fake ring
        let ring: Vec<usize> = l
            .iter()
            .map(|&v| {
                let mut c = m.vertices[v].clone();
                c[0] += 0.01;
                m.vertices.push(c);
                m.vertices.len() - 1
            })
            .collect();
        zip_loops(&mut m, &ring, &l);
        // the fake ring adds |l| vertices, the zip adds 2|l| triangles and
        // closes the hole against a new boundary of the same length
        assert_eq!(m.euler_characteristic(), chi_before);
    }
}
