//! File exports: CSV point clouds, OBJ triangle meshes over a selected
//! coordinate projection, and a little-endian binary dump that round-trips
//! at full precision.
//!
//! Binary layout (all integers little-endian u32, floats f64 LE):
//!   magic "HLBN" | version = 1 | ambient_n | chart_count
//!   per chart: name_len | name bytes | nu | nv |
//!              nu * nv * (2 + 2 ambient_n) floats (params then coords)

use crate::error::{CoreError, Result};
use crate::mesh::SurfaceMesh;
use crate::surface::ChartedSurface;
use std::io::{Read, Write};
use std::path::Path;

pub const BIN_MAGIC: &[u8; 4] = b"HLBN";
pub const BIN_VERSION: u32 = 1;

/// CSV rows: chart id, chart name, p0, p1, x0..x_{2n-1}.
pub fn write_csv(surface: &ChartedSurface, nu: usize, nv: usize, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n2 = 2 * surface.ambient_n;
    write!(f, "chart,chart_name,p0,p1")?;
    for i in 0..n2 {
        write!(f, ",x{i}")?;
    }
    writeln!(f)?;
    for (ci, chart) in surface.charts.iter().enumerate() {
        for p in chart.grid(nu, nv) {
            let z = chart.map.eval(p);
            write!(f, "{ci},{},{:.17e},{:.17e}", chart.name, p[0], p[1])?;
            for x in z.coords() {
                write!(f, ",{x:.17e}")?;
            }
            writeln!(f)?;
        }
    }
    Ok(())
}

/// OBJ mesh projected onto three of the 2n real coordinates.
pub fn write_obj(mesh: &SurfaceMesh, projection: [usize; 3], path: &Path) -> Result<()> {
    let dim = mesh.vertices.first().map(|v| v.len()).unwrap_or(0);
    for &p in &projection {
        if p >= dim {
            return Err(CoreError::InvalidArgument(format!(
                "projection index {p} out of range for {dim} coordinates"
            )));
        }
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# hulllab surface mesh")?;
    writeln!(
        f,
        "# euler_characteristic: {}",
        mesh.euler_characteristic()
    )?;
    writeln!(f, "# orientable: {}", mesh.orientable())?;
    writeln!(f, "# boundary_components: {}", mesh.boundary_components())?;
    writeln!(
        f,
        "# projection: x{} x{} x{}",
        projection[0], projection[1], projection[2]
    )?;
    for v in &mesh.vertices {
        writeln!(
            f,
            "v {:.12} {:.12} {:.12}",
            v[projection[0]], v[projection[1]], v[projection[2]]
        )?;
    }
    for t in &mesh.triangles {
        writeln!(f, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// One chart's sampled block in a binary dump.
#[derive(Debug, Clone, PartialEq)]
pub struct BinChart {
    pub name: String,
    pub nu: u32,
    pub nv: u32,
    /// nu * nv rows of (p0, p1, x0..x_{2n-1}).
    pub rows: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinDump {
    pub ambient_n: u32,
    pub charts: Vec<BinChart>,
}

pub fn write_bin(surface: &ChartedSurface, nu: usize, nv: usize, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(BIN_MAGIC)?;
    f.write_all(&BIN_VERSION.to_le_bytes())?;
    f.write_all(&(surface.ambient_n as u32).to_le_bytes())?;
    f.write_all(&(surface.charts.len() as u32).to_le_bytes())?;
    for chart in &surface.charts {
        let name = chart.name.as_bytes();
        f.write_all(&(name.len() as u32).to_le_bytes())?;
        f.write_all(name)?;
        let pts = chart.grid(nu, nv);
        // holes make the grid ragged; store the actual row count in nu and
        // set nv = 1 so the layout stays rectangular
        f.write_all(&(pts.len() as u32).to_le_bytes())?;
        f.write_all(&1u32.to_le_bytes())?;
        for p in pts {
            let z = chart.map.eval(p);
            for x in [p[0], p[1]].iter().chain(z.coords()) {
                f.write_all(&x.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_bin(path: &Path) -> Result<BinDump> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != BIN_MAGIC {
        return Err(CoreError::InvalidArgument("bad binary magic".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |f: &mut dyn Read| -> Result<u32> {
        f.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let version = read_u32(&mut f)?;
    if version != BIN_VERSION {
        return Err(CoreError::InvalidArgument(format!(
            "unsupported binary version {version}"
        )));
    }
    let ambient_n = read_u32(&mut f)?;
    let chart_count = read_u32(&mut f)?;
    let mut charts = Vec::with_capacity(chart_count as usize);
    for _ in 0..chart_count {
        let name_len = read_u32(&mut f)? as usize;
        let mut name = vec![0u8; name_len];
        f.read_exact(&mut name)?;
        let nu = read_u32(&mut f)?;
        let nv = read_u32(&mut f)?;
        let count = nu as usize * nv as usize * (2 + 2 * ambient_n as usize);
        let mut rows = Vec::with_capacity(count);
        let mut fbuf = [0u8; 8];
        for _ in 0..count {
            f.read_exact(&mut fbuf)?;
            rows.push(f64::from_le_bytes(fbuf));
        }
        charts.push(BinChart {
            name: String::from_utf8_lossy(&name).into_owned(),
            nu,
            nv,
            rows,
        });
    }
    Ok(BinDump { ambient_n, charts })
}
