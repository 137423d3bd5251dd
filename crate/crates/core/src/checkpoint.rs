//! Binary trajectory checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic      4 bytes  "ZVCK"
//! version    u32      1
//! grid_kind  u8       0 physical (x, y), 1 boundary layer (x, z)
//! content    u8       see `Content`
//! nx, ny, nt u64      ny counts normal nodes (y or z)
//! t0, dt     f64      level n sits at t0 + n dt
//! epsilon    f64      NaN unless the content depends on epsilon
//! lx         f64
//! nodes      ny x f64 normal coordinates
//! nfields    u32, then per field: u16 name length, UTF-8 name
//! payload    per level, per field: nx * ny f64, row-major (x index outer)
//! ```

use std::io::{Read, Write};
use std::sync::Arc;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{BLField, Field2D, State};
use crate::grid::{BLGrid, Grid2D};

const MAGIC: &[u8; 4] = b"ZVCK";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Physical = 0,
    Layer = 1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Content {
    Euler = 0,
    EulerCorrector = 1,
    Prandtl = 2,
    Ansatz = 3,
    NavierStokes = 4,
}

impl Content {
    fn from_u8(b: u8) -> Result<Self> {
        Ok(match b {
            0 => Content::Euler,
            1 => Content::EulerCorrector,
            2 => Content::Prandtl,
            3 => Content::Ansatz,
            4 => Content::NavierStokes,
            _ => return Err(Error::Checkpoint(format!("unknown content tag {b}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub grid_kind: GridKind,
    pub content: Content,
    pub epsilon: Option<f64>,
    pub lx: f64,
    pub nx: usize,
    pub nodes: Vec<f64>,
    pub t0: f64,
    pub dt: f64,
    pub field_names: Vec<String>,
    /// `levels[n][f]` has shape `(nx, ny)`.
    pub levels: Vec<Vec<Array2<f64>>>,
}

fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let dt = times[1] - times[0];
    for (n, t) in times.iter().enumerate() {
        if (t - (times[0] + n as f64 * dt)).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::TimeGrid("checkpoint levels must be uniformly spaced".into()));
        }
    }
    Ok(dt)
}

impl Checkpoint {
    /// `(rho, u, v)` per level on a physical grid.
    pub fn from_states(content: Content, states: &[State], epsilon: Option<f64>) -> Result<Self> {
        let named: Vec<(String, Vec<&Field2D>)> = ["rho", "u", "v"]
            .iter()
            .map(|n| {
                let fs = states
                    .iter()
                    .map(|s| match *n {
                        "rho" => &s.rho,
                        "u" => &s.u,
                        _ => &s.v,
                    })
                    .collect();
                (n.to_string(), fs)
            })
            .collect();
        let times: Vec<f64> = states.iter().map(|s| s.t).collect();
        Self::from_fields(content, &named, &times, epsilon)
    }

    /// Named physical-grid field series sharing one time axis.
    pub fn from_fields(
        content: Content,
        fields: &[(String, Vec<&Field2D>)],
        times: &[f64],
        epsilon: Option<f64>,
    ) -> Result<Self> {
        let first = fields
            .first()
            .and_then(|(_, v)| v.first())
            .ok_or_else(|| Error::Checkpoint("no fields to store".into()))?;
        let grid = Arc::clone(first.grid());
        if fields.iter().any(|(_, v)| v.len() != times.len()) {
            return Err(Error::Checkpoint("field series and times differ in length".into()));
        }
        if fields.iter().flat_map(|(_, v)| v).any(|f| **f.grid() != *grid) {
            return Err(Error::Checkpoint("fields live on different grids".into()));
        }
        let levels = (0..times.len())
            .map(|n| fields.iter().map(|(_, v)| v[n].values().clone()).collect())
            .collect();
        Ok(Checkpoint {
            grid_kind: GridKind::Physical,
            content,
            epsilon,
            lx: grid.lx(),
            nx: grid.nx(),
            nodes: grid.y_nodes().to_vec(),
            t0: times.first().copied().unwrap_or(0.0),
            dt: uniform_spacing(times)?,
            field_names: fields.iter().map(|(n, _)| n.clone()).collect(),
            levels,
        })
    }

    /// Named layer-grid field series sharing one time axis.
    pub fn from_layer_fields(fields: &[(String, &[BLField])], times: &[f64]) -> Result<Self> {
        let first = fields
            .first()
            .and_then(|(_, v)| v.first())
            .ok_or_else(|| Error::Checkpoint("no fields to store".into()))?;
        let grid = Arc::clone(first.grid());
        if fields.iter().any(|(_, v)| v.len() != times.len()) {
            return Err(Error::Checkpoint("field series and times differ in length".into()));
        }
        let levels = (0..times.len())
            .map(|n| fields.iter().map(|(_, v)| v[n].values().clone()).collect())
            .collect();
        Ok(Checkpoint {
            grid_kind: GridKind::Layer,
            content: Content::Prandtl,
            epsilon: None,
            lx: grid.lx(),
            nx: grid.nx(),
            nodes: grid.z_nodes().to_vec(),
            t0: times.first().copied().unwrap_or(0.0),
            dt: uniform_spacing(times)?,
            field_names: fields.iter().map(|(n, _)| n.clone()).collect(),
            levels,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.levels.len()).map(|n| self.t0 + n as f64 * self.dt).collect()
    }

    pub fn field_index(&self, name: &str) -> Result<usize> {
        self.field_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Checkpoint(format!("no field named `{name}`")))
    }

    pub fn grid(&self) -> Result<Arc<Grid2D>> {
        if self.grid_kind != GridKind::Physical {
            return Err(Error::Checkpoint("layer checkpoint has no physical grid".into()));
        }
        Ok(Arc::new(Grid2D::from_y_nodes(self.nx, self.lx, self.nodes.clone())?))
    }

    pub fn layer_grid(&self) -> Result<Arc<BLGrid>> {
        if self.grid_kind != GridKind::Layer {
            return Err(Error::Checkpoint("physical checkpoint has no layer grid".into()));
        }
        Ok(Arc::new(BLGrid::from_z_nodes(self.nx, self.lx, self.nodes.clone())?))
    }

    /// Field `name` at level `n` on the physical grid.
    pub fn field(&self, name: &str, n: usize) -> Result<Field2D> {
        let k = self.field_index(name)?;
        let level = self
            .levels
            .get(n)
            .ok_or_else(|| Error::Checkpoint(format!("no level {n}")))?;
        Field2D::from_array(&self.grid()?, level[k].clone())
    }

    /// `(rho, u, v)` states; needs those three fields.
    pub fn to_states(&self) -> Result<Vec<State>> {
        let g = self.grid()?;
        let idx = [
            self.field_index("rho")?,
            self.field_index("u")?,
            self.field_index("v")?,
        ];
        self.levels
            .iter()
            .zip(self.times())
            .map(|(l, t)| {
                Ok(State {
                    rho: Field2D::from_array(&g, l[idx[0]].clone())?,
                    u: Field2D::from_array(&g, l[idx[1]].clone())?,
                    v: Field2D::from_array(&g, l[idx[2]].clone())?,
                    t,
                })
            })
            .collect()
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let ny = self.nodes.len();
        w.write_all(MAGIC)?;
        w.write_u32::<LE>(VERSION)?;
        w.write_u8(self.grid_kind as u8)?;
        w.write_u8(self.content as u8)?;
        for n in [self.nx, ny, self.levels.len()] {
            w.write_u64::<LE>(n as u64)?;
        }
        for x in [self.t0, self.dt, self.epsilon.unwrap_or(f64::NAN), self.lx] {
            w.write_f64::<LE>(x)?;
        }
        for &y in &self.nodes {
            w.write_f64::<LE>(y)?;
        }
        w.write_u32::<LE>(self.field_names.len() as u32)?;
        for name in &self.field_names {
            w.write_u16::<LE>(name.len() as u16)?;
            w.write_all(name.as_bytes())?;
        }
        for level in &self.levels {
            for a in level {
                if a.dim() != (self.nx, ny) {
                    return Err(Error::Checkpoint("field shape disagrees with header".into()));
                }
                for &v in a.iter() {
                    w.write_f64::<LE>(v)?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = r.read_u32::<LE>()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let grid_kind = match r.read_u8()? {
            0 => GridKind::Physical,
            1 => GridKind::Layer,
            b => return Err(Error::Checkpoint(format!("unknown grid kind {b}"))),
        };
        let content = Content::from_u8(r.read_u8()?)?;
        let nx = r.read_u64::<LE>()? as usize;
        let ny = r.read_u64::<LE>()? as usize;
        let nt = r.read_u64::<LE>()? as usize;
        let t0 = r.read_f64::<LE>()?;
        let dt = r.read_f64::<LE>()?;
        let eps = r.read_f64::<LE>()?;
        let lx = r.read_f64::<LE>()?;
        let nodes = (0..ny).map(|_| r.read_f64::<LE>()).collect::<std::io::Result<Vec<_>>>()?;
        let nf = r.read_u32::<LE>()? as usize;
        let mut field_names = Vec::with_capacity(nf);
        for _ in 0..nf {
            let len = r.read_u16::<LE>()? as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf)?;
            field_names.push(
                String::from_utf8(buf).map_err(|_| Error::Checkpoint("field name is not UTF-8".into()))?,
            );
        }
        let mut levels = Vec::with_capacity(nt);
        let mut buf = vec![0.0; nx * ny];
        for _ in 0..nt {
            let mut level = Vec::with_capacity(nf);
            for _ in 0..nf {
                r.read_f64_into::<LE>(&mut buf)?;
                level.push(
                    Array2::from_shape_vec((nx, ny), buf.clone())
                        .map_err(|e| Error::Checkpoint(e.to_string()))?,
                );
            }
            levels.push(level);
        }
        Ok(Checkpoint {
            grid_kind,
            content,
            epsilon: if eps.is_nan() { None } else { Some(eps) },
            lx,
            nx,
            nodes,
            t0,
            dt,
            field_names,
            levels,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}
