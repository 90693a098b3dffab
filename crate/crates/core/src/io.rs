//! File formats: scene JSON, far-field CSV, indicator CSV/PGM, hull JSON.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{
    DirectionSet, FarFieldSamples, Scene, SceneComponent, WavenumberGrid, DEFAULT_MESH_H,
};
use crate::geometry::{Shape, Vec2};
use crate::imaging::{HullEstimate, IndicatorField};
use crate::srcexpr;

/// Header of the far-field CSV format.
pub const FAR_FIELD_HEADER: &str = "m,phi,j,k,re,im";
/// Header of the indicator CSV format.
pub const FIELD_HEADER: &str = "ix,iy,x,y,value";
/// Names accepted by [`load_scene`] in place of a path.
pub const BUILTIN_SCENES: [&str; 6] = ["fig2a", "fig2b", "f1", "f2", "triangle", "slab"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Rectangle {
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
    },
    Disc {
        center: [f64; 2],
        radius: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

impl ShapeSpec {
    fn to_shape(&self) -> Result<Shape> {
        match self {
            ShapeSpec::Rectangle {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
            } => Shape::rectangle(*x_lo, *x_hi, *y_lo, *y_hi),
            ShapeSpec::Disc { center, radius } => Shape::disc(Vec2::from(*center), *radius),
            ShapeSpec::Polygon { vertices } => {
                Shape::polygon(vertices.iter().map(|v| Vec2::from(*v)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub shape: ShapeSpec,
    pub amplitude: String,
}

fn default_mesh_h() -> f64 {
    DEFAULT_MESH_H
}

/// On-disk scene description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub components: Vec<ComponentSpec>,
    #[serde(default = "default_mesh_h")]
    pub mesh_h: f64,
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn rect(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, amplitude: &str) -> ComponentSpec {
    ComponentSpec {
        shape: ShapeSpec::Rectangle {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        },
        amplitude: amplitude.into(),
    }
}

impl SceneFile {
    /// Parse JSON text. Syntax errors report a byte offset, schema errors a field path.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: SceneFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            match inner.classify() {
                serde_json::error::Category::Data => Error::Schema {
                    path,
                    message: inner.to_string(),
                },
                _ => Error::Json {
                    offset: byte_offset(text, inner.line(), inner.column()),
                    message: inner.to_string(),
                },
            }
        })?;
        Ok(file)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let components = match name {
            "fig2a" => vec![rect(1.0, 2.0, 1.0, 1.6, "5")],
            "fig2b" => vec![
                rect(1.0, 1.6, 1.0, 1.4, "5"),
                ComponentSpec {
                    shape: ShapeSpec::Disc {
                        center: [-0.5, -0.5],
                        radius: 0.2,
                    },
                    amplitude: "5".into(),
                },
            ],
            "f1" => vec![
                rect(-1.0, 1.0, 1.0, 2.0, "1"),
                rect(-1.0, 1.0, -1.0, 1.0, "x"),
                rect(-1.0, 1.0, -2.0, -1.0, "1"),
            ],
            "f2" => vec![
                rect(-1.0, 1.0, 1.0, 2.0, "1"),
                rect(-1.0, 1.0, -2.0, -1.0, "1"),
            ],
            "triangle" => vec![ComponentSpec {
                shape: ShapeSpec::Polygon {
                    vertices: vec![[-2.0, 0.0], [1.0, 0.0], [-0.5, 1.5 * 3f64.sqrt() - 1.0]],
                },
                amplitude: "1".into(),
            }],
            "slab" => vec![rect(-2.0, 2.0, 0.0, 0.1, "1")],
            _ => return None,
        };
        Some(Self {
            components,
            mesh_h: DEFAULT_MESH_H,
        })
    }

    pub fn to_scene(&self) -> Result<Scene> {
        if !(self.mesh_h > 0.0 && self.mesh_h.is_finite()) {
            return Err(Error::Schema {
                path: "mesh_h".into(),
                message: format!("must be positive, got {}", self.mesh_h),
            });
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let shape = c.shape.to_shape().map_err(|e| Error::Schema {
                    path: format!("components[{i}].shape"),
                    message: e.to_string(),
                })?;
                let amplitude = srcexpr::parse(&c.amplitude).map_err(|source| Error::Source {
                    component: i,
                    source,
                })?;
                Ok(SceneComponent { shape, amplitude })
            })
            .collect::<Result<Vec<_>>>()?;
        Scene::new(components)
    }
}

/// A validated scene with its preferred mesh size.
#[derive(Debug, Clone)]
pub struct LoadedScene {
    pub scene: Scene,
    pub mesh_h: f64,
}

/// Load a built-in scene by name, or a scene JSON file.
pub fn load_scene(name_or_path: &str) -> Result<LoadedScene> {
    let file = match SceneFile::builtin(name_or_path) {
        Some(f) => f,
        None => {
            let text = fs::read_to_string(name_or_path).map_err(|e| Error::io(name_or_path, e))?;
            SceneFile::parse(&text)?
        }
    };
    Ok(LoadedScene {
        scene: file.to_scene()?,
        mesh_h: file.mesh_h,
    })
}

fn csv_text(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Far-field CSV text. Indices `m` and `j` are one-based; reals use 17 significant digits.
pub fn format_far_field_csv(data: &FarFieldSamples) -> String {
    let (n_dirs, n_k) = (data.n_directions(), data.n_wavenumbers());
    let rows = (0..n_dirs)
        .flat_map(|m| (0..n_k).map(move |j| (m, j)))
        .map(|(m, j)| {
            let u = data.get(m, j);
            vec![
                (m + 1).to_string(),
                real(data.directions().angle(m)),
                (j + 1).to_string(),
                real(data.kgrid().k(j)),
                real(u.re),
                real(u.im),
            ]
        });
    csv_text(FAR_FIELD_HEADER, rows)
}

pub fn write_far_field_csv(data: &FarFieldSamples, path: &Path) -> Result<()> {
    fs::write(path, format_far_field_csv(data)).map_err(|e| Error::io(path, e))
}

struct CsvRow {
    line: usize,
    m: usize,
    phi: f64,
    j: usize,
    k: f64,
    u: Complex64,
}

/// Parse far-field CSV text; `path` only labels errors.
pub fn parse_far_field_csv(text: &str, path: &Path) -> Result<FarFieldSamples> {
    let err = |line: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let line_of = |pos: Option<&csv::Position>| pos.map_or(0, |p| p.line() as usize);
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| err(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != FAR_FIELD_HEADER {
        return Err(err(1, format!("expected header {FAR_FIELD_HEADER:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(line_of(e.position()), e.to_string()))?;
        let line = line_of(record.position());
        if record.len() != 6 {
            return Err(err(
                line,
                format!("expected 6 fields, got {}", record.len()),
            ));
        }
        let index = |i: usize, name: &str| -> Result<usize> {
            match record[i].parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(err(
                    line,
                    format!("{name} must be a positive integer, got {:?}", &record[i]),
                )),
            }
        };
        let real = |i: usize, name: &str| -> Result<f64> {
            match record[i].parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(
                    line,
                    format!("{name} must be a finite number, got {:?}", &record[i]),
                )),
            }
        };
        rows.push(CsvRow {
            line,
            m: index(0, "m")?,
            phi: real(1, "phi")?,
            j: index(2, "j")?,
            k: real(3, "k")?,
            u: Complex64::new(real(4, "re")?, real(5, "im")?),
        });
    }
    let Some(last_line) = rows.last().map(|r| r.line) else {
        return Err(err(1, "no data rows".into()));
    };
    let n_dirs = rows.iter().map(|r| r.m).max().unwrap_or(0);
    let n_k = rows.iter().map(|r| r.j).max().unwrap_or(0);
    if rows.len() != n_dirs * n_k {
        return Err(err(
            last_line,
            format!(
                "{} rows do not form a complete {n_dirs} x {n_k} lattice",
                rows.len()
            ),
        ));
    }
    let mut cells: Vec<Option<&CsvRow>> = vec![None; rows.len()];
    for r in &rows {
        let slot = &mut cells[(r.m - 1) * n_k + (r.j - 1)];
        if slot.is_some() {
            return Err(err(
                r.line,
                format!("duplicate row for m={}, j={}", r.m, r.j),
            ));
        }
        *slot = Some(r);
    }
    let cells: Vec<&CsvRow> = cells
        .into_iter()
        .map(|c| c.expect("lattice is complete"))
        .collect();

    let mut angles = Vec::with_capacity(n_dirs);
    for m in 0..n_dirs {
        let phi = cells[m * n_k].phi;
        if let Some(r) = cells[m * n_k..(m + 1) * n_k].iter().find(|r| r.phi != phi) {
            return Err(err(
                r.line,
                format!("phi differs within direction m={}", m + 1),
            ));
        }
        angles.push(phi);
    }
    let ks: Vec<f64> = (0..n_k).map(|j| cells[j].k).collect();
    for r in &cells {
        if r.k != ks[r.j - 1] {
            return Err(err(
                r.line,
                format!("k differs within wavenumber j={}", r.j),
            ));
        }
    }
    let dk = if n_k == 1 {
        2.0 * ks[0]
    } else {
        (ks[n_k - 1] - ks[0]) / (n_k - 1) as f64
    };
    let kgrid =
        WavenumberGrid::new(n_k, dk * n_k as f64).map_err(|e| err(cells[0].line, e.to_string()))?;
    for r in &cells[..n_k] {
        let want = kgrid.k(r.j - 1);
        if (r.k - want).abs() > 1e-12 * want {
            return Err(err(
                r.line,
                format!(
                    "k = {} is not on the midpoint grid (j - 1/2) dk, expected {want}",
                    r.k
                ),
            ));
        }
    }
    let dirs = DirectionSet::from_angles(angles).map_err(|e| err(cells[0].line, e.to_string()))?;
    FarFieldSamples::new(dirs, kgrid, cells.iter().map(|r| r.u).collect())
}

pub fn read_far_field_csv(path: &Path) -> Result<FarFieldSamples> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_far_field_csv(&text, path)
}

/// Indicator CSV text: zero-based grid indices, coordinates, value.
pub fn format_field_csv(field: &IndicatorField) -> String {
    let grid = *field.grid();
    let rows = (0..grid.ny())
        .flat_map(|iy| (0..grid.nx()).map(move |ix| (ix, iy)))
        .map(|(ix, iy)| {
            vec![
                ix.to_string(),
                iy.to_string(),
                real(grid.x(ix)),
                real(grid.y(iy)),
                real(field.value(ix, iy)),
            ]
        });
    csv_text(FIELD_HEADER, rows)
}

pub fn write_field_csv(field: &IndicatorField, path: &Path) -> Result<()> {
    fs::write(path, format_field_csv(field)).map_err(|e| Error::io(path, e))
}

/// Binary 8-bit PGM bytes, top row at the largest `y`.
pub fn field_pgm_bytes(field: &IndicatorField) -> Vec<u8> {
    let grid = field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let peak = field.max_value();
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(nx * ny);
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            let v = field.value(ix, iy);
            let g = if peak > 0.0 {
                (255.0 * v / peak).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            out.push(g);
        }
    }
    out
}

pub fn write_field_pgm(field: &IndicatorField, path: &Path) -> Result<()> {
    fs::write(path, field_pgm_bytes(field)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripJson {
    pub phi: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullJson {
    pub strips: Vec<StripJson>,
    pub polygon: Vec<[f64; 2]>,
}

impl HullJson {
    pub fn new(hull: &HullEstimate, dirs: &DirectionSet) -> Self {
        Self {
            strips: hull
                .strips
                .iter()
                .map(|(m, s)| StripJson {
                    phi: dirs.angle(*m),
                    tau_lo: s.tau_lo(),
                    tau_hi: s.tau_hi(),
                })
                .collect(),
            polygon: hull.polygon.vertices().iter().map(|v| [v.x, v.y]).collect(),
        }
    }
}

pub fn write_hull_json(hull: &HullJson, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(hull).expect("hull serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `<out>.meta.json` next to an output file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Write run parameters as JSON with sorted keys.
pub fn write_metadata(out: &Path, params: &BTreeMap<String, serde_json::Value>) -> Result<()> {
    let path = sidecar_path(out);
    let mut file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let text = serde_json::to_string_pretty(params).expect("metadata serializes");
    writeln!(file, "{text}").map_err(|e| Error::io(&path, e))
}
