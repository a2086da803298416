//! JSON documents for systems (`.cqs`), bundles (`.cbd`), mesh maps (`.cmf`)
//! and invariant reports.
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.
//! Floats are written in shortest round-trip form, so reading back a written
//! file reproduces every entry bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basespace::{BaseGrid, GridDescriptor};
use crate::chiralbundle::ChiralBundleData;
use crate::error::{Error, Result};
use crate::invariants::{InvariantReport, MeshMap, Support};
use crate::numkernel::{c, CMatrix};
use crate::spectral::QuantumSystemField;

pub const FORMAT_VERSION: u32 = 1;

type Rows = Vec<Vec<[f64; 2]>>;

fn encode(m: &CMatrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn decode(rows: &Rows, shape: (usize, usize), what: &str, point: usize) -> Result<CMatrix> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::Format(format!("{what} at point {point} is not {}x{}", shape.0, shape.1)));
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn decode_all(values: &[Rows], shape: (usize, usize), what: &str) -> Result<Vec<CMatrix>> {
    values.iter().enumerate().map(|(x, r)| decode(r, shape, what, x)).collect()
}

fn check_header(format: &str, expected: &str, version: u32) -> Result<()> {
    if format != expected {
        return Err(Error::Format(format!("expected a `{expected}` document, found `{format}`")));
    }
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported {expected} version {version}")));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    format: String,
    version: u32,
    grid: GridDescriptor,
    #[serde(rename = "N")]
    n: usize,
    band_count: usize,
    hamiltonian: Vec<Rows>,
    chi: Vec<Rows>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleDoc {
    format: String,
    version: u32,
    grid: GridDescriptor,
    #[serde(rename = "N")]
    n: usize,
    m: usize,
    frame: Vec<Rows>,
    phi: Vec<Rows>,
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDoc {
    format: String,
    version: u32,
    grid: GridDescriptor,
    support: Support,
    dim: usize,
    values: Vec<Rows>,
}

pub fn system_to_string(sys: &QuantumSystemField) -> String {
    let doc = SystemDoc {
        format: "cqs".into(),
        version: FORMAT_VERSION,
        grid: sys.grid.descriptor(),
        n: sys.dim_h,
        band_count: sys.band_count,
        hamiltonian: sys.hamiltonian.iter().map(encode).collect(),
        chi: sys.chi.iter().map(encode).collect(),
    };
    serde_json::to_string(&doc).expect("system serializes")
}

pub fn system_from_str(s: &str) -> Result<QuantumSystemField> {
    let doc: SystemDoc = serde_json::from_str(s)?;
    check_header(&doc.format, "cqs", doc.version)?;
    let grid = BaseGrid::try_from(doc.grid)?;
    let shape = (doc.n, doc.n);
    QuantumSystemField::new(
        grid,
        decode_all(&doc.hamiltonian, shape, "H")?,
        decode_all(&doc.chi, shape, "chi")?,
        doc.band_count,
    )
}

pub fn bundle_to_string(b: &ChiralBundleData) -> String {
    let doc = BundleDoc {
        format: "cbd".into(),
        version: FORMAT_VERSION,
        grid: b.grid.descriptor(),
        n: b.ambient_dim,
        m: b.rank,
        frame: b.frame.iter().map(encode).collect(),
        phi: b.phi.iter().map(encode).collect(),
        metadata: b.metadata.clone(),
    };
    serde_json::to_string(&doc).expect("bundle serializes")
}

pub fn bundle_from_str(s: &str) -> Result<ChiralBundleData> {
    let doc: BundleDoc = serde_json::from_str(s)?;
    check_header(&doc.format, "cbd", doc.version)?;
    let grid = BaseGrid::try_from(doc.grid)?;
    let mut b = ChiralBundleData::new(
        grid,
        decode_all(&doc.frame, (doc.n, doc.m), "V")?,
        decode_all(&doc.phi, (doc.m, doc.m), "phi")?,
    )?;
    b.metadata = doc.metadata;
    Ok(b)
}

pub fn mesh_map_to_string(f: &MeshMap) -> String {
    let doc = MeshDoc {
        format: "cmf".into(),
        version: FORMAT_VERSION,
        grid: f.grid.descriptor(),
        support: f.support,
        dim: f.matrix_dim(),
        values: f.values.iter().map(encode).collect(),
    };
    serde_json::to_string(&doc).expect("mesh map serializes")
}

pub fn mesh_map_from_str(s: &str) -> Result<MeshMap> {
    let doc: MeshDoc = serde_json::from_str(s)?;
    check_header(&doc.format, "cmf", doc.version)?;
    let grid = BaseGrid::try_from(doc.grid)?;
    MeshMap::new(grid, doc.support, decode_all(&doc.values, (doc.dim, doc.dim), "value")?)
}

/// Pretty JSON with sorted keys.
pub fn report_to_string(r: &InvariantReport) -> String {
    serde_json::to_string_pretty(&r.to_json()).expect("report serializes")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, s: &str) -> Result<()> {
    fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_system(path: impl AsRef<Path>) -> Result<QuantumSystemField> {
    system_from_str(&read(path.as_ref())?)
}

pub fn write_system(path: impl AsRef<Path>, sys: &QuantumSystemField) -> Result<()> {
    write(path.as_ref(), &system_to_string(sys))
}

pub fn read_bundle(path: impl AsRef<Path>) -> Result<ChiralBundleData> {
    bundle_from_str(&read(path.as_ref())?)
}

pub fn write_bundle(path: impl AsRef<Path>, b: &ChiralBundleData) -> Result<()> {
    write(path.as_ref(), &bundle_to_string(b))
}

pub fn read_mesh_map(path: impl AsRef<Path>) -> Result<MeshMap> {
    mesh_map_from_str(&read(path.as_ref())?)
}

pub fn write_mesh_map(path: impl AsRef<Path>, f: &MeshMap) -> Result<()> {
    write(path.as_ref(), &mesh_map_to_string(f))
}

pub fn write_report(path: impl AsRef<Path>, r: &InvariantReport) -> Result<()> {
    write(path.as_ref(), &report_to_string(r))
}
