//! Discretized base spaces: periodic tori, boundary-collapsed cubes for
//! spheres, and the cube model of the 5-ball.
//!
//! Points are stored in row-major order (last axis fastest). On a sphere grid
//! the whole boundary of the parameter cube is one point of `S^d`; lookups go
//! through [`BaseGrid::canonical`], which sends every boundary index to the
//! base point `0`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Torus,
    Sphere,
    Ball5,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Torus => "torus",
            SpaceKind::Sphere => "sphere",
            SpaceKind::Ball5 => "ball5",
        })
    }
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" | "t" => Ok(SpaceKind::Torus),
            "sphere" | "s" => Ok(SpaceKind::Sphere),
            "ball5" | "ball" => Ok(SpaceKind::Ball5),
            other => Err(Error::UnsupportedSpace(other.to_string())),
        }
    }
}

/// Serialized form of a grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub kind: SpaceKind,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridDescriptor", into = "GridDescriptor")]
pub struct BaseGrid {
    kind: SpaceKind,
    shape: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl TryFrom<GridDescriptor> for BaseGrid {
    type Error = Error;
    fn try_from(d: GridDescriptor) -> Result<Self> {
        make_grid(d.kind, d.shape.len(), &d.shape)
    }
}

impl From<BaseGrid> for GridDescriptor {
    fn from(g: BaseGrid) -> Self {
        GridDescriptor { kind: g.kind, shape: g.shape }
    }
}

/// Build a grid. Tori and spheres support dimensions 1 to 4, the ball is
/// always 5-dimensional; every axis needs at least 4 points.
pub fn make_grid(kind: SpaceKind, dim: usize, shape: &[usize]) -> Result<BaseGrid> {
    let ok_dim = match kind {
        SpaceKind::Torus | SpaceKind::Sphere => (1..=4).contains(&dim),
        SpaceKind::Ball5 => dim == 5,
    };
    if !ok_dim {
        return Err(Error::UnsupportedSpace(format!("{kind} of dimension {dim}")));
    }
    if shape.len() != dim {
        return Err(Error::UnsupportedSpace(format!(
            "shape {shape:?} does not have {dim} entries"
        )));
    }
    if let Some(&n) = shape.iter().find(|&&n| n < 4) {
        return Err(Error::UnsupportedSpace(format!("axis with {n} points (need at least 4)")));
    }
    let len = shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&l| l <= 1 << 28)
        .ok_or_else(|| Error::UnsupportedSpace(format!("grid {shape:?} too large")))?;
    let mut strides = vec![1; dim];
    for a in (0..dim.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    Ok(BaseGrid { kind, shape: shape.to_vec(), strides, len })
}

impl BaseGrid {
    pub fn torus(shape: &[usize]) -> Result<Self> {
        make_grid(SpaceKind::Torus, shape.len(), shape)
    }

    pub fn sphere(shape: &[usize]) -> Result<Self> {
        make_grid(SpaceKind::Sphere, shape.len(), shape)
    }

    pub fn ball5(shape: &[usize]) -> Result<Self> {
        make_grid(SpaceKind::Ball5, shape.len(), shape)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn descriptor(&self) -> GridDescriptor {
        self.clone().into()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in 0..self.dim() {
            out[a] = idx / self.strides[a];
            idx %= self.strides[a];
        }
        out
    }

    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.shape[axis]
    }

    /// Parameter-domain coordinates: `2πi/n` on tori, `i/(n−1)` on cubes.
    pub fn coordinates(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .zip(&self.shape)
            .map(|(&i, &n)| match self.kind {
                SpaceKind::Torus => 2.0 * PI * i as f64 / n as f64,
                SpaceKind::Sphere | SpaceKind::Ball5 => i as f64 / (n - 1) as f64,
            })
            .collect()
    }

    /// Point reached by stepping `+1` along `axis`; `None` past the cube edge.
    pub fn step(&self, idx: usize, axis: usize) -> Option<usize> {
        let i = self.axis_index(idx, axis);
        let n = self.shape[axis];
        match self.kind {
            SpaceKind::Torus => Some(if i + 1 == n {
                idx + self.strides[axis] - n * self.strides[axis]
            } else {
                idx + self.strides[axis]
            }),
            _ => (i + 1 < n).then(|| idx + self.strides[axis]),
        }
    }

    /// Point reached by stepping `−1` along `axis`.
    pub fn step_back(&self, idx: usize, axis: usize) -> Option<usize> {
        let i = self.axis_index(idx, axis);
        match self.kind {
            SpaceKind::Torus => Some(if i == 0 {
                idx + (self.shape[axis] - 1) * self.strides[axis]
            } else {
                idx - self.strides[axis]
            }),
            _ => (i > 0).then(|| idx - self.strides[axis]),
        }
    }

    /// Whether the point lies on the boundary of the parameter cube. Always
    /// false on tori.
    pub fn is_boundary(&self, idx: usize) -> bool {
        match self.kind {
            SpaceKind::Torus => false,
            _ => (0..self.dim()).any(|a| {
                let i = self.axis_index(idx, a);
                i == 0 || i + 1 == self.shape[a]
            }),
        }
    }

    /// Representative of the point in the quotient space: on spheres every
    /// boundary index maps to the base point `0`.
    pub fn canonical(&self, idx: usize) -> usize {
        if self.kind == SpaceKind::Sphere && self.is_boundary(idx) {
            0
        } else {
            idx
        }
    }

    /// Boundary points of the parameter cube (empty on tori). For the ball
    /// this is the `S⁴` sub-grid.
    pub fn boundary_points(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.is_boundary(i)).collect()
    }

    /// All directed links `(x, axis, x + e_axis)` of the grid, in point order.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.len).flat_map(move |x| {
            (0..self.dim()).filter_map(move |a| self.step(x, a).map(|y| (x, a, y)))
        })
    }

    /// Points adjacent to `idx` (both directions on every axis).
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for a in 0..self.dim() {
            out.extend(self.step(idx, a));
            out.extend(self.step_back(idx, a));
        }
        out
    }
}

/// A representative of a homology class over which a degree-`k` invariant is
/// integrated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleHandle {
    pub degree: usize,
    /// Increasing axis subset spanning the cycle. On spheres and the ball this
    /// is every axis.
    pub axes: Vec<usize>,
    /// Multi-index fixing the transverse coordinates (torus only).
    pub base_offset: Vec<usize>,
    /// Whether the handle is the fundamental class of the whole space.
    pub whole_space: bool,
}

impl CycleHandle {
    /// Short label, e.g. `"12"` for the torus cycle along axes 1 and 2
    /// (1-based), or `"S3"` for a whole sphere.
    pub fn label(&self) -> String {
        if self.whole_space {
            format!("S{}", self.degree)
        } else {
            self.axes.iter().map(|a| (a + 1).to_string()).collect()
        }
    }
}

/// One cycle class per basis element of `H^k`: the `C(d,k)` coordinate
/// sub-tori at transverse offset 0 on `T^d`, the fundamental class on `S^d`.
pub fn enumerate_cycles(grid: &BaseGrid, degree: usize) -> Result<Vec<CycleHandle>> {
    enumerate_cycles_at(grid, degree, &vec![0; grid.dim()])
}

/// As [`enumerate_cycles`] with an explicit transverse offset on tori.
pub fn enumerate_cycles_at(
    grid: &BaseGrid,
    degree: usize,
    offset: &[usize],
) -> Result<Vec<CycleHandle>> {
    let d = grid.dim();
    if degree == 0 || degree > d {
        return Err(Error::DegreeOutOfRange { degree, dim: d });
    }
    if offset.len() != d || offset.iter().zip(grid.shape()).any(|(o, n)| o >= n) {
        return Err(Error::DimensionMismatch(format!("offset {offset:?} for grid {:?}", grid.shape())));
    }
    Ok(match grid.kind() {
        SpaceKind::Torus => axis_subsets(d, degree)
            .into_iter()
            .map(|axes| CycleHandle { degree, axes, base_offset: offset.to_vec(), whole_space: false })
            .collect(),
        SpaceKind::Sphere | SpaceKind::Ball5 if degree == d => vec![CycleHandle {
            degree,
            axes: (0..d).collect(),
            base_offset: vec![0; d],
            whole_space: true,
        }],
        _ => vec![],
    })
}

/// Increasing `k`-subsets of `0..d` in lexicographic order.
pub fn axis_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..d {
            cur.push(a);
            rec(a + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

/// An oriented k-cell: the cube spanned from `origin` along `axes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub origin: usize,
    pub axes: Vec<usize>,
    /// Grid indices of the `2^k` corners; bit `j` of the position selects a
    /// step along `axes[j]`. Not canonicalized.
    pub vertices: Vec<usize>,
    pub sign: i8,
}

impl Cell {
    pub fn corner(&self, mask: usize) -> usize {
        self.vertices[mask]
    }
}

/// Oriented top cells of a cycle. Covers the cycle exactly once, positively
/// oriented in increasing-axis order.
pub fn cells<'a>(grid: &'a BaseGrid, cycle: &'a CycleHandle) -> impl Iterator<Item = Cell> + 'a {
    let k = cycle.axes.len();
    let extents: Vec<usize> = cycle
        .axes
        .iter()
        .map(|&a| match grid.kind() {
            SpaceKind::Torus => grid.shape()[a],
            _ => grid.shape()[a] - 1,
        })
        .collect();
    let count: usize = extents.iter().product();
    (0..count).map(move |mut c| {
        let mut multi = cycle.base_offset.clone();
        for j in (0..k).rev() {
            multi[cycle.axes[j]] = c % extents[j];
            c /= extents[j];
        }
        let origin = grid.index(&multi);
        let mut vertices = vec![origin; 1 << k];
        for mask in 1..(1usize << k) {
            let j = mask.trailing_zeros() as usize;
            let base = vertices[mask & !(1 << j)];
            vertices[mask] = grid.step(base, cycle.axes[j]).expect("cell corner inside grid");
        }
        Cell { origin, axes: cycle.axes.clone(), vertices, sign: 1 }
    })
}

/// Number of top cells of a cycle.
pub fn cell_count(grid: &BaseGrid, cycle: &CycleHandle) -> usize {
    cycle
        .axes
        .iter()
        .map(|&a| match grid.kind() {
            SpaceKind::Torus => grid.shape()[a],
            _ => grid.shape()[a] - 1,
        })
        .product()
}
