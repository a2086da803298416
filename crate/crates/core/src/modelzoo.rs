//! Closed-form models realizing every invariant of the tuple.
//!
//! Spheres are sampled on the boundary-collapsed cube through
//! [`sphere_point`]: the centre of the cube goes to the north pole
//! `(1, 0, …)` and the whole boundary to the south pole `(−1, 0, …)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::basespace::{BaseGrid, SpaceKind};
use crate::chiralbundle::ChiralBundleData;
use crate::error::{Error, Result};
use crate::invariants::{MeshMap, Support};
use crate::numkernel::{c, identity, kron, pauli, CMatrix};
use crate::policy::NumericPolicy;
use crate::spectral::{lower_band_bundle, HamiltonianField, QuantumSystemField};

/// What a model produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    QuantumSystem,
    ChiralBundle,
    S4Map,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), params: BTreeMap::new() }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Parse `name` plus a `key=value,key=value` parameter list.
    pub fn parse(name: &str, params: &str) -> Result<Self> {
        let mut spec = Self::new(name);
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::BadParams(format!("expected key=value, got `{item}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::BadParams(format!("`{v}` is not a number")))?;
            spec.params.insert(k.trim().to_string(), v);
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelOutput {
    System(QuantumSystemField),
    Bundle(ChiralBundleData),
    Map(MeshMap),
}

impl ModelOutput {
    pub fn into_system(self) -> Result<QuantumSystemField> {
        match self {
            ModelOutput::System(s) => Ok(s),
            _ => Err(Error::BadParams("model does not produce a quantum system".into())),
        }
    }

    pub fn into_bundle(self) -> Result<ChiralBundleData> {
        match self {
            ModelOutput::Bundle(b) => Ok(b),
            _ => Err(Error::BadParams("model does not produce bundle data".into())),
        }
    }

    pub fn into_map(self) -> Result<MeshMap> {
        match self {
            ModelOutput::Map(m) => Ok(m),
            _ => Err(Error::BadParams("model does not produce a mesh map".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub range: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub target: Target,
    pub bases: &'static [&'static str],
    pub params: Vec<ParamInfo>,
    /// The invariant the model is built to realize.
    pub realizes: &'static str,
    pub description: &'static str,
}

fn p(name: &'static str, default: f64, range: &'static str) -> ParamInfo {
    ParamInfo { name, default, range }
}

/// The model catalog.
pub fn list_models() -> Vec<ModelInfo> {
    vec![
        ModelInfo {
            name: "ssh",
            target: Target::QuantumSystem,
            bases: &["torus1", "sphere1"],
            params: vec![p("t1", 0.5, "real, |t1| != |t2|"), p("t2", 1.0, "real, |t1| != |t2|")],
            realizes: "w1 = 1 for |t2| > |t1|, 0 otherwise",
            description: "two-band chain H = [[0, q], [q*, 0]], q = t1 + t2 e^{ik}, chi = sigma3",
        },
        ModelInfo {
            name: "dirac_monopole",
            target: Target::ChiralBundle,
            bases: &["sphere2"],
            params: vec![],
            realizes: "c1 = -1",
            description: "lower band of x.sigma over S^2 with phi = 1",
        },
        ModelInfo {
            name: "qwz",
            target: Target::ChiralBundle,
            bases: &["torus2"],
            params: vec![p("M", 1.0, "M not in {0, +-2}")],
            realizes: "c1 = -sign(M) for 0 < |M| < 2, 0 for |M| > 2",
            description: "lower band of d(k).sigma, d = (sin k1, sin k2, M - cos k1 - cos k2), phi = 1",
        },
        ModelInfo {
            name: "su2_degree_n",
            target: Target::ChiralBundle,
            bases: &["sphere3", "torus3"],
            params: vec![p("n", 1.0, "integer"), p("rank", 2.0, "integer >= 2")],
            realizes: "w2 = n",
            description: "constant frame, phi = g^n with g = x0 + i x.sigma the identity S^3 -> SU(2)",
        },
        ModelInfo {
            name: "dirac4d",
            target: Target::ChiralBundle,
            bases: &["torus4"],
            params: vec![p("M", 3.0, "M not in {0, +-2, +-4}")],
            realizes: "c2 = degree of d/|d| (nonzero for 0 < |M| < 4)",
            description: "lower two bands of d(k).Gamma, d = (sin k1..sin k4, M - sum cos k), phi = 1",
        },
        ModelInfo {
            name: "suspended_hopf",
            target: Target::S4Map,
            bases: &["sphere4", "ball5"],
            params: vec![],
            realizes: "z2 codomain (non-trivial element of pi4(SU(2)))",
            description: "S^4 -> S^3 = SU(2) restricting to the Hopf map on the k0 = 0 equator",
        },
        ModelInfo {
            name: "phi_n",
            target: Target::ChiralBundle,
            bases: &["sphere1", "torus1", "torus2", "torus3", "torus4"],
            params: vec![p("n", 1.0, "integer (circle)"), p("n1..n4", 0.0, "integer per torus axis")],
            realizes: "w1 = n",
            description: "trivial line bundle with phi = e^{i n theta}",
        },
        ModelInfo {
            name: "trivial_m",
            target: Target::ChiralBundle,
            bases: &["any"],
            params: vec![p("m", 1.0, "integer >= 1"), p("N", 0.0, "integer >= m (0 means m)")],
            realizes: "all invariants 0",
            description: "constant frame and phi = 1",
        },
        ModelInfo {
            name: "chiral_chern",
            target: Target::QuantumSystem,
            bases: &["sphere2", "torus2"],
            params: vec![p("a", 2.0, "|a| != |b|, a != 0"), p("b", 1.0, "b != 0"), p("M", 1.0, "torus only, M not in {0, +-2}")],
            realizes: "c1 = -1 on all four twin bundles (sphere)",
            description: "four-band chiral H = sigma1 (x) (a + b n.sigma), chi = sigma3 (x) 1, inner band pair",
        },
    ]
}

/// Point of `S^d ⊂ R^{d+1}` for cube coordinates `t ∈ [0,1]^d`.
///
/// With `y = 2t − 1`, `r = |y|`, the polar angle is `π·r(2 − r)` (and `π`
/// for `r ≥ 1`), so the map is smooth at the centre, constant on the
/// boundary, and of degree `+1` for the orientation `det[x, ∂₁x, …, ∂_d x]`.
pub fn sphere_point(t: &[f64]) -> Vec<f64> {
    let y: Vec<f64> = t.iter().map(|&s| 2.0 * s - 1.0).collect();
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let theta = if r < 1.0 { PI * r * (2.0 - r) } else { PI };
    let mut out = vec![theta.cos()];
    if r > 0.0 {
        out.extend(y.iter().map(|v| theta.sin() * v / r));
    } else {
        out.extend(std::iter::repeat(0.0).take(y.len()));
    }
    out
}

/// Unit quaternion `a0 + a1 i + a2 j + a3 k` as `a0 + i(a·σ)` in `SU(2)`.
pub fn su2_from_quaternion(a: [f64; 4]) -> CMatrix {
    let s = pauli();
    identity(2).scale(a[0]) + (&s[0] * c(0.0, a[1])) + (&s[1] * c(0.0, a[2])) + (&s[2] * c(0.0, a[3]))
}

/// The five anticommuting 4×4 Dirac matrices.
pub fn dirac_gammas() -> [CMatrix; 5] {
    let s = pauli();
    let i2 = identity(2);
    [kron(&s[0], &s[0]), kron(&s[0], &s[1]), kron(&s[0], &s[2]), kron(&s[1], &i2), kron(&s[2], &i2)]
}

/// The suspended Hopf map `f : S⁴ → S³`.
pub fn suspended_hopf_point(k: &[f64]) -> [f64; 4] {
    let s = 2.0 / (1.0 + k[0] * k[0]);
    [
        s * k[0],
        s * (k[1] * k[3] - k[2] * k[4]),
        s * (k[1] * k[4] + k[2] * k[3]),
        s * (k[1] * k[1] + k[2] * k[2] - k[3] * k[3] - k[4] * k[4]) / 2.0,
    ]
}

fn integer(spec: &ModelSpec, key: &str, default: f64) -> Result<i64> {
    let v = *spec.params.get(key).unwrap_or(&default);
    if v.fract() != 0.0 || !v.is_finite() || v.abs() > 1e6 {
        return Err(Error::BadParams(format!("{key} = {v} must be an integer")));
    }
    Ok(v as i64)
}

fn real(spec: &ModelSpec, key: &str, default: f64) -> Result<f64> {
    let v = *spec.params.get(key).unwrap_or(&default);
    if !v.is_finite() {
        return Err(Error::BadParams(format!("{key} must be finite")));
    }
    Ok(v)
}

fn check_params(spec: &ModelSpec, allowed: &[&str]) -> Result<()> {
    match spec.params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::BadParams(format!(
            "unknown parameter `{k}` for {}; expected one of {allowed:?}",
            spec.name
        ))),
        None => Ok(()),
    }
}

fn require_base(spec: &ModelSpec, grid: &BaseGrid, ok: &[(SpaceKind, usize)]) -> Result<()> {
    if ok.contains(&(grid.kind(), grid.dim())) {
        Ok(())
    } else {
        Err(Error::BadParams(format!(
            "{} is not defined on a {}-dimensional {}",
            spec.name,
            grid.dim(),
            grid.kind()
        )))
    }
}

/// Angle per axis: `k` on tori, `2πt` on spheres.
fn angles(grid: &BaseGrid, x: usize) -> Vec<f64> {
    let t = grid.coordinates(x);
    match grid.kind() {
        SpaceKind::Torus => t,
        _ => t.iter().map(|s| 2.0 * PI * s).collect(),
    }
}

/// Cube coordinates `[0,1)^d` of a torus point, or the sphere coordinates.
fn cube_coordinates(grid: &BaseGrid, x: usize) -> Vec<f64> {
    match grid.kind() {
        SpaceKind::Torus => grid.coordinates(x).iter().map(|k| k / (2.0 * PI)).collect(),
        _ => grid.coordinates(x),
    }
}

pub fn build(spec: &ModelSpec, grid: &BaseGrid) -> Result<ModelOutput> {
    let policy = NumericPolicy::default();
    match spec.name.as_str() {
        "ssh" => {
            check_params(spec, &["t1", "t2"])?;
            require_base(spec, grid, &[(SpaceKind::Torus, 1), (SpaceKind::Sphere, 1)])?;
            let (t1, t2) = (real(spec, "t1", 0.5)?, real(spec, "t2", 1.0)?);
            if (t1.abs() - t2.abs()).abs() < 1e-6 {
                return Err(Error::BadParams(format!("gap closes at |t1| = |t2| ({t1}, {t2})")));
            }
            let s = pauli();
            let h = (0..grid.len())
                .map(|x| {
                    let k = angles(grid, x)[0];
                    let q = c(t1 + t2 * k.cos(), t2 * k.sin());
                    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), q, q.conj(), c(0.0, 0.0)])
                })
                .collect();
            let chi = vec![s[2].clone(); grid.len()];
            Ok(ModelOutput::System(QuantumSystemField::new(grid.clone(), h, chi, 1)?))
        }
        "dirac_monopole" => {
            check_params(spec, &[])?;
            require_base(spec, grid, &[(SpaceKind::Sphere, 2)])?;
            let s = pauli();
            let h = (0..grid.len())
                .map(|x| {
                    let n = sphere_point(&grid.coordinates(x));
                    &s[0] * c(n[0], 0.0) + &s[1] * c(n[1], 0.0) + &s[2] * c(n[2], 0.0)
                })
                .collect();
            let field = HamiltonianField::new(grid.clone(), h)?;
            Ok(ModelOutput::Bundle(lower_band_bundle(&field, 1, &policy)?))
        }
        "qwz" => {
            check_params(spec, &["M"])?;
            require_base(spec, grid, &[(SpaceKind::Torus, 2)])?;
            let m = real(spec, "M", 1.0)?;
            check_mass(m, &[-2.0, 0.0, 2.0])?;
            let s = pauli();
            let h = (0..grid.len())
                .map(|x| {
                    let d = qwz_vector(&grid.coordinates(x), m);
                    &s[0] * c(d[0], 0.0) + &s[1] * c(d[1], 0.0) + &s[2] * c(d[2], 0.0)
                })
                .collect();
            let field = HamiltonianField::new(grid.clone(), h)?;
            Ok(ModelOutput::Bundle(lower_band_bundle(&field, 1, &policy)?))
        }
        "su2_degree_n" => {
            check_params(spec, &["n", "rank"])?;
            require_base(spec, grid, &[(SpaceKind::Sphere, 3), (SpaceKind::Torus, 3)])?;
            let n = integer(spec, "n", 1.0)?;
            let rank = integer(spec, "rank", 2.0)?;
            if rank < 2 || rank > 64 {
                return Err(Error::BadParams(format!("rank {rank} must be in 2..=64")));
            }
            let rank = rank as usize;
            let phi = (0..grid.len())
                .map(|x| {
                    let q = sphere_point(&cube_coordinates(grid, x));
                    let g = su2_from_quaternion([q[0], q[1], q[2], q[3]]);
                    let gn = matrix_power(&g, n);
                    let mut out = identity(rank);
                    out.view_mut((0, 0), (2, 2)).copy_from(&gn);
                    out
                })
                .collect();
            let frame = vec![identity(rank); grid.len()];
            let b = ChiralBundleData::new(grid.clone(), frame, phi)?;
            Ok(ModelOutput::Bundle(b.with_metadata("href", "none")))
        }
        "dirac4d" => {
            check_params(spec, &["M"])?;
            require_base(spec, grid, &[(SpaceKind::Torus, 4)])?;
            let m = real(spec, "M", 3.0)?;
            check_mass(m, &[-4.0, -2.0, 0.0, 2.0, 4.0])?;
            let gammas = dirac_gammas();
            let h = (0..grid.len())
                .map(|x| {
                    let d = dirac4d_vector(&grid.coordinates(x), m);
                    gammas.iter().zip(d).fold(CMatrix::zeros(4, 4), |acc, (g, v)| acc + g * c(v, 0.0))
                })
                .collect();
            let field = HamiltonianField::new(grid.clone(), h)?;
            Ok(ModelOutput::Bundle(lower_band_bundle(&field, 2, &policy)?))
        }
        "suspended_hopf" => {
            check_params(spec, &[])?;
            require_base(spec, grid, &[(SpaceKind::Sphere, 4), (SpaceKind::Ball5, 5)])?;
            let value = |k: &[f64]| su2_from_quaternion(suspended_hopf_point(k));
            let map = match grid.kind() {
                SpaceKind::Sphere => MeshMap::from_fn(grid.clone(), Support::Full, |x| {
                    value(&sphere_point(&grid.coordinates(x)))
                })?,
                _ => MeshMap::from_fn(grid.clone(), Support::Boundary, |x| {
                    let y: Vec<f64> = grid.coordinates(x).iter().map(|t| 2.0 * t - 1.0).collect();
                    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let k: Vec<f64> = y.iter().map(|v| v / r).collect();
                    value(&k)
                })?,
            };
            Ok(ModelOutput::Map(map))
        }
        "phi_n" => {
            let d = grid.dim();
            let keys: Vec<String> = (1..=d).map(|a| format!("n{a}")).collect();
            let mut allowed: Vec<&str> = keys.iter().map(String::as_str).collect();
            if d == 1 {
                allowed.push("n");
            }
            check_params(spec, &allowed)?;
            if grid.kind() == SpaceKind::Ball5 || (grid.kind() == SpaceKind::Sphere && d != 1) {
                return Err(Error::BadParams("phi_n lives on circles and tori".into()));
            }
            let windings: Vec<i64> = if d == 1 && !spec.params.contains_key("n1") {
                vec![integer(spec, "n", 1.0)?]
            } else {
                keys.iter().map(|k| integer(spec, k, 0.0)).collect::<Result<_>>()?
            };
            let phi = (0..grid.len())
                .map(|x| {
                    let theta: f64 = angles(grid, x).iter().zip(&windings).map(|(a, &n)| a * n as f64).sum();
                    CMatrix::from_element(1, 1, c(theta.cos(), theta.sin()))
                })
                .collect();
            let b = ChiralBundleData::new(grid.clone(), vec![identity(1); grid.len()], phi)?;
            Ok(ModelOutput::Bundle(b.with_metadata("href", "none")))
        }
        "trivial_m" => {
            check_params(spec, &["m", "N"])?;
            if grid.kind() == SpaceKind::Ball5 {
                return Err(Error::BadParams("trivial_m lives on spheres and tori".into()));
            }
            let m = integer(spec, "m", 1.0)?;
            let n = integer(spec, "N", 0.0)?;
            let n = if n == 0 { m } else { n };
            if m < 1 || n < m || n > 64 {
                return Err(Error::BadParams(format!("need 1 <= m <= N <= 64, got m = {m}, N = {n}")));
            }
            let b = ChiralBundleData::trivial(grid.clone(), n as usize, m as usize)?;
            Ok(ModelOutput::Bundle(b.with_metadata("href", "none")))
        }
        "chiral_chern" => {
            check_params(spec, &["a", "b", "M"])?;
            require_base(spec, grid, &[(SpaceKind::Sphere, 2), (SpaceKind::Torus, 2)])?;
            let (a, b) = (real(spec, "a", 2.0)?, real(spec, "b", 1.0)?);
            if a.abs() < 1e-6 || b.abs() < 1e-6 || (a.abs() - b.abs()).abs() < 1e-3 {
                return Err(Error::BadParams(format!("need a, b != 0 and |a| != |b| (a = {a}, b = {b})")));
            }
            let mass = real(spec, "M", 1.0)?;
            if grid.kind() == SpaceKind::Torus {
                check_mass(mass, &[-2.0, 0.0, 2.0])?;
            }
            let s = pauli();
            let chi = kron(&s[2], &identity(2));
            let h = (0..grid.len())
                .map(|x| {
                    let n = match grid.kind() {
                        SpaceKind::Torus => {
                            let d = qwz_vector(&grid.coordinates(x), mass);
                            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                            d.map(|v| v / norm).to_vec()
                        }
                        _ => sphere_point(&grid.coordinates(x)),
                    };
                    let q = identity(2).scale(a)
                        + (&s[0] * c(b * n[0], 0.0))
                        + (&s[1] * c(b * n[1], 0.0))
                        + (&s[2] * c(b * n[2], 0.0));
                    kron(&s[0], &q)
                })
                .collect();
            Ok(ModelOutput::System(QuantumSystemField::new(grid.clone(), h, vec![chi; grid.len()], 1)?))
        }
        other => Err(Error::UnknownModel {
            name: other.to_string(),
            available: list_models().iter().map(|m| m.name.to_string()).collect(),
        }),
    }
}

fn check_mass(m: f64, critical: &[f64]) -> Result<()> {
    match critical.iter().find(|&&c| (m - c).abs() < 0.05) {
        Some(c) => Err(Error::BadParams(format!("gap closes near M = {c} (got {m})"))),
        None => Ok(()),
    }
}

/// `(sin k1, sin k2, M − cos k1 − cos k2)`.
pub fn qwz_vector(k: &[f64], m: f64) -> [f64; 3] {
    [k[0].sin(), k[1].sin(), m - k[0].cos() - k[1].cos()]
}

/// `(sin k1, …, sin k4, M − Σ cos k)`.
pub fn dirac4d_vector(k: &[f64], m: f64) -> [f64; 5] {
    [k[0].sin(), k[1].sin(), k[2].sin(), k[3].sin(), m - k.iter().map(|v| v.cos()).sum::<f64>()]
}

/// `g^n` for unitary `g`, with `g^{−n} = (g†)^n`.
pub fn matrix_power(g: &CMatrix, n: i64) -> CMatrix {
    let base = if n < 0 { g.adjoint() } else { g.clone() };
    (0..n.unsigned_abs()).fold(identity(g.nrows()), |acc, _| acc * &base)
}
