use serde_json::{json, Map, Value};

use crate::basespace::{enumerate_cycles_at, GridDescriptor};
use crate::chiralbundle::ChiralBundleData;
use crate::error::{Error, FailureClass, Result};
use crate::policy::NumericPolicy;

use super::{chern1, chern2, w1, w2, Framing, Measurement, Z2Result};

/// Outcome for one cycle.
#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Resolved(Measurement),
    /// The lattice sum could not be trusted; never silently rounded.
    Unresolved { reason: String, raw: Option<f64>, residual: Option<f64> },
}

impl Entry {
    pub fn value(&self) -> Option<i64> {
        match self {
            Entry::Resolved(m) => Some(m.value),
            Entry::Unresolved { .. } => None,
        }
    }

    fn from_result(r: Result<Measurement>) -> Result<Self> {
        match r {
            Ok(m) => Ok(Entry::Resolved(m)),
            Err(e) if e.class() == FailureClass::Unresolved => {
                let (raw, residual) = match &e {
                    Error::Unresolved { raw, residual, .. } => (Some(*raw), Some(*residual)),
                    _ => (None, None),
                };
                Ok(Entry::Unresolved { reason: e.to_string(), raw, residual })
            }
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Z2Entry {
    Resolved(Z2Result),
    Unresolved(String),
}

/// Which classes to compute and how.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportOptions {
    pub framing: Framing,
    /// Cycle degrees to evaluate; all available degrees when `None`.
    pub degrees: Option<Vec<usize>>,
    /// Transverse offset of torus cycle representatives.
    pub offset: Option<Vec<usize>>,
}

/// The characteristic-class tuple of one bundle, one entry per cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub grid: GridDescriptor,
    pub ambient_dim: usize,
    pub rank: usize,
    pub href: Option<String>,
    pub framing: String,
    pub policy: NumericPolicy,
    pub w1: Vec<(String, Entry)>,
    pub c1: Vec<(String, Entry)>,
    pub w2: Vec<(String, Entry)>,
    pub c2: Vec<(String, Entry)>,
    pub z2: Option<Z2Entry>,
}

pub const CLASS_NAMES: [&str; 4] = ["w1", "c1", "w2", "c2"];

impl InvariantReport {
    pub fn class(&self, name: &str) -> &[(String, Entry)] {
        match name {
            "w1" => &self.w1,
            "c1" => &self.c1,
            "w2" => &self.w2,
            "c2" => &self.c2,
            _ => &[],
        }
    }

    /// Resolved integers of a class, `None` where unresolved.
    pub fn values(&self, name: &str) -> Vec<Option<i64>> {
        self.class(name).iter().map(|(_, e)| e.value()).collect()
    }

    pub fn has_unresolved(&self) -> bool {
        CLASS_NAMES
            .iter()
            .flat_map(|n| self.class(n))
            .any(|(_, e)| matches!(e, Entry::Unresolved { .. }))
            || matches!(self.z2, Some(Z2Entry::Unresolved(_)))
    }

    /// JSON form with lexicographically sorted keys.
    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        let mut cycles = Map::new();
        let mut raw = Map::new();
        let mut residuals = Map::new();
        let mut unresolved = Map::new();
        for name in CLASS_NAMES {
            let entries = self.class(name);
            root.insert(
                name.into(),
                entries
                    .iter()
                    .map(|(_, e)| match e {
                        Entry::Resolved(m) => json!(m.value),
                        Entry::Unresolved { .. } => json!("Unresolved"),
                    })
                    .collect(),
            );
            cycles.insert(name.into(), entries.iter().map(|(l, _)| json!(l)).collect());
            raw.insert(
                name.into(),
                entries
                    .iter()
                    .map(|(_, e)| match e {
                        Entry::Resolved(m) => json!(m.raw),
                        Entry::Unresolved { raw, .. } => json!(raw),
                    })
                    .collect(),
            );
            residuals.insert(
                name.into(),
                entries
                    .iter()
                    .map(|(_, e)| match e {
                        Entry::Resolved(m) => json!(m.residual),
                        Entry::Unresolved { residual, .. } => json!(residual),
                    })
                    .collect(),
            );
            for (label, e) in entries {
                if let Entry::Unresolved { reason, .. } = e {
                    unresolved.insert(format!("{name}[{label}]"), json!(reason));
                }
            }
        }
        let z2 = match &self.z2 {
            None => Value::Null,
            Some(Z2Entry::Resolved(z)) => {
                root.insert("cs5".into(), json!(z.cs5));
                json!(z.epsilon)
            }
            Some(Z2Entry::Unresolved(reason)) => {
                unresolved.insert("z2".into(), json!(reason));
                json!("Unresolved")
            }
        };
        root.insert("z2".into(), z2);
        root.insert("cycles".into(), Value::Object(cycles));
        root.insert("raw".into(), Value::Object(raw));
        root.insert("residuals".into(), Value::Object(residuals));
        root.insert("unresolved".into(), Value::Object(unresolved));
        root.insert("grid".into(), serde_json::to_value(&self.grid).expect("grid serializes"));
        root.insert("ambient_dim".into(), json!(self.ambient_dim));
        root.insert("rank".into(), json!(self.rank));
        root.insert("href".into(), json!(self.href));
        root.insert("framing".into(), json!(self.framing));
        root.insert("policy".into(), serde_json::to_value(self.policy).expect("policy serializes"));
        root.insert("version".into(), json!(1));
        // serde_json maps are ordered by key, so this is canonical
        Value::Object(root)
    }
}

/// Evaluate every requested class on every cycle representative.
pub fn compute_report(
    b: &ChiralBundleData,
    options: &ReportOptions,
    policy: &NumericPolicy,
) -> Result<InvariantReport> {
    let grid = &b.grid;
    let offset = options.offset.clone().unwrap_or_else(|| vec![0; grid.dim()]);
    let mut report = InvariantReport {
        grid: grid.descriptor(),
        ambient_dim: b.ambient_dim,
        rank: b.rank,
        href: b.metadata.get("href").cloned(),
        framing: options.framing.label().to_string(),
        policy: *policy,
        w1: vec![],
        c1: vec![],
        w2: vec![],
        c2: vec![],
        z2: None,
    };
    for degree in 1..=grid.dim().min(4) {
        if let Some(sel) = &options.degrees {
            if !sel.contains(&degree) {
                continue;
            }
        }
        for cycle in enumerate_cycles_at(grid, degree, &offset)? {
            let result = match degree {
                1 => w1(b, &cycle, policy),
                2 => chern1(b, &cycle, policy),
                3 => w2(b, &cycle, &options.framing, policy),
                _ => chern2(b, &cycle, policy),
            };
            let entry = (cycle.label(), Entry::from_result(result)?);
            match degree {
                1 => report.w1.push(entry),
                2 => report.c1.push(entry),
                3 => report.w2.push(entry),
                _ => report.c2.push(entry),
            }
        }
    }
    Ok(report)
}
