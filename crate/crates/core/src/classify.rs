//! Exact classification data: homotopy of `U(m)` and of the classifying
//! space, the groups of chiral bundles over spheres and tori, and matching of
//! computed invariant tuples into them.
//!
//! Nothing is computed at runtime. Lookups outside the embedded data fail
//! rather than extrapolate.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::basespace::SpaceKind;
use crate::error::{Error, Result};
use crate::invariants::{Entry, InvariantReport, Z2Entry};

/// A finitely generated abelian group `Z^r ⊕ Z/t₁ ⊕ …` with one label per
/// summand (free summands first).
///
/// Equality compares invariant factors; labels are ignored.
#[derive(Debug, Clone, Serialize)]
pub struct AbelianGroupDescriptor {
    pub free_rank: usize,
    /// Orders ≥ 2, ascending.
    pub torsion: Vec<u64>,
    pub generator_labels: Vec<String>,
}

impl AbelianGroupDescriptor {
    pub fn trivial() -> Self {
        Self { free_rank: 0, torsion: vec![], generator_labels: vec![] }
    }

    pub fn z(label: &str) -> Self {
        Self { free_rank: 1, torsion: vec![], generator_labels: vec![label.to_string()] }
    }

    /// `Z/n`; trivial for `n = 1`.
    pub fn cyclic(n: u64, label: &str) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            Self { free_rank: 0, torsion: vec![n], generator_labels: vec![label.to_string()] }
        }
    }

    /// Direct sum, keeping free summands (and their labels) in front.
    pub fn sum(&self, other: &Self) -> Self {
        let (fa, fb) = (self.free_rank, other.free_rank);
        let mut free_labels: Vec<String> = self.generator_labels[..fa].to_vec();
        free_labels.extend_from_slice(&other.generator_labels[..fb]);
        let mut tors: Vec<(u64, String)> = self
            .torsion
            .iter()
            .copied()
            .zip(self.generator_labels[fa..].iter().cloned())
            .chain(other.torsion.iter().copied().zip(other.generator_labels[fb..].iter().cloned()))
            .collect();
        tors.sort_by_key(|(t, _)| *t);
        let (torsion, tlabels): (Vec<u64>, Vec<String>) = tors.into_iter().unzip();
        free_labels.extend(tlabels);
        Self { free_rank: fa + fb, torsion, generator_labels: free_labels }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Invariant factors `d₁ | d₂ | …` of the torsion part.
    pub fn invariant_factors(&self) -> Vec<u64> {
        // prime powers per prime, then combine largest with largest
        let mut by_prime: Vec<(u64, Vec<u64>)> = Vec::new();
        for &t in &self.torsion {
            let mut n = t;
            let mut p = 2;
            while n > 1 {
                if n % p == 0 {
                    let mut q = 1;
                    while n % p == 0 {
                        n /= p;
                        q *= p;
                    }
                    match by_prime.iter_mut().find(|(pp, _)| *pp == p) {
                        Some((_, v)) => v.push(q),
                        None => by_prime.push((p, vec![q])),
                    }
                }
                p += 1;
            }
        }
        let len = by_prime.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (_, mut powers) in by_prime {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (i, q) in powers.into_iter().enumerate() {
                factors[len - 1 - i] *= q;
            }
        }
        factors
    }
}

impl PartialEq for AbelianGroupDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.free_rank == other.free_rank && self.invariant_factors() == other.invariant_factors()
    }
}

impl Eq for AbelianGroupDescriptor {}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|d| DIGITS[d.to_digit(10).unwrap() as usize]).collect()
}

/// Class part of a label: `w1[12]` → `w1`.
fn label_class(label: &str) -> &str {
    label.split('[').next().unwrap_or(label)
}

impl fmt::Display for AbelianGroupDescriptor {
    /// `Z² ⊕ Z [w1×2, c1]`: consecutive summands of one class and order are
    /// merged.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let orders = std::iter::repeat(0u64).take(self.free_rank).chain(self.torsion.iter().copied());
        let mut runs: Vec<(u64, &str, usize)> = Vec::new();
        for (order, label) in orders.zip(&self.generator_labels) {
            let class = label_class(label);
            match runs.last_mut() {
                Some((o, c, n)) if *o == order && *c == class => *n += 1,
                _ => runs.push((order, class, 1)),
            }
        }
        let groups: Vec<String> = runs
            .iter()
            .map(|&(o, _, n)| {
                let base = if o == 0 { "Z".to_string() } else { format!("Z/{o}") };
                if n == 1 {
                    base
                } else if o == 0 {
                    format!("Z{}", superscript(n))
                } else {
                    format!("({base}){}", superscript(n))
                }
            })
            .collect();
        let labels: Vec<String> = runs
            .iter()
            .map(|&(_, c, n)| if n == 1 { c.to_string() } else { format!("{c}×{n}") })
            .collect();
        write!(f, "{} [{}]", groups.join(" ⊕ "), labels.join(", "))
    }
}

/// Rank of a unitary group; `Infinite` is the stable limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(m) => write!(f, "{m}"),
            Rank::Infinite => write!(f, "∞"),
        }
    }
}

impl FromStr for Rank {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Rank::Infinite),
            _ => match s.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(Rank::Finite(m)),
                _ => Err(Error::Format(format!("rank must be a positive integer or `inf`, got `{s}`"))),
            },
        }
    }
}

/// Unstable `π_k(U(m))` for `2m < k ≤ 10`, `2 ≤ m ≤ 5`, as torsion orders.
/// `U(1)` has no higher homotopy; `m ≥ 6` is stable throughout `k ≤ 10`.
const UNSTABLE: &[(usize, usize, &[u64])] = &[
    (2, 5, &[2]),
    (2, 6, &[12]),
    (2, 7, &[2]),
    (2, 8, &[2]),
    (2, 9, &[3]),
    (2, 10, &[15]),
    (3, 7, &[]),
    (3, 8, &[12]),
    (3, 9, &[3]),
    (3, 10, &[30]),
    (4, 9, &[2]),
    (4, 10, &[2, 120]),
];

/// Highest tabulated degree.
pub const MAX_TABULATED_DEGREE: usize = 10;

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// `π_k(U(m))`.
pub fn pi_unitary(m: Rank, k: usize) -> Result<AbelianGroupDescriptor> {
    let label = format!("π{k}(U({m}))");
    let bott = |k: usize| {
        if k % 2 == 1 {
            AbelianGroupDescriptor::z(&label)
        } else {
            AbelianGroupDescriptor::trivial()
        }
    };
    let m = match m {
        Rank::Infinite => return Ok(bott(k)),
        Rank::Finite(0) => return Err(Error::OutsideTabulatedRange("rank 0".into())),
        Rank::Finite(m) => m,
    };
    if k == 0 {
        return Ok(AbelianGroupDescriptor::trivial());
    }
    if 2 * m > k {
        return Ok(bott(k));
    }
    if k == 2 * m {
        return Ok(AbelianGroupDescriptor::cyclic(factorial(m), &label));
    }
    // U(1) is a circle
    if m == 1 {
        return Ok(AbelianGroupDescriptor::trivial());
    }
    if k > MAX_TABULATED_DEGREE {
        return Err(Error::OutsideTabulatedRange(format!("π{k}(U({m})) with k > {MAX_TABULATED_DEGREE}")));
    }
    let (_, _, orders) = UNSTABLE
        .iter()
        .find(|(mm, kk, _)| *mm == m && *kk == k)
        .expect("every unstable pair with k <= 10 is tabulated");
    Ok(orders
        .iter()
        .fold(AbelianGroupDescriptor::trivial(), |g, &o| g.sum(&AbelianGroupDescriptor::cyclic(o, &label))))
}

/// `π_k` of the classifying space: `π_k(U(m)) ⊕ π_{k−1}(U(m))`.
pub fn pi_classifying(m: Rank, k: usize) -> Result<AbelianGroupDescriptor> {
    if k == 0 {
        return Ok(AbelianGroupDescriptor::trivial());
    }
    Ok(pi_unitary(m, k)?.sum(&pi_unitary(m, k - 1)?))
}

/// Classes of rank-`m` chiral bundles over `S^d` or `T^d`, `1 ≤ d ≤ 4`.
///
/// Labels are ordered `w1, c1, w2, c2, z2`; torus labels carry the cycle axes,
/// e.g. `c1[13]`.
pub fn classify_space(kind: SpaceKind, d: usize, m: usize) -> Result<AbelianGroupDescriptor> {
    if m == 0 || !(1..=4).contains(&d) || kind == SpaceKind::Ball5 {
        return Err(Error::OutsideProvedRange(format!("{kind} of dimension {d} with rank {m}")));
    }
    let mut labels: Vec<String> = Vec::new();
    for (degree, class) in [(1, "w1"), (2, "c1"), (3, "w2"), (4, "c2")] {
        if degree > d || (degree >= 3 && m == 1) {
            continue;
        }
        match kind {
            SpaceKind::Sphere => {
                if degree == d {
                    labels.push(class.to_string());
                }
            }
            _ => {
                for axes in crate::basespace::axis_subsets(d, degree) {
                    let axes: String = axes.iter().map(|a| (a + 1).to_string()).collect();
                    labels.push(format!("{class}[{axes}]"));
                }
            }
        }
    }
    let mut g = AbelianGroupDescriptor { free_rank: labels.len(), torsion: vec![], generator_labels: labels };
    if d == 4 && m == 2 {
        g = g.sum(&AbelianGroupDescriptor::cyclic(2, "z2"));
    }
    Ok(g)
}

/// The integer tuple naming a class, ordered like the descriptor's labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassLabel {
    /// `(label, value)` for every free generator.
    pub values: Vec<(String, i64)>,
    pub z2: Option<i8>,
}

impl fmt::Display for ClassLabel {
    /// `(0, 0, 0; 0, 0, 0; 0)`: classes separated by `;`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut groups: Vec<(String, Vec<String>)> = Vec::new();
        for (label, v) in &self.values {
            let class = label_class(label).to_string();
            match groups.last_mut() {
                Some((c, vals)) if *c == class => vals.push(v.to_string()),
                _ => groups.push((class, vec![v.to_string()])),
            }
        }
        let mut parts: Vec<String> = groups.into_iter().map(|(_, v)| v.join(", ")).collect();
        if let Some(z) = self.z2 {
            parts.push(if z > 0 { "+".into() } else { "-".into() });
        }
        write!(f, "({})", parts.join("; "))
    }
}

/// Read the class of a bundle over `(kind, d)` of rank `m` off a report.
pub fn match_report(report: &InvariantReport, kind: SpaceKind, d: usize, m: usize) -> Result<ClassLabel> {
    let group = classify_space(kind, d, m)?;
    let mut missing = Vec::new();
    let mut values = Vec::new();
    for label in &group.generator_labels[..group.free_rank] {
        let class = label_class(label);
        let cycle = match label.find('[') {
            Some(i) => label[i + 1..label.len() - 1].to_string(),
            None => format!("S{d}"),
        };
        match report.class(class).iter().find(|(l, _)| *l == cycle) {
            Some((_, Entry::Resolved(meas))) => values.push((label.clone(), meas.value)),
            _ => missing.push(label.clone()),
        }
    }
    let z2 = if group.torsion.is_empty() {
        None
    } else {
        match &report.z2 {
            Some(Z2Entry::Resolved(z)) => Some(z.epsilon),
            _ => {
                missing.push("z2".to_string());
                None
            }
        }
    };
    if !missing.is_empty() {
        return Err(Error::IncompleteReport { missing });
    }
    Ok(ClassLabel { values, z2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_matches_documented_forms() {
        assert_eq!(classify_space(SpaceKind::Sphere, 4, 2).unwrap().to_string(), "Z ⊕ Z/2 [c2, z2]");
        assert_eq!(classify_space(SpaceKind::Torus, 2, 5).unwrap().to_string(), "Z² ⊕ Z [w1×2, c1]");
        assert_eq!(classify_space(SpaceKind::Sphere, 1, 1).unwrap().to_string(), "Z [w1]");
        assert_eq!(classify_space(SpaceKind::Sphere, 3, 1).unwrap().to_string(), "0");
    }

    #[test]
    fn equality_uses_invariant_factors() {
        let a = AbelianGroupDescriptor::cyclic(2, "a").sum(&AbelianGroupDescriptor::cyclic(3, "b"));
        assert_eq!(a, AbelianGroupDescriptor::cyclic(6, "c"));
        assert_ne!(a, AbelianGroupDescriptor::cyclic(2, "a").sum(&AbelianGroupDescriptor::cyclic(2, "b")));
        let b = AbelianGroupDescriptor::cyclic(4, "a").sum(&AbelianGroupDescriptor::cyclic(6, "b"));
        assert_eq!(b.invariant_factors(), vec![2, 12]);
    }

    #[test]
    fn unknown_range_is_refused() {
        assert!(matches!(pi_unitary(Rank::Finite(2), 11), Err(Error::OutsideTabulatedRange(_))));
        assert!(matches!(classify_space(SpaceKind::Sphere, 5, 2), Err(Error::OutsideProvedRange(_))));
        // stable and metastable values need no table
        assert_eq!(pi_unitary(Rank::Finite(7), 13).unwrap(), AbelianGroupDescriptor::z("x"));
        assert_eq!(pi_unitary(Rank::Finite(7), 14).unwrap(), AbelianGroupDescriptor::cyclic(5040, "x"));
    }

    #[test]
    fn torus_labels_carry_axes() {
        let g = classify_space(SpaceKind::Torus, 3, 2).unwrap();
        assert_eq!(
            g.generator_labels,
            ["w1[1]", "w1[2]", "w1[3]", "c1[12]", "c1[13]", "c1[23]", "w2[123]"]
        );
    }
}
