//! Numerical tolerances used across the crate.
//!
//! Every threshold lives in [`NumericPolicy`]; nothing downstream hard-codes a
//! tolerance. Reports echo the effective policy so a result can always be
//! traced back to the thresholds that produced it.
//!
//! | key               | default | used by                                         |
//! |-------------------|---------|-------------------------------------------------|
//! | `tol_eig`         | 1e-10   | eigen-residual checks                           |
//! | `tol_herm`        | 1e-10   | hermiticity admission (relative)                |
//! | `tol_unitary`     | 1e-9    | unitarity / orthonormality checks               |
//! | `sigma_min`       | 1e-8    | polar decomposition singular-value floor        |
//! | `det_min`         | 1e-8    | determinant-phase floor                         |
//! | `angle_margin`    | 1e-3    | distance of log eigenphases from the cut at ±π  |
//! | `tol_collapse`    | 1e-9    | constancy of sphere fields on the cube boundary |
//! | `overlap_min`     | 0.1     | link admissibility (frame overlaps)             |
//! | `tol_proj`        | 1e-8    | projector idempotency                           |
//! | `tol_chiral`      | 1e-9    | chiral symmetry residual                        |
//! | `gap_min`         | 1e-6    | smallest admissible \|E\| at zero energy        |
//! | `gap_margin`      | 1e-3    | contour distance from the spectrum              |
//! | `branch_margin`   | 0.1     | plaquette / step phases must stay below π − m   |
//! | `round_tol_w1`    | 0.05    | integer residual for w1                         |
//! | `round_tol_c1`    | 1e-6    | integer residual for c1                         |
//! | `round_tol_high`  | 0.2     | integer residual for w2 and c2                  |
//! | `z2_tol`          | 0.1     | CS5 distance from a half-integer               |
//! | `tol_frame_match` | 1e-9    | frame equality in automorphism composition      |
//! | `smoothing_iters` | 10      | framing smoothing passes                        |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericPolicy {
    pub tol_eig: f64,
    pub tol_herm: f64,
    pub tol_unitary: f64,
    pub sigma_min: f64,
    pub det_min: f64,
    pub angle_margin: f64,
    pub tol_collapse: f64,
    pub overlap_min: f64,
    pub tol_proj: f64,
    pub tol_chiral: f64,
    pub gap_min: f64,
    pub gap_margin: f64,
    pub branch_margin: f64,
    pub round_tol_w1: f64,
    pub round_tol_c1: f64,
    pub round_tol_high: f64,
    pub z2_tol: f64,
    pub tol_frame_match: f64,
    pub smoothing_iters: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            tol_eig: 1e-10,
            tol_herm: 1e-10,
            tol_unitary: 1e-9,
            sigma_min: 1e-8,
            det_min: 1e-8,
            angle_margin: 1e-3,
            tol_collapse: 1e-9,
            overlap_min: 0.1,
            tol_proj: 1e-8,
            tol_chiral: 1e-9,
            gap_min: 1e-6,
            gap_margin: 1e-3,
            branch_margin: 0.1,
            round_tol_w1: 0.05,
            round_tol_c1: 1e-6,
            round_tol_high: 0.2,
            z2_tol: 0.1,
            tol_frame_match: 1e-9,
            smoothing_iters: 10,
        }
    }
}

impl NumericPolicy {
    /// Names accepted by [`NumericPolicy::set`].
    pub const KEYS: [&'static str; 19] = [
        "tol_eig",
        "tol_herm",
        "tol_unitary",
        "sigma_min",
        "det_min",
        "angle_margin",
        "tol_collapse",
        "overlap_min",
        "tol_proj",
        "tol_chiral",
        "gap_min",
        "gap_margin",
        "branch_margin",
        "round_tol_w1",
        "round_tol_c1",
        "round_tol_high",
        "z2_tol",
        "tol_frame_match",
        "smoothing_iters",
    ];

    /// Override a single entry by name. Unknown keys and out-of-range values
    /// are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let bad = |why: &str| Error::BadPolicy(format!("{key}={value}: {why}"));
        if !value.is_finite() {
            return Err(bad("not finite"));
        }
        if key == "smoothing_iters" {
            if value < 0.0 || value.fract() != 0.0 || value > 1000.0 {
                return Err(bad("expected an integer in 0..=1000"));
            }
            self.smoothing_iters = value as usize;
            return Ok(());
        }
        if value <= 0.0 {
            return Err(bad("must be positive"));
        }
        let slot = match key {
            "tol_eig" => &mut self.tol_eig,
            "tol_herm" => &mut self.tol_herm,
            "tol_unitary" => &mut self.tol_unitary,
            "sigma_min" => &mut self.sigma_min,
            "det_min" => &mut self.det_min,
            "angle_margin" => &mut self.angle_margin,
            "tol_collapse" => &mut self.tol_collapse,
            "overlap_min" => &mut self.overlap_min,
            "tol_proj" => &mut self.tol_proj,
            "tol_chiral" => &mut self.tol_chiral,
            "gap_min" => &mut self.gap_min,
            "gap_margin" => &mut self.gap_margin,
            "branch_margin" => &mut self.branch_margin,
            "round_tol_w1" => &mut self.round_tol_w1,
            "round_tol_c1" => &mut self.round_tol_c1,
            "round_tol_high" => &mut self.round_tol_high,
            "z2_tol" => &mut self.z2_tol,
            "tol_frame_match" => &mut self.tol_frame_match,
            _ => return Err(Error::BadPolicy(format!("unknown policy key `{key}`"))),
        };
        let upper = match key {
            "angle_margin" | "branch_margin" => 1.0,
            "overlap_min" | "round_tol_w1" | "round_tol_c1" | "round_tol_high" => 0.5,
            "z2_tol" => 0.25,
            _ => 1.0,
        };
        if value >= upper {
            return Err(bad(&format!("must be below {upper}")));
        }
        *slot = value;
        Ok(())
    }

    /// Parse a `key=value,key=value` override list on top of `self`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::BadPolicy(format!("expected key=value, got `{item}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::BadPolicy(format!("`{v}` is not a number")))?;
            self.set(k.trim(), v)?;
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_and_validate() {
        let p = NumericPolicy::default()
            .with_overrides("overlap_min=0.2, smoothing_iters=3")
            .unwrap();
        assert_eq!(p.overlap_min, 0.2);
        assert_eq!(p.smoothing_iters, 3);
        assert!(NumericPolicy::default().with_overrides("bogus=1").is_err());
        assert!(NumericPolicy::default().with_overrides("overlap_min=-1").is_err());
        assert!(NumericPolicy::default().with_overrides("overlap_min").is_err());
    }

    #[test]
    fn every_key_is_settable() {
        for key in NumericPolicy::KEYS {
            let mut p = NumericPolicy::default();
            let v = if key == "smoothing_iters" { 2.0 } else { 0.01 };
            p.set(key, v).unwrap();
        }
    }
}
