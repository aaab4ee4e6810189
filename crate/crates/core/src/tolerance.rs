//! Numerical tolerance profile.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds used across the crate. All are absolute unless the field says
/// otherwise; every one can be overridden by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative to `max|M|`.
    pub hermiticity: f64,
    pub idempotency: f64,
    pub psd: f64,
    pub trace: f64,
    pub norm: f64,
    pub eig: f64,
    /// Relative to the largest singular value.
    pub rank: f64,
    /// Eigenvalues closer than this form one measurement outcome.
    pub cluster: f64,
    /// Relative to the largest Gram eigenvalue.
    pub gram: f64,
    pub violation: f64,
    /// Mean-squared residual separating frame functions from non-frame samples.
    pub gleason: f64,
    pub ray_identification: f64,
    pub orthogonality: f64,
    pub commutation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            idempotency: 1e-10,
            psd: 1e-9,
            trace: 1e-10,
            norm: 1e-10,
            eig: 1e-10,
            rank: 1e-10,
            cluster: 1e-8,
            gram: 1e-10,
            violation: 1e-9,
            gleason: 1e-6,
            ray_identification: 1e-9,
            orthogonality: 1e-9,
            commutation: 1e-9,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 14] = [
        "hermiticity",
        "idempotency",
        "psd",
        "trace",
        "norm",
        "eig",
        "rank",
        "cluster",
        "gram",
        "violation",
        "gleason",
        "ray_identification",
        "orthogonality",
        "commutation",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "hermiticity" => &mut self.hermiticity,
            "idempotency" => &mut self.idempotency,
            "psd" => &mut self.psd,
            "trace" => &mut self.trace,
            "norm" => &mut self.norm,
            "eig" => &mut self.eig,
            "rank" => &mut self.rank,
            "cluster" => &mut self.cluster,
            "gram" => &mut self.gram,
            "violation" => &mut self.violation,
            "gleason" => &mut self.gleason,
            "ray_identification" => &mut self.ray_identification,
            "orthogonality" => &mut self.orthogonality,
            "commutation" => &mut self.commutation,
            _ => return None,
        })
    }

    /// Override one tolerance by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::PreconditionFailed(format!(
                "tolerance `{name}` must be a finite non-negative number"
            )));
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::UnknownTolerance(name.to_string()))?;
        *slot = value;
        Ok(())
    }

    /// Parse a `KEY=VAL` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, val) = spec
            .split_once('=')
            .ok_or_else(|| Error::PreconditionFailed(format!("expected KEY=VAL, got `{spec}`")))?;
        let value: f64 = val
            .trim()
            .parse()
            .map_err(|_| Error::PreconditionFailed(format!("bad tolerance value `{val}`")))?;
        self.set(key.trim(), value)
    }

    pub fn as_map(&self) -> BTreeMap<&'static str, f64> {
        let mut copy = *self;
        Self::NAMES
            .iter()
            .map(|n| (*n, *copy.slot(n).unwrap()))
            .collect()
    }
}
