//! Central numerical tolerances.
//!
//! Every threshold used by the library is collected here so that reports can
//! state exactly which values a run used. `Tolerances::scaled` applies a
//! global multiplier (the CLI wires it to the `KREIN_WEYL_TOL` environment
//! variable and records the effective values in every report header).

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Rank cutoff relative to the largest singular value.
    pub rank: f64,
    /// Span-equality threshold on principal angles.
    pub span: f64,
    /// Acceptance threshold for colligation identities.
    pub colligation: f64,
    /// Residual below which a least-squares Weyl solve counts as an operator.
    pub weyl: f64,
    /// Zero band (relative to spectral norm) for eigenvalue sign counting.
    pub eigen_band: f64,
    /// Negative-eigenvalue band for kernel Gram matrices.
    pub gram_band: f64,
    /// Condition-number cap for bounded invertibility.
    pub cond_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-10,
            span: 1e-8,
            colligation: 1e-9,
            weyl: 1e-8,
            eigen_band: 1e-10,
            gram_band: 1e-9,
            cond_cap: 1e12,
        }
    }
}

impl Tolerances {
    /// Multiplies every residual-style tolerance by `scale` (the condition
    /// cap is divided). `scale = 1.0` reproduces the defaults.
    pub fn scaled(scale: f64) -> Self {
        let d = Tolerances::default();
        Tolerances {
            rank: d.rank * scale,
            span: d.span * scale,
            colligation: d.colligation * scale,
            weyl: d.weyl * scale,
            eigen_band: d.eigen_band * scale,
            gram_band: d.gram_band * scale,
            cond_cap: d.cond_cap / scale.max(f64::MIN_POSITIVE),
        }
    }
}
