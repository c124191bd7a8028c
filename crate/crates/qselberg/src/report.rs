//! Outcome of a numerical verification.

use serde::{Deserialize, Serialize};

/// Result of checking one identity at one parameter set.
///
/// `N` is the truncation radius of the lattice sums involved (0 when none);
/// `M` counts the sampled items the residual is maximised over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub params_digest: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(rename = "N")]
    pub n_max: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl VerificationReport {
    pub fn new(identity: impl Into<String>, params_digest: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            identity: identity.into(),
            params_digest: params_digest.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            n_max: 0,
            m: 1,
        }
    }

    pub fn with_counts(mut self, n_max: usize, m: usize) -> Self {
        self.n_max = n_max;
        self.m = m;
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// One human-readable line.
    pub fn summary(&self) -> String {
        format!(
            "{} {}: residual {:.3e} (tolerance {:.1e}, N={}, M={})",
            if self.pass { "PASS" } else { "FAIL" },
            self.identity,
            self.residual,
            self.tolerance,
            self.n_max,
            self.m
        )
    }
}
