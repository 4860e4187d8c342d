//! Experiment configuration: a single JSON document.
//!
//! ```json
//! {
//!   "hazard": {"lambda": 1, "alpha1": 0.6, "alpha2": 0.5, "beta1": 2.5, "beta2": 2.8, "a1": 4, "a2": 8},
//!   "policy": {"rule": "first_imperfect_then_minimal", "delta1": 0.5},
//!   "tau": 10,
//!   "quadrature": {"abs_tol": 1e-8, "max_depth": 60},
//!   "mc": {"reps": 100000, "seed": 42}
//! }
//! ```
//!
//! `quadrature`, `mc` and `deltas` (a degree grid for `table1`/`sweep`) are optional.

use std::path::Path;

use bathtub_repair::{HazardSpecF64, QuadratureConfigF64, RepairDegreeF64, RepairPolicyF64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub reps: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hazard: HazardSpecF64,
    pub policy: RepairPolicyF64,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfigF64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<RepairDegreeF64>>,
}

impl RunConfig {
    /// Configuration of the worked example with the given first-repair degree.
    pub fn paper(delta1: f64) -> Self {
        Self {
            hazard: HazardSpecF64::paper_example(),
            policy: RepairPolicyF64::FirstImperfectThenMinimal {
                delta1: RepairDegreeF64::new(delta1).expect("degree in [0, 1]"),
            },
            tau: 10.0,
            quadrature: None,
            mc: None,
            deltas: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(CliError::Config(format!("tau must be positive, got {}", self.tau)));
        }
        self.quadrature_config().validate()?;
        if let Some(mc) = self.mc {
            if mc.reps == 0 {
                return Err(CliError::Config("mc.reps must be at least 1".into()));
            }
        }
        if matches!(&self.deltas, Some(d) if d.is_empty()) {
            return Err(CliError::Config("deltas must not be empty".into()));
        }
        Ok(())
    }

    pub fn quadrature_config(&self) -> QuadratureConfigF64 {
        self.quadrature.unwrap_or_default()
    }

    /// Whether this is the worked example at τ = 10, for which reference values exist.
    pub fn is_paper_setup(&self) -> bool {
        self.hazard == HazardSpecF64::paper_example() && self.tau == bathtub_repair::analytic::TABLE1_TAU
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER: &str = r#"{
        "hazard": {"lambda": 1, "alpha1": 0.6, "alpha2": 0.5, "beta1": 2.5, "beta2": 2.8, "a1": 4, "a2": 8},
        "policy": {"rule": "first_imperfect_then_minimal", "delta1": 0.5},
        "tau": 10,
        "mc": {"reps": 1000, "seed": 42}
    }"#;

    #[test]
    fn loads_paper_config() {
        let cfg = RunConfig::from_json(PAPER).unwrap();
        assert!(cfg.is_paper_setup());
        assert_eq!(cfg, RunConfig { mc: Some(McConfig { reps: 1000, seed: 42 }), ..RunConfig::paper(0.5) });
    }

    // `10` and `10.0` are the same number once loaded.
    fn as_floats(v: serde_json::Value) -> serde_json::Value {
        use serde_json::Value;
        match v {
            Value::Number(n) => serde_json::json!(n.as_f64().unwrap()),
            Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, as_floats(v))).collect()),
            Value::Array(a) => Value::Array(a.into_iter().map(as_floats).collect()),
            other => other,
        }
    }

    #[test]
    fn round_trip_is_identity_up_to_key_order() {
        let original = as_floats(serde_json::from_str(PAPER).unwrap());
        let cfg = RunConfig::from_json(PAPER).unwrap();
        let again = as_floats(serde_json::from_str(&cfg.to_json()).unwrap());
        assert_eq!(original, again);
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn invalid_configs_are_config_errors() {
        let short = PAPER.replace("\"a2\": 8", "\"a2\": 7");
        let err = RunConfig::from_json(&short).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("a2 - a1 >= a1"), "{err}");

        for bad in [
            PAPER.replace("\"tau\": 10", "\"tau\": -1"),
            PAPER.replace("\"delta1\": 0.5", "\"delta1\": 1.5"),
            PAPER.replace("\"reps\": 1000", "\"reps\": 0"),
            PAPER.replace("\"tau\": 10,", "\"tau\": 10, \"deltas\": [],"),
            PAPER.replace("\"tau\": 10,", "\"tau\": 10, \"unknown\": 1,"),
        ] {
            assert_eq!(RunConfig::from_json(&bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }
}
