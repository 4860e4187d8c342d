use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// z-quantile for a two-sided 99% normal interval.
pub const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// How an estimate was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance<T> {
    Quadrature {
        abs_tol: T,
        max_depth: u32,
        evaluations: usize,
    },
    MonteCarlo {
        reps: u64,
        seed: u64,
        sampler: String,
        /// `None` when fewer than two replications were run.
        std_error: Option<T>,
        ci_low: Option<T>,
        ci_high: Option<T>,
    },
}

/// An estimate of the expected number of failures.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult<T> {
    pub value: T,
    pub method: Method,
    /// Quadrature error estimate, or the 99% half-width for Monte Carlo.
    /// `None` when not applicable (a single replication).
    pub error_bound: Option<T>,
    pub provenance: Provenance<T>,
}

impl<T: Scalar> EstimateResult<T> {
    /// Summarises per-replication failure counts. With one replication the
    /// spread is undefined and the error fields are left empty.
    pub fn from_counts(counts: &[usize], seed: u64, sampler: &str) -> Self {
        let n = counts.len() as f64;
        let sum: f64 = counts.iter().map(|&c| c as f64).sum();
        let mean = sum / n;
        let (std_error, ci_low, ci_high, half) = if counts.len() >= 2 {
            let ss: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum();
            let se = (ss / (n - 1.0) / n).sqrt();
            let half = Z_99 * se;
            (
                Some(T::lit(se)),
                Some(T::lit(mean - half)),
                Some(T::lit(mean + half)),
                Some(T::lit(half)),
            )
        } else {
            (None, None, None, None)
        };
        Self {
            value: T::lit(mean),
            method: Method::MonteCarlo,
            error_bound: half,
            provenance: Provenance::MonteCarlo {
                reps: counts.len() as u64,
                seed,
                sampler: sampler.to_string(),
                std_error,
                ci_low,
                ci_high,
            },
        }
    }

    pub fn std_error(&self) -> Option<T> {
        match &self.provenance {
            Provenance::MonteCarlo { std_error, .. } => *std_error,
            Provenance::Quadrature { .. } => None,
        }
    }

    /// The 99% confidence interval of a Monte Carlo estimate.
    pub fn confidence_interval(&self) -> Option<(T, T)> {
        match &self.provenance {
            Provenance::MonteCarlo {
                ci_low: Some(lo),
                ci_high: Some(hi),
                ..
            } => Some((*lo, *hi)),
            _ => None,
        }
    }
}

/// Flat JSON object. Monte Carlo results carry the keys "mean", "std_error",
/// "ci_low", "ci_high", "reps", "seed" and "method" besides "value" and
/// "error_bound"; quadrature results carry their tolerance settings.
impl<T: Scalar> Serialize for EstimateResult<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let f = |x: T| x.to_f64_lossy();
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("value", &f(self.value))?;
        map.serialize_entry("method", self.method.as_str())?;
        map.serialize_entry("error_bound", &self.error_bound.map(f))?;
        match &self.provenance {
            Provenance::Quadrature {
                abs_tol,
                max_depth,
                evaluations,
            } => {
                map.serialize_entry("abs_tol", &f(*abs_tol))?;
                map.serialize_entry("max_depth", max_depth)?;
                map.serialize_entry("evaluations", evaluations)?;
            }
            Provenance::MonteCarlo {
                reps,
                seed,
                sampler,
                std_error,
                ci_low,
                ci_high,
            } => {
                map.serialize_entry("mean", &f(self.value))?;
                map.serialize_entry("std_error", &std_error.map(f))?;
                map.serialize_entry("ci_low", &ci_low.map(f))?;
                map.serialize_entry("ci_high", &ci_high.map(f))?;
                map.serialize_entry("reps", reps)?;
                map.serialize_entry("seed", seed)?;
                map.serialize_entry("sampler", sampler)?;
            }
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_counts() {
        let est: EstimateResult<f64> = EstimateResult::from_counts(&[1, 2, 3, 4], 9, "inversion");
        assert_eq!(est.value, 2.5);
        // sample variance 5/3 over 4 replications
        let se = (5.0f64 / 3.0 / 4.0).sqrt();
        assert!((est.std_error().unwrap() - se).abs() < 1e-15);
        let (lo, hi) = est.confidence_interval().unwrap();
        assert!((hi - lo - 2.0 * Z_99 * est.std_error().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn single_replication_has_no_interval() {
        let est: EstimateResult<f64> = EstimateResult::from_counts(&[7], 1, "thinning");
        assert_eq!(est.value, 7.0);
        assert!(est.error_bound.is_none());
        let json = serde_json::to_value(&est).unwrap();
        assert!(json["error_bound"].is_null());
        assert!(json["ci_low"].is_null());
        assert_eq!(json["reps"], 1);
    }

    #[test]
    fn json_keys() {
        let est: EstimateResult<f64> = EstimateResult::from_counts(&[3, 5], 42, "inversion");
        let json = serde_json::to_value(&est).unwrap();
        for key in ["mean", "std_error", "ci_low", "ci_high", "reps", "seed", "method"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["method"], "monte_carlo");
        assert_eq!(json["seed"], 42);
    }
}
