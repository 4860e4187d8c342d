//! Expected number of failures under the single-imperfect-repair strategy.
//!
//! The first failure, if it occurs at `t1 <= a1`, is repaired with degree δ1,
//! which moves the age to `t1 + δ1 (a1 - t1)`; every other repair is minimal
//! and the age is reset to `a1` at calendar time `a1`. Conditioning on `t1`:
//!
//! ```text
//! E[N(τ)] = ∫₀^a1 [1 + ∫_t1^a1 λ0(s + δ1 (a1 - t1)) ds] f1(t1) dt1 + ∫_a1^τ λ0(s) ds
//! ```
//!
//! The inner integral is a difference of closed-form cumulative intensities;
//! the outer one is computed by adaptive Simpson quadrature.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{EstimateResult, Method, Provenance};
use crate::hazard::HazardSpec;
use crate::quadrature::{integrate_pieces, QuadratureConfig};
use crate::repair::RepairDegree;
use crate::scalar::Scalar;

/// Roundoff allowance added to the quadrature error estimate for the
/// closed-form inner integral.
pub const INNER_ROUNDOFF: f64 = 1e-12;

/// Published reference values of E[N(10)] for the example hazard, as
/// `(δ1, value, tolerance)`. The tolerance is half a unit in the last printed digit.
pub const TABLE1: [(f64, f64, f64); 11] = [
    (0.0, 33.78, 0.005),
    (0.1, 27.3, 0.05),
    (0.2, 22.4, 0.05),
    (0.3, 18.81, 0.005),
    (0.4, 16.29, 0.005),
    (0.5, 14.64, 0.005),
    (0.6, 13.63, 0.005),
    (0.7, 13.09, 0.005),
    (0.8, 12.86, 0.005),
    (0.9, 12.79, 0.005),
    (1.0, 12.78, 0.005),
];

/// Horizon at which [`TABLE1`] was computed.
pub const TABLE1_TAU: f64 = 10.0;

/// Reference value and tolerance for `delta` if it is one of the tabulated degrees.
pub fn table1_reference(delta: f64) -> Option<(f64, f64)> {
    TABLE1
        .iter()
        .find(|(d, _, _)| (*d - delta).abs() < 1e-9)
        .map(|&(_, v, tol)| (v, tol))
}

/// Density of the time to first failure, λ0(t) exp(−Λ0(t)).
pub fn first_failure_density<T: Scalar>(spec: &HazardSpec<T>, t: T) -> Result<T> {
    let rate = spec.evaluate(t)?;
    Ok(rate * (-spec.cumulative_unchecked(t)).exp())
}

/// `∫_t1^a1 λ0(s + shift) ds` with `shift = δ1 (a1 - t1)`.
pub(crate) fn inner_expected_failures<T: Scalar>(spec: &HazardSpec<T>, t1: T, delta1: T) -> T {
    let a1 = spec.a1();
    let shift = delta1 * (a1 - t1);
    debug_assert!(
        spec.params().allow_short_useful_life || !spec.has_ifr_phase() || a1 + shift <= spec.a2(),
        "shifted age {} leaves the useful life (a2 = {})",
        a1 + shift,
        spec.a2()
    );
    spec.cumulative_span(t1 + shift, a1 + shift)
}

/// E[N(τ)] when the first repair in `(0, a1]` has degree `delta1` and all
/// others are minimal.
pub fn expected_failures_strategy<T: Scalar>(
    spec: &HazardSpec<T>,
    delta1: RepairDegree<T>,
    tau: T,
    cfg: &QuadratureConfig<T>,
) -> Result<EstimateResult<T>> {
    cfg.validate()?;
    let a1 = spec.a1();
    if !(tau.is_finite() && tau > a1) {
        return Err(Error::InvalidArgument(format!(
            "horizon must exceed the first change point: tau = {tau}, a1 = {a1}"
        )));
    }
    let d = delta1.value();
    let integrand = |t1: T| {
        (T::one() + inner_expected_failures(spec, t1, d)) * spec.rate(t1) * (-spec.cumulative_unchecked(t1)).exp()
    };
    let (outer, error, evaluations) = if a1 > T::zero() {
        // f1 is steepest near 0; split there so the tolerance is not spent globally
        let breaks = [0.0, 0.125, 0.25, 0.5, 1.0].map(|f| T::lit(f) * a1);
        let r = integrate_pieces(integrand, &breaks, cfg)?;
        (r.value, r.error_estimate, r.evaluations)
    } else {
        (T::zero(), T::zero(), 0)
    };
    let tail = spec.cumulative_span(a1, tau);
    Ok(EstimateResult {
        value: outer + tail,
        method: Method::Quadrature,
        error_bound: Some(error + T::lit(INNER_ROUNDOFF)),
        provenance: Provenance::Quadrature {
            abs_tol: cfg.abs_tol,
            max_depth: cfg.max_depth,
            evaluations,
        },
    })
}

/// [`expected_failures_strategy`] for each degree, in input order.
pub fn sweep_expected_failures<T: Scalar>(
    spec: &HazardSpec<T>,
    deltas: &[RepairDegree<T>],
    tau: T,
    cfg: &QuadratureConfig<T>,
) -> Result<Vec<(RepairDegree<T>, EstimateResult<T>)>> {
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("degree grid is empty".into()));
    }
    deltas
        .par_iter()
        .map(|&d| expected_failures_strategy(spec, d, tau, cfg).map(|r| (d, r)))
        .collect()
}

/// `n` equally spaced degrees from 0 to 1 inclusive.
pub fn uniform_degree_grid<T: Scalar>(n: usize) -> Result<Vec<RepairDegree<T>>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a degree grid needs at least two points, got {n}"
        )));
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| RepairDegree::new(T::lit(i as f64 / last)))
        .collect()
}
