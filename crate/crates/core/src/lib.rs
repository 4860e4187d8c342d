//! Virtual-age imperfect repair model for systems with bathtub-shaped
//! failure rates.
//!
//! A repair of degree δ ∈ [0, 1] moves the system's virtual age a fraction δ
//! of the way toward the first change point `a1`, where the failure rate is
//! lowest. The crate provides the baseline intensity ([`hazard`]), the
//! virtual-age state machine ([`repair`]), exact samplers and Monte Carlo
//! estimators ([`simulate`]), and the quadrature evaluation of the expected
//! number of failures under a single imperfect repair ([`analytic`]).
//!
//! Everything is generic over the floating-point [`Scalar`]; `f64` and `f32`
//! aliases are provided below.

pub mod analytic;
pub mod error;
pub mod estimate;
pub mod export;
pub mod hazard;
pub mod quadrature;
pub mod repair;
pub mod rng;
pub mod scalar;
pub mod simulate;

pub use analytic::{expected_failures_strategy, first_failure_density, sweep_expected_failures};
pub use error::{Error, Result};
pub use estimate::{EstimateResult, Method, Provenance};
pub use hazard::{HazardParams, HazardShape, HazardSpec};
pub use quadrature::QuadratureConfig;
pub use repair::{virtual_age_curve, RepairDegree, RepairEvent, VirtualAgeState};
pub use rng::RngStream;
pub use scalar::Scalar;
pub use simulate::{
    estimate_expected_failures_mc, sample_first_failure, simulate_nhpp, simulate_renewal,
    simulate_trajectory, FailureEvent, Process, RepairPolicy, Sampler, Trajectory,
};

pub type HazardSpecF64 = HazardSpec<f64>;
pub type HazardSpecF32 = HazardSpec<f32>;
pub type HazardParamsF64 = HazardParams<f64>;
pub type RepairDegreeF64 = RepairDegree<f64>;
pub type RepairDegreeF32 = RepairDegree<f32>;
pub type RepairEventF64 = RepairEvent<f64>;
pub type VirtualAgeStateF64 = VirtualAgeState<f64>;
pub type VirtualAgeStateF32 = VirtualAgeState<f32>;
pub type RepairPolicyF64 = RepairPolicy<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type QuadratureConfigF64 = QuadratureConfig<f64>;
pub type EstimateResultF64 = EstimateResult<f64>;
