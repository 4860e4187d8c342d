//! Sample paths of the failure process and Monte Carlo estimates of E[N(τ)].
//!
//! Three processes are supported:
//!
//! * the repairable system, whose intensity is λ0(A(t)) with the virtual age
//!   `A` driven by a [`RepairPolicy`];
//! * the minimal-repair process (an NHPP with intensity λ0(t));
//! * the replacement process (a renewal process with lifetimes distributed as T1).
//!
//! Failures exactly at the horizon are not counted: the observation window is `[0, τ)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::EstimateResult;
use crate::hazard::HazardSpec;
use crate::repair::{RepairDegree, RepairEvent, VirtualAgeState};
use crate::rng::{unit_exponential, RngStream};
use crate::scalar::Scalar;

/// Rule assigning a repair degree to each failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub enum RepairPolicy<T> {
    /// Every failure is repaired with the same degree.
    ConstantDegree { delta: RepairDegree<T> },
    /// The first failure gets `delta1` if it occurs in `(0, a1]`; all other
    /// repairs are minimal.
    FirstImperfectThenMinimal { delta1: RepairDegree<T> },
    /// The i-th failure gets `deltas[i - 1]`; failures beyond the list are
    /// repaired minimally.
    DegreeSequence { deltas: Vec<RepairDegree<T>> },
}

impl<T: Scalar> RepairPolicy<T> {
    /// Degree of the `index`-th failure (1-based) occurring at calendar time `time`.
    pub fn degree_for(&self, index: usize, time: T, a1: T) -> RepairDegree<T> {
        match self {
            RepairPolicy::ConstantDegree { delta } => *delta,
            RepairPolicy::FirstImperfectThenMinimal { delta1 } => {
                if index == 1 && time <= a1 {
                    *delta1
                } else {
                    RepairDegree::minimal()
                }
            }
            RepairPolicy::DegreeSequence { deltas } => index
                .checked_sub(1)
                .and_then(|i| deltas.get(i))
                .copied()
                .unwrap_or_else(RepairDegree::minimal),
        }
    }

    /// Whether every repair under this policy is minimal.
    pub fn is_all_minimal(&self) -> bool {
        let zero = T::zero();
        match self {
            RepairPolicy::ConstantDegree { delta } => delta.value() == zero,
            RepairPolicy::FirstImperfectThenMinimal { delta1 } => delta1.value() == zero,
            RepairPolicy::DegreeSequence { deltas } => deltas.iter().all(|d| d.value() == zero),
        }
    }
}

/// Exact samplers for the repairable process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Invert the cumulative intensity along the virtual-age path.
    #[default]
    Inversion,
    /// Rejection sampling against a per-segment constant majorant.
    Thinning,
}

impl Sampler {
    pub fn as_str(self) -> &'static str {
        match self {
            Sampler::Inversion => "inversion",
            Sampler::Thinning => "thinning",
        }
    }
}

/// What happened at a failure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailureEvent<T> {
    Repaired(RepairEvent<T>),
    /// The system was replaced by a new one; `age_before` is its lifetime.
    Replaced { time: T, age_before: T },
}

impl<T: Scalar> FailureEvent<T> {
    pub fn time(&self) -> T {
        match self {
            FailureEvent::Repaired(e) => e.time,
            FailureEvent::Replaced { time, .. } => *time,
        }
    }

    pub fn degree(&self) -> Option<RepairDegree<T>> {
        match self {
            FailureEvent::Repaired(e) => Some(e.degree),
            FailureEvent::Replaced { .. } => None,
        }
    }

    pub fn age_after(&self) -> T {
        match self {
            FailureEvent::Repaired(e) => e.age_after,
            FailureEvent::Replaced { .. } => T::zero(),
        }
    }
}

/// One realisation of the failure process on `[0, horizon)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub failure_times: Vec<T>,
    pub events: Vec<FailureEvent<T>>,
    pub horizon: T,
    pub stream: RngStream,
}

impl<T: Scalar> Trajectory<T> {
    pub fn count(&self) -> usize {
        self.failure_times.len()
    }

    fn from_events(events: Vec<FailureEvent<T>>, horizon: T, stream: RngStream) -> Self {
        Self {
            failure_times: events.iter().map(FailureEvent::time).collect(),
            events,
            horizon,
            stream,
        }
    }
}

/// A failure process that can be simulated.
#[derive(Debug, Clone, PartialEq)]
pub enum Process<T> {
    Repairable {
        policy: RepairPolicy<T>,
        sampler: Sampler,
    },
    MinimalRepair,
    Replacement,
}

impl<T: Scalar> Process<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Process::Repairable { sampler, .. } => sampler.as_str(),
            Process::MinimalRepair => "nhpp",
            Process::Replacement => "renewal",
        }
    }

    pub fn simulate(&self, spec: &HazardSpec<T>, horizon: T, stream: RngStream) -> Result<Trajectory<T>> {
        match self {
            Process::Repairable { policy, sampler } => {
                simulate_trajectory(spec, policy, horizon, stream, *sampler)
            }
            Process::MinimalRepair => simulate_nhpp(spec, horizon, stream),
            Process::Replacement => simulate_renewal(spec, horizon, stream),
        }
    }
}

fn check_horizon<T: Scalar>(horizon: T) -> Result<()> {
    if horizon.is_finite() && horizon > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "horizon must be positive and finite, got {horizon}"
        )))
    }
}

/// T1 = Λ0⁻¹(e) for a unit-exponential draw `e`.
pub fn first_failure_from_exponential<T: Scalar>(spec: &HazardSpec<T>, e: T) -> Result<T> {
    spec.inverse_cumulative(e)
}

/// Draws the time to first failure of a new system.
pub fn sample_first_failure<T: Scalar>(spec: &HazardSpec<T>, stream: RngStream) -> T {
    draw_first_failure(spec, &mut stream.rng())
}

fn draw_first_failure<T: Scalar, R: Rng + ?Sized>(spec: &HazardSpec<T>, rng: &mut R) -> T {
    spec.inverse_unchecked(T::lit(unit_exponential(rng)))
}

/// Simulates the repairable process up to `horizon` with the given sampler.
pub fn simulate_trajectory<T: Scalar>(
    spec: &HazardSpec<T>,
    policy: &RepairPolicy<T>,
    horizon: T,
    stream: RngStream,
    sampler: Sampler,
) -> Result<Trajectory<T>> {
    check_horizon(horizon)?;
    let mut rng = stream.rng();
    let mut state = VirtualAgeState::new(spec);
    loop {
        let next = match sampler {
            Sampler::Inversion => next_failure_by_inversion(spec, &state, horizon, &mut rng),
            Sampler::Thinning => next_failure_by_thinning(spec, &state, horizon, &mut rng)?,
        };
        let Some(t) = next else { break };
        let index = state.history().len() + 1;
        let degree = policy.degree_for(index, t, spec.a1());
        state = state.advance(t)?.apply_repair(degree);
    }
    let events = state
        .into_history()
        .into_iter()
        .map(FailureEvent::Repaired)
        .collect();
    Ok(Trajectory::from_events(events, horizon, stream))
}

/// Next failure time after `state.now()`, or `None` if it falls at or beyond `horizon`.
///
/// Between failures the age path is `age + (t - now)`, except that it jumps to
/// `a1` when the calendar reaches `a1` for the first time. On each linear piece
/// the integrated intensity is a difference of Λ0 values, which is inverted.
fn next_failure_by_inversion<T: Scalar, R: Rng + ?Sized>(
    spec: &HazardSpec<T>,
    state: &VirtualAgeState<T>,
    horizon: T,
    rng: &mut R,
) -> Option<T> {
    let mut e = T::lit(unit_exponential(rng));
    let (now, age) = (state.now(), state.age());
    let a1 = spec.a1();
    let t = if !state.crossed_a1() && now < a1 {
        let age_at_a1 = age + (a1 - now);
        let base = spec.cumulative_unchecked(age);
        let before_reset = spec.cumulative_unchecked(age_at_a1) - base;
        if e < before_reset {
            let target = spec.inverse_unchecked(base + e);
            (now + (target - age)).max(now).min(a1)
        } else {
            e = e - before_reset;
            // after the reset the age equals calendar time
            spec.inverse_unchecked(spec.cumulative_unchecked(a1) + e).max(a1)
        }
    } else {
        let target = spec.inverse_unchecked(spec.cumulative_unchecked(age) + e);
        (now + (target - age)).max(now)
    };
    (t < horizon).then_some(t)
}

/// Supremum of λ0 over ages in `[lo, hi]`. λ0 is monotone between change
/// points, so the endpoints and the change points inside the range suffice.
fn majorant<T: Scalar>(spec: &HazardSpec<T>, lo: T, hi: T) -> T {
    let mut m = spec.rate(lo).max(spec.rate(hi));
    for c in [spec.a1(), spec.a2()] {
        if c > lo && c < hi {
            m = m.max(spec.rate(c));
        }
    }
    m
}

fn next_failure_by_thinning<T: Scalar, R: Rng + ?Sized>(
    spec: &HazardSpec<T>,
    state: &VirtualAgeState<T>,
    horizon: T,
    rng: &mut R,
) -> Result<Option<T>> {
    let a1 = spec.a1();
    let (mut start, mut start_age) = (state.now(), state.age());
    let mut reset_pending = !state.crossed_a1() && start < a1;
    loop {
        let end = if reset_pending { a1.min(horizon) } else { horizon };
        let end_age = start_age + (end - start);
        let bound = majorant(spec, start_age, end_age);
        if !(bound.is_finite() && bound > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "thinning majorant is not finite on ages [{start_age}, {end_age}]"
            )));
        }
        let mut t = start;
        loop {
            t = t + T::lit(unit_exponential(rng)) / bound;
            if t >= end {
                break;
            }
            let rate = spec.rate(start_age + (t - start));
            let u: f64 = rng.random();
            if T::lit(u) * bound < rate {
                return Ok(Some(t));
            }
        }
        if end >= horizon {
            return Ok(None);
        }
        start = end;
        start_age = end;
        reset_pending = false;
    }
}

/// Minimal-repair process: a unit-rate Poisson process mapped through Λ0⁻¹.
pub fn simulate_nhpp<T: Scalar>(spec: &HazardSpec<T>, horizon: T, stream: RngStream) -> Result<Trajectory<T>> {
    check_horizon(horizon)?;
    let mut rng = stream.rng();
    let mut arrival = T::zero();
    let mut events = Vec::new();
    loop {
        arrival = arrival + T::lit(unit_exponential(&mut rng));
        let t = spec.inverse_unchecked(arrival);
        if t >= horizon {
            break;
        }
        events.push(FailureEvent::Repaired(RepairEvent {
            time: t,
            age_before: t,
            degree: RepairDegree::minimal(),
            age_after: t,
        }));
    }
    Ok(Trajectory::from_events(events, horizon, stream))
}

/// Replacement process: i.i.d. lifetimes distributed as the first failure time.
pub fn simulate_renewal<T: Scalar>(spec: &HazardSpec<T>, horizon: T, stream: RngStream) -> Result<Trajectory<T>> {
    check_horizon(horizon)?;
    let mut rng = stream.rng();
    let mut t = T::zero();
    let mut events = Vec::new();
    loop {
        let life = draw_first_failure(spec, &mut rng);
        t = t + life;
        if t >= horizon {
            break;
        }
        events.push(FailureEvent::Replaced {
            time: t,
            age_before: life,
        });
    }
    Ok(Trajectory::from_events(events, horizon, stream))
}

/// Simulates replications `0..reps` of `process` in parallel. The result is in
/// replication order and does not depend on the thread count.
pub fn simulate_replications<T: Scalar>(
    spec: &HazardSpec<T>,
    process: &Process<T>,
    horizon: T,
    reps: u64,
    seed: u64,
) -> Result<Vec<Trajectory<T>>> {
    check_horizon(horizon)?;
    (0..reps)
        .into_par_iter()
        .map(|r| process.simulate(spec, horizon, RngStream::new(seed, r)))
        .collect()
}

/// Failure counts on `[0, horizon)` for replications `0..reps`, in replication order.
pub fn simulate_counts<T: Scalar>(
    spec: &HazardSpec<T>,
    process: &Process<T>,
    horizon: T,
    reps: u64,
    seed: u64,
) -> Result<Vec<usize>> {
    check_horizon(horizon)?;
    (0..reps)
        .into_par_iter()
        .map(|r| {
            process
                .simulate(spec, horizon, RngStream::new(seed, r))
                .map(|tr| tr.count())
        })
        .collect()
}

/// Monte Carlo estimate of the expected failure count of any process.
pub fn estimate_process_mc<T: Scalar>(
    spec: &HazardSpec<T>,
    process: &Process<T>,
    horizon: T,
    reps: u64,
    seed: u64,
) -> Result<EstimateResult<T>> {
    if reps < 2 {
        return Err(Error::InvalidArgument(format!(
            "at least two replications are required, got {reps}"
        )));
    }
    let counts = simulate_counts(spec, process, horizon, reps, seed)?;
    Ok(EstimateResult::from_counts(&counts, seed, process.label()))
}

/// Monte Carlo estimate of E[N(horizon)] for the repairable process, with a
/// 99% normal-approximation confidence interval.
pub fn estimate_expected_failures_mc<T: Scalar>(
    spec: &HazardSpec<T>,
    policy: &RepairPolicy<T>,
    horizon: T,
    reps: u64,
    seed: u64,
    sampler: Sampler,
) -> Result<EstimateResult<T>> {
    let process = Process::Repairable {
        policy: policy.clone(),
        sampler,
    };
    estimate_process_mc(spec, &process, horizon, reps, seed)
}
