//! Virtual-age bookkeeping for imperfect repairs.
//!
//! Every repair contracts the virtual age toward the first change point `a1`,
//! the age at which the baseline intensity is lowest:
//!
//! ```text
//! age_after - a1 = (1 - δ) (age_before - a1)
//! ```
//!
//! Below `a1` this is an increase in age, above `a1` a decrease. In addition
//! the age is reset to the calendar time once, when the calendar first
//! reaches `a1`. Between those jumps the age grows at unit rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hazard::HazardSpec;
use crate::scalar::Scalar;

/// Degree of a repair: 0 is minimal, 1 is perfect.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64", bound = "T: Scalar")]
pub struct RepairDegree<T>(T);

impl<T: Scalar> RepairDegree<T> {
    pub fn new(delta: T) -> Result<Self> {
        if delta >= T::zero() && delta <= T::one() {
            Ok(Self(delta))
        } else {
            Err(Error::InvalidArgument(format!(
                "repair degree must lie in [0, 1], got {delta}"
            )))
        }
    }

    pub fn minimal() -> Self {
        Self(T::zero())
    }

    pub fn perfect() -> Self {
        Self(T::one())
    }

    pub fn value(self) -> T {
        self.0
    }

    /// Post-repair age for a system of virtual age `age`.
    pub fn contract(self, age: T, a1: T) -> T {
        if self.0 == T::zero() {
            age
        } else if self.0 == T::one() {
            a1
        } else {
            a1 + (T::one() - self.0) * (age - a1)
        }
    }
}

impl<T: Scalar> TryFrom<f64> for RepairDegree<T> {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(T::lit(v))
    }
}

impl<T: Scalar> From<RepairDegree<T>> for f64 {
    fn from(d: RepairDegree<T>) -> f64 {
        d.0.to_f64_lossy()
    }
}

/// One failure and the repair that immediately followed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairEvent<T> {
    pub time: T,
    pub age_before: T,
    pub degree: RepairDegree<T>,
    pub age_after: T,
}

/// Calendar time, virtual age and repair history of a system.
///
/// Transitions consume the state and return the successor.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualAgeState<T> {
    now: T,
    age: T,
    a1: T,
    crossed_a1: bool,
    history: Vec<RepairEvent<T>>,
}

impl<T: Scalar> VirtualAgeState<T> {
    /// A new system at calendar time 0.
    pub fn new(spec: &HazardSpec<T>) -> Self {
        Self {
            now: T::zero(),
            age: T::zero(),
            a1: spec.a1(),
            crossed_a1: false,
            history: Vec::new(),
        }
    }

    /// A state at calendar time `now` with virtual age `age` and no recorded history.
    /// The `a1` reset counts as applied once `now >= a1`.
    pub fn at(spec: &HazardSpec<T>, now: T, age: T) -> Result<Self> {
        if !(now >= T::zero() && age >= T::zero() && now.is_finite() && age.is_finite()) {
            return Err(Error::Domain(format!(
                "calendar time and age must be finite and nonnegative, got now = {now}, age = {age}"
            )));
        }
        Ok(Self {
            now,
            age,
            a1: spec.a1(),
            crossed_a1: now >= spec.a1(),
            history: Vec::new(),
        })
    }

    pub fn now(&self) -> T {
        self.now
    }

    pub fn age(&self) -> T {
        self.age
    }

    pub fn a1(&self) -> T {
        self.a1
    }

    pub fn crossed_a1(&self) -> bool {
        self.crossed_a1
    }

    pub fn history(&self) -> &[RepairEvent<T>] {
        &self.history
    }

    pub fn into_history(self) -> Vec<RepairEvent<T>> {
        self.history
    }

    /// Lets calendar time run to `to`, applying the one-off reset `A(a1) = a1`
    /// if the interval reaches `a1`.
    pub fn advance(mut self, to: T) -> Result<Self> {
        if to.is_nan() || to < self.now {
            return Err(Error::InvalidArgument(format!(
                "cannot advance backwards from {} to {to}",
                self.now
            )));
        }
        if !self.crossed_a1 && to >= self.a1 {
            self.age = to;
            self.crossed_a1 = true;
        } else {
            self.age = self.age + (to - self.now);
        }
        self.now = to;
        Ok(self)
    }

    /// Repairs the system at the current calendar time.
    pub fn apply_repair(mut self, degree: RepairDegree<T>) -> Self {
        let age_before = self.age;
        let age_after = degree.contract(age_before, self.a1);
        self.history.push(RepairEvent {
            time: self.now,
            age_before,
            degree,
            age_after,
        });
        self.age = age_after;
        self
    }

    /// λ0(A(now)). Before the first failure `A(now) = now`, so this is also λ0(now).
    pub fn conditional_intensity(&self, spec: &HazardSpec<T>) -> T {
        spec.rate(self.age)
    }
}

/// Samples the virtual age on `grid` after replaying the repairs `events`.
///
/// The curve is right-continuous: at a grid point equal to an event time the
/// post-repair age is reported.
pub fn virtual_age_curve<T: Scalar>(
    events: &[(T, RepairDegree<T>)],
    spec: &HazardSpec<T>,
    grid: &[T],
) -> Result<Vec<(T, T)>> {
    if events.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::InvalidArgument("event times must be strictly increasing".into()));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("grid must be sorted".into()));
    }
    if let Some(&(t, _)) = events.first() {
        if !(t >= T::zero()) {
            return Err(Error::Domain(format!("event time must be nonnegative, got {t}")));
        }
    }
    if let Some(&g) = grid.first() {
        if !(g >= T::zero()) {
            return Err(Error::Domain(format!("grid time must be nonnegative, got {g}")));
        }
    }
    let mut state = VirtualAgeState::new(spec);
    let mut pending = events.iter().peekable();
    let mut curve = Vec::with_capacity(grid.len());
    for &g in grid {
        while let Some(&&(t, degree)) = pending.peek() {
            if t > g {
                break;
            }
            state = state.advance(t)?.apply_repair(degree);
            pending.next();
        }
        state = state.advance(g)?;
        curve.push((g, state.age()));
    }
    Ok(curve)
}
