//! Bathtub-shaped baseline intensity.
//!
//! The baseline intensity has three phases separated by the change points
//! `a1 <= a2`:
//!
//! ```text
//! λ0(t) = λ + α1 (a1 - t)^β1    t <= a1        (decreasing, "DFR")
//!         λ                     a1 < t <= a2   (useful life)
//!         λ + α2 (t - a2)^β2    t > a2         (increasing, "IFR")
//! ```
//!
//! Either power phase can be switched off, which yields the degenerate
//! constant, decreasing, increasing and U-shaped members of the family.
//! The cumulative intensity is evaluated from its closed-form antiderivative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Shape of a failure-rate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HazardShape {
    /// Constant failure rate.
    Cfr,
    /// Increasing failure rate.
    Ifr,
    /// Decreasing failure rate.
    Dfr,
    /// U-shaped: decreasing then increasing, no flat useful-life period.
    Ufr,
    /// Bathtub: decreasing, constant, then increasing.
    Bfr,
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Unvalidated parameter set, the serialized form of a [`HazardSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HazardParams<T> {
    pub lambda: T,
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
    pub a1: T,
    pub a2: T,
    /// Accept `a2 - a1 < a1`, i.e. a useful life shorter than the DFR period.
    #[serde(default, skip_serializing_if = "is_false")]
    pub allow_short_useful_life: bool,
    /// Whether the decreasing phase on `[0, a1]` is present.
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub dfr_phase: bool,
    /// Whether the increasing phase beyond `a2` is present.
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub ifr_phase: bool,
}

impl<T: Scalar> HazardParams<T> {
    /// Parameters of the worked example: λ=1, α1=0.6, α2=0.5, β1=2.5, β2=2.8, a1=4, a2=8.
    pub fn paper_example() -> Self {
        Self {
            lambda: T::lit(1.0),
            alpha1: T::lit(0.6),
            alpha2: T::lit(0.5),
            beta1: T::lit(2.5),
            beta2: T::lit(2.8),
            a1: T::lit(4.0),
            a2: T::lit(8.0),
            allow_short_useful_life: false,
            dfr_phase: true,
            ifr_phase: true,
        }
    }
}

/// A validated baseline intensity. Constructed values always satisfy the
/// parameter invariants, so evaluation never fails for `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "HazardParams<T>",
    into = "HazardParams<T>",
    bound = "T: Scalar"
)]
pub struct HazardSpec<T> {
    params: HazardParams<T>,
}

impl<T: Scalar> TryFrom<HazardParams<T>> for HazardSpec<T> {
    type Error = Error;

    fn try_from(params: HazardParams<T>) -> Result<Self> {
        Self::new(params)
    }
}

impl<T: Scalar> From<HazardSpec<T>> for HazardParams<T> {
    fn from(spec: HazardSpec<T>) -> Self {
        spec.params
    }
}

fn require_positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Scalar> HazardSpec<T> {
    pub fn new(params: HazardParams<T>) -> Result<Self> {
        let p = &params;
        require_positive("lambda", p.lambda)?;
        require_positive("alpha1", p.alpha1)?;
        require_positive("alpha2", p.alpha2)?;
        require_positive("beta1", p.beta1)?;
        require_positive("beta2", p.beta2)?;
        if !(p.a1.is_finite() && p.a1 >= T::zero()) {
            return Err(Error::InvalidSpec(format!(
                "a1 must be nonnegative and finite, got {}",
                p.a1
            )));
        }
        if !(p.a2.is_finite() && p.a2 >= p.a1) {
            return Err(Error::InvalidSpec(format!(
                "change points must satisfy 0 <= a1 <= a2, got a1 = {}, a2 = {}",
                p.a1, p.a2
            )));
        }
        if p.ifr_phase && !p.allow_short_useful_life && p.a2 - p.a1 < p.a1 {
            return Err(Error::InvalidSpec(format!(
                "useful life must be at least as long as the DFR period (a2 - a1 >= a1), \
                 got a2 - a1 = {} < a1 = {}; set allow_short_useful_life to override",
                p.a2 - p.a1,
                p.a1
            )));
        }
        Ok(Self { params })
    }

    pub fn paper_example() -> Self {
        Self::new(HazardParams::paper_example()).expect("example parameters are valid")
    }

    pub fn params(&self) -> &HazardParams<T> {
        &self.params
    }

    pub fn lambda(&self) -> T {
        self.params.lambda
    }

    pub fn a1(&self) -> T {
        self.params.a1
    }

    pub fn a2(&self) -> T {
        self.params.a2
    }

    /// The decreasing phase contributes only when enabled and `a1 > 0`.
    pub fn has_dfr_phase(&self) -> bool {
        self.params.dfr_phase && self.params.a1 > T::zero()
    }

    pub fn has_ifr_phase(&self) -> bool {
        self.params.ifr_phase
    }

    pub fn classify(&self) -> HazardShape {
        match (self.has_dfr_phase(), self.has_ifr_phase()) {
            (false, false) => HazardShape::Cfr,
            (true, false) => HazardShape::Dfr,
            (false, true) => HazardShape::Ifr,
            (true, true) if self.params.a1 == self.params.a2 => HazardShape::Ufr,
            (true, true) => HazardShape::Bfr,
        }
    }

    /// Baseline intensity λ0(t).
    pub fn evaluate(&self, t: T) -> Result<T> {
        check_time(t)?;
        Ok(self.rate(t))
    }

    /// Cumulative intensity Λ0(t) = ∫₀ᵗ λ0(s) ds.
    pub fn cumulative(&self, t: T) -> Result<T> {
        check_time(t)?;
        Ok(self.cumulative_unchecked(t))
    }

    /// Λ0(t) − Λ0(s) for `0 <= s <= t`.
    pub fn cumulative_between(&self, s: T, t: T) -> Result<T> {
        check_time(s)?;
        check_time(t)?;
        if s > t {
            return Err(Error::InvalidArgument(format!(
                "interval bounds out of order: s = {s} > t = {t}"
            )));
        }
        Ok(self.cumulative_span(s, t))
    }

    /// Smallest `t` with Λ0(t) = y, to within an absolute tolerance of 1e-10 on `y`
    /// (or a few ulps of `y` when the scalar type cannot resolve 1e-10).
    pub fn inverse_cumulative(&self, y: T) -> Result<T> {
        if y.is_nan() || y < T::zero() || y.is_infinite() {
            return Err(Error::Domain(format!(
                "cumulative intensity must be finite and nonnegative, got {y}"
            )));
        }
        Ok(self.inverse_unchecked(y))
    }

    /// λ0 for `t >= 0`; negative inputs are treated as 0.
    pub(crate) fn rate(&self, t: T) -> T {
        let p = &self.params;
        let t = t.max(T::zero());
        if t <= p.a1 {
            if p.dfr_phase {
                p.lambda + p.alpha1 * (p.a1 - t).powf(p.beta1)
            } else {
                p.lambda
            }
        } else if t <= p.a2 || !p.ifr_phase {
            p.lambda
        } else {
            p.lambda + p.alpha2 * (t - p.a2).powf(p.beta2)
        }
    }

    pub(crate) fn cumulative_unchecked(&self, t: T) -> T {
        let p = &self.params;
        let t = t.max(T::zero());
        let mut total = p.lambda * t;
        if p.dfr_phase && p.a1 > T::zero() {
            let e = p.beta1 + T::one();
            let c = t.min(p.a1);
            total = total + p.alpha1 * (p.a1.powf(e) - (p.a1 - c).powf(e)) / e;
        }
        if p.ifr_phase && t > p.a2 {
            let e = p.beta2 + T::one();
            total = total + p.alpha2 * (t - p.a2).powf(e) / e;
        }
        total
    }

    /// Λ0(t) − Λ0(s) without argument checks.
    pub(crate) fn cumulative_span(&self, s: T, t: T) -> T {
        (self.cumulative_unchecked(t) - self.cumulative_unchecked(s)).max(T::zero())
    }

    pub(crate) fn inverse_unchecked(&self, y: T) -> T {
        if y <= T::zero() {
            return T::zero();
        }
        let p = &self.params;
        let y_a1 = self.cumulative_unchecked(p.a1);
        let y_a2 = self.cumulative_unchecked(p.a2);
        if y <= y_a1 {
            if !self.has_dfr_phase() {
                return y / p.lambda;
            }
            self.solve(y, T::zero(), p.a1)
        } else if y <= y_a2 || !p.ifr_phase {
            p.a1 + (y - y_a1) / p.lambda
        } else {
            // Λ0(t) >= Λ0(a2) + λ (t - a2) bounds the root from above.
            let hi = p.a2 + (y - y_a2) / p.lambda;
            self.solve(y, p.a2, hi)
        }
    }

    /// Bisection-safeguarded Newton iteration for Λ0(t) = y on `[lo, hi]`.
    fn solve(&self, y: T, mut lo: T, mut hi: T) -> T {
        let tol = inversion_tolerance(y);
        let two = T::lit(2.0);
        let flo = self.cumulative_unchecked(lo) - y;
        let fhi = self.cumulative_unchecked(hi) - y;
        let mut t = if fhi > flo {
            (lo - flo * (hi - lo) / (fhi - flo)).max(lo).min(hi)
        } else {
            (lo + hi) / two
        };
        let mut best = t;
        let mut best_err = T::infinity();
        for _ in 0..200 {
            let f = self.cumulative_unchecked(t) - y;
            if f.abs() < best_err {
                best_err = f.abs();
                best = t;
            }
            if f.abs() <= tol {
                return t;
            }
            if f > T::zero() {
                hi = t;
            } else {
                lo = t;
            }
            if hi - lo <= T::epsilon() * hi.abs().max(T::one()) {
                break;
            }
            let d = self.rate(t);
            let newton = t - f / d;
            t = if d > T::zero() && newton > lo && newton < hi {
                newton
            } else {
                (lo + hi) / two
            };
        }
        best
    }
}

fn inversion_tolerance<T: Scalar>(y: T) -> T {
    T::lit(1e-10).max(T::lit(16.0) * T::epsilon() * y.abs().max(T::one()))
}

fn check_time<T: Scalar>(t: T) -> Result<()> {
    if t.is_nan() || t < T::zero() {
        Err(Error::Domain(format!("time must be nonnegative, got {t}")))
    } else {
        Ok(())
    }
}
