//! Adaptive Simpson quadrature with an explicit depth limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance and refinement limit for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig<T> {
    pub abs_tol: T,
    pub max_depth: u32,
}

impl<T: Scalar> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-8),
            max_depth: 60,
        }
    }
}

impl<T: Scalar> QuadratureConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > T::zero()) {
            return Err(Error::InvalidSpec(format!(
                "quadrature abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidSpec("quadrature max_depth must be positive".into()));
        }
        Ok(())
    }
}

/// Value of a definite integral with the quadrature's own error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
}

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

/// Integrates `f` over `[a, b]` until the Lyness error estimate of every panel
/// falls below its share of `abs_tol`.
///
/// Fails with [`Error::Numerical`] if a panel still has not converged after
/// `max_depth` bisections, or if `f` returns a non-finite value.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, cfg: &QuadratureConfig<T>) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error_estimate: T::zero(),
            evaluations: 0,
        });
    }
    let mut evaluations = 0usize;
    let mut eval = |x: T| -> Result<T> {
        evaluations += 1;
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Numerical(format!("integrand is not finite at x = {x}")))
        }
    };
    let two = T::lit(2.0);
    let fifteen = T::lit(15.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (eval(a)?, eval(m)?, eval(b)?);
    let root = Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
    };

    let mut value = T::zero();
    let mut error = T::zero();
    let mut stack = vec![(root, cfg.abs_tol, 0u32)];
    while let Some((p, tol, depth)) = stack.pop() {
        let m = (p.a + p.b) / two;
        let lm = (p.a + m) / two;
        let rm = (m + p.b) / two;
        if !(p.a < lm && lm < m && m < rm && rm < p.b) {
            return Err(Error::Numerical(format!(
                "quadrature panel [{}, {}] cannot be subdivided further",
                p.a, p.b
            )));
        }
        let (flm, frm) = (eval(lm)?, eval(rm)?);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if delta.abs() <= fifteen * tol {
            value = value + left + right + delta / fifteen;
            error = error + delta.abs() / fifteen;
            continue;
        }
        if depth + 1 >= cfg.max_depth {
            return Err(Error::Numerical(format!(
                "quadrature depth {} exhausted on [{}, {}] (abs_tol {})",
                cfg.max_depth, p.a, p.b, cfg.abs_tol
            )));
        }
        let half = tol / two;
        stack.push((
            Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
            },
            half,
            depth + 1,
        ));
        stack.push((
            Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
            },
            half,
            depth + 1,
        ));
    }
    Ok(Integral {
        value,
        error_estimate: error,
        evaluations,
    })
}

/// Integrates over consecutive pieces `[points[i], points[i + 1]]`, sharing the
/// tolerance among pieces in proportion to their length.
pub fn integrate_pieces<T, F>(f: F, points: &[T], cfg: &QuadratureConfig<T>) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if points.len() < 2 {
        return Err(Error::InvalidArgument("at least two break points required".into()));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("break points must be sorted".into()));
    }
    let span = points[points.len() - 1] - points[0];
    let mut total = Integral {
        value: T::zero(),
        error_estimate: T::zero(),
        evaluations: 0,
    };
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let share = QuadratureConfig {
            abs_tol: cfg.abs_tol * (w[1] - w[0]) / span,
            max_depth: cfg.max_depth,
        };
        let piece = adaptive_simpson(&f, w[0], w[1], &share)?;
        total.value = total.value + piece.value;
        total.error_estimate = total.error_estimate + piece.error_estimate;
        total.evaluations += piece.evaluations;
    }
    Ok(total)
}
