//! CSV serialisation of event histories, trajectories and sweeps.

use std::fmt::Write;

use crate::estimate::EstimateResult;
use crate::repair::{RepairDegree, RepairEvent};
use crate::scalar::Scalar;
use crate::simulate::Trajectory;

/// Significant digits used for event histories and trajectories.
pub const EVENT_DIGITS: usize = 12;
/// Significant digits used for sweep tables.
pub const SWEEP_DIGITS: usize = 10;

/// Formats `x` in plain decimal notation (no exponent) with `digits`
/// significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mantissa: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if x < 0.0 { "-" } else { "" };
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), mantissa)
    } else {
        let int_len = exp as usize + 1;
        if int_len >= mantissa.len() {
            format!("{}{}", mantissa, "0".repeat(int_len - mantissa.len()))
        } else {
            format!("{}.{}", &mantissa[..int_len], &mantissa[int_len..])
        }
    };
    format!("{sign}{body}")
}

fn num<T: Scalar>(x: T, digits: usize) -> String {
    format_significant(x.to_f64_lossy(), digits)
}

/// `index,time,age_before,degree,age_after`, one row per repair, 1-based index.
pub fn history_csv<T: Scalar>(events: &[RepairEvent<T>]) -> String {
    let mut out = String::from("index,time,age_before,degree,age_after\n");
    for (i, e) in events.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            num(e.time, EVENT_DIGITS),
            num(e.age_before, EVENT_DIGITS),
            num(e.degree.value(), EVENT_DIGITS),
            num(e.age_after, EVENT_DIGITS),
        );
    }
    out
}

/// `replication,index,time,degree,age_after` for a batch of trajectories.
/// Replacements have an empty degree and an age after of 0.
pub fn trajectories_csv<T: Scalar>(trajectories: &[Trajectory<T>]) -> String {
    let mut out = String::from("replication,index,time,degree,age_after\n");
    for tr in trajectories {
        for (i, ev) in tr.events.iter().enumerate() {
            let degree = ev
                .degree()
                .map(|d| num(d.value(), EVENT_DIGITS))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                tr.stream.replication,
                i + 1,
                num(ev.time(), EVENT_DIGITS),
                degree,
                num(ev.age_after(), EVENT_DIGITS),
            );
        }
    }
    out
}

/// One row of a sweep table.
pub fn sweep_row<T: Scalar>(delta: RepairDegree<T>, est: &EstimateResult<T>) -> String {
    format!(
        "{},{},{},{}",
        num(delta.value(), SWEEP_DIGITS),
        num(est.value, SWEEP_DIGITS),
        est.method.as_str(),
        est.error_bound.map(|e| num(e, SWEEP_DIGITS)).unwrap_or_default(),
    )
}

pub const SWEEP_HEADER: &str = "delta,expected_failures,method,error_bound";

/// `delta,expected_failures,method,error_bound`.
pub fn sweep_csv<T: Scalar>(rows: &[(RepairDegree<T>, EstimateResult<T>)]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for (d, est) in rows {
        out.push_str(&sweep_row(*d, est));
        out.push('\n');
    }
    out
}
