use std::fmt::Write as _;
use std::path::Path;

use bathtub_repair::analytic::{table1_reference, uniform_degree_grid};
use bathtub_repair::export::{format_significant, sweep_row, trajectories_csv, SWEEP_DIGITS, SWEEP_HEADER};
use bathtub_repair::simulate::{estimate_process_mc, simulate_counts, simulate_replications};
use bathtub_repair::{
    estimate_expected_failures_mc, expected_failures_strategy, EstimateResultF64, Process,
    RepairDegreeF64, RepairPolicyF64,
};

use crate::config::RunConfig;
use crate::{CliError, ExpectedArgs, McArgs, ProcessArg, SimulateArgs, SweepArgs, Table1Args};

const DEFAULT_REPS: u64 = 100_000;
const DEFAULT_SWEEP_POINTS: usize = 101;

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn degree(delta: f64) -> Result<RepairDegreeF64, CliError> {
    Ok(RepairDegreeF64::new(delta)?)
}

/// The policy with its degree replaced by `delta`.
fn override_degree(policy: &RepairPolicyF64, delta: f64) -> Result<RepairPolicyF64, CliError> {
    let d = degree(delta)?;
    match policy {
        RepairPolicyF64::ConstantDegree { .. } => Ok(RepairPolicyF64::ConstantDegree { delta: d }),
        RepairPolicyF64::FirstImperfectThenMinimal { .. } => {
            Ok(RepairPolicyF64::FirstImperfectThenMinimal { delta1: d })
        }
        RepairPolicyF64::DegreeSequence { .. } => Err(CliError::Config(
            "--delta cannot override a degree_sequence policy".into(),
        )),
    }
}

/// The δ1 of a policy that has a quadrature formula.
fn strategy_degree(policy: &RepairPolicyF64) -> Result<RepairDegreeF64, CliError> {
    match policy {
        RepairPolicyF64::FirstImperfectThenMinimal { delta1 } => Ok(*delta1),
        p if p.is_all_minimal() => Ok(RepairDegreeF64::minimal()),
        _ => Err(CliError::Config(
            "quadrature is only available for the first_imperfect_then_minimal policy \
             (or all-minimal repairs); use --method mc"
                .into(),
        )),
    }
}

fn mc_settings(cfg: &RunConfig, args: &McArgs) -> (u64, u64) {
    let reps = args.reps.or(cfg.mc.map(|m| m.reps)).unwrap_or(DEFAULT_REPS);
    let seed = args.seed.or(cfg.mc.map(|m| m.seed)).unwrap_or(0);
    (reps, seed)
}

fn quadrature_estimate(cfg: &RunConfig, delta1: RepairDegreeF64, tau: f64) -> Result<EstimateResultF64, CliError> {
    Ok(expected_failures_strategy(&cfg.hazard, delta1, tau, &cfg.quadrature_config())?)
}

fn mc_estimate(
    cfg: &RunConfig,
    policy: &RepairPolicyF64,
    tau: f64,
    args: &McArgs,
) -> Result<EstimateResultF64, CliError> {
    let (reps, seed) = mc_settings(cfg, args);
    Ok(estimate_expected_failures_mc(&cfg.hazard, policy, tau, reps, seed, args.sampler.into())?)
}

fn to_json(results: &[EstimateResultF64]) -> String {
    let text = match results {
        [single] => serde_json::to_string_pretty(single),
        many => serde_json::to_string_pretty(many),
    };
    text.expect("estimates serialize")
}

pub fn expected(args: &ExpectedArgs) -> Result<String, CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let policy = match args.delta {
        Some(d) => override_degree(&cfg.policy, d)?,
        None => cfg.policy.clone(),
    };
    let mut results = Vec::new();
    if args.method.quadrature() {
        let d = strategy_degree(&policy)?;
        results.push(quadrature_estimate(&cfg, d, cfg.tau)?);
    }
    if args.method.monte_carlo() {
        results.push(mc_estimate(&cfg, &policy, cfg.tau, &args.mc)?);
    }
    let json = to_json(&results);
    if let Some(out) = &args.out {
        write_atomic(out, &format!("{json}\n"))?;
    }
    Ok(format!("{json}\n"))
}

fn degree_grid(cfg: &RunConfig, default_points: usize) -> Result<Vec<RepairDegreeF64>, CliError> {
    match &cfg.deltas {
        Some(d) if d.is_empty() => Err(CliError::Config("degree grid is empty".into())),
        Some(d) => Ok(d.clone()),
        None => Ok(uniform_degree_grid(default_points)?),
    }
}

/// Estimates for each degree and requested method, in grid order with the
/// quadrature row before the Monte Carlo row.
fn sweep_rows(
    cfg: &RunConfig,
    grid: &[RepairDegreeF64],
    tau: f64,
    method: crate::MethodArg,
    mc: &McArgs,
) -> Result<Vec<(RepairDegreeF64, EstimateResultF64)>, CliError> {
    let mut rows = Vec::new();
    let quad = if method.quadrature() {
        Some(bathtub_repair::sweep_expected_failures(&cfg.hazard, grid, tau, &cfg.quadrature_config())?)
    } else {
        None
    };
    for (i, &d) in grid.iter().enumerate() {
        if let Some(q) = &quad {
            rows.push(q[i].clone());
        }
        if method.monte_carlo() {
            let policy = RepairPolicyF64::FirstImperfectThenMinimal { delta1: d };
            rows.push((d, mc_estimate(cfg, &policy, tau, mc)?));
        }
    }
    Ok(rows)
}

pub fn table1(args: &Table1Args) -> Result<String, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(tau) = args.tau {
        cfg.tau = tau;
        cfg.validate()?;
    }
    let grid = degree_grid(&cfg, 11)?;
    let rows = sweep_rows(&cfg, &grid, cfg.tau, args.method, &args.mc)?;
    let compare = cfg.is_paper_setup();

    let mut csv = format!("{SWEEP_HEADER},paper_value,tolerance,pass\n");
    let (mut compared, mut failed) = (0usize, Vec::new());
    for (d, est) in &rows {
        csv.push_str(&sweep_row(*d, est));
        match table1_reference(d.value()).filter(|_| compare) {
            Some((reference, tol)) => {
                // Monte Carlo rows may additionally deviate by their 99% half-width.
                let allowance = tol
                    + match est.method {
                        bathtub_repair::Method::MonteCarlo => est.error_bound.unwrap_or(0.0),
                        bathtub_repair::Method::Quadrature => 0.0,
                    };
                let pass = (est.value - reference).abs() <= allowance;
                compared += 1;
                if !pass {
                    failed.push(format!("δ1 = {}: {} vs {reference}", d.value(), est.value));
                }
                let _ = writeln!(
                    csv,
                    ",{},{},{}",
                    format_significant(reference, SWEEP_DIGITS),
                    format_significant(tol, SWEEP_DIGITS),
                    if pass { "pass" } else { "fail" }
                );
            }
            None => csv.push_str(",,,\n"),
        }
    }
    write_atomic(&args.out, &csv)?;
    if !failed.is_empty() {
        return Err(CliError::Acceptance(format!(
            "{} of {compared} rows outside tolerance: {}",
            failed.len(),
            failed.join("; ")
        )));
    }
    Ok(format!(
        "wrote {} rows to {} ({compared} compared, all within tolerance)\n",
        rows.len(),
        args.out.display()
    ))
}

pub fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let policy = match args.delta {
        Some(d) => override_degree(&cfg.policy, d)?,
        None => cfg.policy.clone(),
    };
    let (reps, seed) = mc_settings(&cfg, &args.mc);
    if reps == 0 {
        return Err(CliError::Config("--reps must be at least 1".into()));
    }
    let process = match args.process {
        ProcessArg::Repair => Process::Repairable {
            policy,
            sampler: args.mc.sampler.into(),
        },
        ProcessArg::Nhpp => Process::MinimalRepair,
        ProcessArg::Renewal => Process::Replacement,
    };
    let estimate = match (&args.out, args.summary_only) {
        (Some(out), false) => {
            let trajectories = simulate_replications(&cfg.hazard, &process, cfg.tau, reps, seed)?;
            write_atomic(out, &trajectories_csv(&trajectories))?;
            let counts: Vec<usize> = trajectories.iter().map(|t| t.count()).collect();
            EstimateResultF64::from_counts(&counts, seed, process.label())
        }
        _ if reps >= 2 => estimate_process_mc(&cfg.hazard, &process, cfg.tau, reps, seed)?,
        _ => {
            let counts = simulate_counts(&cfg.hazard, &process, cfg.tau, reps, seed)?;
            EstimateResultF64::from_counts(&counts, seed, process.label())
        }
    };
    Ok(format!("{}\n", to_json(&[estimate])))
}

/// Parses `N`, `start:end:count` or `a,b,c` into degrees in [0, 1].
pub fn parse_grid(spec: &str) -> Result<Vec<RepairDegreeF64>, CliError> {
    let bad = |msg: &str| CliError::Config(format!("invalid grid {spec:?}: {msg}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let points: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, end, count] = parts[..] else {
            return Err(bad("expected start:end:count"));
        };
        let (start, end) = (num(start)?, num(end)?);
        let count: usize = count.trim().parse().map_err(|_| bad("count is not an integer"))?;
        if count < 2 {
            return Err(bad("at least two points required"));
        }
        let last = (count - 1) as f64;
        (0..count)
            .map(|i| start + (end - start) * i as f64 / last)
            .collect()
    } else if spec.contains(',') {
        spec.split(',').map(num).collect::<Result<_, _>>()?
    } else {
        let count: usize = spec.trim().parse().map_err(|_| bad("expected a point count"))?;
        return uniform_degree_grid(count).map_err(|_| bad("at least two points required"));
    };
    if points.len() < 2 {
        return Err(bad("at least two points required"));
    }
    points
        .into_iter()
        .map(|d| RepairDegreeF64::new(d).map_err(|_| bad(&format!("{d} is outside [0, 1]"))))
        .collect()
}

pub fn sweep(args: &SweepArgs) -> Result<String, CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let grid = match &args.grid {
        Some(g) => parse_grid(g)?,
        None => degree_grid(&cfg, DEFAULT_SWEEP_POINTS)?,
    };
    if grid.len() < 2 {
        return Err(CliError::Config("a sweep needs at least two grid points".into()));
    }
    let rows = sweep_rows(&cfg, &grid, cfg.tau, args.method, &args.mc)?;
    let mut csv = format!("{SWEEP_HEADER}\n");
    for (d, est) in &rows {
        csv.push_str(&sweep_row(*d, est));
        csv.push('\n');
    }
    match &args.out {
        Some(out) => {
            write_atomic(out, &csv)?;
            Ok(format!("wrote {} rows to {}\n", rows.len(), out.display()))
        }
        None => Ok(csv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(g: &[RepairDegreeF64]) -> Vec<f64> {
        g.iter().map(|d| d.value()).collect()
    }

    #[test]
    fn grid_forms() {
        assert_eq!(values(&parse_grid("3").unwrap()), [0.0, 0.5, 1.0]);
        assert_eq!(values(&parse_grid("0:1:5").unwrap()), [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(values(&parse_grid("0, 1").unwrap()), [0.0, 1.0]);
        assert_eq!(parse_grid("101").unwrap().len(), 101);
    }

    #[test]
    fn bad_grids_are_config_errors() {
        for g in ["1", "0.5", "0:2:5", "-0.1,0.5", "0:1", "a,b", "0:1:1", ""] {
            let err = parse_grid(g).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{g}");
        }
    }

    #[test]
    fn degree_override() {
        let p = RepairPolicyF64::ConstantDegree { delta: degree(0.1).unwrap() };
        assert_eq!(
            override_degree(&p, 0.4).unwrap(),
            RepairPolicyF64::ConstantDegree { delta: degree(0.4).unwrap() }
        );
        assert!(override_degree(&p, 1.4).is_err());
        let seq = RepairPolicyF64::DegreeSequence { deltas: vec![] };
        assert!(override_degree(&seq, 0.4).is_err());
        assert_eq!(strategy_degree(&seq).unwrap().value(), 0.0);
        let seq = RepairPolicyF64::DegreeSequence { deltas: vec![degree(0.3).unwrap()] };
        assert_eq!(strategy_degree(&seq).unwrap_err().exit_code(), 2);
    }
}
