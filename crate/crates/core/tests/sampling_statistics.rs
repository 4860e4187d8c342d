//! Statistical checks of the samplers against closed-form and quadrature
//! references. All seeds are fixed, so every test is deterministic.

use bathtub_repair::analytic::TABLE1;
use bathtub_repair::simulate::{estimate_process_mc, simulate_counts};
use bathtub_repair::{
    estimate_expected_failures_mc, expected_failures_strategy, sample_first_failure, HazardParams,
    HazardSpec, HazardSpecF64, Process, QuadratureConfig, RepairDegree, RepairPolicy, RngStream,
    Sampler,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn paper() -> HazardSpecF64 {
    HazardSpec::paper_example()
}

fn deg(d: f64) -> RepairDegree<f64> {
    RepairDegree::new(d).unwrap()
}

fn first_imperfect(d: f64) -> RepairPolicy<f64> {
    RepairPolicy::FirstImperfectThenMinimal { delta1: deg(d) }
}

fn repairable(policy: RepairPolicy<f64>, sampler: Sampler) -> Process<f64> {
    Process::Repairable { policy, sampler }
}

struct Moments {
    n: f64,
    mean: f64,
    var: f64,
    m4: f64,
}

fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Moments { n, mean, var, m4 }
}

impl Moments {
    fn se_mean(&self) -> f64 {
        (self.var / self.n).sqrt()
    }

    fn se_var(&self) -> f64 {
        ((self.m4 - self.var * self.var) / self.n).sqrt()
    }
}

fn counts_f64(h: &HazardSpecF64, p: &Process<f64>, horizon: f64, reps: u64, seed: u64) -> Vec<f64> {
    simulate_counts(h, p, horizon, reps, seed)
        .unwrap()
        .into_iter()
        .map(|c| c as f64)
        .collect()
}

#[test]
fn first_failure_mean_matches_quadrature() {
    // ∫ t f1(t) dt from mpmath
    const MEAN_T1: f64 = 0.051_075_430_192_752_195;
    let h = paper();
    let draws: Vec<f64> = (0..100_000)
        .map(|r| sample_first_failure(&h, RngStream::new(2024, r)))
        .collect();
    let m = moments(&draws);
    assert!((m.mean - MEAN_T1).abs() <= 3.0 * m.se_mean(), "{} vs {MEAN_T1}", m.mean);
}

/// Kolmogorov–Smirnov statistic of `samples` against the CDF `cdf`.
fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

#[test]
fn first_failure_passes_ks_test() {
    let h = paper();
    let n = 10_000;
    let draws: Vec<f64> = (0..n as u64)
        .map(|r| sample_first_failure(&h, RngStream::new(77, r)))
        .collect();
    let d = ks_statistic(draws, |t| 1.0 - (-h.cumulative(t).unwrap()).exp());
    assert!(d < ks_critical_1pct(n), "D = {d}");
}

#[test]
fn nhpp_mean_is_cumulative_intensity() {
    let h = paper();
    let est = estimate_process_mc(&h, &Process::MinimalRepair, 4.0, 100_000, 5).unwrap();
    let expected = h.cumulative(4.0).unwrap();
    assert!((est.value - expected).abs() <= 3.0 * est.std_error().unwrap(), "{}", est.value);
}

#[test]
fn nhpp_counts_are_poisson() {
    let h = paper();
    let m = moments(&counts_f64(&h, &Process::MinimalRepair, 10.0, 100_000, 6));
    let ratio = m.var / m.mean;
    assert!((0.95..=1.05).contains(&ratio), "variance/mean = {ratio}");
    assert!((m.mean - 33.775_595_170_848_983).abs() <= 3.0 * m.se_mean());
}

#[test]
fn all_minimal_repairs_reduce_to_nhpp() {
    let h = paper();
    let policy = RepairPolicy::ConstantDegree { delta: deg(0.0) };
    let nhpp = moments(&counts_f64(&h, &Process::MinimalRepair, 10.0, 100_000, 8));
    let lambda10 = h.cumulative(10.0).unwrap();
    for sampler in [Sampler::Inversion, Sampler::Thinning] {
        let rep = moments(&counts_f64(&h, &repairable(policy.clone(), sampler), 10.0, 100_000, 9));
        assert!((rep.mean - lambda10).abs() <= 3.0 * rep.se_mean(), "{sampler:?}: {}", rep.mean);
        let se = rep.se_mean().hypot(nhpp.se_mean());
        assert!((rep.mean - nhpp.mean).abs() <= 3.0 * se);
        let se_var = rep.se_var().hypot(nhpp.se_var());
        assert!((rep.var - nhpp.var).abs() <= 3.0 * se_var, "{} vs {}", rep.var, nhpp.var);
    }
}

#[test]
fn samplers_agree_in_mean() {
    let h = paper();
    for policy in [
        first_imperfect(0.5),
        RepairPolicy::ConstantDegree { delta: deg(0.6) },
        RepairPolicy::DegreeSequence {
            deltas: vec![deg(1.0), deg(0.3), deg(0.8)],
        },
    ] {
        let inv = estimate_expected_failures_mc(&h, &policy, 10.0, 100_000, 10, Sampler::Inversion).unwrap();
        let thin = estimate_expected_failures_mc(&h, &policy, 10.0, 100_000, 11, Sampler::Thinning).unwrap();
        let pooled = inv.std_error().unwrap().hypot(thin.std_error().unwrap());
        assert!(
            (inv.value - thin.value).abs() <= 3.0 * pooled,
            "{policy:?}: {} vs {}",
            inv.value,
            thin.value
        );
    }
}

/// Two-sample chi-square homogeneity test on count histograms, merging sparse
/// bins until each pooled cell expects at least 5 observations per sample.
fn chi_square_homogeneity(a: &[usize], b: &[usize]) -> (f64, f64) {
    let max = *a.iter().chain(b).max().unwrap();
    let mut ha = vec![0f64; max + 1];
    let mut hb = vec![0f64; max + 1];
    a.iter().for_each(|&c| ha[c] += 1.0);
    b.iter().for_each(|&c| hb[c] += 1.0);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for k in 0..=max {
        ca += ha[k];
        cb += hb[k];
        let pooled = (ca + cb) / (na + nb);
        if pooled * na.min(nb) >= 5.0 {
            cells.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        let last = cells.last_mut().unwrap();
        last.0 += ca;
        last.1 += cb;
    }
    let stat: f64 = cells
        .iter()
        .map(|&(oa, ob)| {
            let p = (oa + ob) / (na + nb);
            (oa - na * p).powi(2) / (na * p) + (ob - nb * p).powi(2) / (nb * p)
        })
        .sum();
    let df = (cells.len() - 1) as f64;
    let critical = ChiSquared::new(df).unwrap().inverse_cdf(0.99);
    (stat, critical)
}

#[test]
fn samplers_agree_in_distribution() {
    let h = paper();
    for d in [0.0, 0.3, 0.9] {
        let policy = first_imperfect(d);
        let inv = simulate_counts(&h, &repairable(policy.clone(), Sampler::Inversion), 10.0, 10_000, 112).unwrap();
        let thin = simulate_counts(&h, &repairable(policy, Sampler::Thinning), 10.0, 10_000, 113).unwrap();
        let (stat, critical) = chi_square_homogeneity(&inv, &thin);
        assert!(stat < critical, "δ1 = {d}: χ² = {stat} >= {critical}");
    }
}

#[test]
fn table_entry_at_point_nine() {
    let h = paper();
    let est = estimate_expected_failures_mc(&h, &first_imperfect(0.9), 10.0, 100_000, 42, Sampler::Inversion).unwrap();
    assert!((est.value - 12.79).abs() <= 3.0 * est.std_error().unwrap(), "{}", est.value);
}

#[test]
fn confidence_intervals_cover_published_values() {
    let h = paper();
    for (policy, published) in [
        (first_imperfect(0.5), 14.64),
        (RepairPolicy::ConstantDegree { delta: deg(0.0) }, 33.78),
    ] {
        let est = estimate_expected_failures_mc(&h, &policy, 10.0, 100_000, 42, Sampler::Inversion).unwrap();
        let (lo, hi) = est.confidence_interval().unwrap();
        assert!(lo <= published && published <= hi, "{published} not in [{lo}, {hi}]");
    }
}

#[test]
fn quadrature_inside_mc_interval_across_table_grid() {
    let h = paper();
    let cfg = QuadratureConfig::default();
    for (i, (d, _, _)) in TABLE1.iter().enumerate() {
        let exact = expected_failures_strategy(&h, deg(*d), 10.0, &cfg).unwrap().value;
        let est = estimate_expected_failures_mc(&h, &first_imperfect(*d), 10.0, 100_000, 1000 + i as u64, Sampler::Inversion)
            .unwrap();
        let (lo, hi) = est.confidence_interval().unwrap();
        assert!(lo <= exact && exact <= hi, "δ1 = {d}: {exact} not in [{lo}, {hi}]");
    }
}

#[test]
fn mc_means_nonincreasing_in_degree() {
    let h = paper();
    let means: Vec<(f64, f64)> = TABLE1
        .iter()
        .map(|(d, _, _)| {
            let e = estimate_expected_failures_mc(&h, &first_imperfect(*d), 10.0, 20_000, 3, Sampler::Thinning).unwrap();
            (e.value, e.std_error().unwrap())
        })
        .collect();
    for w in means.windows(2) {
        let (m0, s0) = w[0];
        let (m1, s1) = w[1];
        assert!(m1 <= m0 + 3.0 * s0.hypot(s1), "{means:?}");
    }
}

#[test]
fn late_first_failure_means_all_minimal() {
    // a system that cannot fail before a1 never receives the imperfect repair
    let mut params = HazardParams::paper_example();
    params.dfr_phase = false;
    params.lambda = 0.01;
    let h = HazardSpec::new(params).unwrap();
    let policy = first_imperfect(1.0);
    for r in 0..2000 {
        let tr = bathtub_repair::simulate_trajectory(&h, &policy, 10.0, RngStream::new(4, r), Sampler::Inversion).unwrap();
        for ev in &tr.events {
            if ev.time() > h.a1() {
                assert_eq!(ev.degree().unwrap().value(), 0.0);
            }
        }
    }
}

/// Renewal function M(t) from the renewal equation M = F + M * dF, discretised
/// with the trapezoidal Riemann–Stieltjes rule on a uniform grid.
fn renewal_function(h: &HazardSpecF64, horizon: f64, steps: usize) -> f64 {
    let dt = horizon / steps as f64;
    let cdf: Vec<f64> = (0..=steps)
        .map(|k| 1.0 - (-h.cumulative(k as f64 * dt).unwrap()).exp())
        .collect();
    let mut m = vec![0.0; steps + 1];
    let df1 = cdf[1] - cdf[0];
    for i in 1..=steps {
        let mut s = cdf[i] + 0.5 * m[i - 1] * df1;
        for k in 2..=i {
            s += 0.5 * (m[i - k + 1] + m[i - k]) * (cdf[k] - cdf[k - 1]);
        }
        m[i] = s / (1.0 - 0.5 * df1);
    }
    m[steps]
}

#[test]
fn renewal_matches_renewal_equation() {
    let h = paper();
    for (horizon, steps) in [(1.0, 2000), (10.0, 10_000)] {
        // the scheme is first order here; Richardson-extrapolate two resolutions
        let coarse = renewal_function(&h, horizon, steps);
        let fine = renewal_function(&h, horizon, 2 * steps);
        let reference = 2.0 * fine - coarse;
        let est = estimate_process_mc(&h, &Process::Replacement, horizon, 100_000, 21).unwrap();
        let allowance = 3.0 * est.std_error().unwrap() + (fine - coarse).abs();
        assert!(
            (est.value - reference).abs() <= allowance,
            "horizon {horizon}: MC {} vs renewal equation {reference}",
            est.value
        );
    }
}

#[test]
fn renewal_of_exponential_lifetimes_is_poisson() {
    let mut params = HazardParams::paper_example();
    params.lambda = 0.7;
    params.dfr_phase = false;
    params.ifr_phase = false;
    let h = HazardSpec::new(params).unwrap();
    let m = moments(&counts_f64(&h, &Process::Replacement, 20.0, 50_000, 22));
    assert!((m.mean - 14.0).abs() <= 3.0 * m.se_mean(), "{}", m.mean);
    assert!((m.var / m.mean - 1.0).abs() < 0.05);
}
