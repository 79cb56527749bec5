//! Goodness-of-fit testing for the Rayleigh null.
//!
//! The decision statistic is the standardized departure T = Delta_hat /
//! sigma_hat^2, where sigma_hat is the Rayleigh moment fit. Both numerator
//! and denominator are homogeneous of degree two, so T is exactly
//! scale-free and its null distribution can be simulated once from
//! Rayleigh(1) and applied to data on any scale.
//!
//! Under the null T concentrates at zero. Alternatives that are
//! overdispersed relative to the Rayleigh law (heavier tail for the same
//! second moment: exponential, Pareto, lognormal, half-normal, linear
//! failure rate) push the departure negative, so the test rejects when T
//! falls below the lower alpha-quantile of the null distribution. The
//! Monte Carlo and bootstrap p-values count null replicates at or below
//! the observed value, and the asymptotic test compares
//! sqrt(n) T / sigma_0 against the lower normal quantile.

use crate::distributions::{fit_rayleigh_moment, DistributionModel, Sample};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamKind};
use crate::special::{norm_cdf, norm_quantile};
use crate::ustat::{asymptotic_variance, delta_hat_fast};
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Mutex, OnceLock};

/// Which procedure produced a test decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    MonteCarlo,
    Asymptotic,
    Bootstrap,
}

impl std::fmt::Display for TestMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestMethod::MonteCarlo => write!(f, "monte_carlo"),
            TestMethod::Asymptotic => write!(f, "asymptotic"),
            TestMethod::Bootstrap => write!(f, "bootstrap"),
        }
    }
}

/// Outcome of one test run, together with the run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    /// Raw departure estimate Delta_hat.
    pub statistic: f64,
    /// Delta_hat / sigma_hat^2, the scale-free decision statistic.
    pub standardized: f64,
    pub method: TestMethod,
    /// Rejection threshold on the standardized scale (rejection region is
    /// below it); absent for the bootstrap.
    pub critical_value: Option<f64>,
    pub p_value: Option<f64>,
    pub reject: bool,
    pub n: usize,
    pub s: u32,
    pub alpha: f64,
    /// Replicates behind the decision (0 for the asymptotic test).
    pub reps: u64,
    pub seed: u64,
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() && 0.0 < alpha && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::InvalidConfig(format!("alpha must be in (0,1), got {alpha}")))
    }
}

fn check_reps(reps: u64) -> Result<u64> {
    if reps >= 1000 {
        Ok(reps)
    } else {
        Err(Error::InvalidConfig(format!("at least 1000 replicates required, got {reps}")))
    }
}

/// The squared moment fit, sum x^2 / (2n), computed without the sqrt
/// round trip.
fn sigma_hat_sq(sample: &Sample) -> Result<f64> {
    let ss = sample.sum_of_squares();
    if ss <= 0.0 {
        return Err(Error::InvalidSample(
            "moment fit needs at least one strictly positive value".into(),
        ));
    }
    Ok(ss / (2.0 * sample.n() as f64))
}

/// The scale-free statistic Delta_hat / sigma_hat^2.
///
/// Equals Delta_hat of the sample rescaled by the fitted sigma, by degree-2
/// homogeneity of the estimator. A constant sample gives 1 at s = 1.
pub fn standardized_statistic(sample: &Sample, s: u32) -> Result<f64> {
    let delta = delta_hat_fast(sample, s)?;
    Ok(delta.value / sigma_hat_sq(sample)?)
}

// Replicate streams are indexed by (n, replicate) so the per-n pools of
// one study stay disjoint while remaining schedule-independent.
fn pack_index(n: usize, rep: u64) -> u64 {
    ((n as u64) << 40) ^ rep
}

/// Sorted pool of null standardized statistics from Rayleigh(1) samples.
fn null_pool(n: usize, s: u32, reps: u64, seed: u64) -> Result<Vec<f64>> {
    let unit = DistributionModel::rayleigh(1.0).expect("unit sigma is valid");
    let mut pool: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, StreamKind::CriticalValue, pack_index(n, rep));
            let sample = unit.sample_with(n, &mut rng)?;
            standardized_statistic(&sample, s)
        })
        .collect::<Result<_>>()?;
    pool.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(pool)
}

/// Lower empirical alpha-quantile: the ceil(alpha * len)-th order statistic.
fn lower_quantile(sorted: &[f64], alpha: f64) -> f64 {
    let k = ((alpha * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CvKey {
    n: usize,
    s: u32,
    alpha_bits: u64,
    reps: u64,
    seed: u64,
}

fn cv_cache() -> &'static Mutex<HashMap<CvKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<CvKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Monte Carlo critical value: the lower alpha-quantile of the null
/// standardized statistic at sample size n.
///
/// Deterministic given (n, s, alpha, reps, seed) and memoized on that key
/// for the lifetime of the process; see [`load_cv_cache`] / [`save_cv_cache`]
/// for persistence across runs.
pub fn mc_critical_value(n: usize, s: u32, alpha: f64, reps: u64, seed: u64) -> Result<f64> {
    let alpha = check_alpha(alpha)?;
    let reps = check_reps(reps)?;
    if n < s as usize + 1 {
        return Err(Error::InvalidConfig(format!("sample size {n} too small for order {s}")));
    }
    let key = CvKey { n, s, alpha_bits: alpha.to_bits(), reps, seed };
    if let Some(&v) = cv_cache().lock().unwrap().get(&key) {
        return Ok(v);
    }
    let pool = null_pool(n, s, reps, seed)?;
    let value = lower_quantile(&pool, alpha);
    cv_cache().lock().unwrap().insert(key, value);
    Ok(value)
}

/// Drop every memoized critical value (mainly for determinism tests and
/// benchmarks that must observe cold-cache behavior).
pub fn clear_cv_cache() {
    cv_cache().lock().unwrap().clear();
}

/// Load persisted critical values (lines of `n,s,alpha,reps,seed,value`).
pub fn load_cv_cache(path: &std::path::Path) -> std::io::Result<usize> {
    let file = std::fs::File::open(path)?;
    let mut added = 0;
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            continue;
        }
        let parse = || -> Option<(CvKey, f64)> {
            Some((
                CvKey {
                    n: parts[0].parse().ok()?,
                    s: parts[1].parse().ok()?,
                    alpha_bits: parts[2].parse::<f64>().ok()?.to_bits(),
                    reps: parts[3].parse().ok()?,
                    seed: parts[4].parse().ok()?,
                },
                parts[5].parse().ok()?,
            ))
        };
        if let Some((key, value)) = parse() {
            cv_cache().lock().unwrap().insert(key, value);
            added += 1;
        }
    }
    Ok(added)
}

/// Persist every memoized critical value, sorted for stable output.
pub fn save_cv_cache(path: &std::path::Path) -> std::io::Result<usize> {
    let cache = cv_cache().lock().unwrap();
    let mut entries: Vec<(CvKey, f64)> = cache.iter().map(|(k, v)| (*k, *v)).collect();
    drop(cache);
    entries.sort_by_key(|(k, _)| (k.n, k.s, k.alpha_bits, k.reps, k.seed));
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "# n,s,alpha,reps,seed,critical_value")?;
    for (k, v) in &entries {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            k.n,
            k.s,
            f64::from_bits(k.alpha_bits),
            k.reps,
            k.seed,
            v
        )?;
    }
    Ok(entries.len())
}

/// Monte Carlo test: standardized statistic against the simulated null.
///
/// The p-value is the proportion of null replicates at or below the
/// observed statistic; rejection means the statistic fell strictly below
/// the null alpha-quantile, so reject implies p < alpha up to ties at the
/// quantile boundary.
pub fn run_test_mc(
    sample: &Sample,
    s: u32,
    alpha: f64,
    reps: u64,
    seed: u64,
) -> Result<GofResult> {
    let alpha = check_alpha(alpha)?;
    let reps = check_reps(reps)?;
    let n = sample.n();
    let statistic = delta_hat_fast(sample, s)?.value;
    let standardized = statistic / sigma_hat_sq(sample)?;

    let pool = null_pool(n, s, reps, seed)?;
    let critical = lower_quantile(&pool, alpha);
    // Also memoize for study reuse.
    let key = CvKey { n, s, alpha_bits: alpha.to_bits(), reps, seed };
    cv_cache().lock().unwrap().insert(key, critical);

    let below = pool.partition_point(|&v| v <= standardized);
    let p_value = below as f64 / reps as f64;
    Ok(GofResult {
        statistic,
        standardized,
        method: TestMethod::MonteCarlo,
        critical_value: Some(critical),
        p_value: Some(p_value),
        reject: standardized < critical,
        n,
        s,
        alpha,
        reps,
        seed,
    })
}

fn sigma0_sq(s: u32) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&s) {
        return Ok(v);
    }
    let unit = DistributionModel::rayleigh(1.0).expect("unit sigma is valid");
    let v = asymptotic_variance(&unit, s)?.total;
    cache.lock().unwrap().insert(s, v);
    Ok(v)
}

/// Asymptotic normal test.
///
/// Under the null sqrt(n) T is asymptotically centered normal with the
/// Rayleigh(1) limit variance sigma_0^2 (rescaling by the fitted sigma
/// perturbs T only at second order because the null departure is zero).
/// No minimum sample size is enforced; the normal approximation is the
/// caller's to accept.
pub fn run_test_asymptotic(sample: &Sample, s: u32, alpha: f64) -> Result<GofResult> {
    let alpha = check_alpha(alpha)?;
    let n = sample.n();
    let statistic = delta_hat_fast(sample, s)?.value;
    let standardized = statistic / sigma_hat_sq(sample)?;

    let sigma0 = sigma0_sq(s)?.sqrt();
    let z = (n as f64).sqrt() * standardized / sigma0;
    let z_alpha = norm_quantile(1.0 - alpha);
    let critical = -z_alpha * sigma0 / (n as f64).sqrt();
    Ok(GofResult {
        statistic,
        standardized,
        method: TestMethod::Asymptotic,
        critical_value: Some(critical),
        p_value: Some(norm_cdf(z)),
        reject: z < -z_alpha,
        n,
        s,
        alpha,
        reps: 0,
        seed: 0,
    })
}

/// Parametric bootstrap p-value.
///
/// Fits sigma by the moment estimator, regenerates `reps` Rayleigh
/// (sigma_hat) samples of the same size, and reports the proportion of
/// bootstrap departures strictly greater than the observed one (raw
/// Delta_hat on both sides; standardization is unnecessary because the
/// bootstrap regenerates at the fitted scale). Small p-values therefore
/// flag departures toward the concentrated side, the direction this
/// resampling procedure probes; the Monte Carlo test covers the heavy
/// side. A p-value exactly at alpha does not reject.
pub fn bootstrap_pvalue(
    sample: &Sample,
    s: u32,
    alpha: f64,
    reps: u64,
    seed: u64,
) -> Result<GofResult> {
    let alpha = check_alpha(alpha)?;
    let reps = check_reps(reps)?;
    let n = sample.n();
    let sigma = fit_rayleigh_moment(sample)?;
    let statistic = delta_hat_fast(sample, s)?.value;
    let fitted = DistributionModel::rayleigh(sigma)?;

    let above: u64 = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, StreamKind::Bootstrap, rep);
            let boot = fitted.sample_with(n, &mut rng)?;
            let d = delta_hat_fast(&boot, s)?.value;
            Ok(u64::from(d > statistic))
        })
        .sum::<Result<u64>>()?;
    let p_value = above as f64 / reps as f64;
    Ok(GofResult {
        statistic,
        standardized: statistic / sigma_hat_sq(sample)?,
        method: TestMethod::Bootstrap,
        critical_value: None,
        p_value: Some(p_value),
        reject: p_value < alpha,
        n,
        s,
        alpha,
        reps,
        seed,
    })
}

/// Classical EDF tests against the fitted Rayleigh, with parametric
/// bootstrap null distributions (the estimated-parameter case; published
/// tables do not apply).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalTest {
    KolmogorovSmirnov,
    CramerVonMises,
    AndersonDarling,
}

impl std::fmt::Display for ClassicalTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassicalTest::KolmogorovSmirnov => write!(f, "ks"),
            ClassicalTest::CramerVonMises => write!(f, "cvm"),
            ClassicalTest::AndersonDarling => write!(f, "ad"),
        }
    }
}

/// Kolmogorov-Smirnov statistic from sorted probability transforms.
pub fn ks_statistic(sorted_u: &[f64]) -> f64 {
    let n = sorted_u.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &u) in sorted_u.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - u).max(u - i as f64 / n);
    }
    d
}

/// Cramer-von Mises statistic from sorted probability transforms.
pub fn cvm_statistic(sorted_u: &[f64]) -> f64 {
    let n = sorted_u.len() as f64;
    let mut w = 1.0 / (12.0 * n);
    for (i, &u) in sorted_u.iter().enumerate() {
        let z = u - (2.0 * i as f64 + 1.0) / (2.0 * n);
        w += z * z;
    }
    w
}

/// Anderson-Darling statistic from sorted probability transforms.
pub fn ad_statistic(sorted_u: &[f64]) -> f64 {
    let n = sorted_u.len();
    let nf = n as f64;
    let clamp = |u: f64| u.clamp(1e-300, 1.0 - 1e-16);
    let mut sum = 0.0;
    for i in 0..n {
        let a = clamp(sorted_u[i]).ln();
        let b = (-clamp(sorted_u[n - 1 - i])).ln_1p();
        sum += (2.0 * i as f64 + 1.0) * (a + b);
    }
    -nf - sum / nf
}

fn edf_statistic(test: ClassicalTest, sample: &Sample, dist: &DistributionModel) -> f64 {
    let u: Vec<f64> = sample.values().iter().map(|&x| dist.cdf(x)).collect();
    match test {
        ClassicalTest::KolmogorovSmirnov => ks_statistic(&u),
        ClassicalTest::CramerVonMises => cvm_statistic(&u),
        ClassicalTest::AndersonDarling => ad_statistic(&u),
    }
}

/// Classical goodness-of-fit test with estimated Rayleigh parameter.
///
/// The statistic is computed against Rayleigh(sigma_hat); each bootstrap
/// replicate refits its own sigma before computing the statistic, so the
/// p-value reflects the estimated-parameter null distribution. Large
/// statistics are evidence against the null.
pub fn classical_gof(
    sample: &Sample,
    test: ClassicalTest,
    alpha: f64,
    reps: u64,
    seed: u64,
) -> Result<GofResult> {
    let alpha = check_alpha(alpha)?;
    let reps = check_reps(reps)?;
    let n = sample.n();
    let sigma = fit_rayleigh_moment(sample)?;
    let fitted = DistributionModel::rayleigh(sigma)?;
    let observed = edf_statistic(test, sample, &fitted);

    let at_or_above: u64 = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, StreamKind::Bootstrap, rep);
            let boot = fitted.sample_with(n, &mut rng)?;
            let sigma_star = fit_rayleigh_moment(&boot)?;
            let refit = DistributionModel::rayleigh(sigma_star)?;
            Ok(u64::from(edf_statistic(test, &boot, &refit) >= observed))
        })
        .sum::<Result<u64>>()?;
    let p_value = at_or_above as f64 / reps as f64;
    Ok(GofResult {
        statistic: observed,
        standardized: observed,
        method: TestMethod::Bootstrap,
        critical_value: None,
        p_value: Some(p_value),
        reject: p_value < alpha,
        n,
        s: 0,
        alpha,
        reps,
        seed,
    })
}

/// Specification of a size or power study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub alternative: DistributionModel,
    pub n_grid: Vec<usize>,
    pub s: u32,
    pub alpha: f64,
    pub outer_reps: u64,
    pub critical_value_reps: u64,
    pub seed: u64,
}

/// One row of a study table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub rejection_rate: f64,
    pub std_error: f64,
}

/// Results of a size or power study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub alternative: String,
    pub s: u32,
    pub alpha: f64,
    pub outer_reps: u64,
    pub critical_value_reps: u64,
    pub seed: u64,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    /// CSV with the canonical header; fully deterministic given the config.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alternative,n,alpha,reps,rejection_rate,std_error,seed\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.alternative,
                row.n,
                self.alpha,
                self.outer_reps,
                row.rejection_rate,
                row.std_error,
                self.seed
            ));
        }
        out
    }
}

fn check_study(config: &StudyConfig) -> Result<()> {
    check_alpha(config.alpha)?;
    check_reps(config.outer_reps)?;
    check_reps(config.critical_value_reps)?;
    if config.s == 0 {
        return Err(Error::InvalidConfig("kernel order s must be at least 1".into()));
    }
    if config.n_grid.is_empty() {
        return Err(Error::InvalidConfig("study needs a non-empty n grid".into()));
    }
    if let Some(&n) = config.n_grid.iter().find(|&&n| n < config.s as usize + 1) {
        return Err(Error::InvalidConfig(format!(
            "sample size {n} too small for kernel order {}",
            config.s
        )));
    }
    Ok(())
}

/// Empirical rejection rate against the configured alternative.
///
/// For each n the null critical value is simulated once (memoized), then
/// `outer_reps` samples are drawn from the alternative; each replicate's
/// stream depends only on (seed, n, replicate), so tables are identical
/// across worker counts.
pub fn power_study(config: &StudyConfig) -> Result<StudyTable> {
    check_study(config)?;
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let critical = mc_critical_value(
            n,
            config.s,
            config.alpha,
            config.critical_value_reps,
            config.seed,
        )?;
        let rejections: u64 = (0..config.outer_reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng =
                    stream_rng(config.seed, StreamKind::OuterReplicate, pack_index(n, rep));
                let sample = config.alternative.sample_with(n, &mut rng)?;
                let t = standardized_statistic(&sample, config.s)?;
                Ok(u64::from(t < critical))
            })
            .sum::<Result<u64>>()?;
        let rate = rejections as f64 / config.outer_reps as f64;
        let std_error = (rate * (1.0 - rate) / config.outer_reps as f64).sqrt();
        rows.push(StudyRow { n, rejection_rate: rate, std_error });
    }
    Ok(StudyTable {
        alternative: config.alternative.token(),
        s: config.s,
        alpha: config.alpha,
        outer_reps: config.outer_reps,
        critical_value_reps: config.critical_value_reps,
        seed: config.seed,
        rows,
    })
}

/// Size study: the power study run under a Rayleigh alternative.
pub fn size_study(config: &StudyConfig) -> Result<StudyTable> {
    if !matches!(config.alternative, DistributionModel::Rayleigh { .. }) {
        return Err(Error::InvalidConfig(
            "size study requires a Rayleigh alternative; use power_study otherwise".into(),
        ));
    }
    power_study(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardized_statistic_examples() {
        for &c in &[0.5, 1.0, 7.25] {
            let constant = Sample::new(vec![c; 8]).unwrap();
            let t = standardized_statistic(&constant, 1).unwrap();
            assert!((t - 1.0).abs() < 1e-14, "c={c}: {t}");
        }

        let sample = Sample::new(vec![0.3, 1.4, 2.0, 0.9, 1.1]).unwrap();
        let base = standardized_statistic(&sample, 1).unwrap();
        // Exact invariance under binary scaling; near-exact otherwise.
        let doubled = standardized_statistic(&sample.scaled(2.0).unwrap(), 1).unwrap();
        assert_eq!(doubled, base);
        let tripled = standardized_statistic(&sample.scaled(3.0).unwrap(), 1).unwrap();
        assert!((tripled - base).abs() < 1e-14);
    }

    #[test]
    fn standardized_statistic_is_reproducible() {
        let r = DistributionModel::rayleigh(1.0).unwrap();
        let sample = r.sample_iid(50, 31).unwrap();
        let a = standardized_statistic(&sample, 1).unwrap();
        let b = standardized_statistic(&r.sample_iid(50, 31).unwrap(), 1).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn critical_values_order_by_alpha() {
        // Lower-tail quantiles: the 1% threshold sits below the 5% one.
        let c01 = mc_critical_value(30, 1, 0.01, 2000, 5).unwrap();
        let c05 = mc_critical_value(30, 1, 0.05, 2000, 5).unwrap();
        assert!(c01 <= c05, "c01={c01}, c05={c05}");
        assert!(c05 < 0.0, "null lower quantile should be negative: {c05}");
    }

    #[test]
    fn critical_value_is_memoized_and_deterministic() {
        let a = mc_critical_value(25, 1, 0.05, 1000, 77).unwrap();
        let b = mc_critical_value(25, 1, 0.05, 1000, 77).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn critical_values_stable_across_seeds() {
        // Two independent seeds must agree within Monte Carlo error; the
        // quantile standard error is estimated by resampling the pool.
        let n = 30;
        let reps = 10_000;
        let c1 = mc_critical_value(n, 1, 0.05, reps, 101).unwrap();
        let c2 = mc_critical_value(n, 1, 0.05, reps, 202).unwrap();

        let pool = null_pool(n, 1, reps, 101).unwrap();
        let mut rng = stream_rng(909, StreamKind::Sampling, 0);
        let mut quantiles = Vec::with_capacity(200);
        for _ in 0..200 {
            let mut resample: Vec<f64> = (0..pool.len())
                .map(|_| {
                    use rand_core::RngCore;
                    pool[(rng.next_u64() % pool.len() as u64) as usize]
                })
                .collect();
            resample.sort_by(|a, b| a.partial_cmp(b).unwrap());
            quantiles.push(lower_quantile(&resample, 0.05));
        }
        let mean = quantiles.iter().sum::<f64>() / quantiles.len() as f64;
        let var = quantiles.iter().map(|q| (q - mean).powi(2)).sum::<f64>()
            / (quantiles.len() - 1) as f64;
        let se = var.sqrt();
        assert!(
            (c1 - c2).abs() <= 3.0 * (2.0f64).sqrt() * se,
            "c1={c1}, c2={c2}, se={se}"
        );
    }

    #[test]
    fn mc_test_rejects_lognormal_and_keeps_rayleigh() {
        let ln = DistributionModel::log_normal(1.0, 1.0).unwrap();
        let mut rejections = 0;
        for i in 0..60 {
            let sample = ln.sample_iid(20, 400 + i).unwrap();
            let res = run_test_mc(&sample, 1, 0.05, 1000, 17).unwrap();
            rejections += res.reject as u32;
        }
        assert!(rejections >= 48, "lognormal rejections {rejections}/60");

        let r = DistributionModel::rayleigh(2.0).unwrap();
        let mut rejections = 0;
        for i in 0..60 {
            let sample = r.sample_iid(20, 800 + i).unwrap();
            let res = run_test_mc(&sample, 1, 0.05, 1000, 17).unwrap();
            rejections += res.reject as u32;
        }
        assert!(rejections <= 10, "null rejections {rejections}/60");
    }

    #[test]
    fn mc_test_is_scale_invariant() {
        let d = DistributionModel::weibull(1.2, 1.0).unwrap();
        let sample = d.sample_iid(40, 50).unwrap();
        let base = run_test_mc(&sample, 1, 0.05, 1000, 3).unwrap();
        // Binary scaling is float-exact end to end.
        let doubled = run_test_mc(&sample.scaled(2.0).unwrap(), 1, 0.05, 1000, 3).unwrap();
        assert_eq!(base.standardized.to_bits(), doubled.standardized.to_bits());
        assert_eq!(base.reject, doubled.reject);
        assert_eq!(base.p_value, doubled.p_value);
        // Arbitrary scaling preserves the decision.
        let scaled = run_test_mc(&sample.scaled(7.3).unwrap(), 1, 0.05, 1000, 3).unwrap();
        assert_eq!(base.reject, scaled.reject);
    }

    #[test]
    fn mc_decision_coheres_with_p_value() {
        let d = DistributionModel::half_normal(1.0).unwrap();
        for i in 0..30 {
            let sample = d.sample_iid(25, 9000 + i).unwrap();
            let res = run_test_mc(&sample, 1, 0.05, 1000, 4).unwrap();
            if res.reject {
                assert!(res.p_value.unwrap() < 0.05);
            } else {
                assert!(res.p_value.unwrap() >= 0.05 - 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_sample_is_not_special_cased() {
        let constant = Sample::new(vec![3.0; 12]).unwrap();
        let res = run_test_mc(&constant, 1, 0.05, 1000, 8).unwrap();
        assert!((res.standardized - 1.0).abs() < 1e-14);
        // The rejection region is the lower tail; a constant sample sits on
        // the concentrated side and is not rejected.
        assert!(!res.reject);
    }

    #[test]
    fn asymptotic_threshold_constant() {
        assert!((norm_quantile(0.95) - 1.6449).abs() < 1e-4);
        let r = DistributionModel::rayleigh(1.0).unwrap();
        let sample = r.sample_iid(200, 21).unwrap();
        let res = run_test_asymptotic(&sample, 1, 0.05).unwrap();
        assert_eq!(res.method, TestMethod::Asymptotic);
        assert!(res.p_value.unwrap() > 0.0 && res.p_value.unwrap() < 1.0);
    }

    #[test]
    fn bootstrap_detects_concentrated_departures() {
        // The bootstrap count probes the concentrated direction: a narrow
        // uniform produces a large positive departure and tiny p-values.
        let narrow = DistributionModel::uniform(0.9, 1.1).unwrap();
        let mut rejections = 0;
        for i in 0..20 {
            let sample = narrow.sample_iid(20, 40 + i).unwrap();
            let res = bootstrap_pvalue(&sample, 1, 0.05, 1000, 19).unwrap();
            rejections += res.reject as u32;
        }
        assert!(rejections >= 18, "{rejections}/20");

        // Rayleigh data keep moderate p-values.
        let r = DistributionModel::rayleigh(3.0).unwrap();
        let mut rejections = 0;
        for i in 0..20 {
            let sample = r.sample_iid(20, 140 + i).unwrap();
            let res = bootstrap_pvalue(&sample, 1, 0.05, 1000, 19).unwrap();
            rejections += res.reject as u32;
        }
        assert!(rejections <= 4, "{rejections}/20");
    }

    #[test]
    fn classical_statistic_formulas() {
        // A single point with probability transform one half.
        assert_eq!(ks_statistic(&[0.5]), 0.5);

        // The minimizing configuration u_i = (2i-1)/(2n).
        let n = 10;
        let u: Vec<f64> = (1..=n).map(|i| (2.0 * i as f64 - 1.0) / (2.0 * n as f64)).collect();
        assert!((cvm_statistic(&u) - 1.0 / (12.0 * n as f64)).abs() < 1e-15);

        // AD on the same configuration is small and positive.
        let ad = ad_statistic(&u);
        assert!(ad > 0.0 && ad < 1.0, "{ad}");
    }

    #[test]
    fn classical_tests_accept_null_and_reject_lognormal() {
        let r = DistributionModel::rayleigh(1.0).unwrap();
        let sample = r.sample_iid(50, 33).unwrap();
        for test in [
            ClassicalTest::KolmogorovSmirnov,
            ClassicalTest::CramerVonMises,
            ClassicalTest::AndersonDarling,
        ] {
            let res = classical_gof(&sample, test, 0.05, 1000, 2).unwrap();
            assert!(res.p_value.unwrap() > 0.05, "{test}: {:?}", res.p_value);
        }

        let ln = DistributionModel::log_normal(1.0, 1.0).unwrap();
        let bad = ln.sample_iid(50, 34).unwrap();
        for test in [
            ClassicalTest::KolmogorovSmirnov,
            ClassicalTest::CramerVonMises,
            ClassicalTest::AndersonDarling,
        ] {
            let res = classical_gof(&bad, test, 0.05, 1000, 2).unwrap();
            assert!(res.reject, "{test} should reject lognormal data");
        }
    }

    #[test]
    fn study_tables_are_deterministic_and_formatted() {
        let config = StudyConfig {
            alternative: DistributionModel::rayleigh(1.0).unwrap(),
            n_grid: vec![10, 20],
            s: 1,
            alpha: 0.05,
            outer_reps: 1000,
            critical_value_reps: 1000,
            seed: 123,
        };
        let a = size_study(&config).unwrap();
        let b = size_study(&config).unwrap();
        assert_eq!(a, b);

        let csv = a.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "alternative,n,alpha,reps,rejection_rate,std_error,seed"
        );
        assert_eq!(csv.lines().count(), 3);
        for row in &a.rows {
            assert!(row.rejection_rate >= 0.0 && row.rejection_rate <= 1.0);
            let se = (row.rejection_rate * (1.0 - row.rejection_rate) / 1000.0).sqrt();
            assert!((row.std_error - se).abs() < 1e-15);
        }
    }

    #[test]
    fn size_study_requires_rayleigh() {
        let config = StudyConfig {
            alternative: DistributionModel::exponential(1.0).unwrap(),
            n_grid: vec![10],
            s: 1,
            alpha: 0.05,
            outer_reps: 1000,
            critical_value_reps: 1000,
            seed: 1,
        };
        assert!(size_study(&config).is_err());
        assert!(power_study(&config).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(mc_critical_value(10, 1, 0.0, 1000, 1).is_err());
        assert!(mc_critical_value(10, 1, 0.05, 10, 1).is_err());
        assert!(mc_critical_value(1, 1, 0.05, 1000, 1).is_err());
        let config = StudyConfig {
            alternative: DistributionModel::rayleigh(1.0).unwrap(),
            n_grid: vec![],
            s: 1,
            alpha: 0.05,
            outer_reps: 1000,
            critical_value_reps: 1000,
            seed: 1,
        };
        assert!(size_study(&config).is_err());
    }
}
