//! Seeded Monte-Carlo validation of the closed forms.
//!
//! Every trial draws from its own counter-derived RNG stream, so results are
//! bit-identical for a given seed regardless of how trials are distributed
//! across workers: the only cross-trial reduction is an integer sum.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{ConditionalOccupancyPmf, PmfMethod};
use crate::error::{Error, Result};
use crate::model::{self, CacheScheme, RequestModel, SystemConfig};

/// z-score of the two-sided 95% normal quantile, used for reported intervals.
pub const Z95: f64 = 1.959963984540054;

/// How random-placement trials refresh the cache.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CachePolicy {
    /// Draw a fresh uniformly random M-subset every trial — the placement
    /// model taken literally.
    ResamplePerTrial,
    /// Keep the fixed cache {1..M} across trials. By symmetry of uniform
    /// requests this must converge to the same outage; kept as a cross-check.
    FixedPrefix,
}

/// Outcome of a Monte-Carlo outage run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationReport {
    pub scheme: CacheScheme,
    #[serde(flatten)]
    pub config: SystemConfig,
    pub alpha: Option<f64>,
    pub trials: u64,
    pub outage_count: u64,
    pub p_out_hat: f64,
    pub ci_half_width_95: f64,
    pub seed: u64,
}

/// Root generator for a seed: the 32-byte ChaCha key is expanded from the
/// 64-bit seed by SplitMix64 so that near-identical seeds still produce
/// unrelated keys. Trial t then runs on stream t of this generator.
pub(crate) fn base_rng(seed: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0_u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_rng(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng
}

/// A uniform double in [0, 1): the top 53 bits of one 64-bit draw.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1_u64 << 53) as f64)
}

/// Inverse-CDF sampling: the smallest 1-based index i with cdf[i-1] > u.
///
/// Validates the cdf shape on every call; the simulation loops use the
/// unchecked variant after validating once.
pub fn sample_request(cdf: &[f64], u: f64) -> Result<u32> {
    validate_cdf(cdf)?;
    if !(0.0..1.0).contains(&u) {
        return Err(Error::domain(format!(
            "uniform variate must lie in [0, 1), got {u}"
        )));
    }
    Ok(sample_request_unchecked(cdf, u))
}

fn validate_cdf(cdf: &[f64]) -> Result<()> {
    if cdf.is_empty() {
        return Err(Error::domain("cdf must be non-empty"));
    }
    if cdf.iter().any(|c| !c.is_finite()) || cdf.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("cdf must be finite and non-decreasing"));
    }
    let last = *cdf.last().expect("non-empty");
    if (last - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "cdf must reach 1 (final entry {last})"
        )));
    }
    Ok(())
}

#[inline]
fn sample_request_unchecked(cdf: &[f64], u: f64) -> u32 {
    // partition_point counts entries ≤ u; +1 converts to the 1-based file id.
    // The min guards the sliver where u exceeds a final entry just below 1.
    (cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) + 1) as u32
}

/// Cumulative request distribution over file ids 1..=N.
fn request_cdf(model: RequestModel, n: u32) -> Result<Vec<f64>> {
    let pmf = model::request_pmf(model, n)?;
    let mut acc = crate::numerics::NeumaierSum::new();
    let mut cdf = Vec::with_capacity(pmf.len());
    for p in pmf {
        acc.add(p);
        cdf.push(acc.value());
    }
    // Guarantee the final entry is exactly 1 so u ∈ [0,1) can never fall off
    // the end of the table.
    *cdf.last_mut().expect("n >= 1") = 1.0;
    Ok(cdf)
}

/// Everything a trial needs that is shared and immutable.
struct TrialContext {
    cdf: Vec<f64>,
    library_size: u32,
    cache_size: u32,
    capacity: u32,
    requests: u32,
    resample_cache: bool,
}

impl TrialContext {
    fn new(
        config: &SystemConfig,
        scheme: CacheScheme,
        alpha: Option<f64>,
        policy: CachePolicy,
    ) -> Result<Self> {
        let config = config.validate()?;
        let request_model = match (scheme, alpha) {
            (CacheScheme::Rap, None) => RequestModel::Uniform,
            (CacheScheme::Rap, Some(_)) => {
                return Err(Error::configuration(
                    "random placement takes no Zipf shape; drop alpha",
                ))
            }
            (CacheScheme::Mop, Some(alpha)) => RequestModel::Zipf { alpha },
            (CacheScheme::Mop, None) => {
                return Err(Error::configuration(
                    "most-popular placement requires a Zipf shape alpha",
                ))
            }
        };
        Ok(TrialContext {
            cdf: request_cdf(request_model, config.library_size)?,
            library_size: config.library_size,
            cache_size: config.cache_size,
            capacity: config.backhaul_capacity,
            requests: config.num_requests,
            resample_cache: scheme == CacheScheme::Rap && policy == CachePolicy::ResamplePerTrial,
        })
    }
}

/// Reusable per-worker state; nothing here survives a trial observably.
struct Scratch {
    /// Permutation of 1..=N used to draw random cache subsets. Restored to
    /// its canonical sorted order after every trial, so each trial's subset
    /// is a pure function of that trial's RNG stream.
    perm: Vec<u32>,
    swaps: Vec<usize>,
    /// Generation stamps instead of clear-per-trial booleans: entry f is
    /// "set" iff it equals the current generation.
    cache_stamp: Vec<u64>,
    seen_stamp: Vec<u64>,
    generation: u64,
}

impl Scratch {
    fn new(library_size: u32, cache_size: u32) -> Self {
        Scratch {
            perm: (1..=library_size).collect(),
            swaps: Vec::with_capacity(cache_size as usize),
            cache_stamp: vec![0; library_size as usize + 1],
            seen_stamp: vec![0; library_size as usize + 1],
            generation: 0,
        }
    }
}

fn run_trial_in(ctx: &TrialContext, scratch: &mut Scratch, rng: &mut ChaCha8Rng) -> bool {
    scratch.generation += 1;
    let generation = scratch.generation;

    if ctx.resample_cache {
        // Partial Fisher–Yates: after i steps, perm[0..i] is a uniform
        // i-subset in uniform order. The modulo draw is biased by less than
        // N/2⁶⁴ ≈ 5e-18 per step — orders of magnitude below any Monte-Carlo
        // resolution reachable here.
        scratch.swaps.clear();
        let n = ctx.library_size as usize;
        for i in 0..ctx.cache_size as usize {
            let j = i + (rng.next_u64() % (n - i) as u64) as usize;
            scratch.perm.swap(i, j);
            scratch.swaps.push(j);
            scratch.cache_stamp[scratch.perm[i] as usize] = generation;
        }
    }

    let mut distinct = 0_u32;
    let mut success = true;
    for _ in 0..ctx.requests {
        let u = uniform01(rng);
        let file = sample_request_unchecked(&ctx.cdf, u) as usize;
        let cached = if ctx.resample_cache {
            scratch.cache_stamp[file] == generation
        } else {
            file as u32 <= ctx.cache_size
        };
        if cached || scratch.seen_stamp[file] == generation {
            continue;
        }
        scratch.seen_stamp[file] = generation;
        distinct += 1;
        if distinct > ctx.capacity {
            success = false;
            break;
        }
    }

    // Undo the swaps in reverse so the permutation is canonical again.
    for i in (0..scratch.swaps.len()).rev() {
        let j = scratch.swaps[i];
        scratch.perm.swap(i, j);
    }
    success
}

/// Runs one delivery round and reports whether it succeeded (the distinct
/// non-cached files requested fit within the backhaul capacity).
///
/// Convenience entry point; the Monte-Carlo drivers share validated state
/// across trials instead.
pub fn run_trial(
    config: &SystemConfig,
    scheme: CacheScheme,
    alpha: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let ctx = TrialContext::new(config, scheme, alpha, CachePolicy::ResamplePerTrial)?;
    let mut scratch = Scratch::new(config.library_size, config.cache_size);
    Ok(run_trial_in(&ctx, &mut scratch, rng))
}

/// Monte-Carlo outage estimate with the default cache policy (random
/// placement redraws its subset every trial).
pub fn monte_carlo_outage(
    config: &SystemConfig,
    scheme: CacheScheme,
    alpha: Option<f64>,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    monte_carlo_outage_with_policy(config, scheme, alpha, trials, seed, CachePolicy::ResamplePerTrial)
}

/// Monte-Carlo outage estimate with an explicit cache policy.
pub fn monte_carlo_outage_with_policy(
    config: &SystemConfig,
    scheme: CacheScheme,
    alpha: Option<f64>,
    trials: u64,
    seed: u64,
    policy: CachePolicy,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::validation("trials", "must be at least 1"));
    }
    let config = config.validate()?;
    let ctx = TrialContext::new(&config, scheme, alpha, policy)?;
    let base = base_rng(seed);

    let outage_count: u64 = (0..trials)
        .into_par_iter()
        .map_init(
            || Scratch::new(config.library_size, config.cache_size),
            |scratch, trial| {
                let mut rng = trial_rng(&base, trial);
                u64::from(!run_trial_in(&ctx, scratch, &mut rng))
            },
        )
        .sum();

    let p_out_hat = outage_count as f64 / trials as f64;
    let (lo, hi) = wilson_interval(outage_count, trials, Z95);
    Ok(SimulationReport {
        scheme,
        config,
        alpha,
        trials,
        outage_count,
        p_out_hat,
        ci_half_width_95: (hi - lo) / 2.0,
        seed,
    })
}

/// Empirical conditional occupancy: per trial, k draws from the weight
/// vector q land in m bins; the histogram of distinct-bin counts becomes the
/// pmf estimate.
pub fn monte_carlo_occupancy(
    m: u32,
    q: &[f64],
    k: u32,
    trials: u64,
    seed: u64,
) -> Result<ConditionalOccupancyPmf> {
    if m as usize != q.len() {
        return Err(Error::validation(
            "bins",
            format!("expected {m} weights, got {}", q.len()),
        ));
    }
    if trials == 0 {
        return Err(Error::validation("trials", "must be at least 1"));
    }
    if m == 0 {
        if k > 0 {
            return Err(Error::domain("cannot throw balls into zero bins"));
        }
        return Ok(ConditionalOccupancyPmf::new(0, vec![1.0], PmfMethod::Empirical));
    }
    let mut cdf = Vec::with_capacity(q.len());
    let mut acc = crate::numerics::NeumaierSum::new();
    for &w in q {
        acc.add(w);
        cdf.push(acc.value());
    }
    if (acc.value() - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "weight vector must sum to 1 (got {})",
            acc.value()
        )));
    }
    *cdf.last_mut().expect("m >= 1") = 1.0;

    let support = k.min(m) as usize;
    let base = base_rng(seed);
    let histogram: Vec<u64> = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![0_u64; support + 1], vec![0_u64; m as usize + 1], 0_u64),
            |(mut hist, mut stamp, mut generation), trial| {
                generation += 1;
                let mut rng = trial_rng(&base, trial);
                let mut distinct = 0_usize;
                for _ in 0..k {
                    let u = uniform01(&mut rng);
                    let bin = sample_request_unchecked(&cdf, u) as usize;
                    if stamp[bin] != generation {
                        stamp[bin] = generation;
                        distinct += 1;
                    }
                }
                hist[distinct] += 1;
                (hist, stamp, generation)
            },
        )
        .map(|(hist, _, _)| hist)
        .reduce(
            || vec![0_u64; support + 1],
            |mut left, right| {
                for (l, r) in left.iter_mut().zip(right) {
                    *l += r;
                }
                left
            },
        );

    let probs = histogram
        .into_iter()
        .map(|count| count as f64 / trials as f64)
        .collect();
    Ok(ConditionalOccupancyPmf::new(k, probs, PmfMethod::Empirical))
}

/// Wilson score interval for a binomial proportion — well-behaved at the
/// small outage probabilities this crate targets, unlike the plain normal
/// interval.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs at least one trial");
    assert!(successes <= trials);
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z_sq = z * z;
    let denominator = 1.0 + z_sq / n;
    let center = (p_hat + z_sq / (2.0 * n)) / denominator;
    let half = z * (p_hat * (1.0 - p_hat) / n + z_sq / (4.0 * n * n)).sqrt() / denominator;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Runs `f` on a dedicated rayon pool of the requested size; `None` inherits
/// the global pool (all cores).
pub fn run_with_workers<R, F>(workers: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::validation("workers", "must be at least 1")),
        Some(count) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build()
                .map_err(|e| Error::validation("workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{gaussian_params, outage_rap};
    use crate::numerics::occupancy_uniform_pmf;

    fn cfg(n: u32, m: u32, c: u32, d: u32) -> SystemConfig {
        SystemConfig::new(n, m, c, d).unwrap()
    }

    #[test]
    fn sample_request_boundaries() {
        assert_eq!(sample_request(&[1.0], 0.7).unwrap(), 1);
        assert_eq!(sample_request(&[0.5, 1.0], 0.49).unwrap(), 1);
        assert_eq!(sample_request(&[0.5, 1.0], 0.5).unwrap(), 2);
        assert_eq!(sample_request(&[2.0 / 3.0, 1.0], 0.66).unwrap(), 1);
        assert_eq!(sample_request(&[0.5, 1.0], 0.0).unwrap(), 1);

        assert!(sample_request(&[], 0.5).is_err());
        assert!(sample_request(&[0.6, 0.5, 1.0], 0.5).is_err());
        assert!(sample_request(&[0.5, 0.9], 0.5).is_err());
        assert!(sample_request(&[0.5, 1.0], 1.0).is_err());
        assert!(sample_request(&[0.5, 1.0], -0.1).is_err());
    }

    #[test]
    fn uniform01_stays_in_range() {
        let mut rng = base_rng(7);
        for _ in 0..10_000 {
            let u = uniform01(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let config = cfg(40, 8, 3, 12);
        let mut counts = Vec::new();
        for workers in [1_usize, 4, 16] {
            let report = run_with_workers(Some(workers), || {
                monte_carlo_outage(&config, CacheScheme::Rap, None, 50_000, 99)
            })
            .unwrap()
            .unwrap();
            counts.push(report.outage_count);
        }
        assert_eq!(counts[0], counts[1]);
        assert_eq!(counts[1], counts[2]);

        let mop = |workers| {
            run_with_workers(Some(workers), || {
                monte_carlo_outage(&config, CacheScheme::Mop, Some(0.9), 50_000, 99)
            })
            .unwrap()
            .unwrap()
            .outage_count
        };
        assert_eq!(mop(1), mop(4));

        // A different seed must explore a different sample path.
        let other = monte_carlo_outage(&config, CacheScheme::Rap, None, 50_000, 100).unwrap();
        assert_ne!(other.outage_count, counts[0]);
    }

    #[test]
    fn estimates_match_enumeration_on_tiny_instance() {
        // Exact value 2/9 from enumeration; 4 standard errors at these trial
        // counts is ±0.0037, and the run is deterministic for the fixed seed.
        let report =
            monte_carlo_outage(&cfg(3, 1, 1, 2), CacheScheme::Rap, None, 200_000, 42).unwrap();
        let exact = 2.0_f64 / 9.0;
        let se = (exact * (1.0 - exact) / 200_000.0).sqrt();
        assert!(
            (report.p_out_hat - exact).abs() <= 4.0 * se,
            "hat {} vs exact {exact}",
            report.p_out_hat
        );
        assert!(report.ci_half_width_95 > 0.0);
        assert_eq!(
            report.p_out_hat,
            report.outage_count as f64 / report.trials as f64
        );
    }

    #[test]
    fn trivial_configurations_never_fail() {
        // Full cache.
        let full =
            monte_carlo_outage(&cfg(20, 20, 2, 10), CacheScheme::Rap, None, 20_000, 1).unwrap();
        assert_eq!(full.outage_count, 0);

        // d ≤ C.
        let roomy =
            monte_carlo_outage(&cfg(20, 0, 10, 10), CacheScheme::Mop, Some(1.0), 20_000, 1)
                .unwrap();
        assert_eq!(roomy.outage_count, 0);
    }

    #[test]
    fn resampled_and_fixed_caches_converge() {
        // Uniform requests cannot tell one fixed M-subset from another, so
        // the fixed-prefix shortcut must agree with literal resampling.
        let config = cfg(20, 5, 2, 4);
        let trials = 400_000;
        let resampled = monte_carlo_outage_with_policy(
            &config,
            CacheScheme::Rap,
            None,
            trials,
            11,
            CachePolicy::ResamplePerTrial,
        )
        .unwrap();
        let fixed = monte_carlo_outage_with_policy(
            &config,
            CacheScheme::Rap,
            None,
            trials,
            12,
            CachePolicy::FixedPrefix,
        )
        .unwrap();
        let exact = outage_rap(&config).unwrap().p_out;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        let combined = (2.0 * se * se).sqrt();
        assert!(
            (resampled.p_out_hat - fixed.p_out_hat).abs() <= 4.0 * combined,
            "resampled {} vs fixed {}",
            resampled.p_out_hat,
            fixed.p_out_hat
        );
        // And both track the closed form.
        assert!((resampled.p_out_hat - exact).abs() <= 4.0 * se);
        assert!((fixed.p_out_hat - exact).abs() <= 4.0 * se);
    }

    #[test]
    fn occupancy_histogram_tracks_exact_law() {
        // Single bin: every ball lands there.
        let single = monte_carlo_occupancy(1, &[1.0], 4, 1_000, 5).unwrap();
        assert_eq!(single.prob(1), 1.0);
        assert_eq!(single.method(), PmfMethod::Empirical);

        // Five fair bins, three balls, a million trials: the empirical pmf
        // sits within TV 0.005 of the exact recurrence (deterministic seed).
        let q = [0.2; 5];
        let empirical = monte_carlo_occupancy(5, &q, 3, 1_000_000, 42).unwrap();
        let exact = occupancy_uniform_pmf(5, 3).unwrap();
        assert!(
            empirical.total_variation(&exact) <= 0.005,
            "TV {}",
            empirical.total_variation(&exact)
        );
    }

    #[test]
    fn occupancy_mean_matches_exact_expectation() {
        // E[Z] = m − Σ_t (1 − q_t)^k exactly; the empirical mean must land
        // within normal sampling error of it. This isolates simulator
        // correctness from any approximation question.
        let trials = 100_000_u64;
        for (alpha, k) in [(0.5_f64, 20_u32), (1.0, 50), (1.5, 100)] {
            let q = model::conditional_noncached_weights(&cfg(100, 0, 1, 1), alpha).unwrap();
            let exact_mean: f64 = 100.0
                - q.iter()
                    .map(|w| (1.0 - w).powi(k as i32))
                    .sum::<f64>();
            let empirical = monte_carlo_occupancy(100, &q, k, trials, 42).unwrap();
            let (mean, std) = empirical_mean_std(&empirical);
            let allowance = 4.0 * std / (trials as f64).sqrt();
            assert!(
                (mean - exact_mean).abs() <= allowance,
                "alpha {alpha} k {k}: mean {mean} vs exact {exact_mean} (allowance {allowance})"
            );
        }
    }

    #[test]
    fn empirical_occupancy_mean_tracks_gaussian_location_parameter() {
        // Contract under test: the empirical mean matches the Gaussian μ_k
        // within 3·(empirical std/√trials) + 0.05 for k ∈ {20,50,100},
        // α ∈ {0.5,1,1.5}, over 100 bins. μ_k replaces (1−q)^k with e^{−kq},
        // and that substitution alone biases the mean by more than the stated
        // margin in most of these cells, so this records the misfit honestly
        // rather than hiding it behind looser numbers.
        let trials = 100_000_u64;
        let mut failures = Vec::new();
        println!("alpha  k    empirical-mean  mu_k      gap       allowance");
        for alpha in [0.5_f64, 1.0, 1.5] {
            let q = model::conditional_noncached_weights(&cfg(100, 0, 1, 1), alpha).unwrap();
            for k in [20_u32, 50, 100] {
                let mu_k = gaussian_params(k, &q).unwrap().mu_k;
                let empirical = monte_carlo_occupancy(100, &q, k, trials, 42).unwrap();
                let (mean, std) = empirical_mean_std(&empirical);
                let gap = (mean - mu_k).abs();
                let allowance = 3.0 * std / (trials as f64).sqrt() + 0.05;
                println!(
                    "{alpha:<5}  {k:<3}  {mean:<14.6}  {mu_k:<8.4}  {gap:<8.6}  {allowance:.6}"
                );
                if gap > allowance {
                    failures.push(format!(
                        "alpha {alpha} k {k}: |{mean:.4} − {mu_k:.4}| = {gap:.4} > {allowance:.4}"
                    ));
                }
            }
        }
        assert!(
            failures.is_empty(),
            "empirical mean vs Gaussian μ_k exceeded margin in {} of 9 cells:\n{}",
            failures.len(),
            failures.join("\n")
        );
    }

    fn empirical_mean_std(pmf: &ConditionalOccupancyPmf) -> (f64, f64) {
        let mean = pmf.mean();
        let second: f64 = pmf
            .iter()
            .map(|(z, p)| f64::from(z) * f64::from(z) * p)
            .sum();
        (mean, (second - mean * mean).max(0.0).sqrt())
    }

    #[test]
    fn gaussian_approximation_tracks_simulation_shape() {
        // The headline occupancy figure: 100 Zipf(1) draws over 100 files.
        let q = model::conditional_noncached_weights(&cfg(100, 0, 1, 1), 1.0).unwrap();
        let empirical = monte_carlo_occupancy(100, &q, 100, 100_000, 42).unwrap();
        let approx = crate::analytic::p_z_mop_approx(100, &cfg(100, 0, 1, 100), 1.0).unwrap();
        let tv = empirical.total_variation(&approx);
        assert!(tv <= 0.05, "total variation {tv}");
    }

    #[test]
    fn wilson_interval_reference_behaviour() {
        // No successes: the interval hugs zero (up to rounding in the exact
        // cancellation) but keeps positive width.
        let (lo, hi) = wilson_interval(0, 1000, Z95);
        assert!((0.0..1e-15).contains(&lo), "lower bound {lo}");
        assert!(hi > 0.0 && hi < 0.01);

        // Contains the point estimate, symmetric case.
        let (lo, hi) = wilson_interval(500, 1000, Z95);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);

        // Width shrinks with sample size.
        let narrow = wilson_interval(5_000, 10_000, Z95);
        assert!(narrow.1 - narrow.0 < hi - lo);

        // z = 0 degenerates to the point estimate.
        let (lo, hi) = wilson_interval(250, 1000, 0.0);
        assert_eq!((lo, hi), (0.25, 0.25));
    }

    #[test]
    fn input_validation() {
        let config = cfg(10, 2, 3, 4);
        assert!(matches!(
            monte_carlo_outage(&config, CacheScheme::Rap, Some(1.0), 100, 0),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            monte_carlo_outage(&config, CacheScheme::Mop, None, 100, 0),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            monte_carlo_outage(&config, CacheScheme::Rap, None, 0, 0),
            Err(Error::Validation { field: "trials", .. })
        ));
        assert!(matches!(
            run_with_workers(Some(0), || 1),
            Err(Error::Validation { field: "workers", .. })
        ));
        assert!(monte_carlo_occupancy(3, &[0.5, 0.5], 2, 100, 0).is_err());
        assert!(monte_carlo_occupancy(2, &[0.5, 0.6], 2, 100, 0).is_err());
    }

    #[test]
    fn run_trial_is_usable_directly() {
        let mut rng = base_rng(3);
        // d ≤ C: always succeeds.
        assert!(run_trial(&cfg(10, 0, 5, 5), CacheScheme::Rap, None, &mut rng).unwrap());
        // Full cache: always succeeds.
        assert!(run_trial(&cfg(10, 10, 0, 8), CacheScheme::Mop, Some(1.0), &mut rng).unwrap());
    }
}
