//! System configuration, request popularity models, and cache placement.
//!
//! A relay caches `cache_size` of `library_size` files and serves
//! `num_requests` simultaneous users over a backhaul that can fetch at most
//! `backhaul_capacity` distinct non-cached files per delivery round. Random
//! placement (RaP) pairs with uniform request popularity; most-popular
//! placement (MoP) pairs with Zipf popularity. That pairing is enforced: it is
//! the only combination the closed forms are derived for.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;

/// The (N, M, C, d) tuple: library size, cache size, backhaul capacity in
/// distinct files per round, and number of concurrent requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub library_size: u32,
    pub cache_size: u32,
    pub backhaul_capacity: u32,
    pub num_requests: u32,
}

impl SystemConfig {
    /// Builds and validates a configuration in (N, M, C, d) order.
    pub fn new(
        library_size: u32,
        cache_size: u32,
        backhaul_capacity: u32,
        num_requests: u32,
    ) -> Result<Self> {
        SystemConfig {
            library_size,
            cache_size,
            backhaul_capacity,
            num_requests,
        }
        .validate()
    }

    /// Checks N ≥ 1, M ≤ N, d ≥ 1, naming the offending field on failure.
    pub fn validate(self) -> Result<Self> {
        if self.library_size == 0 {
            return Err(Error::validation("library_size", "must be at least 1"));
        }
        if self.cache_size > self.library_size {
            return Err(Error::validation(
                "cache_size",
                format!(
                    "{} exceeds library_size {}",
                    self.cache_size, self.library_size
                ),
            ));
        }
        if self.num_requests == 0 {
            return Err(Error::validation("num_requests", "must be at least 1"));
        }
        Ok(self)
    }

    /// N − M: the number of non-cached files, i.e. the occupancy bin count.
    pub fn noncached_files(&self) -> u32 {
        self.library_size - self.cache_size
    }
}

/// Per-file request popularity: uniform, or Zipf with shape `alpha`
/// (p_i ∝ i^−α over popularity ranks i = 1..N).
///
/// `alpha = 0` is accepted and degenerates to uniform — useful as a bridge
/// when cross-checking the two placement schemes against each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RequestModel {
    Uniform,
    Zipf { alpha: f64 },
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::validation(
            "alpha",
            format!("Zipf shape must be a finite value >= 0, got {alpha}"),
        ));
    }
    Ok(alpha)
}

/// The request pmf over popularity ranks 1..=N (index 0 holds rank 1).
///
/// Zipf entries are i^−α normalized by β = Σ_{j=1}^N j^−α; the normalizer and
/// hence the entries sum to 1 within 1e-12.
pub fn request_pmf(model: RequestModel, n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::validation("library_size", "must be at least 1"));
    }
    match model {
        RequestModel::Uniform => Ok(vec![1.0 / f64::from(n); n as usize]),
        RequestModel::Zipf { alpha } => {
            let alpha = check_alpha(alpha)?;
            let weights: Vec<f64> = (1..=n).map(|i| f64::from(i).powf(-alpha)).collect();
            let beta = crate::numerics::compensated_sum(&weights);
            Ok(weights.into_iter().map(|w| w / beta).collect())
        }
    }
}

/// Cache placement policy.
///
/// RaP stores a uniformly random M-subset of the library each placement phase;
/// MoP deterministically stores the M most popular files (ranks 1..=M).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheScheme {
    Rap,
    Mop,
}

impl fmt::Display for CacheScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheScheme::Rap => "rap",
            CacheScheme::Mop => "mop",
        })
    }
}

impl FromStr for CacheScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rap" => Ok(CacheScheme::Rap),
            "mop" => Ok(CacheScheme::Mop),
            other => Err(Error::validation(
                "scheme",
                format!("expected \"rap\" or \"mop\", got \"{other}\""),
            )),
        }
    }
}

/// Probability that a single request targets a non-cached file.
///
/// RaP with uniform requests: 1 − M/N, exact by symmetry over the random
/// M-subset. MoP with Zipf requests: the tail mass (1/β)·Σ_{i=M+1}^N i^−α.
/// Any other scheme/model pairing is rejected — the closed forms downstream
/// are only derived for these two.
pub fn p_nc(scheme: CacheScheme, model: RequestModel, config: &SystemConfig) -> Result<f64> {
    let config = config.validate()?;
    let n = config.library_size;
    let m = config.cache_size;
    match (scheme, model) {
        (CacheScheme::Rap, RequestModel::Uniform) => {
            Ok(f64::from(config.noncached_files()) / f64::from(n))
        }
        (CacheScheme::Mop, RequestModel::Zipf { alpha }) => {
            let alpha = check_alpha(alpha)?;
            if m == n {
                return Ok(0.0);
            }
            let mut beta = NeumaierSum::new();
            let mut tail = NeumaierSum::new();
            for i in 1..=n {
                let w = f64::from(i).powf(-alpha);
                beta.add(w);
                if i > m {
                    tail.add(w);
                }
            }
            Ok(tail.value() / beta.value())
        }
        (CacheScheme::Rap, RequestModel::Zipf { .. }) => Err(Error::configuration(
            "random placement is analyzed under uniform requests; it cannot be combined with a \
             Zipf request model",
        )),
        (CacheScheme::Mop, RequestModel::Uniform) => Err(Error::configuration(
            "most-popular placement is analyzed under Zipf requests; it cannot be combined with \
             a uniform request model",
        )),
    }
}

/// Conditional popularity of the non-cached files under MoP: entry t (0-based)
/// is q_t = (M+t+1)^−α / Σ_{i=M+1}^N i^−α, the probability that a cache miss
/// targets the t-th most popular non-cached file.
///
/// Equals the Zipf pmf restricted to ranks M+1..N and renormalized.
pub fn conditional_noncached_weights(config: &SystemConfig, alpha: f64) -> Result<Vec<f64>> {
    let config = config.validate()?;
    let alpha = check_alpha(alpha)?;
    let n = config.library_size;
    let m = config.cache_size;
    if m == n {
        return Err(Error::domain(
            "no non-cached files to weight: the cache holds the whole library",
        ));
    }
    let weights: Vec<f64> = (m + 1..=n).map(|i| f64::from(i).powf(-alpha)).collect();
    let total = crate::numerics::compensated_sum(&weights);
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// On-disk JSON configuration consumed by the CLI; explicit command-line
/// flags override any value present here. Unknown keys are rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub library_size: Option<u32>,
    pub cache_size: Option<u32>,
    pub backhaul_capacity: Option<u32>,
    pub num_requests: Option<u32>,
    pub scheme: Option<CacheScheme>,
    pub zipf_alpha: Option<f64>,
}
