//! Closed-form outage probability and the occupancy distributions behind it.
//!
//! The delivery round fails (outage) when the d concurrent requests hit more
//! than C distinct non-cached files. With K the number of cache misses and Z
//! the number of distinct non-cached files among those misses,
//!
//! ```text
//! P_out = 1 − [ Σ_{k=0}^{min(C,d)} p_K(k)
//!             + Σ_{k=C+1}^{d} p_K(k) · Σ_{z=1}^{min(C, k, N−M)} p_Z(z|k) ]
//! ```
//!
//! K is Bin(d, P_nc) for both placement schemes; they differ only in P_nc and
//! in the conditional occupancy law p_Z(z|k). Random placement yields the
//! exact balls-into-bins recurrence; most-popular placement uses a Gaussian
//! occupancy approximation whose moments come from the miss-conditional Zipf
//! weights.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, CacheScheme, RequestModel, SystemConfig};
use crate::numerics::{self, LogProb, NeumaierSum};

/// How a [`ConditionalOccupancyPmf`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PmfMethod {
    /// Stable throw-by-throw recurrence for uniform occupancy.
    ExactDp,
    /// Exact rational Stirling-number closed form, rounded to f64.
    ClosedForm,
    /// Gaussian density evaluated at integer points (un-normalized).
    GaussianApprox,
    /// Inclusion–exclusion over bin subsets for weighted occupancy.
    Oracle,
    /// Histogram of Monte-Carlo draws.
    Empirical,
}

impl std::fmt::Display for PmfMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PmfMethod::ExactDp => "exact-dp",
            PmfMethod::ClosedForm => "closed-form",
            PmfMethod::GaussianApprox => "gaussian-approx",
            PmfMethod::Oracle => "oracle",
            PmfMethod::Empirical => "empirical",
        })
    }
}

/// Distribution of Z, the number of distinct non-cached files requested,
/// conditioned on the miss count k. `probs[z]` is p_Z(z|k) for z starting
/// at 0.
///
/// Gaussian-approximation instances carry raw density values: they need not
/// sum to 1 and individual entries may exceed 1 when the density spikes, so
/// the constructor only insists on finite, non-negative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalOccupancyPmf {
    k: u32,
    probs: Vec<f64>,
    method: PmfMethod,
}

impl ConditionalOccupancyPmf {
    pub fn new(k: u32, probs: Vec<f64>, method: PmfMethod) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!(probs.iter().all(|p| p.is_finite() && *p >= 0.0));
        ConditionalOccupancyPmf { k, probs, method }
    }

    /// The miss count this distribution is conditioned on.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn method(&self) -> PmfMethod {
        self.method
    }

    /// p_Z(z|k); zero beyond the stored support.
    pub fn prob(&self, z: u32) -> f64 {
        self.probs.get(z as usize).copied().unwrap_or(0.0)
    }

    /// Largest z with a stored entry (entries above it are implicitly zero).
    pub fn support_max(&self) -> u32 {
        (self.probs.len() - 1) as u32
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.probs.iter().enumerate().map(|(z, &p)| (z as u32, p))
    }

    /// Σ_z p(z), compensated. 1 for exact methods; for the Gaussian entries
    /// this is the raw density mass, a useful quality diagnostic.
    pub fn total_mass(&self) -> f64 {
        numerics::compensated_sum(&self.probs)
    }

    /// Mass-normalized mean Σ z·p(z) / Σ p(z), so that un-normalized Gaussian
    /// entries still yield a location estimate. NaN if the mass is zero.
    pub fn mean(&self) -> f64 {
        let mut weighted = NeumaierSum::new();
        for (z, p) in self.iter() {
            weighted.add(f64::from(z) * p);
        }
        weighted.value() / self.total_mass()
    }

    /// A copy scaled to unit mass; returned unchanged if the mass is zero.
    pub fn renormalized(&self) -> Self {
        let mass = self.total_mass();
        if mass <= 0.0 {
            return self.clone();
        }
        ConditionalOccupancyPmf {
            k: self.k,
            probs: self.probs.iter().map(|p| p / mass).collect(),
            method: self.method,
        }
    }

    /// Total-variation distance ½·Σ_z |p(z) − q(z)| over the union support.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let zmax = self.support_max().max(other.support_max());
        let mut sum = NeumaierSum::new();
        for z in 0..=zmax {
            sum.add((self.prob(z) - other.prob(z)).abs());
        }
        0.5 * sum.value()
    }
}

/// Moments of the Gaussian occupancy approximation for a given miss count k:
/// `mu_k` estimates the expected number of distinct files, `sigma_sq_k` the
/// variance. `sigma_sq_k` is reported raw — it can round to ≤ 0 when the
/// distribution degenerates, and the consumer decides how to handle that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianOccupancyParams {
    pub mu_k: f64,
    pub sigma_sq_k: f64,
}

/// How an [`OutageResult`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutageMethod {
    /// Random placement: exact within floating-point rounding.
    RapExact,
    /// Most-popular placement with the Gaussian occupancy approximation.
    MopGaussian,
    /// Caller-supplied occupancy provider (oracles, experiments).
    Generic,
}

impl std::fmt::Display for OutageMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutageMethod::RapExact => "rap-exact",
            OutageMethod::MopGaussian => "mop-gaussian",
            OutageMethod::Generic => "generic",
        })
    }
}

/// Numerical byproducts of an outage evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Number of k-terms whose probability mass was accumulated (terms with
    /// p_K(k) = 0 are skipped and not counted).
    pub terms_k: u64,
    /// Accumulated success mass 1 − P_out before clamping.
    pub success_mass: f64,
    /// Smallest Gaussian occupancy variance encountered; absent for methods
    /// that never form one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_sigma_sq: Option<f64>,
    /// Pre-clamp outage value, recorded only when it left [0,1] by more than
    /// 1e-9 (the Gaussian approximation's un-normalized masses can do that).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_p_out: Option<f64>,
}

/// Outage probability plus provenance and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageResult {
    pub p_out: f64,
    pub method: OutageMethod,
    pub diagnostics: Diagnostics,
}

/// ln p_K(k) for K ~ Bin(d, pnc): the probability that exactly k of the d
/// requests miss the cache.
pub(crate) fn log_p_k(k: u32, d: u32, pnc: f64) -> Result<LogProb> {
    if k > d {
        return Err(Error::domain(format!(
            "miss count {k} exceeds the number of requests {d}"
        )));
    }
    if !pnc.is_finite() || !(0.0..=1.0).contains(&pnc) {
        return Err(Error::domain(format!(
            "miss probability must lie in [0, 1], got {pnc}"
        )));
    }
    // The boundary cases would otherwise form 0·ln 0 below.
    if pnc == 0.0 {
        return Ok(if k == 0 { LogProb::ALWAYS } else { LogProb::NEVER });
    }
    if pnc == 1.0 {
        return Ok(if k == d { LogProb::ALWAYS } else { LogProb::NEVER });
    }
    let mut log = numerics::log_binomial(u64::from(d), u64::from(k))?;
    if k > 0 {
        log += f64::from(k) * pnc.ln();
    }
    if k < d {
        log += f64::from(d - k) * (-pnc).ln_1p();
    }
    LogProb::new(log.min(0.0))
}

/// p_K(k) = C(d,k)·pnc^k·(1−pnc)^{d−k}, evaluated in log domain so that
/// d in the hundreds cannot underflow term-by-term.
pub fn p_k(k: u32, d: u32, pnc: f64) -> Result<f64> {
    Ok(log_p_k(k, d, pnc)?.prob())
}

/// Conditional occupancy under random placement: k misses land uniformly and
/// independently on the N−M non-cached files, so Z follows the classic
/// balls-into-bins occupancy law. Exact (stable recurrence).
pub fn p_z_rap(k: u32, config: &SystemConfig) -> Result<ConditionalOccupancyPmf> {
    let config = config.validate()?;
    if k > config.num_requests {
        return Err(Error::domain(format!(
            "miss count {k} exceeds the number of requests {}",
            config.num_requests
        )));
    }
    let m = config.noncached_files();
    if m == 0 && k > 0 {
        return Err(Error::domain(
            "the cache holds the whole library, so no request can miss",
        ));
    }
    numerics::occupancy_uniform_pmf(m, k)
}

/// Gaussian moments for the number of distinct files hit by k draws from the
/// weight vector q (one entry per non-cached file):
///
/// ```text
/// μ_k = m − Σ_t e^{−k·q_t}
/// σ_k² = Σ_t e^{−k·q_t}(1 − e^{−k·q_t}) − k·(Σ_t e^{−k·q_t}·q_t)²
/// ```
///
/// The weights are assumed normalized (as produced by
/// [`model::conditional_noncached_weights`]); only finiteness and
/// non-negativity are checked here.
pub fn gaussian_params(k: u32, q: &[f64]) -> Result<GaussianOccupancyParams> {
    if k == 0 {
        return Err(Error::domain(
            "occupancy moments are undefined for zero draws",
        ));
    }
    if q.is_empty() {
        return Err(Error::domain("weight vector must be non-empty"));
    }
    if q.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::domain(
            "weight vector entries must be finite and non-negative",
        ));
    }
    let k_f = f64::from(k);
    let mut empty_mass = NeumaierSum::new(); // Σ e^{−k·q_t}
    let mut variance_head = NeumaierSum::new(); // Σ e^{−k·q_t}(1 − e^{−k·q_t})
    let mut weighted_empty = NeumaierSum::new(); // Σ e^{−k·q_t}·q_t
    for &w in q {
        let e = (-k_f * w).exp();
        empty_mass.add(e);
        variance_head.add(e * (1.0 - e));
        weighted_empty.add(e * w);
    }
    let mu_k = q.len() as f64 - empty_mass.value();
    let sigma_sq_k = variance_head.value() - k_f * weighted_empty.value().powi(2);
    Ok(GaussianOccupancyParams { mu_k, sigma_sq_k })
}

/// Below this variance the Gaussian entries degenerate to a point mass at the
/// rounded, clamped mean (the σ → 0 limit of the density).
pub(crate) const SIGMA_SQ_DEGENERATE: f64 = 1e-12;

/// Gaussian density evaluated at the integer support points z = 1..min(k,m).
/// Deliberately not renormalized: the outage formula consumes the raw values.
pub(crate) fn gaussian_occupancy_pmf(
    k: u32,
    m: u32,
    params: &GaussianOccupancyParams,
) -> ConditionalOccupancyPmf {
    let zmax = k.min(m);
    assert!(zmax >= 1, "gaussian occupancy needs k >= 1 and m >= 1");
    let mut probs = vec![0.0_f64; zmax as usize + 1];
    if params.sigma_sq_k < SIGMA_SQ_DEGENERATE {
        let site = (params.mu_k.round() as i64).clamp(1, i64::from(zmax)) as usize;
        probs[site] = 1.0;
    } else {
        let sigma = params.sigma_sq_k.sqrt();
        let scale = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        for (z, slot) in probs.iter_mut().enumerate().skip(1) {
            let t = (z as f64 - params.mu_k) / sigma;
            *slot = scale * (-0.5 * t * t).exp();
        }
    }
    ConditionalOccupancyPmf::new(k, probs, PmfMethod::GaussianApprox)
}

/// Conditional occupancy under most-popular placement: Gaussian density over
/// z = 1..min(k, N−M) with moments from the miss-conditional Zipf weights.
pub fn p_z_mop_approx(
    k: u32,
    config: &SystemConfig,
    alpha: f64,
) -> Result<ConditionalOccupancyPmf> {
    let config = config.validate()?;
    let q = model::conditional_noncached_weights(&config, alpha)?;
    let params = gaussian_params(k, &q)?;
    Ok(gaussian_occupancy_pmf(k, config.noncached_files(), &params))
}

/// The outage formula with the occupancy law abstracted away: `pz_provider`
/// supplies p_Z(·|k) for each miss count k in C+1..=d that carries mass.
///
/// Inner z-sums run over 1..=min(C, support of p_Z); each (k,z) product is
/// assembled in log domain and exponentiated once, then accumulated with
/// compensated summation. The result is clamped to [0,1]; a raw value outside
/// by more than 1e-9 is preserved in the diagnostics.
pub fn outage_general<F>(d: u32, c: u32, pnc: f64, mut pz_provider: F) -> Result<OutageResult>
where
    F: FnMut(u32) -> Result<ConditionalOccupancyPmf>,
{
    if d == 0 {
        return Err(Error::validation("num_requests", "must be at least 1"));
    }
    if !pnc.is_finite() || !(0.0..=1.0).contains(&pnc) {
        return Err(Error::domain(format!(
            "miss probability must lie in [0, 1], got {pnc}"
        )));
    }
    if d <= c {
        // Even d all-distinct misses fit within the backhaul budget.
        return Ok(OutageResult {
            p_out: 0.0,
            method: OutageMethod::Generic,
            diagnostics: Diagnostics {
                terms_k: 0,
                success_mass: 1.0,
                min_sigma_sq: None,
                raw_p_out: None,
            },
        });
    }

    let mut success = NeumaierSum::new();
    let mut terms_k: u64 = 0;

    // Up to C misses always succeed: the distinct count is at most the miss
    // count.
    for k in 0..=c.min(d) {
        let log_pk = log_p_k(k, d, pnc)?;
        if log_pk.is_never() {
            continue;
        }
        success.add(log_pk.prob());
        terms_k += 1;
    }

    // More than C misses succeed only if they collapse onto at most C
    // distinct files.
    for k in c + 1..=d {
        let log_pk = log_p_k(k, d, pnc)?;
        if log_pk.is_never() {
            continue;
        }
        let pmf = pz_provider(k)?;
        debug_assert_eq!(pmf.k(), k);
        let zmax = c.min(pmf.support_max());
        for z in 1..=zmax {
            let pz = pmf.prob(z);
            if pz > 0.0 {
                success.add((log_pk.0 + pz.ln()).exp());
            }
        }
        terms_k += 1;
    }

    let success_mass = success.value();
    let raw = 1.0 - success_mass;
    let p_out = raw.clamp(0.0, 1.0);
    Ok(OutageResult {
        p_out,
        method: OutageMethod::Generic,
        diagnostics: Diagnostics {
            terms_k,
            success_mass,
            min_sigma_sq: None,
            raw_p_out: (!(-1e-9..=1.0 + 1e-9).contains(&raw)).then_some(raw),
        },
    })
}

/// Outage probability under random placement with uniform requests. Exact up
/// to floating-point rounding — both p_K and the occupancy law are exact.
pub fn outage_rap(config: &SystemConfig) -> Result<OutageResult> {
    let config = config.validate()?;
    let pnc = model::p_nc(CacheScheme::Rap, RequestModel::Uniform, &config)?;
    let mut result = outage_general(
        config.num_requests,
        config.backhaul_capacity,
        pnc,
        |k| p_z_rap(k, &config),
    )?;
    result.method = OutageMethod::RapExact;
    Ok(result)
}

/// Outage probability under most-popular placement with Zipf(α) requests,
/// using the Gaussian occupancy approximation.
pub fn outage_mop(config: &SystemConfig, alpha: f64) -> Result<OutageResult> {
    outage_mop_with(config, alpha, false)
}

/// [`outage_mop`] with control over occupancy renormalization. The default
/// (false) consumes the raw Gaussian masses; `renormalize_occupancy = true`
/// scales each conditional pmf to unit mass first — a sensitivity check on
/// how much the un-normalized tail affects the result.
pub fn outage_mop_with(
    config: &SystemConfig,
    alpha: f64,
    renormalize_occupancy: bool,
) -> Result<OutageResult> {
    let config = config.validate()?;
    let pnc = model::p_nc(CacheScheme::Mop, RequestModel::Zipf { alpha }, &config)?;
    let m = config.noncached_files();
    // With a full cache pnc = 0 and the provider is never consulted.
    let q = if m > 0 {
        model::conditional_noncached_weights(&config, alpha)?
    } else {
        Vec::new()
    };
    let mut min_sigma_sq: Option<f64> = None;
    let mut result = outage_general(config.num_requests, config.backhaul_capacity, pnc, |k| {
        let params = gaussian_params(k, &q)?;
        min_sigma_sq = Some(min_sigma_sq.map_or(params.sigma_sq_k, |s| s.min(params.sigma_sq_k)));
        let pmf = gaussian_occupancy_pmf(k, m, &params);
        Ok(if renormalize_occupancy {
            pmf.renormalized()
        } else {
            pmf
        })
    })?;
    result.method = OutageMethod::MopGaussian;
    result.diagnostics.min_sigma_sq = min_sigma_sq;
    Ok(result)
}
