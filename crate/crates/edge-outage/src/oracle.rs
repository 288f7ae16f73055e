//! Exact, slow reference implementations for small instances.
//!
//! Everything here is deliberately independent of the closed forms in
//! [`crate::analytic`]: occupancy via inclusion–exclusion over bin subsets,
//! outage via exhaustive enumeration of request tuples. The test suite and
//! `verify` subcommand pit the fast paths against these.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::analytic::{ConditionalOccupancyPmf, Diagnostics, OutageMethod, OutageResult, PmfMethod};
use crate::error::{Error, Result};
use crate::model::{self, CacheScheme, RequestModel, SystemConfig};
use crate::numerics::{binomial_exact, NeumaierSum};

/// Caps on oracle work: subset enumeration is 2^m in the bin count, tuple
/// enumeration is N^d in the request count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_subset_bins: u32,
    pub max_enumeration: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_subset_bins: 20,
            max_enumeration: 10_000_000,
        }
    }
}

impl OracleBudget {
    fn validate(&self) -> Result<()> {
        if self.max_subset_bins == 0 || self.max_enumeration == 0 {
            return Err(Error::validation("budget", "limits must be positive"));
        }
        Ok(())
    }
}

/// Exact distribution of the number of distinct bins hit by k independent
/// draws from the weight vector `q` (one entry per bin):
///
/// ```text
/// P(Z = z) = Σ_{u=0}^{z} (−1)^{z−u} · C(m−u, z−u) · E_u,
/// E_u = Σ_{|U|=u} (Σ_{t∈U} q_t)^k
/// ```
///
/// The alternating combination cancels severely, so E_u is accumulated in
/// exact rationals for m ≤ 12 and in double-double arithmetic up to the
/// subset budget.
pub fn exact_occupancy_weighted(
    q: &[f64],
    k: u32,
    budget: &OracleBudget,
) -> Result<ConditionalOccupancyPmf> {
    budget.validate()?;
    let m = q.len();
    if m > budget.max_subset_bins as usize {
        return Err(Error::budget(format!(
            "subset enumeration over {m} bins exceeds the budget of {} (2^m subsets)",
            budget.max_subset_bins
        )));
    }
    if q.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::domain(
            "weight vector entries must be finite and non-negative",
        ));
    }
    if k == 0 {
        return Ok(ConditionalOccupancyPmf::new(0, vec![1.0], PmfMethod::Oracle));
    }
    if m == 0 {
        return Err(Error::domain(
            "cannot throw balls into zero bins",
        ));
    }
    let mass = crate::numerics::compensated_sum(q);
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "weight vector must sum to 1 (got {mass})"
        )));
    }

    let zmax = (k as usize).min(m);
    let probs = if m <= 12 {
        occupancy_rational(q, k, zmax)
    } else {
        occupancy_double_double(q, k, zmax)
    };
    Ok(ConditionalOccupancyPmf::new(k, probs, PmfMethod::Oracle))
}

/// Inclusion–exclusion in exact rational arithmetic. Each f64 weight is
/// treated as the exact dyadic rational it is; only the final per-z values
/// round back to f64.
fn occupancy_rational(q: &[f64], k: u32, zmax: usize) -> Vec<f64> {
    let m = q.len();
    let q_exact: Vec<BigRational> = q
        .iter()
        .map(|&w| BigRational::from_float(w).expect("weights checked finite"))
        .collect();

    // Subset sums in mask order: each mask extends the mask with its lowest
    // bit cleared.
    let size = 1_usize << m;
    let mut subset_sum: Vec<BigRational> = Vec::with_capacity(size);
    subset_sum.push(BigRational::zero());
    for mask in 1..size {
        let parent = mask & (mask - 1);
        let bit = mask.trailing_zeros() as usize;
        let sum = &subset_sum[parent] + &q_exact[bit];
        subset_sum.push(sum);
    }

    let mut e_u = vec![BigRational::zero(); zmax + 1];
    for (mask, sum) in subset_sum.iter().enumerate().skip(1) {
        let u = mask.count_ones() as usize;
        if u <= zmax {
            e_u[u] += num_traits::pow(sum.clone(), k as usize);
        }
    }

    (0..=zmax)
        .map(|z| {
            let mut acc = BigRational::zero();
            for (u, e) in e_u.iter().enumerate().take(z + 1) {
                let coeff = BigRational::from(BigInt::from(binomial_exact(
                    (m - u) as u64,
                    (z - u) as u64,
                )));
                let term = coeff * e;
                if (z - u) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc.to_f64().unwrap_or(0.0).max(0.0)
        })
        .collect()
}

/// Inclusion–exclusion carried in ~32 significant decimal digits. The
/// alternating stage can cancel ~5 orders of magnitude at m = 20, which
/// plain f64 could not absorb while staying meaningfully below the 1e-9
/// cross-check tolerance.
fn occupancy_double_double(q: &[f64], k: u32, zmax: usize) -> Vec<f64> {
    let m = q.len();
    let size = 1_usize << m;
    let mut subset_sum: Vec<Dd> = Vec::with_capacity(size);
    subset_sum.push(Dd::ZERO);
    for mask in 1..size {
        let parent = mask & (mask - 1);
        let bit = mask.trailing_zeros() as usize;
        let sum = subset_sum[parent].add(Dd::from_f64(q[bit]));
        subset_sum.push(sum);
    }

    let mut e_u = vec![Dd::ZERO; zmax + 1];
    for (mask, sum) in subset_sum.iter().enumerate().skip(1) {
        let u = mask.count_ones() as usize;
        if u <= zmax {
            e_u[u] = e_u[u].add(sum.powi(k));
        }
    }

    (0..=zmax)
        .map(|z| {
            let mut acc = Dd::ZERO;
            for (u, e) in e_u.iter().enumerate().take(z + 1) {
                // C(20, 10) < 2^53: the coefficient is exact in f64.
                let coeff = binomial_exact((m - u) as u64, (z - u) as u64)
                    .to_f64()
                    .expect("binomial coefficient fits in f64 within the subset budget");
                let signed = if (z - u) % 2 == 0 { coeff } else { -coeff };
                acc = acc.add(e.mul(Dd::from_f64(signed)));
            }
            acc.value().max(0.0)
        })
        .collect()
}

/// Outage probability by exhaustive enumeration of all N^d request tuples.
///
/// The cache is fixed to files {1..M}: for most-popular placement that is the
/// definition; for random placement any fixed cache gives the same outage by
/// symmetry of the uniform request law. Subtrees whose outcome is already
/// decided are pruned with their exact remaining mass, which keeps the scan
/// well under the tuple budget in wall time.
pub fn brute_force_outage(
    config: &SystemConfig,
    scheme: CacheScheme,
    alpha: Option<f64>,
    budget: &OracleBudget,
) -> Result<OutageResult> {
    budget.validate()?;
    let config = config.validate()?;
    let n = config.library_size;
    let d = config.num_requests;

    let tuples = f64::from(n).powi(d as i32);
    if tuples > budget.max_enumeration as f64 {
        return Err(Error::budget(format!(
            "enumerating {n}^{d} request tuples exceeds the budget of {}",
            budget.max_enumeration
        )));
    }

    let probs = match (scheme, alpha) {
        (CacheScheme::Rap, None) => model::request_pmf(RequestModel::Uniform, n)?,
        (CacheScheme::Rap, Some(_)) => {
            return Err(Error::configuration(
                "random placement takes no Zipf shape; drop alpha",
            ))
        }
        (CacheScheme::Mop, Some(alpha)) => {
            model::request_pmf(RequestModel::Zipf { alpha }, n)?
        }
        (CacheScheme::Mop, None) => {
            return Err(Error::configuration(
                "most-popular placement requires a Zipf shape alpha",
            ))
        }
    };

    let mut scan = Enumeration {
        probs,
        cached: config.cache_size,
        capacity: config.backhaul_capacity,
        depth: d,
        counts: vec![0; n as usize + 1],
        distinct: 0,
        outage: NeumaierSum::new(),
        success: NeumaierSum::new(),
        prunes: 0,
    };
    scan.descend(0, 1.0);

    let raw = scan.outage.value();
    Ok(OutageResult {
        p_out: raw.clamp(0.0, 1.0),
        method: OutageMethod::Generic,
        diagnostics: Diagnostics {
            terms_k: scan.prunes,
            success_mass: scan.success.value(),
            min_sigma_sq: None,
            raw_p_out: (!(-1e-9..=1.0 + 1e-9).contains(&raw)).then_some(raw),
        },
    })
}

/// Depth-first scan over request tuples with per-file multiplicity counts.
struct Enumeration {
    probs: Vec<f64>,
    cached: u32,
    capacity: u32,
    depth: u32,
    /// counts[f] = how many requests so far chose file f (1-based).
    counts: Vec<u32>,
    /// Distinct non-cached files among the requests so far.
    distinct: u32,
    outage: NeumaierSum,
    success: NeumaierSum,
    prunes: u64,
}

impl Enumeration {
    /// Invariant on entry: `self.distinct <= self.capacity`.
    fn descend(&mut self, level: u32, weight: f64) {
        debug_assert!(self.distinct <= self.capacity);
        let remaining = self.depth - level;
        // Even all-new-distinct completions stay within capacity; this also
        // covers the depth-exhausted case (remaining = 0).
        if self.distinct + remaining <= self.capacity {
            self.success.add(weight);
            return;
        }
        for file in 1..=self.probs.len() as u32 {
            let w = weight * self.probs[file as usize - 1];
            let noncached = file > self.cached;
            let first_hit = noncached && self.counts[file as usize] == 0;
            if first_hit && self.distinct == self.capacity {
                // This request would push the distinct count past C; every
                // completion below is an outage, carrying exactly weight w.
                self.outage.add(w);
                self.prunes += 1;
                continue;
            }
            self.counts[file as usize] += 1;
            if first_hit {
                self.distinct += 1;
            }
            self.descend(level + 1, w);
            self.counts[file as usize] -= 1;
            if first_hit {
                self.distinct -= 1;
            }
        }
    }
}

/// Double-double value: an unevaluated sum hi + lo carrying ~106 bits of
/// precision. Just the handful of operations the inclusion–exclusion needs.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Error-free sum: s + err == a + b exactly.
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        (s, err)
    }

    /// Like `two_sum` but assumes |a| ≥ |b| (or a == 0).
    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let err = b - (s - a);
        (s, err)
    }

    /// Error-free product via fused multiply-add.
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        let err = a.mul_add(b, -p);
        (p, err)
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = Dd::two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = Dd::quick_two_sum(s, e);
        Dd { hi, lo }
    }

    fn mul(self, other: Dd) -> Dd {
        let (p, e) = Dd::two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = Dd::quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn powi(self, mut exp: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            exp >>= 1;
        }
        acc
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}
