//! Numerically safe combinatorial primitives.
//!
//! Everything the outage formulas are built from lives here: log-space
//! factorials and binomials, exact Stirling numbers of the second kind on big
//! integers, the stable throw-by-throw occupancy recurrence, and compensated
//! summation. All functions are pure; the factorial table is built once behind
//! a [`OnceLock`].

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::analytic::{ConditionalOccupancyPmf, PmfMethod};
use crate::error::{Error, Result};

/// Natural logarithm of a probability; `NEG_INFINITY` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(pub f64);

impl LogProb {
    /// ln 0 — the impossible event.
    pub const NEVER: LogProb = LogProb(f64::NEG_INFINITY);
    /// ln 1 — the certain event.
    pub const ALWAYS: LogProb = LogProb(0.0);

    /// Wraps a log-probability, rejecting values that would decode to p > 1.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value > 0.0 {
            return Err(Error::domain(format!(
                "log-probability must lie in [-inf, 0], got {value}"
            )));
        }
        Ok(LogProb(value))
    }

    /// Decodes back to the probability scale.
    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_never(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// Largest n whose ln(n!) is served from the precomputed table; beyond it the
/// Stirling-series tail takes over. The regimes this crate targets (libraries
/// and user counts in the hundreds) never leave the table.
pub const LOG_FACTORIAL_TABLE_CAP: u64 = 10_000;

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LOG_FACTORIAL_TABLE_CAP as usize + 1);
        table.push(0.0);
        // Compensated accumulation: a plain running sum drifts by ~n·eps,
        // which at the cap (~2e-12 relative) would already exceed the 1e-12
        // accuracy this table promises.
        let mut sum = NeumaierSum::new();
        for n in 1..=LOG_FACTORIAL_TABLE_CAP {
            sum.add((n as f64).ln());
            table.push(sum.value());
        }
        table
    })
}

/// ln Γ(x) by the Stirling series with three correction terms.
///
/// Only consulted for x > 10 001, where the truncation error is far below
/// double precision; not a general-purpose log-gamma.
fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// ln(n!) with relative error at most 1e-12: table lookup through
/// [`LOG_FACTORIAL_TABLE_CAP`], Stirling series beyond.
pub fn log_factorial(n: u64) -> f64 {
    if n <= LOG_FACTORIAL_TABLE_CAP {
        factorial_table()[n as usize]
    } else {
        stirling_ln_gamma(n as f64 + 1.0)
    }
}

/// ln C(n, k).
///
/// Computed through the smaller of k and n−k so that `log_binomial(n, k)` and
/// `log_binomial(n, n - k)` are bit-identical, not merely close.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!(
            "binomial coefficient needs k <= n, got k = {k}, n = {n}"
        )));
    }
    let kk = k.min(n - k);
    if kk == 0 {
        return Ok(0.0);
    }
    Ok(log_factorial(n) - log_factorial(kk) - log_factorial(n - kk))
}

/// Exact C(n, k) on big integers; the cross-check anchor for [`log_binomial`].
pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let kk = k.min(n - k);
    let mut result = BigUint::one();
    for i in 0..kk {
        // The running product of i+1 consecutive integers is divisible by
        // (i+1)!, so each division here is exact.
        result *= n - i;
        result /= i + 1;
    }
    result
}

/// Exact n! on big integers.
pub fn factorial_exact(n: u32) -> BigUint {
    let mut result = BigUint::one();
    for i in 2..=u64::from(n) {
        result *= i;
    }
    result
}

/// Exact Stirling number of the second kind S(k, z): partitions of k labeled
/// items into z non-empty blocks.
///
/// Uses the additive recurrence S(k, z) = z·S(k−1, z) + S(k−1, z−1), which
/// stays in non-negative integers; the textbook alternating sum is kept in the
/// tests as an independent check.
pub fn stirling2_exact(k: u32, z: u32) -> BigUint {
    if z > k {
        return BigUint::zero();
    }
    if k == 0 {
        return BigUint::one(); // S(0, 0): the empty partition
    }
    if z == 0 {
        return BigUint::zero();
    }
    let zmax = z as usize;
    let mut row = vec![BigUint::zero(); zmax + 1];
    row[0] = BigUint::one(); // row holds S(0, ·) before the first pass
    for i in 1..=k as usize {
        for j in (1..=zmax.min(i)).rev() {
            let kept = &row[j] * j as u32;
            row[j] = kept + &row[j - 1];
        }
        row[0] = BigUint::zero();
    }
    std::mem::take(&mut row[zmax])
}

/// ln of an exact big integer without leaving the double range.
///
/// Values wider than the 53-bit mantissa are shifted down to a 53-bit window
/// first; the discarded bits perturb the logarithm by less than 2^-52.
pub fn log_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("value fits in 53 bits").ln();
    }
    let shift = bits - 53;
    let window = (x >> shift).to_f64().expect("shifted value fits in 53 bits");
    window.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Distribution of the number of occupied bins after throwing k balls
/// uniformly into m bins, by the stable throw-by-throw recurrence
/// f(j, z) = f(j−1, z)·z/m + f(j−1, z−1)·(m−z+1)/m.
///
/// The closed form C(m,z)·S(k,z)·z!/m^k computes the same quantity but its
/// alternating Stirling expansion cancels catastrophically in floating point
/// for k ≳ 50; the recurrence only ever adds non-negative terms.
pub fn occupancy_uniform_pmf(m: u32, k: u32) -> Result<ConditionalOccupancyPmf> {
    if m == 0 && k > 0 {
        return Err(Error::domain(
            "cannot throw balls into zero bins".to_string(),
        ));
    }
    let zmax = k.min(m) as usize;
    let mut f = vec![0.0_f64; zmax + 1];
    f[0] = 1.0;
    let m_f = f64::from(m);
    for j in 1..=k as usize {
        // A throw lands in one of the z already-occupied bins or claims one
        // of the m−(z−1) still-empty ones; sweep z downward to update in place.
        for z in (1..=zmax.min(j)).rev() {
            f[z] = f[z] * (z as f64 / m_f) + f[z - 1] * ((m_f - (z as f64 - 1.0)) / m_f);
        }
        f[0] = 0.0;
    }
    Ok(ConditionalOccupancyPmf::new(k, f, PmfMethod::ExactDp))
}

/// The same uniform occupancy pmf as [`occupancy_uniform_pmf`], evaluated in
/// exact rational arithmetic through the Stirling closed form
/// p(z) = C(m,z)·S(k,z)·z!/m^k.
///
/// Slow and exact by construction; retained purely as the cross-check oracle
/// for the floating-point recurrence (see `cli verify` and the test suite).
pub fn occupancy_uniform_stirling_exact(m: u32, k: u32) -> Result<Vec<BigRational>> {
    if m == 0 && k > 0 {
        return Err(Error::domain(
            "cannot throw balls into zero bins".to_string(),
        ));
    }
    let zmax = k.min(m);
    let denom = BigInt::from(BigUint::from(m.max(1)).pow(k));
    let pmf = (0..=zmax)
        .map(|z| {
            let favorable = binomial_exact(u64::from(m), u64::from(z))
                * stirling2_exact(k, z)
                * factorial_exact(z);
            BigRational::new(BigInt::from(favorable), denom.clone())
        })
        .collect();
    Ok(pmf)
}

/// ln Σ exp(tᵢ) without overflow or underflow; the empty sum is ln 0 = −∞.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let mut sum = NeumaierSum::new();
    for &t in terms {
        sum.add((t - max).exp());
    }
    max + sum.value().ln()
}

/// Running Neumaier-compensated sum: the accumulated rounding error stays
/// O(eps) instead of growing with the number of terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Neumaier-compensated sum of a slice; see [`NeumaierSum`].
pub fn compensated_sum(terms: &[f64]) -> f64 {
    let mut sum = NeumaierSum::new();
    for &t in terms {
        sum.add(t);
    }
    sum.value()
}
