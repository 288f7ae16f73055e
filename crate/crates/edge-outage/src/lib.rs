//! Outage analysis for a cache-enabled relay with a rate-limited backhaul.
//!
//! A relay holds `M` of the `N` files in a content library and serves `d`
//! simultaneous requests. Requests that hit the cache are free; the misses
//! must share a backhaul link that can fetch at most `C` *distinct* files per
//! round. An outage is a round in which the distinct missed files exceed `C`.
//!
//! The crate computes the outage probability along three routes:
//!
//! - **Closed form** ([`outage_rap`], [`outage_mop`]): exact for random
//!   placement under uniform requests, and a Gaussian occupancy
//!   approximation for most-popular placement under Zipf requests.
//! - **Exact oracles** ([`oracle`]): exhaustive enumeration and an
//!   inclusion–exclusion occupancy law for small instances, used to validate
//!   the fast paths.
//! - **Monte-Carlo simulation** ([`simulate`]): seeded, reproducible across
//!   worker counts, with Wilson confidence intervals.
//!
//! On top of the point evaluations, [`design`] inverts the outage curve
//! (largest supported `d` under a target) and runs parameter sweeps.
//!
//! ```
//! use edge_outage::{outage_rap, SystemConfig};
//!
//! let config = SystemConfig::new(100, 10, 40, 50)?;
//! let result = outage_rap(&config)?;
//! assert!((result.p_out - 0.0245).abs() < 1e-3);
//! # Ok::<(), edge_outage::Error>(())
//! ```
//!
//! The `edge-outage` binary exposes the same functionality as subcommands
//! (`outage`, `occupancy`, `simulate`, `design`, `sweep`, `verify`); the
//! `examples/` directory shows each library capability in a runnable form.

pub mod analytic;
pub mod cli;
pub mod design;
pub mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod simulate;

pub use analytic::{
    outage_mop, outage_mop_with, outage_rap, ConditionalOccupancyPmf, Diagnostics,
    GaussianOccupancyParams, OutageMethod, OutageResult, PmfMethod,
};
pub use design::{max_supported_users, sweep, DesignQuery, SweepSpec, SweepTable};
pub use error::{Error, Result};
pub use model::{CacheScheme, RequestModel, SystemConfig};
pub use simulate::{monte_carlo_outage, SimulationReport};
