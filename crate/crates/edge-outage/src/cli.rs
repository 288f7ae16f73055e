//! Subcommand front end.
//!
//! Exit codes are part of the public contract: 0 success, 2 usage or
//! validation failure, 3 oracle budget exceeded, 4 design ceiling reached,
//! 5 verification discrepancy. CSV output carries a header row and renders
//! probabilities with 12 significant digits; JSON output is a single object
//! (an array for sweeps) whose keys always appear in the documented order.

use std::path::PathBuf;

use clap::builder::PossibleValue;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytic::{
    gaussian_occupancy_pmf, gaussian_params, outage_mop_with, outage_rap, OutageMethod,
    OutageResult, PmfMethod,
};
use crate::design::{self, CellKind, DesignQuery, SweepAxis, SweepSpec};
use crate::error::{Error, Result};
use crate::model::{CacheScheme, ConfigFile, SystemConfig};
use crate::numerics::{occupancy_uniform_pmf, occupancy_uniform_stirling_exact};
use crate::oracle::{brute_force_outage, exact_occupancy_weighted, OracleBudget};
use crate::simulate::{
    monte_carlo_occupancy, monte_carlo_outage, run_with_workers, SimulationReport,
};

/// Environment variable supplying the default worker count for parallel
/// commands; an explicit `--workers` flag wins over it.
pub const WORKERS_ENV: &str = "EDGE_OUTAGE_WORKERS";

/// Parses the process arguments, runs the chosen command, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Validation { .. } | Error::Domain(_) | Error::Configuration(_) => 2,
        Error::Budget(_) => 3,
        Error::Ceiling(_) => 4,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Outage(args) => cmd_outage(args).map(|()| 0),
        Command::Occupancy(args) => cmd_occupancy(args).map(|()| 0),
        Command::Simulate(args) => cmd_simulate(args).map(|()| 0),
        Command::Design(args) => cmd_design(args).map(|()| 0),
        Command::Sweep(args) => cmd_sweep(args).map(|()| 0),
        Command::Verify(args) => cmd_verify(args),
    }
}

#[derive(Parser)]
#[command(
    name = "edge-outage",
    version,
    about = "Outage probability and capacity design for cache-enabled relays \
             with a rate-limited backhaul"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form outage probability for one configuration.
    Outage(OutageArgs),
    /// Distribution of the number of distinct bins hit by k draws.
    Occupancy(OccupancyArgs),
    /// Seeded Monte-Carlo outage estimate with a Wilson 95% interval.
    Simulate(SimulateArgs),
    /// Largest number of users supportable under a target outage.
    Design(DesignArgs),
    /// Grid evaluation over one or more parameter axes.
    Sweep(SweepArgs),
    /// Cross-check the fast paths against the exact oracles.
    Verify(VerifyArgs),
}

impl clap::ValueEnum for CacheScheme {
    fn value_variants<'a>() -> &'a [Self] {
        &[CacheScheme::Rap, CacheScheme::Mop]
    }

    fn to_possible_value(&self) -> Option<PossibleValue> {
        Some(match self {
            CacheScheme::Rap => {
                PossibleValue::new("rap").help("random placement, uniform requests")
            }
            CacheScheme::Mop => {
                PossibleValue::new("mop").help("most-popular placement, Zipf requests")
            }
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// Configuration flags shared by the analysis commands. Every value may come
/// from `--config` instead; explicit flags win.
#[derive(Args)]
struct ConfigArgs {
    /// Cache placement scheme.
    #[arg(long, value_enum)]
    scheme: Option<CacheScheme>,
    /// Library size N.
    #[arg(long)]
    library: Option<u32>,
    /// Cache size M (files held by the relay).
    #[arg(long)]
    cache: Option<u32>,
    /// Backhaul capacity C (distinct files fetchable per round).
    #[arg(long)]
    capacity: Option<u32>,
    /// Concurrent requests d.
    #[arg(long)]
    users: Option<u32>,
    /// Zipf shape alpha (most-popular placement only).
    #[arg(long)]
    alpha: Option<f64>,
    /// JSON file with defaults for these flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

enum UsersRule {
    Required,
    Forbidden,
    Optional,
}

struct Resolved {
    scheme: CacheScheme,
    library: u32,
    cache: u32,
    capacity: u32,
    users: Option<u32>,
    alpha: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self, users_rule: UsersRule) -> Result<Resolved> {
        self.resolve_relaxing(users_rule, false, false)
    }

    /// Like [`resolve`](Self::resolve), but a relaxed field may be absent
    /// (it falls back to 0). Sweeps relax the parameters their axes cover.
    fn resolve_relaxing(
        &self,
        users_rule: UsersRule,
        relax_cache: bool,
        relax_capacity: bool,
    ) -> Result<Resolved> {
        let file = match &self.config {
            None => ConfigFile::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::validation("config", format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| {
                    Error::validation("config", format!("{}: {e}", path.display()))
                })?
            }
        };

        let require = |value: Option<u32>, field: &'static str, relaxed: bool| -> Result<u32> {
            if relaxed {
                return Ok(value.unwrap_or(0));
            }
            value.ok_or_else(|| {
                Error::validation(field, "required (set the flag or provide it via --config)")
            })
        };
        let scheme = self.scheme.or(file.scheme).ok_or_else(|| {
            Error::validation("scheme", "required (set the flag or provide it via --config)")
        })?;
        let library = require(self.library.or(file.library_size), "library", false)?;
        let cache = require(self.cache.or(file.cache_size), "cache", relax_cache)?;
        let capacity = require(
            self.capacity.or(file.backhaul_capacity),
            "capacity",
            relax_capacity,
        )?;

        let users = self.users.or(file.num_requests);
        let users = match users_rule {
            UsersRule::Required => Some(require(users, "users", false)?),
            UsersRule::Optional => users,
            UsersRule::Forbidden => {
                if self.users.is_some() {
                    return Err(Error::validation(
                        "users",
                        "this command computes the user count; drop --users",
                    ));
                }
                None
            }
        };

        // An explicit --alpha clashes with random placement; a config file's
        // zipf_alpha is shared-defaults material and is silently irrelevant.
        let alpha = match scheme {
            CacheScheme::Rap => {
                if self.alpha.is_some() {
                    return Err(Error::configuration(
                        "random placement takes no Zipf shape; drop --alpha",
                    ));
                }
                None
            }
            CacheScheme::Mop => self.alpha.or(file.zipf_alpha),
        };

        Ok(Resolved {
            scheme,
            library,
            cache,
            capacity,
            users,
            alpha,
        })
    }
}

/// `{:.11e}` gives one leading digit plus 11 fractional digits: the 12
/// significant digits the CSV contract promises, locale-free.
fn fmt_prob(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt_prob(x: Option<f64>) -> String {
    x.map(fmt_prob).unwrap_or_default()
}

fn fmt_opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::domain(format!("cannot encode output as JSON: {e}")))?;
    println!("{text}");
    Ok(())
}

// ---------------------------------------------------------------------------
// outage

#[derive(Args)]
struct OutageArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Rescale each conditional occupancy pmf to unit mass before summing
    /// (sensitivity variant; most-popular placement only).
    #[arg(long)]
    renormalize_occupancy: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Serialize)]
struct OutageRecord {
    scheme: CacheScheme,
    library_size: u32,
    cache_size: u32,
    backhaul_capacity: u32,
    num_requests: u32,
    alpha: Option<f64>,
    method: OutageMethod,
    p_out: f64,
    success_mass: f64,
    terms_k: u64,
    min_sigma_sq: Option<f64>,
    raw_p_out: Option<f64>,
}

const OUTAGE_CSV_HEADER: &str = "scheme,library_size,cache_size,backhaul_capacity,num_requests,\
                                 alpha,method,p_out,success_mass,terms_k,min_sigma_sq,raw_p_out";

fn outage_record(
    scheme: CacheScheme,
    config: &SystemConfig,
    alpha: Option<f64>,
    result: &OutageResult,
) -> OutageRecord {
    OutageRecord {
        scheme,
        library_size: config.library_size,
        cache_size: config.cache_size,
        backhaul_capacity: config.backhaul_capacity,
        num_requests: config.num_requests,
        alpha,
        method: result.method,
        p_out: result.p_out,
        success_mass: result.diagnostics.success_mass,
        terms_k: result.diagnostics.terms_k,
        min_sigma_sq: result.diagnostics.min_sigma_sq,
        raw_p_out: result.diagnostics.raw_p_out,
    }
}

fn cmd_outage(args: OutageArgs) -> Result<()> {
    let resolved = args.config.resolve(UsersRule::Required)?;
    if args.renormalize_occupancy && resolved.scheme == CacheScheme::Rap {
        return Err(Error::validation(
            "renormalize-occupancy",
            "only meaningful for most-popular placement",
        ));
    }
    let config = SystemConfig::new(
        resolved.library,
        resolved.cache,
        resolved.capacity,
        resolved.users.expect("required above"),
    )?;
    let result = match resolved.scheme {
        CacheScheme::Rap => outage_rap(&config)?,
        CacheScheme::Mop => {
            let alpha = resolved.alpha.ok_or_else(|| {
                Error::configuration("most-popular placement requires a Zipf shape alpha")
            })?;
            outage_mop_with(&config, alpha, args.renormalize_occupancy)?
        }
    };
    let record = outage_record(resolved.scheme, &config, resolved.alpha, &result);
    match args.format {
        OutputFormat::Json => print_json(&record)?,
        OutputFormat::Csv => {
            println!("{OUTAGE_CSV_HEADER}");
            println!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                record.scheme,
                record.library_size,
                record.cache_size,
                record.backhaul_capacity,
                record.num_requests,
                fmt_opt(record.alpha),
                record.method,
                fmt_prob(record.p_out),
                fmt_prob(record.success_mass),
                record.terms_k,
                fmt_opt_prob(record.min_sigma_sq),
                fmt_opt_prob(record.raw_p_out),
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// occupancy

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OccupancyMethod {
    /// Exact uniform-bin recurrence.
    Exact,
    /// Gaussian density at integer points (un-normalized).
    Gaussian,
    /// Exact inclusion–exclusion over bin subsets (small m).
    Oracle,
    /// Monte-Carlo histogram.
    Mc,
}

#[derive(Args)]
struct OccupancyArgs {
    /// Number of bins m (for Zipf weights this must equal library − cache).
    #[arg(long)]
    bins: u32,
    /// Number of draws k.
    #[arg(long)]
    balls: u32,
    /// Zipf shape for weighted bins; omit for uniform bins.
    #[arg(long)]
    alpha: Option<f64>,
    /// Library size N behind the Zipf weights (with --alpha).
    #[arg(long)]
    library: Option<u32>,
    /// Cache size M excluded from the Zipf weights (with --alpha).
    #[arg(long)]
    cache: Option<u32>,
    #[arg(long, value_enum)]
    method: OccupancyMethod,
    /// Trials for --method mc.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// RNG seed for --method mc.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Serialize)]
struct OccupancyRecord {
    bins: u32,
    balls: u32,
    method: PmfMethod,
    alpha: Option<f64>,
    library: Option<u32>,
    cache: Option<u32>,
    trials: Option<u64>,
    seed: Option<u64>,
    mean: Option<f64>,
    total_mass: f64,
    pmf: Vec<OccupancyEntry>,
}

#[derive(Serialize)]
struct OccupancyEntry {
    z: u32,
    p: f64,
}

fn cmd_occupancy(args: OccupancyArgs) -> Result<()> {
    if args.bins == 0 {
        return Err(Error::validation("bins", "must be at least 1"));
    }
    let weights: Option<Vec<f64>> = match args.alpha {
        Some(alpha) => {
            let library = args.library.ok_or_else(|| {
                Error::validation("library", "required with --alpha (the Zipf support)")
            })?;
            let cache = args.cache.unwrap_or(0);
            let config = SystemConfig::new(library, cache, 0, 1)?;
            if config.noncached_files() != args.bins {
                return Err(Error::validation(
                    "bins",
                    format!(
                        "must equal library − cache = {} for Zipf weights, got {}",
                        config.noncached_files(),
                        args.bins
                    ),
                ));
            }
            Some(crate::model::conditional_noncached_weights(&config, alpha)?)
        }
        None => {
            if args.library.is_some() || args.cache.is_some() {
                return Err(Error::validation(
                    "library",
                    "--library/--cache only apply together with --alpha",
                ));
            }
            None
        }
    };
    let uniform = || vec![1.0 / f64::from(args.bins); args.bins as usize];

    let is_mc = args.method == OccupancyMethod::Mc;
    let pmf = match args.method {
        OccupancyMethod::Exact => {
            if weights.is_some() {
                return Err(Error::validation(
                    "method",
                    "exact covers uniform bins only; use oracle for Zipf weights",
                ));
            }
            occupancy_uniform_pmf(args.bins, args.balls)?
        }
        OccupancyMethod::Gaussian => {
            let q = weights.clone().unwrap_or_else(uniform);
            let params = gaussian_params(args.balls, &q)?;
            gaussian_occupancy_pmf(args.balls, args.bins, &params)
        }
        OccupancyMethod::Oracle => {
            let q = weights.clone().unwrap_or_else(uniform);
            exact_occupancy_weighted(&q, args.balls, &OracleBudget::default())?
        }
        OccupancyMethod::Mc => {
            let q = weights.clone().unwrap_or_else(uniform);
            run_with_workers(workers_from_env(None)?, || {
                monte_carlo_occupancy(args.bins, &q, args.balls, args.trials, args.seed)
            })??
        }
    };

    let entries: Vec<OccupancyEntry> = pmf
        .iter()
        .filter(|&(z, p)| z > 0 || p > 0.0)
        .map(|(z, p)| OccupancyEntry { z, p })
        .collect();
    match args.format {
        OutputFormat::Json => {
            let mean = pmf.mean();
            print_json(&OccupancyRecord {
                bins: args.bins,
                balls: args.balls,
                method: pmf.method(),
                alpha: args.alpha,
                library: args.library,
                cache: args.cache,
                trials: is_mc.then_some(args.trials),
                seed: is_mc.then_some(args.seed),
                mean: mean.is_finite().then_some(mean),
                total_mass: pmf.total_mass(),
                pmf: entries,
            })?;
        }
        OutputFormat::Csv => {
            println!("z,p");
            for entry in entries {
                println!("{},{}", entry.z, fmt_prob(entry.p));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Number of Monte-Carlo trials.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// RNG seed; identical seeds reproduce identical reports.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: EDGE_OUTAGE_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

const SIMULATE_CSV_HEADER: &str = "scheme,library_size,cache_size,backhaul_capacity,\
                                   num_requests,alpha,trials,outage_count,p_out_hat,\
                                   ci_half_width_95,seed";

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let resolved = args.config.resolve(UsersRule::Required)?;
    let config = SystemConfig::new(
        resolved.library,
        resolved.cache,
        resolved.capacity,
        resolved.users.expect("required above"),
    )?;
    if resolved.scheme == CacheScheme::Mop && resolved.alpha.is_none() {
        return Err(Error::configuration(
            "most-popular placement requires a Zipf shape alpha",
        ));
    }
    let workers = workers_from_env(args.workers)?;
    let report = run_with_workers(workers, || {
        monte_carlo_outage(
            &config,
            resolved.scheme,
            resolved.alpha,
            args.trials,
            args.seed,
        )
    })??;
    print_simulation_report(&report, args.format)
}

fn print_simulation_report(report: &SimulationReport, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => print_json(report)?,
        OutputFormat::Csv => {
            println!("{SIMULATE_CSV_HEADER}");
            println!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                report.scheme,
                report.config.library_size,
                report.config.cache_size,
                report.config.backhaul_capacity,
                report.config.num_requests,
                fmt_opt(report.alpha),
                report.trials,
                report.outage_count,
                fmt_prob(report.p_out_hat),
                fmt_prob(report.ci_half_width_95),
                report.seed,
            );
        }
    }
    Ok(())
}

/// Worker-count precedence: explicit flag, then the environment variable,
/// then the global default pool.
fn workers_from_env(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(WORKERS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::validation(WORKERS_ENV, e.to_string())),
        Ok(text) => match text.parse::<usize>() {
            Ok(count) if count >= 1 => Ok(Some(count)),
            _ => Err(Error::validation(
                WORKERS_ENV,
                format!("expected a positive worker count, got \"{text}\""),
            )),
        },
    }
}

// ---------------------------------------------------------------------------
// design

#[derive(Args)]
struct DesignArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Target outage probability (strictly between 0 and 1).
    #[arg(long)]
    target: f64,
    /// Scan ceiling for the user count (default 10·C + 10·M + 10).
    #[arg(long)]
    d_max: Option<u32>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Serialize)]
struct DesignRecord {
    scheme: CacheScheme,
    library_size: u32,
    cache_size: u32,
    backhaul_capacity: u32,
    alpha: Option<f64>,
    target_p_out: f64,
    d_max: u32,
    method: OutageMethod,
    d_star: u32,
}

const DESIGN_CSV_HEADER: &str = "scheme,library_size,cache_size,backhaul_capacity,alpha,\
                                 target_p_out,d_max,method,d_star";

fn cmd_design(args: DesignArgs) -> Result<()> {
    let resolved = args.config.resolve(UsersRule::Forbidden)?;
    let query = DesignQuery {
        scheme: resolved.scheme,
        library_size: resolved.library,
        cache_size: resolved.cache,
        backhaul_capacity: resolved.capacity,
        alpha: resolved.alpha,
        target_p_out: args.target,
        d_max: args.d_max,
    };
    let d_star = design::max_supported_users(&query)?;
    let record = DesignRecord {
        scheme: resolved.scheme,
        library_size: resolved.library,
        cache_size: resolved.cache,
        backhaul_capacity: resolved.capacity,
        alpha: resolved.alpha,
        target_p_out: args.target,
        d_max: query.effective_d_max(),
        method: match resolved.scheme {
            CacheScheme::Rap => OutageMethod::RapExact,
            CacheScheme::Mop => OutageMethod::MopGaussian,
        },
        d_star,
    };
    match args.format {
        OutputFormat::Json => print_json(&record)?,
        OutputFormat::Csv => {
            println!("{DESIGN_CSV_HEADER}");
            println!(
                "{},{},{},{},{},{},{},{},{}",
                record.scheme,
                record.library_size,
                record.cache_size,
                record.backhaul_capacity,
                fmt_opt(record.alpha),
                record.target_p_out,
                record.d_max,
                record.method,
                record.d_star,
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum CellsArg {
    /// One outage probability per cell.
    Outage,
    /// One maximum supported user count per cell.
    MaxUsers,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Axis specification NAME=VALUES, repeatable. NAME is one of d, C, M,
    /// alpha, target; VALUES is a comma list (20,30,40) or a range
    /// start:end[:step] (1:100).
    #[arg(long = "axis", value_name = "NAME=VALUES", required = true)]
    axes: Vec<String>,
    /// What each cell holds.
    #[arg(long, value_enum, default_value = "outage")]
    cells: CellsArg,
    /// Fixed target outage for max-users sweeps without a target axis.
    #[arg(long)]
    target: Option<f64>,
    /// Scan ceiling per max-users cell (default 10·C + 10·M + 10).
    #[arg(long)]
    d_max: Option<u32>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Serialize)]
struct SweepRow {
    scheme: CacheScheme,
    library_size: u32,
    cache_size: u32,
    backhaul_capacity: u32,
    num_requests: Option<u32>,
    alpha: Option<f64>,
    target_p_out: Option<f64>,
    method: OutageMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_out: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_star: Option<u32>,
}

fn parse_axis(text: &str) -> Result<(SweepAxis, Vec<f64>)> {
    let (name, spec) = text.split_once('=').ok_or_else(|| {
        Error::validation("axis", format!("expected NAME=VALUES, got \"{text}\""))
    })?;
    let axis: SweepAxis = name.parse()?;
    let number = |part: &str| -> Result<f64> {
        part.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                Error::validation("axis", format!("\"{part}\" is not a finite number"))
            })
    };
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() > 3 {
            return Err(Error::validation(
                "axis",
                format!("range takes start:end[:step], got \"{spec}\""),
            ));
        }
        let start = number(parts[0])?;
        let end = number(parts[1])?;
        let step = if parts.len() == 3 { number(parts[2])? } else { 1.0 };
        if step <= 0.0 || end < start {
            return Err(Error::validation(
                "axis",
                format!("range \"{spec}\" needs end >= start and step > 0"),
            ));
        }
        let mut values = Vec::new();
        let mut i = 0_u64;
        loop {
            let v = start + i as f64 * step;
            if v > end * (1.0 + 1e-12) + step * 1e-9 {
                break;
            }
            values.push(v);
            i += 1;
        }
        values
    } else {
        spec.split(',')
            .map(number)
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(Error::validation("axis", format!("axis {axis} has no values")));
    }
    Ok((axis, values))
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let axes = args
        .axes
        .iter()
        .map(|text| parse_axis(text))
        .collect::<Result<Vec<_>>>()?;
    let has_axis = |wanted: SweepAxis| axes.iter().any(|(axis, _)| *axis == wanted);

    let kind = match args.cells {
        CellsArg::Outage => CellKind::Outage,
        CellsArg::MaxUsers => CellKind::MaxUsers,
    };
    let users_rule = match kind {
        CellKind::MaxUsers => UsersRule::Forbidden,
        CellKind::Outage => UsersRule::Optional,
    };
    // Fixed values for axis-covered parameters are never consulted, so they
    // need not be supplied; their zero placeholders are overridden per cell.
    let resolved = args.config.resolve_relaxing(
        users_rule,
        has_axis(SweepAxis::M),
        has_axis(SweepAxis::C),
    )?;

    if kind == CellKind::Outage && !has_axis(SweepAxis::D) && resolved.users.is_none() {
        return Err(Error::validation(
            "users",
            "required unless d is a sweep axis",
        ));
    }
    let base = SystemConfig {
        library_size: resolved.library,
        cache_size: resolved.cache,
        backhaul_capacity: resolved.capacity,
        num_requests: resolved.users.unwrap_or(1),
    }
    .validate()?;

    let spec = SweepSpec {
        scheme: resolved.scheme,
        base,
        alpha: resolved.alpha,
        target_p_out: args.target,
        d_max: args.d_max,
        axes,
        kind,
    };
    let table = run_with_workers(workers_from_env(None)?, || design::sweep(&spec))??;

    let rows: Vec<SweepRow> = table
        .rows()
        .map(|(coordinates, cell)| {
            let mut row = SweepRow {
                scheme: spec.scheme,
                library_size: base.library_size,
                cache_size: base.cache_size,
                backhaul_capacity: base.backhaul_capacity,
                num_requests: match kind {
                    CellKind::Outage => Some(base.num_requests),
                    CellKind::MaxUsers => None,
                },
                alpha: spec.alpha,
                target_p_out: spec.target_p_out,
                method: cell.method,
                p_out: (kind == CellKind::Outage).then_some(cell.value),
                d_star: (kind == CellKind::MaxUsers).then_some(cell.value as u32),
            };
            for ((axis, _), value) in spec.axes.iter().zip(coordinates) {
                match axis {
                    SweepAxis::D => row.num_requests = Some(value as u32),
                    SweepAxis::C => row.backhaul_capacity = value as u32,
                    SweepAxis::M => row.cache_size = value as u32,
                    SweepAxis::Alpha => row.alpha = Some(value),
                    SweepAxis::Target => row.target_p_out = Some(value),
                }
            }
            row
        })
        .collect();

    match args.format {
        OutputFormat::Json => print_json(&rows)?,
        OutputFormat::Csv => {
            let value_column = match kind {
                CellKind::Outage => "p_out",
                CellKind::MaxUsers => "d_star",
            };
            println!(
                "scheme,library_size,cache_size,backhaul_capacity,num_requests,alpha,\
                 target_p_out,method,{value_column}"
            );
            for row in rows {
                let value = match kind {
                    CellKind::Outage => fmt_prob(row.p_out.expect("outage cell")),
                    CellKind::MaxUsers => row.d_star.expect("max-users cell").to_string(),
                };
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    row.scheme,
                    row.library_size,
                    row.cache_size,
                    row.backhaul_capacity,
                    fmt_opt(row.num_requests),
                    fmt_opt(row.alpha),
                    fmt_opt(row.target_p_out),
                    row.method,
                    value,
                );
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

#[derive(Args)]
struct VerifyArgs {
    /// Largest library size for the enumeration cross-check.
    #[arg(long, default_value_t = 6)]
    max_library: u32,
    /// Largest request count for the enumeration cross-check.
    #[arg(long, default_value_t = 7)]
    max_users: u32,
}

struct CheckOutcome {
    name: &'static str,
    max_discrepancy: f64,
    tolerance: f64,
    worst: String,
}

const VERIFY_TOLERANCE: f64 = 1e-9;

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let checks = vec![
        check_recurrence_vs_stirling()?,
        check_closed_form_vs_enumeration(args.max_library, args.max_users)?,
        check_weighted_oracle_vs_recurrence()?,
    ];

    println!("check,max_discrepancy,tolerance,status");
    let mut failed = Vec::new();
    for check in &checks {
        let ok = check.max_discrepancy <= check.tolerance;
        println!(
            "{},{},{},{}",
            check.name,
            fmt_prob(check.max_discrepancy),
            fmt_prob(check.tolerance),
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failed.push(check);
        }
    }
    if failed.is_empty() {
        return Ok(0);
    }
    for check in failed {
        eprintln!(
            "verification failed: {} discrepancy {} exceeds {} (worst: {})",
            check.name,
            fmt_prob(check.max_discrepancy),
            fmt_prob(check.tolerance),
            check.worst
        );
    }
    Ok(5)
}

/// Floating-point occupancy recurrence vs. the exact rational Stirling
/// closed form, entrywise over m, k ≤ 30.
fn check_recurrence_vs_stirling() -> Result<CheckOutcome> {
    use num_traits::ToPrimitive;
    let mut max_discrepancy = 0.0_f64;
    let mut worst = String::from("none");
    for m in 0..=30_u32 {
        for k in 0..=30_u32 {
            if m == 0 && k > 0 {
                continue;
            }
            let dp = occupancy_uniform_pmf(m, k)?;
            let exact = occupancy_uniform_stirling_exact(m, k)?;
            for (z, rational) in exact.iter().enumerate() {
                let gap = (dp.prob(z as u32) - rational.to_f64().unwrap_or(0.0)).abs();
                if gap > max_discrepancy {
                    max_discrepancy = gap;
                    worst = format!("m={m} k={k} z={z}");
                }
            }
        }
    }
    Ok(CheckOutcome {
        name: "occupancy-recurrence-vs-stirling",
        max_discrepancy,
        tolerance: VERIFY_TOLERANCE,
        worst,
    })
}

/// Closed-form outage vs. exhaustive enumeration over every configuration
/// with N ≤ max_library, d ≤ max_users, any cache size, any C < d.
fn check_closed_form_vs_enumeration(max_library: u32, max_users: u32) -> Result<CheckOutcome> {
    let budget = OracleBudget::default();
    let mut max_discrepancy = 0.0_f64;
    let mut worst = String::from("none");
    for n in 1..=max_library {
        for m in 0..=n {
            for d in 1..=max_users {
                for c in 0..d {
                    let config = SystemConfig::new(n, m, c, d)?;
                    let enumerated = brute_force_outage(&config, CacheScheme::Rap, None, &budget)?;
                    let closed = outage_rap(&config)?;
                    let gap = (enumerated.p_out - closed.p_out).abs();
                    if gap > max_discrepancy {
                        max_discrepancy = gap;
                        worst = format!("N={n} M={m} C={c} d={d}");
                    }
                }
            }
        }
    }
    Ok(CheckOutcome {
        name: "closed-form-vs-enumeration",
        max_discrepancy,
        tolerance: VERIFY_TOLERANCE,
        worst,
    })
}

/// Weighted-bin inclusion–exclusion oracle vs. the uniform recurrence on
/// uniform weights, m ≤ 10, k ≤ 15.
fn check_weighted_oracle_vs_recurrence() -> Result<CheckOutcome> {
    let budget = OracleBudget::default();
    let mut max_discrepancy = 0.0_f64;
    let mut worst = String::from("none");
    for m in 1..=10_u32 {
        let q = vec![1.0 / f64::from(m); m as usize];
        for k in 0..=15_u32 {
            let oracle = exact_occupancy_weighted(&q, k, &budget)?;
            let recurrence = occupancy_uniform_pmf(m, k)?;
            for z in 0..=oracle.support_max().max(recurrence.support_max()) {
                let gap = (oracle.prob(z) - recurrence.prob(z)).abs();
                if gap > max_discrepancy {
                    max_discrepancy = gap;
                    worst = format!("m={m} k={k} z={z}");
                }
            }
        }
    }
    Ok(CheckOutcome {
        name: "weighted-oracle-vs-recurrence",
        max_discrepancy,
        tolerance: VERIFY_TOLERANCE,
        worst,
    })
}
