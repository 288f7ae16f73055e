//! Inverse and sweep tooling: how many users fit under a target outage, and
//! grid evaluations that generate figure-ready tables.

use rayon::prelude::*;

use crate::analytic::{outage_mop, outage_rap, OutageMethod};
use crate::error::{Error, Result};
use crate::model::{CacheScheme, SystemConfig};

/// Fixed parameters for a maximum-users query: find the largest d whose
/// analytic outage stays at or below `target_p_out`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignQuery {
    pub scheme: CacheScheme,
    pub library_size: u32,
    pub cache_size: u32,
    pub backhaul_capacity: u32,
    /// Zipf shape; required for most-popular placement, forbidden for random
    /// placement.
    pub alpha: Option<f64>,
    pub target_p_out: f64,
    /// Upper end of the scan; `None` uses 10·C + 10·M + 10, generous for the
    /// outage levels this tooling targets.
    pub d_max: Option<u32>,
}

impl DesignQuery {
    pub fn effective_d_max(&self) -> u32 {
        self.d_max.unwrap_or_else(|| {
            10_u32
                .saturating_mul(self.backhaul_capacity)
                .saturating_add(10_u32.saturating_mul(self.cache_size))
                .saturating_add(10)
        })
    }
}

/// Violations of the expected outage monotonicity in d beyond this slack
/// abort the scan: returning a d* computed from a non-monotone curve would be
/// silently wrong.
const MONOTONICITY_SLACK: f64 = 1e-12;

/// The largest request count d whose outage probability does not exceed the
/// target, by linear scan upward from d = C + 1.
///
/// All d ≤ C are trivially supportable (outage 0), so if even d = C + 1
/// overshoots the target, the answer is C. The scan asserts along the way
/// that the outage curve is non-decreasing in d — guaranteed for the exact
/// random-placement form, expected but not proven for the Gaussian
/// approximation — and fails rather than trusting a non-monotone curve.
pub fn max_supported_users(query: &DesignQuery) -> Result<u32> {
    if !query.target_p_out.is_finite()
        || query.target_p_out <= 0.0
        || query.target_p_out >= 1.0
    {
        return Err(Error::validation(
            "target_p_out",
            format!("must lie strictly between 0 and 1, got {}", query.target_p_out),
        ));
    }
    let outage_at = outage_fn(query.scheme, query.alpha)?;
    let c = query.backhaul_capacity;
    let d_max = query.effective_d_max();

    let mut previous = 0.0_f64;
    for d in c + 1..=d_max {
        let config = SystemConfig::new(
            query.library_size,
            query.cache_size,
            query.backhaul_capacity,
            d,
        )?;
        let p_out = outage_at(&config)?;
        if p_out < previous - MONOTONICITY_SLACK {
            return Err(Error::domain(format!(
                "outage decreased from {previous} to {p_out} between d={} and d={d}; \
                 refusing to report a supported-user count from a non-monotone curve",
                d - 1
            )));
        }
        if p_out > query.target_p_out {
            return Ok(d - 1);
        }
        previous = p_out;
    }
    Err(Error::ceiling(format!(
        "outage stays at or below {} for every d up to {d_max}; raise d_max",
        query.target_p_out
    )))
}

type OutageFn = Box<dyn Fn(&SystemConfig) -> Result<f64> + Sync + Send>;

fn outage_fn(scheme: CacheScheme, alpha: Option<f64>) -> Result<OutageFn> {
    match (scheme, alpha) {
        (CacheScheme::Rap, None) => Ok(Box::new(|config| Ok(outage_rap(config)?.p_out))),
        (CacheScheme::Rap, Some(_)) => Err(Error::configuration(
            "random placement takes no Zipf shape; drop alpha",
        )),
        (CacheScheme::Mop, Some(alpha)) => {
            Ok(Box::new(move |config| Ok(outage_mop(config, alpha)?.p_out)))
        }
        (CacheScheme::Mop, None) => Err(Error::configuration(
            "most-popular placement requires a Zipf shape alpha",
        )),
    }
}

/// A parameter that can vary across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Number of concurrent requests d.
    D,
    /// Backhaul capacity C.
    C,
    /// Cache size M.
    M,
    /// Zipf shape α.
    Alpha,
    /// Target outage probability (max-users sweeps only).
    Target,
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepAxis::D => "d",
            SweepAxis::C => "C",
            SweepAxis::M => "M",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Target => "target",
        })
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d" => Ok(SweepAxis::D),
            "C" => Ok(SweepAxis::C),
            "M" => Ok(SweepAxis::M),
            "alpha" => Ok(SweepAxis::Alpha),
            "target" => Ok(SweepAxis::Target),
            other => Err(Error::validation(
                "axis",
                format!("unknown axis \"{other}\" (expected d, C, M, alpha, or target)"),
            )),
        }
    }
}

/// What each sweep cell holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    /// Analytic outage probability at the cell's configuration.
    Outage,
    /// Maximum supported users d* at the cell's configuration and target.
    MaxUsers,
}

/// A full sweep request: fixed base configuration plus one or more axes.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub scheme: CacheScheme,
    /// Fixed values for every parameter; axis values override per cell. For
    /// max-users sweeps the base `num_requests` is unused.
    pub base: SystemConfig,
    pub alpha: Option<f64>,
    /// Fixed target for max-users sweeps without a target axis.
    pub target_p_out: Option<f64>,
    pub d_max: Option<u32>,
    pub axes: Vec<(SweepAxis, Vec<f64>)>,
    pub kind: CellKind,
}

/// One evaluated sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    /// p_out or d*, depending on the table's [`CellKind`].
    pub value: f64,
    pub method: OutageMethod,
}

/// Rectangular sweep result. Cells are stored row-major with the first axis
/// outermost: the last axis varies fastest.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axes: Vec<(SweepAxis, Vec<f64>)>,
    pub kind: CellKind,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Iterates cells in storage order along with their axis coordinates.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<f64>, SweepCell)> + '_ {
        (0..self.cells.len()).map(|index| (self.coordinates(index), self.cells[index]))
    }

    fn coordinates(&self, mut index: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.axes.len()];
        for (slot, (_, values)) in coords.iter_mut().zip(&self.axes).rev() {
            *slot = values[index % values.len()];
            index /= values.len();
        }
        coords
    }
}

/// Evaluates the sweep grid. Cells are independent and computed in parallel;
/// assembly order is fixed by the axis order, so output is deterministic.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    validate_spec(spec)?;

    let total: usize = spec.axes.iter().map(|(_, v)| v.len()).product();
    let cells = (0..total)
        .into_par_iter()
        .map(|index| evaluate_cell(spec, index))
        .collect::<Result<Vec<SweepCell>>>()?;

    Ok(SweepTable {
        axes: spec.axes.clone(),
        kind: spec.kind,
        cells,
    })
}

fn validate_spec(spec: &SweepSpec) -> Result<()> {
    if spec.axes.is_empty() {
        return Err(Error::validation("axes", "at least one axis is required"));
    }
    for (i, (axis, values)) in spec.axes.iter().enumerate() {
        if values.is_empty() {
            return Err(Error::validation(
                "axis",
                format!("axis {axis} has no values"),
            ));
        }
        if spec.axes[..i].iter().any(|(other, _)| other == axis) {
            return Err(Error::validation(
                "axis",
                format!("axis {axis} appears more than once"),
            ));
        }
        match axis {
            SweepAxis::D | SweepAxis::C | SweepAxis::M => {
                for &v in values {
                    if !v.is_finite() || v.fract() != 0.0 || v < 0.0 || v > f64::from(u32::MAX) {
                        return Err(Error::validation(
                            "axis",
                            format!("axis {axis} requires non-negative integers, got {v}"),
                        ));
                    }
                    if *axis == SweepAxis::D && v < 1.0 {
                        return Err(Error::validation("axis", "axis d requires values >= 1"));
                    }
                }
            }
            SweepAxis::Alpha => {
                if spec.scheme == CacheScheme::Rap {
                    return Err(Error::configuration(
                        "random placement takes no Zipf shape; drop the alpha axis",
                    ));
                }
            }
            SweepAxis::Target => {
                if spec.kind != CellKind::MaxUsers {
                    return Err(Error::validation(
                        "axis",
                        "a target axis only applies to max-users sweeps",
                    ));
                }
            }
        }
    }

    let has_axis = |wanted: SweepAxis| spec.axes.iter().any(|(axis, _)| *axis == wanted);
    match spec.kind {
        CellKind::Outage => {
            if spec.target_p_out.is_some() || has_axis(SweepAxis::Target) {
                return Err(Error::validation(
                    "target_p_out",
                    "outage sweeps take no target",
                ));
            }
        }
        CellKind::MaxUsers => {
            if has_axis(SweepAxis::D) {
                return Err(Error::validation(
                    "axis",
                    "d is the output of a max-users sweep; it cannot be an axis",
                ));
            }
            if spec.target_p_out.is_none() && !has_axis(SweepAxis::Target) {
                return Err(Error::validation(
                    "target_p_out",
                    "max-users sweeps need a fixed target or a target axis",
                ));
            }
        }
    }

    // Scheme/shape pairing, mirrored from the point evaluations.
    match spec.scheme {
        CacheScheme::Rap if spec.alpha.is_some() => Err(Error::configuration(
            "random placement takes no Zipf shape; drop alpha",
        )),
        CacheScheme::Mop if spec.alpha.is_none() && !has_axis(SweepAxis::Alpha) => {
            Err(Error::configuration(
                "most-popular placement requires a Zipf shape alpha (fixed or as an axis)",
            ))
        }
        _ => Ok(()),
    }
}

fn evaluate_cell(spec: &SweepSpec, index: usize) -> Result<SweepCell> {
    // Decode the row-major index into one value per axis (last axis fastest).
    let mut remaining = index;
    let mut assignment: Vec<(SweepAxis, f64)> = vec![(SweepAxis::D, 0.0); spec.axes.len()];
    for (slot, (axis, values)) in assignment.iter_mut().zip(&spec.axes).rev() {
        *slot = (*axis, values[remaining % values.len()]);
        remaining /= values.len();
    }

    let mut d = spec.base.num_requests;
    let mut c = spec.base.backhaul_capacity;
    let mut m = spec.base.cache_size;
    let mut alpha = spec.alpha;
    let mut target = spec.target_p_out;
    for (axis, value) in assignment {
        match axis {
            SweepAxis::D => d = value as u32,
            SweepAxis::C => c = value as u32,
            SweepAxis::M => m = value as u32,
            SweepAxis::Alpha => alpha = Some(value),
            SweepAxis::Target => target = Some(value),
        }
    }

    match spec.kind {
        CellKind::Outage => {
            let config = SystemConfig::new(spec.base.library_size, m, c, d)?;
            let result = match spec.scheme {
                CacheScheme::Rap => outage_rap(&config)?,
                CacheScheme::Mop => outage_mop(
                    &config,
                    alpha.expect("validated: mop sweeps carry alpha"),
                )?,
            };
            Ok(SweepCell {
                value: result.p_out,
                method: result.method,
            })
        }
        CellKind::MaxUsers => {
            let query = DesignQuery {
                scheme: spec.scheme,
                library_size: spec.base.library_size,
                cache_size: m,
                backhaul_capacity: c,
                alpha,
                target_p_out: target.expect("validated: max-users sweeps carry a target"),
                d_max: spec.d_max,
            };
            let d_star = max_supported_users(&query)?;
            Ok(SweepCell {
                value: f64::from(d_star),
                method: match spec.scheme {
                    CacheScheme::Rap => OutageMethod::RapExact,
                    CacheScheme::Mop => OutageMethod::MopGaussian,
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mop_query(c: u32, target: f64) -> DesignQuery {
        DesignQuery {
            scheme: CacheScheme::Mop,
            library_size: 100,
            cache_size: 10,
            backhaul_capacity: c,
            alpha: Some(1.0),
            target_p_out: target,
            d_max: None,
        }
    }

    #[test]
    fn max_users_reference_values() {
        // Frozen from an independent implementation: the outage curve crosses
        // 0.02 between d=27 (0.0189) and d=28 (0.0287) at C=15, and between
        // d=68 (0.0177) and d=69 (0.0220) at C=30.
        assert_eq!(max_supported_users(&mop_query(15, 0.02)).unwrap(), 27);
        assert_eq!(max_supported_users(&mop_query(30, 0.02)).unwrap(), 68);

        // Random placement at the published operating point: 0.0245 ≤ 0.025
        // at d=50, 0.0419 > 0.025 at d=51.
        let rap = DesignQuery {
            scheme: CacheScheme::Rap,
            library_size: 100,
            cache_size: 10,
            backhaul_capacity: 40,
            alpha: None,
            target_p_out: 0.025,
            d_max: None,
        };
        assert_eq!(max_supported_users(&rap).unwrap(), 50);
    }

    #[test]
    fn max_users_returns_capacity_when_first_step_overshoots() {
        // N=20, M=4, C=3: outage at d=4 is already 0.273 > 0.2, so only the
        // trivially supportable d ≤ C remain.
        let query = DesignQuery {
            scheme: CacheScheme::Rap,
            library_size: 20,
            cache_size: 4,
            backhaul_capacity: 3,
            alpha: None,
            target_p_out: 0.2,
            d_max: None,
        };
        assert_eq!(max_supported_users(&query).unwrap(), 3);

        // One step further out: d=4 fits under 0.5, d=5 (0.573) does not.
        let query = DesignQuery {
            target_p_out: 0.5,
            ..query
        };
        assert_eq!(max_supported_users(&query).unwrap(), 4);
    }

    #[test]
    fn max_users_full_cache_hits_ceiling() {
        let query = DesignQuery {
            scheme: CacheScheme::Rap,
            library_size: 10,
            cache_size: 10,
            backhaul_capacity: 2,
            alpha: None,
            target_p_out: 0.5,
            d_max: None,
        };
        let err = max_supported_users(&query).unwrap_err();
        assert!(matches!(err, Error::Ceiling(_)), "got {err}");
        // The default ceiling is 10·C + 10·M + 10.
        assert_eq!(query.effective_d_max(), 130);
    }

    #[test]
    fn max_users_validation() {
        for bad_target in [0.0, 1.0, -0.2, f64::NAN] {
            let query = DesignQuery {
                target_p_out: bad_target,
                ..mop_query(15, 0.02)
            };
            assert!(matches!(
                max_supported_users(&query),
                Err(Error::Validation { field: "target_p_out", .. })
            ));
        }

        let rap_with_alpha = DesignQuery {
            scheme: CacheScheme::Rap,
            ..mop_query(15, 0.02)
        };
        assert!(matches!(
            max_supported_users(&rap_with_alpha),
            Err(Error::Configuration(_))
        ));

        let mop_without_alpha = DesignQuery {
            alpha: None,
            ..mop_query(15, 0.02)
        };
        assert!(matches!(
            max_supported_users(&mop_without_alpha),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn max_users_monotone_in_cache_capacity_and_target() {
        // Non-decreasing in M.
        let mut previous = 0;
        for m in [0_u32, 10, 20, 40, 60] {
            let query = DesignQuery {
                cache_size: m,
                alpha: Some(0.8),
                ..mop_query(30, 0.01)
            };
            let d_star = max_supported_users(&query).unwrap();
            assert!(d_star >= previous, "M={m}: {d_star} < {previous}");
            previous = d_star;
        }
        // Non-decreasing in C.
        let mut previous = 0;
        for c in [10_u32, 15, 20, 30] {
            let d_star = max_supported_users(&mop_query(c, 0.02)).unwrap();
            assert!(d_star >= previous, "C={c}: {d_star} < {previous}");
            previous = d_star;
        }
        // Non-decreasing in the target.
        let loose = max_supported_users(&mop_query(15, 0.05)).unwrap();
        let tight = max_supported_users(&mop_query(15, 0.005)).unwrap();
        assert!(tight <= loose);
    }

    fn outage_sweep_spec() -> SweepSpec {
        SweepSpec {
            scheme: CacheScheme::Rap,
            base: SystemConfig::new(100, 10, 1, 1).unwrap(),
            alpha: None,
            target_p_out: None,
            d_max: None,
            axes: vec![
                (SweepAxis::C, vec![20.0, 30.0]),
                (SweepAxis::D, vec![10.0, 25.0, 40.0]),
            ],
            kind: CellKind::Outage,
        }
    }

    #[test]
    fn sweep_layout_and_trivial_cells() {
        let table = sweep(&outage_sweep_spec()).unwrap();
        assert_eq!(table.len(), 6);

        let rows: Vec<(Vec<f64>, SweepCell)> = table.rows().collect();
        // Row-major, first axis (C) outermost.
        assert_eq!(rows[0].0, vec![20.0, 10.0]);
        assert_eq!(rows[1].0, vec![20.0, 25.0]);
        assert_eq!(rows[3].0, vec![30.0, 10.0]);

        for (coords, cell) in &rows {
            let (c, d) = (coords[0], coords[1]);
            if d <= c {
                assert_eq!(cell.value, 0.0, "C={c} d={d}");
            } else {
                assert!(cell.value > 0.0);
            }
            assert_eq!(cell.method, OutageMethod::RapExact);
            assert!(cell.value.is_finite() && (0.0..=1.0).contains(&cell.value));
        }

        // Spot-check one cell against the point evaluation.
        let point = outage_rap(&SystemConfig::new(100, 10, 20, 40).unwrap()).unwrap();
        assert_eq!(rows[2].1.value, point.p_out);
    }

    #[test]
    fn max_users_sweep_monotone_in_cache() {
        let spec = SweepSpec {
            scheme: CacheScheme::Mop,
            base: SystemConfig::new(100, 0, 30, 1).unwrap(),
            alpha: Some(0.8),
            target_p_out: None,
            d_max: None,
            axes: vec![
                (SweepAxis::Target, vec![0.001, 0.01]),
                (SweepAxis::M, vec![0.0, 10.0, 30.0, 50.0]),
            ],
            kind: CellKind::MaxUsers,
        };
        let table = sweep(&spec).unwrap();
        assert_eq!(table.len(), 8);
        for row in table.cells.chunks(4) {
            for pair in row.windows(2) {
                assert!(pair[0].value <= pair[1].value);
            }
        }
        // Looser target (second block) supports at least as many users.
        for (tight, loose) in table.cells[..4].iter().zip(&table.cells[4..]) {
            assert!(tight.value <= loose.value);
        }
    }

    #[test]
    fn sweep_validation() {
        let mut no_axes = outage_sweep_spec();
        no_axes.axes.clear();
        assert!(sweep(&no_axes).is_err());

        let mut fractional = outage_sweep_spec();
        fractional.axes[0].1 = vec![20.5];
        assert!(sweep(&fractional).is_err());

        let mut duplicate = outage_sweep_spec();
        duplicate.axes[1].0 = SweepAxis::C;
        assert!(sweep(&duplicate).is_err());

        let mut rap_alpha_axis = outage_sweep_spec();
        rap_alpha_axis.axes[0] = (SweepAxis::Alpha, vec![1.0]);
        assert!(matches!(sweep(&rap_alpha_axis), Err(Error::Configuration(_))));

        let mut stray_target = outage_sweep_spec();
        stray_target.target_p_out = Some(0.02);
        assert!(sweep(&stray_target).is_err());

        let max_users_with_d = SweepSpec {
            kind: CellKind::MaxUsers,
            target_p_out: Some(0.02),
            ..outage_sweep_spec()
        };
        assert!(sweep(&max_users_with_d).is_err());

        let mop_without_alpha = SweepSpec {
            scheme: CacheScheme::Mop,
            ..outage_sweep_spec()
        };
        assert!(matches!(
            sweep(&mop_without_alpha),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn axis_parsing_round_trips() {
        for axis in [
            SweepAxis::D,
            SweepAxis::C,
            SweepAxis::M,
            SweepAxis::Alpha,
            SweepAxis::Target,
        ] {
            assert_eq!(axis.to_string().parse::<SweepAxis>().unwrap(), axis);
        }
        assert!("users".parse::<SweepAxis>().is_err());
    }
}
