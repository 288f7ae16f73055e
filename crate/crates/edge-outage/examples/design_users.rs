//! Inverting the outage curve: how many concurrent users can a relay accept
//! while keeping p_out below a target? And how does that headroom grow with
//! the cache size?

use edge_outage::design::{sweep, CellKind, SweepAxis, SweepSpec};
use edge_outage::{max_supported_users, CacheScheme, DesignQuery, SystemConfig};

fn main() -> edge_outage::Result<()> {
    let query = DesignQuery {
        scheme: CacheScheme::Mop,
        library_size: 100,
        cache_size: 10,
        backhaul_capacity: 15,
        alpha: Some(1.0),
        target_p_out: 0.02,
        d_max: None,
    };
    let d_star = max_supported_users(&query)?;
    println!("mop, C=15, target 0.02  ->  d* = {d_star}");

    let wider = DesignQuery {
        backhaul_capacity: 30,
        ..query
    };
    println!("mop, C=30, target 0.02  ->  d* = {}", max_supported_users(&wider)?);

    // d* as a function of the cache size, for two reliability targets.
    let spec = SweepSpec {
        scheme: CacheScheme::Mop,
        base: SystemConfig::new(100, 0, 30, 1)?,
        alpha: Some(0.8),
        target_p_out: None,
        d_max: None,
        axes: vec![
            (SweepAxis::Target, vec![1e-2, 1e-3]),
            (SweepAxis::M, vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0]),
        ],
        kind: CellKind::MaxUsers,
    };
    let table = sweep(&spec)?;
    println!("\nd* vs cache size (C=30, alpha=0.8):");
    println!("{:>8}  {:>6}  {:>6}", "target", "M", "d*");
    for (coordinates, cell) in table.rows() {
        println!(
            "{:>8.0e}  {:>6.0}  {:>6.0}",
            coordinates[0], coordinates[1], cell.value
        );
    }
    Ok(())
}
