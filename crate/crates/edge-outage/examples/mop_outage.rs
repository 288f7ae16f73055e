//! Most-popular placement under Zipf demand: the cache pins the M most
//! popular files, so only the distribution tail reaches the backhaul. The
//! occupancy of the missed files is handled with a Gaussian approximation.

use edge_outage::{outage_mop_with, SystemConfig};

fn main() -> edge_outage::Result<()> {
    println!("operating points at alpha = 1, N = 100, M = 10:");
    for (capacity, users) in [(15, 27), (30, 68)] {
        let config = SystemConfig::new(100, 10, capacity, users)?;
        let raw = outage_mop_with(&config, 1.0, false)?;
        let renormalized = outage_mop_with(&config, 1.0, true)?;
        println!(
            "C={capacity:<3} d={users:<3} ->  p_out = {:.6}   (renormalized occupancy: {:.6}, \
             min sigma^2 {:.3e})",
            raw.p_out,
            renormalized.p_out,
            raw.diagnostics.min_sigma_sq.unwrap_or(f64::NAN),
        );
    }

    println!("\npopularity skew at C = 15, d = 27:");
    println!("{:>6}  {:>12}", "alpha", "p_out");
    for alpha in [0.2, 0.5, 0.8, 1.0, 1.2, 1.5] {
        let config = SystemConfig::new(100, 10, 15, 27)?;
        let result = outage_mop_with(&config, alpha, false)?;
        println!("{alpha:>6.1}  {:>12.3e}", result.p_out);
    }
    Ok(())
}
