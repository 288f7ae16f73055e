//! Closed-form outage for random placement: a relay caching a uniformly
//! random 10-file subset of a 100-file library, serving 50 users over a
//! backhaul that fetches at most C distinct files per round.

use edge_outage::{outage_rap, SystemConfig};

fn main() -> edge_outage::Result<()> {
    let headline = SystemConfig::new(100, 10, 40, 50)?;
    let result = outage_rap(&headline)?;
    println!(
        "N=100 M=10 C=40 d=50  ->  p_out = {:.6}  (success mass {:.6})",
        result.p_out, result.diagnostics.success_mass
    );

    println!("\ncapacity sweep at d = 50:");
    println!("{:>4}  {:>12}", "C", "p_out");
    for capacity in (30..=55).step_by(5) {
        let config = SystemConfig::new(100, 10, capacity, 50)?;
        println!("{capacity:>4}  {:>12.3e}", outage_rap(&config)?.p_out);
    }
    Ok(())
}
