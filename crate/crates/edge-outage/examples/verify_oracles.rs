//! The trust chain behind the fast paths: exhaustive enumeration over all
//! request tuples, and an inclusion–exclusion occupancy law, both exact on
//! small instances. The closed forms must agree with them to within rounding.

use edge_outage::model::conditional_noncached_weights;
use edge_outage::numerics::occupancy_uniform_pmf;
use edge_outage::oracle::{brute_force_outage, exact_occupancy_weighted, OracleBudget};
use edge_outage::{outage_rap, CacheScheme, SystemConfig};

fn main() -> edge_outage::Result<()> {
    let budget = OracleBudget::default();

    let mut worst = (0.0_f64, String::new());
    for n in 1..=5_u32 {
        for m in 0..=n {
            for d in 1..=6_u32 {
                for c in 0..d {
                    let config = SystemConfig::new(n, m, c, d)?;
                    let enumerated =
                        brute_force_outage(&config, CacheScheme::Rap, None, &budget)?;
                    let closed = outage_rap(&config)?;
                    let gap = (enumerated.p_out - closed.p_out).abs();
                    if gap > worst.0 {
                        worst = (gap, format!("N={n} M={m} C={c} d={d}"));
                    }
                }
            }
        }
    }
    println!("closed form vs enumeration (N<=5, d<=6): worst gap {:.2e} at {}", worst.0, worst.1);

    // Weighted occupancy: inclusion–exclusion vs the uniform recurrence on
    // uniform weights, then on genuinely skewed weights vs a quick checksum.
    let uniform = vec![0.125_f64; 8];
    let oracle = exact_occupancy_weighted(&uniform, 12, &budget)?;
    let recurrence = occupancy_uniform_pmf(8, 12)?;
    let gap = (1..=8)
        .map(|z| (oracle.prob(z) - recurrence.prob(z)).abs())
        .fold(0.0_f64, f64::max);
    println!("weighted oracle vs uniform recurrence (m=8, k=12): worst gap {gap:.2e}");

    let config = SystemConfig::new(12, 4, 1, 1)?;
    let zipf = conditional_noncached_weights(&config, 1.2)?;
    let skewed = exact_occupancy_weighted(&zipf, 20, &budget)?;
    println!(
        "zipf-weighted occupancy (m=8, k=20): mass {:.12}, mean {:.4}",
        skewed.total_mass(),
        skewed.mean()
    );
    Ok(())
}
