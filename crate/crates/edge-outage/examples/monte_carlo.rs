//! Seeded Monte-Carlo estimation against the closed form. The per-trial RNG
//! streams are derived from the trial index, so the same seed gives the same
//! report no matter how many worker threads run the trials.

use edge_outage::simulate::run_with_workers;
use edge_outage::{monte_carlo_outage, CacheScheme, outage_rap, SystemConfig};

fn main() -> edge_outage::Result<()> {
    let config = SystemConfig::new(100, 10, 40, 50)?;
    let exact = outage_rap(&config)?.p_out;
    println!("closed form: p_out = {exact:.6}");

    println!("{:>8}  {:>10}  {:>12}  {:>10}", "trials", "p_out_hat", "95% ci", "|gap|/se");
    for trials in [10_000_u64, 100_000, 1_000_000] {
        let report = monte_carlo_outage(&config, CacheScheme::Rap, None, trials, 42)?;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        println!(
            "{trials:>8}  {:>10.6}  ±{:>10.6}  {:>10.2}",
            report.p_out_hat,
            report.ci_half_width_95,
            (report.p_out_hat - exact).abs() / se
        );
    }

    // Identical output regardless of the thread count.
    let single = run_with_workers(Some(1), || {
        monte_carlo_outage(&config, CacheScheme::Rap, None, 50_000, 7)
    })??;
    let pooled = run_with_workers(Some(8), || {
        monte_carlo_outage(&config, CacheScheme::Rap, None, 50_000, 7)
    })??;
    assert_eq!(single.outage_count, pooled.outage_count);
    println!(
        "\nworkers 1 vs 8, seed 7: identical outage counts ({} of {})",
        single.outage_count, single.trials
    );
    Ok(())
}
