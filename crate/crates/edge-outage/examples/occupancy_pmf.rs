//! The balls-into-bins backbone: how many distinct bins do k draws hit?
//! Uniform bins admit an exact recurrence (cross-checked against the exact
//! rational closed form); Zipf-weighted bins use a Gaussian approximation
//! whose mean/variance come from the weights.

use edge_outage::analytic::{gaussian_params, p_z_mop_approx};
use edge_outage::model::conditional_noncached_weights;
use edge_outage::numerics::{occupancy_uniform_pmf, occupancy_uniform_stirling_exact};
use edge_outage::SystemConfig;
use num_traits::ToPrimitive;

fn main() -> edge_outage::Result<()> {
    let (m, k) = (8_u32, 12_u32);
    println!("uniform bins: m = {m}, k = {k}");
    println!("{:>3}  {:>14}  {:>14}", "z", "recurrence", "exact rational");
    let recurrence = occupancy_uniform_pmf(m, k)?;
    let exact = occupancy_uniform_stirling_exact(m, k)?;
    for (z, rational) in exact.iter().enumerate() {
        let p = recurrence.prob(z as u32);
        if p > 0.0 {
            println!("{z:>3}  {p:>14.10}  {:>14.10}", rational.to_f64().unwrap());
        }
    }

    // 100 Zipf(1.5) draws over 100 un-cached files: most draws pile onto the
    // few popular files, so far fewer than 100 bins are touched.
    let library = SystemConfig::new(100, 0, 1, 1)?;
    for alpha in [0.5, 1.5] {
        let q = conditional_noncached_weights(&library, alpha)?;
        let params = gaussian_params(100, &q)?;
        println!(
            "\nzipf bins: alpha = {alpha}, k = 100  ->  mu = {:.2}, sigma^2 = {:.2}",
            params.mu_k, params.sigma_sq_k
        );
        let approx = p_z_mop_approx(100, &library, alpha)?;
        let peak = (1..=approx.support_max())
            .max_by(|&a, &b| approx.prob(a).total_cmp(&approx.prob(b)))
            .unwrap();
        println!(
            "gaussian pmf peaks at z = {peak} (p = {:.4}), total mass {:.4}",
            approx.prob(peak),
            approx.total_mass()
        );
    }
    Ok(())
}
