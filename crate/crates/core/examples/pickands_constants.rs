//! Estimates the Pickands constants H_1 and H_2 from simulated limit paths
//! and compares them with the known values 1 and 1/sqrt(pi).

use std::time::Instant;

use gaussmax::pickands::{estimate_h_alpha, PickandsOptions};

fn main() -> gaussmax::Result<()> {
    let opts = PickandsOptions::default();
    for (alpha, step, paths, known) in [
        (2.0, 0.01, 100_000, 1.0 / std::f64::consts::PI.sqrt()),
        (1.0, 0.002, 20_000, 1.0),
    ] {
        let start = Instant::now();
        let est = estimate_h_alpha(alpha, &[4.0, 8.0, 16.0], step, paths, 2024, &opts)?;
        println!(
            "alpha = {alpha}: H = {:.5} +- {:.5} (known {known:.5}), {:.1}s",
            est.value,
            est.std_error,
            start.elapsed().as_secs_f64()
        );
        for p in &est.per_horizon {
            println!(
                "  T = {:>4}: H(T) = {:.4} +- {:.4}",
                p.t, p.value, p.std_error
            );
        }
        if !est.flags.is_empty() {
            println!("  flags: {:?}", est.flags);
        }
    }
    Ok(())
}
