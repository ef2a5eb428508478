//! Streams sample paths of a non-stationary process and checks the pointwise
//! empirical variance against sigma^2(t).

use gaussmax::mc::sample_paths;
use gaussmax::process::{CorrelationProfile, Domain, ProcessSpec, VarianceProfile};

fn main() -> gaussmax::Result<()> {
    let spec = ProcessSpec::new(
        "talagrand",
        VarianceProfile::power(1.0, 0.5),
        CorrelationProfile::PowerExp { c: 1.0, alpha: 2.0 },
        Domain::symmetric(1.0),
    )?;
    let stream = sample_paths(&spec, 64, 8, 1024, 5)?;
    let times = stream.times().to_vec();
    println!("sampler: {}", stream.sampler());
    let mut sum_sq = vec![0.0; times.len()];
    let mut n = 0usize;
    for batch in stream {
        for i in 0..batch.n_paths {
            for (s, x) in sum_sq.iter_mut().zip(batch.path(i)) {
                *s += x * x;
            }
        }
        n += batch.n_paths;
    }
    for k in (0..times.len()).step_by(8) {
        let t = times[k];
        println!(
            "t = {t:>7.4}: var {:.4} (sigma^2 {:.4})",
            sum_sq[k] / n as f64,
            spec.eval_variance(t)?
        );
    }
    Ok(())
}
