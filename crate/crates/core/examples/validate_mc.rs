//! Monte Carlo exceedance probabilities against the asymptotic formula for an
//! Ornstein-Uhlenbeck process on [0, 1], printed as CSV.

use gaussmax::asympt::Constants;
use gaussmax::mc::validate;
use gaussmax::process::{CorrelationProfile, Domain, ProcessSpec, VarianceProfile};

fn main() -> gaussmax::Result<()> {
    let spec = ProcessSpec::new(
        "ou",
        VarianceProfile::Unit,
        CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
        Domain::new(0.0, 1.0),
    )?;
    let table = validate(
        &spec,
        &[2.5, 3.0, 3.5],
        &Constants::default().with_known(1.0),
        4096,
        100_000,
        1,
    )?;
    print!("{}", table.to_csv());
    println!(
        "# formula {:?}, ratio trending to one: {}",
        table.formula_id, table.trending_to_one
    );
    for w in &table.warnings {
        println!("# warning: {w}");
    }
    Ok(())
}
