//! Evaluates the dispatched tail asymptotic for one process of each case over
//! a range of levels, using the exactly known constants for alpha = 1.

use gaussmax::asympt::{evaluate, Constants};
use gaussmax::pickands::{ConstantKind, DriftKind, PickandsEstimate};
use gaussmax::process::{CorrelationProfile, Domain, ProcessSpec, VarianceProfile};

fn main() -> gaussmax::Result<()> {
    let corr = CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 };
    let mut constants = Constants::default().with_known(1.0);
    // One-sided transition constant for alpha = 1 and drift b = 1 is 1 + 1/b.
    constants.p_alpha_plus = Some(PickandsEstimate {
        drift: Some(DriftKind::Transition {
            b_plus: 1.0,
            b_minus: f64::INFINITY,
        }),
        ..PickandsEstimate::exact(ConstantKind::PAlphaPlus, 1.0, 2.0)
    });
    let specs = [
        ProcessSpec::new(
            "stationary",
            VarianceProfile::Unit,
            corr.clone(),
            Domain::new(0.0, 1.0),
        )?,
        ProcessSpec::new(
            "flat",
            VarianceProfile::power(1.0, 2.0),
            corr.clone(),
            Domain::symmetric(1.0),
        )?,
        ProcessSpec::new(
            "steep",
            VarianceProfile::power(1.0, 0.5),
            corr.clone(),
            Domain::symmetric(1.0),
        )?,
        ProcessSpec::new(
            "one-sided P",
            VarianceProfile::power(1.0, 1.0),
            corr.clone(),
            Domain::new(0.0, 1.0),
        )?,
    ];
    for spec in &specs {
        println!("{}", spec.name);
        for u in [3.0, 5.0, 10.0, 40.0] {
            let r = evaluate(spec, u, &constants)?;
            println!(
                "  u = {u:>5}: {:<14} value {:.6e}  ln {:.6}",
                format!("{:?}", r.formula_id),
                r.value,
                r.ln_value
            );
        }
    }
    Ok(())
}
