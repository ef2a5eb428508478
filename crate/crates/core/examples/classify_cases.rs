//! Classifies a handful of variance profiles into the S/T/P cases and prints
//! the assumption audit and informative interval for each.

use gaussmax::classifier::{classify, informative_interval};
use gaussmax::process::{
    audit_assumptions, CorrelationProfile, Domain, ProcessSpec, VarianceProfile,
};

fn main() -> gaussmax::Result<()> {
    let corr = CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 };
    let specs = [
        ("steep both sides", VarianceProfile::power(1.0, 0.5)),
        ("flat both sides", VarianceProfile::power(1.0, 2.0)),
        ("transition both sides", VarianceProfile::power(1.0, 1.0)),
        ("mixed", VarianceProfile::power_sided(1.0, 0.5, 0.7, 1.0)),
        ("exp-gentle", VarianceProfile::ExpGentle { beta: 1.0 }),
    ];
    for (name, variance) in specs {
        let spec = ProcessSpec::new(name, variance, corr.clone(), Domain::symmetric(0.5))?;
        let label = classify(&spec)?;
        let audit = audit_assumptions(&spec, 512)?;
        let iv = informative_interval(&spec, 10.0, 4.0)?;
        println!(
            "{name:<22} case {:<4} b- {:<8} b+ {:<8} audit {:<5} B_u(10) = [{:.3e}, {:.3e}]",
            label.combined(),
            fmt_b(label.b_minus),
            fmt_b(label.b_plus),
            if audit.all_passed() { "ok" } else { "fail" },
            iv.t_minus,
            iv.t_plus,
        );
    }
    Ok(())
}

fn fmt_b(b: Option<f64>) -> String {
    b.map_or("-".into(), |b| format!("{b:.4}"))
}
