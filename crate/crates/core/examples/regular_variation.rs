//! Scaling function q(u), de Bruijn conjugates and the index probe for a
//! correlation with a logarithmic correction.

use gaussmax::process::CorrelationProfile;
use gaussmax::regvar::{debruijn_conjugate, q_of_u, rv_index_probe, RvFunction, SlowlyVarying};

fn main() -> gaussmax::Result<()> {
    let corr = CorrelationProfile::PowerLogCorrected {
        c: 1.0,
        alpha: 1.0,
        log_power: 2.0,
    };
    for u in [1e1, 1e2, 1e4, 1e8] {
        let q = q_of_u(&corr, u)?;
        println!("u = {u:>8.0e}: q(u) = {q:.6e}, u^2 q(u) = {:.4}", u * u * q);
    }

    let ell = RvFunction::slowly(SlowlyVarying::LogPower { c: 1.0, power: 2.0 });
    for x in [1e-2, 1e-4, 1e-8] {
        let d = debruijn_conjugate(&ell, x)?;
        println!(
            "x = {x:.0e}: l#(x) = {:.6e} via {:?} (1/l = {:.6e}, implicit {:.6e})",
            d.value, d.route, d.reciprocal, d.implicit
        );
    }

    let scales: Vec<f64> = (1..=8).map(|k| 10f64.powi(-2 * k)).collect();
    for (name, g) in [
        ("x^1.5", RvFunction::power(1.0, 1.5)),
        (
            "x log^2(1/x)",
            RvFunction::power_times(1.0, SlowlyVarying::LogPower { c: 1.0, power: 2.0 }),
        ),
    ] {
        let p = rv_index_probe(&g, &scales)?;
        println!("{name:<14} index {:.4} {:?}", p.index, p.verdict);
    }
    Ok(())
}
