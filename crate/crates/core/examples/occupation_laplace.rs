//! Builds the occupation CDF of `f = (1 - sigma^2)/2` on one side and compares
//! its Laplace transform with the closed form for a power profile.

use gaussmax::process::{CorrelationProfile, Domain, ProcessSpec, Side, VarianceProfile};
use gaussmax::rearrangement::{default_x_cut, occupation_cdf, OccupationCdf};

fn main() -> gaussmax::Result<()> {
    let (c, beta) = (1.0, 2.0);
    let spec = ProcessSpec::new(
        "power",
        VarianceProfile::power(c, beta),
        CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
        Domain::symmetric(1.0),
    )?;
    // f(t) = (c/2) t^beta, so L(lambda) ~ Gamma(1 + 1/beta) (2 / (c lambda))^{1/beta}.
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>10}",
        "u", "grid L", "exact-cdf L", "leading term", "ratio"
    );
    for u in [5.0, 20.0, 100.0, 1000.0] {
        let lambda = u * u;
        let x_cut = default_x_cut(u, 4.0);
        let grid = occupation_cdf(&spec, Side::Plus, x_cut, 1 << 14)?.laplace(lambda)?;
        let exact = OccupationCdf::power(c / 2.0, beta, 1.0, x_cut).laplace(lambda)?;
        let lead = libm::tgamma(1.0 + 1.0 / beta) * (2.0 / (c * lambda)).powf(1.0 / beta);
        println!(
            "{u:>8} {:>14.6e} {:>14.6e} {lead:>14.6e} {:>10.6}",
            grid.value,
            exact.value,
            exact.value / lead
        );
    }
    Ok(())
}
