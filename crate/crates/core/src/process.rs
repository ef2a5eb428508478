//! Process specification: variance profile, stationary local correlation and
//! the assumption audit.
//!
//! Every process handled by the library has the separable covariance
//! `r(s, t) = σ(s) σ(t) ρ(t − s)` on a domain `[lower, upper]` containing 0,
//! with `σ²(0) = 1` the unique maximum of the variance.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky_with_jitter;
use crate::regvar;

/// One half-line of the domain, relative to the variance maximum at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Coefficient and exponent of `C |t|^β` on one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSide {
    pub c: f64,
    pub beta: f64,
}

/// Shape of `1 − σ²(t)` near (and away from) the maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum VarianceProfile {
    /// `σ² ≡ 1`: a stationary process. Not admissible for the
    /// unique-maximum pipelines, but sampled and validated like any other.
    Unit,
    /// `1 − σ²(t) = C± |t|^β±`.
    Power { plus: PowerSide, minus: PowerSide },
    /// `1 − σ²(t) = c |t|^α log(1/|t|)`.
    PowerLog {
        #[serde(default = "one")]
        c: f64,
        alpha: f64,
    },
    /// `1 − σ²(t) = exp(−|t|^−β)`.
    ExpGentle { beta: f64 },
    /// Samples `(t, σ²(t))`, linearly interpolated.
    Tabulated { points: Vec<[f64; 2]> },
}

fn one() -> f64 {
    1.0
}

/// Stationary correlation `ρ(t)` of the locally stationary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum CorrelationProfile {
    /// `ρ(t) = exp(−C |t|^α)`.
    PowerExp { c: f64, alpha: f64 },
    /// `ρ(t) = max(0, 1 − C |t|^α)`; positive definite for `α ≤ 1`.
    FbmType { c: f64, alpha: f64 },
    /// `ρ(t) = exp(−C |t|^α log^k(1/|t|))` for `|t| < 1`, so that
    /// `1 − ρ(t) ~ C |t|^α ℓ(t)` with `ℓ(t) = log^k(1/t)`.
    PowerLogCorrected { c: f64, alpha: f64, log_power: f64 },
    /// Samples `(lag, ρ(lag))` for `lag ≥ 0`, linearly interpolated, with a
    /// declared regular-variation index.
    Tabulated { points: Vec<[f64; 2]>, alpha: f64 },
}

/// Leading behaviour of a function vanishing at zero, used for closed-form
/// comparisons of `1 − σ²` against `1 − ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeadingTerm {
    /// `coef · t^index · log^log_power(1/t)`.
    Power {
        coef: f64,
        index: f64,
        log_power: f64,
    },
    /// Faster than any power (e.g. `exp(−t^−β)`).
    ExpSmall,
}

/// `[lower, upper]` with `lower ≤ 0 ≤ upper`. Serialized either as a pair or
/// as a single half-width `S` meaning `[−S, S]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "DomainRepr", into = "[f64; 2]")]
pub struct Domain {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DomainRepr {
    Bounds([f64; 2]),
    Half(f64),
}

impl From<DomainRepr> for Domain {
    fn from(r: DomainRepr) -> Self {
        match r {
            DomainRepr::Bounds([lower, upper]) => Domain { lower, upper },
            DomainRepr::Half(s) => Domain::symmetric(s),
        }
    }
}

impl From<Domain> for [f64; 2] {
    fn from(d: Domain) -> Self {
        [d.lower, d.upper]
    }
}

impl Domain {
    pub fn symmetric(s: f64) -> Self {
        Domain {
            lower: -s,
            upper: s,
        }
    }

    pub fn new(lower: f64, upper: f64) -> Self {
        Domain { lower, upper }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Length of the half-line piece on `side`.
    pub fn side_length(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.upper,
            Side::Minus => -self.lower,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * self.length().max(1.0);
        t >= self.lower - slack && t <= self.upper + slack
    }
}

/// A full process specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub name: String,
    pub variance: VarianceProfile,
    pub correlation: CorrelationProfile,
    pub domain: Domain,
}

/// Linear interpolation in a table sorted by abscissa; `None` outside.
pub(crate) fn interp(points: &[[f64; 2]], x: f64) -> Option<f64> {
    let first = points.first()?;
    let last = points.last()?;
    let slack = 1e-12 * (last[0] - first[0]).abs().max(1.0);
    if x < first[0] - slack || x > last[0] + slack {
        return None;
    }
    let x = x.clamp(first[0], last[0]);
    let idx = points.partition_point(|p| p[0] < x);
    if idx == 0 {
        return Some(first[1]);
    }
    if idx >= points.len() {
        return Some(last[1]);
    }
    let [x0, y0] = points[idx - 1];
    let [x1, y1] = points[idx];
    if x == x1 {
        return Some(y1);
    }
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

fn check_table(points: &[[f64; 2]], what: &str) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::Spec(format!(
            "{what} table needs at least two points"
        )));
    }
    for w in points.windows(2) {
        if !(w[1][0] > w[0][0]) {
            return Err(Error::Spec(format!(
                "{what} table abscissae must be strictly increasing"
            )));
        }
    }
    if points
        .iter()
        .any(|p| !p[0].is_finite() || !p[1].is_finite())
    {
        return Err(Error::Spec(format!("{what} table has non-finite entries")));
    }
    Ok(())
}

impl VarianceProfile {
    /// Symmetric power profile `1 − σ² = C |t|^β`.
    pub fn power(c: f64, beta: f64) -> Self {
        VarianceProfile::Power {
            plus: PowerSide { c, beta },
            minus: PowerSide { c, beta },
        }
    }

    pub fn power_sided(c_minus: f64, beta_minus: f64, c_plus: f64, beta_plus: f64) -> Self {
        VarianceProfile::Power {
            plus: PowerSide {
                c: c_plus,
                beta: beta_plus,
            },
            minus: PowerSide {
                c: c_minus,
                beta: beta_minus,
            },
        }
    }

    /// `1 − σ²(t)`, evaluated without cancellation for the closed forms.
    /// The caller is responsible for `t` lying in the domain.
    pub fn one_minus(&self, t: f64) -> f64 {
        let a = t.abs();
        if a == 0.0 {
            return match self {
                VarianceProfile::Tabulated { points } => 1.0 - interp(points, 0.0).unwrap_or(1.0),
                _ => 0.0,
            };
        }
        match self {
            VarianceProfile::Unit => 0.0,
            VarianceProfile::Power { plus, minus } => {
                let p = if t > 0.0 { plus } else { minus };
                p.c * a.powf(p.beta)
            }
            VarianceProfile::PowerLog { c, alpha } => c * a.powf(*alpha) * (1.0 / a).ln(),
            VarianceProfile::ExpGentle { beta } => (-a.powf(-beta)).exp(),
            VarianceProfile::Tabulated { points } => match interp(points, t) {
                Some(v) => 1.0 - v,
                None => f64::NAN,
            },
        }
    }

    /// `ln(1 − σ²(t))`; finite wherever the deficit is positive, including
    /// where it underflows in linear scale.
    pub fn ln_one_minus(&self, t: f64) -> f64 {
        match self {
            VarianceProfile::ExpGentle { beta } if t != 0.0 => -t.abs().powf(-beta),
            _ => self.one_minus(t).ln(),
        }
    }

    /// Whether `t ↦ 1 − σ²(t)` is nondecreasing in `|t|` on `[0, len]` of `side`.
    pub fn is_monotone_on(&self, side: Side, len: f64) -> bool {
        match self {
            VarianceProfile::Unit => false,
            VarianceProfile::Power { .. } | VarianceProfile::ExpGentle { .. } => true,
            VarianceProfile::PowerLog { alpha, .. } => len <= (-1.0 / alpha).exp(),
            VarianceProfile::Tabulated { points } => {
                let s = side.sign();
                let mut vals: Vec<(f64, f64)> = points
                    .iter()
                    .filter(|p| p[0] * s >= 0.0 && p[0].abs() <= len)
                    .map(|p| (p[0].abs(), 1.0 - p[1]))
                    .collect();
                vals.sort_by(|a, b| a.0.total_cmp(&b.0));
                vals.windows(2).all(|w| w[1].1 > w[0].1)
            }
        }
    }

    /// Closed-form leading term on one side, if the form has one.
    pub fn leading_term(&self, side: Side) -> Option<LeadingTerm> {
        match self {
            VarianceProfile::Unit => Some(LeadingTerm::Power {
                coef: 0.0,
                index: 0.0,
                log_power: 0.0,
            }),
            VarianceProfile::Power { plus, minus } => {
                let p = if side == Side::Plus { plus } else { minus };
                Some(LeadingTerm::Power {
                    coef: p.c,
                    index: p.beta,
                    log_power: 0.0,
                })
            }
            VarianceProfile::PowerLog { c, alpha } => Some(LeadingTerm::Power {
                coef: *c,
                index: *alpha,
                log_power: 1.0,
            }),
            VarianceProfile::ExpGentle { .. } => Some(LeadingTerm::ExpSmall),
            VarianceProfile::Tabulated { .. } => None,
        }
    }

    fn validate(&self, domain: &Domain) -> Result<()> {
        let sides = [Side::Minus, Side::Plus];
        match self {
            VarianceProfile::Unit => {}
            VarianceProfile::Power { plus, minus } => {
                for (side, p) in [(Side::Plus, plus), (Side::Minus, minus)] {
                    if !(p.c > 0.0 && p.beta > 0.0) {
                        return Err(Error::Spec(format!(
                            "power variance needs c > 0 and beta > 0 on the {side:?} side"
                        )));
                    }
                    let len = domain.side_length(side);
                    if p.c * len.powf(p.beta) > 1.0 + 1e-12 {
                        return Err(Error::Spec(format!(
                            "power variance drives sigma^2 negative on the {side:?} side"
                        )));
                    }
                }
            }
            VarianceProfile::PowerLog { c, alpha } => {
                if !(*c > 0.0 && *alpha > 0.0) {
                    return Err(Error::Spec(
                        "power-log variance needs c > 0, alpha > 0".into(),
                    ));
                }
                for side in sides {
                    let len = domain.side_length(side);
                    if len >= 1.0 {
                        return Err(Error::Spec(
                            "power-log variance requires the domain inside (-1, 1)".into(),
                        ));
                    }
                    // max of c t^a log(1/t) over (0, len]
                    let t_star = (-1.0 / alpha).exp().min(len);
                    if t_star > 0.0 && self.one_minus(t_star) > 1.0 + 1e-12 {
                        return Err(Error::Spec(
                            "power-log variance drives sigma^2 negative".into(),
                        ));
                    }
                }
            }
            VarianceProfile::ExpGentle { beta } => {
                if !(*beta > 0.0) {
                    return Err(Error::Spec("exp-gentle variance needs beta > 0".into()));
                }
            }
            VarianceProfile::Tabulated { points } => {
                check_table(points, "variance")?;
                let first = points[0][0];
                let last = points[points.len() - 1][0];
                if first > domain.lower + 1e-12 || last < domain.upper - 1e-12 {
                    return Err(Error::Spec(
                        "variance table does not cover the domain".into(),
                    ));
                }
                let zero = points
                    .iter()
                    .find(|p| p[0] == 0.0)
                    .ok_or_else(|| Error::Spec("variance table must contain t = 0".into()))?;
                if zero[1] != 1.0 {
                    return Err(Error::Spec(
                        "variance table must have sigma^2(0) = 1".into(),
                    ));
                }
                for p in points {
                    if p[0] != 0.0 && !(p[1] >= 0.0 && p[1] < 1.0) {
                        return Err(Error::Spec(format!(
                            "variance table value {} at t = {} outside [0, 1)",
                            p[1], p[0]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl CorrelationProfile {
    /// Regular-variation index of `1 − ρ` at zero.
    pub fn alpha(&self) -> f64 {
        match self {
            CorrelationProfile::PowerExp { alpha, .. }
            | CorrelationProfile::FbmType { alpha, .. }
            | CorrelationProfile::PowerLogCorrected { alpha, .. }
            | CorrelationProfile::Tabulated { alpha, .. } => *alpha,
        }
    }

    /// `1 − ρ(lag)` without cancellation for the closed forms.
    pub fn one_minus(&self, lag: f64) -> f64 {
        let a = lag.abs();
        if a == 0.0 {
            return match self {
                CorrelationProfile::Tabulated { points, .. } => {
                    1.0 - interp(points, 0.0).unwrap_or(1.0)
                }
                _ => 0.0,
            };
        }
        match self {
            CorrelationProfile::PowerExp { c, alpha } => -(-c * a.powf(*alpha)).exp_m1(),
            CorrelationProfile::FbmType { c, alpha } => (c * a.powf(*alpha)).min(1.0),
            CorrelationProfile::PowerLogCorrected {
                c,
                alpha,
                log_power,
            } => {
                let l = (1.0 / a).ln();
                if l <= 0.0 {
                    return f64::NAN;
                }
                -(-c * a.powf(*alpha) * l.powf(*log_power)).exp_m1()
            }
            CorrelationProfile::Tabulated { points, .. } => match interp(points, a) {
                Some(v) => 1.0 - v,
                None => f64::NAN,
            },
        }
    }

    pub fn rho(&self, lag: f64) -> f64 {
        let a = lag.abs();
        match self {
            CorrelationProfile::PowerExp { c, alpha } => (-c * a.powf(*alpha)).exp(),
            CorrelationProfile::Tabulated { points, .. } => interp(points, a).unwrap_or(f64::NAN),
            _ => 1.0 - self.one_minus(lag),
        }
    }

    /// Largest lag at which the profile is defined.
    pub fn max_lag(&self) -> f64 {
        match self {
            CorrelationProfile::PowerExp { .. } | CorrelationProfile::FbmType { .. } => {
                f64::INFINITY
            }
            CorrelationProfile::PowerLogCorrected { .. } => 1.0,
            CorrelationProfile::Tabulated { points, .. } => points[points.len() - 1][0],
        }
    }

    pub fn leading_term(&self) -> Option<LeadingTerm> {
        match self {
            CorrelationProfile::PowerExp { c, alpha }
            | CorrelationProfile::FbmType { c, alpha } => Some(LeadingTerm::Power {
                coef: *c,
                index: *alpha,
                log_power: 0.0,
            }),
            CorrelationProfile::PowerLogCorrected {
                c,
                alpha,
                log_power,
            } => Some(LeadingTerm::Power {
                coef: *c,
                index: *alpha,
                log_power: *log_power,
            }),
            CorrelationProfile::Tabulated { .. } => None,
        }
    }

    fn validate(&self, domain: &Domain) -> Result<()> {
        let alpha = self.alpha();
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Spec(format!(
                "correlation index alpha = {alpha} outside (0, 2]"
            )));
        }
        match self {
            CorrelationProfile::PowerExp { c, .. } | CorrelationProfile::FbmType { c, .. } => {
                if !(*c > 0.0) {
                    return Err(Error::Spec(
                        "correlation coefficient c must be positive".into(),
                    ));
                }
            }
            CorrelationProfile::PowerLogCorrected { c, .. } => {
                if !(*c > 0.0) {
                    return Err(Error::Spec(
                        "correlation coefficient c must be positive".into(),
                    ));
                }
                if domain.length() >= 1.0 {
                    return Err(Error::Spec(
                        "power-log-corrected correlation needs all lags below 1".into(),
                    ));
                }
            }
            CorrelationProfile::Tabulated { points, .. } => {
                check_table(points, "correlation")?;
                if points[0] != [0.0, 1.0] {
                    return Err(Error::Spec("correlation table must start at (0, 1)".into()));
                }
                if points.iter().any(|p| p[1].abs() > 1.0) {
                    return Err(Error::Spec(
                        "correlation table values must lie in [-1, 1]".into(),
                    ));
                }
                if self.max_lag() < domain.length() - 1e-12 {
                    return Err(Error::Spec(
                        "correlation table does not cover all lags".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

impl ProcessSpec {
    /// Builds and validates a specification.
    pub fn new(
        name: impl Into<String>,
        variance: VarianceProfile,
        correlation: CorrelationProfile,
        domain: Domain,
    ) -> Result<Self> {
        let spec = ProcessSpec {
            name: name.into(),
            variance,
            correlation,
            domain,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses a JSON document and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ProcessSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        if !(d.lower.is_finite()
            && d.upper.is_finite()
            && d.lower <= 0.0
            && d.upper >= 0.0
            && d.lower < d.upper)
        {
            return Err(Error::Spec(format!(
                "domain [{}, {}] must be finite, nonempty and contain 0",
                d.lower, d.upper
            )));
        }
        self.variance.validate(d)?;
        self.correlation.validate(d)?;
        Ok(())
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self.variance, VarianceProfile::Unit)
    }

    pub fn alpha(&self) -> f64 {
        self.correlation.alpha()
    }

    /// Sides of the domain with positive length.
    pub fn sides(&self) -> Vec<Side> {
        let mut v = Vec::with_capacity(2);
        if self.domain.lower < 0.0 {
            v.push(Side::Minus);
        }
        if self.domain.upper > 0.0 {
            v.push(Side::Plus);
        }
        v
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !self.domain.contains(t) {
            return Err(Error::domain(
                "t",
                t,
                format!("outside [{}, {}]", self.domain.lower, self.domain.upper),
            ));
        }
        Ok(())
    }

    /// `σ²(t)`.
    pub fn eval_variance(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(1.0 - self.variance.one_minus(t))
    }

    /// `1 − σ²(t)`.
    pub fn one_minus_variance(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.variance.one_minus(t))
    }

    /// `f(t) = (1 − σ²(t)) / 2`, the exponent rate of the variance deficit.
    pub fn f(&self, t: f64) -> Result<f64> {
        Ok(0.5 * self.one_minus_variance(t)?)
    }

    /// `ρ(lag)`.
    pub fn eval_correlation(&self, lag: f64) -> Result<f64> {
        let len = self.domain.length();
        if !(lag.abs() <= 2.0 * len + 1e-12) {
            return Err(Error::domain("lag", lag, "exceeds twice the domain size"));
        }
        let v = self.correlation.rho(lag);
        if v.is_nan() {
            return Err(Error::domain("lag", lag, "outside the correlation profile"));
        }
        Ok(v)
    }

    /// `r(s, t) = σ(s) σ(t) ρ(t − s)`.
    pub fn covariance(&self, s: f64, t: f64) -> f64 {
        let vs = (1.0 - self.variance.one_minus(s)).max(0.0);
        let vt = (1.0 - self.variance.one_minus(t)).max(0.0);
        (vs * vt).sqrt() * self.correlation.rho(t - s)
    }
}

/// Outcome of one audited assumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub name: String,
    pub passed: bool,
    /// Headline measured quantity (meaning depends on the check).
    pub measured: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub spec_name: String,
    pub grid_size: usize,
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Level schedule for the local-stationarity scaling check.
const A4_LEVELS: [f64; 5] = [1e1, 1e2, 1e3, 1e4, 1e6];
const A4_TIMES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Grid on `[lower, upper]` with `grid_size` intervals, with 0 inserted if
/// the uniform grid misses it.
pub(crate) fn audit_grid(domain: &Domain, grid_size: usize) -> Vec<f64> {
    let h = domain.length() / grid_size as f64;
    let mut ts: Vec<f64> = (0..=grid_size)
        .map(|k| domain.lower + h * k as f64)
        .collect();
    if let Some(p) = ts.iter_mut().find(|t| t.abs() < 1e-12 * domain.length()) {
        *p = 0.0;
    } else {
        let idx = ts.partition_point(|&t| t < 0.0);
        ts.insert(idx, 0.0);
    }
    ts
}

/// Numerically audits the standing assumptions on a grid with `grid_size`
/// intervals.
///
/// Checks, in order: unique variance maximum at 0, `ρ < 1` away from lag 0,
/// the scaling limit `u²(1 − ρ(q(u) t)) → t^α`, and positive
/// semidefiniteness of the grid covariance (with jitter). A covariance that
/// cannot be factorized is an error rather than a failed check.
pub fn audit_assumptions(spec: &ProcessSpec, grid_size: usize) -> Result<AuditReport> {
    if grid_size < 16 {
        return Err(Error::domain(
            "grid_size",
            grid_size as f64,
            "must be at least 16",
        ));
    }
    spec.validate()?;
    let ts = audit_grid(&spec.domain, grid_size);
    let mut checks = Vec::new();

    // Unique maximum of the variance at 0.
    {
        let mut worst = f64::INFINITY;
        let mut at = 0.0;
        for &t in &ts {
            if t != 0.0 {
                let g = spec.variance.ln_one_minus(t);
                if !(g >= worst) {
                    worst = g;
                    at = t;
                }
            }
        }
        let at_zero = spec.variance.one_minus(0.0);
        let passed = at_zero == 0.0 && worst > f64::NEG_INFINITY;
        checks.push(AuditCheck {
            name: "variance-unique-max".into(),
            passed,
            measured: worst,
            detail: format!(
                "sigma^2(0) = {}, min of ln(1 - sigma^2) off zero = {worst:e} at t = {at}",
                1.0 - at_zero
            ),
        });
    }

    // rho < 1 away from zero, over all lags the grid produces.
    {
        let h = spec.domain.length() / grid_size as f64;
        let mut worst = f64::INFINITY;
        let mut at = 0.0;
        for k in 1..=grid_size {
            let lag = h * k as f64;
            let g = spec.correlation.one_minus(lag);
            if g < worst {
                worst = g;
                at = lag;
            }
        }
        checks.push(AuditCheck {
            name: "correlation-below-one".into(),
            passed: worst > 0.0,
            measured: worst,
            detail: format!("min of 1 - rho over nonzero lags = {worst:e} at lag {at}"),
        });
    }

    // Scaling limit u^2 (1 - rho(q(u) t)) -> t^alpha.
    {
        let alpha = spec.alpha();
        let max_lag = spec.correlation.max_lag().min(spec.domain.length());
        let mut errs = Vec::new();
        for &u in &A4_LEVELS {
            let q = match regvar::q_of_u(&spec.correlation, u) {
                Ok(q) => q,
                Err(_) => continue,
            };
            let mut e: f64 = 0.0;
            let mut any = false;
            for &t in &A4_TIMES {
                if q * t > max_lag {
                    continue;
                }
                any = true;
                let r = u * u * spec.correlation.one_minus(q * t) / t.powf(alpha);
                e = e.max((r - 1.0).abs());
            }
            if any {
                errs.push((u, e));
            }
        }
        let last = errs.last().map(|p| p.1).unwrap_or(f64::INFINITY);
        let settling = errs.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
        checks.push(AuditCheck {
            name: "local-scaling-limit".into(),
            passed: last < 0.1 && settling,
            measured: last,
            detail: format!("max |u^2(1-rho(q t))/t^alpha - 1| per level: {errs:?}"),
        });
    }

    // Positive semidefiniteness of the grid covariance.
    {
        let n = ts.len();
        let cov = DMatrix::from_fn(n, n, |i, j| spec.covariance(ts[i], ts[j]));
        let factor = cholesky_with_jitter(&cov)?;
        checks.push(AuditCheck {
            name: "covariance-psd".into(),
            passed: true,
            measured: factor.jitter,
            detail: format!(
                "factorized {n}x{n} grid covariance with jitter {:e}",
                factor.jitter
            ),
        });
    }

    Ok(AuditReport {
        spec_name: spec.name.clone(),
        grid_size,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou_power(beta: f64) -> ProcessSpec {
        ProcessSpec::new(
            "t",
            VarianceProfile::power(1.0, beta),
            CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
            Domain::symmetric(1.0),
        )
        .unwrap()
    }

    #[test]
    fn variance_examples() {
        let s = ou_power(2.0);
        assert_eq!(s.eval_variance(0.0).unwrap(), 1.0);

        let s = ProcessSpec::new(
            "e1",
            VarianceProfile::ExpGentle { beta: 1.0 },
            CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
            Domain::symmetric(1.0),
        )
        .unwrap();
        assert!((s.eval_variance(0.5).unwrap() - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!((s.eval_variance(0.5).unwrap() - 0.8647).abs() < 1e-4);

        let s = ProcessSpec::new(
            "e2",
            VarianceProfile::PowerLog { c: 1.0, alpha: 1.0 },
            CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
            Domain::symmetric(0.5),
        )
        .unwrap();
        let v = s.eval_variance(0.1).unwrap();
        assert!((v - (1.0 - 0.1 * 10f64.ln())).abs() < 1e-15);
        assert!((v - 0.7697).abs() < 1e-4);
    }

    #[test]
    fn variance_out_of_domain_is_error() {
        let s = ou_power(2.0);
        assert!(matches!(s.eval_variance(1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn correlation_examples() {
        let s = ou_power(2.0);
        assert_eq!(s.eval_correlation(0.0).unwrap(), 1.0);
        assert!((s.eval_correlation(1.0).unwrap() - (-1f64).exp()).abs() < 1e-16);

        let g = CorrelationProfile::PowerExp { c: 1.0, alpha: 2.0 };
        // exp(-1e-4) to full precision
        let expected = 1.0 - 1e-4 + 5e-9 - 1e-12 / 6.0;
        assert!((g.rho(0.01) - expected).abs() < 1e-16);
        assert!((g.one_minus(0.01) - (1e-4 - 5e-9 + 1e-12 / 6.0 - 1e-16 / 24.0)).abs() < 1e-19);
    }

    #[test]
    fn power_exp_local_ratio() {
        let g = CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 };
        for t in [1e-4, 1e-5, 1e-7] {
            assert!((g.one_minus(t) / t - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn sided_power_variance() {
        let v = VarianceProfile::power_sided(2.0, 0.5, 1.0, 1.0);
        assert_eq!(v.one_minus(0.25), 0.25);
        assert_eq!(v.one_minus(-0.25), 1.0);
    }

    #[test]
    fn tabulated_interpolation_and_range() {
        let spec = ProcessSpec::new(
            "tab",
            VarianceProfile::Tabulated {
                points: vec![[-1.0, 0.5], [0.0, 1.0], [1.0, 0.0]],
            },
            CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
            Domain::symmetric(1.0),
        )
        .unwrap();
        assert!((spec.eval_variance(-0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!((spec.eval_variance(0.25).unwrap() - 0.75).abs() < 1e-15);
        assert!(spec.eval_variance(1.2).is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ProcessSpec::new(
            "neg",
            VarianceProfile::power(2.0, 1.0),
            CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
            Domain::symmetric(1.0),
        )
        .is_err());
        assert!(ProcessSpec::new(
            "alpha",
            VarianceProfile::power(1.0, 1.0),
            CorrelationProfile::PowerExp { c: 1.0, alpha: 2.5 },
            Domain::symmetric(1.0),
        )
        .is_err());
        assert!(ProcessSpec::new(
            "dom",
            VarianceProfile::power(1.0, 1.0),
            CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
            Domain::new(0.2, 1.0),
        )
        .is_err());
    }

    #[test]
    fn json_domain_forms() {
        let text = r#"{"name":"x","variance":{"form":"power","plus":{"c":1,"beta":2},"minus":{"c":1,"beta":2}},
            "correlation":{"form":"power-exp","c":1,"alpha":1},"domain":0.5}"#;
        let s = ProcessSpec::from_json(text).unwrap();
        assert_eq!(s.domain, Domain::symmetric(0.5));
        let back = serde_json::to_string(&s).unwrap();
        assert_eq!(ProcessSpec::from_json(&back).unwrap(), s);
    }

    #[test]
    fn every_builtin_form_peaks_at_zero() {
        let forms = [
            VarianceProfile::power(1.0, 2.0),
            VarianceProfile::power_sided(1.0, 0.5, 0.5, 3.0),
            VarianceProfile::PowerLog { c: 1.0, alpha: 1.5 },
            VarianceProfile::ExpGentle { beta: 1.0 },
        ];
        for v in forms {
            let spec = ProcessSpec::new(
                "f",
                v,
                CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
                Domain::symmetric(0.5),
            )
            .unwrap();
            assert_eq!(spec.eval_variance(0.0).unwrap(), 1.0);
            for k in 1..=64 {
                let t = 0.5 * k as f64 / 64.0;
                // The deficit itself, since 1 - tiny rounds to 1 in sigma^2.
                assert!(spec.one_minus_variance(t).unwrap() > 0.0);
                assert!(spec.one_minus_variance(-t).unwrap() > 0.0);
                assert!(spec.eval_variance(t).unwrap() <= 1.0);
            }
        }
    }

    #[test]
    fn audit_passes_on_regular_fixture() {
        let report = audit_assumptions(&ou_power(2.0), 64).unwrap();
        assert!(report.all_passed(), "{report:#?}");
        let again = audit_assumptions(&ou_power(2.0), 64).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn audit_flags_correlation_reaching_one() {
        // Triangle wave of period 1: positive semidefinite, but rho(1) = 1.
        let spec = ProcessSpec::new(
            "tri",
            VarianceProfile::power(1.0, 2.0),
            CorrelationProfile::Tabulated {
                points: vec![[0.0, 1.0], [0.5, 0.0], [1.0, 1.0]],
                alpha: 1.0,
            },
            Domain::symmetric(0.5),
        )
        .unwrap();
        let report = audit_assumptions(&spec, 32).unwrap();
        assert!(!report.check("correlation-below-one").unwrap().passed);
        assert!(report.check("variance-unique-max").unwrap().passed);
    }

    #[test]
    fn audit_rejects_indefinite_covariance() {
        let spec = ProcessSpec::new(
            "bad",
            VarianceProfile::power(1.0, 2.0),
            CorrelationProfile::Tabulated {
                points: vec![[0.0, 1.0], [0.1, -0.9], [1.0, 0.9]],
                alpha: 1.0,
            },
            Domain::symmetric(0.5),
        )
        .unwrap();
        assert!(matches!(
            audit_assumptions(&spec, 32),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
