//! Side-wise classification of the variance maximum against the local
//! correlation scale, and the informative interval around it.
//!
//! On each side the limit `h₁(t) = lim u² (1 − σ²(q(u) t))` is `0` (S, the
//! stationary-like case), `∞` (T, Talagrand-like) or finite and positive
//! (P, transition). In the P case `h₁(t) = b |t|^α`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{LeadingTerm, ProcessSpec, Side, VarianceProfile};
use crate::regvar::q_of_u;

/// Levels at which the numeric route evaluates `u² (1 − σ²(q(u) t))`.
pub const U_SCHEDULE: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

/// Classification of one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideCase {
    S,
    T,
    P,
}

impl fmt::Display for SideCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SideCase::S => "S",
            SideCase::T => "T",
            SideCase::P => "P",
        };
        f.write_str(s)
    }
}

/// Outcome of the `h₁` limit on one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Limit {
    /// `h₁(t_ref)`; `f64::INFINITY` for the T case.
    #[serde(with = "crate::serde_ext::extended")]
    pub value: f64,
    pub case: SideCase,
    /// True when leading terms were compared analytically.
    pub closed_form: bool,
    /// `(u, u² (1 − σ²(q(u) t_ref)))` along [`U_SCHEDULE`]; empty for the
    /// closed-form route.
    pub sequence: Vec<(f64, f64)>,
}

fn case_of(value: f64) -> SideCase {
    if value == 0.0 {
        SideCase::S
    } else if value.is_infinite() {
        SideCase::T
    } else {
        SideCase::P
    }
}

/// Closed-form `h₁(t)` from the leading terms, if both are known.
fn closed_form_h1(spec: &ProcessSpec, side: Side, t: f64) -> Option<f64> {
    let var = spec.variance.leading_term(side)?;
    let corr = spec.correlation.leading_term()?;
    let LeadingTerm::Power {
        coef: cr,
        index: alpha,
        log_power: kr,
    } = corr
    else {
        return None;
    };
    match var {
        LeadingTerm::ExpSmall => Some(0.0),
        LeadingTerm::Power {
            coef: cv,
            index: beta,
            log_power: kv,
        } => {
            // u² (1 − σ²(q t)) ≈ (cv/cr) t^β q^{β−α} log^{kv−kr}(1/q), q → 0.
            if cv == 0.0 {
                return Some(0.0);
            }
            let v = if beta > alpha || (beta == alpha && kv < kr) {
                0.0
            } else if beta < alpha || kv > kr {
                f64::INFINITY
            } else {
                cv / cr * t.abs().powf(beta)
            };
            Some(v)
        }
    }
}

/// Evaluates `h₁(t_ref) = lim u² (1 − σ²(q(u) t_ref))` on `side`.
pub fn h1_limit(spec: &ProcessSpec, side: Side, t_ref: f64) -> Result<H1Limit> {
    if t_ref == 0.0 || t_ref.signum() != side.sign() {
        return Err(Error::domain(
            "t_ref",
            t_ref,
            format!("must be nonzero on the {side:?} side"),
        ));
    }
    if let Some(value) = closed_form_h1(spec, side, t_ref) {
        return Ok(H1Limit {
            value,
            case: case_of(value),
            closed_form: true,
            sequence: Vec::new(),
        });
    }
    let mut sequence = Vec::with_capacity(U_SCHEDULE.len());
    for &u in &U_SCHEDULE {
        let t = q_of_u(&spec.correlation, u)? * t_ref;
        if !spec.domain.contains(t) {
            return Err(Error::Indeterminate(format!(
                "q({u}) * t_ref = {t} leaves the domain"
            )));
        }
        sequence.push((u, u * u * spec.variance.one_minus(t)));
    }
    let vals: Vec<f64> = sequence.iter().map(|p| p.1).collect();
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let value = if max < 1e-3 {
        0.0
    } else if min > 1e3 {
        f64::INFINITY
    } else if (max - min) / mean < 0.05 {
        vals[vals.len() - 1]
    } else {
        return Err(Error::Indeterminate(format!(
            "u^2 (1 - sigma^2(q(u) t)) does not settle on the {side:?} side: {vals:?}"
        )));
    };
    Ok(H1Limit {
        value,
        case: case_of(value),
        closed_form: false,
        sequence,
    })
}

/// Per-side labels and transition coefficients `b± = h₁(±1)`. A side absent
/// from a one-sided domain is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseLabel {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub left: Option<SideCase>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub right: Option<SideCase>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b_plus: Option<f64>,
}

impl CaseLabel {
    pub fn side(&self, side: Side) -> Option<SideCase> {
        match side {
            Side::Minus => self.left,
            Side::Plus => self.right,
        }
    }

    pub fn b(&self, side: Side) -> Option<f64> {
        match side {
            Side::Minus => self.b_minus,
            Side::Plus => self.b_plus,
        }
    }

    /// Combined label such as `"S-P"`; a missing side prints as `-`.
    pub fn combined(&self) -> String {
        let p = |c: Option<SideCase>| c.map_or("-".to_string(), |c| c.to_string());
        format!("{}-{}", p(self.left), p(self.right))
    }
}

/// Classifies both sides of the variance maximum.
pub fn classify(spec: &ProcessSpec) -> Result<CaseLabel> {
    if matches!(spec.variance, VarianceProfile::Unit) {
        return Err(Error::Spec(
            "constant variance has no unique maximum to classify".into(),
        ));
    }
    let mut label = CaseLabel {
        left: None,
        right: None,
        b_minus: None,
        b_plus: None,
    };
    for side in spec.sides() {
        let h = h1_limit(spec, side, side.sign())?;
        let b = (h.case == SideCase::P).then_some(h.value);
        match side {
            Side::Minus => {
                label.left = Some(h.case);
                label.b_minus = b;
            }
            Side::Plus => {
                label.right = Some(h.case);
                label.b_plus = b;
            }
        }
    }
    Ok(label)
}

/// `[T₋(u), T₊(u)]`, the hull of `B_u = {t : 1 − σ²(t) ≤ u⁻² log^A u}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformativeInterval {
    pub t_minus: f64,
    pub t_plus: f64,
    pub a: f64,
    pub u: f64,
    /// Set when `B_u` reaches the end of the domain on that side.
    pub clamped_minus: bool,
    pub clamped_plus: bool,
}

/// Largest `r ∈ [0, len]` with `ln(1 − σ²(sign·r)) ≤ ln_thr`, and whether
/// it is the domain end.
fn side_endpoint(spec: &ProcessSpec, side: Side, ln_thr: f64) -> (f64, bool) {
    let len = spec.domain.side_length(side);
    let s = side.sign();
    let g = |r: f64| spec.variance.ln_one_minus(s * r);
    if g(len) <= ln_thr {
        return (len, true);
    }
    let thr = ln_thr.exp();
    match &spec.variance {
        VarianceProfile::Power { plus, minus } => {
            let p = if side == Side::Plus { plus } else { minus };
            return ((thr / p.c).powf(1.0 / p.beta), false);
        }
        VarianceProfile::ExpGentle { beta } => return ((-ln_thr).powf(-1.0 / beta), false),
        _ => {}
    }
    // Scan from the outside in for the last point inside B_u.
    let mut scan: Vec<f64> = (0..=4096).map(|i| len * i as f64 / 4096.0).collect();
    let mut r = len / 4096.0;
    while r > 1e-300 {
        r *= 0.5;
        scan.push(r);
    }
    scan.sort_by(|a, b| a.total_cmp(b));
    let k = scan
        .iter()
        .rposition(|&r| r == 0.0 || g(r) <= ln_thr)
        .unwrap_or(0);
    let (mut a, mut b) = (scan[k], scan[k + 1]);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) <= ln_thr {
            a = m;
        } else {
            b = m;
        }
    }
    (a, false)
}

/// Computes `T±(u)` by root finding on `1 − σ²(t) = u⁻² log^A u` per side.
pub fn informative_interval(spec: &ProcessSpec, u: f64, a: f64) -> Result<InformativeInterval> {
    if !(u >= 2.0) {
        return Err(Error::domain("u", u, "must be at least 2"));
    }
    if !(a > 1.0) {
        return Err(Error::domain("A", a, "must exceed 1"));
    }
    let ln_thr = -2.0 * u.ln() + a * u.ln().ln();
    let (mut t_minus, mut t_plus) = (0.0, 0.0);
    let (mut clamped_minus, mut clamped_plus) = (false, false);
    for side in spec.sides() {
        let (r, c) = side_endpoint(spec, side, ln_thr);
        match side {
            Side::Minus => {
                t_minus = -r;
                clamped_minus = c;
            }
            Side::Plus => {
                t_plus = r;
                clamped_plus = c;
            }
        }
    }
    Ok(InformativeInterval {
        t_minus,
        t_plus,
        a,
        u,
        clamped_minus,
        clamped_plus,
    })
}
