//! Asymptotic formulas for `P(max X(t) > u)` and their dispatch by case.
//!
//! Every formula is a product of a few ingredients: the Gaussian tail
//! `Ψ(u)`, the scale `q(u)`, a Pickands-type constant and, on
//! stationary-like sides, the Laplace transform `L_{f±}(u²)` of the
//! occupation measure. The `(1 + o(1))` factors are taken as exactly 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classifier::{classify, CaseLabel, SideCase};
use crate::error::{Error, Result};
use crate::pickands::{ConstantKind, DriftKind, PickandsEstimate};
use crate::process::{CorrelationProfile, ProcessSpec, Side, VarianceProfile};
use crate::rearrangement::{default_x_cut, occupation_cdf, DEFAULT_A, DEFAULT_GRID};
use crate::regvar::{debruijn_conjugate, q_of_u, RvFunction, SlowlyVarying};

/// `Ψ(u) = P(N(0, 1) > u)`. Underflows to 0 beyond `u ≈ 38`; see
/// [`ln_gaussian_tail`].
pub fn gaussian_tail(u: f64) -> f64 {
    0.5 * libm::erfc(u / std::f64::consts::SQRT_2)
}

/// `ln Ψ(u)`, finite for every finite `u`.
pub fn ln_gaussian_tail(u: f64) -> f64 {
    if u < 8.0 {
        return gaussian_tail(u).ln();
    }
    // Mills ratio Ψ(u)/φ(u) = 1/(u + 1/(u + 2/(u + 3/(u + ...)))).
    let mut r = u;
    for k in (1..=60).rev() {
        r = u + k as f64 / r;
    }
    -0.5 * u * u - 0.5 * (2.0 * std::f64::consts::PI).ln() - r.ln()
}

/// Which formula produced a value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FormulaId {
    Stationary,
    SS,
    SOneSide,
    TT,
    PP,
    POneSide,
    RvClosedForm,
    /// A mixed case such as `S-T`, evaluated by the formula of its dominant side.
    Mixed(String),
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaId::Stationary => f.write_str("stationary"),
            FormulaId::SS => f.write_str("SS"),
            FormulaId::SOneSide => f.write_str("S-one-side"),
            FormulaId::TT => f.write_str("TT"),
            FormulaId::PP => f.write_str("PP"),
            FormulaId::POneSide => f.write_str("P-one-side"),
            FormulaId::RvClosedForm => f.write_str("rv-closed-form"),
            FormulaId::Mixed(c) => write!(f, "mixed-{c}"),
        }
    }
}

impl From<FormulaId> for String {
    fn from(id: FormulaId) -> String {
        id.to_string()
    }
}

impl TryFrom<String> for FormulaId {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        Ok(match s.as_str() {
            "stationary" => FormulaId::Stationary,
            "SS" => FormulaId::SS,
            "S-one-side" => FormulaId::SOneSide,
            "TT" => FormulaId::TT,
            "PP" => FormulaId::PP,
            "P-one-side" => FormulaId::POneSide,
            "rv-closed-form" => FormulaId::RvClosedForm,
            other => match other.strip_prefix("mixed-") {
                Some(c) => FormulaId::Mixed(c.to_string()),
                None => return Err(format!("unknown formula id {other}")),
            },
        })
    }
}

/// Where an ingredient value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Simulated,
    Quadrature,
    /// Root finding or other iterative evaluation.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ingredient {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

/// Value of an asymptotic formula at level `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    pub formula_id: FormulaId,
    pub u: f64,
    pub value: f64,
    /// `ln value`, usable where `value` underflows.
    pub ln_value: f64,
    pub ingredients: Vec<Ingredient>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl AsymptoticResult {
    pub fn ingredient(&self, name: &str) -> Option<f64> {
        self.ingredients
            .iter()
            .find(|i| i.name == name)
            .map(|i| i.value)
    }
}

fn ing(name: &str, value: f64, provenance: Provenance) -> Ingredient {
    Ingredient {
        name: name.into(),
        value,
        provenance,
    }
}

/// `ln Ψ(u)` and the `Ψ(u)` ingredient.
fn psi_ingredient(u: f64) -> (f64, Ingredient) {
    (
        ln_gaussian_tail(u),
        ing("psi_u", gaussian_tail(u), Provenance::ClosedForm),
    )
}

fn q_ingredient(corr: &CorrelationProfile, u: f64) -> Result<(f64, Ingredient)> {
    let q = q_of_u(corr, u)?;
    let prov = match corr {
        CorrelationProfile::PowerExp { .. } | CorrelationProfile::FbmType { .. } => {
            Provenance::ClosedForm
        }
        _ => Provenance::Numeric,
    };
    Ok((q, ing("q_u", q, prov)))
}

fn constant_ingredient(name: &str, c: &PickandsEstimate) -> Ingredient {
    let prov = if c.sampler == "closed-form" {
        Provenance::ClosedForm
    } else {
        Provenance::Simulated
    };
    ing(name, c.value, prov)
}

fn check_h(alpha: f64, h: &PickandsEstimate) -> Result<()> {
    if h.kind != ConstantKind::HAlpha {
        return Err(Error::Config(format!(
            "expected an H_alpha estimate, got {:?}",
            h.kind
        )));
    }
    if (h.alpha - alpha).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "H estimate is for alpha = {}, the correlation has alpha = {alpha}",
            h.alpha
        )));
    }
    Ok(())
}

/// `H_1 = 1` and `H_2 = 1/√π`, the constants with known values.
pub fn known_h_alpha(alpha: f64) -> Option<PickandsEstimate> {
    let v = if alpha == 1.0 {
        1.0
    } else if alpha == 2.0 {
        1.0 / std::f64::consts::PI.sqrt()
    } else {
        return None;
    };
    Some(PickandsEstimate::exact(ConstantKind::HAlpha, alpha, v))
}

/// Stationary case: `mes(E) · H_α · Ψ(u) / q(u)`.
pub fn stationary_asymptotic(
    corr: &CorrelationProfile,
    mes_e: f64,
    u: f64,
    h: &PickandsEstimate,
) -> Result<AsymptoticResult> {
    if !(mes_e > 0.0) {
        return Err(Error::domain("mes_E", mes_e, "must be positive"));
    }
    check_h(corr.alpha(), h)?;
    let (psi, psi_i) = psi_ingredient(u);
    let (q, q_i) = q_ingredient(corr, u)?;
    let ln_value = (mes_e * h.value / q).ln() + psi;
    Ok(AsymptoticResult {
        formula_id: FormulaId::Stationary,
        u,
        value: ln_value.exp(),
        ln_value,
        ingredients: vec![
            q_i,
            psi_i,
            constant_ingredient("H_alpha", h),
            ing("mes_E", mes_e, Provenance::ClosedForm),
        ],
        notes: Vec::new(),
    })
}

/// Requested sides of the variance maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sides {
    Left,
    Right,
    Both,
}

impl Sides {
    fn list(self) -> Vec<Side> {
        match self {
            Sides::Left => vec![Side::Minus],
            Sides::Right => vec![Side::Plus],
            Sides::Both => vec![Side::Minus, Side::Plus],
        }
    }
}

/// `L_{f±}(u²)` with the default truncation.
pub fn laplace_at(spec: &ProcessSpec, side: Side, u: f64) -> Result<f64> {
    let cdf = occupation_cdf(spec, side, default_x_cut(u, DEFAULT_A), DEFAULT_GRID)?;
    Ok(cdf.laplace(u * u)?.value)
}

fn ss_inner(
    spec: &ProcessSpec,
    u: f64,
    h: &PickandsEstimate,
    sides: &[Side],
) -> Result<(f64, Vec<Ingredient>)> {
    check_h(spec.alpha(), h)?;
    let (psi, psi_i) = psi_ingredient(u);
    let (q, q_i) = q_ingredient(&spec.correlation, u)?;
    let mut ingredients = vec![q_i, psi_i, constant_ingredient("H_alpha", h)];
    let mut l_sum = 0.0;
    for &side in sides {
        let l = laplace_at(spec, side, u)?;
        l_sum += l;
        let name = if side == Side::Plus {
            "L_plus"
        } else {
            "L_minus"
        };
        ingredients.push(ing(name, l, Provenance::Quadrature));
    }
    Ok(((h.value * l_sum / q).ln() + psi, ingredients))
}

/// Stationary-like sides: `H_α (L_{f₊}(u²) [+ L_{f₋}(u²)]) Ψ(u) / q(u)`.
pub fn ss_asymptotic(
    spec: &ProcessSpec,
    u: f64,
    h: &PickandsEstimate,
    sides: Sides,
) -> Result<AsymptoticResult> {
    let label = classify(spec)?;
    for side in sides.list() {
        if label.side(side) != Some(SideCase::S) {
            return Err(Error::Dispatch(format!(
                "the {side:?} side is {}, not stationary-like",
                label
                    .side(side)
                    .map_or("absent".to_string(), |c| c.to_string())
            )));
        }
    }
    let (ln_value, ingredients) = ss_inner(spec, u, h, &sides.list())?;
    Ok(AsymptoticResult {
        formula_id: if sides == Sides::Both {
            FormulaId::SS
        } else {
            FormulaId::SOneSide
        },
        u,
        value: ln_value.exp(),
        ln_value,
        ingredients,
        notes: Vec::new(),
    })
}

/// Regular-variation data of one occupation measure: `F(x) = x^a ℓ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvSide {
    pub a: f64,
    pub ell: SlowlyVarying,
}

/// Slowly varying part of `y ↦ 1 − ρ(y^{1/α})`, i.e. of `1 − ρ` in the
/// variable `y = t^α`.
fn correlation_slowly_varying(corr: &CorrelationProfile) -> Result<SlowlyVarying> {
    match *corr {
        CorrelationProfile::PowerExp { c, .. } | CorrelationProfile::FbmType { c, .. } => {
            Ok(SlowlyVarying::Constant { c })
        }
        CorrelationProfile::PowerLogCorrected {
            c,
            alpha,
            log_power,
        } => Ok(SlowlyVarying::LogPower {
            c: c * alpha.powf(-log_power),
            power: log_power,
        }),
        CorrelationProfile::Tabulated { .. } => Err(Error::Config(
            "tabulated correlation has no declared slowly varying factor".into(),
        )),
    }
}

/// Closed form from declared regular-variation data:
/// `H_α Σ± Γ(1 + a±) u^{2/α − 2a±} ℓ±(u⁻²) (ℓ^#(u⁻²))^{−1/α} Ψ(u)`,
/// with `ℓ^#` the de Bruijn conjugate of the correlation's slowly varying
/// factor.
pub fn rv_closed_form(
    spec: &ProcessSpec,
    u: f64,
    h: &PickandsEstimate,
    plus: Option<RvSide>,
    minus: Option<RvSide>,
) -> Result<AsymptoticResult> {
    let alpha = spec.alpha();
    check_h(alpha, h)?;
    if plus.is_none() && minus.is_none() {
        return Err(Error::Config("no side data supplied".into()));
    }
    let x = u.powi(-2);
    let ell_rho = correlation_slowly_varying(&spec.correlation)?;
    let conj = debruijn_conjugate(&RvFunction::slowly(ell_rho), x)?;
    let (psi, psi_i) = psi_ingredient(u);
    let mut ingredients = vec![
        psi_i,
        constant_ingredient("H_alpha", h),
        ing("ell_sharp", conj.value, Provenance::Numeric),
    ];
    let mut sum = 0.0;
    for (name, side) in [("L_plus", plus), ("L_minus", minus)] {
        let Some(RvSide { a, ell }) = side else {
            continue;
        };
        if a > 1.0 / alpha + 1e-12 {
            return Err(Error::Config(format!(
                "index a = {a} exceeds 1/alpha = {}",
                1.0 / alpha
            )));
        }
        let l = libm::tgamma(1.0 + a) * x.powf(a) * ell.eval(x);
        ingredients.push(ing(name, l, Provenance::ClosedForm));
        sum += l;
    }
    let inv_q = u.powf(2.0 / alpha) * conj.value.powf(-1.0 / alpha);
    ingredients.push(ing("q_u", 1.0 / inv_q, Provenance::Numeric));
    let ln_value = (h.value * sum).ln() + inv_q.ln() + psi;
    Ok(AsymptoticResult {
        formula_id: FormulaId::RvClosedForm,
        u,
        value: ln_value.exp(),
        ln_value,
        ingredients,
        notes: Vec::new(),
    })
}

/// Talagrand-like case: `Ψ(u)`, on one side or both.
pub fn talagrand_asymptotic(u: f64) -> AsymptoticResult {
    let (psi, psi_i) = psi_ingredient(u);
    AsymptoticResult {
        formula_id: FormulaId::TT,
        u,
        value: psi.exp(),
        ln_value: psi,
        ingredients: vec![psi_i],
        notes: Vec::new(),
    }
}

/// Transition case: `P_α⁺ Ψ(u)` one-sided or `P_α Ψ(u)` two-sided.
pub fn transition_asymptotic(
    u: f64,
    p: &PickandsEstimate,
    sides: Sides,
) -> Result<AsymptoticResult> {
    let (formula_id, name, ok) = match sides {
        Sides::Both => (
            FormulaId::PP,
            "P_alpha",
            matches!(p.kind, ConstantKind::PAlpha | ConstantKind::PAlphaT),
        ),
        _ => (
            FormulaId::POneSide,
            "P_alpha_plus",
            matches!(p.kind, ConstantKind::PAlphaPlus | ConstantKind::PAlphaPlusT),
        ),
    };
    if !ok {
        return Err(Error::Config(format!(
            "{:?} does not match the requested sides {sides:?}",
            p.kind
        )));
    }
    let (psi, psi_i) = psi_ingredient(u);
    let ln_value = p.value.ln() + psi;
    Ok(AsymptoticResult {
        formula_id,
        u,
        value: ln_value.exp(),
        ln_value,
        ingredients: vec![psi_i, constant_ingredient(name, p)],
        notes: Vec::new(),
    })
}

/// Constants available to [`evaluate`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(default)]
    pub h_alpha: Option<PickandsEstimate>,
    #[serde(default)]
    pub p_alpha: Option<PickandsEstimate>,
    #[serde(default)]
    pub p_alpha_plus: Option<PickandsEstimate>,
}

impl Constants {
    /// Fills in `H_α` from its known value where one exists.
    pub fn with_known(mut self, alpha: f64) -> Self {
        if self.h_alpha.is_none() {
            self.h_alpha = known_h_alpha(alpha);
        }
        self
    }
}

fn b_matches(est: Option<f64>, want: f64) -> bool {
    match est {
        Some(b) if b.is_infinite() || want.is_infinite() => b == want,
        Some(b) => (b - want).abs() <= 1e-9 * want.abs().max(1.0),
        None => false,
    }
}

fn drift_bs(p: &PickandsEstimate) -> (Option<f64>, Option<f64>) {
    match p.drift {
        Some(DriftKind::Transition { b_plus, b_minus }) => (Some(b_plus), Some(b_minus)),
        _ => (None, None),
    }
}

const DOUBLE_SIDE_NOTE: &str =
    "two-sided probabilities in T and P cases are not asymptotically the sum of one-sided ones";

/// Routes a spec to its formula by case. Constant variance goes to the
/// stationary formula with `mes(E)` the domain length.
pub fn evaluate(spec: &ProcessSpec, u: f64, constants: &Constants) -> Result<AsymptoticResult> {
    let need_h = || {
        constants.h_alpha.as_ref().ok_or_else(|| {
            Error::Config("an H_alpha constant is required for stationary-like sides".into())
        })
    };
    if matches!(spec.variance, VarianceProfile::Unit) {
        return stationary_asymptotic(&spec.correlation, spec.domain.length(), u, need_h()?);
    }
    let label: CaseLabel = classify(spec)?;
    let present: Vec<(Side, SideCase)> = spec
        .sides()
        .into_iter()
        .filter_map(|s| label.side(s).map(|c| (s, c)))
        .collect();
    let s_sides: Vec<Side> = present
        .iter()
        .filter(|p| p.1 == SideCase::S)
        .map(|p| p.0)
        .collect();
    let combined = label.combined();

    if !s_sides.is_empty() {
        let (ln_value, ingredients) = ss_inner(spec, u, need_h()?, &s_sides)?;
        let formula_id = if s_sides.len() == 2 {
            FormulaId::SS
        } else if present.len() == 1 {
            FormulaId::SOneSide
        } else {
            FormulaId::Mixed(combined)
        };
        return Ok(AsymptoticResult {
            formula_id,
            u,
            value: ln_value.exp(),
            ln_value,
            ingredients,
            notes: Vec::new(),
        });
    }

    let p_sides: Vec<Side> = present
        .iter()
        .filter(|p| p.1 == SideCase::P)
        .map(|p| p.0)
        .collect();
    let mut result = match p_sides.len() {
        0 => talagrand_asymptotic(u),
        2 if present.len() == 2 => {
            let p = constants
                .p_alpha
                .as_ref()
                .ok_or_else(|| Error::Config("a two-sided P_alpha constant is required".into()))?;
            let (bp, bm) = drift_bs(p);
            if !b_matches(bp, label.b_plus.unwrap_or(f64::NAN))
                || !b_matches(bm, label.b_minus.unwrap_or(f64::NAN))
            {
                return Err(Error::Config(format!(
                    "P_alpha was estimated for b = ({bm:?}, {bp:?}), the case needs ({:?}, {:?})",
                    label.b_minus, label.b_plus
                )));
            }
            transition_asymptotic(u, p, Sides::Both)?
        }
        _ => {
            // One P side, the other T or absent: the one-sided constant with
            // that side's coefficient (the law of χ is symmetric).
            let side = p_sides[0];
            let want = label.b(side).unwrap_or(f64::NAN);
            let p = constants.p_alpha_plus.as_ref().ok_or_else(|| {
                Error::Config("a one-sided P_alpha^+ constant is required".into())
            })?;
            let (bp, _) = drift_bs(p);
            if !b_matches(bp, want) {
                return Err(Error::Config(format!(
                    "P_alpha^+ was estimated for b = {bp:?}, the {side:?} side needs {want}"
                )));
            }
            let mut r = transition_asymptotic(u, p, Sides::Right)?;
            if present.len() == 2 {
                r.formula_id = FormulaId::Mixed(combined.clone());
            }
            r
        }
    };
    if present.len() == 2 && result.formula_id == FormulaId::TT && combined != "T-T" {
        result.formula_id = FormulaId::Mixed(combined);
    }
    if present.len() == 2 {
        result.notes.push(DOUBLE_SIDE_NOTE.to_string());
    }
    Ok(result)
}
