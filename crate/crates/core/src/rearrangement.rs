//! Occupation measures of the variance deficit, their Laplace transforms and
//! the truncated informative integrals.
//!
//! On one side of the maximum, `F(x) = mes{t ∈ side : f(t) ≤ x}` with
//! `f = (1 − σ²)/2`. The nondecreasing rearrangement `f₊ = F^←` is
//! equimeasurable with `f`, so `∫ φ(f) dt = ∫ φ(f₊) dt` for monotone `φ`.
//! Every `F` is only meaningful on `[0, x_cut]`; beyond it we hold it at
//! `F(x_cut)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{ProcessSpec, Side, VarianceProfile};
use crate::quad::{integrate, integrate_pieces};
use crate::regvar::generalized_inverse_fn;

/// Default truncation exponent `A` in `x_cut = 2 u⁻² log^A u`.
pub const DEFAULT_A: f64 = 4.0;
/// Default number of grid cells for level-set counting.
pub const DEFAULT_GRID: usize = 1 << 14;

/// `2 u⁻² log^A u`, the truncation level used throughout.
pub fn default_x_cut(u: f64, a: f64) -> f64 {
    2.0 * u.powi(-2) * u.ln().powf(a)
}

/// A breakpoint of a piecewise-linear distribution function: the left limit
/// `F(x−)` and the value `F(x)`. They differ where `F` has an atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub x: f64,
    pub below: f64,
    pub at: f64,
}

/// How `F` is represented.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CdfRepr {
    /// `F(x) = (x/c)^{1/β}`, from `f(t) = c t^β`.
    Power { c: f64, beta: f64 },
    /// `F(x) = log^{−1/β}(scale/x)` for `x < scale`, from `f(t) = scale·exp(−t^{−β})`.
    ExpGentle { scale: f64, beta: f64 },
    /// Inverse of a monotone variance deficit, found by bisection.
    Inverse {
        variance: VarianceProfile,
        sign: f64,
    },
    /// Piecewise linear between knots, with atoms.
    Table { knots: Vec<Knot> },
}

/// Distribution function of the occupation measure on one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationCdf {
    pub side: Side,
    pub repr: CdfRepr,
    pub x_cut: f64,
    /// Total mass available, the side length.
    pub side_length: f64,
}

/// `∫ e^{−λx} dF` over `[0, x_cut]` and a bound on what lies beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Laplace {
    pub value: f64,
    pub tail_bound: f64,
}

// Neumaier summation: slopes of steep ramps enter and leave the running sum
// with opposite signs, which plain summation would not cancel.
#[derive(Default, Clone, Copy)]
struct CompSum {
    s: f64,
    c: f64,
}

impl CompSum {
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// `(1 − e^{−z})/z`, stable for small `z`.
fn exp_ramp(z: f64) -> f64 {
    if z < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// Knots of `F` for the linear interpolant of `fs` over `ts`, up to `x_cut`.
fn knots_from_samples(ts: &[f64], fs: &[f64], x_cut: f64) -> Vec<Knot> {
    // (x, slope change, jump)
    let mut events: Vec<(f64, f64, f64)> = Vec::with_capacity(2 * ts.len());
    for i in 0..ts.len() - 1 {
        let h = (ts[i + 1] - ts[i]).abs();
        let (lo, hi) = if fs[i] <= fs[i + 1] {
            (fs[i], fs[i + 1])
        } else {
            (fs[i + 1], fs[i])
        };
        if lo > x_cut {
            continue;
        }
        let s = h / (hi - lo);
        if hi > lo && s.is_finite() {
            events.push((lo, s, 0.0));
            events.push((hi, -s, 0.0));
        } else {
            // Flat cell, or a ramp too steep to represent: an atom.
            events.push((lo, 0.0, h));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut knots = Vec::new();
    let mut slope = CompSum::default();
    let mut f = CompSum::default();
    let mut x_prev = 0.0;
    let mut i = 0;
    if events.first().is_none_or(|e| e.0 > 0.0) {
        knots.push(Knot {
            x: 0.0,
            below: 0.0,
            at: 0.0,
        });
    }
    while i < events.len() && events[i].0 <= x_cut {
        let x = events[i].0;
        f.add(slope.value() * (x - x_prev));
        let below = f.value();
        while i < events.len() && events[i].0 == x {
            slope.add(events[i].1);
            f.add(events[i].2);
            i += 1;
        }
        knots.push(Knot {
            x,
            below,
            at: f.value(),
        });
        x_prev = x;
    }
    if x_prev < x_cut {
        f.add(slope.value() * (x_cut - x_prev));
        let v = f.value();
        knots.push(Knot {
            x: x_cut,
            below: v,
            at: v,
        });
    }
    knots
}

impl OccupationCdf {
    /// Closed form `F(x) = (x/c)^{1/β}` on a side of length `side_length`.
    pub fn power(c: f64, beta: f64, side_length: f64, x_cut: f64) -> Self {
        OccupationCdf {
            side: Side::Plus,
            repr: CdfRepr::Power { c, beta },
            x_cut,
            side_length,
        }
    }

    /// Occupation measure of an arbitrary nonnegative `f` on `[lo, hi]`,
    /// measured on `grid_size` uniform cells. `f` is treated as its linear
    /// interpolant, whose occupation measure is computed exactly.
    pub fn from_fn(
        f: impl Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        x_cut: f64,
        grid_size: usize,
    ) -> Result<Self> {
        if !(x_cut > 0.0) {
            return Err(Error::domain("x_cut", x_cut, "must be positive"));
        }
        if grid_size < 1 || !(hi > lo) {
            return Err(Error::Spec("empty occupation grid".into()));
        }
        let h = (hi - lo) / grid_size as f64;
        let ts: Vec<f64> = (0..=grid_size).map(|i| lo + h * i as f64).collect();
        let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        Self::from_samples(&ts, &fs, x_cut)
    }

    /// Occupation measure of the linear interpolant through `(ts, fs)`.
    pub fn from_samples(ts: &[f64], fs: &[f64], x_cut: f64) -> Result<Self> {
        if ts.len() != fs.len() || ts.len() < 2 {
            return Err(Error::Spec(
                "occupation samples need at least two points".into(),
            ));
        }
        if let Some(v) = fs.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Spec(format!("f must be nonnegative, found {v}")));
        }
        let len = (ts[ts.len() - 1] - ts[0]).abs();
        Ok(OccupationCdf {
            side: Side::Plus,
            repr: CdfRepr::Table {
                knots: knots_from_samples(ts, fs, x_cut),
            },
            x_cut,
            side_length: len,
        })
    }

    /// `F(x)`, held constant beyond `x_cut`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let x = x.min(self.x_cut);
        let v = match &self.repr {
            CdfRepr::Power { c, beta } => (x / c).powf(1.0 / beta),
            CdfRepr::ExpGentle { scale, beta } => {
                if x >= *scale {
                    self.side_length
                } else if x == 0.0 {
                    0.0
                } else {
                    (scale / x).ln().powf(-1.0 / beta)
                }
            }
            CdfRepr::Inverse { variance, sign } => {
                let len = self.side_length;
                let g = |t: f64| 0.5 * variance.one_minus(sign * t);
                if x == 0.0 {
                    0.0
                } else if g(len) <= x {
                    len
                } else {
                    generalized_inverse_fn(g, x, 0.0, len).unwrap_or(len)
                }
            }
            CdfRepr::Table { knots } => table_eval(knots, x),
        };
        v.min(self.side_length)
    }

    /// The rearranged function `f₊(t) = inf{x : F(x) ≥ t}` for `t` in
    /// `(0, F(x_cut)]`.
    pub fn rearranged(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if let CdfRepr::Table { knots } = &self.repr {
            for w in knots.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a.at >= t {
                    return a.x;
                }
                if b.below >= t {
                    let df = b.below - a.at;
                    return a.x + (b.x - a.x) * (t - a.at) / df;
                }
            }
            return knots.last().map_or(0.0, |k| k.x);
        }
        if self.eval(self.x_cut) < t {
            return self.x_cut;
        }
        generalized_inverse_fn(|x| self.eval(x), t, 0.0, self.x_cut).unwrap_or(self.x_cut)
    }

    /// `∫ φ(f₊(t)) dt` over `t ∈ [0, F(x_cut)]`.
    pub fn rearranged_integral(&self, phi: impl Fn(f64) -> f64) -> f64 {
        match &self.repr {
            CdfRepr::Table { knots } => {
                let mut acc = CompSum::default();
                for (i, k) in knots.iter().enumerate() {
                    // Atom: f₊ is flat at k.x over a t-interval of this length.
                    let jump = k.at - k.below;
                    if jump > 0.0 {
                        acc.add(jump * phi(k.x));
                    }
                    if let Some(next) = knots.get(i + 1) {
                        let df = next.below - k.at;
                        if df > 0.0 {
                            // f₊ runs linearly from k.x to next.x.
                            let (x0, x1) = (k.x, next.x);
                            let (v, _) =
                                integrate(|s| phi(x0 + (x1 - x0) * s), 0.0, 1.0, 1e-300, 1e-14);
                            acc.add(df * v);
                        }
                    }
                }
                acc.value()
            }
            _ => {
                let top = self.eval(self.x_cut);
                let pts: Vec<f64> = (0..=40).map(|k| top * 2f64.powi(k - 40)).collect();
                let mut pts = pts;
                pts.insert(0, 0.0);
                integrate_pieces(|t| phi(self.rearranged(t)), &pts, 1e-300, 1e-12)
            }
        }
    }

    /// `L(λ) = ∫_{[0, x_cut]} e^{−λx} dF(x)`, with the tail beyond `x_cut`
    /// bounded by `e^{−λ x_cut}` times the side length.
    pub fn laplace(&self, lambda: f64) -> Result<Laplace> {
        if !(lambda > 0.0) {
            return Err(Error::domain("lambda", lambda, "must be positive"));
        }
        let tail_bound = (-lambda * self.x_cut).exp() * self.side_length;
        let value = match &self.repr {
            CdfRepr::Table { knots } => {
                let mut acc = CompSum::default();
                for (i, k) in knots.iter().enumerate() {
                    let e = (-lambda * k.x).exp();
                    acc.add((k.at - k.below) * e);
                    if let Some(next) = knots.get(i + 1) {
                        let df = next.below - k.at;
                        if df != 0.0 {
                            acc.add(df * e * exp_ramp(lambda * (next.x - k.x)));
                        }
                    }
                }
                acc.value()
            }
            _ => {
                // By parts: e^{−λc}F(c) + ∫₀^{λc} e^{−y} F(y/λ) dy.
                let upper = (lambda * self.x_cut).min(800.0);
                let mut pts = vec![0.0];
                for b in [
                    1e-12, 1e-9, 1e-6, 1e-4, 1e-2, 0.1, 1.0, 4.0, 16.0, 64.0, 256.0,
                ] {
                    if b < upper {
                        pts.push(b);
                    }
                }
                pts.push(upper);
                let body =
                    integrate_pieces(|y| (-y).exp() * self.eval(y / lambda), &pts, 1e-300, 1e-12);
                (-lambda * self.x_cut).exp() * self.eval(self.x_cut) + body
            }
        };
        Ok(Laplace { value, tail_bound })
    }
}

fn table_eval(knots: &[Knot], x: f64) -> f64 {
    let idx = knots.partition_point(|k| k.x <= x);
    if idx == 0 {
        return 0.0;
    }
    let k = knots[idx - 1];
    if k.x == x || idx == knots.len() {
        return k.at;
    }
    let n = knots[idx];
    k.at + (n.below - k.at) * (x - k.x) / (n.x - k.x)
}

/// `∫ φ(g(t)) dt` for the linear interpolant `g` through `(ts, fs)`, the
/// left-hand side of the rearrangement identity.
pub fn interpolant_integral(ts: &[f64], fs: &[f64], phi: impl Fn(f64) -> f64) -> f64 {
    let mut acc = CompSum::default();
    for i in 0..ts.len() - 1 {
        let h = (ts[i + 1] - ts[i]).abs();
        let (a, b) = (fs[i], fs[i + 1]);
        if a == b {
            acc.add(h * phi(a));
        } else {
            let (v, _) = integrate(|s| phi(a + (b - a) * s), 0.0, 1.0, 1e-300, 1e-14);
            acc.add(h * v);
        }
    }
    acc.value()
}

/// Deficit `f` on one side as a function of the distance from 0.
fn side_f(spec: &ProcessSpec, side: Side) -> impl Fn(f64) -> f64 + '_ {
    let s = side.sign();
    move |r: f64| 0.5 * spec.variance.one_minus(s * r)
}

fn check_positive_off_zero(spec: &ProcessSpec, side: Side, grid_size: usize) -> Result<()> {
    let len = spec.domain.side_length(side);
    let s = side.sign();
    for i in 1..=grid_size {
        let t = s * len * i as f64 / grid_size as f64;
        if !(spec.variance.ln_one_minus(t) > f64::NEG_INFINITY) {
            return Err(Error::Spec(format!(
                "f = (1 - sigma^2)/2 is not positive at t = {t}; the variance maximum is not unique"
            )));
        }
    }
    Ok(())
}

/// Occupation measure of `f = (1 − σ²)/2` on one side. Closed forms are used
/// where `f` is monotone with a known inverse; otherwise level sets are
/// measured on a uniform grid (or on the knots of a tabulated profile).
pub fn occupation_cdf(
    spec: &ProcessSpec,
    side: Side,
    x_cut: f64,
    grid_size: usize,
) -> Result<OccupationCdf> {
    if !(x_cut > 0.0) {
        return Err(Error::domain("x_cut", x_cut, "must be positive"));
    }
    if grid_size < 256 {
        return Err(Error::domain(
            "grid_size",
            grid_size as f64,
            "at least 256 cells required",
        ));
    }
    let len = spec.domain.side_length(side);
    if !(len > 0.0) {
        return Err(Error::Spec(format!("domain has no {side:?} side")));
    }
    check_positive_off_zero(spec, side, grid_size)?;
    let repr = match &spec.variance {
        VarianceProfile::Power { plus, minus } => {
            let p = if side == Side::Plus { plus } else { minus };
            CdfRepr::Power {
                c: 0.5 * p.c,
                beta: p.beta,
            }
        }
        VarianceProfile::ExpGentle { beta } => CdfRepr::ExpGentle {
            scale: 0.5,
            beta: *beta,
        },
        VarianceProfile::PowerLog { .. } if spec.variance.is_monotone_on(side, len) => {
            CdfRepr::Inverse {
                variance: spec.variance.clone(),
                sign: side.sign(),
            }
        }
        VarianceProfile::Tabulated { points } => {
            let s = side.sign();
            let mut pts: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p[0] * s >= 0.0 && p[0].abs() <= len)
                .map(|p| (p[0].abs(), 0.5 * (1.0 - p[1])))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pts.last().is_none_or(|p| p.0 < len) {
                pts.push((len, 0.5 * spec.variance.one_minus(s * len)));
            }
            for w in pts.windows(2) {
                if w[0].0 > 0.0 && w[0].1 == w[1].1 {
                    return Err(Error::Spec(format!(
                        "variance table is flat on [{}, {}]; the maximum at 0 is not unique",
                        w[0].0, w[1].0
                    )));
                }
            }
            let (ts, fs): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            CdfRepr::Table {
                knots: knots_from_samples(&ts, &fs, x_cut),
            }
        }
        _ => {
            let f = side_f(spec, side);
            let h = len / grid_size as f64;
            let ts: Vec<f64> = (0..=grid_size).map(|i| h * i as f64).collect();
            let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
            CdfRepr::Table {
                knots: knots_from_samples(&ts, &fs, x_cut),
            }
        }
    };
    Ok(OccupationCdf {
        side,
        repr,
        x_cut,
        side_length: len,
    })
}

/// `L_{f±}(λ)` for a spec at the default truncation for level `u = √λ`.
pub fn laplace_transform(cdf: &OccupationCdf, lambda: f64) -> Result<Laplace> {
    cdf.laplace(lambda)
}

/// Truncated integral `∫ e^{−u² f(t)} dt` over the part of one side where
/// `f(t) ≤ 2 u⁻² log^A u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformativeIntegral {
    pub value: f64,
    pub threshold: f64,
    /// Set when the truncated domain is empty beyond `t = 0`.
    pub empty: bool,
}

/// Computes the informative integral on `side`.
pub fn informative_integral(
    spec: &ProcessSpec,
    side: Side,
    u: f64,
    a: f64,
) -> Result<InformativeIntegral> {
    if !(u >= 2.0) {
        return Err(Error::domain("u", u, "must be at least 2"));
    }
    if !(a > 1.0) {
        return Err(Error::domain("A", a, "must exceed 1"));
    }
    let len = spec.domain.side_length(side);
    let threshold = default_x_cut(u, a);
    let f = side_f(spec, side);
    let lambda = u * u;

    // Scan points: dyadic towards 0, uniform across the side.
    let mut scan: Vec<f64> = (0..=1024).map(|i| len * i as f64 / 1024.0).collect();
    let mut r = len / 1024.0;
    while r > 1e-300 {
        r *= 0.5;
        scan.push(r);
    }
    scan.sort_by(|x, y| x.total_cmp(y));
    scan.dedup();

    let inside = |t: f64| f(t) <= threshold;
    let crossing = |mut lo: f64, mut hi: f64, lo_inside: bool| {
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            if inside(m) == lo_inside {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    };

    let mut intervals = Vec::new();
    let mut start = if inside(scan[0]) { Some(scan[0]) } else { None };
    for w in scan.windows(2) {
        let (i0, i1) = (inside(w[0]), inside(w[1]));
        if i0 != i1 {
            let c = crossing(w[0], w[1], i0);
            if i0 {
                intervals.push((start.take().unwrap_or(w[0]), c));
            } else {
                start = Some(c);
            }
        }
    }
    if let Some(s) = start {
        intervals.push((s, len));
    }
    intervals.retain(|(s, e)| e > s);

    if intervals.is_empty() {
        return Ok(InformativeIntegral {
            value: 0.0,
            threshold,
            empty: true,
        });
    }
    let g = |t: f64| (-lambda * f(t)).exp();
    let mut value = 0.0;
    for (s, e) in intervals {
        let mut pts = vec![s];
        if s == 0.0 {
            for k in (1..=60).rev() {
                pts.push(e * 2f64.powi(-k));
            }
        }
        pts.push(e);
        value += integrate_pieces(g, &pts, 1e-300, 1e-11);
    }
    Ok(InformativeIntegral {
        value,
        threshold,
        empty: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{CorrelationProfile, Domain};

    fn spec(variance: VarianceProfile, s: f64) -> ProcessSpec {
        ProcessSpec::new(
            "t",
            variance,
            CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
            Domain::symmetric(s),
        )
        .unwrap()
    }

    #[test]
    fn identity_occupation() {
        let f = OccupationCdf::from_fn(|t| t, 0.0, 1.0, 0.5, 1024).unwrap();
        for x in [0.0, 0.1, 0.25, 0.5] {
            assert!((f.eval(x) - x).abs() < 1e-14);
        }
    }

    #[test]
    fn parabola_occupation_is_sqrt() {
        let f = OccupationCdf::from_fn(|t| 4.0 * (t - 0.5) * (t - 0.5), 0.0, 1.0, 1.0, 1 << 14)
            .unwrap();
        for x in [0.01, 0.2, 0.5, 0.9] {
            assert!((f.eval(x) - x.sqrt()).abs() < 1e-4, "{x}");
        }
    }

    #[test]
    fn exp_gentle_closed_form() {
        let s = spec(VarianceProfile::ExpGentle { beta: 2.0 }, 1.0);
        let f = occupation_cdf(&s, Side::Plus, 0.1, 1024).unwrap();
        // f = e^{-t^-2}/2 <= x  <=>  t <= log^{-1/2}(1/(2x)).
        let x: f64 = 0.01;
        assert!((f.eval(x) - (1.0 / (2.0 * x)).ln().powf(-0.5)).abs() < 1e-15);
        // Agrees with grid counting.
        let g =
            OccupationCdf::from_fn(|t| 0.5 * (-t.powi(-2)).exp(), 0.0, 1.0, 0.1, 1 << 14).unwrap();
        assert!(
            (f.eval(x) - g.eval(x)).abs() < 1e-4,
            "{} {}",
            f.eval(x),
            g.eval(x)
        );
    }

    #[test]
    fn laplace_of_uniform() {
        let f = OccupationCdf::power(1.0, 1.0, 1.0, 1.0);
        let l = f.laplace(1.0).unwrap();
        assert!((l.value - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let t = OccupationCdf::from_fn(|t| t, 0.0, 1.0, 1.0, 256).unwrap();
        assert!((t.laplace(1.0).unwrap().value - l.value).abs() < 1e-14);
    }

    #[test]
    fn laplace_of_sqrt() {
        // Independent value: Γ(3/2)/100 with exponentially small truncation.
        let f = OccupationCdf::power(1.0, 2.0, 1.0, 1.0);
        let l = f.laplace(1e4).unwrap();
        assert!((l.value / 0.008_862_269_254_527_58 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn laplace_decreasing() {
        let f = OccupationCdf::from_fn(|t| t * t, 0.0, 1.0, 1.0, 512).unwrap();
        let mut prev = f64::INFINITY;
        for lam in [0.5, 1.0, 10.0, 100.0, 1e4] {
            let v = f.laplace(lam).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn alternative_representation_agrees() {
        // ∫₀¹ F(−λ⁻¹ log v) dv is the same transform after v = e^{−λx}.
        let s = spec(VarianceProfile::ExpGentle { beta: 1.0 }, 1.0);
        let lam = 1e6;
        let cdf = occupation_cdf(&s, Side::Plus, 1.0, 1024).unwrap();
        let pts = [0.0, 1e-12, 1e-8, 1e-4, 1e-2, 0.5, 1.0];
        let j = integrate_pieces(|v| cdf.eval(-v.ln() / lam), &pts, 1e-300, 1e-10);
        let l = cdf.laplace(lam).unwrap().value;
        assert!((j / l - 1.0).abs() < 1e-6, "{j} {l}");
    }

    #[test]
    fn rearrangement_identity_for_linear_interpolant() {
        let n = 1 << 12;
        let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let fs: Vec<f64> = ts.iter().map(|t| 4.0 * (t - 0.5) * (t - 0.5)).collect();
        let cdf = OccupationCdf::from_samples(&ts, &fs, 1.0).unwrap();
        let phi = |x: f64| (-100.0 * x).exp();
        let lhs = interpolant_integral(&ts, &fs, phi);
        let rhs = cdf.rearranged_integral(phi);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn rearranged_inverts_cdf() {
        let cdf =
            OccupationCdf::from_fn(|t| 4.0 * (t - 0.5) * (t - 0.5), 0.0, 1.0, 1.0, 1024).unwrap();
        for t in [0.1, 0.5, 0.9] {
            let x = cdf.rearranged(t);
            assert!((cdf.eval(x) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn informative_integral_linear() {
        // f(t) = t; threshold 2·10⁻²·log²10.
        let s = spec(VarianceProfile::power(2.0, 1.0), 0.5);
        let r = informative_integral(&s, Side::Plus, 10.0, 2.0).unwrap();
        let thr = 0.02 * 10f64.ln().powi(2);
        let oracle = 0.01 * (1.0 - (-100.0 * thr).exp());
        assert!((r.value - oracle).abs() < 1e-14, "{}", r.value);
        assert!(!r.empty);
    }

    #[test]
    fn informative_integral_quadratic() {
        // f(t) = t²: ∫₀^√thr e^{−100t²} dt = √π/20 · erf(10√thr).
        let s = spec(VarianceProfile::power(2.0, 2.0), 0.5);
        let r = informative_integral(&s, Side::Plus, 10.0, 2.0).unwrap();
        let thr: f64 = 0.02 * 10f64.ln().powi(2);
        let oracle = std::f64::consts::PI.sqrt() / 20.0 * libm::erf(10.0 * thr.sqrt());
        assert!((r.value - oracle).abs() < 1e-12, "{} {}", r.value, oracle);
    }

    #[test]
    fn informative_matches_laplace() {
        for beta in [1.0, 2.0, 4.0] {
            let s = spec(VarianceProfile::power(1.0, beta), 1.0);
            for u in [50.0, 200.0] {
                let i = informative_integral(&s, Side::Plus, u, 2.0).unwrap().value;
                let cdf =
                    occupation_cdf(&s, Side::Plus, default_x_cut(u, 2.0), DEFAULT_GRID).unwrap();
                let l = cdf.laplace(u * u).unwrap().value;
                assert!((i / l - 1.0).abs() < 0.01, "beta {beta} u {u}: {i} {l}");
            }
        }
    }

    #[test]
    fn tail_bound_negligible() {
        let s = spec(VarianceProfile::power(1.0, 2.0), 1.0);
        for u in [10.0, 100.0, 1e3] {
            let cdf =
                occupation_cdf(&s, Side::Plus, default_x_cut(u, DEFAULT_A), DEFAULT_GRID).unwrap();
            let l = cdf.laplace(u * u).unwrap();
            assert!(l.tail_bound < 1e-6 * l.value);
        }
    }

    #[test]
    fn flat_variance_table_is_rejected() {
        let table = VarianceProfile::Tabulated {
            points: vec![[-1.0, 0.5], [0.0, 1.0], [0.5, 0.8], [1.0, 0.8]],
        };
        let s = spec(table, 1.0);
        assert!(matches!(
            occupation_cdf(&s, Side::Plus, 1.0, 256),
            Err(Error::Spec(_))
        ));
        assert!(occupation_cdf(&s, Side::Minus, 1.0, 256).is_ok());
    }

    #[test]
    fn unit_variance_is_rejected() {
        let s = spec(VarianceProfile::Unit, 1.0);
        assert!(occupation_cdf(&s, Side::Plus, 1.0, 256).is_err());
    }
}
