//! The limit process `χ(t) = √2 B_{α/2}(t) − |t|^α` and Monte Carlo
//! estimates of the Pickands constants `H_α(T)`, `H_α` and the transition
//! constants `P_α⁺(T)`, `P_α(T)`, `P_α⁺`, `P_α`.
//!
//! All estimators work on a grid `t_j = j δ`, so they target the discrete
//! versions of the constants, which increase to the continuum ones as
//! `δ → 0`.
//!
//! `E exp(max χ)` has a very heavy right tail, so the default estimators use
//! the shift identity `E[e^{χ(k)} G(χ)] = E[G(χ(· − k))]` for functionals
//! `G` invariant under adding constants. For `H` this gives
//! `H^δ(T) = Σ_{k=0}^{K} E[max_W e^χ / Σ_W e^χ]` over the windows `W` of
//! `K + 1` points that contain 0, and every summand lies in `(0, 1]`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_units, unit_rng};
use crate::sampler::FbmSampler;

/// Largest number of grid steps on one side.
pub const MAX_STEPS: usize = 1 << 16;

/// Mean of the limit process beyond `−|t|^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DriftKind {
    /// `E χ(t) = −|t|^α`.
    Pickands,
    /// Extra drift `b± |t|^α` per side; `b = ∞` freezes that side.
    Transition {
        #[serde(with = "crate::serde_ext::extended")]
        b_plus: f64,
        #[serde(with = "crate::serde_ext::extended")]
        b_minus: f64,
    },
    /// `χ₁ ≡ 0`.
    Degenerate,
}

/// Grid and drift of the simulated limit process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitProcessSpec {
    pub alpha: f64,
    pub drift: DriftKind,
    pub horizon: f64,
    pub grid_step: f64,
    pub two_sided: bool,
}

/// Default grid step for horizon `t`.
pub fn default_grid_step(alpha: f64, t: f64) -> f64 {
    if alpha >= 1.0 {
        0.01 * t.min(1.0)
    } else {
        0.002
    }
}

impl LimitProcessSpec {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::domain("alpha", self.alpha, "must lie in (0, 2]"));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain(
                "T",
                self.horizon,
                "must be finite and nonnegative",
            ));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::domain(
                "grid_step",
                self.grid_step,
                "must be positive",
            ));
        }
        if self.horizon / self.grid_step > MAX_STEPS as f64 {
            return Err(Error::domain(
                "T",
                self.horizon,
                "more than 2^16 grid steps",
            ));
        }
        if let DriftKind::Transition { b_plus, b_minus } = self.drift {
            for (name, b) in [("b_plus", b_plus), ("b_minus", b_minus)] {
                if !(b > 0.0) {
                    return Err(Error::domain(name, b, "must be positive or infinite"));
                }
            }
        }
        Ok(())
    }

    /// Grid steps per side.
    pub fn steps(&self) -> usize {
        (self.horizon / self.grid_step).round() as usize
    }

    /// Grid times, left to right.
    pub fn times(&self) -> Vec<f64> {
        let k = self.steps() as isize;
        let lo = if self.two_sided { -k } else { 0 };
        (lo..=k).map(|j| j as f64 * self.grid_step).collect()
    }

    /// Deterministic mean `−|t|^α − h₁(t)` at `t`, with `−∞` on a frozen side.
    pub fn mean(&self, t: f64) -> f64 {
        let h = t.abs().powf(self.alpha);
        match self.drift {
            DriftKind::Pickands => -h,
            DriftKind::Degenerate => 0.0,
            DriftKind::Transition { b_plus, b_minus } => {
                if t == 0.0 {
                    return 0.0;
                }
                let b = if t > 0.0 { b_plus } else { b_minus };
                if b.is_infinite() {
                    f64::NEG_INFINITY
                } else {
                    -(1.0 + b) * h
                }
            }
        }
    }
}

/// Draws the Gaussian part `√2 B_{α/2}` on a symmetric grid `−k..=k`.
enum ChiNoise {
    /// `α = 2`: `√2 ξ t` with a single standard normal.
    RankOne {
        times: Vec<f64>,
    },
    Fbm {
        inner: FbmSampler,
    },
}

type FbmWork = (crate::sampler::GaussianWork, Vec<f64>, Vec<f64>);

impl ChiNoise {
    fn new(alpha: f64, step: f64, k: usize) -> Result<Self> {
        if alpha == 2.0 {
            let times = (0..=2 * k).map(|i| (i as f64 - k as f64) * step).collect();
            Ok(ChiNoise::RankOne { times })
        } else {
            Ok(ChiNoise::Fbm {
                inner: FbmSampler::new(alpha / 2.0, step, k, k)?,
            })
        }
    }

    fn name(&self) -> &'static str {
        match self {
            ChiNoise::RankOne { .. } => "rank-one",
            ChiNoise::Fbm { inner } => inner.sampler_name(),
        }
    }

    fn work(&self) -> Option<FbmWork> {
        match self {
            ChiNoise::RankOne { .. } => None,
            ChiNoise::Fbm { inner } => Some(inner.work()),
        }
    }

    /// Fills `a` and `b` with two independent draws of `√2 B(t_j)`.
    fn sample_pair<R: Rng>(
        &self,
        rng: &mut R,
        work: &mut Option<FbmWork>,
        a: &mut [f64],
        b: &mut [f64],
    ) {
        match self {
            ChiNoise::RankOne { times } => {
                for out in [a, b] {
                    let xi: f64 = rng.sample(rand_distr::StandardNormal);
                    let s = std::f64::consts::SQRT_2 * xi;
                    for (v, t) in out.iter_mut().zip(times) {
                        *v = s * t;
                    }
                }
            }
            ChiNoise::Fbm { inner } => {
                inner.sample_pair(rng, work.as_mut().expect("fbm work"), a, b);
                for v in a.iter_mut().chain(b.iter_mut()) {
                    *v *= std::f64::consts::SQRT_2;
                }
            }
        }
    }
}

/// A batch of sampled paths, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathBatch {
    pub times: Vec<f64>,
    pub n_paths: usize,
    pub values: Vec<f64>,
    pub sampler: String,
}

impl PathBatch {
    pub fn path(&self, i: usize) -> &[f64] {
        let n = self.times.len();
        &self.values[i * n..(i + 1) * n]
    }
}

/// Runs `per_path` over `n_paths` paths of `√2 B` on the symmetric grid
/// `−k..=k`, in parallel work units, returning per-unit accumulators in
/// unit order.
fn for_each_path<A, F>(
    alpha: f64,
    step: f64,
    k: usize,
    n_paths: usize,
    seed: u64,
    init: A,
    per_path: F,
) -> Result<(Vec<A>, &'static str)>
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, &[f64], &mut ChaCha8Rng) + Sync,
{
    let noise = ChiNoise::new(alpha, step, k)?;
    let n = 2 * k + 1;
    let units = map_units(n_paths, |unit, size| {
        let mut rng = unit_rng(seed, unit as u64);
        let mut work = noise.work();
        let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
        let mut acc = init.clone();
        let mut done = 0;
        while done < size {
            noise.sample_pair(&mut rng, &mut work, &mut a, &mut b);
            per_path(&mut acc, &a, &mut rng);
            done += 1;
            if done < size {
                per_path(&mut acc, &b, &mut rng);
                done += 1;
            }
        }
        acc
    });
    Ok((units, noise.name()))
}

/// Samples `χ` (or `χ₁`) on the grid of `lps`.
pub fn sample_chi_paths(lps: &LimitProcessSpec, n_paths: usize, seed: u64) -> Result<PathBatch> {
    lps.validate()?;
    if n_paths == 0 {
        return Err(Error::domain("n_paths", 0.0, "must be at least 1"));
    }
    let k = lps.steps();
    let times = lps.times();
    let means: Vec<f64> = times.iter().map(|&t| lps.mean(t)).collect();
    let offset = if lps.two_sided { 0 } else { k };
    if lps.drift == DriftKind::Degenerate || k == 0 {
        return Ok(PathBatch {
            values: vec![0.0; n_paths * times.len()],
            times,
            n_paths,
            sampler: "degenerate".into(),
        });
    }
    let (units, name) = for_each_path(
        lps.alpha,
        lps.grid_step,
        k,
        n_paths,
        seed,
        Vec::new(),
        |acc: &mut Vec<f64>, x, _| {
            acc.extend(x[offset..].iter().zip(&means).map(|(v, m)| v + m));
        },
    )?;
    Ok(PathBatch {
        values: units.concat(),
        times,
        n_paths,
        sampler: name.into(),
    })
}

/// Which Monte Carlo functional is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// `max e^{χ}` directly. Unbiased but with a very heavy right tail.
    Direct,
    /// Shift identity; bounded per-path values.
    #[default]
    Shifted,
}

/// Knobs shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PickandsOptions {
    pub estimator: Estimator,
    /// Re-run at half the grid step and compare.
    pub refine: bool,
    /// Shifts drawn per path by the shifted transition estimator.
    pub shifts_per_path: usize,
}

impl Default for PickandsOptions {
    fn default() -> Self {
        PickandsOptions {
            estimator: Estimator::Shifted,
            refine: false,
            shifts_per_path: 16,
        }
    }
}

/// Which constant an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    HAlphaT,
    HAlpha,
    PAlphaPlusT,
    PAlphaT,
    PAlphaPlus,
    PAlpha,
}

/// Estimate at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonPoint {
    pub t: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Weighted least-squares fit of `H(T)/T = H + c/T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub slope: f64,
    pub residuals: Vec<f64>,
    /// `H(T)/T` is monotone in `T` up to two standard errors per step.
    pub monotone: bool,
}

/// Result of the grid-refinement comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub grid_step: f64,
    pub value: f64,
    pub std_error: f64,
    /// The two grids agree within two combined standard errors.
    pub agrees: bool,
}

/// A Monte Carlo estimate of a Pickands-type constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickandsEstimate {
    pub kind: ConstantKind,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub drift: Option<DriftKind>,
    pub value: f64,
    pub std_error: f64,
    pub paths: usize,
    pub t_schedule: Vec<f64>,
    pub grid_step: f64,
    pub estimator: Estimator,
    pub per_horizon: Vec<HorizonPoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit: Option<FitDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub refinement: Option<Refinement>,
    pub seed: u64,
    pub sampler: String,
    pub flags: Vec<String>,
}

impl PickandsEstimate {
    /// A known constant, with zero error.
    pub fn exact(kind: ConstantKind, alpha: f64, value: f64) -> Self {
        PickandsEstimate {
            kind,
            alpha,
            drift: None,
            value,
            std_error: 0.0,
            paths: 0,
            t_schedule: Vec::new(),
            grid_step: 0.0,
            estimator: Estimator::Direct,
            per_horizon: Vec::new(),
            fit: None,
            refinement: None,
            seed: 0,
            sampler: "closed-form".into(),
            flags: Vec::new(),
        }
    }
}

/// Running sum and sum of squares.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sum: f64,
    sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sq += x * x;
    }

    fn merge(parts: &[Moments]) -> Moments {
        parts.iter().fold(Moments::default(), |a, b| Moments {
            n: a.n + b.n,
            sum: a.sum + b.sum,
            sq: a.sq + b.sq,
        })
    }

    fn mean_se(&self) -> (f64, f64) {
        let mean = self.sum / self.n;
        if self.n < 2.0 {
            return (mean, f64::NAN);
        }
        let var = ((self.sq - self.n * mean * mean) / (self.n - 1.0)).max(0.0);
        (mean, (var / self.n).sqrt())
    }
}

/// Per-path shifted estimator of `H^δ(T)` from `y` on `−K..=K`:
/// `Σ_s max(e^y[s..s+K]) / Σ(e^y[s..s+K])` over all `K + 1` windows.
///
/// Window maxima and sums come from per-block prefix and suffix scans with
/// block length `K + 1`, so every sum adds positive terms only.
#[derive(Clone, Default)]
struct WindowScratch {
    e: Vec<f64>,
    pre_sum: Vec<f64>,
    pre_max: Vec<f64>,
    suf_sum: Vec<f64>,
    suf_max: Vec<f64>,
}

fn shifted_h(y: &[f64], scratch: &mut WindowScratch) -> f64 {
    let n = y.len();
    let len = n.div_ceil(2);
    if len == 1 {
        return 1.0;
    }
    let top = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let WindowScratch {
        e,
        pre_sum,
        pre_max,
        suf_sum,
        suf_max,
    } = scratch;
    e.clear();
    e.extend(y.iter().map(|v| (v - top).exp()));
    for v in [&mut *pre_sum, &mut *pre_max, &mut *suf_sum, &mut *suf_max] {
        v.resize(n, 0.0);
    }
    for i in 0..n {
        if i % len == 0 {
            pre_sum[i] = e[i];
            pre_max[i] = e[i];
        } else {
            pre_sum[i] = pre_sum[i - 1] + e[i];
            pre_max[i] = pre_max[i - 1].max(e[i]);
        }
    }
    for i in (0..n).rev() {
        if i == n - 1 || (i + 1) % len == 0 {
            suf_sum[i] = e[i];
            suf_max[i] = e[i];
        } else {
            suf_sum[i] = suf_sum[i + 1] + e[i];
            suf_max[i] = suf_max[i + 1].max(e[i]);
        }
    }
    let mut acc = 0.0;
    for s in 0..len {
        let end = s + len - 1;
        let (m, t) = if s % len == 0 {
            (pre_max[end], pre_sum[end])
        } else {
            (suf_max[s].max(pre_max[end]), suf_sum[s] + pre_sum[end])
        };
        acc += m / t;
    }
    acc
}

fn check_common(alpha: f64, t: f64, grid_step: f64, n_paths: usize) -> Result<()> {
    LimitProcessSpec {
        alpha,
        drift: DriftKind::Pickands,
        horizon: t,
        grid_step,
        two_sided: true,
    }
    .validate()?;
    if n_paths < 2 {
        return Err(Error::domain(
            "n_paths",
            n_paths as f64,
            "need at least 2 paths",
        ));
    }
    Ok(())
}

/// Raw `(mean, se, sampler)` of the `H^δ(T)` estimator.
fn h_t_raw(
    alpha: f64,
    t: f64,
    step: f64,
    n_paths: usize,
    seed: u64,
    est: Estimator,
) -> Result<(f64, f64, &'static str)> {
    let k = (t / step).round() as usize;
    if k == 0 {
        return Ok((1.0, 0.0, "degenerate"));
    }
    let drift: Vec<f64> = (0..=2 * k)
        .map(|i| -((i as f64 - k as f64) * step).abs().powf(alpha))
        .collect();
    let init = (Moments::default(), WindowScratch::default(), Vec::new());
    let (units, name) = for_each_path(alpha, step, k, n_paths, seed, init, |acc, x, _| {
        let (m, scratch, y) = acc;
        y.clear();
        y.extend(x.iter().zip(&drift).map(|(a, b)| a + b));
        let v = match est {
            Estimator::Shifted => shifted_h(y, scratch),
            Estimator::Direct => y[k..]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
                .exp(),
        };
        m.push(v);
    })?;
    let parts: Vec<Moments> = units.into_iter().map(|u| u.0).collect();
    let (mean, se) = Moments::merge(&parts).mean_se();
    Ok((mean, se, name))
}

fn refinement(
    alpha: f64,
    t: f64,
    step: f64,
    base: (f64, f64),
    n_paths: usize,
    seed: u64,
    est: Estimator,
) -> Result<Refinement> {
    let fine = step / 2.0;
    let (v, se, _) = h_t_raw(alpha, t, fine, n_paths, seed ^ 0x5DEECE66D, est)?;
    Ok(Refinement {
        grid_step: fine,
        value: v,
        std_error: se,
        agrees: (v - base.0).abs() <= 2.0 * (se * se + base.1 * base.1).sqrt(),
    })
}

/// `H_α(T) = E exp(max_{[0,T]} χ)` on the grid of step `grid_step`.
pub fn estimate_h_alpha_t(
    alpha: f64,
    t: f64,
    grid_step: f64,
    n_paths: usize,
    seed: u64,
    opts: &PickandsOptions,
) -> Result<PickandsEstimate> {
    check_common(alpha, t, grid_step, n_paths)?;
    let (value, std_error, sampler) = h_t_raw(alpha, t, grid_step, n_paths, seed, opts.estimator)?;
    let mut flags = Vec::new();
    let refinement = if opts.refine && t > 0.0 {
        let r = refinement(
            alpha,
            t,
            grid_step,
            (value, std_error),
            n_paths,
            seed,
            opts.estimator,
        )?;
        if !r.agrees {
            flags.push("grid-refinement-disagrees".to_string());
        }
        Some(r)
    } else {
        None
    };
    Ok(PickandsEstimate {
        kind: ConstantKind::HAlphaT,
        alpha,
        drift: Some(DriftKind::Pickands),
        value,
        std_error,
        paths: n_paths,
        t_schedule: vec![t],
        grid_step,
        estimator: opts.estimator,
        per_horizon: vec![HorizonPoint {
            t,
            value,
            std_error,
        }],
        fit: None,
        refinement,
        seed,
        sampler: sampler.into(),
        flags,
    })
}

/// Seed for the `i`-th horizon of a schedule.
fn horizon_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn check_schedule(ts: &[f64], min_len: usize) -> Result<()> {
    if ts.len() < min_len {
        return Err(Error::Spec(format!(
            "T schedule needs at least {min_len} entries"
        )));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) || !(ts[0] > 0.0) {
        return Err(Error::Spec(
            "T schedule must be positive and increasing".into(),
        ));
    }
    Ok(())
}

/// `H_α = lim H_α(T)/T` by a weighted fit of `H(T)/T = H + c/T`.
pub fn estimate_h_alpha(
    alpha: f64,
    t_schedule: &[f64],
    grid_step: f64,
    n_paths: usize,
    seed: u64,
    opts: &PickandsOptions,
) -> Result<PickandsEstimate> {
    check_schedule(t_schedule, 3)?;
    let mut points = Vec::new();
    let mut sampler = "";
    for (i, &t) in t_schedule.iter().enumerate() {
        check_common(alpha, t, grid_step, n_paths)?;
        let (v, se, name) = h_t_raw(
            alpha,
            t,
            grid_step,
            n_paths,
            horizon_seed(seed, i),
            opts.estimator,
        )?;
        sampler = name;
        points.push(HorizonPoint {
            t,
            value: v,
            std_error: se,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.t).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value / p.t).collect();
    let ses: Vec<f64> = points.iter().map(|p| p.std_error / p.t).collect();
    let ws: Vec<f64> = if ses.iter().all(|&s| s > 0.0) {
        ses.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; ses.len()]
    };
    let (sw, sx, sy, sxx, sxy) =
        xs.iter()
            .zip(&ys)
            .zip(&ws)
            .fold((0.0, 0.0, 0.0, 0.0, 0.0), |a, ((x, y), w)| {
                (
                    a.0 + w,
                    a.1 + w * x,
                    a.2 + w * y,
                    a.3 + w * x * x,
                    a.4 + w * x * y,
                )
            });
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / sw;
    // (X'WX)^{-1}_{00}; only meaningful with inverse-variance weights.
    let mut std_error = (sxx / det).sqrt();
    if ses.iter().any(|&s| s <= 0.0) {
        std_error = 0.0;
    }
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - intercept - slope * x)
        .collect();
    let mut flags = Vec::new();
    let steps: Vec<f64> = ys
        .windows(2)
        .zip(ses.windows(2))
        .map(|(y, s)| {
            let d = y[1] - y[0];
            let tol = 2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt();
            if d > tol {
                1.0
            } else if d < -tol {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    let monotone = !(steps.contains(&1.0) && steps.contains(&-1.0));
    if !monotone {
        flags.push("non-monotone-H(T)/T".to_string());
    }
    let bound = ys
        .iter()
        .zip(&ses)
        .map(|(y, s)| y + 3.0 * s)
        .fold(f64::INFINITY, f64::min);
    let mut value = intercept;
    if !(value > 0.0) {
        flags.push("nonpositive-intercept-using-largest-T".to_string());
        value = ys[ys.len() - 1];
        std_error = ses[ses.len() - 1];
    }
    if value > bound {
        flags.push("exceeds-min-H(T)/T-bound".to_string());
    }
    let refinement = if opts.refine {
        let last = points[points.len() - 1];
        let r = refinement(
            alpha,
            last.t,
            grid_step,
            (last.value, last.std_error),
            n_paths,
            seed,
            opts.estimator,
        )?;
        if !r.agrees {
            flags.push("grid-refinement-disagrees".to_string());
        }
        Some(r)
    } else {
        None
    };
    Ok(PickandsEstimate {
        kind: ConstantKind::HAlpha,
        alpha,
        drift: Some(DriftKind::Pickands),
        value,
        std_error,
        paths: n_paths,
        t_schedule: t_schedule.to_vec(),
        grid_step,
        estimator: opts.estimator,
        per_horizon: points,
        fit: Some(FitDiagnostics {
            slope,
            residuals,
            monotone,
        }),
        refinement,
        seed,
        sampler: sampler.into(),
        flags,
    })
}

/// Transition constants estimated from the same paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionConstants {
    /// `P_α`, two-sided `[−T, T]`.
    pub p_alpha: PickandsEstimate,
    /// `P_α⁺`, one-sided `[0, T]`.
    pub p_alpha_plus: PickandsEstimate,
}

/// Per-path values of `(P(T), P⁺(T))`.
struct TransitionPath<'a> {
    k: usize,
    /// `h₁` part of the drift at offsets `−K..=K`, `∞` on frozen sides.
    h1: &'a [f64],
    /// Cumulative shift weights `e^{−h₁}` over the two-sided and one-sided windows.
    cum_two: &'a [f64],
    cum_one: &'a [f64],
    shifts: usize,
}

impl TransitionPath<'_> {
    /// `max_{j∈W} e^{y(j−k) − h₁(j)} / Σ_{j∈W} e^{y(j−k) − h₁(j)}` for the
    /// window `W = lo..=K` (offsets), with `y` indexed from `−2K`.
    fn ratio(&self, y: &[f64], lo: isize, k: isize) -> f64 {
        let kk = self.k as isize;
        let mut top = f64::NEG_INFINITY;
        for j in lo..=kk {
            let v = y[(j - k + 2 * kk) as usize] - self.h1[(j + kk) as usize];
            top = top.max(v);
        }
        let mut sum = 0.0;
        for j in lo..=kk {
            let v = y[(j - k + 2 * kk) as usize] - self.h1[(j + kk) as usize];
            sum += (v - top).exp();
        }
        1.0 / sum
    }

    /// Draws shifts by stratified inverse-CDF sampling from `e^{−h₁}` and
    /// averages the window ratios.
    fn shifted<R: Rng>(&self, y: &[f64], lo: isize, cum: &[f64], rng: &mut R) -> f64 {
        let total = cum[cum.len() - 1];
        let u0: f64 = rng.random();
        let mut acc = 0.0;
        for i in 0..self.shifts {
            let target = (i as f64 + u0) / self.shifts as f64 * total;
            let idx = cum.partition_point(|&c| c <= target).min(cum.len() - 1);
            acc += self.ratio(y, lo, lo + idx as isize);
        }
        total * acc / self.shifts as f64
    }

    fn direct(&self, y: &[f64], lo: isize) -> f64 {
        let kk = self.k as isize;
        (lo..=kk)
            .map(|j| y[(j + 2 * kk) as usize] - self.h1[(j + kk) as usize])
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    }
}

/// Raw `((P, se), (P⁺, se), sampler)` at one horizon.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn p_t_raw(
    alpha: f64,
    bp: f64,
    bm: f64,
    t: f64,
    step: f64,
    n_paths: usize,
    seed: u64,
    opts: &PickandsOptions,
) -> Result<((f64, f64), (f64, f64), &'static str)> {
    let k = (t / step).round() as usize;
    if k == 0 {
        return Ok(((1.0, 0.0), (1.0, 0.0), "degenerate"));
    }
    let h1: Vec<f64> = (0..=2 * k)
        .map(|i| {
            let tt = (i as f64 - k as f64) * step;
            if tt == 0.0 {
                return 0.0;
            }
            let b = if tt > 0.0 { bp } else { bm };
            if b.is_infinite() {
                f64::INFINITY
            } else {
                b * tt.abs().powf(alpha)
            }
        })
        .collect();
    let cumulative = |from: usize| {
        let mut c = 0.0;
        h1[from..]
            .iter()
            .map(|h| {
                c += (-h).exp();
                c
            })
            .collect::<Vec<f64>>()
    };
    let cum_two = cumulative(0);
    let cum_one = cumulative(k);
    let tp = TransitionPath {
        k,
        h1: &h1,
        cum_two: &cum_two,
        cum_one: &cum_one,
        shifts: opts.shifts_per_path.max(1),
    };
    // y on −2K..=2K: √2 B(t) − |t|^α.
    let drift: Vec<f64> = (0..=4 * k)
        .map(|i| -((i as f64 - 2.0 * k as f64) * step).abs().powf(alpha))
        .collect();
    let init = (Moments::default(), Moments::default(), Vec::new());
    let (units, name) = for_each_path(alpha, step, 2 * k, n_paths, seed, init, |acc, x, rng| {
        let y = &mut acc.2;
        y.clear();
        y.extend(x.iter().zip(&drift).map(|(a, b)| a + b));
        let (two, one) = match opts.estimator {
            Estimator::Direct => (tp.direct(y, -(k as isize)), tp.direct(y, 0)),
            Estimator::Shifted => (
                tp.shifted(y, -(k as isize), tp.cum_two, rng),
                tp.shifted(y, 0, tp.cum_one, rng),
            ),
        };
        acc.0.push(two);
        acc.1.push(one);
    })?;
    let two: Vec<Moments> = units.iter().map(|u| u.0).collect();
    let one: Vec<Moments> = units.iter().map(|u| u.1).collect();
    Ok((
        Moments::merge(&two).mean_se(),
        Moments::merge(&one).mean_se(),
        name,
    ))
}

/// `P_α(T)`, `P_α⁺(T)` over a schedule; the limits are the values at the
/// largest horizon, flagged if the last two horizons disagree by more than
/// three combined standard errors.
#[allow(clippy::too_many_arguments)]
pub fn estimate_p_alpha(
    alpha: f64,
    b_plus: f64,
    b_minus: f64,
    t_schedule: &[f64],
    grid_step: f64,
    n_paths: usize,
    seed: u64,
    opts: &PickandsOptions,
) -> Result<TransitionConstants> {
    check_schedule(t_schedule, 1)?;
    let drift = DriftKind::Transition { b_plus, b_minus };
    let single = t_schedule.len() == 1;
    let kinds = if single {
        (ConstantKind::PAlphaT, ConstantKind::PAlphaPlusT)
    } else {
        (ConstantKind::PAlpha, ConstantKind::PAlphaPlus)
    };
    let make = |kind, per: Vec<HorizonPoint>, sampler: &str, flags: Vec<String>| {
        let last = per[per.len() - 1];
        PickandsEstimate {
            kind,
            alpha,
            drift: Some(drift),
            value: last.value,
            std_error: last.std_error,
            paths: n_paths,
            t_schedule: t_schedule.to_vec(),
            grid_step,
            estimator: opts.estimator,
            per_horizon: per,
            fit: None,
            refinement: None,
            seed,
            sampler: sampler.into(),
            flags,
        }
    };
    for &t in t_schedule {
        LimitProcessSpec {
            alpha,
            drift,
            horizon: 2.0 * t,
            grid_step,
            two_sided: true,
        }
        .validate()?;
    }
    if b_plus.is_infinite() && b_minus.is_infinite() {
        let per: Vec<HorizonPoint> = t_schedule
            .iter()
            .map(|&t| HorizonPoint {
                t,
                value: 1.0,
                std_error: 0.0,
            })
            .collect();
        return Ok(TransitionConstants {
            p_alpha: make(kinds.0, per.clone(), "degenerate", Vec::new()),
            p_alpha_plus: make(kinds.1, per, "degenerate", Vec::new()),
        });
    }
    let (mut two, mut one) = (Vec::new(), Vec::new());
    let mut sampler = "";
    for (i, &t) in t_schedule.iter().enumerate() {
        let (p, pp, name) = p_t_raw(
            alpha,
            b_plus,
            b_minus,
            t,
            grid_step,
            n_paths,
            horizon_seed(seed, i),
            opts,
        )?;
        sampler = name;
        two.push(HorizonPoint {
            t,
            value: p.0,
            std_error: p.1,
        });
        one.push(HorizonPoint {
            t,
            value: pp.0,
            std_error: pp.1,
        });
    }
    let converged = |per: &[HorizonPoint]| {
        if per.len() < 2 {
            return Vec::new();
        }
        let (a, b) = (per[per.len() - 2], per[per.len() - 1]);
        if (a.value - b.value).abs() > 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt() {
            vec!["not-converged-in-T".to_string()]
        } else {
            Vec::new()
        }
    };
    let (f2, f1) = (converged(&two), converged(&one));
    Ok(TransitionConstants {
        p_alpha: make(kinds.0, two, sampler, f2),
        p_alpha_plus: make(kinds.1, one, sampler, f1),
    })
}
