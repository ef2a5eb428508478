//! Exact Gaussian samplers on regular grids: circulant embedding of a
//! stationary covariance, with a dense Cholesky fallback, and fractional
//! Brownian motion built from fractional Gaussian noise.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_with_jitter, Factor};

/// Relative size below which negative circulant eigenvalues are treated as
/// rounding and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-10;
/// Relative size below which eigenvalues are dropped altogether.
pub const DROP_TOL: f64 = 1e-13;
/// Largest padding factor tried before giving up on the embedding.
pub const MAX_PADDING: usize = 8;

/// Circulant embedding of a stationary covariance `c(k)`, `k = 0..n`.
pub struct Circulant {
    n: usize,
    m: usize,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    /// Embedding size relative to the minimal one.
    pub padding: usize,
    /// Number of slightly negative eigenvalues set to zero.
    pub clamped: usize,
}

/// Reusable buffers for [`Circulant::sample_pair`].
pub struct CirculantWork {
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Circulant {
    /// Builds the embedding for `n` points with lag covariance `cov(k)`,
    /// padding up to [`MAX_PADDING`] times if the minimal embedding has
    /// significantly negative eigenvalues.
    pub fn new(cov: impl Fn(usize) -> f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Sampler("empty grid".into()));
        }
        let base = (2 * n.saturating_sub(1)).max(2).next_power_of_two();
        let mut planner = FftPlanner::new();
        let mut padding = 1;
        loop {
            let m = base * padding;
            let fft = planner.plan_fft_forward(m);
            let mut row: Vec<Complex<f64>> = (0..m)
                .map(|j| Complex::new(cov(j.min(m - j)), 0.0))
                .collect();
            fft.process(&mut row);
            let eig: Vec<f64> = row.iter().map(|c| c.re).collect();
            let max = eig.iter().cloned().fold(0.0, f64::max);
            let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(max > 0.0) {
                return Err(Error::Sampler("covariance has no positive spectrum".into()));
            }
            if min >= -CLAMP_TOL * max {
                let clamped = eig.iter().filter(|&&l| l < 0.0).count();
                let scale = eig
                    .iter()
                    .map(|&l| {
                        if l > DROP_TOL * max {
                            (l / m as f64).sqrt()
                        } else {
                            0.0
                        }
                    })
                    .collect();
                return Ok(Circulant {
                    n,
                    m,
                    scale,
                    fft,
                    padding,
                    clamped,
                });
            }
            if padding >= MAX_PADDING {
                return Err(Error::Sampler(format!(
                    "circulant embedding has negative eigenvalue {min:e} (max {max:e}) at padding {padding}"
                )));
            }
            padding *= 2;
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn embedding_size(&self) -> usize {
        self.m
    }

    pub fn work(&self) -> CirculantWork {
        CirculantWork {
            buf: vec![Complex::new(0.0, 0.0); self.m],
            scratch: vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()],
        }
    }

    /// Writes two independent samples into `a` and `b` (each of length `n`).
    pub fn sample_pair<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        work: &mut CirculantWork,
        a: &mut [f64],
        b: &mut [f64],
    ) {
        for (z, &s) in work.buf.iter_mut().zip(&self.scale) {
            *z = if s > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(s * re, s * im)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        self.fft
            .process_with_scratch(&mut work.buf, &mut work.scratch);
        for i in 0..self.n {
            a[i] = work.buf[i].re;
            b[i] = work.buf[i].im;
        }
    }
}

/// Either an embedding or a dense factor of the same covariance.
pub enum Gaussian {
    Circulant(Circulant),
    Dense(Factor),
}

/// Reusable buffers for [`Gaussian::sample_pair`].
pub enum GaussianWork {
    Circulant(CirculantWork),
    Dense(Vec<f64>),
}

impl Gaussian {
    /// Stationary vector with lag covariance `cov(k)` on `n` points:
    /// circulant embedding first, dense factorization of the Toeplitz
    /// matrix if the embedding fails.
    pub fn stationary(cov: impl Fn(usize) -> f64, n: usize) -> Result<Self> {
        match Circulant::new(&cov, n) {
            Ok(c) => Ok(Gaussian::Circulant(c)),
            Err(_) => Self::dense(DMatrix::from_fn(n, n, |i, j| cov(i.abs_diff(j)))),
        }
    }

    pub fn dense(cov: DMatrix<f64>) -> Result<Self> {
        match cholesky_with_jitter(&cov) {
            Ok(f) => Ok(Gaussian::Dense(f)),
            Err(e) => Err(Error::Sampler(format!(
                "circulant embedding and dense factorization both failed: {e}"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Gaussian::Circulant(c) => c.len(),
            Gaussian::Dense(f) => f.dim(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gaussian::Circulant(_) => "circulant",
            Gaussian::Dense(_) => "dense",
        }
    }

    pub fn work(&self) -> GaussianWork {
        match self {
            Gaussian::Circulant(c) => GaussianWork::Circulant(c.work()),
            Gaussian::Dense(f) => GaussianWork::Dense(vec![0.0; f.dim()]),
        }
    }

    pub fn sample_pair<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        work: &mut GaussianWork,
        a: &mut [f64],
        b: &mut [f64],
    ) {
        match (self, work) {
            (Gaussian::Circulant(c), GaussianWork::Circulant(w)) => c.sample_pair(rng, w, a, b),
            (Gaussian::Dense(f), GaussianWork::Dense(z)) => {
                for out in [a, b] {
                    for v in z.iter_mut() {
                        *v = rng.sample(StandardNormal);
                    }
                    f.correlate(z, out);
                }
            }
            _ => unreachable!("work buffer does not match sampler"),
        }
    }
}

/// Autocovariance of fractional Gaussian noise with Hurst index `h` and
/// unit step: `(|k+1|^{2h} − 2|k|^{2h} + |k−1|^{2h}) / 2`.
pub fn fgn_autocov(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Fractional Brownian motion on the grid `t_j = j δ`, `j = −k_left ..= k_right`,
/// pinned to zero at `t = 0`.
pub struct FbmSampler {
    hurst: f64,
    step: f64,
    k_left: usize,
    k_right: usize,
    inner: Gaussian,
}

impl FbmSampler {
    pub fn new(hurst: f64, step: f64, k_left: usize, k_right: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst <= 1.0) {
            return Err(Error::domain("hurst", hurst, "must lie in (0, 1]"));
        }
        let n_incr = k_left + k_right;
        if n_incr == 0 {
            return Err(Error::Sampler("fBm grid has a single point".into()));
        }
        let inner = match Circulant::new(|k| fgn_autocov(hurst, k), n_incr) {
            Ok(c) => Gaussian::Circulant(c),
            Err(_) => {
                // Direct factorization of the fBm covariance at the nonzero points.
                let ts: Vec<f64> = (0..=n_incr)
                    .map(|i| i as f64 - k_left as f64)
                    .filter(|&t| t != 0.0)
                    .collect();
                let e = 2.0 * hurst;
                let cov = DMatrix::from_fn(ts.len(), ts.len(), |i, j| {
                    0.5 * (ts[i].abs().powf(e) + ts[j].abs().powf(e)
                        - (ts[i] - ts[j]).abs().powf(e))
                });
                Gaussian::dense(cov)?
            }
        };
        Ok(FbmSampler {
            hurst,
            step,
            k_left,
            k_right,
            inner,
        })
    }

    /// Number of grid points including `t = 0`.
    pub fn points(&self) -> usize {
        self.k_left + self.k_right + 1
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.points())
            .map(|i| (i as f64 - self.k_left as f64) * self.step)
            .collect()
    }

    pub fn sampler_name(&self) -> &'static str {
        self.inner.name()
    }

    pub fn work(&self) -> (GaussianWork, Vec<f64>, Vec<f64>) {
        let n = self.inner.len();
        (self.inner.work(), vec![0.0; n], vec![0.0; n])
    }

    /// Writes two independent paths `B_H(t_j)` into `a` and `b`.
    pub fn sample_pair<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        work: &mut (GaussianWork, Vec<f64>, Vec<f64>),
        a: &mut [f64],
        b: &mut [f64],
    ) {
        let (w, za, zb) = work;
        self.inner.sample_pair(rng, w, za, zb);
        let scale = self.step.powf(self.hurst);
        let kl = self.k_left;
        match self.inner {
            Gaussian::Circulant(_) => {
                for (z, out) in [(&*za, &mut *a), (&*zb, &mut *b)] {
                    // Cumulative sums of the noise, re-centred at t = 0.
                    out[0] = 0.0;
                    for i in 0..z.len() {
                        out[i + 1] = out[i] + scale * z[i];
                    }
                    let centre = out[kl];
                    for v in out.iter_mut() {
                        *v -= centre;
                    }
                    out[kl] = 0.0;
                }
            }
            Gaussian::Dense(_) => {
                for (z, out) in [(&*za, &mut *a), (&*zb, &mut *b)] {
                    let mut it = z.iter();
                    for (i, v) in out.iter_mut().enumerate() {
                        *v = if i == kl {
                            0.0
                        } else {
                            scale * it.next().unwrap()
                        };
                    }
                }
            }
        }
    }
}
