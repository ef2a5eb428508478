//! Dense covariance factorization with diagonal jitter.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

/// Jitter ladder added to the diagonal before giving up on a factorization.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8];

/// Cholesky factor of a covariance matrix together with the jitter that was
/// needed to obtain it.
pub struct Factor {
    pub chol: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Writes `L z` into `out`, where `z` holds independent standard normals.
    pub fn correlate(&self, z: &[f64], out: &mut [f64]) {
        let l = self.chol.l_dirty();
        let n = l.nrows();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += l[(i, j)] * z[j];
            }
            out[i] = acc;
        }
    }
}

/// Factorizes `cov`, walking up [`JITTER_LADDER`] until it succeeds.
pub fn cholesky_with_jitter(cov: &DMatrix<f64>) -> Result<Factor> {
    for &jitter in JITTER_LADDER.iter() {
        let mut m = cov.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(m) {
            // nalgebra accepts tiny negative pivots as NaN-free but the factor
            // must still be finite.
            if chol.l_dirty().iter().all(|v| v.is_finite()) {
                return Ok(Factor { chol, jitter });
            }
        }
    }
    Err(Error::NotPositiveDefinite {
        jitter: *JITTER_LADDER.last().unwrap(),
    })
}
