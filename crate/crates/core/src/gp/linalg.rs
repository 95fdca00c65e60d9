use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

/// Largest diagonal regularization the jitter ladder will try.
pub const MAX_JITTER: f64 = 1e-6;

/// Cholesky factor of `K + jitter·I` together with the jitter that succeeded.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub chol: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

impl Factorization {
    /// `log |K + jitter·I|` from the triangular factor.
    pub fn log_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// Squared ratio of the largest to the smallest diagonal entry of the
    /// Cholesky factor. A cheap lower bound on the 2-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let diag = self.chol.l_dirty().diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| (lo.min(*d), hi.max(*d)));
        (hi / lo).powi(2)
    }
}

/// Factorize `k + noise·I`, escalating the diagonal term ×10 up to
/// [`MAX_JITTER`] while the factorization fails.
pub fn factorize_with_jitter(k: &DMatrix<f64>, noise: f64) -> Result<Factorization> {
    let mut ladder = Vec::new();
    let mut jitter = noise;
    loop {
        ladder.push(jitter);
        let mut m = k.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(m) {
            if chol.l_dirty().diagonal().iter().all(|d| d.is_finite() && *d > 0.0) {
                if ladder.len() > 1 {
                    log::debug!("factorization succeeded after jitter escalation {ladder:?}");
                }
                return Ok(Factorization { chol, jitter });
            }
        }
        let next = if jitter > 0.0 { jitter * 10.0 } else { 1e-12 };
        if next > MAX_JITTER * (1.0 + 1e-9) {
            return Err(Error::IllConditioned { jitter_ladder: ladder });
        }
        log::debug!("Cholesky failed with jitter {jitter:e}; retrying with {next:e}");
        jitter = next;
    }
}
