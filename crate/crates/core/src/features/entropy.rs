//! Tsallis entropy of value histograms and its sliding-window field.

use serde::{Deserialize, Serialize};

use super::Binning;
use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyParams {
    /// Entropic index; must differ from 1.
    pub q: f64,
    pub bins: usize,
    pub window_side: usize,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self {
            q: 0.8,
            bins: 20,
            window_side: 11,
        }
    }
}

impl EntropyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0) || self.q == 1.0 {
            return Err(Error::param("q", "must be positive and different from 1"));
        }
        if self.bins < 2 {
            return Err(Error::param("bins", "must be at least 2"));
        }
        if self.window_side == 0 || self.window_side.is_multiple_of(2) {
            return Err(Error::param("entropy_window", "must be odd"));
        }
        Ok(())
    }
}

/// `(1 - Σ p_i^q) / (q - 1)` for the histogram `counts`. An empty histogram
/// has zero entropy.
pub fn tsallis_from_counts(counts: &[u32], q: f64) -> f64 {
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let sum: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| (f64::from(c) / n).powf(q))
        .sum();
    ((1.0 - sum) / (q - 1.0)).max(0.0)
}

/// Tsallis entropy of `values` binned over the fixed global `range`.
pub fn tsallis_entropy(values: &[f64], params: &EntropyParams, range: (f64, f64)) -> f64 {
    let counts = Binning::new(range, params.bins).histogram(values);
    tsallis_from_counts(&counts, params.q)
}

/// Per-pixel entropy over a square window truncated at the border. Bins span
/// the global range of `cv`.
pub fn entropy_field(cv: &ScalarField, params: &EntropyParams) -> ScalarField {
    let (w, h) = (cv.width(), cv.height());
    let binning = Binning::new(cv.min_max(), params.bins);
    let bin_of: Vec<usize> = cv.values().iter().map(|&v| binning.index(v)).collect();
    let r = params.window_side / 2;
    let mut out = vec![0.0; w * h];
    let mut counts = vec![0u32; params.bins];

    for y in 0..h {
        let y0 = y.saturating_sub(r);
        let y1 = (y + r).min(h - 1);
        counts.iter_mut().for_each(|c| *c = 0);
        // prime with columns [0, r)
        for x in 0..r.min(w) {
            for yy in y0..=y1 {
                counts[bin_of[yy * w + x]] += 1;
            }
        }
        for x in 0..w {
            let incoming = x + r;
            if incoming < w {
                for yy in y0..=y1 {
                    counts[bin_of[yy * w + incoming]] += 1;
                }
            }
            if x > r {
                let outgoing = x - r - 1;
                for yy in y0..=y1 {
                    counts[bin_of[yy * w + outgoing]] -= 1;
                }
            }
            out[y * w + x] = tsallis_from_counts(&counts, params.q);
        }
    }
    ScalarField::new(w, h, out)
}
