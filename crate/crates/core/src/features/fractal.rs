//! Differential box counting and the desired-region-count estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;

const BOX_SIZES: [usize; 8] = [2, 3, 4, 6, 8, 12, 16, 32];
const MIN_SIDE: usize = 16;
/// Gray-level extent of a field normalized into [0, 255].
const GRAY_LEVELS: f64 = 256.0;

/// Fractal dimension of a surface whose height is the field value.
///
/// Differential box counting: for each box size `s` the field is tiled with
/// `s x s` blocks, each block's value span is covered by boxes of height
/// `s · 256 / min(width, height)`, and `ln N(s)` is regressed on `ln(1/s)`.
/// Counts are rescaled to the full field area when `s` does not divide the
/// field. The result is clamped to [2, 3]. Expects values in [0, 255].
pub fn fractal_dimension(field: &ScalarField) -> Result<f64> {
    let (w, h) = (field.width(), field.height());
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(Error::InsufficientData {
            width: w,
            height: h,
            min: MIN_SIDE,
        });
    }
    let side = w.min(h);
    let mut points = Vec::new();
    for &s in BOX_SIZES.iter().filter(|&&s| s <= side / 2) {
        let box_height = s as f64 * GRAY_LEVELS / side as f64;
        let (nx, ny) = (w / s, h / s);
        let mut count = 0.0;
        for by in 0..ny {
            for bx in 0..nx {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for y in by * s..(by + 1) * s {
                    for x in bx * s..(bx + 1) * s {
                        let v = field.get(x, y);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                count += (hi / box_height).floor() - (lo / box_height).floor() + 1.0;
            }
        }
        let covered = (nx * ny * s * s) as f64;
        count *= (w * h) as f64 / covered;
        points.push(((1.0 / s as f64).ln(), count.ln()));
    }
    Ok(least_squares_slope(&points).clamp(2.0, 3.0))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    pub alpha: f64,
    pub kappa: f64,
}

impl Default for ComplexityParams {
    fn default() -> Self {
        Self {
            alpha: 170.0,
            kappa: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    /// Fractal dimension of the enhanced-gradient image.
    pub f_eg: f64,
    /// Fractal dimension of the entropy image.
    pub f_te: f64,
    pub f_a: f64,
    pub desired_regions: usize,
}

/// `α (F_A - 2)^κ` rounded half-up, at least 1.
pub fn desired_region_count(f_eg: f64, f_te: f64, alpha: f64, kappa: f64) -> usize {
    let f_a = 0.5 * (f_eg + f_te);
    let raw = alpha * (f_a - 2.0).max(0.0).powf(kappa);
    ((raw + 0.5).floor() as usize).max(1)
}

/// Fractal dimensions of the (normalized) enhanced-gradient and entropy
/// images and the resulting desired region count.
pub fn estimate_complexity(
    eg: &ScalarField,
    entropy: &ScalarField,
    params: &ComplexityParams,
) -> Result<ComplexityEstimate> {
    let f_eg = fractal_dimension(&eg.normalized())?;
    let f_te = fractal_dimension(&entropy.normalized())?;
    Ok(ComplexityEstimate {
        f_eg,
        f_te,
        f_a: 0.5 * (f_eg + f_te),
        desired_regions: desired_region_count(f_eg, f_te, params.alpha, params.kappa),
    })
}
