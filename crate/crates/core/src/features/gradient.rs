//! Local-histogram-difference salient edges and the enhanced gradient.

use serde::{Deserialize, Serialize};

use super::Binning;
use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientParams {
    /// Side of the square observation window, odd.
    pub window_side: usize,
    pub bins: usize,
    /// Gradients at or below this offset are suppressed to zero.
    pub delta: f64,
    /// Exponent of the enhancement power law.
    pub gamma: f64,
}

impl Default for GradientParams {
    fn default() -> Self {
        Self {
            window_side: 11,
            bins: 20,
            delta: 0.2,
            gamma: 4.0,
        }
    }
}

impl GradientParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_side < 3 || self.window_side.is_multiple_of(2) {
            return Err(Error::param("gradient_window", "must be odd and at least 3"));
        }
        if self.bins < 2 {
            return Err(Error::param("bins", "must be at least 2"));
        }
        if !(0.0..2.0).contains(&self.delta) {
            return Err(Error::param("delta", "must lie in [0, 2)"));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::param("gamma", "must be positive"));
        }
        Ok(())
    }
}

/// L1 distance between the normalized histograms of two samples.
///
/// Returns a value in [0, 2]. An empty sample has no histogram, so the
/// difference is taken as 0.
pub fn histogram_difference(u: &[f64], v: &[f64], bins: usize, range: (f64, f64)) -> f64 {
    if u.is_empty() || v.is_empty() {
        return 0.0;
    }
    let binning = Binning::new(range, bins);
    let hu = binning.histogram(u);
    let hv = binning.histogram(v);
    l1_normalized(&hu, u.len() as f64, &hv, v.len() as f64)
}

#[inline]
fn l1_normalized(hu: &[u32], nu: f64, hv: &[u32], nv: f64) -> f64 {
    hu.iter()
        .zip(hv)
        .map(|(&a, &b)| (f64::from(a) / nu - f64::from(b) / nv).abs())
        .sum()
}

/// Gradient `G` at every pixel: the largest histogram difference over four
/// symmetric half-window pairs, split by the vertical midline, the
/// horizontal midline, the main diagonal and the anti-diagonal.
///
/// Pixels lying on a splitting line belong to neither half. Windows are
/// truncated at the image border; a pair with an empty half contributes 0.
/// Bins span the global range of `cv`.
pub fn lhdsee_gradient(cv: &ScalarField, params: &GradientParams) -> ScalarField {
    let (w, h) = (cv.width(), cv.height());
    let bins = params.bins;
    let binning = Binning::new(cv.min_max(), bins);
    let bin_of: Vec<u16> = cv.values().iter().map(|&v| binning.index(v) as u16).collect();
    let r = (params.window_side / 2) as isize;

    // counts[pair][side][bin]
    let mut counts = vec![0u32; 8 * bins];
    let mut totals: [u32; 8];
    let mut out = Vec::with_capacity(w * h);

    for y in 0..h as isize {
        for x in 0..w as isize {
            counts.iter_mut().for_each(|c| *c = 0);
            totals = [0; 8];
            let y0 = (y - r).max(0);
            let y1 = (y + r).min(h as isize - 1);
            let x0 = (x - r).max(0);
            let x1 = (x + r).min(w as isize - 1);
            for yy in y0..=y1 {
                let dy = yy - y;
                let row = yy as usize * w;
                for xx in x0..=x1 {
                    let dx = xx - x;
                    let b = bin_of[row + xx as usize] as usize;
                    let mut add = |slot: usize| {
                        counts[slot * bins + b] += 1;
                        totals[slot] += 1;
                    };
                    match dx.cmp(&0) {
                        std::cmp::Ordering::Less => add(0),
                        std::cmp::Ordering::Greater => add(1),
                        std::cmp::Ordering::Equal => {}
                    }
                    match dy.cmp(&0) {
                        std::cmp::Ordering::Less => add(2),
                        std::cmp::Ordering::Greater => add(3),
                        std::cmp::Ordering::Equal => {}
                    }
                    match dy.cmp(&dx) {
                        std::cmp::Ordering::Less => add(4),
                        std::cmp::Ordering::Greater => add(5),
                        std::cmp::Ordering::Equal => {}
                    }
                    match (dx + dy).cmp(&0) {
                        std::cmp::Ordering::Less => add(6),
                        std::cmp::Ordering::Greater => add(7),
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
            let mut g = 0.0f64;
            for k in 0..4 {
                let (nu, nv) = (totals[2 * k], totals[2 * k + 1]);
                if nu == 0 || nv == 0 {
                    continue;
                }
                let hu = &counts[2 * k * bins..(2 * k + 1) * bins];
                let hv = &counts[(2 * k + 1) * bins..(2 * k + 2) * bins];
                g = g.max(l1_normalized(hu, f64::from(nu), hv, f64::from(nv)));
            }
            out.push(g.min(2.0));
        }
    }
    ScalarField::new(w, h, out)
}

/// `(g - δ)^γ` above the offset, 0 at or below it.
#[inline]
pub fn enhance_gradient_value(g: f64, delta: f64, gamma: f64) -> f64 {
    if g <= delta {
        0.0
    } else {
        (g - delta).powf(gamma)
    }
}

pub fn enhance_gradient(g: &ScalarField, params: &GradientParams) -> ScalarField {
    g.map(|v| enhance_gradient_value(v, params.delta, params.gamma))
}
