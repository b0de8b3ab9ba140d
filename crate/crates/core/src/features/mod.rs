//! Image-level features: salient-edge gradient, Tsallis entropy and the
//! fractal-dimension based estimate of how many regions the image wants.

mod entropy;
mod fractal;
mod gradient;

pub use entropy::{entropy_field, tsallis_entropy, tsallis_from_counts, EntropyParams};
pub use fractal::{desired_region_count, estimate_complexity, fractal_dimension, ComplexityEstimate, ComplexityParams};
pub use gradient::{enhance_gradient, enhance_gradient_value, histogram_difference, lhdsee_gradient, GradientParams};

/// Maps values of a fixed global range onto `bins` equal-width bins.
///
/// The top edge of the range falls into the last bin. A degenerate range
/// (`max <= min`) puts everything into bin 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    min: f64,
    scale: f64,
    bins: usize,
}

impl Binning {
    pub fn new(range: (f64, f64), bins: usize) -> Self {
        assert!(bins >= 1, "need at least one bin");
        let (min, max) = range;
        let scale = if max > min { bins as f64 / (max - min) } else { 0.0 };
        Self { min, scale, bins }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    #[inline]
    pub fn index(&self, v: f64) -> usize {
        let i = ((v - self.min) * self.scale).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.bins - 1)
        }
    }

    pub fn histogram(&self, values: &[f64]) -> Vec<u32> {
        let mut counts = vec![0u32; self.bins];
        for &v in values {
            counts[self.index(v)] += 1;
        }
        counts
    }
}
