//! Dense single-channel raster of `f64` values.

/// One real value per pixel, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width * height, "field size mismatch");
        Self {
            width,
            height,
            values,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.width, self.height, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `(min, max)` over all values; `(0, 0)` for an empty field.
    pub fn min_max(&self) -> (f64, f64) {
        if self.values.is_empty() {
            return (0.0, 0.0);
        }
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Affine rescale so the minimum maps to 0 and the maximum to 255.
    /// A constant field becomes all zeros.
    pub fn normalized(&self) -> Self {
        let (lo, hi) = self.min_max();
        // a spread at rounding-noise level is treated as a constant field
        if hi - lo <= 1e-9 * hi.abs().max(lo.abs()).max(1.0) {
            return Self::filled(self.width, self.height, 0.0);
        }
        let scale = 255.0 / (hi - lo);
        let mut out = self.map(|v| (v - lo) * scale);
        // pin the extremes exactly against rounding in the scale product
        for (dst, &src) in out.values.iter_mut().zip(&self.values) {
            if src == hi {
                *dst = 255.0;
            } else if src == lo {
                *dst = 0.0;
            }
        }
        out
    }

    /// Quantize to 8-bit gray after rescaling into [0, 255].
    pub fn to_gray8(&self) -> Vec<u8> {
        self.normalized()
            .values
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}
