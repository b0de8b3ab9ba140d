//! sRGB to CIELAB conversion, bilateral pre-filtering and color distances.
//!
//! All Lab values use the D65 reference white with sRGB primaries and
//! companding, which is what reference colorimetry calculators assume for
//! untagged 8-bit RGB.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;

const WHITE_X: f64 = 0.95047;
const WHITE_Y: f64 = 1.0;
const WHITE_Z: f64 = 1.08883;

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

/// A CIELAB color triple.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Lab {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }

    #[inline]
    pub fn channel(&self, c: usize) -> f64 {
        match c {
            0 => self.l,
            1 => self.a,
            2 => self.b,
            _ => panic!("Lab channel index {c} out of range"),
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.l, self.a, self.b]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// Euclidean norm of the color vector.
    pub fn magnitude(&self) -> f64 {
        (self.l * self.l + self.a * self.a + self.b * self.b).sqrt()
    }
}

/// Euclidean distance between two Lab colors.
#[inline]
pub fn color_distance(c1: Lab, c2: Lab) -> f64 {
    let dl = c1.l - c2.l;
    let da = c1.a - c2.a;
    let db = c1.b - c2.b;
    (dl * dl + da * da + db * db).sqrt()
}

/// Per-pixel Lab image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    width: usize,
    height: usize,
    pixels: Vec<Lab>,
}

impl LabImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Lab>) -> Self {
        assert_eq!(pixels.len(), width * height, "Lab image size mismatch");
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn filled(width: usize, height: usize, value: Lab) -> Self {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Lab] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Lab {
        self.pixels[y * self.width + x]
    }

    /// Global `(min, max)` of one channel.
    pub fn channel_range(&self, c: usize) -> (f64, f64) {
        self.pixels
            .iter()
            .map(|p| p.channel(c))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

fn srgb_to_linear(v: u8) -> f64 {
    let c = f64::from(v) / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_to_srgb(c: f64) -> f64 {
    let v = if c <= 0.0031308 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    };
    v * 255.0
}

fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

fn lab_f_inv(f: f64) -> f64 {
    let f3 = f * f * f;
    if f3 > EPSILON {
        f3
    } else {
        (116.0 * f - 16.0) / KAPPA
    }
}

/// Convert one 8-bit sRGB triple to Lab.
pub fn rgb_to_lab(rgb: [u8; 3]) -> Lab {
    let r = srgb_to_linear(rgb[0]);
    let g = srgb_to_linear(rgb[1]);
    let b = srgb_to_linear(rgb[2]);

    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    let fx = lab_f(x / WHITE_X);
    let fy = lab_f(y / WHITE_Y);
    let fz = lab_f(z / WHITE_Z);

    Lab {
        l: (116.0 * fy - 16.0).max(0.0),
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Inverse of [`rgb_to_lab`], returning unclamped, unrounded sRGB in [0, 255] units.
pub fn lab_to_rgb(lab: Lab) -> [f64; 3] {
    let fy = (lab.l + 16.0) / 116.0;
    let fx = fy + lab.a / 500.0;
    let fz = fy - lab.b / 200.0;

    let x = lab_f_inv(fx) * WHITE_X;
    let y = lab_f_inv(fy) * WHITE_Y;
    let z = lab_f_inv(fz) * WHITE_Z;

    let r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    let g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    let b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;

    [linear_to_srgb(r), linear_to_srgb(g), linear_to_srgb(b)]
}

/// Convert to 8-bit sRGB with rounding and clamping.
pub fn lab_to_rgb8(lab: Lab) -> [u8; 3] {
    lab_to_rgb(lab).map(|v| v.round().clamp(0.0, 255.0) as u8)
}

pub fn srgb_to_lab(image: &RgbImage) -> LabImage {
    let width = image.width() as usize;
    let height = image.height() as usize;
    let pixels = image.pixels().map(|p| rgb_to_lab(p.0)).collect();
    LabImage::new(width, height, pixels)
}

/// Bilateral filter settings. Defaults: 7x7 window, sigma_d 2, sigma_r 8,
/// applied twice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilateralParams {
    pub window_side: usize,
    pub sigma_d: f64,
    pub sigma_r: f64,
    pub passes: usize,
}

impl Default for BilateralParams {
    fn default() -> Self {
        Self {
            window_side: 7,
            sigma_d: 2.0,
            sigma_r: 8.0,
            passes: 2,
        }
    }
}

impl BilateralParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_side == 0 || self.window_side.is_multiple_of(2) {
            return Err(Error::param("bilateral_window", "must be odd"));
        }
        if !(self.sigma_d > 0.0) {
            return Err(Error::param("bilateral_sigma_d", "must be positive"));
        }
        if !(self.sigma_r > 0.0) {
            return Err(Error::param("bilateral_sigma_r", "must be positive"));
        }
        Ok(())
    }
}

/// Edge-preserving smoothing of each Lab channel independently.
///
/// Each output sample is the normalized sum over the window of
/// `exp(-d²/2σd²) · exp(-Δ²/2σr²) · v`, where `d` is the spatial offset and
/// `Δ` the difference to the center sample in the same channel. The window
/// is truncated at the image border.
pub fn bilateral_filter(image: &LabImage, params: &BilateralParams) -> LabImage {
    let mut current = image.clone();
    for _ in 0..params.passes {
        current = bilateral_pass(&current, params);
    }
    current
}

fn bilateral_pass(image: &LabImage, params: &BilateralParams) -> LabImage {
    let (w, h) = (image.width, image.height);
    let radius = (params.window_side / 2) as isize;
    let inv_2sd2 = 1.0 / (2.0 * params.sigma_d * params.sigma_d);
    let inv_2sr2 = 1.0 / (2.0 * params.sigma_r * params.sigma_r);

    let side = params.window_side;
    let mut spatial = Vec::with_capacity(side * side);
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            spatial.push(((dx * dx + dy * dy) as f64) * inv_2sd2);
        }
    }

    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let center = image.pixels[y as usize * w + x as usize].to_array();
            let mut acc = [0.0f64; 3];
            let mut norm = [0.0f64; 3];
            for dy in -radius..=radius {
                let yy = y + dy;
                if yy < 0 || yy >= h as isize {
                    continue;
                }
                let row = yy as usize * w;
                for dx in -radius..=radius {
                    let xx = x + dx;
                    if xx < 0 || xx >= w as isize {
                        continue;
                    }
                    let ds = spatial[((dy + radius) as usize) * side + (dx + radius) as usize];
                    let v = image.pixels[row + xx as usize].to_array();
                    for c in 0..3 {
                        let diff = v[c] - center[c];
                        let weight = (-(ds + diff * diff * inv_2sr2)).exp();
                        acc[c] += weight * v[c];
                        norm[c] += weight;
                    }
                }
            }
            out.push(Lab::new(acc[0] / norm[0], acc[1] / norm[1], acc[2] / norm[2]));
        }
    }
    LabImage::new(w, h, out)
}

/// Magnitude of the Lab vector at each pixel, rescaled into [0, 255].
pub fn color_vector_magnitude(image: &LabImage) -> ScalarField {
    color_vector_magnitude_raw(image).normalized()
}

/// Magnitude of the Lab vector at each pixel, without rescaling.
pub fn color_vector_magnitude_raw(image: &LabImage) -> ScalarField {
    ScalarField::new(
        image.width,
        image.height,
        image.pixels.iter().map(Lab::magnitude).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn white_maps_to_l100() {
        let lab = rgb_to_lab([255, 255, 255]);
        assert!((lab.l - 100.0).abs() < 1e-3, "{lab:?}");
        assert!(lab.a.abs() < 0.01 && lab.b.abs() < 0.01, "{lab:?}");
    }

    #[test]
    fn black_maps_to_origin() {
        assert_eq!(rgb_to_lab([0, 0, 0]), Lab::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn srgb_red() {
        let lab = rgb_to_lab([255, 0, 0]);
        assert!((lab.l - 53.24).abs() < 0.1);
        assert!((lab.a - 80.09).abs() < 0.1);
        assert!((lab.b - 67.20).abs() < 0.1);
    }

    #[test]
    fn lattice_round_trip() {
        for r in (0..256).step_by(17) {
            for g in (0..256).step_by(17) {
                for b in (0..256).step_by(17) {
                    let rgb = [r as u8, g as u8, b as u8];
                    let back = lab_to_rgb(rgb_to_lab(rgb));
                    for c in 0..3 {
                        assert!((back[c] - f64::from(rgb[c])).abs() < 1.0, "{rgb:?} -> {back:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn distance_cases() {
        assert_eq!(color_distance(Lab::new(10.0, 0.0, 0.0), Lab::new(10.0, 0.0, 0.0)), 0.0);
        assert_eq!(color_distance(Lab::new(0.0, 0.0, 0.0), Lab::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(color_distance(Lab::new(1.0, 2.0, 3.0), Lab::new(4.0, 6.0, 3.0)), 5.0);
    }

    #[test]
    fn magnitude_of_345() {
        assert_eq!(Lab::new(3.0, 4.0, 0.0).magnitude(), 5.0);
    }

    #[test]
    fn magnitude_field_spans_full_range() {
        let img = LabImage::new(
            3,
            1,
            vec![Lab::new(0.0, 0.0, 0.0), Lab::new(10.0, 0.0, 0.0), Lab::new(20.0, 0.0, 0.0)],
        );
        assert_eq!(color_vector_magnitude(&img).values(), &[0.0, 127.5, 255.0]);
    }

    #[test]
    fn constant_image_is_fixed_point() {
        let img = LabImage::filled(9, 6, Lab::new(42.0, -3.5, 17.25));
        let out = bilateral_filter(&img, &BilateralParams::default());
        for p in out.pixels() {
            assert!(color_distance(*p, Lab::new(42.0, -3.5, 17.25)) < 1e-9);
        }
    }

    fn brute_force_bilateral(values: &[f64], w: usize, h: usize, radius: isize, sd: f64, sr: f64) -> Vec<f64> {
        let mut out = vec![0.0; w * h];
        for y in 0..h as isize {
            for x in 0..w as isize {
                let c = values[(y as usize) * w + x as usize];
                let (mut num, mut den) = (0.0, 0.0);
                for yy in (y - radius).max(0)..=(y + radius).min(h as isize - 1) {
                    for xx in (x - radius).max(0)..=(x + radius).min(w as isize - 1) {
                        let v = values[(yy as usize) * w + xx as usize];
                        let d2 = ((xx - x).pow(2) + (yy - y).pow(2)) as f64;
                        let wgt = (-d2 / (2.0 * sd * sd)).exp() * (-(v - c).powi(2) / (2.0 * sr * sr)).exp();
                        num += wgt * v;
                        den += wgt;
                    }
                }
                out[(y as usize) * w + x as usize] = num / den;
            }
        }
        out
    }

    #[test]
    fn impulse_matches_brute_force() {
        let mut values = vec![0.0; 81];
        values[40] = 100.0;
        let img = LabImage::new(9, 9, values.iter().map(|&v| Lab::new(v, 0.0, 0.0)).collect());
        let params = BilateralParams {
            passes: 1,
            ..BilateralParams::default()
        };
        let out = bilateral_filter(&img, &params);
        let expected = brute_force_bilateral(&values, 9, 9, 3, 2.0, 8.0);
        for (p, e) in out.pixels().iter().zip(&expected) {
            assert!((p.l - e).abs() < 1e-9);
        }
        // the cross-contrast range weight is ~e^-78, so in f64 the impulse
        // survives unchanged; with a wide range kernel it visibly spreads
        assert!(out.get(4, 4).l <= 100.0);
        let wide = bilateral_filter(&img, &BilateralParams { sigma_r: 1000.0, ..params });
        let expected_wide = brute_force_bilateral(&values, 9, 9, 3, 2.0, 1000.0);
        assert!((wide.get(4, 4).l - expected_wide[40]).abs() < 1e-9);
        assert!(wide.get(4, 4).l < 100.0);
        for (i, p) in out.pixels().iter().enumerate() {
            if i != 40 {
                assert!(p.l.abs() < 1e-6, "background pixel {i} = {}", p.l);
            }
        }
    }

    #[test]
    fn strong_step_survives_two_passes() {
        let (w, h) = (16, 16);
        let img = LabImage::new(
            w,
            h,
            (0..w * h)
                .map(|i| Lab::new(if i % w < 8 { -100.0 } else { 100.0 }, 0.0, 0.0))
                .collect(),
        );
        let out = bilateral_filter(&img, &BilateralParams::default());
        for y in 0..h {
            let contrast = out.get(8, y).l - out.get(7, y).l;
            assert!(contrast > 198.0, "row {y}: contrast {contrast}");
        }
    }

    fn lab_strategy() -> impl Strategy<Value = Lab> {
        (0.0..100.0f64, -128.0..128.0f64, -128.0..128.0f64).prop_map(|(l, a, b)| Lab::new(l, a, b))
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in lab_strategy(), b in lab_strategy(), c in lab_strategy()) {
            prop_assert!((color_distance(a, b) - color_distance(b, a)).abs() < 1e-12);
            prop_assert!(color_distance(a, c) <= color_distance(a, b) + color_distance(b, c) + 1e-9);
        }

        #[test]
        fn filter_output_within_window_range(values in proptest::collection::vec(-50.0..50.0f64, 36)) {
            let img = LabImage::new(6, 6, values.iter().map(|&v| Lab::new(v, -v, 0.5 * v)).collect());
            let params = BilateralParams { passes: 1, ..BilateralParams::default() };
            let out = bilateral_filter(&img, &params);
            for y in 0..6usize {
                for x in 0..6usize {
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for yy in y.saturating_sub(3)..(y + 4).min(6) {
                        for xx in x.saturating_sub(3)..(x + 4).min(6) {
                            lo = lo.min(img.get(xx, yy).l);
                            hi = hi.max(img.get(xx, yy).l);
                        }
                    }
                    let v = out.get(x, y).l;
                    prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
                }
            }
        }
    }
}
