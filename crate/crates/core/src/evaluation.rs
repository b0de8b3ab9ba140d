//! Unsupervised segmentation quality scores F′ and Q (Borsotti et al.).
//!
//! Both compare each region's pixels in the original RGB image with the
//! region's mean RGB color and penalize many small regions. Lower is better.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::boundary::Segmentation;
use crate::error::{Error, Result};

/// Logarithm base used in the area term of Q.
pub const DEFAULT_LOG_BASE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub f_prime: f64,
    pub q: f64,
    /// Number of non-empty regions.
    pub region_count: usize,
    /// Pixel area per non-empty region, in label order.
    pub areas: Vec<usize>,
    /// Squared color error per non-empty region, in label order.
    pub squared_errors: Vec<f64>,
    pub max_area: usize,
    /// Number of regions having each area.
    pub area_multiplicity: BTreeMap<usize, usize>,
}

impl EvalReport {
    /// One `key=value` pair per line.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "f_prime={}", self.f_prime);
        let _ = writeln!(s, "q={}", self.q);
        let _ = writeln!(s, "region_count={}", self.region_count);
        let _ = writeln!(s, "max_area={}", self.max_area);
        s
    }
}

struct RegionStats {
    label: u32,
    area: usize,
    error: f64,
}

fn check_size(seg: &Segmentation, original: &RgbImage) -> Result<()> {
    let actual = (original.width() as usize, original.height() as usize);
    if actual != (seg.width, seg.height) || seg.labels.len() != seg.width * seg.height {
        return Err(Error::DimensionMismatch {
            expected: (seg.width, seg.height),
            actual,
        });
    }
    if let Some(i) = seg.labels.iter().position(|&l| l == 0) {
        return Err(Error::UnlabeledPixel {
            x: i % seg.width,
            y: i / seg.width,
        });
    }
    Ok(())
}

fn region_stats(seg: &Segmentation, original: &RgbImage) -> Vec<RegionStats> {
    let n = seg.labels.iter().copied().max().unwrap_or(0) as usize;
    let mut sums = vec![[0.0f64; 3]; n];
    let mut areas = vec![0usize; n];
    for (&l, p) in seg.labels.iter().zip(original.pixels()) {
        let k = l as usize - 1;
        areas[k] += 1;
        for c in 0..3 {
            sums[k][c] += f64::from(p.0[c]);
        }
    }
    let means: Vec<[f64; 3]> = sums
        .iter()
        .zip(&areas)
        .map(|(s, &a)| s.map(|v| v / a.max(1) as f64))
        .collect();
    let mut errors = vec![0.0; n];
    for (&l, p) in seg.labels.iter().zip(original.pixels()) {
        let m = &means[l as usize - 1];
        let d2: f64 = (0..3).map(|c| (f64::from(p.0[c]) - m[c]).powi(2)).sum();
        errors[l as usize - 1] += d2.sqrt();
    }
    (0..n)
        .filter(|&k| areas[k] > 0)
        .map(|k| RegionStats {
            label: k as u32 + 1,
            area: areas[k],
            error: errors[k],
        })
        .collect()
}

/// Sum over the region's pixels of the RGB distance to the region's mean
/// RGB color. Zero for a label that owns no pixel.
pub fn region_color_error(seg: &Segmentation, original: &RgbImage, label: u32) -> Result<f64> {
    check_size(seg, original)?;
    Ok(region_stats(seg, original)
        .iter()
        .find(|r| r.label == label)
        .map_or(0.0, |r| r.error))
}

pub fn borsotti_f_prime(seg: &Segmentation, original: &RgbImage) -> Result<f64> {
    Ok(evaluate(seg, original)?.f_prime)
}

pub fn borsotti_q(seg: &Segmentation, original: &RgbImage) -> Result<f64> {
    Ok(evaluate(seg, original)?.q)
}

pub fn evaluate(seg: &Segmentation, original: &RgbImage) -> Result<EvalReport> {
    evaluate_with_base(seg, original, DEFAULT_LOG_BASE)
}

/// Both scores, with `log_base` for the logarithm in Q.
pub fn evaluate_with_base(seg: &Segmentation, original: &RgbImage, log_base: f64) -> Result<EvalReport> {
    check_size(seg, original)?;
    if !(log_base > 1.0) {
        return Err(Error::param("eval_log_base", "must exceed 1"));
    }
    let stats = region_stats(seg, original);
    let mut multiplicity = BTreeMap::new();
    for r in &stats {
        *multiplicity.entry(r.area).or_insert(0usize) += 1;
    }
    let scale = 1.0 / (10_000.0 * (seg.width * seg.height) as f64);
    let r_count = stats.len();

    let area_term: f64 = multiplicity
        .iter()
        .map(|(&a, &count)| (count as f64).powf(1.0 + 1.0 / a as f64))
        .sum();
    let error_term: f64 = stats.iter().map(|r| r.error * r.error / (r.area as f64).sqrt()).sum();
    let f_prime = scale * area_term.sqrt() * error_term;

    let q_sum: f64 = stats
        .iter()
        .map(|r| {
            let a = r.area as f64;
            let same = multiplicity[&r.area] as f64;
            r.error * r.error / (1.0 + a.log(log_base)) + (same / a).powi(2)
        })
        .sum();
    let q = scale * (r_count as f64).sqrt() * q_sum;

    Ok(EvalReport {
        f_prime,
        q,
        region_count: r_count,
        areas: stats.iter().map(|r| r.area).collect(),
        squared_errors: stats.iter().map(|r| r.error * r.error).collect(),
        max_area: stats.iter().map(|r| r.area).max().unwrap_or(0),
        area_multiplicity: multiplicity,
    })
}
