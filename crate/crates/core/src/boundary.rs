//! Pixel-accurate boundaries.
//!
//! After merging, region borders still follow the SER lattice. Each
//! refinement pass frees every pixel on a border and hands it back to one of
//! the regions it touches, using the same sorted-list procedure as region
//! growing but with pixels as items and the pixel-region distance as key.

use serde::{Deserialize, Serialize};

use crate::color::{color_distance, Lab, LabImage};
use crate::error::{Error, Result};
use crate::grid::{neighbors4, SerGrid, UNLABELED};
use crate::growing::{RegionState, SortedCandidateList};

/// A per-pixel region labeling. Labels run from 1 to `region_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub region_count: usize,
}

impl Segmentation {
    /// Wrap a label vector, checking that every pixel carries a label.
    pub fn from_labels(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                actual: (labels.len(), 1),
            });
        }
        if let Some(i) = labels.iter().position(|&l| l == UNLABELED) {
            return Err(Error::UnlabeledPixel { x: i % width, y: i / width });
        }
        let region_count = labels.iter().copied().max().unwrap_or(0) as usize;
        Ok(Self {
            width,
            height,
            labels,
            region_count,
        })
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel count per label, indexed by `label - 1`.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0; self.region_count];
        for &l in &self.labels {
            areas[l as usize - 1] += 1;
        }
        areas
    }

    /// Renumber labels densely by first appearance in row-major order,
    /// dropping ids that no longer own any pixel.
    pub fn compacted(&self) -> Self {
        let mut map = vec![UNLABELED; self.region_count + 1];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l as usize] == UNLABELED {
                    next += 1;
                    map[l as usize] = next;
                }
                map[l as usize]
            })
            .collect();
        Self {
            width: self.width,
            height: self.height,
            labels,
            region_count: next as usize,
        }
    }

    /// `true` for pixels with at least one 4-neighbor carrying another label.
    pub fn boundary_mask(&self) -> Vec<bool> {
        (0..self.labels.len())
            .map(|i| {
                let l = self.labels[i];
                neighbors4(i, self.width, self.height).any(|n| self.labels[n] != l)
            })
            .collect()
    }
}

/// Expand SER labels to their member pixels.
pub fn rasterize_labels(grid: &SerGrid) -> Segmentation {
    let (w, h) = (grid.width(), grid.height());
    let mut labels = vec![UNLABELED; w * h];
    for (id, ser) in grid.sers().iter().enumerate() {
        for (x, y) in ser.pixels() {
            labels[y * w + x] = grid.labels[id];
        }
    }
    let region_count = labels.iter().copied().max().unwrap_or(0) as usize;
    Segmentation {
        width: w,
        height: h,
        labels,
        region_count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineParams {
    /// Weight of the local color step in the pixel-region distance.
    pub lambda2: f64,
    pub passes: usize,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            lambda2: 2.0,
            passes: 2,
        }
    }
}

impl RefineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda2 >= 0.0) {
            return Err(Error::param("lambda2", "must be non-negative"));
        }
        Ok(())
    }
}

/// Color distance from `pixel` to the region mean plus `λ2` times the mean
/// color distance to the region's pixels adjacent to it. `adjacent` must be
/// non-empty.
pub fn pixel_region_distance(pixel: Lab, region: &RegionState, adjacent: &[Lab], lambda2: f64) -> f64 {
    assert!(!adjacent.is_empty(), "pixel must touch the region");
    let step = adjacent.iter().map(|&a| color_distance(pixel, a)).sum::<f64>() / adjacent.len() as f64;
    color_distance(pixel, region.mean()) + lambda2 * step
}

/// Move region borders to pixel accuracy with `params.passes` refinement
/// passes. Region means start from the pixels of `seg` and are updated as
/// pixels are released and reassigned, carrying over between passes.
///
/// Label ids are preserved, so a region that loses all its pixels leaves a
/// gap; see [`Segmentation::compacted`].
pub fn refine_boundaries(seg: &Segmentation, lab: &LabImage, params: &RefineParams) -> Segmentation {
    assert_eq!((seg.width, seg.height), (lab.width(), lab.height()), "image size mismatch");
    let (w, h) = (seg.width, seg.height);
    let pixels = lab.pixels();
    let mut labels = seg.labels.clone();
    let mut regions = vec![RegionState::default(); seg.region_count];
    for (i, &l) in labels.iter().enumerate() {
        regions[l as usize - 1].add(pixels[i], 1.0);
    }

    let mut free = Vec::new();
    for _ in 0..params.passes {
        free.clear();
        free.extend((0..labels.len()).filter(|&i| neighbors4(i, w, h).any(|n| labels[n] != labels[i])));
        if free.is_empty() {
            break;
        }
        let previous: Vec<u32> = free.iter().map(|&i| labels[i]).collect();
        for &i in &free {
            regions[labels[i] as usize - 1].remove(pixels[i], 1.0);
            labels[i] = UNLABELED;
        }
        reassign(&free, &mut labels, &mut regions, pixels, w, h, params.lambda2);

        // A free pixel cut off from every labeled pixel (a region made only of
        // border pixels, with all its surroundings freed too) goes back to
        // where it was.
        for (&i, &old) in free.iter().zip(&previous) {
            if labels[i] == UNLABELED {
                labels[i] = old;
                regions[old as usize - 1].add(pixels[i], 1.0);
            }
        }
    }

    Segmentation {
        width: w,
        height: h,
        labels,
        region_count: seg.region_count,
    }
}

/// Best `(distance, label)` over the labels touching pixel `i`.
fn closest_region(
    i: usize,
    labels: &[u32],
    regions: &[RegionState],
    pixels: &[Lab],
    w: usize,
    h: usize,
    lambda2: f64,
) -> Option<(f64, u32)> {
    let mut touching = [UNLABELED; 4];
    let mut adjacent = [[Lab::default(); 4]; 4];
    let mut counts = [0usize; 4];
    let mut k = 0;
    for n in neighbors4(i, w, h) {
        let l = labels[n];
        if l == UNLABELED {
            continue;
        }
        let slot = match touching[..k].iter().position(|&t| t == l) {
            Some(s) => s,
            None => {
                touching[k] = l;
                k += 1;
                k - 1
            }
        };
        adjacent[slot][counts[slot]] = pixels[n];
        counts[slot] += 1;
    }
    let mut best: Option<(f64, u32)> = None;
    for s in 0..k {
        let label = touching[s];
        let d = pixel_region_distance(pixels[i], &regions[label as usize - 1], &adjacent[s][..counts[s]], lambda2);
        best = match best {
            Some((bd, bl)) if bd < d || (bd == d && bl <= label) => Some((bd, bl)),
            _ => Some((d, label)),
        };
    }
    best
}

fn reassign(
    free: &[usize],
    labels: &mut [u32],
    regions: &mut [RegionState],
    pixels: &[Lab],
    w: usize,
    h: usize,
    lambda2: f64,
) {
    let mut list = SortedCandidateList::new(labels.len());
    for &i in free {
        if let Some((d, label)) = closest_region(i, labels, regions, pixels, w, h, lambda2) {
            list.insert(i, d, label);
        }
    }
    while let Some(cand) = list.pop() {
        let i = cand.item;
        let (_, chosen) =
            closest_region(i, labels, regions, pixels, w, h, lambda2).expect("stored pixels touch a labeled pixel");
        labels[i] = chosen;
        regions[chosen as usize - 1].add(pixels[i], 1.0);
        let region = regions[chosen as usize - 1];
        for n in neighbors4(i, w, h) {
            if labels[n] == UNLABELED && !list.is_stored(n) {
                let adjacent: Vec<Lab> = neighbors4(n, w, h)
                    .filter(|&m| labels[m] == chosen)
                    .map(|m| pixels[m])
                    .collect();
                list.insert(n, pixel_region_distance(pixels[n], &region, &adjacent, lambda2), chosen);
            }
        }
    }
}
