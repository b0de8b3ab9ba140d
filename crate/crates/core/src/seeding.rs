//! Seed detection: threshold the per-SER enhanced gradient and label the
//! 4-connected components of the seed SERs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{neighbors4, SerGrid, UNLABELED};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedParams {
    /// Threshold coefficient applied to the image-wide mean enhanced gradient.
    pub beta: f64,
}

impl Default for SeedParams {
    fn default() -> Self {
        Self { beta: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedLabeling {
    /// `true` for seed SERs.
    pub is_seed: Vec<bool>,
    /// Component label per SER, dense from 1; [`UNLABELED`] for non-seeds.
    pub labels: Vec<u32>,
    pub count: usize,
    pub threshold: f64,
}

/// Classify SERs with `eg_mean <= beta * eg_global` as seeds and label their
/// 4-connected components.
pub fn detect_seeds(grid: &SerGrid, eg_global: f64, params: &SeedParams) -> Result<SeedLabeling> {
    let threshold = params.beta * eg_global;
    let is_seed: Vec<bool> = grid.sers().iter().map(|s| s.eg_mean <= threshold).collect();
    let (labels, count) = connected_components(&is_seed, grid.cols(), grid.rows());
    if count == 0 {
        return Err(Error::NoSeeds);
    }
    Ok(SeedLabeling {
        is_seed,
        labels,
        count,
        threshold,
    })
}

/// 4-connected component labels of `mask` on a `cols x rows` lattice.
///
/// Labels start at 1 and are assigned in row-major order of each
/// component's first cell. Cells outside the mask get [`UNLABELED`].
pub fn connected_components(mask: &[bool], cols: usize, rows: usize) -> (Vec<u32>, usize) {
    assert_eq!(mask.len(), cols * rows);
    let mut labels = vec![UNLABELED; mask.len()];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || labels[start] != UNLABELED {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(cell) = stack.pop() {
            for n in neighbors4(cell, cols, rows) {
                if mask[n] && labels[n] == UNLABELED {
                    labels[n] = next;
                    stack.push(n);
                }
            }
        }
    }
    (labels, next as usize)
}
