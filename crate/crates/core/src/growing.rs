//! Seeded region growing over non-seed SERs.
//!
//! Candidates wait in a sorted list keyed by the growth-control distance
//! (color distance to the adjacent region plus a penalty on the candidate's
//! own enhanced gradient), so SERs sitting on salient edges are claimed
//! last. A candidate touching several regions when it is dequeued goes to
//! the region with the smallest boundary-localization distance.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::color::{color_distance, Lab};
use crate::error::{Error, Result};
use crate::grid::{Ser, SerGrid, UNLABELED};
use crate::seeding::SeedLabeling;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowParams {
    /// Weight of the candidate's enhanced gradient in the ordering key.
    pub omega: f64,
    /// Weight of the local color step in the assignment distance.
    pub lambda1: f64,
}

impl Default for GrowParams {
    fn default() -> Self {
        Self {
            omega: 5.0,
            lambda1: 2.0,
        }
    }
}

/// Running color sum of a region, weighted by pixel count.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegionState {
    sum: [f64; 3],
    count: f64,
    fallback: Lab,
}

impl RegionState {
    pub fn add(&mut self, color: Lab, weight: f64) {
        self.sum[0] += color.l * weight;
        self.sum[1] += color.a * weight;
        self.sum[2] += color.b * weight;
        self.count += weight;
    }

    /// Remove a previously added contribution. An emptied region keeps
    /// reporting the mean it had just before it became empty.
    pub fn remove(&mut self, color: Lab, weight: f64) {
        if self.count - weight <= 0.0 {
            self.fallback = self.mean();
            self.sum = [0.0; 3];
            self.count = 0.0;
            return;
        }
        self.sum[0] -= color.l * weight;
        self.sum[1] -= color.a * weight;
        self.sum[2] -= color.b * weight;
        self.count -= weight;
    }

    pub fn count(&self) -> f64 {
        self.count
    }

    pub fn mean(&self) -> Lab {
        if self.count > 0.0 {
            Lab::new(self.sum[0] / self.count, self.sum[1] / self.count, self.sum[2] / self.count)
        } else {
            self.fallback
        }
    }
}

/// A dequeued entry of the sorted candidate list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub item: usize,
    pub key: f64,
    /// Region the key was computed against.
    pub source: u32,
    pub seq: u64,
}

/// Ascending-key candidate list with insertion-order tie-breaking. Each item
/// can be stored at most once over the list's lifetime; keys are never
/// updated after insertion.
#[derive(Debug, Clone)]
pub struct SortedCandidateList {
    heap: BinaryHeap<Reverse<(OrderedFloat<f64>, u64, usize, u32)>>,
    stored: Vec<bool>,
    next_seq: u64,
}

impl SortedCandidateList {
    pub fn new(items: usize) -> Self {
        Self {
            heap: BinaryHeap::new(),
            stored: vec![false; items],
            next_seq: 0,
        }
    }

    /// Store `item`; returns `false` and does nothing if it was stored before.
    pub fn insert(&mut self, item: usize, key: f64, source: u32) -> bool {
        if self.stored[item] {
            return false;
        }
        self.stored[item] = true;
        self.heap.push(Reverse((OrderedFloat(key), self.next_seq, item, source)));
        self.next_seq += 1;
        true
    }

    pub fn pop(&mut self) -> Option<Candidate> {
        self.heap.pop().map(|Reverse((key, seq, item, source))| Candidate {
            item,
            key: key.0,
            source,
            seq,
        })
    }

    pub fn is_stored(&self, item: usize) -> bool {
        self.stored[item]
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// Color distance to the region plus `ω` times the SER's mean enhanced gradient.
#[inline]
pub fn growth_control_distance(ser: &Ser, region: &RegionState, omega: f64) -> f64 {
    color_distance(ser.mean, region.mean()) + omega * ser.eg_mean
}

/// Color distance to the region plus `λ1` times the mean color step to the
/// region's SERs that touch the candidate. `adjacent` must be non-empty.
pub fn boundary_localization_distance(ser: &Ser, region: &RegionState, adjacent: &[&Ser], lambda1: f64) -> f64 {
    assert!(!adjacent.is_empty(), "candidate must touch the region");
    let step = adjacent.iter().map(|a| color_distance(ser.mean, a.mean)).sum::<f64>() / adjacent.len() as f64;
    color_distance(ser.mean, region.mean()) + lambda1 * step
}

#[derive(Debug, Clone)]
pub struct Growth {
    /// Final color state of each region, indexed by `label - 1`.
    pub regions: Vec<RegionState>,
    /// Non-seed SERs in the order they were dequeued.
    pub order: Vec<usize>,
}

/// Grow the seed components until every SER is labeled. Writes the labels
/// into `grid.labels`. Requires SER statistics.
pub fn grow_regions(grid: &mut SerGrid, seeds: &SeedLabeling, params: &GrowParams) -> Result<Growth> {
    if seeds.count == 0 {
        return Err(Error::NoSeeds);
    }
    let n = grid.len();
    let mut labels = seeds.labels.clone();
    let mut regions = vec![RegionState::default(); seeds.count];
    for (id, &label) in labels.iter().enumerate() {
        if label != UNLABELED {
            let ser = grid.ser(id);
            regions[label as usize - 1].add(ser.mean, ser.pixel_count() as f64);
        }
    }

    let mut list = SortedCandidateList::new(n);
    for id in 0..n {
        if labels[id] != UNLABELED {
            continue;
        }
        let ser = grid.ser(id);
        let mut best: Option<(f64, u32)> = None;
        for nb in grid.neighbors(id) {
            let label = labels[nb];
            if label == UNLABELED {
                continue;
            }
            let gcd = growth_control_distance(ser, &regions[label as usize - 1], params.omega);
            best = match best {
                Some((d, l)) if d < gcd || (d == gcd && l <= label) => Some((d, l)),
                _ => Some((gcd, label)),
            };
        }
        if let Some((gcd, label)) = best {
            list.insert(id, gcd, label);
        }
    }

    let mut order = Vec::new();
    let mut touching: Vec<u32> = Vec::with_capacity(4);
    while let Some(cand) = list.pop() {
        let x = cand.item;
        order.push(x);
        touching.clear();
        for nb in grid.neighbors(x) {
            let label = labels[nb];
            if label != UNLABELED && !touching.contains(&label) {
                touching.push(label);
            }
        }
        let chosen = match touching.as_slice() {
            [] => unreachable!("stored candidates always touch a labeled SER"),
            [only] => *only,
            _ => {
                let ser = grid.ser(x);
                let mut best: Option<(f64, u32)> = None;
                for &label in &touching {
                    let adjacent: Vec<&Ser> = grid
                        .neighbors(x)
                        .filter(|&nb| labels[nb] == label)
                        .map(|nb| grid.ser(nb))
                        .collect();
                    let bld =
                        boundary_localization_distance(ser, &regions[label as usize - 1], &adjacent, params.lambda1);
                    best = match best {
                        Some((d, l)) if d < bld || (d == bld && l <= label) => Some((d, l)),
                        _ => Some((bld, label)),
                    };
                }
                best.map(|(_, l)| l).unwrap_or(touching[0])
            }
        };
        labels[x] = chosen;
        let ser = *grid.ser(x);
        let region = &mut regions[chosen as usize - 1];
        region.add(ser.mean, ser.pixel_count() as f64);

        let region = regions[chosen as usize - 1];
        for nb in grid.neighbors(x) {
            if labels[nb] == UNLABELED && !list.is_stored(nb) {
                let gcd = growth_control_distance(grid.ser(nb), &region, params.omega);
                list.insert(nb, gcd, chosen);
            }
        }
    }

    grid.labels = labels;
    Ok(Growth { regions, order })
}
