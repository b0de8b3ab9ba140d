//! Three-stage greedy region merging over a [`RegionTable`].
//!
//! 1. Regions of at most `min_region_sers` SERs are absorbed, smallest
//!    first, into the adjacent region with the closest mean color.
//! 2. Adjacent pairs are merged in ascending merge importance (smaller size
//!    times region distance). Once the region count is at or below the
//!    desired count, merging stops as soon as the next importance exceeds
//!    `t_t` times the largest importance merged since then.
//! 3. Mutually most similar pairs are merged, smallest combined size first,
//!    until `zeta` times the stage-2 count remains.

mod table;

use std::collections::{BTreeSet, HashMap};

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use table::{MergeEvent, MergeStage, RegionInput, RegionTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeParams {
    /// Regions of this many SERs or fewer are absorbed in stage 1.
    pub min_region_sers: usize,
    /// Weight of the entropy difference in the region distance.
    pub xi: f64,
    /// Merge-importance ratio that ends stage 2.
    pub t_t: f64,
    /// Fraction of the stage-2 region count kept by stage 3.
    pub zeta: f64,
}

impl Default for MergeParams {
    fn default() -> Self {
        Self {
            min_region_sers: 5,
            xi: 0.1,
            t_t: 1.04,
            zeta: 0.8,
        }
    }
}

impl MergeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_region_sers < 1 {
            return Err(Error::param("min_region_sers", "must be at least 1"));
        }
        if !(self.xi >= 0.0) {
            return Err(Error::param("xi", "must be non-negative"));
        }
        if !(self.t_t > 1.0) {
            return Err(Error::param("t_t", "must exceed 1"));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::param("zeta", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Absorb every region of at most `max_sers` SERs into its most similar
/// neighbor by mean color, always taking the currently smallest one.
/// Returns the number of merges.
pub fn merge_small_regions(table: &mut RegionTable, max_sers: usize) -> usize {
    let mut merges = 0;
    while table.live_count() > 1 {
        let small = table
            .live_ids()
            .filter(|&id| table.size(id) <= max_sers && table.has_neighbors(id))
            .min_by_key(|&id| (table.size(id), id));
        let Some(small) = small else { break };
        let (target, cd) = table
            .neighbors(small)
            .map(|n| (n, table.color_distance(small, n)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("region has neighbors");
        table.merge(small, target, MergeStage::SmallRegions, cd);
        merges += 1;
    }
    merges
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImportanceOutcome {
    pub merges: usize,
    /// Largest merge importance executed after the desired count was reached.
    pub mi_max: Option<f64>,
    /// Importance of the rejected merge, when the ratio test ended the stage.
    pub stopped_at: Option<f64>,
}

type PairKey = (OrderedFloat<f64>, usize, usize);

/// Merge adjacent pairs in ascending merge importance, with the
/// importance-ratio stop applied from the moment the live count is at or
/// below `desired`. Ties go to the lexicographically smaller id pair.
pub fn merge_by_importance(table: &mut RegionTable, desired: usize, params: &MergeParams) -> ImportanceOutcome {
    let xi = params.xi;
    let mut queue: BTreeSet<PairKey> = BTreeSet::new();
    let mut current: HashMap<(usize, usize), f64> = HashMap::new();

    let ids: Vec<usize> = table.live_ids().collect();
    for &i in &ids {
        for j in table.neighbors(i).filter(|&j| j > i) {
            let mi = table.merge_importance(i, j, xi);
            queue.insert((OrderedFloat(mi), i, j));
            current.insert((i, j), mi);
        }
    }

    let mut outcome = ImportanceOutcome {
        merges: 0,
        mi_max: None,
        stopped_at: None,
    };
    while table.live_count() > 1 {
        let Some(&(OrderedFloat(mi), i, j)) = queue.first() else { break };
        let triggered = table.live_count() <= desired;
        if triggered {
            if let Some(max) = outcome.mi_max {
                if mi > params.t_t * max {
                    outcome.stopped_at = Some(mi);
                    break;
                }
            }
        }

        for id in [i, j] {
            let stale: Vec<usize> = table.neighbors(id).collect();
            for n in stale {
                let key = (id.min(n), id.max(n));
                if let Some(old) = current.remove(&key) {
                    queue.remove(&(OrderedFloat(old), key.0, key.1));
                }
            }
        }
        let keep = table.merge(i, j, MergeStage::Importance, mi);
        let fresh: Vec<usize> = table.neighbors(keep).collect();
        for n in fresh {
            let key = (keep.min(n), keep.max(n));
            let value = table.merge_importance(key.0, key.1, xi);
            queue.insert((OrderedFloat(value), key.0, key.1));
            current.insert(key, value);
        }

        outcome.merges += 1;
        if triggered {
            outcome.mi_max = Some(outcome.mi_max.map_or(mi, |m| m.max(mi)));
        }
    }
    outcome
}

/// `round(zeta * n2)`, half-up, at least 1.
pub fn final_region_count(n2: usize, zeta: f64) -> usize {
    ((zeta * n2 as f64 + 0.5).floor() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MutualOutcome {
    pub target: usize,
    pub merges: usize,
    /// `true` when no mutually most similar pair was left before the target.
    pub exhausted: bool,
}

/// Merge mutually most similar pairs (by region distance), smallest combined
/// size first, until `final_region_count(live, zeta)` regions remain.
pub fn merge_mutual_most_similar(table: &mut RegionTable, zeta: f64, xi: f64) -> MutualOutcome {
    let target = final_region_count(table.live_count(), zeta);
    let mut outcome = MutualOutcome {
        target,
        merges: 0,
        exhausted: false,
    };
    while table.live_count() > target {
        let mut best = vec![None; table.capacity()];
        for id in table.live_ids() {
            best[id] = table
                .neighbors(id)
                .map(|n| (n, table.region_distance(id, n, xi)))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        }
        let pair = table
            .live_ids()
            .filter_map(|i| match best[i] {
                Some((j, rd)) if i < j && matches!(best[j], Some((k, _)) if k == i) => Some((i, j, rd)),
                _ => None,
            })
            .min_by_key(|&(i, j, _)| (table.size(i) + table.size(j), i, j));
        let Some((i, j, rd)) = pair else {
            outcome.exhausted = true;
            break;
        };
        table.merge(i, j, MergeStage::MutualSimilarity, rd);
        outcome.merges += 1;
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Lab;

    const RANGES: [(f64, f64); 3] = [(0.0, 100.0), (-50.0, 50.0), (-50.0, 50.0)];

    fn flat(ser_count: usize, l: f64) -> RegionInput {
        RegionInput {
            ser_count,
            pixels: vec![Lab::new(l, 0.0, 0.0); ser_count * 16],
        }
    }

    fn table(parts: &[RegionInput], adjacency: &[(usize, usize)]) -> RegionTable {
        RegionTable::from_parts(parts, adjacency, RANGES, 20, 0.8)
    }

    #[test]
    fn nothing_small_means_no_merges() {
        let mut t = table(&[flat(6, 10.0), flat(9, 50.0)], &[(0, 1)]);
        assert_eq!(merge_small_regions(&mut t, 5), 0);
        assert_eq!(t.live_count(), 2);
    }

    #[test]
    fn small_region_joins_closest_color() {
        // 0 (size 3) sits between 1 (L=20) and 2 (L=80)
        for (l, expected) in [(30.0, 0), (70.0, 2)] {
            let mut t = table(&[flat(3, l), flat(100, 20.0), flat(100, 80.0)], &[(0, 1), (0, 2)]);
            merge_small_regions(&mut t, 5);
            assert_eq!(t.live_count(), 2);
            // the survivor is the smaller id of the pair
            let kept = t.log()[0].kept;
            let absorbed = t.log()[0].absorbed;
            let partner = if l < 50.0 { 1 } else { 2 };
            assert_eq!((kept, absorbed), (0, partner));
            assert_eq!(t.find(expected), 0);
        }
    }

    #[test]
    fn chained_small_regions_keep_merging() {
        // 0 (size 2, L=10) - 1 (size 3, L=12) - 2 (size 100, L=60)
        let mut t = table(&[flat(2, 10.0), flat(3, 12.0), flat(100, 60.0)], &[(0, 1), (1, 2)]);
        assert_eq!(merge_small_regions(&mut t, 5), 2);
        assert_eq!(t.live_count(), 1);
        assert_eq!(t.size(0), 105);
        t.check_invariants();
    }

    #[test]
    fn histogram_distance_cases() {
        let mut t = table(&[flat(1, 10.0), flat(1, 10.0), flat(1, 90.0)], &[(0, 1), (1, 2)]);
        assert_eq!(t.color_histogram_distance(0, 1), 0.0);
        // L* histograms disjoint, a* and b* identical
        let d = t.color_histogram_distance(1, 2);
        assert!((d - 1.0 / 3.0).abs() < 1e-12);
        // fully disjoint in every channel
        let parts = [
            RegionInput {
                ser_count: 1,
                pixels: vec![Lab::new(0.0, -50.0, -50.0)],
            },
            RegionInput {
                ser_count: 1,
                pixels: vec![Lab::new(100.0, 50.0, 50.0)],
            },
        ];
        t = table(&parts, &[(0, 1)]);
        assert!((t.color_histogram_distance(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_overlap_closed_form() {
        // p = (1, 0), q = (0.5, 0.5) in L*, identical elsewhere
        let parts = [
            RegionInput {
                ser_count: 1,
                pixels: vec![Lab::new(1.0, 0.0, 0.0); 2],
            },
            RegionInput {
                ser_count: 1,
                pixels: vec![Lab::new(1.0, 0.0, 0.0), Lab::new(6.0, 0.0, 0.0)],
            },
        ];
        let t = table(&parts, &[(0, 1)]);
        let expected = (1.0 - 0.5f64.sqrt()).sqrt() / 3.0;
        assert!((t.color_histogram_distance(0, 1) - expected).abs() < 1e-12);
        assert!((expected - 0.1804).abs() < 1e-4);
    }

    #[test]
    fn distances_combine() {
        let parts = [
            flat(10, 10.0),
            RegionInput {
                ser_count: 50,
                pixels: (0..800).map(|i| Lab::new((i % 100) as f64, 0.0, 0.0)).collect(),
            },
        ];
        let t = table(&parts, &[(0, 1)]);
        let da = t.color_histogram_distance(0, 1);
        let hd = t.homogeneity_distance(0, 1);
        assert_eq!(hd, t.homogeneity_distance(1, 0));
        assert!((t.entropy(0)).abs() < 1e-12);
        assert!((t.region_distance(0, 1, 0.1) - (da + 0.1 * hd)).abs() < 1e-12);
        assert_eq!(t.region_distance(0, 1, 0.0), da);
        assert!((t.merge_importance(0, 1, 0.1) - 10.0 * t.region_distance(0, 1, 0.1)).abs() < 1e-12);
        assert_eq!(t.merge_importance(0, 1, 0.1), t.merge_importance(1, 0, 0.1));
    }

    #[test]
    fn final_count_rounding() {
        assert_eq!(final_region_count(29, 0.8), 23);
        assert_eq!(final_region_count(29, 1.0), 29);
        assert_eq!(final_region_count(29, 0.7), 20);
        assert_eq!(final_region_count(1, 0.1), 1);
    }

    #[test]
    fn zeta_one_is_a_no_op() {
        let mut t = table(&[flat(6, 10.0), flat(6, 11.0), flat(6, 90.0)], &[(0, 1), (1, 2)]);
        let out = merge_mutual_most_similar(&mut t, 1.0, 0.1);
        assert_eq!(out.merges, 0);
        assert_eq!(t.live_count(), 3);
    }

    #[test]
    fn mutual_pair_merges() {
        let mut t = table(&[flat(6, 10.0), flat(6, 90.0)], &[(0, 1)]);
        let out = merge_mutual_most_similar(&mut t, 0.5, 0.1);
        assert_eq!(out.target, 1);
        assert_eq!(t.live_count(), 1);
    }

    #[test]
    fn equal_distances_merge_smallest_first() {
        // every L* value in its own bin: each pair has D_A = 1/3 and HD = 0
        let parts: Vec<RegionInput> = [7usize, 9, 3, 8]
            .iter()
            .enumerate()
            .map(|(k, &size)| flat(size, 10.0 + 20.0 * k as f64))
            .collect();
        let mut t = table(&parts, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        merge_by_importance(&mut t, 1, &MergeParams::default());
        let first = t.log()[0];
        assert_eq!((first.kept, first.absorbed), (1, 2));
        assert!((first.score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_jump_stops_the_stage() {
        let parts = [flat(10, 10.0), flat(10, 30.0), flat(10, 50.0)];
        let mut t = table(&parts, &[(0, 1), (1, 2)]);
        let out = merge_by_importance(&mut t, 3, &MergeParams::default());
        // after the first merge region 0 holds two equally filled L* bins, so
        // its entropy is (1 - 2 * 0.5^0.8) / (0.8 - 1) averaged over 3 channels
        let two_bin = (1.0 - 2.0 * 0.5f64.powf(0.8)) / -0.2;
        let next = 10.0 * (1.0 / 3.0 + 0.1 * two_bin / 3.0);
        assert_eq!(out.merges, 1);
        assert!((out.mi_max.unwrap() - 10.0 / 3.0).abs() < 1e-12);
        assert!((out.stopped_at.unwrap() - next).abs() < 1e-12);
        assert_eq!(t.live_count(), 2);
    }

    #[test]
    fn identical_pair_then_unbounded_jump() {
        let parts = [flat(10, 10.0), flat(10, 10.0), flat(10, 90.0)];
        let mut t = table(&parts, &[(0, 1), (1, 2)]);
        let out = merge_by_importance(&mut t, 3, &MergeParams::default());
        assert_eq!(out.merges, 1);
        assert_eq!(out.mi_max, Some(0.0));
        assert_eq!(t.live_count(), 2);
    }

    #[test]
    fn ratio_within_threshold_continues() {
        // MI sequence 1, 1, then 100/3: the second merge has ratio 1
        let parts = [flat(3, 10.0), flat(100, 30.0), flat(3, 50.0), flat(100, 70.0)];
        let mut t = table(&parts, &[(0, 1), (1, 2), (2, 3)]);
        let params = MergeParams {
            xi: 0.0,
            ..MergeParams::default()
        };
        let out = merge_by_importance(&mut t, 4, &params);
        assert_eq!(out.merges, 2);
        assert!((out.stopped_at.unwrap() - 100.0 / 3.0).abs() < 1e-9);
        assert_eq!(t.live_count(), 2);
        t.check_invariants();
    }

    #[test]
    fn trigger_not_reached_merges_down() {
        let parts = [flat(10, 10.0), flat(10, 90.0)];
        let mut t = table(&parts, &[(0, 1)]);
        let out = merge_by_importance(&mut t, 1, &MergeParams::default());
        assert_eq!(out.merges, 1);
        assert_eq!(t.live_count(), 1);
    }
}
