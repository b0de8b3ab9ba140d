use std::collections::BTreeSet;

use crate::color::{color_distance, Lab, LabImage};
use crate::features::{tsallis_from_counts, Binning};
use crate::grid::{SerGrid, UNLABELED};

/// Which merge stage produced a [`MergeEvent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeStage {
    SmallRegions,
    Importance,
    MutualSimilarity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub stage: MergeStage,
    /// Region id that survives (always the smaller id of the pair).
    pub kept: usize,
    pub absorbed: usize,
    /// Stage-specific merge score: color distance, merge importance or
    /// region distance.
    pub score: f64,
}

/// Raw description of one region, for building a table directly.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionInput {
    pub ser_count: usize,
    pub pixels: Vec<Lab>,
}

#[derive(Debug, Clone)]
struct RegionData {
    ser_count: usize,
    pixel_count: usize,
    lab_sum: [f64; 3],
    hist: [Vec<u32>; 3],
    entropy: f64,
    adjacency: BTreeSet<usize>,
    alive: bool,
}

/// Region adjacency table: per-region aggregates, color histograms and
/// Tsallis entropies, plus the symmetric adjacency relation.
///
/// Region ids are dense indices starting at 0; SER label `l` maps to id
/// `l - 1`. Merging keeps the smaller id.
#[derive(Debug, Clone)]
pub struct RegionTable {
    regions: Vec<RegionData>,
    parent: Vec<usize>,
    binnings: [Binning; 3],
    q: f64,
    live: usize,
    log: Vec<MergeEvent>,
}

impl RegionTable {
    /// Build from a fully labeled SER grid with dense labels `1..=n`.
    /// Histograms span the global per-channel range of `lab`.
    pub fn from_grid(grid: &SerGrid, lab: &LabImage, bins: usize, q: f64) -> Self {
        let count = grid.labels.iter().copied().max().unwrap_or(0) as usize;
        let ranges = [lab.channel_range(0), lab.channel_range(1), lab.channel_range(2)];
        let binnings = ranges.map(|r| Binning::new(r, bins));
        let mut regions: Vec<RegionData> = (0..count).map(|_| RegionData::empty(bins)).collect();

        for (id, ser) in grid.sers().iter().enumerate() {
            let label = grid.labels[id];
            assert_ne!(label, UNLABELED, "SER {id} is unlabeled");
            let r = &mut regions[label as usize - 1];
            r.ser_count += 1;
            for (x, y) in ser.pixels() {
                r.add_pixel(lab.get(x, y), &binnings);
            }
            for nb in grid.neighbors(id) {
                let other = grid.labels[nb];
                if other != label {
                    r.adjacency.insert(other as usize - 1);
                }
            }
        }
        Self::finish(regions, binnings, q)
    }

    /// Build from explicit region contents and adjacency pairs.
    pub fn from_parts(parts: &[RegionInput], adjacency: &[(usize, usize)], ranges: [(f64, f64); 3], bins: usize, q: f64) -> Self {
        let binnings = ranges.map(|r| Binning::new(r, bins));
        let mut regions: Vec<RegionData> = parts
            .iter()
            .map(|part| {
                let mut r = RegionData::empty(bins);
                r.ser_count = part.ser_count;
                for &p in &part.pixels {
                    r.add_pixel(p, &binnings);
                }
                r
            })
            .collect();
        for &(a, b) in adjacency {
            if a != b {
                regions[a].adjacency.insert(b);
                regions[b].adjacency.insert(a);
            }
        }
        Self::finish(regions, binnings, q)
    }

    fn finish(mut regions: Vec<RegionData>, binnings: [Binning; 3], q: f64) -> Self {
        for r in &mut regions {
            r.entropy = entropy_of(&r.hist, q);
        }
        let n = regions.len();
        Self {
            regions,
            parent: (0..n).collect(),
            binnings,
            q,
            live: n,
            log: Vec::new(),
        }
    }

    /// Total number of ids ever allocated, live or not.
    pub fn capacity(&self) -> usize {
        self.regions.len()
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.regions[id].alive
    }

    pub fn live_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.regions.iter().enumerate().filter(|(_, r)| r.alive).map(|(i, _)| i)
    }

    /// Size in SERs.
    pub fn size(&self, id: usize) -> usize {
        self.regions[id].ser_count
    }

    pub fn pixel_count(&self, id: usize) -> usize {
        self.regions[id].pixel_count
    }

    pub fn mean(&self, id: usize) -> Lab {
        let r = &self.regions[id];
        let n = r.pixel_count.max(1) as f64;
        Lab::new(r.lab_sum[0] / n, r.lab_sum[1] / n, r.lab_sum[2] / n)
    }

    /// Mean of the three per-channel Tsallis entropies.
    pub fn entropy(&self, id: usize) -> f64 {
        self.regions[id].entropy
    }

    pub fn histogram(&self, id: usize, channel: usize) -> &[u32] {
        &self.regions[id].hist[channel]
    }

    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.regions[id].adjacency.iter().copied()
    }

    pub fn has_neighbors(&self, id: usize) -> bool {
        !self.regions[id].adjacency.is_empty()
    }

    pub fn log(&self) -> &[MergeEvent] {
        &self.log
    }

    /// Live region an id has been merged into.
    pub fn find(&self, mut id: usize) -> usize {
        while self.parent[id] != id {
            id = self.parent[id];
        }
        id
    }

    /// Euclidean distance between mean colors.
    pub fn color_distance(&self, i: usize, j: usize) -> f64 {
        color_distance(self.mean(i), self.mean(j))
    }

    /// Mean over L*, a*, b* of `sqrt(1 - ρ)`, with `ρ` the Bhattacharyya
    /// coefficient of the normalized channel histograms. In [0, 1].
    pub fn color_histogram_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.regions[i], &self.regions[j]);
        let (na, nb) = (a.pixel_count as f64, b.pixel_count as f64);
        if na == 0.0 || nb == 0.0 {
            return 1.0;
        }
        let mut total = 0.0;
        for c in 0..3 {
            let rho: f64 = a.hist[c]
                .iter()
                .zip(&b.hist[c])
                .map(|(&p, &q)| (f64::from(p) / na * f64::from(q) / nb).sqrt())
                .sum();
            total += (1.0 - rho).max(0.0).sqrt();
        }
        total / 3.0
    }

    pub fn homogeneity_distance(&self, i: usize, j: usize) -> f64 {
        (self.regions[i].entropy - self.regions[j].entropy).abs()
    }

    pub fn region_distance(&self, i: usize, j: usize, xi: f64) -> f64 {
        self.color_histogram_distance(i, j) + xi * self.homogeneity_distance(i, j)
    }

    /// Size of the smaller region (in SERs) times the region distance.
    pub fn merge_importance(&self, i: usize, j: usize, xi: f64) -> f64 {
        let smaller = self.size(i).min(self.size(j)) as f64;
        smaller * self.region_distance(i, j, xi)
    }

    /// Merge two live regions; the smaller id survives and is returned.
    pub fn merge(&mut self, i: usize, j: usize, stage: MergeStage, score: f64) -> usize {
        assert!(i != j && self.regions[i].alive && self.regions[j].alive);
        let (keep, gone) = if i < j { (i, j) } else { (j, i) };
        let absorbed = std::mem::replace(&mut self.regions[gone], RegionData::empty(0));

        for &n in &absorbed.adjacency {
            if n != keep {
                let adj = &mut self.regions[n].adjacency;
                adj.remove(&gone);
                adj.insert(keep);
            }
        }

        let k = &mut self.regions[keep];
        k.ser_count += absorbed.ser_count;
        k.pixel_count += absorbed.pixel_count;
        for c in 0..3 {
            k.lab_sum[c] += absorbed.lab_sum[c];
            for (dst, src) in k.hist[c].iter_mut().zip(&absorbed.hist[c]) {
                *dst += src;
            }
        }
        k.adjacency.extend(absorbed.adjacency.iter().copied().filter(|&n| n != keep));
        k.adjacency.remove(&gone);
        k.entropy = entropy_of(&k.hist, self.q);

        self.regions[gone].alive = false;
        self.parent[gone] = keep;
        self.live -= 1;
        self.log.push(MergeEvent {
            stage,
            kept: keep,
            absorbed: gone,
            score,
        });
        keep
    }

    /// Map 1-based input labels (as used to build the table) to dense labels
    /// `1..=live_count`, numbered by first appearance in `labels`.
    pub fn relabel(&self, labels: &[u32]) -> Vec<u32> {
        let mut dense = vec![UNLABELED; self.regions.len()];
        let mut next = 0u32;
        labels
            .iter()
            .map(|&l| {
                let root = self.find(l as usize - 1);
                if dense[root] == UNLABELED {
                    next += 1;
                    dense[root] = next;
                }
                dense[root]
            })
            .collect()
    }

    /// Panics if adjacency is asymmetric, reflexive or refers to dead ids.
    pub fn check_invariants(&self) {
        for (i, r) in self.regions.iter().enumerate() {
            if !r.alive {
                assert!(r.adjacency.is_empty(), "dead region {i} keeps neighbors");
                continue;
            }
            assert!(!r.adjacency.contains(&i), "region {i} is its own neighbor");
            for &n in &r.adjacency {
                assert!(self.regions[n].alive, "region {i} points at dead {n}");
                assert!(self.regions[n].adjacency.contains(&i), "asymmetric {i} -> {n}");
            }
        }
        assert_eq!(self.live, self.regions.iter().filter(|r| r.alive).count());
    }

    pub fn binnings(&self) -> &[Binning; 3] {
        &self.binnings
    }
}

impl RegionData {
    fn empty(bins: usize) -> Self {
        Self {
            ser_count: 0,
            pixel_count: 0,
            lab_sum: [0.0; 3],
            hist: [vec![0; bins], vec![0; bins], vec![0; bins]],
            entropy: 0.0,
            adjacency: BTreeSet::new(),
            alive: true,
        }
    }

    fn add_pixel(&mut self, p: Lab, binnings: &[Binning; 3]) {
        self.pixel_count += 1;
        for c in 0..3 {
            let v = p.channel(c);
            self.lab_sum[c] += v;
            self.hist[c][binnings[c].index(v)] += 1;
        }
    }
}

fn entropy_of(hist: &[Vec<u32>; 3], q: f64) -> f64 {
    hist.iter().map(|h| tsallis_from_counts(h, q)).sum::<f64>() / 3.0
}
