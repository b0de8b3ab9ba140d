//! Shared fixtures and brute-force reference implementations for the
//! integration and acceptance tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ser_segment::color::{color_distance, Lab, LabImage};
use ser_segment::features::{tsallis_from_counts, Binning};
use ser_segment::grid::{SerGrid, UNLABELED};
use ser_segment::merging::{MergeParams, RegionInput};
use ser_segment::seeding::SeedLabeling;
use ser_segment::{RgbImage, ScalarField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gray levels whose CIELAB lightness differs by 40.0 (to 0.002).
pub const DARK: [u8; 3] = [108, 108, 108];
pub const LIGHT: [u8; 3] = [214, 214, 214];

/// Vertical two-tone image: columns `< edge` dark, the rest light.
pub fn two_tone(w: u32, h: u32, edge: u32) -> RgbImage {
    RgbImage::from_fn(w, h, |x, _| image::Rgb(if x < edge { DARK } else { LIGHT }))
}

/// Random scene of overlapping flat rectangles and discs with mild noise.
pub fn random_scene(seed: u64, w: u32, h: u32) -> RgbImage {
    let mut r = rng(seed);
    let background = [r.random::<u8>(), r.random::<u8>(), r.random::<u8>()];
    let shapes: Vec<(bool, i64, i64, i64, i64, [u8; 3])> = (0..r.random_range(2..7))
        .map(|_| {
            (
                r.random_bool(0.5),
                r.random_range(0..w as i64),
                r.random_range(0..h as i64),
                r.random_range(6..w as i64 / 2),
                r.random_range(6..h as i64 / 2),
                [r.random::<u8>(), r.random::<u8>(), r.random::<u8>()],
            )
        })
        .collect();
    let noise = r.random_range(0..6i16);
    RgbImage::from_fn(w, h, |x, y| {
        let (x, y) = (x as i64, y as i64);
        let mut c = background;
        for &(disc, cx, cy, rx, ry, color) in &shapes {
            let inside = if disc {
                (x - cx).pow(2) * ry * ry + (y - cy).pow(2) * rx * rx <= rx * rx * ry * ry
            } else {
                (x - cx).abs() <= rx && (y - cy).abs() <= ry
            };
            if inside {
                c = color;
            }
        }
        let n = if noise == 0 { 0 } else { r.random_range(-noise..=noise) };
        image::Rgb(c.map(|v| (v as i16 + n).clamp(0, 255) as u8))
    })
}

/// Independent uniform noise in every channel of every pixel.
pub fn noise_image(seed: u64, w: u32, h: u32) -> RgbImage {
    let mut r = rng(seed);
    RgbImage::from_fn(w, h, |_, _| image::Rgb([r.random(), r.random(), r.random()]))
}

/// Tiled scene with per-tile colors, stripes in some tiles and pixel noise,
/// used as a stand-in for a natural photograph.
pub fn textured_scene(seed: u64, w: u32, h: u32) -> RgbImage {
    let mut r = rng(seed);
    let tiles: Vec<([u8; 3], u32)> = (0..64)
        .map(|_| ([r.random::<u8>(), r.random::<u8>(), r.random::<u8>()], r.random_range(0..4)))
        .collect();
    RgbImage::from_fn(w, h, |x, y| {
        let t = ((x / 61) + 8 * (y / 47)) as usize % tiles.len();
        let (color, stripes) = tiles[t];
        let stripe = if stripes > 0 && (x / (stripes + 1)) % 2 == 0 { 18 } else { 0 };
        let n: i16 = r.random_range(-10..=10);
        image::Rgb(color.map(|v| (v as i16 + stripe + n).clamp(0, 255) as u8))
    })
}

/// A random SER grid instance with integer Lab means and quantized
/// per-SER enhanced gradients, so that ties between candidate keys occur.
pub fn random_grid_instance(seed: u64) -> Option<(SerGrid, SeedLabeling)> {
    let mut r = rng(seed);
    let side = 4;
    let (w, h) = (r.random_range(4..=48usize), r.random_range(4..=48usize));
    let mut grid = SerGrid::new(w, h, side).unwrap();
    let (cols, rows) = (grid.cols(), grid.rows());
    let palette: Vec<Lab> = (0..r.random_range(1..5))
        .map(|_| Lab::new(r.random_range(0..=100) as f64, r.random_range(-40..=40) as f64, r.random_range(-40..=40) as f64))
        .collect();
    let ser_color: Vec<Lab> = (0..cols * rows).map(|_| palette[r.random_range(0..palette.len())]).collect();
    let ser_eg: Vec<f64> = (0..cols * rows).map(|_| r.random_range(0..5) as f64 / 4.0).collect();
    let lab = LabImage::new(w, h, (0..w * h).map(|i| ser_color[(i / w / side) * cols + (i % w) / side]).collect());
    let eg = ScalarField::from_fn(w, h, |x, y| ser_eg[(y / side) * cols + x / side]);
    let global = grid.compute_stats(&lab, &eg).unwrap();
    let beta = r.random_range(0.2..1.2);
    let seeds = ser_segment::seeding::detect_seeds(&grid, global, &ser_segment::seeding::SeedParams { beta }).ok()?;
    Some((grid, seeds))
}

fn grid_neighbors(id: usize, cols: usize, rows: usize) -> Vec<usize> {
    let (c, r) = (id % cols, id / cols);
    let mut v = Vec::new();
    if r > 0 {
        v.push(id - cols);
    }
    if c > 0 {
        v.push(id - 1);
    }
    if c + 1 < cols {
        v.push(id + 1);
    }
    if r + 1 < rows {
        v.push(id + cols);
    }
    v
}

/// Pixel-weighted mean color of the SERs carrying `label`, from scratch.
fn region_mean(grid: &SerGrid, labels: &[u32], label: u32) -> Lab {
    let mut sum = [0.0; 3];
    let mut n = 0.0;
    for (id, &l) in labels.iter().enumerate() {
        if l == label {
            let s = grid.ser(id);
            let k = s.pixel_count() as f64;
            sum[0] += s.mean.l * k;
            sum[1] += s.mean.a * k;
            sum[2] += s.mean.b * k;
            n += k;
        }
    }
    Lab::new(sum[0] / n, sum[1] / n, sum[2] / n)
}

/// Seeded growing by exhaustive re-sorting of the whole candidate list at
/// every step. Keys are frozen at insertion, ties go to the earlier
/// insertion, each SER is inserted at most once, and label ties go to the
/// smaller label.
pub fn oracle_grow(grid: &SerGrid, seeds: &SeedLabeling, omega: f64, lambda1: f64) -> Vec<u32> {
    let (cols, rows) = (grid.cols(), grid.rows());
    let n = cols * rows;
    let mut labels = seeds.labels.clone();
    let mut stored = vec![false; n];
    let mut list: Vec<(f64, u64, usize)> = Vec::new();
    let mut seq = 0u64;
    let gcd = |id: usize, mean: Lab| color_distance(grid.ser(id).mean, mean) + omega * grid.ser(id).eg_mean;

    for id in 0..n {
        if labels[id] != UNLABELED {
            continue;
        }
        let mut best: Option<(f64, u32)> = None;
        for nb in grid_neighbors(id, cols, rows) {
            let l = labels[nb];
            if l == UNLABELED {
                continue;
            }
            let d = gcd(id, region_mean(grid, &labels, l));
            if best.is_none_or(|(bd, bl)| d < bd || (d == bd && l < bl)) {
                best = Some((d, l));
            }
        }
        if let Some((d, _)) = best {
            list.push((d, seq, id));
            seq += 1;
            stored[id] = true;
        }
    }

    while !list.is_empty() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (_, _, x) = list.remove(0);
        let mut touching: Vec<u32> = grid_neighbors(x, cols, rows)
            .into_iter()
            .map(|nb| labels[nb])
            .filter(|&l| l != UNLABELED)
            .collect();
        touching.sort_unstable();
        touching.dedup();
        let mut best: Option<(f64, u32)> = None;
        for &l in &touching {
            let adj: Vec<Lab> = grid_neighbors(x, cols, rows)
                .into_iter()
                .filter(|&nb| labels[nb] == l)
                .map(|nb| grid.ser(nb).mean)
                .collect();
            let step = adj.iter().map(|&a| color_distance(grid.ser(x).mean, a)).sum::<f64>() / adj.len() as f64;
            let d = color_distance(grid.ser(x).mean, region_mean(grid, &labels, l)) + lambda1 * step;
            if best.is_none_or(|(bd, bl)| d < bd || (d == bd && l < bl)) {
                best = Some((d, l));
            }
        }
        let chosen = best.expect("candidate touches a region").1;
        labels[x] = chosen;
        let mean = region_mean(grid, &labels, chosen);
        for nb in grid_neighbors(x, cols, rows) {
            if labels[nb] == UNLABELED && !stored[nb] {
                list.push((gcd(nb, mean), seq, nb));
                seq += 1;
                stored[nb] = true;
            }
        }
    }
    labels
}

/// A random region table description: up to 8 regions with connected
/// random adjacency.
pub fn random_regions(seed: u64) -> (Vec<RegionInput>, Vec<(usize, usize)>, [(f64, f64); 3]) {
    let mut r = rng(seed);
    let n = r.random_range(2..=8usize);
    let parts: Vec<RegionInput> = (0..n)
        .map(|_| {
            let sers = r.random_range(1..=12usize);
            let center = [r.random_range(0.0..100.0), r.random_range(-60.0..60.0), r.random_range(-60.0..60.0)];
            let spread: f64 = r.random_range(0.0..25.0);
            let pixels = (0..sers * 16)
                .map(|_| {
                    Lab::new(
                        (center[0] + r.random_range(-spread..=spread)).clamp(0.0, 100.0),
                        center[1] + r.random_range(-spread..=spread),
                        center[2] + r.random_range(-spread..=spread),
                    )
                })
                .collect();
            RegionInput { ser_count: sers, pixels }
        })
        .collect();
    let mut adjacency = Vec::new();
    for i in 1..n {
        adjacency.push((r.random_range(0..i), i));
    }
    for _ in 0..r.random_range(0..n) {
        let (a, b) = (r.random_range(0..n), r.random_range(0..n));
        if a != b {
            adjacency.push((a, b));
        }
    }
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for p in parts.iter().flat_map(|p| &p.pixels) {
        for c in 0..3 {
            ranges[c].0 = ranges[c].0.min(p.channel(c));
            ranges[c].1 = ranges[c].1.max(p.channel(c));
        }
    }
    (parts, adjacency, ranges)
}

struct RawRegion {
    sers: usize,
    pixels: Vec<Lab>,
}

fn raw_entropy(pixels: &[Lab], binnings: &[Binning; 3], q: f64) -> f64 {
    (0..3)
        .map(|c| {
            let values: Vec<f64> = pixels.iter().map(|p| p.channel(c)).collect();
            tsallis_from_counts(&binnings[c].histogram(&values), q)
        })
        .sum::<f64>()
        / 3.0
}

fn raw_histogram_distance(a: &[Lab], b: &[Lab], binnings: &[Binning; 3]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    (0..3)
        .map(|c| {
            let ha = binnings[c].histogram(&a.iter().map(|p| p.channel(c)).collect::<Vec<_>>());
            let hb = binnings[c].histogram(&b.iter().map(|p| p.channel(c)).collect::<Vec<_>>());
            let rho: f64 = ha
                .iter()
                .zip(&hb)
                .map(|(&p, &q)| (f64::from(p) / na * f64::from(q) / nb).sqrt())
                .sum();
            (1.0 - rho).max(0.0).sqrt()
        })
        .sum::<f64>()
        / 3.0
}

/// Merge-importance merging recomputed from raw pixel lists at every step:
/// all adjacent pairs are scored from scratch and the minimum (importance,
/// smaller id, larger id) merges, keeping the smaller id. Returns the
/// sequence of `(kept, absorbed)` pairs.
pub fn oracle_merge_importance(
    parts: &[RegionInput],
    adjacency: &[(usize, usize)],
    ranges: [(f64, f64); 3],
    bins: usize,
    q: f64,
    desired: usize,
    params: &MergeParams,
) -> Vec<(usize, usize)> {
    let binnings = ranges.map(|r| Binning::new(r, bins));
    let mut regions: Vec<Option<RawRegion>> = parts
        .iter()
        .map(|p| Some(RawRegion { sers: p.ser_count, pixels: p.pixels.clone() }))
        .collect();
    let mut edges: Vec<(usize, usize)> = adjacency
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    let mut sequence = Vec::new();
    let mut mi_max: Option<f64> = None;

    loop {
        let live = regions.iter().filter(|r| r.is_some()).count();
        if live <= 1 {
            break;
        }
        edges.sort_unstable();
        edges.dedup();
        let best = edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (regions[i].as_ref().unwrap(), regions[j].as_ref().unwrap());
                let rd = raw_histogram_distance(&a.pixels, &b.pixels, &binnings)
                    + params.xi * (raw_entropy(&a.pixels, &binnings, q) - raw_entropy(&b.pixels, &binnings, q)).abs();
                (a.sers.min(b.sers) as f64 * rd, i, j)
            })
            .min_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
        let Some((mi, i, j)) = best else { break };
        let triggered = live <= desired;
        if triggered && mi_max.is_some_and(|m| mi > params.t_t * m) {
            break;
        }
        let gone = regions[j].take().unwrap();
        let keep = regions[i].as_mut().unwrap();
        keep.sers += gone.sers;
        keep.pixels.extend(gone.pixels);
        edges = edges
            .into_iter()
            .map(|(a, b)| (if a == j { i } else { a }, if b == j { i } else { b }))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        sequence.push((i, j));
        if triggered {
            mi_max = Some(mi_max.map_or(mi, |m| m.max(mi)));
        }
    }
    sequence
}

/// Number of columns `x` in row `y` where the label changes between `x - 1`
/// and `x`.
pub fn label_changes_in_row(labels: &[u32], w: usize, y: usize) -> Vec<usize> {
    (1..w).filter(|&x| labels[y * w + x] != labels[y * w + x - 1]).collect()
}
