//! Reading inputs and writing label maps, overlays, stage dumps and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, ImageBuffer, Luma, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::boundary::Segmentation;
use crate::color::{rgb_to_lab, Lab};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::SerGrid;
use crate::pipeline::{PipelineConfig, PipelineOutput};
use crate::seeding::SeedLabeling;

pub const BOUNDARY_COLOR: [u8; 3] = [255, 0, 0];

/// Load an image as 8-bit RGB. Alpha is dropped.
pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    image::open(path).map(|img| img.to_rgb8()).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

fn save(img: &DynamicImage, path: &Path) -> Result<()> {
    img.save(path).map_err(|source| Error::Encode {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Label map as a 16-bit grayscale image whose values are the region ids.
pub fn label_image(seg: &Segmentation) -> Result<ImageBuffer<Luma<u16>, Vec<u16>>> {
    if seg.region_count > usize::from(u16::MAX) {
        return Err(Error::TooManyRegions(seg.region_count));
    }
    let raw = seg.labels.iter().map(|&l| l as u16).collect();
    Ok(ImageBuffer::from_raw(seg.width as u32, seg.height as u32, raw).expect("buffer size matches"))
}

pub fn write_label_map(path: &Path, seg: &Segmentation) -> Result<()> {
    save(&DynamicImage::ImageLuma16(label_image(seg)?), path)
}

/// Read a label map written by [`write_label_map`]. 8-bit grayscale maps
/// are accepted with their values taken as ids.
pub fn read_label_map(path: &Path) -> Result<Segmentation> {
    let img = image::open(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let labels: Vec<u32> = match img {
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        _ => return Err(Error::param("labels", "label map must be a single-channel grayscale PNG")),
    };
    Segmentation::from_labels(w, h, labels)
}

/// Per-region entry of the label-map sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    /// Area in pixels.
    pub size: usize,
    pub mean_rgb: [f64; 3],
    pub mean_lab: Lab,
}

/// Size, mean RGB and mean Lab of every non-empty region, over `original`.
pub fn region_summaries(seg: &Segmentation, original: &RgbImage) -> BTreeMap<u32, RegionSummary> {
    let mut acc: BTreeMap<u32, (usize, [f64; 3], [f64; 3])> = BTreeMap::new();
    for (&l, p) in seg.labels.iter().zip(original.pixels()) {
        let lab = rgb_to_lab(p.0).to_array();
        let e = acc.entry(l).or_insert((0, [0.0; 3], [0.0; 3]));
        e.0 += 1;
        for c in 0..3 {
            e.1[c] += f64::from(p.0[c]);
            e.2[c] += lab[c];
        }
    }
    acc.into_iter()
        .map(|(l, (n, rgb, lab))| {
            let k = n as f64;
            (
                l,
                RegionSummary {
                    size: n,
                    mean_rgb: rgb.map(|v| v / k),
                    mean_lab: Lab::from_array(lab.map(|v| v / k)),
                },
            )
        })
        .collect()
}

pub fn region_summaries_json(seg: &Segmentation, original: &RgbImage) -> String {
    serde_json::to_string_pretty(&region_summaries(seg, original)).expect("summaries serialize")
}

/// `base` with the boundary pixels of `seg` painted in `color`.
pub fn boundary_overlay(base: &RgbImage, seg: &Segmentation, color: [u8; 3]) -> RgbImage {
    let mut out = base.clone();
    for (i, on) in seg.boundary_mask().into_iter().enumerate() {
        if on {
            out.put_pixel((i % seg.width) as u32, (i / seg.width) as u32, Rgb(color));
        }
    }
    out
}

/// The field rescaled to [0, 255] as an 8-bit grayscale image.
pub fn field_image(field: &ScalarField) -> GrayImage {
    GrayImage::from_raw(field.width() as u32, field.height() as u32, field.to_gray8()).expect("buffer size matches")
}

/// Per-SER mean enhanced gradient as gray, with seed SERs in red.
pub fn seed_overlay(grid: &SerGrid, seeds: &SeedLabeling) -> RgbImage {
    let per_ser = ScalarField::new(grid.len(), 1, grid.sers().iter().map(|s| s.eg_mean).collect()).to_gray8();
    let mut out = RgbImage::new(grid.width() as u32, grid.height() as u32);
    for (id, ser) in grid.sers().iter().enumerate() {
        let color = if seeds.is_seed[id] {
            BOUNDARY_COLOR
        } else {
            [per_ser[id]; 3]
        };
        for (x, y) in ser.pixels() {
            out.put_pixel(x as u32, y as u32, Rgb(color));
        }
    }
    out
}

/// One `key=value` line per stage count and complexity figure.
pub fn region_count_log(out: &PipelineOutput) -> String {
    let s = &out.stages;
    let c = s.counts;
    let mut log = String::new();
    let _ = writeln!(log, "f_eg={}", s.complexity.f_eg);
    let _ = writeln!(log, "f_te={}", s.complexity.f_te);
    let _ = writeln!(log, "f_a={}", s.complexity.f_a);
    let _ = writeln!(log, "estimated_regions={}", s.complexity.desired_regions);
    let _ = writeln!(log, "desired_regions={}", s.desired_regions);
    let _ = writeln!(log, "seeds={}", c.seeds);
    let _ = writeln!(log, "initial={}", c.initial);
    let _ = writeln!(log, "pr1={}", c.pr1);
    let _ = writeln!(log, "pr2={}", c.pr2);
    let _ = writeln!(log, "fpr={}", c.fpr);
    let _ = writeln!(log, "final={}", c.refined);
    log
}

/// Paths of the files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFiles {
    pub labels: PathBuf,
    pub sidecar: PathBuf,
    pub overlay: PathBuf,
    pub region_log: PathBuf,
    pub report_text: PathBuf,
    pub report_json: PathBuf,
    pub config: PathBuf,
    pub dumps: Vec<PathBuf>,
}

/// Write the label map, its sidecar, the final overlay, the region-count
/// log, the evaluation report and the effective configuration into `dir`.
/// With `dump_stages`, the intermediate images go there too.
pub fn write_outputs(
    dir: &Path,
    out: &PipelineOutput,
    original: &RgbImage,
    config: &PipelineConfig,
    dump_stages: bool,
) -> Result<OutputFiles> {
    create_dir(dir)?;
    let files = OutputFiles {
        labels: dir.join("labels.png"),
        sidecar: dir.join("labels.json"),
        overlay: dir.join("overlay.png"),
        region_log: dir.join("regions.log"),
        report_text: dir.join("report.txt"),
        report_json: dir.join("report.json"),
        config: dir.join("config.txt"),
        dumps: Vec::new(),
    };
    write_label_map(&files.labels, &out.segmentation)?;
    write_text(&files.sidecar, &region_summaries_json(&out.segmentation, original))?;
    let overlay = boundary_overlay(original, &out.segmentation, BOUNDARY_COLOR);
    save(&DynamicImage::ImageRgb8(overlay), &files.overlay)?;
    write_text(&files.region_log, &region_count_log(out))?;
    write_text(&files.report_text, &out.report.to_key_value())?;
    write_text(
        &files.report_json,
        &serde_json::to_string_pretty(&out.report).expect("report serializes"),
    )?;
    write_text(&files.config, &config.to_config_text())?;

    let mut files = files;
    if dump_stages {
        files.dumps = write_stage_dumps(dir, out, original)?;
    }
    Ok(files)
}

/// Grayscale feature images and per-stage boundary overlays.
pub fn write_stage_dumps(dir: &Path, out: &PipelineOutput, original: &RgbImage) -> Result<Vec<PathBuf>> {
    let s = &out.stages;
    let mut images: Vec<(&str, DynamicImage)> = vec![
        ("cv.png", DynamicImage::ImageLuma8(field_image(&s.cv))),
        ("gradient.png", DynamicImage::ImageLuma8(field_image(&s.gradient))),
        ("eg.png", DynamicImage::ImageLuma8(field_image(&s.enhanced_gradient))),
        ("entropy.png", DynamicImage::ImageLuma8(field_image(&s.entropy))),
        ("seeds.png", DynamicImage::ImageRgb8(seed_overlay(&s.grid, &s.seeds))),
    ];
    for (name, seg) in [
        ("initial.png", &s.initial),
        ("pr1.png", &s.pr1),
        ("pr2.png", &s.pr2),
        ("fpr.png", &s.fpr),
        ("final.png", &out.segmentation),
    ] {
        images.push((name, DynamicImage::ImageRgb8(boundary_overlay(original, seg, BOUNDARY_COLOR))));
    }
    let mut paths = Vec::with_capacity(images.len());
    for (name, img) in images {
        let path = dir.join(name);
        save(&img, &path)?;
        paths.push(path);
    }
    Ok(paths)
}
