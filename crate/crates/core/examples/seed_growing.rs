//! Seeds and seeded region growing on the elemental-region grid, printed as
//! ASCII maps: `.` for non-seed regions, then the grown labels.
//!
//! ```bash
//! cargo run -p ser-segment --example seed_growing
//! ```

use ser_segment::color::{bilateral_filter, color_vector_magnitude, srgb_to_lab, BilateralParams};
use ser_segment::features::{enhance_gradient, lhdsee_gradient, GradientParams};
use ser_segment::grid::SerGrid;
use ser_segment::growing::{grow_regions, GrowParams};
use ser_segment::seeding::{detect_seeds, SeedParams};
use ser_segment::RgbImage;

fn label_char(label: u32) -> char {
    match label {
        0 => '.',
        l => char::from_digit(l % 36, 36).unwrap_or('#'),
    }
}

fn print_grid(grid: &SerGrid, labels: &[u32]) {
    for r in 0..grid.rows() {
        let line: String = (0..grid.cols()).map(|c| label_char(labels[r * grid.cols() + c])).collect();
        println!("  {line}");
    }
}

fn main() -> ser_segment::Result<()> {
    // three vertical bands and a square in the middle one
    let img = RgbImage::from_fn(96, 64, |x, y| {
        if (40..56).contains(&x) && (20..44).contains(&y) {
            image::Rgb([240, 220, 40])
        } else if x < 30 {
            image::Rgb([30, 60, 140])
        } else if x < 66 {
            image::Rgb([150, 150, 150])
        } else {
            image::Rgb([30, 130, 60])
        }
    });
    let lab = bilateral_filter(&srgb_to_lab(&img), &BilateralParams::default());
    let gp = GradientParams::default();
    let eg = enhance_gradient(&lhdsee_gradient(&color_vector_magnitude(&lab), &gp), &gp);

    let mut grid = SerGrid::new(96, 64, 4)?;
    let eg_global = grid.compute_stats(&lab, &eg)?;
    let seeds = detect_seeds(&grid, eg_global, &SeedParams::default())?;
    println!(
        "{}x{} elemental regions, seed threshold {:.4}, {} seed components",
        grid.cols(),
        grid.rows(),
        seeds.threshold,
        seeds.count
    );
    print_grid(&grid, &seeds.labels);

    let growth = grow_regions(&mut grid, &seeds, &GrowParams::default())?;
    println!("after growing ({} regions claimed {} non-seed cells):", seeds.count, growth.order.len());
    print_grid(&grid, &grid.labels);
    for (i, r) in growth.regions.iter().enumerate() {
        let m = r.mean();
        println!("  region {}: {} px, mean L*={:.1} a*={:.1} b*={:.1}", i + 1, r.count(), m.l, m.a, m.b);
    }
    Ok(())
}
