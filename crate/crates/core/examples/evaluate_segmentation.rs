//! Score segmentations of the same image with F′ and Q: the right answer,
//! under-segmentation and over-segmentation.
//!
//! ```bash
//! cargo run -p ser-segment --example evaluate_segmentation
//! ```

use ser_segment::boundary::Segmentation;
use ser_segment::evaluation::evaluate;
use ser_segment::RgbImage;

fn main() -> ser_segment::Result<()> {
    let (w, h) = (40usize, 30usize);
    let img = RgbImage::from_fn(w as u32, h as u32, |x, _| {
        if x < 20 { image::Rgb([200, 40, 40]) } else { image::Rgb([40, 40, 200]) }
    });
    let candidates: Vec<(&str, Vec<u32>)> = vec![
        ("two halves", (0..w * h).map(|i| if i % w < 20 { 1 } else { 2 }).collect()),
        ("one region", vec![1; w * h]),
        ("5x5 tiles", (0..w * h).map(|i| ((i / w) / 5 * 8 + (i % w) / 5 + 1) as u32).collect()),
        ("shifted border", (0..w * h).map(|i| if i % w < 24 { 1 } else { 2 }).collect()),
    ];
    println!("{:<16} {:>12} {:>12} {:>8}", "labeling", "F'", "Q", "regions");
    for (name, labels) in candidates {
        let seg = Segmentation::from_labels(w, h, labels)?;
        let r = evaluate(&seg, &img)?;
        println!("{name:<16} {:>12.6} {:>12.6} {:>8}", r.f_prime, r.q, r.region_count);
    }
    Ok(())
}
