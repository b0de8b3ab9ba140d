//! Pixel-accurate boundary refinement: a label map whose border sits two
//! pixels off the true color edge is pulled onto it, one pixel per pass.
//!
//! ```bash
//! cargo run -p ser-segment --example boundary_refinement
//! ```

use ser_segment::boundary::{refine_boundaries, RefineParams, Segmentation};
use ser_segment::{Lab, LabImage};

fn first_right_label_column(seg: &Segmentation, y: usize) -> usize {
    (0..seg.width).find(|&x| seg.label(x, y) == 2).unwrap_or(seg.width)
}

fn main() -> ser_segment::Result<()> {
    let (w, h, edge) = (32, 16, 13);
    let pixels = (0..w * h)
        .map(|i| if i % w < edge { Lab::new(35.0, 10.0, 5.0) } else { Lab::new(75.0, -5.0, 20.0) })
        .collect();
    let lab = LabImage::new(w, h, pixels);

    // the coarse labeling follows a 4-pixel lattice: border at x = 16
    let coarse = Segmentation::from_labels(w, h, (0..w * h).map(|i| if i % w < 16 { 1 } else { 2 }).collect())?;
    println!("true edge at x = {edge}; coarse border at x = {}", first_right_label_column(&coarse, 0));
    for passes in 0..=3 {
        let refined = refine_boundaries(&coarse, &lab, &RefineParams { passes, ..Default::default() });
        println!("after {passes} pass(es): border at x = {}", first_right_label_column(&refined, 0));
    }
    Ok(())
}
