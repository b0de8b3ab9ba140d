//! Convert a few sRGB colors to CIELAB, measure color differences, and show
//! the bilateral filter smoothing noise while keeping a step edge.
//!
//! ```bash
//! cargo run -p ser-segment --example color_conversion
//! ```

use ser_segment::color::{bilateral_filter, color_distance, lab_to_rgb8, rgb_to_lab, srgb_to_lab, BilateralParams};
use ser_segment::RgbImage;

fn main() {
    for rgb in [[255, 255, 255], [0, 0, 0], [255, 0, 0], [30, 144, 255]] {
        let lab = rgb_to_lab(rgb);
        println!(
            "{rgb:?} -> L*={:.2} a*={:.2} b*={:.2} -> back {:?}",
            lab.l,
            lab.a,
            lab.b,
            lab_to_rgb8(lab)
        );
    }
    let red = rgb_to_lab([255, 0, 0]);
    let orange = rgb_to_lab([255, 128, 0]);
    println!("distance red/orange = {:.2}", color_distance(red, orange));

    // dark and light halves with a deterministic +-6 ripple on each pixel
    let img = RgbImage::from_fn(40, 20, |x, y| {
        let base: i32 = if x < 20 { 60 } else { 180 };
        let ripple = ((x * 7 + y * 13) % 5) as i32 * 3 - 6;
        image::Rgb([(base + ripple) as u8; 3])
    });
    let lab = srgb_to_lab(&img);
    let smooth = bilateral_filter(&lab, &BilateralParams::default());
    let row = |im: &ser_segment::LabImage| (14..26).map(|x| format!("{:.1}", im.get(x, 10).l)).collect::<Vec<_>>();
    println!("L* before: {}", row(&lab).join(" "));
    println!("L* after:  {}", row(&smooth).join(" "));
}
