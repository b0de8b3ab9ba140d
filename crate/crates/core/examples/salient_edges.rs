//! Feature images of a synthetic scene: color-vector magnitude, the
//! histogram-difference gradient, its enhanced form, the Tsallis entropy
//! image and the resulting complexity estimate.
//!
//! Pass a directory to also save the images as PNG:
//!
//! ```bash
//! cargo run -p ser-segment --example salient_edges -- /tmp/edges
//! ```

use std::path::PathBuf;

use ser_segment::color::{bilateral_filter, color_vector_magnitude, srgb_to_lab, BilateralParams};
use ser_segment::features::{
    entropy_field, estimate_complexity, enhance_gradient, lhdsee_gradient, ComplexityParams, EntropyParams,
    GradientParams,
};
use ser_segment::io::field_image;
use ser_segment::RgbImage;

fn scene() -> RgbImage {
    RgbImage::from_fn(96, 64, |x, y| {
        let (dx, dy) = (x as i32 - 64, y as i32 - 32);
        if dx * dx + dy * dy < 18 * 18 {
            image::Rgb([200, 60, 40])
        } else if x < 32 {
            // fine stripes give the left side some texture
            if (x / 2) % 2 == 0 { image::Rgb([40, 90, 160]) } else { image::Rgb([60, 110, 180]) }
        } else {
            image::Rgb([90, 160, 90])
        }
    })
}

fn main() -> ser_segment::Result<()> {
    let img = scene();
    let lab = bilateral_filter(&srgb_to_lab(&img), &BilateralParams::default());
    let cv = color_vector_magnitude(&lab);
    let gp = GradientParams::default();
    let g = lhdsee_gradient(&cv, &gp);
    let eg = enhance_gradient(&g, &gp);
    let te = entropy_field(&cv, &EntropyParams::default());

    let (glo, ghi) = g.min_max();
    let (elo, ehi) = eg.min_max();
    println!("gradient range [{glo:.3}, {ghi:.3}], enhanced [{elo:.4}, {ehi:.4}]");
    println!("gradient along row 32:");
    for x in (0..96).step_by(4) {
        print!("{:.2} ", g.get(x, 32));
    }
    println!();

    let c = estimate_complexity(&eg, &te, &ComplexityParams::default())?;
    println!(
        "fractal dimensions: gradient {:.3}, entropy {:.3}; desired regions {}",
        c.f_eg, c.f_te, c.desired_regions
    );

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir).expect("create output directory");
        for (name, field) in [("cv", &cv), ("gradient", &g), ("eg", &eg), ("entropy", &te)] {
            field_image(field).save(dir.join(format!("{name}.png"))).expect("write png");
        }
        println!("images written to {}", dir.display());
    }
    Ok(())
}
