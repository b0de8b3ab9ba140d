//! Automatic color image segmentation by seeded region growing and merging
//! on square elemental regions (SERs).
//!
//! The pipeline converts the image to CIELAB and smooths it with a bilateral
//! filter, derives a histogram-based salient-edge gradient and a Tsallis
//! entropy image, picks seed SERs where the enhanced gradient is low, grows
//! them over the remaining SERs, merges the resulting regions in three
//! stages and finally moves the region boundaries to pixel accuracy.
//!
//! [`pipeline::segment`] runs everything with the default parameters; each
//! stage is also usable on its own.

pub mod boundary;
pub mod color;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod field;
pub mod grid;
pub mod growing;
pub mod io;
pub mod merging;
pub mod pipeline;
pub mod seeding;

pub use color::{Lab, LabImage};
pub use error::{Error, Result};
pub use field::ScalarField;
pub use image::RgbImage;
pub use pipeline::{segment, PipelineConfig, PipelineOutput};

