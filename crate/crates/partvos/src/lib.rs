//! Online video object segmentation by tracking parts.
//!
//! Given the first-frame mask of an object, the pipeline decomposes the
//! object into local rectangular parts, tracks each part frame to frame with
//! a normalized cross-correlation tracker, segments each tracked region of
//! interest with a per-video pixel classifier, and fuses the part segments
//! into a frame mask using similarity and confidence weights against the
//! first-frame parts. Frames are processed strictly causally: the mask for
//! frame `t` depends only on frames `0..=t`.

pub mod aggregation;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod part_gen;
pub mod pipeline;
pub mod refine;
pub mod roi_segment;
pub mod synth;
pub mod tracking;

pub use config::{AggMode, NccEngine, RunConfig};
pub use error::{Error, Result};
