//! Segmentation of continuous radar activity recordings.
//!
//! The range-map of a recording is cleaned up and searched for straight
//! lines with a discrete Radon transform. Sloped lines are translation
//! motions (walking), horizontal lines are in-place motions (sitting,
//! standing, bending). Consecutive lines intersect at transition times.
//! Inside each in-place interval a power burst curve computed from the
//! micro-Doppler spectrogram separates individual activities.
//!
//! Modules follow the processing order:
//! [`ingest`] → [`rangemap`] → [`radon`] → [`microdoppler`] → [`segmenter`],
//! with [`synth`] generating recordings with known ground truth and
//! [`pipeline`] running the whole chain from files.

pub mod error;
pub mod ingest;
pub mod microdoppler;
pub mod pipeline;
pub mod plot;
pub mod radon;
pub mod rangemap;
pub mod segmenter;
pub mod synth;

pub use error::{Error, Result};
