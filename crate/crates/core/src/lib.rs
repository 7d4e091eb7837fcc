//! Gait signature extraction and classification.
//!
//! Joint-angle trajectories are transformed with a complex Morlet CWT,
//! reduced to fixed-length scalogram features, and clustered with a Kohonen
//! self-organizing map whose U-Matrix exposes class structure.

pub mod error;
pub mod eval;
pub mod export;
pub mod features;
pub mod gait;
pub mod ingest;
pub mod pipeline;
pub mod som;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
