//! Batch tooling for foggy-road lane detection datasets.
//!
//! The crate turns clear road imagery into physically modeled foggy imagery
//! and provides the benchmark plumbing around it:
//!
//! 1. **fog** – atmospheric scattering model: dark channel, atmospheric
//!    light estimation, transmittance, foggy-image composition, batch driver.
//! 2. **depth** – per-pixel depth ingestion (16-bit PNG / PFM) plus a
//!    synthetic ground-plane fallback for images without depth maps.
//! 3. **annot** – lane annotation parsing, serialization, and geometric
//!    transforms for the two common wire formats.
//! 4. **edges** – edge-supervision label generation: Canny edges merged
//!    with rasterized lane strokes.
//! 5. **metrics** – IoU-over-rasterized-lanes F1 family and the
//!    point-tolerance accuracy metric.
//! 6. **dataset** – frame sampling, uniform resizing, scene tagging, and
//!    scene-balanced train/test splitting.

pub mod annot;
pub mod dataset;
pub mod depth;
pub mod edges;
pub mod error;
pub mod fog;
pub mod image;
pub mod mask;
pub mod metrics;
pub mod raster;

pub use annot::{Lane, LaneSet};
pub use depth::{DepthMap, GroundPlaneModel};
pub use error::{Error, Result};
pub use fog::FogParams;
pub use image::FloatImage;
pub use mask::BitMask;
