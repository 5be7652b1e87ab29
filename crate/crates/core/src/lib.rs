//! Inpainting exchange and detector-evaluation toolkit.
//!
//! Covers mask-guided compositing of generated content back into originals,
//! spectral and wavelet diagnostics, image corruptions, correlation
//! statistics, detector scoring, and a synthetic simulation of the
//! reconstruction bottleneck.

pub mod corrupt;
pub mod error;
pub mod evalharness;
pub mod imgcore;
pub mod spectra;
pub mod stats;
pub mod theoryval;

pub use error::{Error, Result};
pub use imgcore::{AlphaMatte, BinaryMask, DiffMap, Plane, RasterImage};
