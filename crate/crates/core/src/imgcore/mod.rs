//! Image and mask domain types, IO, and exchange compositing.

pub mod exchange;
pub mod filter;
pub mod io;
pub mod raster;
pub mod resize;

pub use exchange::{alpha_matte, diff_map, edge_band, exchange, mask_boundary, mask_ratio, soft_exchange};
pub use io::{decode_image, encode_image, load_image, load_mask, save_image, save_mask, write_atomic, ImageFormat};
pub use raster::{quantize_u8, AlphaMatte, BinaryMask, DiffMap, Plane, RasterImage, MASK_THRESHOLD};
pub use resize::{resize_bilinear, resize_mask_nearest};
