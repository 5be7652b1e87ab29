//! PNG/JPEG image and mask IO.

use std::io::{Cursor, Write};
use std::path::Path;

use image::{ColorType, DynamicImage, ImageFormat as CodecFormat};

use super::raster::{BinaryMask, RasterImage};
use crate::corrupt::jpeg::encode_jpeg;
use crate::error::{Error, Result};

/// On-disk encoding for [`save_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    /// Baseline JPEG at an IJG quality in `1..=100`.
    Jpeg { quality: u8 },
}

impl ImageFormat {
    /// Picks PNG or JPEG (at `quality`) from the file extension.
    pub fn from_path(path: &Path, quality: u8) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("png") => Ok(ImageFormat::Png),
            Some("jpg") | Some("jpeg") => Ok(ImageFormat::Jpeg { quality }),
            _ => Err(Error::Format(format!(
                "cannot infer png/jpeg from {}",
                path.display()
            ))),
        }
    }
}

fn read_dynamic(path: &Path) -> Result<DynamicImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_dynamic(&bytes)
}

fn decode_dynamic(bytes: &[u8]) -> Result<DynamicImage> {
    let format = image::guess_format(bytes).map_err(|e| Error::Format(e.to_string()))?;
    if !matches!(format, CodecFormat::Png | CodecFormat::Jpeg) {
        return Err(Error::Format(format!("{format:?} is not PNG or JPEG")));
    }
    let img = image::load_from_memory_with_format(bytes, format)
        .map_err(|e| Error::Format(e.to_string()))?;
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::Format("zero-dimension image".into()));
    }
    Ok(img)
}

fn from_dynamic(img: DynamicImage) -> Result<RasterImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img.color() {
        ColorType::L8 | ColorType::La8 | ColorType::L16 | ColorType::La16 => {
            RasterImage::from_u8(w, h, 1, img.to_luma8().as_raw())
        }
        _ => RasterImage::from_u8(w, h, 3, img.to_rgb8().as_raw()),
    }
}

/// Decodes PNG or JPEG bytes.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    from_dynamic(decode_dynamic(bytes)?)
}

/// Loads a PNG or JPEG file, mapping 8-bit samples to `v / 255`.
///
/// Grayscale files load with one channel; alpha is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    from_dynamic(read_dynamic(path.as_ref())?)
}

/// Loads a mask image, converting to grayscale and binarizing at 128.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let img = read_dynamic(path.as_ref())?.to_luma8();
    BinaryMask::from_gray_u8(img.width() as usize, img.height() as usize, img.as_raw())
}

/// Encodes an image in memory.
pub fn encode_image(img: &RasterImage, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Png => {
            let color = if img.channels() == 1 {
                image::ExtendedColorType::L8
            } else {
                image::ExtendedColorType::Rgb8
            };
            let mut buf = Cursor::new(Vec::new());
            image::write_buffer_with_format(
                &mut buf,
                &img.to_u8(),
                img.width() as u32,
                img.height() as u32,
                color,
                CodecFormat::Png,
            )
            .map_err(|e| Error::Format(e.to_string()))?;
            Ok(buf.into_inner())
        }
        ImageFormat::Jpeg { quality } => encode_jpeg(img, quality),
    }
}

/// Writes `img` to `path` atomically (temp file in the same directory, then rename).
pub fn save_image(img: &RasterImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let bytes = encode_image(img, format)?;
    write_atomic(path.as_ref(), &bytes)
}

pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let img = RasterImage::from_u8(mask.width(), mask.height(), 1, &mask.to_u8())?;
    save_image(&img, path, ImageFormat::Png)
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place,
/// so readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
