//! Baseline (sequential, Huffman) JPEG encoder.
//!
//! Quantization uses the Annex K example tables scaled with the IJG
//! quality formula, Huffman coding uses the Annex K example tables, and
//! color images are stored as YCbCr with 4:2:0 chroma subsampling. The
//! output is a plain JFIF stream that any decoder accepts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{decode_image, RasterImage};

#[rustfmt::skip]
const STD_LUMA_QTABLE: [u8; 64] = [
    16, 11, 10, 16,  24,  40,  51,  61,
    12, 12, 14, 19,  26,  58,  60,  55,
    14, 13, 16, 24,  40,  57,  69,  56,
    14, 17, 22, 29,  51,  87,  80,  62,
    18, 22, 37, 56,  68, 109, 103,  77,
    24, 35, 55, 64,  81, 104, 113,  92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103,  99,
];

#[rustfmt::skip]
const STD_CHROMA_QTABLE: [u8; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Zigzag position -> natural (row-major) index.
#[rustfmt::skip]
const ZIGZAG: [usize; 64] = [
     0,  1,  8, 16,  9,  2,  3, 10,
    17, 24, 32, 25, 18, 11,  4,  5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13,  6,  7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
];

const LUMA_DC_BITS: [u8; 16] = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
const CHROMA_DC_BITS: [u8; 16] = [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0];
const DC_VALUES: [u8; 12] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

const LUMA_AC_BITS: [u8; 16] = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d];
const LUMA_AC_VALUES: [u8; 162] = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
    0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
    0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA,
];

const CHROMA_AC_BITS: [u8; 16] = [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77];
const CHROMA_AC_VALUES: [u8; 162] = [
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71,
    0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0,
    0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
    0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
    0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68,
    0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5,
    0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3,
    0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
    0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA,
];

fn check_quality(quality: u8) -> Result<()> {
    if !(1..=100).contains(&quality) {
        return Err(Error::param(format!(
            "jpeg quality must be in 1..=100, got {quality}"
        )));
    }
    Ok(())
}

/// Scales a base table with the IJG quality formula, clamped to baseline 8-bit entries.
pub fn scaled_quant_table(base: &[u8; 64], quality: u8) -> [u8; 64] {
    let q = u32::from(quality.clamp(1, 100));
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut out = [0u8; 64];
    for (o, &b) in out.iter_mut().zip(base) {
        *o = ((u32::from(b) * scale + 50) / 100).clamp(1, 255) as u8;
    }
    out
}

/// Luminance and chrominance quantization tables for `quality`.
pub fn quant_tables(quality: u8) -> ([u8; 64], [u8; 64]) {
    (
        scaled_quant_table(&STD_LUMA_QTABLE, quality),
        scaled_quant_table(&STD_CHROMA_QTABLE, quality),
    )
}

/// Canonical Huffman code table indexed by symbol: `(code, length)`.
struct HuffTable {
    codes: [(u16, u8); 256],
}

impl HuffTable {
    fn new(bits: &[u8; 16], values: &[u8]) -> Self {
        let mut codes = [(0u16, 0u8); 256];
        let mut code = 0u16;
        let mut k = 0;
        for (len, &count) in bits.iter().enumerate() {
            for _ in 0..count {
                codes[values[k] as usize] = (code, len as u8 + 1);
                code += 1;
                k += 1;
            }
            code <<= 1;
        }
        HuffTable { codes }
    }
}

struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl BitWriter {
    fn new(out: Vec<u8>) -> Self {
        BitWriter {
            out,
            acc: 0,
            nbits: 0,
        }
    }

    fn put(&mut self, code: u16, len: u8) {
        debug_assert!(len <= 16);
        self.acc = (self.acc << len) | u32::from(code);
        self.nbits += u32::from(len);
        while self.nbits >= 8 {
            let byte = (self.acc >> (self.nbits - 8)) as u8;
            self.out.push(byte);
            if byte == 0xFF {
                self.out.push(0x00);
            }
            self.nbits -= 8;
            self.acc &= (1 << self.nbits) - 1;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.put((1 << pad) - 1, pad as u8);
        }
        self.out
    }
}

/// Magnitude category and the appended bits for a DC difference or AC value.
#[inline]
fn category(v: i32) -> (u8, u16) {
    let mag = v.unsigned_abs();
    let size = (32 - mag.leading_zeros()) as u8;
    let bits = if v < 0 { v - 1 } else { v };
    let mask = if size == 0 { 0 } else { (1u32 << size) - 1 };
    (size, (bits as u32 & mask) as u16)
}

struct DctTable {
    cos: [[f64; 8]; 8],
}

impl DctTable {
    fn new() -> Self {
        let mut cos = [[0.0; 8]; 8];
        for (u, row) in cos.iter_mut().enumerate() {
            let cu = if u == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
            for (x, c) in row.iter_mut().enumerate() {
                *c = 0.5
                    * cu
                    * (((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI) / 16.0).cos();
            }
        }
        DctTable { cos }
    }

    /// Orthonormal 8×8 DCT-II of a level-shifted block.
    fn forward(&self, block: &[f64; 64]) -> [f64; 64] {
        let mut tmp = [0.0; 64];
        for y in 0..8 {
            for u in 0..8 {
                tmp[y * 8 + u] = (0..8).map(|x| self.cos[u][x] * block[y * 8 + x]).sum();
            }
        }
        let mut out = [0.0; 64];
        for v in 0..8 {
            for u in 0..8 {
                out[v * 8 + u] = (0..8).map(|y| self.cos[v][y] * tmp[y * 8 + u]).sum();
            }
        }
        out
    }
}

/// A component plane padded to whole blocks.
struct ComponentPlane {
    width: usize,
    data: Vec<f64>,
}

impl ComponentPlane {
    fn block(&self, bx: usize, by: usize) -> [f64; 64] {
        let mut b = [0.0; 64];
        for y in 0..8 {
            for x in 0..8 {
                b[y * 8 + x] = self.data[(by * 8 + y) * self.width + bx * 8 + x] - 128.0;
            }
        }
        b
    }
}

fn padded(width: usize, height: usize, pw: usize, ph: usize, f: impl Fn(usize, usize) -> f64) -> ComponentPlane {
    let mut data = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        for x in 0..pw {
            data.push(f(x.min(width - 1), y.min(height - 1)));
        }
    }
    ComponentPlane { width: pw, data }
}

fn downsample_2x2(p: &ComponentPlane, height: usize) -> ComponentPlane {
    let (w2, h2) = (p.width / 2, height / 2);
    let mut data = Vec::with_capacity(w2 * h2);
    for y in 0..h2 {
        for x in 0..w2 {
            let i = 2 * y * p.width + 2 * x;
            data.push((p.data[i] + p.data[i + 1] + p.data[i + p.width] + p.data[i + p.width + 1]) / 4.0);
        }
    }
    ComponentPlane { width: w2, data }
}

struct BlockCoder<'a> {
    dct: &'a DctTable,
    writer: BitWriter,
}

impl BlockCoder<'_> {
    fn encode(&mut self, block: &[f64; 64], qt: &[u8; 64], dc: &HuffTable, ac: &HuffTable, pred: &mut i32) {
        let coeffs = self.dct.forward(block);
        let mut zz = [0i32; 64];
        for (k, &nat) in ZIGZAG.iter().enumerate() {
            zz[k] = (coeffs[nat] / f64::from(qt[nat])).round() as i32;
        }

        let (size, bits) = category(zz[0] - *pred);
        *pred = zz[0];
        let (code, len) = dc.codes[size as usize];
        self.writer.put(code, len);
        if size > 0 {
            self.writer.put(bits, size);
        }

        let mut run = 0;
        for &v in &zz[1..] {
            if v == 0 {
                run += 1;
                continue;
            }
            while run > 15 {
                let (code, len) = ac.codes[0xF0];
                self.writer.put(code, len);
                run -= 16;
            }
            let (size, bits) = category(v);
            let (code, len) = ac.codes[(run << 4) | size as usize];
            self.writer.put(code, len);
            self.writer.put(bits, size);
            run = 0;
        }
        if run > 0 {
            let (code, len) = ac.codes[0x00];
            self.writer.put(code, len);
        }
    }
}

fn push_segment(out: &mut Vec<u8>, marker: u8, payload: &[u8]) {
    out.extend_from_slice(&[0xFF, marker]);
    out.extend_from_slice(&((payload.len() + 2) as u16).to_be_bytes());
    out.extend_from_slice(payload);
}

fn dht_payload(class: u8, id: u8, bits: &[u8; 16], values: &[u8]) -> Vec<u8> {
    let mut p = vec![(class << 4) | id];
    p.extend_from_slice(bits);
    p.extend_from_slice(values);
    p
}

/// Chroma sampling layout for color images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChromaSubsampling {
    /// Full-resolution chroma.
    Yuv444,
    /// Chroma averaged over 2×2 blocks.
    Yuv420,
}

/// Quality at and above which [`ChromaSubsampling::for_quality`] keeps full chroma.
pub const FULL_CHROMA_QUALITY: u8 = 90;

impl ChromaSubsampling {
    pub fn for_quality(quality: u8) -> Self {
        if quality >= FULL_CHROMA_QUALITY {
            ChromaSubsampling::Yuv444
        } else {
            ChromaSubsampling::Yuv420
        }
    }
}

/// Encodes `img` as a baseline JFIF stream at the given IJG quality, with
/// the chroma layout picked by [`ChromaSubsampling::for_quality`].
pub fn encode_jpeg(img: &RasterImage, quality: u8) -> Result<Vec<u8>> {
    encode_jpeg_with(img, quality, ChromaSubsampling::for_quality(quality))
}

pub fn encode_jpeg_with(img: &RasterImage, quality: u8, subsampling: ChromaSubsampling) -> Result<Vec<u8>> {
    check_quality(quality)?;
    let (w, h) = (img.width(), img.height());
    if w > u16::MAX as usize || h > u16::MAX as usize {
        return Err(Error::param("image too large for baseline JPEG"));
    }
    let (luma_q, chroma_q) = quant_tables(quality);
    let color = img.channels() == 3;
    let bytes = img.to_u8();
    let c = img.channels();
    let sample = |x: usize, y: usize, ch: usize| f64::from(bytes[(y * w + x) * c + ch]);

    let mut out = vec![0xFF, 0xD8];
    push_segment(
        &mut out,
        0xE0,
        &[b'J', b'F', b'I', b'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0],
    );

    let mut dqt = vec![0u8];
    dqt.extend(ZIGZAG.iter().map(|&n| luma_q[n]));
    if color {
        dqt.push(1);
        dqt.extend(ZIGZAG.iter().map(|&n| chroma_q[n]));
    }
    push_segment(&mut out, 0xDB, &dqt);

    let mut sof = vec![8];
    sof.extend_from_slice(&(h as u16).to_be_bytes());
    sof.extend_from_slice(&(w as u16).to_be_bytes());
    if color {
        let y_factor = match subsampling {
            ChromaSubsampling::Yuv420 => 0x22,
            ChromaSubsampling::Yuv444 => 0x11,
        };
        sof.extend_from_slice(&[3, 1, y_factor, 0, 2, 0x11, 1, 3, 0x11, 1]);
    } else {
        sof.extend_from_slice(&[1, 1, 0x11, 0]);
    }
    push_segment(&mut out, 0xC0, &sof);

    let mut dht = dht_payload(0, 0, &LUMA_DC_BITS, &DC_VALUES);
    dht.extend(dht_payload(1, 0, &LUMA_AC_BITS, &LUMA_AC_VALUES));
    if color {
        dht.extend(dht_payload(0, 1, &CHROMA_DC_BITS, &DC_VALUES));
        dht.extend(dht_payload(1, 1, &CHROMA_AC_BITS, &CHROMA_AC_VALUES));
    }
    push_segment(&mut out, 0xC4, &dht);

    if color {
        push_segment(&mut out, 0xDA, &[3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0]);
    } else {
        push_segment(&mut out, 0xDA, &[1, 1, 0x00, 0, 63, 0]);
    }

    let luma_dc = HuffTable::new(&LUMA_DC_BITS, &DC_VALUES);
    let luma_ac = HuffTable::new(&LUMA_AC_BITS, &LUMA_AC_VALUES);
    let dct = DctTable::new();
    let mut coder = BlockCoder {
        dct: &dct,
        writer: BitWriter::new(out),
    };

    if color {
        let chroma_dc = HuffTable::new(&CHROMA_DC_BITS, &DC_VALUES);
        let chroma_ac = HuffTable::new(&CHROMA_AC_BITS, &CHROMA_AC_VALUES);
        let mcu = match subsampling {
            ChromaSubsampling::Yuv420 => 16,
            ChromaSubsampling::Yuv444 => 8,
        };
        let (pw, ph) = (w.div_ceil(mcu) * mcu, h.div_ceil(mcu) * mcu);
        let rgb = |x, y| (sample(x, y, 0), sample(x, y, 1), sample(x, y, 2));
        let y_plane = padded(w, h, pw, ph, |x, y| {
            let (r, g, b) = rgb(x, y);
            0.299 * r + 0.587 * g + 0.114 * b
        });
        let cb_full = padded(w, h, pw, ph, |x, y| {
            let (r, g, b) = rgb(x, y);
            -0.168_736 * r - 0.331_264 * g + 0.5 * b + 128.0
        });
        let cr_full = padded(w, h, pw, ph, |x, y| {
            let (r, g, b) = rgb(x, y);
            0.5 * r - 0.418_688 * g - 0.081_312 * b + 128.0
        });
        let mut preds = [0i32; 3];
        match subsampling {
            ChromaSubsampling::Yuv420 => {
                let cb = downsample_2x2(&cb_full, ph);
                let cr = downsample_2x2(&cr_full, ph);
                for my in 0..ph / 16 {
                    for mx in 0..pw / 16 {
                        for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                            let b = y_plane.block(2 * mx + dx, 2 * my + dy);
                            coder.encode(&b, &luma_q, &luma_dc, &luma_ac, &mut preds[0]);
                        }
                        coder.encode(&cb.block(mx, my), &chroma_q, &chroma_dc, &chroma_ac, &mut preds[1]);
                        coder.encode(&cr.block(mx, my), &chroma_q, &chroma_dc, &chroma_ac, &mut preds[2]);
                    }
                }
            }
            ChromaSubsampling::Yuv444 => {
                for by in 0..ph / 8 {
                    for bx in 0..pw / 8 {
                        coder.encode(&y_plane.block(bx, by), &luma_q, &luma_dc, &luma_ac, &mut preds[0]);
                        coder.encode(&cb_full.block(bx, by), &chroma_q, &chroma_dc, &chroma_ac, &mut preds[1]);
                        coder.encode(&cr_full.block(bx, by), &chroma_q, &chroma_dc, &chroma_ac, &mut preds[2]);
                    }
                }
            }
        }
    } else {
        let (pw, ph) = (w.div_ceil(8) * 8, h.div_ceil(8) * 8);
        let plane = padded(w, h, pw, ph, |x, y| sample(x, y, 0));
        let mut pred = 0;
        for by in 0..ph / 8 {
            for bx in 0..pw / 8 {
                coder.encode(&plane.block(bx, by), &luma_q, &luma_dc, &luma_ac, &mut pred);
            }
        }
    }

    let mut out = coder.writer.finish();
    out.extend_from_slice(&[0xFF, 0xD9]);
    Ok(out)
}

/// Round-trips `img` through baseline JPEG at `quality`.
pub fn jpeg_compress(img: &RasterImage, quality: u8) -> Result<RasterImage> {
    let bytes = encode_jpeg(img, quality)?;
    decode_image(&bytes)
}

/// Peak signal-to-noise ratio in dB on the 8-bit scale (`inf` for identical images).
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::dims("psnr inputs differ in shape"));
    }
    let (qa, qb) = (a.to_u8(), b.to_u8());
    let mse = qa
        .iter()
        .zip(&qb)
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum::<f64>()
        / qa.len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize, c: usize) -> RasterImage {
        let mut data = Vec::with_capacity(w * h * c);
        for y in 0..h {
            for x in 0..w {
                for ch in 0..c {
                    let v = 0.5
                        + 0.3 * ((x as f64 * 0.21 + ch as f64).sin() * (y as f64 * 0.13).cos())
                        + 0.1 * (((x * 7 + y * 13 + ch * 3) % 11) as f64 / 11.0 - 0.5);
                    data.push(v.clamp(0.0, 1.0));
                }
            }
        }
        RasterImage::new(w, h, c, data).unwrap()
    }

    #[test]
    fn quality_scaling_matches_ijg() {
        let (l50, _) = quant_tables(50);
        assert_eq!(l50, STD_LUMA_QTABLE);
        let (l80, c80) = quant_tables(80);
        // scale 40: (16*40+50)/100 = 6
        assert_eq!(l80[0], 6);
        assert_eq!(c80[63], 40);
        let (l100, _) = quant_tables(100);
        assert!(l100.iter().all(|&q| q == 1));
        let (l1, _) = quant_tables(1);
        assert!(l1.iter().all(|&q| q == 255));
    }

    #[test]
    fn category_bits() {
        assert_eq!(category(0), (0, 0));
        assert_eq!(category(1), (1, 1));
        assert_eq!(category(-1), (1, 0));
        assert_eq!(category(-3), (2, 0));
        assert_eq!(category(5), (3, 5));
        assert_eq!(category(-5), (3, 2));
    }

    #[test]
    fn decodes_with_standard_decoder() {
        for (w, h, c) in [(8, 8, 1), (17, 9, 3), (40, 33, 3), (5, 3, 1)] {
            let img = textured(w, h, c);
            let back = jpeg_compress(&img, 90).unwrap();
            assert_eq!((back.width(), back.height(), back.channels()), (w, h, c));
            assert!(psnr(&img, &back).unwrap() > 28.0);
        }
    }

    #[test]
    fn rejects_bad_quality() {
        let img = textured(8, 8, 1);
        assert!(jpeg_compress(&img, 0).is_err());
        assert!(jpeg_compress(&img, 101).is_err());
    }

    #[test]
    fn lower_quality_lowers_psnr() {
        let img = textured(64, 48, 3);
        let lo = psnr(&img, &jpeg_compress(&img, 10).unwrap()).unwrap();
        let hi = psnr(&img, &jpeg_compress(&img, 95).unwrap()).unwrap();
        assert!(lo < hi, "{lo} vs {hi}");
    }

    #[test]
    fn deterministic_bytes() {
        let img = textured(33, 20, 3);
        assert_eq!(encode_jpeg(&img, 80).unwrap(), encode_jpeg(&img, 80).unwrap());
    }

    #[test]
    fn mid_gray_survives_q80() {
        let img = RasterImage::filled(64, 64, 3, 0.5).unwrap();
        let back = jpeg_compress(&img, 80).unwrap();
        assert!(psnr(&img, &back).unwrap() > 50.0);
    }
}
