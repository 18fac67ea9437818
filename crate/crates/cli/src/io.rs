//! Reading and writing images as `[0, 1]` float rasters.
//!
//! PNG (8- and 16-bit, any color type) goes through the `png` crate. Binary
//! PNM (P5 grayscale, P6 RGB) is handled here. Integer samples are mapped to
//! floats by dividing by the format's maximum sample value.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use amplipix_core::{clip01, ImageBuf};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("PNG decode failed: {0}")]
    PngDecode(#[from] png::DecodingError),
    #[error("PNG encode failed: {0}")]
    PngEncode(#[from] png::EncodingError),
    #[error("malformed PNM: {0}")]
    Pnm(&'static str),
    #[error("unsupported image format for {0} (expected .png, .ppm, .pgm or .pnm)")]
    UnsupportedFormat(PathBuf),
    #[error("unsupported PNG layout: {0:?}")]
    PngLayout(png::ColorType),
    #[error(transparent)]
    Image(#[from] amplipix_core::Error),
}

/// File formats recognised by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Png,
    Pnm,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(Format::Png),
            "ppm" | "pgm" | "pnm" => Some(Format::Pnm),
            _ => None,
        }
    }
}

/// Sample depth used when encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Depth {
    #[default]
    Eight,
    Sixteen,
}

impl Depth {
    fn max_value(self) -> f64 {
        match self {
            Depth::Eight => 255.0,
            Depth::Sixteen => 65535.0,
        }
    }
}

pub fn read_image(path: &Path) -> Result<ImageBuf, IoError> {
    let format = Format::from_path(path).ok_or_else(|| IoError::UnsupportedFormat(path.into()))?;
    let bytes = fs::read(path).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })?;
    decode(&bytes, format)
}

pub fn write_image(path: &Path, img: &ImageBuf, depth: Depth) -> Result<(), IoError> {
    let format = Format::from_path(path).ok_or_else(|| IoError::UnsupportedFormat(path.into()))?;
    let bytes = encode(img, format, depth)?;
    fs::write(path, bytes).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })
}

pub fn decode(bytes: &[u8], format: Format) -> Result<ImageBuf, IoError> {
    match format {
        Format::Png => decode_png(bytes),
        Format::Pnm => decode_pnm(bytes),
    }
}

/// Encodes after clipping to `[0, 1]`, so samples never wrap.
pub fn encode(img: &ImageBuf, format: Format, depth: Depth) -> Result<Vec<u8>, IoError> {
    let samples = quantize(&clip01(img), depth);
    match format {
        Format::Png => encode_png(img, &samples, depth),
        Format::Pnm => Ok(encode_pnm(img, &samples, depth)),
    }
}

fn quantize(img: &ImageBuf, depth: Depth) -> Vec<u16> {
    let max = depth.max_value();
    img.data().iter().map(|v| (v * max).round() as u16).collect()
}

fn from_samples(
    height: usize,
    width: usize,
    channels_in: usize,
    keep: usize,
    samples: impl Iterator<Item = u16>,
    max: f64,
) -> Result<ImageBuf, IoError> {
    let data: Vec<f64> = samples
        .enumerate()
        .filter(|(i, _)| i % channels_in < keep)
        .map(|(_, v)| v as f64 / max)
        .collect();
    Ok(ImageBuf::new(height, width, keep, data)?)
}

fn decode_png(bytes: &[u8]) -> Result<ImageBuf, IoError> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info()?;
    let size = reader
        .output_buffer_size()
        .ok_or(IoError::Pnm("PNG too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf)?;
    buf.truncate(info.buffer_size());
    let (h, w) = (info.height as usize, info.width as usize);

    // alpha is dropped
    let (channels_in, keep) = match info.color_type {
        png::ColorType::Grayscale => (1, 1),
        png::ColorType::GrayscaleAlpha => (2, 1),
        png::ColorType::Rgb => (3, 3),
        png::ColorType::Rgba => (4, 3),
        other => return Err(IoError::PngLayout(other)),
    };
    match info.bit_depth {
        png::BitDepth::Sixteen => {
            let samples = buf.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]]));
            from_samples(h, w, channels_in, keep, samples, 65535.0)
        }
        _ => from_samples(h, w, channels_in, keep, buf.iter().map(|&b| b as u16), 255.0),
    }
}

fn encode_png(img: &ImageBuf, samples: &[u16], depth: Depth) -> Result<Vec<u8>, IoError> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        encoder.set_color(if img.channels() == 1 {
            png::ColorType::Grayscale
        } else {
            png::ColorType::Rgb
        });
        encoder.set_depth(match depth {
            Depth::Eight => png::BitDepth::Eight,
            Depth::Sixteen => png::BitDepth::Sixteen,
        });
        let mut writer = encoder.write_header()?;
        writer.write_image_data(&sample_bytes(samples, depth))?;
        writer.finish()?;
    }
    Ok(out)
}

fn sample_bytes(samples: &[u16], depth: Depth) -> Vec<u8> {
    match depth {
        Depth::Eight => samples.iter().map(|&v| v as u8).collect(),
        Depth::Sixteen => samples.iter().flat_map(|v| v.to_be_bytes()).collect(),
    }
}

fn encode_pnm(img: &ImageBuf, samples: &[u16], depth: Depth) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let maxval = depth.max_value() as u32;
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height()).into_bytes();
    out.extend(sample_bytes(samples, depth));
    out
}

/// Header tokenizer: whitespace separated, `#` comments to end of line.
struct PnmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PnmHeader<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<usize, IoError> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(IoError::Pnm("expected a header number"))
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<ImageBuf, IoError> {
    let channels = match bytes.get(..2) {
        Some(b"P6") => 3,
        Some(b"P5") => 1,
        _ => return Err(IoError::Pnm("only binary P5/P6 files are supported")),
    };
    let mut header = PnmHeader { bytes, pos: 2 };
    let width = header.number()?;
    let height = header.number()?;
    let maxval = header.number()?;
    if width == 0 || height == 0 {
        return Err(IoError::Pnm("zero image dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(IoError::Pnm("maxval must be in 1..=65535"));
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(header.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(IoError::Pnm("missing whitespace after maxval"));
    }
    let raster = &bytes[header.pos + 1..];
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or(IoError::Pnm("image too large"))?;
    let wide = maxval > 255;
    let needed = if wide { count * 2 } else { count };
    if raster.len() < needed {
        return Err(IoError::Pnm("truncated raster"));
    }
    let max = maxval as f64;
    let data: Vec<f64> = if wide {
        raster[..needed]
            .chunks_exact(2)
            .map(|b| (u16::from_be_bytes([b[0], b[1]]) as f64 / max).min(1.0))
            .collect()
    } else {
        raster[..needed].iter().map(|&b| (b as f64 / max).min(1.0)).collect()
    };
    Ok(ImageBuf::new(height, width, channels, data)?)
}

/// Replicates a grayscale image into three channels; RGB passes through.
pub fn to_rgb(img: ImageBuf) -> ImageBuf {
    if img.channels() == 3 {
        return img;
    }
    ImageBuf::from_fn(img.height(), img.width(), 3, |y, x, _| img.get(y, x, 0))
        .expect("shape copied from a valid image")
}
