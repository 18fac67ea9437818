//! The image container and the pixel arithmetic shared by every module.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A `height × width × channels` raster of `f64` samples, stored row-major
/// with channels interleaved.
///
/// Samples are nominally in `[0, 1]` but intermediate results (Laplace
/// responses, unclipped recoveries) may leave that range. A buffer never
/// holds NaN or infinite values.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuf {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageBuf {
    /// Wraps `data` after checking dimensions, channel count and finiteness.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(height, width, channels)?;
        let expected = height * width * channels;
        if data.len() != expected {
            return Err(Error::BufferLength {
                expected,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        check_dims(height, width, channels)?;
        if !value.is_finite() {
            return Err(Error::NonFinite(0));
        }
        Ok(Self {
            height,
            width,
            channels,
            data: vec![value; height * width * channels],
        })
    }

    /// Builds an image by evaluating `f(row, col, channel)` for every sample.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        check_dims(height, width, channels)?;
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Self::new(height, width, channels, data)
    }

    /// Internal constructor for buffers whose shape is correct by construction.
    pub(crate) fn from_parts(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), height * width * channels);
        debug_assert!(data.iter().all(|v| v.is_finite()), "non-finite sample");
        Self {
            height,
            width,
            channels,
            data,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `(height, width, channels)`
    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, y: usize, x: usize, c: usize) -> usize {
        (y * self.width + x) * self.channels + c
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[self.index(y, x, c)]
    }

    /// Samples of the pixel at `(y, x)`.
    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> &[f64] {
        let start = self.index(y, x, 0);
        &self.data[start..start + self.channels]
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Applies `f` to every sample. Panics if `f` yields a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        assert_finite(&data);
        Self::from_parts(self.height, self.width, self.channels, data)
    }

    /// Combines two images of identical shape sample by sample.
    pub fn zip_map(&self, other: &ImageBuf, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_shape(other)?;
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        assert_finite(&data);
        Ok(Self::from_parts(self.height, self.width, self.channels, data))
    }

    /// Extracts channel `c` as a single-channel image.
    pub fn channel(&self, c: usize) -> Self {
        assert!(c < self.channels, "channel {c} out of range");
        let data = self.data.iter().skip(c).step_by(self.channels).copied().collect();
        Self::from_parts(self.height, self.width, 1, data)
    }

    /// Per-pixel mean across channels, as a single-channel image.
    pub fn channel_mean(&self) -> Self {
        if self.channels == 1 {
            return self.clone();
        }
        let n = self.channels as f64;
        let data = self
            .data
            .chunks_exact(self.channels)
            .map(|px| px.iter().sum::<f64>() / n)
            .collect();
        Self::from_parts(self.height, self.width, 1, data)
    }

    /// Copies the sub-rectangle starting at `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 || top + height > self.height || left + width > self.width {
            return Err(Error::InvalidParameter("crop rectangle outside the image"));
        }
        let mut data = Vec::with_capacity(height * width * self.channels);
        for y in top..top + height {
            let start = self.index(y, left, 0);
            data.extend_from_slice(&self.data[start..start + width * self.channels]);
        }
        Ok(Self::from_parts(height, width, self.channels, data))
    }

    pub fn same_hw(&self, other: &ImageBuf) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub(crate) fn ensure_same_shape(&self, other: &ImageBuf) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_same_hw(&self, other: &ImageBuf) -> Result<()> {
        if !self.same_hw(other) {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_rgb(&self) -> Result<()> {
        if self.channels != 3 {
            return Err(Error::Channels(self.channels));
        }
        Ok(())
    }
}

fn check_dims(height: usize, width: usize, channels: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::EmptyImage { height, width });
    }
    if channels != 1 && channels != 3 {
        return Err(Error::Channels(channels));
    }
    Ok(())
}

fn assert_finite(data: &[f64]) {
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        panic!("pixel operation produced a non-finite sample at index {i}");
    }
}

/// `1 − img`, sample by sample.
pub fn invert(img: &ImageBuf) -> ImageBuf {
    img.map(|v| 1.0 - v)
}

/// Clamps every sample into `[0, 1]`.
pub fn clip01(img: &ImageBuf) -> ImageBuf {
    img.map(|v| v.clamp(0.0, 1.0))
}

/// The atmosphere term: the point each sample is amplified away from.
#[derive(Debug, Clone, PartialEq)]
pub enum Atmosphere {
    /// Same value for every channel and pixel.
    Scalar(f64),
    /// One value per RGB channel.
    Rgb([f64; 3]),
    /// A full image, one value per pixel and channel.
    Map(ImageBuf),
}

impl Atmosphere {
    /// Checks finiteness and that the atmosphere broadcasts against `img`.
    pub fn validate_for(&self, img: &ImageBuf) -> Result<()> {
        match self {
            Atmosphere::Scalar(v) => {
                if !v.is_finite() {
                    return Err(Error::NonFiniteAtmosphere);
                }
            }
            Atmosphere::Rgb(rgb) => {
                if rgb.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteAtmosphere);
                }
                if img.channels() != 3 {
                    return Err(Error::Channels(img.channels()));
                }
            }
            Atmosphere::Map(map) => map.ensure_same_shape(img)?,
        }
        Ok(())
    }

    /// True when every component is `> 0`.
    pub fn is_strictly_positive(&self) -> bool {
        match self {
            Atmosphere::Scalar(v) => *v > 0.0,
            Atmosphere::Rgb(rgb) => rgb.iter().all(|&v| v > 0.0),
            Atmosphere::Map(map) => map.data().iter().all(|&v| v > 0.0),
        }
    }

    /// Value at sample `idx` (flat index) of an image with `channels` channels.
    #[inline]
    pub(crate) fn at(&self, idx: usize, channels: usize) -> f64 {
        match self {
            Atmosphere::Scalar(v) => *v,
            Atmosphere::Rgb(rgb) => rgb[idx % channels],
            Atmosphere::Map(map) => map.data()[idx],
        }
    }

    /// `1 − A`, preserving the variant.
    pub fn complement(&self) -> Self {
        match self {
            Atmosphere::Scalar(v) => Atmosphere::Scalar(1.0 - v),
            Atmosphere::Rgb([r, g, b]) => Atmosphere::Rgb([1.0 - r, 1.0 - g, 1.0 - b]),
            Atmosphere::Map(map) => Atmosphere::Map(invert(map)),
        }
    }
}

impl From<f64> for Atmosphere {
    fn from(v: f64) -> Self {
        Atmosphere::Scalar(v)
    }
}
