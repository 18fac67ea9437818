//! Filter kernels: box mean, guided filter and flat rectangular morphology.
//!
//! Every kernel uses truncated windows at the image border: statistics are
//! taken over the in-bounds part of the window only, with no padding.

mod boxfilter;
mod guided;
mod morphology;

pub use boxfilter::{box_filter, box_filter_window};
pub use guided::{guided_filter, GuidedFilterParams};
pub use morphology::{max_filter, min_filter, morphological_laplace, StructuringElement};

pub(crate) use boxfilter::box_mean_plane;

use alloc::vec::Vec;

use crate::image::ImageBuf;

/// Splits an interleaved image into one plane per channel.
pub(crate) fn planes(img: &ImageBuf) -> Vec<Vec<f64>> {
    (0..img.channels())
        .map(|c| img.data().iter().skip(c).step_by(img.channels()).copied().collect())
        .collect()
}

/// Inverse of [`planes`].
pub(crate) fn interleave(planes: &[Vec<f64>], height: usize, width: usize) -> ImageBuf {
    let channels = planes.len();
    let mut data = Vec::with_capacity(height * width * channels);
    for i in 0..height * width {
        for plane in planes {
            data.push(plane[i]);
        }
    }
    ImageBuf::from_parts(height, width, channels, data)
}
