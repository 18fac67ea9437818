use alloc::vec;
use alloc::vec::Vec;

use super::morphology::window_extent;
use super::{interleave, planes, StructuringElement};
use crate::error::{Error, Result};
use crate::image::ImageBuf;

/// Mean over the `(2r+1)×(2r+1)` window around each pixel, per channel.
///
/// Uses a summed-area table so the cost is independent of `radius`.
pub fn box_filter(img: &ImageBuf, radius: usize) -> Result<ImageBuf> {
    if radius == 0 {
        return Err(Error::InvalidParameter("box filter radius must be at least 1"));
    }
    let (h, w, _) = img.shape();
    let filtered: Vec<Vec<f64>> = planes(img)
        .iter()
        .map(|p| box_mean_plane(p, h, w, radius))
        .collect();
    Ok(interleave(&filtered, h, w))
}

/// Mean over a `rows × cols` window per channel, anchored like
/// [`min_filter`](super::min_filter); windows are truncated at the border.
/// The element must span a single channel.
pub fn box_filter_window(img: &ImageBuf, se: StructuringElement) -> Result<ImageBuf> {
    if se.channels() != 1 {
        return Err(Error::InvalidParameter("box filter window must span one channel"));
    }
    let (h, w, _) = img.shape();
    let ey = window_extent(se.rows());
    let ex = window_extent(se.cols());
    let filtered: Vec<Vec<f64>> = planes(img)
        .iter()
        .map(|p| box_mean_plane_extent(p, h, w, ey, ex))
        .collect();
    Ok(interleave(&filtered, h, w))
}

/// Box mean of a single `h×w` plane.
///
/// The plane mean is removed before the table is built and added back
/// afterwards; this keeps the partial sums small, which matters once the
/// guided filter subtracts two nearly equal window statistics.
pub(crate) fn box_mean_plane(plane: &[f64], h: usize, w: usize, radius: usize) -> Vec<f64> {
    box_mean_plane_extent(plane, h, w, (radius, radius), (radius, radius))
}

fn box_mean_plane_extent(
    plane: &[f64],
    h: usize,
    w: usize,
    (up, down): (usize, usize),
    (left, right): (usize, usize),
) -> Vec<f64> {
    debug_assert_eq!(plane.len(), h * w);
    let offset = plane.iter().sum::<f64>() / plane.len() as f64;

    let stride = w + 1;
    let mut table = vec![0.0f64; (h + 1) * stride];
    for y in 0..h {
        let mut row_sum = 0.0;
        for x in 0..w {
            row_sum += plane[y * w + x] - offset;
            table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row_sum;
        }
    }

    let mut out = Vec::with_capacity(h * w);
    for y in 0..h {
        let y0 = y.saturating_sub(up);
        let y1 = (y + down).min(h - 1) + 1;
        for x in 0..w {
            let x0 = x.saturating_sub(left);
            let x1 = (x + right).min(w - 1) + 1;
            let sum = table[y1 * stride + x1] - table[y0 * stride + x1] - table[y1 * stride + x0]
                + table[y0 * stride + x0];
            let count = ((y1 - y0) * (x1 - x0)) as f64;
            out.push(sum / count + offset);
        }
    }
    out
}
