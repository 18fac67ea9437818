//! Geometric preprocessing: fundus cropping and bilinear resizing.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::ImageBuf;

/// Default foreground threshold on the per-pixel channel mean.
pub const DEFAULT_BACKGROUND_THRESHOLD: f64 = 0.05;

/// Result of [`center_crop_fundus`].
#[derive(Debug, Clone, PartialEq)]
pub enum CropOutcome {
    /// A foreground region was found; `top`/`left` locate the crop in the input.
    Cropped {
        image: ImageBuf,
        top: usize,
        left: usize,
    },
    /// No pixel exceeded the threshold; the input is returned unchanged.
    NoForeground(ImageBuf),
}

impl CropOutcome {
    pub fn image(&self) -> &ImageBuf {
        match self {
            CropOutcome::Cropped { image, .. } | CropOutcome::NoForeground(image) => image,
        }
    }

    pub fn into_image(self) -> ImageBuf {
        match self {
            CropOutcome::Cropped { image, .. } | CropOutcome::NoForeground(image) => image,
        }
    }

    /// True for the degenerate case that callers should warn about.
    pub fn is_warning(&self) -> bool {
        matches!(self, CropOutcome::NoForeground(_))
    }
}

/// Crops an RGB fundus photograph to the disc.
///
/// Foreground pixels are those whose channel mean exceeds
/// `background_threshold`. Their bounding box is grown along its shorter
/// side, symmetrically about the box center, toward a square (clamped to the
/// image), so the disc stays centered in the crop.
pub fn center_crop_fundus(img: &ImageBuf, background_threshold: f64) -> Result<CropOutcome> {
    img.ensure_rgb()?;
    let (h, w, _) = img.shape();

    let mut rows: Option<(usize, usize)> = None;
    let mut cols: Option<(usize, usize)> = None;
    for y in 0..h {
        for x in 0..w {
            let px = img.pixel(y, x);
            if (px[0] + px[1] + px[2]) / 3.0 > background_threshold {
                rows = Some(rows.map_or((y, y), |(a, b)| (a.min(y), b.max(y))));
                cols = Some(cols.map_or((x, x), |(a, b)| (a.min(x), b.max(x))));
            }
        }
    }
    let (Some((r0, r1)), Some((c0, c1))) = (rows, cols) else {
        return Ok(CropOutcome::NoForeground(img.clone()));
    };

    let side = (r1 - r0 + 1).max(c1 - c0 + 1);
    let (top, bottom) = grow(r0, r1, side, h);
    let (left, right) = grow(c0, c1, side, w);
    let image = img.crop(top, left, bottom - top + 1, right - left + 1)?;
    Ok(CropOutcome::Cropped { image, top, left })
}

/// Grows the inclusive range `[lo, hi]` to `side` samples, split evenly on
/// both ends and clamped to `[0, limit)`.
fn grow(lo: usize, hi: usize, side: usize, limit: usize) -> (usize, usize) {
    let extra = side - (hi - lo + 1);
    let before = extra / 2;
    let after = extra - before;
    (lo.saturating_sub(before), (hi + after).min(limit - 1))
}

/// Corner-aligned bilinear resize: output corners sample the input corners
/// exactly and every output sample is a convex combination of its four
/// input neighbours.
pub fn resize_bilinear(img: &ImageBuf, out_h: usize, out_w: usize) -> Result<ImageBuf> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidParameter("resize dimensions must be at least 1"));
    }
    let (h, w, ch) = img.shape();
    let ys = sample_positions(h, out_h);
    let xs = sample_positions(w, out_w);

    let mut data = Vec::with_capacity(out_h * out_w * ch);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            for c in 0..ch {
                let a = img.get(y0, x0, c);
                let b = img.get(y0, x1, c);
                let p = img.get(y1, x0, c);
                let q = img.get(y1, x1, c);
                let top = a + fx * (b - a);
                let bottom = p + fx * (q - p);
                let v = top + fy * (bottom - top);
                let lo = a.min(b).min(p).min(q);
                let hi = a.max(b).max(p).max(q);
                data.push(v.clamp(lo, hi));
            }
        }
    }
    Ok(ImageBuf::from_parts(out_h, out_w, ch, data))
}

/// For each output index: the two input indices to blend and the weight of
/// the second one.
fn sample_positions(n_in: usize, n_out: usize) -> Vec<(usize, usize, f64)> {
    (0..n_out)
        .map(|o| {
            let pos = if n_out == 1 {
                (n_in - 1) as f64 / 2.0
            } else {
                o as f64 * (n_in - 1) as f64 / (n_out - 1) as f64
            };
            // pos >= 0, so truncation is floor
            let i0 = (pos as usize).min(n_in - 1);
            let i1 = (i0 + 1).min(n_in - 1);
            (i0, i1, pos - i0 as f64)
        })
        .collect()
}
