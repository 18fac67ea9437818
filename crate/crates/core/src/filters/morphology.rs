use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::ImageBuf;

/// A flat rectangular window of `rows × cols × channels` samples.
///
/// Each axis of size `k` covers offsets `-(k-1)/2 ..= k/2` around the
/// anchor sample, so odd sizes are centered and an even size anchors at the
/// top-left (or first-channel) sample of its central pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringElement {
    rows: usize,
    cols: usize,
    channels: usize,
}

impl StructuringElement {
    pub fn new(rows: usize, cols: usize, channels: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || channels == 0 {
            return Err(Error::InvalidParameter("structuring element sizes must be at least 1"));
        }
        Ok(Self { rows, cols, channels })
    }

    /// A `size × size × 1` square.
    pub fn square(size: usize) -> Result<Self> {
        Self::new(size, size, 1)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn channels(&self) -> usize {
        self.channels
    }
}

/// Offsets `(before, after)` covered along an axis of window size `k`.
#[inline]
pub(crate) fn window_extent(k: usize) -> (usize, usize) {
    let before = (k - 1) / 2;
    (before, k - 1 - before)
}

/// Grey erosion: minimum over the structuring element window.
pub fn min_filter(img: &ImageBuf, se: StructuringElement) -> Result<ImageBuf> {
    extremum_filter(img, se, f64::min)
}

/// Grey dilation: maximum over the structuring element window.
pub fn max_filter(img: &ImageBuf, se: StructuringElement) -> Result<ImageBuf> {
    extremum_filter(img, se, f64::max)
}

/// `dilation + erosion − 2·img`. Responses are unbounded in sign.
pub fn morphological_laplace(img: &ImageBuf, se: StructuringElement) -> Result<ImageBuf> {
    let dilated = max_filter(img, se)?;
    let eroded = min_filter(img, se)?;
    let data = img
        .data()
        .iter()
        .zip(dilated.data().iter().zip(eroded.data()))
        .map(|(&v, (&hi, &lo))| hi + lo - 2.0 * v)
        .collect();
    Ok(ImageBuf::from_parts(img.height(), img.width(), img.channels(), data))
}

/// Rectangular extrema are separable, so run one 1-D pass per axis.
fn extremum_filter(
    img: &ImageBuf,
    se: StructuringElement,
    pick: fn(f64, f64) -> f64,
) -> Result<ImageBuf> {
    let (h, w, ch) = img.shape();
    if se.channels > ch {
        return Err(Error::InvalidParameter(
            "structuring element spans more channels than the image has",
        ));
    }
    let mut data = img.data().to_vec();
    // (axis length, stride between neighbours, window size)
    let passes = [(ch, 1, se.channels), (w, ch, se.cols), (h, w * ch, se.rows)];
    for (len, stride, k) in passes {
        if k > 1 {
            data = pass_1d(&data, len, stride, k, pick);
        }
    }
    Ok(ImageBuf::from_parts(h, w, ch, data))
}

fn pass_1d(data: &[f64], len: usize, stride: usize, k: usize, pick: fn(f64, f64) -> f64) -> Vec<f64> {
    let (before, after) = window_extent(k);
    let mut out = Vec::with_capacity(data.len());
    for (i, _) in data.iter().enumerate() {
        let pos = (i / stride) % len;
        let lo = pos.saturating_sub(before);
        let hi = (pos + after).min(len - 1);
        let base = i - pos * stride;
        let mut acc = data[base + lo * stride];
        for j in lo + 1..=hi {
            acc = pick(acc, data[base + j * stride]);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{brute_extremum, random_image};
    use alloc::vec;

    #[test]
    fn window_extents() {
        assert_eq!(window_extent(1), (0, 0));
        assert_eq!(window_extent(2), (0, 1));
        assert_eq!(window_extent(3), (1, 1));
        assert_eq!(window_extent(4), (1, 2));
        assert_eq!(window_extent(5), (2, 2));
    }

    #[test]
    fn constant_fixed_point() {
        let img = ImageBuf::filled(6, 5, 3, 0.25).unwrap();
        let se = StructuringElement::new(3, 2, 3).unwrap();
        assert_eq!(min_filter(&img, se).unwrap(), img);
        assert_eq!(max_filter(&img, se).unwrap(), img);
        assert!(morphological_laplace(&img, se).unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_dilates_to_block() {
        let img = ImageBuf::from_fn(7, 7, 1, |y, x, _| if (y, x) == (3, 3) { 1.0 } else { 0.0 })
            .unwrap();
        let out = max_filter(&img, StructuringElement::square(3).unwrap()).unwrap();
        for y in 0..7 {
            for x in 0..7 {
                let inside = (2..=4).contains(&y) && (2..=4).contains(&x);
                assert_eq!(out.get(y, x, 0), if inside { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn min_matches_nested_loops() {
        for seed in 0..4 {
            let img = random_image(6, 6, 3, seed);
            let se = StructuringElement::square(5).unwrap();
            assert_eq!(min_filter(&img, se).unwrap(), brute_extremum(&img, se, true));
        }
    }

    #[test]
    fn channel_spanning_window() {
        let img = ImageBuf::new(1, 2, 3, vec![0.1, 0.5, 0.9, 0.4, 0.2, 0.3]).unwrap();
        let se = StructuringElement::new(1, 1, 3).unwrap();
        // size 3 over channels: centered, truncated at the ends
        assert_eq!(min_filter(&img, se).unwrap().data(), &[0.1, 0.1, 0.5, 0.2, 0.2, 0.2]);
        let se2 = StructuringElement::new(1, 1, 2).unwrap();
        assert_eq!(max_filter(&img, se2).unwrap().data(), &[0.5, 0.9, 0.9, 0.4, 0.3, 0.3]);
    }

    #[test]
    fn laplace_step_edge_row() {
        // hand computation with the (2,2,1) element: window covers {x, x+1}
        // dilation [0,0,1,1,1,1], erosion [0,0,0,1,1,1]
        let img = ImageBuf::new(1, 6, 1, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let se = StructuringElement::new(2, 2, 1).unwrap();
        let out = morphological_laplace(&img, se).unwrap();
        assert_eq!(out.data(), &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn laplace_ramp_interior() {
        let img = ImageBuf::from_fn(5, 9, 1, |_, x, _| x as f64 * 0.125).unwrap();
        let odd = morphological_laplace(&img, StructuringElement::square(3).unwrap()).unwrap();
        let even = morphological_laplace(&img, StructuringElement::new(2, 2, 1).unwrap()).unwrap();
        for y in 0..5 {
            for x in 1..8 {
                assert_eq!(odd.get(y, x, 0), 0.0);
                // {x, x+1} window: max+min−2x is one slope step
                assert_eq!(even.get(y, x - 1, 0), 0.125);
            }
        }
    }

    #[test]
    fn too_many_channels() {
        let img = ImageBuf::filled(2, 2, 1, 0.0).unwrap();
        assert!(min_filter(&img, StructuringElement::new(1, 1, 3).unwrap()).is_err());
        assert!(StructuringElement::new(0, 1, 1).is_err());
    }
}
