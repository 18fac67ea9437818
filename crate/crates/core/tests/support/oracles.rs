//! Brute-force reference implementations shared by the unit, property and
//! acceptance tests. Nothing here calls into the filter kernels under test.
#![allow(dead_code)]

use std::vec::Vec;

use amplipix_core::{ImageBuf, StructuringElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_image(h: usize, w: usize, c: usize, seed: u64) -> ImageBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImageBuf::from_fn(h, w, c, |_, _, _| rng.gen::<f64>()).unwrap()
}

fn window(center: usize, radius: usize, len: usize) -> core::ops::RangeInclusive<usize> {
    center.saturating_sub(radius)..=(center + radius).min(len - 1)
}

pub fn brute_box_mean(img: &ImageBuf, radius: usize) -> ImageBuf {
    let (h, w, ch) = img.shape();
    ImageBuf::from_fn(h, w, ch, |y, x, c| {
        let mut sum = 0.0;
        let mut n = 0.0;
        for yy in window(y, radius, h) {
            for xx in window(x, radius, w) {
                sum += img.get(yy, xx, c);
                n += 1.0;
            }
        }
        sum / n
    })
    .unwrap()
}

/// Nested-loop mean over a `rows × cols` window. An even size reaches one
/// sample further after the anchor than before it.
pub fn brute_box_window(img: &ImageBuf, se: StructuringElement) -> ImageBuf {
    let (h, w, ch) = img.shape();
    ImageBuf::from_fn(h, w, ch, |y, x, c| {
        let mut sum = 0.0;
        let mut n = 0.0;
        for dy in 0..se.rows() {
            for dx in 0..se.cols() {
                let yy = y as isize + dy as isize - (se.rows() as isize - 1) / 2;
                let xx = x as isize + dx as isize - (se.cols() as isize - 1) / 2;
                if (0..h as isize).contains(&yy) && (0..w as isize).contains(&xx) {
                    sum += img.get(yy as usize, xx as usize, c);
                    n += 1.0;
                }
            }
        }
        sum / n
    })
    .unwrap()
}

/// Per-window least squares fit of `src` against the grayscale guide,
/// followed by averaging of the coefficients of every window covering a pixel.
pub fn brute_guided(guide: &ImageBuf, src: &ImageBuf, radius: usize, eps: f64) -> ImageBuf {
    let (h, w, ch) = src.shape();
    let g = guide.channel_mean();
    let mut coeffs: Vec<(f64, f64)> = Vec::with_capacity(h * w * ch);
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut pts = Vec::new();
                for yy in window(y, radius, h) {
                    for xx in window(x, radius, w) {
                        pts.push((g.get(yy, xx, 0), src.get(yy, xx, c)));
                    }
                }
                let n = pts.len() as f64;
                let mu = pts.iter().map(|p| p.0).sum::<f64>() / n;
                let pbar = pts.iter().map(|p| p.1).sum::<f64>() / n;
                let var = pts.iter().map(|p| (p.0 - mu) * (p.0 - mu)).sum::<f64>() / n;
                let cov = pts.iter().map(|p| (p.0 - mu) * (p.1 - pbar)).sum::<f64>() / n;
                let a = cov / (var + eps);
                coeffs.push((a, pbar - a * mu));
            }
        }
    }
    ImageBuf::from_fn(h, w, ch, |y, x, c| {
        let (mut sa, mut sb, mut n) = (0.0, 0.0, 0.0);
        for yy in window(y, radius, h) {
            for xx in window(x, radius, w) {
                let (a, b) = coeffs[(yy * w + xx) * ch + c];
                sa += a;
                sb += b;
                n += 1.0;
            }
        }
        (sa / n) * g.get(y, x, 0) + sb / n
    })
    .unwrap()
}

/// Nested-loop min (or max) over a structuring element window.
pub fn brute_extremum(img: &ImageBuf, se: StructuringElement, min: bool) -> ImageBuf {
    let (h, w, ch) = img.shape();
    let span = |k: usize, pos: usize, len: usize| {
        let before = (k - 1) / 2;
        let after = k - 1 - before;
        pos.saturating_sub(before)..=(pos + after).min(len - 1)
    };
    ImageBuf::from_fn(h, w, ch, |y, x, c| {
        let mut acc = if min { f64::INFINITY } else { f64::NEG_INFINITY };
        for yy in span(se.rows(), y, h) {
            for xx in span(se.cols(), x, w) {
                for cc in span(se.channels(), c, ch) {
                    let v = img.get(yy, xx, cc);
                    acc = if min { acc.min(v) } else { acc.max(v) };
                }
            }
        }
        acc
    })
    .unwrap()
}

/// `1 − min over window and channels of I^c/A^c`, by nested loops.
pub fn brute_solve_min_t(img: &ImageBuf, atmosphere: [f64; 3], omega: usize) -> ImageBuf {
    let (h, w, ch) = img.shape();
    let before = (omega - 1) / 2;
    let after = omega - 1 - before;
    ImageBuf::from_fn(h, w, 1, |y, x, _| {
        let mut m = f64::INFINITY;
        for yy in y.saturating_sub(before)..=(y + after).min(h - 1) {
            for xx in x.saturating_sub(before)..=(x + after).min(w - 1) {
                for (c, a) in atmosphere.iter().enumerate().take(ch) {
                    m = m.min(img.get(yy, xx, c) / a);
                }
            }
        }
        1.0 - m
    })
    .unwrap()
}
