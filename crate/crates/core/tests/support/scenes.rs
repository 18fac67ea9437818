//! Synthetic test scenes.
#![allow(dead_code)]

use amplipix_core::ImageBuf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Flat bright disc on a flat dark background.
pub fn disc(size: usize, radius: f64, inside: [f64; 3], outside: [f64; 3]) -> ImageBuf {
    let c = (size as f64 - 1.0) / 2.0;
    ImageBuf::from_fn(size, size, 3, |y, x, ch| {
        let d = ((y as f64 - c).powi(2) + (x as f64 - c).powi(2)).sqrt();
        if d <= radius {
            inside[ch]
        } else {
            outside[ch]
        }
    })
    .unwrap()
}

/// Distance of pixel `(y, x)` from the center of a `size × size` image.
pub fn radius_of(size: usize, y: usize, x: usize) -> f64 {
    let c = (size as f64 - 1.0) / 2.0;
    ((y as f64 - c).powi(2) + (x as f64 - c).powi(2)).sqrt()
}

/// Fundus-like scene: near-black field, reddish disc with vignetting, a
/// brighter optic disc, a few dark vessels and mild sensor noise.
pub fn fundus(height: usize, width: usize, seed: u64) -> ImageBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cy = height as f64 / 2.0;
    let cx = width as f64 / 2.0;
    let radius = 0.45 * height.min(width) as f64;
    let od = (cy - 0.1 * radius, cx + 0.45 * radius);
    let vessel_phase: [f64; 3] = [rng.gen::<f64>() * 6.0, rng.gen::<f64>() * 6.0, rng.gen::<f64>() * 6.0];
    let base = [0.72, 0.34, 0.12];
    ImageBuf::from_fn(height, width, 3, |y, x, c| {
        let (fy, fx) = (y as f64, x as f64);
        let d = ((fy - cy).powi(2) + (fx - cx).powi(2)).sqrt();
        let noise = (rng.gen::<f64>() - 0.5) * 0.02;
        if d > radius {
            return (0.015 + noise).clamp(0.0, 1.0);
        }
        let vignette = 1.0 - 0.45 * (d / radius).powi(2);
        let mut v = base[c] * vignette;
        let od_d = ((fy - od.0).powi(2) + (fx - od.1).powi(2)).sqrt();
        if od_d < 0.16 * radius {
            v += [0.25, 0.35, 0.2][c] * (1.0 - od_d / (0.16 * radius));
        }
        for (k, phase) in vessel_phase.iter().enumerate() {
            let curve = cy + (k as f64 - 1.0) * 0.3 * radius + 0.12 * radius * ((fx / radius) * 3.0 + phase).sin();
            if (fy - curve).abs() < 1.5 + k as f64 * 0.5 {
                v *= 0.55;
            }
        }
        (v + noise).clamp(0.0, 1.0)
    })
    .unwrap()
}
