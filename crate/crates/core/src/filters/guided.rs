use alloc::vec::Vec;

use super::{box_mean_plane, interleave, planes};
use crate::error::{Error, Result};
use crate::image::ImageBuf;

/// Window radius and regularization of the guided filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedFilterParams {
    radius: usize,
    eps: f64,
}

impl GuidedFilterParams {
    pub fn new(radius: usize, eps: f64) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidParameter("guided filter radius must be at least 1"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter("guided filter eps must be positive"));
        }
        Ok(Self { radius, eps })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// Edge-preserving smoothing of `src` steered by `guide`.
///
/// An RGB guide is reduced to its channel mean; each `src` channel is then
/// fitted as a local linear function of that grayscale guide:
///
/// ```text
/// a = cov(g, p) / (var(g) + eps)
/// b = mean(p) − a·mean(g)
/// q = mean(a)·g + mean(b)
/// ```
///
/// with every mean taken by [`box_filter`](super::box_filter) at `radius`.
pub fn guided_filter(
    guide: &ImageBuf,
    src: &ImageBuf,
    params: GuidedFilterParams,
) -> Result<ImageBuf> {
    guide.ensure_same_hw(src)?;
    let (h, w, _) = src.shape();
    let r = params.radius;
    let mean = |p: &[f64]| box_mean_plane(p, h, w, r);

    let g = guide.channel_mean().into_data();
    let mean_g = mean(&g);
    let gg: Vec<f64> = g.iter().map(|v| v * v).collect();
    let var_g: Vec<f64> = mean(&gg)
        .iter()
        .zip(&mean_g)
        .map(|(m2, m)| (m2 - m * m).max(0.0))
        .collect();

    let out: Vec<Vec<f64>> = planes(src)
        .iter()
        .map(|p| {
            let mean_p = mean(p);
            let gp: Vec<f64> = g.iter().zip(p).map(|(a, b)| a * b).collect();
            let mean_gp = mean(&gp);

            let mut a = Vec::with_capacity(h * w);
            let mut b = Vec::with_capacity(h * w);
            for i in 0..h * w {
                let cov = mean_gp[i] - mean_g[i] * mean_p[i];
                let ai = cov / (var_g[i] + params.eps);
                a.push(ai);
                b.push(mean_p[i] - ai * mean_g[i]);
            }
            let mean_a = mean(&a);
            let mean_b = mean(&b);
            (0..h * w).map(|i| mean_a[i] * g[i] + mean_b[i]).collect()
        })
        .collect();
    Ok(interleave(&out, h, w))
}
