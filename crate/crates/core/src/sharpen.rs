//! Sharpening as amplification away from a blurred copy of the image.
//!
//! With `A = blur(I)` and `u = 1/t`, recovery reads
//! `J = u·I − (u − 1)·blur(I)`, which is unsharp masking; a per-pixel `t`
//! gives the locally adaptive variant.

use crate::amplify::{solve_j, TransmissionMap, DEFAULT_EPS_FLOOR};
use crate::error::{Error, Result};
use crate::filters::{guided_filter, morphological_laplace, GuidedFilterParams, StructuringElement};
use crate::image::{clip01, Atmosphere, ImageBuf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpenParams {
    /// Uniform transmission used when no map is supplied.
    pub scalar_t: f64,
    /// Guided self-filter acting as the blur.
    pub blur: GuidedFilterParams,
    /// Images whose smaller side exceeds this get a guided denoise pass.
    pub denoise_threshold: usize,
    /// Window of the morphological Laplace that seeds the adaptive map.
    pub laplace_se: StructuringElement,
}

impl Default for SharpenParams {
    fn default() -> Self {
        Self {
            scalar_t: 0.15,
            blur: GuidedFilterParams::new(30, 1e-8).expect("valid default"),
            denoise_threshold: 1500,
            laplace_se: StructuringElement::new(2, 2, 1).expect("valid default"),
        }
    }
}

impl SharpenParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.scalar_t > 0.0 && self.scalar_t <= 1.0) {
            return Err(Error::InvalidParameter("scalar t must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// The blur used as atmosphere: guided filter with the image as its own guide.
pub fn blur(img: &ImageBuf, params: &SharpenParams) -> Result<ImageBuf> {
    guided_filter(img, img, params.blur)
}

/// Simple sharpening: `J = (I − blur(I))/t + blur(I)`.
///
/// `t` is `params.scalar_t` unless `t_override` is given, in which case the
/// recovery goes through [`solve_j`] with its `ε*` clamp. Large images
/// (smaller side above `denoise_threshold`) are then smoothed with a guided
/// filter steered by `I`. The output is not clipped.
pub fn sharpen_simple(
    img: &ImageBuf,
    params: &SharpenParams,
    t_override: Option<&TransmissionMap>,
) -> Result<ImageBuf> {
    params.validate()?;
    let blurred = blur(img, params)?;
    let sharpened = match t_override {
        Some(t) => solve_j(img, t, &Atmosphere::Map(blurred), DEFAULT_EPS_FLOOR)?,
        None => {
            let gain = 1.0 / params.scalar_t - 1.0;
            img.zip_map(&blurred, |i, a| i + (i - a) * gain)?
        }
    };
    if img.height().min(img.width()) > params.denoise_threshold {
        guided_filter(img, &sharpened, params.blur)
    } else {
        Ok(sharpened)
    }
}

/// Edge-driven transmission map for [`sharpen_complex`].
///
/// The morphological Laplace of `img` is sharpened, min-max normalised over
/// all samples and inverted, so the strongest edge responses get the
/// smallest `t`. Returns `None` when the response is flat.
pub fn laplace_transmission(img: &ImageBuf, params: &SharpenParams) -> Result<Option<TransmissionMap>> {
    let laplace = morphological_laplace(img, params.laplace_se)?;
    let response = sharpen_simple(&laplace, params, None)?;
    let (lo, hi) = (response.min(), response.max());
    let range = hi - lo;
    // rounding noise on a flat response is not an edge
    if range <= 1e-12 {
        return Ok(None);
    }
    let normalised = response.map(|v| 1.0 - (v - lo) / range);
    let eps = DEFAULT_EPS_FLOOR.max(normalised.min() / 2.0);
    Ok(Some(TransmissionMap::new(normalised.map(|v| v.max(eps)))))
}

/// Complex sharpening: simple sharpening with the per-sample map from
/// [`laplace_transmission`], clipped to `[0, 1]`. Flat Laplace responses
/// (constant images) fall back to `t = 1`, i.e. the identity.
pub fn sharpen_complex(img: &ImageBuf, params: &SharpenParams) -> Result<ImageBuf> {
    match laplace_transmission(img, params)? {
        Some(t) => Ok(clip01(&sharpen_simple(img, params, Some(&t))?)),
        None => Ok(clip01(img)),
    }
}

/// `u·I − (u − 1)·blur(I)` with `u = 1/t`; the textbook unsharp mask.
pub fn unsharp_mask(img: &ImageBuf, blurred: &ImageBuf, t: f64) -> Result<ImageBuf> {
    let u = 1.0 / t;
    img.zip_map(blurred, |i, b| u * i - (u - 1.0) * b)
}
