//! Per-image processing: decode, crop, resize, enhance, clip, encode.

use std::path::Path;

use amplipix_core::amplify::{raw_transmission, refine_transmission};
use amplipix_core::geometry::DEFAULT_BACKGROUND_THRESHOLD;
use amplipix_core::{
    center_crop_fundus, clip01, resize_bilinear, AmplifyParams, ImageBuf, MethodExpr, PriorKind,
    SharpenParams, TransmissionMap,
};

use crate::io::{self, Depth, IoError};

/// Geometric preprocessing applied before enhancement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preprocess {
    pub crop: bool,
    pub background_threshold: f64,
    pub resize: Option<(usize, usize)>,
    pub clip: bool,
}

impl Default for Preprocess {
    fn default() -> Self {
        Self {
            crop: true,
            background_threshold: DEFAULT_BACKGROUND_THRESHOLD,
            resize: Some((512, 512)),
            clip: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Image(#[from] amplipix_core::Error),
}

/// Everything except the inputs: how to preprocess, enhance and encode.
#[derive(Debug, Clone)]
pub struct Settings {
    pub preprocess: Preprocess,
    pub amplify: AmplifyParams,
    pub sharpen: SharpenParams,
    pub depth: Depth,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            preprocess: Preprocess::default(),
            amplify: AmplifyParams::default(),
            sharpen: SharpenParams::default(),
            depth: Depth::Eight,
        }
    }
}

/// An image plus any non-fatal conditions met while producing it.
#[derive(Debug)]
pub struct Processed {
    pub image: ImageBuf,
    pub warnings: Vec<String>,
}

/// Crop and resize. Grayscale inputs are replicated to RGB first.
pub fn preprocess(img: ImageBuf, pre: &Preprocess) -> Result<Processed, PipelineError> {
    let mut warnings = Vec::new();
    let mut img = io::to_rgb(img);
    if pre.crop {
        let outcome = center_crop_fundus(&img, pre.background_threshold)?;
        if outcome.is_warning() {
            warnings.push(format!(
                "no pixel brighter than {} on average; crop skipped",
                pre.background_threshold
            ));
        }
        img = outcome.into_image();
    }
    if let Some((h, w)) = pre.resize {
        img = resize_bilinear(&img, h, w)?;
    }
    Ok(Processed {
        image: img,
        warnings,
    })
}

/// A parsed method expression bound to its settings.
#[derive(Debug, Clone)]
pub struct Enhancer {
    pub expr: MethodExpr,
    pub settings: Settings,
}

impl Enhancer {
    pub fn new(expr: MethodExpr, settings: Settings) -> Self {
        Self { expr, settings }
    }

    pub fn enhance(&self, img: ImageBuf) -> Result<Processed, PipelineError> {
        let Processed { image, warnings } = preprocess(img, &self.settings.preprocess)?;
        let mut out = self
            .expr
            .evaluate(&image, &self.settings.amplify, &self.settings.sharpen)?;
        if self.settings.preprocess.clip {
            out = clip01(&out);
        }
        Ok(Processed {
            image: out,
            warnings,
        })
    }

    pub fn enhance_file(&self, input: &Path, output: &Path) -> Result<Vec<String>, PipelineError> {
        let img = io::read_image(input)?;
        let Processed { image, warnings } = self.enhance(img)?;
        io::write_image(output, &image, self.settings.depth)?;
        Ok(warnings)
    }
}

/// Transmission map of `prior` for a preprocessed image; `raw` skips the
/// guided refinement.
pub fn transmission_map(
    img: ImageBuf,
    prior: PriorKind,
    settings: &Settings,
    raw: bool,
) -> Result<(TransmissionMap, Vec<String>), PipelineError> {
    let Processed { image, warnings } = preprocess(img, &settings.preprocess)?;
    let params = &settings.amplify;
    params.validate()?;
    let map = raw_transmission(&image, prior, params.omega, params.blue_channel_to_ones)?;
    let map = if raw {
        map
    } else {
        refine_transmission(&image, &map, params.t_refine)?
    };
    Ok((map, warnings))
}

/// `(min, mean, max)` of a map.
pub fn map_stats(map: &TransmissionMap) -> (f64, f64, f64) {
    let img = map.image();
    (img.min(), img.mean(), img.max())
}
