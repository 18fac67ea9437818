//! Transmission priors, recovery and whole-image brightening/darkening.
//!
//! Recovery solves `I = J·t + A·(1 − t)` for `J`:
//!
//! ```text
//! J = (I − A) / max(t, ε*) + A
//! ```
//!
//! so each sample moves away from `A` by a factor `1/t`. With `A = 0` the
//! image can only get brighter, with `A = 1` only darker. The four priors
//! differ in which neighbourhood statistic sets `t`.

use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filters::{guided_filter, min_filter, GuidedFilterParams, StructuringElement};
use crate::image::{clip01, invert, Atmosphere, ImageBuf};

/// Lower bound for the recovery denominator.
pub const DEFAULT_EPS_FLOOR: f64 = 1e-8;

/// Per-pixel (1 channel) or per-sample (3 channel) amplification rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMap(ImageBuf);

impl TransmissionMap {
    pub fn new(map: ImageBuf) -> Self {
        Self(map)
    }

    /// A single-channel map holding `value` everywhere.
    pub fn uniform(height: usize, width: usize, value: f64) -> Result<Self> {
        Ok(Self(ImageBuf::filled(height, width, 1, value)?))
    }

    pub fn image(&self) -> &ImageBuf {
        &self.0
    }

    pub fn into_image(self) -> ImageBuf {
        self.0
    }

    /// `1 − t`.
    pub fn complement(&self) -> Self {
        Self(invert(&self.0))
    }

    /// The denominator floor used by [`solve_j`]: `max(eps_floor, min(t)/2)`.
    pub fn recovery_floor(&self, eps_floor: f64) -> f64 {
        eps_floor.max(self.0.min() / 2.0)
    }

    /// `max(t, ε*)` with `ε*` from [`recovery_floor`](Self::recovery_floor).
    pub fn clamp_for_recovery(&self, eps_floor: f64) -> Self {
        let floor = self.recovery_floor(eps_floor);
        Self(self.0.map(|v| v.max(floor)))
    }
}

/// The four transmission priors, a 2×2 grid of weak/strong amplification
/// of dark/bright neighbourhoods. All are solved with `A = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorKind {
    /// Weak, amplifies dark regions: `solveMin_t(1 − I)`.
    ColorIllumination,
    /// Weak, amplifies bright regions: `solveMin_t(I)`.
    StandardDcp,
    /// Strong, amplifies dark regions: `1 − solveMin_t(I)`.
    NovelStrongDark,
    /// Strong, amplifies bright regions: `1 − solveMin_t(1 − I)`.
    BrightChannel,
}

impl PriorKind {
    pub const ALL: [PriorKind; 4] = [
        PriorKind::ColorIllumination,
        PriorKind::StandardDcp,
        PriorKind::NovelStrongDark,
        PriorKind::BrightChannel,
    ];

    /// True for the priors taking min statistics of `I` itself (rather than
    /// of `1 − I`); these are the ones the blue-channel substitution applies to.
    pub fn uses_min_of_input(self) -> bool {
        matches!(self, PriorKind::StandardDcp | PriorKind::NovelStrongDark)
    }

    pub fn name(self) -> &'static str {
        match self {
            PriorKind::ColorIllumination => "color-illumination",
            PriorKind::StandardDcp => "dcp",
            PriorKind::NovelStrongDark => "strong-dark",
            PriorKind::BrightChannel => "bright-channel",
        }
    }
}

impl fmt::Display for PriorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "color-illumination" | "illumination" | "cip" => PriorKind::ColorIllumination,
            "dcp" | "dark-channel" | "standard-dcp" => PriorKind::StandardDcp,
            "strong-dark" | "novel" | "novel-strong-dark" => PriorKind::NovelStrongDark,
            "bright-channel" | "bcp" => PriorKind::BrightChannel,
            _ => return Err(Error::InvalidParameter("unknown prior name")),
        })
    }
}

/// Hyperparameters shared by every letter method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifyParams {
    /// Side of the square neighbourhood used by the min statistics.
    pub omega: usize,
    /// Guided filter used to restore detail in the raw transmission map.
    pub t_refine: GuidedFilterParams,
    /// Lower bound for `ε*` in [`solve_j`].
    pub recovery_eps_floor: f64,
    /// Replace the blue channel with ones before the min statistics of `I`.
    /// Fundus images have a noisy blue channel.
    pub blue_channel_to_ones: bool,
}

impl Default for AmplifyParams {
    fn default() -> Self {
        Self {
            omega: 5,
            t_refine: GuidedFilterParams::new(100, 1e-8).expect("valid default"),
            recovery_eps_floor: DEFAULT_EPS_FLOOR,
            blue_channel_to_ones: true,
        }
    }
}

impl AmplifyParams {
    pub fn validate(&self) -> Result<()> {
        if self.omega == 0 {
            return Err(Error::InvalidParameter("omega must be at least 1"));
        }
        check_eps_floor(self.recovery_eps_floor)
    }
}

fn check_eps_floor(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("recovery eps floor must be positive"));
    }
    Ok(())
}

/// `1 − min_c min_{y∈Ω(x)} I^c(y)/A^c`, a single-channel map.
pub fn solve_min_t(img: &ImageBuf, atmosphere: &Atmosphere, omega: usize) -> Result<TransmissionMap> {
    let dark = channel_extremum(img, atmosphere, omega, true)?;
    Ok(TransmissionMap(dark.map(|v| 1.0 - v)))
}

/// `1 − max_c max_{y∈Ω(x)} I^c(y)/A^c`. Negative where `I^c > A^c`.
pub fn solve_max_t(img: &ImageBuf, atmosphere: &Atmosphere, omega: usize) -> Result<TransmissionMap> {
    let bright = channel_extremum(img, atmosphere, omega, false)?;
    Ok(TransmissionMap(bright.map(|v| 1.0 - v)))
}

/// Extremum of `I/A` across channels, then over the `omega × omega` window.
fn channel_extremum(
    img: &ImageBuf,
    atmosphere: &Atmosphere,
    omega: usize,
    min: bool,
) -> Result<ImageBuf> {
    if omega == 0 {
        return Err(Error::InvalidParameter("omega must be at least 1"));
    }
    atmosphere.validate_for(img)?;
    if !atmosphere.is_strictly_positive() {
        return Err(Error::NonPositiveAtmosphere);
    }
    let ch = img.channels();
    let data: Vec<f64> = img
        .data()
        .chunks_exact(ch)
        .enumerate()
        .map(|(px, samples)| {
            let ratios = samples
                .iter()
                .enumerate()
                .map(|(c, &v)| v / atmosphere.at(px * ch + c, ch));
            if min {
                ratios.fold(f64::INFINITY, f64::min)
            } else {
                ratios.fold(f64::NEG_INFINITY, f64::max)
            }
        })
        .collect();
    let per_pixel = ImageBuf::new(img.height(), img.width(), 1, data)?;
    let se = StructuringElement::square(omega)?;
    if min {
        min_filter(&per_pixel, se)
    } else {
        crate::filters::max_filter(&per_pixel, se)
    }
}

fn blue_to_ones(img: &ImageBuf) -> ImageBuf {
    let mut data = img.data().to_vec();
    for px in data.chunks_exact_mut(3) {
        px[2] = 1.0;
    }
    ImageBuf::from_parts(img.height(), img.width(), 3, data)
}

/// The prior's map before guided refinement, solved with `A = 1`.
pub fn raw_transmission(
    img: &ImageBuf,
    prior: PriorKind,
    omega: usize,
    blue_channel_to_ones: bool,
) -> Result<TransmissionMap> {
    img.ensure_rgb()?;
    let one = Atmosphere::Scalar(1.0);
    let stats_input = if blue_channel_to_ones && prior.uses_min_of_input() {
        blue_to_ones(img)
    } else {
        img.clone()
    };
    Ok(match prior {
        PriorKind::ColorIllumination => solve_min_t(&invert(&stats_input), &one, omega)?,
        PriorKind::StandardDcp => solve_min_t(&stats_input, &one, omega)?,
        PriorKind::NovelStrongDark => solve_min_t(&stats_input, &one, omega)?.complement(),
        PriorKind::BrightChannel => solve_min_t(&invert(&stats_input), &one, omega)?.complement(),
    })
}

/// Guided refinement of a raw map (guide = the image), clipped to `[0, 1]`.
pub fn refine_transmission(
    img: &ImageBuf,
    raw: &TransmissionMap,
    params: GuidedFilterParams,
) -> Result<TransmissionMap> {
    let refined = guided_filter(img, raw.image(), params)?;
    Ok(TransmissionMap(clip01(&refined)))
}

/// Full prior: raw map, then guided refinement, then clipping.
pub fn transmission_for_prior(
    img: &ImageBuf,
    prior: PriorKind,
    params: &AmplifyParams,
) -> Result<TransmissionMap> {
    params.validate()?;
    let raw = raw_transmission(img, prior, params.omega, params.blue_channel_to_ones)?;
    refine_transmission(img, &raw, params.t_refine)
}

/// Recovers `J = (I − A) / max(t, ε*) + A` with `ε* = max(eps_floor, min(t)/2)`.
///
/// Evaluated as `I + (I − A)·(1/t − 1)`, which is exact at `t = 1` and keeps
/// the sign of `J − I` equal to the sign of `I − A`. A single-channel `t` is
/// broadcast across channels. The result is not clipped.
pub fn solve_j(
    img: &ImageBuf,
    t: &TransmissionMap,
    atmosphere: &Atmosphere,
    eps_floor: f64,
) -> Result<ImageBuf> {
    check_eps_floor(eps_floor)?;
    atmosphere.validate_for(img)?;
    let tmap = t.image();
    img.ensure_same_hw(tmap)?;
    let ch = img.channels();
    let tch = tmap.channels();
    if tch != 1 && tch != ch {
        return Err(Error::ShapeMismatch {
            left: img.shape(),
            right: tmap.shape(),
        });
    }
    let floor = t.recovery_floor(eps_floor);
    let data: Vec<f64> = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let ti = if tch == 1 { tmap.data()[i / ch] } else { tmap.data()[i] };
            let a = atmosphere.at(i, ch);
            v + (v - a) * (1.0 / ti.max(floor) - 1.0)
        })
        .collect();
    ImageBuf::new(img.height(), img.width(), ch, data)
}

/// The eight whole-image methods. `A`–`D` brighten (atmosphere 0), `W`–`Z`
/// darken (atmosphere 1); each pair shares a prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
    C,
    D,
    W,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 8] = [
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
        Letter::W,
        Letter::X,
        Letter::Y,
        Letter::Z,
    ];

    pub fn prior(self) -> PriorKind {
        match self {
            Letter::A | Letter::W => PriorKind::ColorIllumination,
            Letter::B | Letter::X => PriorKind::StandardDcp,
            Letter::C | Letter::Y => PriorKind::NovelStrongDark,
            Letter::D | Letter::Z => PriorKind::BrightChannel,
        }
    }

    pub fn brightens(self) -> bool {
        matches!(self, Letter::A | Letter::B | Letter::C | Letter::D)
    }

    /// Recovery atmosphere: 0 to brighten, 1 to darken.
    pub fn atmosphere(self) -> Atmosphere {
        Atmosphere::Scalar(if self.brightens() { 0.0 } else { 1.0 })
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
            Letter::D => 'D',
            Letter::W => 'W',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Letter::ALL.into_iter().find(|l| l.as_char() == c)
    }

    pub(crate) fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Recovery step of a letter method with a caller-supplied map. Unclipped.
pub fn recover_with(
    img: &ImageBuf,
    letter: Letter,
    t: &TransmissionMap,
    eps_floor: f64,
) -> Result<ImageBuf> {
    solve_j(img, t, &letter.atmosphere(), eps_floor)
}

/// Letter method without the final clip; brightening output is `≥ I`,
/// darkening output `≤ I`.
pub fn letter_method_unclipped(
    img: &ImageBuf,
    letter: Letter,
    params: &AmplifyParams,
) -> Result<ImageBuf> {
    let t = transmission_for_prior(img, letter.prior(), params)?;
    recover_with(img, letter, &t, params.recovery_eps_floor)
}

/// Brightens or darkens `img` with the letter's prior, clipped to `[0, 1]`.
pub fn letter_method(img: &ImageBuf, letter: Letter, params: &AmplifyParams) -> Result<ImageBuf> {
    Ok(clip01(&letter_method_unclipped(img, letter, params)?))
}
