//! Pixel color amplification for retinal fundus enhancement.
//!
//! The haze model `I = J·t + A·(1 − t)` is treated as an amplifier: the
//! atmosphere `A` picks the direction each sample moves in and the
//! transmission map `t` picks the rate. This crate provides the four
//! transmission priors, the eight whole-image brightening/darkening
//! methods, two sharpening algorithms and the `sA+sX` composition
//! language built on top of them.
//!
//! Everything here is pure computation over [`ImageBuf`]; file formats,
//! configuration and the command line live in the `amplipix` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate self as amplipix_core;
#[cfg(test)]
extern crate std;

pub mod amplify;
pub mod compose;
mod error;
pub mod filters;
pub mod geometry;
pub mod image;
pub mod sharpen;

#[cfg(test)]
#[path = "../tests/support/oracles.rs"]
pub(crate) mod testutil;

pub use amplify::{AmplifyParams, Letter, PriorKind, TransmissionMap};
pub use compose::{MethodExpr, ParseError, Term};
pub use error::{Error, Result};
pub use filters::{GuidedFilterParams, StructuringElement};
pub use geometry::{center_crop_fundus, resize_bilinear, CropOutcome};
pub use image::{clip01, invert, Atmosphere, ImageBuf};
pub use sharpen::SharpenParams;
