//! von Kries gain control. Image tristimulus values stand in for cone
//! (L, M, S) responses, so the gains act directly on R, G and B.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{RasterPlane, RgbImage};

pub const DEFAULT_GAIN: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationParams {
    pub gain_l: f64,
    pub gain_m: f64,
    pub gain_s: f64,
}

impl Default for AdaptationParams {
    fn default() -> Self {
        Self::uniform(DEFAULT_GAIN)
    }
}

impl AdaptationParams {
    pub fn uniform(gain: f64) -> Self {
        Self {
            gain_l: gain,
            gain_m: gain,
            gain_s: gain,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("gain_l", self.gain_l),
            ("gain_m", self.gain_m),
            ("gain_s", self.gain_s),
        ] {
            if !(g > 0.0 && g <= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {g} must lie in (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Divides one channel by its own maximum and multiplies by `gain`.
/// A channel with no positive sample is returned unchanged.
pub fn adapt_channel(channel: &RasterPlane, gain: f64) -> RasterPlane {
    let max = channel.max();
    if max <= 0.0 {
        return channel.clone();
    }
    channel.map(|v| v / max * gain)
}

/// Per-channel von Kries adaptation: `out = in / max(in_c) * gain_c`.
pub fn von_kries_adapt(image: &RgbImage, params: &AdaptationParams) -> RgbImage {
    RgbImage {
        r: adapt_channel(&image.r, params.gain_l),
        g: adapt_channel(&image.g, params.gain_m),
        b: adapt_channel(&image.b, params.gain_s),
    }
}
