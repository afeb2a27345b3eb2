//! End-to-end saliency prediction.
//!
//! Stage order: resize to the working size, von Kries adaptation, opponent
//! decomposition, then per channel a Haar pyramid, its energy map and CSF
//! filtering (achromatic CSF on WB, red-green on RG, yellow-blue on YB).
//! Filtered channels are rectified, min-max normalized and fused by a
//! weighted mean, blurred, renormalized and resized back to the stimulus.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::adaptation::{von_kries_adapt, AdaptationParams};
use crate::csf::{apply_csf, CsfCache, CsfKind, CsfParams};
use crate::error::{Error, Result};
use crate::opponent::{rgb_to_opponent, OpponentImage};
use crate::raster::{gaussian_blur, normalize_minmax, resize_bilinear, RasterPlane, RgbImage, SaliencyMap};
use crate::wavelet::{dwt_multilevel, max_levels, wavelet_energy_map, WaveletPyramid};

/// Pyramid depth: deepest possible at the working size, or a fixed count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Levels {
    #[default]
    Auto,
    Fixed(usize),
}

impl Levels {
    pub fn resolve(self, width: usize, height: usize) -> Result<usize> {
        let deepest = max_levels(width, height)?;
        match self {
            Levels::Auto => Ok(deepest),
            Levels::Fixed(n) if n >= 1 && n <= deepest => Ok(n),
            Levels::Fixed(n) => Err(Error::InvalidParameter(format!(
                "levels = {n} outside 1..={deepest} for a {width}x{height} working size"
            ))),
        }
    }
}

impl Serialize for Levels {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Levels::Auto => s.serialize_str("auto"),
            Levels::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Levels {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct LevelsVisitor;
        impl Visitor<'_> for LevelsVisitor {
            type Value = Levels;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"auto\" or a positive integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Levels, E> {
                if v == "auto" {
                    Ok(Levels::Auto)
                } else {
                    v.parse()
                        .map(Levels::Fixed)
                        .map_err(|_| E::custom(format!("bad levels `{v}`")))
                }
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Levels, E> {
                Ok(Levels::Fixed(v as usize))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Levels, E> {
                usize::try_from(v)
                    .map(Levels::Fixed)
                    .map_err(|_| E::custom("levels must be positive"))
            }
        }
        d.deserialize_any(LevelsVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineParams {
    pub working_width: usize,
    pub working_height: usize,
    pub gain: AdaptationParams,
    pub levels: Levels,
    pub include_approximation: bool,
    /// Pixels per degree of visual angle at the working size.
    pub ppd: f64,
    pub acsf: CsfParams,
    pub rgcsf: CsfParams,
    pub ybcsf: CsfParams,
    /// Weights for WB, RG, YB.
    pub fusion_weights: [f64; 3],
    /// Gaussian sigma as a fraction of the working width.
    pub smoothing_sigma: f64,
    /// Exponential smoothing across video frames; 0 disables it.
    pub temporal_alpha: f64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            working_width: 256,
            working_height: 256,
            gain: AdaptationParams::default(),
            levels: Levels::Auto,
            include_approximation: true,
            ppd: 32.0,
            acsf: CsfParams::ACHROMATIC,
            rgcsf: CsfParams::RED_GREEN,
            ybcsf: CsfParams::YELLOW_BLUE,
            fusion_weights: [1.0, 1.0, 1.0],
            smoothing_sigma: 0.03,
            temporal_alpha: 0.0,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.working_width < 32 || self.working_height < 32 {
            return Err(Error::InvalidParameter(format!(
                "working size {}x{} must be at least 32x32",
                self.working_width, self.working_height
            )));
        }
        self.gain.validate()?;
        self.levels.resolve(self.working_width, self.working_height)?;
        if !(self.ppd > 0.0 && self.ppd.is_finite()) {
            return Err(Error::InvalidParameter(format!("ppd = {} must be positive", self.ppd)));
        }
        self.acsf.validate()?;
        self.rgcsf.validate()?;
        self.ybcsf.validate()?;
        if self.fusion_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "fusion weights must be finite and non-negative".into(),
            ));
        }
        if self.fusion_weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidParameter("fusion weights are all zero".into()));
        }
        if !(self.smoothing_sigma >= 0.0 && self.smoothing_sigma.is_finite()) {
            return Err(Error::InvalidParameter("smoothing_sigma must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.temporal_alpha) {
            return Err(Error::InvalidParameter("temporal_alpha must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn csf_params(&self, kind: CsfKind) -> &CsfParams {
        match kind {
            CsfKind::Achromatic => &self.acsf,
            CsfKind::RedGreen => &self.rgcsf,
            CsfKind::YellowBlue => &self.ybcsf,
        }
    }
}

const CHANNEL_KINDS: [CsfKind; 3] = [CsfKind::Achromatic, CsfKind::RedGreen, CsfKind::YellowBlue];
const CHANNEL_NAMES: [&str; 3] = ["wb", "rg", "yb"];

/// Per-channel products of one run, at working resolution.
#[derive(Debug, Clone)]
pub struct ChannelIntermediates {
    pub name: &'static str,
    pub pyramid: WaveletPyramid,
    pub energy: RasterPlane,
    pub filtered: RasterPlane,
    pub normalized: RasterPlane,
}

#[derive(Debug, Clone)]
pub struct Intermediates {
    pub adapted: RgbImage,
    pub opponent: OpponentImage,
    pub channels: Vec<ChannelIntermediates>,
    pub fused: RasterPlane,
}

impl Intermediates {
    /// Writes opponent planes, energy maps and filtered channels as
    /// heat-map PNGs and `WECSF1` dumps, plus each channel's pyramid.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |plane: &RasterPlane, stem: String| -> Result<()> {
            crate::io::save_plane(plane, dir.join(format!("{stem}.wecsf")))?;
            crate::io::save_heatmap_png(plane, dir.join(format!("{stem}.png")))
        };
        for (name, plane) in CHANNEL_NAMES.iter().zip(self.opponent.channels()) {
            write(plane, format!("opponent_{name}"))?;
        }
        for ch in &self.channels {
            write(&ch.energy, format!("energy_{}", ch.name))?;
            write(&ch.filtered, format!("filtered_{}", ch.name))?;
            ch.pyramid.save(dir.join(format!("pyramid_{}", ch.name)))?;
        }
        write(&self.fused, "fused".to_string())
    }
}

/// Reusable predictor holding validated parameters and a CSF grid cache.
/// Safe to share across threads.
#[derive(Debug)]
pub struct Predictor {
    params: PipelineParams,
    cache: Arc<CsfCache>,
}

impl Predictor {
    pub fn new(params: PipelineParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            cache: Arc::new(CsfCache::new()),
        })
    }

    pub fn with_cache(params: PipelineParams, cache: Arc<CsfCache>) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, cache })
    }

    pub fn params(&self) -> &PipelineParams {
        &self.params
    }

    pub fn predict(&self, image: &RgbImage) -> Result<SaliencyMap> {
        self.run(image).map(|(map, _)| map)
    }

    pub fn predict_with_intermediates(&self, image: &RgbImage) -> Result<(SaliencyMap, Intermediates)> {
        self.run(image)
    }

    fn channel(
        &self,
        kind: CsfKind,
        name: &'static str,
        plane: &RasterPlane,
        levels: usize,
    ) -> Result<ChannelIntermediates> {
        let p = &self.params;
        let pyramid = dwt_multilevel(plane, levels)?;
        let energy = wavelet_energy_map(&pyramid, p.include_approximation).plane;
        let grid = self
            .cache
            .get_or_build(kind, plane.width(), plane.height(), p.ppd, p.csf_params(kind))?;
        let filtered = apply_csf(&energy, &grid)?;
        let normalized = normalize_minmax(&filtered.map(|v| v.max(0.0)));
        Ok(ChannelIntermediates {
            name,
            pyramid,
            energy,
            filtered,
            normalized,
        })
    }

    fn run(&self, image: &RgbImage) -> Result<(SaliencyMap, Intermediates)> {
        let p = &self.params;
        let (src_w, src_h) = image.dims();
        if src_w < 2 || src_h < 2 {
            return Err(Error::InvalidDimensions {
                width: src_w,
                height: src_h,
            });
        }
        let (ww, wh) = (p.working_width, p.working_height);
        let levels = p.levels.resolve(ww, wh)?;

        let working = image.resize(ww, wh)?;
        let adapted = von_kries_adapt(&working, &p.gain);
        let opponent = rgb_to_opponent(&adapted);

        let planes = opponent.channels();
        let channels = (0..3)
            .into_par_iter()
            .map(|c| self.channel(CHANNEL_KINDS[c], CHANNEL_NAMES[c], planes[c], levels))
            .collect::<Result<Vec<_>>>()?;

        let total: f64 = p.fusion_weights.iter().sum();
        let mut fused = vec![0.0; ww * wh];
        for (ch, &w) in channels.iter().zip(&p.fusion_weights) {
            if w == 0.0 {
                continue;
            }
            for (f, v) in fused.iter_mut().zip(ch.normalized.data()) {
                *f += w * v;
            }
        }
        fused.iter_mut().for_each(|v| *v /= total);
        let fused = RasterPlane::from_parts(ww, wh, fused);

        let smoothed = gaussian_blur(&fused, p.smoothing_sigma * ww as f64);
        let working_map = normalize_minmax(&smoothed);
        // resampling can move the extremes off the grid; renormalize
        let out = normalize_minmax(&resize_bilinear(&working_map, src_w, src_h)?);

        Ok((
            SaliencyMap {
                plane: out,
                source_width: src_w,
                source_height: src_h,
            },
            Intermediates {
                adapted,
                opponent,
                channels,
                fused,
            },
        ))
    }

    /// Frame-wise prediction with optional exponential smoothing
    /// `s'_t = alpha * s'_{t-1} + (1 - alpha) * s_t`, renormalized.
    pub fn predict_video(&self, frames: &[RgbImage]) -> Result<Vec<SaliencyMap>> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidParameter("video has no frames".into()))?;
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.dims() != first.dims()) {
            return Err(Error::DimensionMismatch(format!(
                "frame {i} is {:?}, expected {:?}",
                f.dims(),
                first.dims()
            )));
        }
        let maps = frames.par_iter().map(|f| self.predict(f)).collect::<Result<Vec<_>>>()?;
        let alpha = self.params.temporal_alpha;
        if alpha == 0.0 {
            return Ok(maps);
        }
        let mut out: Vec<SaliencyMap> = Vec::with_capacity(maps.len());
        for map in maps {
            let next = match out.last() {
                None => map,
                Some(prev) => {
                    let blended: Vec<f64> = prev
                        .plane
                        .data()
                        .iter()
                        .zip(map.plane.data())
                        .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                        .collect();
                    let plane = RasterPlane::from_parts(map.source_width, map.source_height, blended);
                    SaliencyMap {
                        plane: normalize_minmax(&plane),
                        ..map
                    }
                }
            };
            out.push(next);
        }
        Ok(out)
    }
}

/// One-shot prediction with a fresh predictor.
pub fn predict_saliency(image: &RgbImage, params: &PipelineParams) -> Result<SaliencyMap> {
    Predictor::new(params.clone())?.predict(image)
}

pub fn predict_video(frames: &[RgbImage], params: &PipelineParams) -> Result<Vec<SaliencyMap>> {
    Predictor::new(params.clone())?.predict_video(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| {
            let fx = x as f64 / w as f64;
            let fy = y as f64 / h as f64;
            [
                0.5 + 0.4 * (9.0 * fx).sin() * (4.0 * fy).cos(),
                0.3 + 0.3 * fx,
                0.6 - 0.4 * ((x / 7 + y / 5) % 2) as f64,
            ]
        })
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PipelineParams::default().validate().is_ok());
        let bad = [
            PipelineParams {
                working_width: 16,
                ..Default::default()
            },
            PipelineParams {
                fusion_weights: [0.0; 3],
                ..Default::default()
            },
            PipelineParams {
                fusion_weights: [1.0, -1.0, 1.0],
                ..Default::default()
            },
            PipelineParams {
                smoothing_sigma: -0.1,
                ..Default::default()
            },
            PipelineParams {
                temporal_alpha: 1.5,
                ..Default::default()
            },
            PipelineParams {
                levels: Levels::Fixed(9),
                ..Default::default()
            },
            PipelineParams {
                ppd: 0.0,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn levels_serde() {
        #[derive(Serialize, Deserialize)]
        struct W {
            levels: Levels,
        }
        let w: W = toml::from_str("levels = \"auto\"").unwrap();
        assert_eq!(w.levels, Levels::Auto);
        let w: W = toml::from_str("levels = 5").unwrap();
        assert_eq!(w.levels, Levels::Fixed(5));
        assert_eq!(
            toml::to_string(&W {
                levels: Levels::Fixed(3)
            })
            .unwrap()
            .trim(),
            "levels = 3"
        );
    }

    #[test]
    fn output_contract() {
        let img = textured(90, 70);
        let map = predict_saliency(&img, &PipelineParams::default()).unwrap();
        assert_eq!(map.plane.dims(), (90, 70));
        assert_eq!((map.source_width, map.source_height), (90, 70));
        assert!(map.plane.data().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(map.plane.max(), 1.0);
    }

    #[test]
    fn rejects_degenerate_images() {
        let img = RgbImage::from_fn(1, 1, |_, _| [0.5; 3]).unwrap();
        assert!(predict_saliency(&img, &PipelineParams::default()).is_err());
    }

    #[test]
    fn uniform_gray_is_finite_and_flat_before_normalization() {
        let img = RgbImage::from_fn(64, 64, |_, _| [0.5; 3]).unwrap();
        let pred = Predictor::new(PipelineParams::default()).unwrap();
        let (map, inter) = pred.predict_with_intermediates(&img).unwrap();
        assert!(map.plane.data().iter().all(|v| v.is_finite()));
        for ch in &inter.channels {
            let spread = ch.filtered.max() - ch.filtered.min();
            assert!(
                spread <= 1e-9 * (1.0 + ch.filtered.max().abs()),
                "{} spread {spread}",
                ch.name
            );
        }
    }

    #[test]
    fn video_modes() {
        let frames: Vec<RgbImage> = (0..3).map(|_| textured(48, 40)).collect();
        let params = PipelineParams::default();
        let single = predict_video(&frames[..1], &params).unwrap();
        assert_eq!(single[0], predict_saliency(&frames[0], &params).unwrap());

        let smooth = PipelineParams {
            temporal_alpha: 0.5,
            ..params.clone()
        };
        let out = predict_video(&frames[..2], &smooth).unwrap();
        for (a, b) in out[0].plane.data().iter().zip(out[1].plane.data()) {
            assert!((a - b).abs() <= 1e-9);
        }

        assert!(predict_video(&[], &params).is_err());
        let mixed = vec![textured(48, 40), textured(40, 48)];
        assert!(matches!(
            predict_video(&mixed, &params),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
