//! Saliency evaluation metrics.
//!
//! Location-based metrics (AUC variants, NSS, IG) read the saliency map at
//! fixated pixels; repeated fixations on one pixel count once, as with a
//! binary fixation map. Distribution-based metrics (SIM, CC, KL) compare
//! the map against a continuous fixation density.

mod auc;
mod distribution;
mod location;
mod pr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{gaussian_blur, RasterPlane};

pub use auc::{auc_borji, auc_judd, roc_points, sauc, AucScore, SampledAucOptions, DEFAULT_AUC_SEED};
pub use distribution::{cc, kl, sim};
pub use location::{ig, nss};
pub use pr::{f_measure, mean_curve, pr_curve, PrCurve, PrPoint, DEFAULT_BETA2};

/// `f64::EPSILON`, used by KL and IG unless overridden.
pub const DEFAULT_EPSILON: f64 = f64::EPSILON;

/// A fixated pixel, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fixation {
    pub x: usize,
    pub y: usize,
}

impl Fixation {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Ground truth for one stimulus.
#[derive(Debug, Clone, PartialEq)]
pub struct FixationData {
    pub width: usize,
    pub height: usize,
    pub points: Vec<Fixation>,
    /// Continuous fixation map, non-negative.
    pub density: RasterPlane,
}

impl FixationData {
    /// Builds ground truth from points, synthesizing the density by a
    /// Gaussian blur of the point map with `sigma` pixels.
    pub fn from_points(width: usize, height: usize, points: Vec<Fixation>, sigma: f64) -> Result<Self> {
        check_points(width, height, &points)?;
        let density = density_from_points(width, height, &points, sigma)?;
        Ok(Self {
            width,
            height,
            points,
            density,
        })
    }

    pub fn with_density(points: Vec<Fixation>, density: RasterPlane) -> Result<Self> {
        let (width, height) = density.dims();
        check_points(width, height, &points)?;
        if density.data().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("fixation density has negative values".into()));
        }
        Ok(Self {
            width,
            height,
            points,
            density,
        })
    }

    /// Density scaled to unit sum.
    pub fn distribution(&self) -> Result<RasterPlane> {
        to_distribution(&self.density)
    }

    pub fn binary_map(&self) -> Vec<bool> {
        binary_map(self.width, self.height, &self.points)
    }
}

fn check_points(width: usize, height: usize, points: &[Fixation]) -> Result<()> {
    if let Some(p) = points.iter().find(|p| p.x >= width || p.y >= height) {
        return Err(Error::InvalidParameter(format!(
            "fixation ({}, {}) outside {width}x{height}",
            p.x, p.y
        )));
    }
    Ok(())
}

/// Point map blurred with a Gaussian of `sigma` pixels, scaled to unit sum.
pub fn density_from_points(width: usize, height: usize, points: &[Fixation], sigma: f64) -> Result<RasterPlane> {
    let mut map = RasterPlane::zeros(width, height)?.into_data();
    for p in points {
        map[p.y * width + p.x] += 1.0;
    }
    let blurred = gaussian_blur(&RasterPlane::from_parts(width, height, map), sigma);
    let total = blurred.sum();
    if total > 0.0 {
        Ok(blurred.map(|v| v / total))
    } else {
        Ok(blurred)
    }
}

pub(crate) fn binary_map(width: usize, height: usize, points: &[Fixation]) -> Vec<bool> {
    let mut map = vec![false; width * height];
    for p in points {
        if p.x < width && p.y < height {
            map[p.y * width + p.x] = true;
        }
    }
    map
}

pub(crate) fn check_fixations(map: &RasterPlane, points: &[Fixation]) -> Result<Vec<bool>> {
    if points.is_empty() {
        return Err(Error::UndefinedScore("no fixations".into()));
    }
    check_points(map.width(), map.height(), points)?;
    Ok(binary_map(map.width(), map.height(), points))
}

/// Scales a non-negative plane to unit sum.
pub fn to_distribution(plane: &RasterPlane) -> Result<RasterPlane> {
    let total = plane.sum();
    if !(total > 0.0) {
        return Err(Error::UndefinedScore("map has zero total mass".into()));
    }
    Ok(plane.map(|v| v / total))
}

pub(crate) fn check_same_dims(a: &RasterPlane, b: &RasterPlane) -> Result<()> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dims(), b.dims())))
    }
}

/// Metric identifiers; [`MetricKind::column`] gives the report column name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    AucJudd,
    AucBorji,
    Sauc,
    Nss,
    Cc,
    Sim,
    Kl,
    Ig,
}

impl MetricKind {
    pub const ALL: [MetricKind; 8] = [
        MetricKind::AucJudd,
        MetricKind::AucBorji,
        MetricKind::Sauc,
        MetricKind::Nss,
        MetricKind::Cc,
        MetricKind::Sim,
        MetricKind::Kl,
        MetricKind::Ig,
    ];

    pub fn column(self) -> &'static str {
        match self {
            MetricKind::AucJudd => "auc_judd",
            MetricKind::AucBorji => "auc_borji",
            MetricKind::Sauc => "sauc",
            MetricKind::Nss => "nss",
            MetricKind::Cc => "cc",
            MetricKind::Sim => "sim",
            MetricKind::Kl => "kl",
            MetricKind::Ig => "ig",
        }
    }

    /// True for metrics scored against fixation points rather than the density.
    pub fn is_location_based(self) -> bool {
        matches!(
            self,
            MetricKind::AucJudd | MetricKind::AucBorji | MetricKind::Sauc | MetricKind::Nss | MetricKind::Ig
        )
    }

    pub fn parse_list(s: &str) -> Result<Vec<MetricKind>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                return Ok(Self::ALL.to_vec());
            }
            let m: MetricKind = part.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter("empty metric list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        MetricKind::ALL
            .into_iter()
            .find(|m| m.column() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric `{s}`")))
    }
}
