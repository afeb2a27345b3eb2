//! Precision-recall over the 256 thresholds of an 8-bit quantized map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{quantize_u8, RasterPlane};

pub const DEFAULT_BETA2: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: u8,
    /// 0 when nothing is predicted positive.
    pub precision: f64,
    pub recall: f64,
    /// False-positive rate, for ROC plots.
    pub fpr: f64,
}

/// One point per threshold `t = 0..=255`; a pixel is predicted salient
/// when `round(255 * s) >= t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

pub fn pr_curve(saliency: &RasterPlane, mask: &[bool]) -> Result<PrCurve> {
    if mask.len() != saliency.len() {
        return Err(Error::DimensionMismatch(format!(
            "mask has {} pixels, map has {}",
            mask.len(),
            saliency.len()
        )));
    }
    let positives = mask.iter().filter(|&&m| m).count();
    if positives == 0 {
        return Err(Error::UndefinedScore("empty positive mask".into()));
    }
    let negatives = mask.len() - positives;

    // histograms of quantized values split by mask label
    let mut hist_pos = [0usize; 256];
    let mut hist_neg = [0usize; 256];
    for (&v, &m) in saliency.data().iter().zip(mask) {
        let q = quantize_u8(v) as usize;
        if m {
            hist_pos[q] += 1
        } else {
            hist_neg[q] += 1
        }
    }
    let mut points = Vec::with_capacity(256);
    let (mut tp, mut fp) = (0usize, 0usize);
    for t in (0..256).rev() {
        tp += hist_pos[t];
        fp += hist_neg[t];
        let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
        points.push(PrPoint {
            threshold: t as u8,
            precision,
            recall: tp as f64 / positives as f64,
            fpr: if negatives > 0 {
                fp as f64 / negatives as f64
            } else {
                0.0
            },
        });
    }
    points.reverse();
    Ok(PrCurve { points })
}

fn f_value(p: f64, r: f64, beta2: f64) -> f64 {
    let denom = beta2 * p + r;
    if denom > 0.0 {
        (1.0 + beta2) * p * r / denom
    } else {
        0.0
    }
}

/// Maximum over thresholds of `(1 + β²) P R / (β² P + R)`.
pub fn f_measure(curve: &PrCurve, beta2: f64) -> f64 {
    curve
        .points
        .iter()
        .map(|p| f_value(p.precision, p.recall, beta2))
        .fold(0.0, f64::max)
}

/// Threshold-wise average of several curves.
pub fn mean_curve(curves: &[PrCurve]) -> Option<PrCurve> {
    let n = curves.len();
    if n == 0 {
        return None;
    }
    let points = (0..256)
        .map(|t| {
            let sum = |f: fn(&PrPoint) -> f64| curves.iter().map(|c| f(&c.points[t])).sum::<f64>() / n as f64;
            PrPoint {
                threshold: t as u8,
                precision: sum(|p| p.precision),
                recall: sum(|p| p.recall),
                fpr: sum(|p| p.fpr),
            }
        })
        .collect();
    Some(PrCurve { points })
}
