//! ROC areas with the saliency map as a classifier of fixated pixels.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{binary_map, check_fixations, Fixation};
use crate::raster::{normalize_minmax, RasterPlane};

/// Seed used for sampled AUC variants unless the caller supplies one.
pub const DEFAULT_AUC_SEED: u64 = 0x5A11_E1C7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucScore {
    pub value: f64,
    /// Some threshold was shared by fixated and non-fixated pixels, or by
    /// several fixated pixels. A constant map always sets this.
    pub ties: bool,
}

/// Parameters for AUC-Borji and shuffled AUC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledAucOptions {
    pub n_splits: usize,
    /// Threshold spacing on the min-max normalized map.
    pub step: f64,
    pub seed: u64,
}

impl Default for SampledAucOptions {
    fn default() -> Self {
        Self {
            n_splits: 100,
            step: 0.1,
            seed: DEFAULT_AUC_SEED,
        }
    }
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// AUC-Judd. Thresholds are the distinct saliency values at fixated
/// pixels; the true-positive rate counts fixated pixels at or above the
/// threshold, the false-positive rate counts all remaining pixels.
pub fn auc_judd(saliency: &RasterPlane, fixations: &[Fixation]) -> Result<AucScore> {
    let fixated = check_fixations(saliency, fixations)?;
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
    for (&v, &f) in saliency.data().iter().zip(&fixated) {
        if f {
            pos.push(v)
        } else {
            neg.push(v)
        }
    }
    if neg.is_empty() {
        return Err(Error::UndefinedScore("every pixel is fixated".into()));
    }
    pos.sort_by(|a, b| b.total_cmp(a));
    neg.sort_by(|a, b| b.total_cmp(a));
    let (np, nn) = (pos.len() as f64, neg.len() as f64);

    let mut ties = false;
    let mut curve = vec![(0.0, 0.0)];
    let (mut i, mut j) = (0usize, 0usize);
    while i < pos.len() {
        let t = pos[i];
        let start = i;
        while i < pos.len() && pos[i] >= t {
            i += 1;
        }
        ties |= i - start > 1;
        while j < neg.len() && neg[j] >= t {
            ties |= neg[j] == t;
            j += 1;
        }
        curve.push((j as f64 / nn, i as f64 / np));
    }
    curve.push((1.0, 1.0));
    Ok(AucScore {
        value: trapezoid(&curve),
        ties,
    })
}

/// Area under the curve traced by descending thresholds `k * step` over
/// positives `pos` and negatives `neg`, both on a `[0, 1]` scale.
fn stepped_auc(pos: &[f64], neg: &[f64], step: f64) -> f64 {
    let top = pos.iter().chain(neg).copied().fold(0.0, f64::max);
    let count = (top / step + 1e-9).floor() as usize;
    let mut curve = vec![(0.0, 0.0)];
    for k in (0..=count).rev() {
        let t = k as f64 * step;
        let tp = pos.iter().filter(|&&v| v >= t).count() as f64 / pos.len() as f64;
        let fp = neg.iter().filter(|&&v| v >= t).count() as f64 / neg.len() as f64;
        curve.push((fp, tp));
    }
    curve.push((1.0, 1.0));
    trapezoid(&curve)
}

impl SampledAucOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_splits == 0 {
            return Err(Error::InvalidParameter("n_splits must be positive".into()));
        }
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::InvalidParameter("AUC threshold step must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

fn fixated_values(norm: &RasterPlane, fixated: &[bool]) -> Vec<f64> {
    norm.data()
        .iter()
        .zip(fixated)
        .filter_map(|(&v, &f)| f.then_some(v))
        .collect()
}

/// AUC-Borji: negatives are pixels drawn uniformly with replacement, as
/// many per split as there are fixated pixels; mean over splits.
pub fn auc_borji(saliency: &RasterPlane, fixations: &[Fixation], opts: &SampledAucOptions) -> Result<f64> {
    opts.validate()?;
    let fixated = check_fixations(saliency, fixations)?;
    let norm = normalize_minmax(saliency);
    let pos = fixated_values(&norm, &fixated);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = norm.len();
    let mut neg = vec![0.0; pos.len()];
    let mut total = 0.0;
    for _ in 0..opts.n_splits {
        for v in neg.iter_mut() {
            *v = norm.data()[rng.gen_range(0..n)];
        }
        total += stepped_auc(&pos, &neg, opts.step);
    }
    Ok(total / opts.n_splits as f64)
}

/// Shuffled AUC: negatives are drawn without replacement from `pool`,
/// fixations of other stimuli mapped into this stimulus' frame.
pub fn sauc(
    saliency: &RasterPlane,
    fixations: &[Fixation],
    pool: &[Fixation],
    opts: &SampledAucOptions,
) -> Result<f64> {
    opts.validate()?;
    let fixated = check_fixations(saliency, fixations)?;
    let (w, h) = saliency.dims();
    let pool_map = binary_map(w, h, pool);
    let pool_idx: Vec<usize> = (0..w * h).filter(|&i| pool_map[i]).collect();
    if pool_idx.is_empty() {
        return Err(Error::UndefinedScore("empty shuffle pool".into()));
    }
    let norm = normalize_minmax(saliency);
    let pos = fixated_values(&norm, &fixated);
    let take = pos.len().min(pool_idx.len());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut total = 0.0;
    for _ in 0..opts.n_splits {
        let neg: Vec<f64> = sample(&mut rng, pool_idx.len(), take)
            .into_iter()
            .map(|k| norm.data()[pool_idx[k]])
            .collect();
        total += stepped_auc(&pos, &neg, opts.step);
    }
    Ok(total / opts.n_splits as f64)
}

/// ROC points `(fpr, tpr)` of the Judd construction, for plotting.
pub fn roc_points(saliency: &RasterPlane, fixations: &[Fixation]) -> Result<Vec<(f64, f64)>> {
    let fixated = check_fixations(saliency, fixations)?;
    let mut pairs: Vec<(f64, bool)> = saliency.data().iter().copied().zip(fixated).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let np = pairs.iter().filter(|p| p.1).count() as f64;
    let nn = pairs.len() as f64 - np;
    let mut out = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut i = 0;
    while i < pairs.len() {
        let t = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == t {
            if pairs[i].1 {
                tp += 1.0
            } else {
                fp += 1.0
            }
            i += 1;
        }
        out.push((if nn > 0.0 { fp / nn } else { 0.0 }, tp / np));
    }
    Ok(out)
}
