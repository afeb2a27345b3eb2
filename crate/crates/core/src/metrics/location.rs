use crate::error::{Error, Result};
use crate::metrics::{check_fixations, check_same_dims, to_distribution, Fixation};
use crate::raster::RasterPlane;

/// Normalized scanpath saliency: mean of the standardized map over
/// fixated pixels. Standardization uses the sample standard deviation.
pub fn nss(saliency: &RasterPlane, fixations: &[Fixation]) -> Result<f64> {
    let fixated = check_fixations(saliency, fixations)?;
    if saliency.min() == saliency.max() {
        return Err(Error::UndefinedScore("NSS of a constant map".into()));
    }
    let n = saliency.len() as f64;
    let mean = saliency.mean();
    let var = saliency.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::UndefinedScore("NSS of a constant map".into()));
    }
    let (sum, count) = saliency
        .data()
        .iter()
        .zip(&fixated)
        .filter(|(_, &f)| f)
        .fold((0.0, 0usize), |(s, c), (v, _)| (s + (v - mean) / sd, c + 1));
    Ok(sum / count as f64)
}

/// Information gain in bits per fixation of `saliency` over `baseline`;
/// both maps are scaled to unit sum first.
pub fn ig(saliency: &RasterPlane, baseline: &RasterPlane, fixations: &[Fixation], epsilon: f64) -> Result<f64> {
    check_same_dims(saliency, baseline)?;
    let fixated = check_fixations(saliency, fixations)?;
    let p = to_distribution(saliency)?;
    let b = to_distribution(baseline)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((pv, bv), &f) in p.data().iter().zip(b.data()).zip(&fixated) {
        if f {
            sum += (epsilon + pv).log2() - (epsilon + bv).log2();
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nss_single_fixation() {
        let vals = vec![-1.0, 1.0, -1.0, 1.0, 0.0];
        let p = RasterPlane::new(5, 1, vals.clone()).unwrap();
        let mean = 0.0;
        let sd = (vals.iter().map(|v: &f64| v * v).sum::<f64>() / 4.0).sqrt();
        let s = nss(&p, &[Fixation::new(1, 0)]).unwrap();
        assert!((s - (1.0 - mean) / sd).abs() < 1e-15);
    }

    #[test]
    fn nss_standardized_value_two() {
        // mean 0, sample variance 8 / 8 = 1
        let p = RasterPlane::new(3, 3, vec![2.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(nss(&p, &[Fixation::new(0, 0)]).unwrap(), 2.0);
    }

    #[test]
    fn nss_all_pixels_is_zero() {
        let p = RasterPlane::from_fn(4, 3, |x, y| (x * x + 3 * y) as f64).unwrap();
        let all: Vec<_> = (0..3).flat_map(|y| (0..4).map(move |x| Fixation::new(x, y))).collect();
        assert!(nss(&p, &all).unwrap().abs() < 1e-12);
    }

    #[test]
    fn nss_errors() {
        let c = RasterPlane::filled(4, 4, 0.3).unwrap();
        assert!(nss(&c, &[Fixation::new(0, 0)]).unwrap_err().is_skip());
        let p = RasterPlane::from_fn(4, 4, |x, _| x as f64).unwrap();
        assert!(nss(&p, &[]).unwrap_err().is_skip());
        assert!(nss(&p, &[Fixation::new(4, 0)]).is_err());
    }

    #[test]
    fn ig_identities() {
        let b = RasterPlane::from_fn(4, 4, |x, y| 1.0 + (x + y) as f64).unwrap();
        let fix = [Fixation::new(1, 2), Fixation::new(3, 3)];
        assert!(ig(&b, &b, &fix, f64::EPSILON).unwrap().abs() < 1e-12);

        // doubling probability at every fixated pixel gives one bit
        let base = RasterPlane::filled(4, 1, 0.25).unwrap();
        let pred = RasterPlane::new(4, 1, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let g = ig(&pred, &base, &[Fixation::new(0, 0), Fixation::new(1, 0)], f64::EPSILON).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ig_requires_fixations() {
        let b = RasterPlane::filled(3, 3, 1.0).unwrap();
        assert!(ig(&b, &b, &[], 1e-12).is_err());
    }
}
