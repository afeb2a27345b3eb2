use crate::error::{Error, Result};
use crate::metrics::{check_same_dims, to_distribution};
use crate::raster::RasterPlane;

/// Histogram intersection of the two maps after each is scaled to unit sum.
pub fn sim(saliency: &RasterPlane, density: &RasterPlane) -> Result<f64> {
    check_same_dims(saliency, density)?;
    let p = to_distribution(saliency)?;
    let q = to_distribution(density)?;
    let s: f64 = p.data().iter().zip(q.data()).map(|(a, b)| a.min(*b)).sum();
    Ok(s.clamp(0.0, 1.0))
}

/// Pearson correlation between the maps.
pub fn cc(saliency: &RasterPlane, density: &RasterPlane) -> Result<f64> {
    check_same_dims(saliency, density)?;
    if saliency.min() == saliency.max() || density.min() == density.max() {
        return Err(Error::UndefinedScore("CC with a constant map".into()));
    }
    let (ma, mb) = (saliency.mean(), density.mean());
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in saliency.data().iter().zip(density.data()) {
        let (da, db) = (a - ma, b - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if !(saa > 0.0 && sbb > 0.0) {
        return Err(Error::UndefinedScore("CC with a constant map".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// `sum Q * ln(eps + Q / (eps + P))` with `P` the saliency and `Q` the
/// density, both scaled to unit sum. For `P == Q` the result is bounded
/// below by `-n * eps`, `n` being the number of pixels with `Q > 0`.
pub fn kl(saliency: &RasterPlane, density: &RasterPlane, epsilon: f64) -> Result<f64> {
    check_same_dims(saliency, density)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let p = to_distribution(saliency)?;
    let q = to_distribution(density)?;
    Ok(p.data()
        .iter()
        .zip(q.data())
        .map(|(pv, qv)| qv * (epsilon + qv / (epsilon + pv)).ln())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[f64]) -> RasterPlane {
        RasterPlane::new(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn sim_examples() {
        let p = row(&[0.7, 0.3]);
        let q = row(&[0.4, 0.6]);
        assert!((sim(&p, &q).unwrap() - 0.7).abs() < 1e-15);
        assert!((sim(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(sim(&row(&[1.0, 0.0]), &row(&[0.0, 2.0])).unwrap(), 0.0);
        assert!(sim(&row(&[0.0, 0.0]), &q).unwrap_err().is_skip());
    }

    #[test]
    fn cc_examples() {
        let q = row(&[0.1, 0.5, 0.2, 0.9]);
        let affine = q.map(|v| 3.0 * v + 2.0);
        assert!((cc(&affine, &q).unwrap() - 1.0).abs() < 1e-12);
        assert!((cc(&q.scale(-1.0), &q).unwrap() + 1.0).abs() < 1e-12);
        assert!(cc(&row(&[1.0; 4]), &q).unwrap_err().is_skip());
    }

    #[test]
    fn kl_examples() {
        let p = row(&[0.5, 0.5]);
        let q = row(&[1.0, 0.0]);
        assert!((kl(&p, &q, 1e-12).unwrap() - 2f64.ln()).abs() < 1e-6);
        let d = row(&[0.2, 0.3, 0.5]);
        let same = kl(&d, &d, f64::EPSILON).unwrap();
        assert!(same.abs() <= 1e-6 && same >= -3.0 * f64::EPSILON);
    }

    #[test]
    fn kl_grows_as_epsilon_shrinks() {
        let p = row(&[1.0, 0.0]);
        let q = row(&[0.0, 1.0]);
        let mut last = 0.0;
        for eps in [1e-3, 1e-6, 1e-9, 1e-12] {
            let v = kl(&p, &q, eps).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(last > 20.0);
    }
}
