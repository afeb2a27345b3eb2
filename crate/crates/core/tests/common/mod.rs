//! Independent reference implementations used by the integration and
//! acceptance tests. Each one follows the defining formula directly and
//! shares no code with the library beyond the plain data types.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wecsf::metrics::Fixation;
use wecsf::wavelet::{DetailLevel, WaveletPyramid};
use wecsf::RasterPlane;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_plane(rng: &mut impl Rng, w: usize, h: usize) -> RasterPlane {
    RasterPlane::from_fn(w, h, |_, _| rng.gen_range(0.0..1.0)).unwrap()
}

pub fn random_fixations(rng: &mut impl Rng, w: usize, h: usize, n: usize) -> Vec<Fixation> {
    (0..n)
        .map(|_| Fixation::new(rng.gen_range(0..w), rng.gen_range(0..h)))
        .collect()
}

fn fixated_mask(w: usize, h: usize, fix: &[Fixation]) -> Vec<bool> {
    let mut m = vec![false; w * h];
    for f in fix {
        m[f.y * w + f.x] = true;
    }
    m
}

// ---- metrics -------------------------------------------------------------

/// Two-pass standardization, averaged over distinct fixated pixels.
pub fn nss(s: &RasterPlane, fix: &[Fixation]) -> f64 {
    let v = s.data();
    let n = v.len() as f64;
    let mut mean = 0.0;
    for x in v {
        mean += x;
    }
    mean /= n;
    let mut ss = 0.0;
    for x in v {
        ss += (x - mean) * (x - mean);
    }
    let sd = (ss / (n - 1.0)).sqrt();
    let mask = fixated_mask(s.width(), s.height(), fix);
    let mut total = 0.0;
    let mut count = 0.0;
    for i in 0..v.len() {
        if mask[i] {
            total += (v[i] - mean) / sd;
            count += 1.0;
        }
    }
    total / count
}

fn unit_sum(v: &[f64]) -> Vec<f64> {
    let t: f64 = v.iter().sum();
    v.iter().map(|x| x / t).collect()
}

fn minmax(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    v.iter().map(|x| (x - lo) / (hi - lo)).collect()
}

pub fn sim(p: &RasterPlane, q: &RasterPlane) -> f64 {
    let (p, q) = (unit_sum(p.data()), unit_sum(q.data()));
    p.iter().zip(&q).map(|(a, b)| if a < b { *a } else { *b }).sum()
}

/// Pearson correlation as covariance over the product of deviations.
pub fn cc(p: &RasterPlane, q: &RasterPlane) -> f64 {
    let n = p.len() as f64;
    let mp = p.data().iter().sum::<f64>() / n;
    let mq = q.data().iter().sum::<f64>() / n;
    let cov: f64 = p
        .data()
        .iter()
        .zip(q.data())
        .map(|(a, b)| (a - mp) * (b - mq))
        .sum::<f64>()
        / n;
    let vp: f64 = p.data().iter().map(|a| (a - mp).powi(2)).sum::<f64>() / n;
    let vq: f64 = q.data().iter().map(|b| (b - mq).powi(2)).sum::<f64>() / n;
    cov / (vp * vq).sqrt()
}

pub fn kl(p: &RasterPlane, q: &RasterPlane, eps: f64) -> f64 {
    let (p, q) = (unit_sum(p.data()), unit_sum(q.data()));
    let mut total = 0.0;
    for i in 0..p.len() {
        total += q[i] * (eps + q[i] / (eps + p[i])).ln();
    }
    total
}

pub fn ig(p: &RasterPlane, b: &RasterPlane, fix: &[Fixation], eps: f64) -> f64 {
    let (pv, bv) = (unit_sum(p.data()), unit_sum(b.data()));
    let mask = fixated_mask(p.width(), p.height(), fix);
    let (mut total, mut count) = (0.0, 0.0);
    for i in 0..pv.len() {
        if mask[i] {
            total += (eps + pv[i]).log2() - (eps + bv[i]).log2();
            count += 1.0;
        }
    }
    total / count
}

/// Exhaustive threshold enumeration: one ROC point per distinct fixated
/// value, counting every pixel against every threshold.
pub fn auc_judd(s: &RasterPlane, fix: &[Fixation]) -> f64 {
    let v = s.data();
    let mask = fixated_mask(s.width(), s.height(), fix);
    let np = mask.iter().filter(|&&m| m).count() as f64;
    let nn = v.len() as f64 - np;
    let mut thresholds: Vec<f64> = (0..v.len()).filter(|&i| mask[i]).map(|i| v[i]).collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut pts = vec![(0.0, 0.0)];
    for t in thresholds {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for i in 0..v.len() {
            if v[i] >= t {
                if mask[i] {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        pts.push((fp as f64 / nn, tp as f64 / np));
    }
    pts.push((1.0, 1.0));
    let mut area = 0.0;
    for k in 1..pts.len() {
        area += (pts[k].0 - pts[k - 1].0) * (pts[k].1 + pts[k - 1].1) / 2.0;
    }
    area
}

/// Precision and recall at threshold `t` on the 8-bit quantized map.
pub fn pr_at(s: &RasterPlane, mask: &[bool], t: u8) -> (f64, f64) {
    let (mut tp, mut pred, mut pos) = (0usize, 0usize, 0usize);
    for (i, &x) in s.data().iter().enumerate() {
        let q = (x.clamp(0.0, 1.0) * 255.0).round() as u8;
        if q >= t {
            pred += 1;
            if mask[i] {
                tp += 1;
            }
        }
        if mask[i] {
            pos += 1;
        }
    }
    let precision = if pred == 0 { 0.0 } else { tp as f64 / pred as f64 };
    (precision, tp as f64 / pos as f64)
}

pub fn metric_minmax(p: &RasterPlane) -> RasterPlane {
    RasterPlane::new(p.width(), p.height(), minmax(p.data())).unwrap()
}

// ---- wavelet ---------------------------------------------------------------

fn synth_1d(lo: &[f64], hi: &[f64], n: usize) -> Vec<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![0.0; n];
    for i in 0..n / 2 {
        out[2 * i] = (lo[i] + hi[i]) * r;
        out[2 * i + 1] = (lo[i] - hi[i]) * r;
    }
    if n % 2 == 1 {
        out[n - 1] = lo[n / 2];
    }
    out
}

/// Inverse of one analysis level: columns first, then rows.
pub fn synthesize_level(a: &RasterPlane, d: &DetailLevel, w: usize, h: usize) -> RasterPlane {
    let hw = a.width();
    let column_merge = |lo: &RasterPlane, hi: &RasterPlane| -> Vec<f64> {
        let mut out = vec![0.0; hw * h];
        for x in 0..hw {
            let l: Vec<f64> = (0..lo.height()).map(|y| lo.get(x, y)).collect();
            let hcol: Vec<f64> = (0..hi.height()).map(|y| hi.get(x, y)).collect();
            for (y, v) in synth_1d(&l, &hcol, h).into_iter().enumerate() {
                out[y * hw + x] = v;
            }
        }
        out
    };
    let lo_x = column_merge(a, &d.vertical);
    let hi_x = column_merge(&d.horizontal, &d.diagonal);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        out.extend(synth_1d(&lo_x[y * hw..(y + 1) * hw], &hi_x[y * hw..(y + 1) * hw], w));
    }
    RasterPlane::new(w, h, out).unwrap()
}

pub fn reconstruct(pyr: &WaveletPyramid) -> RasterPlane {
    let mut dims = vec![(pyr.source_width, pyr.source_height)];
    for _ in 1..pyr.levels() {
        let (w, h) = *dims.last().unwrap();
        dims.push((w.div_ceil(2), h.div_ceil(2)));
    }
    let mut a = pyr.approximation.clone();
    for k in (0..pyr.levels()).rev() {
        let (w, h) = dims[k];
        a = synthesize_level(&a, &pyr.details[k], w, h);
    }
    a
}

/// Energy map computed pixel by pixel: for each band, the squared
/// coefficients interpolated at the pixel's position inside the band.
pub fn energy_map(pyr: &WaveletPyramid, with_approx: bool) -> RasterPlane {
    let (w, h) = (pyr.source_width, pyr.source_height);
    let mut bands: Vec<(&RasterPlane, f64)> = Vec::new();
    for (k, level) in pyr.details.iter().enumerate() {
        let f = 2f64.powi(k as i32 + 1);
        bands.push((&level.horizontal, f));
        bands.push((&level.vertical, f));
        bands.push((&level.diagonal, f));
    }
    if with_approx {
        bands.push((&pyr.approximation, 2f64.powi(pyr.levels() as i32)));
    }
    let sample = |b: &RasterPlane, f: f64, x: usize, y: usize| -> f64 {
        let coord = |p: usize, n: usize| -> (usize, usize, f64) {
            let c = ((p as f64 + 0.5) / f - 0.5).max(0.0).min((n - 1) as f64);
            let i0 = c.floor() as usize;
            let i1 = (i0 + 1).min(n - 1);
            (i0, i1, c - i0 as f64)
        };
        let (x0, x1, tx) = coord(x, b.width());
        let (y0, y1, ty) = coord(y, b.height());
        let sq = |xx: usize, yy: usize| b.get(xx, yy) * b.get(xx, yy);
        let top = sq(x0, y0) * (1.0 - tx) + sq(x1, y0) * tx;
        let bottom = sq(x0, y1) * (1.0 - tx) + sq(x1, y1) * tx;
        top * (1.0 - ty) + bottom * ty
    };
    RasterPlane::from_fn(w, h, |x, y| bands.iter().map(|&(b, f)| sample(b, f, x, y)).sum()).unwrap()
}

// ---- CSF -------------------------------------------------------------------

pub struct CsfRef {
    pub g: f64,
    pub fm: f64,
    pub l: f64,
    pub s: f64,
    pub w: f64,
    pub os: f64,
}

pub const ACSF_REF: CsfRef = CsfRef {
    g: 330.74,
    fm: 7.28,
    l: 0.837,
    s: 1.809,
    w: 1.0,
    os: 6.664,
};

pub fn csf(p: &CsfRef, fx: f64, fy: f64) -> f64 {
    let f = (fx * fx + fy * fy).sqrt();
    let q = p.g * ((-f / p.fm).exp() - p.l * (-(f / p.s).powi(2)).exp());
    if f == 0.0 {
        return q;
    }
    let l = 1.0 - p.w * 4.0 * (1.0 - (-f / p.os).exp()) * (fx * fx) * (fy * fy) / f.powi(4);
    q * l
}

/// Naive O(N^2) 2-D DFT; `sign` -1 forward, +1 inverse (unscaled).
pub fn dft2(re: &[f64], im: &[f64], w: usize, h: usize, sign: f64) -> (Vec<f64>, Vec<f64>) {
    let mut ore = vec![0.0; w * h];
    let mut oim = vec![0.0; w * h];
    for v in 0..h {
        for u in 0..w {
            let (mut sr, mut si) = (0.0, 0.0);
            for y in 0..h {
                for x in 0..w {
                    let ang =
                        sign * 2.0 * std::f64::consts::PI * ((u * x) as f64 / w as f64 + (v * y) as f64 / h as f64);
                    let (s, c) = ang.sin_cos();
                    let (a, b) = (re[y * w + x], im[y * w + x]);
                    sr += a * c - b * s;
                    si += a * s + b * c;
                }
            }
            ore[v * w + u] = sr;
            oim[v * w + u] = si;
        }
    }
    (ore, oim)
}
