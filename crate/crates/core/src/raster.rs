//! Raster containers shared by every stage, plus the resampling and
//! normalization helpers that sit between stages.

use crate::error::{Error, Result};

/// One 2-D channel of `f64` samples stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterPlane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterPlane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        if data.len() != width * height {
            return Err(Error::DataLength {
                width,
                height,
                len: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0.0)
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Internal constructor for callers that already uphold the invariants.
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Applies `f` pointwise. `f` must map finite values to finite values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| v * k)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// Location of the first maximum in row-major order, as `(x, y)`.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    /// Left-right mirror image.
    pub fn mirror_horizontal(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            data.extend(self.row(y).iter().rev());
        }
        Self::from_parts(self.width, self.height, data)
    }

    pub fn same_dims(&self, other: &RasterPlane) -> bool {
        self.dims() == other.dims()
    }
}

/// Three aligned colour planes with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub r: RasterPlane,
    pub g: RasterPlane,
    pub b: RasterPlane,
}

impl RgbImage {
    /// Assembles an image, clamping every channel value into `[0, 1]`.
    pub fn new(r: RasterPlane, g: RasterPlane, b: RasterPlane) -> Result<Self> {
        if !r.same_dims(&g) || !r.same_dims(&b) {
            return Err(Error::DimensionMismatch(format!(
                "channels {:?}, {:?}, {:?}",
                r.dims(),
                g.dims(),
                b.dims()
            )));
        }
        let clamp = |p: RasterPlane| p.map(|v| v.clamp(0.0, 1.0));
        Ok(Self {
            r: clamp(r),
            g: clamp(g),
            b: clamp(b),
        })
    }

    /// Builds an image from interleaved 8-bit RGB samples.
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        if bytes.len() != width * height * 3 {
            return Err(Error::DataLength {
                width,
                height,
                len: bytes.len() / 3,
            });
        }
        let channel = |c: usize| {
            RasterPlane::from_parts(
                width,
                height,
                bytes.chunks_exact(3).map(|px| f64::from(px[c]) / 255.0).collect(),
            )
        };
        Ok(Self {
            r: channel(0),
            g: channel(1),
            b: channel(2),
        })
    }

    /// Image whose three channels are the same plane.
    pub fn gray(plane: &RasterPlane) -> Result<Self> {
        Self::new(plane.clone(), plane.clone(), plane.clone())
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [f64; 3]) -> Result<Self> {
        Self::new(
            RasterPlane::from_fn(width, height, |x, y| f(x, y)[0])?,
            RasterPlane::from_fn(width, height, |x, y| f(x, y)[1])?,
            RasterPlane::from_fn(width, height, |x, y| f(x, y)[2])?,
        )
    }

    pub fn width(&self) -> usize {
        self.r.width()
    }

    pub fn height(&self) -> usize {
        self.r.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.r.dims()
    }

    pub fn channels(&self) -> [&RasterPlane; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn map_channels(&self, f: impl Fn(&RasterPlane) -> RasterPlane) -> Self {
        Self {
            r: f(&self.r),
            g: f(&self.g),
            b: f(&self.b),
        }
    }

    pub fn resize(&self, width: usize, height: usize) -> Result<Self> {
        Ok(Self {
            r: resize_bilinear(&self.r, width, height)?,
            g: resize_bilinear(&self.g, width, height)?,
            b: resize_bilinear(&self.b, width, height)?,
        })
    }

    pub fn mirror_horizontal(&self) -> Self {
        self.map_channels(RasterPlane::mirror_horizontal)
    }

    /// Interleaved 8-bit RGB samples, `round(255 * v)` per channel.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.r.len() * 3);
        for i in 0..self.r.len() {
            for c in self.channels() {
                out.push(quantize_u8(c.data()[i]));
            }
        }
        out
    }
}

/// Final model output: a `[0, 1]` map at the stimulus resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    pub plane: RasterPlane,
    pub source_width: usize,
    pub source_height: usize,
}

impl SaliencyMap {
    pub fn new(plane: RasterPlane) -> Self {
        let (source_width, source_height) = plane.dims();
        Self {
            plane,
            source_width,
            source_height,
        }
    }

    pub fn to_gray8(&self) -> Vec<u8> {
        self.plane.data().iter().map(|&v| quantize_u8(v)).collect()
    }
}

/// `round(255 * v)` with `v` clamped into `[0, 1]`.
#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Rescales to `[0, 1]`; a constant plane maps to all zeros.
pub fn normalize_minmax(plane: &RasterPlane) -> RasterPlane {
    let (lo, hi) = (plane.min(), plane.max());
    let range = hi - lo;
    if range <= 0.0 || !range.is_finite() {
        return plane.map(|_| 0.0);
    }
    plane.map(|v| ((v - lo) / range).clamp(0.0, 1.0))
}

/// Source coordinate of output sample `i` under corner-aligned sampling.
/// A single output sample reads the centre of the source axis.
#[inline]
fn source_coord(i: usize, src_len: usize, dst_len: usize) -> f64 {
    if dst_len == 1 {
        (src_len - 1) as f64 / 2.0
    } else {
        i as f64 * (src_len - 1) as f64 / (dst_len - 1) as f64
    }
}

/// Precomputed `(lower index, upper index, weight)` taps for one axis.
fn axis_taps(src_len: usize, dst_len: usize) -> Vec<(usize, usize, f64)> {
    (0..dst_len)
        .map(|i| {
            if src_len == 1 {
                return (0, 0, 0.0);
            }
            let s = source_coord(i, src_len, dst_len);
            let i0 = (s.floor() as usize).min(src_len - 2);
            (i0, i0 + 1, s - i0 as f64)
        })
        .collect()
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    // a + t(b - a) keeps constants exact
    a + t * (b - a)
}

/// Bilinear resampling with corner-aligned sample positions: the first and
/// last samples of each axis map onto the first and last source samples.
pub fn resize_bilinear(plane: &RasterPlane, new_width: usize, new_height: usize) -> Result<RasterPlane> {
    if new_width == 0 || new_height == 0 {
        return Err(Error::InvalidDimensions {
            width: new_width,
            height: new_height,
        });
    }
    if plane.dims() == (new_width, new_height) {
        return Ok(plane.clone());
    }
    let (w, h) = plane.dims();
    let xt = axis_taps(w, new_width);
    let yt = axis_taps(h, new_height);

    // horizontal pass, then vertical
    let mut rows = Vec::with_capacity(new_width * h);
    for y in 0..h {
        let row = plane.row(y);
        rows.extend(xt.iter().map(|&(x0, x1, t)| lerp(row[x0], row[x1], t)));
    }
    let mut out = Vec::with_capacity(new_width * new_height);
    for &(y0, y1, t) in &yt {
        let r0 = &rows[y0 * new_width..(y0 + 1) * new_width];
        let r1 = &rows[y1 * new_width..(y1 + 1) * new_width];
        out.extend(r0.iter().zip(r1).map(|(&a, &b)| lerp(a, b, t)));
    }
    Ok(RasterPlane::from_parts(new_width, new_height, out))
}

/// Taps for block upsampling: output sample `i` reads coarse coordinate
/// `(i + 0.5) / factor - 0.5`, clamped into the coarse axis.
fn block_taps(src_len: usize, dst_len: usize, factor: usize) -> Vec<(usize, usize, f64)> {
    (0..dst_len)
        .map(|i| {
            if src_len == 1 {
                return (0, 0, 0.0);
            }
            let s = ((i as f64 + 0.5) / factor as f64 - 0.5).clamp(0.0, (src_len - 1) as f64);
            let i0 = (s.floor() as usize).min(src_len - 2);
            (i0, i0 + 1, s - i0 as f64)
        })
        .collect()
}

/// Bilinear upsampling of a plane decimated by `factor`: each coarse sample
/// sits at the centre of the `factor x factor` block it summarizes, and
/// samples beyond the outermost centres repeat the edge value.
pub fn upsample_blocks(plane: &RasterPlane, factor: usize, new_width: usize, new_height: usize) -> Result<RasterPlane> {
    if new_width == 0 || new_height == 0 {
        return Err(Error::InvalidDimensions {
            width: new_width,
            height: new_height,
        });
    }
    if factor == 0 {
        return Err(Error::InvalidParameter("upsampling factor must be positive".into()));
    }
    let (w, h) = plane.dims();
    let xt = block_taps(w, new_width, factor);
    let yt = block_taps(h, new_height, factor);
    let mut rows = Vec::with_capacity(new_width * h);
    for y in 0..h {
        let row = plane.row(y);
        rows.extend(xt.iter().map(|&(x0, x1, t)| lerp(row[x0], row[x1], t)));
    }
    let mut out = Vec::with_capacity(new_width * new_height);
    for &(y0, y1, t) in &yt {
        let r0 = &rows[y0 * new_width..(y0 + 1) * new_width];
        let r1 = &rows[y1 * new_width..(y1 + 1) * new_width];
        out.extend(r0.iter().zip(r1).map(|(&a, &b)| lerp(a, b, t)));
    }
    Ok(RasterPlane::from_parts(new_width, new_height, out))
}

/// Half-sample symmetric reflection of an arbitrary index into `0..n`.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable Gaussian blur with symmetric boundary reflection.
/// `sigma <= 0` returns the input unchanged.
pub fn gaussian_blur(plane: &RasterPlane, sigma: f64) -> RasterPlane {
    if !(sigma > 0.0) {
        return plane.clone();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = plane.dims();

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = plane.row(y);
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                acc += kv * row[reflect(x as isize + k as isize - radius, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (k, &kv) in kernel.iter().enumerate() {
            let src = reflect(y as isize + k as isize - radius, h);
            let src_row = &tmp[src * w..(src + 1) * w];
            for (o, &s) in out[y * w..(y + 1) * w].iter_mut().zip(src_row) {
                *o += kv * s;
            }
        }
    }
    RasterPlane::from_parts(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plane(w: usize, h: usize, v: &[f64]) -> RasterPlane {
        RasterPlane::new(w, h, v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(RasterPlane::new(0, 3, vec![]).is_err());
        assert!(RasterPlane::new(2, 2, vec![0.0; 3]).is_err());
        assert!(matches!(
            RasterPlane::new(2, 1, vec![0.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn minmax_examples() {
        let out = normalize_minmax(&plane(2, 2, &[0.0, 5.0, 10.0, 5.0]));
        assert_eq!(out.data(), &[0.0, 0.5, 1.0, 0.5]);
        let out = normalize_minmax(&plane(2, 1, &[-2.0, 2.0]));
        assert_eq!(out.data(), &[0.0, 1.0]);
        let out = normalize_minmax(&RasterPlane::filled(3, 3, 7.5).unwrap());
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn resize_identity_is_bitwise() {
        let p = RasterPlane::from_fn(7, 5, |x, y| (x * 31 + y * 7) as f64 / 13.0).unwrap();
        assert_eq!(resize_bilinear(&p, 7, 5).unwrap(), p);
    }

    #[test]
    fn resize_corner_aligned_example() {
        let p = plane(2, 1, &[0.0, 1.0]);
        let out = resize_bilinear(&p, 4, 1).unwrap();
        let expected = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        for (a, b) in out.data().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn resize_rejects_zero() {
        let p = plane(2, 1, &[0.0, 1.0]);
        assert!(resize_bilinear(&p, 0, 3).is_err());
        assert!(resize_bilinear(&p, 3, 0).is_err());
    }

    #[test]
    fn resize_from_single_pixel_is_constant() {
        let p = plane(1, 1, &[0.25]);
        let out = resize_bilinear(&p, 5, 3).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn blur_preserves_constants_and_mass() {
        let c = RasterPlane::filled(20, 11, 0.3).unwrap();
        let out = gaussian_blur(&c, 2.5);
        assert!(out.data().iter().all(|&v| (v - 0.3).abs() < 1e-14));

        let mut impulse = vec![0.0; 41 * 41];
        impulse[20 * 41 + 20] = 1.0;
        let p = plane(41, 41, &impulse);
        let out = gaussian_blur(&p, 3.0);
        assert!((out.sum() - 1.0).abs() < 1e-12);
        assert_eq!(out.argmax(), (20, 20));
    }

    #[test]
    fn reflect_handles_far_indices() {
        assert_eq!(reflect(-1, 4), 0);
        assert_eq!(reflect(-2, 4), 1);
        assert_eq!(reflect(4, 4), 3);
        assert_eq!(reflect(9, 4), 1);
        assert_eq!(reflect(-9, 1), 0);
    }

    #[test]
    fn rgb_clamps_on_construction() {
        let r = plane(1, 1, &[1.5]);
        let g = plane(1, 1, &[-0.5]);
        let b = plane(1, 1, &[0.5]);
        let img = RgbImage::new(r, g, b).unwrap();
        assert_eq!(img.r.data(), &[1.0]);
        assert_eq!(img.g.data(), &[0.0]);
        assert!(RgbImage::new(plane(1, 1, &[0.0]), plane(2, 1, &[0.0, 0.0]), plane(1, 1, &[0.0])).is_err());
    }

    proptest! {
        #[test]
        fn minmax_range(values in proptest::collection::vec(-1e6f64..1e6, 1..64)) {
            let n = values.len();
            let out = normalize_minmax(&RasterPlane::new(n, 1, values).unwrap());
            prop_assert!(out.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }

        #[test]
        fn resize_constant(c in -10.0f64..10.0, w in 1usize..9, h in 1usize..9, nw in 1usize..20, nh in 1usize..20) {
            let p = RasterPlane::filled(w, h, c).unwrap();
            let out = resize_bilinear(&p, nw, nh).unwrap();
            prop_assert!(out.data().iter().all(|&v| v == c));
        }
    }
}
