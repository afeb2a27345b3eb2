//! Contrast sensitivity over the 2-D frequency plane and its application to
//! energy planes in the Fourier domain.
//!
//! Sensitivity at frequency `(fx, fy)` in cycles/degree, `f = |(fx, fy)|`:
//!
//! ```text
//! Q(f)      = g * (exp(-f / fm) - l * exp(-f² / s²))
//! L(fx, fy) = 1 - w * 4 * (1 - exp(-f / os)) * fx² * fy² / f⁴
//! CSF       = Q(f) * L(fx, fy)
//! ```
//!
//! At `f = 0` the oblique term tends to 0, so `CSF(0, 0) = g * (1 - l)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{fft2, fftshift, ifft2_real, ifftshift, ComplexGrid};
use crate::raster::RasterPlane;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsfParams {
    /// Overall gain.
    pub g: f64,
    /// Exponential decay constant, cycles/deg.
    pub fm: f64,
    /// Low-frequency loss.
    pub l: f64,
    /// Loss attenuation, cycles/deg.
    pub s: f64,
    /// Oblique-effect weight.
    pub w: f64,
    /// Oblique-effect scale, cycles/deg.
    pub os: f64,
}

impl CsfParams {
    /// Band-pass luminance CSF with oblique effect.
    pub const ACHROMATIC: CsfParams = CsfParams {
        g: 330.74,
        fm: 7.28,
        l: 0.837,
        s: 1.809,
        w: 1.0,
        os: 6.664,
    };

    /// Low-pass red-green default. Not a published fit; substitute
    /// measured values through the config file when available.
    pub const RED_GREEN: CsfParams = CsfParams {
        g: 91.0,
        fm: 5.5,
        l: 0.0,
        s: 1.809,
        w: 0.0,
        os: 6.664,
    };

    /// Low-pass yellow-blue default, same caveat as [`Self::RED_GREEN`].
    pub const YELLOW_BLUE: CsfParams = CsfParams {
        g: 74.0,
        fm: 4.1,
        l: 0.0,
        s: 1.809,
        w: 0.0,
        os: 6.664,
    };

    pub fn for_kind(kind: CsfKind) -> Self {
        match kind {
            CsfKind::Achromatic => Self::ACHROMATIC,
            CsfKind::RedGreen => Self::RED_GREEN,
            CsfKind::YellowBlue => Self::YELLOW_BLUE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g", self.g),
            ("fm", self.fm),
            ("l", self.l),
            ("s", self.s),
            ("w", self.w),
            ("os", self.os),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("csf {name} = {v} is not finite")));
        }
        for (name, v) in [("fm", self.fm), ("s", self.s), ("os", self.os)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("csf {name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Radial term `Q(f)`.
    pub fn radial(&self, f: f64) -> f64 {
        self.g * ((-f / self.fm).exp() - self.l * (-(f * f) / (self.s * self.s)).exp())
    }

    /// Oblique-effect term `L(fx, fy)`; 1 at the origin.
    pub fn oblique(&self, fx: f64, fy: f64) -> f64 {
        let f2 = fx * fx + fy * fy;
        if f2 == 0.0 {
            return 1.0;
        }
        let f = f2.sqrt();
        1.0 - self.w * 4.0 * (1.0 - (-f / self.os).exp()) * fx * fx * fy * fy / (f2 * f2)
    }

    /// Sensitivity at `(fx, fy)` cycles/deg.
    pub fn sensitivity(&self, fx: f64, fy: f64) -> f64 {
        self.radial(fx.hypot(fy)) * self.oblique(fx, fy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsfKind {
    Achromatic,
    RedGreen,
    YellowBlue,
}

impl CsfKind {
    pub fn name(self) -> &'static str {
        match self {
            CsfKind::Achromatic => "achromatic",
            CsfKind::RedGreen => "red-green",
            CsfKind::YellowBlue => "yellow-blue",
        }
    }
}

impl fmt::Display for CsfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CsfKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "achromatic" | "acsf" | "wb" => Ok(CsfKind::Achromatic),
            "red-green" | "rgcsf" | "rg" => Ok(CsfKind::RedGreen),
            "yellow-blue" | "ybcsf" | "yb" => Ok(CsfKind::YellowBlue),
            other => Err(Error::InvalidParameter(format!("unknown CSF kind `{other}`"))),
        }
    }
}

/// Gain surface in centred (fftshift) layout: the zero frequency sits at
/// `(floor(width / 2), floor(height / 2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsfGrid {
    pub kind: CsfKind,
    pub ppd: f64,
    pub gains: RasterPlane,
}

impl CsfGrid {
    pub fn width(&self) -> usize {
        self.gains.width()
    }

    pub fn height(&self) -> usize {
        self.gains.height()
    }

    /// Gain at signed frequency indices relative to the centre.
    pub fn at(&self, kx: isize, ky: isize) -> f64 {
        let cx = (self.width() / 2) as isize;
        let cy = (self.height() / 2) as isize;
        self.gains.get((cx + kx) as usize, (cy + ky) as usize)
    }
}

/// Frequency in cycles/deg of centred index `i` on an axis of length `n`.
#[inline]
pub fn axis_frequency(i: usize, n: usize, ppd: f64) -> f64 {
    (i as f64 - (n / 2) as f64) / n as f64 * ppd
}

fn build_grid(kind: CsfKind, width: usize, height: usize, ppd: f64, params: &CsfParams) -> Result<CsfGrid> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    if !(ppd > 0.0 && ppd.is_finite()) {
        return Err(Error::InvalidParameter(format!("ppd = {ppd} must be positive")));
    }
    params.validate()?;
    let fx: Vec<f64> = (0..width).map(|i| axis_frequency(i, width, ppd)).collect();
    let fy: Vec<f64> = (0..height).map(|i| axis_frequency(i, height, ppd)).collect();
    let gains = RasterPlane::from_fn(width, height, |x, y| params.sensitivity(fx[x], fy[y]))?;
    Ok(CsfGrid { kind, ppd, gains })
}

/// Achromatic (band-pass) grid.
pub fn build_acsf(width: usize, height: usize, ppd: f64, params: &CsfParams) -> Result<CsfGrid> {
    build_grid(CsfKind::Achromatic, width, height, ppd, params)
}

/// Chromatic grid; same functional form with the kind's parameter set.
pub fn build_chromatic_csf(
    kind: CsfKind,
    width: usize,
    height: usize,
    ppd: f64,
    params: &CsfParams,
) -> Result<CsfGrid> {
    if kind == CsfKind::Achromatic {
        return Err(Error::InvalidParameter(
            "achromatic grids are built with build_acsf".into(),
        ));
    }
    build_grid(kind, width, height, ppd, params)
}

pub fn build_csf(kind: CsfKind, width: usize, height: usize, ppd: f64, params: &CsfParams) -> Result<CsfGrid> {
    build_grid(kind, width, height, ppd, params)
}

/// Spectrum of `plane`, centred, multiplied by `grid`, uncentred and
/// inverted; the real part is returned.
pub fn filter_spectrum(plane: &RasterPlane, grid: &CsfGrid) -> Result<ComplexGrid> {
    if !plane.same_dims(&grid.gains) {
        return Err(Error::DimensionMismatch(format!(
            "plane {:?} vs CSF grid {:?}",
            plane.dims(),
            grid.gains.dims()
        )));
    }
    let (w, h) = plane.dims();
    let spectrum = fft2(plane);
    let mut centred = fftshift(w, h, &spectrum.data);
    for (c, &g) in centred.iter_mut().zip(grid.gains.data()) {
        *c *= g;
    }
    Ok(ComplexGrid {
        width: w,
        height: h,
        data: ifftshift(w, h, &centred),
    })
}

/// `real(IFFT(ifftshift(fftshift(FFT(plane)) ⊙ grid)))`.
pub fn apply_csf(plane: &RasterPlane, grid: &CsfGrid) -> Result<RasterPlane> {
    let filtered = filter_spectrum(plane, grid)?;
    Ok(ifft2_real(&filtered))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct GridKey {
    kind: CsfKind,
    width: usize,
    height: usize,
    ppd: u64,
    params: [u64; 6],
}

impl GridKey {
    fn new(kind: CsfKind, width: usize, height: usize, ppd: f64, p: &CsfParams) -> Self {
        Self {
            kind,
            width,
            height,
            ppd: ppd.to_bits(),
            params: [p.g, p.fm, p.l, p.s, p.w, p.os].map(f64::to_bits),
        }
    }
}

/// Shared, read-mostly cache of built grids keyed by dims, ppd and params.
#[derive(Debug, Default)]
pub struct CsfCache {
    grids: RwLock<HashMap<GridKey, Arc<CsfGrid>>>,
}

impl CsfCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(
        &self,
        kind: CsfKind,
        width: usize,
        height: usize,
        ppd: f64,
        params: &CsfParams,
    ) -> Result<Arc<CsfGrid>> {
        let key = GridKey::new(kind, width, height, ppd, params);
        if let Some(g) = self.grids.read().expect("csf cache poisoned").get(&key) {
            return Ok(Arc::clone(g));
        }
        let built = Arc::new(build_csf(kind, width, height, ppd, params)?);
        let mut map = self.grids.write().expect("csf cache poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.grids.read().expect("csf cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
