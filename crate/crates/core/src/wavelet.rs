//! Multi-level separable Haar decomposition and the wavelet energy map.
//!
//! Orientation convention for a single level, with `lo(a, b) = (a + b)/√2`
//! and `hi(a, b) = (a - b)/√2`:
//!
//! * `horizontal` (`h`): `hi` along x (within each row), `lo` along y.
//!   Responds to vertical edges.
//! * `vertical` (`v`): `lo` along x, `hi` along y.
//! * `diagonal` (`d`): `hi` along both axes.
//!
//! Odd-length axes: the trailing unpaired sample is carried into the
//! approximation unchanged and contributes zero detail, so the transform
//! stays orthonormal and every level has `ceil(n / 2)` samples per axis.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{upsample_blocks, RasterPlane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [Orientation::Horizontal, Orientation::Vertical, Orientation::Diagonal];

    pub fn short_name(self) -> &'static str {
        match self {
            Orientation::Horizontal => "h",
            Orientation::Vertical => "v",
            Orientation::Diagonal => "d",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Detail subbands of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailLevel {
    pub horizontal: RasterPlane,
    pub vertical: RasterPlane,
    pub diagonal: RasterPlane,
}

impl DetailLevel {
    pub fn band(&self, o: Orientation) -> &RasterPlane {
        match o {
            Orientation::Horizontal => &self.horizontal,
            Orientation::Vertical => &self.vertical,
            Orientation::Diagonal => &self.diagonal,
        }
    }

    pub fn bands(&self) -> [&RasterPlane; 3] {
        [&self.horizontal, &self.vertical, &self.diagonal]
    }
}

/// Mallat pyramid: `details[0]` is the finest level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub source_width: usize,
    pub source_height: usize,
    pub details: Vec<DetailLevel>,
    pub approximation: RasterPlane,
}

impl WaveletPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// `3 * levels + 1`.
    pub fn subband_count(&self) -> usize {
        3 * self.details.len() + 1
    }

    /// Every subband, details first (finest to coarsest), approximation last.
    pub fn subbands(&self) -> impl Iterator<Item = &RasterPlane> {
        self.details
            .iter()
            .flat_map(|l| l.bands())
            .chain(std::iter::once(&self.approximation))
    }

    /// Writes one `WECSF1` file per subband plus a `pyramid.json` sidecar.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut entries = Vec::new();
        for (i, level) in self.details.iter().enumerate() {
            for o in Orientation::ALL {
                let file = format!("level{}_{}.wecsf", i + 1, o.short_name());
                crate::io::save_plane(level.band(o), dir.join(&file))?;
                let band = level.band(o);
                entries.push(SubbandEntry {
                    file,
                    level: i + 1,
                    orientation: Some(o),
                    width: band.width(),
                    height: band.height(),
                });
            }
        }
        let file = "approximation.wecsf".to_string();
        crate::io::save_plane(&self.approximation, dir.join(&file))?;
        entries.push(SubbandEntry {
            file,
            level: self.levels(),
            orientation: None,
            width: self.approximation.width(),
            height: self.approximation.height(),
        });
        let sidecar = PyramidSidecar {
            source_width: self.source_width,
            source_height: self.source_height,
            levels: self.levels(),
            subbands: entries,
        };
        let path = dir.join("pyramid.json");
        let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        std::fs::write(&path, json).map_err(|e| Error::io(&path, e))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubbandEntry {
    pub file: String,
    pub level: usize,
    /// `None` marks the approximation band.
    pub orientation: Option<Orientation>,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PyramidSidecar {
    pub source_width: usize,
    pub source_height: usize,
    pub levels: usize,
    pub subbands: Vec<SubbandEntry>,
}

/// Non-negative energy at source resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPlane {
    pub plane: RasterPlane,
}

/// Deepest decomposition: `floor(log2(min(width, height)))`.
pub fn max_levels(width: usize, height: usize) -> Result<usize> {
    let m = width.min(height);
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "a {width}x{height} plane cannot be decomposed"
        )));
    }
    Ok(m.ilog2() as usize)
}

/// One-dimensional Haar analysis of a strided sequence.
fn analyze_1d(input: &[f64], lo: &mut [f64], hi: &mut [f64]) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pairs = input.len() / 2;
    for i in 0..pairs {
        let (a, b) = (input[2 * i], input[2 * i + 1]);
        lo[i] = (a + b) * s;
        hi[i] = (a - b) * s;
    }
    if input.len() % 2 == 1 {
        lo[pairs] = input[input.len() - 1];
        hi[pairs] = 0.0;
    }
}

/// Single-level 2-D analysis: `(approximation, level details)`.
pub fn haar_analysis_2d(plane: &RasterPlane) -> (RasterPlane, DetailLevel) {
    let (w, h) = plane.dims();
    let (hw, hh) = (w.div_ceil(2), h.div_ceil(2));

    // along x
    let mut lo_x = vec![0.0; hw * h];
    let mut hi_x = vec![0.0; hw * h];
    for y in 0..h {
        analyze_1d(
            plane.row(y),
            &mut lo_x[y * hw..(y + 1) * hw],
            &mut hi_x[y * hw..(y + 1) * hw],
        );
    }

    // along y
    let split_columns = |src: &[f64]| {
        let mut lo = vec![0.0; hw * hh];
        let mut hi = vec![0.0; hw * hh];
        let mut col = vec![0.0; h];
        let mut l = vec![0.0; hh];
        let mut hcol = vec![0.0; hh];
        for x in 0..hw {
            for (y, c) in col.iter_mut().enumerate() {
                *c = src[y * hw + x];
            }
            analyze_1d(&col, &mut l, &mut hcol);
            for y in 0..hh {
                lo[y * hw + x] = l[y];
                hi[y * hw + x] = hcol[y];
            }
        }
        (lo, hi)
    };
    let (a, v) = split_columns(&lo_x);
    let (hband, d) = split_columns(&hi_x);

    let mk = |data| RasterPlane::from_parts(hw, hh, data);
    (
        mk(a),
        DetailLevel {
            horizontal: mk(hband),
            vertical: mk(v),
            diagonal: mk(d),
        },
    )
}

/// Multi-level decomposition; recursion continues on the approximation.
pub fn dwt_multilevel(plane: &RasterPlane, levels: usize) -> Result<WaveletPyramid> {
    let deepest = max_levels(plane.width(), plane.height())?;
    if levels == 0 || levels > deepest {
        return Err(Error::InvalidParameter(format!(
            "{levels} levels requested; a {}x{} plane supports 1..={deepest}",
            plane.width(),
            plane.height()
        )));
    }
    let mut details = Vec::with_capacity(levels);
    let mut approx = plane.clone();
    for _ in 0..levels {
        let (a, d) = haar_analysis_2d(&approx);
        details.push(d);
        approx = a;
    }
    Ok(WaveletPyramid {
        source_width: plane.width(),
        source_height: plane.height(),
        details,
        approximation: approx,
    })
}

/// Squares each subband, resamples it bilinearly to source resolution and
/// sums. A level-`k` coefficient is centred on the `2^k` block it covers.
/// `include_approximation = false` sums the detail bands only.
pub fn wavelet_energy_map(pyramid: &WaveletPyramid, include_approximation: bool) -> EnergyPlane {
    let (w, h) = (pyramid.source_width, pyramid.source_height);
    let mut acc = vec![0.0; w * h];
    let mut add = |band: &RasterPlane, factor: usize| {
        let squared = band.map(|v| v * v);
        let up = upsample_blocks(&squared, factor, w, h).expect("source dims are non-zero");
        for (a, v) in acc.iter_mut().zip(up.data()) {
            *a += v;
        }
    };
    for (k, level) in pyramid.details.iter().enumerate() {
        for band in level.bands() {
            add(band, 1 << (k + 1));
        }
    }
    if include_approximation {
        add(&pyramid.approximation, 1 << pyramid.levels());
    }
    EnergyPlane {
        plane: RasterPlane::from_parts(w, h, acc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(w: usize, h: usize, seed: u64) -> RasterPlane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RasterPlane::from_fn(w, h, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let p = RasterPlane::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let pyr = dwt_multilevel(&p, 1).unwrap();
        let l = &pyr.details[0];
        assert!((pyr.approximation.data()[0] - 5.0).abs() < 1e-12);
        assert!((l.horizontal.data()[0] + 1.0).abs() < 1e-12);
        assert!((l.vertical.data()[0] + 2.0).abs() < 1e-12);
        assert!(l.diagonal.data()[0].abs() < 1e-12);
    }

    #[test]
    fn constant_plane() {
        let p = RasterPlane::filled(16, 16, 0.75).unwrap();
        let pyr = dwt_multilevel(&p, 3).unwrap();
        for level in &pyr.details {
            for band in level.bands() {
                assert!(band.data().iter().all(|&v| v.abs() < 1e-15));
            }
        }
        for &a in pyr.approximation.data() {
            assert!((a - 0.75 * 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn max_levels_examples() {
        assert_eq!(max_levels(256, 256).unwrap(), 8);
        assert_eq!(max_levels(681, 511).unwrap(), 8);
        assert_eq!(max_levels(2, 2).unwrap(), 1);
        assert!(max_levels(1, 1).is_err());
        assert!(max_levels(1, 40).is_err());
    }

    #[test]
    fn rejects_bad_level_counts() {
        let p = RasterPlane::zeros(8, 8).unwrap();
        assert!(dwt_multilevel(&p, 0).is_err());
        assert!(dwt_multilevel(&p, 4).is_err());
        assert!(dwt_multilevel(&p, 3).is_ok());
    }

    #[test]
    fn parseval_on_random_64() {
        let p = random_plane(64, 64, 1);
        let pyr = dwt_multilevel(&p, 6).unwrap();
        let e_in: f64 = p.data().iter().map(|v| v * v).sum();
        let e_out: f64 = pyr.subbands().flat_map(|b| b.data()).map(|v| v * v).sum();
        assert!((e_in - e_out).abs() <= 1e-9 * e_in);
        assert_eq!(pyr.subband_count(), 19);
    }

    #[test]
    fn dimension_law() {
        for w in 2..=64 {
            for h in [2usize, 3, 5, 17, 33, 64] {
                let levels = max_levels(w, h).unwrap();
                let pyr = dwt_multilevel(&RasterPlane::zeros(w, h).unwrap(), levels).unwrap();
                for (k, level) in pyr.details.iter().enumerate() {
                    let d = 1usize << (k + 1);
                    for b in level.bands() {
                        assert_eq!(b.dims(), (w.div_ceil(d), h.div_ceil(d)));
                    }
                }
            }
        }
    }

    #[test]
    fn energy_of_zero_pyramid_is_zero() {
        let pyr = dwt_multilevel(&RasterPlane::zeros(12, 9).unwrap(), 3).unwrap();
        let e = wavelet_energy_map(&pyr, true);
        assert!(e.plane.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lone_coefficient_fills_its_block() {
        let mut pyr = dwt_multilevel(&RasterPlane::zeros(2, 2).unwrap(), 1).unwrap();
        pyr.details[0].vertical = RasterPlane::new(1, 1, vec![3.0]).unwrap();
        let e = wavelet_energy_map(&pyr, true);
        assert!(e.plane.data().iter().all(|&v| v == 9.0));
    }

    #[test]
    fn coarse_coefficient_is_centred_on_its_block() {
        let mut pyr = dwt_multilevel(&RasterPlane::zeros(16, 16).unwrap(), 2).unwrap();
        let mut band = vec![0.0; 16];
        band[4 + 1] = 2.0; // covers pixels 4..8 on both axes
        pyr.details[1].diagonal = RasterPlane::new(4, 4, band).unwrap();
        let e = wavelet_energy_map(&pyr, false).plane;
        let peak = e.max();
        for y in 4..8 {
            for x in 4..8 {
                assert!(e.get(x, y) >= e.get(3, 3));
            }
        }
        assert_eq!(e.get(5, 5), peak);
        assert_eq!(e.get(5, 6), peak);
        // mirror symmetry about the block centre
        for y in 0..16 {
            for x in 0..11 {
                assert!((e.get(x, y) - e.get(11 - x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn approximation_flag_only_changes_approximation_term() {
        let p = random_plane(32, 32, 9);
        let pyr = dwt_multilevel(&p, 3).unwrap();
        let with = wavelet_energy_map(&pyr, true);
        let without = wavelet_energy_map(&pyr, false);
        let approx = upsample_blocks(&pyr.approximation.map(|v| v * v), 8, 32, 32).unwrap();
        for i in 0..with.plane.len() {
            let diff = with.plane.data()[i] - without.plane.data()[i];
            assert!((diff - approx.data()[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn detail_energy_ignores_constant_offset() {
        let p = random_plane(32, 32, 4);
        let shifted = p.map(|v| v + 5.0);
        let a = wavelet_energy_map(&dwt_multilevel(&p, 5).unwrap(), false);
        let b = wavelet_energy_map(&dwt_multilevel(&shifted, 5).unwrap(), false);
        for (x, y) in a.plane.data().iter().zip(b.plane.data()) {
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn pyramid_dump_writes_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let pyr = dwt_multilevel(&random_plane(8, 6, 2), 2).unwrap();
        pyr.save(dir.path()).unwrap();
        let sidecar: PyramidSidecar =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("pyramid.json")).unwrap()).unwrap();
        assert_eq!(sidecar.subbands.len(), 7);
        let h1 = crate::io::load_plane(dir.path().join("level1_h.wecsf")).unwrap();
        assert_eq!(h1, pyr.details[0].horizontal);
    }
}
