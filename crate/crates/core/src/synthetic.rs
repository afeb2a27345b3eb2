//! Synthetic feature-singleton stimuli with fixations clustered on the
//! target. Used for the bundled sample set, tests and the video demo.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::datasets::{write_fixation_csv, Manifest, ManifestEntry, MANIFEST_FILE};
use crate::error::{Error, Result};
use crate::io::save_rgb_png;
use crate::metrics::Fixation;
use crate::raster::RgbImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PopoutCategory {
    Brightness,
    Color,
    Orientation,
    Size,
}

impl PopoutCategory {
    pub const ALL: [PopoutCategory; 4] = [
        PopoutCategory::Brightness,
        PopoutCategory::Color,
        PopoutCategory::Orientation,
        PopoutCategory::Size,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PopoutCategory::Brightness => "brightness",
            PopoutCategory::Color => "color",
            PopoutCategory::Orientation => "orientation",
            PopoutCategory::Size => "size",
        }
    }
}

impl fmt::Display for PopoutCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PopoutCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown pop-out category `{s}`")))
    }
}

/// A bar item; angles in radians, zero is horizontal.
#[derive(Debug, Clone, Copy)]
struct Bar {
    cx: f64,
    cy: f64,
    length: f64,
    thickness: f64,
    angle: f64,
    color: [f64; 3],
}

impl Bar {
    fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.cx, y - self.cy);
        if 4.0 * (dx * dx + dy * dy) > self.length * self.length + self.thickness * self.thickness {
            return false;
        }
        let (s, c) = self.angle.sin_cos();
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        u.abs() <= self.length / 2.0 && v.abs() <= self.thickness / 2.0
    }

    /// Inclusive pixel bounds of the rotated rectangle, padded by `margin`.
    fn bbox(&self, margin: f64, width: usize, height: usize) -> [usize; 4] {
        let (s, c) = self.angle.sin_cos();
        let hx = (self.length * c.abs() + self.thickness * s.abs()) / 2.0 + margin;
        let hy = (self.length * s.abs() + self.thickness * c.abs()) / 2.0 + margin;
        let clampx = |v: f64| v.round().clamp(0.0, (width - 1) as f64) as usize;
        let clampy = |v: f64| v.round().clamp(0.0, (height - 1) as f64) as usize;
        [
            clampx(self.cx - hx),
            clampy(self.cy - hy),
            clampx(self.cx + hx),
            clampy(self.cy + hy),
        ]
    }
}

const BACKGROUND: [f64; 3] = [0.35, 0.35, 0.35];
const SUBSAMPLES: usize = 4;

fn render(width: usize, height: usize, bars: &[Bar]) -> Result<RgbImage> {
    RgbImage::from_fn(width, height, |x, y| {
        let mut acc = [0.0; 3];
        for sy in 0..SUBSAMPLES {
            for sx in 0..SUBSAMPLES {
                let px = x as f64 + (sx as f64 + 0.5) / SUBSAMPLES as f64 - 0.5;
                let py = y as f64 + (sy as f64 + 0.5) / SUBSAMPLES as f64 - 0.5;
                let color = bars
                    .iter()
                    .rev()
                    .find(|b| b.contains(px, py))
                    .map_or(BACKGROUND, |b| b.color);
                for c in 0..3 {
                    acc[c] += color[c];
                }
            }
        }
        acc.map(|v| v / (SUBSAMPLES * SUBSAMPLES) as f64)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopoutStimulus {
    pub image: RgbImage,
    pub category: PopoutCategory,
    /// `[x0, y0, x1, y1]`, inclusive.
    pub target_bbox: [usize; 4],
    pub target_center: (f64, f64),
}

/// A grid of identical bars with one singleton differing along `category`.
pub fn popout_stimulus(
    category: PopoutCategory,
    width: usize,
    height: usize,
    rng: &mut impl Rng,
) -> Result<PopoutStimulus> {
    if width < 64 || height < 64 {
        return Err(Error::InvalidParameter(
            "pop-out stimuli need at least 64x64 pixels".into(),
        ));
    }
    let (cols, rows) = (5usize, 5usize);
    // items keep clear of the frame edge
    let (mx, my) = (width as f64 * 0.06, height as f64 * 0.06);
    let cell_w = (width as f64 - 2.0 * mx) / cols as f64;
    let cell_h = (height as f64 - 2.0 * my) / rows as f64;
    let unit = cell_w.min(cell_h);
    let jitter = unit * 0.12;
    let target_cell = (rng.gen_range(0..cols), rng.gen_range(0..rows));

    let distractor = Bar {
        cx: 0.0,
        cy: 0.0,
        length: unit * 0.45,
        thickness: unit * 0.12,
        angle: std::f64::consts::FRAC_PI_2,
        color: [0.55, 0.55, 0.55],
    };
    let target = match category {
        PopoutCategory::Brightness => Bar {
            color: [0.95, 0.95, 0.95],
            ..distractor
        },
        PopoutCategory::Color => Bar {
            color: [0.85, 0.2, 0.15],
            ..distractor
        },
        PopoutCategory::Orientation => Bar {
            angle: 0.0,
            ..distractor
        },
        PopoutCategory::Size => Bar {
            length: distractor.length * 1.8,
            thickness: distractor.thickness * 1.8,
            ..distractor
        },
    };
    let distractor = match category {
        PopoutCategory::Color => Bar {
            color: [0.3, 0.6, 0.3],
            ..distractor
        },
        _ => distractor,
    };

    let mut bars = Vec::with_capacity(cols * rows);
    let mut target_bar = target;
    for row in 0..rows {
        for col in 0..cols {
            let cx = mx + (col as f64 + 0.5) * cell_w + rng.gen_range(-jitter..=jitter);
            let cy = my + (row as f64 + 0.5) * cell_h + rng.gen_range(-jitter..=jitter);
            if (col, row) == target_cell {
                target_bar = Bar { cx, cy, ..target };
            } else {
                bars.push(Bar { cx, cy, ..distractor });
            }
        }
    }
    bars.push(target_bar);
    Ok(PopoutStimulus {
        image: render(width, height, &bars)?,
        category,
        target_bbox: target_bar.bbox(unit * 0.15, width, height),
        target_center: (target_bar.cx, target_bar.cy),
    })
}

/// `on_target` Gaussian fixations around `center` (spread `sigma`
/// pixels) plus `uniform` fixations anywhere in the frame.
pub fn synthetic_fixations(
    width: usize,
    height: usize,
    center: (f64, f64),
    sigma: f64,
    on_target: usize,
    uniform: usize,
    rng: &mut impl Rng,
) -> Vec<Fixation> {
    let nx = Normal::new(center.0, sigma).expect("finite sigma");
    let ny = Normal::new(center.1, sigma).expect("finite sigma");
    let mut pts = Vec::with_capacity(on_target + uniform);
    for _ in 0..on_target {
        let x = nx.sample(rng).round().clamp(0.0, (width - 1) as f64) as usize;
        let y = ny.sample(rng).round().clamp(0.0, (height - 1) as f64) as usize;
        pts.push(Fixation::new(x, y));
    }
    for _ in 0..uniform {
        pts.push(Fixation::new(rng.gen_range(0..width), rng.gen_range(0..height)));
    }
    pts
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub id: String,
    pub stimulus: PopoutStimulus,
    pub fixations: Vec<Fixation>,
}

/// `count` stimuli cycling through the categories, deterministic in `seed`.
pub fn sample_set(count: usize, width: usize, height: usize, seed: u64) -> Result<Vec<SyntheticSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let category = PopoutCategory::ALL[i % PopoutCategory::ALL.len()];
            let stimulus = popout_stimulus(category, width, height, &mut rng)?;
            let sigma = width.min(height) as f64 / 30.0;
            let fixations = synthetic_fixations(width, height, stimulus.target_center, sigma, 14, 6, &mut rng);
            Ok(SyntheticSample {
                id: format!("pop{:03}", i + 1),
                stimulus,
                fixations,
            })
        })
        .collect()
}

/// Writes samples in the standard dataset layout. With `with_fixations`
/// false only stimuli and the manifest are written.
pub fn write_dataset(root: &Path, name: &str, samples: &[SyntheticSample], with_fixations: bool) -> Result<()> {
    let manifest = Manifest {
        name: Some(name.to_string()),
        stimuli_dir: "stimuli".into(),
        fixations_dir: "fixations".into(),
        density_dir: "density".into(),
        samples: samples
            .iter()
            .map(|s| ManifestEntry {
                id: s.id.clone(),
                stimulus: None,
                category: Some(s.stimulus.category.name().to_string()),
                target_bbox: Some(s.stimulus.target_bbox),
            })
            .collect(),
    };
    let stimuli = root.join(&manifest.stimuli_dir);
    std::fs::create_dir_all(&stimuli).map_err(|e| Error::io(&stimuli, e))?;
    let fixations = root.join(&manifest.fixations_dir);
    if with_fixations {
        std::fs::create_dir_all(&fixations).map_err(|e| Error::io(&fixations, e))?;
    }
    for s in samples {
        save_rgb_png(&s.stimulus.image, stimuli.join(format!("{}.png", s.id)))?;
        if with_fixations {
            write_fixation_csv(&fixations.join(format!("{}.csv", s.id)), &s.fixations)?;
        }
    }
    let path = root.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Dataset(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// A bright singleton drifting left to right over a static distractor
/// field, `count` frames.
pub fn moving_target_frames(count: usize, width: usize, height: usize, seed: u64) -> Result<Vec<RgbImage>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = popout_stimulus(PopoutCategory::Brightness, width, height, &mut rng)?;
    let radius = width.min(height) as f64 / 20.0;
    (0..count)
        .map(|i| {
            let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            let cx = radius + t * (width as f64 - 2.0 * radius);
            let cy = height as f64 / 2.0;
            RgbImage::from_fn(width, height, |x, y| {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                if d2 <= radius * radius {
                    [1.0, 0.9, 0.2]
                } else {
                    [base.image.r.get(x, y), base.image.g.get(x, y), base.image.b.get(x, y)]
                }
            })
        })
        .collect()
}
