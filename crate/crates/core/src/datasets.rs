//! Stimulus/fixation dataset ingestion.
//!
//! A dataset is a directory with a `manifest.json`:
//!
//! ```json
//! {
//!   "name": "sid4vam",
//!   "stimuli_dir": "stimuli",
//!   "fixations_dir": "fixations",
//!   "density_dir": "density",
//!   "samples": [
//!     { "id": "img001", "category": "brightness", "target_bbox": [40, 52, 71, 83] },
//!     { "id": "img002", "stimulus": "img002.jpg" }
//!   ]
//! }
//! ```
//!
//! * the stimulus is `stimuli_dir/<stimulus>` or, without `stimulus`, the
//!   first of `<id>.png`, `<id>.jpg`, `<id>.jpeg` that exists;
//! * fixations are `fixations_dir/<id>.csv`, header `x,y`, one zero-based
//!   integer pixel pair per line; optional per id;
//! * a density map is `density_dir/<id>.png` (grayscale), optional; when
//!   absent it is synthesized from the points;
//! * `target_bbox` is `[x0, y0, x1, y1]`, inclusive pixel bounds.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{image_dimensions, load_gray, load_rgb};
use crate::metrics::{Fixation, FixationData};
use crate::raster::RgbImage;

pub const MANIFEST_FILE: &str = "manifest.json";
const STIMULUS_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

fn default_stimuli() -> String {
    "stimuli".into()
}
fn default_fixations() -> String {
    "fixations".into()
}
fn default_density() -> String {
    "density".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_stimuli")]
    pub stimuli_dir: String,
    #[serde(default = "default_fixations")]
    pub fixations_dir: String,
    #[serde(default = "default_density")]
    pub density_dir: String,
    pub samples: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stimulus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_bbox: Option<[usize; 4]>,
}

/// Resolved directory layout of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetLayout {
    pub root: PathBuf,
    pub stimuli_dir: PathBuf,
    pub fixations_dir: PathBuf,
    pub density_dir: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSample {
    pub id: String,
    pub stimulus: RgbImage,
    pub fixations: Option<FixationData>,
    pub category: Option<String>,
    pub target_bbox: Option<[usize; 4]>,
}

/// Everything about a sample except its decoded pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub fixations: Option<FixationData>,
    pub category: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub layout: DatasetLayout,
    pub manifest: Manifest,
    stimulus_paths: Vec<PathBuf>,
}

impl Dataset {
    /// Reads and checks `root/manifest.json`: ids are unique and every id
    /// resolves to a stimulus file.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let manifest_path = root.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| Error::Dataset(format!("{}: {e}", manifest_path.display())))?;
        let layout = DatasetLayout {
            stimuli_dir: root.join(&manifest.stimuli_dir),
            fixations_dir: root.join(&manifest.fixations_dir),
            density_dir: root.join(&manifest.density_dir),
            manifest: manifest_path,
            root,
        };

        let mut seen = HashSet::new();
        let mut stimulus_paths = Vec::with_capacity(manifest.samples.len());
        for entry in &manifest.samples {
            if !seen.insert(entry.id.as_str()) {
                return Err(Error::Dataset(format!("duplicate id `{}` in manifest", entry.id)));
            }
            stimulus_paths.push(resolve_stimulus(&layout.stimuli_dir, entry)?);
        }
        Ok(Self {
            layout,
            manifest,
            stimulus_paths,
        })
    }

    pub fn len(&self) -> usize {
        self.manifest.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.samples.is_empty()
    }

    /// The first `n` samples in manifest order.
    pub fn truncated(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.manifest.samples.truncate(n);
        out.stimulus_paths.truncate(n);
        out
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.manifest.samples
    }

    pub fn stimulus_path(&self, index: usize) -> &Path {
        &self.stimulus_paths[index]
    }

    pub fn fixation_path(&self, index: usize) -> PathBuf {
        self.layout
            .fixations_dir
            .join(format!("{}.csv", self.manifest.samples[index].id))
    }

    pub fn density_path(&self, index: usize) -> PathBuf {
        self.layout
            .density_dir
            .join(format!("{}.png", self.manifest.samples[index].id))
    }

    /// True when at least one sample has a fixation file.
    pub fn has_fixations(&self) -> bool {
        (0..self.len()).any(|i| self.fixation_path(i).is_file())
    }

    pub fn has_categories(&self) -> bool {
        self.manifest.samples.iter().any(|e| e.category.is_some())
    }

    fn load_fixations(
        &self,
        index: usize,
        width: usize,
        height: usize,
        density_sigma: f64,
    ) -> Result<Option<FixationData>> {
        let path = self.fixation_path(index);
        if !path.is_file() {
            return Ok(None);
        }
        let points = read_fixation_csv(&path, width, height)?;
        let density_path = self.density_path(index);
        let data = if density_path.is_file() {
            let density = load_gray(&density_path)?;
            if density.dims() != (width, height) {
                return Err(Error::Dataset(format!(
                    "{}: density is {:?}, stimulus is {:?}",
                    density_path.display(),
                    density.dims(),
                    (width, height)
                )));
            }
            FixationData::with_density(points, density)?
        } else {
            FixationData::from_points(width, height, points, density_sigma)?
        };
        Ok(Some(data))
    }

    /// Loads ground truth for one sample, reading only the stimulus header.
    pub fn load_ground_truth(&self, index: usize, density_sigma: f64) -> Result<GroundTruth> {
        let entry = &self.manifest.samples[index];
        let (width, height) = image_dimensions(self.stimulus_path(index))?;
        Ok(GroundTruth {
            id: entry.id.clone(),
            width,
            height,
            fixations: self.load_fixations(index, width, height, density_sigma)?,
            category: entry.category.clone(),
        })
    }

    pub fn load(&self, index: usize, density_sigma: f64) -> Result<DatasetSample> {
        let entry = &self.manifest.samples[index];
        let stimulus = load_rgb(self.stimulus_path(index))?;
        let (w, h) = stimulus.dims();
        Ok(DatasetSample {
            id: entry.id.clone(),
            fixations: self.load_fixations(index, w, h, density_sigma)?,
            stimulus,
            category: entry.category.clone(),
            target_bbox: entry.target_bbox,
        })
    }

    /// Lazy iteration in manifest order.
    pub fn samples(&self, density_sigma: f64) -> impl Iterator<Item = Result<DatasetSample>> + '_ {
        (0..self.len()).map(move |i| self.load(i, density_sigma))
    }
}

/// Convenience wrapper: open a dataset and iterate its samples.
pub fn load_dataset(root: impl AsRef<Path>, density_sigma: f64) -> Result<Vec<DatasetSample>> {
    let ds = Dataset::open(root)?;
    ds.samples(density_sigma).collect()
}

fn resolve_stimulus(dir: &Path, entry: &ManifestEntry) -> Result<PathBuf> {
    if let Some(name) = &entry.stimulus {
        let p = dir.join(name);
        return if p.is_file() {
            Ok(p)
        } else {
            Err(Error::Dataset(format!(
                "stimulus {} for `{}` not found",
                p.display(),
                entry.id
            )))
        };
    }
    STIMULUS_EXTENSIONS
        .iter()
        .map(|ext| dir.join(format!("{}.{ext}", entry.id)))
        .find(|p| p.is_file())
        .ok_or_else(|| {
            Error::Dataset(format!(
                "no stimulus for `{}` in {} (tried .png, .jpg, .jpeg)",
                entry.id,
                dir.display()
            ))
        })
}

#[derive(Debug, Deserialize)]
struct FixationRow {
    x: i64,
    y: i64,
}

/// Parses a fixation CSV, checking every point against the stimulus size.
pub fn read_fixation_csv(path: &Path, width: usize, height: usize) -> Result<Vec<Fixation>> {
    let csv_err = |line: u64, message: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => csv_err(1, format!("{other:?}")),
        })?;
    let headers = reader.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(csv_err(
            1,
            format!(
                "expected header `x,y`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut points = Vec::new();
    for record in reader.deserialize::<FixationRow>() {
        let row = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_err(line, format!("malformed row: {e}"))
        })?;
        if row.x < 0 || row.y < 0 || row.x as usize >= width || row.y as usize >= height {
            return Err(Error::FixationOutOfBounds {
                path: path.to_path_buf(),
                x: row.x,
                y: row.y,
                width,
                height,
            });
        }
        points.push(Fixation::new(row.x as usize, row.y as usize));
    }
    Ok(points)
}

pub fn write_fixation_csv(path: &Path, points: &[Fixation]) -> Result<()> {
    let mut out = String::from("x,y\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.x, p.y));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Ordering key that compares digit runs numerically: `2.png < 10.png`.
fn natural_key(name: &str) -> Vec<(u8, u128, String)> {
    let mut key = Vec::new();
    let mut chars = name.chars().peekable();
    while let Some(&c) = chars.peek() {
        let mut run = String::new();
        let digit = c.is_ascii_digit();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_digit() != digit {
                break;
            }
            run.push(c);
            chars.next();
        }
        if digit {
            key.push((0, run.parse().unwrap_or(u128::MAX), run));
        } else {
            key.push((1, 0, run));
        }
    }
    key
}

/// Frame paths of a video directory (PNG/JPEG files) in natural order.
pub fn list_video_frames(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut frames = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && ext.is_some_and(|e| STIMULUS_EXTENSIONS.contains(&e.as_str())) {
            frames.push(path);
        }
    }
    if frames.is_empty() {
        return Err(Error::Dataset(format!("no frames in {}", dir.display())));
    }
    frames.sort_by_cached_key(|p| natural_key(&p.file_name().unwrap_or_default().to_string_lossy()));
    Ok(frames)
}

/// Decodes every frame in natural order; all frames must share dimensions.
pub fn load_video(dir: impl AsRef<Path>) -> Result<Vec<(PathBuf, RgbImage)>> {
    let paths = list_video_frames(dir)?;
    let mut frames: Vec<(PathBuf, RgbImage)> = Vec::with_capacity(paths.len());
    for path in paths {
        let img = load_rgb(&path)?;
        if let Some((first_path, first)) = frames.first() {
            if first.dims() != img.dims() {
                return Err(Error::DimensionMismatch(format!(
                    "frame {} is {}x{}, but {} is {}x{}",
                    path.display(),
                    img.width(),
                    img.height(),
                    first_path.display(),
                    first.width(),
                    first.height()
                )));
            }
        }
        frames.push((path, img));
    }
    Ok(frames)
}
