//! Dataset-level evaluation: per-image scores, aggregates, skips and
//! optional PR/ROC curves.
//!
//! Location-based metrics are scored against fixation points and
//! distribution-based metrics against the fixation density. Saliency maps
//! are min-max normalized before the distribution metrics and IG. The IG
//! baseline is a leave-one-out centre prior: the mean ground-truth
//! distribution of every other image, accumulated at 128x128 and resized to
//! each stimulus. The sAUC negatives of an image are the fixations of every
//! other image, mapped into its frame by relative position.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{Dataset, GroundTruth};
use crate::error::{Error, Result};
use crate::io::{load_gray, load_rgb};
use crate::metrics::{
    auc_borji, auc_judd, cc, f_measure, ig, kl, mean_curve, nss, pr_curve, sauc, sim, Fixation, FixationData,
    MetricKind, PrCurve, SampledAucOptions, DEFAULT_AUC_SEED, DEFAULT_BETA2, DEFAULT_EPSILON,
};
use crate::pipeline::Predictor;
use crate::plot::LineChart;
use crate::raster::{normalize_minmax, resize_bilinear, RasterPlane};

const PRIOR_SIZE: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub metrics: Vec<MetricKind>,
    pub seed: u64,
    pub n_splits: usize,
    /// Threshold spacing for AUC-Borji and sAUC.
    pub step: f64,
    pub epsilon: f64,
    /// Blur for densities synthesized from points, in stimulus pixels.
    pub density_sigma_px: f64,
    pub curves: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            metrics: MetricKind::ALL.to_vec(),
            seed: DEFAULT_AUC_SEED,
            n_splits: 100,
            step: 0.1,
            epsilon: DEFAULT_EPSILON,
            density_sigma_px: 32.0,
            curves: false,
        }
    }
}

impl EvalOptions {
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::InvalidParameter("no metrics selected".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if !(self.density_sigma_px >= 0.0 && self.density_sigma_px.is_finite()) {
            return Err(Error::InvalidParameter("density sigma must be >= 0".into()));
        }
        self.sampled().validate()
    }

    fn sampled(&self) -> SampledAucOptions {
        SampledAucOptions {
            n_splits: self.n_splits,
            step: self.step,
            seed: self.seed,
        }
    }

    fn wants(&self, m: MetricKind) -> bool {
        self.metrics.contains(&m)
    }
}

/// Where saliency maps come from.
#[derive(Clone, Copy)]
pub enum MapSource<'a> {
    /// `<dir>/<id>.png` (or `.jpg`), resized to the stimulus when needed.
    Directory(&'a Path),
    Model(&'a Predictor),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScores {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub scores: BTreeMap<MetricKind, f64>,
    /// Metric -> reason for metrics whose score is undefined here.
    pub skipped: BTreeMap<MetricKind, String>,
    /// AUC-Judd saw tied thresholds.
    pub judd_ties: bool,
    /// Prediction time, when maps come from the model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predict_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    /// Ground-truth mask used for PR: the target box when the manifest has
    /// one, otherwise pixels at or above half the peak fixation density.
    pub mask: String,
    pub pr: PrCurve,
    pub f_measure: f64,
    pub beta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub metrics: Vec<MetricKind>,
    /// Metric -> "fixation points" or "fixation density".
    pub ground_truth: BTreeMap<MetricKind, String>,
    pub options: EvalOptions,
    pub images: Vec<ImageScores>,
    pub failures: Vec<Failure>,
    /// Unweighted mean over images with a defined score.
    pub mean: BTreeMap<MetricKind, f64>,
    pub counted: BTreeMap<MetricKind, usize>,
    /// Metric -> reason -> number of images.
    pub skipped: BTreeMap<MetricKind, BTreeMap<String, usize>>,
    pub categories: BTreeMap<String, BTreeMap<MetricKind, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_predict_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curves: Option<Curves>,
}

impl EvalReport {
    pub fn skipped_total(&self) -> usize {
        self.skipped.values().flat_map(|r| r.values()).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for m in &self.metrics {
            out.push(',');
            out.push_str(m.column());
        }
        out.push('\n');
        let cell = |v: Option<&f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
        for img in &self.images {
            out.push_str(&csv_field(&img.id));
            for m in &self.metrics {
                out.push(',');
                out.push_str(&cell(img.scores.get(m)));
            }
            out.push('\n');
        }
        out.push_str("mean");
        for m in &self.metrics {
            out.push(',');
            out.push_str(&cell(self.mean.get(m)));
        }
        out.push('\n');
        out
    }

    pub fn categories_csv(&self) -> Option<String> {
        if self.categories.is_empty() {
            return None;
        }
        let mut out = String::from("category");
        for m in &self.metrics {
            out.push(',');
            out.push_str(m.column());
        }
        out.push('\n');
        for (cat, scores) in &self.categories {
            out.push_str(&csv_field(cat));
            for m in &self.metrics {
                out.push(',');
                if let Some(v) = scores.get(m) {
                    out.push_str(&format!("{v:.6}"));
                }
            }
            out.push('\n');
        }
        Some(out)
    }

    /// Writes `scores.csv`, `report.json`, `categories.csv` when categories
    /// exist, and with curves `pr.csv`, `pr.svg`, `roc.svg`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, text: String| {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
        };
        write("scores.csv", self.to_csv())?;
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        write("report.json", json + "\n")?;
        if let Some(c) = self.categories_csv() {
            write("categories.csv", c)?;
        }
        if let Some(curves) = &self.curves {
            let mut csv = String::from("threshold,precision,recall,fpr\n");
            for p in &curves.pr.points {
                csv.push_str(&format!(
                    "{},{:.6},{:.6},{:.6}\n",
                    p.threshold, p.precision, p.recall, p.fpr
                ));
            }
            write("pr.csv", csv)?;
            let pr: Vec<_> = curves.pr.points.iter().map(|p| (p.recall, p.precision)).collect();
            LineChart::new(&format!("Precision-recall ({})", self.dataset), "recall", "precision")
                .with_series(&format!("F = {:.3}", curves.f_measure), pr)
                .save(dir.join("pr.svg"))?;
            let roc: Vec<_> = curves.pr.points.iter().rev().map(|p| (p.fpr, p.recall)).collect();
            let mut chart = LineChart::new(
                &format!("ROC ({})", self.dataset),
                "false positive rate",
                "true positive rate",
            )
            .with_series("saliency", roc);
            chart.diagonal = true;
            chart.save(dir.join("roc.svg"))?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shared state built in the first pass over the dataset.
struct DatasetContext {
    /// Sum of every image's unit-mass density at `PRIOR_SIZE`.
    prior_total: Option<RasterPlane>,
    /// Fixations of each image in relative coordinates.
    relative_points: Vec<Vec<(f64, f64)>>,
    with_ground_truth: usize,
}

fn small_distribution(gt: &FixationData) -> Result<RasterPlane> {
    let d = resize_bilinear(&gt.distribution()?, PRIOR_SIZE, PRIOR_SIZE)?;
    let total = d.sum();
    Ok(if total > 0.0 { d.map(|v| v / total) } else { d })
}

fn relative(points: &[Fixation], width: usize, height: usize) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|p| ((p.x as f64 + 0.5) / width as f64, (p.y as f64 + 0.5) / height as f64))
        .collect()
}

/// Per image: small prior distribution, relative fixation positions, has fixations.
type ImageContext = (Option<RasterPlane>, Vec<(f64, f64)>, bool);

fn build_context(ds: &Dataset, opts: &EvalOptions) -> Result<DatasetContext> {
    let need_prior = opts.wants(MetricKind::Ig);
    let need_pool = opts.wants(MetricKind::Sauc);
    let per_image: Vec<Result<ImageContext>> = (0..ds.len())
        .into_par_iter()
        .map(|i| {
            let gt = ds.load_ground_truth(i, opts.density_sigma_px)?;
            let Some(fix) = gt.fixations.as_ref() else {
                return Ok((None, Vec::new(), false));
            };
            let small = if need_prior { small_distribution(fix).ok() } else { None };
            let rel = if need_pool {
                relative(&fix.points, gt.width, gt.height)
            } else {
                Vec::new()
            };
            Ok((small, rel, true))
        })
        .collect();

    let mut prior_total: Option<RasterPlane> = None;
    let mut relative_points = Vec::with_capacity(ds.len());
    let mut with_ground_truth = 0;
    for item in per_image {
        // ground-truth errors resurface per image in the second pass
        let (small, rel, has_gt) = item.unwrap_or((None, Vec::new(), false));
        with_ground_truth += usize::from(has_gt);
        if let Some(small) = small {
            prior_total = Some(match prior_total {
                None => small,
                Some(acc) => RasterPlane::from_fn(PRIOR_SIZE, PRIOR_SIZE, |x, y| acc.get(x, y) + small.get(x, y))?,
            });
        }
        relative_points.push(rel);
    }
    Ok(DatasetContext {
        prior_total,
        relative_points,
        with_ground_truth,
    })
}

impl DatasetContext {
    fn centre_prior(&self, fix: &FixationData, width: usize, height: usize) -> Result<RasterPlane> {
        let total = self
            .prior_total
            .as_ref()
            .ok_or_else(|| Error::UndefinedScore("no ground truth for a centre prior".into()))?;
        let own = small_distribution(fix)?;
        let loo = RasterPlane::from_fn(PRIOR_SIZE, PRIOR_SIZE, |x, y| {
            (total.get(x, y) - own.get(x, y)).max(0.0)
        })?;
        if !(loo.sum() > 1e-9) {
            return Err(Error::UndefinedScore(
                "centre prior needs at least two images with fixations".into(),
            ));
        }
        resize_bilinear(&loo, width, height)
    }

    fn shuffle_pool(&self, index: usize, width: usize, height: usize) -> Vec<Fixation> {
        self.relative_points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != index)
            .flat_map(|(_, pts)| pts.iter())
            .map(|&(rx, ry)| {
                Fixation::new(
                    ((rx * width as f64) as usize).min(width - 1),
                    ((ry * height as f64) as usize).min(height - 1),
                )
            })
            .collect()
    }
}

fn load_map(source: MapSource<'_>, ds: &Dataset, index: usize, gt: &GroundTruth) -> Result<(RasterPlane, Option<f64>)> {
    match source {
        MapSource::Directory(dir) => {
            let id = &gt.id;
            let path = ["png", "jpg", "jpeg"]
                .iter()
                .map(|ext| dir.join(format!("{id}.{ext}")))
                .find(|p| p.is_file())
                .ok_or_else(|| Error::Dataset(format!("no saliency map for `{id}` in {}", dir.display())))?;
            let map = load_gray(&path)?;
            Ok((resize_bilinear(&map, gt.width, gt.height)?, None))
        }
        MapSource::Model(predictor) => {
            let image = load_rgb(ds.stimulus_path(index))?;
            let start = Instant::now();
            let map = predictor.predict(&image)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            Ok((map.plane, Some(ms)))
        }
    }
}

fn pr_mask(fix: &FixationData, bbox: Option<[usize; 4]>) -> Vec<bool> {
    match bbox {
        Some([x0, y0, x1, y1]) => (0..fix.height)
            .flat_map(|y| (0..fix.width).map(move |x| x >= x0 && x <= x1 && y >= y0 && y <= y1))
            .collect(),
        None => {
            let peak = fix.density.max();
            fix.density
                .data()
                .iter()
                .map(|&v| peak > 0.0 && v >= 0.5 * peak)
                .collect()
        }
    }
}

struct ImageOutcome {
    scores: ImageScores,
    pr: Option<PrCurve>,
}

fn score_image(
    ds: &Dataset,
    index: usize,
    source: MapSource<'_>,
    ctx: &DatasetContext,
    opts: &EvalOptions,
) -> Result<ImageOutcome> {
    let gt = ds.load_ground_truth(index, opts.density_sigma_px)?;
    let (map, predict_ms) = load_map(source, ds, index, &gt)?;
    let entry = &ds.entries()[index];
    let mut out = ImageScores {
        id: gt.id.clone(),
        category: gt.category.clone(),
        scores: BTreeMap::new(),
        skipped: BTreeMap::new(),
        judd_ties: false,
        predict_ms,
    };
    let Some(fix) = gt.fixations.as_ref() else {
        for &m in &opts.metrics {
            out.skipped.insert(m, "no fixations".into());
        }
        return Ok(ImageOutcome { scores: out, pr: None });
    };

    let normalized = normalize_minmax(&map);
    let sampled = opts.sampled();
    for &m in &opts.metrics {
        let result = match m {
            MetricKind::AucJudd => auc_judd(&map, &fix.points).map(|s| {
                out.judd_ties = s.ties;
                s.value
            }),
            MetricKind::AucBorji => auc_borji(&map, &fix.points, &sampled),
            MetricKind::Sauc => sauc(
                &map,
                &fix.points,
                &ctx.shuffle_pool(index, gt.width, gt.height),
                &sampled,
            ),
            MetricKind::Nss => nss(&map, &fix.points),
            MetricKind::Cc => cc(&normalized, &fix.density),
            MetricKind::Sim => sim(&normalized, &fix.density),
            MetricKind::Kl => kl(&normalized, &fix.density, opts.epsilon),
            MetricKind::Ig => ctx
                .centre_prior(fix, gt.width, gt.height)
                .and_then(|prior| ig(&normalized, &prior, &fix.points, opts.epsilon)),
        };
        match result {
            Ok(v) => {
                out.scores.insert(m, v);
            }
            Err(e) if e.is_skip() => {
                out.skipped.insert(m, e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let pr = if opts.curves {
        pr_curve(&map, &pr_mask(fix, entry.target_bbox)).ok()
    } else {
        None
    };
    Ok(ImageOutcome { scores: out, pr })
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Scores every image of `ds`. Images that fail to load are listed in
/// `failures`; undefined scores are counted in `skipped`.
pub fn evaluate(ds: &Dataset, source: MapSource<'_>, opts: &EvalOptions) -> Result<EvalReport> {
    opts.validate()?;
    if !ds.has_fixations() {
        let names: Vec<_> = opts.metrics.iter().map(|m| m.column()).collect();
        return Err(Error::Dataset(format!(
            "dataset at {} has no fixation files; requested metrics ({}) need ground truth",
            ds.layout.root.display(),
            names.join(", ")
        )));
    }
    let ctx = build_context(ds, opts)?;
    log::info!(
        "evaluating {} images ({} with fixations)",
        ds.len(),
        ctx.with_ground_truth
    );

    let outcomes: Vec<Result<ImageOutcome>> = (0..ds.len())
        .into_par_iter()
        .map(|i| score_image(ds, i, source, &ctx, opts))
        .collect();

    let mut images = Vec::new();
    let mut failures = Vec::new();
    let mut curves = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                curves.extend(o.pr);
                images.push(o.scores);
            }
            Err(e) => {
                log::warn!("{}: {e}", ds.entries()[i].id);
                failures.push(Failure {
                    id: ds.entries()[i].id.clone(),
                    message: e.to_string(),
                });
            }
        }
    }

    let mut mean = BTreeMap::new();
    let mut counted = BTreeMap::new();
    let mut skipped: BTreeMap<MetricKind, BTreeMap<String, usize>> = BTreeMap::new();
    for &m in &opts.metrics {
        let vals: Vec<f64> = images.iter().filter_map(|img| img.scores.get(&m).copied()).collect();
        counted.insert(m, vals.len());
        if let Some(v) = mean_of(vals.into_iter()) {
            mean.insert(m, v);
        }
        for img in &images {
            if let Some(reason) = img.skipped.get(&m) {
                *skipped.entry(m).or_default().entry(reason.clone()).or_default() += 1;
            }
        }
    }

    let mut categories: BTreeMap<String, BTreeMap<MetricKind, f64>> = BTreeMap::new();
    let names: std::collections::BTreeSet<&String> = images.iter().filter_map(|i| i.category.as_ref()).collect();
    for cat in names {
        let members: Vec<&ImageScores> = images.iter().filter(|i| i.category.as_ref() == Some(cat)).collect();
        let row = opts
            .metrics
            .iter()
            .filter_map(|&m| mean_of(members.iter().filter_map(|i| i.scores.get(&m).copied())).map(|v| (m, v)))
            .collect();
        categories.insert(cat.clone(), row);
    }

    let curves = mean_curve(&curves).map(|pr| Curves {
        mask: "target box, or fixation density >= half its peak".into(),
        f_measure: f_measure(&pr, DEFAULT_BETA2),
        beta2: DEFAULT_BETA2,
        pr,
    });

    Ok(EvalReport {
        dataset: ds
            .manifest
            .name
            .clone()
            .unwrap_or_else(|| ds.layout.root.display().to_string()),
        metrics: opts.metrics.clone(),
        ground_truth: opts
            .metrics
            .iter()
            .map(|&m| {
                let kind = if m.is_location_based() {
                    "fixation points"
                } else {
                    "fixation density"
                };
                (m, kind.to_string())
            })
            .collect(),
        options: opts.clone(),
        mean_predict_ms: mean_of(images.iter().filter_map(|i| i.predict_ms)),
        images,
        failures,
        mean,
        counted,
        skipped,
        categories,
        curves,
    })
}

/// One results-table row: the eight scores in table order plus timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub model: String,
    pub dataset: String,
    pub images: usize,
    pub scores: Vec<(MetricKind, Option<f64>)>,
    pub ms_per_image: f64,
}

pub const BENCHMARK_COLUMNS: [MetricKind; 8] = [
    MetricKind::AucJudd,
    MetricKind::AucBorji,
    MetricKind::Sauc,
    MetricKind::Cc,
    MetricKind::Nss,
    MetricKind::Kl,
    MetricKind::Sim,
    MetricKind::Ig,
];

fn table_name(m: MetricKind) -> &'static str {
    match m {
        MetricKind::AucJudd => "AUC_Judd",
        MetricKind::AucBorji => "AUC_Borji",
        MetricKind::Sauc => "sAUC",
        MetricKind::Cc => "CC",
        MetricKind::Nss => "NSS",
        MetricKind::Kl => "KL",
        MetricKind::Sim => "SIM",
        MetricKind::Ig => "IG",
    }
}

impl BenchmarkRow {
    pub fn from_report(model: &str, report: &EvalReport, ms_per_image: f64) -> Self {
        Self {
            model: model.into(),
            dataset: report.dataset.clone(),
            images: report.images.len(),
            scores: BENCHMARK_COLUMNS
                .iter()
                .map(|&m| (m, report.mean.get(&m).copied()))
                .collect(),
            ms_per_image,
        }
    }

    pub fn get(&self, m: MetricKind) -> Option<f64> {
        self.scores.iter().find(|(k, _)| *k == m).and_then(|(_, v)| *v)
    }

    pub fn header() -> String {
        let cols: Vec<_> = BENCHMARK_COLUMNS.iter().map(|&m| table_name(m)).collect();
        format!("model,dataset,images,{},ms_per_image", cols.join(","))
    }

    pub fn to_csv_line(&self) -> String {
        let vals: Vec<String> = self
            .scores
            .iter()
            .map(|(_, v)| v.map(|v| format!("{v:.4}")).unwrap_or_default())
            .collect();
        format!(
            "{},{},{},{},{:.2}",
            csv_field(&self.model),
            csv_field(&self.dataset),
            self.images,
            vals.join(","),
            self.ms_per_image
        )
    }

    pub fn to_markdown(&self) -> String {
        let cols: Vec<_> = BENCHMARK_COLUMNS.iter().map(|&m| table_name(m)).collect();
        let vals: Vec<String> = self
            .scores
            .iter()
            .map(|(_, v)| v.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()))
            .collect();
        format!(
            "| Model | {} | ms/image |\n|---|{}---|\n| {} | {} | {:.1} |\n",
            cols.join(" | "),
            "---|".repeat(cols.len()),
            self.model,
            vals.join(" | "),
            self.ms_per_image
        )
    }
}

/// Predicts every stimulus with `predictor`, evaluates all metrics and
/// returns the report with its table row.
pub fn benchmark(ds: &Dataset, predictor: &Predictor, opts: &EvalOptions) -> Result<(EvalReport, BenchmarkRow)> {
    let opts = EvalOptions {
        metrics: BENCHMARK_COLUMNS.to_vec(),
        ..opts.clone()
    };
    let report = evaluate(ds, MapSource::Model(predictor), &opts)?;
    let ms = report.mean_predict_ms.unwrap_or(0.0);
    let row = BenchmarkRow::from_report("WECSF", &report, ms);
    Ok((report, row))
}

/// Paths written by [`EvalReport::save`].
pub fn report_files(dir: &Path) -> [PathBuf; 2] {
    [dir.join("scores.csv"), dir.join("report.json")]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{sample_set, write_dataset};

    fn dataset(n: usize) -> (tempfile::TempDir, Dataset) {
        let dir = tempfile::tempdir().unwrap();
        let samples = sample_set(n, 96, 80, 5).unwrap();
        write_dataset(dir.path(), "tiny", &samples, true).unwrap();
        let ds = Dataset::open(dir.path()).unwrap();
        (dir, ds)
    }

    #[test]
    fn constant_maps_are_skipped_not_fatal() {
        let (dir, ds) = dataset(3);
        let maps = dir.path().join("maps");
        std::fs::create_dir_all(&maps).unwrap();
        for e in ds.entries() {
            crate::io::save_gray_png(
                &RasterPlane::filled(96, 80, 0.5).unwrap(),
                maps.join(format!("{}.png", e.id)),
            )
            .unwrap();
        }
        let opts = EvalOptions {
            density_sigma_px: 4.0,
            ..Default::default()
        };
        let r = evaluate(&ds, MapSource::Directory(&maps), &opts).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.mean[&MetricKind::AucJudd], 0.5);
        assert!(r.images.iter().all(|i| i.judd_ties));
        assert_eq!(r.counted[&MetricKind::Nss], 0);
        assert_eq!(r.counted[&MetricKind::Cc], 0);
        assert_eq!(r.skipped[&MetricKind::Nss].values().sum::<usize>(), 3);
        assert!(!r.mean.contains_key(&MetricKind::Nss));
    }

    #[test]
    fn csv_has_mean_row_and_selected_columns() {
        let (_dir, ds) = dataset(2);
        let predictor = Predictor::new(Default::default()).unwrap();
        let opts = EvalOptions {
            metrics: vec![MetricKind::Nss, MetricKind::Cc],
            density_sigma_px: 4.0,
            curves: true,
            ..Default::default()
        };
        let r = evaluate(&ds, MapSource::Model(&predictor), &opts).unwrap();
        let csv = r.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "id,nss,cc");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("mean,"));
        assert!(r.curves.is_some());
        assert!(r.mean_predict_ms.unwrap() > 0.0);
        assert_eq!(r.ground_truth[&MetricKind::Nss], "fixation points");
        assert_eq!(r.ground_truth[&MetricKind::Cc], "fixation density");
    }

    #[test]
    fn stimuli_only_dataset_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), "bare", &sample_set(2, 96, 80, 1).unwrap(), false).unwrap();
        let ds = Dataset::open(dir.path()).unwrap();
        let predictor = Predictor::new(Default::default()).unwrap();
        let err = evaluate(&ds, MapSource::Model(&predictor), &EvalOptions::default()).unwrap_err();
        assert!(err.to_string().contains("no fixation files"));
    }

    #[test]
    fn shuffle_pool_excludes_own_image() {
        let ctx = DatasetContext {
            prior_total: None,
            relative_points: vec![vec![(0.1, 0.1)], vec![(0.5, 0.99), (0.999, 0.0)]],
            with_ground_truth: 2,
        };
        assert_eq!(
            ctx.shuffle_pool(0, 10, 10),
            vec![Fixation::new(5, 9), Fixation::new(9, 0)]
        );
        assert_eq!(ctx.shuffle_pool(1, 20, 10), vec![Fixation::new(2, 1)]);
    }

    #[test]
    fn benchmark_row_format() {
        let (_dir, ds) = dataset(2);
        let predictor = Predictor::new(Default::default()).unwrap();
        let (_, row) = benchmark(
            &ds,
            &predictor,
            &EvalOptions {
                density_sigma_px: 4.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(
            BenchmarkRow::header(),
            "model,dataset,images,AUC_Judd,AUC_Borji,sAUC,CC,NSS,KL,SIM,IG,ms_per_image"
        );
        assert_eq!(row.to_csv_line().split(',').count(), 12);
        assert!(row.ms_per_image > 0.0);
        assert!(row.to_markdown().contains("| WECSF |"));
    }
}
