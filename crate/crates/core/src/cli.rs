//! The `wecsf` command line.
//!
//! Exit codes: 0 success, 1 partial or data failure, 2 usage error.

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::adaptation::AdaptationParams;
use crate::config::RunConfig;
use crate::csf::{build_csf, CsfKind};
use crate::datasets::{load_video, Dataset};
use crate::error::{Error, Result};
use crate::eval::{benchmark, evaluate, BenchmarkRow, MapSource};
use crate::io::{load_rgb, save_heatmap_png, save_plane, save_saliency_png};
use crate::metrics::MetricKind;
use crate::pipeline::Predictor;
use crate::synthetic::{sample_set, write_dataset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wecsf",
    version,
    about = "Wavelet-energy / CSF saliency prediction and evaluation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Seed for AUC-Borji and sAUC sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Pixels per degree of visual angle.
    #[arg(long, global = true)]
    pub ppd: Option<f64>,
    /// von Kries gain, applied to all three cone channels.
    #[arg(long, global = true)]
    pub gain: Option<f64>,
    /// Final blur sigma as a fraction of the working width.
    #[arg(long, global = true)]
    pub smoothing: Option<f64>,
    /// Leave the approximation band out of the energy map.
    #[arg(long, global = true)]
    pub no_approx_band: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict saliency maps for image files or directories of images.
    Predict(PredictArgs),
    /// Score saliency maps against a dataset's fixations.
    Evaluate(EvaluateArgs),
    /// Predict and evaluate a dataset end to end and print a table row.
    Benchmark(BenchmarkArgs),
    /// CSF grid utilities.
    Csf {
        #[command(subcommand)]
        command: CsfCommand,
    },
    /// Predict every frame of a directory of numbered frames.
    Video(VideoArgs),
    /// Write a synthetic pop-out dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// PNG/JPEG files or directories containing them.
    pub inputs: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write `WECSF1` float dumps.
    #[arg(long)]
    pub float_dump: bool,
    /// Write opponent planes, pyramids, energy maps and filtered channels.
    #[arg(long)]
    pub save_intermediates: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Directory of precomputed maps named `<id>.png`; without it the
    /// model predicts each stimulus.
    #[arg(long)]
    pub maps: Option<PathBuf>,
    /// Comma-separated metric columns, or `all`.
    #[arg(long)]
    pub metrics: Option<String>,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write PR/ROC curves as CSV and SVG.
    #[arg(long)]
    pub curves: bool,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CsfCommand {
    /// Write a CSF gain grid as a `WECSF1` dump and a heat-map PNG.
    Export(CsfExportArgs),
}

#[derive(Debug, Args)]
pub struct CsfExportArgs {
    /// achromatic, red-green or yellow-blue.
    #[arg(long, default_value = "achromatic")]
    pub kind: String,
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VideoArgs {
    /// Directory of frames; numeric parts of names are ordered numerically.
    pub dir: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Temporal smoothing in [0, 1]; 0 predicts frames independently.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 320)]
    pub width: usize,
    #[arg(long, default_value_t = 240)]
    pub height: usize,
    /// Write stimuli and manifest only.
    #[arg(long)]
    pub no_fixations: bool,
}

/// A failed command, tagged with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Resolves the configuration: built-in default, then `--config`, then flags.
pub fn resolve_config(global: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    if let Some(ppd) = global.ppd {
        cfg.pipeline.ppd = ppd;
    }
    if let Some(g) = global.gain {
        cfg.pipeline.gain = AdaptationParams::uniform(g);
    }
    if let Some(s) = global.smoothing {
        cfg.pipeline.smoothing_sigma = s;
    }
    if global.no_approx_band {
        cfg.pipeline.include_approximation = false;
    }
    Ok(cfg)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli) -> CmdResult {
    let mut cfg = resolve_config(&cli.global)?;
    if let Command::Video(v) = &cli.command {
        if let Some(a) = v.alpha {
            cfg.pipeline.temporal_alpha = a;
        }
    }
    if let Command::Evaluate(e) = &cli.command {
        if let Some(list) = &e.metrics {
            cfg.evaluation.metrics = MetricKind::parse_list(list)?;
        }
    }
    cfg.validate()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.jobs {
        if n == 0 {
            return Err(Failure::usage("--jobs must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::data(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Predict(a) => cmd_predict(&a, &cfg),
        Command::Evaluate(a) => cmd_evaluate(&a, &cfg),
        Command::Benchmark(a) => cmd_benchmark(&a, &cfg),
        Command::Csf {
            command: CsfCommand::Export(a),
        } => cmd_csf_export(&a, &cfg),
        Command::Video(a) => cmd_video(&a, &cfg),
        Command::Synth(a) => cmd_synth(&a, &cfg),
    })
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .is_some_and(|e| matches!(e.as_str(), "png" | "jpg" | "jpeg"))
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(|e| Error::io(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_image(p))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

/// Output stems, made unique by suffixing `_2`, `_3`, ... on collision.
fn unique_stems(paths: &[PathBuf]) -> Vec<String> {
    let mut seen = HashSet::new();
    paths
        .iter()
        .map(|p| {
            let base = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "map".into());
            let mut stem = base.clone();
            let mut k = 2;
            while !seen.insert(stem.clone()) {
                stem = format!("{base}_{k}");
                k += 1;
            }
            stem
        })
        .collect()
}

fn create_dir(dir: &Path) -> std::result::Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::from(Error::io(dir, e)))
}

fn cmd_predict(args: &PredictArgs, cfg: &RunConfig) -> CmdResult {
    if args.inputs.is_empty() {
        return Err(Failure::usage("predict needs at least one input"));
    }
    let inputs = expand_inputs(&args.inputs)?;
    if inputs.is_empty() {
        return Err(Failure::usage("no PNG or JPEG files among the inputs"));
    }
    create_dir(&args.out)?;
    cfg.echo(&args.out)?;
    let predictor = Predictor::new(cfg.pipeline.clone())?;
    let stems = unique_stems(&inputs);

    let results: Vec<Result<()>> = inputs
        .par_iter()
        .zip(&stems)
        .map(|(path, stem)| {
            let image = load_rgb(path)?;
            let map = if args.save_intermediates {
                let (map, inter) = predictor.predict_with_intermediates(&image)?;
                inter.save(args.out.join(format!("{stem}_intermediates")))?;
                map
            } else {
                predictor.predict(&image)?
            };
            save_saliency_png(&map, args.out.join(format!("{stem}.png")))?;
            if args.float_dump {
                save_plane(&map.plane, args.out.join(format!("{stem}.wecsf")))?;
            }
            Ok(())
        })
        .collect();

    let failures: Vec<(&PathBuf, Error)> = inputs
        .iter()
        .zip(results)
        .filter_map(|(p, r)| r.err().map(|e| (p, e)))
        .collect();
    eprintln!(
        "predicted {}/{} maps into {}",
        inputs.len() - failures.len(),
        inputs.len(),
        args.out.display()
    );
    if failures.is_empty() {
        return Ok(EXIT_OK);
    }
    eprintln!("failed:");
    for (path, e) in &failures {
        eprintln!("  {}: {e}", path.display());
    }
    Ok(EXIT_FAILURE)
}

fn print_report_summary(report: &crate::eval::EvalReport) {
    for m in &report.metrics {
        let mean = report
            .mean
            .get(m)
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "-".into());
        let skipped: usize = report.skipped.get(m).map(|r| r.values().sum()).unwrap_or(0);
        println!(
            "{:<10} {:>8}  n={:<5} skipped={:<4} ({})",
            m.column(),
            mean,
            report.counted[m],
            skipped,
            report.ground_truth[m]
        );
    }
    for f in &report.failures {
        eprintln!("failed {}: {}", f.id, f.message);
    }
}

fn cmd_evaluate(args: &EvaluateArgs, cfg: &RunConfig) -> CmdResult {
    let ds = Dataset::open(&args.dataset)?;
    let opts = cfg.eval_options(args.curves);
    let predictor;
    let source = match &args.maps {
        Some(dir) => {
            if !dir.is_dir() {
                return Err(Failure::usage(format!(
                    "maps directory {} does not exist",
                    dir.display()
                )));
            }
            MapSource::Directory(dir)
        }
        None => {
            predictor = Predictor::new(cfg.pipeline.clone())?;
            MapSource::Model(&predictor)
        }
    };
    let report = evaluate(&ds, source, &opts)?;
    cfg.echo(&args.out)?;
    report.save(&args.out)?;
    print_report_summary(&report);
    Ok(if report.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_benchmark(args: &BenchmarkArgs, cfg: &RunConfig) -> CmdResult {
    let ds = Dataset::open(&args.dataset)?;
    let predictor = Predictor::new(cfg.pipeline.clone())?;
    let (report, row) = benchmark(&ds, &predictor, &cfg.eval_options(false))?;
    cfg.echo(&args.out)?;
    report.save(&args.out)?;
    let csv = format!("{}\n{}\n", BenchmarkRow::header(), row.to_csv_line());
    let path = args.out.join("benchmark.csv");
    std::fs::write(&path, csv).map_err(|e| Failure::from(Error::io(&path, e)))?;
    let md = row.to_markdown();
    let path = args.out.join("benchmark.md");
    std::fs::write(&path, &md).map_err(|e| Failure::from(Error::io(&path, e)))?;
    print!("{md}");
    for f in &report.failures {
        eprintln!("failed {}: {}", f.id, f.message);
    }
    Ok(if report.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_csf_export(args: &CsfExportArgs, cfg: &RunConfig) -> CmdResult {
    let kind: CsfKind = args.kind.to_ascii_lowercase().parse()?;
    let grid = build_csf(
        kind,
        args.width,
        args.height,
        cfg.pipeline.ppd,
        cfg.pipeline.csf_params(kind),
    )?;
    create_dir(&args.out)?;
    cfg.echo(&args.out)?;
    let stem = format!("csf_{}_{}x{}", kind.name(), args.width, args.height);
    save_plane(&grid.gains, args.out.join(format!("{stem}.wecsf")))?;
    save_heatmap_png(&grid.gains, args.out.join(format!("{stem}.png")))?;
    println!("{}: peak {:.4}, centre {:.4}", stem, grid.gains.max(), grid.at(0, 0));
    Ok(EXIT_OK)
}

fn cmd_video(args: &VideoArgs, cfg: &RunConfig) -> CmdResult {
    let frames = load_video(&args.dir)?;
    create_dir(&args.out)?;
    cfg.echo(&args.out)?;
    let predictor = Predictor::new(cfg.pipeline.clone())?;
    let (paths, images): (Vec<PathBuf>, Vec<_>) = frames.into_iter().unzip();
    let start = Instant::now();
    let maps = predictor.predict_video(&images)?;
    let secs = start.elapsed().as_secs_f64();
    for (stem, map) in unique_stems(&paths).iter().zip(&maps) {
        save_saliency_png(map, args.out.join(format!("{stem}.png")))?;
    }
    eprintln!(
        "{} frames in {:.2} s ({:.2} frames/s), alpha = {}",
        maps.len(),
        secs,
        maps.len() as f64 / secs.max(1e-9),
        cfg.pipeline.temporal_alpha
    );
    Ok(EXIT_OK)
}

fn cmd_synth(args: &SynthArgs, cfg: &RunConfig) -> CmdResult {
    if args.count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    let samples = sample_set(args.count, args.width, args.height, cfg.seed)?;
    write_dataset(&args.out, "synthetic-popout", &samples, !args.no_fixations)?;
    eprintln!("wrote {} stimuli to {}", samples.len(), args.out.display());
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_overrides_config_overrides_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "seed = 5\n[pipeline]\nppd = 20.0\nsmoothing_sigma = 0.05\n").unwrap();
        let cli = Cli::try_parse_from([
            "wecsf",
            "--config",
            path.to_str().unwrap(),
            "--ppd",
            "40",
            "csf",
            "export",
            "--out",
            "x",
        ])
        .unwrap();
        let cfg = resolve_config(&cli.global).unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.pipeline.ppd, 40.0);
        assert_eq!(cfg.pipeline.smoothing_sigma, 0.05);
        assert_eq!(cfg.pipeline.working_width, 256);
    }

    #[test]
    fn unique_stems_suffix() {
        let p = [
            PathBuf::from("a/x.png"),
            PathBuf::from("b/x.jpg"),
            PathBuf::from("y.png"),
        ];
        assert_eq!(unique_stems(&p), ["x", "x_2", "y"]);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["wecsf"]), EXIT_USAGE);
        assert_eq!(run(["wecsf", "predict", "--out", "/nonexistent/out"]), EXIT_USAGE);
        assert_eq!(
            run(["wecsf", "--gain", "2", "csf", "export", "--out", "/tmp/x"]),
            EXIT_USAGE
        );
        assert_eq!(run(["wecsf", "--help"]), EXIT_OK);
    }
}
