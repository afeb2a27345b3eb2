//! Wavelet/CSF bottom-up saliency prediction and saliency evaluation metrics.
//!
//! ```no_run
//! use wecsf::{io, PipelineParams, Predictor};
//!
//! let image = io::load_rgb("scene.png")?;
//! let predictor = Predictor::new(PipelineParams::default())?;
//! let map = predictor.predict(&image)?;
//! io::save_saliency_png(&map, "scene_saliency.png")?;
//! # Ok::<(), wecsf::Error>(())
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptation;
pub mod cli;
pub mod config;
pub mod csf;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod fft;
pub mod io;
pub mod metrics;
pub mod opponent;
pub mod pipeline;
pub mod plot;
pub mod raster;
pub mod synthetic;
pub mod wavelet;

pub use adaptation::{von_kries_adapt, AdaptationParams};
pub use config::RunConfig;
pub use csf::{apply_csf, build_acsf, build_chromatic_csf, build_csf, CsfCache, CsfGrid, CsfKind, CsfParams};
pub use datasets::{Dataset, DatasetSample};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalOptions, EvalReport, MapSource};
pub use metrics::{Fixation, FixationData, MetricKind};
pub use opponent::{rgb_to_opponent, OpponentImage};
pub use pipeline::{predict_saliency, predict_video, Levels, PipelineParams, Predictor};
pub use raster::{RasterPlane, RgbImage, SaliencyMap};
pub use wavelet::{dwt_multilevel, wavelet_energy_map, WaveletPyramid};
