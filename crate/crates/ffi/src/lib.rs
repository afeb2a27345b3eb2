//! C interface to the `wecsf` saliency model and metrics.
//!
//! Every fallible function returns a [`WecsfStatus`]; on failure the
//! message is available from [`wecsf_last_error`] on the same thread.
//! Handles returned through out-pointers are owned by the caller and must
//! be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use wecsf::adaptation::AdaptationParams;
use wecsf::io::{load_rgb, save_plane, save_saliency_png};
use wecsf::metrics::{auc_judd, cc, kl, nss, sim, Fixation, DEFAULT_EPSILON};
use wecsf::{Error, PipelineParams, Predictor, RasterPlane, RgbImage, RunConfig, SaliencyMap};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WecsfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// The metric is undefined for this input, e.g. a constant map.
    UndefinedScore = 4,
    Io = 5,
    Decode = 6,
    Data = 7,
    Panic = 8,
}

/// Pipeline parameters. Opaque.
pub struct WecsfParams {
    inner: PipelineParams,
}

/// A saliency map or any other float plane. Opaque.
pub struct WecsfMap {
    inner: SaliencyMap,
}

/// Zero-based pixel coordinates.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WecsfFixation {
    pub x: usize,
    pub y: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fault {
    status: WecsfStatus,
    message: String,
}

impl Fault {
    fn new(status: WecsfStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn null(name: &str) -> Self {
        Self::new(WecsfStatus::NullPointer, format!("`{name}` is null"))
    }
}

impl From<Error> for Fault {
    fn from(e: Error) -> Self {
        use WecsfStatus as S;
        let status = match &e {
            Error::InvalidDimensions { .. }
            | Error::DataLength { .. }
            | Error::NonFinite(_)
            | Error::InvalidParameter(_)
            | Error::Config(_) => S::InvalidArgument,
            Error::DimensionMismatch(_) => S::DimensionMismatch,
            Error::UndefinedScore(_) => S::UndefinedScore,
            Error::Io { .. } => S::Io,
            Error::Decode { .. } | Error::UnsupportedFormat { .. } => S::Decode,
            Error::Csv { .. } | Error::FixationOutOfBounds { .. } | Error::Dataset(_) => S::Data,
        };
        Self::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("nul bytes removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fault>) -> WecsfStatus {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        Err(Fault::new(WecsfStatus::Panic, format!("internal panic: {msg}")))
    });
    match result {
        Ok(()) => {
            set_last_error(None);
            WecsfStatus::Ok
        }
        Err(f) => {
            set_last_error(Some(f.message));
            f.status
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fault> {
    p.as_ref().ok_or_else(|| Fault::null(name))
}

unsafe fn as_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fault> {
    p.as_mut().ok_or_else(|| Fault::null(name))
}

unsafe fn path_arg(p: *const c_char, name: &str) -> Result<PathBuf, Fault> {
    if p.is_null() {
        return Err(Fault::null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| Fault::new(WecsfStatus::InvalidArgument, format!("`{name}` is not UTF-8")))
}

unsafe fn fixations(p: *const WecsfFixation, n: usize) -> Result<Vec<Fixation>, Fault> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(Fault::null("fixations"));
    }
    Ok(std::slice::from_raw_parts(p, n)
        .iter()
        .map(|f| Fixation::new(f.x, f.y))
        .collect())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fault> {
    let slot = as_mut(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wecsf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn wecsf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

// ---- parameters -------------------------------------------------------------

/// Default parameters. Never NULL.
#[no_mangle]
pub extern "C" fn wecsf_params_new() -> *mut WecsfParams {
    Box::into_raw(Box::new(WecsfParams {
        inner: PipelineParams::default(),
    }))
}

/// Reads the `[pipeline]` section of a TOML run configuration.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wecsf_params_load_toml(path: *const c_char, out: *mut *mut WecsfParams) -> WecsfStatus {
    guard(|| {
        let cfg = RunConfig::load(path_arg(path, "path")?)?;
        cfg.pipeline.validate()?;
        put(out, WecsfParams { inner: cfg.pipeline })
    })
}

/// # Safety
/// `params` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn wecsf_params_free(params: *mut WecsfParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

unsafe fn update(params: *mut WecsfParams, f: impl FnOnce(&mut PipelineParams)) -> WecsfStatus {
    guard(|| {
        let p = as_mut(params, "params")?;
        let mut next = p.inner.clone();
        f(&mut next);
        next.validate()?;
        p.inner = next;
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wecsf_params_set_ppd(params: *mut WecsfParams, ppd: f64) -> WecsfStatus {
    update(params, |p| p.ppd = ppd)
}

/// Same von Kries gain for all three cone channels.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wecsf_params_set_gain(params: *mut WecsfParams, gain: f64) -> WecsfStatus {
    update(params, |p| p.gain = AdaptationParams::uniform(gain))
}

/// Final blur sigma as a fraction of the working width; 0 disables it.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wecsf_params_set_smoothing(params: *mut WecsfParams, sigma: f64) -> WecsfStatus {
    update(params, |p| p.smoothing_sigma = sigma)
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wecsf_params_set_fusion_weights(
    params: *mut WecsfParams,
    wb: f64,
    rg: f64,
    yb: f64,
) -> WecsfStatus {
    update(params, |p| p.fusion_weights = [wb, rg, yb])
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wecsf_params_set_include_approximation(
    params: *mut WecsfParams,
    include: bool,
) -> WecsfStatus {
    update(params, |p| p.include_approximation = include)
}

// ---- prediction -------------------------------------------------------------

fn predict(params: &WecsfParams, image: &RgbImage) -> Result<WecsfMap, Fault> {
    let predictor = Predictor::new(params.inner.clone())?;
    Ok(WecsfMap {
        inner: predictor.predict(image)?,
    })
}

/// Predicts a map from interleaved 8-bit RGB. `stride` is the byte
/// distance between rows, at least `3 * width`.
///
/// # Safety
/// `data` must hold `stride * height` readable bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_predict_rgb8(
    params: *const WecsfParams,
    data: *const u8,
    width: usize,
    height: usize,
    stride: usize,
    out: *mut *mut WecsfMap,
) -> WecsfStatus {
    guard(|| {
        let params = as_ref(params, "params")?;
        if data.is_null() {
            return Err(Fault::null("data"));
        }
        let row = width
            .checked_mul(3)
            .ok_or_else(|| Fault::new(WecsfStatus::InvalidArgument, "width overflows"))?;
        if stride < row {
            return Err(Fault::new(
                WecsfStatus::InvalidArgument,
                format!("stride {stride} is smaller than 3 * width = {row}"),
            ));
        }
        let mut packed = Vec::with_capacity(row * height);
        for y in 0..height {
            packed.extend_from_slice(std::slice::from_raw_parts(data.add(y * stride), row));
        }
        let image = RgbImage::from_rgb8(width, height, &packed)?;
        put(out, predict(params, &image)?)
    })
}

/// Predicts a map for a PNG or JPEG file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_predict_file(
    params: *const WecsfParams,
    path: *const c_char,
    out: *mut *mut WecsfMap,
) -> WecsfStatus {
    guard(|| {
        let params = as_ref(params, "params")?;
        let image = load_rgb(path_arg(path, "path")?)?;
        put(out, predict(params, &image)?)
    })
}

// ---- maps -------------------------------------------------------------------

/// Copies `width * height` row-major samples into a new map.
///
/// # Safety
/// `data` must hold `width * height` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_map_from_data(
    data: *const f64,
    width: usize,
    height: usize,
    out: *mut *mut WecsfMap,
) -> WecsfStatus {
    guard(|| {
        if data.is_null() {
            return Err(Fault::null("data"));
        }
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Fault::new(WecsfStatus::InvalidArgument, "size overflows"))?;
        let plane = RasterPlane::new(width, height, std::slice::from_raw_parts(data, n).to_vec())?;
        put(
            out,
            WecsfMap {
                inner: SaliencyMap::new(plane),
            },
        )
    })
}

/// # Safety
/// `map` must be a live handle or NULL (returns 0).
#[no_mangle]
pub unsafe extern "C" fn wecsf_map_width(map: *const WecsfMap) -> usize {
    map.as_ref().map_or(0, |m| m.inner.plane.width())
}

/// # Safety
/// `map` must be a live handle or NULL (returns 0).
#[no_mangle]
pub unsafe extern "C" fn wecsf_map_height(map: *const WecsfMap) -> usize {
    map.as_ref().map_or(0, |m| m.inner.plane.height())
}

/// Row-major samples, `width * height` doubles, owned by the map.
///
/// # Safety
/// `map` must be a live handle or NULL (returns NULL).
#[no_mangle]
pub unsafe extern "C" fn wecsf_map_data(map: *const WecsfMap) -> *const f64 {
    map.as_ref().map_or(std::ptr::null(), |m| m.inner.plane.data().as_ptr())
}

/// 8-bit grayscale PNG.
///
/// # Safety
/// `map` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wecsf_map_save_png(map: *const WecsfMap, path: *const c_char) -> WecsfStatus {
    guard(|| {
        let map = as_ref(map, "map")?;
        save_saliency_png(&map.inner, path_arg(path, "path")?)?;
        Ok(())
    })
}

/// Lossless `WECSF1` float dump.
///
/// # Safety
/// `map` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wecsf_map_save_dump(map: *const WecsfMap, path: *const c_char) -> WecsfStatus {
    guard(|| {
        let map = as_ref(map, "map")?;
        save_plane(&map.inner.plane, path_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `map` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn wecsf_map_free(map: *mut WecsfMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

// ---- metrics ----------------------------------------------------------------

unsafe fn score(out: *mut f64, f: impl FnOnce() -> Result<f64, Fault>) -> WecsfStatus {
    guard(|| {
        let slot = as_mut(out, "out")?;
        *slot = f()?;
        Ok(())
    })
}

/// # Safety
/// `fixations` must hold `count` entries; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_metric_nss(
    map: *const WecsfMap,
    fixations: *const WecsfFixation,
    count: usize,
    out: *mut f64,
) -> WecsfStatus {
    score(out, || {
        let map = as_ref(map, "map")?;
        Ok(nss(&map.inner.plane, &self::fixations(fixations, count)?)?)
    })
}

/// # Safety
/// `fixations` must hold `count` entries; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_metric_auc_judd(
    map: *const WecsfMap,
    fixations: *const WecsfFixation,
    count: usize,
    out: *mut f64,
) -> WecsfStatus {
    score(out, || {
        let map = as_ref(map, "map")?;
        Ok(auc_judd(&map.inner.plane, &self::fixations(fixations, count)?)?.value)
    })
}

/// # Safety
/// Both maps must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_metric_cc(map: *const WecsfMap, density: *const WecsfMap, out: *mut f64) -> WecsfStatus {
    score(out, || {
        Ok(cc(
            &as_ref(map, "map")?.inner.plane,
            &as_ref(density, "density")?.inner.plane,
        )?)
    })
}

/// # Safety
/// Both maps must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_metric_sim(
    map: *const WecsfMap,
    density: *const WecsfMap,
    out: *mut f64,
) -> WecsfStatus {
    score(out, || {
        Ok(sim(
            &as_ref(map, "map")?.inner.plane,
            &as_ref(density, "density")?.inner.plane,
        )?)
    })
}

/// KL divergence of the map from the density, regularized by machine epsilon.
///
/// # Safety
/// Both maps must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wecsf_metric_kl(map: *const WecsfMap, density: *const WecsfMap, out: *mut f64) -> WecsfStatus {
    score(out, || {
        Ok(kl(
            &as_ref(map, "map")?.inner.plane,
            &as_ref(density, "density")?.inner.plane,
            DEFAULT_EPSILON,
        )?)
    })
}
