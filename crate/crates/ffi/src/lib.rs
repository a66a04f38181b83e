//! C ABI over `cod`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `_free` function. Every fallible call returns a
//! [`CodStatus`]; on failure [`cod_last_error_message`] describes the
//! error for the calling thread.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cod::classifier::{detect, score_outlierness, train_default_model};
use cod::dataset::load_dataset;
use cod::pipeline::single_view_features;
use cod::{CodError, LabelColumn, LabeledDataset, OutlierModel, PipelineParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    SizeMismatch = 5,
    Runtime = 6,
    Panic = 7,
}

/// Detector parameters; start from [`cod_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CodParams {
    pub k: usize,
    pub q: usize,
    pub percentile: f64,
    pub entropy_tol: f64,
    pub normalize: bool,
}

impl From<&CodParams> for PipelineParams {
    fn from(p: &CodParams) -> Self {
        PipelineParams {
            k: p.k,
            q: p.q,
            percentile: p.percentile,
            entropy_tol: p.entropy_tol,
            normalize: p.normalize,
        }
    }
}

pub struct CodDataset {
    inner: LabeledDataset,
}

pub struct CodModel {
    inner: OutlierModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &CodError) -> CodStatus {
    match err {
        CodError::Io { .. } => CodStatus::Io,
        CodError::Csv(_) | CodError::Json(_) | CodError::BadCell { .. } | CodError::MissingLabelColumn(_) => {
            CodStatus::Parse
        }
        CodError::SizeMismatch(_) => CodStatus::SizeMismatch,
        CodError::InvalidParameter(_) | CodError::UnknownConfig(_) | CodError::InvalidDataset(_) => {
            CodStatus::InvalidArgument
        }
        _ => CodStatus::Runtime,
    }
}

enum Failure {
    Null(&'static str),
    Arg(String),
    Cod(CodError),
}

impl From<CodError> for Failure {
    fn from(e: CodError) -> Self {
        Failure::Cod(e)
    }
}

/// Runs `f`, recording any error or panic for `cod_last_error_message`.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> CodStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CodStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            CodStatus::NullPointer
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_error(&msg);
            CodStatus::InvalidArgument
        }
        Ok(Err(Failure::Cod(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            CodStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg("path is not valid UTF-8".into()))
}

unsafe fn params_arg(p: *const CodParams) -> PipelineParams {
    if p.is_null() {
        PipelineParams::default()
    } else {
        (&*p).into()
    }
}

#[no_mangle]
pub extern "C" fn cod_params_default() -> CodParams {
    let p = PipelineParams::default();
    CodParams {
        k: p.k,
        q: p.q,
        percentile: p.percentile,
        entropy_tol: p.entropy_tol,
        normalize: p.normalize,
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `cod_*` call on the same thread.
#[no_mangle]
pub extern "C" fn cod_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a CSV file with a header row, label in the last column.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cod_dataset_from_csv(path: *const c_char, out: *mut *mut CodDataset) -> CodStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let ds = load_dataset(path_arg(path)?, &LabelColumn::Last)?;
        *out = Box::into_raw(Box::new(CodDataset { inner: ds }));
        Ok(())
    })
}

/// Builds a dataset from `n_samples * n_features` row-major values and one
/// label per sample. Labels may be any integers; classes are numbered by
/// first appearance.
///
/// # Safety
/// `features` must point to `n_samples * n_features` doubles, `labels` to
/// `n_samples` integers, and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cod_dataset_from_arrays(
    features: *const f64,
    n_samples: usize,
    n_features: usize,
    labels: *const i64,
    out: *mut *mut CodDataset,
) -> CodStatus {
    guard(|| {
        if features.is_null() || labels.is_null() || out.is_null() {
            return Err(Failure::Null("features, labels or out"));
        }
        if n_samples == 0 || n_features == 0 {
            return Err(Failure::Arg("empty dataset".into()));
        }
        let len = n_samples
            .checked_mul(n_features)
            .ok_or_else(|| Failure::Arg("dataset size overflows".into()))?;
        let values = std::slice::from_raw_parts(features, len).to_vec();
        let mut ids = HashMap::new();
        let mapped: Vec<u32> = std::slice::from_raw_parts(labels, n_samples)
            .iter()
            .map(|l| {
                let next = ids.len() as u32 + 1;
                *ids.entry(*l).or_insert(next)
            })
            .collect();
        let ds = LabeledDataset::from_flat(values, n_features, mapped)?;
        *out = Box::into_raw(Box::new(CodDataset { inner: ds }));
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cod_dataset_n_samples(ds: *const CodDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.n_samples())
}

/// # Safety
/// `ds` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cod_dataset_n_features(ds: *const CodDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.n_features())
}

/// # Safety
/// `ds` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn cod_dataset_free(ds: *mut CodDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cod_model_load(path: *const c_char, out: *mut *mut CodModel) -> CodStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let model = OutlierModel::load(path_arg(path)?)?;
        *out = Box::into_raw(Box::new(CodModel { inner: model }));
        Ok(())
    })
}

/// Trains the default model on the synthetic corpus. `params` may be null
/// for the defaults.
///
/// # Safety
/// `params` must be null or valid, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cod_model_train_default(
    seed: u64,
    params: *const CodParams,
    out: *mut *mut CodModel,
) -> CodStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let (model, _) = train_default_model(seed, &params_arg(params))?;
        *out = Box::into_raw(Box::new(CodModel { inner: model }));
        Ok(())
    })
}

/// # Safety
/// `model` must be a handle from this library, `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cod_model_save(model: *const CodModel, path: *const c_char) -> CodStatus {
    guard(|| {
        let model = model.as_ref().ok_or(Failure::Null("model"))?;
        model.inner.save(path_arg(path)?)?;
        Ok(())
    })
}

/// Copies the three weights `[w1, w2, bias]` into `out`.
///
/// # Safety
/// `model` must be a handle from this library, `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn cod_model_weights(model: *const CodModel, out: *mut f64) -> CodStatus {
    guard(|| {
        let model = model.as_ref().ok_or(Failure::Null("model"))?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&model.inner.weights);
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn cod_model_free(model: *mut CodModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs the single-view detector. Fills `phi` with `2 * n` values
/// (`phi1, phi2` per sample), `scores` with `n` outlier probabilities and
/// `flags` with `n` decisions, where `n` must equal the sample count. Any
/// output pointer may be null to skip it.
///
/// # Safety
/// Handles must come from this library; non-null buffers must hold the
/// stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn cod_detect(
    ds: *const CodDataset,
    model: *const CodModel,
    params: *const CodParams,
    threshold: f64,
    n: usize,
    phi: *mut f64,
    scores: *mut f64,
    flags: *mut bool,
) -> CodStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or(Failure::Null("dataset"))?;
        let model = model.as_ref().ok_or(Failure::Null("model"))?;
        if n != ds.inner.n_samples() {
            return Err(Failure::Cod(CodError::SizeMismatch(format!(
                "buffers sized for {n} samples, dataset has {}",
                ds.inner.n_samples()
            ))));
        }
        let features = single_view_features(&ds.inner, &params_arg(params))?;
        if !phi.is_null() {
            let out = std::slice::from_raw_parts_mut(phi, 2 * n);
            for (dst, src) in out.chunks_exact_mut(2).zip(&features.phi) {
                dst.copy_from_slice(src);
            }
        }
        if !scores.is_null() {
            std::slice::from_raw_parts_mut(scores, n).copy_from_slice(&score_outlierness(&model.inner, &features)?);
        }
        if !flags.is_null() {
            std::slice::from_raw_parts_mut(flags, n).copy_from_slice(&detect(&model.inner, &features, threshold)?);
        }
        Ok(())
    })
}

/// Mann-Whitney AUC of `scores` against `truth` (ties count one half).
///
/// # Safety
/// `scores` and `truth` must hold `n` elements; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cod_auc(scores: *const f64, truth: *const bool, n: usize, out: *mut f64) -> CodStatus {
    guard(|| {
        if scores.is_null() || truth.is_null() || out.is_null() {
            return Err(Failure::Null("scores, truth or out"));
        }
        let s = std::slice::from_raw_parts(scores, n);
        let t = std::slice::from_raw_parts(truth, n);
        *out = cod::auc(s, t)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&CodError::SizeMismatch("x".into())), CodStatus::SizeMismatch);
        assert_eq!(status_of(&CodError::UnknownConfig("x".into())), CodStatus::InvalidArgument);
        assert_eq!(status_of(&CodError::SingleClass), CodStatus::Runtime);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), CodStatus::Panic);
        assert_eq!(
            LAST_ERROR.with(|e| e.borrow().to_str().unwrap().to_string()),
            "internal panic"
        );
        assert_eq!(guard(|| Ok(())), CodStatus::Ok);
    }
}
