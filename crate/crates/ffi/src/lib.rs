//! C ABI for seeddistill.
//!
//! Corpora and selection orders are opaque handles owned by the library and
//! released with their `_free` function. Every fallible call returns an
//! `SD_*` status; on failure `sd_last_error_message` describes the error on
//! the calling thread. Strings handed out as `char **` are owned by the
//! caller and must be released with `sd_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use seeddistill::analysis;
use seeddistill::cli::resolve_method;
use seeddistill::selection::order_corpus;
use seeddistill::{budget_size, load_manifest, save_subset, Corpus, Error, SelectionOrder};

pub const SD_OK: i32 = 0;
/// A required pointer argument was null or a string was not UTF-8.
pub const SD_ERR_ARGUMENT: i32 = 1;
pub const SD_ERR_PARAMETER: i32 = 2;
pub const SD_ERR_IO: i32 = 3;
pub const SD_ERR_PARSE: i32 = 4;
/// Duplicate ids, empty corpus or a seed without usable data.
pub const SD_ERR_CORPUS: i32 = 5;
pub const SD_ERR_MISSING_REPRESENTATION: i32 = 6;
pub const SD_ERR_VALIDATION: i32 = 7;
pub const SD_ERR_PANIC: i32 = 8;

/// A loaded, validated corpus.
pub struct SdCorpus {
    inner: Corpus,
}

/// A selection order; ids are kept as C strings for `sd_order_id_at`.
pub struct SdOrder {
    inner: SelectionOrder,
    ids: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

enum Failure {
    Argument(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, mapping errors and panics to a status and the last-error slot.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SD_OK,
        Ok(Err(Failure::Argument(msg))) => {
            set_last_error(msg);
            SD_ERR_ARGUMENT
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(format!("{}: {e}", e.code()));
            e.status()
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SD_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Argument(format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Argument(format!("{name} is not valid UTF-8")))
}

fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: caller promises a valid, writable pointer when non-null.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::Argument(format!("{name} is null")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next `sd_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads and validates a corpus manifest.
///
/// # Safety
/// `manifest_path` must be a NUL-terminated string; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sd_corpus_load(
    manifest_path: *const c_char,
    out: *mut *mut SdCorpus,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(manifest_path, "manifest_path")?;
        let corpus = load_manifest(path)?;
        *out = Box::into_raw(Box::new(SdCorpus { inner: corpus }));
        Ok(())
    })
}

/// Number of seeds, or 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_corpus_len(corpus: *const SdCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.n())
}

/// # Safety
/// `corpus` must be NULL or a handle from `sd_corpus_load`, freed once.
#[no_mangle]
pub unsafe extern "C" fn sd_corpus_free(corpus: *mut SdCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Orders the corpus. `method` is one of fiss, ciss-p, ciss-m, piss, random;
/// `kind` (ts, ast3gram, cfg3gram, embedding) is required for fiss and must
/// be NULL otherwise.
///
/// # Safety
/// `corpus` must be a live handle, `method` a NUL-terminated string, `kind`
/// NULL or a NUL-terminated string, and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sd_select(
    corpus: *const SdCorpus,
    method: *const c_char,
    kind: *const c_char,
    rng_seed: u64,
    out: *mut *mut SdOrder,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let corpus = corpus
            .as_ref()
            .ok_or_else(|| Failure::Argument("corpus is null".into()))?;
        let method = str_arg(method, "method")?;
        let kind = if kind.is_null() {
            None
        } else {
            Some(str_arg(kind, "kind")?)
        };
        let method = resolve_method(method, kind)?;
        let order = order_corpus(&corpus.inner, method, rng_seed)?;
        let ids = order
            .order
            .iter()
            .map(|id| {
                CString::new(id.as_str())
                    .map_err(|_| Failure::Argument(format!("seed id {id:?} contains NUL")))
            })
            .collect::<Result<_, _>>()?;
        *out = Box::into_raw(Box::new(SdOrder { inner: order, ids }));
        Ok(())
    })
}

/// # Safety
/// `order` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_order_len(order: *const SdOrder) -> usize {
    order.as_ref().map_or(0, |o| o.ids.len())
}

/// Seed id at rank `index`, borrowed from the handle; NULL when out of range.
///
/// # Safety
/// `order` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_order_id_at(order: *const SdOrder, index: usize) -> *const c_char {
    order
        .as_ref()
        .and_then(|o| o.ids.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `order` must be NULL or a handle from `sd_select`, freed once.
#[no_mangle]
pub unsafe extern "C" fn sd_order_free(order: *mut SdOrder) {
    if !order.is_null() {
        drop(Box::from_raw(order));
    }
}

/// The order file contents (JSON). Free `*out` with `sd_string_free`.
///
/// # Safety
/// `order` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sd_order_to_json(order: *const SdOrder, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let order = order
            .as_ref()
            .ok_or_else(|| Failure::Argument("order is null".into()))?;
        *out = into_c_string(order.inner.to_json());
        Ok(())
    })
}

/// Writes the order file atomically.
///
/// # Safety
/// `order` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sd_order_save(order: *const SdOrder, path: *const c_char) -> i32 {
    guard(|| {
        let order = order
            .as_ref()
            .ok_or_else(|| Failure::Argument("order is null".into()))?;
        let path = PathBuf::from(str_arg(path, "path")?);
        order.inner.save(&path)?;
        Ok(())
    })
}

/// Writes the budget-`k` prefix of `order` as a manifest at `out_path`.
/// `kept` (may be NULL) receives the number of seeds written.
///
/// # Safety
/// Handles must be live, `out_path` a NUL-terminated string, `kept` NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sd_save_subset(
    corpus: *const SdCorpus,
    order: *const SdOrder,
    budget: f64,
    out_path: *const c_char,
    kept: *mut usize,
) -> i32 {
    guard(|| {
        let corpus = corpus
            .as_ref()
            .ok_or_else(|| Failure::Argument("corpus is null".into()))?;
        let order = order
            .as_ref()
            .ok_or_else(|| Failure::Argument("order is null".into()))?;
        let path = PathBuf::from(str_arg(out_path, "out_path")?);
        let ids = save_subset(&corpus.inner, &order.inner, budget, path)?;
        if let Some(kept) = kept.as_mut() {
            *kept = ids.len();
        }
        Ok(())
    })
}

/// floor(k * n) clamped to at least 1, for k in (0, 1].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_budget_size(n: usize, budget: f64, out: *mut usize) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = budget_size(n, budget)?;
        Ok(())
    })
}

/// Mean of `len` run counts over `repetitions` runs.
///
/// # Safety
/// `counts` must point to `len` values (may be NULL when `len` is 0); `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_average_runs(
    counts: *const u64,
    len: usize,
    repetitions: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let counts = if len == 0 {
            &[][..]
        } else if counts.is_null() {
            return Err(Failure::Argument("counts is null".into()));
        } else {
            std::slice::from_raw_parts(counts, len)
        };
        *out = analysis::average_runs(counts, repetitions)?;
        Ok(())
    })
}

/// Dedup key of a crash message. Free `*out` with `sd_string_free`.
///
/// # Safety
/// `message` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sd_normalize_message(
    message: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let message = str_arg(message, "message")?;
        *out = into_c_string(analysis::normalize_message(message));
        Ok(())
    })
}
