//! C ABI over the bivocab tokenizer and embedding formats.
//!
//! Every function returns a [`BivocabStatus`]. On failure a message is kept
//! per thread and can be read with [`bivocab_last_error`]. Handles are
//! opaque; free them with the matching `_free` function. Text is passed as
//! pointer plus byte length and must be UTF-8. Outputs go to caller-owned
//! buffers; when a buffer is too small the call fails with
//! `BIVOCAB_STATUS_BUFFER_TOO_SMALL` and reports the needed length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use bivocab::embed::{load_embeddings, EmbedError, EmbeddingMatrix};
use bivocab::metrics::fertility;
use bivocab::tokenizer::{DetokenizeError, ModelError, TokenizerModel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BivocabStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidModel = 4,
    InvalidEmbeddings = 5,
    BufferTooSmall = 6,
    IdOutOfRange = 7,
    EmptyInput = 8,
    Panic = 9,
}

/// Loaded tokenizer.
pub struct BivocabModel(TokenizerModel);

/// Loaded embedding matrix.
pub struct BivocabEmbeddings(EmbeddingMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type Fallible = Result<(), (BivocabStatus, String)>;

fn guard(f: impl FnOnce() -> Fallible) -> BivocabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BivocabStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BivocabStatus::Panic
        }
    }
}

fn null() -> (BivocabStatus, String) {
    (BivocabStatus::NullArgument, "null argument".into())
}

fn model_err(e: ModelError) -> (BivocabStatus, String) {
    let status = match e {
        ModelError::Io { .. } => BivocabStatus::Io,
        _ => BivocabStatus::InvalidModel,
    };
    (status, e.to_string())
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, (BivocabStatus, String)> {
    if path.is_null() {
        return Err(null());
    }
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| (BivocabStatus::InvalidUtf8, "path is not UTF-8".into()))
}

unsafe fn bytes_arg<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], (BivocabStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn text_arg<'a>(ptr: *const u8, len: usize) -> Result<&'a str, (BivocabStatus, String)> {
    std::str::from_utf8(bytes_arg(ptr, len)?).map_err(|e| {
        (
            BivocabStatus::InvalidUtf8,
            format!("invalid UTF-8 at byte offset {}", e.valid_up_to()),
        )
    })
}

unsafe fn model_ref<'a>(m: *const BivocabModel) -> Result<&'a TokenizerModel, (BivocabStatus, String)> {
    m.as_ref().map(|m| &m.0).ok_or_else(null)
}

/// Copies `src` into `dst` of capacity `cap`; `*out_len` always receives
/// `src.len()`.
unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, cap: usize, out_len: *mut usize) -> Fallible {
    if out_len.is_null() {
        return Err(null());
    }
    *out_len = src.len();
    if src.len() > cap {
        return Err((
            BivocabStatus::BufferTooSmall,
            format!("need room for {} elements, have {cap}", src.len()),
        ));
    }
    if !src.is_empty() {
        if dst.is_null() {
            return Err(null());
        }
        std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bivocab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn bivocab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Loads a TFV1 model (and its metadata sidecar, if any) from `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bivocab_model_load(path: *const c_char, out: *mut *mut BivocabModel) -> BivocabStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(null());
        }
        let m = TokenizerModel::load(path).map_err(model_err)?;
        *out = Box::into_raw(Box::new(BivocabModel(m)));
        Ok(())
    })
}

/// Parses a TFV1 model held in memory.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn bivocab_model_from_tfv1(
    data: *const u8,
    len: usize,
    out: *mut *mut BivocabModel,
) -> BivocabStatus {
    guard(|| {
        let text = text_arg(data, len)?;
        if out.is_null() {
            return Err(null());
        }
        let m = TokenizerModel::from_tfv1(text).map_err(model_err)?;
        *out = Box::into_raw(Box::new(BivocabModel(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must come from a `bivocab_model_*` constructor, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn bivocab_model_free(m: *mut BivocabModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of entries, 0 for NULL.
///
/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bivocab_model_vocab_size(m: *const BivocabModel) -> usize {
    m.as_ref().map_or(0, |m| m.0.vocab_size())
}

/// Tokenizes `len` bytes of UTF-8 text into `ids` (capacity `cap`).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn bivocab_tokenize(
    m: *const BivocabModel,
    text: *const u8,
    len: usize,
    ids: *mut u32,
    cap: usize,
    out_len: *mut usize,
) -> BivocabStatus {
    guard(|| {
        let model = model_ref(m)?;
        let text = text_arg(text, len)?;
        copy_out(&model.encode(text), ids, cap, out_len)
    })
}

/// Writes the UTF-8 text for `n` ids into `buf` (capacity `cap` bytes, no
/// terminator).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn bivocab_detokenize(
    m: *const BivocabModel,
    ids: *const u32,
    n: usize,
    buf: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> BivocabStatus {
    guard(|| {
        let model = model_ref(m)?;
        let ids = bytes_arg(ids, n)?;
        let text = model.detokenize(ids).map_err(|e| {
            let status = match e {
                DetokenizeError::IdOutOfRange { .. } => BivocabStatus::IdOutOfRange,
                _ => BivocabStatus::InvalidUtf8,
            };
            (status, e.to_string())
        })?;
        copy_out(text.as_bytes(), buf, cap, out_len)
    })
}

/// Tokens per word over newline-separated documents.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn bivocab_fertility(
    m: *const BivocabModel,
    text: *const u8,
    len: usize,
    out: *mut f64,
) -> BivocabStatus {
    guard(|| {
        let model = model_ref(m)?;
        let text = text_arg(text, len)?;
        if out.is_null() {
            return Err(null());
        }
        let docs: Vec<&str> = text.lines().collect();
        // the only failure is a corpus without words
        let report = fertility(model, &docs).map_err(|e| (BivocabStatus::EmptyInput, e.to_string()))?;
        *out = report.fertility;
        Ok(())
    })
}

/// Loads an EMB1 matrix.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bivocab_embeddings_load(
    path: *const c_char,
    out: *mut *mut BivocabEmbeddings,
) -> BivocabStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(null());
        }
        let m = load_embeddings(path).map_err(|e| {
            let status = match e {
                EmbedError::Io { .. } => BivocabStatus::Io,
                _ => BivocabStatus::InvalidEmbeddings,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(BivocabEmbeddings(m)));
        Ok(())
    })
}

/// # Safety
/// `e` must come from [`bivocab_embeddings_load`], or be NULL.
#[no_mangle]
pub unsafe extern "C" fn bivocab_embeddings_free(e: *mut BivocabEmbeddings) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Writes rows and dims; either pointer may be NULL.
///
/// # Safety
/// `e` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bivocab_embeddings_shape(
    e: *const BivocabEmbeddings,
    rows: *mut usize,
    dims: *mut usize,
) -> BivocabStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(null)?;
        if let Some(r) = rows.as_mut() {
            *r = e.0.rows();
        }
        if let Some(d) = dims.as_mut() {
            *d = e.0.dims();
        }
        Ok(())
    })
}

/// Copies row `row` into `buf` (capacity `cap` floats).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn bivocab_embeddings_row(
    e: *const BivocabEmbeddings,
    row: usize,
    buf: *mut f32,
    cap: usize,
    out_len: *mut usize,
) -> BivocabStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(null)?;
        if row >= e.0.rows() {
            return Err((
                BivocabStatus::IdOutOfRange,
                format!("row {row} out of range for {} rows", e.0.rows()),
            ));
        }
        copy_out(e.0.row(row), buf, cap, out_len)
    })
}
