//! C ABI for the pseudomine toolchain.
//!
//! The surface mirrors what other languages need to drive the pipeline and
//! reuse the text primitives: an opaque pipeline handle built from a TOML
//! config (or defaults), stage execution by name, and stateless helpers for
//! cleaning, stemming, span extraction, keyword detection, and snippet
//! cutting. Strings returned by this library are UTF-8, NUL-terminated, and
//! must be released with `pm_string_free`. On failure the functions return a
//! status code (or NULL) and store a message retrievable per thread via
//! `pm_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use pseudomine::cleaner::{clean, CleaningRules};
use pseudomine::config::PipelineConfig;
use pseudomine::detector::{detect_indicative_keywords, KeywordClass};
use pseudomine::extractor::extract_pseudocode;
use pseudomine::pipeline::{run, Stage};
use pseudomine::references::{extract_snippet, RefMatch, SnippetConfig};
use pseudomine::topics::stem;

/// Status codes returned by the fallible entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmStatus {
    PmOk = 0,
    PmNullArgument = 1,
    PmInvalidUtf8 = 2,
    PmInvalidConfig = 3,
    PmInvalidArgument = 4,
    PmRunFailed = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul-free message");
    });
}

fn fail(status: PmStatus, message: impl AsRef<str>) -> PmStatus {
    set_error(message);
    status
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never NULL.
#[no_mangle]
pub extern "C" fn pm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, PmStatus> {
    if ptr.is_null() {
        set_error("argument is NULL");
        return Err(PmStatus::PmNullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_error(format!("argument is not valid UTF-8: {e}"));
        PmStatus::PmInvalidUtf8
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul-free string")
        .into_raw()
}

/// Frees a string returned by this library. NULL is accepted.
///
/// # Safety
/// `s` must be a pointer previously returned by a `pm_*` function and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque pipeline handle holding a validated configuration.
pub struct PmPipeline {
    config: PipelineConfig,
}

/// Creates a pipeline handle with default configuration.
#[no_mangle]
pub extern "C" fn pm_pipeline_default() -> *mut PmPipeline {
    Box::into_raw(Box::new(PmPipeline {
        config: PipelineConfig::default(),
    }))
}

/// Loads a pipeline handle from a TOML configuration file.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn pm_pipeline_load(
    config_path: *const c_char,
    out: *mut *mut PmPipeline,
) -> PmStatus {
    if out.is_null() {
        return fail(PmStatus::PmNullArgument, "out pointer is NULL");
    }
    let path = match utf8_arg(config_path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match PipelineConfig::load(Path::new(path)) {
        Ok(config) => {
            *out = Box::into_raw(Box::new(PmPipeline { config }));
            PmStatus::PmOk
        }
        Err(e) => fail(PmStatus::PmInvalidConfig, e.to_string()),
    }
}

/// Releases a pipeline handle. NULL is accepted.
///
/// # Safety
/// `pipeline` must come from `pm_pipeline_default`/`pm_pipeline_load` and
/// not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn pm_pipeline_free(pipeline: *mut PmPipeline) {
    if !pipeline.is_null() {
        drop(Box::from_raw(pipeline));
    }
}

/// Runs one stage by name (`ingest`, `detect`, `extract`, `refs`, `clean`,
/// `cluster`, `stats`, `sample`, `validate`, or `all`).
///
/// # Safety
/// `pipeline` must be a live handle and `stage` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pm_pipeline_run(
    pipeline: *mut PmPipeline,
    stage: *const c_char,
) -> PmStatus {
    if pipeline.is_null() {
        return fail(PmStatus::PmNullArgument, "pipeline handle is NULL");
    }
    let stage = match utf8_arg(stage) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let stage: Stage = match stage.parse() {
        Ok(s) => s,
        Err(e) => return fail(PmStatus::PmInvalidArgument, e),
    };
    let config = &(*pipeline).config;
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(stage, config)));
    match outcome {
        Ok(Ok(_)) => PmStatus::PmOk,
        Ok(Err(e)) => fail(PmStatus::PmRunFailed, e.to_string()),
        Err(_) => fail(PmStatus::PmRunFailed, "pipeline panicked"),
    }
}

/// Strips LaTeX machinery from text under the default cleaning rules.
/// Returns a new string, or NULL with an error recorded.
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn pm_clean(text: *const c_char) -> *mut c_char {
    match utf8_arg(text) {
        Ok(t) => into_c_string(clean(t, &CleaningRules::default())),
        Err(_) => ptr::null_mut(),
    }
}

/// Stems one lowercase word with the classic Porter algorithm.
///
/// # Safety
/// `word` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn pm_stem(word: *const c_char) -> *mut c_char {
    match utf8_arg(word) {
        Ok(w) => into_c_string(stem(w)),
        Err(_) => ptr::null_mut(),
    }
}

/// Extracts algorithm environments from LaTeX text. Returns a JSON array of
/// span objects (`source_path`, `start_offset`, `end_offset`, `body`,
/// `raw`, `starred`, `nesting_depth_seen`), or NULL on error.
///
/// # Safety
/// `latex` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn pm_extract_spans_json(latex: *const c_char) -> *mut c_char {
    match utf8_arg(latex) {
        Ok(text) => {
            let extraction = extract_pseudocode("input.tex", text);
            into_c_string(serde_json::to_string(&extraction.spans).expect("spans serialize"))
        }
        Err(_) => ptr::null_mut(),
    }
}

/// Finds indicative keywords in plain text. Returns a JSON array of hit
/// objects (`keyword_class`, `matched_text`, `file_offset`), or NULL.
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn pm_detect_keywords_json(text: *const c_char) -> *mut c_char {
    match utf8_arg(text) {
        Ok(t) => {
            let hits = detect_indicative_keywords(t, &KeywordClass::ALL);
            into_c_string(serde_json::to_string(&hits).expect("hits serialize"))
        }
        Err(_) => ptr::null_mut(),
    }
}

/// Cuts the sentence-trimmed snippet around a reference match located at
/// char offset `offset` with char length `length`. `span_chars` and
/// `boundary_window` follow the pipeline defaults of 1200 and 300.
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_snippet(
    text: *const c_char,
    offset: usize,
    length: usize,
    span_chars: usize,
    boundary_window: usize,
    out: *mut *mut c_char,
) -> PmStatus {
    if out.is_null() {
        return fail(PmStatus::PmNullArgument, "out pointer is NULL");
    }
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let n_chars = text.chars().count();
    if length == 0 || offset + length > n_chars {
        return fail(
            PmStatus::PmInvalidArgument,
            format!("match [{offset}, {offset}+{length}) outside text of {n_chars} chars"),
        );
    }
    if span_chars == 0 || boundary_window == 0 || boundary_window > span_chars {
        return fail(
            PmStatus::PmInvalidArgument,
            "require 0 < boundary_window <= span_chars",
        );
    }
    let cfg = SnippetConfig {
        span_chars,
        boundary_window,
        ..SnippetConfig::default()
    };
    let m = RefMatch {
        source_path: String::new(),
        offset,
        length,
    };
    *out = into_c_string(extract_snippet(text, &m, &cfg).text);
    PmStatus::PmOk
}

/// Library version, packed as (major << 16) | (minor << 8) | patch.
#[no_mangle]
pub extern "C" fn pm_version() -> u32 {
    let parse = |s: &str| s.parse::<u32>().unwrap_or(0);
    let mut parts = env!("CARGO_PKG_VERSION").split('.');
    let major = parse(parts.next().unwrap_or("0"));
    let minor = parse(parts.next().unwrap_or("0"));
    let patch = parse(parts.next().unwrap_or("0"));
    (major << 16) | (minor << 8) | patch
}
