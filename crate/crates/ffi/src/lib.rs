//! C ABI over the `semrel` engine.
//!
//! Every function returns a [`SemrelStatus`]; results come back through out
//! pointers. On failure, [`semrel_last_error_message`] describes the error
//! for the calling thread. Handles are opaque and must be released with
//! their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use semrel::contextcomp::{self, CollocationSet, ContextInstance, Stopwords};
use semrel::distsim::{self, CollocationCounts};
use semrel::pathrel::{self, RelatednessParams};
use semrel::ruleset;
use semrel::{Error, SemanticNetwork};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemrelStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    IoError = 4,
    WordNotInNetwork = 5,
    EmptyInput = 6,
    InvalidArgument = 7,
    MissingResource = 8,
    Panic = 9,
}

/// Classification mode for [`semrel_classify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemrelMode {
    /// Network relatedness only.
    Run1 = 1,
    /// Network relatedness, distributional similarity as fallback.
    Run2 = 2,
    /// Both features combined.
    Run3 = 3,
}

/// A loaded semantic network.
pub struct SemrelNetwork {
    inner: SemanticNetwork,
}

/// Collocation counts from a corpus or count file.
pub struct SemrelCounts {
    inner: CollocationCounts,
}

/// Frequent-collocation sets for context classification.
pub struct SemrelCollocations {
    sets: Vec<CollocationSet>,
}

/// Features and label for one phrase in context.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SemrelContextResult {
    pub fc: u8,
    pub srb: f64,
    pub sra: f64,
    pub figurative: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SemrelStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        // anything tied to a line of an input file is a parse error
        if matches!(e, Error::Parse { .. } | Error::AtLine { .. }) {
            return Failure(SemrelStatus::ParseError, e.to_string());
        }
        let status = match e.root() {
            Error::Io { .. } => SemrelStatus::IoError,
            Error::WordNotInNetwork(_) => SemrelStatus::WordNotInNetwork,
            Error::EmptyPhrase | Error::EmptyInput | Error::EmptyDataset => {
                SemrelStatus::EmptyInput
            }
            _ => SemrelStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SemrelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            SemrelStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SemrelStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SemrelStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            SemrelStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

/// # Safety
/// `p` is null or points to a live `T`.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: checked non-null; the caller provides writable storage.
    unsafe { out.write(value) };
    Ok(())
}

fn tokens(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(str::to_lowercase).collect()
}

fn top_k(k: usize) -> usize {
    if k == 0 {
        distsim::DEFAULT_TOP_K
    } else {
        k
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn semrel_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads an edge file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_network_load(
    path: *const c_char,
    out: *mut *mut SemrelNetwork,
) -> SemrelStatus {
    guard(|| {
        let path = text(path, "path")?;
        let (inner, _) = SemanticNetwork::load(Path::new(path))?;
        write_out(out, Box::into_raw(Box::new(SemrelNetwork { inner })), "out")
    })
}

/// # Safety
/// `net` is null or a handle from [`semrel_network_load`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semrel_network_free(net: *mut SemrelNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` is a live handle; out pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_network_counts(
    net: *const SemrelNetwork,
    out_nodes: *mut usize,
    out_edges: *mut usize,
) -> SemrelStatus {
    guard(|| {
        let net = handle(net, "net")?;
        write_out(out_nodes, net.inner.node_count(), "out_nodes")?;
        write_out(out_edges, net.inner.edge_count(), "out_edges")
    })
}

/// Capped least-cost path between two words, default parameters.
///
/// # Safety
/// `net` is a live handle; strings are NUL-terminated; out pointers are
/// writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_shortest_path(
    net: *const SemrelNetwork,
    source: *const c_char,
    target: *const c_char,
    out_cost: *mut u32,
    out_capped: *mut bool,
) -> SemrelStatus {
    guard(|| {
        let net = handle(net, "net")?;
        let p = pathrel::shortest_path_cost(
            &net.inner,
            text(source, "source")?,
            text(target, "target")?,
            &RelatednessParams::default(),
        )?;
        write_out(out_cost, p.cost, "out_cost")?;
        write_out(out_capped, p.capped, "out_capped")
    })
}

/// Relatedness of a word to a whitespace-separated phrase.
///
/// # Safety
/// `net` is a live handle; strings are NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_relatedness(
    net: *const SemrelNetwork,
    word: *const c_char,
    phrase: *const c_char,
    out: *mut f64,
) -> SemrelStatus {
    guard(|| {
        let net = handle(net, "net")?;
        let phrase = tokens(text(phrase, "phrase")?);
        let s = pathrel::word_phrase_relatedness(
            &net.inner,
            text(word, "word")?,
            &phrase,
            &RelatednessParams::default(),
        )?;
        write_out(out, s.value, "out")
    })
}

/// Counts collocations in a tokenized corpus. `window` 0 means the default.
///
/// # Safety
/// `path` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_counts_from_corpus(
    path: *const c_char,
    window: usize,
    out: *mut *mut SemrelCounts,
) -> SemrelStatus {
    guard(|| {
        let window = if window == 0 {
            distsim::DEFAULT_WINDOW
        } else {
            window
        };
        let inner = CollocationCounts::from_corpus_file(Path::new(text(path, "path")?), window)?;
        write_out(out, Box::into_raw(Box::new(SemrelCounts { inner })), "out")
    })
}

/// Loads a `target<TAB>context<TAB>count` file.
///
/// # Safety
/// `path` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_counts_load(
    path: *const c_char,
    out: *mut *mut SemrelCounts,
) -> SemrelStatus {
    guard(|| {
        let inner = CollocationCounts::read_tsv_file(Path::new(text(path, "path")?))?;
        write_out(out, Box::into_raw(Box::new(SemrelCounts { inner })), "out")
    })
}

/// # Safety
/// `counts` is null or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semrel_counts_free(counts: *mut SemrelCounts) {
    if !counts.is_null() {
        drop(Box::from_raw(counts));
    }
}

/// Distributional similarity of a word to a phrase. `top_k` 0 means the
/// default.
///
/// # Safety
/// `counts` is a live handle; strings are NUL-terminated; `out` is
/// writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_dist_similarity(
    counts: *const SemrelCounts,
    word: *const c_char,
    phrase: *const c_char,
    top_k: usize,
    out: *mut f64,
) -> SemrelStatus {
    guard(|| {
        let counts = handle(counts, "counts")?;
        let phrase = tokens(text(phrase, "phrase")?);
        let v = distsim::word_phrase_similarity(
            &counts.inner,
            text(word, "word")?,
            &phrase,
            self::top_k(top_k),
        )?;
        write_out(out, v, "out")
    })
}

/// Labels a word-phrase pair. `counts` may be null for `Run1`. A word
/// missing from the network leaves the network feature absent.
///
/// # Safety
/// `net` is a live handle; `counts` is null or a live handle; strings are
/// NUL-terminated; `out_positive` is writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_classify(
    net: *const SemrelNetwork,
    counts: *const SemrelCounts,
    word: *const c_char,
    phrase: *const c_char,
    mode: SemrelMode,
    top_k: usize,
    out_positive: *mut bool,
) -> SemrelStatus {
    guard(|| {
        let net = handle(net, "net")?;
        let counts = counts.as_ref();
        let rules = match mode {
            SemrelMode::Run1 => ruleset::run1_rules(),
            SemrelMode::Run2 => ruleset::run2_rules(),
            SemrelMode::Run3 => ruleset::run3_rules(),
        };
        if mode != SemrelMode::Run1 && counts.is_none() {
            return Err(Failure(
                SemrelStatus::MissingResource,
                "counts are required for this mode".into(),
            ));
        }
        let phrase = tokens(text(phrase, "phrase")?);
        let features = ruleset::assemble_features(
            Some(&net.inner),
            counts.map(|c| &c.inner),
            text(word, "word")?,
            &phrase,
            &RelatednessParams::default(),
            self::top_k(top_k),
        )?;
        write_out(
            out_positive,
            rules.apply(&features) == ruleset::POSITIVE,
            "out_positive",
        )
    })
}

/// Loads collocation sets written by the `context --save-collocations`
/// command.
///
/// # Safety
/// `path` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_collocations_load(
    path: *const c_char,
    out: *mut *mut SemrelCollocations,
) -> SemrelStatus {
    guard(|| {
        let sets = contextcomp::read_collocation_sets_file(Path::new(text(path, "path")?))?;
        write_out(
            out,
            Box::into_raw(Box::new(SemrelCollocations { sets })),
            "out",
        )
    })
}

/// # Safety
/// `sets` is null or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semrel_collocations_free(sets: *mut SemrelCollocations) {
    if !sets.is_null() {
        drop(Box::from_raw(sets));
    }
}

/// Literal or figurative use of the phrase at tokens `[start, end)` of a
/// whitespace-tokenized sentence. `sets` may be null (no frequent
/// collocations).
///
/// # Safety
/// `net` is a live handle; `sets` is null or a live handle; strings are
/// NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn semrel_context_classify(
    net: *const SemrelNetwork,
    sets: *const SemrelCollocations,
    phrase: *const c_char,
    sentence: *const c_char,
    start: usize,
    end: usize,
    out: *mut SemrelContextResult,
) -> SemrelStatus {
    guard(|| {
        let net = handle(net, "net")?;
        let inst = ContextInstance::new(
            text(phrase, "phrase")?,
            text(sentence, "sentence")?,
            (start, end),
            None,
        )
        .map_err(|m| Failure(SemrelStatus::InvalidArgument, m))?;
        let key = inst.phrase_text();
        let empty = CollocationSet::default();
        let cset = sets
            .as_ref()
            .and_then(|s| {
                s.sets
                    .iter()
                    .find(|c| c.phrase == key)
                    .or_else(|| s.sets.iter().find(|c| c.phrase.is_empty()))
            })
            .unwrap_or(&empty);
        let f = contextcomp::context_features(
            &inst,
            cset,
            &net.inner,
            &RelatednessParams::default(),
            &Stopwords::bundled(),
        )?;
        let figurative = contextcomp::context_rules().apply(&f) == contextcomp::FIGURATIVE;
        write_out(
            out,
            SemrelContextResult {
                fc: f.fc,
                srb: f.srb,
                sra: f.sra,
                figurative,
            },
            "out",
        )
    })
}
