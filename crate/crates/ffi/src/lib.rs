//! C interface to `dagrel`.
//!
//! Morphisms live behind the opaque [`DagrelMorphism`] handle and cross the
//! boundary as JSON in the schema of their instance. Every call returns a
//! [`DagrelStatus`]; after a non-zero status [`dagrel_last_error`] describes
//! what went wrong. Strings handed out by the library are freed with
//! [`dagrel_string_free`], handles with [`dagrel_morphism_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dagrel::category::{Category, Codilatory, DaggerCategory, Dilatory};
use dagrel::finprob::{FinProb, StochMap};
use dagrel::matcontr::{Mat, Matrix, ToleranceConfig};
use dagrel::msurj::{MSurj, MultiMap};
use dagrel::pinj::{PInj, PartialInjection};
use dagrel::suites::{run_suite, Instance, Suite, SuiteConfig};
use dagrel::{is_coisometry, is_isometry, CatError};

/// Status codes. `DAGREL_CHECK_FAILED` and `DAGREL_INVALID_INPUT` match the
/// exit codes of the command line tool.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DagrelStatus {
    DagrelOk = 0,
    /// A law check or mathematical precondition failed.
    DagrelCheckFailed = 1,
    /// Malformed JSON, an invalid morphism, or mismatched types.
    DagrelInvalidInput = 2,
    DagrelNullPointer = 3,
    /// A panic was caught at the boundary.
    DagrelInternal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DagrelCategory {
    DagrelMsurj = 0,
    DagrelPinj = 1,
    DagrelFinprob = 2,
    DagrelMat = 3,
}

impl From<DagrelCategory> for Instance {
    fn from(c: DagrelCategory) -> Self {
        match c {
            DagrelCategory::DagrelMsurj => Instance::MSurj,
            DagrelCategory::DagrelPinj => Instance::PInj,
            DagrelCategory::DagrelFinprob => Instance::FinProb,
            DagrelCategory::DagrelMat => Instance::Mat,
        }
    }
}

/// A validated morphism of one of the four instances.
pub struct DagrelMorphism(Morphism);

#[derive(Clone)]
enum Morphism {
    MSurj(MultiMap),
    PInj(PartialInjection),
    FinProb(StochMap),
    Mat(Matrix),
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(DagrelStatus, String);

impl From<CatError> for Failure {
    fn from(e: CatError) -> Self {
        let status = match e {
            CatError::Parse(_) | CatError::Invalid(_) | CatError::Mismatch(_) | CatError::Precondition(_) => {
                DagrelStatus::DagrelInvalidInput
            }
            _ => DagrelStatus::DagrelCheckFailed,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(DagrelStatus::DagrelInvalidInput, msg.into())
}

fn null(what: &str) -> Failure {
    Failure(DagrelStatus::DagrelNullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure, and turns panics into `DAGREL_INTERNAL`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DagrelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DagrelStatus::DagrelOk
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside dagrel");
            DagrelStatus::DagrelInternal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const DagrelMorphism, what: &str) -> Result<&'a Morphism, Failure> {
    p.as_ref().map(|m| &m.0).ok_or_else(|| null(what))
}

fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| Failure(DagrelStatus::DagrelInternal, "string contains NUL".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn give_morphism(out: *mut *mut DagrelMorphism, m: Morphism) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    unsafe { *out = Box::into_raw(Box::new(DagrelMorphism(m))) };
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string(v).map_err(|e| Failure(DagrelStatus::DagrelInternal, e.to_string()))
}

fn parse<T: serde::de::DeserializeOwned>(json: &str) -> Result<T, Failure> {
    serde_json::from_str(json).map_err(|e| invalid(e.to_string()))
}

fn mat() -> Mat {
    Mat::new(ToleranceConfig::default())
}

impl Morphism {
    fn parse(cat: DagrelCategory, json: &str) -> Result<Self, Failure> {
        let m = match cat {
            DagrelCategory::DagrelMsurj => Morphism::MSurj(parse(json)?),
            DagrelCategory::DagrelPinj => Morphism::PInj(parse(json)?),
            DagrelCategory::DagrelFinprob => Morphism::FinProb(parse(json)?),
            DagrelCategory::DagrelMat => Morphism::Mat(parse(json)?),
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), Failure> {
        match self {
            Morphism::MSurj(f) => MSurj.validate(f)?,
            Morphism::PInj(f) => PInj.validate(f)?,
            Morphism::FinProb(f) => FinProb.validate(f)?,
            Morphism::Mat(f) => mat().validate(f)?,
        }
        Ok(())
    }

    fn json(&self) -> Result<String, Failure> {
        match self {
            Morphism::MSurj(f) => to_json(f),
            Morphism::PInj(f) => to_json(f),
            Morphism::FinProb(f) => to_json(f),
            Morphism::Mat(f) => to_json(f),
        }
    }

    fn category(&self) -> DagrelCategory {
        match self {
            Morphism::MSurj(_) => DagrelCategory::DagrelMsurj,
            Morphism::PInj(_) => DagrelCategory::DagrelPinj,
            Morphism::FinProb(_) => DagrelCategory::DagrelFinprob,
            Morphism::Mat(_) => DagrelCategory::DagrelMat,
        }
    }

    fn dagger(&self) -> Morphism {
        match self {
            Morphism::MSurj(f) => Morphism::MSurj(MSurj.dagger(f)),
            Morphism::PInj(f) => Morphism::PInj(PInj.dagger(f)),
            Morphism::FinProb(f) => Morphism::FinProb(FinProb.dagger(f)),
            Morphism::Mat(f) => Morphism::Mat(mat().dagger(f)),
        }
    }

    /// `self ∘ r`.
    fn after(&self, r: &Morphism) -> Result<Morphism, Failure> {
        Ok(match (self, r) {
            (Morphism::MSurj(s), Morphism::MSurj(r)) => Morphism::MSurj(MSurj.compose(s, r)?),
            (Morphism::PInj(s), Morphism::PInj(r)) => Morphism::PInj(PInj.compose(s, r)?),
            (Morphism::FinProb(s), Morphism::FinProb(r)) => Morphism::FinProb(FinProb.compose(s, r)?),
            (Morphism::Mat(s), Morphism::Mat(r)) => Morphism::Mat(mat().compose(s, r)?),
            _ => return Err(invalid("morphisms belong to different categories")),
        })
    }

    fn isometric(&self, co: bool) -> Result<bool, Failure> {
        fn pick<D: DaggerCategory>(d: &D, f: &D::Mor, co: bool) -> dagrel::Result<bool> {
            if co {
                is_coisometry(d, f)
            } else {
                is_isometry(d, f)
            }
        }
        Ok(match self {
            Morphism::MSurj(f) => pick(&MSurj, f, co)?,
            Morphism::PInj(f) => pick(&PInj, f, co)?,
            Morphism::FinProb(f) => pick(&FinProb, f, co)?,
            Morphism::Mat(f) => pick(&mat(), f, co)?,
        })
    }

    /// The dilator span for msurj and finprob, the codilator cospan for pinj
    /// and mat, as `{"left": .., "right": ..}`.
    fn dilation_json(&self) -> Result<String, Failure> {
        match self {
            Morphism::MSurj(f) => to_json(&MSurj.dilator(f)?),
            Morphism::FinProb(f) => to_json(&FinProb.dilator(f)?),
            Morphism::PInj(f) => to_json(&PInj.codilator(f)?),
            Morphism::Mat(f) => to_json(&mat().codilator(f)?),
        }
    }
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dagrel_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn dagrel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses and validates a morphism of `category`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_morphism_from_json(
    category: DagrelCategory,
    json: *const c_char,
    out: *mut *mut DagrelMorphism,
) -> DagrelStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        give_morphism(out, Morphism::parse(category, text)?)
    })
}

/// # Safety
/// `m` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dagrel_morphism_free(m: *mut DagrelMorphism) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_morphism_category(m: *const DagrelMorphism, out: *mut DagrelCategory) -> DagrelStatus {
    guard(|| {
        let m = handle(m, "morphism")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = m.category();
        Ok(())
    })
}

/// Writes the JSON of `m` to `*out`; free it with [`dagrel_string_free`].
///
/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_morphism_to_json(m: *const DagrelMorphism, out: *mut *mut c_char) -> DagrelStatus {
    guard(|| give_string(out, handle(m, "morphism")?.json()?))
}

/// `*out = s ∘ r`.
///
/// # Safety
/// `s` and `r` must be live handles, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_compose(
    s: *const DagrelMorphism,
    r: *const DagrelMorphism,
    out: *mut *mut DagrelMorphism,
) -> DagrelStatus {
    guard(|| {
        let (s, r) = (handle(s, "s")?, handle(r, "r")?);
        give_morphism(out, s.after(r)?)
    })
}

/// # Safety
/// `r` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_dagger(r: *const DagrelMorphism, out: *mut *mut DagrelMorphism) -> DagrelStatus {
    guard(|| give_morphism(out, handle(r, "r")?.dagger()))
}

/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_is_isometry(m: *const DagrelMorphism, out: *mut bool) -> DagrelStatus {
    guard(|| {
        let v = handle(m, "morphism")?.isometric(false)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = v;
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_is_coisometry(m: *const DagrelMorphism, out: *mut bool) -> DagrelStatus {
    guard(|| {
        let v = handle(m, "morphism")?.isometric(true)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = v;
        Ok(())
    })
}

/// The dilator (msurj, finprob) or codilator (pinj, mat) of `m` as JSON
/// `{"left": .., "right": ..}`.
///
/// # Safety
/// `m` must be a live handle, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_dilation_json(m: *const DagrelMorphism, out: *mut *mut c_char) -> DagrelStatus {
    guard(|| give_string(out, handle(m, "morphism")?.dilation_json()?))
}

/// Runs one law suite, or all six when `suite` is null, and writes the JSON
/// reports to `*out`. `samples` of 0 keeps the suite defaults. Returns
/// `DAGREL_CHECK_FAILED` (with the reports still written) when a law fails.
///
/// # Safety
/// `suite` must be null or a NUL-terminated string, `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dagrel_check_axioms(
    category: DagrelCategory,
    suite: *const c_char,
    seed: u64,
    samples: usize,
    out: *mut *mut c_char,
) -> DagrelStatus {
    let mut failed = false;
    let status = guard(|| {
        let suites: Vec<Suite> = if suite.is_null() {
            Suite::ALL.to_vec()
        } else {
            vec![read_str(suite, "suite")?.parse().map_err(|e: String| invalid(e))?]
        };
        let cfg = SuiteConfig { seed, samples: (samples > 0).then_some(samples), ..SuiteConfig::default() };
        let reports: Vec<_> = suites.into_iter().map(|s| run_suite(category.into(), s, &cfg)).collect();
        failed = reports.iter().any(|r| !r.ok());
        give_string(out, to_json(&reports)?)
    });
    if status == DagrelStatus::DagrelOk && failed {
        set_error("a law check failed; see the reports");
        return DagrelStatus::DagrelCheckFailed;
    }
    status
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn dagrel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
