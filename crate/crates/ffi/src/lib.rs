//! C interface to `boundslab`.
//!
//! Models and domains are opaque heap handles owned by the caller and
//! released with their `_free` function. Every fallible call returns a
//! [`BlStatus`]; on anything but `BL_STATUS_OK` a message is available from
//! [`bl_last_error`] on the same thread until the next failing call.
//! Strings returned through `char **` must be released with [`bl_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use boundslab::search::Limits;
use boundslab::{Domain, Error, Model, Notion, Outcome, SubsetSumInstance, VarId};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidModel = 4,
    InvalidArgument = 5,
    NoRealSemantics = 6,
    Overflow = 7,
    BudgetExceeded = 8,
    Panic = 9,
}

/// Values for the `notion` arguments; `Declared` uses the one posted with each constraint.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlNotion {
    Declared = -1,
    Domain = 0,
    BoundsD = 1,
    BoundsZ = 2,
    BoundsR = 3,
}

// Taken as a plain integer at the boundary so out-of-range values from C are rejected, not UB.
fn resolve(notion: i32) -> Result<Option<Notion>, Fail> {
    Ok(match notion {
        n if n == BlNotion::Declared as i32 => None,
        n if n == BlNotion::Domain as i32 => Some(Notion::Domain),
        n if n == BlNotion::BoundsD as i32 => Some(Notion::BoundsD),
        n if n == BlNotion::BoundsZ as i32 => Some(Notion::BoundsZ),
        n if n == BlNotion::BoundsR as i32 => Some(Notion::BoundsR),
        n => return Err(Fail(BlStatus::InvalidArgument, format!("unknown notion {n}"))),
    })
}

/// A parsed, validated model.
pub struct BlModel(Model);

/// One finite integer set per model variable.
pub struct BlDomain(Domain);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(BlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let s = match &e {
            Error::Parse { .. } => BlStatus::Parse,
            Error::InvalidModel(_) => BlStatus::InvalidModel,
            Error::RealSemanticsUndefined(_) => BlStatus::NoRealSemantics,
            Error::Overflow => BlStatus::Overflow,
            Error::BudgetExceeded(_) => BlStatus::BudgetExceeded,
            Error::NonIntegral(_) | Error::Arity { .. } | Error::AllFixed => BlStatus::InvalidArgument,
        };
        Fail(s, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            BlStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null("source"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(BlStatus::InvalidUtf8, format!("source is not UTF-8: {e}")))
}

fn matching<'a>(m: &Model, d: Option<&'a BlDomain>) -> Result<Option<&'a Domain>, Fail> {
    match d {
        Some(d) if d.0.sets().len() != m.vars.len() => Err(Fail(
            BlStatus::InvalidArgument,
            format!("domain has {} variables, model has {}", d.0.sets().len(), m.vars.len()),
        )),
        d => Ok(d.map(|d| &d.0)),
    }
}

/// Message for the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and validates a model from NUL-terminated text.
#[no_mangle]
pub unsafe extern "C" fn bl_model_parse(src: *const c_char, model: *mut *mut BlModel) -> BlStatus {
    guard(|| {
        let slot = out(model, "model")?;
        *slot = ptr::null_mut();
        let m = boundslab::parse_model(text(src)?)?;
        *slot = Box::into_raw(Box::new(BlModel(m)));
        Ok(())
    })
}

/// Builds the 0/1 linear model deciding a subset-sum instance.
#[no_mangle]
pub unsafe extern "C" fn bl_reduce_subset_sum(
    items: *const i64,
    len: usize,
    target: i64,
    model: *mut *mut BlModel,
) -> BlStatus {
    guard(|| {
        let slot = out(model, "model")?;
        *slot = ptr::null_mut();
        if items.is_null() && len > 0 {
            return Err(null("items"));
        }
        let items = if len == 0 { &[][..] } else { std::slice::from_raw_parts(items, len) };
        let s = SubsetSumInstance::new(items.to_vec(), target)?;
        let (m, _, _) = boundslab::encode_subset_sum(&s)?;
        *slot = Box::into_raw(Box::new(BlModel(m)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bl_model_free(model: *mut BlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bl_model_num_vars(model: *const BlModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.vars.len())
}

#[no_mangle]
pub unsafe extern "C" fn bl_model_num_constraints(model: *const BlModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.constraints.len())
}

/// The declared domains of the model.
#[no_mangle]
pub unsafe extern "C" fn bl_domain_initial(model: *const BlModel, domain: *mut *mut BlDomain) -> BlStatus {
    guard(|| {
        let slot = out(domain, "domain")?;
        *slot = ptr::null_mut();
        let m = get(model, "model")?;
        *slot = Box::into_raw(Box::new(BlDomain(m.0.initial_domain())));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bl_domain_free(domain: *mut BlDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Number of values left for variable `var`, plus its bounds when nonempty.
#[no_mangle]
pub unsafe extern "C" fn bl_domain_var(
    domain: *const BlDomain,
    var: usize,
    size: *mut usize,
    lo: *mut i64,
    hi: *mut i64,
) -> BlStatus {
    guard(|| {
        let d = &get(domain, "domain")?.0;
        let s = d
            .sets()
            .get(var)
            .ok_or_else(|| Fail(BlStatus::InvalidArgument, format!("variable index {var} out of range")))?;
        *out(size, "size")? = s.len();
        if let (Some(l), Some(h)) = (s.min(), s.max()) {
            if let Some(lo) = lo.as_mut() {
                *lo = l;
            }
            if let Some(hi) = hi.as_mut() {
                *hi = h;
            }
        }
        Ok(())
    })
}

/// Checks constraint `index` against `domain` (the model's declared
/// domains when NULL).
#[no_mangle]
pub unsafe extern "C" fn bl_check(
    model: *const BlModel,
    domain: *const BlDomain,
    index: usize,
    notion: i32,
    consistent: *mut bool,
) -> BlStatus {
    guard(|| {
        let m = &get(model, "model")?.0;
        let slot = out(consistent, "consistent")?;
        let p = m
            .constraints
            .get(index)
            .ok_or_else(|| Fail(BlStatus::InvalidArgument, format!("constraint index {index} out of range")))?;
        let initial;
        let d = match matching(m, domain.as_ref())? {
            Some(d) => d,
            None => {
                initial = m.initial_domain();
                &initial
            }
        };
        let n = resolve(notion)?.unwrap_or(p.notion);
        *slot = boundslab::check(d, &p.constraint, n)?.consistent;
        Ok(())
    })
}

/// Propagates every constraint to a common fixpoint. On failure `*result`
/// is NULL and `*failed` is true.
#[no_mangle]
pub unsafe extern "C" fn bl_propagate(
    model: *const BlModel,
    domain: *const BlDomain,
    notion: i32,
    result: *mut *mut BlDomain,
    failed: *mut bool,
) -> BlStatus {
    guard(|| {
        let slot = out(result, "result")?;
        *slot = ptr::null_mut();
        let failed = out(failed, "failed")?;
        let mut m = get(model, "model")?.0.clone();
        if let Some(n) = resolve(notion)? {
            m = m.with_notion(n);
            m.validate()?;
        }
        let d = matching(&m, domain.as_ref())?.cloned().unwrap_or_else(|| m.initial_domain());
        match boundslab::propagate_all(&m, &d)?.outcome {
            Outcome::Failure => *failed = true,
            Outcome::Fixpoint(f) => {
                *failed = false;
                *slot = Box::into_raw(Box::new(BlDomain(f)));
            }
        }
        Ok(())
    })
}

/// Counts solutions from the declared domains. `max_nodes` of 0 means no
/// limit; `*truncated` reports whether the limit cut the search short.
#[no_mangle]
pub unsafe extern "C" fn bl_solve_count(
    model: *const BlModel,
    max_nodes: u64,
    count: *mut u64,
    truncated: *mut bool,
) -> BlStatus {
    guard(|| {
        let m = &get(model, "model")?.0;
        let count = out(count, "count")?;
        let limits = Limits { max_solutions: None, max_nodes: (max_nodes > 0).then_some(max_nodes) };
        let r = boundslab::solve(m, &m.initial_domain(), limits)?;
        *count = r.solutions.len() as u64;
        if let Some(t) = truncated.as_mut() {
            *t = r.truncated;
        }
        Ok(())
    })
}

/// Renders the model in its text format, with `domain` in place of the
/// declared domains when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn bl_model_to_string(
    model: *const BlModel,
    domain: *const BlDomain,
    text: *mut *mut c_char,
) -> BlStatus {
    guard(|| {
        let slot = out(text, "text")?;
        *slot = ptr::null_mut();
        let m = &get(model, "model")?.0;
        let s = match matching(m, domain.as_ref())? {
            Some(d) => boundslab::format::format_model_with(m, d),
            None => boundslab::format_model(m),
        };
        *slot = CString::new(s)
            .map_err(|_| Fail(BlStatus::InvalidArgument, "rendered text contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Index of the variable named `name`, or -1.
#[no_mangle]
pub unsafe extern "C" fn bl_model_var_index(model: *const BlModel, name: *const c_char) -> i64 {
    let (Some(m), Ok(n)) = (model.as_ref(), text(name)) else {
        return -1;
    };
    m.0.var_id(n).map_or(-1, |v: VarId| v.index() as i64)
}
