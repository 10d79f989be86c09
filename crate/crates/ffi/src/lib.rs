//! C ABI for pb-control.
//!
//! Instances are opaque handles created by [`pb_instance_parse`] and released
//! with [`pb_instance_free`]. Every fallible function returns a [`PbStatus`];
//! on failure [`pb_last_error`] describes the problem for the calling thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`pb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pb_control::control::{solve, ControlQuery, Goal, Operation, SearchOptions};
use pb_control::measures::win_probability;
use pb_control::pabulib;
use pb_control::rational::format_exact;
use pb_control::rules::{evaluate, RuleId};
use pb_control::{Instance, TieBreakOrder};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    BufferTooSmall = 5,
    RuleError = 6,
    ControlError = 7,
    MeasureError = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbRule {
    GreedyAv = 0,
    GreedyCost = 1,
    Phragmen = 2,
    EqualShares = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbGoal {
    Constructive = 0,
    Destructive = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbOperation {
    Delete = 0,
    Add = 1,
}

impl From<PbRule> for RuleId {
    fn from(r: PbRule) -> Self {
        match r {
            PbRule::GreedyAv => RuleId::GreedyAv,
            PbRule::GreedyCost => RuleId::GreedyCost,
            PbRule::Phragmen => RuleId::Phragmen,
            PbRule::EqualShares => RuleId::EqualShares,
        }
    }
}

/// Parsed election with its input-order tie-breaking.
pub struct PbInstance {
    instance: Instance,
    tiebreak: TieBreakOrder,
}

/// Result of a control query; `weight` is 0 when infeasible.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PbControlResult {
    pub feasible: bool,
    pub complete: bool,
    pub weight: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (PbStatus, String)>) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PbStatus::Panic
        }
    }
}

fn fail<E: std::fmt::Display>(status: PbStatus) -> impl Fn(E) -> (PbStatus, String) {
    move |e| (status, e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (PbStatus, String)> {
    if p.is_null() {
        return Err((PbStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (PbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const PbInstance) -> Result<&'a PbInstance, (PbStatus, String)> {
    p.as_ref().ok_or((PbStatus::NullPointer, "instance handle is null".into()))
}

fn null_out() -> (PbStatus, String) {
    (PbStatus::NullPointer, "output pointer is null".into())
}

fn project_arg(h: &PbInstance, project: usize) -> Result<(), (PbStatus, String)> {
    if project >= h.instance.num_projects() {
        return Err((PbStatus::InvalidArgument, format!("project index {project} out of range")));
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses Pabulib text. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_parse(text: *const c_char, out: *mut *mut PbInstance) -> PbStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null_out());
        }
        let instance = pabulib::parse(text).map_err(fail(PbStatus::ParseError))?;
        let tiebreak = TieBreakOrder::input_order(&instance);
        *out = Box::into_raw(Box::new(PbInstance { instance, tiebreak }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `instance` must come from [`pb_instance_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_free(instance: *mut PbInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_num_projects(instance: *const PbInstance, out: *mut usize) -> PbStatus {
    guard(|| {
        let h = handle(instance)?;
        let out = out.as_mut().ok_or_else(null_out)?;
        *out = h.instance.num_projects();
        Ok(())
    })
}

/// Index of the project with the given id.
///
/// # Safety
/// `instance` must be a live handle, `id` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_project_index(
    instance: *const PbInstance,
    id: *const c_char,
    out: *mut usize,
) -> PbStatus {
    guard(|| {
        let h = handle(instance)?;
        let id = str_arg(id, "id")?;
        let out = out.as_mut().ok_or_else(null_out)?;
        *out = h.instance.require_index(id).map_err(fail(PbStatus::InvalidArgument))?;
        Ok(())
    })
}

/// Serializes the instance as Pabulib text into `*out`.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pb_instance_write(instance: *const PbInstance, out: *mut *mut c_char) -> PbStatus {
    guard(|| {
        let h = handle(instance)?;
        let out = out.as_mut().ok_or_else(null_out)?;
        *out = CString::new(pabulib::write(&h.instance)).map_err(fail(PbStatus::InvalidArgument))?.into_raw();
        Ok(())
    })
}

/// Runs a rule; `funded[i]` is set to 1 for funded projects and 0 otherwise.
///
/// # Safety
/// `funded` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluate(
    instance: *const PbInstance,
    rule: PbRule,
    funded: *mut u8,
    len: usize,
) -> PbStatus {
    guard(|| {
        let h = handle(instance)?;
        if funded.is_null() {
            return Err(null_out());
        }
        let m = h.instance.num_projects();
        if len < m {
            return Err((PbStatus::BufferTooSmall, format!("need {m} entries, got {len}")));
        }
        let outcome = evaluate(rule.into(), &h.instance, &h.tiebreak).map_err(fail(PbStatus::RuleError))?;
        let buf = std::slice::from_raw_parts_mut(funded, m);
        buf.fill(0);
        for &p in &outcome.funded {
            buf[p] = 1;
        }
        Ok(())
    })
}

/// Solves a unit-weight control query with at most `bound` controlled
/// projects. For addition, `spoilers` lists `num_spoilers` project indices.
/// When `witness` is non-null it receives a 0/1 mask of length `len`.
///
/// # Safety
/// `spoilers` must point to `num_spoilers` indices (or be null when zero),
/// `witness` to `len` writable bytes (or be null), `out` must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn pb_control(
    instance: *const PbInstance,
    rule: PbRule,
    goal: PbGoal,
    operation: PbOperation,
    project: usize,
    bound: u64,
    spoilers: *const usize,
    num_spoilers: usize,
    witness: *mut u8,
    len: usize,
    out: *mut PbControlResult,
) -> PbStatus {
    guard(|| {
        let h = handle(instance)?;
        project_arg(h, project)?;
        let out = out.as_mut().ok_or_else(null_out)?;
        let goal = match goal {
            PbGoal::Constructive => Goal::Constructive,
            PbGoal::Destructive => Goal::Destructive,
        };
        let operation = match operation {
            PbOperation::Delete => Operation::Delete,
            PbOperation::Add => Operation::Add,
        };
        let spoilers = match num_spoilers {
            0 => Vec::new(),
            _ if spoilers.is_null() => return Err((PbStatus::NullPointer, "spoilers is null".into())),
            n => std::slice::from_raw_parts(spoilers, n).to_vec(),
        };
        let m = h.instance.num_projects();
        if !witness.is_null() && len < m {
            return Err((PbStatus::BufferTooSmall, format!("need {m} entries, got {len}")));
        }
        let query = ControlQuery::new(rule.into(), goal, operation, project, bound).with_spoilers(spoilers);
        let answer = solve(&query, &h.instance, &h.tiebreak, SearchOptions::sequential())
            .map_err(fail(PbStatus::ControlError))?;
        *out = PbControlResult {
            feasible: answer.feasible,
            complete: answer.complete,
            weight: answer.weight.unwrap_or(0),
        };
        if !witness.is_null() {
            let buf = std::slice::from_raw_parts_mut(witness, m);
            buf.fill(0);
            for &p in answer.witness.iter().flatten() {
                buf[p] = 1;
            }
        }
        Ok(())
    })
}

/// Exact probability that `project` wins after deleting `r` uniformly
/// random other projects, as a `num/den` string in `*out`.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pb_win_probability(
    instance: *const PbInstance,
    rule: PbRule,
    project: usize,
    r: usize,
    out: *mut *mut c_char,
) -> PbStatus {
    guard(|| {
        let h = handle(instance)?;
        project_arg(h, project)?;
        let out = out.as_mut().ok_or_else(null_out)?;
        let p = win_probability(&h.instance, rule.into(), project, &h.tiebreak, r, SearchOptions::sequential())
            .map_err(fail(PbStatus::MeasureError))?;
        *out = CString::new(format_exact(&p)).expect("digits only").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
