//! C ABI over the `burden` estimators.
//!
//! Trials are passed around as opaque `BurdenTrial` handles. Every fallible
//! call returns a `BurdenStatus`; on failure `burden_last_error` describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use burden::auc::auc_contrast;
use burden::cox::{fit_cox_hr_with, to_composite, Ties};
use burden::data::{project_endpoints, Arm, ArmDataset, StateSpace, SubjectRecord};
use burden::inference::Wald;
use burden::rmtif::{rmtif_infer, BootstrapConfig, CiMethod};
use burden::{ingest_csv, Error, TrialData};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurdenStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Io = 4,
    Estimation = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque two-arm trial.
pub struct BurdenTrial {
    data: TrialData,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BurdenWald {
    pub estimate: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub p_value: f64,
}

impl From<&Wald> for BurdenWald {
    fn from(w: &Wald) -> Self {
        Self {
            estimate: w.estimate,
            se: w.se,
            lower: w.lower,
            upper: w.upper,
            p_value: w.p_value,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BurdenAucResult {
    pub auc_treated: f64,
    pub se_treated: f64,
    pub auc_control: f64,
    pub se_control: f64,
    /// Treated minus control.
    pub difference: BurdenWald,
    /// Zero when either arm's AUC is not positive; the ratio fields are then NaN.
    pub ratio_available: u8,
    pub ratio: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    pub ratio_p_value: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BurdenCoxResult {
    pub beta: f64,
    pub se: f64,
    pub hazard_ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub p_value: f64,
    pub iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BurdenStatus {
    match err {
        Error::Validation { .. }
        | Error::RowValidation { .. }
        | Error::Parse { .. }
        | Error::HeaderMismatch(_)
        | Error::StateSpace(_)
        | Error::ArmMismatch(_)
        | Error::EmptyDataset => BurdenStatus::Validation,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => BurdenStatus::Io,
        Error::NonPositiveHorizon(_)
        | Error::InvalidAlpha(_)
        | Error::TooFewReplicates { .. }
        | Error::DeathExcluded
        | Error::InvalidSubset(_)
        | Error::Config(_) => BurdenStatus::InvalidArgument,
        _ => BurdenStatus::Estimation,
    }
}

/// Runs `f`, recording any error or panic message for `burden_last_error`.
fn guard(f: impl FnOnce() -> Result<(), (BurdenStatus, String)>) -> BurdenStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BurdenStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            BurdenStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (BurdenStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BurdenStatus, String) {
    (BurdenStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (BurdenStatus, String) {
    (BurdenStatus::InvalidArgument, msg.into())
}

unsafe fn trial_ref<'a>(trial: *const BurdenTrial) -> Result<&'a BurdenTrial, (BurdenStatus, String)> {
    trial.as_ref().ok_or_else(|| null("trial"))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn burden_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn burden_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a trial from a canonical wide CSV file.
///
/// # Safety
/// `path` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn burden_trial_from_csv(path: *const c_char, out: *mut *mut BurdenTrial) -> BurdenStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not UTF-8"))?;
        let data = ingest_csv(path).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BurdenTrial { data }));
        Ok(())
    })
}

/// Builds a trial from row-major arrays: `times` and `events` hold
/// `n_subjects * n_transitions` values, `arms` holds one `0`/`1` code per
/// subject. `labels` may be null (generic names) or point to
/// `n_transitions` strings in severity order with death last.
///
/// # Safety
/// Every non-null pointer must reference at least the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn burden_trial_from_arrays(
    n_subjects: usize,
    n_transitions: usize,
    arms: *const u8,
    times: *const f64,
    events: *const u8,
    labels: *const *const c_char,
    out: *mut *mut BurdenTrial,
) -> BurdenStatus {
    guard(|| {
        if arms.is_null() || times.is_null() || events.is_null() {
            return Err(null("input array"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if n_transitions == 0 {
            return Err(invalid("n_transitions must be at least 1"));
        }
        let space = if labels.is_null() {
            StateSpace::generic(n_transitions - 1)
        } else {
            let names = std::slice::from_raw_parts(labels, n_transitions)
                .iter()
                .map(|&p| {
                    if p.is_null() {
                        return Err(null("label"));
                    }
                    CStr::from_ptr(p)
                        .to_str()
                        .map(str::to_owned)
                        .map_err(|_| invalid("label is not UTF-8"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            StateSpace::new(names).map_err(lib_err)?
        };
        let total = n_subjects.checked_mul(n_transitions).ok_or_else(|| invalid("size overflow"))?;
        let arms = std::slice::from_raw_parts(arms, n_subjects);
        let times = std::slice::from_raw_parts(times, total);
        let events = std::slice::from_raw_parts(events, total);
        let mut treated = Vec::new();
        let mut control = Vec::new();
        for (i, &code) in arms.iter().enumerate() {
            let arm = Arm::from_code(code).ok_or_else(|| invalid(format!("subject {i}: arm code {code}")))?;
            let row = i * n_transitions..(i + 1) * n_transitions;
            let ev = events[row.clone()].iter().map(|&d| d != 0).collect();
            let rec = SubjectRecord::new(format!("{}", i + 1), arm, times[row].to_vec(), ev);
            match arm {
                Arm::Treatment => treated.push(rec),
                Arm::Control => control.push(rec),
            }
        }
        let data = TrialData {
            treated: ArmDataset::new(Arm::Treatment, space.clone(), treated).map_err(lib_err)?,
            control: ArmDataset::new(Arm::Control, space, control).map_err(lib_err)?,
        };
        *out = Box::into_raw(Box::new(BurdenTrial { data }));
        Ok(())
    })
}

/// Releases a trial handle. Null is ignored.
///
/// # Safety
/// `trial` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn burden_trial_free(trial: *mut BurdenTrial) {
    if !trial.is_null() {
        drop(Box::from_raw(trial));
    }
}

/// Subject counts and number of transitions (`K + 1`).
///
/// # Safety
/// `trial` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn burden_trial_shape(
    trial: *const BurdenTrial,
    n_treated: *mut usize,
    n_control: *mut usize,
    n_transitions: *mut usize,
) -> BurdenStatus {
    guard(|| {
        let t = trial_ref(trial)?;
        if n_treated.is_null() || n_control.is_null() || n_transitions.is_null() {
            return Err(null("output"));
        }
        *n_treated = t.data.treated.len();
        *n_control = t.data.control.len();
        *n_transitions = t.data.treated.n_transitions();
        Ok(())
    })
}

/// New handle keeping only the transitions at the given 0-based indices
/// (strictly increasing, death last).
///
/// # Safety
/// `keep` must reference `n_keep` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn burden_trial_project(
    trial: *const BurdenTrial,
    keep: *const usize,
    n_keep: usize,
    out: *mut *mut BurdenTrial,
) -> BurdenStatus {
    guard(|| {
        let t = trial_ref(trial)?;
        if keep.is_null() {
            return Err(null("keep"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let keep = std::slice::from_raw_parts(keep, n_keep);
        let data = TrialData {
            treated: project_endpoints(&t.data.treated, keep).map_err(lib_err)?,
            control: project_endpoints(&t.data.control, keep).map_err(lib_err)?,
        };
        *out = Box::into_raw(Box::new(BurdenTrial { data }));
        Ok(())
    })
}

/// AUC of the mean cumulative score curve per arm, with difference and ratio.
///
/// # Safety
/// `trial` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn burden_auc_contrast(
    trial: *const BurdenTrial,
    tau: f64,
    alpha: f64,
    out: *mut BurdenAucResult,
) -> BurdenStatus {
    guard(|| {
        let t = trial_ref(trial)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = auc_contrast(&t.data.treated, &t.data.control, tau, alpha).map_err(lib_err)?;
        let ratio = c.ratio.as_ref();
        *out = BurdenAucResult {
            auc_treated: c.treated.auc,
            se_treated: c.treated.se,
            auc_control: c.control.auc,
            se_control: c.control.se,
            difference: (&c.difference).into(),
            ratio_available: ratio.is_some() as u8,
            ratio: ratio.map_or(f64::NAN, |r| r.ratio),
            ratio_lower: ratio.map_or(f64::NAN, |r| r.lower),
            ratio_upper: ratio.map_or(f64::NAN, |r| r.upper),
            ratio_p_value: ratio.map_or(f64::NAN, |r| r.p_value),
        };
        Ok(())
    })
}

/// Restricted mean time in favor of treatment with bootstrap inference.
/// `stages` receives one entry per transition and must hold at least
/// `K + 1` elements; it may be null when `stages_len` is 0.
///
/// # Safety
/// `trial` must be a live handle; `overall` valid; `stages` must reference
/// `stages_len` elements.
#[no_mangle]
pub unsafe extern "C" fn burden_rmtif(
    trial: *const BurdenTrial,
    tau: f64,
    alpha: f64,
    replicates: usize,
    seed: u64,
    overall: *mut BurdenWald,
    stages: *mut BurdenWald,
    stages_len: usize,
) -> BurdenStatus {
    guard(|| {
        let t = trial_ref(trial)?;
        if overall.is_null() {
            return Err(null("overall"));
        }
        let m = t.data.treated.n_transitions();
        if stages_len > 0 && stages.is_null() {
            return Err(null("stages"));
        }
        if stages_len > 0 && stages_len < m {
            return Err((
                BurdenStatus::BufferTooSmall,
                format!("stages buffer holds {stages_len}, need {m}"),
            ));
        }
        let boot = BootstrapConfig {
            replicates,
            seed,
            ci: CiMethod::Normal,
        };
        let r = rmtif_infer(&t.data.treated, &t.data.control, tau, boot, alpha).map_err(lib_err)?;
        *overall = (&r.overall).into();
        if stages_len > 0 {
            let dst = std::slice::from_raw_parts_mut(stages, m);
            for (d, s) in dst.iter_mut().zip(&r.stages) {
                *d = s.into();
            }
        }
        Ok(())
    })
}

/// Cox hazard ratio for time to the first event of any kind. `efron` selects
/// Efron ties when nonzero, Breslow otherwise.
///
/// # Safety
/// `trial` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn burden_cox_hr(
    trial: *const BurdenTrial,
    alpha: f64,
    efron: u8,
    out: *mut BurdenCoxResult,
) -> BurdenStatus {
    guard(|| {
        let t = trial_ref(trial)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ties = if efron != 0 { Ties::Efron } else { Ties::Breslow };
        let fit = fit_cox_hr_with(&to_composite(&t.data.treated, &t.data.control), alpha, ties).map_err(lib_err)?;
        *out = BurdenCoxResult {
            beta: fit.beta,
            se: fit.se,
            hazard_ratio: fit.hazard_ratio,
            lower: fit.lower,
            upper: fit.upper,
            p_value: fit.p_value,
            iterations: fit.iterations,
        };
        Ok(())
    })
}
