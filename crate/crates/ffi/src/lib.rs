//! C ABI for `escqkd`.
//!
//! Objects are opaque handles created by `*_new`/constructor functions and
//! released with the matching `*_free`. Every fallible function returns an
//! [`EscqkdStatus`] and writes results through out-pointers, which are left
//! untouched on failure. After a non-OK status, [`escqkd_last_error`] returns
//! a message for the calling thread. Panics never cross the boundary; they
//! are reported as `ESCQKD_STATUS_PANIC`.
//!
//! Protocols, attacks and bounds are passed as `uint32_t` codes (see the
//! `ESCQKD_PROTOCOL_*`, `ESCQKD_ATTACK_*` and `ESCQKD_BOUND_*` constants) so
//! that an out-of-range value is an error rather than undefined behavior.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use escqkd::attacks::{
    average_clone_fidelity, bb84_reference_cloner, optimize_cloner, paper_trine_cloner, AnnealConfig, AttackKind,
    AttackSpec, CloneUnitary,
};
use escqkd::frames::{frame_potential, Frame, StateVector};
use escqkd::info::{key_rate_bounds, observed_error_rate, JointDistribution};
use escqkd::rates::{tolerable_error, Bound, Scenario, THRESHOLD_TOL};
use escqkd::{Error, Protocol};
use num_complex::Complex64;

pub const ESCQKD_PROTOCOL_TRINE: u32 = 0;
pub const ESCQKD_PROTOCOL_BB84: u32 = 1;

pub const ESCQKD_ATTACK_INTERCEPT_RESEND: u32 = 0;
pub const ESCQKD_ATTACK_CLONE: u32 = 1;

pub const ESCQKD_BOUND_LOWER: u32 = 0;
pub const ESCQKD_BOUND_UPPER: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscqkdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A physical validity check failed (normalization, tightness, unitarity).
    CheckFailed = 3,
    NoZeroCrossing = 4,
    BoundNotPositive = 5,
    Panic = 6,
}

/// Opaque frame handle.
pub struct EscqkdFrame(Frame);

/// Opaque joint distribution p(a, b, e) handle.
pub struct EscqkdJoint(JointDistribution);

/// Opaque cloning unitary handle.
pub struct EscqkdCloner(CloneUnitary);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscqkdRateBounds {
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    pub i_ab_given_e: f64,
    pub lower: f64,
    pub upper: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscqkdAnnealConfig {
    pub seed: u64,
    pub steps: usize,
    pub restarts: usize,
    pub temp_initial: f64,
    pub cooling: f64,
    pub step_scale: f64,
    pub penalty_weight: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscqkdThreshold {
    pub q: f64,
    pub error_rate: f64,
}

impl From<AnnealConfig> for EscqkdAnnealConfig {
    fn from(c: AnnealConfig) -> Self {
        Self {
            seed: c.seed,
            steps: c.steps,
            restarts: c.restarts,
            temp_initial: c.temp_initial,
            cooling: c.cooling,
            step_scale: c.step_scale,
            penalty_weight: c.penalty_weight,
        }
    }
}

impl From<EscqkdAnnealConfig> for AnnealConfig {
    fn from(c: EscqkdAnnealConfig) -> Self {
        Self {
            seed: c.seed,
            steps: c.steps,
            restarts: c.restarts,
            temp_initial: c.temp_initial,
            cooling: c.cooling,
            step_scale: c.step_scale,
            penalty_weight: c.penalty_weight,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(EscqkdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NoZeroCrossing => EscqkdStatus::NoZeroCrossing,
            Error::BoundNotPositive(_) => EscqkdStatus::BoundNotPositive,
            Error::NotNormalized { .. }
            | Error::NotTight { .. }
            | Error::NotPositive { .. }
            | Error::NotComplete { .. }
            | Error::NotUnitary { .. } => EscqkdStatus::CheckFailed,
            _ => EscqkdStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EscqkdStatus::InvalidArgument, msg.into())
}

fn null(name: &str) -> Failure {
    Failure(EscqkdStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EscqkdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EscqkdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            EscqkdStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

fn protocol(code: u32) -> Result<Protocol, Failure> {
    match code {
        ESCQKD_PROTOCOL_TRINE => Ok(Protocol::Trine),
        ESCQKD_PROTOCOL_BB84 => Ok(Protocol::Bb84),
        _ => Err(invalid(format!("unknown protocol code {code}"))),
    }
}

fn attack(code: u32) -> Result<AttackKind, Failure> {
    match code {
        ESCQKD_ATTACK_INTERCEPT_RESEND => Ok(AttackKind::InterceptResend),
        ESCQKD_ATTACK_CLONE => Ok(AttackKind::Clone),
        _ => Err(invalid(format!("unknown attack code {code}"))),
    }
}

fn bound(code: u32) -> Result<Bound, Failure> {
    match code {
        ESCQKD_BOUND_LOWER => Ok(Bound::Lower),
        ESCQKD_BOUND_UPPER => Ok(Bound::Upper),
        _ => Err(invalid(format!("unknown bound code {code}"))),
    }
}

fn reference_cloner(p: Protocol) -> CloneUnitary {
    match p {
        Protocol::Trine => paper_trine_cloner(),
        Protocol::Bb84 => bb84_reference_cloner(),
    }
}

/// Null-terminated library version. Static storage.
#[no_mangle]
pub extern "C" fn escqkd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last non-OK status on this thread, or null if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn escqkd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds `trine`, `bb84` or `simplex:<d>`.
///
/// # Safety
/// `name` must be a valid null-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_frame_named(name: *const c_char, out: *mut *mut EscqkdFrame) -> EscqkdStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| invalid("name is not UTF-8"))?;
        let frame = escqkd::cli::parse_frame_name(name).map_err(invalid)?;
        write(out, "out", Box::into_raw(Box::new(EscqkdFrame(frame))))
    })
}

/// Builds a frame of `count` states in dimension `dim` from row-major
/// amplitude arrays `re` and `im`, each of length `count * dim`. States must
/// be normalized.
///
/// # Safety
/// `re` and `im` must point to `count * dim` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_frame_new(
    dim: usize,
    count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut EscqkdFrame,
) -> EscqkdStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("amplitudes"));
        }
        let len = dim.checked_mul(count).ok_or_else(|| invalid("size overflow"))?;
        let (re, im) = (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len));
        let mut states = Vec::with_capacity(count);
        for k in 0..count {
            let amps = (k * dim..(k + 1) * dim).map(|i| Complex64::new(re[i], im[i])).collect();
            states.push(StateVector::new(amps)?);
        }
        let frame = Frame::new("custom", states)?;
        write(out, "out", Box::into_raw(Box::new(EscqkdFrame(frame))))
    })
}

/// # Safety
/// `frame` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn escqkd_frame_free(frame: *mut EscqkdFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

/// # Safety
/// `frame` must be a live handle; `len` and `dim` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_frame_shape(
    frame: *const EscqkdFrame,
    len: *mut usize,
    dim: *mut usize,
) -> EscqkdStatus {
    guard(|| {
        let f = &deref(frame, "frame")?.0;
        if len.is_null() || dim.is_null() {
            return Err(null("out"));
        }
        len.write(f.len());
        dim.write(f.dim());
        Ok(())
    })
}

/// Frame potential V_t (sum over all ordered pairs, diagonal included).
///
/// # Safety
/// `frame` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_frame_potential(frame: *const EscqkdFrame, t: u32, out: *mut f64) -> EscqkdStatus {
    guard(|| {
        let v = frame_potential(&deref(frame, "frame")?.0, t)?;
        write(out, "out", v)
    })
}

/// Joint distribution of a protocol under an attack at interception
/// fraction `q`. For the cloning attack `cloner` selects the unitary; null
/// uses the protocol's reference cloner. `cloner` is ignored for
/// intercept-resend.
///
/// # Safety
/// `cloner` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_joint_attack(
    protocol_code: u32,
    attack_code: u32,
    q: f64,
    cloner: *const EscqkdCloner,
    out: *mut *mut EscqkdJoint,
) -> EscqkdStatus {
    guard(|| {
        let p = protocol(protocol_code)?;
        let spec = match attack(attack_code)? {
            AttackKind::InterceptResend => AttackSpec::intercept_resend(q)?,
            AttackKind::Clone => {
                let u = cloner.as_ref().map_or_else(|| reference_cloner(p), |c| c.0.clone());
                AttackSpec::clone(q, u)?
            }
        };
        let joint = spec.joint(p)?;
        write(out, "out", Box::into_raw(Box::new(EscqkdJoint(joint))))
    })
}

/// Joint distribution from `na * nb * ne` probabilities indexed
/// `(a * nb + b) * ne + e`.
///
/// # Safety
/// `probs` must point to `na * nb * ne` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_joint_new(
    na: usize,
    nb: usize,
    ne: usize,
    probs: *const f64,
    out: *mut *mut EscqkdJoint,
) -> EscqkdStatus {
    guard(|| {
        if probs.is_null() {
            return Err(null("probs"));
        }
        let len = na
            .checked_mul(nb)
            .and_then(|x| x.checked_mul(ne))
            .ok_or_else(|| invalid("size overflow"))?;
        let joint = JointDistribution::new([na, nb, ne], std::slice::from_raw_parts(probs, len).to_vec())?;
        write(out, "out", Box::into_raw(Box::new(EscqkdJoint(joint))))
    })
}

/// # Safety
/// `joint` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn escqkd_joint_free(joint: *mut EscqkdJoint) {
    if !joint.is_null() {
        drop(Box::from_raw(joint));
    }
}

/// Alphabet sizes of Alice, Bob and Eve.
///
/// # Safety
/// `joint` must be a live handle; `sizes` must point to 3 writable values.
#[no_mangle]
pub unsafe extern "C" fn escqkd_joint_sizes(joint: *const EscqkdJoint, sizes: *mut usize) -> EscqkdStatus {
    guard(|| {
        let s = deref(joint, "joint")?.0.sizes();
        if sizes.is_null() {
            return Err(null("sizes"));
        }
        ptr::copy_nonoverlapping(s.as_ptr(), sizes, 3);
        Ok(())
    })
}

/// # Safety
/// `joint` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_joint_prob(
    joint: *const EscqkdJoint,
    a: usize,
    b: usize,
    e: usize,
    out: *mut f64,
) -> EscqkdStatus {
    guard(|| {
        let j = &deref(joint, "joint")?.0;
        let [na, nb, ne] = j.sizes();
        if a >= na || b >= nb || e >= ne {
            return Err(invalid(format!(
                "index ({a}, {b}, {e}) outside sizes ({na}, {nb}, {ne})"
            )));
        }
        write(out, "out", j.get(a, b, e))
    })
}

/// # Safety
/// `joint` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_joint_bounds(joint: *const EscqkdJoint, out: *mut EscqkdRateBounds) -> EscqkdStatus {
    guard(|| {
        let b = key_rate_bounds(&deref(joint, "joint")?.0);
        write(
            out,
            "out",
            EscqkdRateBounds {
                i_ab: b.i_ab,
                i_ae: b.i_ae,
                i_be: b.i_be,
                i_ab_given_e: b.i_ab_given_e,
                lower: b.lower,
                upper: b.upper,
            },
        )
    })
}

/// Probability that Bob's outcome excludes Alice's signal.
///
/// # Safety
/// `joint` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_joint_error_rate(
    joint: *const EscqkdJoint,
    protocol_code: u32,
    out: *mut f64,
) -> EscqkdStatus {
    guard(|| {
        let j = &deref(joint, "joint")?.0;
        write(out, "out", observed_error_rate(j, protocol(protocol_code)?)?)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_anneal_config_default(out: *mut EscqkdAnnealConfig) -> EscqkdStatus {
    guard(|| write(out, "out", AnnealConfig::default().into()))
}

/// The protocol's reference cloning unitary.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_cloner_reference(protocol_code: u32, out: *mut *mut EscqkdCloner) -> EscqkdStatus {
    guard(|| {
        let u = reference_cloner(protocol(protocol_code)?);
        write(out, "out", Box::into_raw(Box::new(EscqkdCloner(u))))
    })
}

/// Optimizes a symmetric cloner for the protocol's signal states. `config`
/// may be null for defaults; `fidelity` and `penalty` may be null.
///
/// # Safety
/// Non-null pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_cloner_optimize(
    protocol_code: u32,
    config: *const EscqkdAnnealConfig,
    out: *mut *mut EscqkdCloner,
    fidelity: *mut f64,
    penalty: *mut f64,
) -> EscqkdStatus {
    guard(|| {
        let p = protocol(protocol_code)?;
        let config = config.as_ref().map_or_else(AnnealConfig::default, |c| (*c).into());
        if out.is_null() {
            return Err(null("out"));
        }
        let opt = optimize_cloner(&p.signal_frame(), &config)?;
        if !fidelity.is_null() {
            fidelity.write(opt.fidelity);
        }
        if !penalty.is_null() {
            penalty.write(opt.penalty);
        }
        out.write(Box::into_raw(Box::new(EscqkdCloner(opt.unitary))));
        Ok(())
    })
}

/// # Safety
/// `cloner` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn escqkd_cloner_free(cloner: *mut EscqkdCloner) {
    if !cloner.is_null() {
        drop(Box::from_raw(cloner));
    }
}

/// Matrix dimension of the unitary (4 for qubit signal and probe).
///
/// # Safety
/// `cloner` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_cloner_dim(cloner: *const EscqkdCloner, out: *mut usize) -> EscqkdStatus {
    guard(|| write(out, "out", deref(cloner, "cloner")?.0.dim()))
}

/// # Safety
/// `cloner` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_cloner_entry(
    cloner: *const EscqkdCloner,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> EscqkdStatus {
    guard(|| {
        let u = &deref(cloner, "cloner")?.0;
        if row >= u.dim() || col >= u.dim() {
            return Err(invalid(format!("entry ({row}, {col}) outside {0}x{0}", u.dim())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("out"));
        }
        let z = u.matrix()[(row, col)];
        re.write(z.re);
        im.write(z.im);
        Ok(())
    })
}

/// Average clone fidelity of the unitary on the protocol's signal states.
///
/// # Safety
/// `cloner` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_cloner_fidelity(
    cloner: *const EscqkdCloner,
    protocol_code: u32,
    out: *mut f64,
) -> EscqkdStatus {
    guard(|| {
        let u = &deref(cloner, "cloner")?.0;
        let f = average_clone_fidelity(u, &protocol(protocol_code)?.signal_frame())?;
        write(out, "out", f)
    })
}

/// Largest error rate at which the chosen bound is still positive. `cloner`
/// is used only for the cloning attack (null means the reference cloner).
/// Returns `ESCQKD_STATUS_NO_ZERO_CROSSING` when the bound stays positive.
///
/// # Safety
/// `cloner` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn escqkd_tolerable_error(
    protocol_code: u32,
    attack_code: u32,
    bound_code: u32,
    cloner: *const EscqkdCloner,
    out: *mut EscqkdThreshold,
) -> EscqkdStatus {
    guard(|| {
        let p = protocol(protocol_code)?;
        let scenario = match attack(attack_code)? {
            AttackKind::InterceptResend => Scenario::intercept_resend(p),
            AttackKind::Clone => {
                Scenario::clone(p, cloner.as_ref().map_or_else(|| reference_cloner(p), |c| c.0.clone()))
            }
        };
        let t = tolerable_error(&scenario, bound(bound_code)?, THRESHOLD_TOL)?;
        write(
            out,
            "out",
            EscqkdThreshold {
                q: t.q,
                error_rate: t.error_rate,
            },
        )
    })
}
