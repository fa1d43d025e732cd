//! C interface to the specreduce library.
//!
//! Objects are opaque heap handles released with the matching `*_free`.
//! Every fallible call returns an [`SrStatus`]; on failure a message is kept
//! per thread and can be copied out with [`sr_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specreduce::basis::{apply_basis_transform, exhaustive_reduce, greedy_reduce, random_reduce, BasisMask, ReductionResult};
use specreduce::programs::{parse_circuit, serialize_circuit, simulate, Circuit};
use specreduce::statevector::Statevector;
use specreduce::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    OutOfRange = 4,
    TooManyQubits = 5,
    Io = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Parsed circuit.
pub struct SrCircuit(Circuit);

/// Simulated or user supplied state.
pub struct SrStatevector(Statevector);

/// Outcome of a basis search.
pub struct SrReduction(ReductionResult);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(e: &Error) -> SrStatus {
    match e {
        Error::CircuitParse { .. } | Error::MaskParse { .. } => SrStatus::Parse,
        Error::IndexOutOfRange { .. } | Error::QubitOutOfRange { .. } | Error::DimensionMismatch { .. } => {
            SrStatus::OutOfRange
        }
        Error::TooManyQubits { .. } => SrStatus::TooManyQubits,
        Error::Io(_) | Error::Csv(_) => SrStatus::Io,
        _ => SrStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SrStatus, String)>) -> SrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SrStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SrStatus::Internal
        }
    }
}

fn lib(e: Error) -> (SrStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (SrStatus, String) {
    (SrStatus::NullPointer, format!("{name} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, (SrStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (SrStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (SrStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SrStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// Copies `text` plus a terminating NUL into `buf` when it fits. The needed
/// size including the NUL is stored in `needed` when that is non-null.
unsafe fn copy_out(text: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), (SrStatus, String)> {
    let size = text.len() + 1;
    if !needed.is_null() {
        *needed = size;
    }
    if buf.is_null() || len < size {
        return Err((SrStatus::BufferTooSmall, format!("need {size} bytes")));
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message into `buf`.
///
/// # Safety
/// `buf` must be writable for `len` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn sr_last_error_message(buf: *mut c_char, len: usize, needed: *mut usize) -> SrStatus {
    let message = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_out(&message, buf, len, needed) {
        Ok(()) => SrStatus::Ok,
        Err((status, _)) => status,
    }
}

/// Parses circuit text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_circuit_parse(text: *const c_char, out: *mut *mut SrCircuit) -> SrStatus {
    guard(|| {
        let circuit = parse_circuit(c_str(text, "text")?).map_err(lib)?;
        put(out, SrCircuit(circuit))
    })
}

/// # Safety
/// `circuit` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sr_circuit_free(circuit: *mut SrCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_circuit_num_qubits(circuit: *const SrCircuit, out: *mut usize) -> SrStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        *out.as_mut().ok_or_else(|| null("out"))? = c.0.num_qubits();
        Ok(())
    })
}

/// Writes the circuit in text form.
///
/// # Safety
/// `circuit` must be a live handle; `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sr_circuit_serialize(
    circuit: *const SrCircuit,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> SrStatus {
    guard(|| copy_out(&serialize_circuit(&borrow(circuit, "circuit")?.0), buf, len, needed))
}

/// Runs the circuit on its input basis state.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_simulate(circuit: *const SrCircuit, out: *mut *mut SrStatevector) -> SrStatus {
    guard(|| {
        let state = simulate(&borrow(circuit, "circuit")?.0).map_err(lib)?;
        put(out, SrStatevector(state))
    })
}

/// Builds a state from `len` real amplitudes, normalizing them.
///
/// # Safety
/// `values` must be readable for `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_statevector_from_real(
    values: *const f64,
    len: usize,
    out: *mut *mut SrStatevector,
) -> SrStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let values = std::slice::from_raw_parts(values, len);
        put(out, SrStatevector(Statevector::from_real_unnormalized(values).map_err(lib)?))
    })
}

/// # Safety
/// `state` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sr_statevector_free(state: *mut SrStatevector) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_statevector_num_qubits(state: *const SrStatevector, out: *mut usize) -> SrStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        *out.as_mut().ok_or_else(|| null("out"))? = s.0.num_qubits();
        Ok(())
    })
}

/// Number of amplitudes with magnitude above `eps`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_statevector_rank(state: *const SrStatevector, eps: f64, out: *mut usize) -> SrStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        if eps.is_nan() || eps < 0.0 {
            return Err((SrStatus::InvalidArgument, "eps must be nonnegative".into()));
        }
        *out.as_mut().ok_or_else(|| null("out"))? = s.0.rank(eps);
        Ok(())
    })
}

/// Copies the amplitudes into `re` and `im`, each of length `2^n`.
///
/// # Safety
/// `re` and `im` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sr_statevector_amplitudes(
    state: *const SrStatevector,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SrStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let amps = s.0.amplitudes();
        if len < amps.len() {
            return Err((SrStatus::BufferTooSmall, format!("need {} amplitudes", amps.len())));
        }
        for (i, a) in amps.iter().enumerate() {
            *re.add(i) = a.re;
            *im.add(i) = a.im;
        }
        Ok(())
    })
}

/// Applies Hadamards on the qubits marked `h` in `mask` (e.g. `"1h1"`).
///
/// # Safety
/// `state` must be a live handle, `mask` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_apply_mask(
    state: *const SrStatevector,
    mask: *const c_char,
    out: *mut *mut SrStatevector,
) -> SrStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        let mask = BasisMask::parse(c_str(mask, "mask")?).map_err(lib)?;
        put(out, SrStatevector(apply_basis_transform(&s.0, &mask).map_err(lib)?))
    })
}

/// Greedy basis search.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_reduce_greedy(state: *const SrStatevector, seed: u64, out: *mut *mut SrReduction) -> SrStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        put(out, SrReduction(greedy_reduce(&s.0, &mut ChaCha8Rng::seed_from_u64(seed))))
    })
}

/// Random basis search with `budget` distinct masks.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_reduce_random(
    state: *const SrStatevector,
    budget: usize,
    seed: u64,
    out: *mut *mut SrReduction,
) -> SrStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        let r = random_reduce(&s.0, budget, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(lib)?;
        put(out, SrReduction(r))
    })
}

/// Exhaustive basis search.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_reduce_exhaustive(state: *const SrStatevector, out: *mut *mut SrReduction) -> SrStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        put(out, SrReduction(exhaustive_reduce(&s.0).map_err(lib)?))
    })
}

/// # Safety
/// `reduction` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sr_reduction_free(reduction: *mut SrReduction) {
    if !reduction.is_null() {
        drop(Box::from_raw(reduction));
    }
}

/// Default and reduced ranks plus the search's objective calls.
///
/// # Safety
/// `reduction` must be a live handle; outputs may be null to skip them.
#[no_mangle]
pub unsafe extern "C" fn sr_reduction_summary(
    reduction: *const SrReduction,
    default_rank: *mut usize,
    reduced_rank: *mut usize,
    objective_calls: *mut usize,
) -> SrStatus {
    guard(|| {
        let r = &borrow(reduction, "reduction")?.0;
        for (p, v) in [
            (default_rank, r.default_rank),
            (reduced_rank, r.reduced_rank),
            (objective_calls, r.objective_calls),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Writes the found mask in `1`/`h` shorthand.
///
/// # Safety
/// `reduction` must be a live handle; `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sr_reduction_mask(
    reduction: *const SrReduction,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> SrStatus {
    guard(|| copy_out(&borrow(reduction, "reduction")?.0.mask.to_string(), buf, len, needed))
}
