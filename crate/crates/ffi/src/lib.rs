//! C ABI for the entrank library.
//!
//! States and factorization results are opaque heap handles released with
//! their `*_free` function. Every entry point returns an [`ErStatus`]; on
//! failure [`er_last_error`] describes the most recent error on the calling
//! thread. Particle indices crossing the boundary are 1-based. Panics never
//! unwind into C: they surface as `ER_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use entrank::catalog::{ghz_with_limit, six_qubit_example, werner, WernerSpec};
use entrank::criteria::{
    check_partition_of, default_depth, rank_lattice_of, verdict_from_lattice, DEFAULT_MAX_SUBSETS,
};
use entrank::io::{parse_state_file, DEFAULT_LOAD_TOL};
use entrank::linalg::DEFAULT_MAX_DIM;
use entrank::state::ppt_min_eigenvalue;
use entrank::{
    factorize_pure, Complex64, ComplexMatrix, DensityMatrix, DimVector, Error, ErrorClass, FactorizationResult,
    Partition, PureState, RankTolerance, State, SubsystemSet, VerdictTag,
};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErStatus {
    Ok = 0,
    NullPointer = 1,
    InputError = 2,
    LimitExceeded = 3,
    Internal = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErVerdict {
    Entangled = 0,
    Inconclusive = 1,
    SeparablePureProduct = 2,
}

/// Rank tolerance; a singular value counts when it exceeds max(atol, rtol·σmax).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErTolerance {
    pub rtol: f64,
    pub atol: f64,
}

/// Opaque state handle.
pub struct ErState {
    inner: State,
}

/// Opaque factorization handle.
pub struct ErFactorization {
    inner: FactorizationResult,
}

/// Summary of a rank-lattice analysis.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErAnalysis {
    pub verdict: ErVerdict,
    pub state_rank: usize,
    pub depth: usize,
    pub num_violations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ErStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            ErStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            ErStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            match e.class() {
                ErrorClass::Input => ErStatus::InputError,
                ErrorClass::Limit => ErStatus::LimitExceeded,
                ErrorClass::Internal => ErStatus::Internal,
            }
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            ErStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::Parse(format!("{what} is not valid UTF-8"))))
}

fn tolerance(tol: ErTolerance) -> Result<RankTolerance, Failure> {
    Ok(RankTolerance::new(tol.rtol, tol.atol)?)
}

fn complex_entries(re: &[f64], im: &[f64]) -> Result<Vec<Complex64>, Failure> {
    if re.len() != im.len() {
        return Err(Error::Shape("real and imaginary parts differ in length".into()).into());
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

fn store(out: &mut *mut ErState, state: State) {
    *out = Box::into_raw(Box::new(ErState { inner: state }));
}

fn particle_set(indices: &[usize], n: usize) -> Result<SubsystemSet, Failure> {
    Ok(SubsystemSet::from_one_based(indices, n)?)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn er_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn er_tolerance_default() -> ErTolerance {
    let t = RankTolerance::default();
    ErTolerance {
        rtol: t.rtol(),
        atol: t.atol(),
    }
}

/// Loads a JSON state file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn er_state_load(path: *const c_char, out: *mut *mut ErState) -> ErStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let path = c_str(path, "path")?;
        let state = parse_state_file(Path::new(path), DEFAULT_MAX_DIM, DEFAULT_LOAD_TOL)?;
        store(out, state);
        Ok(())
    })
}

/// Pure state from `len` amplitudes (split into real and imaginary arrays)
/// over `num_dims` local dimensions; the norm must be 1 within 1e-9.
///
/// # Safety
/// `dims` must hold `num_dims` values, `re` and `im` must hold `len` values
/// each, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_state_from_amplitudes(
    dims: *const usize,
    num_dims: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut ErState,
) -> ErStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let dims = DimVector::with_limit(slice(dims, num_dims, "dims")?.to_vec(), DEFAULT_MAX_DIM)?;
        let amps = complex_entries(slice(re, len, "re")?, slice(im, len, "im")?)?;
        store(out, State::Pure(PureState::new(dims, amps)?));
        Ok(())
    })
}

/// Density matrix from a row-major D×D matrix, D the product of `dims`.
///
/// # Safety
/// `dims` must hold `num_dims` values, `re` and `im` must hold `len` values
/// each, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_state_from_density(
    dims: *const usize,
    num_dims: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut ErState,
) -> ErStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let dims = DimVector::with_limit(slice(dims, num_dims, "dims")?.to_vec(), DEFAULT_MAX_DIM)?;
        let d = dims.total();
        if len != d * d {
            return Err(Error::DimensionMismatch(format!("dims {dims} need {} entries, got {len}", d * d)).into());
        }
        let entries = complex_entries(slice(re, len, "re")?, slice(im, len, "im")?)?;
        let matrix = ComplexMatrix::new(d, d, entries)?;
        store(out, State::Mixed(DensityMatrix::new(dims, matrix)?));
        Ok(())
    })
}

/// GHZ state of `n` particles of dimension `d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_state_ghz(n: usize, d: usize, out: *mut *mut ErState) -> ErStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        store(out, State::Pure(ghz_with_limit(n, d, DEFAULT_MAX_DIM)?));
        Ok(())
    })
}

/// The six-qubit state (|000000⟩ + |000111⟩ + |011000⟩ + |011111⟩)/2.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_state_six_qubit_example(out: *mut *mut ErState) -> ErStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        store(out, State::Pure(six_qubit_example()));
        Ok(())
    })
}

/// Two-qubit Werner state p|Φ⁺⟩⟨Φ⁺| + (1 − p) I/4.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_state_werner(p: f64, out: *mut *mut ErState) -> ErStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        store(out, State::Mixed(werner(WernerSpec::new(p)?)));
        Ok(())
    })
}

/// Releases a state; null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn er_state_free(state: *mut ErState) {
    if !state.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(state))));
    }
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn er_state_num_particles(state: *const ErState, out: *mut usize) -> ErStatus {
    guard(|| {
        let s = deref(state, "state")?;
        *out_ref(out, "out")? = s.inner.num_particles();
        Ok(())
    })
}

/// Rank lattice up to `depth` (0 selects ⌊N/2⌋) and the resulting verdict.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn er_analyze(
    state: *const ErState,
    depth: usize,
    tol: ErTolerance,
    out: *mut ErAnalysis,
) -> ErStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let out = out_ref(out, "out")?;
        let tol = tolerance(tol)?;
        let depth = if depth == 0 {
            default_depth(s.inner.num_particles())
        } else {
            depth
        };
        let lattice = rank_lattice_of(&s.inner.spectral_factor(tol), depth, tol, DEFAULT_MAX_SUBSETS)?;
        let verdict = verdict_from_lattice(&lattice);
        *out = ErAnalysis {
            verdict: verdict_of(verdict.tag),
            state_rank: lattice.state_rank,
            depth,
            num_violations: verdict.witnesses.len(),
        };
        Ok(())
    })
}

fn verdict_of(tag: VerdictTag) -> ErVerdict {
    match tag {
        VerdictTag::Entangled => ErVerdict::Entangled,
        VerdictTag::Inconclusive => ErVerdict::Inconclusive,
        VerdictTag::SeparablePureProduct => ErVerdict::SeparablePureProduct,
    }
}

/// Rank of the reduced matrix on the `len` 1-based particles in `keep`.
///
/// # Safety
/// `state` must be a live handle, `keep` must hold `len` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_reduced_rank(
    state: *const ErState,
    keep: *const usize,
    len: usize,
    tol: ErTolerance,
    out: *mut usize,
) -> ErStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let out = out_ref(out, "out")?;
        let tol = tolerance(tol)?;
        let keep = particle_set(slice(keep, len, "keep")?, s.inner.num_particles())?;
        *out = s.inner.spectral_factor(tol).reduced_rank(keep.indices(), tol);
        Ok(())
    })
}

/// Smallest eigenvalue of the partial transpose on the 1-based particles in `part`.
///
/// # Safety
/// `state` must be a live handle, `part` must hold `len` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_ppt_min_eigenvalue(
    state: *const ErState,
    part: *const usize,
    len: usize,
    out: *mut f64,
) -> ErStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let out = out_ref(out, "out")?;
        let part = particle_set(slice(part, len, "part")?, s.inner.num_particles())?;
        *out = ppt_min_eigenvalue(&s.inner.to_density(), &part)?;
        Ok(())
    })
}

/// Pairwise rank checks for a partition expression such as `"1,2|3"`.
///
/// # Safety
/// `state` must be a live handle, `expr` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn er_check_partition(
    state: *const ErState,
    expr: *const c_char,
    tol: ErTolerance,
    out: *mut ErVerdict,
) -> ErStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let out = out_ref(out, "out")?;
        let tol = tolerance(tol)?;
        let partition = Partition::parse(c_str(expr, "expr")?, s.inner.num_particles())?;
        let report = check_partition_of(&s.inner.spectral_factor(tol), &partition, tol)?;
        *out = verdict_of(report.overall);
        Ok(())
    })
}

/// Finest tensor-product partition of a pure (or rank-1) state.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn er_factorize(
    state: *const ErState,
    tol: ErTolerance,
    out: *mut *mut ErFactorization,
) -> ErStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let tol = tolerance(tol)?;
        let psi = s.inner.to_pure(tol)?;
        let result = factorize_pure(&psi, tol)?;
        *out = Box::into_raw(Box::new(ErFactorization { inner: result }));
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn er_factorization_num_parts(f: *const ErFactorization, out: *mut usize) -> ErStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(f, "factorization")?.inner.partition.len();
        Ok(())
    })
}

/// Copies part `index` (0-based) as 1-based particle indices into `buf`.
///
/// `out_len` receives the part size; when `cap` is too small nothing is
/// copied and the call fails with `ER_STATUS_INPUT_ERROR`.
///
/// # Safety
/// `f` must be a live handle, `buf` must hold `cap` values and `out_len`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn er_factorization_part(
    f: *const ErFactorization,
    index: usize,
    buf: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> ErStatus {
    guard(|| {
        let f = deref(f, "factorization")?;
        let out_len = out_ref(out_len, "out_len")?;
        let parts = &f.inner.partition;
        let part = parts.get(index).ok_or_else(|| {
            Failure::Lib(Error::InvalidValue(format!(
                "part {index} out of range for {} parts",
                parts.len()
            )))
        })?;
        let indices = part.one_based();
        *out_len = indices.len();
        if cap < indices.len() {
            return Err(Error::InvalidValue(format!("buffer holds {cap}, part needs {}", indices.len())).into());
        }
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        ptr::copy_nonoverlapping(indices.as_ptr(), buf, indices.len());
        Ok(())
    })
}

/// Reconstruction residual of the factorization.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn er_factorization_residual(f: *const ErFactorization, out: *mut f64) -> ErStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(f, "factorization")?.inner.residual;
        Ok(())
    })
}

/// Whether part `index` has more than one particle and is fully entangled.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn er_factorization_part_fully_entangled(
    f: *const ErFactorization,
    index: usize,
    out: *mut bool,
) -> ErStatus {
    guard(|| {
        let f = deref(f, "factorization")?;
        let out = out_ref(out, "out")?;
        let part = f
            .inner
            .partition
            .get(index)
            .ok_or_else(|| Failure::Lib(Error::InvalidValue(format!("part {index} out of range"))))?;
        *out = f.inner.fully_entangled_parts.contains(part);
        Ok(())
    })
}

/// Releases a factorization; null is ignored.
///
/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn er_factorization_free(f: *mut ErFactorization) {
    if !f.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(f))));
    }
}
