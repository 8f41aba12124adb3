//! C ABI for nilharm.
//!
//! Objects are exposed as opaque handles created by `nh_*_new`-style
//! constructors and released with the matching `nh_*_free`. Every fallible
//! call returns an [`NhStatus`]; on failure the message is available from
//! [`nh_last_error_message`] on the same thread. Arrays are passed as pointer
//! plus length and lengths are checked against the algebra dimensions.
//! Matrices are written column-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nilharm::eigenchain::Eigenfunction;
use nilharm::hermite::{hermite_eval, special_hermite_diag};
use nilharm::invariant_ops::PointEvaluator;
use nilharm::symplectic::{self, DEFAULT_NONDEGENERACY_TOL};
use nilharm::{CentralFunctional, GroupElement, MultiIndex, NilError, SymplecticFrame, TwoStepAlgebra};
use num_complex::Complex64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    Nondegeneracy = 3,
    Truncation = 4,
    InvalidInput = 5,
    Parse = 6,
    Io = 7,
    Panic = 8,
}

/// A two-step nilpotent Lie algebra.
pub struct NhAlgebra(TwoStepAlgebra);

/// An orthonormal frame adapted to a nondegenerate central functional.
pub struct NhFrame(SymplecticFrame);

/// The eigenfunction of the sublaplacian for one `(λ, α)`.
pub struct NhEigenfunction(Eigenfunction);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &NilError) -> NhStatus {
    match e {
        NilError::DimensionMismatch { .. } => NhStatus::DimensionMismatch,
        NilError::Nondegeneracy { .. } => NhStatus::Nondegeneracy,
        NilError::Truncation { .. } => NhStatus::Truncation,
        NilError::InvalidInput(_) => NhStatus::InvalidInput,
        NilError::Parse { .. } => NhStatus::Parse,
        NilError::Io(_) => NhStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Nil(NilError),
}

impl From<NilError> for Fail {
    fn from(e: NilError) -> Self {
        Fail::Nil(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NhStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            NhStatus::NullPointer
        }
        Ok(Err(Fail::Nil(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            NhStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Nil(NilError::InvalidInput(format!("{what} is not UTF-8"))))
}

fn expect_len(what: &'static str, expected: usize, got: usize) -> Result<(), Fail> {
    if expected != got {
        return Err(Fail::Nil(NilError::DimensionMismatch { what, expected, got }));
    }
    Ok(())
}

fn resolve_tol(tol: f64) -> f64 {
    if tol > 0.0 {
        tol
    } else {
        DEFAULT_NONDEGENERACY_TOL
    }
}

unsafe fn store<T>(handle: T, dst: *mut *mut T) -> Result<(), Fail> {
    *out(dst, "out")? = Box::into_raw(Box::new(handle));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nh_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Heisenberg algebra with `2n` horizontal and one central dimension.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_heisenberg(n: usize, result: *mut *mut NhAlgebra) -> NhStatus {
    guard(|| store(NhAlgebra(TwoStepAlgebra::heisenberg(n)?), result))
}

/// Free two-step algebra on `m` generators.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_free_two_step(m: usize, result: *mut *mut NhAlgebra) -> NhStatus {
    guard(|| store(NhAlgebra(TwoStepAlgebra::free_two_step(m)?), result))
}

/// Builtin algebra by name: `heisenberg-<n>` or `free2step-<m>`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_builtin(name: *const c_char, result: *mut *mut NhAlgebra) -> NhStatus {
    guard(|| store(NhAlgebra(TwoStepAlgebra::builtin(text(name, "name")?)?), result))
}

/// Algebra from definition text.
///
/// # Safety
/// `definition` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_parse(definition: *const c_char, result: *mut *mut NhAlgebra) -> NhStatus {
    guard(|| {
        let a = TwoStepAlgebra::parse_definition(text(definition, "definition")?)?;
        store(NhAlgebra(a), result)
    })
}

/// Algebra from a definition file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_from_file(path: *const c_char, result: *mut *mut NhAlgebra) -> NhStatus {
    guard(|| {
        let a = TwoStepAlgebra::load_definition(Path::new(text(path, "path")?))?;
        store(NhAlgebra(a), result)
    })
}

/// # Safety
/// `a` must be null or a handle from an `nh_algebra_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_free(a: *mut NhAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Horizontal dimension `m` and central dimension `k`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_dims(a: *const NhAlgebra, m: *mut usize, k: *mut usize) -> NhStatus {
    guard(|| {
        let a = &obj(a, "algebra")?.0;
        *out(m, "m")? = a.m();
        *out(k, "k")? = a.k();
        Ok(())
    })
}

/// Bracket of two horizontal vectors (length `m`) into `result` (length `k`).
///
/// # Safety
/// Each array must hold the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_bracket(
    a: *const NhAlgebra,
    v: *const f64,
    v_len: usize,
    w: *const f64,
    w_len: usize,
    result: *mut f64,
    result_len: usize,
) -> NhStatus {
    guard(|| {
        let a = &obj(a, "algebra")?.0;
        expect_len("bracket output", a.k(), result_len)?;
        let b = a.bracket(slice(v, v_len, "v")?, slice(w, w_len, "w")?)?;
        slice_mut(result, result_len, "result")?.copy_from_slice(&b);
        Ok(())
    })
}

/// Group product `g·h`, each element given as horizontal part (length `m`)
/// and central part (length `k`).
///
/// # Safety
/// Input arrays must hold `m` and `k` elements as named; outputs likewise.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_multiply(
    a: *const NhAlgebra,
    g_v: *const f64,
    g_z: *const f64,
    h_v: *const f64,
    h_z: *const f64,
    out_v: *mut f64,
    out_z: *mut f64,
) -> NhStatus {
    guard(|| {
        let a = &obj(a, "algebra")?.0;
        let (m, k) = (a.m(), a.k());
        let g = GroupElement::new(slice(g_v, m, "g_v")?.to_vec(), slice(g_z, k, "g_z")?.to_vec());
        let h = GroupElement::new(slice(h_v, m, "h_v")?.to_vec(), slice(h_z, k, "h_z")?.to_vec());
        let p = a.multiply(&g, &h)?;
        slice_mut(out_v, m, "out_v")?.copy_from_slice(&p.v);
        slice_mut(out_z, k, "out_z")?.copy_from_slice(&p.z);
        Ok(())
    })
}

/// Group inverse.
///
/// # Safety
/// Arrays must hold `m` and `k` elements as named.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_inverse(
    a: *const NhAlgebra,
    g_v: *const f64,
    g_z: *const f64,
    out_v: *mut f64,
    out_z: *mut f64,
) -> NhStatus {
    guard(|| {
        let a = &obj(a, "algebra")?.0;
        let (m, k) = (a.m(), a.k());
        let g = GroupElement::new(slice(g_v, m, "g_v")?.to_vec(), slice(g_z, k, "g_z")?.to_vec());
        let inv = a.inverse(&g);
        slice_mut(out_v, m, "out_v")?.copy_from_slice(&inv.v);
        slice_mut(out_z, k, "out_z")?.copy_from_slice(&inv.z);
        Ok(())
    })
}

/// Whether generic central functionals give nondegenerate skew forms,
/// tested on `trials` random functionals.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_algebra_is_mw(
    a: *const NhAlgebra,
    trials: usize,
    seed: u64,
    tol: f64,
    result: *mut bool,
) -> NhStatus {
    guard(|| {
        let a = &obj(a, "algebra")?.0;
        *out(result, "result")? = a.is_mw(trials, seed, tol)?;
        Ok(())
    })
}

/// Frame for the central functional `lambda` (length `k`). A non-positive
/// `tol` selects the default nondegeneracy tolerance.
///
/// # Safety
/// `lambda` must hold `lambda_len` elements and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_frame_new(
    a: *const NhAlgebra,
    lambda: *const f64,
    lambda_len: usize,
    tol: f64,
    result: *mut *mut NhFrame,
) -> NhStatus {
    guard(|| {
        let a = &obj(a, "algebra")?.0;
        let l = CentralFunctional::new(slice(lambda, lambda_len, "lambda")?.to_vec());
        store(NhFrame(symplectic::frame(a, &l, resolve_tol(tol))?), result)
    })
}

/// # Safety
/// `f` must be null or a handle from [`nh_frame_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nh_frame_free(f: *mut NhFrame) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of pairs `n` (so `m = 2n`).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_frame_pairs(f: *const NhFrame, n: *mut usize) -> NhStatus {
    guard(|| {
        *out(n, "n")? = obj(f, "frame")?.0.n();
        Ok(())
    })
}

/// Weights `d_1 ≥ … ≥ d_n` into `result` (length `n`).
///
/// # Safety
/// `result` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn nh_frame_weights(f: *const NhFrame, result: *mut f64, len: usize) -> NhStatus {
    guard(|| {
        let f = &obj(f, "frame")?.0;
        expect_len("weights", f.n(), len)?;
        slice_mut(result, len, "result")?.copy_from_slice(&f.d);
        Ok(())
    })
}

/// Vectors `X_j` (`x_part` true) or `Y_j` as an `m × n` column-major matrix.
///
/// # Safety
/// `result` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn nh_frame_vectors(f: *const NhFrame, x_part: bool, result: *mut f64, len: usize) -> NhStatus {
    guard(|| {
        let f = &obj(f, "frame")?.0;
        let mat = if x_part { &f.x } else { &f.y };
        expect_len("frame matrix", mat.len(), len)?;
        slice_mut(result, len, "result")?.copy_from_slice(mat.as_slice());
        Ok(())
    })
}

/// Eigenfunction for `lambda` (length `k`) and multi-index `alpha` (length
/// `m / 2`). A non-positive `tol` selects the default.
///
/// # Safety
/// Arrays must hold the stated number of elements and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_eigenfunction_new(
    a: *const NhAlgebra,
    lambda: *const f64,
    lambda_len: usize,
    alpha: *const usize,
    alpha_len: usize,
    tol: f64,
    result: *mut *mut NhEigenfunction,
) -> NhStatus {
    guard(|| {
        let a = &obj(a, "algebra")?.0;
        expect_len("alpha", a.m() / 2, alpha_len)?;
        let l = CentralFunctional::new(slice(lambda, lambda_len, "lambda")?.to_vec());
        let al = MultiIndex::new(slice(alpha, alpha_len, "alpha")?.to_vec());
        store(NhEigenfunction(Eigenfunction::new(a, &l, &al, resolve_tol(tol))?), result)
    })
}

/// # Safety
/// `e` must be null or a handle from [`nh_eigenfunction_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nh_eigenfunction_free(e: *mut NhEigenfunction) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Sublaplacian eigenvalue `−|λ|`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_eigenfunction_eigenvalue(e: *const NhEigenfunction, result: *mut f64) -> NhStatus {
    guard(|| {
        *out(result, "result")? = obj(e, "eigenfunction")?.0.eigenvalue();
        Ok(())
    })
}

/// Value at the group point `(v, z)`; `v` has length `m`, `z` length `k`.
///
/// # Safety
/// Arrays must hold the stated number of elements; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_eigenfunction_eval(
    e: *const NhEigenfunction,
    v: *const f64,
    v_len: usize,
    z: *const f64,
    z_len: usize,
    re: *mut f64,
    im: *mut f64,
) -> NhStatus {
    guard(|| {
        let e = &obj(e, "eigenfunction")?.0;
        expect_len("v", e.frame.m(), v_len)?;
        expect_len("z", e.lambda.0.len(), z_len)?;
        let w = e.eval(slice(v, v_len, "v")?, slice(z, z_len, "z")?);
        *out(re, "re")? = w.re;
        *out(im, "im")? = w.im;
        Ok(())
    })
}

/// Normalized Hermite function `h_α(ξ)`; `alpha` and `xi` have length `n`.
///
/// # Safety
/// Arrays must hold `n` elements; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_hermite_eval(alpha: *const usize, xi: *const f64, n: usize, result: *mut f64) -> NhStatus {
    guard(|| {
        let al = MultiIndex::new(slice(alpha, n, "alpha")?.to_vec());
        *out(result, "result")? = hermite_eval(&al, slice(xi, n, "xi")?)?;
        Ok(())
    })
}

/// Diagonal special Hermite function `Φ_{α,α}(z)`; `z` holds `n` complex
/// numbers as interleaved `(re, im)` pairs.
///
/// # Safety
/// `alpha` must hold `n` elements, `z` `2n`; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn nh_special_hermite_diag(
    alpha: *const usize,
    z: *const f64,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> NhStatus {
    guard(|| {
        let al = MultiIndex::new(slice(alpha, n, "alpha")?.to_vec());
        let zs: Vec<Complex64> = slice(z, 2 * n, "z")?
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let w = special_hermite_diag(&al, &zs)?;
        *out(re, "re")? = w.re;
        *out(im, "im")? = w.im;
        Ok(())
    })
}
