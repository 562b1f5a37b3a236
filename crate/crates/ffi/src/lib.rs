//! C ABI over `weylcov`.
//!
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. Every fallible call returns a [`WeylcovStatus`];
//! the detail of the most recent failure on the calling thread is available
//! from [`weylcov_last_error`].
//!
//! Complex arrays cross the boundary as separate `re`/`im` buffers. Matrices
//! are row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use weylcov::channels::{
    apply, is_channel, prob_from_spectrum, spectrum_from_prob, WeylMapCoeffs, WeylMapSpectrum,
};
use weylcov::gpc::is_gpc;
use weylcov::posmaps::{
    build_positive_map, positivity_probe, reduction_spec, PosMapSpec, PositiveMap,
};
use weylcov::repr::{character_table, CharacterTable};
use weylcov::superop::LinearMap;
use weylcov::{CMatrix, Error, Tolerance};

use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylcovStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidDimension = 2,
    NonPrimeDimension = 3,
    ShapeMismatch = 4,
    InvalidArgument = 5,
    NotAState = 6,
    Numerical = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WeylcovStatus {
    match e {
        Error::InvalidDimension(_) | Error::DimensionMismatch(..) => {
            WeylcovStatus::InvalidDimension
        }
        Error::NonPrimeDimension(_) => WeylcovStatus::NonPrimeDimension,
        Error::ShapeMismatch { .. } | Error::IndexOutOfRange { .. } => WeylcovStatus::ShapeMismatch,
        Error::NotAState(_) => WeylcovStatus::NotAState,
        Error::NotHermitian { .. } | Error::NoConvergence | Error::RouteDisagreement(_) => {
            WeylcovStatus::Numerical
        }
        _ => WeylcovStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), WeylcovStatus>) -> WeylcovStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WeylcovStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            WeylcovStatus::Panic
        }
    }
}

fn lift<T>(r: weylcov::Result<T>) -> Result<T, WeylcovStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T) -> Result<(), WeylcovStatus> {
    if p.is_null() {
        set_error("null pointer argument".into());
        Err(WeylcovStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn tolerance(eps_eq: f64, eps_psd: f64) -> Result<Tolerance, WeylcovStatus> {
    lift(Tolerance::new(eps_eq, eps_psd, eps_eq.min(1e-12)))
}

/// # Safety
/// `re` and `im` must each point to `len` readable doubles.
unsafe fn read_complex(
    re: *const f64,
    im: *const f64,
    len: usize,
) -> Result<Vec<Complex64>, WeylcovStatus> {
    non_null(re)?;
    non_null(im)?;
    let re = std::slice::from_raw_parts(re, len);
    let im = std::slice::from_raw_parts(im, len);
    Ok(re
        .iter()
        .zip(im)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect())
}

/// # Safety
/// `re` and `im` must each point to `values.len()` writable doubles.
unsafe fn write_complex(
    values: &[Complex64],
    re: *mut f64,
    im: *mut f64,
) -> Result<(), WeylcovStatus> {
    non_null(re)?;
    non_null(im)?;
    for (i, z) in values.iter().enumerate() {
        *re.add(i) = z.re;
        *im.add(i) = z.im;
    }
    Ok(())
}

fn check_len(expected: usize, found: usize) -> Result<(), WeylcovStatus> {
    if expected != found {
        set_error(format!("expected {expected} entries, found {found}"));
        return Err(WeylcovStatus::ShapeMismatch);
    }
    Ok(())
}

/// Detail of the last failure on this thread, or NULL. Free with [`weylcov_string_free`].
#[no_mangle]
pub extern "C" fn weylcov_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |s| s.clone().into_raw())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn weylcov_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn weylcov_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

pub struct WeylcovTable(CharacterTable);

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn weylcov_table_new(d: usize, out: *mut *mut WeylcovTable) -> WeylcovStatus {
    guard(|| {
        non_null(out)?;
        let table = lift(character_table(d))?;
        *out = Box::into_raw(Box::new(WeylcovTable(table)));
        Ok(())
    })
}

/// # Safety
/// `table` must be NULL or a live handle from [`weylcov_table_new`].
#[no_mangle]
pub unsafe extern "C" fn weylcov_table_free(table: *mut WeylcovTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// # Safety
/// `table` must be a live handle; `rows`, `cols` and `partial` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_table_shape(
    table: *const WeylcovTable,
    rows: *mut usize,
    cols: *mut usize,
    partial: *mut bool,
) -> WeylcovStatus {
    guard(|| {
        non_null(table)?;
        non_null(rows)?;
        non_null(cols)?;
        non_null(partial)?;
        let t = &(*table).0;
        *rows = t.labels.len();
        *cols = t.classes.len();
        *partial = t.partial;
        Ok(())
    })
}

/// # Safety
/// `table` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_table_entry(
    table: *const WeylcovTable,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> WeylcovStatus {
    guard(|| {
        non_null(table)?;
        let t = &(*table).0;
        let z = t
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .copied()
            .ok_or_else(|| {
                set_error(format!("entry ({row}, {col}) out of range"));
                WeylcovStatus::ShapeMismatch
            })?;
        write_complex(&[z], re, im)
    })
}

/// Table as CSV. Free with [`weylcov_string_free`].
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_table_csv(
    table: *const WeylcovTable,
    out: *mut *mut c_char,
) -> WeylcovStatus {
    guard(|| {
        non_null(table)?;
        non_null(out)?;
        let csv = CString::new((*table).0.to_csv()).map_err(|_| WeylcovStatus::Panic)?;
        *out = csv.into_raw();
        Ok(())
    })
}

/// A Weyl map `X ↦ Σ μ_kl W_kl X W_kl†`.
pub struct WeylcovMap(WeylMapCoeffs);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WeylcovChannelVerdict {
    pub cp: bool,
    pub tp: bool,
    pub min_choi_eigenvalue: f64,
    pub coefficient_sum_re: f64,
    pub coefficient_sum_im: f64,
}

/// Map from its d² Kraus weights, flat index `k·d + l`.
///
/// # Safety
/// `re`/`im` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_new(
    d: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut WeylcovMap,
) -> WeylcovStatus {
    guard(|| {
        non_null(out)?;
        check_len(d * d, len)?;
        let mu = read_complex(re, im, len)?;
        let coeffs = lift(WeylMapCoeffs::new(d, mu))?;
        *out = Box::into_raw(Box::new(WeylcovMap(coeffs)));
        Ok(())
    })
}

/// Map from its d² eigenvalues on the Weyl basis.
///
/// # Safety
/// `re`/`im` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_from_spectrum(
    d: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut WeylcovMap,
) -> WeylcovStatus {
    guard(|| {
        non_null(out)?;
        check_len(d * d, len)?;
        let ell = read_complex(re, im, len)?;
        let spec = lift(WeylMapSpectrum::new(d, ell))?;
        *out = Box::into_raw(Box::new(WeylcovMap(prob_from_spectrum(&spec))));
        Ok(())
    })
}

/// # Safety
/// `map` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_free(map: *mut WeylcovMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `d` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_dim(map: *const WeylcovMap, d: *mut usize) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        non_null(d)?;
        *d = (*map).0.d;
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle; `re`/`im` must hold `len` = d² writable doubles.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_spectrum(
    map: *const WeylcovMap,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        let coeffs = &(*map).0;
        check_len(coeffs.d * coeffs.d, len)?;
        write_complex(&spectrum_from_prob(coeffs).ell, re, im)
    })
}

/// `Y = Φ[X]` for d×d row-major `X`.
///
/// # Safety
/// Input buffers must hold `len` = d² readable doubles and output buffers `len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_apply(
    map: *const WeylcovMap,
    x_re: *const f64,
    x_im: *const f64,
    y_re: *mut f64,
    y_im: *mut f64,
    len: usize,
) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        let coeffs = &(*map).0;
        let d = coeffs.d;
        check_len(d * d, len)?;
        let x = lift(CMatrix::from_vec(d, d, read_complex(x_re, x_im, len)?))?;
        let y = lift(apply(coeffs, &x))?;
        write_complex(y.as_slice(), y_re, y_im)
    })
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_is_channel(
    map: *const WeylcovMap,
    eps_eq: f64,
    eps_psd: f64,
    out: *mut WeylcovChannelVerdict,
) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        non_null(out)?;
        let tol = tolerance(eps_eq, eps_psd)?;
        let v = lift(is_channel(&(*map).0, &tol))?;
        *out = WeylcovChannelVerdict {
            cp: v.cp,
            tp: v.tp,
            min_choi_eigenvalue: v.min_choi_eigenvalue,
            coefficient_sum_re: v.coefficient_sum.re,
            coefficient_sum_im: v.coefficient_sum.im,
        };
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_map_is_gpc(
    map: *const WeylcovMap,
    eps_eq: f64,
    eps_psd: f64,
    out: *mut bool,
) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        non_null(out)?;
        let tol = tolerance(eps_eq, eps_psd)?;
        *out = lift(is_gpc(&spectrum_from_prob(&(*map).0), &tol))?;
        Ok(())
    })
}

/// A positive-map candidate with its certificate.
pub struct WeylcovPosMap(PositiveMap);

/// `X ↦ Σ_α λ_α F_α X F_α†` over the frame `F_α = W_α/√d`.
///
/// `delta` lists the `n_minus` indices carrying `lambda_minus`; `lambda_plus`
/// gives the remaining `d² − n_minus` weights in ascending index order.
///
/// # Safety
/// Arrays must hold the stated counts; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn weylcov_posmap_new(
    d: usize,
    delta: *const usize,
    lambda_minus: *const f64,
    n_minus: usize,
    lambda_plus: *const f64,
    n_plus: usize,
    eps_eq: f64,
    eps_psd: f64,
    out: *mut *mut WeylcovPosMap,
) -> WeylcovStatus {
    guard(|| {
        non_null(out)?;
        non_null(lambda_plus)?;
        let tol = tolerance(eps_eq, eps_psd)?;
        let (delta, lambda_minus) = if n_minus == 0 {
            (Vec::new(), Vec::new())
        } else {
            non_null(delta)?;
            non_null(lambda_minus)?;
            (
                std::slice::from_raw_parts(delta, n_minus).to_vec(),
                std::slice::from_raw_parts(lambda_minus, n_minus).to_vec(),
            )
        };
        let spec = PosMapSpec {
            d,
            delta,
            lambda_minus,
            lambda_plus: std::slice::from_raw_parts(lambda_plus, n_plus).to_vec(),
        };
        let map = lift(build_positive_map(&spec, &tol))?;
        *out = Box::into_raw(Box::new(WeylcovPosMap(map)));
        Ok(())
    })
}

/// `X ↦ (I Tr X − X)/(d−1)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_posmap_reduction(
    d: usize,
    out: *mut *mut WeylcovPosMap,
) -> WeylcovStatus {
    guard(|| {
        non_null(out)?;
        if d < 2 {
            set_error(format!("dimension must be at least 2, got {d}"));
            return Err(WeylcovStatus::InvalidDimension);
        }
        let map = lift(build_positive_map(
            &reduction_spec(d),
            &Tolerance::default(),
        ))?;
        *out = Box::into_raw(Box::new(WeylcovPosMap(map)));
        Ok(())
    })
}

/// # Safety
/// `map` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn weylcov_posmap_free(map: *mut WeylcovPosMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_posmap_certified(
    map: *const WeylcovPosMap,
    out: *mut bool,
) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        non_null(out)?;
        *out = (*map).0.certified;
        Ok(())
    })
}

/// `Y = Φ[X]` for d×d row-major `X`.
///
/// # Safety
/// Input buffers must hold `len` = d² readable doubles and output buffers `len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn weylcov_posmap_apply(
    map: *const WeylcovPosMap,
    x_re: *const f64,
    x_im: *const f64,
    y_re: *mut f64,
    y_im: *mut f64,
    len: usize,
) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        let m = &(*map).0;
        let d = m.dim();
        check_len(d * d, len)?;
        let x = lift(CMatrix::from_vec(d, d, read_complex(x_re, x_im, len)?))?;
        let y = lift(m.apply(&x))?;
        write_complex(y.as_slice(), y_re, y_im)
    })
}

/// Seeded rank-1 probe; `violated` is set when a witness was found.
///
/// # Safety
/// `map` must be a live handle; `min_eigenvalue` and `violated` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weylcov_posmap_probe(
    map: *const WeylcovPosMap,
    trials: usize,
    seed: u64,
    eps_eq: f64,
    eps_psd: f64,
    min_eigenvalue: *mut f64,
    violated: *mut bool,
) -> WeylcovStatus {
    guard(|| {
        non_null(map)?;
        non_null(min_eigenvalue)?;
        non_null(violated)?;
        if trials == 0 {
            set_error("trials must be at least 1".into());
            return Err(WeylcovStatus::InvalidArgument);
        }
        let tol = tolerance(eps_eq, eps_psd)?;
        let report = lift(positivity_probe(&(*map).0, trials, seed, &tol))?;
        *min_eigenvalue = report.min_eigenvalue;
        *violated = report.witness.is_some();
        Ok(())
    })
}
