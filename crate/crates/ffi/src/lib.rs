//! C interface to the qalpha library.
//!
//! Fields live behind opaque `QaField` handles. Every fallible call returns a
//! status code (`QA_OK` on success); the message of the last failure on the
//! calling thread is available from `qa_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qalpha::error::Error;
use qalpha::norms::{self, Side, WindowFamily};
use qalpha::{gen, io, Grid, ScalarField};

pub const QA_OK: i32 = 0;
pub const QA_ERR_NULL: i32 = 1;
pub const QA_ERR_INVALID: i32 = 2;
pub const QA_ERR_NUMERICAL: i32 = 3;
pub const QA_ERR_IO: i32 = 4;
pub const QA_ERR_FORMAT: i32 = 5;
pub const QA_ERR_PANIC: i32 = 6;

/// Opaque real scalar field on a periodic grid.
pub struct QaField {
    inner: ScalarField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> i32 {
    match e {
        Error::Io(_) => QA_ERR_IO,
        Error::Format(_) | Error::Json(_) => QA_ERR_FORMAT,
        e if e.exit_code() == 1 => QA_ERR_NUMERICAL,
        _ => QA_ERR_INVALID,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QA_OK
        }
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            QA_ERR_PANIC
        }
    }
}

fn lib<T>(r: qalpha::Result<T>) -> Result<T, (i32, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (i32, String) {
    (QA_ERR_NULL, format!("`{name}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (i32, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QA_ERR_INVALID, format!("`{name}` is not UTF-8")))
}

unsafe fn field_arg<'a>(p: *const QaField) -> Result<&'a ScalarField, (i32, String)> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("field"))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> Result<(), (i32, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

fn handle(f: ScalarField) -> *mut QaField {
    Box::into_raw(Box::new(QaField { inner: f }))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a field from `len = N^n` row-major real samples.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_field_from_values(
    n: usize,
    size: usize,
    length: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut QaField,
) -> i32 {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let grid = lib(Grid::new(n, size, length))?;
        if len != grid.len() {
            return Err((QA_ERR_INVALID, format!("`len` is {len}, grid needs {}", grid.len())));
        }
        let data = std::slice::from_raw_parts(values, len).iter().map(|&v| v.into()).collect();
        let f = lib(ScalarField::new(grid, data))?;
        put(out, handle(f), "out")
    })
}

/// Seeded band-limited random field with unit sup norm.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_field_band_limited(
    n: usize,
    size: usize,
    length: f64,
    kmax: usize,
    seed: u64,
    out: *mut *mut QaField,
) -> i32 {
    guard(|| {
        let grid = lib(Grid::new(n, size, length))?;
        let f = lib(gen::band_limited(grid, kmax, seed))?;
        put(out, handle(f), "out")
    })
}

/// Loads field number `component` of a QAFLD1 file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_field_load(path: *const c_char, component: usize, out: *mut *mut QaField) -> i32 {
    guard(|| {
        let path = str_arg(path, "path")?;
        let fields = lib(io::load(path))?;
        let count = fields.len();
        let f = fields
            .into_iter()
            .nth(component)
            .ok_or_else(|| (QA_ERR_INVALID, format!("`component` {component} of {count}")))?;
        put(out, handle(f), "out")
    })
}

/// Writes one field as a QAFLD1 file.
///
/// # Safety
/// `field` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qa_field_save(field: *const QaField, path: *const c_char) -> i32 {
    guard(|| {
        let f = field_arg(field)?;
        let path = str_arg(path, "path")?;
        lib(io::save(path, std::slice::from_ref(f)))
    })
}

/// Grid parameters of a field.
///
/// # Safety
/// `field` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_field_grid(
    field: *const QaField,
    n: *mut usize,
    size: *mut usize,
    length: *mut f64,
) -> i32 {
    guard(|| {
        let g = *field_arg(field)?.grid();
        put(n, g.dim(), "n")?;
        put(size, g.size(), "size")?;
        put(length, g.length(), "length")
    })
}

/// Copies the real parts of the samples into `buf`, which holds `len` doubles.
///
/// # Safety
/// `field` must be a live handle; `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qa_field_values(field: *const QaField, buf: *mut f64, len: usize) -> i32 {
    guard(|| {
        let f = field_arg(field)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len != f.values().len() {
            return Err((QA_ERR_INVALID, format!("`len` is {len}, field has {}", f.values().len())));
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        for (d, v) in dst.iter_mut().zip(f.values()) {
            *d = v.re;
        }
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `field` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qa_field_free(field: *mut QaField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Evaluates a functional by name with the default window family.
///
/// `kind` is one of qalpha, bmo, morrey, qinv, bmo-inverse,
/// poisson-derivative, heat-gradient, morrey-poisson, psi0, sobolev,
/// sobolev-real. A non-positive or infinite `horizon` means no horizon.
///
/// # Safety
/// `field` must be a live handle, `kind` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qa_norm(
    field: *const QaField,
    kind: *const c_char,
    alpha: f64,
    horizon: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let f = field_arg(field)?;
        let kind = str_arg(kind, "kind")?;
        let value = match kind {
            "sobolev" => lib(norms::sobolev_seminorm(f, alpha, Side::Fourier))?,
            "sobolev-real" => lib(norms::sobolev_seminorm(f, alpha, Side::RealSpace))?,
            _ => {
                let horizon = if horizon > 0.0 { horizon } else { f64::INFINITY };
                let family = lib(WindowFamily::new(*f.grid(), norms::default_geometry(kind)))?;
                lib(norms::evaluate(f, kind, alpha, horizon, &family, norms::DEFAULT_NODES))?.value
            }
        };
        put(out, value, "out")
    })
}

/// The sharp constant of the Q_alpha to Sobolev embedding.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qa_sharp_constant(n: usize, alpha: f64, out: *mut f64) -> i32 {
    guard(|| {
        let c = lib(qalpha::embed::sharp_sobolev_constant(n, alpha))?.constant;
        put(out, c, "out")
    })
}
