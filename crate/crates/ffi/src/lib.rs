//! C ABI over `grkhs`.
//!
//! Every fallible call returns a [`GrkhsStatus`]; on failure the message is
//! available from [`grkhs_last_error_message`] on the same thread. Handles
//! are opaque and must be released with the matching `*_free` function.
//! Complex matrices cross the boundary as row-major interleaved `re, im`
//! doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use grkhs::applications::{distance_matrix, solve_tsp, TspMode};
use grkhs::groupoid::pair_groupoid;
use grkhs::io::Project;
use grkhs::kernel::{kernel_from_representation, GroupoidKernel};
use grkhs::reconstruction::round_trip;
use grkhs::representation::{scalar_representation, VectorField};
use grkhs::rkhs::{build_rkhs, RkhsModel};
use grkhs::{CVector, Error, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrkhsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Schema = 4,
    UnknownIdentifier = 5,
    NotPositiveDefinite = 6,
    NotInvariant = 7,
    BufferTooSmall = 8,
    Numerical = 9,
    Panic = 10,
}

pub struct GrkhsProject {
    inner: Project,
}

pub struct GrkhsKernel {
    inner: GroupoidKernel,
}

pub struct GrkhsRkhs {
    inner: RkhsModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> GrkhsStatus {
    match e {
        Error::Io(_) => GrkhsStatus::Io,
        Error::Schema { .. } | Error::Json(_) | Error::DuplicateIdentifier { .. } => {
            GrkhsStatus::Schema
        }
        Error::UnknownIdentifier { .. } | Error::UnknownArrow(_) | Error::UnknownBasePoint(_) => {
            GrkhsStatus::UnknownIdentifier
        }
        Error::NotPositiveDefinite { .. } | Error::NotHermitian { .. } => {
            GrkhsStatus::NotPositiveDefinite
        }
        Error::InvarianceViolation { .. } | Error::NotWellDefined { .. } => {
            GrkhsStatus::NotInvariant
        }
        Error::NegativeRadicand { .. } => GrkhsStatus::Numerical,
        _ => GrkhsStatus::InvalidArgument,
    }
}

struct Failure(GrkhsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn guard(f: impl FnOnce() -> FfiResult) -> GrkhsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GrkhsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside grkhs");
            GrkhsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GrkhsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GrkhsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn buffer<'a, T>(
    p: *mut T,
    len: usize,
    needed: usize,
    what: &str,
) -> Result<&'a mut [T], Failure> {
    if len < needed {
        return Err(Failure(
            GrkhsStatus::BufferTooSmall,
            format!("{what} holds {len} elements, {needed} needed"),
        ));
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn grkhs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn grkhs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads a project file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_load(
    path: *const c_char,
    out: *mut *mut GrkhsProject,
) -> GrkhsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let inner = Project::load(Path::new(path))?;
        *out = boxed(GrkhsProject { inner });
        Ok(())
    })
}

/// Parses a project from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_from_json(
    json: *const c_char,
    out: *mut *mut GrkhsProject,
) -> GrkhsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = Project::from_json_str(str_arg(json, "json")?)?;
        *out = boxed(GrkhsProject { inner });
        Ok(())
    })
}

/// Writes the project in canonical form.
///
/// # Safety
/// `project` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_save(
    project: *const GrkhsProject,
    path: *const c_char,
) -> GrkhsStatus {
    guard(|| {
        let p = ref_arg(project, "project")?;
        p.inner.save(Path::new(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `project` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_free(project: *mut GrkhsProject) {
    if !project.is_null() {
        drop(Box::from_raw(project));
    }
}

/// Number of stored kernels.
///
/// # Safety
/// `project` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_kernel_count(
    project: *const GrkhsProject,
    out: *mut usize,
) -> GrkhsStatus {
    guard(|| {
        let p = ref_arg(project, "project")?;
        *out_arg(out, "out")? = p.inner.kernels.len();
        Ok(())
    })
}

/// Copies the id of kernel `index` into `buf` including the trailing NUL;
/// `needed` receives the required size either way.
///
/// # Safety
/// `project` must be a live handle, `buf` writable for `cap` bytes (may be
/// NULL when `cap` is 0) and `needed` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_kernel_id(
    project: *const GrkhsProject,
    index: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> GrkhsStatus {
    guard(|| {
        let p = ref_arg(project, "project")?;
        let (id, _) = p.inner.kernels.get(index).ok_or_else(|| {
            Failure(
                GrkhsStatus::InvalidArgument,
                format!(
                    "kernel index {index} out of range ({} kernels)",
                    p.inner.kernels.len()
                ),
            )
        })?;
        copy_string(id, buf, cap, needed)
    })
}

unsafe fn copy_string(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> FfiResult {
    let n = s.len() + 1;
    if let Some(needed) = needed.as_mut() {
        *needed = n;
    }
    let out = buffer(buf, cap, n, "buf")?;
    for (dst, src) in out.iter_mut().zip(s.bytes()) {
        *dst = src as c_char;
    }
    out[n - 1] = 0;
    Ok(())
}

/// Copies a stored kernel into a new handle.
///
/// # Safety
/// `project` must be a live handle, `id` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_kernel(
    project: *const GrkhsProject,
    id: *const c_char,
    out: *mut *mut GrkhsKernel,
) -> GrkhsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let p = ref_arg(project, "project")?;
        let k = p.inner.kernel(str_arg(id, "id")?)?.clone();
        *out = boxed(GrkhsKernel { inner: k });
        Ok(())
    })
}

/// Kernel of the stored representation `rep` and vector field `field`.
///
/// # Safety
/// `project` must be a live handle, `rep` and `field` NUL-terminated strings
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grkhs_project_build_kernel(
    project: *const GrkhsProject,
    rep: *const c_char,
    field: *const c_char,
    out: *mut *mut GrkhsKernel,
) -> GrkhsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let p = ref_arg(project, "project")?;
        let u = p.inner.representation(str_arg(rep, "rep")?)?;
        let v = p.inner.vector_field(str_arg(field, "field")?)?;
        *out = boxed(GrkhsKernel {
            inner: kernel_from_representation(u, v)?,
        });
        Ok(())
    })
}

/// Kernel of the two-point pair groupoid with `U(α) = λ` and field `(v₊, v₋)`.
/// Arrows are ordered `(+,+), (+,-), (-,+), (-,-)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_demo_qubit(
    lambda_re: f64,
    lambda_im: f64,
    v_plus_re: f64,
    v_plus_im: f64,
    v_minus_re: f64,
    v_minus_im: f64,
    out: *mut *mut GrkhsKernel,
) -> GrkhsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let lambda = C64::new(lambda_re, lambda_im);
        let g = Arc::new(pair_groupoid(&["+", "-"])?);
        let k: Vec<C64> = g
            .arrows()
            .map(|a| match g.arrow_label(a) {
                "(-,+)" => lambda,
                "(+,-)" => lambda.conj(),
                _ => C64::new(1.0, 0.0),
            })
            .collect();
        let rep = scalar_representation(g, &k)?;
        let check = rep.validate(grkhs::representation::DEFAULT_TOL);
        if !check.passed {
            return Err(Failure(
                GrkhsStatus::InvalidArgument,
                format!("|λ| = {} is not 1", lambda.norm()),
            ));
        }
        let v = VectorField::new(vec![
            CVector::from_element(1, C64::new(v_plus_re, v_plus_im)),
            CVector::from_element(1, C64::new(v_minus_re, v_minus_im)),
        ]);
        *out = boxed(GrkhsKernel {
            inner: kernel_from_representation(&rep, &v)?,
        });
        Ok(())
    })
}

/// # Safety
/// `kernel` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_free(kernel: *mut GrkhsKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Number of arrows, i.e. the matrix order.
///
/// # Safety
/// `kernel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_size(
    kernel: *const GrkhsKernel,
    out: *mut usize,
) -> GrkhsStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(kernel, "kernel")?.inner.size();
        Ok(())
    })
}

/// Label of arrow `index`, copied as in [`grkhs_project_kernel_id`].
///
/// # Safety
/// As for [`grkhs_project_kernel_id`].
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_label(
    kernel: *const GrkhsKernel,
    index: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> GrkhsStatus {
    guard(|| {
        let k = ref_arg(kernel, "kernel")?;
        let label = k.inner.labels().get(index).ok_or_else(|| {
            Failure(
                GrkhsStatus::InvalidArgument,
                format!(
                    "arrow index {index} out of range ({} arrows)",
                    k.inner.size()
                ),
            )
        })?;
        copy_string(label, buf, cap, needed)
    })
}

/// Writes the `n × n` kernel values, row-major, as `2 n²` doubles.
///
/// # Safety
/// `kernel` must be a live handle and `values` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_values(
    kernel: *const GrkhsKernel,
    values: *mut f64,
    len: usize,
) -> GrkhsStatus {
    guard(|| {
        let k = &ref_arg(kernel, "kernel")?.inner;
        let n = k.size();
        let out = buffer(values, len, 2 * n * n, "values")?;
        for i in 0..n {
            for j in 0..n {
                let z = k.values()[(i, j)];
                out[2 * (i * n + j)] = z.re;
                out[2 * (i * n + j) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// Spectral positive-semidefiniteness test with relative tolerance `tol`.
///
/// # Safety
/// `kernel` must be a live handle; `passed` and `min_eigenvalue` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_check_psd(
    kernel: *const GrkhsKernel,
    tol: f64,
    passed: *mut bool,
    min_eigenvalue: *mut f64,
) -> GrkhsStatus {
    guard(|| {
        let r = ref_arg(kernel, "kernel")?
            .inner
            .check_positive_definite(tol)?;
        if let Some(p) = passed.as_mut() {
            *p = r.passed;
        }
        if let Some(m) = min_eigenvalue.as_mut() {
            *m = r.min_eigenvalue;
        }
        Ok(())
    })
}

/// Translation-invariance test on range fibers.
///
/// # Safety
/// `kernel` must be a live handle; `passed` and `max_deviation` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_check_invariance(
    kernel: *const GrkhsKernel,
    tol: f64,
    passed: *mut bool,
    max_deviation: *mut f64,
) -> GrkhsStatus {
    guard(|| {
        let r = ref_arg(kernel, "kernel")?.inner.check_invariance(tol);
        if let Some(p) = passed.as_mut() {
            *p = r.passed;
        }
        if let Some(m) = max_deviation.as_mut() {
            *m = r.max_deviation.max(r.max_cross_fiber);
        }
        Ok(())
    })
}

/// Reconstructs a representation from the kernel and compares the rebuilt kernel.
///
/// # Safety
/// `kernel` must be a live handle; `passed` and `max_deviation` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_round_trip(
    kernel: *const GrkhsKernel,
    tol: f64,
    passed: *mut bool,
    max_deviation: *mut f64,
) -> GrkhsStatus {
    guard(|| {
        let r = round_trip(&ref_arg(kernel, "kernel")?.inner, tol)?;
        if let Some(p) = passed.as_mut() {
            *p = r.passed;
        }
        if let Some(m) = max_deviation.as_mut() {
            *m = r.max_deviation;
        }
        Ok(())
    })
}

/// Kernel distances between all arrows, `n²` doubles row-major.
///
/// # Safety
/// `kernel` must be a live handle and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_distance_matrix(
    kernel: *const GrkhsKernel,
    out: *mut f64,
    len: usize,
) -> GrkhsStatus {
    guard(|| {
        let k = &ref_arg(kernel, "kernel")?.inner;
        let n = k.size();
        let buf = buffer(out, len, n * n, "out")?;
        let d = distance_matrix(k, k.labels())?;
        for i in 0..n {
            for j in 0..n {
                buf[i * n + j] = d.get(i, j);
            }
        }
        Ok(())
    })
}

/// Closed tour through all arrows. `exact` enumerates (limited to 10
/// arrows); otherwise nearest neighbour and 2-opt with `restarts` seeded
/// random starts. `order` receives `n` arrow indices.
///
/// # Safety
/// `kernel` must be a live handle, `order` writable for `len` elements and
/// `length` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn grkhs_kernel_tsp(
    kernel: *const GrkhsKernel,
    exact: bool,
    restarts: usize,
    seed: u64,
    order: *mut usize,
    len: usize,
    length: *mut f64,
) -> GrkhsStatus {
    guard(|| {
        let k = &ref_arg(kernel, "kernel")?.inner;
        let buf = buffer(order, len, k.size(), "order")?;
        let d = distance_matrix(k, k.labels())?;
        let mode = if exact {
            TspMode::Exact
        } else {
            TspMode::Heuristic { restarts }
        };
        let tour = solve_tsp(&d, mode, seed)?;
        buf.copy_from_slice(&tour.order);
        if let Some(l) = length.as_mut() {
            *l = tour.length;
        }
        Ok(())
    })
}

/// Builds the reproducing kernel Hilbert space; fails on indefinite kernels.
///
/// # Safety
/// `kernel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grkhs_rkhs_build(
    kernel: *const GrkhsKernel,
    rank_tol: f64,
    out: *mut *mut GrkhsRkhs,
) -> GrkhsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let model = build_rkhs(&ref_arg(kernel, "kernel")?.inner, rank_tol)?;
        *out = boxed(GrkhsRkhs { inner: model });
        Ok(())
    })
}

/// # Safety
/// `rkhs` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grkhs_rkhs_free(rkhs: *mut GrkhsRkhs) {
    if !rkhs.is_null() {
        drop(Box::from_raw(rkhs));
    }
}

/// # Safety
/// `rkhs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grkhs_rkhs_rank(rkhs: *const GrkhsRkhs, out: *mut usize) -> GrkhsStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(rkhs, "rkhs")?.inner.rank();
        Ok(())
    })
}

/// Rank of each base point's fiber, in base-point order; `count` receives
/// the number of base points.
///
/// # Safety
/// `rkhs` must be a live handle, `out` writable for `len` elements and
/// `count` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn grkhs_rkhs_fiber_ranks(
    rkhs: *const GrkhsRkhs,
    out: *mut usize,
    len: usize,
    count: *mut usize,
) -> GrkhsStatus {
    guard(|| {
        let ranks = ref_arg(rkhs, "rkhs")?.inner.fiber_ranks();
        if let Some(c) = count.as_mut() {
            *c = ranks.len();
        }
        let buf = buffer(out, len, ranks.len(), "out")?;
        for (dst, (_, r)) in buf.iter_mut().zip(ranks) {
            *dst = r;
        }
        Ok(())
    })
}

/// Checks that the computed orthonormal basis reproduces the kernel.
///
/// # Safety
/// `rkhs` must be a live handle; `passed` and `max_deviation` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn grkhs_rkhs_parseval_check(
    rkhs: *const GrkhsRkhs,
    tol: f64,
    passed: *mut bool,
    max_deviation: *mut f64,
) -> GrkhsStatus {
    guard(|| {
        let m = &ref_arg(rkhs, "rkhs")?.inner;
        let r = m.parseval_check(&m.onb_functions(), tol)?;
        if let Some(p) = passed.as_mut() {
            *p = r.passed;
        }
        if let Some(d) = max_deviation.as_mut() {
            *d = r.max_deviation;
        }
        Ok(())
    })
}
