//! C ABI for the `phodcos` library.
//!
//! All functions follow the same conventions:
//!
//! * Objects are returned through opaque handles (`PhodcosPath`) that must be
//!   released with [`phodcos_path_free`].
//! * Every fallible call returns a [`PhodcosStatus`]; on failure a
//!   human-readable description is available from [`phodcos_last_error`]
//!   until the next call on the same thread.
//! * Pointers passed in must be valid for the duration of the call; `NULL`
//!   where a pointer is expected yields `PHODCOS_STATUS_INVALID_ARGUMENT`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use phodcos::document::DocumentMetadata;
use phodcos::ingest::{builtin_source, SampledCurve};
use phodcos::{
    phodcos as run_pipeline, CurveSource, ParameterizationDocument, PHPath, PipelineConfig,
    Vector3,
};
use phodcos::pipeline::PipelineError;

/// Result code shared by every fallible function in this library.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PhodcosStatus {
    /// The call succeeded.
    Ok = 0,
    /// A pointer was null, a string was not UTF-8, or a parameter was out of
    /// range.
    InvalidArgument = 1,
    /// The input could not be used: unknown builtin name, unreadable file,
    /// malformed document, or samples that do not describe a curve.
    InputError = 2,
    /// The requested tolerance could not be reached within the segment
    /// budget, or the interpolation degenerated.
    ToleranceError = 3,
    /// A query was evaluated outside the path domain or hit a numerically
    /// degenerate configuration.
    NumericError = 4,
    /// An internal invariant was violated.
    InternalError = 5,
}

/// One full evaluation of the moving coordinate system at a parameter value.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct PhodcosSample {
    /// Path position.
    pub position: [f64; 3],
    /// Rotation matrix in row-major order; columns are the frame axes.
    pub rotation: [f64; 9],
    /// Angular velocity of the frame with respect to the curve parameter.
    pub omega: [f64; 3],
    /// Parametric speed `|dp/dxi|`.
    pub sigma: f64,
    /// Arc length accumulated from the start of the path.
    pub arc_length: f64,
    /// Curvature.
    pub curvature: f64,
    /// Torsion; meaningful only when `torsion_defined` is nonzero.
    pub torsion: f64,
    /// Zero where the curvature vanishes and the torsion is undefined.
    pub torsion_defined: i32,
}

/// Opaque handle to a fitted path. Create with one of the `phodcos_fit_*`
/// constructors or [`phodcos_path_load_json`]; release with
/// [`phodcos_path_free`].
pub struct PhodcosPath {
    path: PHPath,
    metadata: DocumentMetadata,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(message).unwrap());
}

fn status_of(err: &PipelineError) -> PhodcosStatus {
    match err {
        PipelineError::InvalidConfig(_) => PhodcosStatus::InvalidArgument,
        _ => PhodcosStatus::ToleranceError,
    }
}

/// Guards against panics crossing the ABI boundary.
fn guarded(f: impl FnOnce() -> PhodcosStatus) -> PhodcosStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            PhodcosStatus::InternalError
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, PhodcosStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(PhodcosStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        PhodcosStatus::InvalidArgument
    })
}

fn fit(
    source: &dyn CurveSource,
    description: String,
    epsilon: f64,
    out: *mut *mut PhodcosPath,
) -> PhodcosStatus {
    if out.is_null() {
        set_error("null output pointer");
        return PhodcosStatus::InvalidArgument;
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        set_error("epsilon must be positive and finite");
        return PhodcosStatus::InvalidArgument;
    }
    let cfg = PipelineConfig::new(epsilon);
    match run_pipeline(source, &cfg) {
        Ok((path, rows)) => {
            let last = rows.last().expect("at least one refinement row");
            let handle = Box::new(PhodcosPath {
                metadata: DocumentMetadata {
                    source: description,
                    epsilon,
                    n_segments: path.segments().len(),
                    max_error: last.max_error,
                },
                path,
            });
            unsafe { *out = Box::into_raw(handle) };
            PhodcosStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Fits a named built-in curve (`"exemplary"`, `"exemplary-planar"`,
/// `"line"`, `"helix"`) to the tolerance `epsilon` and returns a new path
/// handle through `out`.
#[no_mangle]
pub unsafe extern "C" fn phodcos_fit_builtin(
    name: *const c_char,
    epsilon: f64,
    out: *mut *mut PhodcosPath,
) -> PhodcosStatus {
    guarded(|| {
        let name = match read_str(name) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let Some(source) = builtin_source(name) else {
            set_error(format!("unknown builtin curve `{name}`"));
            return PhodcosStatus::InputError;
        };
        fit(source.as_ref(), format!("builtin:{name}"), epsilon, out)
    })
}

/// Fits a curve through `n` samples to the tolerance `epsilon`.
///
/// `points` holds `3 * n` doubles laid out `x0 y0 z0 x1 y1 z1 ...`.
/// `params` may be `NULL`, in which case the samples are assumed uniformly
/// spaced; otherwise it holds `n` strictly increasing parameter values.
/// `fit_tol` bounds the distance from the fitted curve to the samples.
#[no_mangle]
pub unsafe extern "C" fn phodcos_fit_samples(
    params: *const f64,
    points: *const f64,
    n: usize,
    fit_tol: f64,
    epsilon: f64,
    out: *mut *mut PhodcosPath,
) -> PhodcosStatus {
    guarded(|| {
        if points.is_null() {
            set_error("null points pointer");
            return PhodcosStatus::InvalidArgument;
        }
        if n < 2 {
            set_error("at least two samples are required");
            return PhodcosStatus::InputError;
        }
        let coords = std::slice::from_raw_parts(points, 3 * n);
        let samples: Vec<(f64, Vector3)> = (0..n)
            .map(|i| {
                let t = if params.is_null() {
                    i as f64 / (n - 1) as f64
                } else {
                    *params.add(i)
                };
                (t, Vector3::new(coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]))
            })
            .collect();
        match SampledCurve::from_samples(&samples, fit_tol) {
            Ok(mut curve) => {
                curve.set_description(format!("samples:{n}"));
                fit(&curve, format!("samples:{n}"), epsilon, out)
            }
            Err(e) => {
                set_error(e.to_string());
                PhodcosStatus::InputError
            }
        }
    })
}

/// Releases a path handle. Passing `NULL` is a no-op.
#[no_mangle]
pub unsafe extern "C" fn phodcos_path_free(path: *mut PhodcosPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Returns the number of polynomial segments, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn phodcos_path_segment_count(path: *const PhodcosPath) -> usize {
    if path.is_null() {
        0
    } else {
        (*path).path.segments().len()
    }
}

/// Writes the parameter domain `[xi0, xif]` of the path.
#[no_mangle]
pub unsafe extern "C" fn phodcos_path_domain(
    path: *const PhodcosPath,
    xi0: *mut f64,
    xif: *mut f64,
) -> PhodcosStatus {
    guarded(|| {
        if path.is_null() || xi0.is_null() || xif.is_null() {
            set_error("null pointer");
            return PhodcosStatus::InvalidArgument;
        }
        let (a, b) = (*path).path.domain();
        *xi0 = a;
        *xif = b;
        PhodcosStatus::Ok
    })
}

/// Writes the conversion error the fit converged to (the maximum distance
/// between the path and its source curve).
#[no_mangle]
pub unsafe extern "C" fn phodcos_path_max_error(
    path: *const PhodcosPath,
    out: *mut f64,
) -> PhodcosStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            set_error("null pointer");
            return PhodcosStatus::InvalidArgument;
        }
        *out = (*path).metadata.max_error;
        PhodcosStatus::Ok
    })
}

/// Evaluates position, frame, angular velocity, speed, and the scalar
/// geometry of the path at parameter `xi` (which must lie in the domain).
#[no_mangle]
pub unsafe extern "C" fn phodcos_path_sample(
    path: *const PhodcosPath,
    xi: f64,
    out: *mut PhodcosSample,
) -> PhodcosStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            set_error("null pointer");
            return PhodcosStatus::InvalidArgument;
        }
        let p = &(*path).path;
        let (a, b) = p.domain();
        if !(xi.is_finite() && xi >= a && xi <= b) {
            set_error(format!("parameter {xi} outside domain [{a}, {b}]"));
            return PhodcosStatus::NumericError;
        }
        let frame = match p.frame(xi) {
            Ok(f) => f,
            Err(e) => {
                set_error(e.to_string());
                return PhodcosStatus::NumericError;
            }
        };
        let geometry = match p.geometry(xi) {
            Ok(g) => g,
            Err(e) => {
                set_error(e.to_string());
                return PhodcosStatus::NumericError;
            }
        };
        *out = PhodcosSample {
            position: p.position(xi).to_array(),
            rotation: frame.rotation.to_row_major(),
            omega: frame.omega.to_array(),
            sigma: frame.sigma,
            arc_length: geometry.arc_length,
            curvature: geometry.curvature,
            torsion: geometry.torsion,
            torsion_defined: geometry.torsion_defined as i32,
        };
        PhodcosStatus::Ok
    })
}

/// Saves the path and its metadata as a JSON document at `file_path`.
#[no_mangle]
pub unsafe extern "C" fn phodcos_path_save_json(
    path: *const PhodcosPath,
    file_path: *const c_char,
) -> PhodcosStatus {
    guarded(|| {
        if path.is_null() {
            set_error("null path handle");
            return PhodcosStatus::InvalidArgument;
        }
        let file_path = match read_str(file_path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let handle = &*path;
        let doc = ParameterizationDocument::from_path(&handle.path, handle.metadata.clone());
        match doc.save(Path::new(file_path)) {
            Ok(()) => PhodcosStatus::Ok,
            Err(e) => {
                set_error(e.to_string());
                PhodcosStatus::InputError
            }
        }
    })
}

/// Loads a JSON document produced by [`phodcos_path_save_json`] (or the
/// `phodcos fit` command) and returns a new path handle through `out`.
#[no_mangle]
pub unsafe extern "C" fn phodcos_path_load_json(
    file_path: *const c_char,
    out: *mut *mut PhodcosPath,
) -> PhodcosStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return PhodcosStatus::InvalidArgument;
        }
        let file_path = match read_str(file_path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let doc = match ParameterizationDocument::load(Path::new(file_path)) {
            Ok(d) => d,
            Err(e) => {
                set_error(e.to_string());
                return PhodcosStatus::InputError;
            }
        };
        match doc.to_ph_path() {
            Ok(path) => {
                *out = Box::into_raw(Box::new(PhodcosPath {
                    path,
                    metadata: doc.metadata,
                }));
                PhodcosStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                PhodcosStatus::InputError
            }
        }
    })
}

/// Returns a pointer to the description of the most recent failure on the
/// calling thread. The pointer stays valid until the next library call on
/// the same thread; the string is empty if no failure has occurred.
#[no_mangle]
pub extern "C" fn phodcos_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn fit_builtin(name: &str, epsilon: f64) -> *mut PhodcosPath {
        let cname = CString::new(name).unwrap();
        let mut handle: *mut PhodcosPath = ptr::null_mut();
        let status = unsafe { phodcos_fit_builtin(cname.as_ptr(), epsilon, &mut handle) };
        assert_eq!(status, PhodcosStatus::Ok);
        assert!(!handle.is_null());
        handle
    }

    #[test]
    fn fit_and_sample_line() {
        let handle = fit_builtin("line", 1e-9);
        unsafe {
            assert_eq!(phodcos_path_segment_count(handle), 2);
            let (mut a, mut b) = (f64::NAN, f64::NAN);
            assert_eq!(phodcos_path_domain(handle, &mut a, &mut b), PhodcosStatus::Ok);
            assert_eq!((a, b), (0.0, 1.0));

            let mut s = std::mem::zeroed::<PhodcosSample>();
            assert_eq!(phodcos_path_sample(handle, 0.25, &mut s), PhodcosStatus::Ok);
            assert!((s.position[0] - 0.25).abs() < 1e-9);
            assert!(s.position[1].abs() < 1e-9 && s.position[2].abs() < 1e-9);
            assert!((s.sigma - 1.0).abs() < 1e-9);
            assert!((s.arc_length - 0.25).abs() < 1e-9);
            assert!(s.curvature.abs() < 1e-7);

            let mut err = f64::NAN;
            assert_eq!(phodcos_path_max_error(handle, &mut err), PhodcosStatus::Ok);
            assert!(err < 1e-9);
            phodcos_path_free(handle);
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let file = CString::new(dir.path().join("doc.json").to_str().unwrap()).unwrap();
        let handle = fit_builtin("helix", 1e-6);
        unsafe {
            assert_eq!(phodcos_path_save_json(handle, file.as_ptr()), PhodcosStatus::Ok);
            let mut loaded: *mut PhodcosPath = ptr::null_mut();
            assert_eq!(
                phodcos_path_load_json(file.as_ptr(), &mut loaded),
                PhodcosStatus::Ok
            );
            assert_eq!(
                phodcos_path_segment_count(loaded),
                phodcos_path_segment_count(handle)
            );
            for i in 0..=20 {
                let xi = i as f64 / 20.0;
                let mut a = std::mem::zeroed::<PhodcosSample>();
                let mut b = std::mem::zeroed::<PhodcosSample>();
                assert_eq!(phodcos_path_sample(handle, xi, &mut a), PhodcosStatus::Ok);
                assert_eq!(phodcos_path_sample(loaded, xi, &mut b), PhodcosStatus::Ok);
                for k in 0..3 {
                    assert_eq!(a.position[k], b.position[k]);
                }
                for k in 0..9 {
                    assert_eq!(a.rotation[k], b.rotation[k]);
                }
            }
            phodcos_path_free(handle);
            phodcos_path_free(loaded);
        }
    }

    #[test]
    fn fit_samples_circle() {
        let n = 400usize;
        let mut points = Vec::with_capacity(3 * n);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64 * std::f64::consts::TAU;
            points.extend_from_slice(&[t.cos(), t.sin(), 0.0]);
        }
        let mut handle: *mut PhodcosPath = ptr::null_mut();
        unsafe {
            let status = phodcos_fit_samples(
                ptr::null(),
                points.as_ptr(),
                n,
                1e-6,
                1e-5,
                &mut handle,
            );
            assert_eq!(status, PhodcosStatus::Ok);
            let mut s = std::mem::zeroed::<PhodcosSample>();
            assert_eq!(phodcos_path_sample(handle, 0.5, &mut s), PhodcosStatus::Ok);
            let r = (s.position[0] * s.position[0] + s.position[1] * s.position[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-4, "radius {r}");
            assert!((s.curvature - 1.0).abs() < 1e-3, "curvature {}", s.curvature);
            phodcos_path_free(handle);
        }
    }

    #[test]
    fn error_paths_report_status_and_message() {
        unsafe {
            let mut handle: *mut PhodcosPath = ptr::null_mut();
            let bad = CString::new("nonesuch").unwrap();
            assert_eq!(
                phodcos_fit_builtin(bad.as_ptr(), 1e-6, &mut handle),
                PhodcosStatus::InputError
            );
            let msg = CStr::from_ptr(phodcos_last_error()).to_str().unwrap();
            assert!(msg.contains("nonesuch"), "{msg}");

            assert_eq!(
                phodcos_fit_builtin(ptr::null(), 1e-6, &mut handle),
                PhodcosStatus::InvalidArgument
            );

            let good = CString::new("line").unwrap();
            assert_eq!(
                phodcos_fit_builtin(good.as_ptr(), -1.0, &mut handle),
                PhodcosStatus::InvalidArgument
            );

            let handle = fit_builtin("line", 1e-9);
            let mut s = std::mem::zeroed::<PhodcosSample>();
            assert_eq!(
                phodcos_path_sample(handle, 2.0, &mut s),
                PhodcosStatus::NumericError
            );
            assert_eq!(
                phodcos_path_sample(ptr::null(), 0.5, &mut s),
                PhodcosStatus::InvalidArgument
            );
            phodcos_path_free(handle);
            phodcos_path_free(ptr::null_mut());
        }
    }

    #[test]
    fn missing_document_is_input_error() {
        unsafe {
            let mut handle: *mut PhodcosPath = ptr::null_mut();
            let path = CString::new("/nonexistent/doc.json").unwrap();
            assert_eq!(
                phodcos_path_load_json(path.as_ptr(), &mut handle),
                PhodcosStatus::InputError
            );
        }
    }
}
