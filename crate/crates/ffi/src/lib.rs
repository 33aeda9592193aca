//! C ABI over `simplex_gauge`.
//!
//! Objects are opaque heap handles returned by constructor functions
//! and released with the matching `sg_*_free`. Every fallible
//! call returns an [`SgStatus`]; on failure a message is available from
//! [`sg_last_error`] until the next call on the same thread. Strings
//! returned through `char**` out-parameters must be released with
//! [`sg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simplex_gauge::bundle::{trivial_bundle, PrincipalBundle, SlotsJson};
use simplex_gauge::complex::{ComplexSpec, SimplicialComplex};
use simplex_gauge::connection::{scalar_curvature, write_curvature_csv, Connection, ConnectionJson};
use simplex_gauge::group::{GaugeGroup, GroupSpec};
use simplex_gauge::runner::{self, ExperimentConfig};
use simplex_gauge::smith::simplicial_homology;
use simplex_gauge::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Unsupported = 3,
    Singular = 4,
    Ambiguous = 5,
    Dimension = 6,
    Budget = 7,
    NoPath = 8,
    Config = 9,
    Io = 10,
    Json = 11,
    Csv = 12,
    Utf8 = 13,
    Panic = 14,
}

/// Opaque simplicial complex.
pub struct SgComplex(SimplicialComplex);
/// Opaque structure group with its representation.
pub struct SgGroup(GaugeGroup);
/// Opaque semidiscrete principal bundle.
pub struct SgBundle(PrincipalBundle);
/// Opaque connection on a bundle.
pub struct SgConnection(Connection);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SgStatus {
    match e {
        Error::Input(_) => SgStatus::InvalidInput,
        Error::Unsupported(_) => SgStatus::Unsupported,
        Error::Singular(_) => SgStatus::Singular,
        Error::Ambiguous(_) => SgStatus::Ambiguous,
        Error::Dimension { .. } => SgStatus::Dimension,
        Error::Budget(_) => SgStatus::Budget,
        Error::NoPath => SgStatus::NoPath,
        Error::Config { .. } => SgStatus::Config,
        Error::Io(_) => SgStatus::Io,
        Error::Json(_) => SgStatus::Json,
        Error::Csv(_) => SgStatus::Csv,
    }
}

struct Fail(SgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FResult<T> = std::result::Result<T, Fail>;

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> FResult<()>>(f: F) -> SgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(Fail(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            SgStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> FResult<&'a str> {
    if p.is_null() {
        return Err(Fail(SgStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(SgStatus::Utf8, e.to_string()))
}

unsafe fn obj<'a, T>(p: *const T) -> FResult<&'a T> {
    p.as_ref().ok_or_else(|| Fail(SgStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> FResult<()> {
    if out.is_null() {
        return Err(Fail(SgStatus::NullPointer, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FResult<()> {
    if out.is_null() {
        return Err(Fail(SgStatus::NullPointer, "null output pointer".into()));
    }
    *out = CString::new(s).map_err(|e| Fail(SgStatus::InvalidInput, e.to_string()))?.into_raw();
    Ok(())
}

unsafe fn put_val<T>(out: *mut T, v: T) -> FResult<()> {
    if out.is_null() {
        return Err(Fail(SgStatus::NullPointer, "null output pointer".into()));
    }
    *out = v;
    Ok(())
}

fn json<T: serde::de::DeserializeOwned>(s: &str) -> FResult<T> {
    Ok(runner::parse_json(s)?)
}

/// Message of the last failure on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn sg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|c| c.as_ptr()).unwrap_or(ptr::null()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn sg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Complex from JSON `{"vertex_count": n, "maximal_simplices": [[..], ..]}`.
///
/// # Safety
/// `json_text` must be a valid C string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_complex_from_json(json_text: *const c_char, out: *mut *mut SgComplex) -> SgStatus {
    guard(|| {
        let spec: ComplexSpec = json(str_arg(json_text)?)?;
        put(out, SgComplex(SimplicialComplex::from_spec(&spec)?))
    })
}

/// Named fixture (`triangle`, `hollow_triangle`, `tetrahedron_boundary`,
/// `torus7`, `two_triangles`, `circle`, `grid_torus`, `disc_fan`); `n` is
/// the size for the parametrized ones and ignored otherwise.
///
/// # Safety
/// `name` must be a valid C string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_complex_fixture(name: *const c_char, n: usize, out: *mut *mut SgComplex) -> SgStatus {
    guard(|| {
        let name = str_arg(name)?;
        let c = runner::fixture(name, Some(n)).ok_or_else(|| Fail(SgStatus::InvalidInput, format!("unknown fixture {}", name)))?;
        put(out, SgComplex(c))
    })
}

/// # Safety
/// `c` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_complex_free(c: *mut SgComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of k-simplices.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_complex_count(c: *const SgComplex, k: usize, out: *mut usize) -> SgStatus {
    guard(|| put_val(out, obj(c)?.0.count(k)))
}

/// Complex serialized back to JSON.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_complex_to_json(c: *const SgComplex, out: *mut *mut c_char) -> SgStatus {
    guard(|| put_string(out, serde_json::to_string(&obj(c)?.0.to_spec()).map_err(Error::from)?))
}

/// Betti number and torsion count of H_k with integer coefficients; the
/// torsion coefficients themselves are available through
/// [`sg_homology_json`].
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_homology(c: *const SgComplex, k: usize, rank: *mut usize, torsion_count: *mut usize) -> SgStatus {
    guard(|| {
        let h = simplicial_homology(&obj(c)?.0, k);
        put_val(rank, h.rank)?;
        put_val(torsion_count, h.torsion.len())
    })
}

/// H_k as JSON `{"k","rank","torsion"}`.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_homology_json(c: *const SgComplex, k: usize, out: *mut *mut c_char) -> SgStatus {
    guard(|| put_string(out, serde_json::to_string(&simplicial_homology(&obj(c)?.0, k)).map_err(Error::from)?))
}

/// Group from JSON such as `{"kind":"so","n":3}` or `{"kind":"circle"}`.
///
/// # Safety
/// `json_text` must be a valid C string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_group_from_json(json_text: *const c_char, out: *mut *mut SgGroup) -> SgStatus {
    guard(|| {
        let spec: GroupSpec = json(str_arg(json_text)?)?;
        put(out, SgGroup(GaugeGroup::from_spec(&spec)?))
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_group_free(g: *mut SgGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Trivial bundle over a complex.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_bundle_trivial(c: *const SgComplex, g: *const SgGroup, out: *mut *mut SgBundle) -> SgStatus {
    guard(|| put(out, SgBundle(trivial_bundle(&obj(c)?.0, &obj(g)?.0))))
}

/// Copy of `b` with the slots of a slots JSON document applied.
///
/// # Safety
/// Handles, strings and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_bundle_with_slots_json(b: *const SgBundle, json_text: *const c_char, out: *mut *mut SgBundle) -> SgStatus {
    guard(|| {
        let slots: SlotsJson = json(str_arg(json_text)?)?;
        put(out, SgBundle(obj(b)?.0.clone().with_slots_json(&slots)?))
    })
}

/// Random slot assignment over the given dimensions with uniform class
/// choice from `classes[0..n_classes]`. `mode` 0 is free, 1 cocycle completion.
///
/// # Safety
/// Handles and arrays must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn sg_bundle_assign_random(
    b: *const SgBundle,
    dims: *const usize,
    n_dims: usize,
    density: f64,
    classes: *const i64,
    n_classes: usize,
    mode: u32,
    seed: u64,
    out: *mut *mut SgBundle,
) -> SgStatus {
    guard(|| {
        if (n_dims > 0 && dims.is_null()) || (n_classes > 0 && classes.is_null()) {
            return Err(Fail(SgStatus::NullPointer, "null array".into()));
        }
        let dims = if n_dims == 0 { &[][..] } else { std::slice::from_raw_parts(dims, n_dims) };
        let cls = if n_classes == 0 { &[][..] } else { std::slice::from_raw_parts(classes, n_classes) };
        let mode = match mode {
            0 => simplex_gauge::bundle::AssignMode::Free,
            1 => simplex_gauge::bundle::AssignMode::CocycleCompletion,
            m => return Err(Fail(SgStatus::InvalidInput, format!("unknown mode {}", m))),
        };
        put(out, SgBundle(obj(b)?.0.assign_random(dims, density, cls, mode, seed)?))
    })
}

/// Slots as JSON.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_bundle_slots_json(b: *const SgBundle, out: *mut *mut c_char) -> SgStatus {
    guard(|| put_string(out, serde_json::to_string(&obj(b)?.0.slots_json()).map_err(Error::from)?))
}

/// Characteristic-class verdicts as JSON `[{"n","verdict"}, ..]`.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_bundle_classes_json(b: *const SgBundle, out: *mut *mut c_char) -> SgStatus {
    guard(|| {
        let cls = obj(b)?.0.characteristic_classes()?;
        put_string(out, serde_json::to_string(&cls).map_err(Error::from)?)
    })
}

/// # Safety
/// `b` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_bundle_free(b: *mut SgBundle) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Connection with identity values on every edge.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_connection_identity(b: *const SgBundle, out: *mut *mut SgConnection) -> SgStatus {
    guard(|| put(out, SgConnection(Connection::identity(&obj(b)?.0))))
}

/// Connection with Haar-random edge values drawn from `seed`.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_connection_random(b: *const SgBundle, seed: u64, out: *mut *mut SgConnection) -> SgStatus {
    guard(|| put(out, SgConnection(Connection::random(&obj(b)?.0, &mut ChaCha8Rng::seed_from_u64(seed)))))
}

/// Connection from JSON `{"charts":[{"chart","edges":[{"edge","value"}]}]}`.
///
/// # Safety
/// Handles, strings and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_connection_from_json(b: *const SgBundle, json_text: *const c_char, out: *mut *mut SgConnection) -> SgStatus {
    guard(|| {
        let j: ConnectionJson = json(str_arg(json_text)?)?;
        put(out, SgConnection(Connection::from_json(&obj(b)?.0, &j)?))
    })
}

/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_connection_to_json(c: *const SgConnection, out: *mut *mut c_char) -> SgStatus {
    guard(|| put_string(out, serde_json::to_string(&obj(c)?.0.to_json()).map_err(Error::from)?))
}

/// Scalar curvature (trace of the triangle holonomy) at `base`.
///
/// # Safety
/// `tri` must point to three vertex ids; other pointers valid.
#[no_mangle]
pub unsafe extern "C" fn sg_scalar_curvature(c: *const SgConnection, tri: *const usize, base: usize, out: *mut f64) -> SgStatus {
    guard(|| {
        if tri.is_null() {
            return Err(Fail(SgStatus::NullPointer, "null triangle".into()));
        }
        let t = std::slice::from_raw_parts(tri, 3);
        put_val(out, scalar_curvature(&obj(c)?.0, t, base)?)
    })
}

/// Curvature map CSV `triangle,base_vertex,scalar_curvature`.
///
/// # Safety
/// Handles and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_curvature_csv(c: *const SgConnection, out: *mut *mut c_char) -> SgStatus {
    guard(|| {
        let mut buf = Vec::new();
        write_curvature_csv(&obj(c)?.0, &mut buf)?;
        put_string(out, String::from_utf8(buf).map_err(|e| Fail(SgStatus::Utf8, e.to_string()))?)
    })
}

/// # Safety
/// `c` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_connection_free(c: *mut SgConnection) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Run an experiment configuration; relative paths resolve against
/// `base_dir` (NULL for the working directory). Writes the report JSON.
///
/// # Safety
/// Strings and pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_run_config(config_json: *const c_char, base_dir: *const c_char, report_out: *mut *mut c_char) -> SgStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_json_str(str_arg(config_json)?)?;
        let base = if base_dir.is_null() { std::env::current_dir().map_err(Error::from)? } else { Path::new(str_arg(base_dir)?).to_path_buf() };
        let rep = runner::run(&cfg, &base)?;
        put_string(report_out, serde_json::to_string(&rep).map_err(Error::from)?)
    })
}
