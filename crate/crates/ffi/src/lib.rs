//! C ABI for the `ghgeom` engine.
//!
//! Conventions: every fallible function returns a [`GhgeomStatus`] and
//! writes its result through an out-pointer; objects with internal state
//! are opaque handles released with the matching `*_free`. The message of
//! the most recent failure on the calling thread is available from
//! [`ghgeom_last_error`].
//!
//! The C header lives in `include/ghgeom.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ghgeom::entropy::{self, GaussianFamily, GeneralizedLog};
use ghgeom::geodesic::{self, GeodesicPath, GeodesicState, ShootSettings, Surface};
use ghgeom::ghsurface::{self, LevelSetSpec, NuFunction};
use ghgeom::monge::{curvature_report, CurvatureReport, Orientation, ScalarField, StatePoint};
use ghgeom::numerics::{OdeSettings, QuadratureRule, SymMatrix3};
use ghgeom::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhgeomStatus {
    Ok = 0,
    NonRealRoots = 1,
    NotPositiveDefinite = 2,
    StepLimitExceeded = 3,
    NonFiniteState = 4,
    ToleranceNotMet = 5,
    NoSignChange = 6,
    DerivativeFailure = 7,
    OutOfRange = 8,
    DomainError = 9,
    NoConvergence = 10,
    InvalidSettings = 11,
    NullPointer = 100,
    InvalidArgument = 101,
    BufferTooSmall = 102,
    Panic = 103,
}

impl From<&Error> for GhgeomStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonRealRoots { .. } => Self::NonRealRoots,
            Error::NotPositiveDefinite { .. } => Self::NotPositiveDefinite,
            Error::StepLimitExceeded { .. } => Self::StepLimitExceeded,
            Error::NonFiniteState { .. } => Self::NonFiniteState,
            Error::ToleranceNotMet { .. } => Self::ToleranceNotMet,
            Error::NoSignChange { .. } => Self::NoSignChange,
            Error::DerivativeFailure { .. } => Self::DerivativeFailure,
            Error::OutOfRange { .. } => Self::OutOfRange,
            Error::DomainError(_) => Self::DomainError,
            Error::NoConvergence { .. } => Self::NoConvergence,
            Error::InvalidSettings(_) => Self::InvalidSettings,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhgeomPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl From<GhgeomPoint> for StatePoint {
    fn from(p: GhgeomPoint) -> Self {
        StatePoint::new(p.x1, p.x2, p.x3)
    }
}

impl From<StatePoint> for GhgeomPoint {
    fn from(p: StatePoint) -> Self {
        GhgeomPoint {
            x1: p.x1,
            x2: p.x2,
            x3: p.x3,
        }
    }
}

/// Symmetric matrices are stored as their upper triangle
/// `(m11, m12, m13, m22, m23, m33)`. Principal curvatures are descending.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GhgeomCurvature {
    pub a: f64,
    pub g: [f64; 6],
    pub h: [f64; 6],
    pub normal: [f64; 4],
    pub principal: [f64; 3],
    pub mean: [f64; 3],
    pub mean_paper: [f64; 3],
    pub ricci: [f64; 6],
    pub scalar: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GhgeomSample {
    pub t: f64,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub energy: f64,
    pub arc_length: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GhgeomShootResult {
    pub velocity: [f64; 3],
    pub miss: f64,
    pub iterations: u32,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GhgeomLogKind {
    Natural = 0,
    Tsallis = 1,
    Kaniadakis = 2,
}

/// A generalized logarithm; `parameter` is q (Tsallis) or k (Kaniadakis)
/// and ignored for the natural logarithm.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhgeomLog {
    pub kind: GhgeomLogKind,
    pub parameter: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GhgeomResidual {
    pub entropy: f64,
    pub sigma: f64,
    pub integral: f64,
    pub residual: f64,
    pub quad_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GhgeomIntersection {
    pub theta: f64,
    pub point: [f64; 3],
    pub mate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GhgeomFieldKind {
    /// The Gibbs-Helmholtz entropy `x1*x3 - x2`.
    Gh = 0,
    NuIdentity = 1,
    /// `nu(t) = t^p1`.
    NuPower = 2,
    /// `nu(t) = p1^(t^p2) - 1`.
    NuExp = 3,
}

/// Opaque scalar field handle.
pub struct GhgeomField {
    field: ScalarField,
}

/// Opaque geodesic path handle.
pub struct GhgeomPath {
    path: GeodesicPath,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> GhgeomStatus {
    set_last_error(&format!("{}: {e}", e.name()));
    GhgeomStatus::from(&e)
}

fn invalid(msg: &str) -> GhgeomStatus {
    set_last_error(msg);
    GhgeomStatus::InvalidArgument
}

fn null() -> GhgeomStatus {
    set_last_error("required pointer argument is null");
    GhgeomStatus::NullPointer
}

fn guard<F: FnOnce() -> GhgeomStatus>(f: F) -> GhgeomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == GhgeomStatus::Ok {
                set_last_error("");
            }
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            GhgeomStatus::Panic
        }
    }
}

fn log_of(log: GhgeomLog) -> Result<GeneralizedLog, Error> {
    match log.kind {
        GhgeomLogKind::Natural => Ok(GeneralizedLog::Natural),
        GhgeomLogKind::Tsallis => GeneralizedLog::tsallis(log.parameter),
        GhgeomLogKind::Kaniadakis => GeneralizedLog::kaniadakis(log.parameter),
    }
}

fn upper(m: &SymMatrix3) -> [f64; 6] {
    m.upper()
}

fn curvature_of(r: &CurvatureReport) -> GhgeomCurvature {
    GhgeomCurvature {
        a: r.forms.a,
        g: upper(&r.forms.g),
        h: upper(&r.forms.h),
        normal: r.forms.normal,
        principal: r.principal(),
        mean: r.mean(),
        mean_paper: r.mean_paper(),
        ricci: upper(&r.ricci),
        scalar: r.scalar,
    }
}

/// Name of a status code as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ghgeom_status_name(status: GhgeomStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        GhgeomStatus::Ok => b"Ok\0",
        GhgeomStatus::NonRealRoots => b"NonRealRoots\0",
        GhgeomStatus::NotPositiveDefinite => b"NotPositiveDefinite\0",
        GhgeomStatus::StepLimitExceeded => b"StepLimitExceeded\0",
        GhgeomStatus::NonFiniteState => b"NonFiniteState\0",
        GhgeomStatus::ToleranceNotMet => b"ToleranceNotMet\0",
        GhgeomStatus::NoSignChange => b"NoSignChange\0",
        GhgeomStatus::DerivativeFailure => b"DerivativeFailure\0",
        GhgeomStatus::OutOfRange => b"OutOfRange\0",
        GhgeomStatus::DomainError => b"DomainError\0",
        GhgeomStatus::NoConvergence => b"NoConvergence\0",
        GhgeomStatus::InvalidSettings => b"InvalidSettings\0",
        GhgeomStatus::NullPointer => b"NullPointer\0",
        GhgeomStatus::InvalidArgument => b"InvalidArgument\0",
        GhgeomStatus::BufferTooSmall => b"BufferTooSmall\0",
        GhgeomStatus::Panic => b"Panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failed call on this thread (empty after a success).
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ghgeom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ghgeom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `x1*x3 - x2`.
#[no_mangle]
pub extern "C" fn ghgeom_entropy(x: GhgeomPoint) -> f64 {
    ghsurface::entropy(&x.into())
}

/// Creates a field handle. `p1`, `p2` parametrize the nu kinds.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_field_new(
    kind: GhgeomFieldKind,
    p1: f64,
    p2: f64,
    finite_differences: bool,
    out: *mut *mut GhgeomField,
) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        let nu = match kind {
            GhgeomFieldKind::Gh => None,
            GhgeomFieldKind::NuIdentity => Some(Ok(NuFunction::identity())),
            GhgeomFieldKind::NuPower => Some(NuFunction::power(p1)),
            GhgeomFieldKind::NuExp => Some(NuFunction::exp_type(p1, p2)),
        };
        let field = match nu {
            None => ghsurface::gh_field(),
            Some(Ok(nu)) => ghsurface::nu_patch(&nu),
            Some(Err(e)) => return fail(e),
        };
        let field = if finite_differences { field.finite_differences() } else { field };
        *out = Box::into_raw(Box::new(GhgeomField { field }));
        GhgeomStatus::Ok
    })
}

/// # Safety
/// `field` must be null or a handle from [`ghgeom_field_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_field_free(field: *mut GhgeomField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_field_value(field: *const GhgeomField, x: GhgeomPoint, out: *mut f64) -> GhgeomStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return null();
        };
        match f.field.value(&x.into()) {
            Ok(v) => {
                *out = v;
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Curvature invariants of the graph of `field` at `x` (downward normal).
///
/// # Safety
/// `field` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_curvature(
    field: *const GhgeomField,
    x: GhgeomPoint,
    out: *mut GhgeomCurvature,
) -> GhgeomStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return null();
        };
        match curvature_report(&f.field, &x.into(), Orientation::Downward) {
            Ok(r) => {
                *out = curvature_of(&r);
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Closed-form invariants of the Gibbs-Helmholtz surface.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_closed_curvature(x: GhgeomPoint, out: *mut GhgeomCurvature) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        *out = curvature_of(&ghsurface::closed_curvatures(&x.into()));
        GhgeomStatus::Ok
    })
}

/// Integrates the geodesic from `(pos, vel)` over `[0, t_end]` with
/// adaptive tolerance `tol`.
///
/// # Safety
/// `vel` must point to 3 doubles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_geodesic_integrate(
    pos: GhgeomPoint,
    vel: *const f64,
    t_end: f64,
    tol: f64,
    out: *mut *mut GhgeomPath,
) -> GhgeomStatus {
    guard(|| {
        if vel.is_null() || out.is_null() {
            return null();
        }
        let v = [*vel, *vel.add(1), *vel.add(2)];
        let settings = OdeSettings::adaptive(tol);
        if let Err(e) = settings.validate() {
            return fail(e);
        }
        match geodesic::integrate_geodesic(&GeodesicState::new(0.0, pos.into(), v), t_end, &settings) {
            Ok(path) => {
                *out = Box::into_raw(Box::new(GhgeomPath { path }));
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_path_len(path: *const GhgeomPath) -> usize {
    path.as_ref().map_or(0, |p| p.path.len())
}

/// # Safety
/// `path` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_path_sample(path: *const GhgeomPath, index: usize, out: *mut GhgeomSample) -> GhgeomStatus {
    guard(|| {
        let (Some(p), false) = (path.as_ref(), out.is_null()) else {
            return null();
        };
        let Some(s) = p.path.samples.get(index) else {
            return invalid("sample index out of range");
        };
        let x = s.position;
        *out = GhgeomSample {
            t: s.t,
            position: [x.x1, x.x2, x.x3],
            velocity: s.velocity,
            energy: p.path.energy[index],
            arc_length: p.path.arc_length[index],
        };
        GhgeomStatus::Ok
    })
}

/// # Safety
/// `path` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_path_free(path: *mut GhgeomPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Geodesic from `from` reaching `to` at t = 1. `out` is always filled when
/// the search ran; the status is `NoConvergence` if the miss exceeds `tol`.
/// `path_out` may be null; otherwise it receives a path handle.
///
/// # Safety
/// `out` must be valid for writes; `path_out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_shoot(
    from: GhgeomPoint,
    to: GhgeomPoint,
    tol: f64,
    out: *mut GhgeomShootResult,
    path_out: *mut *mut GhgeomPath,
) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        let r = match geodesic::shoot_with(&Surface::Gh, &from.into(), &to.into(), tol, &ShootSettings::default()) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        *out = GhgeomShootResult {
            velocity: r.velocity,
            miss: r.miss,
            iterations: r.iterations as u32,
            converged: r.converged,
        };
        let (converged, iterations, miss) = (r.converged, r.iterations, r.miss);
        if !path_out.is_null() {
            *path_out = Box::into_raw(Box::new(GhgeomPath { path: r.path }));
        }
        if converged {
            GhgeomStatus::Ok
        } else {
            fail(Error::NoConvergence { iterations, miss })
        }
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_glog(log: GhgeomLog, z: f64, out: *mut f64) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        match log_of(log).and_then(|phi| entropy::glog(&phi, z)) {
            Ok(v) => {
                *out = v;
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Closed-form dispersion solving the equivalence equation at entropy `s`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_sigma_closed(log: GhgeomLog, s: f64, out: *mut f64) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        match log_of(log).and_then(|phi| entropy::sigma_closed(&phi, s)) {
            Ok(v) => {
                *out = v;
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Dispersion recovered numerically from the equivalence equation.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_sigma_solve(log: GhgeomLog, s: f64, tol: f64, out: *mut f64) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        match log_of(log).and_then(|phi| entropy::sigma_solve(&phi, s, tol)) {
            Ok(v) => {
                *out = v;
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Residual of the equivalence equation at `x` for the Gaussian family with
/// constant mean `mu` and the closed-form dispersion.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_equivalence_residual(
    log: GhgeomLog,
    x: GhgeomPoint,
    mu: f64,
    out: *mut GhgeomResidual,
) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        let run = || -> Result<GhgeomResidual, Error> {
            let phi = log_of(log)?;
            let family = GaussianFamily::solving(&phi, move |_| mu);
            let p = StatePoint::from(x);
            let r = entropy::equivalence_residual(&phi, &family, &p, &QuadratureRule::default())?;
            Ok(GhgeomResidual {
                entropy: r.entropy,
                sigma: family.sigma(&p)?,
                integral: r.integral,
                residual: r.residual,
                quad_error: r.quad_error,
            })
        };
        match run() {
            Ok(r) => {
                *out = r;
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_rho_level_radius(rho: f64, out: *mut f64) -> GhgeomStatus {
    guard(|| {
        if out.is_null() {
            return null();
        }
        match ghsurface::rho_level_radius(rho) {
            Ok(v) => {
                *out = v;
                GhgeomStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes `samples` points of the entropy-level / cylinder intersection
/// into `buf`, which must hold at least `samples` entries.
///
/// # Safety
/// `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn ghgeom_intersection_curve(
    level: f64,
    radius: f64,
    samples: usize,
    buf: *mut GhgeomIntersection,
    buf_len: usize,
) -> GhgeomStatus {
    guard(|| {
        if buf.is_null() {
            return null();
        }
        let spec = match LevelSetSpec::new(level, radius, samples) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        if buf_len < samples {
            set_last_error("output buffer shorter than the sample count");
            return GhgeomStatus::BufferTooSmall;
        }
        for (i, s) in ghsurface::intersection_curve(&spec).into_iter().enumerate() {
            ptr::write(
                buf.add(i),
                GhgeomIntersection {
                    theta: s.theta,
                    point: [s.point.x1, s.point.x2, s.point.x3],
                    mate: s.mate,
                },
            );
        }
        GhgeomStatus::Ok
    })
}
