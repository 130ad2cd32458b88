//! C ABI over `fibdyn`.
//!
//! Every function returns a [`FibdynStatus`]. Results go through out-pointers.
//! Handles are opaque and must be released with their `_free` function.
//! The message for the last failure on the calling thread is available
//! from [`fibdyn_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fibdyn::escape::{escape_radii, EscapeClassifier, EscapeRadii};
use fibdyn::render::{encode_output, rasterize, OutputFormat, Palette, Raster, RasterSpec, RenderMode};
use fibdyn::spectral::{fixed_points, three_cycle, FixedKind};
use fibdyn::{dynamics, CPoint, Error, OrbitStatus, ParamContext};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InverseUndefined = 3,
    Overflow = 4,
    NonRealParameter = 5,
    ParameterOutOfRange = 6,
    RadiusTooSmall = 7,
    UnsupportedFormat = 8,
    Io = 9,
    Internal = 10,
    Panic = 11,
}

impl From<&Error> for FibdynStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InverseUndefined => FibdynStatus::InverseUndefined,
            Error::Overflow => FibdynStatus::Overflow,
            Error::NonRealParameter { .. } => FibdynStatus::NonRealParameter,
            Error::ParameterOutOfRange { .. } => FibdynStatus::ParameterOutOfRange,
            Error::RadiusTooSmall { .. } => FibdynStatus::RadiusTooSmall,
            Error::InvalidSpec(_) | Error::ConstraintViolated(_) => FibdynStatus::InvalidArgument,
            Error::UnsupportedFormat(_) => FibdynStatus::UnsupportedFormat,
            Error::Io(_) => FibdynStatus::Io,
            _ => FibdynStatus::Internal,
        }
    }
}

/// A point of C^2. Real points have zero imaginary parts.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FibdynPoint {
    pub x_re: f64,
    pub x_im: f64,
    pub y_re: f64,
    pub y_im: f64,
}

impl From<FibdynPoint> for CPoint {
    fn from(p: FibdynPoint) -> Self {
        CPoint::new(Complex64::new(p.x_re, p.x_im), Complex64::new(p.y_re, p.y_im))
    }
}

impl From<CPoint> for FibdynPoint {
    fn from(p: CPoint) -> Self {
        FibdynPoint { x_re: p.x.re, x_im: p.x.im, y_re: p.y.re, y_im: p.y.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibdynDirection {
    Forward = 0,
    Backward = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibdynOrbitKind {
    Bounded = 0,
    Escaped = 1,
    InverseUndefined = 2,
}

/// Outcome of an escape classification. `index` is the escape or
/// undefined index and is 0 for bounded orbits.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FibdynOrbit {
    pub kind: FibdynOrbitKind,
    pub index: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FibdynRadii {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibdynFixedKind {
    Attracting = 0,
    Repelling = 1,
    Saddle = 2,
    Indifferent = 3,
    Degenerate = 4,
}

impl From<FixedKind> for FibdynFixedKind {
    fn from(k: FixedKind) -> Self {
        match k {
            FixedKind::Attracting => FibdynFixedKind::Attracting,
            FixedKind::Repelling => FibdynFixedKind::Repelling,
            FixedKind::Saddle => FibdynFixedKind::Saddle,
            FixedKind::Indifferent => FibdynFixedKind::Indifferent,
            FixedKind::Degenerate => FibdynFixedKind::Degenerate,
        }
    }
}

/// Fixed point `(a, a)` with its two multipliers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibdynFixedPoint {
    pub a_re: f64,
    pub a_im: f64,
    pub eig_re: [f64; 2],
    pub eig_im: [f64; 2],
    pub kind: FibdynFixedKind,
}

/// The 3-cycle through `(-1, -1)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibdynCycle {
    pub points: [FibdynPoint; 3],
    pub eig_re: [f64; 2],
    pub eig_im: [f64; 2],
    pub det_re: f64,
    pub det_im: f64,
}

/// Raster request. `mode` and the later `format` use the CLI spellings.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FibdynRenderSpec {
    pub mode: *const c_char,
    pub window: [f64; 4],
    pub width: u32,
    pub height: u32,
    pub budget: u64,
    pub seed: u64,
    pub y0_re: f64,
    pub y0_im: f64,
}

pub struct FibdynContext {
    ctx: ParamContext,
    radii: Option<EscapeRadii>,
}

pub struct FibdynRaster {
    raster: Raster,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), (FibdynStatus, String)>) -> FibdynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FibdynStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside fibdyn".into());
            FibdynStatus::Panic
        }
    }
}

fn lib(e: Error) -> (FibdynStatus, String) {
    ((&e).into(), e.to_string())
}

fn null(what: &str) -> (FibdynStatus, String) {
    (FibdynStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (FibdynStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (FibdynStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FibdynStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (FibdynStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn fibdyn_status_message(status: FibdynStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FibdynStatus::Ok => c"ok",
        FibdynStatus::NullPointer => c"null pointer argument",
        FibdynStatus::InvalidArgument => c"invalid argument",
        FibdynStatus::InverseUndefined => c"inverse undefined: second coordinate is zero",
        FibdynStatus::Overflow => c"iterate overflowed",
        FibdynStatus::NonRealParameter => c"parameter is not real",
        FibdynStatus::ParameterOutOfRange => c"parameter out of range",
        FibdynStatus::RadiusTooSmall => c"radius below the admissible bound",
        FibdynStatus::UnsupportedFormat => c"unsupported output format",
        FibdynStatus::Io => c"i/o error",
        FibdynStatus::Internal => c"internal error",
        FibdynStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fibdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Create a context for `c = c_re + i c_im`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_context_new(c_re: f64, c_im: f64, out_ctx: *mut *mut FibdynContext) -> FibdynStatus {
    guard(|| {
        let slot = out(out_ctx, "out_ctx")?;
        if !(c_re.is_finite() && c_im.is_finite()) {
            return Err((FibdynStatus::InvalidArgument, "c must be finite".into()));
        }
        let ctx = ParamContext::new(Complex64::new(c_re, c_im));
        let radii = escape_radii(ctx.c).ok();
        *slot = Box::into_raw(Box::new(FibdynContext { ctx, radii }));
        Ok(())
    })
}

/// # Safety
/// `ctx` must come from [`fibdyn_context_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_context_free(ctx: *mut FibdynContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// One step of the map or its inverse.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_step(
    ctx: *const FibdynContext,
    z: FibdynPoint,
    direction: FibdynDirection,
    out_z: *mut FibdynPoint,
) -> FibdynStatus {
    guard(|| {
        let h = deref(ctx, "ctx")?;
        let slot = out(out_z, "out_z")?;
        let w = match direction {
            FibdynDirection::Forward => dynamics::forward(h.ctx.c, z.into()),
            FibdynDirection::Backward => dynamics::inverse(h.ctx.c, z.into()),
        }
        .map_err(lib)?;
        *slot = w.into();
        Ok(())
    })
}

/// Escape classification with at most `budget` steps. A `radius` of 0
/// selects the default radius for the direction.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_classify(
    ctx: *const FibdynContext,
    z: FibdynPoint,
    direction: FibdynDirection,
    radius: f64,
    budget: u64,
    out_orbit: *mut FibdynOrbit,
) -> FibdynStatus {
    guard(|| {
        let h = deref(ctx, "ctx")?;
        let slot = out(out_orbit, "out_orbit")?;
        let radii = h.radii.ok_or_else(|| lib(escape_radii(h.ctx.c).unwrap_err()))?;
        let budget = usize::try_from(budget).unwrap_or(usize::MAX);
        let status = match direction {
            FibdynDirection::Forward => {
                let r = if radius == 0.0 { radii.r0 } else { radius };
                EscapeClassifier::<Complex64>::forward(&h.ctx, r).map_err(lib)?.classify_forward(z.into(), budget)
            }
            FibdynDirection::Backward => {
                let r = if radius == 0.0 { radii.r1 } else { radius };
                EscapeClassifier::<Complex64>::backward(&h.ctx, r).map_err(lib)?.classify_backward(z.into(), budget)
            }
        };
        *slot = match status {
            OrbitStatus::Bounded => FibdynOrbit { kind: FibdynOrbitKind::Bounded, index: 0 },
            OrbitStatus::Escaped(n) => FibdynOrbit { kind: FibdynOrbitKind::Escaped, index: n as u64 },
            OrbitStatus::InverseUndefined(n) => FibdynOrbit { kind: FibdynOrbitKind::InverseUndefined, index: n as u64 },
        };
        Ok(())
    })
}

/// Forward radius `r0`, backward radius `r1` and bidisk radius `r2`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_radii(ctx: *const FibdynContext, out_radii: *mut FibdynRadii) -> FibdynStatus {
    guard(|| {
        let h = deref(ctx, "ctx")?;
        let slot = out(out_radii, "out_radii")?;
        let r = escape_radii(h.ctx.c).map_err(lib)?;
        *slot = FibdynRadii { r0: r.r0, r1: r.r1, r2: r.r2 };
        Ok(())
    })
}

/// `out_fixed[0]` is alpha, `out_fixed[1]` is theta.
///
/// # Safety
/// `out_fixed` must point to two writable elements.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_fixed_points(ctx: *const FibdynContext, out_fixed: *mut FibdynFixedPoint) -> FibdynStatus {
    guard(|| {
        let h = deref(ctx, "ctx")?;
        if out_fixed.is_null() {
            return Err(null("out_fixed"));
        }
        let set = fixed_points(&h.ctx);
        for (i, info) in [set.alpha, set.theta].iter().enumerate() {
            out_fixed.add(i).write(FibdynFixedPoint {
                a_re: info.a.re,
                a_im: info.a.im,
                eig_re: info.eigenvalues.map(|e| e.re),
                eig_im: info.eigenvalues.map(|e| e.im),
                kind: info.kind.into(),
            });
        }
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_cycle(ctx: *const FibdynContext, out_cycle: *mut FibdynCycle) -> FibdynStatus {
    guard(|| {
        let h = deref(ctx, "ctx")?;
        let slot = out(out_cycle, "out_cycle")?;
        let info = three_cycle(&h.ctx).map_err(lib)?;
        *slot = FibdynCycle {
            points: info.points.map(FibdynPoint::from),
            eig_re: info.eigenvalues.map(|e| e.re),
            eig_im: info.eigenvalues.map(|e| e.im),
            det_re: info.det.re,
            det_im: info.det.im,
        };
        Ok(())
    })
}

/// Rasterize `spec` for the context's parameter.
///
/// # Safety
/// Pointers must be valid and `spec->mode` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_render(
    ctx: *const FibdynContext,
    spec: *const FibdynRenderSpec,
    out_raster: *mut *mut FibdynRaster,
) -> FibdynStatus {
    guard(|| {
        let h = deref(ctx, "ctx")?;
        let s = deref(spec, "spec")?;
        let slot = out(out_raster, "out_raster")?;
        let mut mode: RenderMode = text(s.mode, "spec->mode")?.parse().map_err(lib)?;
        if let RenderMode::KplusComplexSlice { y0 } = &mut mode {
            *y0 = Complex64::new(s.y0_re, s.y0_im);
        }
        let spec = RasterSpec {
            mode,
            c: h.ctx.c,
            window: s.window,
            width: s.width as usize,
            height: s.height as usize,
            budget: usize::try_from(s.budget).unwrap_or(usize::MAX),
            seed: s.seed,
        };
        let raster = rasterize(&spec).map_err(lib)?;
        *slot = Box::into_raw(Box::new(FibdynRaster { raster }));
        Ok(())
    })
}

/// Row-major pixel codes. The array has `width * height` entries and
/// lives as long as the raster.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_raster_codes(
    raster: *const FibdynRaster,
    out_codes: *mut *const u8,
    out_width: *mut u32,
    out_height: *mut u32,
) -> FibdynStatus {
    guard(|| {
        let r = &deref(raster, "raster")?.raster;
        *out(out_codes, "out_codes")? = r.codes.as_ptr();
        *out(out_width, "out_width")? = r.spec.width as u32;
        *out(out_height, "out_height")? = r.spec.height as u32;
        Ok(())
    })
}

/// Encode as "ppm", "csv" or "json-meta". Free the buffer with
/// [`fibdyn_buffer_free`].
///
/// # Safety
/// Pointers must be valid and `format` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_raster_encode(
    raster: *const FibdynRaster,
    format: *const c_char,
    out_data: *mut *mut u8,
    out_len: *mut usize,
) -> FibdynStatus {
    guard(|| {
        let r = &deref(raster, "raster")?.raster;
        let format: OutputFormat = text(format, "format")?.parse().map_err(lib)?;
        let data_slot = out(out_data, "out_data")?;
        let len_slot = out(out_len, "out_len")?;
        let bytes = encode_output(r, format, &Palette::for_mode(r.spec.mode)).map_err(lib)?;
        let boxed = bytes.into_boxed_slice();
        *len_slot = boxed.len();
        *data_slot = Box::into_raw(boxed) as *mut u8;
        Ok(())
    })
}

/// # Safety
/// `data` and `len` must come from one [`fibdyn_raster_encode`] call.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_buffer_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)));
    }
}

/// # Safety
/// `raster` must come from [`fibdyn_render`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fibdyn_raster_free(raster: *mut FibdynRaster) {
    if !raster.is_null() {
        drop(Box::from_raw(raster));
    }
}
