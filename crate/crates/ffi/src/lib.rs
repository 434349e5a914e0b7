//! C ABI over `wiener_qmc`.
//!
//! Objects are opaque heap handles created by `wq_*_new`-style functions and
//! released with the matching `wq_*_free`. Every fallible call returns a
//! [`WqStatus`]; on failure `wq_last_error()` describes the problem until the
//! next call on the same thread. Panics are caught at the boundary and
//! reported as `WQ_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wiener_qmc::fooling::{dirichlet_m, r0_complexity_lower_bound};
use wiener_qmc::frequency::frequency_box;
use wiener_qmc::hoeffding::min_n_hoeffding;
use wiener_qmc::pointsets::{korobov_s, korobov_t, lattice, union_p1, union_p2, GeneratingVector};
use wiener_qmc::primes::density_constants;
use wiener_qmc::quadrature::{apply_complex, exp_sum, origin_half_rule, qmc_rule, worst_case_error_on_set};
use wiener_qmc::randomized::RandomizedLatticeRule;
use wiener_qmc::{Complex64, Error, FourierPolynomial, FrequencyVector, PointSet, QuadratureRule, WeightFunction};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WqStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    DimensionMismatch = 3,
    SearchExhausted = 4,
    Overflow = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WqWeight {
    Unit = 0,
    R0 = 1,
    R1 = 2,
    R2 = 3,
    R3 = 4,
    R4 = 5,
}

impl From<WqWeight> for WeightFunction {
    fn from(w: WqWeight) -> Self {
        match w {
            WqWeight::Unit => WeightFunction::Unit,
            WqWeight::R0 => WeightFunction::R0,
            WqWeight::R1 => WeightFunction::R1,
            WqWeight::R2 => WeightFunction::R2,
            WqWeight::R3 => WeightFunction::R3,
            WqWeight::R4 => WeightFunction::R4,
        }
    }
}

/// Opaque point set.
pub struct WqPointSet(PointSet);

/// Opaque quadrature rule.
pub struct WqRule(QuadratureRule);

/// Opaque Fourier polynomial.
pub struct WqPolynomial(FourierPolynomial);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn status_of(e: &Error) -> WqStatus {
    match e {
        Error::InvalidArgument(_) | Error::Json(_) => WqStatus::InvalidArgument,
        Error::DimensionMismatch { .. } => WqStatus::DimensionMismatch,
        Error::SearchExhausted { .. } => WqStatus::SearchExhausted,
        Error::Overflow(_) => WqStatus::Overflow,
        Error::Io(_) => WqStatus::Io,
    }
}

fn guard<F>(body: F) -> WqStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => WqStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed as {what}"));
            WqStatus::NullPointer
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            WqStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
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

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn frequency(k: *const i64, d: usize) -> Result<FrequencyVector, Failure> {
    Ok(FrequencyVector::new(slice(k, d, "k")?.to_vec())?)
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next `wq_*` call on the same thread.
#[no_mangle]
pub extern "C" fn wq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

unsafe fn new_point_set(out: *mut *mut WqPointSet, make: impl FnOnce() -> Result<PointSet, Error>) -> WqStatus {
    guard(|| {
        let set = make()?;
        write(out, Box::into_raw(Box::new(WqPointSet(set))), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_korobov_s(d: usize, p: u64, out: *mut *mut WqPointSet) -> WqStatus {
    new_point_set(out, || korobov_s(d, p))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_korobov_t(d: usize, p: u64, out: *mut *mut WqPointSet) -> WqStatus {
    new_point_set(out, || korobov_t(d, p))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_union_p1(d: usize, m: u64, out: *mut *mut WqPointSet) -> WqStatus {
    new_point_set(out, || union_p1(d, m))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_union_p2(d: usize, m: u64, out: *mut *mut WqPointSet) -> WqStatus {
    new_point_set(out, || union_p2(d, m))
}

/// Rank-1 lattice `{(h z mod p)/p}` with `z` of length `d`.
///
/// # Safety
/// `z` must point to `d` readable values.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_lattice(p: u64, z: *const u64, d: usize, out: *mut *mut WqPointSet) -> WqStatus {
    guard(|| {
        let g = GeneratingVector::new(p, slice(z, d, "z")?.to_vec())?;
        write(out, Box::into_raw(Box::new(WqPointSet(lattice(&g)))), "out")
    })
}

/// Number of nodes, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_len(set: *const WqPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Dimension, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_dim(set: *const WqPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies node `index` as `dim` numerators plus the common denominator.
///
/// # Safety
/// `numerators` must have room for `dim` values.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_node(
    set: *const WqPointSet,
    index: usize,
    numerators: *mut u64,
    den: *mut u64,
) -> WqStatus {
    guard(|| {
        let set = &get(set, "set")?.0;
        let Some(node) = set.nodes().get(index) else {
            return Err(Error::InvalidArgument(format!("node index {index} out of range 0..{}", set.len())).into());
        };
        if numerators.is_null() {
            return Err(Failure::Null("numerators"));
        }
        ptr::copy_nonoverlapping(node.numerators().as_ptr(), numerators, node.dim());
        write(den, node.den(), "den")
    })
}

/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wq_point_set_free(set: *mut WqPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Equal-weight rule on a copy of `set`.
///
/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wq_rule_qmc(set: *const WqPointSet, out: *mut *mut WqRule) -> WqStatus {
    guard(|| {
        let rule = qmc_rule(get(set, "set")?.0.clone())?;
        write(out, Box::into_raw(Box::new(WqRule(rule))), "out")
    })
}

/// Rule with explicit coefficients, one per node of `set`.
///
/// # Safety
/// `coefficients` must point to `len` readable values.
#[no_mangle]
pub unsafe extern "C" fn wq_rule_new(
    set: *const WqPointSet,
    coefficients: *const f64,
    len: usize,
    out: *mut *mut WqRule,
) -> WqStatus {
    guard(|| {
        let c = slice(coefficients, len, "coefficients")?.to_vec();
        let rule = QuadratureRule::new(get(set, "set")?.0.clone(), c)?;
        write(out, Box::into_raw(Box::new(WqRule(rule))), "out")
    })
}

/// The rule `f(0)/2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_rule_origin_half(d: usize, out: *mut *mut WqRule) -> WqStatus {
    guard(|| write(out, Box::into_raw(Box::new(WqRule(origin_half_rule(d)?))), "out"))
}

/// # Safety
/// `rule` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wq_rule_len(rule: *const WqRule) -> usize {
    rule.as_ref().map_or(0, |r| r.0.len())
}

/// # Safety
/// `rule` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wq_rule_free(rule: *mut WqRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// `Σ_h c_h exp(2πi k·x_h)`.
///
/// # Safety
/// `k` must point to `d` readable values; `re`, `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_exp_sum(rule: *const WqRule, k: *const i64, d: usize, re: *mut f64, im: *mut f64) -> WqStatus {
    guard(|| {
        let s = exp_sum(&get(rule, "rule")?.0, &frequency(k, d)?)?;
        write(re, s.re, "re")?;
        write(im, s.im, "im")
    })
}

/// Worst-case error over every `k ∈ [−bound, bound]^d`.
///
/// # Safety
/// `rule` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_wce_box(rule: *const WqRule, bound: u32, weight: WqWeight, out: *mut f64) -> WqStatus {
    guard(|| {
        let rule = &get(rule, "rule")?.0;
        let e = worst_case_error_on_set(rule, &frequency_box(rule.dim(), bound), weight.into())?;
        write(out, e, "out")
    })
}

/// # Safety
/// `k` must point to `d` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_weight(weight: WqWeight, k: *const i64, d: usize, out: *mut f64) -> WqStatus {
    guard(|| write(out, WeightFunction::from(weight).weight(&frequency(k, d)?), "out"))
}

/// The zero polynomial in `d` variables.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_polynomial_new(d: usize, out: *mut *mut WqPolynomial) -> WqStatus {
    guard(|| {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()).into());
        }
        write(out, Box::into_raw(Box::new(WqPolynomial(FourierPolynomial::zero(d)))), "out")
    })
}

/// Adds `(re + i im) exp(2πi k·x)`.
///
/// # Safety
/// `poly` must be a live handle; `k` must point to `d` readable values.
#[no_mangle]
pub unsafe extern "C" fn wq_polynomial_add_term(poly: *mut WqPolynomial, k: *const i64, d: usize, re: f64, im: f64) -> WqStatus {
    guard(|| {
        let poly = &mut get_mut(poly, "poly")?.0;
        poly.add_term(frequency(k, d)?, Complex64::new(re, im))?;
        Ok(())
    })
}

/// Parses `[[k, re, im], ...]`.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wq_polynomial_from_json(json: *const c_char, out: *mut *mut WqPolynomial) -> WqStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Error::InvalidArgument(format!("JSON is not UTF-8: {e}")))?;
        let poly = FourierPolynomial::from_json(text)?;
        write(out, Box::into_raw(Box::new(WqPolynomial(poly))), "out")
    })
}

/// `Σ_k |f̂(k)| r(k)`.
///
/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_polynomial_norm(poly: *const WqPolynomial, weight: WqWeight, out: *mut f64) -> WqStatus {
    guard(|| write(out, get(poly, "poly")?.0.norm(weight.into()), "out"))
}

/// # Safety
/// `poly` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wq_polynomial_free(poly: *mut WqPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// `Q(f)`; the imaginary part vanishes for real-valued `f` up to rounding.
///
/// # Safety
/// Handles must be live; `re`, `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_apply(rule: *const WqRule, poly: *const WqPolynomial, re: *mut f64, im: *mut f64) -> WqStatus {
    guard(|| {
        let q = apply_complex(&get(rule, "rule")?.0, &get(poly, "poly")?.0)?;
        write(re, q.re, "re")?;
        write(im, q.im, "im")
    })
}

/// Mean `|I(f) − Q(f)|` of the randomized lattice rule over trials `0..trials`.
///
/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_randomized_error(
    m: u64,
    seed: u64,
    poly: *const WqPolynomial,
    trials: u64,
    out: *mut f64,
) -> WqStatus {
    guard(|| {
        let poly = &get(poly, "poly")?.0;
        let rule = RandomizedLatticeRule::new(m, poly.dim(), seed)?;
        write(out, rule.empirical_randomized_error(poly, trials)?, "out")
    })
}

/// Smallest `|P_m| log m / m` over `m ∈ [m_lo, m_hi]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_density_c_hat(m_lo: u64, m_hi: u64, out: *mut f64) -> WqStatus {
    guard(|| write(out, density_constants(m_lo, m_hi)?.c_hat, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_min_n_hoeffding(delta: f64, d: usize, out: *mut u64) -> WqStatus {
    guard(|| write(out, min_n_hoeffding(delta, d)?, "out"))
}

/// `WQ_STATUS_OVERFLOW` when the value does not fit in 64 bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_dirichlet_m(n: u32, rho: f64, coeff_abs_sum: f64, out: *mut u64) -> WqStatus {
    guard(|| {
        let m = u64::try_from(dirichlet_m(n, rho, coeff_abs_sum)?).map_err(|_| Error::Overflow("Dirichlet M"))?;
        write(out, m, "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wq_r0_complexity_lower_bound(eps: f64, out: *mut f64) -> WqStatus {
    guard(|| write(out, r0_complexity_lower_bound(eps)?, "out"))
}
