//! Error bounds and point-count calculators. Counts are exact sums over the
//! sieved prime band, never asymptotic forms with unspecified constants.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hoeffding::min_n_hoeffding;
use crate::primes::prime_band;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps must lie in (0, 1), got {eps}"));
    }
    Ok(())
}

fn check_c_hat(c_hat: f64) -> Result<()> {
    if c_hat.is_nan() || c_hat <= 0.0 || c_hat.is_infinite() {
        return invalid(format!("c_hat must be positive, got {c_hat}"));
    }
    Ok(())
}

fn check_m(m: u64) -> Result<()> {
    if m < 2 {
        return invalid(format!("m must be >= 2, got {m}"));
    }
    Ok(())
}

/// Sizing of a construction for a target error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sizing {
    /// Band parameter; `None` where the construction has no prime band.
    pub m: Option<u64>,
    /// Number of points (or the cardinality bound for randomized rules).
    pub n: u64,
    /// Error bound attained at this sizing.
    pub bound: f64,
}

/// Worst-case error bound `12/(ĉ m)` in the `r2` space.
pub fn wce_bound_thm2(m: u64, c_hat: f64) -> Result<f64> {
    check_m(m)?;
    check_c_hat(c_hat)?;
    Ok(12.0 / (c_hat * m as f64))
}

/// Worst-case error bound `12 d/(ĉ m)` in the `r3` space.
pub fn wce_bound_thm4(m: u64, d: usize, c_hat: f64) -> Result<f64> {
    check_m(m)?;
    check_c_hat(c_hat)?;
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    Ok(12.0 * d as f64 / (c_hat * m as f64))
}

fn ceil_u64(x: f64) -> Result<u64> {
    if !x.is_finite() || x > u64::MAX as f64 {
        return Err(crate::Error::Overflow("band parameter m"));
    }
    Ok(x.ceil() as u64)
}

/// `m = ⌈12/(ĉ ε)⌉`, `n = Σ_{p∈P_m} p²`.
pub fn n_bound_thm2(eps: f64, c_hat: f64) -> Result<Sizing> {
    check_eps(eps)?;
    check_c_hat(c_hat)?;
    let m = ceil_u64(12.0 / (c_hat * eps))?.max(2);
    let n = prime_band(m)?.sum_of_squares();
    Ok(Sizing { m: Some(m), n, bound: wce_bound_thm2(m, c_hat)? })
}

/// `m = ⌈12 d/(ĉ ε)⌉`, `n = Σ_{p∈P_m} p²`.
pub fn n_bound_thm4(eps: f64, d: usize, c_hat: f64) -> Result<Sizing> {
    check_eps(eps)?;
    check_c_hat(c_hat)?;
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    let m = ceil_u64(12.0 * d as f64 / (c_hat * eps))?.max(2);
    let n = prime_band(m)?.sum_of_squares();
    Ok(Sizing { m: Some(m), n, bound: wce_bound_thm4(m, d, c_hat)? })
}

/// Randomized lattice rule: `m = ⌈4/(ĉ ε)⌉`; every realized rule has at most `m` points.
pub fn n_bound_thm3(eps: f64, c_hat: f64) -> Result<Sizing> {
    check_eps(eps)?;
    check_c_hat(c_hat)?;
    let m = ceil_u64(4.0 / (c_hat * eps))?.max(2);
    Ok(Sizing { m: Some(m), n: m, bound: 4.0 / (c_hat * m as f64) })
}

/// Hoeffding sample size with `δ = ε`; the worst-case error bound is `ε`.
pub fn n_bound_thm5(eps: f64, d: usize) -> Result<Sizing> {
    check_eps(eps)?;
    Ok(Sizing { m: None, n: min_n_hoeffding(eps, d)?, bound: eps })
}
