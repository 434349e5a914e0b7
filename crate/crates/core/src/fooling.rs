//! Lower-bound certificates in the standard Wiener algebra and in the `r0`
//! space: the constant fooling function for rules with `Σ|c_h| ≤ 1/2`, and
//! `g*(x) = 1 − cos(2πqx)` with `q` found by an explicit simultaneous
//! Dirichlet search otherwise.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::frequency::FrequencyVector;
use crate::quadrature::{apply_complex, QuadratureRule};
use crate::testfn::FourierPolynomial;

pub const DEFAULT_Q_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FoolingSearchParams {
    pub rho: f64,
    pub q_cap: u64,
}

impl FoolingSearchParams {
    pub fn new(rho: f64, q_cap: u64) -> Result<Self> {
        if rho.is_nan() || rho < 2.0 || rho.is_infinite() {
            return invalid(format!("rho must be a finite real >= 2, got {rho}"));
        }
        if q_cap == 0 {
            return invalid("q_cap must be positive");
        }
        Ok(Self { rho, q_cap })
    }
}

/// `1 − 1/(ρ Σ|c_h|)`, checked to lie in `[−1, 1]`.
fn arccos_argument(rho: f64, coeff_abs_sum: f64) -> Result<f64> {
    let arg = 1.0 - 1.0 / (rho * coeff_abs_sum);
    if !arg.is_finite() || !(-1.0..=1.0).contains(&arg) {
        return invalid(format!("arccos argument {arg} outside [-1, 1]"));
    }
    Ok(arg)
}

/// `⌈2π / arccos(1 − (ρ Σ|c_h|)^{−1})⌉`, the per-node base of the Dirichlet bound.
pub fn dirichlet_base(rho: f64, coeff_abs_sum: f64) -> Result<u64> {
    let arg = arccos_argument(rho, coeff_abs_sum)?;
    let base = (TAU / arg.acos()).ceil();
    if !base.is_finite() || base > u64::MAX as f64 {
        return Err(Error::Overflow("Dirichlet base"));
    }
    Ok(base as u64)
}

/// `M = ⌈2π / arccos(1 − (ρ Σ|c_h|)^{−1})⌉^n`.
pub fn dirichlet_m(n: u32, rho: f64, coeff_abs_sum: f64) -> Result<u128> {
    let base = dirichlet_base(rho, coeff_abs_sum)?;
    (base as u128).checked_pow(n).ok_or(Error::Overflow("Dirichlet bound M"))
}

/// Search threshold `θ = arccos(1 − (ρ Σ|c_h|)^{−1}) / (2π)`.
pub fn dirichlet_threshold(rho: f64, coeff_abs_sum: f64) -> Result<f64> {
    Ok(arccos_argument(rho, coeff_abs_sum)?.acos() / TAU)
}

/// `g*(x) = 1 − cos(2πqx)` as a univariate Fourier polynomial.
pub fn g_star(q: u64) -> Result<FourierPolynomial> {
    if q == 0 {
        return invalid("q must be >= 1");
    }
    let q = i64::try_from(q).map_err(|_| Error::Overflow("frequency q"))?;
    let mut f = FourierPolynomial::constant(1, 1.0);
    f.add_term(FrequencyVector::axis(1, 0, q), Complex64::new(-0.5, 0.0))?;
    f.add_term(FrequencyVector::axis(1, 0, -q), Complex64::new(-0.5, 0.0))?;
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoolingResult {
    pub q: u64,
    /// `ε_h = q x_h − round(q x_h)`, one per node.
    pub residuals: Vec<f64>,
    /// `|Q(g*)|`.
    pub rule_value: f64,
    /// `(1 − 1/ρ)/2`, the certified lower bound on the normalized error.
    pub normalized_error_lb: f64,
    /// `|I(g*) − Q(g*)| / ‖g*‖` actually attained.
    pub normalized_error: f64,
    pub threshold: f64,
    /// Upper end of the search range, `min(M, q_cap)`.
    pub search_limit: u64,
}

// Signed residual of q·num/den to the nearest integer, exact in integers.
fn residual(q: u64, num: u64, den: u64) -> (u64, f64) {
    let r = ((q as u128 * num as u128) % den as u128) as u64;
    let dist = r.min(den - r);
    let signed = if r <= den - r { r as f64 / den as f64 } else { -((den - r) as f64 / den as f64) };
    (dist, signed)
}

/// Smallest `q ≤ min(M, q_cap)` with every `dist(q x_h, ℤ) < θ`, for a
/// univariate rule with `Σ|c_h| > 1/2`.
pub fn fooling_search(rule: &QuadratureRule, params: FoolingSearchParams) -> Result<FoolingResult> {
    if rule.dim() != 1 {
        return invalid(format!("fooling search needs a univariate rule, got d = {}", rule.dim()));
    }
    let abs_sum = rule.coefficient_abs_sum();
    if abs_sum <= 0.5 {
        return invalid(format!("Σ|c_h| = {abs_sum} <= 1/2; use the constant fooling function"));
    }
    let theta = dirichlet_threshold(params.rho, abs_sum)?;
    let n = u32::try_from(rule.len()).unwrap_or(u32::MAX);
    let limit = match dirichlet_m(n, params.rho, abs_sum) {
        Ok(m) => m.min(params.q_cap as u128) as u64,
        Err(Error::Overflow(_)) => params.q_cap,
        Err(e) => return Err(e),
    };
    let nodes: Vec<(u64, u64)> = rule
        .points()
        .nodes()
        .iter()
        .map(|x| (x.numerators()[0], x.den()))
        .collect();
    // dist < θ  ⇔  dist_num < θ·den; compared in f64 on the exact integer distance
    let fits = |q: u64| {
        nodes
            .iter()
            .all(|&(num, den)| (residual(q, num, den).0 as f64) < theta * den as f64)
    };
    let Some(q) = (1..=limit).into_par_iter().find_first(|&q| fits(q)) else {
        let best = (1..=limit)
            .into_par_iter()
            .map(|q| {
                nodes
                    .iter()
                    .map(|&(num, den)| residual(q, num, den).0 as f64 / den as f64)
                    .fold(0.0, f64::max)
            })
            .reduce(|| f64::INFINITY, f64::min);
        return Err(Error::SearchExhausted { tried: limit, best });
    };
    let residuals = nodes.iter().map(|&(num, den)| residual(q, num, den).1).collect();
    let g = g_star(q)?;
    let value = apply_complex(rule, &g)?;
    Ok(FoolingResult {
        q,
        residuals,
        rule_value: value.norm(),
        normalized_error_lb: (1.0 - 1.0 / params.rho) / 2.0,
        normalized_error: (g.integral() - value).norm() / 2.0,
        threshold: theta,
        search_limit: limit,
    })
}

/// The certificate that applies to a given univariate rule.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum FoolingCertificate {
    /// `Σ|c_h| ≤ 1/2`: `g ≡ 1` has `|I(g) − Q(g)| ≥ 1/2` with `‖g‖ = 1`.
    Constant { coeff_abs_sum: f64, error: f64 },
    Oscillatory(FoolingResult),
}

impl FoolingCertificate {
    /// Certified lower bound on the worst-case error in the standard Wiener algebra.
    pub fn lower_bound(&self) -> f64 {
        match self {
            FoolingCertificate::Constant { .. } => 0.5,
            FoolingCertificate::Oscillatory(r) => r.normalized_error_lb,
        }
    }
}

pub fn fooling_certificate(rule: &QuadratureRule, params: FoolingSearchParams) -> Result<FoolingCertificate> {
    let abs_sum = rule.coefficient_abs_sum();
    if abs_sum <= 0.5 {
        let one = FourierPolynomial::constant(rule.dim(), 1.0);
        let error = (one.integral() - apply_complex(rule, &one)?).norm();
        return Ok(FoolingCertificate::Constant { coeff_abs_sum: abs_sum, error });
    }
    fooling_search(rule, params).map(FoolingCertificate::Oscillatory)
}

/// `n^wor(ε, d, F_{d,r0}) ≥ exp((2/3)ε^{−1} − 1) / log 6`.
pub fn r0_complexity_lower_bound(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps must lie in (0, 1), got {eps}"));
    }
    Ok(((2.0 / 3.0) / eps - 1.0).exp() / 6f64.ln())
}

/// `1 + max(1, log(n log 6))`, the `r0` norm ceiling of `g**` for an `n`-point rule.
pub fn r0_norm_ceiling(n: u32) -> f64 {
    1.0 + 1f64.max((n as f64 * 6f64.ln()).ln())
}
