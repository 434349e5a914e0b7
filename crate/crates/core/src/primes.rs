//! Sieving, the prime band `P_m = {⌈m/2⌉ < p ≤ m}`, and empirical density
//! constants for `|P_m|` relative to `m / log m`.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Largest prime accepted by the point-set constructions (`p² < 2^62`).
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// All primes `≤ limit`, ascending.
pub fn sieve(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return invalid(format!("sieve limit must be >= 2, got {limit}"));
    }
    let n = usize::try_from(limit).map_err(|_| crate::Error::Overflow("sieve size"))?;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    Ok((2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect())
}

/// Trial division; fine for the `p ≤ 2^31` range used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeBand {
    pub m: u64,
    pub primes: Vec<u64>,
}

impl PrimeBand {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `Σ_{p∈P_m} p²`, the size of the Korobov multiset unions.
    pub fn sum_of_squares(&self) -> u64 {
        self.primes.iter().map(|p| p * p).sum()
    }

    pub fn min_prime(&self) -> u64 {
        self.primes[0]
    }
}

/// Lower edge of the band, `⌈m/2⌉`.
fn band_floor(m: u64) -> u64 {
    m.div_ceil(2)
}

pub fn prime_band(m: u64) -> Result<PrimeBand> {
    if m < 2 {
        return invalid(format!("prime band needs m >= 2, got {m}"));
    }
    let lo = band_floor(m);
    let primes = sieve(m)?.into_iter().filter(|&p| p > lo).collect();
    Ok(PrimeBand { m, primes })
}

/// Empirical replacement for the prime-counting constants: over `m` in
/// `[m_lo, m_hi]`, `c_hat ≤ |P_m| log m / m ≤ c_upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityConstants {
    pub c_hat: f64,
    pub c_upper: f64,
    pub m_lo: u64,
    pub m_hi: u64,
}

impl DensityConstants {
    pub fn covers(&self, m: u64) -> bool {
        (self.m_lo..=self.m_hi).contains(&m)
    }
}

pub fn density_ratio(band_size: usize, m: u64) -> f64 {
    band_size as f64 * (m as f64).ln() / m as f64
}

pub fn density_constants(m_lo: u64, m_hi: u64) -> Result<DensityConstants> {
    if m_lo < 2 || m_lo > m_hi {
        return invalid(format!("invalid m range [{m_lo}, {m_hi}]"));
    }
    let primes = sieve(m_hi)?;
    let mut c_hat = f64::INFINITY;
    let mut c_upper = 0f64;
    for m in m_lo..=m_hi {
        // |P_m| = π(m) − π(⌈m/2⌉)
        let lo = band_floor(m);
        let count = primes.partition_point(|&p| p <= m) - primes.partition_point(|&p| p <= lo);
        let ratio = density_ratio(count, m);
        c_hat = c_hat.min(ratio);
        c_upper = c_upper.max(ratio);
    }
    Ok(DensityConstants { c_hat, c_upper, m_lo, m_hi })
}
