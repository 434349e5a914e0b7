//! Frequency vectors and the weight families of the weighted Wiener spaces.
//!
//! Indices in [`FrequencyVector::support`] are 1-based so that the support
//! and width formulas read the same as their usual definitions. Storage is
//! 0-based. All logarithms are natural.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An integer vector `k` indexing the Fourier mode `exp(2πi k·x)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(Vec<i64>);

impl FrequencyVector {
    pub fn new(components: Vec<i64>) -> Result<Self> {
        if components.is_empty() {
            return invalid("frequency vector needs dimension d >= 1");
        }
        Ok(Self(components))
    }

    pub fn zero(d: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        Self(vec![0; d])
    }

    /// The frequency `t` placed in coordinate `index` (0-based) of a `d`-vector.
    pub fn axis(d: usize, index: usize, t: i64) -> Self {
        let mut k = Self::zero(d);
        k.0[index] = t;
        k
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// 1-based indices of the nonzero components, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, _)| j + 1)
            .collect()
    }

    /// `max supp − min supp + 1`, or 0 for the zero vector.
    pub fn width(&self) -> usize {
        let first = self.0.iter().position(|&c| c != 0);
        let last = self.0.iter().rposition(|&c| c != 0);
        match (first, last) {
            (Some(lo), Some(hi)) => hi - lo + 1,
            _ => 0,
        }
    }

    /// `min_{j ∈ supp} |k_j|`, `None` for the zero vector.
    pub fn min_abs_on_support(&self) -> Option<u64> {
        self.0
            .iter()
            .filter(|&&c| c != 0)
            .map(|c| c.unsigned_abs())
            .min()
    }

    /// `min_{j ∈ supp} log |k_j|`, 0 for the zero vector.
    pub fn min_log_abs(&self) -> f64 {
        self.min_abs_on_support()
            .map_or(0.0, |a| (a as f64).ln())
    }

    /// True when every component is a multiple of `p`.
    pub fn divisible_by(&self, p: u64) -> bool {
        self.0.iter().all(|&c| c.unsigned_abs() % p == 0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|&c| -c).collect())
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for FrequencyVector {
    type Err = Error;

    /// Parses a comma-separated list such as `2,-1,0`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::InvalidArgument(format!("bad component {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

/// Every `k ∈ [−bound, bound]^d`, lexicographic, zero included.
pub fn frequency_box(d: usize, bound: u32) -> Vec<FrequencyVector> {
    assert!(d >= 1, "dimension must be at least 1");
    let b = i64::from(bound);
    let side = 2 * b + 1;
    let total = (side as usize).pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut k = vec![0i64; d];
            for slot in k.iter_mut().rev() {
                *slot = (idx % side as usize) as i64 - b;
                idx /= side as usize;
            }
            FrequencyVector(k)
        })
        .collect()
}

/// The weight families `r(k) ≥ 1` defining the weighted Wiener norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightFunction {
    /// `r ≡ 1`, the standard Wiener algebra.
    Unit,
    /// `max(1, log log min_{j∈supp} |k_j|)`.
    R0,
    /// `max(1, log min_{j∈supp} |k_j|)`.
    R1,
    /// `max(width(supp k), log min_{j∈supp} |k_j|)`.
    R2,
    /// `∏_j max(1, log |k_j|)`, factor 1 where `k_j = 0`.
    R3,
    /// `∏_j max(1, |k_j|)`.
    R4,
}

impl WeightFunction {
    pub const ALL: [WeightFunction; 6] = [
        WeightFunction::Unit,
        WeightFunction::R0,
        WeightFunction::R1,
        WeightFunction::R2,
        WeightFunction::R3,
        WeightFunction::R4,
    ];

    /// Evaluates `r(k)`. Every family returns exactly 1 at `k = 0`.
    pub fn weight(self, k: &FrequencyVector) -> f64 {
        let Some(min_abs) = k.min_abs_on_support() else {
            return 1.0;
        };
        match self {
            WeightFunction::Unit => 1.0,
            WeightFunction::R0 => 1f64.max(log_log(min_abs)),
            WeightFunction::R1 => 1f64.max((min_abs as f64).ln()),
            WeightFunction::R2 => (k.width() as f64).max((min_abs as f64).ln()),
            WeightFunction::R3 => k
                .components()
                .iter()
                .filter(|&&c| c != 0)
                .map(|c| 1f64.max((c.unsigned_abs() as f64).ln()))
                .product(),
            WeightFunction::R4 => k
                .components()
                .iter()
                .map(|c| c.unsigned_abs().max(1) as f64)
                .product(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightFunction::Unit => "unit",
            WeightFunction::R0 => "r0",
            WeightFunction::R1 => "r1",
            WeightFunction::R2 => "r2",
            WeightFunction::R3 => "r3",
            WeightFunction::R4 => "r4",
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightFunction::ALL
            .into_iter()
            .find(|w| w.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown weight family {s:?}")))
    }
}

// log log x, with -inf for x <= 1 where the inner log is not positive.
fn log_log(x: u64) -> f64 {
    if x <= 1 {
        f64::NEG_INFINITY
    } else {
        (x as f64).ln().ln()
    }
}
