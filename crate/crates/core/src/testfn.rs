//! Fourier polynomials: finitely supported test functions with exact
//! integrals and exact weighted Wiener norms.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};
use crate::frequency::{FrequencyVector, WeightFunction};
use crate::pointsets::RationalNode;
use crate::rng::TrialRng;

/// `exp(2πi · phase/den)`.
pub fn unit_root(phase: u64, den: u64) -> Complex64 {
    let (s, c) = (TAU * (phase as f64 / den as f64)).sin_cos();
    Complex64::new(c, s)
}

/// `f(x) = Σ_k coeff(k) exp(2πi k·x)` over a finite set of frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPolynomial {
    dim: usize,
    coeffs: BTreeMap<FrequencyVector, Complex64>,
    real_valued: bool,
}

/// One `(k, re, im)` entry of the JSON test-function format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term(pub Vec<i64>, pub f64, pub f64);

impl FourierPolynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self { dim, coeffs: BTreeMap::new(), real_valued: true }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(FrequencyVector::zero(dim), Complex64::new(c, 0.0)).expect("dimension matches");
        f
    }

    /// The pure mode `e_k(x) = exp(2πi k·x)`.
    pub fn mode(k: FrequencyVector) -> Self {
        let mut f = Self::zero(k.dim());
        f.add_term(k, Complex64::new(1.0, 0.0)).expect("dimension matches");
        f
    }

    /// Adds `c` to the coefficient at `k`. Refreshes the real-valued flag.
    pub fn add_term(&mut self, k: FrequencyVector, c: Complex64) -> Result<()> {
        check_dim(self.dim, k.dim())?;
        *self.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        self.real_valued = self.is_conjugate_symmetric();
        Ok(())
    }

    pub fn from_terms(dim: usize, terms: &[Term]) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be >= 1");
        }
        let mut f = Self::zero(dim);
        for Term(k, re, im) in terms {
            if !re.is_finite() || !im.is_finite() {
                return invalid("coefficients must be finite");
            }
            check_dim(dim, k.len())?;
            *f.coeffs.entry(FrequencyVector::new(k.clone())?).or_insert(Complex64::new(0.0, 0.0)) +=
                Complex64::new(*re, *im);
        }
        f.real_valued = f.is_conjugate_symmetric();
        Ok(f)
    }

    /// Parses a JSON array of `[k, re, im]` triples. The dimension is taken
    /// from the first term.
    pub fn from_json(text: &str) -> Result<Self> {
        let terms: Vec<Term> = serde_json::from_str(text)?;
        let Some(first) = terms.first() else {
            return invalid("test function has no terms");
        };
        Self::from_terms(first.0.len(), &terms)
    }

    pub fn terms(&self) -> Vec<Term> {
        self.coeffs
            .iter()
            .map(|(k, c)| Term(k.components().to_vec(), c.re, c.im))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.terms()).expect("terms serialize")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&FrequencyVector, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, k: &FrequencyVector) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    fn is_conjugate_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(k, c)| self.coefficient(&k.neg()) == c.conj())
    }

    /// `I_d(f)`, the zero-frequency coefficient.
    pub fn integral(&self) -> Complex64 {
        self.coefficient(&FrequencyVector::zero(self.dim))
    }

    /// `Σ_k |f̂(k)| r(k)`.
    pub fn norm(&self, r: WeightFunction) -> f64 {
        self.coeffs.iter().map(|(k, c)| c.norm() * r.weight(k)).sum()
    }

    /// Evaluation at a rational node; each `k·x` is reduced mod 1 exactly.
    pub fn eval(&self, x: &RationalNode) -> Result<Complex64> {
        check_dim(self.dim, x.dim())?;
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| c * unit_root(x.phase(k.components()), x.den()))
            .sum())
    }

    /// Evaluation at a floating-point location.
    pub fn eval_f64(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let t: f64 = k.components().iter().zip(x).map(|(&kj, &xj)| kj as f64 * xj).sum();
                let (s, co) = (TAU * t.rem_euclid(1.0)).sin_cos();
                c * Complex64::new(co, s)
            })
            .sum())
    }

    /// Real part of [`FourierPolynomial::eval`], for real-valued functions.
    pub fn eval_real(&self, x: &RationalNode) -> Result<f64> {
        self.eval(x).map(|z| z.re)
    }
}

/// A random real-valued polynomial: a constant term in `[−1, 1]` plus
/// `n_terms` cosine modes `a (e_k + e_{−k})` with `k` uniform in
/// `[−box, box]^d ∖ {0}` and `a` uniform in `[−1, 1]`.
pub fn random_real_polynomial(
    d: usize,
    frequency_box: u32,
    n_terms: usize,
    seed: u64,
) -> Result<FourierPolynomial> {
    if d == 0 || frequency_box == 0 || n_terms == 0 {
        return invalid("random polynomial needs d, frequency_box and n_terms all >= 1");
    }
    let b = i64::from(frequency_box);
    let mut rng = TrialRng::new(seed, 0x7465_7374_666e);
    let mut f = FourierPolynomial::zero(d);
    let amplitude = |rng: &mut TrialRng| 2.0 * rng.unit_f64() - 1.0;
    let c0 = amplitude(&mut rng);
    *f.coeffs.entry(FrequencyVector::zero(d)).or_default() += c0;
    for _ in 0..n_terms {
        let k = loop {
            let k: Vec<i64> = (0..d).map(|_| rng.range_inclusive(-b, b)).collect();
            if k.iter().any(|&c| c != 0) {
                break FrequencyVector::new(k)?;
            }
        };
        let a = amplitude(&mut rng);
        let neg = k.neg();
        *f.coeffs.entry(k).or_default() += a;
        *f.coeffs.entry(neg).or_default() += a;
    }
    f.real_valued = true;
    Ok(f)
}
