//! Randomized rank-1 lattice rule: draw `p` uniformly from `P_m`, draw
//! `z` uniformly from `{1..p−1}^d`, then apply the `p`-point lattice QMC
//! rule. Draws are a pure function of `(seed, trial)`.

use rayon::prelude::*;

use crate::error::{check_dim, invalid, Result};
use crate::pointsets::{lattice, GeneratingVector};
use crate::primes::{prime_band, PrimeBand};
use crate::quadrature::{apply_complex, qmc_rule};
use crate::rng::TrialRng;
use crate::testfn::FourierPolynomial;

#[derive(Clone, Debug)]
pub struct RandomizedLatticeRule {
    m: u64,
    d: usize,
    seed: u64,
    band: PrimeBand,
}

impl RandomizedLatticeRule {
    pub fn new(m: u64, d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return invalid("dimension must be >= 1");
        }
        let band = prime_band(m)?;
        Ok(Self { m, d, seed, band })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn band(&self) -> &PrimeBand {
        &self.band
    }

    /// The `(p, z)` realized in trial `trial`.
    pub fn draw(&self, trial: u64) -> GeneratingVector {
        let mut rng = TrialRng::new(self.seed, trial);
        let p = self.band.primes[rng.below(self.band.len() as u64) as usize];
        let z = (0..self.d).map(|_| 1 + rng.below(p - 1)).collect();
        GeneratingVector::new(p, z).expect("drawn generating vector is valid")
    }

    /// `Q_{d,ω}(f)` for the rule drawn in `trial` (real part).
    pub fn randomized_estimate(&self, f: &FourierPolynomial, trial: u64) -> Result<f64> {
        Ok(self.estimate_complex(f, trial)?.re)
    }

    fn estimate_complex(&self, f: &FourierPolynomial, trial: u64) -> Result<num_complex::Complex64> {
        check_dim(self.d, f.dim())?;
        let rule = qmc_rule(lattice(&self.draw(trial)))?;
        apply_complex(&rule, f)
    }

    /// Mean of `|I(f) − Q_{d,ω}(f)|` over trials `0..n_trials`, summed in
    /// trial order.
    pub fn empirical_randomized_error(&self, f: &FourierPolynomial, n_trials: u64) -> Result<f64> {
        if n_trials == 0 {
            return invalid("n_trials must be >= 1");
        }
        check_dim(self.d, f.dim())?;
        let exact = f.integral();
        let errors = (0..n_trials)
            .into_par_iter()
            .map(|t| Ok((exact - self.estimate_complex(f, t)?).norm()))
            .collect::<Result<Vec<f64>>>()?;
        Ok(errors.iter().sum::<f64>() / n_trials as f64)
    }
}

/// `4 ‖f‖_{r1} / (ĉ m)`.
pub fn randomized_error_bound(m: u64, c_hat: f64, norm_r1: f64) -> Result<f64> {
    if m < 2 || c_hat.is_nan() || c_hat <= 0.0 {
        return invalid(format!("need m >= 2 and c_hat > 0, got m = {m}, c_hat = {c_hat}"));
    }
    Ok(4.0 * norm_r1 / (c_hat * m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::FrequencyVector;
    use crate::testfn::Term;

    #[test]
    fn draws_are_deterministic() {
        let r = RandomizedLatticeRule::new(40, 4, 99).unwrap();
        for t in 0..20 {
            assert_eq!(r.draw(t), r.draw(t));
        }
        assert_ne!(r.draw(0).z(), r.draw(1).z());
    }

    #[test]
    fn single_prime_band() {
        let r = RandomizedLatticeRule::new(10, 3, 1).unwrap();
        for t in 0..50 {
            assert_eq!(r.draw(t).p(), 7);
        }
    }

    #[test]
    fn prime_frequencies_are_uniform() {
        let r = RandomizedLatticeRule::new(20, 2, 5).unwrap();
        let trials = 100_000u64;
        let mut counts = std::collections::BTreeMap::new();
        for t in 0..trials {
            *counts.entry(r.draw(t).p()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.keys().copied().collect::<Vec<_>>(), vec![11, 13, 17, 19]);
        for c in counts.values() {
            let freq = *c as f64 / trials as f64;
            assert!((freq - 0.25).abs() <= 0.01, "{counts:?}");
        }
    }

    #[test]
    fn estimates() {
        let r = RandomizedLatticeRule::new(10, 1, 3).unwrap();
        let one = FourierPolynomial::constant(1, 1.0);
        for t in 0..10 {
            assert!((r.randomized_estimate(&one, t).unwrap() - 1.0).abs() < 1e-14);
        }
        // 25 z ≢ 0 mod 7 for every z in 1..=6
        let f = FourierPolynomial::from_terms(1, &[Term(vec![0], 1.0, 0.0), Term(vec![25], -0.5, 0.0), Term(vec![-25], -0.5, 0.0)])
            .unwrap();
        for t in 0..10 {
            assert!((r.randomized_estimate(&f, t).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(r.empirical_randomized_error(&one, 5).unwrap() < 1e-15);
        let single = r.empirical_randomized_error(&f, 1).unwrap();
        assert!((single - (1.0 - r.randomized_estimate(&f, 0).unwrap()).abs()).abs() < 1e-15);
        assert!(r.empirical_randomized_error(&f, 0).is_err());
        assert!(r.randomized_estimate(&FourierPolynomial::constant(2, 1.0), 0).is_err());
    }

    #[test]
    fn resolved_frequencies_are_counted() {
        // f = e_k + e_{-k} with k·z ≡ 0 picks up the full coefficient
        let r = RandomizedLatticeRule::new(12, 2, 8).unwrap();
        for t in 0..20 {
            let g = r.draw(t);
            let (p, z) = (g.p() as i64, g.z().to_vec());
            let k = FrequencyVector::new(vec![z[1] as i64, p - z[0] as i64]).unwrap();
            assert_eq!(g.dot_mod(&k), 0);
            let mut f = FourierPolynomial::mode(k.clone());
            f.add_term(k.neg(), 1.0.into()).unwrap();
            assert!((r.randomized_estimate(&f, t).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(randomized_error_bound(64, 0.5, 2.0).unwrap(), 0.25);
        assert_eq!(
            randomized_error_bound(128, 0.5, 2.0).unwrap(),
            randomized_error_bound(64, 0.5, 2.0).unwrap() / 2.0
        );
        assert!(randomized_error_bound(1, 0.5, 1.0).is_err());
        assert!(randomized_error_bound(4, 0.0, 1.0).is_err());
    }
}
