//! Random point sets that integrate every mode of
//! `A(δ) = {k ≠ 0 : r4(k) ≤ 1/δ}` to within `δ r4(k)`, together with the
//! cardinality bound for `A(δ)` and the sample size that makes such a set
//! exist via Hoeffding's inequality and a union bound.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::frequency::{FrequencyVector, WeightFunction};
use crate::pointsets::{PointSet, RationalNode};
use crate::quadrature::{exp_sum, qmc_rule, QuadratureRule};
use crate::rng::TrialRng;

const DYADIC_DEN: u64 = 1 << 53;

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("delta must lie in (0, 1], got {delta}"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencySet {
    pub delta: f64,
    pub d: usize,
    pub members: Vec<FrequencyVector>,
}

impl FrequencySet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All `k ∈ ℤ^dim` (zero included) with `∏ max(1,|k_j|) ≤ budget`, built by
/// recursion on the last coordinate. Memoized on `(dim, budget)`.
fn weighted_ball(dim: usize, budget: u64, memo: &mut HashMap<(usize, u64), Vec<Vec<i64>>>) -> Vec<Vec<i64>> {
    if dim == 0 {
        return vec![Vec::new()];
    }
    if let Some(hit) = memo.get(&(dim, budget)) {
        return hit.clone();
    }
    let mut out: Vec<Vec<i64>> = weighted_ball(dim - 1, budget, memo)
        .into_iter()
        .map(|mut k| {
            k.push(0);
            k
        })
        .collect();
    for t in 1..=budget {
        for head in weighted_ball(dim - 1, budget / t, memo) {
            for last in [t as i64, -(t as i64)] {
                let mut k = head.clone();
                k.push(last);
                out.push(k);
            }
        }
    }
    memo.insert((dim, budget), out.clone());
    out
}

/// `A(δ, r4, d)`, sorted lexicographically.
pub fn enumerate_a(delta: f64, d: usize) -> Result<FrequencySet> {
    check_delta(delta)?;
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    // r4 takes integer values, so r4(k) ≤ 1/δ ⇔ r4(k) ≤ ⌊1/δ⌋
    let budget = (1.0 / delta).floor() as u64;
    let mut memo = HashMap::new();
    let mut members: Vec<FrequencyVector> = weighted_ball(d, budget, &mut memo)
        .into_iter()
        .filter(|k| k.iter().any(|&c| c != 0))
        .map(|k| FrequencyVector::new(k).expect("d >= 1"))
        .collect();
    members.sort_unstable();
    Ok(FrequencySet { delta, d, members })
}

/// `4^d/δ · (1 + log(1/δ))^{d−1}`.
pub fn a_cardinality_bound(delta: f64, d: usize) -> Result<f64> {
    check_delta(delta)?;
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    let l = (1.0 / delta).ln();
    Ok(4f64.powi(d as i32) / delta * (1.0 + l).powi(d as i32 - 1))
}

/// Smallest `n` with `n δ²/2 ≥ log 8 + log(1/δ) + (d−1) log(4 + 4 log(1/δ))`.
pub fn min_n_hoeffding(delta: f64, d: usize) -> Result<u64> {
    check_delta(delta)?;
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    let l = (1.0 / delta).ln();
    let rhs = 8f64.ln() + l + (d as f64 - 1.0) * (4.0 + 4.0 * l).ln();
    let n = (2.0 * rhs / (delta * delta)).ceil();
    if n > u64::MAX as f64 {
        return Err(Error::Overflow("Hoeffding sample size"));
    }
    Ok((n as u64).max(1))
}

/// `max_{k∈A} |Q(e_k)| / r4(k)` for a rule; the search succeeds iff this is `< δ`.
pub fn max_normalized_mode(rule: &QuadratureRule, set: &FrequencySet) -> Result<f64> {
    let mut worst = 0f64;
    for k in &set.members {
        worst = worst.max(exp_sum(rule, k)?.norm() / WeightFunction::R4.weight(k));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodPointSet {
    pub points: PointSet,
    pub trials_used: u64,
    /// `max_{k∈A} |Q(e_k)| / r4(k)`, strictly below δ.
    pub max_ratio: f64,
}

/// i.i.d. uniform nodes with 53-bit dyadic coordinates for trial `trial`.
pub fn uniform_point_set(d: usize, n: usize, seed: u64, trial: u64) -> Result<PointSet> {
    let mut rng = TrialRng::new(seed, trial);
    let nodes = (0..n)
        .map(|_| RationalNode::new((0..d).map(|_| rng.u53()).collect(), DYADIC_DEN))
        .collect::<Result<Vec<_>>>()?;
    PointSet::explicit(d, nodes)
}

/// Draws uniform `n`-point sets (trial `t` uses stream `t`) until one has
/// `|Q(e_k)| < δ r4(k)` for all `k ∈ A(δ)`.
pub fn search_good_pointset(delta: f64, d: usize, n: usize, seed: u64, max_trials: u64) -> Result<GoodPointSet> {
    if n == 0 {
        return invalid("n must be >= 1");
    }
    if max_trials == 0 {
        return invalid("max_trials must be >= 1");
    }
    let set = enumerate_a(delta, d)?;
    let mut best = f64::INFINITY;
    for trial in 0..max_trials {
        let points = uniform_point_set(d, n, seed, trial)?;
        let rule = qmc_rule(points)?;
        let ratio = max_normalized_mode(&rule, &set)?;
        if ratio < delta {
            return Ok(GoodPointSet { points: rule.points().clone(), trials_used: trial + 1, max_ratio: ratio });
        }
        best = best.min(ratio - delta);
    }
    Err(Error::SearchExhausted { tried: max_trials, best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(delta: f64, d: usize) -> usize {
        enumerate_a(delta, d).unwrap().len()
    }

    #[test]
    fn enumerate_examples() {
        let a = enumerate_a(0.3, 1).unwrap();
        let ks: Vec<i64> = a.members.iter().map(|k| k.components()[0]).collect();
        assert_eq!(ks, vec![-3, -2, -1, 1, 2, 3]);
        assert_eq!(sizes(1.0, 2), 8);
        assert_eq!(sizes(0.6, 1), 2);
        assert!(enumerate_a(0.0, 1).is_err());
        assert!(enumerate_a(1.5, 1).is_err());
        assert!(enumerate_a(0.5, 0).is_err());
    }

    #[test]
    fn cardinality_bound_examples() {
        assert!((a_cardinality_bound(0.3, 1).unwrap() - 13.333333333333334).abs() < 1e-12);
        assert_eq!(a_cardinality_bound(1.0, 2).unwrap(), 16.0);
        let expected = 64.0 * 4.0 * (1.0 + 4f64.ln()).powi(2);
        assert!((a_cardinality_bound(0.25, 3).unwrap() - expected).abs() < 1e-9);
        assert!((a_cardinality_bound(0.25, 3).unwrap() - 1457.77).abs() < 0.01);
    }

    #[test]
    fn min_n_examples() {
        assert_eq!(min_n_hoeffding(0.25, 2).unwrap(), 184);
        assert_eq!(min_n_hoeffding(0.5, 1).unwrap(), 23);
        assert_eq!(min_n_hoeffding(1.0, 1).unwrap(), 5);
        for d in 1..6 {
            let n = min_n_hoeffding(0.3, d).unwrap();
            let rhs = 8f64.ln() + (1.0 / 0.3f64).ln() + (d as f64 - 1.0) * (4.0 + 4.0 * (1.0 / 0.3f64).ln()).ln();
            assert!(n as f64 * 0.09 / 2.0 >= rhs);
            assert!((n - 1) as f64 * 0.09 / 2.0 < rhs);
        }
    }

    #[test]
    fn search_examples() {
        let good = search_good_pointset(0.5, 1, 23, 1, 10).unwrap();
        assert!(good.trials_used <= 10);
        assert!(good.max_ratio < 0.5);
        assert_eq!(good.points.len(), 23);

        let a = enumerate_a(1.0, 1).unwrap();
        assert_eq!(a.members.len(), 2);
        let n = min_n_hoeffding(1.0, 1).unwrap() as usize;
        assert!(search_good_pointset(1.0, 1, n, 4, 50).is_ok());

        assert!(search_good_pointset(0.5, 1, 0, 1, 10).is_err());
    }

    #[test]
    fn exhaustion_reports_margin() {
        // a single node can never integrate e_1 to within 0.1
        match search_good_pointset(0.1, 1, 1, 0, 3) {
            Err(Error::SearchExhausted { tried: 3, best }) => assert!(best > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn uniform_sets_are_reproducible() {
        assert_eq!(uniform_point_set(2, 5, 7, 3).unwrap(), uniform_point_set(2, 5, 7, 3).unwrap());
        assert_ne!(uniform_point_set(2, 5, 7, 3).unwrap(), uniform_point_set(2, 5, 7, 4).unwrap());
    }
}
