//! Linear quadrature rules `Q(f) = Σ_h c_h f(x_h)`, exact-phase exponential
//! sums, and worst-case errors over finite frequency sets.
//!
//! All sums over nodes run in ascending node order through a fixed pairwise
//! tree, so results do not depend on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, invalid, Result};
use crate::frequency::{FrequencyVector, WeightFunction};
use crate::pointsets::{PointSet, RationalNode};
use crate::testfn::{unit_root, FourierPolynomial};

const PAIRWISE_BLOCK: usize = 64;
const PARALLEL_SPLIT: usize = 1 << 15;

/// Pairwise sum of `term(0) + … + term(n−1)` with a fixed split tree.
pub fn pairwise_sum<F>(n: usize, term: &F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    fn rec<F: Fn(usize) -> Complex64 + Sync>(lo: usize, hi: usize, term: &F) -> Complex64 {
        let len = hi - lo;
        if len <= PAIRWISE_BLOCK {
            return (lo..hi).fold(Complex64::new(0.0, 0.0), |acc, i| acc + term(i));
        }
        let mid = lo + len / 2;
        if len >= PARALLEL_SPLIT {
            let (a, b) = rayon::join(|| rec(lo, mid, term), || rec(mid, hi, term));
            a + b
        } else {
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    rec(0, n, term)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    points: PointSet,
    coefficients: Vec<f64>,
    // every coefficient equals 1/n; sums are then divided by n once
    equal_weight: bool,
    // unit roots exp(2πi j/den) for the small denominators shared by many nodes
    root_tables: Vec<Vec<Complex64>>,
    table_of_node: Vec<u32>,
}

const NO_TABLE: u32 = u32::MAX;
const MAX_TABLE_DEN: u64 = 1 << 16;

fn build_root_tables(points: &PointSet) -> (Vec<Vec<Complex64>>, Vec<u32>) {
    let mut counts = std::collections::BTreeMap::<u64, usize>::new();
    for x in points.nodes() {
        *counts.entry(x.den()).or_default() += 1;
    }
    let mut index = std::collections::BTreeMap::new();
    let mut tables = Vec::new();
    for (&den, &count) in &counts {
        // a table only pays off when it is not much larger than the nodes using it
        if den <= MAX_TABLE_DEN && den as usize <= 4 * count.max(256) {
            index.insert(den, tables.len() as u32);
            tables.push((0..den).map(|j| unit_root(j, den)).collect());
        }
    }
    let table_of_node = points
        .nodes()
        .iter()
        .map(|x| index.get(&x.den()).copied().unwrap_or(NO_TABLE))
        .collect();
    (tables, table_of_node)
}

impl QuadratureRule {
    pub fn new(points: PointSet, coefficients: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return invalid("quadrature rule needs at least one node");
        }
        if points.len() != coefficients.len() {
            return invalid(format!(
                "{} nodes but {} coefficients",
                points.len(),
                coefficients.len()
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return invalid("coefficients must be finite");
        }
        let c = 1.0 / coefficients.len() as f64;
        let equal_weight = coefficients.iter().all(|&x| x == c);
        let (root_tables, table_of_node) = build_root_tables(&points);
        Ok(Self { points, coefficients, equal_weight, root_tables, table_of_node })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ_h |c_h|`.
    pub fn coefficient_abs_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }

    fn node(&self, h: usize) -> &RationalNode {
        &self.points.nodes()[h]
    }

    fn mode(&self, h: usize, k: &[i64]) -> Complex64 {
        let x = self.node(h);
        let phase = x.phase(k);
        match self.table_of_node[h] {
            NO_TABLE => unit_root(phase, x.den()),
            t => self.root_tables[t as usize][phase as usize],
        }
    }

    fn weighted_sum<F>(&self, term: &F) -> Complex64
    where
        F: Fn(usize) -> Complex64 + Sync,
    {
        if self.equal_weight {
            pairwise_sum(self.len(), term) / self.len() as f64
        } else {
            pairwise_sum(self.len(), &|h| self.coefficients[h] * term(h))
        }
    }
}

/// Equal-weight rule with all coefficients `1/n`.
pub fn qmc_rule(points: PointSet) -> Result<QuadratureRule> {
    if points.is_empty() {
        return invalid("QMC rule needs a nonempty point set");
    }
    let c = 1.0 / points.len() as f64;
    let n = points.len();
    QuadratureRule::new(points, vec![c; n])
}

/// `Q*(f) = f(0)/2`: one evaluation at the origin with coefficient 1/2.
pub fn origin_half_rule(d: usize) -> Result<QuadratureRule> {
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    let points = PointSet::explicit(d, vec![RationalNode::origin(d)])?;
    QuadratureRule::new(points, vec![0.5])
}

/// `Σ_h c_h f(x_h)` evaluated node by node.
pub fn apply_complex(rule: &QuadratureRule, f: &FourierPolynomial) -> Result<Complex64> {
    check_dim(rule.dim(), f.dim())?;
    Ok(rule.weighted_sum(&|h| f.eval(rule.node(h)).expect("dimension checked")))
}

/// Real part of [`apply_complex`]; exact for real-valued `f` up to rounding.
pub fn apply(rule: &QuadratureRule, f: &FourierPolynomial) -> Result<f64> {
    apply_complex(rule, f).map(|z| z.re)
}

/// `Σ_h c_h exp(2πi k·x_h)` with each phase reduced exactly mod 1.
pub fn exp_sum(rule: &QuadratureRule, k: &FrequencyVector) -> Result<Complex64> {
    check_dim(rule.dim(), k.dim())?;
    let kc = k.components();
    Ok(rule.weighted_sum(&|h| rule.mode(h, kc)))
}

/// `Q(f)` through the spectral route `Σ_k f̂(k) · exp_sum(rule, k)`.
pub fn apply_spectral(rule: &QuadratureRule, f: &FourierPolynomial) -> Result<Complex64> {
    check_dim(rule.dim(), f.dim())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in f.coefficients() {
        acc += c * exp_sum(rule, k)?;
    }
    Ok(acc)
}

/// `Σ_{k≠0} |f̂(k)| |exp_sum(rule, k)|`, an upper bound for `|I(f) − Q(f)|`
/// when the rule integrates constants exactly.
pub fn spectral_error_bound(rule: &QuadratureRule, f: &FourierPolynomial) -> Result<f64> {
    check_dim(rule.dim(), f.dim())?;
    let mut acc = 0.0;
    for (k, c) in f.coefficients().filter(|(k, _)| !k.is_zero()) {
        acc += c.norm() * exp_sum(rule, k)?.norm();
    }
    Ok(acc)
}

/// `|exp_sum(rule, k) − δ_{k,0}| / r(k)`: the error on the normalized mode `e_k / r(k)`.
pub fn normalized_mode_error(rule: &QuadratureRule, k: &FrequencyVector, r: WeightFunction) -> Result<f64> {
    let s = exp_sum(rule, k)?;
    let exact = if k.is_zero() { 1.0 } else { 0.0 };
    Ok((s - exact).norm() / r.weight(k))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstCase {
    pub error: f64,
    /// First frequency (in input order) attaining the maximum.
    pub worst_k: FrequencyVector,
}

/// Worst-case error over the unit ball of functions supported on `set`,
/// i.e. `max_{k∈set} |exp_sum(rule, k) − δ_{k,0}| / r(k)`.
pub fn worst_case_error_on_set(
    rule: &QuadratureRule,
    set: &[FrequencyVector],
    r: WeightFunction,
) -> Result<f64> {
    worst_case_detail(rule, set, r).map(|w| w.error)
}

pub fn worst_case_detail(
    rule: &QuadratureRule,
    set: &[FrequencyVector],
    r: WeightFunction,
) -> Result<WorstCase> {
    if set.is_empty() {
        return invalid("frequency set is empty");
    }
    let errors = set
        .par_iter()
        .map(|k| normalized_mode_error(rule, k, r))
        .collect::<Result<Vec<f64>>>()?;
    let (idx, error) = errors
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, e)| if e > best.1 { (i, e) } else { best });
    Ok(WorstCase { error, worst_k: set[idx].clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{korobov_s, lattice, union_p1, GeneratingVector};
    use crate::testfn::Term;

    fn fv(c: &[i64]) -> FrequencyVector {
        FrequencyVector::new(c.to_vec()).unwrap()
    }

    fn thirds() -> QuadratureRule {
        let nodes = ["0", "1/3", "2/3"].iter().map(|s| s.parse().unwrap()).collect();
        qmc_rule(PointSet::explicit(1, nodes).unwrap()).unwrap()
    }

    #[test]
    fn qmc_coefficients() {
        let rule = qmc_rule(union_p1(2, 20).unwrap()).unwrap();
        assert_eq!(rule.len(), 940);
        assert!(rule.coefficients().iter().all(|&c| c == 1.0 / 940.0));
        let single = qmc_rule(PointSet::explicit(1, vec![RationalNode::origin(1)]).unwrap()).unwrap();
        assert_eq!(single.coefficients(), &[1.0]);
        let four = qmc_rule(korobov_s(2, 2).unwrap()).unwrap();
        assert_eq!(four.coefficients(), &[0.25; 4]);
        assert!(qmc_rule(PointSet::explicit(1, vec![]).unwrap()).is_err());
    }

    #[test]
    fn origin_half_examples() {
        let r = origin_half_rule(1).unwrap();
        assert_eq!(r.points().nodes()[0], RationalNode::origin(1));
        assert_eq!(r.coefficients(), &[0.5]);
        let r3 = origin_half_rule(3).unwrap();
        assert_eq!(r3.points().nodes()[0].numerators(), &[0, 0, 0]);
        assert_eq!(apply(&r3, &FourierPolynomial::constant(3, 1.0)).unwrap(), 0.5);
    }

    #[test]
    fn apply_examples() {
        let one = FourierPolynomial::constant(2, 1.0);
        let rule = qmc_rule(union_p1(2, 20).unwrap()).unwrap();
        assert!((apply(&rule, &one).unwrap() - 1.0).abs() <= 1e-12);

        let f = FourierPolynomial::from_terms(1, &[Term(vec![0], 1.0, 0.0), Term(vec![1], -0.5, 0.0), Term(vec![-1], -0.5, 0.0)])
            .unwrap();
        assert!((apply(&thirds(), &f).unwrap() - 1.0).abs() <= 1e-12);
        assert!(apply(&thirds(), &one).is_err());
    }

    #[test]
    fn exp_sum_examples() {
        let s = qmc_rule(korobov_s(1, 5).unwrap()).unwrap();
        assert!(exp_sum(&s, &fv(&[1])).unwrap().norm() <= 1e-12);
        let full = exp_sum(&s, &fv(&[25])).unwrap();
        assert!((full - 1.0).norm() <= 1e-12);

        let l = qmc_rule(lattice(&GeneratingVector::new(5, vec![1, 2]).unwrap())).unwrap();
        assert!((exp_sum(&l, &fv(&[2, -1])).unwrap() - 1.0).norm() <= 1e-12);
        assert!(exp_sum(&l, &fv(&[1, 1])).unwrap().norm() <= 1e-12);
        assert!(exp_sum(&l, &fv(&[1])).is_err());
    }

    #[test]
    fn worst_case_examples() {
        let r = origin_half_rule(1).unwrap();
        let set = vec![fv(&[0]), fv(&[1]), fv(&[2])];
        assert_eq!(worst_case_error_on_set(&r, &set, WeightFunction::Unit).unwrap(), 0.5);

        let q = thirds();
        assert!(worst_case_error_on_set(&q, &[fv(&[0])], WeightFunction::Unit).unwrap() <= 1e-15);
        assert!(worst_case_error_on_set(&q, &[], WeightFunction::Unit).is_err());

        let detail = worst_case_detail(&q, &[fv(&[1]), fv(&[3]), fv(&[6])], WeightFunction::Unit).unwrap();
        assert_eq!(detail.worst_k, fv(&[3]));
        assert!((detail.error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let terms: Vec<Complex64> = (0..1000).map(|i| Complex64::new(i as f64, -(i as f64) / 2.0)).collect();
        let s = pairwise_sum(terms.len(), &|i| terms[i]);
        assert_eq!(s, Complex64::new(499500.0, -249750.0));
        assert_eq!(pairwise_sum(0, &|i| terms[i]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rule_validation() {
        let ps = korobov_s(1, 2).unwrap();
        assert!(QuadratureRule::new(ps.clone(), vec![0.5]).is_err());
        assert!(QuadratureRule::new(ps, vec![f64::NAN; 4]).is_err());
    }
}
