//! Korobov p-sets, their multiset unions over a prime band, and rank-1
//! lattices. Node coordinates are exact rationals `num/den`.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, invalid, Error, Result};
use crate::frequency::FrequencyVector;
use crate::primes::{is_prime, prime_band, MAX_PRIME};

/// A node of `[0,1)^d` with coordinate `j` equal to `numerators[j] / den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalNode {
    numerators: Vec<u64>,
    den: u64,
}

impl RationalNode {
    pub fn new(numerators: Vec<u64>, den: u64) -> Result<Self> {
        if den == 0 {
            return invalid("node denominator must be positive");
        }
        if den > 1 << 62 {
            return invalid(format!("node denominator {den} exceeds 2^62"));
        }
        if numerators.is_empty() {
            return invalid("node needs dimension >= 1");
        }
        if let Some(bad) = numerators.iter().find(|&&n| n >= den) {
            return invalid(format!("numerator {bad} not in [0, {den})"));
        }
        Ok(Self { numerators, den })
    }

    pub fn origin(d: usize) -> Self {
        Self { numerators: vec![0; d], den: 1 }
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn coords(&self) -> Vec<f64> {
        let den = self.den as f64;
        self.numerators.iter().map(|&n| n as f64 / den).collect()
    }

    /// `(k·num) mod den`, so that `k·x ≡ phase/den (mod 1)` exactly.
    /// The caller guarantees matching dimensions.
    pub fn phase(&self, k: &[i64]) -> u64 {
        if self.den <= 1 << 31 {
            let den = self.den as i64;
            let mut acc: u64 = 0;
            for (&kj, &nj) in k.iter().zip(&self.numerators) {
                acc = (acc + kj.rem_euclid(den) as u64 * nj) % self.den;
            }
            return acc;
        }
        let den = self.den as i128;
        let mut acc: i128 = 0;
        for (&kj, &nj) in k.iter().zip(&self.numerators) {
            // both factors are < 2^62 after reduction, so the product fits in i128
            acc = (acc + (kj as i128).rem_euclid(den) * nj as i128) % den;
        }
        acc as u64
    }
}

impl FromStr for RationalNode {
    type Err = Error;

    /// Parses `n1/d1,n2/d2,...` or plain integers / decimals-free fractions.
    /// All coordinates are brought to a common denominator.
    fn from_str(s: &str) -> Result<Self> {
        let mut fracs = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let (n, d) = match tok.split_once('/') {
                Some((n, d)) => (n.trim(), d.trim()),
                None => (tok, "1"),
            };
            let n: u64 = n.parse().map_err(|e| Error::InvalidArgument(format!("bad numerator {n:?}: {e}")))?;
            let d: u64 = d.parse().map_err(|e| Error::InvalidArgument(format!("bad denominator {d:?}: {e}")))?;
            if d == 0 {
                return invalid("zero denominator");
            }
            fracs.push((n, d));
        }
        let mut den = 1u64;
        for &(_, d) in &fracs {
            den = lcm(den, d).ok_or(Error::Overflow("common denominator"))?;
        }
        let numerators = fracs.iter().map(|&(n, d)| n * (den / d)).collect();
        RationalNode::new(numerators, den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    KorobovS { p: u64 },
    KorobovT { p: u64 },
    Union1 { m: u64 },
    Union2 { m: u64 },
    Lattice { p: u64, z: Vec<u64> },
    Explicit,
}

/// An ordered multiset of nodes of common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    nodes: Vec<RationalNode>,
    provenance: Provenance,
}

impl PointSet {
    pub fn explicit(dim: usize, nodes: Vec<RationalNode>) -> Result<Self> {
        if dim == 0 {
            return invalid("point set needs dimension >= 1");
        }
        for node in &nodes {
            check_dim(dim, node.dim())?;
        }
        Ok(Self { dim, nodes, provenance: Provenance::Explicit })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[RationalNode] {
        &self.nodes
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// One node per row, coordinates as exact `num/den` strings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for node in &self.nodes {
            for (j, n) in node.numerators.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{n}/{}", node.den);
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`PointSet::to_csv`]; provenance becomes `Explicit`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty CSV".into()))?;
        let dim = header.split(',').count();
        let nodes = lines.map(str::parse).collect::<Result<Vec<RationalNode>>>()?;
        Self::explicit(dim, nodes)
    }
}

fn check_prime(d: usize, p: u64) -> Result<()> {
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    if p > MAX_PRIME {
        return invalid(format!("p = {p} exceeds the supported maximum {MAX_PRIME}"));
    }
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if p < d as u64 {
        log::warn!("p = {p} < d = {d}: construction is defined but the exponential-sum bound needs p >= d");
    }
    Ok(())
}

fn s_nodes(d: usize, p: u64) -> Vec<RationalNode> {
    let den = p * p;
    (0..den)
        .into_par_iter()
        .map(|h| {
            let mut numerators = Vec::with_capacity(d);
            let mut power = 1u64;
            for _ in 0..d {
                power = ((power as u128 * h as u128) % den as u128) as u64;
                numerators.push(power);
            }
            RationalNode { numerators, den }
        })
        .collect()
}

fn t_nodes(d: usize, p: u64) -> Vec<RationalNode> {
    (0..p * p)
        .into_par_iter()
        .map(|idx| {
            let (h, l) = (idx / p, idx % p);
            let mut numerators = Vec::with_capacity(d);
            let mut l_power = 1u64;
            for _ in 0..d {
                l_power = ((l_power as u128 * l as u128) % p as u128) as u64;
                numerators.push(((h as u128 * l_power as u128) % p as u128) as u64);
            }
            RationalNode { numerators, den: p }
        })
        .collect()
}

/// `S_{d,p}`: node `h ∈ [0, p²)` has coordinates `(h^j mod p²)/p²`.
pub fn korobov_s(d: usize, p: u64) -> Result<PointSet> {
    check_prime(d, p)?;
    Ok(PointSet { dim: d, nodes: s_nodes(d, p), provenance: Provenance::KorobovS { p } })
}

/// `T_{d,p}`: node `(h, ℓ)`, lexicographic, has coordinates `(h ℓ^j mod p)/p`.
pub fn korobov_t(d: usize, p: u64) -> Result<PointSet> {
    check_prime(d, p)?;
    Ok(PointSet { dim: d, nodes: t_nodes(d, p), provenance: Provenance::KorobovT { p } })
}

fn union_of(d: usize, m: u64, each: fn(usize, u64) -> Result<PointSet>) -> Result<Vec<RationalNode>> {
    let band = prime_band(m)?;
    let mut nodes = Vec::with_capacity(band.sum_of_squares() as usize);
    for &p in &band.primes {
        nodes.extend(each(d, p)?.nodes);
    }
    Ok(nodes)
}

/// Multiset union of `S_{d,p}` over `p ∈ P_m`, primes ascending.
pub fn union_p1(d: usize, m: u64) -> Result<PointSet> {
    let nodes = union_of(d, m, korobov_s)?;
    Ok(PointSet { dim: d, nodes, provenance: Provenance::Union1 { m } })
}

/// Multiset union of `T_{d,p}` over `p ∈ P_m`, primes ascending.
pub fn union_p2(d: usize, m: u64) -> Result<PointSet> {
    let nodes = union_of(d, m, korobov_t)?;
    Ok(PointSet { dim: d, nodes, provenance: Provenance::Union2 { m } })
}

/// Generating vector `z ∈ {1..p−1}^d` of a rank-1 lattice with prime modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratingVector {
    p: u64,
    z: Vec<u64>,
}

impl GeneratingVector {
    pub fn new(p: u64, z: Vec<u64>) -> Result<Self> {
        check_prime(1, p)?;
        if z.is_empty() {
            return invalid("generating vector needs dimension >= 1");
        }
        if let Some(bad) = z.iter().find(|&&zj| zj == 0 || zj >= p) {
            return invalid(format!("generating vector entry {bad} not in [1, {}]", p - 1));
        }
        Ok(Self { p, z })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// `k·z mod p`.
    pub fn dot_mod(&self, k: &FrequencyVector) -> u64 {
        let p = self.p as i128;
        k.components()
            .iter()
            .zip(&self.z)
            .fold(0i128, |acc, (&kj, &zj)| (acc + (kj as i128).rem_euclid(p) * zj as i128) % p) as u64
    }
}

/// Rank-1 lattice: node `h ∈ [0, p)` has coordinates `(h z_j mod p)/p`.
pub fn lattice(z: &GeneratingVector) -> PointSet {
    let p = z.p;
    let nodes = (0..p)
        .map(|h| RationalNode {
            numerators: z.z.iter().map(|&zj| ((h as u128 * zj as u128) % p as u128) as u64).collect(),
            den: p,
        })
        .collect();
    PointSet { dim: z.dim(), nodes, provenance: Provenance::Lattice { p, z: z.z.clone() } }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(nums: &[u64], den: u64) -> RationalNode {
        RationalNode::new(nums.to_vec(), den).unwrap()
    }

    #[test]
    fn korobov_s_examples() {
        let s = korobov_s(2, 3).unwrap();
        assert_eq!(s.len(), 9);
        assert_eq!(s.nodes()[2], node(&[2, 4], 9));

        let s = korobov_s(1, 5).unwrap();
        let mut nums: Vec<u64> = s.nodes().iter().map(|n| n.numerators()[0]).collect();
        nums.sort_unstable();
        assert_eq!(nums, (0..25).collect::<Vec<_>>());

        let s = korobov_s(3, 5).unwrap();
        assert_eq!(s.nodes()[7], node(&[7, 24, 18], 25));
    }

    #[test]
    fn korobov_t_examples() {
        let t = korobov_t(2, 3).unwrap();
        assert_eq!(t.nodes()[3 + 2], node(&[2, 1], 3));

        let t = korobov_t(1, 2).unwrap();
        let nums: Vec<u64> = t.nodes().iter().map(|n| n.numerators()[0]).collect();
        assert_eq!(nums, vec![0, 0, 0, 1]);

        let t = korobov_t(2, 5).unwrap();
        assert_eq!(t.nodes()[3 * 5 + 4], node(&[2, 3], 5));
    }

    #[test]
    fn non_prime_rejected() {
        assert!(korobov_s(2, 9).is_err());
        assert!(korobov_t(2, 1).is_err());
        assert!(korobov_s(0, 5).is_err());
        assert!(korobov_s(1, MAX_PRIME + 2).is_err());
    }

    #[test]
    fn small_prime_allowed() {
        // p < d only warns
        assert_eq!(korobov_s(5, 2).unwrap().len(), 4);
    }

    #[test]
    fn union_sizes() {
        assert_eq!(union_p1(1, 10).unwrap().len(), 49);
        assert_eq!(union_p1(3, 20).unwrap().len(), 940);
        assert_eq!(union_p2(2, 20).unwrap().len(), 940);
        let u = union_p1(2, 2).unwrap();
        assert_eq!(u.len(), 4);
        assert_eq!(u.nodes(), korobov_s(2, 2).unwrap().nodes());
        // the origin is kept once per prime
        let u = union_p2(2, 20).unwrap();
        let origins = u.nodes().iter().filter(|n| n.numerators().iter().all(|&x| x == 0)).count();
        assert_eq!(origins, [11, 13, 17, 19].iter().map(|p| 2 * p - 1).sum::<usize>());
    }

    #[test]
    fn lattice_examples() {
        let z = GeneratingVector::new(5, vec![1, 2]).unwrap();
        let l = lattice(&z);
        assert_eq!(l.len(), 5);
        assert_eq!(l.nodes()[3], node(&[3, 1], 5));
        assert_eq!(l.nodes()[0], node(&[0, 0], 5));

        let z = GeneratingVector::new(3, vec![2]).unwrap();
        let nums: Vec<u64> = lattice(&z).nodes().iter().map(|n| n.numerators()[0]).collect();
        assert_eq!(nums, vec![0, 2, 1]);
    }

    #[test]
    fn generating_vector_validation() {
        assert!(GeneratingVector::new(5, vec![0]).is_err());
        assert!(GeneratingVector::new(5, vec![5]).is_err());
        assert!(GeneratingVector::new(6, vec![1]).is_err());
        assert!(GeneratingVector::new(5, vec![]).is_err());
    }

    #[test]
    fn phase_handles_negative_frequencies() {
        let x = node(&[3, 1], 5);
        assert_eq!(x.phase(&[2, -1]), 0);
        assert_eq!(x.phase(&[-1, 0]), 2);
        assert_eq!(x.phase(&[i64::MIN, i64::MAX]), ((i64::MIN as i128).rem_euclid(5) * 3 + (i64::MAX as i128).rem_euclid(5)) as u64 % 5);
    }

    #[test]
    fn node_parsing() {
        let n: RationalNode = "1/3, 1/2".parse().unwrap();
        assert_eq!(n, node(&[2, 3], 6));
        assert!("1/0".parse::<RationalNode>().is_err());
        assert!("3/2".parse::<RationalNode>().is_err());
        assert!("a".parse::<RationalNode>().is_err());
    }

    #[test]
    fn csv_is_exact() {
        let s = korobov_s(2, 3).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("x1,x2\n0/9,0/9\n1/9,1/9\n2/9,4/9\n"));
        let back = PointSet::from_csv(&csv).unwrap();
        assert_eq!(back.nodes(), s.nodes());
    }
}
