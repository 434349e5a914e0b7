//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Library results are cross-checked against oracles written here:
//! trial-division primes, floating-point exponential sums evaluated
//! coordinate by coordinate, and brute-force box filters.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use wiener_qmc::fooling::{dirichlet_m, fooling_search, r0_complexity_lower_bound, FoolingSearchParams};
use wiener_qmc::frequency::frequency_box;
use wiener_qmc::hoeffding::{a_cardinality_bound, enumerate_a, min_n_hoeffding, search_good_pointset};
use wiener_qmc::pointsets::{korobov_s, korobov_t, lattice, union_p1, union_p2, GeneratingVector, PointSet, RationalNode};
use wiener_qmc::primes::density_constants;
use wiener_qmc::quadrature::{
    apply_spectral, exp_sum, origin_half_rule, qmc_rule, worst_case_error_on_set, QuadratureRule,
};
use wiener_qmc::rng::TrialRng;
use wiener_qmc::testfn::random_real_polynomial;
use wiener_qmc::{verify, FrequencyVector, WeightFunction};

const SEED: u64 = 20_261_016;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn is_prime_oracle(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

// |P_m| log m / m minimized over m in [lo, hi], primes by trial division.
fn c_hat_oracle(lo: u64, hi: u64) -> f64 {
    (lo..=hi)
        .map(|m| {
            let count = (m.div_ceil(2) + 1..=m).filter(|&p| is_prime_oracle(p)).count();
            count as f64 * (m as f64).ln() / m as f64
        })
        .fold(f64::INFINITY, f64::min)
}

// Equal-weight exponential sum from floating-point coordinates.
fn float_exp_sum(points: &PointSet, k: &[i64]) -> Complex64 {
    let n = points.len() as f64;
    points
        .nodes()
        .iter()
        .map(|x| {
            let t: f64 = x.coords().iter().zip(k).map(|(c, &kj)| (kj as f64 * c).fract()).sum();
            Complex64::from_polar(1.0, TAU * t)
        })
        .sum::<Complex64>()
        / n
}

fn width(k: &[i64]) -> usize {
    match (k.iter().position(|&c| c != 0), k.iter().rposition(|&c| c != 0)) {
        (Some(a), Some(b)) => b - a + 1,
        _ => 0,
    }
}

fn fv(k: Vec<i64>) -> FrequencyVector {
    FrequencyVector::new(k).unwrap()
}

fn nonzero_box(d: usize, b: u32) -> Vec<FrequencyVector> {
    frequency_box(d, b).into_iter().filter(|k| !k.is_zero()).collect()
}

fn check_report(id: u32, seed: u64) -> verify::CheckReport {
    verify::run_check(id, seed).expect("check runs")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut resolved = 0;
    let mut max_dev = 0f64;
    let mut ok = true;
    for i in 0..500u64 {
        let mut rng = TrialRng::new(SEED, 1_000_000 + i);
        let primes: Vec<u64> = (2..=101).filter(|&n| is_prime_oracle(n)).collect();
        let p = primes[rng.below(primes.len() as u64) as usize];
        let d = 1 + rng.below(4) as usize;
        let z: Vec<u64> = (0..d).map(|_| 1 + rng.below(p - 1)).collect();
        let mut k: Vec<i64> = (0..d).map(|_| rng.range_inclusive(-1000, 1000)).collect();
        if i % 2 == 1 {
            // pick k_d in [-1000, 1000] making k·z ≡ 0 by scanning
            let head: i128 = (0..d - 1).map(|j| k[j] as i128 * z[j] as i128).sum();
            k[d - 1] = (-1000..=1000)
                .find(|&t| (head + t as i128 * z[d - 1] as i128).rem_euclid(p as i128) == 0)
                .unwrap();
        }
        let dot: i128 = k.iter().zip(&z).map(|(&a, &b)| a as i128 * b as i128).sum();
        let hit = dot.rem_euclid(p as i128) == 0;
        resolved += usize::from(hit);
        let rule = qmc_rule(lattice(&GeneratingVector::new(p, z).unwrap())).unwrap();
        let s = exp_sum(&rule, &fv(k)).unwrap();
        let dev = (s - if hit { 1.0 } else { 0.0 }).norm();
        max_dev = max_dev.max(dev);
        ok &= dev <= 1e-10 * p as f64;
    }
    let report = check_report(1, SEED);
    let elapsed = start.elapsed();
    let pass = ok && resolved >= 250 && report.passed && elapsed < Duration::from_secs(5);
    (pass, format!("500 draws, {resolved} with k.z = 0 mod p, max deviation {max_dev:.2e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut oracle_gap = 0f64;
    for p in [5u64, 7, 11, 13] {
        for d in 1..=3 {
            for set in [korobov_s(d, p).unwrap(), korobov_t(d, p).unwrap()] {
                let rule = qmc_rule(set.clone()).unwrap();
                for k in nonzero_box(d, 6) {
                    let c = k.components();
                    if c.iter().all(|&x| x % p as i64 == 0) {
                        continue;
                    }
                    let s = exp_sum(&rule, &k).unwrap();
                    oracle_gap = oracle_gap.max((s - float_exp_sum(&set, c)).norm());
                    max_excess = max_excess.max(s.norm() - width(c) as f64 / p as f64);
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = max_excess <= 1e-9 && oracle_gap < 1e-9 && elapsed < Duration::from_secs(60);
    (
        pass,
        format!("{checked} sums, max |S| - width/p = {max_excess:.2e}, float oracle gap {oracle_gap:.1e}, {elapsed:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let c = c_hat_oracle(16, 64);
    let lib_c = density_constants(16, 64).unwrap().c_hat;
    let report = check_report(3, SEED);
    // spot check the bound with the float oracle on a sparse sublattice of the box
    let mut spot_ok = true;
    for m in [16u64, 32, 64] {
        for d in [2usize, 3] {
            for set in [union_p1(d, m).unwrap(), union_p2(d, m).unwrap()] {
                for k in nonzero_box(d, 8).into_iter().step_by(37) {
                    let kc = k.components();
                    let min_log = kc.iter().filter(|&&x| x != 0).map(|x| (x.abs() as f64).ln()).fold(f64::INFINITY, f64::min);
                    let bound = (4.0 * width(kc) as f64 + 8.0 / c * min_log) / m as f64;
                    spot_ok &= float_exp_sum(&set, kc).norm() <= bound;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let worst = report.details["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["max_sum_over_bound"].as_f64().unwrap())
        .fold(0.0, f64::max);
    let pass = report.passed && spot_ok && (c - lib_c).abs() < 1e-15 && elapsed < Duration::from_secs(120);
    (pass, format!("c_hat {c:.6}, max |S|/bound {worst:.4} over P1 and P2, {elapsed:.2?}"))
}

fn criterion_4() -> Outcome {
    let report = check_report(4, SEED);
    let c = c_hat_oracle(16, 64);
    // independent worst-case error at m = 16 from float sums
    let set = union_p1(3, 16).unwrap();
    let oracle = frequency_box(3, 8)
        .iter()
        .map(|k| {
            let exact = if k.is_zero() { 1.0 } else { 0.0 };
            (float_exp_sum(&set, k.components()) - exact).norm() / WeightFunction::R2.weight(k)
        })
        .fold(0.0, f64::max);
    let rows = report.details["rows"].as_array().unwrap();
    let wce: Vec<f64> = rows.iter().map(|r| r["wce"].as_f64().unwrap()).collect();
    let within = wce.iter().zip([16.0, 32.0, 64.0]).all(|(e, m)| *e <= 12.0 / (c * m));
    let decay: Vec<f64> = wce.windows(2).map(|w| w[0] / w[1]).collect();
    let pass = report.passed && within && decay.iter().all(|&r| r >= 1.8) && (oracle - wce[0]).abs() < 1e-9;
    (
        pass,
        format!(
            "wce {:.4} {:.4} {:.4} vs bounds {:.3} {:.3} {:.3}, decay {:.3} {:.3}",
            wce[0],
            wce[1],
            wce[2],
            12.0 / (c * 16.0),
            12.0 / (c * 32.0),
            12.0 / (c * 64.0),
            decay[0],
            decay[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let report = check_report(5, SEED);
    let c = c_hat_oracle(16, 64);
    let rows = report.details["rows"].as_array().unwrap();
    let mut worst_frac = 0f64;
    let mut ok = true;
    for r in rows {
        let d = r["d"].as_f64().unwrap();
        let m = r["m"].as_f64().unwrap();
        let frac = r["wce"].as_f64().unwrap() / (12.0 * d / (c * m));
        ok &= frac <= 1.0 && r["frequencies"].as_u64().unwrap() <= 10_000;
        worst_frac = worst_frac.max(frac);
    }
    (report.passed && ok && rows.len() == 18, format!("{} cases, max wce/bound {worst_frac:.4}", rows.len()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let report = check_report(6, SEED);
    let elapsed = start.elapsed();
    let rows = report.details["rows"].as_array().unwrap();
    let ratios: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.4}", r["mean_error"].as_f64().unwrap() / r["bound"].as_f64().unwrap()))
        .collect();
    let flag = if report.near_bound { " (within 5% of bound)" } else { "" };
    (
        report.passed && elapsed < Duration::from_secs(120),
        format!("error/bound {}{flag}, {elapsed:.2?}", ratios.join(" ")),
    )
}

fn criterion_7() -> Outcome {
    let k = [fv(vec![0]), fv(vec![1])];
    let a = worst_case_error_on_set(&origin_half_rule(1).unwrap(), &k, WeightFunction::Unit).unwrap();
    let nodes = (0..3).map(|h| RationalNode::new(vec![h], 3).unwrap()).collect();
    let rule = qmc_rule(PointSet::explicit(1, nodes).unwrap()).unwrap();
    let b = fooling_search(&rule, FoolingSearchParams::new(2.0, 1000).unwrap()).unwrap();
    let c = dirichlet_m(2, 3.0, 0.5).unwrap();
    let d = r0_complexity_lower_bound(0.1).unwrap();
    let pass = (a - 0.5).abs() <= 1e-12
        && b.q == 3
        && b.rule_value <= 1e-12
        && b.normalized_error_lb == 0.25
        && c == 36
        && (d - 161.3).abs() <= 0.1
        && check_report(7, SEED).passed;
    (pass, format!("wce {a}, q {} |Q(g*)| {:.1e} lb {}, M {c}, r0 bound {d:.2}", b.q, b.rule_value, b.normalized_error_lb))
}

fn criterion_8() -> Outcome {
    let mut enum_ok = true;
    let mut bound_ok = true;
    for d in 1..=3usize {
        for delta in [1.0, 0.5, 0.25, 0.1] {
            let b = (1.0 / delta) as i64 + 1;
            let mut naive: Vec<Vec<i64>> = Vec::new();
            let side = (2 * b + 1) as usize;
            for idx in 0..side.pow(d as u32) {
                let k: Vec<i64> = (0..d).map(|j| (idx / side.pow(j as u32) % side) as i64 - b).collect();
                let r: f64 = k.iter().map(|&c| c.unsigned_abs().max(1) as f64).product();
                if k.iter().any(|&c| c != 0) && r <= 1.0 / delta {
                    naive.push(k);
                }
            }
            naive.sort();
            let a = enumerate_a(delta, d).unwrap();
            let got: Vec<Vec<i64>> = a.members.iter().map(|k| k.components().to_vec()).collect();
            enum_ok &= got == naive;
            let bound = 4f64.powi(d as i32) / delta * (1.0 + (1.0 / delta).ln()).powi(d as i32 - 1);
            bound_ok &= (a.len() as f64) <= bound && (a_cardinality_bound(delta, d).unwrap() - bound).abs() < 1e-9 * bound;
        }
    }
    let n = min_n_hoeffding(0.25, 2).unwrap();
    let mut set = vec![fv(vec![0])];
    set.extend(enumerate_a(0.5, 1).unwrap().members);
    let mut successes = 0;
    let mut wce_ok = true;
    for s in 0..200u64 {
        if let Ok(good) = search_good_pointset(0.5, 1, 23, SEED + s, 20) {
            successes += 1;
            let e = worst_case_error_on_set(&qmc_rule(good.points).unwrap(), &set, WeightFunction::R4).unwrap();
            wce_ok &= e <= 0.5;
        }
    }
    let pass = enum_ok && bound_ok && n == 184 && successes >= 190 && wce_ok && check_report(8, SEED).passed;
    (
        pass,
        format!("enumeration {enum_ok}, cardinality bound {bound_ok}, min n {n}, search succeeded for {successes}/200 seeds"),
    )
}

fn criterion_9() -> Outcome {
    let report = check_report(9, SEED);
    // second path: pointwise float evaluation at the node coordinates
    let mut max_rel = 0f64;
    for i in 0..100u64 {
        let d = 1 + (i % 3) as usize;
        let p = [5u64, 7, 11, 13][(i % 4) as usize];
        let points = if i % 2 == 0 { korobov_s(d, p).unwrap() } else { union_p2(d, 8 + i % 9).unwrap() };
        let mut rng = TrialRng::new(SEED, 9_000_000 + i);
        let coeffs: Vec<f64> = (0..points.len()).map(|_| rng.unit_f64() - 0.5).collect();
        let rule = QuadratureRule::new(points, coeffs).unwrap();
        let f = random_real_polynomial(d, 10, 6, SEED ^ i).unwrap();
        let direct: Complex64 = rule
            .points()
            .nodes()
            .iter()
            .zip(rule.coefficients())
            .map(|(x, c)| c * f.eval_f64(&x.coords()).unwrap())
            .sum();
        let spectral = apply_spectral(&rule, &f).unwrap();
        max_rel = max_rel.max((direct - spectral).norm() / 1f64.max(direct.norm()).max(spectral.norm()));
    }
    let lib = report.details["max_relative_difference"].as_f64().unwrap();
    (report.passed && max_rel <= 1e-10, format!("max relative gap {lib:.2e} (library), {max_rel:.2e} (float oracle)"))
}

fn criterion_10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_wiener-qmc"))
            .args(["verify", "--seed", &SEED.to_string()])
            .env_remove("WIENER_QMC_SEED")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let pass = same && a.status.code() == Some(0) && b.status.code() == Some(0);
    (pass, format!("{} bytes, identical {same}, exit codes {:?} {:?}", a.stdout.len(), a.status.code(), b.status.code()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("lattice character property", criterion_1),
        ("Korobov exponential sums", criterion_2),
        ("prime-band union exponential sums", criterion_3),
        ("worst-case error, r2 weights", criterion_4),
        ("worst-case error, r3 weights", criterion_5),
        ("randomized lattice error", criterion_6),
        ("lower-bound certificates", criterion_7),
        ("Hoeffding point sets", criterion_8),
        ("direct and spectral evaluation", criterion_9),
        ("byte-identical verify reports", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(outcome) => outcome,
            Err(_) => (false, "panicked".to_string()),
        };
        failed += usize::from(!pass);
        println!("criterion {:>2} {}  {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
