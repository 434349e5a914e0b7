//! Command-line driver: every subcommand prints one JSON document (or CSV
//! table) built from the library, so runs can be scripted and diffed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use wiener_qmc::bounds::{n_bound_thm2, n_bound_thm3, n_bound_thm4, n_bound_thm5};
use wiener_qmc::fooling::{fooling_certificate, FoolingSearchParams, DEFAULT_Q_CAP};
use wiener_qmc::hoeffding::{a_cardinality_bound, enumerate_a, min_n_hoeffding, search_good_pointset};
use wiener_qmc::pointsets::{korobov_s, korobov_t, lattice, union_p1, union_p2, GeneratingVector, PointSet, RationalNode};
use wiener_qmc::primes::density_constants;
use wiener_qmc::quadrature::{apply_complex, exp_sum, qmc_rule, worst_case_detail, QuadratureRule};
use wiener_qmc::randomized::{randomized_error_bound, RandomizedLatticeRule};
use wiener_qmc::rng::TrialRng;
use wiener_qmc::testfn::random_real_polynomial;
use wiener_qmc::{frequency, verify, Error, FourierPolynomial, FrequencyVector, WeightFunction};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;
const EXIT_SEARCH_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "wiener-qmc", version, about = "Quasi-Monte Carlo rules for weighted Wiener spaces")]
struct Cli {
    /// Seed for every random draw
    #[arg(long, global = true, env = "WIENER_QMC_SEED", default_value_t = 0)]
    seed: u64,

    /// Output format; defaults to csv when --out ends in .csv, json otherwise
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set
    GenPoints(SetArgs),
    /// Exponential sum of the equal-weight rule on a point set
    ExpSum {
        #[command(flatten)]
        set: SetArgs,
        /// Frequency vector, comma separated
        #[arg(long, allow_hyphen_values = true)]
        k: FrequencyVector,
    },
    /// Apply the equal-weight rule on a point set to a test function
    Integrate {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        f: FunctionArgs,
    },
    /// Worst-case error over a box of frequencies
    Wce {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value = "r2")]
        weight: WeightFunction,
        /// Frequencies range over [-box, box]^d
        #[arg(long = "box", default_value_t = 8)]
        frequency_box: u32,
        /// Sample this many frequencies from the box instead of taking all of it
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Mean error of the randomized lattice rule over seeded trials
    RandomizedTrial {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Density constant; defaults to the value measured at m itself
        #[arg(long)]
        c_hat: Option<f64>,
        #[command(flatten)]
        f: FunctionArgs,
    },
    /// Search for a fooling function of a univariate rule
    FoolingSearch {
        /// Nodes in [0,1) as fractions, e.g. 0,1/3,2/3
        #[arg(long)]
        nodes: String,
        /// Weights, comma separated (default 1/n each)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2.0)]
        rho: f64,
        #[arg(long, default_value_t = DEFAULT_Q_CAP)]
        q_cap: u64,
    },
    /// Draw uniform point sets until one integrates A(delta) well
    HoeffdingSearch {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        d: usize,
        /// Points per set (default: the Hoeffding sample size)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        max_trials: u64,
    },
    /// The frequency set A(delta) and its cardinality bound
    FreqSet {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        d: usize,
        /// Include the members
        #[arg(long)]
        list: bool,
    },
    /// Point counts and error bounds for a target error
    Bounds {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=5))]
        thm: u8,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        c_hat: Option<f64>,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// Run the seeded self-checks
    Verify {
        /// Run only this check
        #[arg(long)]
        check: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SetKind {
    KorobovS,
    KorobovT,
    UnionP1,
    UnionP2,
    Lattice,
}

#[derive(Args)]
struct SetArgs {
    #[arg(long, value_enum)]
    set: SetKind,
    #[arg(long)]
    d: usize,
    /// Prime for korobov-s, korobov-t and lattice
    #[arg(long)]
    p: Option<u64>,
    /// Band parameter for union-p1 and union-p2
    #[arg(long)]
    m: Option<u64>,
    /// Generating vector for lattice, comma separated
    #[arg(long, value_delimiter = ',')]
    z: Option<Vec<u64>>,
}

#[derive(Args)]
struct FunctionArgs {
    /// Test function as JSON: [[k, re, im], ...]
    #[arg(long = "f", conflicts_with = "random_terms")]
    function: Option<PathBuf>,
    /// Draw a random real polynomial with this many cosine modes
    #[arg(long, default_value_t = 8)]
    random_terms: usize,
    /// Frequency box for the random polynomial
    #[arg(long = "box", default_value_t = 16)]
    frequency_box: u32,
}

struct Output {
    json: Value,
    csv: Option<String>,
}

impl Output {
    fn json(value: impl Serialize) -> Result<Self, Error> {
        Ok(Self { json: serde_json::to_value(value)?, csv: None })
    }
}

fn need<T>(value: Option<T>, flag: &str, set: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for --set {set}")))
}

fn build_set(a: &SetArgs) -> Result<PointSet, Error> {
    match a.set {
        SetKind::KorobovS => korobov_s(a.d, need(a.p, "p", "korobov-s")?),
        SetKind::KorobovT => korobov_t(a.d, need(a.p, "p", "korobov-t")?),
        SetKind::UnionP1 => union_p1(a.d, need(a.m, "m", "union-p1")?),
        SetKind::UnionP2 => union_p2(a.d, need(a.m, "m", "union-p2")?),
        SetKind::Lattice => {
            let z = need(a.z.clone(), "z", "lattice")?;
            wiener_qmc::error::check_dim(a.d, z.len())?;
            Ok(lattice(&GeneratingVector::new(need(a.p, "p", "lattice")?, z)?))
        }
    }
}

fn load_function(f: &FunctionArgs, d: usize, seed: u64) -> Result<FourierPolynomial, Error> {
    let poly = match &f.function {
        Some(path) => FourierPolynomial::from_json(&fs::read_to_string(path)?)?,
        None => random_real_polynomial(d, f.frequency_box, f.random_terms, seed)?,
    };
    wiener_qmc::error::check_dim(d, poly.dim())?;
    Ok(poly)
}

fn run(cli: &Cli) -> Result<(Output, bool), Error> {
    let seed = cli.seed;
    let out = match &cli.command {
        Command::GenPoints(a) => {
            let set = build_set(a)?;
            let csv = set.to_csv();
            let points: Vec<Vec<String>> = set
                .nodes()
                .iter()
                .map(|x| x.numerators().iter().map(|n| format!("{n}/{}", x.den())).collect())
                .collect();
            let json = json!({"d": set.dim(), "n": set.len(), "provenance": set.provenance(), "points": points});
            Output { json, csv: Some(csv) }
        }
        Command::ExpSum { set, k } => {
            let s = exp_sum(&qmc_rule(build_set(set)?)?, k)?;
            Output::json(json!({"re": s.re, "im": s.im}))?
        }
        Command::Integrate { set, f } => {
            let rule = qmc_rule(build_set(set)?)?;
            let poly = load_function(f, set.d, seed)?;
            let q = apply_complex(&rule, &poly)?;
            let exact = poly.integral();
            Output::json(json!({
                "n": rule.len(),
                "estimate_re": q.re,
                "estimate_im": q.im,
                "integral_re": exact.re,
                "integral_im": exact.im,
                "error": (exact - q).norm(),
            }))?
        }
        Command::Wce { set, weight, frequency_box, samples } => {
            let rule = qmc_rule(build_set(set)?)?;
            let ks = match samples {
                None => frequency::frequency_box(set.d, *frequency_box),
                Some(count) => {
                    let b = i64::from(*frequency_box);
                    let mut rng = TrialRng::new(seed, 0);
                    (0..*count)
                        .map(|_| FrequencyVector::new((0..set.d).map(|_| rng.range_inclusive(-b, b)).collect()))
                        .collect::<Result<Vec<_>, _>>()?
                }
            };
            let w = worst_case_detail(&rule, &ks, *weight)?;
            Output::json(json!({
                "n": rule.len(),
                "weight": weight.name(),
                "frequencies": ks.len(),
                "wce": w.error,
                "worst_k": w.worst_k,
            }))?
        }
        Command::RandomizedTrial { m, d, trials, c_hat, f } => {
            let rule = RandomizedLatticeRule::new(*m, *d, seed)?;
            let poly = load_function(f, *d, seed)?;
            let c = match c_hat {
                Some(c) => *c,
                None => density_constants(*m, *m)?.c_hat,
            };
            let norm = poly.norm(WeightFunction::R1);
            let mean = rule.empirical_randomized_error(&poly, *trials)?;
            let bound = randomized_error_bound(*m, c, norm)?;
            Output::json(json!({
                "m": m,
                "d": d,
                "trials": trials,
                "c_hat": c,
                "norm_r1": norm,
                "mean_error": mean,
                "bound": bound,
                "margin": bound - mean,
                "passed": mean <= bound,
            }))?
        }
        Command::FoolingSearch { nodes, coeffs, rho, q_cap } => {
            let xs = nodes
                .split(',')
                .map(|t| t.trim().parse::<RationalNode>())
                .collect::<Result<Vec<_>, _>>()?;
            let points = PointSet::explicit(1, xs)?;
            let rule = match coeffs {
                None => qmc_rule(points)?,
                Some(c) => QuadratureRule::new(points, c.clone())?,
            };
            let cert = fooling_certificate(&rule, FoolingSearchParams::new(*rho, *q_cap)?)?;
            let mut value = serde_json::to_value(&cert)?;
            value["lower_bound"] = json!(cert.lower_bound());
            Output { json: value, csv: None }
        }
        Command::HoeffdingSearch { delta, d, n, max_trials } => {
            let n = match n {
                Some(n) => *n,
                None => usize::try_from(min_n_hoeffding(*delta, *d)?).map_err(|_| Error::Overflow("sample size"))?,
            };
            let set = enumerate_a(*delta, *d)?;
            let good = search_good_pointset(*delta, *d, n, seed, *max_trials)?;
            let json = json!({
                "size": set.len(),
                "bound": a_cardinality_bound(*delta, *d)?,
                "n": n,
                "trials_used": good.trials_used,
                "max_ratio": good.max_ratio,
            });
            Output { json, csv: Some(good.points.to_csv()) }
        }
        Command::FreqSet { delta, d, list } => {
            let set = enumerate_a(*delta, *d)?;
            let mut json = json!({"size": set.len(), "bound": a_cardinality_bound(*delta, *d)?});
            if *list {
                json["members"] = serde_json::to_value(&set.members)?;
            }
            let mut csv: String = (1..=*d).map(|j| format!("k{j}")).collect::<Vec<_>>().join(",");
            csv.push('\n');
            for k in &set.members {
                let row: Vec<String> = k.components().iter().map(|c| c.to_string()).collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            Output { json, csv: Some(csv) }
        }
        Command::Bounds { thm, eps, c_hat, d } => {
            let c = || c_hat.ok_or_else(|| Error::InvalidArgument(format!("--c-hat is required for --thm {thm}")));
            let sizing = match thm {
                2 => n_bound_thm2(*eps, c()?)?,
                3 => n_bound_thm3(*eps, c()?)?,
                4 => n_bound_thm4(*eps, *d, c()?)?,
                _ => n_bound_thm5(*eps, *d)?,
            };
            Output::json(sizing)?
        }
        Command::Verify { check } => {
            let report = match check {
                Some(id) => {
                    let c = verify::run_check(*id, seed)?;
                    json!({"seed": seed, "passed": c.passed, "checks": [c]})
                }
                None => serde_json::to_value(verify::run_all(seed)?)?,
            };
            let passed = report["passed"].as_bool().unwrap_or(false);
            let mut csv = String::from("id,name,passed,near_bound\n");
            for c in report["checks"].as_array().into_iter().flatten() {
                csv.push_str(&format!("{},{},{},{}\n", c["id"], c["name"].as_str().unwrap_or(""), c["passed"], c["near_bound"]));
            }
            return Ok((Output { json: report, csv: Some(csv) }, passed));
        }
    };
    Ok((out, true))
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

// A flat object becomes a header line and a single row, keys in sorted order.
fn object_to_csv(map: &Map<String, Value>) -> String {
    let header: Vec<&str> = map.keys().map(String::as_str).collect();
    let row: Vec<String> = map.values().map(csv_cell).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn render(out: &Output, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(&out.json).expect("JSON values always serialize");
            s.push('\n');
            s
        }
        Format::Csv => match (&out.csv, &out.json) {
            (Some(csv), _) => csv.clone(),
            (None, Value::Object(map)) => object_to_csv(map),
            (None, other) => format!("{}\n", csv_cell(other)),
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let format = cli.format.unwrap_or_else(|| match &cli.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    });
    let (out, passed) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::SearchExhausted { .. } => ExitCode::from(EXIT_SEARCH_EXHAUSTED),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let text = render(&out, format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{text}"),
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}
