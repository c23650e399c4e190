//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use randcount::bounds::{g_tau, g_tau_sup, h_exponential, h_generic, h_logistic};
use randcount::cli;
use randcount::estimator::{estimate_gamma, estimate_polynomial, EstimateConfig};
use randcount::exact::{gamma_exact_bernoulli, polynomial_exact, Limits};
use randcount::isoperimetry::solve_two_spheres;
use randcount::numeric::integrate;
use randcount::{FamilyOracle, Measure, RandomStream};

const SEEDS: u64 = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Criteria 1 and 2: cube-face Γ within 4 standard errors.
fn cube_faces(measure: Measure, per_coordinate: f64, budget: Duration) -> Outcome {
    let start = Instant::now();
    let mut worst = u64::MAX;
    for m in [1usize, 4, 8] {
        let face = FamilyOracle::cube_face(m).unwrap();
        let target = m as f64 * per_coordinate;
        let hits = (1..=SEEDS)
            .filter(|&seed| {
                let e = estimate_gamma(&face, &measure, 100_000, &RandomStream::new(seed)).unwrap();
                (e.gamma_hat - target).abs() <= 4.0 * e.std_error
            })
            .count() as u64;
        worst = worst.min(hits);
    }
    let elapsed = start.elapsed();
    outcome(
        worst >= 95 && elapsed < budget,
        format!(
            "worst face {worst}/{SEEDS} seeds within 4 std errors, {:.1}s (budget {}s)",
            elapsed.as_secs_f64(),
            budget.as_secs()
        ),
    )
}

fn criterion3() -> Outcome {
    let logistic = Measure::logistic();
    let worst = grid(0.0, 20.0, 2000)
        .into_iter()
        .map(|a| g_tau(&logistic, 1.0, a).abs())
        .fold(0.0, f64::max);
    outcome(
        worst < 1e-9,
        format!("max |g_1(a)| over 2000 points = {worst:.3e} (tol 1e-9)"),
    )
}

fn criterion4() -> Outcome {
    let v = g_tau_sup(&Measure::exponential(), 2.0 * LN_2);
    outcome(
        v.abs() < 1e-9,
        format!("sup g_(2 ln 2) = {v:.3e} (tol 1e-9)"),
    )
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let logistic = Measure::logistic();
    let mut worst: f64 = 0.0;
    for i in 1..=9 {
        let d = i as f64 / 10.0;
        // the integrand decays like e^{-(1-δ)x} on the right
        let hi = 40.0 / (1.0 - d);
        let quad = integrate(
            |x| (d * x).exp() * logistic.density(x).unwrap(),
            -60.0,
            hi,
            1e-12,
        );
        let closed = PI * d / (PI * d).sin();
        worst = worst.max((quad - closed).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-6 && elapsed < Duration::from_secs(5),
        format!(
            "max |quadrature - πδ/sin πδ| = {worst:.3e} (tol 1e-6), {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion6() -> Outcome {
    let ts = grid(0.0, 30.0, 601);
    let hs: Vec<f64> = ts.iter().map(|&t| h_logistic(t)).collect();
    let convex = hs
        .windows(3)
        .map(|w| w[2] - 2.0 * w[1] + w[0])
        .fold(f64::INFINITY, f64::min);
    let increasing = hs.windows(2).all(|w| w[1] >= w[0]);
    let large_t = grid(3.0, 30.0, 271)
        .into_iter()
        .all(|t| h_logistic(t) >= t - t.ln() - 1.0);
    let small_t = grid(0.001, 0.05, 50)
        .into_iter()
        .all(|t| (h_logistic(t) / (3.0 * t * t / (2.0 * PI * PI)) - 1.0).abs() < 0.1);
    let logistic = Measure::logistic();
    let exponential = Measure::exponential();
    let gen_log = ts
        .iter()
        .map(|&t| (h_generic(&logistic, t) - h_logistic(t)).abs())
        .fold(0.0, f64::max);
    let gen_exp = grid(0.01, 30.0, 600)
        .into_iter()
        .map(|t| (h_generic(&exponential, t) - h_exponential(t)).abs())
        .fold(0.0, f64::max);
    outcome(
        convex >= -1e-9 && increasing && large_t && small_t && gen_log < 1e-8 && gen_exp < 1e-8,
        format!(
            "min second difference {convex:.2e}, increasing={increasing}, h ≥ t-ln t-1 on [3,30]={large_t}, \
             quadratic regime={small_t}, generic vs closed form {gen_log:.1e} / {gen_exp:.1e}"
        ),
    )
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let petersen = data("petersen.txt");
    let k6 = data("k6.txt");
    let ones = data("ones4.csv");
    let instances: Vec<(&str, Vec<&str>, f64)> = vec![
        (
            "petersen trees",
            vec!["--family", "spanning-trees", "--graph", &petersen],
            2000f64.ln(),
        ),
        (
            "K6 matchings",
            vec!["--family", "perfect-matchings", "--graph", &k6],
            15f64.ln(),
        ),
        (
            "4x4 bipartite",
            vec!["--family", "bipartite-matchings", "--matrix", &ones],
            24f64.ln(),
        ),
        (
            "10-face",
            vec!["--family", "cube-face", "--dim", "10"],
            1024f64.ln(),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, family, ln_exact) in &instances {
        let mut exits = 0;
        let mut slack_ok = 0;
        for seed in 1..=SEEDS {
            let seed = seed.to_string();
            let mut args = vec![
                "randcount",
                "--format",
                "json",
                "verify",
                "--measure",
                "logistic",
                "--seed",
                &seed,
            ];
            args.extend(family.iter().copied());
            let (code, out, err) = cli::run(&args);
            assert!(code == 0 || code == 3, "{name}: {err}");
            let report: serde_json::Value = serde_json::from_str(&out).unwrap();
            let b = &report["bounds"];
            let slack = b["slack_used"].as_f64().unwrap();
            let (lo, hi) = (
                b["ln_lower"].as_f64().unwrap(),
                b["ln_upper"].as_f64().unwrap(),
            );
            assert!((report["ln_exact"].as_f64().unwrap() - ln_exact).abs() < 1e-12);
            exits += (code == 0) as u64;
            slack_ok += (hi - ln_exact >= -slack && lo <= ln_exact + slack) as u64;
        }
        pass &= exits >= 95 && slack_ok >= 95;
        parts.push(format!("{name} {exits}/{SEEDS}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "verify exit 0: {}, {:.1}s (budget 120s)",
            parts.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion8() -> Outcome {
    let twos: Vec<Vec<i64>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { 0 } else { 2 }).collect())
        .collect();
    let instances = [
        (
            "hafnian K4 x2",
            FamilyOracle::matchings_from_symmetric(&twos).unwrap(),
        ),
        (
            "permanent [[1,2],[3,4]]",
            FamilyOracle::bipartite_from_matrix(&[vec![1, 2], vec![3, 4]]).unwrap(),
        ),
    ];
    let measure = Measure::logistic();
    let config = EstimateConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, oracle) in &instances {
        let exact = polynomial_exact(oracle, &Limits::default()).unwrap();
        let ln_exact = exact.ln_value();
        let hits = (1..=SEEDS)
            .filter(|&seed| {
                estimate_polynomial(oracle, &measure, &config, &RandomStream::new(seed))
                    .unwrap()
                    .bounds
                    .contains(ln_exact)
            })
            .count();
        pass &= hits >= 95;
        parts.push(format!("{name} (exact {}) {hits}/{SEEDS}", exact.value));
    }
    outcome(pass, parts.join(", "))
}

fn criterion9() -> Outcome {
    let stream = RandomStream::new(0xACCE);
    let bernoulli = Measure::bernoulli();
    let mut hits = 0;
    for family_index in 0..20u64 {
        let draw = |slot: u64| stream.uniform(family_index * 100_000 + slot, 1);
        let n = 4 + (draw(0) * 9.0) as usize;
        let members = 1 + (draw(1) * 30.0) as usize;
        let subsets: Vec<Vec<usize>> = (0..members)
            .map(|i| {
                (0..n)
                    .filter(|&j| draw(2 + (i * n + j) as u64) < 0.5)
                    .collect()
            })
            .collect();
        let oracle = FamilyOracle::explicit(n, subsets).unwrap();
        let exact = gamma_exact_bernoulli(&oracle, 14).unwrap();
        let e = estimate_gamma(
            &oracle,
            &bernoulli,
            1_000_000,
            &RandomStream::new(family_index + 1),
        )
        .unwrap();
        if (e.gamma_hat - exact).abs() <= 4.0 * e.std_error {
            hits += 1;
        }
    }
    outcome(
        hits >= 19,
        format!("{hits}/20 random families within 4 std errors of the exact sign-vector average"),
    )
}

fn criterion10() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut worst = [0.0f64; 3];
    for measure in [Measure::logistic(), Measure::exponential()] {
        for alpha in [0.1, 0.3, 0.5, 0.65] {
            let s = solve_two_spheres(&measure, alpha).unwrap();
            let entropy_gap = (s.recombined_entropy() - alpha).abs();
            let critical = [s.residuals.critical1, s.residuals.critical2]
                .into_iter()
                .flatten()
                .fold(s.residuals.mixture, f64::max);
            pass &= s.lambda1 + s.lambda2 == 1.0;
            pass &= entropy_gap < 1e-6 && critical < 1e-6 && s.residuals.gamma_consistency < 1e-6;
            worst[0] = worst[0].max(entropy_gap);
            worst[1] = worst[1].max(critical);
            worst[2] = worst[2].max(s.residuals.gamma_consistency);
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "worst entropy gap {:.1e}, critical residual {:.1e}, gamma consistency {:.1e} (tol 1e-6), {:.2}s",
            worst[0],
            worst[1],
            worst[2],
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion11() -> Outcome {
    let petersen = data("petersen.txt");
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "estimate",
            "--family",
            "spanning-trees",
            "--graph",
            &petersen,
            "--seed",
            "7",
        ],
        vec![
            "verify",
            "--family",
            "cube-face",
            "--dim",
            "6",
            "--measure",
            "exponential",
            "--seed",
            "7",
        ],
        vec!["exact", "--family", "spanning-trees", "--graph", &petersen],
        vec![
            "bounds",
            "--measure",
            "logistic",
            "--gamma",
            "6.9315",
            "--k",
            "10",
        ],
        vec!["curve", "--h", "--measure", "logistic", "--t", "0:10:0.1"],
        vec!["isoperimetry", "--measure", "exponential", "--alpha", "0.3"],
    ];
    let mut mismatched = Vec::new();
    for cmd in &commands {
        let outputs: Vec<(i32, String)> = ["1", "8"]
            .iter()
            .map(|threads| {
                let mut args = vec!["randcount", "--format", "json", "--threads", threads];
                args.extend(cmd.iter().copied());
                let (code, out, _) = cli::run(&args);
                (code, out)
            })
            .collect();
        if outputs[0] != outputs[1] || outputs[0].0 != 0 || outputs[0].1.is_empty() {
            mismatched.push(cmd[0]);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} subcommands byte-identical across 1 and 8 threads; mismatches: {mismatched:?}",
            commands.len()
        ),
    )
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "cube-face gamma, logistic",
            Box::new(|| cube_faces(Measure::logistic(), LN_2, Duration::from_secs(30))),
        ),
        (
            "cube-face gamma, exponential",
            Box::new(|| cube_faces(Measure::exponential(), 0.5, Duration::from_secs(30))),
        ),
        ("g_1 vanishes for logistic", Box::new(criterion3)),
        ("exponential sup g at tau = 2 ln 2", Box::new(criterion4)),
        ("logistic mgf by quadrature", Box::new(criterion5)),
        ("rate function properties", Box::new(criterion6)),
        ("sandwich verification corpus", Box::new(criterion7)),
        ("multiplicities", Box::new(criterion8)),
        ("sign-measure exactness", Box::new(criterion9)),
        ("isoperimetry consistency", Box::new(criterion10)),
        ("determinism across threads", Box::new(criterion11)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
