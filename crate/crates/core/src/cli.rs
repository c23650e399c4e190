//! Command-line front end. [`run`] takes the argument list and returns the
//! exit code with the text for stdout and stderr, so the binary is a thin
//! wrapper and tests can drive every subcommand in process.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{count_bounds, g_tau, rate, CountBounds};
use crate::error::{Error, Result};
use crate::estimator::{
    estimate_ln_count, CountEstimate, EstimateConfig, DEFAULT_POLICY_CONSTANT, DEFAULT_Z,
};
use crate::exact::{polynomial_exact, ExactCount, Limits};
use crate::families::io::{
    parse_edge_list, parse_int_matrix, parse_multiplicities, parse_subsets, read_text,
};
use crate::families::{FamilyOracle, GfMatrix, Rank, DEFAULT_PRIME};
use crate::isoperimetry::{min_h_profile, solve_two_spheres};
use crate::measures::Measure;
use crate::rng::RandomStream;

pub const DEFAULT_SEED: u64 = 0x5EED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "randcount",
    version,
    about = "Approximate counting by random weighting and optimization"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for sampling (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate Γ and bound ln |X| for a family.
    Estimate(EstimateArgs),
    /// Count a family exactly.
    Exact(ExactArgs),
    /// Map a given Γ to bounds on ln |X|.
    Bounds(BoundsArgs),
    /// Tabulate the rate function h(t) or the defect g_τ(a).
    Curve(CurveArgs),
    /// Solve for the two-sphere extremal product at entropy α.
    Isoperimetry(IsoArgs),
    /// Estimate and count exactly, then check the exact value lies inside
    /// the bounds.
    Verify(EstimateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKindArg {
    Explicit,
    UniformMatroid,
    SpanningTrees,
    Forests,
    LinearMatroid,
    BipartiteMatchings,
    PerfectMatchings,
    CubeFace,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKindArg,
    /// Edge list, one `u v` pair per line, 1-indexed.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// CSV integer matrix.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// One subset per line, 1-indexed elements, `{}` for the empty set.
    #[arg(long)]
    subsets: Option<PathBuf>,
    /// Ground-set size (uniform matroid, or to pad an explicit family).
    #[arg(long)]
    n: Option<usize>,
    /// Subset size for the uniform matroid.
    #[arg(long)]
    k: Option<usize>,
    /// Dimension of the cube face.
    #[arg(long)]
    dim: Option<usize>,
    /// Field size for linear matroids.
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Use the matrix entries as multiplicities (permanent or hafnian).
    #[arg(long)]
    matrix_multiplicities: bool,
    /// File of positive integer multiplicities, one per ground element.
    #[arg(long)]
    multiplicities: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value = "logistic", value_parser = parse_measure)]
    measure: Measure,
    /// Target accuracy of each run.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Failure probability; sets the number of median-of-means runs.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Samples per run, overriding the policy.
    #[arg(long)]
    m: Option<usize>,
    /// Number of runs (odd), overriding --delta.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, default_value = "0x5EED", value_parser = parse_seed)]
    seed: u64,
    /// Constant C in the C·k/ε² logistic sample count.
    #[arg(long, default_value_t = DEFAULT_POLICY_CONSTANT)]
    policy_constant: f64,
    /// Slack multiplier applied to the standard error.
    #[arg(long, default_value_t = DEFAULT_Z)]
    z: f64,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long, default_value = "logistic", value_parser = parse_measure)]
    measure: Measure,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    /// Members have exactly k elements (or at most k with --at-most).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    at_most: bool,
    /// Ground-set size, needed for measures without a closed-form bound.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    slack: f64,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long, default_value = "logistic", value_parser = parse_measure)]
    measure: Measure,
    /// Tabulate h(t) over --t.
    #[arg(long, conflicts_with = "g_tau")]
    h: bool,
    /// Tabulate g_τ(a) over --a for this τ.
    #[arg(long)]
    g_tau: Option<f64>,
    /// Range start:end:step for t.
    #[arg(long, value_parser = parse_range)]
    t: Option<Range>,
    /// Range start:end:step for a.
    #[arg(long, value_parser = parse_range)]
    a: Option<Range>,
}

#[derive(Debug, Args)]
struct IsoArgs {
    #[arg(long, default_value = "logistic", value_parser = parse_measure)]
    measure: Measure,
    #[arg(long)]
    alpha: f64,
    /// Emit the scan of inf_x H(τ, x) over --tau as CSV instead.
    #[arg(long)]
    csv: bool,
    #[arg(long, value_parser = parse_range, default_value = "0.05:4:0.05")]
    tau: Range,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Range {
    start: f64,
    end: f64,
    step: f64,
}

impl Range {
    fn points(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:end:step, got {s:?}"));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number {t:?} in range"))
    };
    let r = Range {
        start: num(parts[0])?,
        end: num(parts[1])?,
        step: num(parts[2])?,
    };
    if !(r.step > 0.0) || r.end < r.start || !r.start.is_finite() || !r.end.is_finite() {
        return Err(format!("range {s:?} needs a positive step and end ≥ start"));
    }
    if (r.end - r.start) / r.step > 1e7 {
        return Err(format!("range {s:?} has too many points"));
    }
    Ok(r)
}

fn parse_measure(s: &str) -> std::result::Result<Measure, String> {
    s.parse::<Measure>().map_err(|e| e.to_string())
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("bad seed {s:?}"))
}

fn need<'a, T>(value: &'a Option<T>, flag: &str, family: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Error::Input(format!("--family {family} needs --{flag}")))
}

fn build_family(args: &FamilyArgs) -> Result<FamilyOracle> {
    let oracle = match args.family {
        FamilyKindArg::Explicit => {
            let (subsets, implied) =
                parse_subsets(&read_text(need(&args.subsets, "subsets", "explicit")?)?)?;
            FamilyOracle::explicit(args.n.unwrap_or(0).max(implied), subsets)?
        }
        FamilyKindArg::UniformMatroid => FamilyOracle::uniform_matroid(
            *need(&args.n, "n", "uniform-matroid")?,
            *need(&args.k, "k", "uniform-matroid")?,
        )?,
        FamilyKindArg::SpanningTrees => FamilyOracle::spanning_trees(parse_edge_list(
            &read_text(need(&args.graph, "graph", "spanning-trees")?)?,
        )?)?,
        FamilyKindArg::Forests => FamilyOracle::forests(parse_edge_list(&read_text(need(
            &args.graph,
            "graph",
            "forests",
        )?)?)?),
        FamilyKindArg::LinearMatroid => {
            let rows =
                parse_int_matrix(&read_text(need(&args.matrix, "matrix", "linear-matroid")?)?)?;
            FamilyOracle::linear_matroid(GfMatrix::from_rows(&rows, args.prime)?)
        }
        FamilyKindArg::BipartiteMatchings => {
            let rows = parse_int_matrix(&read_text(need(
                &args.matrix,
                "matrix",
                "bipartite-matchings",
            )?)?)?;
            if args.matrix_multiplicities {
                FamilyOracle::bipartite_from_matrix(&rows)?
            } else {
                if rows.iter().flatten().any(|&x| x < 0) {
                    return Err(Error::Input(
                        "support matrix entries must be nonnegative".into(),
                    ));
                }
                let support: Vec<Vec<bool>> = rows
                    .iter()
                    .map(|r| r.iter().map(|&x| x > 0).collect())
                    .collect();
                FamilyOracle::bipartite_matchings(&support)?
            }
        }
        FamilyKindArg::PerfectMatchings => match (&args.graph, &args.matrix) {
            (Some(path), None) => {
                FamilyOracle::perfect_matchings(parse_edge_list(&read_text(path)?)?)?
            }
            (None, Some(path)) => {
                let rows = parse_int_matrix(&read_text(path)?)?;
                let oracle = FamilyOracle::matchings_from_symmetric(&rows)?;
                if args.matrix_multiplicities {
                    oracle
                } else {
                    oracle.without_multiplicities()
                }
            }
            _ => {
                return Err(Error::Input(
                    "--family perfect-matchings needs exactly one of --graph or --matrix".into(),
                ))
            }
        },
        FamilyKindArg::CubeFace => FamilyOracle::cube_face(*need(&args.dim, "dim", "cube-face")?)?,
    };
    match &args.multiplicities {
        Some(path) => {
            if oracle.multiplicities().is_some() {
                return Err(Error::Input(
                    "--multiplicities conflicts with --matrix-multiplicities".into(),
                ));
            }
            oracle.with_multiplicities(parse_multiplicities(&read_text(path)?)?)
        }
        None => Ok(oracle),
    }
}

/// Everything a subcommand can print.
struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn kv_lines(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn run_estimate(args: &EstimateArgs) -> Result<(FamilyOracle, CountEstimate)> {
    let oracle = build_family(&args.family)?;
    let config = EstimateConfig {
        eps: args.eps,
        delta_fail: args.delta,
        m_override: args.m,
        runs_override: args.runs,
        policy: None,
        policy_constant: args.policy_constant,
        z: args.z,
    };
    let report = estimate_ln_count(
        &oracle,
        &args.measure,
        &config,
        &RandomStream::new(args.seed),
    )?;
    Ok((oracle, report))
}

#[derive(Serialize)]
struct ExactReport<'a> {
    family: String,
    #[serde(flatten)]
    count: &'a ExactCount,
    ln_value: f64,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    report: &'a CountEstimate,
    exact: &'a ExactCount,
    ln_exact: f64,
    inside: bool,
}

#[derive(Serialize)]
struct BoundsReport<'a> {
    measure: String,
    #[serde(flatten)]
    bounds: &'a CountBounds,
}

#[derive(Serialize)]
struct CurvePoint {
    x: f64,
    y: f64,
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let format = cli.format;
    match &cli.command {
        Command::Estimate(args) => {
            let (_, report) = run_estimate(args)?;
            Ok(Output::ok(match format {
                Format::Json => json(&report),
                _ => report.to_text(),
            }))
        }
        Command::Verify(args) => {
            let (oracle, report) = run_estimate(args)?;
            let exact = polynomial_exact(&oracle, &Limits::from_env()?)?;
            let ln_exact = exact.ln_value();
            let inside = report.bounds.contains(ln_exact);
            let stdout = match format {
                Format::Json => json(&VerifyReport {
                    report: &report,
                    exact: &exact,
                    ln_exact,
                    inside,
                }),
                _ => {
                    let mut s = report.to_text();
                    s.push_str(&kv_lines(&[
                        ("exact", exact.value.to_string()),
                        (
                            "exact_method",
                            serde_json::to_value(exact.method)
                                .unwrap()
                                .as_str()
                                .unwrap()
                                .into(),
                        ),
                        ("ln_exact", ln_exact.to_string()),
                        ("inside", inside.to_string()),
                    ]));
                    s
                }
            };
            Ok(Output {
                code: if inside { EXIT_OK } else { EXIT_VERIFY_FAILED },
                stderr: if inside {
                    String::new()
                } else {
                    "ln of the exact count lies outside the bounds\n".into()
                },
                stdout,
            })
        }
        Command::Exact(args) => {
            let oracle = build_family(&args.family)?;
            let count = polynomial_exact(&oracle, &Limits::from_env()?)?;
            let report = ExactReport {
                family: oracle.descriptor(),
                count: &count,
                ln_value: count.ln_value(),
            };
            Ok(Output::ok(match format {
                Format::Json => json(&report),
                _ => kv_lines(&[
                    ("family", report.family.clone()),
                    ("value", count.value.to_string()),
                    (
                        "method",
                        serde_json::to_value(count.method)
                            .unwrap()
                            .as_str()
                            .unwrap()
                            .into(),
                    ),
                    ("ln_value", report.ln_value.to_string()),
                ]),
            }))
        }
        Command::Bounds(args) => {
            let needs_n = !(args.measure.is_logistic() || args.measure.is_exponential());
            let n = match (args.n, needs_n) {
                (Some(n), _) => n,
                (None, false) => args.k.unwrap_or(0),
                (None, true) => {
                    return Err(Error::Input(format!(
                        "--n is required for {}",
                        args.measure
                    )))
                }
            };
            if !args.gamma.is_finite() || args.gamma < 0.0 || !(args.slack >= 0.0) {
                return Err(Error::Input(
                    "--gamma and --slack must be finite and nonnegative".into(),
                ));
            }
            let rank = match (args.k, args.at_most) {
                (Some(k), false) => Rank::Uniform(k),
                (Some(k), true) => Rank::AtMost(k),
                (None, _) => Rank::Mixed,
            };
            let bounds = count_bounds(&args.measure, args.gamma, args.slack, n, rank);
            let report = BoundsReport {
                measure: args.measure.label(),
                bounds: &bounds,
            };
            Ok(Output::ok(match format {
                Format::Json => json(&report),
                _ => kv_lines(&[
                    ("measure", report.measure.clone()),
                    ("gamma", bounds.gamma.to_string()),
                    ("k", bounds.k.map_or("none".into(), |k| k.to_string())),
                    (
                        "deterministic_lower",
                        bounds.deterministic_lower.to_string(),
                    ),
                    (
                        "deterministic_upper",
                        bounds.deterministic_upper.to_string(),
                    ),
                    ("slack", bounds.slack_used.to_string()),
                    ("ln_lower", bounds.ln_lower.to_string()),
                    ("ln_upper", bounds.ln_upper.to_string()),
                ]),
            }))
        }
        Command::Curve(args) => {
            let (header, points) = match (args.h, args.g_tau) {
                (true, None) => {
                    let range = args
                        .t
                        .ok_or_else(|| Error::Input("--h needs --t start:end:step".into()))?;
                    (
                        "t,h",
                        range
                            .points()
                            .into_iter()
                            .map(|t| (t, rate(&args.measure, t)))
                            .collect::<Vec<_>>(),
                    )
                }
                (false, Some(tau)) => {
                    if !(tau > 0.0) {
                        return Err(Error::Input("--g-tau must be positive".into()));
                    }
                    let range = args
                        .a
                        .ok_or_else(|| Error::Input("--g-tau needs --a start:end:step".into()))?;
                    if range.start < 0.0 {
                        return Err(Error::Input("--a must start at a nonnegative value".into()));
                    }
                    (
                        "a,g_tau",
                        range
                            .points()
                            .into_iter()
                            .map(|a| (a, g_tau(&args.measure, tau, a)))
                            .collect(),
                    )
                }
                _ => {
                    return Err(Error::Input(
                        "curve needs exactly one of --h or --g-tau".into(),
                    ))
                }
            };
            Ok(Output::ok(match format {
                Format::Json => json(
                    &points
                        .iter()
                        .map(|&(x, y)| CurvePoint { x, y })
                        .collect::<Vec<_>>(),
                ),
                _ => csv(header, &points),
            }))
        }
        Command::Isoperimetry(args) => {
            if args.csv || format == Format::Csv {
                let profile = min_h_profile(&args.measure, args.alpha, &args.tau.points())?;
                return Ok(Output::ok(csv("tau,min_h", &profile)));
            }
            let solution = solve_two_spheres(&args.measure, args.alpha)?;
            Ok(Output::ok(match format {
                Format::Json => json(&solution),
                _ => solution.to_text(),
            }))
        }
    }
}

fn csv(header: &str, points: &[(f64, f64)]) -> String {
    let mut out = String::with_capacity(48 * (points.len() + 1));
    out.push_str(header);
    out.push('\n');
    for (x, y) in points {
        out.push_str(&format!("{x:.16e},{y:.16e}\n"));
    }
    out
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_refusal() {
        EXIT_REFUSED
    } else {
        EXIT_INPUT
    }
}

/// Runs the command line `args` (program name first). Returns
/// `(exit code, stdout, stderr)`.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                (EXIT_INPUT, String::new(), text)
            } else {
                (EXIT_OK, text, String::new())
            };
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::Input(format!("cannot start {t} threads: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(out) => (out.code, out.stdout, out.stderr),
        Err(e) => (exit_code(&e), String::new(), format!("error: {e}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:10:0.1").unwrap().points().len(), 101);
        assert_eq!(
            parse_range("0:1:0.25").unwrap().points(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1:0").is_err());
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0x5EED").unwrap(), 0x5EED);
        assert_eq!(parse_seed("7").unwrap(), 7);
        assert!(parse_seed("seven").is_err());
    }

    #[test]
    fn bounds_subcommand() {
        let (code, out, _) = run([
            "randcount",
            "bounds",
            "--measure",
            "logistic",
            "--gamma",
            "6.9315",
            "--k",
            "10",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("ln_upper=6.9315\n"));
        let expected = 10.0 * crate::bounds::h_logistic(6.9315 / 10.0);
        assert!(out.contains(&format!("ln_lower={expected}\n")));
        let (code, _, err) = run([
            "randcount",
            "bounds",
            "--measure",
            "bernoulli",
            "--gamma",
            "2",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("--n"));
    }

    #[test]
    fn curve_subcommand() {
        let (code, out, _) = run([
            "randcount",
            "curve",
            "--h",
            "--measure",
            "logistic",
            "--t",
            "0:10:0.1",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "t,h");
        assert_eq!(lines.len(), 102);
        assert_eq!(lines[1], "0.0000000000000000e0,0.0000000000000000e0");
        let (code, out, _) = run(["randcount", "curve", "--g-tau", "1", "--a", "0:2:1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("a,g_tau\n"));
        let (code, _, _) = run(["randcount", "curve", "--measure", "logistic"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn parse_errors_exit_one() {
        assert_eq!(run(["randcount", "estimate"]).0, 1);
        assert_eq!(run(["randcount", "bounds", "--gamma", "x"]).0, 1);
        assert_eq!(
            run(["randcount", "bounds", "--gamma", "1", "--measure", "cauchy"]).0,
            1
        );
        assert_eq!(run(["randcount", "--help"]).0, 0);
    }

    #[test]
    fn isoperimetry_subcommand() {
        let (code, out, _) = run([
            "randcount",
            "isoperimetry",
            "--measure",
            "exponential",
            "--alpha",
            "0.3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("x2=inf\n"));
        let (code, out, _) = run([
            "randcount",
            "--format",
            "json",
            "isoperimetry",
            "--measure",
            "logistic",
            "--alpha",
            "0.3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"x2\": \"inf\""));
        let (code, out, _) = run([
            "randcount",
            "isoperimetry",
            "--alpha",
            "0.3",
            "--csv",
            "--tau",
            "0.5:1.5:0.5",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
        assert_eq!(run(["randcount", "isoperimetry", "--alpha", "0.9"]).0, 1);
    }

    #[test]
    fn uniform_matroid_exact_and_estimate() {
        let (code, out, _) = run([
            "randcount",
            "exact",
            "--family",
            "uniform-matroid",
            "--n",
            "10",
            "--k",
            "3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("value=120\n"));
        let (code, out, _) = run([
            "randcount",
            "verify",
            "--family",
            "uniform-matroid",
            "--n",
            "10",
            "--k",
            "3",
            "--seed",
            "3",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("inside=true"));
    }
}
