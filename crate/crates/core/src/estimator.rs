//! Monte Carlo estimation of Γ(X, μ), the expected maximum member weight
//! under i.i.d. random weights, and its conversion into bounds on ln |X|.
//!
//! Weight `j` of sample `i` is drawn from substream index `i·n + j` (draw
//! counter 0). Median-of-means run `r` continues the same layout at sample
//! `r·m`, so a single run reproduces a plain estimate.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{count_bounds, CountBounds};
use crate::error::{Error, Result};
use crate::families::FamilyOracle;
use crate::measures::Measure;
use crate::rng::RandomStream;

/// Default constant in the `C·k/ε²` logistic sample count.
pub const DEFAULT_POLICY_CONSTANT: f64 = 32.0;
/// Default multiplier turning the standard error into slack.
pub const DEFAULT_Z: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub gamma_hat: f64,
    /// Total number of oracle calls over all runs.
    pub m: usize,
    pub runs: usize,
    /// Pooled sample standard deviation over `√m`.
    pub std_error: f64,
    pub seed: u64,
    pub measure: String,
    /// Per-run means; a single entry for an unboosted estimate.
    pub run_means: Vec<f64>,
}

/// How the per-run sample count is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplePolicy {
    /// `⌈3 n² D / ε²⌉`, valid for any measure of variance `D`.
    Generic,
    /// `⌈C k / ε²⌉` for the logistic measure on rank-`k` families.
    Logistic,
}

pub fn choose_sample_count(
    measure: &Measure,
    n: usize,
    k: Option<usize>,
    eps: f64,
    policy: SamplePolicy,
    constant: f64,
) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::Input(format!("epsilon must be positive, got {eps}")));
    }
    let m = match policy {
        SamplePolicy::Generic => 3.0 * (n as f64).powi(2) * measure.variance() / (eps * eps),
        SamplePolicy::Logistic => {
            let k = k.ok_or_else(|| {
                Error::Input("logistic sample policy needs a rank bound k".into())
            })?;
            if !measure.is_logistic() {
                return Err(Error::Input(
                    "logistic sample policy needs the logistic measure".into(),
                ));
            }
            constant * k as f64 / (eps * eps)
        }
    };
    Ok((m.ceil() as usize).max(2))
}

/// Number of median-of-means runs for failure probability `delta_fail`:
/// `2⌈12 ln(1/δ)⌉ + 1`.
pub fn runs_for_failure(delta_fail: f64) -> Result<usize> {
    if !(delta_fail > 0.0 && delta_fail < 1.0) {
        return Err(Error::Input(format!(
            "failure probability must lie in (0, 1), got {delta_fail}"
        )));
    }
    Ok(2 * (12.0 * (1.0 / delta_fail).ln()).ceil() as usize + 1)
}

/// Oracle values for samples `first .. first + count`, in index order.
fn sample_values(
    oracle: &FamilyOracle,
    measure: &Measure,
    first: usize,
    count: usize,
    stream: &RandomStream,
) -> Result<Vec<f64>> {
    let n = oracle.n();
    let q = oracle.multiplicities();
    (first..first + count)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |c, i| {
                let base = (i * n) as u64;
                for (j, slot) in c.iter_mut().enumerate() {
                    let u = stream.uniform(base + j as u64, 0);
                    *slot = match q {
                        Some(q) => measure.sample_max_q_unchecked(q[j], u),
                        None => measure.sample_unchecked(u),
                    };
                }
                oracle.weight_unchecked(c)
            },
        )
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_sd(values: &[f64], mean: f64) -> f64 {
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Mean of `m` oracle values under independent weight vectors.
pub fn estimate_gamma(
    oracle: &FamilyOracle,
    measure: &Measure,
    m: usize,
    stream: &RandomStream,
) -> Result<GammaEstimate> {
    median_of_means(oracle, measure, m, 1, stream)
}

/// Median over `runs` independent means of `m_per_run` samples each.
pub fn median_of_means(
    oracle: &FamilyOracle,
    measure: &Measure,
    m_per_run: usize,
    runs: usize,
    stream: &RandomStream,
) -> Result<GammaEstimate> {
    if m_per_run < 2 {
        return Err(Error::Input(format!(
            "need at least 2 samples per run, got {m_per_run}"
        )));
    }
    if runs == 0 || runs % 2 == 0 {
        return Err(Error::Input(format!(
            "number of runs must be odd, got {runs}"
        )));
    }
    let total = m_per_run
        .checked_mul(runs)
        .filter(|t| t.checked_mul(oracle.n().max(1)).is_some())
        .ok_or_else(|| Error::Input("sample count overflows the substream index".into()))?;
    let values = sample_values(oracle, measure, 0, total, stream)?;
    let run_means: Vec<f64> = values.chunks(m_per_run).map(mean).collect();
    let pooled = mean(&values);
    let gamma_hat = if runs == 1 {
        pooled
    } else {
        let mut sorted = run_means.clone();
        sorted.sort_by(f64::total_cmp);
        sorted[runs / 2]
    };
    Ok(GammaEstimate {
        gamma_hat,
        m: total,
        runs,
        std_error: sample_sd(&values, pooled) / (total as f64).sqrt(),
        seed: stream.seed(),
        measure: measure.label(),
        run_means,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub eps: f64,
    pub delta_fail: f64,
    /// Fixed per-run sample count instead of the policy's choice.
    pub m_override: Option<usize>,
    pub runs_override: Option<usize>,
    /// Forces a policy; by default logistic measures on ranked families use
    /// [`SamplePolicy::Logistic`] and everything else the generic count.
    pub policy: Option<SamplePolicy>,
    pub policy_constant: f64,
    pub z: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            eps: 0.5,
            delta_fail: 0.1,
            m_override: None,
            runs_override: None,
            policy: None,
            policy_constant: DEFAULT_POLICY_CONSTANT,
            z: DEFAULT_Z,
        }
    }
}

impl EstimateConfig {
    /// `(m per run, runs)` for a family.
    pub fn plan(&self, oracle: &FamilyOracle, measure: &Measure) -> Result<(usize, usize)> {
        let runs = match self.runs_override {
            Some(r) => r,
            None => runs_for_failure(self.delta_fail)?,
        };
        let m = match self.m_override {
            Some(m) => m,
            None => {
                let k = oracle.rank().bound();
                let policy = self
                    .policy
                    .unwrap_or(if measure.is_logistic() && k.is_some() {
                        SamplePolicy::Logistic
                    } else {
                        SamplePolicy::Generic
                    });
                choose_sample_count(
                    measure,
                    effective_n(oracle),
                    k,
                    self.eps,
                    policy,
                    self.policy_constant,
                )?
            }
        };
        Ok((m, runs))
    }
}

/// Ground-set size seen by the bound machinery: with multiplicities each
/// element stands for `q_i` copies.
fn effective_n(oracle: &FamilyOracle) -> usize {
    match oracle.multiplicities() {
        Some(q) => q.iter().map(|&x| x as usize).sum(),
        None => oracle.n(),
    }
}

/// An estimate together with the bounds it implies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountEstimate {
    pub family: String,
    pub measure: String,
    pub estimate: GammaEstimate,
    pub bounds: CountBounds,
}

impl CountEstimate {
    /// Line-oriented `key=value` report.
    pub fn to_text(&self) -> String {
        let e = &self.estimate;
        let b = &self.bounds;
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        line("family", self.family.clone());
        line("measure", self.measure.clone());
        line("seed", e.seed.to_string());
        line("m", e.m.to_string());
        line("runs", e.runs.to_string());
        line("gamma_hat", e.gamma_hat.to_string());
        line("std_error", e.std_error.to_string());
        line("k", b.k.map_or("none".into(), |k| k.to_string()));
        line("deterministic_lower", b.deterministic_lower.to_string());
        line("deterministic_upper", b.deterministic_upper.to_string());
        line("slack", b.slack_used.to_string());
        line("ln_lower", b.ln_lower.to_string());
        line("ln_upper", b.ln_upper.to_string());
        line(
            "lower_rule",
            serde_json::to_value(b.lower_rule)
                .unwrap()
                .as_str()
                .unwrap_or("")
                .to_string(),
        );
        line(
            "upper_rule",
            serde_json::to_value(b.upper_rule)
                .unwrap()
                .as_str()
                .unwrap_or("")
                .to_string(),
        );
        if b.rate_saturated {
            line("rate_saturated", "true".into());
        }
        out
    }
}

/// Median-of-means estimate of Γ followed by the bound maps, with slack
/// `z · std_error` on both sides.
pub fn estimate_ln_count(
    oracle: &FamilyOracle,
    measure: &Measure,
    config: &EstimateConfig,
    stream: &RandomStream,
) -> Result<CountEstimate> {
    let (m, runs) = config.plan(oracle, measure)?;
    let estimate = median_of_means(oracle, measure, m, runs, stream)?;
    let slack = config.z * estimate.std_error;
    let bounds = count_bounds(
        measure,
        estimate.gamma_hat,
        slack,
        effective_n(oracle),
        oracle.rank(),
    );
    Ok(CountEstimate {
        family: oracle.descriptor(),
        measure: measure.label(),
        estimate,
        bounds,
    })
}

/// Bounds on `ln p_X(q) = ln Σ_{x∈X} Π_{i∈x} q_i` for a family carrying
/// multiplicities `q`, by sampling weight `i` as the maximum of `q_i` draws.
pub fn estimate_polynomial(
    oracle: &FamilyOracle,
    measure: &Measure,
    config: &EstimateConfig,
    stream: &RandomStream,
) -> Result<CountEstimate> {
    if oracle.multiplicities().is_none() {
        return Err(Error::Input(
            "polynomial estimate needs multiplicities".into(),
        ));
    }
    estimate_ln_count(oracle, measure, config, stream)
}
