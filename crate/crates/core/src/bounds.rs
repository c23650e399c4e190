//! Deterministic conversions between Γ (the expected maximum weight) and
//! ln |X|: rate functions, the `g_τ` defect and measure-specific closed forms.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::Rank;
use crate::measures::{Measure, MeasureKind};
use crate::numeric::{bisect, golden_max, golden_min};

/// Returned by rate functions when `t` exceeds the support of the measure,
/// where the Legendre transform is infinite.
pub const RATE_SENTINEL: f64 = 1e300;

const ARG_TOL: f64 = 1e-10;
const DELTA_EDGE: f64 = 1.0 - 1e-12;
const SUP_GRID: usize = 4000;

/// Rate function of the logistic measure,
/// `sup_{0≤δ<1} (δt + ln(sin πδ / πδ))`.
pub fn h_logistic(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let objective = |d: f64| {
        if d == 0.0 {
            return 0.0;
        }
        // sin(πδ) = sin(π(1-δ)) keeps precision as δ → 1
        d * t + ((PI * d.min(1.0 - d)).sin() / (PI * d)).ln()
    };
    golden_max(objective, 0.0, DELTA_EDGE, ARG_TOL).1.max(0.0)
}

/// Rate function of the two-sided exponential measure in closed form,
/// `s - ln(s+1) + ln 2 - 1` with `s = √(1+t²)`.
pub fn h_exponential(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let s = t.hypot(1.0);
    let s_minus_1 = t * t / (s + 1.0);
    // s - 1 - ln((s+1)/2), written to avoid cancellation near t = 0
    (s_minus_1 - (0.5 * s_minus_1).ln_1p()).max(0.0)
}

/// Legendre transform `sup_{δ≥0} (δt - ln L(δ))` computed numerically.
pub fn h_generic(measure: &Measure, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t > measure.support_sup() {
        return RATE_SENTINEL;
    }
    let radius = measure.mgf_radius();
    if radius <= 0.0 {
        return 0.0;
    }
    let objective = |d: f64| d * t - measure.ln_mgf(d);
    let hi = if radius.is_finite() {
        radius * DELTA_EDGE
    } else {
        // concave objective: once it drops from d to 2d the peak is below 2d
        let mut d = 1.0;
        while d < 1048576.0 && objective(2.0 * d) >= objective(d) {
            d *= 2.0;
        }
        2.0 * d
    };
    golden_max(objective, 0.0, hi, ARG_TOL).1.max(0.0)
}

/// The rate function used for lower bounds: closed forms where available.
pub fn rate(measure: &Measure, t: f64) -> f64 {
    match measure.kind() {
        MeasureKind::Logistic => h_logistic(t),
        MeasureKind::Exponential => h_exponential(t),
        _ => h_generic(measure, t),
    }
}

/// `g_τ(a) = ln(1 + e^{-τa}) - τ T(a)`.
pub fn g_tau(measure: &Measure, tau: f64, a: f64) -> f64 {
    (-tau * a).exp().ln_1p() - tau * measure.tail_integral(a)
}

/// `sup_{a≥0} g_τ(a)`, found from the critical points where the logistic
/// CDF at `τa` crosses `F(a)`, together with `g_τ(0)` and the limit 0.
pub fn g_tau_sup(measure: &Measure, tau: f64) -> f64 {
    let g = |a: f64| g_tau(measure, tau, a);
    // g'(a) = τ (σ(τa) - F(a))
    let slope = |a: f64| 1.0 / (1.0 + (-tau * a).exp()) - measure.cdf(a);
    let span = (45.0 / tau).max(45.0);
    let step = span / SUP_GRID as f64;
    let mut best = g(0.0).max(0.0);
    let mut prev = slope(0.0);
    for i in 1..=SUP_GRID {
        let a = i as f64 * step;
        let cur = slope(a);
        if prev > 0.0 && cur <= 0.0 {
            let root = bisect(slope, a - step, a, 1e-13);
            best = best.max(g(root));
        }
        best = best.max(g(a));
        prev = cur;
    }
    best
}

/// `τγ + n · sup g_τ`, the upper bound attached to a fixed τ.
fn tau_bound(measure: &Measure, gamma: f64, n: usize, tau: f64) -> f64 {
    tau * gamma + n as f64 * g_tau_sup(measure, tau)
}

/// Upper bound on ln |X| from Γ. Logistic: Γ itself; exponential: 2 ln 2 · Γ;
/// otherwise the best `τγ + n · sup g_τ` over τ.
pub fn upper_bound_ln_count(measure: &Measure, gamma: f64, n: usize) -> f64 {
    match measure.kind() {
        MeasureKind::Logistic => gamma,
        MeasureKind::Exponential => 2.0 * LN_2 * gamma,
        _ => optimize_tau(measure, gamma, n).1,
    }
}

/// Minimizes the τ-bound over a geometric grid `2^-10 … 2^6`, then refines
/// in log τ around the best grid point. Returns `(τ, bound)`.
pub fn optimize_tau(measure: &Measure, gamma: f64, n: usize) -> (f64, f64) {
    let exps: Vec<f64> = (-20..=12).map(|j| j as f64 * 0.5).collect();
    let values: Vec<f64> = exps
        .iter()
        .map(|&e| tau_bound(measure, gamma, n, e.exp2()))
        .collect();
    let (best, _) =
        values.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    let lo = exps[best.saturating_sub(1)];
    let hi = exps[(best + 1).min(exps.len() - 1)];
    let (e, v) = golden_min(|e| tau_bound(measure, gamma, n, e.exp2()), lo, hi, 1e-6);
    if v <= values[best] {
        (e.exp2(), v)
    } else {
        (exps[best].exp2(), values[best])
    }
}

/// Bound for families inside the Hamming ball of radius `k` under the
/// exponential measure: `Γ + k ln 2`.
pub fn ball_bound(gamma: f64, k: usize) -> f64 {
    gamma + k as f64 * LN_2
}

/// The constant β with `h(t) ≥ βt` for all `t ≥ ln α`, so that
/// `ln |X| ≥ β Γ` whenever `Γ/k ≥ ln α`.
pub fn beta_factor(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "beta factor needs alpha > 1, got {alpha}"
        )));
    }
    let t = alpha.ln();
    Ok(h_logistic(t) / t)
}

/// Lower bound `k · h(γ/k)`, clamped at 0.
pub fn lower_bound_ln_count(measure: &Measure, gamma: f64, k: usize) -> f64 {
    if k == 0 || gamma <= 0.0 {
        return 0.0;
    }
    let h = rate(measure, gamma / k as f64);
    if h >= RATE_SENTINEL {
        return RATE_SENTINEL;
    }
    (k as f64 * h).max(0.0)
}

/// Which rule produced an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperRule {
    /// ln |X| ≤ Γ for the logistic measure.
    Logistic,
    /// ln |X| ≤ 2 ln 2 · Γ for the exponential measure.
    ExponentialScaling,
    /// ln |X| ≤ Γ + k ln 2 for the exponential measure and rank ≤ k.
    ExponentialBall,
    /// ln |X| ≤ τΓ + n sup g_τ at the best τ.
    TauOptimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerRule {
    /// ln |X| ≥ k h(Γ/k).
    RateFunction,
    /// No rank bound is known, so only the trivial ln |X| ≥ 0 holds.
    Trivial,
}

/// Two-sided bounds on ln |X|.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountBounds {
    pub ln_lower: f64,
    pub ln_upper: f64,
    /// Bound map applied to Γ itself, before any statistical slack.
    pub deterministic_lower: f64,
    pub deterministic_upper: f64,
    pub gamma: f64,
    pub k: Option<usize>,
    /// `Γ/k`, the argument of the rate function.
    pub t: Option<f64>,
    pub slack_used: f64,
    pub upper_rule: UpperRule,
    pub lower_rule: LowerRule,
    /// Set when `(Γ - slack)/k` lies beyond the support of the measure, so
    /// the rate function is infinite and the lower bound was clamped to
    /// the upper one.
    pub rate_saturated: bool,
}

impl CountBounds {
    pub fn contains(&self, ln_count: f64) -> bool {
        self.ln_lower <= ln_count && ln_count <= self.ln_upper
    }
}

/// Composes the bound maps for an estimate `gamma` with statistical
/// `slack`: the upper side is evaluated at `gamma + slack`, the lower side
/// at `gamma - slack`.
pub fn count_bounds(
    measure: &Measure,
    gamma: f64,
    slack: f64,
    n: usize,
    rank: Rank,
) -> CountBounds {
    let k = rank.bound();
    let upper_at = |g: f64| -> (f64, UpperRule) {
        let g = g.max(0.0);
        match (measure.kind(), k) {
            (MeasureKind::Exponential, Some(k)) => {
                let scaled = 2.0 * LN_2 * g;
                let ball = ball_bound(g, k);
                if ball < scaled {
                    (ball, UpperRule::ExponentialBall)
                } else {
                    (scaled, UpperRule::ExponentialScaling)
                }
            }
            (MeasureKind::Exponential, None) => (2.0 * LN_2 * g, UpperRule::ExponentialScaling),
            (MeasureKind::Logistic, _) => (g, UpperRule::Logistic),
            _ => (upper_bound_ln_count(measure, g, n), UpperRule::TauOptimized),
        }
    };
    let (deterministic_upper, _) = upper_at(gamma);
    let (ln_upper, upper_rule) = upper_at(gamma + slack);
    let (lower_rule, deterministic_lower, raw_lower) = match k {
        Some(k) => (
            LowerRule::RateFunction,
            lower_bound_ln_count(measure, gamma, k),
            lower_bound_ln_count(measure, gamma - slack, k),
        ),
        None => (LowerRule::Trivial, 0.0, 0.0),
    };
    let rate_saturated = raw_lower >= RATE_SENTINEL;
    CountBounds {
        ln_lower: raw_lower.min(ln_upper),
        ln_upper,
        deterministic_lower: deterministic_lower.min(deterministic_upper),
        deterministic_upper,
        gamma,
        k,
        t: k.filter(|&k| k > 0).map(|k| gamma / k as f64),
        slack_used: slack,
        upper_rule,
        lower_rule,
        rate_saturated,
    }
}
