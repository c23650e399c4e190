//! Extremal sets for the inverse isoperimetric problem: the Γ-rate of
//! Hamming spheres and the two-sphere product that minimizes Γ at a given
//! entropy.
//!
//! Everything goes through the excess
//! `E(τ, x) = T(x) - ln(1 + e^{-τx})/τ`, so that
//! `H(τ, x) = α/τ + E(τ, x)` and `inf_x H(τ, x) = α/τ + min(0, inf_x E)`
//! (E vanishes as x → ∞).

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::numeric::{bisect, golden_max, golden_min};

const INNER_GRID: usize = 2000;
const TIE_TOL: f64 = 1e-14;
/// Offset used to realize the one-sided limits of the minimizers.
pub const SIDE_OFFSET: f64 = 1e-6;

/// Binary entropy in nats.
pub fn entropy(beta: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
    term(beta) + term(1.0 - beta)
}

fn require_continuous(measure: &Measure) -> Result<()> {
    if measure.is_continuous() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{measure} has atoms; a continuous strictly increasing CDF is required"
        )))
    }
}

/// Asymptotic `Γ/n` of the Hamming sphere with `βn` ones:
/// `∫_a^∞ t dF(t) = a (1 - F(a)) + T(a)` with `a = F^{-1}(1 - β)`.
pub fn sphere_gamma_rate(measure: &Measure, density: f64) -> Result<f64> {
    require_continuous(measure)?;
    if !(0.0..1.0).contains(&density) {
        return Err(Error::Domain(format!(
            "sphere density must lie in [0, 1), got {density}"
        )));
    }
    if density == 0.0 {
        return Ok(0.0);
    }
    let a = measure.quantile(1.0 - density)?;
    Ok(a * measure.survival(a) + measure.tail_integral(a))
}

fn excess(measure: &Measure, tau: f64, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    measure.tail_integral(x) - (-tau * x).exp().ln_1p() / tau
}

/// `H(τ, x) = α/τ - ln(1 + e^{-τx})/τ + T(x)`; `x = ∞` gives `α/τ`.
pub fn h_value(measure: &Measure, alpha: f64, tau: f64, x: f64) -> f64 {
    alpha / tau + excess(measure, tau, x)
}

/// Largest x worth scanning: beyond it the tail mass is below 1e-9.
fn x_max(measure: &Measure) -> Result<f64> {
    measure.quantile(1.0 - 1e-9)
}

/// Leftmost minimizer of `E(τ, ·)` and its value; `(∞, 0)` when nothing on
/// the scanned range goes below the limit 0.
fn inner_min(measure: &Measure, tau: f64, xmax: f64) -> (f64, f64) {
    let step = xmax / INNER_GRID as f64;
    let values: Vec<f64> = (0..=INNER_GRID)
        .map(|i| excess(measure, tau, i as f64 * step))
        .collect();
    let lowest = values.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest >= 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let i = values.iter().position(|&v| v <= lowest + TIE_TOL).unwrap();
    let lo = i.saturating_sub(1) as f64 * step;
    let hi = (i + 1).min(INNER_GRID) as f64 * step;
    let (x, v) = golden_min(|x| excess(measure, tau, x), lo, hi, 1e-12);
    // keep the grid point unless refinement is a real improvement, so flat
    // stretches resolve to their left end
    if v < values[i] - TIE_TOL {
        (x, v)
    } else {
        (i as f64 * step, values[i])
    }
}

/// `inf_x H(τ, x)`.
pub fn min_h(measure: &Measure, alpha: f64, tau: f64) -> Result<f64> {
    require_continuous(measure)?;
    let (_, e) = inner_min(measure, tau, x_max(measure)?);
    Ok(alpha / tau + e)
}

/// `(τ, inf_x H(τ, x))` over the given τ values.
pub fn min_h_profile(measure: &Measure, alpha: f64, taus: &[f64]) -> Result<Vec<(f64, f64)>> {
    require_continuous(measure)?;
    let xmax = x_max(measure)?;
    Ok(taus
        .iter()
        .map(|&t| (t, alpha / t + inner_min(measure, t, xmax).1))
        .collect())
}

fn serialize_extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*x)
    }
}

fn serialize_extended_opt<S: Serializer>(
    x: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_extended(v, s),
        None => s.serialize_none(),
    }
}

/// How far the computed solution is from satisfying its defining identities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    /// `|λ₁φ(x₁) + λ₂φ(x₂) - α|`.
    pub mixture: f64,
    /// `|1/(e^{τ₀xᵢ}+1) - (1 - F(xᵢ))|` at interior finite xᵢ.
    #[serde(serialize_with = "serialize_extended_opt")]
    pub critical1: Option<f64>,
    #[serde(serialize_with = "serialize_extended_opt")]
    pub critical2: Option<f64>,
    /// `|λ₁H(τ₀,x₁) + λ₂H(τ₀,x₂) - inf_x H(τ₀,x)|`.
    pub gamma_consistency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoperimetricSolution {
    pub measure: String,
    pub alpha: f64,
    pub tau0: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub x1: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub x2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// `inf_x H(τ₀, x)`, the asymptotic `Γ/n` of the extremal product.
    pub gamma_rate: f64,
    /// `H(τ₀, ·)` is constant, so every x is a minimizer.
    pub flat: bool,
    pub residuals: Residuals,
}

/// `φ(x) = τx/(e^{τx}+1) + ln(1 + e^{-τx})`, the entropy of a sphere of
/// density `1/(e^{τx}+1)`.
fn phi(tau: f64, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let y = tau * x;
    y / (y.exp() + 1.0) + (-y).exp().ln_1p()
}

fn sphere_density(tau: f64, x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / ((tau * x).exp() + 1.0)
    }
}

/// Solves for the product of two Hamming spheres of total entropy `α`
/// minimizing the Γ-rate.
pub fn solve_two_spheres(measure: &Measure, alpha: f64) -> Result<IsoperimetricSolution> {
    require_continuous(measure)?;
    if !(alpha > 0.0 && alpha < std::f64::consts::LN_2) {
        return Err(Error::Domain(format!(
            "entropy must lie in (0, ln 2), got {alpha}"
        )));
    }
    let xmax = x_max(measure)?;
    let objective = |tau: f64| alpha / tau + inner_min(measure, tau, xmax).1;

    // coarse scan over τ = 2^{j/4}, j = -40 … 24
    let exps: Vec<f64> = (-40..=24).map(|j| j as f64 * 0.25).collect();
    let scan: Vec<f64> = exps.iter().map(|&e| objective(e.exp2())).collect();
    let best = (0..scan.len()).fold(0, |b, i| if scan[i] > scan[b] { i } else { b });
    if !(scan[best] > 0.0) {
        return Err(Error::SolverFailure(
            "inf_x H(τ, x) is never positive on the τ scan".into(),
        ));
    }
    let lo = exps[best.saturating_sub(1)].exp2();
    let hi = exps[(best + 1).min(exps.len() - 1)].exp2();
    let (tau0, gamma_rate) = golden_max(objective, lo, hi, 1e-10);

    let (x1, _) = inner_min(measure, tau0 - SIDE_OFFSET, xmax);
    let (x2, _) = inner_min(measure, tau0 + SIDE_OFFSET, xmax);
    let (x1, x2) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };

    let step = xmax / INNER_GRID as f64;
    let flat = (0..=INNER_GRID).all(|i| excess(measure, tau0, i as f64 * step).abs() < 1e-9);

    let (phi1, phi2) = (phi(tau0, x1), phi(tau0, x2));
    let lambda1 = if (phi1 - phi2).abs() < 1e-12 {
        1.0
    } else {
        ((alpha - phi2) / (phi1 - phi2)).clamp(0.0, 1.0)
    };
    let lambda2 = 1.0 - lambda1;
    let beta1 = lambda1 * sphere_density(tau0, x1);
    let beta2 = lambda2 * sphere_density(tau0, x2);

    let critical = |x: f64| {
        (x.is_finite() && x > 0.0).then(|| (sphere_density(tau0, x) - measure.survival(x)).abs())
    };
    let combined =
        lambda1 * h_value(measure, alpha, tau0, x1) + lambda2 * h_value(measure, alpha, tau0, x2);
    let residuals = Residuals {
        mixture: (lambda1 * phi1 + lambda2 * phi2 - alpha).abs(),
        critical1: critical(x1),
        critical2: critical(x2),
        gamma_consistency: (combined - gamma_rate).abs(),
    };
    Ok(IsoperimetricSolution {
        measure: measure.label(),
        alpha,
        tau0,
        x1,
        x2,
        lambda1,
        lambda2,
        beta1,
        beta2,
        gamma_rate,
        flat,
        residuals,
    })
}

impl IsoperimetricSolution {
    /// `Σ λᵢ entropy(βᵢ/λᵢ)`, the entropy rate of the product.
    pub fn recombined_entropy(&self) -> f64 {
        [(self.lambda1, self.beta1), (self.lambda2, self.beta2)]
            .iter()
            .map(|&(l, b)| if l > 0.0 { l * entropy(b / l) } else { 0.0 })
            .sum()
    }

    /// `Σ λᵢ · (sphere Γ-rate at density βᵢ/λᵢ)`, the Γ-rate of the product
    /// computed sphere by sphere.
    pub fn product_gamma_rate(&self, measure: &Measure) -> Result<f64> {
        let mut total = 0.0;
        for (l, b) in [(self.lambda1, self.beta1), (self.lambda2, self.beta2)] {
            if l > 0.0 {
                total += l * sphere_gamma_rate(measure, b / l)?;
            }
        }
        Ok(total)
    }

    pub fn to_text(&self) -> String {
        let fmt = |x: f64| {
            if x.is_infinite() {
                "inf".to_string()
            } else {
                x.to_string()
            }
        };
        let opt = |x: Option<f64>| x.map_or("none".to_string(), |v| v.to_string());
        [
            ("measure", self.measure.clone()),
            ("alpha", fmt(self.alpha)),
            ("tau0", fmt(self.tau0)),
            ("x1", fmt(self.x1)),
            ("x2", fmt(self.x2)),
            ("lambda1", fmt(self.lambda1)),
            ("lambda2", fmt(self.lambda2)),
            ("beta1", fmt(self.beta1)),
            ("beta2", fmt(self.beta2)),
            ("gamma_rate", fmt(self.gamma_rate)),
            ("flat", self.flat.to_string()),
            ("residual_mixture", fmt(self.residuals.mixture)),
            ("residual_critical1", opt(self.residuals.critical1)),
            ("residual_critical2", opt(self.residuals.critical2)),
            ("residual_gamma", fmt(self.residuals.gamma_consistency)),
        ]
        .iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect()
    }
}

/// Single Hamming sphere of entropy `α` under the fair sign measure:
/// returns `(β, Γ-rate)` with `entropy(β) = α`, `β ≤ 1/2`, and Γ-rate `β`.
pub fn bernoulli_sphere(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha <= std::f64::consts::LN_2) {
        return Err(Error::Domain(format!(
            "entropy must lie in (0, ln 2], got {alpha}"
        )));
    }
    let beta = bisect(|b| entropy(b) - alpha, 0.0, 0.5, 1e-15);
    Ok((beta, beta))
}
