//! Symmetric weight measures on the real line.
//!
//! A [`Measure`] knows how to turn a uniform draw into a weight and exposes
//! the analytic functionals the bound machinery consumes: CDF, quantile,
//! moment generating function and the tail integral
//! `T(a) = ∫_a^∞ (1 - F(t)) dt`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::integrate;

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    /// Density `1 / (e^γ + e^{-γ} + 2)`.
    Logistic,
    /// Density `e^{-|γ|} / 2`.
    Exponential,
    /// `±1` with probability one half each.
    Bernoulli,
    /// The inner law with every weight of magnitude above `cutoff` replaced
    /// by zero. The inner kind is never itself truncated.
    Truncated {
        inner: Box<MeasureKind>,
        cutoff: f64,
    },
}

/// A symmetric probability measure with its variance cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    kind: MeasureKind,
    variance: f64,
}

impl Measure {
    pub fn logistic() -> Self {
        Self {
            kind: MeasureKind::Logistic,
            variance: PI * PI / 3.0,
        }
    }

    pub fn exponential() -> Self {
        Self {
            kind: MeasureKind::Exponential,
            variance: 2.0,
        }
    }

    pub fn bernoulli() -> Self {
        Self {
            kind: MeasureKind::Bernoulli,
            variance: 1.0,
        }
    }

    /// Truncation of `inner` at `cutoff`. Nested truncations collapse to the
    /// smaller cutoff.
    pub fn truncated(inner: Measure, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::Input(format!(
                "truncation cutoff must be positive, got {cutoff}"
            )));
        }
        let (base, cutoff) = match inner.kind {
            MeasureKind::Truncated { inner, cutoff: c } => (*inner, c.min(cutoff)),
            other => (other, cutoff),
        };
        let variance = match base {
            MeasureKind::Bernoulli => {
                if cutoff >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ref k => 2.0 * integrate(|t| t * t * base_density(k, t), 0.0, cutoff, QUAD_TOL),
        };
        Ok(Self {
            kind: MeasureKind::Truncated {
                inner: Box::new(base),
                cutoff,
            },
            variance,
        })
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Variance `D = E γ²`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn is_logistic(&self) -> bool {
        self.kind == MeasureKind::Logistic
    }

    pub fn is_exponential(&self) -> bool {
        self.kind == MeasureKind::Exponential
    }

    /// True when the CDF is continuous and strictly increasing.
    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, MeasureKind::Logistic | MeasureKind::Exponential)
    }

    /// Radius of the open interval on which the MGF is finite.
    pub fn mgf_radius(&self) -> f64 {
        match self.kind {
            MeasureKind::Logistic | MeasureKind::Exponential => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// Supremum of the support.
    pub fn support_sup(&self) -> f64 {
        match &self.kind {
            MeasureKind::Logistic | MeasureKind::Exponential => f64::INFINITY,
            MeasureKind::Bernoulli => 1.0,
            MeasureKind::Truncated { inner, cutoff } => match **inner {
                MeasureKind::Bernoulli if *cutoff >= 1.0 => 1.0,
                MeasureKind::Bernoulli => 0.0,
                _ => *cutoff,
            },
        }
    }

    pub fn sample(&self, u: f64) -> Result<f64> {
        check_draw(u)?;
        Ok(self.sample_unchecked(u))
    }

    #[inline]
    pub(crate) fn sample_unchecked(&self, u: f64) -> f64 {
        match &self.kind {
            MeasureKind::Truncated { inner, cutoff } => {
                let g = base_sample(inner, u);
                if g.abs() > *cutoff {
                    0.0
                } else {
                    g
                }
            }
            k => base_sample(k, u),
        }
    }

    /// Draw from the law of the maximum of `q` independent copies.
    pub fn sample_max_q(&self, q: u32, u: f64) -> Result<f64> {
        if q == 0 {
            return Err(Error::Input("multiplicity must be at least 1".into()));
        }
        check_draw(u)?;
        Ok(self.sample_max_q_unchecked(q, u))
    }

    #[inline]
    pub(crate) fn sample_max_q_unchecked(&self, q: u32, u: f64) -> f64 {
        if q == 1 {
            return self.sample_unchecked(u);
        }
        let scaled = u.ln() / q as f64;
        if self.kind == MeasureKind::Logistic {
            return -(-scaled).exp_m1().ln();
        }
        // F^q(t) = u  <=>  F(t) = u^{1/q}
        let p = scaled.exp();
        let one_minus_p = -scaled.exp_m1();
        self.inverse_cdf(p, one_minus_p)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match &self.kind {
            MeasureKind::Truncated { inner, cutoff } => {
                let c = *cutoff;
                if t >= 0.0 {
                    base_survival(inner, c) + base_cdf(inner, t.min(c))
                } else if t < -c {
                    0.0
                } else {
                    (base_cdf(inner, t) - base_cdf_left(inner, -c)).max(0.0)
                }
            }
            k => base_cdf(k, t),
        }
    }

    /// `1 - F(t)`, computed without cancellation in the right tail.
    pub fn survival(&self, t: f64) -> f64 {
        match &self.kind {
            MeasureKind::Truncated { inner, cutoff } => {
                if t >= 0.0 {
                    let c = *cutoff;
                    if t >= c {
                        0.0
                    } else {
                        (base_survival(inner, t) - base_survival(inner, c)).max(0.0)
                    }
                } else {
                    1.0 - self.cdf(t)
                }
            }
            k => base_survival(k, t),
        }
    }

    /// The unique `t` with `F(t) = p`; only for continuous kinds.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} outside (0, 1)")));
        }
        if !self.is_continuous() {
            return Err(Error::Unsupported(format!(
                "quantile of atomic measure {}",
                self.label()
            )));
        }
        Ok(self.inverse_cdf(p, 1.0 - p))
    }

    /// Generalized inverse `inf { t : F(t) >= p }`; both `p` and `1 - p`
    /// are passed so the caller can keep precision in either tail.
    fn inverse_cdf(&self, p: f64, one_minus_p: f64) -> f64 {
        match &self.kind {
            MeasureKind::Truncated { inner, cutoff } => {
                let c = *cutoff;
                if **inner == MeasureKind::Bernoulli {
                    return if c >= 1.0 {
                        base_inverse(inner, p, one_minus_p)
                    } else {
                        0.0
                    };
                }
                let s = base_survival(inner, c);
                if p <= 0.5 - s {
                    base_inverse(inner, p + s, one_minus_p - s)
                } else if p <= 0.5 + s {
                    0.0
                } else {
                    base_inverse(inner, p - s, one_minus_p + s)
                }
            }
            k => base_inverse(k, p, one_minus_p),
        }
    }

    /// Density for continuous kinds.
    pub fn density(&self, t: f64) -> Option<f64> {
        if self.is_continuous() {
            Some(base_density(&self.kind, t))
        } else {
            None
        }
    }

    /// `L(δ) = E e^{δγ}`; `f64::INFINITY` outside the domain.
    pub fn mgf(&self, delta: f64) -> f64 {
        if delta == 0.0 {
            return 1.0;
        }
        self.ln_mgf(delta).exp()
    }

    /// `ln L(δ)`, evaluated in log space so large arguments do not overflow.
    pub fn ln_mgf(&self, delta: f64) -> f64 {
        if delta == 0.0 {
            return 0.0;
        }
        match &self.kind {
            MeasureKind::Truncated { inner, cutoff } => {
                let c = *cutoff;
                let d = delta.abs();
                match **inner {
                    MeasureKind::Bernoulli => {
                        if c >= 1.0 {
                            base_ln_mgf(inner, d)
                        } else {
                            0.0
                        }
                    }
                    ref k => {
                        let outside = 2.0 * base_survival(k, c) * (-d * c).exp();
                        let inside = integrate(
                            |x| ((d * (x - c)).exp() + (-d * (x + c)).exp()) * base_density(k, x),
                            0.0,
                            c,
                            1e-15,
                        );
                        d * c + (outside + inside).ln()
                    }
                }
            }
            k => base_ln_mgf(k, delta),
        }
    }

    /// `T(a) = ∫_a^∞ (1 - F(t)) dt`.
    pub fn tail_integral(&self, a: f64) -> f64 {
        if a < 0.0 {
            // symmetry: ∫_a^0 (1 - F) = ∫_0^{-a} F
            return -a + self.tail_integral(-a);
        }
        match &self.kind {
            MeasureKind::Truncated { inner, cutoff } => {
                let c = *cutoff;
                if a >= c {
                    0.0
                } else {
                    let v = base_tail(inner, a)
                        - base_tail(inner, c)
                        - (c - a) * base_survival(inner, c);
                    v.max(0.0)
                }
            }
            k => base_tail(k, a),
        }
    }

    /// Short name used on the command line and in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            MeasureKind::Truncated { inner, cutoff } => {
                format!("truncated:{}:{}", base_label(inner), cutoff)
            }
            k => base_label(k).to_string(),
        }
    }
}

/// Tail integral by direct quadrature of `1 - F` over `[a, a + 60]`.
///
/// Independent of the closed forms in [`Measure::tail_integral`]; used to
/// cross-check them.
pub fn tail_integral_quadrature(measure: &Measure, a: f64) -> f64 {
    let hi = a + 60.0;
    let mut breaks = vec![a];
    // split at atoms so the integrand is smooth on each piece
    for x in [0.0, 1.0, measure.support_sup()] {
        if x > a && x < hi && x.is_finite() {
            breaks.push(x);
        }
    }
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
        .windows(2)
        .map(|w| integrate(|t| measure.survival(t), w[0], w[1], 1e-12))
        .sum()
}

fn check_draw(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDraw(u))
    }
}

fn base_label(kind: &MeasureKind) -> &'static str {
    match kind {
        MeasureKind::Logistic => "logistic",
        MeasureKind::Exponential => "exponential",
        MeasureKind::Bernoulli => "bernoulli",
        MeasureKind::Truncated { .. } => "truncated",
    }
}

#[inline]
fn base_sample(kind: &MeasureKind, u: f64) -> f64 {
    match kind {
        MeasureKind::Logistic => u.ln() - (1.0 - u).ln(),
        MeasureKind::Exponential => {
            let d = u - 0.5;
            if d == 0.0 {
                0.0
            } else {
                d.signum() * -(1.0 - 2.0 * d.abs()).ln()
            }
        }
        MeasureKind::Bernoulli => {
            if u >= 0.5 {
                1.0
            } else {
                -1.0
            }
        }
        MeasureKind::Truncated { .. } => unreachable!("truncated inner is flattened"),
    }
}

fn base_inverse(kind: &MeasureKind, p: f64, one_minus_p: f64) -> f64 {
    match kind {
        MeasureKind::Logistic => p.ln() - one_minus_p.ln(),
        MeasureKind::Exponential => {
            if p < 0.5 {
                (2.0 * p).ln()
            } else {
                -(2.0 * one_minus_p).ln()
            }
        }
        MeasureKind::Bernoulli => {
            if p >= 0.5 {
                1.0
            } else {
                -1.0
            }
        }
        MeasureKind::Truncated { .. } => unreachable!("truncated inner is flattened"),
    }
}

fn base_cdf(kind: &MeasureKind, t: f64) -> f64 {
    match kind {
        MeasureKind::Logistic => 1.0 / (1.0 + (-t).exp()),
        MeasureKind::Exponential => {
            if t >= 0.0 {
                1.0 - 0.5 * (-t).exp()
            } else {
                0.5 * t.exp()
            }
        }
        MeasureKind::Bernoulli => {
            if t < -1.0 {
                0.0
            } else if t < 1.0 {
                0.5
            } else {
                1.0
            }
        }
        MeasureKind::Truncated { .. } => unreachable!("truncated inner is flattened"),
    }
}

/// `P(γ < t)`.
fn base_cdf_left(kind: &MeasureKind, t: f64) -> f64 {
    match kind {
        MeasureKind::Bernoulli => {
            if t <= -1.0 {
                0.0
            } else if t <= 1.0 {
                0.5
            } else {
                1.0
            }
        }
        k => base_cdf(k, t),
    }
}

fn base_survival(kind: &MeasureKind, t: f64) -> f64 {
    match kind {
        MeasureKind::Logistic => 1.0 / (1.0 + t.exp()),
        MeasureKind::Exponential => {
            if t >= 0.0 {
                0.5 * (-t).exp()
            } else {
                1.0 - 0.5 * t.exp()
            }
        }
        k => 1.0 - base_cdf(k, t),
    }
}

fn base_density(kind: &MeasureKind, t: f64) -> f64 {
    match kind {
        MeasureKind::Logistic => {
            let e = (-t.abs()).exp();
            e / ((1.0 + e) * (1.0 + e))
        }
        MeasureKind::Exponential => 0.5 * (-t.abs()).exp(),
        _ => 0.0,
    }
}

fn base_ln_mgf(kind: &MeasureKind, delta: f64) -> f64 {
    let d = delta.abs();
    match kind {
        MeasureKind::Logistic => {
            if d >= 1.0 {
                return f64::INFINITY;
            }
            let x = PI * d;
            // sin(πδ) = sin(π(1-δ)); the reflected form keeps precision near 1
            let s = (PI * d.min(1.0 - d)).sin();
            (x / s).ln()
        }
        MeasureKind::Exponential => {
            if d >= 1.0 {
                return f64::INFINITY;
            }
            -(-d * d).ln_1p()
        }
        MeasureKind::Bernoulli => d + (-2.0 * d).exp().ln_1p() - LN_2,
        MeasureKind::Truncated { .. } => unreachable!("truncated inner is flattened"),
    }
}

fn base_tail(kind: &MeasureKind, a: f64) -> f64 {
    match kind {
        MeasureKind::Logistic => (-a).exp().ln_1p(),
        MeasureKind::Exponential => 0.5 * (-a).exp(),
        MeasureKind::Bernoulli => 0.5 * (1.0 - a).max(0.0),
        MeasureKind::Truncated { .. } => unreachable!("truncated inner is flattened"),
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "logistic" => Ok(Measure::logistic()),
            "exponential" | "laplace" => Ok(Measure::exponential()),
            "bernoulli" | "sign" => Ok(Measure::bernoulli()),
            _ => {
                let rest = s
                    .strip_prefix("truncated:")
                    .ok_or_else(|| Error::Input(format!("unknown measure '{s}'")))?;
                let (inner, cutoff) = rest.rsplit_once(':').ok_or_else(|| {
                    Error::Input(format!("expected truncated:<inner>:<cutoff>, got '{s}'"))
                })?;
                let cutoff: f64 = cutoff
                    .parse()
                    .map_err(|_| Error::Input(format!("bad truncation cutoff '{cutoff}'")))?;
                Measure::truncated(inner.parse()?, cutoff)
            }
        }
    }
}
