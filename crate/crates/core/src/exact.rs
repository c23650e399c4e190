//! Exact counters and exact Γ values for small instances.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimator::{estimate_gamma, GammaEstimate};
use crate::families::{FamilyKind, FamilyOracle, Graph, DEFAULT_ENUMERATION_BUDGET};
use crate::measures::Measure;
use crate::rng::RandomStream;

/// Size caps for the exact counters, overridable through environment
/// variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub enumeration_budget: u64,
    pub ryser_cap: usize,
    pub hafnian_cap: usize,
    pub bernoulli_cap: usize,
    pub matrix_tree_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            ryser_cap: 24,
            hafnian_cap: 20,
            bernoulli_cap: 14,
            matrix_tree_cap: 500,
        }
    }
}

impl Limits {
    /// Defaults overridden by `RANDCOUNT_ENUM_BUDGET`, `RANDCOUNT_RYSER_CAP`,
    /// `RANDCOUNT_HAFNIAN_CAP`, `RANDCOUNT_BERNOULLI_CAP` and
    /// `RANDCOUNT_MATRIX_TREE_CAP`.
    pub fn from_env() -> Result<Self> {
        fn var<T: std::str::FromStr>(name: &str, default: T) -> Result<T> {
            match std::env::var(name) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("{name}={v:?} is not a valid number"))),
                Err(_) => Ok(default),
            }
        }
        let d = Self::default();
        Ok(Self {
            enumeration_budget: var("RANDCOUNT_ENUM_BUDGET", d.enumeration_budget)?,
            ryser_cap: var("RANDCOUNT_RYSER_CAP", d.ryser_cap)?,
            hafnian_cap: var("RANDCOUNT_HAFNIAN_CAP", d.hafnian_cap)?,
            bernoulli_cap: var("RANDCOUNT_BERNOULLI_CAP", d.bernoulli_cap)?,
            matrix_tree_cap: var("RANDCOUNT_MATRIX_TREE_CAP", d.matrix_tree_cap)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    MatrixTree,
    RyserPermanent,
    HafnianExpansion,
    Enumeration,
    BernoulliEnumeration,
    Binomial,
    /// Product of the counts of the factors of a product family.
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactCount {
    #[serde(serialize_with = "as_decimal")]
    pub value: BigUint,
    pub method: CountMethod,
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl ExactCount {
    pub fn ln_value(&self) -> f64 {
        ln_big(&self.value)
    }
}

/// Natural logarithm of a big integer (−∞ for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let r = a.len();
    if r == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..r - 1 {
        if a[k][k].is_zero() {
            match (k + 1..r).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..r {
            for j in k + 1..r {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[r - 1][r - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Weighted spanning-tree count: the sum over spanning trees of the product
/// of edge weights, as a cofactor of the weighted Laplacian.
pub fn matrix_tree_weighted(graph: &Graph, weights: &[u64], cap: usize) -> Result<BigUint> {
    let v = graph.num_vertices();
    if v > cap {
        return Err(Error::Refused(format!(
            "matrix-tree counter handles at most {cap} vertices, got {v}"
        )));
    }
    if v == 0 {
        return Ok(BigUint::zero());
    }
    let mut lap = vec![vec![BigInt::zero(); v]; v];
    for (&(a, b), &w) in graph.edges().iter().zip(weights) {
        if a == b {
            continue;
        }
        let w = BigInt::from(w);
        lap[a][a] += &w;
        lap[b][b] += &w;
        lap[a][b] -= &w;
        lap[b][a] -= &w;
    }
    let minor: Vec<Vec<BigInt>> = lap
        .into_iter()
        .take(v - 1)
        .map(|mut row| {
            row.truncate(v - 1);
            row
        })
        .collect();
    let det = bareiss_determinant(minor);
    Ok(det.to_biguint().unwrap_or_default())
}

/// Number of spanning trees; 0 for a disconnected graph.
pub fn matrix_tree_count(graph: &Graph) -> Result<BigUint> {
    matrix_tree_weighted(
        graph,
        &vec![1; graph.num_edges()],
        Limits::default().matrix_tree_cap,
    )
}

fn check_square(matrix: &[Vec<u64>]) -> Result<usize> {
    let k = matrix.len();
    if matrix.iter().any(|r| r.len() != k) {
        return Err(Error::Input("matrix must be square".into()));
    }
    Ok(k)
}

/// Running sum that stays in `i128` until it overflows.
#[derive(Default)]
struct Accumulator {
    small: i128,
    big: BigInt,
}

impl Accumulator {
    fn add(&mut self, term: i128) {
        match self.small.checked_add(term) {
            Some(s) => self.small = s,
            None => {
                self.big += BigInt::from(self.small);
                self.small = term;
            }
        }
    }

    fn add_big(&mut self, term: BigInt) {
        self.big += term;
    }

    fn total(self) -> BigInt {
        self.big + BigInt::from(self.small)
    }
}

/// Permanent by Ryser's inclusion–exclusion formula with Gray-code column
/// updates, `O(2^k k)`.
pub fn permanent_ryser(matrix: &[Vec<u64>], cap: usize) -> Result<BigUint> {
    let k = check_square(matrix)?;
    if k > cap {
        return Err(Error::Refused(format!(
            "Ryser counter handles at most {cap} columns, got {k}"
        )));
    }
    if k == 0 {
        return Ok(BigUint::one());
    }
    let mut row_sums = vec![0i128; k];
    let mut acc = Accumulator::default();
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << k) {
        let col = step.trailing_zeros() as usize;
        gray ^= 1 << col;
        let adding = gray & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            let a = matrix[i][col] as i128;
            *s += if adding { a } else { -a };
        }
        // (-1)^{k - |S|}
        let negative = (k - gray.count_ones() as usize) % 2 == 1;
        let product = row_sums.iter().try_fold(1i128, |p, &s| p.checked_mul(s));
        match product {
            Some(p) => acc.add(if negative { -p } else { p }),
            None => {
                let p: BigInt = row_sums.iter().map(|&s| BigInt::from(s)).product();
                acc.add_big(if negative { -p } else { p });
            }
        }
    }
    let total = acc.total();
    debug_assert!(!total.is_negative());
    Ok(total.to_biguint().unwrap_or_default())
}

/// Hafnian of a symmetric nonnegative matrix: the sum over perfect
/// matchings of `{0..2k}` of the product of matched entries.
pub fn hafnian_exact(matrix: &[Vec<u64>], cap: usize) -> Result<BigUint> {
    let v = check_square(matrix)?;
    if v % 2 == 1 {
        return Err(Error::Domain(format!(
            "hafnian needs an even dimension, got {v}"
        )));
    }
    if v > cap {
        return Err(Error::Refused(format!(
            "hafnian counter handles dimension at most {cap}, got {v}"
        )));
    }
    for i in 0..v {
        for j in i + 1..v {
            if matrix[i][j] != matrix[j][i] {
                return Err(Error::Input(format!("matrix not symmetric at ({i}, {j})")));
            }
        }
    }
    fn pair(matrix: &[Vec<u64>], mask: u32, memo: &mut HashMap<u32, BigUint>) -> BigUint {
        if mask == 0 {
            return BigUint::one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut total = BigUint::zero();
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            if matrix[i][j] != 0 {
                total += pair(matrix, rest & !(1 << j), memo) * matrix[i][j];
            }
        }
        memo.insert(mask, total.clone());
        total
    }
    let full = if v == 32 { u32::MAX } else { (1u32 << v) - 1 };
    Ok(pair(matrix, full, &mut HashMap::new()))
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Elementary symmetric polynomial `e_k(q)`.
fn elementary_symmetric(q: &[u32], k: usize) -> BigUint {
    let mut e = vec![BigUint::zero(); k + 1];
    e[0] = BigUint::one();
    for &x in q {
        for j in (1..=k).rev() {
            let add = &e[j - 1] * x;
            e[j] += add;
        }
    }
    e.swap_remove(k)
}

fn enumeration_sum(
    oracle: &FamilyOracle,
    q: Option<&[u32]>,
    limits: &Limits,
) -> Result<ExactCount> {
    let mut total = BigUint::zero();
    oracle.for_each_member(limits.enumeration_budget, &mut |x| match q {
        Some(q) => total += x.iter().map(|&i| BigUint::from(q[i])).product::<BigUint>(),
        None => total += 1u32,
    })?;
    Ok(ExactCount {
        value: total,
        method: CountMethod::Enumeration,
    })
}

/// `|X|` exactly, by a closed-form counter where one exists and by
/// enumeration otherwise.
pub fn cardinality_exact(oracle: &FamilyOracle, limits: &Limits) -> Result<ExactCount> {
    count(oracle, None, limits)
}

/// `p_X(q) = Σ_{x∈X} Π_{i∈x} q_i` for the family's multiplicities (the plain
/// cardinality when it has none).
pub fn polynomial_exact(oracle: &FamilyOracle, limits: &Limits) -> Result<ExactCount> {
    count(oracle, oracle.multiplicities(), limits)
}

fn count(oracle: &FamilyOracle, q: Option<&[u32]>, limits: &Limits) -> Result<ExactCount> {
    let weight = |e: usize| q.map_or(1u64, |q| q[e] as u64);
    match oracle.kind() {
        FamilyKind::Explicit(family) if q.is_none() => Ok(ExactCount {
            value: BigUint::from(family.len()),
            method: CountMethod::Enumeration,
        }),
        FamilyKind::UniformMatroid { k } => Ok(ExactCount {
            value: match q {
                Some(q) => elementary_symmetric(q, *k),
                None => binomial(oracle.n(), *k),
            },
            method: CountMethod::Binomial,
        }),
        FamilyKind::SpanningTrees(g) if g.num_vertices() <= limits.matrix_tree_cap => {
            let weights: Vec<u64> = (0..g.num_edges()).map(weight).collect();
            Ok(ExactCount {
                value: matrix_tree_weighted(g, &weights, limits.matrix_tree_cap)?,
                method: CountMethod::MatrixTree,
            })
        }
        FamilyKind::BipartiteMatchings { k, edges } if *k <= limits.ryser_cap => {
            let mut a = vec![vec![0u64; *k]; *k];
            for (e, &(r, c)) in edges.iter().enumerate() {
                a[r][c] += weight(e);
            }
            Ok(ExactCount {
                value: permanent_ryser(&a, limits.ryser_cap)?,
                method: CountMethod::RyserPermanent,
            })
        }
        FamilyKind::PerfectMatchings(g) if g.num_vertices() <= limits.hafnian_cap => {
            let v = g.num_vertices();
            let mut a = vec![vec![0u64; v]; v];
            for (e, &(x, y)) in g.edges().iter().enumerate() {
                if x != y {
                    a[x][y] += weight(e);
                    a[y][x] += weight(e);
                }
            }
            Ok(ExactCount {
                value: hafnian_exact(&a, limits.hafnian_cap)?,
                method: CountMethod::HafnianExpansion,
            })
        }
        FamilyKind::Product(children) => {
            let mut value = BigUint::one();
            let mut offset = 0;
            for child in children {
                let slice = q.map(|q| &q[offset..offset + child.n()]);
                value *= count(child, slice, limits)?.value;
                offset += child.n();
            }
            Ok(ExactCount {
                value,
                method: CountMethod::Product,
            })
        }
        _ => enumeration_sum(oracle, q, limits),
    }
}

/// Γ under the fair ±1 sign measure, by averaging the oracle over all `2^n`
/// sign vectors. With multiplicities, coordinate `i` is `+1` with
/// probability `1 - 2^{-q_i}`.
pub fn gamma_exact_bernoulli(oracle: &FamilyOracle, cap: usize) -> Result<f64> {
    let n = oracle.n();
    if n > cap {
        return Err(Error::Refused(format!(
            "sign enumeration handles n ≤ {cap}, got {n}"
        )));
    }
    let mut c = vec![0.0; n];
    match oracle.multiplicities() {
        None => {
            // values are integers, so the sum is exact
            let mut total: i64 = 0;
            for bits in 0u64..(1 << n) {
                for (j, slot) in c.iter_mut().enumerate() {
                    *slot = if bits >> j & 1 == 1 { 1.0 } else { -1.0 };
                }
                total += oracle.weight_unchecked(&c)? as i64;
            }
            Ok(total as f64 / (1u64 << n) as f64)
        }
        Some(q) => {
            let plus: Vec<f64> = q.iter().map(|&x| 1.0 - (0.5f64).powi(x as i32)).collect();
            let mut total = 0.0;
            for bits in 0u64..(1 << n) {
                let mut p = 1.0;
                for (j, slot) in c.iter_mut().enumerate() {
                    let up = bits >> j & 1 == 1;
                    *slot = if up { 1.0 } else { -1.0 };
                    p *= if up { plus[j] } else { 1.0 - plus[j] };
                }
                total += p * oracle.weight_unchecked(&c)?;
            }
            Ok(total)
        }
    }
}

/// Default sample count for [`gamma_reference`].
pub const REFERENCE_SAMPLES: usize = 10_000_000;

/// High-precision Monte Carlo value of Γ used as a reference. Refuses when
/// `samples · n` exceeds `max_draws`.
pub fn gamma_reference(
    oracle: &FamilyOracle,
    measure: &Measure,
    stream: &RandomStream,
    samples: usize,
    max_draws: u64,
) -> Result<GammaEstimate> {
    let draws = samples as u64 * oracle.n().max(1) as u64;
    if draws > max_draws {
        return Err(Error::Refused(format!(
            "reference needs {draws} weight draws, budget is {max_draws}"
        )));
    }
    estimate_gamma(oracle, measure, samples, stream)
}
