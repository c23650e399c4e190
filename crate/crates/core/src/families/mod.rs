//! Families of subsets presented through their max-weight oracle.
//!
//! Every family answers `w(X, c) = max_{x ∈ X} Σ_{i ∈ x} c_i` exactly; the
//! small ones can also be listed member by member so the oracle can be
//! checked against brute force.

mod assignment;
mod gf;
mod graph;
pub mod io;

use itertools::Itertools;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};

pub use assignment::max_weight_assignment;
pub use gf::{Basis, GfMatrix, DEFAULT_PRIME};
pub use graph::Graph;

/// Largest vertex count accepted for general perfect matchings (subset DP).
pub const MAX_MATCHING_VERTICES: usize = 22;

/// Default number of members an enumeration may produce.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Cardinality profile of the members of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "k", rename_all = "kebab-case")]
pub enum Rank {
    /// Every member has exactly `k` elements.
    Uniform(usize),
    /// Every member has at most `k` elements.
    AtMost(usize),
    Mixed,
}

impl Rank {
    /// The `k` usable by the lower bound, if any.
    pub fn bound(&self) -> Option<usize> {
        match *self {
            Rank::Uniform(k) | Rank::AtMost(k) => Some(k),
            Rank::Mixed => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// Listed subsets, sorted and deduplicated.
    Explicit(Vec<Vec<usize>>),
    /// All `k`-subsets of the ground set.
    UniformMatroid { k: usize },
    /// Spanning trees of a connected graph; elements are edges.
    SpanningTrees(Graph),
    /// All acyclic edge subsets, including the empty one.
    Forests(Graph),
    /// Column bases of a matrix over GF(p).
    LinearMatroid { matrix: GfMatrix, rank: usize },
    /// Perfect matchings of a `k × k` bipartite graph; elements are the
    /// present `(row, col)` pairs in row-major order.
    BipartiteMatchings {
        k: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Perfect matchings of a general graph on at most 22 vertices.
    PerfectMatchings(Graph),
    /// Minkowski sum of families on consecutive disjoint coordinate blocks.
    Product(Vec<FamilyOracle>),
}

/// A family of subsets of `{0, …, n-1}` with its optimization oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOracle {
    kind: FamilyKind,
    n: usize,
    rank: Rank,
    multiplicities: Option<Vec<u32>>,
}

impl FamilyOracle {
    pub fn explicit(n: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let mut family: Vec<Vec<usize>> = subsets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        if let Some(bad) = family.iter().flatten().find(|&&i| i >= n) {
            return Err(Error::Input(format!(
                "element {bad} outside ground set of size {n}"
            )));
        }
        family.sort();
        family.dedup();
        if family.is_empty() {
            return Err(Error::Infeasible("explicit family has no members".into()));
        }
        let sizes: Vec<usize> = family.iter().map(Vec::len).collect();
        let max = sizes.iter().copied().max().unwrap_or(0);
        let rank = if sizes.iter().all(|&s| s == max) {
            Rank::Uniform(max)
        } else {
            Rank::AtMost(max)
        };
        Ok(Self {
            kind: FamilyKind::Explicit(family),
            n,
            rank,
            multiplicities: None,
        })
    }

    pub fn uniform_matroid(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Infeasible(format!(
                "no {k}-subsets of a {n}-element set"
            )));
        }
        Ok(Self {
            kind: FamilyKind::UniformMatroid { k },
            n,
            rank: Rank::Uniform(k),
            multiplicities: None,
        })
    }

    pub fn spanning_trees(graph: Graph) -> Result<Self> {
        if graph.num_vertices() == 0 || !graph.is_connected() {
            return Err(Error::Infeasible(
                "graph is not connected: no spanning tree".into(),
            ));
        }
        let n = graph.num_edges();
        let rank = Rank::Uniform(graph.num_vertices() - 1);
        Ok(Self {
            kind: FamilyKind::SpanningTrees(graph),
            n,
            rank,
            multiplicities: None,
        })
    }

    pub fn forests(graph: Graph) -> Self {
        let n = graph.num_edges();
        Self {
            kind: FamilyKind::Forests(graph),
            n,
            rank: Rank::Mixed,
            multiplicities: None,
        }
    }

    pub fn linear_matroid(matrix: GfMatrix) -> Self {
        let rank = matrix.rank();
        let n = matrix.cols();
        Self {
            kind: FamilyKind::LinearMatroid { matrix, rank },
            n,
            rank: Rank::Uniform(rank),
            multiplicities: None,
        }
    }

    /// Perfect matchings of the bipartite graph whose `k × k` support is
    /// given; `support[i][j]` marks the edge between row `i` and column `j`.
    pub fn bipartite_matchings(support: &[Vec<bool>]) -> Result<Self> {
        let k = support.len();
        if support.iter().any(|row| row.len() != k) {
            return Err(Error::Input("bipartite support must be square".into()));
        }
        let edges: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| support[i][j]).map(move |j| (i, j)))
            .collect();
        if !has_bipartite_perfect_matching(k, &edges) {
            return Err(Error::Infeasible(
                "bipartite graph has no perfect matching".into(),
            ));
        }
        let n = edges.len();
        Ok(Self {
            kind: FamilyKind::BipartiteMatchings { k, edges },
            n,
            rank: Rank::Uniform(k),
            multiplicities: None,
        })
    }

    /// Bipartite matchings on the positive entries of a nonnegative integer
    /// matrix, with the entries as multiplicities. Counting the resulting
    /// family with multiplicities gives the permanent.
    pub fn bipartite_from_matrix(matrix: &[Vec<i64>]) -> Result<Self> {
        if matrix.iter().flatten().any(|&x| x < 0) {
            return Err(Error::Input("matrix entries must be nonnegative".into()));
        }
        let support: Vec<Vec<bool>> = matrix
            .iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect();
        let oracle = Self::bipartite_matchings(&support)?;
        let q = matrix
            .iter()
            .flatten()
            .filter(|&&x| x > 0)
            .map(|&x| x as u32)
            .collect();
        oracle.with_multiplicities(q)
    }

    pub fn perfect_matchings(graph: Graph) -> Result<Self> {
        let v = graph.num_vertices();
        if v % 2 == 1 {
            return Err(Error::Infeasible(format!(
                "{v} vertices: no perfect matching"
            )));
        }
        if v > MAX_MATCHING_VERTICES {
            return Err(Error::Refused(format!(
                "general matching oracle handles at most {MAX_MATCHING_VERTICES} vertices, got {v}"
            )));
        }
        let n = graph.num_edges();
        let oracle = Self {
            kind: FamilyKind::PerfectMatchings(graph),
            n,
            rank: Rank::Uniform(v / 2),
            multiplicities: None,
        };
        if matching_dp(oracle.graph().unwrap(), &vec![0.0; n]).is_none() {
            return Err(Error::Infeasible("graph has no perfect matching".into()));
        }
        Ok(oracle)
    }

    /// Perfect matchings on the positive off-diagonal entries of a symmetric
    /// nonnegative integer matrix, with the entries as multiplicities
    /// (the hafnian setting).
    pub fn matchings_from_symmetric(matrix: &[Vec<i64>]) -> Result<Self> {
        let v = matrix.len();
        if matrix.iter().any(|r| r.len() != v) {
            return Err(Error::Input("matrix must be square".into()));
        }
        let mut edges = Vec::new();
        let mut q = Vec::new();
        for i in 0..v {
            for j in i + 1..v {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::Input(format!("matrix not symmetric at ({i}, {j})")));
                }
                if matrix[i][j] < 0 {
                    return Err(Error::Input("matrix entries must be nonnegative".into()));
                }
                if matrix[i][j] > 0 {
                    edges.push((i, j));
                    q.push(matrix[i][j] as u32);
                }
            }
        }
        Self::perfect_matchings(Graph::new(v, edges)?)?.with_multiplicities(q)
    }

    /// Minkowski sum: child `i` acts on its own block of coordinates, blocks
    /// laid out in order.
    pub fn product(children: Vec<FamilyOracle>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::Input("product of no families".into()));
        }
        let n = children.iter().map(|c| c.n).sum();
        let mut total = 0;
        let mut uniform = true;
        let mut bounded = true;
        for c in &children {
            match c.rank {
                Rank::Uniform(k) => total += k,
                Rank::AtMost(k) => {
                    total += k;
                    uniform = false;
                }
                Rank::Mixed => bounded = false,
            }
        }
        let rank = match (bounded, uniform) {
            (false, _) => Rank::Mixed,
            (true, true) => Rank::Uniform(total),
            (true, false) => Rank::AtMost(total),
        };
        Ok(Self {
            kind: FamilyKind::Product(children),
            n,
            rank,
            multiplicities: None,
        })
    }

    /// The `m`-dimensional face of the Boolean cube: all subsets of an
    /// `m`-element set.
    pub fn cube_face(m: usize) -> Result<Self> {
        let point_pair = Self::explicit(1, vec![vec![], vec![0]])?;
        Self::product(vec![point_pair; m])
    }

    pub fn with_multiplicities(mut self, q: Vec<u32>) -> Result<Self> {
        if q.len() != self.n {
            return Err(Error::Input(format!(
                "{} multiplicities for a ground set of {}",
                q.len(),
                self.n
            )));
        }
        if q.iter().any(|&x| x == 0) {
            return Err(Error::Input("multiplicities must be positive".into()));
        }
        self.multiplicities = Some(q);
        Ok(self)
    }

    pub fn without_multiplicities(mut self) -> Self {
        self.multiplicities = None;
        self
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Ground-set size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn multiplicities(&self) -> Option<&[u32]> {
        self.multiplicities.as_deref()
    }

    fn graph(&self) -> Option<&Graph> {
        match &self.kind {
            FamilyKind::SpanningTrees(g)
            | FamilyKind::Forests(g)
            | FamilyKind::PerfectMatchings(g) => Some(g),
            _ => None,
        }
    }

    /// Short human-readable description used in reports.
    pub fn descriptor(&self) -> String {
        let base = match &self.kind {
            FamilyKind::Explicit(f) => format!("explicit(n={}, members={})", self.n, f.len()),
            FamilyKind::UniformMatroid { k } => format!("uniform-matroid(n={}, k={k})", self.n),
            FamilyKind::SpanningTrees(g) => format!(
                "spanning-trees(V={}, E={})",
                g.num_vertices(),
                g.num_edges()
            ),
            FamilyKind::Forests(g) => {
                format!("forests(V={}, E={})", g.num_vertices(), g.num_edges())
            }
            FamilyKind::LinearMatroid { matrix, rank } => format!(
                "linear-matroid({}x{} over GF({}), rank={rank})",
                matrix.rows(),
                matrix.cols(),
                matrix.prime()
            ),
            FamilyKind::BipartiteMatchings { k, edges } => {
                format!("bipartite-matchings(k={k}, E={})", edges.len())
            }
            FamilyKind::PerfectMatchings(g) => format!(
                "perfect-matchings(V={}, E={})",
                g.num_vertices(),
                g.num_edges()
            ),
            FamilyKind::Product(c) => {
                format!("product({})", c.iter().map(|f| f.descriptor()).join(" x "))
            }
        };
        match &self.multiplicities {
            Some(q) => format!(
                "{base} with multiplicities (N={})",
                q.iter().map(|&x| x as u64).sum::<u64>()
            ),
            None => base,
        }
    }

    /// `w(X, c)`: the largest total weight of a member.
    pub fn max_weight(&self, c: &[f64]) -> Result<f64> {
        if c.len() != self.n {
            return Err(Error::Input(format!(
                "weight vector has length {}, expected {}",
                c.len(),
                self.n
            )));
        }
        if let Some(bad) = c.iter().find(|x| !x.is_finite()) {
            return Err(Error::Input(format!("non-finite weight {bad}")));
        }
        self.weight_unchecked(c)
    }

    pub(crate) fn weight_unchecked(&self, c: &[f64]) -> Result<f64> {
        match &self.kind {
            FamilyKind::Explicit(family) => Ok(family
                .iter()
                .map(|x| x.iter().map(|&i| c[i]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)),
            FamilyKind::UniformMatroid { k } => {
                let mut sorted = c.to_vec();
                sorted.sort_unstable_by(|a, b| b.total_cmp(a));
                Ok(sorted[..*k].iter().sum())
            }
            FamilyKind::SpanningTrees(g) => {
                let (value, used) = kruskal(g, c, false);
                if used + 1 != g.num_vertices() {
                    return Err(Error::Infeasible("graph is not connected".into()));
                }
                Ok(value)
            }
            FamilyKind::Forests(g) => Ok(kruskal(g, c, true).0),
            FamilyKind::LinearMatroid { matrix, rank } => {
                let mut basis = Basis::new(matrix.rows(), matrix.prime());
                let mut value = 0.0;
                for j in greedy_order(c) {
                    if basis.len() == *rank {
                        break;
                    }
                    if basis.insert(matrix.column(j)) {
                        value += c[j];
                    }
                }
                Ok(value)
            }
            FamilyKind::BipartiteMatchings { k, edges } => bipartite_weight(*k, edges, c),
            FamilyKind::PerfectMatchings(g) => matching_dp(g, c)
                .ok_or_else(|| Error::Infeasible("graph has no perfect matching".into())),
            FamilyKind::Product(children) => {
                let mut offset = 0;
                let mut total = 0.0;
                for child in children {
                    total += child.weight_unchecked(&c[offset..offset + child.n])?;
                    offset += child.n;
                }
                Ok(total)
            }
        }
    }

    /// Calls `visit` once per member (elements sorted ascending). Fails
    /// with [`Error::EnumerationRefused`] once more than `budget` members
    /// have been produced.
    pub fn for_each_member(&self, budget: u64, visit: &mut dyn FnMut(&[usize])) -> Result<u64> {
        let mut walker = Walker {
            budget,
            count: 0,
            visit,
            buf: Vec::new(),
        };
        self.walk(&mut walker)?;
        Ok(walker.count)
    }

    /// All members, each exactly once.
    pub fn enumerate(&self, budget: u64) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.for_each_member(budget, &mut |x| out.push(x.to_vec()))?;
        Ok(out)
    }

    fn walk(&self, w: &mut Walker<'_>) -> Result<()> {
        match &self.kind {
            FamilyKind::Explicit(family) => family.iter().try_for_each(|x| w.emit(x)),
            FamilyKind::UniformMatroid { k } => {
                (0..self.n).combinations(*k).try_for_each(|x| w.emit(&x))
            }
            FamilyKind::SpanningTrees(g) => {
                let uf = UnionFind::new(g.num_vertices());
                let mut chosen = Vec::new();
                walk_trees(g, 0, uf, &mut chosen, w)
            }
            FamilyKind::Forests(g) => {
                let uf = UnionFind::new(g.num_vertices());
                let mut chosen = Vec::new();
                walk_forests(g, 0, uf, &mut chosen, w)
            }
            FamilyKind::LinearMatroid { matrix, rank } => (0..self.n)
                .combinations(*rank)
                .filter(|x| matrix.independent(x))
                .try_for_each(|x| w.emit(&x)),
            FamilyKind::BipartiteMatchings { k, edges } => {
                let mut by_row = vec![Vec::new(); *k];
                for (e, &(r, col)) in edges.iter().enumerate() {
                    by_row[r].push((col, e));
                }
                let mut used = vec![false; *k];
                let mut chosen = Vec::new();
                walk_bipartite(&by_row, 0, &mut used, &mut chosen, w)
            }
            FamilyKind::PerfectMatchings(g) => {
                let adj = forward_adjacency(g);
                let mut chosen = Vec::new();
                walk_matchings(&adj, g.num_vertices(), 0, &mut chosen, w)
            }
            FamilyKind::Product(children) => {
                let mut lists = Vec::with_capacity(children.len());
                let mut offset = 0;
                for child in children {
                    let members: Vec<Vec<usize>> = child
                        .enumerate(w.budget)?
                        .into_iter()
                        .map(|x| x.into_iter().map(|i| i + offset).collect())
                        .collect();
                    lists.push(members);
                    offset += child.n;
                }
                lists
                    .iter()
                    .map(|l| l.iter())
                    .multi_cartesian_product()
                    .try_for_each(|parts| {
                        w.emit(&parts.into_iter().flatten().copied().collect::<Vec<_>>())
                    })
            }
        }
    }
}

struct Walker<'a> {
    budget: u64,
    count: u64,
    visit: &'a mut dyn FnMut(&[usize]),
    buf: Vec<usize>,
}

impl Walker<'_> {
    fn emit(&mut self, member: &[usize]) -> Result<()> {
        self.count += 1;
        if self.count > self.budget {
            return Err(Error::EnumerationRefused {
                budget: self.budget,
            });
        }
        self.buf.clear();
        self.buf.extend_from_slice(member);
        self.buf.sort_unstable();
        (self.visit)(&self.buf);
        Ok(())
    }
}

/// Indices sorted by weight descending, ties by index ascending.
fn greedy_order(c: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[b].total_cmp(&c[a]).then(a.cmp(&b)));
    order
}

/// Greedy maximum spanning forest; returns (weight, edges used).
fn kruskal(g: &Graph, c: &[f64], skip_negative: bool) -> (f64, usize) {
    let mut uf = UnionFind::<usize>::new(g.num_vertices());
    let target = g.num_vertices().saturating_sub(1);
    let mut value = 0.0;
    let mut used = 0;
    for e in greedy_order(c) {
        if used == target || (skip_negative && c[e] < 0.0) {
            break;
        }
        let (u, v) = g.edges()[e];
        if uf.union(u, v) {
            value += c[e];
            used += 1;
        }
    }
    (value, used)
}

fn has_bipartite_perfect_matching(k: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); k];
    for &(r, c) in edges {
        adj[r].push(c);
    }
    fn augment(
        r: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        col_match: &mut [Option<usize>],
    ) -> bool {
        for &c in &adj[r] {
            if !seen[c] {
                seen[c] = true;
                if col_match[c].map_or(true, |r2| augment(r2, adj, seen, col_match)) {
                    col_match[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    let mut col_match = vec![None; k];
    (0..k).all(|r| {
        let mut seen = vec![false; k];
        augment(r, &adj, &mut seen, &mut col_match)
    })
}

fn bipartite_weight(k: usize, edges: &[(usize, usize)], c: &[f64]) -> Result<f64> {
    // any assignment through a missing edge loses to every perfect matching
    let penalty = 2.0 * c.iter().map(|x| x.abs()).sum::<f64>() + 1.0;
    let mut dense = vec![-penalty; k * k];
    let mut present = vec![false; k * k];
    for (e, &(r, col)) in edges.iter().enumerate() {
        let slot = r * k + col;
        if !present[slot] || c[e] > dense[slot] {
            dense[slot] = c[e];
            present[slot] = true;
        }
    }
    let assignment = max_weight_assignment(k, &dense);
    let mut value = 0.0;
    for (r, &col) in assignment.iter().enumerate() {
        if !present[r * k + col] {
            return Err(Error::Infeasible(
                "bipartite graph has no perfect matching".into(),
            ));
        }
        value += dense[r * k + col];
    }
    Ok(value)
}

/// For each vertex, the (higher neighbour, edge index) pairs.
fn forward_adjacency(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); g.num_vertices()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if u != v {
            adj[u.min(v)].push((u.max(v), e));
        }
    }
    adj
}

/// Maximum-weight perfect matching by DP over matched-vertex subsets,
/// always pairing the lowest unmatched vertex. `None` if none exists.
fn matching_dp(g: &Graph, c: &[f64]) -> Option<f64> {
    let v = g.num_vertices();
    if v == 0 {
        return Some(0.0);
    }
    let adj = forward_adjacency(g);
    let full = (1usize << v) - 1;
    let mut dp = vec![f64::NEG_INFINITY; full + 1];
    dp[0] = 0.0;
    for mask in 0..full {
        let base = dp[mask];
        if base == f64::NEG_INFINITY {
            continue;
        }
        let i = (!mask).trailing_zeros() as usize;
        for &(j, e) in &adj[i] {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << i) | (1 << j);
                let cand = base + c[e];
                if cand > dp[next] {
                    dp[next] = cand;
                }
            }
        }
    }
    (dp[full] > f64::NEG_INFINITY).then_some(dp[full])
}

fn spans_with(g: &Graph, uf: &UnionFind<usize>, rest: &[(usize, usize)]) -> bool {
    let mut uf = uf.clone();
    for &(u, v) in rest {
        uf.union(u, v);
    }
    let root = uf.find(0);
    (1..g.num_vertices()).all(|x| uf.find(x) == root)
}

fn walk_trees(
    g: &Graph,
    i: usize,
    uf: UnionFind<usize>,
    chosen: &mut Vec<usize>,
    w: &mut Walker<'_>,
) -> Result<()> {
    if chosen.len() + 1 == g.num_vertices() {
        return w.emit(chosen);
    }
    if i == g.num_edges() {
        return Ok(());
    }
    let (u, v) = g.edges()[i];
    // contract: keep edge i
    if uf.find(u) != uf.find(v) {
        let mut joined = uf.clone();
        joined.union(u, v);
        chosen.push(i);
        walk_trees(g, i + 1, joined, chosen, w)?;
        chosen.pop();
    }
    // delete: drop edge i if the rest still spans
    if spans_with(g, &uf, &g.edges()[i + 1..]) {
        walk_trees(g, i + 1, uf, chosen, w)?;
    }
    Ok(())
}

fn walk_forests(
    g: &Graph,
    i: usize,
    uf: UnionFind<usize>,
    chosen: &mut Vec<usize>,
    w: &mut Walker<'_>,
) -> Result<()> {
    if i == g.num_edges() {
        return w.emit(chosen);
    }
    let (u, v) = g.edges()[i];
    if uf.find(u) != uf.find(v) {
        let mut joined = uf.clone();
        joined.union(u, v);
        chosen.push(i);
        walk_forests(g, i + 1, joined, chosen, w)?;
        chosen.pop();
    }
    walk_forests(g, i + 1, uf, chosen, w)
}

fn walk_bipartite(
    by_row: &[Vec<(usize, usize)>],
    row: usize,
    used: &mut [bool],
    chosen: &mut Vec<usize>,
    w: &mut Walker<'_>,
) -> Result<()> {
    if row == by_row.len() {
        return w.emit(chosen);
    }
    for &(col, e) in &by_row[row] {
        if !used[col] {
            used[col] = true;
            chosen.push(e);
            walk_bipartite(by_row, row + 1, used, chosen, w)?;
            chosen.pop();
            used[col] = false;
        }
    }
    Ok(())
}

fn walk_matchings(
    adj: &[Vec<(usize, usize)>],
    v: usize,
    mask: u64,
    chosen: &mut Vec<usize>,
    w: &mut Walker<'_>,
) -> Result<()> {
    if mask.count_ones() as usize == v {
        return w.emit(chosen);
    }
    let i = (!mask).trailing_zeros() as usize;
    for &(j, e) in &adj[i] {
        if mask & (1 << j) == 0 {
            chosen.push(e);
            walk_matchings(adj, v, mask | (1 << i) | (1 << j), chosen, w)?;
            chosen.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn brute_max(oracle: &FamilyOracle, c: &[f64]) -> f64 {
        oracle
            .enumerate(DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .iter()
            .map(|x| x.iter().map(|&i| c[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn corpus() -> Vec<FamilyOracle> {
        let k4 = Graph::complete(4);
        let mat = GfMatrix::from_rows(
            &[
                vec![1, 0, 0, 1, 1, 0],
                vec![0, 1, 0, 1, 0, 1],
                vec![0, 0, 1, 0, 1, 1],
            ],
            DEFAULT_PRIME,
        )
        .unwrap();
        vec![
            FamilyOracle::explicit(5, vec![vec![0, 1], vec![2], vec![1, 3, 4], vec![]]).unwrap(),
            FamilyOracle::uniform_matroid(6, 3).unwrap(),
            FamilyOracle::spanning_trees(k4.clone()).unwrap(),
            FamilyOracle::spanning_trees(Graph::petersen()).unwrap(),
            FamilyOracle::forests(k4.clone()),
            FamilyOracle::linear_matroid(mat),
            FamilyOracle::bipartite_matchings(&[
                vec![true, true, false],
                vec![true, true, true],
                vec![false, true, true],
            ])
            .unwrap(),
            FamilyOracle::perfect_matchings(Graph::complete(6)).unwrap(),
            FamilyOracle::cube_face(3).unwrap(),
            FamilyOracle::product(vec![
                FamilyOracle::uniform_matroid(3, 1).unwrap(),
                FamilyOracle::spanning_trees(Graph::cycle(4)).unwrap(),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn max_weight_examples() {
        let u = FamilyOracle::uniform_matroid(3, 2).unwrap();
        assert_eq!(u.max_weight(&[3.0, 1.0, 2.0]).unwrap(), 5.0);
        let b = FamilyOracle::bipartite_matchings(&[vec![true, true], vec![true, true]]).unwrap();
        assert_eq!(b.max_weight(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 5.0);
        let t = FamilyOracle::spanning_trees(Graph::cycle(3)).unwrap();
        assert_eq!(t.max_weight(&[5.0, 1.0, 3.0]).unwrap(), 8.0);
        assert_eq!(brute_max(&t, &[5.0, 1.0, 3.0]), 8.0);
    }

    #[test]
    fn dimension_mismatch_and_infeasible() {
        let u = FamilyOracle::uniform_matroid(3, 2).unwrap();
        assert!(matches!(u.max_weight(&[1.0]), Err(Error::Input(_))));
        assert!(matches!(
            u.max_weight(&[1.0, f64::NAN, 0.0]),
            Err(Error::Input(_))
        ));
        let disconnected = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            FamilyOracle::spanning_trees(disconnected.clone()),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            FamilyOracle::perfect_matchings(Graph::path(3)),
            Err(Error::Infeasible(_))
        ));
        let star = Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(matches!(
            FamilyOracle::perfect_matchings(star),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            FamilyOracle::bipartite_matchings(&[vec![true, false], vec![true, false]]),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            FamilyOracle::explicit(3, vec![]),
            Err(Error::Infeasible(_))
        ));
        assert!(FamilyOracle::perfect_matchings(Graph::complete(24))
            .unwrap_err()
            .is_refusal());
    }

    #[test]
    fn enumeration_examples() {
        let u = FamilyOracle::uniform_matroid(3, 1).unwrap();
        assert_eq!(u.enumerate(100).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(
            FamilyOracle::perfect_matchings(Graph::complete(4))
                .unwrap()
                .enumerate(100)
                .unwrap()
                .len(),
            3
        );
        assert_eq!(
            FamilyOracle::spanning_trees(Graph::complete(4))
                .unwrap()
                .enumerate(100)
                .unwrap()
                .len(),
            16
        );
        assert_eq!(
            FamilyOracle::spanning_trees(Graph::petersen())
                .unwrap()
                .enumerate(10_000)
                .unwrap()
                .len(),
            2000
        );
        assert_eq!(
            FamilyOracle::perfect_matchings(Graph::complete(6))
                .unwrap()
                .enumerate(100)
                .unwrap()
                .len(),
            15
        );
        assert_eq!(
            FamilyOracle::cube_face(4)
                .unwrap()
                .enumerate(100)
                .unwrap()
                .len(),
            16
        );
        // forests of the triangle: everything except the full cycle
        assert_eq!(
            FamilyOracle::forests(Graph::cycle(3))
                .enumerate(100)
                .unwrap()
                .len(),
            7
        );
    }

    #[test]
    fn enumeration_members_are_distinct_and_rank_consistent() {
        for oracle in corpus() {
            let members = oracle.enumerate(DEFAULT_ENUMERATION_BUDGET).unwrap();
            let mut sorted = members.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), members.len(), "{}", oracle.descriptor());
            for x in &members {
                assert!(x.windows(2).all(|w| w[0] < w[1]));
                match oracle.rank() {
                    Rank::Uniform(k) => assert_eq!(x.len(), k),
                    Rank::AtMost(k) => assert!(x.len() <= k),
                    Rank::Mixed => {}
                }
            }
        }
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let u = FamilyOracle::uniform_matroid(10, 5).unwrap();
        assert!(matches!(
            u.enumerate(100),
            Err(Error::EnumerationRefused { budget: 100 })
        ));
        assert_eq!(u.enumerate(252).unwrap().len(), 252);
    }

    #[test]
    fn oracle_agrees_with_brute_force() {
        let stream = RandomStream::new(17);
        for oracle in corpus() {
            let n = oracle.n();
            for trial in 0..100u64 {
                // integer weights in [-5, 5] make ties common
                let c: Vec<f64> = (0..n)
                    .map(|j| (stream.uniform(trial * 64 + j as u64, 0) * 11.0).floor() - 5.0)
                    .collect();
                assert_eq!(
                    oracle.max_weight(&c).unwrap(),
                    brute_max(&oracle, &c),
                    "{} {c:?}",
                    oracle.descriptor()
                );
                let r: Vec<f64> = (0..n)
                    .map(|j| stream.uniform(trial * 64 + j as u64, 1) * 4.0 - 2.0)
                    .collect();
                assert!((oracle.max_weight(&r).unwrap() - brute_max(&oracle, &r)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn forests_with_negative_weights_return_zero() {
        let f = FamilyOracle::forests(Graph::complete(4));
        assert_eq!(f.max_weight(&[-1.0; 6]).unwrap(), 0.0);
    }

    #[test]
    fn linear_matroid_respects_field() {
        // over GF(2) the three nonzero vectors of F_2^2 are pairwise independent
        let m = GfMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]], 2).unwrap();
        let f = FamilyOracle::linear_matroid(m);
        assert_eq!(f.enumerate(100).unwrap().len(), 3);
        let m = GfMatrix::from_rows(&[vec![1, 0, 1, 2], vec![0, 1, 1, 2]], 3).unwrap();
        // column 3 = 2 * column 2 over GF(3)
        let f = FamilyOracle::linear_matroid(m);
        assert_eq!(f.enumerate(100).unwrap().len(), 5);
        assert_eq!(f.max_weight(&[0.0, 0.0, 5.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn relabeling_leaves_weight_unchanged() {
        let stream = RandomStream::new(3);
        let subsets = vec![vec![0, 1], vec![2, 3], vec![1, 4], vec![0, 2, 4]];
        let perm = [3, 0, 4, 1, 2];
        let relabeled: Vec<Vec<usize>> = subsets
            .iter()
            .map(|x| x.iter().map(|&i| perm[i]).collect())
            .collect();
        let a = FamilyOracle::explicit(5, subsets).unwrap();
        let b = FamilyOracle::explicit(5, relabeled).unwrap();
        for t in 0..50 {
            let c: Vec<f64> = (0..5).map(|j| stream.uniform(t * 5 + j, 0) - 0.5).collect();
            let mut c2 = vec![0.0; 5];
            for i in 0..5 {
                c2[perm[i]] = c[i];
            }
            assert_eq!(a.max_weight(&c).unwrap(), b.max_weight(&c2).unwrap());
        }
        // graph relabeling
        let g = Graph::petersen();
        let vperm: Vec<usize> = (0..10).map(|v| (v * 3 + 1) % 10).collect();
        let h = Graph::new(
            10,
            g.edges()
                .iter()
                .map(|&(u, v)| (vperm[u], vperm[v]))
                .rev()
                .collect(),
        )
        .unwrap();
        let ta = FamilyOracle::spanning_trees(g).unwrap();
        let tb = FamilyOracle::spanning_trees(h).unwrap();
        for t in 0..50 {
            let c: Vec<f64> = (0..15).map(|j| stream.uniform(t * 15 + j, 1)).collect();
            let rev: Vec<f64> = c.iter().rev().copied().collect();
            assert!((ta.max_weight(&c).unwrap() - tb.max_weight(&rev).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplicity_validation() {
        let u = FamilyOracle::uniform_matroid(3, 1).unwrap();
        assert!(u.clone().with_multiplicities(vec![1, 2]).is_err());
        assert!(u.clone().with_multiplicities(vec![1, 0, 2]).is_err());
        assert_eq!(
            u.with_multiplicities(vec![1, 2, 3])
                .unwrap()
                .multiplicities(),
            Some(&[1, 2, 3][..])
        );
        let b = FamilyOracle::bipartite_from_matrix(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(b.multiplicities(), Some(&[1, 2, 3, 4][..]));
        let h = FamilyOracle::matchings_from_symmetric(&[
            vec![0, 2, 2, 2],
            vec![2, 0, 2, 2],
            vec![2, 2, 0, 2],
            vec![2, 2, 2, 0],
        ])
        .unwrap();
        assert_eq!(h.n(), 6);
        assert_eq!(h.rank(), Rank::Uniform(2));
    }

    #[test]
    fn product_rank_and_size() {
        let face = FamilyOracle::cube_face(10).unwrap();
        assert_eq!(face.n(), 10);
        assert_eq!(face.rank(), Rank::AtMost(10));
        let p = FamilyOracle::product(vec![
            FamilyOracle::uniform_matroid(4, 2).unwrap(),
            FamilyOracle::forests(Graph::cycle(3)),
        ])
        .unwrap();
        assert_eq!(p.rank(), Rank::Mixed);
        assert_eq!(p.n(), 7);
    }
}
