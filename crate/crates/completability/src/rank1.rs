//! Exact rank-1 tools: combinatorial completability tests and a completer.
//!
//! At rank 1 every observed entry is a product `p_i p_j`, and completability
//! is a pure graph property. A connected component can pin its moduli
//! exactly when it carries an odd cycle (a self loop counts as an odd cycle
//! of length 1): taking logarithms of moduli turns the products into the
//! linear system `q_i + q_j = log |J_ij|`, whose cycle submatrix is singular
//! exactly for even cycles, and signs satisfy the analogous system over Z2.
//! The completer solves both systems and verifies every observed entry,
//! redundant ones included.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::numkit::DenseMatrix;
use crate::pattern::{GramPattern, RectPattern};

/// Combinatorial verdicts for one pattern at rank 1, with per-component
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1Verdict {
    pub minimally_locally: bool,
    pub locally: bool,
    pub minimally_globally: bool,
    pub globally: bool,
    pub components: Vec<ComponentInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInfo {
    pub vertices: Vec<usize>,
    pub edge_count: usize,
    pub has_self_loop: bool,
    /// Whether the component contains an odd closed walk: a self loop or an
    /// odd simple cycle. Equivalent to "not bipartite" with loops counted.
    pub has_odd_cycle: bool,
    pub bipartite: bool,
}

/// Observed rank-1 values, keyed by canonical (min, max) 0-based edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Values {
    values: BTreeMap<(usize, usize), f64>,
}

#[derive(Debug, Error)]
pub enum Rank1Error {
    #[error("no observed value for edge ({0}, {1})")]
    MissingValue(usize, usize),
    #[error("entry ({0}, {1}) is zero or vanishing; the log-modulus system is undefined")]
    ZeroEntry(usize, usize),
    #[error("component containing vertex {0} has no odd cycle; moduli are underdetermined")]
    Underdetermined(usize),
    #[error("sign system over Z2 is unsatisfiable at edge ({0}, {1})")]
    SignInconsistent(usize, usize),
    #[error("observed entry ({i}, {j}) disagrees with the rank-1 reconstruction: expected {expected}, got {got}")]
    NotRank1Consistent { i: usize, j: usize, expected: f64, got: f64 },
    #[error("malformed values line: {0}")]
    MalformedValues(String),
}

impl Rank1Values {
    pub fn new(entries: impl IntoIterator<Item = ((usize, usize), f64)>) -> Self {
        let values = entries
            .into_iter()
            .map(|((i, j), v)| ((i.min(j), i.max(j)), v))
            .collect();
        Rank1Values { values }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parses lines of `i j value` (1-based indices); `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, Rank1Error> {
        let mut values = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [i, j, v] = fields.as_slice() else {
                return Err(Rank1Error::MalformedValues(line.into()));
            };
            let parse_idx = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|&x| x >= 1)
                    .ok_or_else(|| Rank1Error::MalformedValues(line.into()))
            };
            let (i, j) = (parse_idx(i)? - 1, parse_idx(j)? - 1);
            let v: f64 = v.parse().map_err(|_| Rank1Error::MalformedValues(line.into()))?;
            values.insert((i.min(j), i.max(j)), v);
        }
        Ok(Rank1Values { values })
    }
}

/// Adjacency lists plus loop marks for component/bipartiteness walks.
struct Graph {
    adj: Vec<Vec<usize>>,
    has_loop: Vec<bool>,
}

impl Graph {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut has_loop = vec![false; n];
        for &(i, j) in edges {
            if i == j {
                has_loop[i] = true;
            } else {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        Graph { adj, has_loop }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// BFS 2-coloring per component in ascending vertex order. Returns for
    /// each component its vertices and whether a proper 2-coloring exists
    /// (self loops make a component non-bipartite).
    fn components(&self) -> Vec<(Vec<usize>, bool)> {
        let n = self.n();
        let mut color: Vec<Option<u8>> = vec![None; n];
        let mut out = Vec::new();
        for start in 0..n {
            if color[start].is_some() {
                continue;
            }
            let mut vertices = Vec::new();
            let mut bipartite = true;
            let mut queue = VecDeque::from([start]);
            color[start] = Some(0);
            while let Some(v) = queue.pop_front() {
                vertices.push(v);
                if self.has_loop[v] {
                    bipartite = false;
                }
                for &w in &self.adj[v] {
                    match color[w] {
                        None => {
                            color[w] = Some(1 - color[v].unwrap());
                            queue.push_back(w);
                        }
                        Some(c) => {
                            if c == color[v].unwrap() {
                                bipartite = false;
                            }
                        }
                    }
                }
            }
            vertices.sort_unstable();
            out.push((vertices, bipartite));
        }
        out
    }
}

/// Rank-1 combinatorial test for Gram patterns.
///
/// Per component `H`: minimal local completability needs `|E(H)| = |V(H)|`
/// with the unique cycle odd; local completability needs an odd cycle (a
/// spanning odd-unicyclic subgraph then exists); global additionally needs
/// the whole pattern connected, since the relative sign between components
/// can never be recovered.
pub fn check_gram_rank1(pattern: &GramPattern) -> Rank1Verdict {
    let graph = Graph::new(pattern.n(), pattern.edges());
    let comps = graph.components();

    let mut edge_count = vec![0usize; pattern.n()];
    let mut comp_of = vec![0usize; pattern.n()];
    for (idx, (vs, _)) in comps.iter().enumerate() {
        for &v in vs {
            comp_of[v] = idx;
        }
    }
    for &(i, _) in pattern.edges() {
        edge_count[comp_of[i]] += 1;
    }

    let mut components = Vec::new();
    let mut minimally_locally = true;
    let mut locally = true;
    for (idx, (vertices, bipartite)) in comps.iter().enumerate() {
        let has_self_loop = vertices.iter().any(|&v| graph.has_loop[v]);
        let has_odd_cycle = !bipartite;
        minimally_locally &= has_odd_cycle && edge_count[idx] == vertices.len();
        locally &= has_odd_cycle;
        components.push(ComponentInfo {
            vertices: vertices.clone(),
            edge_count: edge_count[idx],
            has_self_loop,
            has_odd_cycle,
            bipartite: *bipartite,
        });
    }
    let connected = components.len() == 1;
    Rank1Verdict {
        minimally_locally,
        locally,
        minimally_globally: connected && minimally_locally,
        globally: connected && locally,
        components,
    }
}

/// Rank-1 combinatorial test for rectangular patterns.
///
/// Minimal local completability is exactly acyclicity (a forest); minimal
/// global completability is a single spanning tree. The non-minimal
/// predicates follow by subgraph monotonicity: every pattern contains a
/// spanning forest, so the local predicate is unconstrained, and global
/// completability needs exactly connectivity.
pub fn check_rect_rank1(pattern: &RectPattern) -> Rank1Verdict {
    let total = pattern.n1() + pattern.n2();
    let edges: Vec<(usize, usize)> =
        pattern.edges().iter().map(|&(i, j)| (i, pattern.n1() + j)).collect();
    let graph = Graph::new(total, &edges);
    let comps = graph.components();

    let mut comp_of = vec![0usize; total];
    for (idx, (vs, _)) in comps.iter().enumerate() {
        for &v in vs {
            comp_of[v] = idx;
        }
    }
    let mut edge_count = vec![0usize; comps.len()];
    for &(i, _) in &edges {
        edge_count[comp_of[i]] += 1;
    }

    let mut components = Vec::new();
    let mut is_forest = true;
    for (idx, (vertices, bipartite)) in comps.iter().enumerate() {
        // acyclic component: |E| = |V| - 1
        is_forest &= edge_count[idx] == vertices.len() - 1;
        components.push(ComponentInfo {
            vertices: vertices.clone(),
            edge_count: edge_count[idx],
            has_self_loop: false,
            has_odd_cycle: !bipartite,
            bipartite: *bipartite,
        });
    }
    let connected = components.len() == 1;
    Rank1Verdict {
        minimally_locally: is_forest,
        locally: true,
        minimally_globally: connected && is_forest,
        globally: connected,
        components,
    }
}

/// The coefficient matrix tying the velocities of a rank-1 cycle
/// `1 - 2 - ... - L - 1` together, and its determinant in closed form:
/// `[1 + (-1)^(L+1)] * prod(p_i)`, zero exactly for even `L`. `L = 1` is a
/// self loop, whose single equation has coefficient `2 p_1`.
pub fn cycle_matrix(points: &[f64]) -> DenseMatrix {
    let l = points.len();
    assert!(l >= 1, "cycle needs at least one point");
    if l == 1 {
        return DenseMatrix::from_element(1, 1, 2.0 * points[0]);
    }
    let mut c = DenseMatrix::zeros(l, l);
    for i in 0..l {
        let j = (i + 1) % l;
        c[(i, i)] = points[j];
        c[(i, j)] = points[i];
    }
    c
}

/// Closed-form determinant of [`cycle_matrix`].
pub fn cycle_determinant(points: &[f64]) -> f64 {
    let l = points.len();
    assert!(l >= 1, "cycle needs at least one point");
    let product: f64 = points.iter().product();
    let sign_term = 1.0 + if l % 2 == 0 { -1.0 } else { 1.0 };
    if l == 1 {
        2.0 * points[0]
    } else {
        sign_term * product
    }
}

/// Relative threshold below which an observed value counts as zero.
const ZERO_ENTRY_REL: f64 = 1e-12;
/// Relative tolerance for verifying observed entries against the
/// reconstruction.
const CONSISTENCY_REL: f64 = 1e-8;

/// Reconstructs rank-1 points from observed values on a locally completable
/// Gram pattern.
///
/// Per component, log-moduli are assigned by BFS (ascending vertex ids) as
/// `q_v = sigma_v * t + c_v` with the component root's modulus `t` unknown;
/// any self loop or odd-cycle-closing edge fixes `t`. Sign bits follow from
/// the same traversal over Z2 with the root bit cleared, so the returned
/// representative is deterministic and unique up to one global sign flip
/// per component. Every observed entry, redundant ones included, is
/// verified against the reconstruction.
pub fn complete_gram_rank1(
    pattern: &GramPattern,
    values: &Rank1Values,
) -> Result<Vec<f64>, Rank1Error> {
    let n = pattern.n();

    // Every pattern edge needs a usable value.
    let mut max_abs = 0.0f64;
    for &(i, j) in pattern.edges() {
        let v = values.get(i, j).ok_or(Rank1Error::MissingValue(i, j))?;
        max_abs = max_abs.max(v.abs());
    }
    for &(i, j) in pattern.edges() {
        let v = values.get(i, j).unwrap();
        if v == 0.0 || v.abs() < ZERO_ENTRY_REL * max_abs {
            return Err(Rank1Error::ZeroEntry(i, j));
        }
    }

    let graph = Graph::new(n, pattern.edges());

    // BFS over non-loop edges: q_v = sigma_v * t + c_v relative to the
    // component root, b_v relative to the root bit.
    let mut sigma = vec![0i8; n];
    let mut offset = vec![0.0f64; n];
    let mut bit = vec![0u8; n];
    let mut root_of = vec![usize::MAX; n];
    for start in 0..n {
        if root_of[start] != usize::MAX {
            continue;
        }
        sigma[start] = 1;
        offset[start] = 0.0;
        bit[start] = 0;
        root_of[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let mut neighbors = graph.adj[v].clone();
            neighbors.sort_unstable();
            for w in neighbors {
                if root_of[w] != usize::MAX {
                    continue;
                }
                let val = values.get(v, w).unwrap();
                sigma[w] = -sigma[v];
                offset[w] = val.abs().ln() - offset[v];
                bit[w] = bit[v] ^ u8::from(val < 0.0);
                root_of[w] = start;
                queue.push_back(w);
            }
        }
    }

    // One t-fixing constraint per component: a self loop `2 q_v = log J_vv`
    // or an edge closing an odd walk (`sigma_v == sigma_w`). Even-closing
    // edges and redundant constraints are checked afterwards.
    let mut t_of: BTreeMap<usize, f64> = BTreeMap::new();
    for &(i, j) in pattern.edges() {
        let root = root_of[i];
        if t_of.contains_key(&root) {
            continue;
        }
        let val = values.get(i, j).unwrap();
        if i == j {
            if val < 0.0 {
                return Err(Rank1Error::SignInconsistent(i, j));
            }
            // q_i = log(sqrt(J_ii))
            let t = (0.5 * val.ln() - offset[i]) / f64::from(sigma[i]);
            t_of.insert(root, t);
        } else if sigma[i] == sigma[j] {
            let t = (val.abs().ln() - offset[i] - offset[j]) / (2.0 * f64::from(sigma[i]));
            t_of.insert(root, t);
        }
    }

    // Sign consistency of closing edges (self loops need J_vv > 0; an edge
    // with equal bits needs a positive value, unequal bits a negative one).
    for &(i, j) in pattern.edges() {
        let val = values.get(i, j).unwrap();
        let expected_negative = if i == j { false } else { bit[i] != bit[j] };
        if (val < 0.0) != expected_negative {
            return Err(Rank1Error::SignInconsistent(i, j));
        }
    }

    let mut points = vec![0.0f64; n];
    for v in 0..n {
        let root = root_of[v];
        let t = *t_of.get(&root).ok_or(Rank1Error::Underdetermined(root))?;
        let q = f64::from(sigma[v]) * t + offset[v];
        let magnitude = q.exp();
        points[v] = if bit[v] == 0 { magnitude } else { -magnitude };
    }

    // Verify every observed entry, redundant ones included.
    for &(i, j) in pattern.edges() {
        let got = points[i] * points[j];
        let expected = values.get(i, j).unwrap();
        if (got - expected).abs() > CONSISTENCY_REL * expected.abs().max(1e-300) {
            return Err(Rank1Error::NotRank1Consistent { i, j, expected, got });
        }
    }
    Ok(points)
}
