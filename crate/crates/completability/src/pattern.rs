//! Observation patterns: which entries of a matrix are known.
//!
//! A pattern for a symmetric (Gram) matrix is an undirected graph on the row
//! indices, self loops marking observed diagonal entries. A pattern for a
//! rectangular matrix is a bipartite graph between row and column indices.
//! Patterns are immutable after construction and 0-based internally; the text
//! file format is 1-based.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which of the two observation models a pattern belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    Gram,
    Rect,
}

impl std::fmt::Display for PatternKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PatternKind::Gram => write!(f, "gram"),
            PatternKind::Rect => write!(f, "rect"),
        }
    }
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("vertex index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge count mismatch: header says {declared}, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Observation pattern of a symmetric matrix: an undirected graph on `n`
/// vertices whose edges (including self loops) are the observed entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramPattern {
    n: usize,
    /// Sorted, deduplicated, stored as (min, max), 0-based.
    edges: Vec<(usize, usize)>,
}

/// Observation pattern of an `n1 x n2` matrix: a bipartite graph between row
/// vertices and column vertices. Edges are (row, column), 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectPattern {
    n1: usize,
    n2: usize,
    edges: Vec<(usize, usize)>,
}

/// A pattern of either kind, as produced by the file parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Gram(GramPattern),
    Rect(RectPattern),
}

impl GramPattern {
    /// Builds a pattern from 0-based index pairs. Pairs are normalized to
    /// (min, max) and must be unique; indices must be below `n`.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PatternError> {
        let mut normalized: Vec<(usize, usize)> = Vec::new();
        for (i, j) in edges {
            let e = (i.min(j), i.max(j));
            if e.1 >= n {
                return Err(PatternError::IndexOutOfRange { index: e.1, size: n });
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        for w in normalized.windows(2) {
            if w[0] == w[1] {
                return Err(PatternError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        Ok(GramPattern { n, edges: normalized })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of observed entries (graph edges, self loops included).
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical sorted order, each as (min, max).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let e = (i.min(j), i.max(j));
        self.edges.binary_search(&e).is_ok()
    }
}

impl RectPattern {
    /// Builds a pattern from 0-based (row, column) pairs.
    pub fn new(
        n1: usize,
        n2: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PatternError> {
        let mut collected: Vec<(usize, usize)> = Vec::new();
        for (i, j) in edges {
            if i >= n1 {
                return Err(PatternError::IndexOutOfRange { index: i, size: n1 });
            }
            if j >= n2 {
                return Err(PatternError::IndexOutOfRange { index: j, size: n2 });
            }
            collected.push((i, j));
        }
        collected.sort_unstable();
        for w in collected.windows(2) {
            if w[0] == w[1] {
                return Err(PatternError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        Ok(RectPattern { n1, n2, edges: collected })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical sorted order, each as (row, column).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

impl Pattern {
    pub fn kind(&self) -> PatternKind {
        match self {
            Pattern::Gram(_) => PatternKind::Gram,
            Pattern::Rect(_) => PatternKind::Rect,
        }
    }

    pub fn num_edges(&self) -> usize {
        match self {
            Pattern::Gram(p) => p.num_edges(),
            Pattern::Rect(p) => p.num_edges(),
        }
    }

    /// Total vertex count of the underlying graph: `n` for Gram, `n1 + n2`
    /// for rectangular patterns.
    pub fn num_vertices(&self) -> usize {
        match self {
            Pattern::Gram(p) => p.n,
            Pattern::Rect(p) => p.n1 + p.n2,
        }
    }

    /// Edges over the unified vertex set. For rectangular patterns column
    /// vertex `j` becomes vertex `n1 + j`; Gram self loops pass through.
    pub fn unified_edges(&self) -> Vec<(usize, usize)> {
        match self {
            Pattern::Gram(p) => p.edges.clone(),
            Pattern::Rect(p) => p.edges.iter().map(|&(i, j)| (i, p.n1 + j)).collect(),
        }
    }
}

/// Samples a Gram pattern: each of the n(n+1)/2 unordered pairs, self loops
/// included, is kept independently with probability `beta`. Pure in
/// `(n, beta, seed)`.
pub fn sample_gram(n: usize, beta: f64, seed: u64) -> GramPattern {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            if rng.random::<f64>() < beta {
                edges.push((i, j));
            }
        }
    }
    GramPattern { n, edges }
}

/// Samples a rectangular pattern over the `n1 * n2` cells. Pure in
/// `(n1, n2, beta, seed)`.
pub fn sample_rect(n1: usize, n2: usize, beta: f64, seed: u64) -> RectPattern {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            if rng.random::<f64>() < beta {
                edges.push((i, j));
            }
        }
    }
    RectPattern { n1, n2, edges }
}

/// Connected components of the pattern graph over the unified vertex set,
/// each component sorted ascending, components ordered by smallest member.
/// Self loops do not connect anything.
pub fn connected_components(pattern: &Pattern) -> Vec<Vec<usize>> {
    let n = pattern.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (a, b) in pattern.unified_edges() {
        if a == b {
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Parses the pattern text format.
///
/// Line 1: `kind gram` or `kind rect`; line 2: `size n` or `size n1 n2`;
/// line 3: `edges m`; then m lines `i j`, 1-based. Lines starting with `#`
/// are comments and blank lines are skipped.
pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let kind_line = lines
        .next()
        .ok_or_else(|| PatternError::MalformedHeader("empty input".into()))?;
    let kind = match kind_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["kind", "gram"] => PatternKind::Gram,
        ["kind", "rect"] => PatternKind::Rect,
        _ => {
            return Err(PatternError::MalformedHeader(format!(
                "expected `kind gram|rect`, got `{kind_line}`"
            )))
        }
    };

    let size_line = lines
        .next()
        .ok_or_else(|| PatternError::MalformedHeader("missing size line".into()))?;
    let size_fields: Vec<&str> = size_line.split_whitespace().collect();
    let parse_usize = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| PatternError::MalformedHeader(format!("bad integer `{s}`")))
    };
    let (n1, n2) = match (kind, size_fields.as_slice()) {
        (PatternKind::Gram, ["size", n]) => {
            let n = parse_usize(n)?;
            (n, n)
        }
        (PatternKind::Rect, ["size", a, b]) => (parse_usize(a)?, parse_usize(b)?),
        _ => {
            return Err(PatternError::MalformedHeader(format!(
                "expected `size n`/`size n1 n2` matching the kind, got `{size_line}`"
            )))
        }
    };

    let edges_line = lines
        .next()
        .ok_or_else(|| PatternError::MalformedHeader("missing edges line".into()))?;
    let m = match edges_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["edges", m] => parse_usize(m)?,
        _ => {
            return Err(PatternError::MalformedHeader(format!(
                "expected `edges m`, got `{edges_line}`"
            )))
        }
    };

    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, j] = fields.as_slice() else {
            return Err(PatternError::MalformedHeader(format!(
                "expected `i j` edge line, got `{line}`"
            )));
        };
        let (i, j) = (parse_usize(i)?, parse_usize(j)?);
        // 1-based on disk.
        if i == 0 {
            return Err(PatternError::IndexOutOfRange { index: 0, size: n1 });
        }
        if j == 0 {
            return Err(PatternError::IndexOutOfRange { index: 0, size: n2 });
        }
        edges.push((i - 1, j - 1));
    }
    if edges.len() != m {
        return Err(PatternError::EdgeCountMismatch { declared: m, found: edges.len() });
    }

    match kind {
        PatternKind::Gram => Ok(Pattern::Gram(GramPattern::new(n1, edges)?)),
        PatternKind::Rect => Ok(Pattern::Rect(RectPattern::new(n1, n2, edges)?)),
    }
}

/// Serializes a pattern to the text format in canonical edge order.
pub fn write_pattern(pattern: &Pattern) -> String {
    let mut out = String::new();
    match pattern {
        Pattern::Gram(p) => {
            writeln!(out, "kind gram").unwrap();
            writeln!(out, "size {}", p.n).unwrap();
            writeln!(out, "edges {}", p.edges.len()).unwrap();
            for &(i, j) in &p.edges {
                writeln!(out, "{} {}", i + 1, j + 1).unwrap();
            }
        }
        Pattern::Rect(p) => {
            writeln!(out, "kind rect").unwrap();
            writeln!(out, "size {} {}", p.n1, p.n2).unwrap();
            writeln!(out, "edges {}", p.edges.len()).unwrap();
            for &(i, j) in &p.edges {
                writeln!(out, "{} {}", i + 1, j + 1).unwrap();
            }
        }
    }
    out
}
