//! Side-information digraphs.
//!
//! Vertex `i` is receiver `i`, which wants message `x_i`. An arc `i -> j`
//! means receiver `i` already knows `x_j`. Adjacency is kept as one bit-row
//! per vertex, so every subset query works on plain masks.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// Largest supported order.
pub const MAX_VERTICES: usize = 8;

/// Largest order accepted by [`enumerate_nonisomorphic`].
pub const MAX_ENUMERATION_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex count {0} outside supported range 1..={MAX_VERTICES}")]
    UnsupportedOrder(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("undirected girth {0} has no category (only graphs on at most five vertices are categorized)")]
    GirthOutOfRange(usize),
    #[error("enumeration supports 1..={MAX_ENUMERATION_ORDER} vertices, got {0}")]
    EnumerationOrder(usize),
    #[error("labeled code {code:#x} does not describe a graph on {n} vertices")]
    BadCode { n: usize, code: u64 },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A side-information graph on at most [`MAX_VERTICES`] vertices.
///
/// Bit `j` of `rows[i]` is set iff arc `i -> j` exists; the diagonal is always clear.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    rows: [u8; MAX_VERTICES],
}

impl Digraph {
    /// Graph on `n` vertices with no arcs.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(GraphError::UnsupportedOrder(n));
        }
        Ok(Digraph {
            n,
            rows: [0; MAX_VERTICES],
        })
    }

    /// Every ordered pair is an arc, i.e. every receiver knows every other message.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            g.rows[i] = (full_mask(n) & !(1 << i)) as u8;
        }
        Ok(g)
    }

    /// Builds a graph from 0-based arcs.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(i, j) in arcs {
            g.insert_arc(i, j)?;
        }
        Ok(g)
    }

    /// Builds a graph from 0-based undirected edges (each expands to both arcs).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            g.insert_arc(i, j)?;
            g.insert_arc(j, i)?;
        }
        Ok(g)
    }

    pub fn insert_arc(&mut self, from: usize, to: usize) -> Result<(), GraphError> {
        for v in [from, to] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
        }
        if from == to {
            return Err(GraphError::SelfLoop(from));
        }
        self.rows[from] |= 1 << to;
        Ok(())
    }

    /// Copy of `self` with the arc `from -> to` added.
    pub fn with_arc(mut self, from: usize, to: usize) -> Result<Self, GraphError> {
        self.insert_arc(from, to)?;
        Ok(self)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        from < self.n && to < self.n && self.rows[from] >> to & 1 == 1
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.has_arc(a, b) && self.has_arc(b, a)
    }

    /// Out-neighbourhood of `v` as a mask: the messages receiver `v` knows.
    #[inline]
    pub fn out_mask(&self, v: usize) -> u32 {
        u32::from(self.rows[v])
    }

    /// Mask of vertices joined to `v` by an edge.
    pub fn edge_mask(&self, v: usize) -> u32 {
        let mut m = 0;
        for u in 0..self.n {
            if self.has_edge(v, u) {
                m |= 1 << u;
            }
        }
        m
    }

    pub fn arc_count(&self) -> usize {
        self.rows[..self.n]
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// All arcs as 0-based pairs in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            (0..self.n)
                .filter(move |&j| self.has_arc(i, j))
                .map(move |j| (i, j))
        })
    }

    /// Edges as 0-based pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n)
                .filter(move |&j| self.has_edge(i, j))
                .map(move |j| (i, j))
        })
    }

    /// True iff every ordered pair is an arc.
    pub fn is_complete(&self) -> bool {
        self.arc_count() == self.n * (self.n - 1)
    }

    /// True iff every arc of `self` is also an arc of `other` (same order required).
    pub fn is_arc_subgraph_of(&self, other: &Digraph) -> bool {
        self.n == other.n && (0..self.n).all(|i| self.rows[i] & !other.rows[i] == 0)
    }

    /// Subgraph induced by the vertices in `mask`, relabelled in ascending order.
    pub fn induced_subgraph(&self, mask: u32) -> Result<Digraph, GraphError> {
        let mask = mask & full_mask(self.n);
        if mask == 0 {
            return Err(GraphError::EmptySubset);
        }
        let keep: Vec<usize> = (0..self.n).filter(|v| mask >> v & 1 == 1).collect();
        let mut h = Digraph::empty(keep.len())?;
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if self.has_arc(i, j) {
                    h.rows[a] |= 1 << b;
                }
            }
        }
        Ok(h)
    }

    /// Relabels vertices: arc `i -> j` of the result exists iff `perm[i] -> perm[j]` exists here.
    pub fn permuted(&self, perm: &[usize]) -> Digraph {
        assert_eq!(
            perm.len(),
            self.n,
            "permutation length must equal graph order"
        );
        let mut h = Digraph {
            n: self.n,
            rows: [0; MAX_VERTICES],
        };
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.has_arc(perm[i], perm[j]) {
                    h.rows[i] |= 1 << j;
                }
            }
        }
        h
    }

    /// True iff the subgraph induced by `mask` has no directed cycle.
    ///
    /// Peels vertices with no out-arc inside the remaining set until none is left.
    pub fn is_acyclic_on(&self, mask: u32) -> bool {
        let mut live = mask & full_mask(self.n);
        loop {
            if live == 0 {
                return true;
            }
            let mut sinks = 0;
            let mut rest = live;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if self.out_mask(v) & live == 0 {
                    sinks |= 1 << v;
                }
            }
            if sinks == 0 {
                return false;
            }
            live &= !sinks;
        }
    }

    /// True iff the graph has no directed cycle. An edge counts as a 2-cycle.
    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_on(full_mask(self.n))
    }

    /// Length of the shortest cycle made of edges only, or `None` if the edges form a forest.
    pub fn undirected_girth(&self) -> Option<usize> {
        let nbrs: Vec<u32> = (0..self.n).map(|v| self.edge_mask(v)).collect();
        let mut best: Option<usize> = None;
        for root in 0..self.n {
            let mut dist = [usize::MAX; MAX_VERTICES];
            let mut parent = [usize::MAX; MAX_VERTICES];
            dist[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let mut m = nbrs[u];
                while m != 0 {
                    let v = m.trailing_zeros() as usize;
                    m &= m - 1;
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    pub fn categorize(&self) -> Result<Category, GraphError> {
        Category::from_girth(self.undirected_girth())
    }

    /// Row-major adjacency bit-string (diagonal skipped) read as a binary
    /// number whose first position is the most significant bit.
    pub fn labeled_code(&self) -> u64 {
        let mut code = 0u64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    code = code << 1 | u64::from(self.has_arc(i, j));
                }
            }
        }
        code
    }

    /// Inverse of [`Digraph::labeled_code`].
    pub fn from_labeled_code(n: usize, code: u64) -> Result<Digraph, GraphError> {
        let mut g = Digraph::empty(n)?;
        let width = position_count(n);
        if width < 64 && code >> width != 0 {
            return Err(GraphError::BadCode { n, code });
        }
        let mut p = 0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    if code >> (width - 1 - p) & 1 == 1 {
                        g.rows[i] |= 1 << j;
                    }
                    p += 1;
                }
            }
        }
        Ok(g)
    }

    /// Canonical form: the minimal labeled code over all vertex relabelings.
    pub fn canonical_key(&self) -> CanonicalKey {
        let table = permutation_table(self.n);
        let code = self.labeled_code();
        let width = position_count(self.n);
        let best = table
            .iter()
            .map(|perm| remap_code(code, width, perm))
            .min()
            .unwrap_or(code);
        CanonicalKey {
            n: self.n,
            code: best,
        }
    }

    /// Lowest-labeled representative of the isomorphism class.
    pub fn canonical_form(&self) -> Digraph {
        let key = self.canonical_key();
        Digraph::from_labeled_code(key.n, key.code).expect("canonical code is in range")
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph({self})")
    }
}

/// Normalized text form: `n <N>`, then ` ; ` and sorted tokens when arcs exist.
impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tokens = Vec::new();
        for (i, j) in self.arcs() {
            if self.has_arc(j, i) {
                if i < j {
                    tokens.push(format!("{}-{}", i + 1, j + 1));
                }
            } else {
                tokens.push(format!("{}->{}", i + 1, j + 1));
            }
        }
        tokens.sort();
        write!(f, "n {}", self.n)?;
        if !tokens.is_empty() {
            write!(f, " ; {}", tokens.join(" "))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Digraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_digraph(s)
    }
}

/// Parses the text format:
///
/// ```text
/// n 4 ; 1-2 2-3 1-3 2->4 4->1   # comments run to end of line
/// ```
///
/// Indices are 1-based. `a-b` adds both arcs, `a->b` one arc.
pub fn parse_digraph(text: &str) -> Result<Digraph, GraphError> {
    let mut tokens = text.lines().enumerate().flat_map(|(ln, line)| {
        let line = line.split('#').next().unwrap_or("");
        tokenize(line).map(move |(col, tok)| (ln + 1, col + 1, tok))
    });
    let err = |line, column, message: String| GraphError::Parse {
        line,
        column,
        message,
    };

    let (line, column, head) = tokens
        .next()
        .ok_or_else(|| err(1, 1, "expected header `n <N>`".into()))?;
    if head != "n" {
        return Err(err(line, column, format!("expected `n`, found `{head}`")));
    }
    let (line, column, count) = tokens
        .next()
        .ok_or_else(|| err(line, column + 1, "missing vertex count after `n`".into()))?;
    let n: usize = count
        .parse()
        .map_err(|_| err(line, column, format!("invalid vertex count `{count}`")))?;
    let mut g = Digraph::empty(n).map_err(|e| err(line, column, e.to_string()))?;

    let mut first = true;
    for (line, column, tok) in tokens {
        if tok == ";" && first {
            first = false;
            continue;
        }
        first = false;
        let (a, b, both) = if let Some((a, b)) = tok.split_once("->") {
            (a, b, false)
        } else if let Some((a, b)) = tok.split_once('-') {
            (a, b, true)
        } else {
            return Err(err(line, column, format!("malformed token `{tok}`")));
        };
        let parse_vertex = |s: &str| -> Result<usize, GraphError> {
            let v: usize = s
                .parse()
                .map_err(|_| err(line, column, format!("malformed token `{tok}`")))?;
            if v == 0 || v > n {
                return Err(err(
                    line,
                    column,
                    format!("vertex {v} out of range 1..={n} in `{tok}`"),
                ));
            }
            Ok(v - 1)
        };
        let (a, b) = (parse_vertex(a)?, parse_vertex(b)?);
        if a == b {
            return Err(err(line, column, format!("self-loop `{tok}`")));
        }
        g.rows[a] |= 1 << b;
        if both {
            g.rows[b] |= 1 << a;
        }
    }
    Ok(g)
}

fn tokenize(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return None;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let tok = &trimmed[..end];
        let start = offset;
        offset += end;
        rest = &trimmed[end..];
        Some((start, tok))
    })
}

/// Isomorphism-class identifier: order plus minimal labeled code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub n: usize,
    pub code: u64,
}

impl CanonicalKey {
    pub fn graph(&self) -> Digraph {
        Digraph::from_labeled_code(self.n, self.code).expect("canonical key holds a valid code")
    }
}

/// Class of a graph by its shortest undirected cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    NoUndirectedCycle,
    Girth3,
    Girth4,
    Girth5,
}

impl Category {
    pub fn from_girth(girth: Option<usize>) -> Result<Category, GraphError> {
        match girth {
            None => Ok(Category::NoUndirectedCycle),
            Some(3) => Ok(Category::Girth3),
            Some(4) => Ok(Category::Girth4),
            Some(5) => Ok(Category::Girth5),
            Some(g) => Err(GraphError::GirthOutOfRange(g)),
        }
    }

    /// 1-based category number.
    pub fn number(self) -> u8 {
        match self {
            Category::NoUndirectedCycle => 1,
            Category::Girth3 => 2,
            Category::Girth4 => 3,
            Category::Girth5 => 4,
        }
    }

    pub fn from_number(k: u8) -> Option<Category> {
        match k {
            1 => Some(Category::NoUndirectedCycle),
            2 => Some(Category::Girth3),
            3 => Some(Category::Girth4),
            4 => Some(Category::Girth5),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self {
            Category::NoUndirectedCycle => "no undirected cycle",
            Category::Girth3 => "undirected girth 3",
            Category::Girth4 => "undirected girth 4",
            Category::Girth5 => "undirected girth 5",
        };
        write!(f, "{} ({what})", self.number())
    }
}

/// Number of off-diagonal adjacency positions.
#[inline]
pub fn position_count(n: usize) -> usize {
    n * n.saturating_sub(1)
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    (1u32 << n) - 1
}

/// Row-major index of `(i, j)` with the diagonal skipped.
#[inline]
fn position(n: usize, i: usize, j: usize) -> usize {
    i * (n - 1) + if j > i { j - 1 } else { j }
}

/// For each permutation `p`, `src[q]` is the position of the original graph
/// whose bit becomes position `q` of the relabeled graph.
struct PermTable {
    src: Vec<u8>,
}

fn permutation_table(n: usize) -> &'static [PermTable] {
    static TABLES: [OnceLock<Vec<PermTable>>; MAX_VERTICES + 1] =
        [const { OnceLock::new() }; MAX_VERTICES + 1];
    TABLES[n].get_or_init(|| {
        all_permutations(n)
            .into_iter()
            .map(|perm| {
                let mut src = vec![0u8; position_count(n)];
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            src[position(n, i, j)] = position(n, perm[i], perm[j]) as u8;
                        }
                    }
                }
                PermTable { src }
            })
            .collect()
    })
}

fn remap_code(code: u64, width: usize, perm: &PermTable) -> u64 {
    perm.src.iter().fold(0u64, |acc, &s| {
        acc << 1 | (code >> (width - 1 - s as usize) & 1)
    })
}

/// Compares the relabeled code against `code` from the most significant bit,
/// stopping at the first difference.
fn compare_remapped(code: u64, width: usize, perm: &PermTable) -> Ordering {
    for (q, &s) in perm.src.iter().enumerate() {
        let mine = code >> (width - 1 - q) & 1;
        let theirs = code >> (width - 1 - s as usize) & 1;
        match theirs.cmp(&mine) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
        out.push(perm.clone());
    }
}

/// One representative per isomorphism class on `n` vertices, in ascending key order.
///
/// Sweeps all `2^(n(n-1))` labeled graphs and keeps those whose labeled code
/// is already minimal, so every yielded graph equals its own canonical form.
pub fn enumerate_nonisomorphic(n: usize) -> Result<impl Iterator<Item = Digraph>, GraphError> {
    if n == 0 || n > MAX_ENUMERATION_ORDER {
        return Err(GraphError::EnumerationOrder(n));
    }
    let width = position_count(n);
    let table = permutation_table(n);
    Ok((0..1u64 << width)
        .filter(move |&code| {
            table
                .iter()
                .all(|p| compare_remapped(code, width, p) != Ordering::Less)
        })
        .map(move |code| Digraph::from_labeled_code(n, code).expect("code within width")))
}

/// Every labeled graph on `n` vertices.
pub fn all_labeled(n: usize) -> Result<impl Iterator<Item = Digraph>, GraphError> {
    if n == 0 || n > MAX_ENUMERATION_ORDER {
        return Err(GraphError::EnumerationOrder(n));
    }
    Ok((0..1u64 << position_count(n))
        .map(move |code| Digraph::from_labeled_code(n, code).expect("code within width")))
}
