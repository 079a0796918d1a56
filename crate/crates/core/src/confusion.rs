//! Confusion graphs and their exact chromatic numbers.
//!
//! Two message tuples are confusable when some receiver wants a bit on which
//! they differ but sees identical side information. Any valid code must send
//! them to distinct codewords, so the optimal codelength is the base-2
//! logarithm (rounded up) of the chromatic number.

use std::fmt;

use thiserror::Error;

use crate::bounds::{mais, minrank_from};
use crate::graph::Digraph;

/// Largest message count whose confusion graph fits in a [`VertexSet`].
pub const MAX_MESSAGES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfusionError {
    #[error("confusion graphs support at most {MAX_MESSAGES} messages, got {0}")]
    TooLarge(usize),
}

/// Bitset over the at most 256 message tuples.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct VertexSet([u64; 4]);

impl VertexSet {
    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0[v >> 6] |= 1 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0[v >> 6] &= !(1 << (v & 63));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.0[v >> 6] >> (v & 63) & 1 == 1
    }

    #[inline]
    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    #[inline]
    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Cayley-style graph on all `2^n` tuples: `u ~ v` iff `u ^ v` is in the difference set.
#[derive(Clone, Debug)]
pub struct ConfusionGraph {
    n: usize,
    is_difference: Vec<bool>,
    adj: Vec<VertexSet>,
}

impl ConfusionGraph {
    pub fn messages(&self) -> usize {
        self.n
    }

    /// Number of vertices, `2^n`.
    pub fn order(&self) -> usize {
        self.adj.len()
    }

    /// Nonzero differences that some receiver cannot resolve, ascending.
    pub fn difference_set(&self) -> Vec<u64> {
        (0..self.order() as u64)
            .filter(|&z| self.is_difference[z as usize])
            .collect()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.is_difference[u ^ v]
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// True iff no two members of `set` are adjacent.
    pub fn is_independent(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| !self.adj[v].intersects(set))
    }
}

/// Builds the confusion graph of `g`.
///
/// `z` is a difference iff some receiver `i` has `z_i = 1` and `z_j = 0` on
/// every message `j` it knows.
pub fn build_confusion(g: &Digraph) -> Result<ConfusionGraph, ConfusionError> {
    let n = g.order();
    if n > MAX_MESSAGES {
        return Err(ConfusionError::TooLarge(n));
    }
    let size = 1usize << n;
    let is_difference: Vec<bool> = (0..size)
        .map(|z| (0..n).any(|i| z >> i & 1 == 1 && z as u32 & g.out_mask(i) == 0))
        .collect();
    let adj = (0..size)
        .map(|u| {
            let mut s = VertexSet::default();
            for (z, _) in is_difference.iter().enumerate().filter(|(_, &d)| d) {
                s.insert(u ^ z);
            }
            s
        })
        .collect();
    Ok(ConfusionGraph {
        n,
        is_difference,
        adj,
    })
}

/// A proper colouring of the tuples. Colours lie in `0..num_colors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, num_colors: usize) -> Self {
        Coloring { colors, num_colors }
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn is_proper(&self, cg: &ConfusionGraph) -> bool {
        self.colors.len() == cg.order()
            && self.colors.iter().all(|&c| c < self.num_colors)
            && (0..cg.order()).all(|u| {
                cg.neighbors(u)
                    .iter()
                    .all(|v| self.colors[u] != self.colors[v])
            })
    }
}

/// Exact k-colourability by DSATUR backtracking.
///
/// Branches on the uncoloured vertex with most distinct neighbouring colours
/// (ties: higher degree, then lower index), tries colours lowest first, and
/// opens at most one fresh colour per level.
pub fn is_k_colorable(cg: &ConfusionGraph, k: usize) -> Option<Coloring> {
    if k == 0 {
        return None;
    }
    let mut search = Dsatur {
        cg,
        k,
        colors: vec![usize::MAX; cg.order()],
        classes: Vec::new(),
        uncolored: cg.order(),
    };
    search.run().then(|| Coloring::new(search.colors, k))
}

struct Dsatur<'a> {
    cg: &'a ConfusionGraph,
    k: usize,
    colors: Vec<usize>,
    classes: Vec<VertexSet>,
    uncolored: usize,
}

impl Dsatur<'_> {
    fn saturation(&self, v: usize) -> usize {
        let nb = self.cg.neighbors(v);
        self.classes.iter().filter(|c| c.intersects(nb)).count()
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..self.cg.order() {
            if self.colors[v] != usize::MAX {
                continue;
            }
            let key = (self.saturation(v), self.cg.degree(v));
            if best.is_none_or(|(s, d, _)| key > (s, d)) {
                best = Some((key.0, key.1, v));
            }
        }
        best.map(|(_, _, v)| v)
    }

    fn run(&mut self) -> bool {
        if self.uncolored == 0 {
            return true;
        }
        let v = self.pick().expect("an uncoloured vertex remains");
        let opened = self.classes.len();
        let limit = (opened + 1).min(self.k);
        for c in 0..limit {
            if c < opened && self.classes[c].intersects(self.cg.neighbors(v)) {
                continue;
            }
            if c == opened {
                self.classes.push(VertexSet::default());
            }
            self.classes[c].insert(v);
            self.colors[v] = c;
            self.uncolored -= 1;
            if self.run() {
                return true;
            }
            self.uncolored += 1;
            self.colors[v] = usize::MAX;
            self.classes[c].remove(v);
            if c == opened {
                self.classes.pop();
            }
        }
        false
    }
}

/// Greedy DSATUR colouring without backtracking; an upper bound on the chromatic number.
pub fn greedy_coloring(cg: &ConfusionGraph) -> Coloring {
    let mut search = Dsatur {
        cg,
        k: usize::MAX,
        colors: vec![usize::MAX; cg.order()],
        classes: Vec::new(),
        uncolored: cg.order(),
    };
    while let Some(v) = search.pick() {
        let c = (0..search.classes.len())
            .find(|&c| !search.classes[c].intersects(cg.neighbors(v)))
            .unwrap_or_else(|| {
                search.classes.push(VertexSet::default());
                search.classes.len() - 1
            });
        search.classes[c].insert(v);
        search.colors[v] = c;
        search.uncolored -= 1;
    }
    let k = search.classes.len();
    Coloring::new(search.colors, k)
}

/// Largest clique found by greedy extension from every start vertex.
pub fn greedy_clique(cg: &ConfusionGraph) -> VertexSet {
    let mut best = VertexSet::default();
    for start in 0..cg.order() {
        let mut clique = VertexSet::default();
        clique.insert(start);
        let mut pool = *cg.neighbors(start);
        while let Some(v) = pool.iter().max_by_key(|&v| {
            (
                cg.neighbors(v).intersection(&pool).len(),
                std::cmp::Reverse(v),
            )
        }) {
            clique.insert(v);
            pool = pool.intersection(cg.neighbors(v));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Exact chromatic number with a witness colouring.
///
/// Closes the gap between a greedy clique (lower) and greedy DSATUR (upper)
/// by exact colourability tests from the bottom.
pub fn chromatic_number(cg: &ConfusionGraph) -> (usize, Coloring) {
    if cg.order() == 0 {
        return (0, Coloring::new(Vec::new(), 0));
    }
    let lower = greedy_clique(cg).len().max(1);
    let greedy = greedy_coloring(cg);
    let upper = greedy.num_colors();
    for k in lower..upper {
        if let Some(c) = is_k_colorable(cg, k) {
            return (k, c);
        }
    }
    (upper, greedy)
}

/// Smallest `l` with `2^l >= k`.
pub fn ceil_log2(k: usize) -> usize {
    match k {
        0 | 1 => 0,
        k => (usize::BITS - (k - 1).leading_zeros()) as usize,
    }
}

/// Optimal zero-error codelength.
///
/// Returns the common value when the acyclic-subgraph bound meets minrank;
/// otherwise tests colourability at `2^mais, 2^(mais+1), ...` below `2^minrank`.
pub fn ell_star(g: &Digraph) -> Result<usize, ConfusionError> {
    if g.order() > MAX_MESSAGES {
        return Err(ConfusionError::TooLarge(g.order()));
    }
    let lower = mais(g);
    let (upper, _) = minrank_from(g, lower);
    ell_star_between(g, lower, upper)
}

pub(crate) fn ell_star_between(
    g: &Digraph,
    lower: usize,
    upper: usize,
) -> Result<usize, ConfusionError> {
    if lower == upper {
        return Ok(lower);
    }
    let cg = build_confusion(g)?;
    for l in lower..upper {
        if is_k_colorable(&cg, 1 << l).is_some() {
            return Ok(l);
        }
    }
    Ok(upper)
}

/// Optimal codelength straight from the chromatic number, with no bound shortcuts.
pub fn ell_star_by_coloring(g: &Digraph) -> Result<usize, ConfusionError> {
    let cg = build_confusion(g)?;
    Ok(ceil_log2(chromatic_number(&cg).0))
}
