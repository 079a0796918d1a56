//! Lower and upper bounds on the optimal codelength: the order of a maximum
//! acyclic induced subgraph, and minrank over GF(2).

use std::fmt;

use thiserror::Error;

use crate::graph::{full_mask, Digraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("matrix is {matrix}x{matrix} but the graph has {graph} vertices")]
    DimensionMismatch { matrix: usize, graph: usize },
    #[error("row {row} has {len} bits, expected {n}")]
    RowWidth { row: usize, len: usize, n: usize },
    #[error("invalid matrix character {0:?}")]
    BadChar(char),
}

/// Square 0/1 matrix over GF(2). Bit `j` of `rows[i]` is entry `(i, j)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    n: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        assert_eq!(rows.len(), n, "a square matrix needs n rows");
        assert!(n <= 64);
        let mask = width_mask(n);
        Gf2Matrix {
            n,
            rows: rows.into_iter().map(|r| r & mask).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| 1 << i).collect())
    }

    pub fn all_ones(n: usize) -> Self {
        Self::from_rows(n, vec![width_mask(n); n])
    }

    /// Parses rows written as `0`/`1` strings, first character is column 1.
    pub fn parse_rows(rows: &[&str]) -> Result<Self, BoundsError> {
        let n = rows.len();
        let mut out = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(BoundsError::RowWidth {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            out.push(parse_bits(row)?);
        }
        Ok(Self::from_rows(n, out))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn rank(&self) -> usize {
        gf2_rank(self)
    }

    /// Key ordering matrices lexicographically by their concatenated row strings.
    fn lex_key(&self) -> Vec<u64> {
        self.rows.iter().map(|&r| lex_row_key(r, self.n)).collect()
    }
}

impl PartialOrd for Gf2Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gf2Matrix {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|&r| format_bits(r, self.n)))
            .finish()
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            f.write_str(&format_bits(r, self.n))?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// `0`/`1` string with character `k` holding bit `k`.
pub fn format_bits(bits: u64, width: usize) -> String {
    (0..width)
        .map(|k| if bits >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bits(s: &str) -> Result<u64, BoundsError> {
    s.chars().enumerate().try_fold(0u64, |acc, (k, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << k),
        other => Err(BoundsError::BadChar(other)),
    })
}

/// Bit-reversed row so that integer order matches string order.
#[inline]
fn lex_row_key(row: u64, n: usize) -> u64 {
    (0..n).fold(0, |acc, k| acc << 1 | (row >> k & 1))
}

/// Linear basis kept with distinct leading bits, sorted by leading bit descending.
#[derive(Clone, Default, Debug)]
pub(crate) struct XorBasis {
    vectors: Vec<u64>,
}

impl XorBasis {
    pub(crate) fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.vectors {
            v = v.min(v ^ b);
        }
        v
    }

    /// Adds `v`; returns false when it was already in the span.
    pub(crate) fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pos = self.vectors.partition_point(|&b| b > r);
        self.vectors.insert(pos, r);
        true
    }

    pub(crate) fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub(crate) fn rank(&self) -> usize {
        self.vectors.len()
    }
}

/// Rank of a list of bit-vectors over GF(2).
pub fn rank_of_rows(rows: &[u64]) -> usize {
    let mut basis = XorBasis::default();
    rows.iter().filter(|&&r| basis.insert(r)).count()
}

/// Rank over GF(2) by elimination. The 0x0 matrix has rank 0.
pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    rank_of_rows(&m.rows)
}

/// Reduced row-echelon basis of the row space. Pivots are the lowest set
/// column of each row, rows ordered by pivot column.
pub fn row_space_basis(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            let pivot = b & b.wrapping_neg();
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let pivot = v & v.wrapping_neg();
        for b in basis.iter_mut() {
            if *b & pivot != 0 {
                *b ^= v;
            }
        }
        basis.push(v);
    }
    basis.sort_by_key(|b| b.trailing_zeros());
    basis
}

/// True iff `m` has a unit diagonal and is zero off the graph's arcs.
pub fn fits(m: &Gf2Matrix, g: &Digraph) -> Result<bool, BoundsError> {
    if m.n != g.order() {
        return Err(BoundsError::DimensionMismatch {
            matrix: m.n,
            graph: g.order(),
        });
    }
    Ok((0..m.n).all(|i| {
        let allowed = u64::from(g.out_mask(i)) | 1 << i;
        m.rows[i] >> i & 1 == 1 && m.rows[i] & !allowed == 0
    }))
}

/// Order of a maximum acyclic induced subgraph, by exhaustive subset search.
pub fn mais(g: &Digraph) -> usize {
    (1..=full_mask(g.order()))
        .filter(|&s| g.is_acyclic_on(s))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Minimum GF(2) rank over matrices fitting `g`, with the lexicographically
/// smallest matrix attaining it.
pub fn minrank(g: &Digraph) -> (usize, Gf2Matrix) {
    minrank_from(g, mais(g))
}

/// Same as [`minrank`] with a known lower bound on the answer.
pub(crate) fn minrank_from(g: &Digraph, lower: usize) -> (usize, Gf2Matrix) {
    let n = g.order();
    let candidates: Vec<Vec<u64>> = (0..n).map(|i| row_candidates(g, i)).collect();
    for r in lower.max(1)..=n {
        let mut search = RankSearch {
            candidates: &candidates,
            limit: r,
            rows: Vec::with_capacity(n),
        };
        if search.run(&XorBasis::default()) {
            return (r, Gf2Matrix::from_rows(n, search.rows));
        }
    }
    unreachable!("the identity always fits, so rank n is feasible")
}

/// Fitting rows for receiver `i`, ascending in string order.
fn row_candidates(g: &Digraph, i: usize) -> Vec<u64> {
    let n = g.order();
    let free = u64::from(g.out_mask(i));
    let mut rows = Vec::with_capacity(1 << free.count_ones());
    // enumerate submasks of `free`
    let mut sub = free;
    loop {
        rows.push(sub | 1 << i);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    rows.sort_by_key(|&r| lex_row_key(r, n));
    rows
}

/// Depth-first row assignment under a rank budget.
struct RankSearch<'a> {
    candidates: &'a [Vec<u64>],
    limit: usize,
    rows: Vec<u64>,
}

impl RankSearch<'_> {
    fn run(&mut self, basis: &XorBasis) -> bool {
        let depth = self.rows.len();
        if depth == self.candidates.len() {
            return true;
        }
        // with the budget spent, each remaining row must already lie in the span
        if basis.rank() == self.limit
            && !self.candidates[depth..]
                .iter()
                .all(|cands| cands.iter().any(|&c| basis.contains(c)))
        {
            return false;
        }
        for &c in &self.candidates[depth] {
            let mut next = basis.clone();
            let grew = next.insert(c);
            if grew && next.rank() > self.limit {
                continue;
            }
            self.rows.push(c);
            if self.run(if grew { &next } else { basis }) {
                return true;
            }
            self.rows.pop();
        }
        false
    }
}
