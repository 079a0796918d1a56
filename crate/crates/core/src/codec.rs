//! Index codes and zero-error decodability.
//!
//! Tuples are packed with message `x_{i+1}` at bit `i`; written out as
//! `0`/`1` strings, character `i` is `x_{i+1}`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bounds::{
    fits, format_bits, parse_bits, rank_of_rows, row_space_basis, width_mask, BoundsError,
    Gf2Matrix,
};
use crate::confusion::{ceil_log2, Coloring, ConfusionGraph};
use crate::graph::Digraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("width mismatch: code has {code} messages, input has {input}")]
    WidthMismatch { code: usize, input: usize },
    #[error("encoder rows are linearly dependent")]
    DependentRows,
    #[error("general code table has {got} entries, expected {expected}")]
    IncompleteTable { got: usize, expected: usize },
    #[error("codeword {codeword:#b} wider than {len} bits")]
    CodewordTooWide { codeword: u64, len: usize },
    #[error("matrix does not fit the graph")]
    NotFitting,
    #[error("colouring is not proper for the confusion graph")]
    ImproperColoring,
    #[error("malformed code line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// A fixed-width bit string.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    pub bits: u64,
    pub width: usize,
}

impl Word {
    pub fn new(bits: u64, width: usize) -> Self {
        Word {
            bits: bits & width_mask(width),
            width,
        }
    }

    pub fn parse(s: &str) -> Result<Self, CodecError> {
        Ok(Word::new(parse_bits(s)?, s.len()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(self.bits, self.width))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IndexCode {
    /// Codeword bit `k` is the XOR of the messages selected by `rows[k]`.
    Linear { n: usize, rows: Vec<u64> },
    /// Codeword of tuple `x` is `table[x]`.
    General {
        n: usize,
        len: usize,
        table: Vec<u64>,
    },
}

impl IndexCode {
    pub fn linear(n: usize, rows: Vec<u64>) -> Result<Self, CodecError> {
        let rows: Vec<u64> = rows.into_iter().map(|r| r & width_mask(n)).collect();
        if rank_of_rows(&rows) != rows.len() {
            return Err(CodecError::DependentRows);
        }
        Ok(IndexCode::Linear { n, rows })
    }

    pub fn general(n: usize, len: usize, table: Vec<u64>) -> Result<Self, CodecError> {
        if table.len() != 1 << n {
            return Err(CodecError::IncompleteTable {
                got: table.len(),
                expected: 1 << n,
            });
        }
        if let Some(&codeword) = table.iter().find(|&&w| w & !width_mask(len) != 0) {
            return Err(CodecError::CodewordTooWide { codeword, len });
        }
        Ok(IndexCode::General { n, len, table })
    }

    /// Number of messages.
    pub fn messages(&self) -> usize {
        match self {
            IndexCode::Linear { n, .. } | IndexCode::General { n, .. } => *n,
        }
    }

    /// Codeword length in bits.
    pub fn len(&self) -> usize {
        match self {
            IndexCode::Linear { rows, .. } => rows.len(),
            IndexCode::General { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, IndexCode::Linear { .. })
    }

    #[inline]
    pub(crate) fn encode_bits(&self, x: u64) -> u64 {
        match self {
            IndexCode::Linear { rows, .. } => rows
                .iter()
                .enumerate()
                .fold(0, |w, (k, r)| w | u64::from((r & x).count_ones() & 1) << k),
            IndexCode::General { table, .. } => table[x as usize],
        }
    }

    pub fn encode(&self, x: Word) -> Result<Word, CodecError> {
        if x.width != self.messages() {
            return Err(CodecError::WidthMismatch {
                code: self.messages(),
                input: x.width,
            });
        }
        Ok(Word::new(self.encode_bits(x.bits), self.len()))
    }

    /// One line per row for linear codes, one `tuple codeword` line per tuple otherwise.
    pub fn to_lines(&self) -> Vec<String> {
        match self {
            IndexCode::Linear { n, rows } => rows.iter().map(|&r| format_bits(r, *n)).collect(),
            IndexCode::General { n, len, table } => table
                .iter()
                .enumerate()
                .map(|(x, &w)| format!("{} {}", format_bits(x as u64, *n), format_bits(w, *len)))
                .collect(),
        }
    }

    /// Inverse of [`IndexCode::to_lines`]; lines containing a space denote a general code.
    pub fn from_lines<S: AsRef<str>>(n: usize, lines: &[S]) -> Result<Self, CodecError> {
        let malformed = |line: usize, message: String| CodecError::Malformed { line, message };
        let general = lines.iter().any(|l| l.as_ref().contains(' '));
        if !general {
            let rows = lines
                .iter()
                .enumerate()
                .map(|(k, l)| {
                    let l = l.as_ref();
                    if l.len() != n {
                        return Err(malformed(k + 1, format!("row `{l}` is not {n} bits")));
                    }
                    Ok(parse_bits(l)?)
                })
                .collect::<Result<Vec<_>, CodecError>>()?;
            return IndexCode::linear(n, rows);
        }
        let mut table = vec![None; 1 << n];
        let mut len = None;
        for (k, l) in lines.iter().enumerate() {
            let l = l.as_ref();
            let (tuple, word) = l
                .split_once(' ')
                .ok_or_else(|| malformed(k + 1, format!("expected `tuple codeword`, got `{l}`")))?;
            if tuple.len() != n {
                return Err(malformed(k + 1, format!("tuple `{tuple}` is not {n} bits")));
            }
            if *len.get_or_insert(word.len()) != word.len() {
                return Err(malformed(k + 1, "codeword lengths differ".into()));
            }
            let x = parse_bits(tuple)? as usize;
            if table[x].replace(parse_bits(word)?).is_some() {
                return Err(malformed(k + 1, format!("tuple `{tuple}` listed twice")));
            }
        }
        let got = table.iter().filter(|e| e.is_some()).count();
        let table: Vec<u64> =
            table
                .into_iter()
                .collect::<Option<_>>()
                .ok_or(CodecError::IncompleteTable {
                    got,
                    expected: 1 << n,
                })?;
        IndexCode::general(n, len.unwrap_or(0), table)
    }
}

impl fmt::Display for IndexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lines().join("\n"))
    }
}

/// Lookup decoder for one receiver: `(codeword, known bits) -> wanted bit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoderTable {
    pub receiver: usize,
    /// Mask of messages the receiver knows.
    pub priors: u32,
    entries: BTreeMap<(u64, u64), bool>,
}

impl DecoderTable {
    /// Decodes from a codeword and the full tuple restricted to the known messages.
    pub fn decode(&self, codeword: u64, known: u64) -> Option<bool> {
        self.entries
            .get(&(codeword, known & u64::from(self.priors)))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Checks zero-error decodability by simulating every receiver on every tuple.
///
/// Returns the decoder tables when every receiver always recovers its bit,
/// `None` otherwise.
pub fn is_valid_code(g: &Digraph, c: &IndexCode) -> Result<Option<Vec<DecoderTable>>, CodecError> {
    let n = g.order();
    if c.messages() != n {
        return Err(CodecError::WidthMismatch {
            code: c.messages(),
            input: n,
        });
    }
    let codewords: Vec<u64> = (0..1u64 << n).map(|x| c.encode_bits(x)).collect();
    let mut tables = Vec::with_capacity(n);
    for i in 0..n {
        let priors = g.out_mask(i);
        let mut entries = BTreeMap::new();
        for (x, &w) in codewords.iter().enumerate() {
            let x = x as u64;
            let wanted = x >> i & 1 == 1;
            match entries.insert((w, x & u64::from(priors)), wanted) {
                Some(prev) if prev != wanted => return Ok(None),
                _ => {}
            }
        }
        tables.push(DecoderTable {
            receiver: i,
            priors,
            entries,
        });
    }
    Ok(Some(tables))
}

/// Linear code spanned by a fitting matrix, rows in reduced echelon form.
pub fn linear_code_from_matrix(g: &Digraph, m: &Gf2Matrix) -> Result<IndexCode, CodecError> {
    if !fits(m, g)? {
        return Err(CodecError::NotFitting);
    }
    IndexCode::linear(g.order(), row_space_basis(m.rows()))
}

/// General code sending each tuple's colour in binary.
pub fn code_from_coloring(cg: &ConfusionGraph, col: &Coloring) -> Result<IndexCode, CodecError> {
    if !col.is_proper(cg) {
        return Err(CodecError::ImproperColoring);
    }
    let len = ceil_log2(col.num_colors());
    let table = col.colors().iter().map(|&c| c as u64).collect();
    IndexCode::general(cg.messages(), len, table)
}
