//! Exhaustive verification over all small side-information graphs.
//!
//! Every isomorphism class up to five vertices is analyzed: both general
//! bounds, the exact optimal codelength, and an optimal code witness. The
//! sweep then checks that linear codes are optimal on each class, along with
//! the structural facts about the five-vertex, two-bit-bound classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{mais, minrank_from};
use crate::codec::{
    code_from_coloring, is_valid_code, linear_code_from_matrix, CodecError, IndexCode,
};
use crate::confusion::{build_confusion, ceil_log2, chromatic_number, ell_star, ConfusionError};
use crate::graph::{
    all_labeled, all_permutations, enumerate_nonisomorphic, position_count, CanonicalKey, Category,
    Digraph, GraphError, MAX_ENUMERATION_ORDER,
};

/// Largest order for which the optimal codelength is computed exactly.
pub const MAX_EXACT_ORDER: usize = 5;

/// Column header of report and cache files.
pub const REPORT_HEADER: &str =
    "canonical_key,n,arcs,edges,mais,minrank,ell_star,gap,category,chromatic,code";

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Confusion(#[from] ConfusionError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed record on line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("violation: optimal codelength differs from minrank on class {key:x} (n = {n})", key = .key.code, n = .key.n)]
    Violation { key: CanonicalKey },
    #[error("{0}")]
    Unsupported(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> VerifyError + '_ {
    move |source| VerifyError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Everything computed for one side-information graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationRecord {
    pub key: CanonicalKey,
    /// The analyzed labeling; the code witness refers to it.
    pub graph: Digraph,
    pub arcs: usize,
    pub edges: usize,
    pub mais: usize,
    pub minrank: usize,
    /// `None` for graphs too large for the exact search.
    pub ell_star: Option<usize>,
    /// Only set for five-vertex graphs whose acyclic bound is two.
    pub category: Option<Category>,
    pub gap: bool,
    pub chromatic: Option<usize>,
    pub code: IndexCode,
}

impl VerificationRecord {
    pub fn order(&self) -> usize {
        self.key.n
    }

    /// Comma-separated report line, matching [`REPORT_HEADER`].
    pub fn to_line(&self) -> String {
        format!(
            "{:x},{},{},{},{},{},{},{},{},{},{}",
            self.key.code,
            self.key.n,
            self.arcs,
            self.edges,
            self.mais,
            self.minrank,
            self.ell_star.unwrap_or(0),
            u8::from(self.gap),
            self.category.map_or(0, Category::number),
            self.chromatic.unwrap_or(0),
            self.code.to_lines().join(";"),
        )
    }

    /// Parses a report line. The graph is rebuilt from the canonical key.
    pub fn parse_line(line: &str, lineno: usize) -> Result<Self, VerifyError> {
        let bad = |message: String| VerifyError::MalformedRecord {
            line: lineno,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(bad(format!("expected 11 fields, found {}", fields.len())));
        }
        let num = |k: usize| -> Result<usize, VerifyError> {
            fields[k].parse().map_err(|_| {
                bad(format!(
                    "field {} is not an integer: `{}`",
                    k + 1,
                    fields[k]
                ))
            })
        };
        let code = u64::from_str_radix(fields[0], 16)
            .map_err(|_| bad(format!("bad key `{}`", fields[0])))?;
        let n = num(1)?;
        let graph = Digraph::from_labeled_code(n, code)?;
        let key = CanonicalKey { n, code };
        let ell = num(6)?;
        let category = match num(8)? {
            0 => None,
            k => Some(
                Category::from_number(k as u8).ok_or_else(|| bad(format!("bad category {k}")))?,
            ),
        };
        let chromatic = num(9)?;
        let rows: Vec<&str> = if fields[10].is_empty() {
            Vec::new()
        } else {
            fields[10].split(';').collect()
        };
        Ok(VerificationRecord {
            key,
            graph,
            arcs: num(2)?,
            edges: num(3)?,
            mais: num(4)?,
            minrank: num(5)?,
            ell_star: (n <= MAX_EXACT_ORDER).then_some(ell),
            category,
            gap: match fields[7] {
                "0" => false,
                "1" => true,
                other => return Err(bad(format!("bad gap flag `{other}`"))),
            },
            chromatic: (chromatic != 0).then_some(chromatic),
            code: IndexCode::from_lines(n, &rows)?,
        })
    }
}

/// Computes bounds, the optimal codelength and a code witness for `g`.
///
/// Graphs above [`MAX_EXACT_ORDER`] vertices get bounds only, with the
/// minrank code as witness.
pub fn analyze(g: &Digraph) -> Result<VerificationRecord, VerifyError> {
    let n = g.order();
    let lower = mais(g);
    let (upper, witness) = minrank_from(g, lower);
    let linear = linear_code_from_matrix(g, &witness)?;

    let (ell, chromatic, code) = if n > MAX_EXACT_ORDER {
        (None, None, linear)
    } else if lower == upper {
        (Some(lower), None, linear)
    } else {
        let cg = build_confusion(g)?;
        let (chi, coloring) = chromatic_number(&cg);
        let ell = ceil_log2(chi);
        let code = if ell == upper {
            linear
        } else {
            code_from_coloring(&cg, &coloring)?
        };
        (Some(ell), Some(chi), code)
    };

    Ok(VerificationRecord {
        key: g.canonical_key(),
        graph: *g,
        arcs: g.arc_count(),
        edges: g.edge_count(),
        mais: lower,
        minrank: upper,
        ell_star: ell,
        category: if n == 5 && lower == 2 {
            g.categorize().ok()
        } else {
            None
        },
        gap: ell.is_some_and(|l| l > lower),
        chromatic,
        code,
    })
}

/// Per-order totals of a sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSummary {
    /// Isomorphism classes for n = 1, 2, ...
    pub classes: Vec<usize>,
    /// Labeled graphs for n = 1, 2, ...
    pub labeled: Vec<u64>,
    pub gap_graphs: usize,
    pub maximal_gap_graphs: usize,
    /// Maximal gap classes when each girth category is taken on its own.
    pub maximal_gap_graphs_by_category: usize,
    /// Classes where the optimal codelength differs from minrank.
    pub violations: Vec<CanonicalKey>,
}

impl SweepSummary {
    pub fn total_classes(&self) -> usize {
        self.classes.iter().sum()
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> = self.classes.iter().map(|c| c.to_string()).collect();
        writeln!(
            f,
            "classes: {}; violations: {}",
            counts.join(","),
            self.violations.len()
        )?;
        for (k, (c, l)) in self.classes.iter().zip(&self.labeled).enumerate() {
            writeln!(f, "classes(n={}): {c}", k + 1)?;
            writeln!(f, "labeled(n={}): {l}", k + 1)?;
        }
        writeln!(f, "total_classes: {}", self.total_classes())?;
        writeln!(f, "gap_graphs: {}", self.gap_graphs)?;
        writeln!(f, "maximal_gap_graphs: {}", self.maximal_gap_graphs)?;
        writeln!(
            f,
            "maximal_gap_graphs_by_category: {}",
            self.maximal_gap_graphs_by_category
        )?;
        for key in &self.violations {
            writeln!(f, "violation: n={} key={:x}", key.n, key.code)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub max_n: usize,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub cache: Option<PathBuf>,
    /// Recompute everything and rewrite the cache.
    pub force: bool,
}

impl SweepOptions {
    pub fn new(max_n: usize) -> Self {
        SweepOptions {
            max_n,
            jobs: 0,
            cache: None,
            force: false,
        }
    }
}

/// Records for every class up to `max_n`, ordered by key, with the summary.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub records: Vec<VerificationRecord>,
    pub summary: SweepSummary,
}

impl Sweep {
    pub fn order(&self, n: usize) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(move |r| r.order() == n)
    }

    pub fn report(&self) -> String {
        report_string(&self.records)
    }
}

/// Analyzes every isomorphism class up to `opts.max_n`.
///
/// Classes are analyzed in parallel and merged in key order, so the result
/// does not depend on the worker count. With a cache path, previously stored
/// records are reused and new ones appended.
pub fn sweep(opts: &SweepOptions) -> Result<Sweep, VerifyError> {
    if opts.max_n == 0 || opts.max_n > MAX_EXACT_ORDER {
        return Err(VerifyError::Unsupported(format!(
            "sweep order must be in 1..={MAX_EXACT_ORDER}, got {}",
            opts.max_n
        )));
    }
    let cached = match &opts.cache {
        Some(path) if !opts.force => load_records(path)?,
        _ => BTreeMap::new(),
    };
    let writer = match &opts.cache {
        Some(path) => Some(Mutex::new(open_cache(
            path,
            opts.force || cached.is_empty(),
        )?)),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| VerifyError::Unsupported(format!("cannot start worker pool: {e}")))?;

    let mut records = Vec::new();
    let mut classes = Vec::new();
    for n in 1..=opts.max_n {
        let reps: Vec<Digraph> = enumerate_nonisomorphic(n)?.collect();
        classes.push(reps.len());
        let fresh: Vec<VerificationRecord> = pool.install(|| {
            reps.par_iter()
                .map(|g| match cached.get(&g.canonical_key()) {
                    Some(r) => Ok(r.clone()),
                    None => {
                        let r = analyze(g)?;
                        if let Some(w) = &writer {
                            let mut w = w.lock().expect("cache writer poisoned");
                            writeln!(w, "{}", r.to_line())
                                .map_err(io_err(opts.cache.as_deref().unwrap()))?;
                        }
                        Ok(r)
                    }
                })
                .collect::<Result<_, VerifyError>>()
        })?;
        records.extend(fresh);
    }
    if let (Some(w), Some(path)) = (writer, &opts.cache) {
        w.into_inner()
            .expect("cache writer poisoned")
            .flush()
            .map_err(io_err(path))?;
    }

    let violations = records
        .iter()
        .filter(|r| r.ell_star != Some(r.minrank))
        .map(|r| r.key)
        .collect();
    let gaps = gap_records(&records);
    let maximal = maximal_gap_classes(&gaps);
    let summary = SweepSummary {
        labeled: (1..=opts.max_n)
            .map(|n| 1u64 << position_count(n))
            .collect(),
        classes,
        gap_graphs: gaps.len(),
        maximal_gap_graphs: maximal.len(),
        maximal_gap_graphs_by_category: maximal_gap_classes_by_category(&gaps).len(),
        violations,
    };
    Ok(Sweep { records, summary })
}

/// Sweeps all classes up to `max_n` and fails on the first class where the
/// optimal codelength differs from minrank.
pub fn verify_theorem(max_n: usize) -> Result<SweepSummary, VerifyError> {
    let s = sweep(&SweepOptions::new(max_n))?;
    match s.summary.violations.first() {
        Some(&key) => Err(VerifyError::Violation { key }),
        None => Ok(s.summary),
    }
}

/// Analyzes the classes of a single order.
pub fn sweep_order(n: usize) -> Result<Vec<VerificationRecord>, VerifyError> {
    if n == 0 || n > MAX_EXACT_ORDER {
        return Err(VerifyError::Unsupported(format!(
            "order {n} outside 1..={MAX_EXACT_ORDER}"
        )));
    }
    let reps: Vec<Digraph> = enumerate_nonisomorphic(n)?.collect();
    reps.par_iter().map(analyze).collect()
}

fn open_cache(path: &Path, truncate: bool) -> Result<BufWriter<File>, VerifyError> {
    let file = if truncate {
        File::create(path)
    } else {
        OpenOptions::new().append(true).open(path)
    }
    .map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    if truncate {
        writeln!(w, "{REPORT_HEADER}").map_err(io_err(path))?;
    }
    Ok(w)
}

/// Reads a report or cache file. A missing file yields no records.
pub fn load_records(
    path: &Path,
) -> Result<BTreeMap<CanonicalKey, VerificationRecord>, VerifyError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let mut out = BTreeMap::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.is_empty() || line == REPORT_HEADER {
            continue;
        }
        let r = VerificationRecord::parse_line(&line, k + 1)?;
        out.insert(r.key, r);
    }
    Ok(out)
}

/// Header plus one line per record.
pub fn report_string(records: &[VerificationRecord]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(REPORT_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.to_line());
        s.push('\n');
    }
    s
}

pub fn write_report(path: &Path, records: &[VerificationRecord]) -> Result<(), VerifyError> {
    std::fs::write(path, report_string(records)).map_err(io_err(path))
}

/// Records whose optimal codelength exceeds the acyclic-subgraph bound.
pub fn gap_records(records: &[VerificationRecord]) -> Vec<VerificationRecord> {
    records.iter().filter(|r| r.gap).cloned().collect()
}

/// All gap classes on `n` vertices, in key order.
pub fn find_gap_graphs(n: usize) -> Result<Vec<VerificationRecord>, VerifyError> {
    Ok(gap_records(&sweep_order(n)?))
}

/// A relabeling `perm` such that `sub.permuted(perm)` is an arc-deleted subgraph of `sup`.
pub fn arc_deleted_embedding(sub: &Digraph, sup: &Digraph) -> Option<Vec<usize>> {
    if sub.order() != sup.order() || sub.arc_count() > sup.arc_count() {
        return None;
    }
    all_permutations(sub.order())
        .into_iter()
        .find(|p| sub.permuted(p).is_arc_subgraph_of(sup))
}

/// Gap classes that are not isomorphic to a proper arc-deleted subgraph of another gap class.
pub fn maximal_gap_classes(gaps: &[VerificationRecord]) -> Vec<VerificationRecord> {
    gaps.iter()
        .filter(|g| {
            !gaps.iter().any(|h| {
                h.order() == g.order()
                    && h.arcs > g.arcs
                    && arc_deleted_embedding(&g.graph, &h.graph).is_some()
            })
        })
        .cloned()
        .collect()
}

/// Maximal gap classes computed separately inside each undirected-girth category,
/// so a class only competes with gap classes of the same category.
pub fn maximal_gap_classes_by_category(gaps: &[VerificationRecord]) -> Vec<VerificationRecord> {
    let mut groups: BTreeMap<Option<usize>, Vec<VerificationRecord>> = BTreeMap::new();
    for r in gaps {
        groups
            .entry(r.graph.undirected_girth())
            .or_default()
            .push(r.clone());
    }
    groups
        .values()
        .flat_map(|g| maximal_gap_classes(g))
        .collect()
}

/// True iff every class with `mais >= n - 2` has optimal codelength equal to `mais`.
pub fn lemma_mais2_holds(records: &[VerificationRecord]) -> bool {
    records
        .iter()
        .filter(|r| r.mais + 2 >= r.order())
        .all(|r| r.ell_star == Some(r.mais))
}

pub fn check_lemma_mais2(max_n: usize) -> Result<bool, VerifyError> {
    Ok(lemma_mais2_holds(
        &sweep(&SweepOptions::new(max_n))?.records,
    ))
}

/// Outcome of the structural checks on five-vertex classes with `mais = 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructuralReport {
    pub classes_checked: usize,
    /// Classes with some 4-subset inducing no edge.
    pub edgeless_four_subsets: Vec<CanonicalKey>,
    /// Classes with some 3-subset inducing an acyclic graph.
    pub acyclic_triples: Vec<CanonicalKey>,
    /// Girth-3 or girth-4 classes whose optimal codelength is not two.
    pub category_failures: Vec<CanonicalKey>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.edgeless_four_subsets.is_empty()
            && self.acyclic_triples.is_empty()
            && self.category_failures.is_empty()
    }
}

/// Checks the five-vertex `mais = 2` classes: every 4-subset induces an edge,
/// every 3-subset induces a directed cycle, and girth 3 or 4 implies codelength two.
pub fn check_structural_conditions(
    records: &[VerificationRecord],
) -> Result<StructuralReport, VerifyError> {
    if let Some(r) = records.iter().find(|r| r.order() != 5) {
        return Err(VerifyError::Unsupported(format!(
            "structural checks need five-vertex records, got a record with n = {}",
            r.order()
        )));
    }
    let mut report = StructuralReport::default();
    for r in records.iter().filter(|r| r.mais == 2) {
        report.classes_checked += 1;
        let g = &r.graph;
        let subsets = |size: u32| (0u32..32).filter(move |m| m.count_ones() == size);
        if subsets(4).any(|m| !(0..5).any(|v| m >> v & 1 == 1 && g.edge_mask(v) & m != 0)) {
            report.edgeless_four_subsets.push(r.key);
        }
        if subsets(3).any(|m| g.is_acyclic_on(m)) {
            report.acyclic_triples.push(r.key);
        }
        if matches!(r.category, Some(Category::Girth3 | Category::Girth4)) && r.ell_star != Some(2)
        {
            report.category_failures.push(r.key);
        }
    }
    Ok(report)
}

/// Which (graph, added arc) pairs a monotonicity check visits.
#[derive(Clone, Copy, Debug)]
pub enum Coverage {
    /// Every labeled graph with every absent arc.
    Exhaustive,
    /// Uniformly random labeled graphs, each with a random absent arc.
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub pairs_checked: usize,
    /// `(graph, graph with the added arc)` where the codelength went up.
    pub violations: Vec<(Digraph, Digraph)>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that adding one arc never increases the optimal codelength.
///
/// Codelengths come from `records` where available and are computed (and
/// memoized per class) otherwise.
pub fn check_monotonicity(
    n: usize,
    coverage: Coverage,
    records: &[VerificationRecord],
) -> Result<MonotonicityReport, VerifyError> {
    if n == 0 || n > MAX_ENUMERATION_ORDER {
        return Err(VerifyError::Unsupported(format!(
            "order {n} outside 1..={MAX_ENUMERATION_ORDER}"
        )));
    }
    let mut known: HashMap<CanonicalKey, usize> = records
        .iter()
        .filter_map(|r| r.ell_star.map(|l| (r.key, l)))
        .collect();
    let mut lookup = |g: &Digraph| -> Result<usize, VerifyError> {
        let key = g.canonical_key();
        if let Some(&l) = known.get(&key) {
            return Ok(l);
        }
        let l = ell_star(&key.graph())?;
        known.insert(key, l);
        Ok(l)
    };
    let absent = |g: &Digraph| -> Vec<(usize, usize)> {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !g.has_arc(i, j))
            .collect()
    };

    let mut report = MonotonicityReport::default();
    let mut check =
        |g: Digraph,
         (i, j): (usize, usize),
         lookup: &mut dyn FnMut(&Digraph) -> Result<usize, VerifyError>| {
            let plus = g.with_arc(i, j)?;
            report.pairs_checked += 1;
            if lookup(&plus)? > lookup(&g)? {
                report.violations.push((g, plus));
            }
            Ok::<_, VerifyError>(())
        };

    match coverage {
        Coverage::Exhaustive => {
            if n > 4 {
                return Err(VerifyError::Unsupported(
                    "exhaustive monotonicity is limited to four vertices; sample instead".into(),
                ));
            }
            for g in all_labeled(n)? {
                for arc in absent(&g) {
                    check(g, arc, &mut lookup)?;
                }
            }
        }
        Coverage::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let width = position_count(n);
            let mut done = 0;
            while done < samples {
                let g = Digraph::from_labeled_code(n, rng.random_range(0..1u64 << width))?;
                let free = absent(&g);
                if free.is_empty() {
                    continue;
                }
                let arc = free[rng.random_range(0..free.len())];
                check(g, arc, &mut lookup)?;
                done += 1;
            }
        }
    }
    Ok(report)
}

/// Re-validates a record's code witness against its graph.
pub fn witness_is_valid(r: &VerificationRecord) -> Result<bool, VerifyError> {
    Ok(is_valid_code(&r.graph, &r.code)?.is_some())
}
