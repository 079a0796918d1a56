//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on a verification violation, 2 on usage or
//! input errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codec::is_valid_code;
use crate::graph::{parse_digraph, Category, Digraph};
use crate::verify::{
    analyze, check_monotonicity, check_structural_conditions, gap_records, lemma_mais2_holds,
    maximal_gap_classes, maximal_gap_classes_by_category, sweep, write_report, Coverage,
    SweepOptions, VerificationRecord, MAX_EXACT_ORDER, REPORT_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Samples drawn for the five-vertex monotonicity check.
pub const MONOTONICITY_SAMPLES: usize = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "indexcode",
    version,
    about = "Optimal zero-error index codes for small side-information graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bounds, optimal codelength and a code witness for one graph.
    Analyze(GraphArgs),
    /// Exhaustive sweep over all classes up to a given order.
    Verify(VerifyArgs),
    /// Print an optimal code and check every receiver decodes.
    FindCode(GraphArgs),
    /// Undirected girth and cycle category.
    Classify(GraphArgs),
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[command(flatten)]
    pub input: InputSource,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct InputSource {
    /// Graph file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Inline graph text, e.g. "n 3 ; 1-2 2->3".
    #[arg(long)]
    pub graph: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Largest order swept (at most 5).
    #[arg(long, default_value_t = MAX_EXACT_ORDER as u8, value_parser = clap::value_parser!(u8).range(1..=MAX_EXACT_ORDER as i64))]
    pub max_n: u8,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append-only record cache reused across runs.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Ignore and rewrite the cache.
    #[arg(long)]
    pub force: bool,
    /// Seed for the sampled five-vertex monotonicity check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<'a, I, S>(args: I, out: &'a mut dyn Write, err: &'a mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(if code == 0 { out } else { err }, "{}", e.render());
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, out, err),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::FindCode(a) => cmd_find_code(a, out, err),
        Command::Classify(a) => cmd_classify(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn read_graph(src: &InputSource) -> Result<Digraph, Failure> {
    let text = match (&src.input, &src.graph) {
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| Failure(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?,
        (None, Some(text)) => text.clone(),
        _ => {
            return Err(Failure(
                EXIT_USAGE,
                "give exactly one of --input or --graph".into(),
            ))
        }
    };
    parse_digraph(&text).map_err(|e| Failure(EXIT_USAGE, format!("invalid graph: {e}")))
}

fn print_record(
    r: &VerificationRecord,
    format: Format,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{REPORT_HEADER}")?;
            writeln!(out, "{}", r.to_line())
        }
        Format::Human => {
            let ell = r
                .ell_star
                .map_or("not computed".to_string(), |l| l.to_string());
            writeln!(out, "graph: {}", r.graph)?;
            writeln!(out, "canonical_key: {:x}", r.key.code)?;
            writeln!(out, "arcs: {} edges: {}", r.arcs, r.edges)?;
            writeln!(
                out,
                "mais={} minrank={} ell_star={}",
                r.mais, r.minrank, ell
            )?;
            writeln!(out, "gap: {}", if r.gap { "yes" } else { "no" })?;
            if let Some(c) = r.category {
                writeln!(out, "category: {}", c.number())?;
            }
            if let Some(chi) = r.chromatic {
                writeln!(out, "chromatic: {chi}")?;
            }
            writeln!(
                out,
                "code ({}, {} bits):",
                if r.code.is_linear() {
                    "linear"
                } else {
                    "general"
                },
                r.code.len()
            )?;
            for line in r.code.to_lines() {
                writeln!(out, "  {line}")?;
            }
            Ok(())
        }
    }
}

fn cmd_analyze(a: &GraphArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let g = read_graph(&a.input)?;
    if g.order() > MAX_EXACT_ORDER {
        writeln!(
            err,
            "warning: {} vertices exceeds {MAX_EXACT_ORDER}; reporting bounds only",
            g.order()
        )?;
    }
    let r = analyze(&g)?;
    print_record(&r, a.format, out)?;
    Ok(EXIT_OK)
}

fn cmd_find_code(a: &GraphArgs, out: &mut dyn Write, _err: &mut dyn Write) -> Result<i32, Failure> {
    let g = read_graph(&a.input)?;
    if g.order() > MAX_EXACT_ORDER {
        return Err(Failure(
            EXIT_USAGE,
            format!("exact code search supports at most {MAX_EXACT_ORDER} vertices"),
        ));
    }
    let r = analyze(&g)?;
    let tables = is_valid_code(&g, &r.code)?.ok_or_else(|| {
        Failure(
            EXIT_VIOLATION,
            "internal error: code witness does not decode".into(),
        )
    })?;
    match a.format {
        Format::Csv => {
            for line in r.code.to_lines() {
                writeln!(out, "{line}")?;
            }
        }
        Format::Human => {
            writeln!(
                out,
                "{} code of length {} (ell_star={} minrank={}):",
                if r.code.is_linear() {
                    "linear"
                } else {
                    "general"
                },
                r.code.len(),
                r.ell_star.unwrap_or(0),
                r.minrank
            )?;
            for line in r.code.to_lines() {
                writeln!(out, "  {line}  {}", describe_row(&line))?;
            }
            for t in &tables {
                let known: Vec<String> = (0..g.order())
                    .filter(|j| t.priors >> j & 1 == 1)
                    .map(|j| format!("x{}", j + 1))
                    .collect();
                writeln!(
                    out,
                    "receiver {} decodes x{} from the codeword and {{{}}}: ok",
                    t.receiver + 1,
                    t.receiver + 1,
                    known.join(",")
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// `1011` reads as `x1+x3+x4` (XOR); general-code lines are left alone.
fn describe_row(line: &str) -> String {
    if line.contains(' ') {
        return String::new();
    }
    let terms: Vec<String> = line
        .chars()
        .enumerate()
        .filter(|&(_, c)| c == '1')
        .map(|(k, _)| format!("x{}", k + 1))
        .collect();
    format!("= {}", terms.join(" + "))
}

fn cmd_classify(a: &GraphArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let g = read_graph(&a.input)?;
    let girth = g.undirected_girth();
    let category = Category::from_girth(girth);
    let girth_text = girth.map_or("none".to_string(), |k| k.to_string());
    let case = (g.order() == 5 && crate::bounds::mais(&g) == 2).then(|| category.clone());
    match a.format {
        Format::Csv => {
            writeln!(out, "girth,category,five_vertex_mais2")?;
            writeln!(
                out,
                "{},{},{}",
                girth.unwrap_or(0),
                category.as_ref().map_or(0, |c| c.number()),
                u8::from(case.is_some())
            )?;
        }
        Format::Human => {
            writeln!(out, "girth: {girth_text}")?;
            match &category {
                Ok(c) => writeln!(out, "category: {c}")?,
                Err(e) => writeln!(err, "warning: {e}")?,
            }
            if let Some(Ok(c)) = case {
                writeln!(out, "five-vertex mais=2 case: {}", c.number())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify<'a>(
    a: &VerifyArgs,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
) -> Result<i32, Failure> {
    let max_n = usize::from(a.max_n);
    let opts = SweepOptions {
        max_n,
        jobs: a.jobs,
        cache: a.cache.clone(),
        force: a.force,
    };
    let s = sweep(&opts)?;
    if let Some(path) = &a.out {
        write_report(path, &s.records)?;
    }
    // csv without --out puts the report on stdout and the summary on stderr
    let log: &mut dyn Write = if a.format == Format::Csv && a.out.is_none() {
        write!(out, "{}", s.report())?;
        err
    } else {
        out
    };
    write!(log, "{}", s.summary)?;

    let mut checks: Vec<(&str, bool)> = vec![("lemma_mais2", lemma_mais2_holds(&s.records))];
    let gaps = gap_records(&s.records);
    let gap_shape = gaps.iter().all(|r| {
        r.order() == 5
            && r.mais == 2
            && r.ell_star == Some(3)
            && r.minrank == 3
            && r.code.len() == 3
    });
    checks.push(("gap_shape", gap_shape));
    let mons = (1..=max_n.min(4))
        .map(|n| {
            let recs: Vec<_> = s.order(n).cloned().collect();
            check_monotonicity(n, Coverage::Exhaustive, &recs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    checks.push(("monotone_exhaustive", mons.iter().all(|m| m.passed())));
    if max_n == 5 {
        let five: Vec<_> = s.order(5).cloned().collect();
        let structural = check_structural_conditions(&five)?;
        checks.push((
            "four_subsets_have_edge",
            structural.edgeless_four_subsets.is_empty(),
        ));
        checks.push(("triples_have_cycle", structural.acyclic_triples.is_empty()));
        checks.push((
            "girth3_girth4_two_bits",
            structural.category_failures.is_empty(),
        ));
        let sampled = check_monotonicity(
            5,
            Coverage::Sampled {
                seed: a.seed,
                samples: MONOTONICITY_SAMPLES,
            },
            &five,
        )?;
        checks.push(("monotone_sampled_n5", sampled.passed()));
        let describe = |r: &VerificationRecord| {
            let girth = r
                .graph
                .undirected_girth()
                .map_or("none".to_string(), |g| g.to_string());
            format!(
                "{} girth={girth} edges={} arcs={}",
                r.graph, r.edges, r.arcs
            )
        };
        for r in maximal_gap_classes(&gaps) {
            writeln!(log, "maximal_gap: {}", describe(&r))?;
        }
        for r in maximal_gap_classes_by_category(&gaps) {
            writeln!(log, "maximal_gap_in_category: {}", describe(&r))?;
        }
    }
    for (name, ok) in &checks {
        writeln!(log, "check {name}: {}", if *ok { "pass" } else { "FAIL" })?;
    }
    if let Some(key) = s.summary.violations.first() {
        writeln!(log, "violation: class {:x} on {} vertices", key.code, key.n)?;
        return Ok(EXIT_VIOLATION);
    }
    if checks.iter().any(|(_, ok)| !ok) {
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}
