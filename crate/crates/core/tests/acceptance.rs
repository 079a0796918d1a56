//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use indexcode::bounds::minrank;
use indexcode::codec::{
    code_from_coloring, is_valid_code, linear_code_from_matrix, IndexCode, Word,
};
use indexcode::confusion::{build_confusion, chromatic_number};
use indexcode::graph::{
    all_labeled, all_permutations, enumerate_nonisomorphic, parse_digraph, Category, Digraph,
};
use indexcode::verify::{
    analyze, check_monotonicity, check_structural_conditions, gap_records, lemma_mais2_holds,
    maximal_gap_classes, maximal_gap_classes_by_category, report_string, sweep, Coverage, Sweep,
    SweepOptions, VerificationRecord,
};
use std::process::ExitCode;
use std::time::Instant;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pairwise_class_count(n: usize) -> usize {
    let perms = all_permutations(n);
    let mut reps: Vec<Digraph> = Vec::new();
    for g in all_labeled(n).unwrap() {
        let iso = |r: &Digraph| perms.iter().any(|p| r.permuted(p) == g);
        if !reps.iter().any(iso) {
            reps.push(g);
        }
    }
    reps.len()
}

fn enumeration_counts() -> Outcome {
    let counts: Vec<usize> = (1..=5)
        .map(|n| enumerate_nonisomorphic(n).unwrap().count())
        .collect();
    let oracle: Vec<usize> = (1..=4).map(pairwise_class_count).collect();
    let universe = all_labeled(5).unwrap().count();
    let pass = counts == [1, 3, 16, 218, 9608] && oracle == counts[..4] && universe == 1_048_576;
    outcome(
        pass,
        format!("classes {counts:?} (expected [1, 3, 16, 218, 9608]), pairwise oracle n<=4 {oracle:?}, labeled n=5 {universe} (expected 1048576); exact"),
    )
}

fn sweep_equality(s: &Sweep) -> Outcome {
    let violations = s
        .records
        .iter()
        .filter(|r| r.ell_star != Some(r.minrank))
        .count();
    let pass = s.records.len() == 9846 && violations == 0 && s.summary.violations.is_empty();
    outcome(
        pass,
        format!("{} classes checked (expected 9846), ell_star != minrank on {violations} (expected 0); exact", s.records.len()),
    )
}

fn high_mais_rule(s: &Sweep) -> Outcome {
    let covered = s.records.iter().filter(|r| r.mais + 2 >= r.order()).count();
    outcome(
        lemma_mais2_holds(&s.records),
        format!("{covered} classes with mais >= n-2 all have ell_star = mais; exact"),
    )
}

fn describe(r: &VerificationRecord) -> String {
    let girth = r
        .graph
        .undirected_girth()
        .map_or("none".into(), |g| g.to_string());
    format!(
        "[{} | girth {girth}, {} edges, {} arcs]",
        r.graph, r.edges, r.arcs
    )
}

fn gap_structure(s: &Sweep) -> Outcome {
    let gaps = gap_records(&s.records);
    let shape_ok = !gaps.is_empty()
        && gaps
            .iter()
            .all(|r| (r.order(), r.mais, r.ell_star, r.minrank) == (5, 2, Some(3), 3));
    let maximal = maximal_gap_classes(&gaps);
    let acyclic_four = maximal
        .iter()
        .any(|r| r.graph.undirected_girth().is_none() && r.edges == 4);
    let pentagon = maximal
        .iter()
        .any(|r| r.graph.undirected_girth() == Some(5));
    let pass = shape_ok && maximal.len() == 2 && acyclic_four && pentagon;
    let per_category = maximal_gap_classes_by_category(&gaps);
    outcome(
        pass,
        format!(
            "{} gap classes, shape (n=5, mais=2, ell_star=3, minrank=3) {}; maximal under arc-deleted embedding: found {} (expected 2) {}; \
             girth-none four-edge maximal class present: {acyclic_four}; pentagon-based maximal class present: {pentagon}; \
             maximal within each girth category (informational): {} {}; exact",
            gaps.len(),
            if shape_ok { "holds" } else { "violated" },
            maximal.len(),
            maximal.iter().map(describe).collect::<Vec<_>>().join(" "),
            per_category.len(),
            per_category.iter().map(describe).collect::<Vec<_>>().join(" "),
        ),
    )
}

fn five_vertex_records(s: &Sweep) -> Vec<VerificationRecord> {
    s.order(5).cloned().collect()
}

fn category_claims(s: &Sweep) -> Outcome {
    let five = five_vertex_records(s);
    let report = check_structural_conditions(&five).unwrap();
    let checked = five
        .iter()
        .filter(|r| matches!(r.category, Some(Category::Girth3 | Category::Girth4)))
        .count();
    outcome(
        report.category_failures.is_empty() && checked > 0,
        format!(
            "{checked} five-vertex mais=2 classes with undirected girth 3 or 4, {} without a two-bit code (expected 0); exact",
            report.category_failures.len()
        ),
    )
}

fn subset_conditions(s: &Sweep) -> Outcome {
    let report = check_structural_conditions(&five_vertex_records(s)).unwrap();
    outcome(
        report.edgeless_four_subsets.is_empty() && report.acyclic_triples.is_empty() && report.classes_checked > 0,
        format!(
            "{} five-vertex mais=2 classes, {} with an edgeless 4-subset, {} with an acyclic 3-subset (expected 0, 0); exact",
            report.classes_checked,
            report.edgeless_four_subsets.len(),
            report.acyclic_triples.len()
        ),
    )
}

fn monotonicity(s: &Sweep) -> Outcome {
    let mut pairs = 0;
    let mut bad = 0;
    for n in 1..=4 {
        let r = check_monotonicity(n, Coverage::Exhaustive, &s.records).unwrap();
        pairs += r.pairs_checked;
        bad += r.violations.len();
    }
    let sampled = check_monotonicity(
        5,
        Coverage::Sampled {
            seed: 0,
            samples: 10_000,
        },
        &s.records,
    )
    .unwrap();
    outcome(
        bad == 0 && sampled.passed() && sampled.pairs_checked == 10_000,
        format!(
            "exhaustive n<=4: {pairs} (graph, added arc) pairs, {bad} increases; sampled n=5 (seed 0): {} pairs, {} increases; expected 0 increases, exact",
            sampled.pairs_checked,
            sampled.violations.len()
        ),
    )
}

fn separates_confusable(g: &Digraph, c: &IndexCode) -> bool {
    let cg = build_confusion(g).unwrap();
    let n = g.order();
    let enc: Vec<u64> = (0..1u64 << n)
        .map(|x| c.encode(Word::new(x, n)).unwrap().bits)
        .collect();
    (0..enc.len()).all(|u| (u + 1..enc.len()).all(|v| !cg.adjacent(u, v) || enc[u] != enc[v]))
}

fn codes_up_to(n: usize) -> Vec<IndexCode> {
    let mut codes = Vec::new();
    let vectors: Vec<u64> = (1..1u64 << n).collect();
    for pick in 0u64..1 << vectors.len() {
        let rows: Vec<u64> = (0..vectors.len())
            .filter(|k| pick >> k & 1 == 1)
            .map(|k| vectors[k])
            .collect();
        if let Ok(c) = IndexCode::linear(n, rows) {
            codes.push(c);
        }
    }
    let size = 1usize << n;
    for len in 0..=n.min(2) {
        let base = 1u64 << len;
        for mut idx in 0..base.pow(size as u32) {
            let table = (0..size)
                .map(|_| {
                    let w = idx % base;
                    idx /= base;
                    w
                })
                .collect();
            codes.push(IndexCode::general(n, len, table).unwrap());
        }
    }
    codes
}

fn codec_soundness() -> Outcome {
    let mut witnesses = 0;
    let mut witness_failures = 0;
    for n in 1..=4 {
        for g in all_labeled(n).unwrap() {
            let code = linear_code_from_matrix(&g, &minrank(&g).1).unwrap();
            witnesses += 1;
            if is_valid_code(&g, &code).unwrap().is_none() {
                witness_failures += 1;
            }
        }
    }
    let mut pairs = 0u64;
    let mut mismatches = 0u64;
    for n in 1..=3 {
        let codes = codes_up_to(n);
        for g in all_labeled(n).unwrap() {
            for c in &codes {
                pairs += 1;
                if is_valid_code(&g, c).unwrap().is_some() != separates_confusable(&g, c) {
                    mismatches += 1;
                }
            }
            let cg = build_confusion(&g).unwrap();
            let colored = code_from_coloring(&cg, &chromatic_number(&cg).1).unwrap();
            pairs += 1;
            if is_valid_code(&g, &colored).unwrap().is_none() {
                mismatches += 1;
            }
        }
    }
    outcome(
        witness_failures == 0 && mismatches == 0,
        format!(
            "{witnesses} labeled n<=4 minrank witnesses, {witness_failures} invalid; {pairs} (graph, code) pairs n<=3, \
             {mismatches} where validity and proper colouring disagree; expected 0, 0, exact"
        ),
    )
}

fn spot_values() -> Outcome {
    let cases = [
        ("fig1", "n 4 ; 1-2 2-3 1-3 2->4 4->1", (2, 2, 2)),
        ("complete4", "n 4 ; 1-2 1-3 1-4 2-3 2-4 3-4", (1, 1, 1)),
        (
            "complete5",
            "n 5 ; 1-2 1-3 1-4 1-5 2-3 2-4 2-5 3-4 3-5 4-5",
            (1, 1, 1),
        ),
        ("pentagon", "n 5 ; 1-3 3-5 5-2 2-4 4-1", (2, 3, 3)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, text, expected) in cases {
        let r = analyze(&parse_digraph(text).unwrap()).unwrap();
        let found = (r.mais, r.minrank, r.ell_star.unwrap_or(0));
        pass &= found == expected;
        parts.push(format!("{name} {found:?} (expected {expected:?})"));
    }
    outcome(
        pass,
        format!("(mais, minrank, ell_star): {}; exact", parts.join(", ")),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for jobs in [1, 4] {
        let mut opts = SweepOptions::new(5);
        opts.jobs = jobs;
        let path = dir.path().join(format!("report-{jobs}.csv"));
        std::fs::write(&path, report_string(&sweep(&opts).unwrap().records)).unwrap();
        files.push(std::fs::read(&path).unwrap());
    }
    outcome(
        files[0] == files[1],
        format!(
            "reports with 1 and 4 workers: {} and {} bytes, identical: {}; exact",
            files[0].len(),
            files[1].len(),
            files[0] == files[1]
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let full = sweep(&SweepOptions::new(5)).expect("full sweep");
    println!("full sweep over n <= 5 finished in {:.1?}", start.elapsed());

    let criteria: Vec<(&str, Check)> = vec![
        ("enumeration counts", Box::new(enumeration_counts)),
        (
            "optimal length equals minrank",
            Box::new(|| sweep_equality(&full)),
        ),
        (
            "high-mais classes meet the bound",
            Box::new(|| high_mais_rule(&full)),
        ),
        ("gap structure", Box::new(|| gap_structure(&full))),
        (
            "girth 3/4 classes have two-bit codes",
            Box::new(|| category_claims(&full)),
        ),
        (
            "subset conditions at mais 2",
            Box::new(|| subset_conditions(&full)),
        ),
        (
            "monotone under arc addition",
            Box::new(|| monotonicity(&full)),
        ),
        ("codec soundness", Box::new(codec_soundness)),
        ("spot values", Box::new(spot_values)),
        ("sweep determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "[criterion {}] {} {name}: {} ({:.1?})",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
