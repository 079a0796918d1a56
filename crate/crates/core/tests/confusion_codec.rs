use indexcode::bounds::{fits, mais, minrank, Gf2Matrix};
use indexcode::codec::{code_from_coloring, is_valid_code, linear_code_from_matrix, IndexCode};
use indexcode::confusion::{
    build_confusion, ceil_log2, chromatic_number, ell_star, ell_star_by_coloring, is_k_colorable,
    ConfusionGraph, VertexSet,
};
use indexcode::graph::{all_labeled, enumerate_nonisomorphic, parse_digraph, Digraph};

fn small_classes(max_n: usize) -> impl Iterator<Item = Digraph> {
    (1..=max_n).flat_map(|n| enumerate_nonisomorphic(n).unwrap())
}

/// Tuples are confusable iff some receiver wants a bit where they differ and
/// sees the same known bits.
fn confusable(g: &Digraph, u: usize, v: usize) -> bool {
    (0..g.order()).any(|i| {
        (u ^ v) >> i & 1 == 1 && (0..g.order()).all(|j| !g.has_arc(i, j) || (u ^ v) >> j & 1 == 0)
    })
}

/// Sequential backtracking colouring in vertex order, no heuristics.
fn naive_colorable(cg: &ConfusionGraph, k: usize) -> bool {
    fn go(cg: &ConfusionGraph, k: usize, v: usize, used: usize, colors: &mut Vec<usize>) -> bool {
        if v == cg.order() {
            return true;
        }
        for c in 0..k.min(used + 1) {
            if (0..v).all(|u| !cg.adjacent(u, v) || colors[u] != c) {
                colors[v] = c;
                if go(cg, k, v + 1, used.max(c + 1), colors) {
                    return true;
                }
            }
        }
        false
    }
    go(cg, k, 0, 0, &mut vec![0; cg.order()])
}

fn naive_chromatic(cg: &ConfusionGraph) -> usize {
    (1..).find(|&k| naive_colorable(cg, k)).unwrap()
}

fn fibers_independent(g: &Digraph, c: &IndexCode) -> bool {
    let cg = build_confusion(g).unwrap();
    let n = g.order();
    let mut fibers: std::collections::BTreeMap<String, VertexSet> = Default::default();
    for x in 0..1usize << n {
        let t = indexcode::codec::Word::new(x as u64, n);
        fibers
            .entry(c.encode(t).unwrap().to_string())
            .or_default()
            .insert(x);
    }
    fibers.values().all(|f| cg.is_independent(f))
}

#[test]
fn adjacency_matches_definition_and_is_translation_invariant() {
    for g in small_classes(4) {
        let cg = build_confusion(&g).unwrap();
        let size = 1usize << g.order();
        assert_eq!(cg.order(), size);
        assert!(!cg.difference_set().contains(&0));
        for u in 0..size {
            assert!(!cg.neighbors(u).contains(u));
            for v in 0..size {
                assert_eq!(
                    cg.neighbors(u).contains(v),
                    confusable(&g, u, v),
                    "{g}: {u} {v}"
                );
                for w in 0..size {
                    assert_eq!(
                        cg.neighbors(u).contains(v),
                        cg.neighbors(u ^ w).contains(v ^ w)
                    );
                }
            }
        }
    }
}

#[test]
fn complete_two_vertex_confusion_graph_is_a_four_cycle() {
    let cg = build_confusion(&Digraph::complete(2).unwrap()).unwrap();
    assert_eq!(cg.difference_set(), vec![0b01, 0b10]);
    assert!((0..4).all(|v| cg.degree(v) == 2));
}

#[test]
fn chromatic_number_matches_naive_search() {
    for g in small_classes(4) {
        let cg = build_confusion(&g).unwrap();
        let (chi, col) = chromatic_number(&cg);
        assert!(col.is_proper(&cg));
        assert_eq!(col.num_colors(), chi);
        assert_eq!(chi, naive_chromatic(&cg), "{g}");
        assert!(is_k_colorable(&cg, chi - 1).is_none() || chi == 1);
    }
}

#[test]
fn pentagon_needs_more_than_four_colors() {
    let g = parse_digraph("n 5 ; 1-3 3-5 5-2 2-4 4-1").unwrap();
    let cg = build_confusion(&g).unwrap();
    assert!(!naive_colorable(&cg, 4));
    assert!(naive_colorable(&cg, 8));
    let (chi, _) = chromatic_number(&cg);
    assert!(chi > 4 && chi <= 8);
    assert_eq!(ceil_log2(chi), 3);
}

#[test]
fn shortcut_agrees_with_full_coloring() {
    for g in small_classes(4) {
        let fast = ell_star(&g).unwrap();
        assert_eq!(fast, ell_star_by_coloring(&g).unwrap(), "{g}");
        assert!(mais(&g) <= fast && fast <= minrank(&g).0);
    }
}

#[test]
fn chromatic_number_is_isomorphism_invariant() {
    for g in enumerate_nonisomorphic(3).unwrap() {
        let chi = chromatic_number(&build_confusion(&g).unwrap()).0;
        for p in indexcode::graph::all_permutations(3) {
            assert_eq!(
                chromatic_number(&build_confusion(&g.permuted(&p)).unwrap()).0,
                chi
            );
        }
    }
}

/// All linear encoders with independent rows, up to `n` rows.
fn all_linear_codes(n: usize) -> Vec<IndexCode> {
    let vectors: Vec<u64> = (1..1u64 << n).collect();
    let mut out = Vec::new();
    for pick in 0u64..1 << vectors.len() {
        if pick.count_ones() as usize > n {
            continue;
        }
        let rows: Vec<u64> = (0..vectors.len())
            .filter(|k| pick >> k & 1 == 1)
            .map(|k| vectors[k])
            .collect();
        if let Ok(c) = IndexCode::linear(n, rows) {
            out.push(c);
        }
    }
    out
}

fn all_general_codes(n: usize, len: usize) -> impl Iterator<Item = IndexCode> {
    let size = 1usize << n;
    let base = 1u64 << len;
    (0..base.pow(size as u32)).map(move |mut idx| {
        let table = (0..size)
            .map(|_| {
                let w = idx % base;
                idx /= base;
                w
            })
            .collect();
        IndexCode::general(n, len, table).unwrap()
    })
}

#[test]
fn validity_coincides_with_independent_fibers() {
    for g in small_classes(3) {
        let n = g.order();
        let mut codes = all_linear_codes(n);
        for len in 0..=n.min(2) {
            codes.extend(all_general_codes(n, len));
        }
        for c in &codes {
            let valid = is_valid_code(&g, c).unwrap().is_some();
            assert_eq!(valid, fibers_independent(&g, c), "{g} with {c:?}");
        }
    }
}

#[test]
fn every_fitting_matrix_gives_a_valid_code() {
    for g in small_classes(4) {
        let n = g.order();
        let arcs: Vec<(usize, usize)> = g.arcs().collect();
        for bits in 0u64..1 << arcs.len() {
            let mut rows: Vec<u64> = (0..n).map(|i| 1 << i).collect();
            for (k, &(i, j)) in arcs.iter().enumerate() {
                if bits >> k & 1 == 1 {
                    rows[i] |= 1 << j;
                }
            }
            let m = Gf2Matrix::from_rows(n, rows);
            assert!(fits(&m, &g).unwrap());
            let c = linear_code_from_matrix(&g, &m).unwrap();
            assert_eq!(c.len(), m.rank());
            assert!(is_valid_code(&g, &c).unwrap().is_some(), "{g} with {m:?}");
        }
    }
}

#[test]
fn codes_transfer_to_supergraphs() {
    for n in 1..=3 {
        for g in all_labeled(n).unwrap() {
            let code = linear_code_from_matrix(&g, &minrank(&g).1).unwrap();
            let cg = build_confusion(&g).unwrap();
            let coloring_code = code_from_coloring(&cg, &chromatic_number(&cg).1).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j && !g.has_arc(i, j) {
                        let plus = g.with_arc(i, j).unwrap();
                        assert!(is_valid_code(&plus, &code).unwrap().is_some());
                        assert!(is_valid_code(&plus, &coloring_code).unwrap().is_some());
                    }
                }
            }
        }
    }
}

#[test]
fn no_code_beats_the_acyclic_bound() {
    for g in small_classes(3) {
        let lower = mais(&g);
        let cg = build_confusion(&g).unwrap();
        assert!(is_k_colorable(&cg, 1 << (lower - 1)).is_none(), "{g}");
        assert!(
            all_general_codes(g.order(), lower - 1)
                .all(|c| is_valid_code(&g, &c).unwrap().is_none()),
            "{g}"
        );
    }
}

#[test]
fn coloring_codes_are_valid_and_optimal() {
    for g in small_classes(4) {
        let cg = build_confusion(&g).unwrap();
        let (chi, col) = chromatic_number(&cg);
        let c = code_from_coloring(&cg, &col).unwrap();
        assert_eq!(c.len(), ceil_log2(chi));
        assert!(is_valid_code(&g, &c).unwrap().is_some());
    }
}

#[test]
fn fig1_two_row_code() {
    let g = parse_digraph("n 4 ; 1-2 2-3 1-3 2->4 4->1").unwrap();
    let c = IndexCode::from_lines(4, &["1110", "1001"]).unwrap();
    let tables = is_valid_code(&g, &c).unwrap().unwrap();
    // 16 tuples per receiver, each table keyed by distinct (codeword, priors) pairs
    assert!(tables.iter().all(|t| !t.is_empty() && t.len() <= 16));
    for x in 0..16u64 {
        let w = c.encode(indexcode::codec::Word::new(x, 4)).unwrap().bits;
        for t in &tables {
            assert_eq!(t.decode(w, x), Some(x >> t.receiver & 1 == 1));
        }
    }
}
