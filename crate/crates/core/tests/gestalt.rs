mod common;

use completion_analytics::diff::{
    comparison_lines, edit_fraction, find_longest_match, matching_blocks, similarity_ratio,
};
use proptest::collection::vec;
use proptest::prelude::*;

fn blocks(a: &[u8], b: &[u8]) -> Vec<common::Block> {
    matching_blocks(a, b)
        .iter()
        .map(|m| (m.a_start, m.b_start, m.length))
        .collect()
}

fn seq_pair() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (1u8..=4).prop_flat_map(|n| (vec(0..n, 0..=12), vec(0..n, 0..=12)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn blocks_match_brute_force((a, b) in seq_pair()) {
        prop_assert_eq!(blocks(&a, &b), common::oracle_blocks(&a, &b));
    }

    #[test]
    fn ratio_matches_brute_force((a, b) in seq_pair()) {
        let r = similarity_ratio(&a, &b);
        prop_assert_eq!((2 * r.matched_total, r.combined_length), common::oracle_ratio(&a, &b));
        prop_assert_eq!(r.value, common::oracle_ratio_value(&a, &b));
    }

    #[test]
    fn longest_match_in_subranges(
        (a, b) in seq_pair(),
        cuts in (0usize..=12, 0usize..=12, 0usize..=12, 0usize..=12),
    ) {
        let (alo, ahi) = (cuts.0.min(a.len()), cuts.1.min(a.len()));
        let (blo, bhi) = (cuts.2.min(b.len()), cuts.3.min(b.len()));
        let (alo, ahi) = (alo.min(ahi), alo.max(ahi));
        let (blo, bhi) = (blo.min(bhi), blo.max(bhi));
        let ours = find_longest_match(&a, &b, alo..ahi, blo..bhi).map(|m| (m.a_start, m.b_start, m.length));
        let oracle = common::oracle_longest(&a, &b, alo, ahi, blo, bhi);
        prop_assert_eq!(ours, (oracle.2 > 0).then_some(oracle));
    }

    #[test]
    fn blocks_are_ordered_and_disjoint((a, b) in seq_pair()) {
        let bs = blocks(&a, &b);
        for w in bs.windows(2) {
            prop_assert!(w[0].0 + w[0].2 <= w[1].0);
            prop_assert!(w[0].1 + w[0].2 <= w[1].1);
        }
        for &(i, j, k) in &bs {
            prop_assert!(k > 0);
            prop_assert_eq!(&a[i..i + k], &b[j..j + k]);
        }
    }

    #[test]
    fn ratio_bounds_and_identity(a in vec(0u8..4, 0..=12)) {
        prop_assert_eq!(similarity_ratio(&a, &a).value, 1.0);
        prop_assert_eq!(edit_fraction(&a, &a), 0.0);
        let r = similarity_ratio(&a, &[9u8, 9]).value;
        prop_assert!((0.0..=1.0).contains(&r));
    }
}

#[test]
fn empty_sequences() {
    let e: [u8; 0] = [];
    assert_eq!(similarity_ratio(&e, &e).value, 1.0);
    assert_eq!(similarity_ratio(&e, &[1u8]).value, 0.0);
    assert!(blocks(&e, &[1]).is_empty());
}

#[test]
fn tie_break_prefers_lowest_a_then_b() {
    // "ab" occurs twice in both; the first occurrence pair wins.
    let a = b"abxab";
    let b = b"abyab";
    let m = find_longest_match(a, b, 0..5, 0..5).unwrap();
    assert_eq!((m.a_start, m.b_start, m.length), (0, 0, 2));
    let m = find_longest_match(b"xaa", b"aa", 0..3, 0..2).unwrap();
    assert_eq!((m.a_start, m.b_start), (1, 0));
    let m = find_longest_match(b"a", b"aaa", 0..1, 0..3).unwrap();
    assert_eq!((m.a_start, m.b_start), (0, 0));
}

#[test]
fn line_edit_fraction_on_yaml_bodies() {
    let shown = "copy:\n  src: a\n  dest: b\n  owner: root\n  group: root\n  mode: '0644'";
    let committed = "copy:\n  src: a\n  dest: /etc/b\n  owner: root   \n  group: root\n  mode: '0644'";
    let (a, b) = (comparison_lines(shown), comparison_lines(committed));
    let r = similarity_ratio(&a, &b);
    assert_eq!((r.matched_total, r.combined_length), (5, 12));
    assert!((edit_fraction(&a, &b) - 1.0 / 6.0).abs() < 1e-12);
}
