use ellchain::chain::RankTwoBundle;
use ellchain::construct::{odd_split_prefix, requires_external_stability};
use ellchain::series::format::{from_text, to_text};
use ellchain::*;

fn grid() -> impl Iterator<Item = (u32, u32)> {
    (2..=8u32).flat_map(|k| (theorem_threshold(k)..=30).map(move |g| (g, k)))
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn goldens_are_reproduced() {
    for (g, k) in [(9, 4), (9, 6), (7, 3), (8, 5)] {
        let want = golden(&format!("g{g}_k{k}.txt"));
        assert_eq!(
            to_text(&construct(g, k, false).unwrap()),
            want,
            "(g, k) = ({g}, {k})"
        );
        assert_eq!(to_text(&from_text(&want).unwrap()), want);
    }
}

#[test]
fn every_grid_construction_validates_with_node_equality() {
    for (g, k) in grid() {
        let s = construct(g, k, false).unwrap();
        let report = validate_all(&s);
        assert!(report.passed(), "({g}, {k}):\n{report}");
        assert!(report.tight, "({g}, {k}) has a slack node");
        assert_eq!(s.components.len(), g as usize);
    }
}

#[test]
fn free_components_start_right_after_the_square_block() {
    for k1 in 1..=4u32 {
        for g in theorem_threshold(2 * k1)..=20 {
            let s = construct_even(g, 2 * k1).unwrap();
            for (i, c) in s.components.iter().enumerate() {
                let i = i as u32 + 1;
                assert_eq!(c.is_free(), i > k1 * k1, "g = {g}, k1 = {k1}, i = {i}");
            }
        }
    }
}

#[test]
fn second_kind_layer_components_repeat_their_v_values() {
    // Components i = L² + 2c + 2 carry two pairs of rows sharing v.
    let s = construct_even(9, 4).unwrap();
    let rows: Vec<(i64, i64)> = s.components[2]
        .table
        .rows
        .iter()
        .map(|r| (r.u, r.v))
        .collect();
    assert_eq!(rows, vec![(0, 7), (1, 7), (2, 5), (3, 5)]);
    let s = construct_even(9, 6).unwrap();
    let rows: Vec<(i64, i64)> = s.components[5]
        .table
        .rows
        .iter()
        .map(|r| (r.u, r.v))
        .collect();
    assert_eq!(rows, vec![(2, 5), (3, 5), (4, 3), (4, 3), (6, 1), (7, 1)]);
}

#[test]
fn tail_pairs_start_two_layers_up() {
    // On component 1 (layer 0) the repeated tail starts at e = 2.
    for k1 in 1..=4u32 {
        let g = theorem_threshold(2 * k1).max(k1 * k1 + 1);
        let s = construct_even(g, 2 * k1).unwrap();
        let rows = &s.components[0].table.rows;
        for e in 2..=k1 as usize {
            let u = e as i64 - 1;
            assert_eq!(rows[2 * e - 2].u, u);
            assert_eq!(rows[2 * e - 1].u, u);
        }
    }
}

#[test]
fn odd_marked_section_vanishing() {
    for k1 in 1..=3u32 {
        let k = 2 * k1 + 1;
        for g in theorem_threshold(k)..=25 {
            let s = construct_odd(g, k).unwrap();
            let at = (k1 * k1 + k1) as usize;
            match &s.components[at].bundle {
                Bundle::RankTwo(RankTwoBundle::Indecomposable {
                    degree,
                    marked_u,
                    marked_v,
                }) => {
                    assert_eq!(*degree, 2 * i64::from(g) - 2);
                    assert_eq!(*marked_u, i64::from(k1 * k1 + k1));
                    assert_eq!(*marked_v, i64::from(g) - 1 - i64::from(k1 * k1 + k1));
                }
                other => panic!("({g}, {k}): {other:?}"),
            }
            let last = s.components[at].table.rows.last().unwrap();
            assert_eq!(
                (last.u, last.v),
                (i64::from(k1 * k1 + k1), i64::from(g - 1 - k1 * k1 - k1))
            );
        }
    }
}

#[test]
fn gluing_counts_per_node() {
    for (g, k) in grid() {
        let s = construct(g, k, false).unwrap();
        for n in &s.nodes {
            let free = n.free_parameter_count();
            if k % 2 == 0 {
                assert!(free == 4 || free == 2, "({g}, {k}) {free}");
            } else {
                assert!(free == 4 || free == 3 || free == 2, "({g}, {k}) {free}");
            }
        }
    }
}

#[test]
fn threshold_refusals() {
    assert_eq!(
        construct(4, 4, false),
        Err(ConstructError::BelowThreshold {
            g: 4,
            k: 4,
            threshold: 5
        })
    );
    let msg = construct(8, 6, false).unwrap_err().to_string();
    assert!(msg.starts_with("below-theorem-threshold"), "{msg}");
    assert!(msg.contains("g \u{2265} 9"), "{msg}");
    assert!(construct(4, 4, true).is_ok());
}

#[test]
fn small_odd_case_is_valid_but_flagged() {
    let s = construct(3, 3, false).unwrap();
    assert!(validate_all(&s).passed());
    assert!(requires_external_stability(3, 3));
    assert!(!requires_external_stability(7, 5));
}

#[test]
fn odd_prefix_stops_before_the_indecomposable() {
    let s = construct_odd(8, 5).unwrap();
    let p = odd_split_prefix(&s).unwrap();
    assert_eq!(p.components.len(), 6);
    assert!(validate_all(&p).passed());
    assert!(p
        .components
        .iter()
        .all(|c| matches!(c.bundle, Bundle::RankTwo(RankTwoBundle::Split { .. }))));
}

#[test]
fn ledgers_match_expected_dimension() {
    for (g, k) in grid() {
        let s = construct(g, k, false).unwrap();
        let l = count_dimension(&s).unwrap();
        assert_eq!(
            l.total,
            rho_canonical(g.into(), k.into()),
            "({g}, {k})\n{l}"
        );
    }
}

#[test]
fn rank_one_series_is_refused_by_the_ledger() {
    let s = canonical_limit_series(5).unwrap();
    assert!(validate_all(&s).passed());
    assert_eq!(count_dimension(&s), Err(LedgerError::UnsupportedRank(1)));
}
