use ellchain::chain::RankTwoBundle;
use ellchain::search::canonical_form;
use ellchain::series::format::{from_json, from_text, to_json, to_text};
use ellchain::series::ForcedPair;
use ellchain::*;
use proptest::prelude::*;

fn cell() -> impl Strategy<Value = (u32, u32)> {
    (2u32..=8).prop_flat_map(|k| (theorem_threshold(k)..=24).prop_map(move |g| (g, k)))
}

/// Relabels rows with the given per-component permutations and swaps the
/// summands of the flagged components, keeping the series the same object.
fn scramble(s: &LimitSeries, perms: &[Vec<usize>], swaps: &[bool]) -> LimitSeries {
    // Only distinct split summands carry a label worth swapping.
    let swaps: Vec<bool> = s
        .components
        .iter()
        .zip(swaps)
        .map(|(c, &sw)| {
            sw && matches!(&c.bundle, Bundle::RankTwo(RankTwoBundle::Split { first, second }) if first != second)
        })
        .collect();
    let mut out = s.clone();
    for (i, c) in out.components.iter_mut().enumerate() {
        let mut rows = c.table.rows.clone();
        for (j, &p) in perms[i].iter().enumerate() {
            rows[p] = c.table.rows[j];
        }
        c.table.rows = rows;
        if swaps[i] {
            if let Bundle::RankTwo(RankTwoBundle::Split { first, second }) = &mut c.bundle {
                std::mem::swap(first, second);
            }
        }
    }
    for (n, node) in out.nodes.iter_mut().enumerate() {
        let mut m = vec![0; node.matching.len()];
        for (j, &t) in s.nodes[n].matching.iter().enumerate() {
            m[perms[n][j]] = perms[n + 1][t];
        }
        node.matching = m;
        for p in &mut node.forced_pairs {
            let left = if swaps[n] { p.left.other() } else { p.left };
            let right = if swaps[n + 1] {
                p.right.other()
            } else {
                p.right
            };
            *p = ForcedPair { left, right };
        }
    }
    out
}

fn scrambled_cell() -> impl Strategy<Value = (LimitSeries, Vec<Vec<usize>>, Vec<bool>)> {
    cell().prop_flat_map(|(g, k)| {
        let s = construct(g, k, false).unwrap();
        let m = s.components.len();
        let perms =
            proptest::collection::vec(Just((0..k as usize).collect::<Vec<_>>()).prop_shuffle(), m);
        let swaps = proptest::collection::vec(any::<bool>(), m);
        (Just(s), perms, swaps)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip_is_byte_identical((g, k) in cell()) {
        let s = construct(g, k, false).unwrap();
        let text = to_text(&s);
        let back = from_text(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(to_text(&back), text);
    }

    #[test]
    fn json_round_trip((g, k) in cell()) {
        let s = construct(g, k, false).unwrap();
        prop_assert_eq!(from_json(&to_json(&s)).unwrap(), s);
    }

    #[test]
    fn canonical_form_is_idempotent((s, perms, swaps) in scrambled_cell()) {
        let x = scramble(&s, &perms, &swaps);
        let c = canonical_form(&x);
        prop_assert_eq!(canonical_form(&c), c.clone());
        prop_assert_eq!(c, canonical_form(&s));
    }

    #[test]
    fn relabelled_series_still_validates((s, perms, swaps) in scrambled_cell()) {
        // Shape checks see the shuffled order; everything else is intrinsic.
        let x = scramble(&s, &perms, &swaps);
        let report = validate_all(&canonical_form(&x));
        prop_assert!(report.passed(), "{}", report);
    }

    #[test]
    fn node_sums_are_tight((g, k) in cell()) {
        let s = construct(g, k, false).unwrap();
        let a = s.twist;
        for n in 0..s.nodes.len() {
            let vs: i64 = s.components[n].table.rows.iter().map(|r| r.v).sum();
            let us: i64 = s.components[n + 1].table.rows.iter().map(|r| r.u).sum();
            prop_assert_eq!(vs + us, a * k as i64);
        }
    }

    #[test]
    fn excess_over_general_number(g in 1i64..60, k in 0i64..20) {
        prop_assert_eq!(
            rho_canonical(g, k) - rho_general(2, 2 * g - 2, g, k),
            k * (k - 1) / 2 - g
        );
    }

    #[test]
    fn split_determinant_is_the_tensor(p in -5i64..20, q in -5i64..20, p2 in -5i64..20, q2 in -5i64..20) {
        let b = RankTwoBundle::split((p, q), (p2, q2));
        prop_assert_eq!(determinant(&b).unwrap(), SplitLineBundle::new(p + p2, q + q2));
        prop_assert_eq!(b.degree(), p + q + p2 + q2);
    }

    #[test]
    fn canonical_restrictions_have_canonical_degree(g in 1u32..40, i in 1u32..40) {
        prop_assume!(i <= g);
        let l = canonical_restriction(i, g).unwrap();
        prop_assert_eq!(l.degree(), 2 * i64::from(g) - 2);
        prop_assert!(l.is_effective());
    }
}
