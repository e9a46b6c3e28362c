use std::collections::BTreeSet;

use thiserror::Error;

use super::{Bundle, Component, ForcedPair, Point, Row, Summand, VanishingTable};
use crate::chain::{RankTwoBundle, SplitLineBundle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("row {row} {value}: {reason}")]
pub struct Inadmissible {
    /// 1-based row index.
    pub row: usize,
    pub value: Row,
    pub reason: String,
}

/// Whether the fixed line bundle `l` has a section vanishing to exactly
/// `row` at `(P, Q)`.
///
/// `l(-uP-vQ)` has degree `t`. For `t = 1` there is a one-dimensional space
/// of such sections, and it vanishes to higher order unless the twist is
/// neither `O(P)` nor `O(Q)`. For `t = 0` there is a section only when the
/// twist is trivial.
fn carries_exact(l: SplitLineBundle, row: Row) -> bool {
    if row.u < 0 || row.v < 0 {
        return false;
    }
    let t = l.degree() - row.sum();
    match t {
        1 => {
            l != SplitLineBundle::new(row.u + 1, row.v)
                && l != SplitLineBundle::new(row.u, row.v + 1)
        }
        0 => l == row.as_bundle(),
        _ => false,
    }
}

/// Number of independent sections with exact vanishing `row` the component's
/// bundle can contribute to a section space.
pub fn row_capacity(component: &Component, row: Row) -> usize {
    if row.u < 0 || row.v < 0 {
        return 0;
    }
    match &component.bundle {
        Bundle::Line(l) => usize::from(carries_exact(*l, row)),
        Bundle::RankTwo(RankTwoBundle::Split { first, second }) => {
            if component.is_free() {
                // A general line bundle only has the `sum = degree - 1` sections.
                [first, second]
                    .iter()
                    .filter(|s| row.sum() == s.degree() - 1)
                    .count()
            } else {
                [first, second]
                    .iter()
                    .filter(|s| carries_exact(***s, row))
                    .count()
            }
        }
        Bundle::RankTwo(RankTwoBundle::Indecomposable {
            degree,
            marked_u,
            marked_v,
        }) => {
            if degree % 2 != 0 {
                return 0;
            }
            let half = degree / 2;
            let marked = Row::new(*marked_u, *marked_v);
            let marked_is_maximal = marked.sum() == half;
            if row == marked && marked_is_maximal {
                1
            } else if row.sum() == half - 1 {
                let swallowed = marked_is_maximal
                    && (marked == Row::new(row.u + 1, row.v)
                        || marked == Row::new(row.u, row.v + 1));
                2 - usize::from(swallowed)
            } else {
                0
            }
        }
    }
}

/// Checks that the table can be realised by sections of the bundle: every
/// distinct row value occurs at most as many times as there are summands
/// carrying a section with exactly that vanishing.
pub fn admissible_table(component: &Component, table: &VanishingTable) -> Result<(), Inadmissible> {
    let rows = &table.rows;
    for (idx, row) in rows.iter().enumerate() {
        if rows[..idx].contains(row) {
            continue;
        }
        let count = rows[idx..].iter().filter(|r| *r == row).count();
        let cap = row_capacity(component, *row);
        if count > cap {
            let reason = if cap == 0 {
                format!(
                    "sum {} is not chargeable to any summand of {}",
                    row.sum(),
                    describe(&component.bundle, component.is_free())
                )
            } else {
                format!("appears {count} times but only {cap} summand(s) can carry it")
            };
            return Err(Inadmissible {
                row: idx + 1,
                value: *row,
                reason,
            });
        }
    }
    Ok(())
}

pub fn is_admissible(component: &Component) -> bool {
    admissible_table(component, &component.table).is_ok()
}

fn describe(bundle: &Bundle, free: bool) -> String {
    match bundle {
        Bundle::Line(l) => l.to_string(),
        Bundle::RankTwo(RankTwoBundle::Split { first, second }) if free => {
            format!(
                "general bundle of degrees {}+{}",
                first.degree(),
                second.degree()
            )
        }
        Bundle::RankTwo(RankTwoBundle::Split { first, second }) => format!("{first}+{second}"),
        Bundle::RankTwo(RankTwoBundle::Indecomposable {
            degree,
            marked_u,
            marked_v,
        }) => format!("indecomposable deg {degree} marked ({marked_u},{marked_v})"),
    }
}

/// Direction in the fiber at a marked point of the leading term of a basis
/// section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeadingDirection {
    /// Two sections share this vanishing order, so their leading terms span
    /// the whole fiber.
    Spanning,
    /// The leading term lies in the given summand.
    Pinned(Summand),
    /// A single direction that no summand distinguishes.
    Unpinned,
}

/// Whether summand `l` can produce a section with vanishing at least `row`
/// whose order at `point` is exactly the row's.
fn leads_at(l: SplitLineBundle, row: Row, point: Point) -> bool {
    let t = l.degree() - row.sum();
    let blocker = match point {
        Point::P => SplitLineBundle::new(row.u + 1, row.v),
        Point::Q => SplitLineBundle::new(row.u, row.v + 1),
    };
    match t {
        t if t >= 2 => true,
        1 => l != blocker,
        0 => l == row.as_bundle(),
        _ => false,
    }
}

/// Leading direction at `point` of the section in row `j` (0-based).
pub fn leading_direction(component: &Component, j: usize, point: Point) -> LeadingDirection {
    let Some(row) = component.table.rows.get(j).copied() else {
        return LeadingDirection::Unpinned;
    };
    if component.table.multiplicity_at(point, point.order(&row)) > 1 {
        return LeadingDirection::Spanning;
    }
    match &component.bundle {
        Bundle::Line(_) => LeadingDirection::Unpinned,
        Bundle::RankTwo(RankTwoBundle::Indecomposable {
            marked_u, marked_v, ..
        }) => {
            if row == Row::new(*marked_u, *marked_v) {
                LeadingDirection::Pinned(Summand::First)
            } else {
                LeadingDirection::Unpinned
            }
        }
        Bundle::RankTwo(RankTwoBundle::Split { first, second }) => {
            if component.is_free() || first == second {
                return LeadingDirection::Unpinned;
            }
            match (leads_at(*first, row, point), leads_at(*second, row, point)) {
                (true, false) => LeadingDirection::Pinned(Summand::First),
                (false, true) => LeadingDirection::Pinned(Summand::Second),
                _ => LeadingDirection::Unpinned,
            }
        }
    }
}

/// Identifications the fiber gluing at a node is forced to make: one per
/// matched pair of sections whose leading directions are pinned on both
/// sides, deduplicated and sorted.
pub fn derive_forced_pairs(
    left: &Component,
    right: &Component,
    matching: &[usize],
) -> Vec<ForcedPair> {
    let mut pairs = BTreeSet::new();
    for (j, &m) in matching.iter().enumerate() {
        let l = leading_direction(left, j, Point::Q);
        let r = leading_direction(right, m, Point::P);
        if let (LeadingDirection::Pinned(a), LeadingDirection::Pinned(b)) = (l, r) {
            pairs.insert(ForcedPair { left: a, right: b });
        }
    }
    pairs.into_iter().collect()
}

/// A set of forced pairs is realisable by an isomorphism of fibers only if it
/// is a partial bijection.
pub fn forced_pairs_conflict(pairs: &[ForcedPair]) -> bool {
    let lefts: BTreeSet<_> = pairs.iter().map(|p| p.left).collect();
    let rights: BTreeSet<_> = pairs.iter().map(|p| p.right).collect();
    lefts.len() != pairs.len() || rights.len() != pairs.len()
}
