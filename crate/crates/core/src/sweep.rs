//! One summary row per `(g, k)`: numerology, construction status, parameter
//! count and stability verdict, rendered as CSV.

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{construct, requires_external_stability};
use crate::ledger::{
    corollary_range, count_dimension, rho_canonical, rho_general, theorem_threshold,
};
use crate::series::validate_all;
use crate::stability::check_stable_generic;

/// Column order of the CSV output.
pub const COLUMNS: [&str; 10] = [
    "g",
    "k",
    "rho_K",
    "rho_2g2",
    "threshold_ok",
    "corollary_excess",
    "validated",
    "ledger_total",
    "ledger_matches",
    "stability",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub g: u32,
    pub k: u32,
    #[serde(rename = "rho_K")]
    pub rho_k: i64,
    pub rho_2g2: i64,
    pub threshold_ok: bool,
    /// `g` lies in the interval where the canonical locus is larger than
    /// expected inside `B^k_{2,2g-2}`.
    pub corollary_excess: bool,
    pub validated: bool,
    /// Empty when nothing was constructed.
    pub ledger_total: Option<i64>,
    pub ledger_matches: Option<bool>,
    /// `stable`, `strictly-semistable`, `unknown`, `external` (stability
    /// certified by another construction) or `-` (nothing constructed).
    pub stability: String,
}

/// Computes one cell. Below the threshold nothing is constructed.
pub fn sweep_row(g: u32, k: u32) -> SweepRow {
    let (gi, ki) = (i64::from(g), i64::from(k));
    let threshold_ok = g >= theorem_threshold(k);
    let corollary_excess = corollary_range(k)
        .map(|(lo, hi)| (lo..hi).contains(&g))
        .unwrap_or(false);
    let mut row = SweepRow {
        g,
        k,
        rho_k: rho_canonical(gi, ki),
        rho_2g2: rho_general(2, 2 * gi - 2, gi, ki),
        threshold_ok,
        corollary_excess,
        validated: false,
        ledger_total: None,
        ledger_matches: None,
        stability: "-".to_owned(),
    };
    if !threshold_ok {
        return row;
    }
    let Ok(series) = construct(g, k, false) else {
        return row;
    };
    row.validated = validate_all(&series).passed();
    if let Ok(ledger) = count_dimension(&series) {
        row.ledger_total = Some(ledger.total);
        row.ledger_matches = Some(ledger.total == row.rho_k);
    }
    row.stability = if requires_external_stability(g, k) {
        "external".to_owned()
    } else {
        check_stable_generic(&series).verdict.to_string()
    };
    row
}

/// All cells of the grid in `(g, k)` order, `g` outermost.
pub fn sweep(
    g_range: std::ops::RangeInclusive<u32>,
    k_range: std::ops::RangeInclusive<u32>,
) -> Vec<SweepRow> {
    let cells: Vec<(u32, u32)> = g_range
        .flat_map(|g| k_range.clone().map(move |k| (g, k)))
        .collect();
    cells.par_iter().map(|&(g, k)| sweep_row(g, k)).collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    if rows.is_empty() {
        w.write_record(COLUMNS).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("CSV is UTF-8")
}
