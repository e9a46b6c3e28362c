//! Explicit limit linear series on a chain of `g` elliptic curves: the rank-one
//! limit canonical series and the rank-two series with canonical determinant
//! and `k` sections, for even `k = 2k₁` and odd `k = 2k₁ + 1`.
//!
//! The first `k₁²` components are grouped in layers: component `i` is written
//! as `i = layer² + 2c + ε`, and the layer data fixes both summands and the
//! vanishing table. Later components carry a free choice of line bundle of
//! degree `g - 1` together with its complement in the canonical restriction.

use thiserror::Error;

use crate::chain::{canonical_restriction, ChainCurve, RankTwoBundle, SplitLineBundle};
use crate::ledger::theorem_threshold;
use crate::series::{Bundle, Component, LimitSeries, NodeGluing, Row, VanishingTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("below-theorem-threshold: k = {k} requires g \u{2265} {threshold} (got g = {g})")]
    BelowThreshold { g: u32, k: u32, threshold: u32 },
    #[error("index {i} out of range 1..={max}")]
    IndexOutOfRange { i: u32, max: u32 },
    #[error("k = {k} is not supported (need k \u{2265} 2)")]
    UnsupportedK { k: u32 },
    #[error("genus {g} is too small (need g \u{2265} {min})")]
    GenusTooSmall { g: u32, min: u32 },
}

/// `i = layer² + 2c + eps` with `0 <= c <= layer - 1, eps ∈ {1, 2}` or
/// `c = layer, eps = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerDecomposition {
    pub i: u32,
    pub layer: u32,
    pub c: u32,
    pub eps: u32,
}

impl LayerDecomposition {
    /// `i = (layer + 1)²`, the components whose summands coincide.
    pub fn is_square(&self) -> bool {
        self.c == self.layer
    }
}

pub fn decompose_index(i: u32, k1: u32) -> Result<LayerDecomposition, ConstructError> {
    let max = k1 * k1;
    if i == 0 || i > max {
        return Err(ConstructError::IndexOutOfRange { i, max });
    }
    // layer is the largest integer with layer² < i.
    let mut layer = 0;
    while (layer + 1) * (layer + 1) < i {
        layer += 1;
    }
    let rest = i - layer * layer;
    let c = (rest - 1) / 2;
    let eps = rest - 2 * c;
    Ok(LayerDecomposition { i, layer, c, eps })
}

/// Whether `(g, k)` is the odd case `k₁ = 1, g = 3`, where the chain bundle
/// is only strictly semistable and stability of the locus is certified by a
/// different construction (the dual of the evaluation kernel).
pub fn requires_external_stability(g: u32, k: u32) -> bool {
    k == 3 && g == 3
}

fn row(u: i64, v: i64) -> Row {
    Row::new(u, v)
}

fn split(first: (i64, i64), second: (i64, i64)) -> Bundle {
    Bundle::RankTwo(RankTwoBundle::split(first, second))
}

/// Bundle and rows of component `i <= k₁²` for even `k = 2k₁`.
fn layered_component(g: u32, k1: u32, i: u32) -> Component {
    let d = decompose_index(i, k1).expect("index within the layered block");
    let (g, k1, i) = (i64::from(g), i64::from(k1), i64::from(i));
    let (l, c, eps) = (i64::from(d.layer), i64::from(d.c), i64::from(d.eps));

    let first = (c - l + i - 1, g - i - c + l);
    let second = (l - c + i - 1, g - i - l + c);

    let mut rows = Vec::with_capacity(2 * k1 as usize);
    let pair = |rows: &mut Vec<Row>, u: i64, v: i64| {
        rows.push(row(u, v));
        rows.push(row(u, v));
    };
    for e in 1..=c {
        pair(&mut rows, i + e - l - 3, g - i - e + l + 1);
    }
    if d.is_square() {
        pair(&mut rows, i - 1, g - i);
    } else {
        let one = eps == 1;
        rows.push(row(
            if one { i + c - l - 1 } else { i + c - l - 2 },
            g - i - c + l,
        ));
        rows.push(row(
            i + c - l - 1,
            if one {
                g - i - c + l - 1
            } else {
                g - i - c + l
            },
        ));
        for e in (c + 2)..=l {
            pair(&mut rows, i + e - l - 2, g - i - e + l);
        }
        rows.push(row(
            if one { i - c + l - 1 } else { i - c + l - 2 },
            g - i + c - l,
        ));
        rows.push(row(
            i + l - c - 1,
            if one {
                g - i - l + c - 1
            } else {
                g - i - l + c
            },
        ));
    }
    for e in (l + 2)..=k1 {
        pair(&mut rows, i + e - 2, g - i - e);
    }
    Component::new(split(first, second), VanishingTable::new(rows), 0)
}

/// Free component: a general `L ⊕ L'` with `L ⊗ L' = K|_{C_i}`, stored with
/// the representative `O((i-1)P + (g-i)Q)` for both summands.
fn free_component(g: u32, i: u32, rows: Vec<Row>) -> Component {
    let (g, i) = (i64::from(g), i64::from(i));
    let rep = (i - 1, g - i);
    Component::new(split(rep, rep), VanishingTable::new(rows), 1)
}

fn even_tail_rows(g: u32, k1: u32, i: u32) -> Vec<Row> {
    let (g, k1, i) = (i64::from(g), i64::from(k1), i64::from(i));
    (1..=k1)
        .flat_map(|e| {
            let r = row(i + e - k1 - 2, g - i + k1 - e);
            [r, r]
        })
        .collect()
}

fn assemble(g: u32, k: usize, components: Vec<Component>) -> LimitSeries {
    let length = components.len() as u32;
    let mut series = LimitSeries {
        chain: ChainCurve::prefix(g, length).expect("length within genus"),
        rank: 2,
        k,
        degree: 2 * i64::from(g) - 2,
        twist: i64::from(g) - 1,
        components,
        nodes: vec![NodeGluing::identity(k); length as usize - 1],
    };
    series.refresh_forced_pairs();
    series
}

fn check_k(k: u32) -> Result<(), ConstructError> {
    if k < 2 {
        Err(ConstructError::UnsupportedK { k })
    } else {
        Ok(())
    }
}

fn check_threshold(g: u32, k: u32, force: bool) -> Result<(), ConstructError> {
    let threshold = theorem_threshold(k);
    if g < threshold && !force {
        return Err(ConstructError::BelowThreshold { g, k, threshold });
    }
    if g < 2 {
        return Err(ConstructError::GenusTooSmall { g, min: 2 });
    }
    Ok(())
}

fn build_even(g: u32, k1: u32) -> LimitSeries {
    let components = (1..=g)
        .map(|i| {
            if i <= k1 * k1 {
                layered_component(g, k1, i)
            } else {
                free_component(g, i, even_tail_rows(g, k1, i))
            }
        })
        .collect();
    assemble(g, 2 * k1 as usize, components)
}

fn build_odd(g: u32, k1: u32) -> LimitSeries {
    let sq = k1 * k1;
    let indecomposable_at = sq + k1 + 1;
    let (gi, k1i, sqi) = (i64::from(g), i64::from(k1), i64::from(sq));
    let marked = (sqi + k1i, gi - 1 - sqi - k1i);
    let components = (1..=g)
        .map(|i| {
            let ii = i64::from(i);
            if i <= sq {
                let mut c = layered_component(g, k1, i);
                c.table.rows.push(row(ii + k1i - 1, gi - ii - k1i - 1));
                c
            } else if i < indecomposable_at {
                let m = ii - sqi;
                let first = (ii + m - k1i - 2, gi - ii - m + k1i + 1);
                let mut rows = Vec::with_capacity(2 * k1 as usize + 1);
                for e in 1..=k1i {
                    rows.push(row(
                        if e < m {
                            ii + e - k1i - 3
                        } else {
                            ii + e - k1i - 2
                        },
                        if e <= m {
                            gi - ii - e + k1i + 1
                        } else {
                            gi - ii - e + k1i
                        },
                    ));
                    rows.push(row(ii + e - k1i - 2, gi - ii - e + k1i));
                }
                rows.push(row(marked.0, marked.1));
                Component::new(split(first, marked), VanishingTable::new(rows), 0)
            } else if i == indecomposable_at {
                // Sum g-2 rows continue the transition tables; the marked
                // section closes the table.
                let mut us = vec![sqi - 1];
                for t in 1..k1i {
                    us.extend([sqi - 1 + t, sqi - 1 + t]);
                }
                us.push(sqi + k1i - 1);
                let mut rows: Vec<Row> = us.into_iter().map(|u| row(u, gi - 2 - u)).collect();
                rows.push(row(marked.0, marked.1));
                Component::new(
                    Bundle::RankTwo(RankTwoBundle::Indecomposable {
                        degree: 2 * gi - 2,
                        marked_u: marked.0,
                        marked_v: marked.1,
                    }),
                    VanishingTable::new(rows),
                    0,
                )
            } else {
                let mut rows = vec![row(ii - k1i - 2, gi - ii + k1i)];
                rows.extend(even_tail_rows(g, k1, i));
                free_component(g, i, rows)
            }
        })
        .collect();
    assemble(g, 2 * k1 as usize + 1, components)
}

/// The limit of the canonical series: rank one, `k = g`, `d = a = 2g - 2`.
pub fn canonical_limit_series(g: u32) -> Result<LimitSeries, ConstructError> {
    if g < 2 {
        return Err(ConstructError::GenusTooSmall { g, min: 2 });
    }
    let gi = i64::from(g);
    let components = (1..=g)
        .map(|i| {
            let ii = i64::from(i);
            let rows = (1..=gi)
                .map(|e| {
                    let u = if e < ii { ii - 3 + e } else { ii - 2 + e };
                    let v = if e <= ii {
                        2 * gi - ii - e
                    } else {
                        2 * gi - ii - e - 1
                    };
                    row(u, v)
                })
                .collect();
            let bundle = canonical_restriction(i, g).expect("index within chain");
            Component::new(Bundle::Line(bundle), VanishingTable::new(rows), 0)
        })
        .collect();
    Ok(LimitSeries {
        chain: ChainCurve::new(g).expect("g >= 2"),
        rank: 1,
        k: g as usize,
        degree: 2 * gi - 2,
        twist: 2 * gi - 2,
        components,
        nodes: vec![NodeGluing::identity(g as usize); g as usize - 1],
    })
}

/// Rank two, canonical determinant, `k = 2k₁` sections, twist `a = g - 1`.
pub fn construct_even(g: u32, k: u32) -> Result<LimitSeries, ConstructError> {
    construct_parity(g, k, false, true)
}

/// Rank two, canonical determinant, `k = 2k₁ + 1` sections, twist `a = g - 1`.
pub fn construct_odd(g: u32, k: u32) -> Result<LimitSeries, ConstructError> {
    construct_parity(g, k, false, false)
}

/// Dispatches on the parity of `k`. With `force`, generation proceeds below
/// the existence threshold; the result is then only as good as its
/// validation report.
pub fn construct(g: u32, k: u32, force: bool) -> Result<LimitSeries, ConstructError> {
    construct_parity(g, k, force, k.is_multiple_of(2))
}

fn construct_parity(
    g: u32,
    k: u32,
    force: bool,
    even: bool,
) -> Result<LimitSeries, ConstructError> {
    check_k(k)?;
    if (k.is_multiple_of(2)) != even {
        return Err(ConstructError::UnsupportedK { k });
    }
    check_threshold(g, k, force)?;
    let k1 = k / 2;
    Ok(if even {
        build_even(g, k1)
    } else {
        build_odd(g, k1)
    })
}

/// The odd-case components that lie before the indecomposable one. This is
/// the part of an odd construction the search ansatz covers.
pub fn odd_split_prefix(series: &LimitSeries) -> Option<LimitSeries> {
    let k1 = (series.k as u32).checked_sub(1)? / 2;
    let len = k1 * k1 + k1;
    series.prefix(len.max(1))
}

/// Representative line bundle stored for free summands on component `i`.
pub fn free_representative(g: u32, i: u32) -> SplitLineBundle {
    SplitLineBundle::new(i64::from(i) - 1, i64::from(g) - i64::from(i))
}
