//! Exhaustive enumeration of limit-series configurations under the balanced
//! split ansatz: every component carries a sum of two line bundles of degree
//! `g - 1` (rank two), or the canonical restriction (rank one).
//!
//! The search runs depth first over the components. For each component it
//! tries every bundle, then every admissible vanishing table, then every node
//! matching up to relabelling of identical rows. Results are combinatorial
//! solutions; nothing here says whether distinct solutions lie on distinct
//! components of the moduli space.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{canonical_restriction, ChainCurve, RankTwoBundle, SplitLineBundle};
use crate::series::format::{from_text, to_text};
use crate::series::{
    derive_forced_pairs, forced_pairs_conflict, row_capacity, validate_all, Bundle, Component,
    ForcedPair, LimitSeries, NodeGluing, Row, Summand, VanishingTable,
};

/// Environment variable overriding the default genus cap.
pub const CAP_ENV: &str = "ELLCHAIN_SEARCH_CAP";

pub fn default_cap(rank: u32) -> u32 {
    if rank == 1 {
        10
    } else {
        8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(
        "g = {g} exceeds the search cap {cap} for rank {rank}; raise it explicitly with --cap or {CAP_ENV}"
    )]
    CapExceeded { g: u32, cap: u32, rank: u32 },
    #[error("invalid search space: {0}")]
    BadSpace(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    pub g: u32,
    pub r: u32,
    pub k: usize,
    /// Number of components searched, counted from the left; `g` for the
    /// whole chain.
    pub length: u32,
    /// `None` reads the cap from the environment, then the default.
    pub cap: Option<u32>,
    /// `false` disables every prune and filters complete configurations
    /// with the validators instead.
    pub pruning: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SearchSpace {
    pub fn new(g: u32, r: u32, k: usize) -> Self {
        Self {
            g,
            r,
            k,
            length: g,
            cap: None,
            pruning: true,
            threads: None,
        }
    }

    pub fn with_length(mut self, length: u32) -> Self {
        self.length = length;
        self
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn slow(mut self) -> Self {
        self.pruning = false;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn degree(&self) -> i64 {
        2 * i64::from(self.g) - 2
    }

    pub fn twist(&self) -> i64 {
        if self.r == 1 {
            2 * i64::from(self.g) - 2
        } else {
            i64::from(self.g) - 1
        }
    }

    fn effective_cap(&self) -> u32 {
        self.cap
            .or_else(|| {
                std::env::var(CAP_ENV)
                    .ok()
                    .and_then(|v| v.trim().parse().ok())
            })
            .unwrap_or_else(|| default_cap(self.r))
    }

    fn check(&self) -> Result<(), SearchError> {
        if self.r != 1 && self.r != 2 {
            return Err(SearchError::BadSpace(format!(
                "rank {} (expected 1 or 2)",
                self.r
            )));
        }
        if self.k == 0 {
            return Err(SearchError::BadSpace("k must be positive".into()));
        }
        if self.g < 2 {
            return Err(SearchError::BadSpace("g must be at least 2".into()));
        }
        if self.length == 0 || self.length > self.g {
            return Err(SearchError::BadSpace(format!(
                "length {} not in 1..={}",
                self.length, self.g
            )));
        }
        let cap = self.effective_cap();
        if self.g > cap {
            return Err(SearchError::CapExceeded {
                g: self.g,
                cap,
                rank: self.r,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PruneStats {
    /// Rows cut because `v + u >= a` could not hold at the previous node.
    pub node_bound: u64,
    /// Partial tables cut because the remaining components cannot absorb
    /// the vanishing at `Q`.
    pub v_budget: u64,
    /// Matchings cut because the pinned directions cannot be glued.
    pub gluing_conflict: u64,
    /// Complete configurations rejected by the validators (slow mode only).
    pub rejected_leaves: u64,
}

impl PruneStats {
    fn add(&mut self, other: &PruneStats) {
        self.node_bound += other.node_bound;
        self.v_budget += other.v_budget;
        self.gluing_conflict += other.gluing_conflict;
        self.rejected_leaves += other.rejected_leaves;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub g: u32,
    pub r: u32,
    pub k: usize,
    pub length: u32,
    /// Number of combinatorial solutions up to canonical form.
    pub count: u64,
    /// Canonical forms in key order, truncated to the requested limit.
    pub solutions: Vec<LimitSeries>,
    #[serde(skip)]
    keys: BTreeSet<String>,
    pub nodes_expanded: u64,
    pub prunes: PruneStats,
    pub elapsed: Duration,
}

impl SearchReport {
    /// Whether the canonical form of `s` is among the solutions.
    pub fn contains(&self, s: &LimitSeries) -> bool {
        self.keys.contains(&canonical_key(s))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.keys.iter().map(String::as_str)
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "search g={} r={} k={} components 1..={}",
            self.g, self.r, self.k, self.length
        )?;
        writeln!(f, "combinatorial solutions: {}", self.count)?;
        writeln!(f, "nodes expanded: {}", self.nodes_expanded)?;
        writeln!(
            f,
            "prunes: node-bound {} v-budget {} gluing-conflict {} rejected-leaves {}",
            self.prunes.node_bound,
            self.prunes.v_budget,
            self.prunes.gluing_conflict,
            self.prunes.rejected_leaves
        )?;
        write!(f, "elapsed: {:.3}s", self.elapsed.as_secs_f64())
    }
}

/// Normal form: summands sorted by `(p, q)`, rows sorted by `(u, -v)`,
/// matchings rewritten and made canonical among identical rows, forced
/// pairs relabelled and sorted.
pub fn canonical_form(s: &LimitSeries) -> LimitSeries {
    let mut out = s.clone();
    let mut flipped = vec![false; s.components.len()];
    let mut inverse: Vec<Vec<usize>> = Vec::with_capacity(s.components.len());

    for (i, c) in out.components.iter_mut().enumerate() {
        if let Bundle::RankTwo(RankTwoBundle::Split { first, second }) = &mut c.bundle {
            if (first.p, first.q) > (second.p, second.q) {
                std::mem::swap(first, second);
                flipped[i] = true;
            }
        }
        let mut order: Vec<usize> = (0..c.table.rows.len()).collect();
        order.sort_by_key(|&j| (c.table.rows[j].u, -c.table.rows[j].v));
        let mut inv = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        c.table.rows = order.iter().map(|&j| c.table.rows[j]).collect();
        inverse.push(inv);
    }

    for (n, node) in out.nodes.iter_mut().enumerate() {
        let (Some(li), Some(ri)) = (inverse.get(n), inverse.get(n + 1)) else {
            continue;
        };
        let well_formed =
            node.matching.len() == li.len() && node.matching.iter().all(|&m| m < ri.len());
        if !well_formed {
            continue;
        }
        let mut moved = vec![0; node.matching.len()];
        for (j, &m) in node.matching.iter().enumerate() {
            moved[li[j]] = ri[m];
        }
        node.matching = normalize_matching(
            &out.components[n].table.rows,
            &out.components[n + 1].table.rows,
            &moved,
        );
        let relabel = |s: Summand, flip: bool| if flip { s.other() } else { s };
        for p in &mut node.forced_pairs {
            *p = ForcedPair {
                left: relabel(p.left, flipped[n]),
                right: relabel(p.right, flipped[n + 1]),
            };
        }
        node.forced_pairs.sort();
    }
    out
}

/// Keeps the multiset of matched value pairs and reassigns positions: each
/// left row, in order, takes the smallest available right value paired with
/// its own value, at the first free position holding that value.
fn normalize_matching(left: &[Row], right: &[Row], matching: &[usize]) -> Vec<usize> {
    let mut pairs: Vec<(Row, Row)> = matching
        .iter()
        .enumerate()
        .map(|(j, &m)| (left[j], right[m]))
        .collect();
    let mut used = vec![false; right.len()];
    let mut out = Vec::with_capacity(left.len());
    for l in left {
        let pos = pairs
            .iter()
            .enumerate()
            .filter(|(_, (a, _))| a == l)
            .min_by_key(|(_, (_, b))| right.iter().position(|r| r == b))
            .map(|(idx, _)| idx)
            .expect("pair multiset covers every left row");
        let (_, target) = pairs.swap_remove(pos);
        let slot = (0..right.len())
            .find(|&t| !used[t] && right[t] == target)
            .expect("target row present");
        used[slot] = true;
        out.push(slot);
    }
    out
}

/// Stable membership key: the text serialization of the canonical form.
pub fn canonical_key(s: &LimitSeries) -> String {
    to_text(&canonical_form(s))
}

/// Bundles the ansatz allows on component `i` (1-based).
fn bundle_options(space: &SearchSpace, i: u32) -> Vec<(Bundle, u8)> {
    let g = i64::from(space.g);
    if space.r == 1 {
        let l = canonical_restriction(i, space.g).expect("index within genus");
        return vec![(Bundle::Line(l), 0)];
    }
    let i = i64::from(i);
    let mut out = Vec::new();
    for p in 0..=(i - 1) {
        let p2 = 2 * i - 2 - p;
        let (q, q2) = (g - 1 - p, g - 1 - p2);
        if q < 0 || q2 < 0 || p2 > g - 1 {
            continue;
        }
        out.push((Bundle::RankTwo(RankTwoBundle::split((p, q), (p2, q2))), 0));
    }
    let rep = SplitLineBundle::new(i - 1, g - i);
    out.push((
        Bundle::RankTwo(RankTwoBundle::Split {
            first: rep,
            second: rep,
        }),
        1,
    ));
    out
}

/// Rows the component can carry at all, sorted by `(u, -v)`.
fn candidate_rows(component: &Component, max: i64) -> Vec<(Row, usize)> {
    let mut out = Vec::new();
    for u in 0..=max {
        for v in (0..=max).rev() {
            let row = Row::new(u, v);
            let cap = row_capacity(component, row);
            if cap > 0 {
                out.push((row, cap));
            }
        }
    }
    out
}

struct TableGen<'a> {
    k: usize,
    r: usize,
    candidates: &'a [(Row, usize)],
    /// Per-row lower bound on `u` (empty when unbounded).
    lower: &'a [i64],
    /// Minimum total of `v` over the table, or `None`.
    v_need: Option<i64>,
}

impl TableGen<'_> {
    fn run(&self, stats: &mut PruneStats, out: &mut Vec<VanishingTable>) {
        let mut rows = Vec::with_capacity(self.k);
        self.extend(0, 0, &mut rows, stats, out);
    }

    fn extend(
        &self,
        start: usize,
        v_sum: i64,
        rows: &mut Vec<Row>,
        stats: &mut PruneStats,
        out: &mut Vec<VanishingTable>,
    ) {
        let j = rows.len();
        if j == self.k {
            out.push(VanishingTable::new(rows.clone()));
            return;
        }
        for idx in start..self.candidates.len() {
            let (row, cap) = self.candidates[idx];
            if let Some(prev) = rows.last() {
                if row.v > prev.v {
                    continue;
                }
            }
            if let Some(&lo) = self.lower.get(j) {
                if row.u < lo {
                    stats.node_bound += 1;
                    continue;
                }
            }
            let same = rows.iter().filter(|x| **x == row).count();
            if same >= cap {
                continue;
            }
            if rows.iter().filter(|x| x.u == row.u).count() >= self.r
                || rows.iter().filter(|x| x.v == row.v).count() >= self.r
            {
                continue;
            }
            if let Some(need) = self.v_need {
                // Remaining rows have v at most row.v.
                let best = v_sum + row.v * (self.k - j) as i64;
                if best < need {
                    stats.v_budget += 1;
                    continue;
                }
            }
            rows.push(row);
            self.extend(idx, v_sum + row.v, rows, stats, out);
            rows.pop();
        }
    }
}

/// Every matching of `left` onto `right` up to relabelling identical rows,
/// in canonical position form. With `a = Some(a)`, only matchings with
/// `v + u >= a` on every pair.
fn canonical_matchings(left: &[Row], right: &[Row], a: Option<i64>) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Row, usize)> = Vec::new();
    for r in right {
        match groups.last_mut() {
            Some((g, n)) if g == r => *n += 1,
            _ => groups.push((*r, 1)),
        }
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(left.len());
    fn rec(
        left: &[Row],
        a: Option<i64>,
        groups: &mut [(Row, usize)],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let j = chosen.len();
        if j == left.len() {
            out.push(chosen.clone());
            return;
        }
        let start = if j > 0 && left[j] == left[j - 1] {
            chosen[j - 1]
        } else {
            0
        };
        for gi in start..groups.len() {
            if groups[gi].1 == 0 {
                continue;
            }
            if let Some(a) = a {
                if left[j].v + groups[gi].0.u < a {
                    continue;
                }
            }
            groups[gi].1 -= 1;
            chosen.push(gi);
            rec(left, a, groups, chosen, out);
            chosen.pop();
            groups[gi].1 += 1;
        }
    }
    rec(left, a, &mut groups, &mut chosen, &mut out);

    // Group choices to positions: first free slot holding that value.
    out.into_iter()
        .map(|choice| {
            let mut used = vec![false; right.len()];
            choice
                .iter()
                .map(|&gi| {
                    let target = groups[gi].0;
                    let slot = (0..right.len())
                        .find(|&t| !used[t] && right[t] == target)
                        .expect("group has a free slot");
                    used[slot] = true;
                    slot
                })
                .collect()
        })
        .collect()
}

#[derive(Default)]
struct Partial {
    keys: BTreeSet<String>,
    nodes_expanded: u64,
    prunes: PruneStats,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        if self.keys.len() < other.keys.len() {
            return other.merge(self);
        }
        self.keys.extend(other.keys);
        self.nodes_expanded += other.nodes_expanded;
        self.prunes.add(&other.prunes);
        self
    }
}

/// A bundle choice with the rows it can carry.
type BundleOption = (Component, Vec<(Row, usize)>);

struct Searcher<'a> {
    space: &'a SearchSpace,
    chain: ChainCurve,
    a: i64,
    /// Lower bound on the sum of `v` over the last component's table.
    base_need: i64,
    /// Per component (0-based): bundle options with their candidate rows.
    options: Vec<Vec<BundleOption>>,
}

impl<'a> Searcher<'a> {
    fn new(space: &'a SearchSpace) -> Self {
        let a = space.twist();
        let k = space.k as i64;
        let r = i64::from(space.r);
        let base_need = (0..k).map(|j| (k - 1 - j) / r).sum();
        let max = space.degree();
        let options = (1..=space.length)
            .map(|i| {
                bundle_options(space, i)
                    .into_iter()
                    .map(|(bundle, free)| {
                        let c = Component::new(bundle, VanishingTable::default(), free);
                        let rows = candidate_rows(&c, max);
                        (c, rows)
                    })
                    .collect()
            })
            .collect();
        Self {
            space,
            chain: ChainCurve::prefix(space.g, space.length).expect("length checked"),
            a,
            base_need,
            options,
        }
    }

    fn v_need(&self, i: usize) -> Option<i64> {
        if !self.space.pruning {
            return None;
        }
        let remaining = i64::from(self.space.length) - 1 - i as i64;
        Some(self.base_need + remaining * (self.space.k as i64 - i64::from(self.space.r)))
    }

    /// Candidate components at position `i` (0-based) following `prev`.
    fn components_at(
        &self,
        i: usize,
        prev: Option<&Component>,
        stats: &mut PruneStats,
    ) -> Vec<Component> {
        let lower: Vec<i64> = match (prev, self.space.pruning) {
            (Some(p), true) => p.table.rows.iter().map(|r| self.a - r.v).collect(),
            _ => Vec::new(),
        };
        let mut out = Vec::new();
        for (c, rows) in &self.options[i] {
            let mut tables = Vec::new();
            TableGen {
                k: self.space.k,
                r: self.space.r as usize,
                candidates: rows,
                lower: &lower,
                v_need: self.v_need(i),
            }
            .run(stats, &mut tables);
            out.extend(tables.into_iter().map(|t| Component {
                table: t,
                ..c.clone()
            }));
        }
        out
    }

    /// Gluings from `left` to `right` worth exploring.
    fn gluings(
        &self,
        left: &Component,
        right: &Component,
        stats: &mut PruneStats,
    ) -> Vec<NodeGluing> {
        let bound = self.space.pruning.then_some(self.a);
        canonical_matchings(&left.table.rows, &right.table.rows, bound)
            .into_iter()
            .filter_map(|matching| {
                let forced_pairs = derive_forced_pairs(left, right, &matching);
                if self.space.pruning && forced_pairs_conflict(&forced_pairs) {
                    stats.gluing_conflict += 1;
                    return None;
                }
                Some(NodeGluing {
                    matching,
                    forced_pairs,
                })
            })
            .collect()
    }

    fn series(&self, components: &[Component], nodes: &[NodeGluing]) -> LimitSeries {
        LimitSeries {
            chain: self.chain,
            rank: self.space.r,
            k: self.space.k,
            degree: self.space.degree(),
            twist: self.a,
            components: components.to_vec(),
            nodes: nodes.to_vec(),
        }
    }

    fn descend(
        &self,
        components: &mut Vec<Component>,
        nodes: &mut Vec<NodeGluing>,
        acc: &mut Partial,
    ) {
        acc.nodes_expanded += 1;
        let i = components.len();
        if i == self.space.length as usize {
            let s = self.series(components, nodes);
            if !self.space.pruning && !validate_all(&s).passed() {
                acc.prunes.rejected_leaves += 1;
                return;
            }
            acc.keys.insert(canonical_key(&s));
            return;
        }
        let prev = components.last().cloned();
        let next = self.components_at(i, prev.as_ref(), &mut acc.prunes);
        for c in next {
            match &prev {
                None => {
                    components.push(c);
                    self.descend(components, nodes, acc);
                    components.pop();
                }
                Some(p) => {
                    for gl in self.gluings(p, &c, &mut acc.prunes) {
                        components.push(c.clone());
                        nodes.push(gl);
                        self.descend(components, nodes, acc);
                        nodes.pop();
                        components.pop();
                    }
                }
            }
        }
    }
}

/// Enumerates the search space. `limit` bounds the number of solutions kept
/// in the report; the count is always exhaustive.
pub fn enumerate(space: &SearchSpace, limit: Option<usize>) -> Result<SearchReport, SearchError> {
    space.check()?;
    let start = Instant::now();
    let searcher = Searcher::new(space);
    let mut root_stats = PruneStats::default();
    let roots = searcher.components_at(0, None, &mut root_stats);

    let work = || {
        roots
            .par_iter()
            .map(|c| {
                let mut acc = Partial::default();
                searcher.descend(&mut vec![c.clone()], &mut Vec::new(), &mut acc);
                acc
            })
            .reduce(Partial::default, Partial::merge)
    };
    let mut total = match space.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SearchError::BadSpace(e.to_string()))?
            .install(work),
        None => work(),
    };
    total.prunes.add(&root_stats);
    total.nodes_expanded += 1;

    let solutions = total
        .keys
        .iter()
        .take(limit.unwrap_or(usize::MAX))
        .map(|k| from_text(k).expect("canonical keys parse"))
        .collect();
    Ok(SearchReport {
        g: space.g,
        r: space.r,
        k: space.k,
        length: space.length,
        count: total.keys.len() as u64,
        solutions,
        keys: total.keys,
        nodes_expanded: total.nodes_expanded,
        prunes: total.prunes,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{canonical_limit_series, construct_even};

    #[test]
    fn rank_one_small_genus_is_unique() {
        for g in 2..=5 {
            let rep = enumerate(&SearchSpace::new(g, 1, g as usize), None).unwrap();
            assert_eq!(rep.count, 1, "g = {g}");
            assert!(rep.contains(&canonical_limit_series(g).unwrap()));
        }
    }

    #[test]
    fn even_construction_found_at_g3() {
        let rep = enumerate(&SearchSpace::new(3, 2, 2), None).unwrap();
        assert!(rep.contains(&construct_even(3, 2).unwrap()));
        for s in &rep.solutions {
            assert!(validate_all(s).passed(), "{}", to_text(s));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate(&SearchSpace::new(9, 2, 4).with_cap(8), None).unwrap_err();
        assert_eq!(
            err,
            SearchError::CapExceeded {
                g: 9,
                cap: 8,
                rank: 2
            }
        );
        assert!(err.to_string().contains("raise it explicitly"));
    }

    #[test]
    fn limit_truncates_solutions_only() {
        let full = enumerate(&SearchSpace::new(4, 2, 2), None).unwrap();
        let cut = enumerate(&SearchSpace::new(4, 2, 2), Some(1)).unwrap();
        assert_eq!(full.count, cut.count);
        assert_eq!(cut.solutions.len(), 1.min(full.solutions.len()));
    }

    #[test]
    fn matchings_respect_identical_rows() {
        let left = [Row::new(0, 2), Row::new(0, 2)];
        let right = [Row::new(0, 2), Row::new(0, 2)];
        assert_eq!(canonical_matchings(&left, &right, None), vec![vec![0, 1]]);
        let right = [Row::new(0, 2), Row::new(1, 1)];
        assert_eq!(canonical_matchings(&left, &right, None), vec![vec![0, 1]]);
        let left = [Row::new(0, 2), Row::new(1, 0)];
        let all = canonical_matchings(&left, &right, None);
        assert_eq!(all, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            canonical_matchings(&left, &right, Some(1)),
            vec![vec![0, 1]]
        );
        assert!(canonical_matchings(&left, &right, Some(2)).is_empty());
    }

    #[test]
    fn canonical_form_swaps_and_sorts() {
        let s = construct_even(5, 4).unwrap();
        let c = canonical_form(&s);
        assert_eq!(canonical_form(&c), c);
        let mut swapped = s.clone();
        for comp in &mut swapped.components {
            if let Bundle::RankTwo(RankTwoBundle::Split { first, second }) = &mut comp.bundle {
                std::mem::swap(first, second);
            }
        }
        for n in &mut swapped.nodes {
            for p in &mut n.forced_pairs {
                *p = ForcedPair {
                    left: p.left.other(),
                    right: p.right.other(),
                };
            }
        }
        assert_eq!(canonical_form(&swapped), c);
    }
}
