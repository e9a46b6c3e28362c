use std::fmt;

use serde::Serialize;

use super::{
    admissible_table, derive_forced_pairs, forced_pairs_conflict, Bundle, LimitSeries, Point,
};
use crate::chain::{canonical_restriction, determinant, RankTwoBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Structure,
    TableShape,
    Admissibility,
    DegreeCondition,
    NodeCondition,
    Determinacy,
    CanonicalDeterminant,
    GluingConsistency,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Structure,
        CheckKind::TableShape,
        CheckKind::Admissibility,
        CheckKind::DegreeCondition,
        CheckKind::NodeCondition,
        CheckKind::Determinacy,
        CheckKind::CanonicalDeterminant,
        CheckKind::GluingConsistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Structure => "structure",
            CheckKind::TableShape => "table-shape",
            CheckKind::Admissibility => "admissibility",
            CheckKind::DegreeCondition => "degree-condition",
            CheckKind::NodeCondition => "node-condition",
            CheckKind::Determinacy => "determinacy",
            CheckKind::CanonicalDeterminant => "canonical-determinant",
            CheckKind::GluingConsistency => "gluing-consistency",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub kind: CheckKind,
    pub passed: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
    /// Every matched pair meets the node condition with equality.
    pub tight: bool,
    /// Checks that passed on a weaker criterion than the others.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, kind: CheckKind) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<24} {}",
                c.kind.name(),
                if c.passed { "pass" } else { "FAIL" }
            )?;
            for d in &c.diagnostics {
                writeln!(f, "    {d}")?;
            }
        }
        writeln!(
            f,
            "{:<24} {}",
            "node-equality",
            if self.tight { "yes" } else { "no" }
        )?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        if self.passed() {
            writeln!(f, "all checks passed")
        } else {
            let names: Vec<_> = self.failed().map(|c| c.kind.name()).collect();
            writeln!(f, "failed: {}", names.join(", "))
        }
    }
}

type Diagnostics = Vec<String>;

fn check_structure(s: &LimitSeries) -> Diagnostics {
    let mut out = Vec::new();
    let m = s.chain.length() as usize;
    if s.rank != 1 && s.rank != 2 {
        out.push(format!("rank {} unsupported (expected 1 or 2)", s.rank));
    }
    if s.twist <= 0 {
        out.push(format!("twist a = {} must be positive", s.twist));
    }
    if s.components.len() != m {
        out.push(format!(
            "{} components for a chain of length {m}",
            s.components.len()
        ));
    }
    if s.nodes.len() + 1 != s.components.len().max(1) {
        out.push(format!(
            "{} nodes for {} components",
            s.nodes.len(),
            s.components.len()
        ));
    }
    for (i, c) in s.components.iter().enumerate() {
        if c.table.len() != s.k {
            out.push(format!(
                "component {}: {} rows, expected k = {}",
                i + 1,
                c.table.len(),
                s.k
            ));
        }
        if c.bundle.rank() != s.rank {
            out.push(format!(
                "component {}: bundle rank {} != {}",
                i + 1,
                c.bundle.rank(),
                s.rank
            ));
        }
        if c.moduli_freedom > 1 {
            out.push(format!(
                "component {}: moduli_freedom {} not in {{0,1}}",
                i + 1,
                c.moduli_freedom
            ));
        }
        if c.is_free() && !matches!(c.bundle, Bundle::RankTwo(RankTwoBundle::Split { .. })) {
            out.push(format!(
                "component {}: only split rank-two bundles may be free",
                i + 1
            ));
        }
        match &c.bundle {
            Bundle::Line(l) if !l.is_effective() => {
                out.push(format!(
                    "component {}: bundle {l} has a negative coefficient",
                    i + 1
                ));
            }
            Bundle::RankTwo(b) if !b.is_well_formed() => {
                out.push(format!("component {}: malformed bundle {b:?}", i + 1));
            }
            _ => {}
        }
    }
    for (n, node) in s.nodes.iter().enumerate() {
        if !node.is_permutation(s.k) {
            out.push(format!(
                "node {}: matching is not a permutation of 1..={}",
                n + 1,
                s.k
            ));
        }
        if node.forced_pairs.len() > 2 {
            out.push(format!(
                "node {}: {} forced pairs (at most 2)",
                n + 1,
                node.forced_pairs.len()
            ));
        }
        if s.rank == 1 && !node.forced_pairs.is_empty() {
            out.push(format!(
                "node {}: rank-one gluings carry no forced pairs",
                n + 1
            ));
        }
    }
    out
}

fn check_table_shape(s: &LimitSeries) -> Diagnostics {
    let mut out = Vec::new();
    let r = s.rank as usize;
    for (i, c) in s.components.iter().enumerate() {
        let t = &c.table;
        if !t.is_nonnegative() {
            out.push(format!("component {}: negative vanishing order", i + 1));
        }
        for (j, w) in t.rows.windows(2).enumerate() {
            if w[0].u > w[1].u {
                out.push(format!("component {}: u decreases at row {}", i + 1, j + 2));
            }
            if w[0].v < w[1].v {
                out.push(format!("component {}: v increases at row {}", i + 1, j + 2));
            }
        }
        for p in [Point::P, Point::Q] {
            let mult = t.max_multiplicity(p);
            if mult > r {
                out.push(format!(
                    "component {}: a vanishing order at {:?} repeats {mult} times (rank {r})",
                    i + 1,
                    p
                ));
            }
        }
    }
    out
}

fn check_admissibility(s: &LimitSeries) -> Diagnostics {
    s.components
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            admissible_table(c, &c.table)
                .err()
                .map(|e| format!("component {}: {e}", i + 1))
        })
        .collect()
}

fn check_degree(s: &LimitSeries) -> Diagnostics {
    let m = s.components.len() as i64;
    let total: i64 = s.components.iter().map(|c| c.bundle.degree()).sum();
    let lhs = total - i64::from(s.rank) * (m - 1) * s.twist;
    if lhs == s.degree {
        Vec::new()
    } else {
        vec![format!(
            "sum of degrees {total} - {}*{}*{} = {lhs}, expected d = {}",
            s.rank,
            m - 1,
            s.twist,
            s.degree
        )]
    }
}

/// Returns diagnostics and whether every pair is tight.
fn check_nodes(s: &LimitSeries) -> (Diagnostics, bool) {
    let mut out = Vec::new();
    let mut tight = true;
    for (n, node) in s.nodes.iter().enumerate() {
        let (Some(left), Some(right)) = (s.components.get(n), s.components.get(n + 1)) else {
            out.push(format!("node {}: missing component", n + 1));
            tight = false;
            continue;
        };
        for (j, &m) in node.matching.iter().enumerate() {
            let (Some(l), Some(r)) = (left.table.rows.get(j), right.table.rows.get(m)) else {
                out.push(format!(
                    "node {}: row {} matched out of range",
                    n + 1,
                    j + 1
                ));
                tight = false;
                continue;
            };
            let sum = l.v + r.u;
            if sum < s.twist {
                out.push(format!(
                    "node {}: v^{}_{} + u^{}_{} = {} + {} = {sum} < a = {}",
                    n + 1,
                    n + 1,
                    j + 1,
                    n + 2,
                    m + 1,
                    l.v,
                    r.u,
                    s.twist
                ));
            }
            if sum != s.twist {
                tight = false;
            }
        }
    }
    (out, tight)
}

fn check_determinacy(s: &LimitSeries, notes: &mut Vec<String>) -> Diagnostics {
    let mut out = Vec::new();
    let a = s.twist;
    for (i, c) in s.components.iter().enumerate() {
        match &c.bundle {
            Bundle::Line(l) if l.degree() > a => {
                out.push(format!(
                    "component {}: degree {} > a = {a}",
                    i + 1,
                    l.degree()
                ));
            }
            Bundle::RankTwo(RankTwoBundle::Split { first, second }) => {
                for l in [first, second] {
                    if l.degree() > a {
                        out.push(format!(
                            "component {}: summand {l} of degree {} > a = {a}",
                            i + 1,
                            l.degree()
                        ));
                    }
                }
            }
            Bundle::RankTwo(RankTwoBundle::Indecomposable { degree, .. }) => {
                if *degree > 2 * a {
                    out.push(format!(
                        "component {}: indecomposable degree {degree} > 2a = {}",
                        i + 1,
                        2 * a
                    ));
                } else {
                    notes.push(format!(
                        "component {}: determinacy of the indecomposable bundle accepted on degree <= 2a",
                        i + 1
                    ));
                }
            }
            _ => {}
        }
    }
    out
}

fn check_canonical(s: &LimitSeries, notes: &mut Vec<String>) -> Diagnostics {
    let mut out = Vec::new();
    let g = s.chain.genus();
    for (i, c) in s.components.iter().enumerate() {
        let idx = i as u32 + 1;
        let Ok(expected) = canonical_restriction(idx, g) else {
            out.push(format!("component {idx}: index beyond genus {g}"));
            continue;
        };
        match &c.bundle {
            Bundle::Line(l) => {
                if *l != expected {
                    out.push(format!("component {idx}: {l} != canonical {expected}"));
                }
            }
            Bundle::RankTwo(b) => match determinant(b) {
                Ok(det) if det != expected => {
                    out.push(format!(
                        "component {idx}: determinant {det} != canonical {expected}"
                    ));
                }
                Ok(_) => {}
                Err(_) => {
                    if b.degree() != expected.degree() {
                        out.push(format!(
                            "component {idx}: degree {} != canonical degree {}",
                            b.degree(),
                            expected.degree()
                        ));
                    } else {
                        notes.push(format!(
                            "component {idx}: indecomposable determinant checked on degree only"
                        ));
                    }
                }
            },
        }
    }
    out
}

fn check_gluing(s: &LimitSeries) -> Diagnostics {
    let mut out = Vec::new();
    if s.rank != 2 {
        return out;
    }
    for (n, node) in s.nodes.iter().enumerate() {
        let (Some(left), Some(right)) = (s.components.get(n), s.components.get(n + 1)) else {
            continue;
        };
        let derived = derive_forced_pairs(left, right, &node.matching);
        if forced_pairs_conflict(&derived) {
            out.push(format!(
                "node {}: pinned directions cannot be glued by one isomorphism ({})",
                n + 1,
                join_pairs(&derived)
            ));
        }
        let mut stored = node.forced_pairs.clone();
        stored.sort();
        if stored != derived {
            out.push(format!(
                "node {}: stored forced pairs [{}] differ from derived [{}]",
                n + 1,
                join_pairs(&stored),
                join_pairs(&derived)
            ));
        }
    }
    out
}

fn join_pairs(pairs: &[super::ForcedPair]) -> String {
    pairs
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Degrees add up: `sum d_i - r(M-1)a = d`.
pub fn validate_degree_condition(s: &LimitSeries) -> bool {
    check_degree(s).is_empty()
}

/// Vanishing at each node: `v^i_j + u^{i+1}_{m(j)} >= a` for every matched pair.
pub fn validate_node_condition(s: &LimitSeries) -> bool {
    check_nodes(s).0.is_empty()
}

/// Sections are determined by their restrictions, through the sufficient
/// criterion that every summand has degree at most `a` (indecomposable
/// bundles: degree at most `2a`).
pub fn validate_determinacy_condition(s: &LimitSeries) -> bool {
    check_determinacy(s, &mut Vec::new()).is_empty()
}

pub fn validate_canonical_determinant(s: &LimitSeries) -> bool {
    check_canonical(s, &mut Vec::new()).is_empty()
}

pub fn validate_all(s: &LimitSeries) -> ValidationReport {
    let mut notes = Vec::new();
    let structure = check_structure(s);
    let structural_ok = structure.is_empty();
    let (node_diags, tight) = check_nodes(s);
    let mut checks = vec![
        outcome(CheckKind::Structure, structure),
        outcome(CheckKind::TableShape, check_table_shape(s)),
        outcome(CheckKind::Admissibility, check_admissibility(s)),
        outcome(CheckKind::DegreeCondition, check_degree(s)),
        outcome(CheckKind::NodeCondition, node_diags),
        outcome(CheckKind::Determinacy, check_determinacy(s, &mut notes)),
        outcome(
            CheckKind::CanonicalDeterminant,
            check_canonical(s, &mut notes),
        ),
    ];
    let gluing = if structural_ok {
        check_gluing(s)
    } else {
        vec!["skipped: malformed structure".to_owned()]
    };
    checks.push(outcome(CheckKind::GluingConsistency, gluing));
    ValidationReport {
        checks,
        tight: tight && structural_ok,
        notes,
    }
}

fn outcome(kind: CheckKind, diagnostics: Diagnostics) -> CheckOutcome {
    CheckOutcome {
        kind,
        passed: diagnostics.is_empty(),
        diagnostics,
    }
}
