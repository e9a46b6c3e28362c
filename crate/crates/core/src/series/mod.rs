//! Limit linear series data on a chain: per-component bundles with vanishing
//! tables, per-node matchings with forced direction identifications, and the
//! global twist integer.
//!
//! Sections are tracked only through their vanishing orders at the two marked
//! points. On an elliptic component a section space is pinned down (and shown
//! to exist) by those orders, so every check here is combinatorial.

mod admissible;
pub mod format;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainCurve, RankTwoBundle, SplitLineBundle};

pub use admissible::{
    admissible_table, derive_forced_pairs, forced_pairs_conflict, is_admissible, leading_direction,
    row_capacity, Inadmissible, LeadingDirection,
};
pub use validate::{
    validate_all, validate_canonical_determinant, validate_degree_condition,
    validate_determinacy_condition, validate_node_condition, CheckKind, CheckOutcome,
    ValidationReport,
};

/// Vanishing orders `(u, v)` of one basis section at `(P, Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Row {
    pub u: i64,
    pub v: i64,
}

impl Row {
    pub const fn new(u: i64, v: i64) -> Self {
        Self { u, v }
    }

    pub const fn sum(&self) -> i64 {
        self.u + self.v
    }

    pub fn as_bundle(&self) -> SplitLineBundle {
        SplitLineBundle::new(self.u, self.v)
    }
}

impl From<(i64, i64)> for Row {
    fn from((u, v): (i64, i64)) -> Self {
        Self::new(u, v)
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// Vanishing orders of a basis of the section space, with `u` listed in
/// nondecreasing and `v` in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VanishingTable {
    pub rows: Vec<Row>,
}

impl VanishingTable {
    pub fn new(rows: Vec<Row>) -> Self {
        Self { rows }
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        Self::new(pairs.iter().map(|&p| p.into()).collect())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_ordered(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[0].u <= w[1].u && w[0].v >= w[1].v)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.rows.iter().all(|r| r.u >= 0 && r.v >= 0)
    }

    /// Largest number of rows sharing one vanishing value at `point`.
    pub fn max_multiplicity(&self, point: Point) -> usize {
        let mut values: Vec<i64> = self.rows.iter().map(|r| point.order(r)).collect();
        values.sort_unstable();
        values
            .chunk_by(|a, b| a == b)
            .map(<[i64]>::len)
            .max()
            .unwrap_or(0)
    }

    pub fn multiplicity_at(&self, point: Point, value: i64) -> usize {
        self.rows.iter().filter(|r| point.order(r) == value).count()
    }
}

/// One of the two marked points of a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Point {
    P,
    Q,
}

impl Point {
    pub fn order(self, row: &Row) -> i64 {
        match self {
            Point::P => row.u,
            Point::Q => row.v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bundle", rename_all = "snake_case")]
pub enum Bundle {
    Line(SplitLineBundle),
    RankTwo(RankTwoBundle),
}

impl Bundle {
    pub fn degree(&self) -> i64 {
        match self {
            Bundle::Line(l) => l.degree(),
            Bundle::RankTwo(b) => b.degree(),
        }
    }

    pub fn rank(&self) -> u32 {
        match self {
            Bundle::Line(_) => 1,
            Bundle::RankTwo(_) => 2,
        }
    }
}

/// Summand label of a rank-two bundle. For an indecomposable bundle `First`
/// names its maximal line subbundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Summand {
    First,
    Second,
}

impl Summand {
    pub fn index(self) -> u8 {
        match self {
            Summand::First => 1,
            Summand::Second => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Summand::First),
            2 => Some(Summand::Second),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Summand::First => Summand::Second,
            Summand::Second => Summand::First,
        }
    }
}

/// The gluing must send direction `left` of the fiber at `Q_i` to direction
/// `right` of the fiber at `P_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ForcedPair {
    pub left: Summand,
    pub right: Summand,
}

impl fmt::Display for ForcedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.left.index(), self.right.index())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeGluing {
    /// `matching[j]` is the row on the right component glued to row `j` on
    /// the left one (0-based; serialized 1-based).
    #[serde(with = "one_based")]
    pub matching: Vec<usize>,
    pub forced_pairs: Vec<ForcedPair>,
}

mod one_based {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[usize], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(m.iter().map(|x| x + 1))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<usize>, D::Error> {
        Vec::<usize>::deserialize(de)?
            .into_iter()
            .map(|x| {
                x.checked_sub(1)
                    .ok_or_else(|| D::Error::custom("matching indices are 1-based"))
            })
            .collect()
    }
}

impl NodeGluing {
    pub fn identity(k: usize) -> Self {
        Self {
            matching: (0..k).collect(),
            forced_pairs: Vec::new(),
        }
    }

    /// Parameters of the fiber gluing left after the forced identifications.
    pub fn free_parameter_count(&self) -> i64 {
        4 - self.forced_pairs.len() as i64
    }

    pub fn is_permutation(&self, k: usize) -> bool {
        if self.matching.len() != k {
            return false;
        }
        let mut seen = vec![false; k];
        for &m in &self.matching {
            if m >= k || seen[m] {
                return false;
            }
            seen[m] = true;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub bundle: Bundle,
    pub table: VanishingTable,
    /// 1 when the summands are a free choice of line bundle (stored through a
    /// representative), 0 when the bundle is pinned.
    pub moduli_freedom: u8,
}

impl Component {
    pub fn new(bundle: Bundle, table: VanishingTable, moduli_freedom: u8) -> Self {
        Self {
            bundle,
            table,
            moduli_freedom,
        }
    }

    pub fn is_free(&self) -> bool {
        self.moduli_freedom > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimitSeries {
    pub chain: ChainCurve,
    pub rank: u32,
    /// Dimension of each section space.
    pub k: usize,
    pub degree: i64,
    /// The twist integer `a`.
    pub twist: i64,
    pub components: Vec<Component>,
    pub nodes: Vec<NodeGluing>,
}

impl LimitSeries {
    pub fn genus(&self) -> u32 {
        self.chain.genus()
    }

    /// The first `length` components together with the nodes between them.
    pub fn prefix(&self, length: u32) -> Option<LimitSeries> {
        let chain = ChainCurve::prefix(self.chain.genus(), length).ok()?;
        let len = length as usize;
        if len > self.components.len() {
            return None;
        }
        Some(LimitSeries {
            chain,
            components: self.components[..len].to_vec(),
            nodes: self.nodes[..len - 1].to_vec(),
            ..self.clone()
        })
    }

    /// Rederive every node's forced pairs from the tables.
    pub fn refresh_forced_pairs(&mut self) {
        for n in 0..self.nodes.len() {
            let pairs = derive_forced_pairs(
                &self.components[n],
                &self.components[n + 1],
                &self.nodes[n].matching,
            );
            self.nodes[n].forced_pairs = pairs;
        }
    }
}
