//! Chains of elliptic curves and divisor classes supported on the two marked
//! points of each component.
//!
//! Component `i` of a chain carries marked points `P_i` and `Q_i`; the node
//! `j` identifies `Q_j` with `P_{j+1}`. Because the marked points are generic,
//! a line bundle of the form `O(p·P + q·Q)` is determined by the pair `(p, q)`
//! and two such bundles agree exactly when their pairs agree.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("genus must be at least 1")]
    ZeroGenus,
    #[error("chain length {length} must lie in 1..={genus}")]
    BadLength { genus: u32, length: u32 },
    #[error("component index {index} out of range 1..={genus}")]
    IndexOutOfRange { index: u32, genus: u32 },
    #[error("determinant-class-unavailable: indecomposable bundles only record their degree")]
    DeterminantUnavailable,
}

/// A chain of `length` elliptic components taken from a curve of arithmetic
/// genus `genus`. Full chains have `length == genus`; shorter lengths
/// describe prefixes of a full chain and keep the genus for the canonical
/// restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainCurve {
    genus: u32,
    length: u32,
}

impl ChainCurve {
    pub fn new(genus: u32) -> Result<Self, ChainError> {
        Self::prefix(genus, genus)
    }

    pub fn prefix(genus: u32, length: u32) -> Result<Self, ChainError> {
        if genus == 0 {
            return Err(ChainError::ZeroGenus);
        }
        if length == 0 || length > genus {
            return Err(ChainError::BadLength { genus, length });
        }
        Ok(Self { genus, length })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Number of components actually present.
    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn node_count(&self) -> u32 {
        self.length - 1
    }

    pub fn is_full(&self) -> bool {
        self.length == self.genus
    }
}

/// The line bundle `O(p·P + q·Q)` on one elliptic component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SplitLineBundle {
    pub p: i64,
    pub q: i64,
}

impl SplitLineBundle {
    pub const fn new(p: i64, q: i64) -> Self {
        Self { p, q }
    }

    pub const fn degree(&self) -> i64 {
        self.p + self.q
    }

    /// Both coefficients nonnegative.
    pub const fn is_effective(&self) -> bool {
        self.p >= 0 && self.q >= 0
    }

    pub const fn tensor(&self, other: &Self) -> Self {
        Self::new(self.p + other.p, self.q + other.q)
    }
}

impl fmt::Display for SplitLineBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O({}P+{}Q)", self.p, self.q)
    }
}

impl From<(i64, i64)> for SplitLineBundle {
    fn from((p, q): (i64, i64)) -> Self {
        Self::new(p, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RankTwoBundle {
    Split {
        first: SplitLineBundle,
        second: SplitLineBundle,
    },
    /// The unique indecomposable bundle of the given degree whose maximal
    /// line subbundle carries a section vanishing to orders
    /// `(marked_u, marked_v)` at `(P, Q)`.
    Indecomposable {
        degree: i64,
        marked_u: i64,
        marked_v: i64,
    },
}

impl RankTwoBundle {
    pub fn split(first: impl Into<SplitLineBundle>, second: impl Into<SplitLineBundle>) -> Self {
        RankTwoBundle::Split {
            first: first.into(),
            second: second.into(),
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            RankTwoBundle::Split { first, second } => first.degree() + second.degree(),
            RankTwoBundle::Indecomposable { degree, .. } => *degree,
        }
    }

    pub fn summands(&self) -> Option<[SplitLineBundle; 2]> {
        match self {
            RankTwoBundle::Split { first, second } => Some([*first, *second]),
            RankTwoBundle::Indecomposable { .. } => None,
        }
    }

    /// True for `L ⊕ L`.
    pub fn has_equal_summands(&self) -> bool {
        matches!(self, RankTwoBundle::Split { first, second } if first == second)
    }

    /// Indecomposable: `marked_u + marked_v <= degree`, with nonnegative marks.
    pub fn is_well_formed(&self) -> bool {
        match self {
            RankTwoBundle::Split { first, second } => first.is_effective() && second.is_effective(),
            RankTwoBundle::Indecomposable {
                degree,
                marked_u,
                marked_v,
            } => *marked_u >= 0 && *marked_v >= 0 && marked_u + marked_v <= *degree,
        }
    }
}

/// Restriction of the canonical bundle to component `i`: `O((2i-2)P + (2g-2i)Q)`.
pub fn canonical_restriction(i: u32, g: u32) -> Result<SplitLineBundle, ChainError> {
    if g == 0 {
        return Err(ChainError::ZeroGenus);
    }
    if i == 0 || i > g {
        return Err(ChainError::IndexOutOfRange { index: i, genus: g });
    }
    let (i, g) = (i64::from(i), i64::from(g));
    Ok(SplitLineBundle::new(2 * i - 2, 2 * g - 2 * i))
}

pub fn determinant(bundle: &RankTwoBundle) -> Result<SplitLineBundle, ChainError> {
    match bundle {
        RankTwoBundle::Split { first, second } => Ok(first.tensor(second)),
        RankTwoBundle::Indecomposable { .. } => Err(ChainError::DeterminantUnavailable),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_restriction_values() {
        assert_eq!(
            canonical_restriction(1, 3).unwrap(),
            SplitLineBundle::new(0, 4)
        );
        assert_eq!(
            canonical_restriction(2, 3).unwrap(),
            SplitLineBundle::new(2, 2)
        );
        assert_eq!(
            canonical_restriction(9, 9).unwrap(),
            SplitLineBundle::new(16, 0)
        );
    }

    #[test]
    fn canonical_restriction_rejects_bad_index() {
        assert_eq!(
            canonical_restriction(0, 3),
            Err(ChainError::IndexOutOfRange { index: 0, genus: 3 })
        );
        assert!(canonical_restriction(4, 3).is_err());
        assert_eq!(canonical_restriction(1, 0), Err(ChainError::ZeroGenus));
    }

    #[test]
    fn determinant_of_split() {
        let b = RankTwoBundle::split((0, 8), (2, 6));
        assert_eq!(determinant(&b).unwrap(), SplitLineBundle::new(2, 14));
        assert_eq!(
            determinant(&b).unwrap(),
            canonical_restriction(2, 9).unwrap()
        );
        let zero = RankTwoBundle::split((0, 0), (0, 0));
        assert_eq!(determinant(&zero).unwrap(), SplitLineBundle::new(0, 0));
    }

    #[test]
    fn determinant_of_indecomposable_is_unavailable() {
        let b = RankTwoBundle::Indecomposable {
            degree: 12,
            marked_u: 2,
            marked_v: 4,
        };
        assert_eq!(determinant(&b), Err(ChainError::DeterminantUnavailable));
        assert_eq!(b.degree(), 12);
        assert!(b.is_well_formed());
    }

    #[test]
    fn chain_lengths() {
        let c = ChainCurve::new(5).unwrap();
        assert_eq!(c.node_count(), 4);
        assert!(c.is_full());
        assert!(ChainCurve::prefix(5, 6).is_err());
        assert!(ChainCurve::new(0).is_err());
        assert!(!ChainCurve::prefix(7, 2).unwrap().is_full());
    }

    proptest! {
        #[test]
        fn canonical_degrees_sum_to_2g_minus_2(g in 1u32..60) {
            let total: i64 = (1..=g).map(|i| canonical_restriction(i, g).unwrap().degree()).sum::<i64>();
            prop_assert_eq!(total, 2 * i64::from(g) * i64::from(g) - 2 * i64::from(g));
            for i in 1..=g {
                prop_assert_eq!(canonical_restriction(i, g).unwrap().degree(), 2 * i64::from(g) - 2);
            }
        }

        #[test]
        fn determinant_ignores_summand_order(p1 in 0i64..40, q1 in 0i64..40, p2 in 0i64..40, q2 in 0i64..40) {
            let ab = RankTwoBundle::split((p1, q1), (p2, q2));
            let ba = RankTwoBundle::split((p2, q2), (p1, q1));
            prop_assert_eq!(determinant(&ab).unwrap(), determinant(&ba).unwrap());
        }
    }
}
