//! Limit linear series of rank two with canonical determinant on chains of
//! elliptic curves.
//!
//! The crate builds the explicit series that show the rank-two canonical
//! Brill–Noether loci `B^k_{2,K}` are nonempty with a component of the
//! expected dimension `3g - 3 - C(k+1, 2)`, checks them against the limit
//! linear series conditions, counts the parameters of the resulting family,
//! and cross-checks the constructions against an exhaustive search.
//!
//! - [`chain`]: chains of elliptic curves and divisor classes `O(pP + qQ)`.
//! - [`series`]: limit linear series data, validators and the file format.
//! - [`construct`]: the explicit generators (rank one, even `k`, odd `k`).
//! - [`ledger`]: Brill–Noether numbers and the itemized dimension count.
//! - [`stability`]: combinatorial (semi)stability verdicts.
//! - [`search`]: brute-force enumeration with canonical forms.
//! - [`sweep`]: per-`(g, k)` summary rows and their CSV rendering.

pub mod chain;
pub mod construct;
pub mod ledger;
pub mod search;
pub mod series;
pub mod stability;
pub mod sweep;

pub use chain::{
    canonical_restriction, determinant, ChainCurve, ChainError, RankTwoBundle, SplitLineBundle,
};
pub use construct::{
    canonical_limit_series, construct, construct_even, construct_odd, decompose_index,
    ConstructError, LayerDecomposition,
};
pub use ledger::{
    corollary_range, count_dimension, rho_canonical, rho_general, theorem_threshold,
    DimensionLedger, LedgerError,
};
pub use series::{
    validate_all, Bundle, Component, LimitSeries, NodeGluing, Row, ValidationReport, VanishingTable,
};
pub use stability::{check_semistable, check_stable, StabilityReport, Verdict};
