//! Brill–Noether numerology and the itemized parameter count of a family of
//! rank-two limit linear series.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::chain::RankTwoBundle;
use crate::series::{validate_all, Bundle, LimitSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("series failed validation ({0}); refusing to count parameters")]
    Unvalidated(String),
    #[error("parameter count is defined for rank two only (got rank {0})")]
    UnsupportedRank(u32),
    #[error("k = {0} has no threshold (need k >= 1)")]
    UnsupportedK(u32),
    #[error("excess-dimension range for k = {k} fails at g = {g}: rho_K = {rho_k} <= rho = {rho}")]
    InconsistentRange {
        k: u32,
        g: u32,
        rho_k: i64,
        rho: i64,
    },
}

/// `r²(g-1) + 1 - k(k - d + r(g-1))`.
pub fn rho_general(r: i64, d: i64, g: i64, k: i64) -> i64 {
    r * r * (g - 1) + 1 - k * (k - d + r * (g - 1))
}

/// `3g - 3 - C(k+1, 2)`.
pub fn rho_canonical(g: i64, k: i64) -> i64 {
    3 * g - 3 - k * (k + 1) / 2
}

/// Smallest genus for which the rank-two canonical locus with `k` sections is
/// known nonempty with a component of the expected dimension.
pub fn theorem_threshold(k: u32) -> u32 {
    let k1 = k / 2;
    if k.is_multiple_of(2) {
        match k1 {
            0 | 1 => 3,
            2 => 5,
            _ => k1 * k1,
        }
    } else {
        k1 * k1 + k1 + 1
    }
}

/// Half-open genus interval `[lo, hi)` on which the locus inside
/// `B^k_{2,2g-2}` has dimension larger than `rho(2, 2g-2, g, k)`. Every
/// genus in the interval is checked.
pub fn corollary_range(k: u32) -> Result<(u32, u32), LedgerError> {
    if k == 0 {
        return Err(LedgerError::UnsupportedK(k));
    }
    let k1 = k / 2;
    let (lo, hi) = if k.is_multiple_of(2) {
        (k1 * k1, 2 * k1 * k1 - k1)
    } else {
        (k1 * k1 + k1 + 1, 2 * k1 * k1 + k1)
    };
    for g in lo..hi {
        let rho_k = rho_canonical(g.into(), k.into());
        let rho = rho_general(2, 2 * i64::from(g) - 2, g.into(), k.into());
        if rho_k <= rho {
            return Err(LedgerError::InconsistentRange { k, g, rho_k, rho });
        }
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionLedger {
    /// Per node: parameters of the fiber gluing.
    pub gluing_params: Vec<i64>,
    /// Per component: free line-bundle choices.
    pub moduli: Vec<i64>,
    /// Per component: dimension of the endomorphism algebra.
    pub endo_dim: Vec<i64>,
    /// Stable bundles have only scalar endomorphisms.
    pub stability_term: i64,
    pub total: i64,
}

impl DimensionLedger {
    pub fn gluing_subtotal(&self) -> i64 {
        self.gluing_params.iter().sum()
    }

    pub fn moduli_subtotal(&self) -> i64 {
        self.moduli.iter().sum()
    }

    pub fn endo_subtotal(&self) -> i64 {
        self.endo_dim.iter().sum()
    }

    /// 1-based indices of components with a four-dimensional endomorphism
    /// algebra.
    pub fn four_dimensional_endo(&self) -> Vec<usize> {
        self.endo_dim
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == 4)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

impl fmt::Display for DimensionLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[i64]| xs.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        writeln!(
            f,
            "gluing   {}  (subtotal {})",
            join(&self.gluing_params),
            self.gluing_subtotal()
        )?;
        writeln!(
            f,
            "moduli   {}  (subtotal {})",
            join(&self.moduli),
            self.moduli_subtotal()
        )?;
        writeln!(
            f,
            "endo     {}  (subtotal {})",
            join(&self.endo_dim),
            self.endo_subtotal()
        )?;
        writeln!(f, "stable   +{}", self.stability_term)?;
        write!(f, "total    {}", self.total)
    }
}

/// Counts the parameters of the family through a validated rank-two series,
/// reading every item off the series data.
pub fn count_dimension(s: &LimitSeries) -> Result<DimensionLedger, LedgerError> {
    if s.rank != 2 {
        return Err(LedgerError::UnsupportedRank(s.rank));
    }
    let report = validate_all(s);
    if !report.passed() {
        let failed: Vec<_> = report.failed().map(|c| c.kind.name()).collect();
        return Err(LedgerError::Unvalidated(failed.join(", ")));
    }
    let gluing_params: Vec<i64> = s.nodes.iter().map(|n| n.free_parameter_count()).collect();
    let moduli: Vec<i64> = s
        .components
        .iter()
        .map(|c| i64::from(c.moduli_freedom))
        .collect();
    let endo_dim: Vec<i64> = s
        .components
        .iter()
        .map(|c| match &c.bundle {
            Bundle::RankTwo(b @ RankTwoBundle::Split { .. })
                if !c.is_free() && b.has_equal_summands() =>
            {
                4
            }
            _ => 2,
        })
        .collect();
    let stability_term = 1;
    let total = gluing_params.iter().sum::<i64>() + moduli.iter().sum::<i64>()
        - endo_dim.iter().sum::<i64>()
        + stability_term;
    Ok(DimensionLedger {
        gluing_params,
        moduli,
        endo_dim,
        stability_term,
        total,
    })
}
