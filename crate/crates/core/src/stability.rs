//! Combinatorial stability verdicts for the vector bundle glued from a
//! rank-two limit series.
//!
//! Each component is semistable when its summands have equal degree (or it is
//! indecomposable of even degree), and then the glued bundle is semistable.
//! It fails to be stable exactly when slope-equal line subbundles chosen on
//! every component are identified by every node gluing. We track those
//! choices component by component:
//!
//! - on `L ⊕ L'` with `L ≠ L'` a chain picks one of the two summands;
//! - on an indecomposable bundle it picks the maximal subbundle;
//! - on `L ⊕ L` every direction is a subbundle `L`, so the chain can follow
//!   whatever the incoming gluing dictates, and the direction is then fixed
//!   at the next node.
//!
//! At a node the identification holds when forced, fails when the forced
//! pairs send the chosen direction elsewhere, and fails for a gluing flagged
//! generic. Without either, the node is indeterminate.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::chain::RankTwoBundle;
use crate::series::{Bundle, Component, ForcedPair, LimitSeries, Summand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    StrictlySemistable,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::StrictlySemistable => "strictly-semistable",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KillReason {
    /// The forced pairs send the chosen direction to another one.
    ConstrainedAway,
    /// A generic gluing does not identify two prescribed directions.
    GenericFree,
}

/// Direction a partial chain has selected on its last component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum ChainDirection {
    Summand(Summand),
    /// On `L ⊕ L`, determined by the gluing on its left.
    Carried,
    /// On `L ⊕ L`, not yet constrained by anything.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct ChainState {
    direction: ChainDirection,
    /// Passed through an indeterminate node.
    uncertain: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeKills {
    /// 1-based node index; node `n` joins components `n` and `n + 1`.
    pub node: usize,
    /// Partial chains on components `1..=n` alive before the node.
    pub alive_before: u64,
    /// Extensions to component `n + 1` that break at this node.
    pub killed: BTreeMap<KillReason, u64>,
    /// Partial chains on components `1..=n+1` alive after the node.
    pub alive_after: u64,
}

impl NodeKills {
    pub fn killed_total(&self) -> u64 {
        self.killed.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub semistable: bool,
    pub nodes: Vec<NodeKills>,
    /// Chains over the whole curve that survive every node.
    pub survivors: u64,
    /// Survivors that relied on at least one indeterminate node.
    pub uncertain_survivors: u64,
}

impl StabilityReport {
    /// Nodes where at least one partial chain broke.
    pub fn breaking_nodes(&self) -> impl Iterator<Item = &NodeKills> {
        self.nodes.iter().filter(|n| n.killed_total() > 0)
    }

    /// The last node that any partial chain reached alive.
    pub fn last_reached_node(&self) -> Option<usize> {
        self.nodes
            .iter()
            .rev()
            .find(|n| n.alive_before > 0)
            .map(|n| n.node)
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "semistable: {}",
            if self.semistable { "yes" } else { "no" }
        )?;
        for n in self.breaking_nodes() {
            let reasons: Vec<String> = n
                .killed
                .iter()
                .map(|(r, c)| format!("{c} {}", reason_name(*r)))
                .collect();
            writeln!(
                f,
                "node {} (C{}-C{}): {} alive, killed {}",
                n.node,
                n.node,
                n.node + 1,
                n.alive_before,
                reasons.join(", ")
            )?;
        }
        write!(
            f,
            "verdict: {} ({} surviving chains)",
            self.verdict, self.survivors
        )
    }
}

fn reason_name(r: KillReason) -> &'static str {
    match r {
        KillReason::ConstrainedAway => "constrained-away",
        KillReason::GenericFree => "generic-free",
    }
}

/// Component-wise semistability: equal-degree summands, or indecomposable of
/// even degree.
pub fn check_semistable(s: &LimitSeries) -> bool {
    s.rank == 2
        && s.components.iter().all(|c| match &c.bundle {
            Bundle::RankTwo(RankTwoBundle::Split { first, second }) => {
                first.degree() == second.degree()
            }
            Bundle::RankTwo(RankTwoBundle::Indecomposable { degree, .. }) => degree % 2 == 0,
            Bundle::Line(_) => false,
        })
}

/// What a chain may select on a component.
enum Choices {
    Summands(Vec<Summand>),
    AnyDirection,
}

fn choices(c: &Component) -> Choices {
    match &c.bundle {
        Bundle::RankTwo(RankTwoBundle::Split { first, second })
            if first == second && !c.is_free() =>
        {
            Choices::AnyDirection
        }
        Bundle::RankTwo(RankTwoBundle::Split { .. }) => {
            Choices::Summands(vec![Summand::First, Summand::Second])
        }
        Bundle::RankTwo(RankTwoBundle::Indecomposable { .. }) => {
            Choices::Summands(vec![Summand::First])
        }
        Bundle::Line(_) => Choices::Summands(Vec::new()),
    }
}

enum Step {
    Survives { uncertain: bool },
    Killed(KillReason),
}

fn step(from: ChainDirection, to: Summand, forced: &[ForcedPair], generic: bool) -> Step {
    if let ChainDirection::Summand(s) = from {
        if let Some(p) = forced.iter().find(|p| p.left == s) {
            return if p.right == to {
                Step::Survives { uncertain: false }
            } else {
                Step::Killed(KillReason::ConstrainedAway)
            };
        }
    }
    if from == ChainDirection::Open {
        return Step::Survives { uncertain: false };
    }
    // The gluing is injective, so a direction forced onto `to` from
    // elsewhere cannot also receive the chain's direction.
    if forced.iter().any(|p| p.right == to) {
        return Step::Killed(KillReason::ConstrainedAway);
    }
    if generic {
        Step::Killed(KillReason::GenericFree)
    } else {
        Step::Survives { uncertain: true }
    }
}

/// Enumerates destabilizing chains, one node at a time, and reports where
/// each candidate breaks. `generic[n]` flags node `n + 1`'s residual gluing
/// as generic.
pub fn check_stable(s: &LimitSeries, generic: &[bool]) -> StabilityReport {
    let semistable = check_semistable(s);
    let mut states: BTreeMap<ChainState, u64> = BTreeMap::new();
    if let Some(first) = s.components.first() {
        match choices(first) {
            Choices::AnyDirection => {
                states.insert(
                    ChainState {
                        direction: ChainDirection::Open,
                        uncertain: false,
                    },
                    1,
                );
            }
            Choices::Summands(list) => {
                for sm in list {
                    states.insert(
                        ChainState {
                            direction: ChainDirection::Summand(sm),
                            uncertain: false,
                        },
                        1,
                    );
                }
            }
        }
    }

    let mut nodes = Vec::with_capacity(s.nodes.len());
    for (n, gluing) in s.nodes.iter().enumerate() {
        let right = &s.components[n + 1];
        let is_generic = generic.get(n).copied().unwrap_or(false);
        let alive_before: u64 = states.values().sum();
        let mut next: BTreeMap<ChainState, u64> = BTreeMap::new();
        let mut killed: BTreeMap<KillReason, u64> = BTreeMap::new();
        for (state, count) in &states {
            match choices(right) {
                Choices::AnyDirection => {
                    let direction = if state.direction == ChainDirection::Open {
                        ChainDirection::Open
                    } else {
                        ChainDirection::Carried
                    };
                    *next
                        .entry(ChainState {
                            direction,
                            uncertain: state.uncertain,
                        })
                        .or_default() += count;
                }
                Choices::Summands(list) => {
                    for to in list {
                        match step(state.direction, to, &gluing.forced_pairs, is_generic) {
                            Step::Survives { uncertain } => {
                                *next
                                    .entry(ChainState {
                                        direction: ChainDirection::Summand(to),
                                        uncertain: state.uncertain || uncertain,
                                    })
                                    .or_default() += count;
                            }
                            Step::Killed(reason) => *killed.entry(reason).or_default() += count,
                        }
                    }
                }
            }
        }
        states = next;
        nodes.push(NodeKills {
            node: n + 1,
            alive_before,
            killed,
            alive_after: states.values().sum(),
        });
    }

    let survivors: u64 = states.values().sum();
    let uncertain_survivors: u64 = states
        .iter()
        .filter(|(s, _)| s.uncertain)
        .map(|(_, c)| c)
        .sum();
    let verdict = if !semistable {
        Verdict::Unknown
    } else if survivors > uncertain_survivors {
        Verdict::StrictlySemistable
    } else if uncertain_survivors > 0 {
        Verdict::Unknown
    } else {
        Verdict::Stable
    };
    StabilityReport {
        verdict,
        semistable,
        nodes,
        survivors,
        uncertain_survivors,
    }
}

/// Stability with every node's residual gluing taken generic, as the
/// generators intend.
pub fn check_stable_generic(s: &LimitSeries) -> StabilityReport {
    check_stable(s, &vec![true; s.nodes.len()])
}
