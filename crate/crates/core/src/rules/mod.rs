//! Resolute implementations of the four rules.
//!
//! Every rule can also run on a sub-election given by an `active` mask over
//! the instance's projects. Control solvers use this to delete or add
//! projects without rebuilding the instance.

mod equal_shares;
mod greedy;
mod phragmen;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::outcome::Outcome;
use crate::tiebreak::TieBreakOrder;

pub use equal_shares::{equal_shares, minimal_q};
pub use greedy::{greedy_av, greedy_cost};
pub use phragmen::phragmen;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("Equal-Shares needs at least one voter")]
    NoVoters,
    #[error("tie-breaking order covers {got} projects, instance has {expected}")]
    TieBreakMismatch { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "greedy-av")]
    GreedyAv,
    #[serde(rename = "greedy-cost")]
    GreedyCost,
    #[serde(rename = "phragmen")]
    Phragmen,
    #[serde(rename = "equal-shares")]
    EqualShares,
}

impl RuleId {
    pub const ALL: [RuleId; 4] = [RuleId::GreedyAv, RuleId::GreedyCost, RuleId::Phragmen, RuleId::EqualShares];

    /// GreedyAV and GreedyCost: processing order is fixed up front and
    /// unaffected by deleting or adding other projects.
    pub fn is_greedy(self) -> bool {
        matches!(self, RuleId::GreedyAv | RuleId::GreedyCost)
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::GreedyAv => "greedy-av",
            RuleId::GreedyCost => "greedy-cost",
            RuleId::Phragmen => "phragmen",
            RuleId::EqualShares => "equal-shares",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "greedy-av" | "greedyav" | "greedy" => Ok(RuleId::GreedyAv),
            "greedy-cost" | "greedycost" => Ok(RuleId::GreedyCost),
            "phragmen" | "phragmén" | "seq-phragmen" => Ok(RuleId::Phragmen),
            "equal-shares" | "equalshares" | "mes" => Ok(RuleId::EqualShares),
            other => Err(format!("unknown rule `{other}`")),
        }
    }
}

/// Runs `rule` on the whole instance.
pub fn evaluate(rule: RuleId, instance: &Instance, tiebreak: &TieBreakOrder) -> Result<Outcome, RuleError> {
    Simulator::new(rule, instance, tiebreak)?.run(None)
}

/// Order in which a greedy rule processes all projects of the instance.
pub fn processing_order(rule: RuleId, instance: &Instance, tiebreak: &TieBreakOrder) -> Vec<usize> {
    match rule {
        RuleId::GreedyCost => greedy::order_by_ratio(instance, tiebreak),
        _ => greedy::order_by_score(instance, tiebreak),
    }
}

/// A rule bound to an instance and tie-breaking order, ready to be run on
/// many sub-elections. Cheap to share between threads.
#[derive(Clone, Debug)]
pub struct Simulator<'a> {
    rule: RuleId,
    instance: &'a Instance,
    tiebreak: &'a TieBreakOrder,
    order: Vec<usize>,
}

impl<'a> Simulator<'a> {
    pub fn new(rule: RuleId, instance: &'a Instance, tiebreak: &'a TieBreakOrder) -> Result<Self, RuleError> {
        if tiebreak.len() != instance.num_projects() {
            return Err(RuleError::TieBreakMismatch { expected: instance.num_projects(), got: tiebreak.len() });
        }
        let order = if rule.is_greedy() { processing_order(rule, instance, tiebreak) } else { Vec::new() };
        Ok(Simulator { rule, instance, tiebreak, order })
    }

    pub fn rule(&self) -> RuleId {
        self.rule
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn tiebreak(&self) -> &'a TieBreakOrder {
        self.tiebreak
    }

    /// Greedy processing order (empty for the continuous rules).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Runs the rule on the projects with `active[i] == true` (all when `None`).
    pub fn run(&self, active: Option<&[bool]>) -> Result<Outcome, RuleError> {
        match self.rule {
            RuleId::GreedyAv | RuleId::GreedyCost => Ok(greedy::run(self.instance, &self.order, active)),
            RuleId::Phragmen => Ok(phragmen::run(self.instance, self.tiebreak, active)),
            RuleId::EqualShares => equal_shares::run(self.instance, self.tiebreak, active),
        }
    }

    /// Whether `project` is funded in the sub-election.
    pub fn funds(&self, active: Option<&[bool]>, project: usize) -> Result<bool, RuleError> {
        if self.rule.is_greedy() {
            return Ok(greedy::funds(self.instance, &self.order, active, project));
        }
        Ok(self.run(active)?.is_funded(project))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(r.name().parse::<RuleId>().unwrap(), r);
        }
        assert!("pav".parse::<RuleId>().is_err());
    }
}
