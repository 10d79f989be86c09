//! Constructive and destructive control by deleting or adding projects.
//!
//! Solvers:
//!
//! * [`dp_delete_control`] / [`dp_add_control`]: pseudo-polynomial dynamic
//!   programs over the remaining budget, for GreedyAV and GreedyCost.
//! * [`greedy_unit_cost_control`]: weight-ordered prefix search when all
//!   projects cost the same.
//! * [`brute_force_control`] / [`count_solutions`]: exhaustive enumeration for
//!   any rule, optionally parallel.
//!
//! All solvers agree on the weighted "at most r" semantics and report a
//! minimum-weight witness.

mod brute;
mod dp;
mod prune;
mod unit_cost;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, InstanceError};
use crate::rules::{RuleError, RuleId, Simulator};
use crate::tiebreak::TieBreakOrder;

pub use brute::{brute_force_control, count_solutions, CountResult};
pub use dp::{dp_add_control, dp_add_table, dp_delete_control, dp_delete_table, DpItem, DpTable, ItemKind};
pub use prune::{prune_after_distinguished, Pruned};
pub use unit_cost::greedy_unit_cost_control;

/// DP tables larger than this many reachable states are refused.
pub const MAX_DP_STATES: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ControlError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("solver `{solver}` does not support {what}")]
    Unsupported { solver: &'static str, what: String },
    #[error("project costs are not all equal")]
    CostsNotEqual,
    #[error("addition control needs a non-empty spoiler set")]
    MissingSpoilers,
    #[error("deletion control does not take spoilers")]
    UnexpectedSpoilers,
    #[error("spoiler `{0}` is the distinguished project")]
    DistinguishedIsSpoiler(String),
    #[error("project `{0}` listed as spoiler twice")]
    DuplicateSpoiler(String),
    #[error("weights must be positive (project `{0}`)")]
    NonPositiveWeight(String),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("budget {0} is too large for the dynamic program")]
    BudgetTooLarge(String),
    #[error("weight of project `{0}` does not fit in 64 bits")]
    WeightOverflow(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Constructive,
    Destructive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Delete,
    Add,
}

impl FromStr for Goal {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constructive" | "cc" => Ok(Goal::Constructive),
            "destructive" | "dc" => Ok(Goal::Destructive),
            _ => Err(format!("unknown goal `{s}`")),
        }
    }
}

impl FromStr for Operation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delete" | "del" => Ok(Operation::Delete),
            "add" => Ok(Operation::Add),
            _ => Err(format!("unknown operation `{s}`")),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Goal::Constructive => "constructive",
            Goal::Destructive => "destructive",
        })
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Delete => "delete",
            Operation::Add => "add",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    DpDelete,
    DpAdd,
    UnitCostGreedy,
    BruteForce,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::DpDelete => "dp-delete",
            Solver::DpAdd => "dp-add",
            Solver::UnitCostGreedy => "unit-cost-greedy",
            Solver::BruteForce => "brute-force",
        }
    }
}

/// A control problem over an instance.
///
/// For addition control the instance holds both standard and spoiler
/// projects; `spoilers` marks the latter, which are inactive until added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlQuery {
    pub rule: RuleId,
    pub goal: Goal,
    pub operation: Operation,
    pub distinguished: usize,
    pub bound: u64,
    /// Per-project weights indexed like the instance; `None` means unit weights.
    pub weights: Option<Vec<u64>>,
    pub spoilers: Vec<usize>,
    /// Optional cap on the number of controlled projects, on top of the
    /// weight bound. Only the enumerating solvers accept it.
    pub max_size: Option<usize>,
}

impl ControlQuery {
    pub fn new(rule: RuleId, goal: Goal, operation: Operation, distinguished: usize, bound: u64) -> Self {
        ControlQuery {
            rule,
            goal,
            operation,
            distinguished,
            bound,
            weights: None,
            spoilers: Vec::new(),
            max_size: None,
        }
    }

    /// Resolves the distinguished project by id.
    pub fn for_project(
        instance: &Instance,
        rule: RuleId,
        goal: Goal,
        operation: Operation,
        project: &str,
        bound: u64,
    ) -> Result<Self, ControlError> {
        Ok(Self::new(rule, goal, operation, instance.require_index(project)?, bound))
    }

    pub fn with_spoilers(mut self, spoilers: Vec<usize>) -> Self {
        self.spoilers = spoilers;
        self
    }

    pub fn with_max_size(mut self, max_size: usize) -> Self {
        self.max_size = Some(max_size);
        self
    }

    pub fn with_weights(mut self, weights: Vec<u64>) -> Self {
        self.weights = Some(weights);
        self
    }

    /// Weight of each project equal to its cost.
    pub fn with_cost_weights(mut self, instance: &Instance) -> Result<Self, ControlError> {
        let mut w = Vec::with_capacity(instance.num_projects());
        for (i, p) in instance.projects().iter().enumerate() {
            let v: u64 =
                u64::try_from(&p.cost).map_err(|_| ControlError::WeightOverflow(instance.project_id(i).0.clone()))?;
            w.push(v);
        }
        self.weights = Some(w);
        Ok(self)
    }

    pub fn weight(&self, project: usize) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[project])
    }

    pub fn is_spoiler(&self, project: usize) -> bool {
        self.spoilers.contains(&project)
    }

    /// Checks the query against the instance.
    pub fn validate(&self, instance: &Instance) -> Result<(), ControlError> {
        let m = instance.num_projects();
        if self.distinguished >= m {
            return Err(InstanceError::UnknownProject(format!("#{}", self.distinguished)).into());
        }
        let mut seen = vec![false; m];
        for &s in &self.spoilers {
            if s >= m {
                return Err(InstanceError::UnknownProject(format!("#{s}")).into());
            }
            if s == self.distinguished {
                return Err(ControlError::DistinguishedIsSpoiler(instance.project_id(s).0.clone()));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(ControlError::DuplicateSpoiler(instance.project_id(s).0.clone()));
            }
        }
        match self.operation {
            Operation::Add if self.spoilers.is_empty() => return Err(ControlError::MissingSpoilers),
            Operation::Delete if !self.spoilers.is_empty() => return Err(ControlError::UnexpectedSpoilers),
            _ => {}
        }
        if let Some(w) = &self.weights {
            if w.len() != m {
                return Err(ControlError::WeightCount { expected: m, got: w.len() });
            }
            for i in self.pool_unordered(instance) {
                if w[i] == 0 {
                    return Err(ControlError::NonPositiveWeight(instance.project_id(i).0.clone()));
                }
            }
        }
        Ok(())
    }

    /// Projects the controller may touch, in index order.
    fn pool_unordered(&self, instance: &Instance) -> Vec<usize> {
        match self.operation {
            Operation::Delete => (0..instance.num_projects()).filter(|&i| i != self.distinguished).collect(),
            Operation::Add => {
                let mut s = self.spoilers.clone();
                s.sort_unstable();
                s
            }
        }
    }

    /// Controllable projects in canonical order: the greedy processing order
    /// for greedy rules, the tie-breaking order otherwise.
    pub fn pool(&self, instance: &Instance, tiebreak: &TieBreakOrder) -> Vec<usize> {
        let mut member = vec![false; instance.num_projects()];
        for i in self.pool_unordered(instance) {
            member[i] = true;
        }
        let order: Vec<usize> = if self.rule.is_greedy() {
            crate::rules::processing_order(self.rule, instance, tiebreak)
        } else {
            tiebreak.order().to_vec()
        };
        order.into_iter().filter(|&i| member[i]).collect()
    }

    /// Active mask after applying `chosen` (deleted or added projects).
    pub fn active_mask(&self, num_projects: usize, chosen: &[usize]) -> Vec<bool> {
        let mut active = vec![true; num_projects];
        match self.operation {
            Operation::Delete => {
                for &c in chosen {
                    active[c] = false;
                }
            }
            Operation::Add => {
                for &s in &self.spoilers {
                    active[s] = false;
                }
                for &c in chosen {
                    active[c] = true;
                }
            }
        }
        active
    }

    pub fn goal_met(&self, distinguished_funded: bool) -> bool {
        match self.goal {
            Goal::Constructive => distinguished_funded,
            Goal::Destructive => !distinguished_funded,
        }
    }

    /// Re-runs the rule with `chosen` applied and checks the goal.
    pub fn achieved_by(
        &self,
        instance: &Instance,
        tiebreak: &TieBreakOrder,
        chosen: &[usize],
    ) -> Result<bool, ControlError> {
        let sim = Simulator::new(self.rule, instance, tiebreak)?;
        let active = self.active_mask(instance.num_projects(), chosen);
        Ok(self.goal_met(sim.funds(Some(&active), self.distinguished)?))
    }

    pub fn weight_of(&self, chosen: &[usize]) -> u64 {
        chosen.iter().map(|&c| self.weight(c)).fold(0u64, |a, b| a.saturating_add(b))
    }
}

/// Answer of a control solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlAnswer {
    pub feasible: bool,
    /// Minimum-weight set of deleted (or added) projects when feasible.
    pub witness: Option<Vec<usize>>,
    pub weight: Option<u64>,
    pub solver: Solver,
    /// False when an enumeration stopped at its deadline before finishing.
    pub complete: bool,
}

impl ControlAnswer {
    pub(crate) fn found(solver: Solver, witness: Vec<usize>, weight: u64) -> Self {
        ControlAnswer { feasible: true, witness: Some(witness), weight: Some(weight), solver, complete: true }
    }

    pub(crate) fn infeasible(solver: Solver) -> Self {
        ControlAnswer { feasible: false, witness: None, weight: None, solver, complete: true }
    }
}

/// Worker count and optional deadline for the enumerating solvers.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// 0 or 1 runs on the calling thread.
    pub jobs: usize,
    pub deadline: Option<Instant>,
}

impl SearchOptions {
    pub fn sequential() -> Self {
        SearchOptions { jobs: 1, deadline: None }
    }

    pub fn with_jobs(jobs: usize) -> Self {
        SearchOptions { jobs, deadline: None }
    }

    pub(crate) fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Picks the fastest exact solver for the query: the dynamic programs for
/// greedy rules, brute force otherwise (or when the budget is too large for
/// a table).
pub fn solve(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
    options: SearchOptions,
) -> Result<ControlAnswer, ControlError> {
    query.validate(instance)?;
    if query.rule.is_greedy() && query.max_size.is_none() {
        let dp = match query.operation {
            Operation::Delete => dp_delete_control(query, instance, tiebreak),
            Operation::Add => dp_add_control(query, instance, tiebreak),
        };
        match dp {
            Err(ControlError::BudgetTooLarge(_)) => {}
            other => return other,
        }
    }
    brute_force_control(query, instance, tiebreak, options)
}
