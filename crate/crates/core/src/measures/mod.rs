//! Project-strength measures built on control: how far a losing project is
//! from being funded.

mod baseline;
mod correlation;
mod probability;
mod strength;

use num_bigint::BigUint;
use thiserror::Error;

use crate::control::{
    brute_force_control, dp_delete_control, ControlAnswer, ControlError, ControlQuery, Goal, Operation, SearchOptions,
};
use crate::instance::Instance;
use crate::rational::{from_uint, Rational};
use crate::rules::{RuleError, RuleId, Simulator};
use crate::tiebreak::TieBreakOrder;

pub use baseline::{
    baseline_add_measure, baseline_cost_measure, AddScore, BaselineAdd, BaselineConfig, BaselineCost, CostScore,
    CostSearch,
};
pub use correlation::{pearson, pearson_f64};
pub use probability::{
    rivalry, rivalry_matrix, win_probability, win_probability_sampled, RivalryMatrix, SampledProbability,
};
pub use strength::{strength_report, Probability, ProjectStrength, StrengthConfig, StrengthReport};

/// Default cardinality cap for the enumerating measures.
pub const DEFAULT_CAP: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("r = {r} exceeds the {available} projects available for deletion")]
    TooManyDeletions { r: usize, available: usize },
    #[error("rivalry needs two distinct projects")]
    SameProject,
    #[error("correlation needs two sequences of equal length, got {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least two points")]
    TooFewPoints,
    #[error("correlation undefined: a sequence has zero variance")]
    ZeroVariance,
    #[error("enumeration stopped at the time budget")]
    Incomplete,
}

pub(crate) fn is_funded(
    instance: &Instance,
    rule: RuleId,
    tiebreak: &TieBreakOrder,
    project: usize,
) -> Result<bool, MeasureError> {
    Ok(Simulator::new(rule, instance, tiebreak)?.funds(None, project)?)
}

fn checked(answer: ControlAnswer) -> Result<ControlAnswer, MeasureError> {
    if answer.complete {
        Ok(answer)
    } else {
        Err(MeasureError::Incomplete)
    }
}

/// Fewest deletions that fund `distinguished`; 0 when it is already funded.
///
/// The greedy rules use the dynamic program without a cap. The other rules
/// enumerate deletion sets of size at most `cap` and return `None` when none
/// works.
pub fn min_deletion_size(
    instance: &Instance,
    rule: RuleId,
    distinguished: usize,
    tiebreak: &TieBreakOrder,
    cap: usize,
    options: SearchOptions,
) -> Result<Option<usize>, MeasureError> {
    if is_funded(instance, rule, tiebreak, distinguished)? {
        return Ok(Some(0));
    }
    let m = instance.num_projects() as u64;
    let query = ControlQuery::new(rule, Goal::Constructive, Operation::Delete, distinguished, m);
    if rule.is_greedy() {
        match dp_delete_control(&query, instance, tiebreak) {
            Ok(a) => return Ok(a.weight.map(|w| w as usize)),
            Err(ControlError::BudgetTooLarge(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let query = ControlQuery { bound: cap as u64, ..query };
    let a = checked(brute_force_control(&query, instance, tiebreak, options)?)?;
    Ok(a.weight.map(|w| w as usize))
}

/// Least-cost deletion set funding a project.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheapestDeletion {
    /// Deleted projects in processing (or tie-breaking) order.
    pub set: Vec<usize>,
    pub total_cost: BigUint,
    /// cost(p) / cost(set); `None` for the empty set.
    pub ratio: Option<Rational>,
}

/// Cheapest set of deletions (by total cost) that funds `distinguished`.
///
/// Greedy rules use the weighted dynamic program with weight = cost; the
/// other rules enumerate sets of at most `cap` projects.
pub fn cheapest_deletion(
    instance: &Instance,
    rule: RuleId,
    distinguished: usize,
    tiebreak: &TieBreakOrder,
    cap: usize,
    options: SearchOptions,
) -> Result<Option<CheapestDeletion>, MeasureError> {
    if is_funded(instance, rule, tiebreak, distinguished)? {
        return Ok(Some(CheapestDeletion { set: Vec::new(), total_cost: BigUint::default(), ratio: None }));
    }
    let query = ControlQuery::new(rule, Goal::Constructive, Operation::Delete, distinguished, u64::MAX);
    let answer = {
        let weighted = query.clone().with_cost_weights(instance)?;
        let total: u64 = weighted.weights.as_ref().map_or(0, |w| w.iter().fold(0u64, |a, &b| a.saturating_add(b)));
        let weighted = ControlQuery { bound: total, ..weighted };
        let dp = if rule.is_greedy() { Some(dp_delete_control(&weighted, instance, tiebreak)) } else { None };
        match dp {
            Some(Ok(a)) => a,
            Some(Err(ControlError::BudgetTooLarge(_))) | None => {
                checked(brute_force_control(&weighted.with_max_size(cap), instance, tiebreak, options)?)?
            }
            Some(Err(e)) => return Err(e.into()),
        }
    };
    Ok(answer.witness.map(|set| {
        let total_cost = instance.cost_of(&set);
        let ratio = (!set.is_empty()).then(|| from_uint(instance.cost(distinguished)) / from_uint(&total_cost));
        CheapestDeletion { set, total_cost, ratio }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::example_one;
    use crate::rational::from_u64;

    #[test]
    fn example_one_min_deletions() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        for rule in [RuleId::GreedyAv, RuleId::GreedyCost] {
            assert_eq!(min_deletion_size(&e, rule, 1, &t, 3, SearchOptions::sequential()).unwrap(), Some(1));
        }
        assert_eq!(min_deletion_size(&e, RuleId::GreedyAv, 0, &t, 3, SearchOptions::sequential()).unwrap(), Some(0));
    }

    #[test]
    fn example_one_cheapest() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let c = cheapest_deletion(&e, RuleId::GreedyAv, 1, &t, 3, SearchOptions::sequential()).unwrap().unwrap();
        assert_eq!(c.set, vec![0]);
        assert_eq!(c.total_cost, BigUint::from(1u32));
        assert_eq!(c.ratio, Some(from_u64(2)));
        let c = cheapest_deletion(&e, RuleId::GreedyAv, 0, &t, 3, SearchOptions::sequential()).unwrap().unwrap();
        assert!(c.set.is_empty() && c.ratio.is_none());
    }
}
