use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::instance::Instance;
use crate::outcome::{Outcome, TraceEvent};
use crate::tiebreak::TieBreakOrder;

/// Non-increasing approval score, ties by the tie-breaking order.
pub(super) fn order_by_score(instance: &Instance, tiebreak: &TieBreakOrder) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.num_projects()).collect();
    order.sort_by(|&a, &b| {
        instance.score(b).cmp(&instance.score(a)).then_with(|| tiebreak.rank(a).cmp(&tiebreak.rank(b)))
    });
    order
}

/// Non-increasing score/cost, compared exactly by cross-multiplication.
pub(super) fn order_by_ratio(instance: &Instance, tiebreak: &TieBreakOrder) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.num_projects()).collect();
    order.sort_by(|&a, &b| {
        let lhs = BigUint::from(instance.score(b)) * instance.cost(a);
        let rhs = BigUint::from(instance.score(a)) * instance.cost(b);
        match lhs.cmp(&rhs) {
            Ordering::Equal => tiebreak.rank(a).cmp(&tiebreak.rank(b)),
            other => other,
        }
    });
    order
}

pub(super) fn run(instance: &Instance, order: &[usize], active: Option<&[bool]>) -> Outcome {
    let mut remaining = instance.budget().clone();
    let mut outcome = Outcome::default();
    for (round, &p) in order.iter().filter(|&&p| active.is_none_or(|a| a[p])).enumerate() {
        let cost = instance.cost(p);
        let fund = *cost <= remaining;
        if fund {
            remaining -= cost;
            outcome.funded.push(p);
        }
        outcome.trace.push(TraceEvent::processed(p, round + 1, fund));
    }
    outcome
}

/// Stops as soon as `project` is reached.
pub(super) fn funds(instance: &Instance, order: &[usize], active: Option<&[bool]>, project: usize) -> bool {
    let mut remaining = instance.budget().clone();
    for &p in order.iter().filter(|&&p| active.is_none_or(|a| a[p])) {
        let cost = instance.cost(p);
        if p == project {
            return *cost <= remaining;
        }
        if *cost <= remaining {
            remaining -= cost;
            if remaining.is_zero() {
                return false;
            }
        }
    }
    false
}

/// GreedyAV: projects by approval score, funded whenever they still fit.
pub fn greedy_av(instance: &Instance, tiebreak: &TieBreakOrder) -> Outcome {
    run(instance, &order_by_score(instance, tiebreak), None)
}

/// GreedyCost: as GreedyAV, ordered by score per unit of cost.
pub fn greedy_cost(instance: &Instance, tiebreak: &TieBreakOrder) -> Outcome {
    run(instance, &order_by_ratio(instance, tiebreak), None)
}
