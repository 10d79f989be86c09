use crate::instance::Instance;
use crate::rules::Simulator;
use crate::tiebreak::TieBreakOrder;

use super::{prune_after_distinguished, ControlAnswer, ControlError, ControlQuery, Operation, Solver};

/// Deletion control for the greedy rules when every project costs the same.
///
/// Only the number of projects processed before `p` matters, so the cheapest
/// deletions are the lightest projects in front of it. Tries the prefixes of
/// that weight order (ties by processing order) from shortest to longest.
pub fn greedy_unit_cost_control(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
) -> Result<ControlAnswer, ControlError> {
    let solver = Solver::UnitCostGreedy;
    if !query.rule.is_greedy() {
        return Err(ControlError::Unsupported { solver: solver.name(), what: format!("rule {}", query.rule) });
    }
    if query.operation != Operation::Delete {
        return Err(ControlError::Unsupported { solver: solver.name(), what: "addition".into() });
    }
    query.validate(instance)?;
    if !instance.all_costs_equal() {
        return Err(ControlError::CostsNotEqual);
    }

    let pruned = prune_after_distinguished(instance, tiebreak, query.rule, query.distinguished);
    let sim = Simulator::new(query.rule, &pruned.instance, &pruned.tiebreak)?;
    let position: Vec<usize> = {
        let mut pos = vec![0; pruned.kept.len()];
        for (k, &i) in sim.order().iter().enumerate() {
            pos[i] = k;
        }
        pos
    };
    let mut sigma: Vec<usize> = (0..pruned.kept.len()).filter(|&i| i != pruned.distinguished).collect();
    sigma.sort_by_key(|&i| (query.weight(pruned.kept[i]), position[i]));

    let mut active = vec![true; pruned.kept.len()];
    let mut weight = 0u64;
    let longest = query.max_size.map_or(sigma.len(), |k| k.min(sigma.len()));
    for len in 0..=longest {
        if len > 0 {
            weight = weight.saturating_add(query.weight(pruned.kept[sigma[len - 1]]));
            active[sigma[len - 1]] = false;
        }
        if weight > query.bound {
            break;
        }
        if query.goal_met(sim.funds(Some(&active), pruned.distinguished)?) {
            let mut deleted = sigma[..len].to_vec();
            deleted.sort_by_key(|&i| position[i]);
            return Ok(ControlAnswer::found(solver, pruned.to_original(&deleted), weight));
        }
    }
    Ok(ControlAnswer::infeasible(solver))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{ControlQuery, Goal};
    use crate::rules::RuleId;

    fn unit_instance() -> Instance {
        Instance::builder(2u32)
            .project("a", 1u32)
            .project("b", 1u32)
            .project("c", 1u32)
            .project("p", 1u32)
            .voters(4, &["a"])
            .voters(3, &["b"])
            .voters(2, &["c"])
            .voter(&["p"])
            .build()
            .unwrap()
    }

    #[test]
    fn deletes_lightest_predecessors() {
        let e = unit_instance();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Constructive, Operation::Delete, 3, 2);
        let a = greedy_unit_cost_control(&q, &e, &t).unwrap();
        assert_eq!(a.witness, Some(vec![0, 1]));
        let q = q.with_weights(vec![5, 1, 1, 1]);
        let a = greedy_unit_cost_control(&q, &e, &t).unwrap();
        assert_eq!(a.witness, Some(vec![1, 2]));
        assert_eq!(a.weight, Some(2));
    }

    #[test]
    fn bound_too_small() {
        let e = unit_instance();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Constructive, Operation::Delete, 3, 1);
        assert!(!greedy_unit_cost_control(&q, &e, &t).unwrap().feasible);
    }

    #[test]
    fn rejects_unequal_costs() {
        let e = crate::instance::fixtures::example_one();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Constructive, Operation::Delete, 1, 1);
        assert_eq!(greedy_unit_cost_control(&q, &e, &t), Err(ControlError::CostsNotEqual));
    }
}
