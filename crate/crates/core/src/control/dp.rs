//! Dynamic programs for control under GreedyAV and GreedyCost.
//!
//! Greedy rules process projects in a fixed order, so whether the
//! distinguished project `p` is funded depends only on the budget left when
//! `p` is reached. The table is indexed by (items processed, remaining
//! budget) and stores the least control weight reaching that state. Only
//! reachable states within the weight bound are stored; a missing cell plays
//! the role of the "more than r" sentinel.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;

use crate::instance::Instance;
use crate::rules::processing_order;
use crate::tiebreak::TieBreakOrder;

use super::{ControlAnswer, ControlError, ControlQuery, Goal, Operation, Solver, MAX_DP_STATES};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItemKind {
    /// Always present.
    Standard,
    /// Present unless deleted at cost `weight`.
    Deletable,
    /// Absent unless added at cost `weight`.
    Spoiler,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpItem {
    pub project: usize,
    pub cost: u64,
    pub weight: u64,
    pub kind: ItemKind,
}

impl DpItem {
    fn spend(&self, beta: u64) -> u64 {
        if beta >= self.cost {
            beta - self.cost
        } else {
            beta
        }
    }

    /// Outgoing moves as (controlled, next budget, added weight), controlled first.
    fn moves(&self, beta: u64) -> impl Iterator<Item = (bool, u64, u64)> {
        let (a, b) = match self.kind {
            ItemKind::Standard => (None, Some((false, self.spend(beta), 0))),
            ItemKind::Deletable => (Some((true, beta, self.weight)), Some((false, self.spend(beta), 0))),
            ItemKind::Spoiler => (Some((true, self.spend(beta), self.weight)), Some((false, beta, 0))),
        };
        a.into_iter().chain(b)
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    weight: u64,
    /// Previous budget and whether this item was controlled; `None` in layer 0.
    back: Option<(u64, bool)>,
}

/// Forward table of least control weights.
#[derive(Clone, Debug)]
pub struct DpTable {
    goal: Goal,
    bound: u64,
    start: u64,
    target: BigUint,
    items: Vec<DpItem>,
    layers: Vec<BTreeMap<u64, Cell>>,
}

impl DpTable {
    fn build(goal: Goal, bound: u64, start: u64, target: BigUint, items: Vec<DpItem>) -> Result<Self, ControlError> {
        let mut layers = Vec::with_capacity(items.len() + 1);
        let mut first = BTreeMap::new();
        first.insert(start, Cell { weight: 0, back: None });
        layers.push(first);
        let mut total = 1usize;
        for item in &items {
            let prev = layers.last().expect("layer 0 exists");
            let mut next: BTreeMap<u64, Cell> = BTreeMap::new();
            for (&beta, cell) in prev {
                for (controlled, to, dw) in item.moves(beta) {
                    let w = cell.weight.saturating_add(dw);
                    if w > bound {
                        continue;
                    }
                    let slot = next.entry(to).or_insert(Cell { weight: u64::MAX, back: None });
                    if w < slot.weight {
                        *slot = Cell { weight: w, back: Some((beta, controlled)) };
                    }
                }
            }
            total += next.len();
            if total > MAX_DP_STATES {
                return Err(ControlError::BudgetTooLarge(start.to_string()));
            }
            layers.push(next);
        }
        Ok(DpTable { goal, bound, start, target, items, layers })
    }

    pub fn items(&self) -> &[DpItem] {
        &self.items
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    /// Budget when the first item is reached.
    pub fn start_budget(&self) -> u64 {
        self.start
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Least weight reaching budget `beta` after `j` items, `None` if that
    /// exceeds the bound or the state is unreachable.
    pub fn get(&self, j: usize, beta: u64) -> Option<u64> {
        self.layers[j].get(&beta).map(|c| c.weight)
    }

    /// Reachable (budget, weight) pairs after `j` items.
    pub fn states(&self, j: usize) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.layers[j].iter().map(|(&b, c)| (b, c.weight))
    }

    /// Whether the distinguished project's fate meets the goal when it is
    /// reached with budget `beta`.
    pub fn goal_holds(&self, beta: u64) -> bool {
        let funded = BigUint::from(beta) >= self.target;
        match self.goal {
            Goal::Constructive => funded,
            Goal::Destructive => !funded,
        }
    }

    /// The controlled projects along the stored back-pointers into `(j, beta)`.
    pub fn extract(&self, j: usize, beta: u64) -> Option<Vec<usize>> {
        self.layers[j].get(&beta)?;
        let mut chosen = Vec::new();
        let mut b = beta;
        for layer in (1..=j).rev() {
            let (from, controlled) = self.layers[layer][&b].back.expect("non-initial cell has a back-pointer");
            if controlled {
                chosen.push(self.items[layer - 1].project);
            }
            b = from;
        }
        chosen.reverse();
        Some(chosen)
    }

    /// Least weight of a successful control action within the bound.
    pub fn optimum(&self) -> Option<u64> {
        self.layers[self.items.len()].iter().filter(|(&b, _)| self.goal_holds(b)).map(|(_, c)| c.weight).min()
    }

    /// Minimum-weight witness, lexicographically first in processing order.
    pub fn optimal_witness(&self) -> Option<(Vec<usize>, u64)> {
        let best = self.optimum()?;
        let k = self.items.len();
        // cost-to-go restricted to the forward-reachable states
        let mut togo: Vec<HashMap<u64, u64>> = vec![HashMap::new(); k + 1];
        for &b in self.layers[k].keys() {
            togo[k].insert(b, if self.goal_holds(b) { 0 } else { u64::MAX });
        }
        for j in (0..k).rev() {
            let (head, tail) = togo.split_at_mut(j + 1);
            let next = &tail[0];
            for &b in self.layers[j].keys() {
                let g = self.items[j]
                    .moves(b)
                    .filter_map(|(_, to, dw)| next.get(&to).map(|&g| g.saturating_add(dw)))
                    .min()
                    .unwrap_or(u64::MAX);
                head[j].insert(b, g);
            }
        }
        debug_assert_eq!(togo[0][&self.start], best);
        let mut chosen = Vec::new();
        let mut beta = self.start;
        let mut acc = 0u64;
        for (j, item) in self.items.iter().enumerate() {
            let (controlled, to, dw) = item
                .moves(beta)
                .find(|&(_, to, dw)| togo[j + 1].get(&to).is_some_and(|&g| g.saturating_add(acc + dw) == best))
                .expect("an optimal move exists");
            if controlled {
                chosen.push(item.project);
            }
            acc += dw;
            beta = to;
        }
        Some((chosen, best))
    }

    fn answer(&self, solver: Solver) -> ControlAnswer {
        match self.optimal_witness() {
            Some((w, weight)) => ControlAnswer::found(solver, w, weight),
            None => ControlAnswer::infeasible(solver),
        }
    }
}

fn to_u64(v: &BigUint) -> Result<u64, ControlError> {
    u64::try_from(v).map_err(|_| ControlError::BudgetTooLarge(v.to_string()))
}

fn check(query: &ControlQuery, instance: &Instance, op: Operation, solver: &'static str) -> Result<(), ControlError> {
    if !query.rule.is_greedy() {
        return Err(ControlError::Unsupported { solver, what: format!("rule {}", query.rule) });
    }
    if query.operation != op {
        return Err(ControlError::Unsupported { solver, what: format!("operation {}", query.operation) });
    }
    if query.max_size.is_some() {
        return Err(ControlError::Unsupported { solver, what: "a size cap".into() });
    }
    query.validate(instance)
}

/// Table for deletion control. Items are the projects processed before the
/// distinguished one that fit in the budget.
pub fn dp_delete_table(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
) -> Result<DpTable, ControlError> {
    check(query, instance, Operation::Delete, "dp-delete")?;
    let start = to_u64(instance.budget())?;
    let mut items = Vec::new();
    for q in processing_order(query.rule, instance, tiebreak) {
        if q == query.distinguished {
            break;
        }
        if instance.is_unfundable(q) {
            continue;
        }
        items.push(DpItem {
            project: q,
            cost: to_u64(instance.cost(q))?,
            weight: query.weight(q),
            kind: ItemKind::Deletable,
        });
    }
    DpTable::build(query.goal, query.bound, start, instance.cost(query.distinguished).clone(), items)
}

/// Table for addition control. Standard projects processed before the first
/// spoiler are folded into the starting budget.
pub fn dp_add_table(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
) -> Result<DpTable, ControlError> {
    check(query, instance, Operation::Add, "dp-add")?;
    let mut spoiler = vec![false; instance.num_projects()];
    for &s in &query.spoilers {
        spoiler[s] = true;
    }
    let mut remaining = instance.budget().clone();
    let mut pending: Vec<usize> = Vec::new();
    for q in processing_order(query.rule, instance, tiebreak) {
        if q == query.distinguished {
            break;
        }
        if instance.is_unfundable(q) {
            continue;
        }
        if pending.is_empty() && !spoiler[q] {
            if *instance.cost(q) <= remaining {
                remaining -= instance.cost(q);
            }
            continue;
        }
        pending.push(q);
    }
    let start = to_u64(&remaining)?;
    let mut items = Vec::with_capacity(pending.len());
    for q in pending {
        let kind = if spoiler[q] { ItemKind::Spoiler } else { ItemKind::Standard };
        items.push(DpItem { project: q, cost: to_u64(instance.cost(q))?, weight: query.weight(q), kind });
    }
    DpTable::build(query.goal, query.bound, start, instance.cost(query.distinguished).clone(), items)
}

/// Deletion control for GreedyAV and GreedyCost with arbitrary positive weights.
pub fn dp_delete_control(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
) -> Result<ControlAnswer, ControlError> {
    Ok(dp_delete_table(query, instance, tiebreak)?.answer(Solver::DpDelete))
}

/// Addition control for GreedyAV and GreedyCost with arbitrary positive weights.
pub fn dp_add_control(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
) -> Result<ControlAnswer, ControlError> {
    Ok(dp_add_table(query, instance, tiebreak)?.answer(Solver::DpAdd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::example_one;
    use crate::rules::RuleId;

    #[test]
    fn example_one_delete_c1() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Constructive, Operation::Delete, 1, 1);
        let a = dp_delete_control(&q, &e, &t).unwrap();
        assert!(a.feasible);
        assert_eq!(a.witness, Some(vec![0]));
        assert_eq!(a.weight, Some(1));
        let q0 = ControlQuery { bound: 0, ..q };
        assert!(!dp_delete_control(&q0, &e, &t).unwrap().feasible);
    }

    #[test]
    fn table_cells_match_prefix_simulation() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Destructive, Operation::Delete, 2, 5);
        let table = dp_delete_table(&q, &e, &t).unwrap();
        assert_eq!(table.items().iter().map(|i| i.project).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(table.get(1, 1), Some(0));
        assert_eq!(table.get(1, 2), Some(1));
        assert_eq!(table.get(2, 1), Some(0));
        assert_eq!(table.get(2, 0), Some(1));
        assert_eq!(table.extract(2, 0), Some(vec![0]));
        assert_eq!(table.optimal_witness(), Some((vec![0], 1)));
    }

    #[test]
    fn addition_rebases_budget() {
        // s (spoiler) sits between the standard projects a and p.
        let e = Instance::builder(3u32)
            .project("a", 1u32)
            .project("s", 2u32)
            .project("p", 2u32)
            .voters(3, &["a"])
            .voters(2, &["s"])
            .voter(&["p"])
            .build()
            .unwrap();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Destructive, Operation::Add, 2, 1).with_spoilers(vec![1]);
        let table = dp_add_table(&q, &e, &t).unwrap();
        assert_eq!(table.start_budget(), 2);
        assert_eq!(dp_add_control(&q, &e, &t).unwrap().witness, Some(vec![1]));
    }

    #[test]
    fn rejects_continuous_rules() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::Phragmen, Goal::Constructive, Operation::Delete, 1, 1);
        assert!(matches!(dp_delete_control(&q, &e, &t), Err(ControlError::Unsupported { .. })));
    }
}
